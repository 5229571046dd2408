from fractions import Fraction

import pytest

from starembed.core import RequestSequence
from starembed.errors import InputError
from starembed.formats import (
    RESULTS_HEADER,
    dumps_sequence,
    format_ratio,
    loads_sequence,
    parse_probability,
    read_results_csv,
    results_csv,
)


def test_probability_parsing():
    assert parse_probability("2/3") == Fraction(2, 3)
    assert parse_probability("0.6667") == Fraction(6667, 10000)
    for bad in ("1.5", "abc", "1/0", "-0.1"):
        with pytest.raises(InputError):
            parse_probability(bad)


def test_sequence_roundtrip():
    seq = RequestSequence.of(5, 2, [(0, 1), (3, 4)])
    text = dumps_sequence(seq, {"generator": "x", "pivots": [1, 2]})
    back, meta = loads_sequence(text)
    assert back == seq and meta == {"generator": "x", "pivots": [1, 2]}
    empty, _ = loads_sequence(dumps_sequence(RequestSequence(3, 0)))
    assert len(empty) == 0


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"n": 3, "initial_center": 0}',
        '{"n": 3, "initial_center": 0, "requests": [[1, 1]]}',
        '{"n": 3, "initial_center": 0, "requests": [[0, 3]]}',
        '{"n": 3, "initial_center": 0, "requests": [[0, "1"]]}',
        '{"n": 3, "initial_center": 5, "requests": []}',
    ],
)
def test_bad_sequence_files(text):
    with pytest.raises(InputError):
        loads_sequence(text)


def test_results_csv():
    text = results_csv([{"seq_id": 0, "policy": "det-pt", "cost_mean": 1 / 3, "off_cost": None}])
    lines = text.splitlines()
    assert lines[0] == ",".join(RESULTS_HEADER)
    assert lines[0] == "seq_id,policy,seed,cost_mean,cost_stderr,opt_cost,off_cost,ratio_vs_opt,ratio_vs_off,blocks,violations"
    row = read_results_csv(text)[0]
    assert float(row["cost_mean"]) == 1 / 3 and row["off_cost"] == ""
    assert format_ratio(3, 0) == "undefined" and format_ratio(3, None) == ""
    with pytest.raises(InputError):
        read_results_csv("a,b\n1,2\n")
