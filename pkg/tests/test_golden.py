"""Reference descriptors checked against hand-written golden files."""

import json
from pathlib import Path

import pytest

from milnor_syntomic import graded as G
from milnor_syntomic.params import TruncationParams

GOLDEN = Path(__file__).parent / "golden"


def _atoms(desc):
    return [[a["kind"], a["args"]] for a in desc.to_json()["atoms"]]


@pytest.mark.parametrize("name", ["case_vii_p5.json", "case_vii_p3.json"])
def test_case_vii_rows(name):
    data = json.loads((GOLDEN / name).read_text())
    p = data["p"]
    params = TruncationParams(p=p, e=1, q=data["q"], win=max(25, p * p))
    for row in data["rows"]:
        desc = G.reference_gr("vii", row["n"], data["q"], params)
        assert _atoms(desc) == row["atoms"], row["n"]
        assert str(desc) == row["text"], row["n"]


def test_case_i_descriptors():
    data = json.loads((GOLDEN / "case_i.json").read_text())
    params = TruncationParams()
    for row in data["rows"]:
        desc = G.reference_gr("i", 0, row["q"], params)
        assert _atoms(desc) == row["atoms"]
        assert str(desc) == row["text"]
