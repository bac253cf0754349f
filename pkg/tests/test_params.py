import re

import pytest

from milnor_syntomic.params import HypothesisError, TruncationParams


def test_defaults_and_work_precision():
    p = TruncationParams()
    assert (p.p, p.e, p.q, p.n_prec, p.x_trunc, p.pd_level, p.m_pbase, p.win) == (5, 2, 2, 3, 30, 6, 1, 25)
    # N + q * ceil(log_5 30) + 2 = 3 + 2*3 + 2
    assert p.work_prec == 11


@pytest.mark.parametrize("kw, needle", [
    ({"p": 4}, "odd prime"),
    ({"p": 2}, "odd prime"),
    ({"e": 5}, "p ∤ e"),
    ({"e": 10}, "p ∤ e"),
    ({"q": 5}, "q < p"),
    ({"q": 0}, "q < p"),
    ({"n_prec": 0}, "N >= 1"),
    ({"x_trunc": 10}, "M >= e(L+1)"),
    ({"win": 20}, "W >= p^2"),
])
def test_hypotheses_are_enforced(kw, needle):
    with pytest.raises(HypothesisError, match=re.escape(needle)):
        TruncationParams(**kw)


def test_json_roundtrip_and_replace():
    p = TruncationParams(e=3, q=3)
    assert TruncationParams.from_json(p.to_json()) == p
    assert p.replace(q=2).q == 2 and p.replace(q=2).e == 3
