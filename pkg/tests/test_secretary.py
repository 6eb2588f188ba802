import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shortlist_secretary.secretary import ReplacementConfig, ReplacementState, capture_experiment, secretary_max


def ref_records(values, u, cap):
    """Positions (1-based) of strict records at or after u, truncated to cap."""
    out, best = [], -math.inf
    for i, v in enumerate(values, start=1):
        if v > best:
            best = v
            if i >= u:
                out.append(i)
    return out[:cap]


class TestConfig:
    def test_u(self):
        assert ReplacementConfig(40, 0.1).u == 2

    def test_L(self):
        assert ReplacementConfig(10, 2 / math.e**2).L == 8
        assert ReplacementConfig(10, 0.2).L == 10

    def test_L_at_least_one(self):
        assert ReplacementConfig(5, 1.0).L == max(1, math.ceil(4 * math.log(2)))

    @pytest.mark.parametrize("delta", [0, -0.1, 1.5])
    def test_invalid_delta(self, delta):
        with pytest.raises(ValueError):
            ReplacementConfig(5, delta)


class TestStep:
    def test_record_at_u(self):
        st_ = ReplacementState(ReplacementConfig(40, 0.1))
        assert not st_.step(1.0, "a")
        assert st_.step(2.0, "b")

    def test_ninth_record_skipped(self):
        cfg = ReplacementConfig(20, 2 / math.e**2)
        st_ = ReplacementState(cfg)
        picked = [st_.step(float(v), v) for v in range(20)]
        first = cfg.u - 1
        assert sum(picked) == 8 and all(picked[first:first + 8]) and not picked[first + 8]

    def test_tie_skipped(self):
        st_ = ReplacementState(ReplacementConfig(3, 1.0))
        st_.step(2.0, 0)
        assert not st_.step(2.0, 1)
        assert st_.running_max == 2.0

    def test_neg_inf_dummy_never_record(self):
        st_ = ReplacementState(ReplacementConfig(2, 1.0))
        assert not st_.step(-math.inf, None)
        assert st_.step(0.0, 1)

    def test_too_many_steps(self):
        st_ = ReplacementState(ReplacementConfig(1, 0.5))
        st_.step(1.0)
        with pytest.raises(RuntimeError):
            st_.step(2.0)

    def test_finalize_early(self):
        st_ = ReplacementState(ReplacementConfig(2, 0.5))
        st_.step(1.0)
        with pytest.raises(RuntimeError):
            st_.finalize()


class TestFinalize:
    def test_empty(self):
        st_ = ReplacementState(ReplacementConfig(0, 0.5))
        assert st_.finalize() == ([], None)

    def test_single(self):
        assert secretary_max([3.0], 1.0).finalize()[1] == 0

    def test_best_of_three(self):
        st_ = ReplacementState(ReplacementConfig(3, 1.0))
        for item, v in (("x", 1), ("y", 5), ("z", 3)):
            st_.step(v, item)
        # 3 is not a record, so only x and y are shortlisted
        assert st_.finalize()[1] == "y"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), max_size=80), st.floats(0.01, 1.0))
def test_matches_reference_and_cap(values, delta):
    cfg = ReplacementConfig(len(values), delta)
    state = secretary_max(values, delta)
    positions = [p for p, _, _ in state.shortlist]
    assert positions == ref_records(values, cfg.u, cfg.L)
    assert len(state.shortlist) <= math.ceil(4 * math.log(2 / delta) - 1e-9) or len(state.shortlist) <= 1
    vals = [v for _, _, v in state.shortlist]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@settings(max_examples=200, deadline=None)
@given(st.permutations(list(range(30))), st.floats(0.05, 1.0))
def test_exact_capture_condition(perm, delta):
    values = [float(v) for v in perm]
    cfg = ReplacementConfig(len(values), delta)
    top = values.index(29.0) + 1
    earlier = [p for p in ref_records(values, cfg.u, len(values)) if p < top]
    state = secretary_max(values, delta)
    if top >= cfg.u and len(earlier) < cfg.L:
        assert state.finalize()[1] == top - 1


def test_capture_rate():
    values = np.random.default_rng(0).permutation(200).astype(float)
    res = capture_experiment(values, 0.2, 5000, seed=1)
    sigma = math.sqrt(0.8 * 0.2 / 5000)
    assert res.capture_rate >= 0.8 - 3 * sigma
    assert res.max_shortlist <= res.cap == 10


def test_selections_harmonic():
    # u = 1 needs N*delta/2 <= 1; no cap binds for delta=0.01 (L=22)
    n, trials = 100, 3000
    rng = np.random.default_rng(4)
    lengths = [len(secretary_max(rng.permutation(n).astype(float), 0.01).shortlist) for _ in range(trials)]
    sigma = np.std(lengths, ddof=1) / math.sqrt(trials)
    assert ReplacementConfig(n, 0.01).u == 1
    assert np.mean(lengths) <= math.log(n) + 1 + 3 * sigma
