import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsfr_fva.balance import (
    RegulatoryConfig,
    WeightSchedule,
    book_rsf,
    compute_asf,
    compute_rsf,
    expected_series,
    nsfr_histogram,
    nsfr_series,
    required_debt,
    rsf_inputs,
    standard_debt,
)
from nsfr_fva.swap import ExposureProfile

money = st.floats(0.0, 1e9, allow_nan=False)


def exposure_from(values, im=1e6):
    v = np.atleast_2d(np.asarray(values, dtype=float))
    return ExposureProfile(v, -v, np.maximum(v, 0.0), im)


def test_rsf_examples():
    assert compute_rsf(5e6, 2e6, 0.0, 0.0) == pytest.approx(3e6)
    assert compute_rsf(0.0, 0.0, 8e6) == pytest.approx(1.6e6)
    # liability below the 10,000 floor is replaced by the floor
    assert compute_rsf(0.0, 0.0, 4000.0) == pytest.approx(2000.0)


def test_asf_examples():
    assert compute_asf(1e6, 0.0, 1.0) == 1e6
    assert compute_asf(1e6, 2e6, 0.5) == 2e6
    assert compute_asf(0.0, 3e6, 1.0) == 3e6
    with pytest.raises(ValueError):
        compute_asf(1e6, 1e6, 0.75)


def test_required_debt_examples():
    assert required_debt(150.0, 50.0, 0.5) == 200.0
    assert required_debt(70.0, 70.0, 1.0) == 0.0
    d = required_debt(100.0, 20.0, 1.0)
    assert d == 80.0
    assert compute_asf(20.0, d, 1.0) / 100.0 == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        required_debt(100.0, 20.0, 0.0)


def test_required_debt_clamped_when_capital_covers_rsf():
    assert required_debt(10.0, 50.0, 0.5) == 0.0


def test_standard_debt_examples():
    assert standard_debt(exposure_from([0.0], im=1e6))[0, 0] == 1e6
    assert standard_debt(exposure_from([0.0], im=0.0))[0, 0] == 0.0
    assert standard_debt(exposure_from([2.5e6], im=1e6), step=0)[0] == 3.5e6


def test_weight_schedule():
    w = WeightSchedule()
    assert w.asf_weight(0.5) == 0.5
    assert w.asf_weight(0.75) == 0.5
    assert w.asf_weight(1.0) == 1.0
    assert WeightSchedule(0.5).asf_weight(1.0) == 0.5
    assert w.asf_weight(2.0) == 1.0
    with pytest.raises(ValueError):
        w.asf_weight(0.25)
    with pytest.raises(ValueError):
        WeightSchedule(0.3)


def test_book_mapping():
    reg = RegulatoryConfig(reg_cap=5e5)
    e = exposure_from([[3e6, -8e6, 0.0]])
    nd, nc, dl = rsf_inputs(e, reg)
    np.testing.assert_array_equal(nd - nc, [[3e6 + 1e6, 1e6, 1e6]])
    np.testing.assert_array_equal(dl, [[0.0, 8e6, 0.0]])
    np.testing.assert_allclose(book_rsf(e, reg), [[4e6 + 2000, 1e6 + 1.6e6, 1e6 + 2000]])
    no_im = RegulatoryConfig(reg_cap=5e5, im_in_rsf=False)
    np.testing.assert_allclose(book_rsf(e, no_im), [[3e6 + 2000, 1.6e6, 2000]])


def test_pinned_rule_holds_nsfr_at_one():
    v = np.random.default_rng(0).normal(0, 5e6, (200, 61))
    state = nsfr_series(exposure_from(v), "nsfr_pinned", RegulatoryConfig(5e5), 0.5)
    mask = state.rsf > state.reg_cap
    assert mask.any()
    np.testing.assert_allclose(state.nsfr[mask], 1.0, atol=1e-12, rtol=0)
    assert np.all(state.debt >= 0)


def test_floor_branch_nsfr():
    # nothing on the book but capital: RSF is the floored liability charge alone
    e = exposure_from(np.zeros((3, 5)), im=0.0)
    state = nsfr_series(e, "standard", RegulatoryConfig(reg_cap=7000.0), 1.0)
    np.testing.assert_allclose(state.nsfr, 7000.0 / (0.2 * 10_000))


def test_unknown_rule():
    with pytest.raises(ValueError):
        nsfr_series(exposure_from([0.0]), "other", RegulatoryConfig(0.0), 1.0)


def test_pinned_debt_exceeds_standard_exactly_where_standard_nsfr_below_one():
    v = np.random.default_rng(1).normal(-2e6, 3e6, (500, 61))
    reg = RegulatoryConfig(5e5)
    e = exposure_from(v)
    for alpha in (0.5, 1.0):
        std = nsfr_series(e, "standard", reg, alpha)
        pin = nsfr_series(e, "nsfr_pinned", reg, alpha)
        assert np.array_equal(pin.debt >= std.debt, std.nsfr <= 1.0)


@given(rsf=money, cap=money, alpha=st.sampled_from([0.5, 1.0]))
def test_pinning_identity(rsf, cap, alpha):
    if rsf <= cap:
        assert required_debt(rsf, cap, alpha) == 0.0
        return
    d = required_debt(rsf, cap, alpha)
    assert compute_asf(cap, d, alpha) / rsf == pytest.approx(1.0, abs=1e-12, rel=0)


@given(rsf=money, cap=money, extra=money)
def test_required_debt_monotone(rsf, cap, extra):
    assert required_debt(rsf, cap, 1.0) <= required_debt(rsf, cap, 0.5)
    assert required_debt(rsf, cap + extra, 0.5) <= required_debt(rsf, cap, 0.5)


@given(assets=money, coll=money, liab=money)
def test_rsf_floor_keeps_nsfr_finite(assets, coll, liab):
    rsf = compute_rsf(assets, coll, liab)
    assert rsf >= 0.2 * 10_000
    assert np.isfinite(compute_asf(1e6, 1e6, 1.0) / rsf)


def test_histogram_shape_and_overflow():
    nsfr = np.array([[0.0, 0.05], [2.99, 3.0], [10.0, 0.5]]).T  # 2 steps x 3 paths
    edges, counts = nsfr_histogram(nsfr, buckets=50, lower=0.0, upper=3.0)
    assert edges.size == 51 and counts.shape == (3, 51)
    assert counts.sum(axis=1).tolist() == [2, 2, 2]
    assert counts[0, 0] == 2  # 0.0 and 0.05 share the first 0.06-wide bin
    assert counts[1, 49] == 1 and counts[1, 50] == 1
    assert counts[2, 50] == 1 and counts[2, 8] == 1


def test_expected_series_exact_for_identical_paths():
    values = np.full((1000, 4), 0.7)
    mean, se = expected_series(values)
    assert np.all(mean == 0.7) and np.all(se == 0.0)
