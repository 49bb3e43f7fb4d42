import pytest

import regenbound as rb

UNIFORM = {"kind": "uniform", "lo": 0.0, "hi": 1.0}
GAMMA = {"kind": "gamma", "shape": 2.0, "rate": 1.0}


def test_uniform_split():
    split = rb.compute_split(rb.distribution(UNIFORM))
    assert split.kappa == pytest.approx(0.75, abs=1e-8)
    assert split.Psi(0.75) == pytest.approx(0.0625, abs=1e-8)
    assert split.Psi_inverse(0.0625) == pytest.approx(0.75, abs=1e-8)


def test_exponential_is_trivial():
    split = rb.compute_split(rb.distribution({"kind": "exponential", "rate": 3.0}))
    assert split.kappa == 1.0


def test_gamma_values():
    d = rb.distribution(GAMMA)
    assert d.cdf(1.0) == pytest.approx(0.26424111765711535681, rel=1e-12)
    assert d.raw_moment(3.0) == pytest.approx(24.0, rel=1e-10)
    split = rb.compute_split(d)
    assert split.kappa == pytest.approx(0.8160602794142788392, abs=1e-8)


def test_constants():
    assert rb.poly_constant(0.75, 0.5, 0.5, 1.0) == pytest.approx(11 / 6, rel=1e-10)
    assert rb.exp_constant(0.57916071294121105834, 1.718281828459045) == pytest.approx(2.3647063366145513329, rel=1e-10)
    split = rb.compute_split(rb.distribution(UNIFORM))
    report = rb.polynomial_bound(split, 2.0)
    assert report["constant"] == pytest.approx(3.4444444444444444444, rel=1e-9)
    assert rb.tv_bound("polynomial", 1.0, 1.0, 0.5) == 2.0


def test_exponential_rate_auto():
    split = rb.compute_split(rb.distribution(UNIFORM))
    report = rb.exponential_bound(split)
    assert report["a"] == pytest.approx(1.6407716614939732072, rel=1e-6)


def test_pair_sampler_coincides_below_kappa():
    split = rb.compute_split(rb.distribution(UNIFORM))
    xi, xt, same = rb.sample_xi_pair(split, 0.0, 0.3, 0.9)
    assert same and xi == xt
    xi, xt, same = rb.sample_xi_pair(split, 0.9, 0.3, 0.25)
    assert not same and xi == pytest.approx(0.75, abs=1e-8)


def test_sample_tau_deterministic():
    split = rb.compute_split(rb.distribution(UNIFORM))
    a = rb.sample_tau(split, 2000, 7)
    b = rb.sample_tau(split, 2000, 7)
    assert a[0] == b[0]
    assert a[2]["mean"] <= 11 / 6 + 3 * a[2]["se"]


def test_tv_curve_verifies():
    split = rb.compute_split(rb.distribution(UNIFORM))
    curve, ok = rb.tv_curve(split, [1, 5, 20], 20000, 42, k=[1, 2], bins=20)
    assert ok
    assert all(0.0 <= x <= 2.0 for x in curve["tv_estimate"])


def test_alternating():
    spec = {"f1": UNIFORM, "f2": {"kind": "exponential", "rate": 2.0}}
    p, rho = rb.occupancy(spec)
    assert p == pytest.approx(0.5) and rho is None
    check = rb.alt_check(spec, 5000, 42)
    assert check["coupling_probability"] == pytest.approx(0.375, rel=1e-9)
    assert check["nu_ok"]
    bounds_only = {"f1": UNIFORM, "f2": {"mean_bound": 1.5}}
    assert rb.occupancy(bounds_only)[1] == pytest.approx(0.25)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        rb.distribution({"kind": "uniform", "lo": 1.0, "hi": 0.0})
    with pytest.raises(ArithmeticError):
        rb.exp_constant(1.5, 1.0)
    with pytest.raises(rb.DomainError):
        rb.distribution(UNIFORM).quantile(1.0)
