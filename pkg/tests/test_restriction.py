"""Certified inequalities, certificates, the support search, and the probe."""

import math

import numpy as np
import pytest

from restrictlab.families import structured_coefficients, structured_values
from restrictlab.fourier import Signal2D, dft
from restrictlab.parabola import build_parabola, extend_from
from restrictlab.restriction import (
    RestrictionParams,
    certified_constant,
    dual_ratios,
    duality_chain,
    extension_matrix,
    restriction_lhs,
    restriction_quantities,
    sharpness_probe,
    stride_box_values,
    uncertainty_search,
    universal_certificate,
    verify_dual,
    verify_l1_l2,
    verify_main_theorem,
    verify_restriction,
)
from restrictlab.rng import spawn_rng
from restrictlab.zmod import make_ring

SQUAREFREE = [2, 3, 5, 6, 7, 10, 13, 15, 21, 30, 35]


def test_certified_constant_values():
    assert math.isclose(certified_constant(make_ring(5)), 1.0 * 2**0.25)
    assert math.isclose(certified_constant(make_ring(15)), 2**0.5)
    assert math.isclose(certified_constant(make_ring(30)), 2**0.75)
    assert math.isclose(certified_constant(make_ring(105)), 2**0.75)


@pytest.mark.parametrize("n", SQUAREFREE)
def test_main_estimate_on_structured_family(n):
    ring = make_ring(n)
    sigma = build_parabola(ring)
    rng = spawn_rng(31, n)
    for label, vals in structured_values(ring, 35, rng):
        report = verify_main_theorem(Signal2D(ring, vals), sigma, witness_kind=label)
        assert report.satisfied, label
        assert report.ratio <= certified_constant(ring) + 1e-9


@pytest.mark.parametrize("n", SQUAREFREE)
def test_main_estimate_on_random_batch(n):
    ring = make_ring(n)
    sigma = build_parabola(ring)
    rng = spawn_rng(32, n)
    batch = rng.standard_normal((300, n, n)) + 1j * rng.standard_normal((300, n, n))
    lhs, rhs = restriction_quantities(ring, batch, sigma)
    ratios = lhs / rhs
    assert float(ratios.max()) <= certified_constant(ring) + 1e-9


def test_ratio_is_scale_invariant():
    n = 15
    ring = make_ring(n)
    rng = spawn_rng(33, n)
    vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    base = verify_main_theorem(Signal2D(ring, vals))
    scaled = verify_main_theorem(Signal2D(ring, 17.5j * vals))
    assert math.isclose(base.ratio, scaled.ratio, rel_tol=1e-12)


def test_zero_signal_is_trivially_satisfied():
    n = 6
    ring = make_ring(n)
    report = verify_main_theorem(Signal2D(ring, np.zeros((n, n))))
    assert report.lhs == 0.0 and report.rhs == 0.0
    assert report.ratio == 0.0
    assert report.satisfied


def test_main_theorem_gate_rejects_square_factor():
    ring = make_ring(12)
    with pytest.raises(ValueError):
        verify_main_theorem(Signal2D(ring, np.ones((12, 12))))


def test_verify_restriction_works_without_gate():
    ring = make_ring(12)
    report = verify_restriction(Signal2D(ring, np.ones((12, 12))))
    assert report.constant is None
    assert report.satisfied


def test_restriction_lhs_matches_direct_average():
    n = 10
    ring = make_ring(n)
    sigma = build_parabola(ring)
    rng = spawn_rng(34, n)
    vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    fhat = dft(Signal2D(ring, vals))
    direct = (
        sum(abs(fhat.values[t, t * t % n]) ** 2 for t in range(n)) / n
    ) ** 0.5
    assert math.isclose(restriction_lhs(fhat, sigma), direct, rel_tol=1e-12)
    with pytest.raises(ValueError):
        restriction_lhs(fhat, sigma, s=0.5)


def test_params_validation():
    with pytest.raises(ValueError):
        RestrictionParams(s=2.0, r=2.5)
    with pytest.raises(ValueError):
        RestrictionParams(s=2.0, r=0.9)


@pytest.mark.parametrize("n", [6, 10, 15, 21, 35])
def test_universal_certificate_is_tight(n):
    # The parabola has one point per row, so the size certificate is 1 and the
    # energy certificate turns into the full certified constant.
    cert = universal_certificate(build_parabola(make_ring(n)))
    ring = make_ring(n)
    assert cert.lambda_size == 1.0
    assert cert.lambda_energy == 2**ring.omega
    assert math.isclose(cert.implied_constant, cert.certified_constant, rel_tol=1e-12)
    assert cert.implied_constant <= cert.certified_constant + 1e-9


def test_universal_certificate_gate():
    with pytest.raises(ValueError):
        universal_certificate(build_parabola(make_ring(18)))


def test_dual_constant_coefficients_fifteen():
    sigma = build_parabola(make_ring(15))
    report = verify_dual(np.ones(15), sigma, witness_kind="constant")
    assert math.isclose(report.ratio, 3.0**0.25, rel_tol=1e-9)
    assert report.satisfied


def test_dual_single_character_ratio_is_one():
    for n in [5, 6, 15, 35]:
        sigma = build_parabola(make_ring(n))
        coeffs = np.zeros(n, dtype=np.complex128)
        coeffs[3 % n] = 1.0
        report = verify_dual(coeffs, sigma, witness_kind="delta")
        assert math.isclose(report.ratio, 1.0, rel_tol=1e-9)


@pytest.mark.parametrize("n", SQUAREFREE)
def test_dual_estimate_fuzz(n):
    ring = make_ring(n)
    sigma = build_parabola(ring)
    rng = spawn_rng(35, n)
    limit = certified_constant(ring) + 1e-9
    for label, coeffs in structured_coefficients(ring, 25, rng):
        report = verify_dual(coeffs, sigma, witness_kind=label)
        assert report.satisfied, label
        assert report.ratio <= limit
    batch = rng.standard_normal((200, n)) + 1j * rng.standard_normal((200, n))
    ratios = dual_ratios(ring, batch, sigma)
    assert float(ratios.max()) <= limit


def test_dual_gate():
    sigma = build_parabola(make_ring(4))
    with pytest.raises(ValueError):
        verify_dual(np.ones(4), sigma)


@pytest.mark.parametrize("n", [5, 6, 15, 35])
def test_l1_l2_bound(n):
    ring = make_ring(n)
    sigma = build_parabola(ring)
    rng = spawn_rng(36, n)
    limit = 2.0 ** (ring.omega / 2.0)
    for label, coeffs in structured_coefficients(ring, 20, rng):
        report = verify_l1_l2(coeffs, sigma, witness_kind=label)
        assert report.satisfied, label
        assert report.ratio <= limit + 1e-9
        assert math.isclose(report.constant, limit, rel_tol=1e-12)


def test_l1_l2_flat_extension_ratio_is_one():
    n = 15
    sigma = build_parabola(make_ring(n))
    coeffs = np.zeros(n, dtype=np.complex128)
    coeffs[7] = 2.0
    report = verify_l1_l2(coeffs, sigma)
    assert math.isclose(report.ratio, 1.0, rel_tol=1e-9)


def test_duality_chain_ordering():
    n = 15
    ring = make_ring(n)
    sigma = build_parabola(ring)
    rng = spawn_rng(37, n)
    for trial in range(10):
        coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        chain = duality_chain(coeffs, sigma)
        f = extend_from(sigma, coeffs)
        assert math.isclose(
            chain.l4_fourth_power, float((np.abs(f.values) ** 4).sum()), rel_tol=1e-9
        )
        assert math.isclose(chain.pairing, chain.l4_fourth_power, rel_tol=1e-9)
        assert chain.pairing <= chain.cauchy_schwarz * (1 + 1e-12)
        assert chain.cauchy_schwarz <= chain.restriction_bound * (1 + 1e-12)
        assert math.isclose(
            chain.h_norm_43, chain.l4_fourth_power ** 0.75, rel_tol=1e-9
        )


def test_extension_matrix_has_orthonormal_columns():
    sigma = build_parabola(make_ring(6))
    ext = extension_matrix(sigma)
    assert ext.shape == (36, 6)
    gram = ext.conj().T @ ext
    assert np.allclose(gram, np.eye(6), atol=1e-12)


def test_uncertainty_small_exhaustive():
    verdict = uncertainty_search(build_parabola(make_ring(2)), 1)
    assert verdict.method == "exhaustive"
    assert not verdict.found
    assert verdict.supports_checked == 4

    verdict = uncertainty_search(build_parabola(make_ring(3)), 4)
    assert verdict.method == "exhaustive"
    assert not verdict.found
    assert verdict.supports_checked == math.comb(9, 4)
    assert verdict.min_margin > 0


def test_uncertainty_randomized_mode():
    verdict = uncertainty_search(
        build_parabola(make_ring(6)), 8, samples=3000, exhaustive_cap=1000, seed=5
    )
    assert verdict.method == "randomized"
    assert verdict.supports_checked == 3000
    assert not verdict.found


def test_uncertainty_zone_validation():
    sigma = build_parabola(make_ring(6))
    with pytest.raises(ValueError):
        uncertainty_search(sigma, 0)
    with pytest.raises(ValueError):
        uncertainty_search(sigma, 9)  # 36 / 2^2 is the first size not covered
    with pytest.raises(ValueError):
        uncertainty_search(build_parabola(make_ring(12)), 3)


def test_uncertainty_determinism():
    sigma = build_parabola(make_ring(6))
    a = uncertainty_search(sigma, 7, samples=2000, exhaustive_cap=10, seed=9)
    b = uncertainty_search(sigma, 7, samples=2000, exhaustive_cap=10, seed=9)
    assert a.min_margin == b.min_margin
    assert a.supports_checked == b.supports_checked


def test_probe_prime_square_growth():
    ratios = {}
    for n in [9, 25, 49]:
        probe = sharpness_probe(make_ring(n), trials=30, seed=0)
        ratios[n] = probe.best_ratio
    assert math.isclose(ratios[9], 3.0**0.25, rel_tol=1e-9)
    assert math.isclose(ratios[25], 5.0**0.25, rel_tol=1e-9)
    assert math.isclose(ratios[49], 7.0**0.25, rel_tol=1e-9)
    assert ratios[9] < ratios[25] < ratios[49]
    assert ratios[25] > 2**0.25
    assert ratios[49] > 2**0.25


def test_probe_reports_both_exponents():
    probe = sharpness_probe(make_ring(9), trials=5, seed=1)
    exponents = {report.r for report in probe.reports}
    assert exponents == {4.0 / 3.0, 6.0 / 5.0}
    assert all(report.constant is None for report in probe.reports)


def test_probe_squarefree_stays_bounded():
    for n in [10, 26]:
        ring = make_ring(n)
        probe = sharpness_probe(ring, trials=60, seed=2)
        assert probe.best_ratio <= certified_constant(ring) + 1e-9


def test_symmetric_stride_box_ratio_is_one():
    # Equal strides in both directions give no gain; the asymmetric box is
    # what pushes the ratio to p^(1/4) at N = p^2.
    ring = make_ring(25)
    sigma = build_parabola(ring)
    vals = stride_box_values(ring, 5, 5, 0, 0)
    report = verify_restriction(
        Signal2D(ring, vals), sigma, RestrictionParams(s=2.0, r=4.0 / 3.0)
    )
    assert math.isclose(report.ratio, 1.0, rel_tol=1e-9)
    asym = stride_box_values(ring, 5, 1, 0, 0)
    asym_report = verify_restriction(
        Signal2D(ring, asym), sigma, RestrictionParams(s=2.0, r=4.0 / 3.0)
    )
    assert math.isclose(asym_report.ratio, 5.0**0.25, rel_tol=1e-9)
