"""Numerical verification of restriction inequalities on the parabola.

The central estimate, certified for squarefree N with constant 2^(omega(N)/4):

    ((1/N) sum_t |fhat(t, t^2)|^2)^(1/2)
        <= 2^(omega/4) * (1/N) * (sum_x |f(x)|^(4/3))^(3/4)

together with its dual L^4 extension bound, the L^1-L^2 consequence, the
support-size uncertainty search, and a sharpness probe for non-squarefree
moduli where the constant genuinely grows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .fourier import Signal2D, dft, dft_array, idft_array, lp_norm, normalized_lp_norm
from .parabola import (
    ParabolaSet,
    build_parabola,
    embed_coefficients,
    energy_exact,
    extend_from,
    restrict_to,
)
from .rng import spawn_rng
from .zmod import RingContext

SATISFACTION_TOL = 1e-9
RANK_RTOL = 1e-8  # rank cutoff: singular values <= RANK_RTOL * s_max count as zero


@dataclass(frozen=True)
class RestrictionParams:
    """Exponent pair (s, r) and optional certified constant for a check."""

    s: float = 2.0
    r: float = 4.0 / 3.0
    constant: float | None = None

    def __post_init__(self) -> None:
        if not (1.0 <= self.r <= self.s):
            raise ValueError(f"need 1 <= r <= s, got r={self.r}, s={self.s}")


@dataclass(frozen=True)
class RestrictionReport:
    """One verified instance of a restriction-type inequality."""

    n: int
    omega: int
    squarefree: bool
    s: float
    r: float
    lhs: float
    rhs: float  # right-hand side without the constant
    ratio: float
    constant: float | None
    satisfied: bool
    witness_kind: str = ""


def certified_constant(ring: RingContext) -> float:
    """The squarefree constant 2^(omega(N)/4)."""
    return float(2.0 ** (ring.omega / 4.0))


def restriction_lhs(spectrum, sigma: ParabolaSet, s: float = 2.0) -> float:
    """((1/|Sigma|) sum_t |F(t, t^2)|^s)^(1/s) for a spectrum F."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    vals = spectrum.values[sigma.rows, sigma.cols]
    return float((np.abs(vals) ** s).mean() ** (1.0 / s))


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return 0.0 if lhs < 1e-12 else math.inf
    return lhs / rhs


def restriction_quantities(
    ring: RingContext,
    values: np.ndarray,
    sigma: ParabolaSet | None = None,
    s: float = 2.0,
    r: float = 4.0 / 3.0,
) -> tuple[np.ndarray, np.ndarray]:
    """(lhs, rhs) arrays for one or a batch (..., N, N) of signal grids.

    lhs is the averaged L^s norm of the transform on the parabola; rhs is
    N^(-d/2) times the counting L^r norm of the signal, constant excluded.
    """
    n = ring.modulus
    if sigma is None:
        sigma = build_parabola(ring)
    spectra = dft_array(n, values)
    on_parab = spectra[..., sigma.rows, sigma.cols]
    lhs = (np.abs(on_parab) ** s).mean(axis=-1) ** (1.0 / s)
    rhs = (np.abs(values) ** r).sum(axis=(-2, -1)) ** (1.0 / r) / n
    return np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)


def _report(
    ring: RingContext,
    params: RestrictionParams,
    lhs: float,
    rhs: float,
    witness_kind: str,
) -> RestrictionReport:
    ratio = _ratio(lhs, rhs)
    satisfied = True if params.constant is None else ratio <= params.constant + SATISFACTION_TOL
    return RestrictionReport(
        n=ring.modulus,
        omega=ring.omega,
        squarefree=ring.squarefree,
        s=params.s,
        r=params.r,
        lhs=lhs,
        rhs=rhs,
        ratio=ratio,
        constant=params.constant,
        satisfied=satisfied,
        witness_kind=witness_kind,
    )


def verify_restriction(
    f: Signal2D,
    sigma: ParabolaSet | None = None,
    params: RestrictionParams = RestrictionParams(),
    witness_kind: str = "",
) -> RestrictionReport:
    """Evaluate lhs, rhs, and ratio for any exponent pair; no squarefree gate."""
    lhs, rhs = restriction_quantities(f.ring, f.values, sigma, params.s, params.r)
    return _report(f.ring, params, float(lhs), float(rhs), witness_kind)


def verify_main_theorem(
    f: Signal2D,
    sigma: ParabolaSet | None = None,
    witness_kind: str = "",
) -> RestrictionReport:
    """Check the certified (s, r) = (2, 4/3) estimate; squarefree moduli only."""
    if not f.ring.squarefree:
        raise ValueError(f"modulus {f.ring.modulus} is not squarefree")
    params = RestrictionParams(s=2.0, r=4.0 / 3.0, constant=certified_constant(f.ring))
    return verify_restriction(f, sigma, params, witness_kind)


@dataclass(frozen=True)
class UniversalCertificate:
    """Size and energy certificates with the constant they imply."""

    n: int
    omega: int
    lambda_size: float  # |Sigma| / N^(d/2)
    lambda_energy: int  # max additive representation count over Sigma
    implied_constant: float  # lambda_size^(-1/2) * lambda_energy^(1/4)
    certified_constant: float  # 2^(omega/4)


def universal_certificate(sigma: ParabolaSet) -> UniversalCertificate:
    """Certificates from exhaustive counting; squarefree moduli only.

    lambda_energy bounds every subset at once: for U inside Sigma each pair-sum
    multiplicity is at most the full-set maximum, so E(U) <= max_rep * |U|^2.
    """
    ring = sigma.ring
    if not ring.squarefree:
        raise ValueError(f"modulus {ring.modulus} is not squarefree")
    n = ring.modulus
    report = energy_exact(sigma)
    lam_size = len(sigma) / float(n)  # N^(d/2) = N when d = 2
    lam_energy = report.max_rep
    return UniversalCertificate(
        n=n,
        omega=ring.omega,
        lambda_size=lam_size,
        lambda_energy=lam_energy,
        implied_constant=float(lam_size**-0.5 * lam_energy**0.25),
        certified_constant=certified_constant(ring),
    )


def verify_dual(
    coefficients: Sequence[complex] | np.ndarray,
    sigma: ParabolaSet,
    witness_kind: str = "",
) -> RestrictionReport:
    """L^4 bound for signals with spectrum supported on the parabola.

    For f = extend_from(c):  ||f||_4 <= 2^(omega/4) * N^(-1/2) * ||f||_2 in
    counting norms, which is the same ratio as normalized L^4 over L^2.
    """
    ring = sigma.ring
    if not ring.squarefree:
        raise ValueError(f"modulus {ring.modulus} is not squarefree")
    f = extend_from(sigma, coefficients)
    lhs = normalized_lp_norm(f, 4)
    rhs = normalized_lp_norm(f, 2)
    params = RestrictionParams(s=4.0, r=2.0, constant=certified_constant(ring))
    return _report(ring, params, lhs, rhs, witness_kind)


def dual_ratios(ring: RingContext, coefficients: np.ndarray, sigma: ParabolaSet | None = None) -> np.ndarray:
    """Batch of ||f||_4 / (N^(-1/2) ||f||_2) ratios for coefficient rows (..., N)."""
    if sigma is None:
        sigma = build_parabola(ring)
    n = ring.modulus
    f = idft_array(n, embed_coefficients(sigma, coefficients))
    a = np.abs(f)
    lhs = (a**4).mean(axis=(-2, -1)) ** 0.25
    rhs = (a**2).mean(axis=(-2, -1)) ** 0.5
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(rhs == 0.0, 0.0, lhs / np.where(rhs == 0.0, 1.0, rhs))
    return np.asarray(out, dtype=float)


def verify_l1_l2(
    coefficients: Sequence[complex] | np.ndarray,
    sigma: ParabolaSet,
    witness_kind: str = "",
) -> RestrictionReport:
    """Normalized ||f||_2 <= K^2 * normalized ||f||_1 for parabola spectra.

    K is the dual L^4 constant; the exponent q/(q-2) equals 2 at q = 4.
    """
    ring = sigma.ring
    if not ring.squarefree:
        raise ValueError(f"modulus {ring.modulus} is not squarefree")
    f = extend_from(sigma, coefficients)
    lhs = normalized_lp_norm(f, 2)
    rhs = normalized_lp_norm(f, 1)
    params = RestrictionParams(s=2.0, r=1.0, constant=certified_constant(ring) ** 2)
    return _report(ring, params, lhs, rhs, witness_kind)


@dataclass(frozen=True)
class DualityChain:
    """Intermediate quantities of the L^4 bound derivation, for step checks.

    With f = extend_from(c), g = f * conj(f)^2 and h = conj(g):
    pairing       = sum_x |f|^4 = <f, h> moved to the frequency side,
    cauchy_schwarz= ||f||_2 * (sum_t |hhat(t, t^2)|^2)^(1/2),
    restriction   = ||f||_2 * sqrt(N) * 2^(omega/4) * (1/N) * ||h||_{4/3},
    and ||h||_{4/3} = (sum |f|^4)^(3/4) closes the loop.
    """

    l4_fourth_power: float
    pairing: float
    cauchy_schwarz: float
    restriction_bound: float
    h_norm_43: float


def duality_chain(coefficients: Sequence[complex] | np.ndarray, sigma: ParabolaSet) -> DualityChain:
    """Evaluate each step of the dual derivation on one coefficient vector."""
    ring = sigma.ring
    n = ring.modulus
    f = extend_from(sigma, coefficients)
    fv = f.values
    g = fv * np.conj(fv) ** 2
    h = np.conj(g)
    t0 = float((np.abs(fv) ** 4).sum())
    fhat_sigma = restrict_to(sigma, dft(f))
    hhat_sigma = restrict_to(sigma, dft(Signal2D(ring, h)))
    pairing = float(abs(np.sum(fhat_sigma * np.conj(hhat_sigma))))
    f_l2 = lp_norm(f, 2)
    cs = float(f_l2 * np.sqrt((np.abs(hhat_sigma) ** 2).sum()))
    h_norm = lp_norm(h, 4.0 / 3.0)
    bound = float(f_l2 * np.sqrt(n) * certified_constant(ring) * h_norm / n)
    return DualityChain(
        l4_fourth_power=t0,
        pairing=pairing,
        cauchy_schwarz=cs,
        restriction_bound=bound,
        h_norm_43=h_norm,
    )


@dataclass(frozen=True, eq=False)
class UncertaintyVerdict:
    """Outcome of a support search below the forbidden-zone line N^2 / 2^omega."""

    n: int
    max_support: int
    found: bool
    support: tuple[tuple[int, int], ...] | None
    coefficients: np.ndarray | None
    method: str  # "exhaustive" or "randomized"
    supports_checked: int
    min_margin: float  # smallest off-support singular value seen, scaled by s_max


def extension_matrix(sigma: ParabolaSet) -> np.ndarray:
    """N^2 x N matrix E with E[x, t] = (1/N) exp(+2 pi i <x, (t, t^2)> / N).

    Columns are orthonormal characters; extend_from(c) is E @ c laid on the grid.
    """
    n = sigma.ring.modulus
    x1 = np.repeat(np.arange(n), n)
    x2 = np.tile(np.arange(n), n)
    phase = (np.outer(x1, sigma.rows) + np.outer(x2, sigma.cols)) % n
    return np.exp(2j * np.pi * phase / n) / n


def _deficiency_margins(ext: np.ndarray, supports: np.ndarray) -> np.ndarray:
    """Smallest singular value of the off-support rows, one per support row.

    Uses the Gram complement: with orthonormal columns, the off-T rows satisfy
    (E_offT)^H E_offT = I - (E_T)^H E_T, so s_min(off) = sqrt(1 - s_max(E_T)^2)
    and s_max(off) = 1 whenever |T| < N.
    """
    n = ext.shape[1]
    rows = ext[supports]  # (B, k, N)
    gram = np.matmul(rows.conj().transpose(0, 2, 1), rows)
    gram = np.eye(n)[None, :, :] - gram
    ev = np.linalg.eigvalsh(gram)
    return np.sqrt(np.clip(ev[:, 0], 0.0, None))


def _random_supports(rng: np.random.Generator, count: int, universe: int, k: int) -> np.ndarray:
    u = rng.random((count, universe))
    return np.argpartition(u, k, axis=1)[:, :k].astype(np.intp)


def uncertainty_search(
    sigma: ParabolaSet,
    max_support: int,
    *,
    samples: int = 1_000_000,
    exhaustive_cap: int = 2_500_000,
    seed: int = 0,
    batch: int = 100_000,
) -> UncertaintyVerdict:
    """Look for a nonzero signal with spectrum on the parabola and small support.

    A support T admits one iff the rows of the extension matrix off T have rank
    below N (singular values under RANK_RTOL times the largest count as zero).
    Rank deficiency is monotone in T, so scanning supports of size exactly
    max_support covers every smaller support as well.  All sizes inside the
    forbidden zone max_support < N^2 / 2^omega must come back empty; the zone
    boundary itself is rejected because the search would be vacuous.
    """
    ring = sigma.ring
    if not ring.squarefree:
        raise ValueError(f"modulus {ring.modulus} is not squarefree")
    n = ring.modulus
    universe = n * n
    zone = universe / (2**ring.omega)
    if not (1 <= max_support < zone):
        raise ValueError(
            f"max_support must be in [1, {zone}) = [1, N^2/2^omega) for N={n}, got {max_support}"
        )
    ext = extension_matrix(sigma)
    total = math.comb(universe, max_support)
    exhaustive = total <= exhaustive_cap

    def chunks() -> Iterator[np.ndarray]:
        if exhaustive:
            it = itertools.combinations(range(universe), max_support)
            while True:
                block = list(itertools.islice(it, batch))
                if not block:
                    return
                yield np.array(block, dtype=np.intp)
        else:
            rng = spawn_rng(seed, n, max_support)
            remaining = samples
            while remaining > 0:
                take = min(batch, remaining)
                remaining -= take
                yield _random_supports(rng, take, universe, max_support)

    checked = 0
    min_margin = math.inf
    for supports in chunks():
        margins = _deficiency_margins(ext, supports)
        checked += supports.shape[0]
        worst = float(margins.min())
        if worst < min_margin:
            min_margin = worst
        hit = np.where(margins <= RANK_RTOL)[0]
        if hit.size:
            t_flat = np.sort(supports[int(hit[0])])
            off = np.setdiff1d(np.arange(universe), t_flat, assume_unique=True)
            _, sing, vh = np.linalg.svd(ext[off], full_matrices=False)
            coeff = vh[-1].conj()
            support_pts = tuple((int(i) // n, int(i) % n) for i in t_flat)
            return UncertaintyVerdict(
                n=n,
                max_support=max_support,
                found=True,
                support=support_pts,
                coefficients=coeff,
                method="exhaustive" if exhaustive else "randomized",
                supports_checked=checked,
                min_margin=min_margin,
            )
    return UncertaintyVerdict(
        n=n,
        max_support=max_support,
        found=False,
        support=None,
        coefficients=None,
        method="exhaustive" if exhaustive else "randomized",
        supports_checked=checked,
        min_margin=min_margin,
    )


@dataclass(frozen=True, eq=False)
class ProbeResult:
    """Best restriction ratios over a structured family, both test exponents."""

    n: int
    omega: int
    squarefree: bool
    best_ratio: float  # at r = 4/3
    best_witness: str
    reports: tuple[RestrictionReport, ...]


def stride_box_values(ring: RingContext, d1: int, d2: int, a: int, b: int) -> np.ndarray:
    """Indicator of {a + d1*i} x {b + d2*j} as a value grid."""
    n = ring.modulus
    vals = np.zeros((n, n), dtype=np.complex128)
    vals[a % d1 :: d1, :][:, b % d2 :: d2] = 1.0
    return vals


def _square_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0 and n % (d * d) == 0]


def sharpness_probe(
    ring: RingContext,
    *,
    trials: int = 200,
    seed: int = 0,
    extra: Iterable[tuple[str, np.ndarray]] = (),
) -> ProbeResult:
    """Hunt for large restriction ratios; any modulus, no certified constant.

    The structured family runs over indicators of stride boxes
    {a + d1*i} x {b + d2*j} for every ordered divisor pair with d1^2 | N and
    d2^2 | N (d = 1 included, so lines and the full grid appear), plus random
    sparse indicators.  Each candidate is scored at r = 4/3 and r = 6/5.
    """
    sigma = build_parabola(ring)
    n = ring.modulus
    candidates: list[tuple[str, np.ndarray]] = []
    for d1 in _square_divisors(n):
        for d2 in _square_divisors(n):
            for a in range(d1):
                for b in range(d2):
                    label = f"stride_box(d1={d1},d2={d2},a={a},b={b})"
                    candidates.append((label, stride_box_values(ring, d1, d2, a, b)))
    rng = spawn_rng(seed, n)
    for i in range(trials):
        size = int(rng.integers(1, max(2, n * n // 4)))
        idx = rng.choice(n * n, size=size, replace=False)
        vals = np.zeros(n * n, dtype=np.complex128)
        vals[idx] = 1.0
        candidates.append((f"random_indicator(size={size},trial={i})", vals.reshape(n, n)))
    candidates.extend(extra)

    reports: list[RestrictionReport] = []
    best_ratio, best_witness = 0.0, ""
    for label, vals in candidates:
        for r in (4.0 / 3.0, 6.0 / 5.0):
            lhs, rhs = restriction_quantities(ring, vals, sigma, 2.0, r)
            rep = _report(ring, RestrictionParams(s=2.0, r=r, constant=None), float(lhs), float(rhs), label)
            reports.append(rep)
            if r == 4.0 / 3.0 and rep.ratio > best_ratio:
                best_ratio, best_witness = rep.ratio, label
    return ProbeResult(
        n=n,
        omega=ring.omega,
        squarefree=ring.squarefree,
        best_ratio=best_ratio,
        best_witness=best_witness,
        reports=tuple(reports),
    )
