"""Recovery of sparse signals from spectra observed off a frequency set S.

The flagship solver minimizes the l1 norm subject to matching the observed
spectrum off S (Douglas-Rachford splitting between the complex soft-threshold
and the affine projection onto the data constraint).  A least-squares path
handles the case where the spatial support is known.  Exact recovery is
guaranteed when |support| * |S| < N^2 / 2, with an improved parabola-specific
line at N^2 / (4 * 2^omega) for squarefree N.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .fourier import Signal2D, Spectrum2D, dft_array, idft_array
from .parabola import ParabolaSet, build_parabola
from .rng import spawn_rng
from .zmod import RingContext


def _as_mask(ring: RingContext, unobserved) -> np.ndarray:
    n = ring.modulus
    if unobserved is None:
        unobserved = build_parabola(ring)
    if isinstance(unobserved, ParabolaSet):
        if unobserved.ring.modulus != n:
            raise ValueError("frequency set and ring use different moduli")
        mask = np.zeros((n, n), dtype=bool)
        mask[unobserved.rows, unobserved.cols] = True
        return mask
    arr = np.asarray(unobserved)
    if arr.dtype == bool:
        if arr.shape != (n, n):
            raise ValueError(f"mask must have shape ({n}, {n}), got {arr.shape}")
        return arr.copy()
    mask = np.zeros((n, n), dtype=bool)
    for m1, m2 in unobserved:
        mask[int(m1) % n, int(m2) % n] = True
    return mask


@dataclass(frozen=True, eq=False)
class RecoveryProblem:
    """Observed spectrum with a mask of unobserved (erased) frequencies."""

    ring: RingContext
    unobserved: np.ndarray  # (N, N) bool, True where the spectrum is missing
    observed: Spectrum2D  # values zeroed on the unobserved set
    true_signal: Signal2D | None = None
    support_hint: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        n = self.ring.modulus
        mask = np.asarray(self.unobserved, dtype=bool)
        if mask.shape != (n, n):
            raise ValueError(f"unobserved mask must have shape ({n}, {n})")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "unobserved", mask)
        if np.any(self.observed.values[mask] != 0):
            raise ValueError("observed spectrum must be zero on the unobserved set")
        if self.true_signal is not None:
            truth_hat = dft_array(n, self.true_signal.values)
            gap = np.abs(truth_hat[~mask] - self.observed.values[~mask])
            if gap.size and float(gap.max()) > 1e-10:
                raise ValueError("true_signal disagrees with the observed spectrum off S")

    @cached_property
    def observed_count(self) -> int:
        return int((~self.unobserved).sum())


def erase(
    f: Signal2D,
    unobserved=None,
    *,
    support_hint: Sequence[tuple[int, int]] | None = None,
) -> RecoveryProblem:
    """Transform f, delete the frequencies in S (default: the parabola)."""
    n = f.ring.modulus
    mask = _as_mask(f.ring, unobserved)
    spectrum = dft_array(n, f.values).copy()
    spectrum[mask] = 0.0
    return RecoveryProblem(
        ring=f.ring,
        unobserved=mask,
        observed=Spectrum2D(f.ring, spectrum),
        true_signal=f,
        support_hint=tuple((int(a), int(b)) for a, b in support_hint) if support_hint else None,
    )


def project_feasible(u: Signal2D, problem: RecoveryProblem) -> Signal2D:
    """Nearest signal whose spectrum matches the observations off S.

    The transform is unitary, so overwriting the observed coordinates in the
    frequency domain is the exact orthogonal projection; it is idempotent and
    1-Lipschitz by construction.
    """
    n = problem.ring.modulus
    spectrum = dft_array(n, u.values).copy()
    off = ~problem.unobserved
    spectrum[off] = problem.observed.values[off]
    return Signal2D(problem.ring, idft_array(n, spectrum))


@dataclass(frozen=True)
class LoganParams:
    """Tunables for the l1 solver; defaults match the documented contract."""

    step: float = 1.0
    max_iterations: int = 20000
    feasibility_tol: float = 1e-9
    objective_tol: float = 1e-9
    window: int = 50
    exact_tol: float = 1e-6
    tie_tol: float = 1e-6


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Outcome of one recovery attempt."""

    recovered: Signal2D
    iterations: int
    final_objective: float
    residual: float
    exact: bool | None  # None when no ground truth is attached
    status: str  # converged | max_iterations | non_unique | solved | singular


def _soft_threshold(values: np.ndarray, level: float) -> np.ndarray:
    # shrink the modulus, keep the phase
    mag = np.abs(values)
    scale = np.maximum(1.0 - level / np.maximum(mag, 1e-300), 0.0)
    return values * scale


def logan_recover(problem: RecoveryProblem, params: LoganParams = LoganParams()) -> RecoveryResult:
    """l1 minimization subject to the observed spectrum, via Douglas-Rachford.

    Iterates x = shrink(y), z = P(2x - y), y += z - x, where P is the affine
    data projection.  Every z is feasible; the best one seen (by l1 value) is
    returned, so the reported objective never exceeds that of any feasible
    iterate encountered.  Stops once the shrink iterate is feasible to
    feasibility_tol and the objective has stalled over the trailing window,
    or at max_iterations with a distinct status.
    """
    ring = problem.ring
    n = ring.modulus
    off = ~problem.unobserved
    obs = problem.observed.values
    obs_norm = max(1.0, float(np.linalg.norm(obs[off])))

    yhat = np.where(off, obs, 0.0)
    y = idft_array(n, yhat)
    best_obj = np.inf
    best_z = None
    objectives: list[float] = []
    status = "max_iterations"
    iterations = params.max_iterations
    for k in range(1, params.max_iterations + 1):
        x = _soft_threshold(y, params.step)
        xhat = dft_array(n, x)
        zhat = np.where(off, obs, 2.0 * xhat - yhat)
        z = idft_array(n, zhat)
        y = y + z - x
        yhat = yhat + zhat - xhat
        obj = float(np.abs(z).sum())
        if obj < best_obj:
            best_obj, best_z = obj, z
        objectives.append(obj)
        residual = float(np.linalg.norm(xhat[off] - obs[off])) / obs_norm
        if residual <= params.feasibility_tol and len(objectives) > params.window:
            prev = objectives[-1 - params.window]
            if abs(obj - prev) <= params.objective_tol * max(1.0, abs(obj)):
                status = "converged"
                iterations = k
                break

    assert best_z is not None
    recovered = Signal2D(ring, best_z)
    final_residual = float(np.linalg.norm(dft_array(n, best_z)[off] - obs[off])) / obs_norm
    exact: bool | None = None
    if problem.true_signal is not None:
        truth = problem.true_signal.values
        exact = bool(np.abs(best_z - truth).max() <= params.exact_tol)
        if status == "converged" and not exact:
            truth_obj = float(np.abs(truth).sum())
            if abs(best_obj - truth_obj) <= params.tie_tol * max(1.0, truth_obj):
                status = "non_unique"
    return RecoveryResult(
        recovered=recovered,
        iterations=iterations,
        final_objective=best_obj,
        residual=final_residual,
        exact=exact,
        status=status,
    )


def least_squares_recover(problem: RecoveryProblem, rcond: float = 1e-12) -> RecoveryResult:
    """Least-squares fit of the observed spectrum on a known spatial support.

    Solves the normal equations for the character columns at the support
    positions.  A singular Gram matrix (non-unique recovery) is reported via
    status "singular" with the minimum-norm solution.
    """
    if problem.support_hint is None:
        raise ValueError("least_squares_recover needs a support_hint on the problem")
    ring = problem.ring
    n = ring.modulus
    support = problem.support_hint
    off = ~problem.unobserved
    m1, m2 = np.nonzero(off)
    b = problem.observed.values[m1, m2]
    x1 = np.array([p[0] for p in support])
    x2 = np.array([p[1] for p in support])
    phase = (m1[:, None] * x1[None, :] + m2[:, None] * x2[None, :]) % n
    a = np.exp(-2j * np.pi * phase / n) / n
    gram = a.conj().T @ a
    rhs = a.conj().T @ b
    ev = np.linalg.eigvalsh(gram)
    singular = bool(ev[0] <= rcond * max(float(ev[-1]), rcond))
    if singular:
        coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
    else:
        coeffs = np.linalg.solve(gram, rhs)
    vals = np.zeros((n, n), dtype=np.complex128)
    vals[x1, x2] = coeffs
    recovered = Signal2D(ring, vals)
    residual = float(np.linalg.norm(a @ coeffs - b)) / max(1.0, float(np.linalg.norm(b)))
    exact: bool | None = None
    if problem.true_signal is not None:
        exact = bool(np.abs(vals - problem.true_signal.values).max() <= 1e-6)
    return RecoveryResult(
        recovered=recovered,
        iterations=1,
        final_objective=float(np.abs(vals).sum()),
        residual=residual,
        exact=exact,
        status="singular" if singular else "solved",
    )


@dataclass(frozen=True)
class SweepRow:
    """Aggregated recovery statistics for one support size."""

    n: int
    s_size: int
    e_size: int
    trials: int
    exact_count: int
    non_unique: int
    failures: int
    exact_rate: float
    mean_iterations: float
    ds_threshold: float  # N^2 / (2 |S|)
    improved_threshold: float  # N^2 / (4 * 2^omega), bounded-factor regime


def random_instance(
    ring: RingContext,
    e_size: int,
    rng: np.random.Generator,
    *,
    unobserved=None,
    unimodular: bool = False,
) -> RecoveryProblem:
    """Planted instance: random support of e_size, random amplitudes, erased S."""
    n = ring.modulus
    flat = rng.choice(n * n, size=e_size, replace=False)
    if unimodular:
        amps = np.exp(2j * np.pi * rng.random(e_size))
    else:
        amps = rng.standard_normal(e_size) + 1j * rng.standard_normal(e_size)
    vals = np.zeros(n * n, dtype=np.complex128)
    vals[flat] = amps
    support = tuple((int(i) // n, int(i) % n) for i in np.sort(flat))
    return erase(Signal2D(ring, vals.reshape(n, n)), unobserved, support_hint=support)


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def threshold_sweep(
    ring: RingContext,
    support_sizes: Iterable[int],
    trials: int,
    seed: int,
    *,
    unobserved=None,
    unimodular: bool = False,
    params: LoganParams = LoganParams(),
    threads: int = 1,
) -> list[SweepRow]:
    """Empirical exact-recovery rates by support size, S erased (default parabola).

    Each trial draws from its own (seed, size, trial)-keyed stream, so results
    do not depend on thread count or scheduling.  trials = 0 yields no rows.
    """
    if trials < 0:
        raise ValueError("trials must be >= 0")
    if trials == 0:
        return []
    n = ring.modulus
    mask = _as_mask(ring, unobserved)
    s_size = int(mask.sum())
    ds = n * n / (2.0 * s_size) if s_size else np.inf
    improved = n * n / (4.0 * 2**ring.omega)
    rows: list[SweepRow] = []
    for e_size in support_sizes:
        e_size = int(e_size)
        if not (1 <= e_size <= n * n):
            raise ValueError(f"support size must be in [1, {n * n}], got {e_size}")

        def run_trial(trial: int, _e=e_size) -> tuple[bool, bool, int]:
            rng = spawn_rng(seed, _e, trial)
            problem = random_instance(ring, _e, rng, unobserved=mask, unimodular=unimodular)
            result = logan_recover(problem, params)
            return bool(result.exact), result.status == "non_unique", result.iterations

        outcomes = _map_ordered(run_trial, range(trials), threads)
        exact_count = sum(1 for ok, _, _ in outcomes if ok)
        non_unique = sum(1 for _, tie, _ in outcomes if tie)
        rows.append(
            SweepRow(
                n=n,
                s_size=s_size,
                e_size=e_size,
                trials=trials,
                exact_count=exact_count,
                non_unique=non_unique,
                failures=trials - exact_count,
                exact_rate=exact_count / trials,
                mean_iterations=float(np.mean([it for _, _, it in outcomes])),
                ds_threshold=ds,
                improved_threshold=improved,
            )
        )
    return rows
