"""Signals on the plane (Z/NZ)^2 and their discrete Fourier transforms.

Both directions carry the factor 1/N = N^(-d/2) with d = 2, which makes the
transform pair unitary:

    fhat(m) = (1/N) sum_x f(x) exp(-2 pi i <x, m> / N)
    f(x)    = (1/N) sum_m fhat(m) exp(+2 pi i <x, m> / N)

Values are stored as (N, N) complex arrays indexed [x1, x2]; the serialized
form is the row-major flattening of that grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np

from .zmod import RingContext, make_ring


@lru_cache(maxsize=128)
def _dft_matrix(n: int) -> np.ndarray:
    # W[a, b] = exp(-2 pi i a b / n), built from a length-n root table
    # looked up at (a*b) mod n so algebraically equal products match exactly
    roots = np.exp(-2j * np.pi * np.arange(n) / n)
    r = np.arange(n)
    w = roots[np.outer(r, r) % n]
    w.setflags(write=False)
    return w


def _coerce_grid(n: int, values: Any) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.shape == (n * n,):
        arr = arr.reshape(n, n)
    if arr.shape != (n, n):
        raise ValueError(f"expected {n}x{n} values (or length {n * n}), got shape {arr.shape}")
    arr = arr.copy(order="C")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal2D:
    """Complex-valued function on the spatial grid (Z/NZ)^2."""

    ring: RingContext
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _coerce_grid(self.ring.modulus, self.values))


@dataclass(frozen=True, eq=False)
class Spectrum2D:
    """Complex-valued function on the frequency grid (Z/NZ)^2."""

    ring: RingContext
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _coerce_grid(self.ring.modulus, self.values))


def dft_array(n: int, values: np.ndarray) -> np.ndarray:
    """Forward transform of one or a batch of (..., N, N) value grids."""
    w = _dft_matrix(n)
    return np.matmul(w, np.matmul(values, w)) / n


def idft_array(n: int, values: np.ndarray) -> np.ndarray:
    """Inverse transform of one or a batch of (..., N, N) value grids."""
    wc = _dft_matrix(n).conj()
    return np.matmul(wc, np.matmul(values, wc)) / n


def dft(f: Signal2D) -> Spectrum2D:
    """Fourier transform with the unitary 1/N normalization."""
    return Spectrum2D(f.ring, dft_array(f.ring.modulus, f.values))


def idft(spectrum: Spectrum2D) -> Signal2D:
    """Inverse transform; idft(dft(f)) returns f up to rounding."""
    return Signal2D(spectrum.ring, idft_array(spectrum.ring.modulus, spectrum.values))


def _values_of(f: Any) -> np.ndarray:
    return f.values if hasattr(f, "values") else np.asarray(f)


def lp_norm(f: Any, p: float) -> float:
    """Counting-measure norm (sum_x |f(x)|^p)^(1/p); accepts signals, spectra, arrays."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(_values_of(f))
    return float((a**p).sum() ** (1.0 / p))


def normalized_lp_norm(f: Any, p: float) -> float:
    """Norm on the uniform probability measure: the sum is divided by N^2 first."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(_values_of(f))
    return float((a**p).mean() ** (1.0 / p))


def grid_to_json_dict(f: Signal2D | Spectrum2D) -> dict:
    """Serialize a signal or spectrum as {"n": N, "values": [[re, im], ...]} row-major."""
    flat = f.values.reshape(-1)
    return {"n": f.ring.modulus, "values": [[float(v.real), float(v.imag)] for v in flat]}


def _grid_from_json_dict(data: dict) -> tuple[RingContext, np.ndarray]:
    if not isinstance(data, dict) or "n" not in data or "values" not in data:
        raise ValueError("expected an object with 'n' and 'values'")
    ring = make_ring(int(data["n"]))
    n = ring.modulus
    vals = data["values"]
    if len(vals) != n * n:
        raise ValueError(f"expected {n * n} values for n={n}, got {len(vals)}")
    arr = np.empty(n * n, dtype=np.complex128)
    for i, pair in enumerate(vals):
        re, im = float(pair[0]), float(pair[1])
        arr[i] = complex(re, im)
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("values must be finite")
    return ring, arr.reshape(n, n)


def signal_from_json_dict(data: dict) -> Signal2D:
    ring, arr = _grid_from_json_dict(data)
    return Signal2D(ring, arr)


def spectrum_from_json_dict(data: dict) -> Spectrum2D:
    ring, arr = _grid_from_json_dict(data)
    return Spectrum2D(ring, arr)


def signal_to_json(f: Signal2D | Spectrum2D) -> str:
    return json.dumps(grid_to_json_dict(f), sort_keys=True)


def signal_from_json(text: str) -> Signal2D:
    return signal_from_json_dict(json.loads(text))


def spectrum_from_json(text: str) -> Spectrum2D:
    return spectrum_from_json_dict(json.loads(text))
