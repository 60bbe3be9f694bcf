"""Modulation-instability dispersion relation ``w = sqrt(A^2 - p^2)`` and gain ``G = 2 Im w``.

The principal branch is used, so ``Im w >= 0``; the negative branch is only
emitted as an extra CSV column.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class ModulationParams:
    """Sensitivity ``A`` and wave numbers ``(b, c, d)``."""

    A: float
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("the sensitivity parameter A must be non-negative")

    @property
    def p(self) -> float:
        return math.sqrt(self.b * self.b + self.c * self.c + self.d * self.d)

    @classmethod
    def from_p(cls, A: float, p: float) -> "ModulationParams":
        if p < 0:
            raise ValueError("p must be non-negative")
        return cls(A, p, 0.0, 0.0)


@dataclass(frozen=True)
class SpectrumRow:
    p: float
    A: float
    w: complex
    gain: float

    @property
    def stable(self) -> bool:
        return self.w.imag == 0.0

    def as_tuple(self) -> tuple:
        return (self.p, self.A, self.w.real, self.w.imag, -self.w.imag, self.gain, int(self.stable))


SPECTRUM_COLUMNS = ("p", "A", "w_re", "w_im", "w_im_neg", "gain", "stable")


def _dispersion(A: float, p: float) -> complex:
    # split by sign instead of cmath.sqrt so the boundary A = p gives an exact 0
    q = A * A - p * p
    if q >= 0:
        return complex(math.sqrt(q), 0.0)
    return complex(0.0, math.sqrt(-q))


def dispersion(m: ModulationParams) -> complex:
    """Principal ``sqrt(A^2 - p^2)`` with non-negative imaginary part."""
    return _dispersion(m.A, m.p)


def gain(m: ModulationParams) -> float:
    """``2 Im w``; zero on the stable side ``A >= p``."""
    return 2.0 * dispersion(m).imag


def gain_closed_form(A: float, p: float) -> float:
    return 2.0 * math.sqrt(p * p - A * A) if A < p else 0.0


def sweep(p_values: Iterable[float], A_range: tuple[float, float], n: int) -> list[SpectrumRow]:
    """Rows over a uniform ``A`` grid for each ``p``, in ``(p, A)`` order."""
    ps = sorted(float(p) for p in p_values)
    if not ps:
        raise ValueError("empty list of p values")
    if n < 2:
        raise ValueError("n must be at least 2")
    lo, hi = float(A_range[0]), float(A_range[1])
    step = (hi - lo) / (n - 1)
    grid = [lo + k * step for k in range(n - 1)] + [hi]
    rows = []
    for p in ps:
        for A in grid:
            w = _dispersion(A, p)
            rows.append(SpectrumRow(p, A, w, 2.0 * w.imag))
    return rows


def complex_residual(w: complex, A: float, p: float) -> float:
    """``|w^2 + p^2 - A^2|`` in complex arithmetic."""
    return abs(w * w + complex(p * p - A * A))


def principal_sqrt(z: complex) -> complex:
    """``cmath.sqrt`` mapped onto the ``Im >= 0`` branch."""
    r = cmath.sqrt(z)
    return -r if r.imag < 0 else r


FIGURE_P = (1.0, 2.0, 3.0)


def figure_rows(figure: str, p_values: Sequence[float] = FIGURE_P, n: int = 401) -> list[SpectrumRow]:
    """Figure 8(a): stable side ``A >= p``; 8(b): unstable side ``A < p``; 9: full gain sweep."""
    rows = sweep(p_values, (0.0, 4.0), n)
    if figure == "fig8a":
        return [r for r in rows if r.A >= r.p]
    if figure == "fig8b":
        return [r for r in rows if r.A < r.p]
    if figure == "fig9":
        return rows
    raise KeyError(figure)
