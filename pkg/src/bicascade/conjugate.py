"""Sampled grid functions and numeric concave (Legendre) conjugation.

The conjugate of a sampled function f is f*(H) = inf_q (<q, H> - f(q)), taken
over the sample grid.  When the infimum is attained on the boundary of the
moment box and the objective still decreases outward faster than a slope
threshold (default 1e-6 per unit q), the infimum is declared divergent and the
output is -inf; this is how points outside the conjugate's support are
flagged on a finite box.

Large 2-D moment grids never need to be materialized: ``GridFunction2D`` can
hold a row factory instead of a dense array, and the conjugation streams one
q1-row at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

NEG_INF = float("-inf")

DIVERGENCE_SLOPE_TOL = 1e-6


@dataclass(frozen=True)
class GridAxis:
    """Uniform strictly increasing 1-D grid."""

    start: float
    stop: float
    num: int

    def __post_init__(self) -> None:
        if self.num < 1:
            raise ValueError("grid needs at least one point")
        if self.num > 1 and not self.stop > self.start:
            raise ValueError("grid must be strictly increasing")

    @classmethod
    def from_step(cls, start: float, stop: float, step: float) -> "GridAxis":
        num = int(round((stop - start) / step)) + 1
        return cls(start, start + (num - 1) * step, num)

    @property
    def step(self) -> float:
        return 0.0 if self.num == 1 else (self.stop - self.start) / (self.num - 1)

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class GridFunction1D:
    axis: GridAxis
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.values) != self.axis.num:
            raise ValueError("value count must match the grid size")

    @classmethod
    def sample(cls, fun: Callable[[np.ndarray], np.ndarray], axis: GridAxis) -> "GridFunction1D":
        return cls(axis=axis, values=np.asarray(fun(axis.values), dtype=float))


@dataclass(frozen=True)
class GridFunction2D:
    """Function sampled on axis1 x axis2; dense values or a lazy row factory.

    ``row_factory(q1, q2_values)`` returns the sample row at first coordinate
    q1.  Dense construction keeps the rows in memory; the factory form lets
    the conjugation stream over moment boxes far too large to store.
    """

    axis1: GridAxis
    axis2: GridAxis
    values: Optional[np.ndarray] = None
    row_factory: Optional[Callable[[float, np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )

    def __post_init__(self) -> None:
        if self.values is None and self.row_factory is None:
            raise ValueError("provide dense values or a row factory")
        if self.values is not None and self.values.shape != (self.axis1.num, self.axis2.num):
            raise ValueError("value shape must match the grid")

    @classmethod
    def sample(
        cls,
        fun: Callable[[np.ndarray, np.ndarray], np.ndarray],
        axis1: GridAxis,
        axis2: GridAxis,
        dense: bool = True,
    ) -> "GridFunction2D":
        """``fun(q1_scalar_or_column, q2_values)`` -> row(s) of samples."""
        if dense:
            q2 = axis2.values
            rows = [np.asarray(fun(q1, q2), dtype=float) for q1 in axis1.values]
            return cls(axis1=axis1, axis2=axis2, values=np.vstack(rows))
        return cls(axis1=axis1, axis2=axis2, row_factory=lambda q1, q2: fun(q1, q2))

    def row(self, i: int, q2_values: np.ndarray) -> np.ndarray:
        if self.values is not None:
            return self.values[i]
        return np.asarray(self.row_factory(float(self.axis1.values[i]), q2_values), dtype=float)


# ---------------------------------------------------------------------------
# 1-D conjugation
# ---------------------------------------------------------------------------

def legendre_1d(
    f: GridFunction1D,
    h_axis: GridAxis,
    slope_tol: float = DIVERGENCE_SLOPE_TOL,
) -> GridFunction1D:
    """Concave conjugate inf_q (qH - f(q)) on the target grid."""
    q = f.axis.values
    fv = np.asarray(f.values, dtype=float)
    if fv.size == 0:
        raise ValueError("empty grid")
    if not np.all(np.isfinite(fv)):
        raise ValueError("conjugation requires finite samples")
    H = h_axis.values
    v = np.outer(H, q) - fv[None, :]
    idx = v.argmin(axis=1)
    out = v[np.arange(H.size), idx]
    if f.axis.num > 1:
        step = f.axis.step
        at_left = idx == 0
        at_right = idx == f.axis.num - 1
        inward_left = (v[:, 1] - v[:, 0]) / step
        inward_right = (v[:, -2] - v[:, -1]) / step
        diverging = (at_left & (inward_left > slope_tol)) | (
            at_right & (inward_right > slope_tol)
        )
        out = np.where(diverging, NEG_INF, out)
    return GridFunction1D(axis=h_axis, values=out)


# ---------------------------------------------------------------------------
# 2-D conjugation, streamed over q1 rows
# ---------------------------------------------------------------------------

def _stream_conjugate(
    f: GridFunction2D, h1: np.ndarray, h2: np.ndarray, slope_tol: float
) -> np.ndarray:
    """Pointwise conjugate at the pairs (h1[k], h2[k]); flat output."""
    q1 = f.axis1.values
    q2 = f.axis2.values
    n1, n2 = q1.size, q2.size
    npts = h1.size
    base = np.outer(h2, q2)  # reused every row
    w = np.empty_like(base)
    best = np.full(npts, np.inf)
    arg1 = np.zeros(npts, dtype=np.int64)
    arg2 = np.zeros(npts, dtype=np.int64)
    rows_cache: dict[int, np.ndarray] = {}
    for i in range(n1):
        frow = f.row(i, q2)
        if not np.all(np.isfinite(frow)):
            raise ValueError("conjugation requires finite samples")
        np.subtract(base, frow[None, :], out=w)
        idx = w.argmin(axis=1)
        cand = q1[i] * h1 + w[np.arange(npts), idx]
        better = cand < best
        best[better] = cand[better]
        arg1[better] = i
        arg2[better] = idx[better]

    def value_at(i: int, k: int, pt: int) -> float:
        if i not in rows_cache:
            rows_cache[i] = f.row(i, q2)
        return q1[i] * h1[pt] + q2[k] * h2[pt] - rows_cache[i][k]

    out = best.copy()
    step1 = f.axis1.step if n1 > 1 else 0.0
    step2 = f.axis2.step if n2 > 1 else 0.0
    for pt in range(npts):
        i, k = int(arg1[pt]), int(arg2[pt])
        diverging = False
        if n1 > 1 and i in (0, n1 - 1):
            inner = value_at(1 if i == 0 else n1 - 2, k, pt)
            if (inner - best[pt]) / step1 > slope_tol:
                diverging = True
        if not diverging and n2 > 1 and k in (0, n2 - 1):
            inner = value_at(i, 1 if k == 0 else n2 - 2, pt)
            if (inner - best[pt]) / step2 > slope_tol:
                diverging = True
        if diverging:
            out[pt] = NEG_INF
    return out


def legendre_2d(
    f: GridFunction2D,
    h1_axis: GridAxis,
    h2_axis: GridAxis,
    slope_tol: float = DIVERGENCE_SLOPE_TOL,
) -> GridFunction2D:
    """Concave conjugate on a rectangular target grid."""
    if f.axis1.num == 0 or f.axis2.num == 0:
        raise ValueError("empty grid")
    hh1, hh2 = np.meshgrid(h1_axis.values, h2_axis.values, indexing="ij")
    flat = _stream_conjugate(f, hh1.ravel(), hh2.ravel(), slope_tol)
    return GridFunction2D(
        axis1=h1_axis, axis2=h2_axis, values=flat.reshape(h1_axis.num, h2_axis.num)
    )


def legendre_2d_points(
    f: GridFunction2D,
    points: np.ndarray,
    slope_tol: float = DIVERGENCE_SLOPE_TOL,
) -> np.ndarray:
    """Concave conjugate at an arbitrary list of (H1, H2) points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.size == 0:
        return np.empty(0)
    return _stream_conjugate(f, pts[:, 0].copy(), pts[:, 1].copy(), slope_tol)
