"""Convex support regions of the bivariate spectra in the (H1, H2) plane."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .closedform import CaseMismatchError, CaseParams, m_map


def _convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Monotone-chain hull, counterclockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    cross = lambda o, a, b: (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class SupportRegion:
    """Convex polygon with a membership test by half-plane intersection."""

    kind: str
    vertices: tuple[tuple[float, float], ...]

    @classmethod
    def from_points(cls, kind: str, points: list[tuple[float, float]]) -> "SupportRegion":
        return cls(kind=kind, vertices=tuple(_convex_hull(points)))

    def contains(self, point: tuple[float, float], tol: float = 1e-9) -> bool:
        """True when the point lies inside or within ``tol`` of the boundary."""
        x, y = point
        n = len(self.vertices)
        if n == 0:
            return False
        if n == 1:
            return math.hypot(x - self.vertices[0][0], y - self.vertices[0][1]) <= tol
        for i in range(n):
            ax, ay = self.vertices[i]
            bx, by = self.vertices[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            norm = math.hypot(ex, ey)
            if norm == 0.0:
                continue
            # signed distance to the edge line, positive inside (CCW order)
            if ((x - ax) * ey - (y - ay) * ex) / norm > tol:
                return False
        return True

    def area(self) -> float:
        s = 0.0
        n = len(self.vertices)
        for i in range(n):
            ax, ay = self.vertices[i]
            bx, by = self.vertices[(i + 1) % n]
            s += ax * by - bx * ay
        return 0.5 * abs(s)

    def boundary_distance(self, point: tuple[float, float]) -> float:
        """Distance to the polygon boundary (0 on it, > 0 elsewhere)."""
        x, y = point
        best = math.inf
        n = len(self.vertices)
        for i in range(n):
            ax, ay = self.vertices[i]
            bx, by = self.vertices[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            denom = ex * ex + ey * ey
            t = 0.0 if denom == 0.0 else max(0.0, min(1.0, ((x - ax) * ex + (y - ay) * ey) / denom))
            best = min(best, math.hypot(x - (ax + t * ex), y - (ay + t * ey)))
        return best

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vertices": [list(v) for v in self.vertices]}


def _m_corner_points(params: CaseParams) -> list[tuple[float, float]]:
    r = params.range1
    corners = [(a, b) for a in (r.h_min, r.h_max) for b in (r.h_min, r.h_max)]
    return [m_map(params, a, b) for a, b in corners]


def parallelogram(params: CaseParams) -> SupportRegion:
    """Common support of spectrum and conjugate in the same-side case.

    Image of the exponent square under the corner map; its sides have slopes
    1 and kappa and pass through (h1_min, eta h1_min + (1-eta) h2_min) and
    (h1_max, eta h1_max + (1-eta) h2_max).
    """
    if params.case != "same-side":
        raise CaseMismatchError("parallelogram requires same-side parameters")
    return SupportRegion.from_points("parallelogram", _m_corner_points(params))


def pentagon_p1(params: CaseParams) -> SupportRegion:
    """Mixed case: support of the Legendre conjugate of min(tau_eta, affine).

    The affine branch has constant gradient, contributing the single extra
    corner (h1_min, eta h1_max + (1-eta) h2_min) to the corner-map
    parallelogram.
    """
    if params.case != "mixed":
        raise CaseMismatchError("pentagon_p1 requires mixed-case parameters")
    r1, r2 = params.range1, params.range2
    extra = (r1.h_min, params.eta * r1.h_max + (1.0 - params.eta) * r2.h_min)
    return SupportRegion.from_points("pentagon-legendre", _m_corner_points(params) + [extra])


def pentagon_p2(params: CaseParams) -> SupportRegion:
    """Mixed case: support of the bivariate spectrum itself.

    Intersection of the two one-sided constraint systems; for eta strictly
    inside (0,1) it is strictly larger than ``pentagon_p1``.
    """
    if params.case != "mixed":
        raise CaseMismatchError("pentagon_p2 requires mixed-case parameters")
    e = params.eta
    r1, r2 = params.range1, params.range2
    pts = [
        (r1.h_min, params.h_eta_min),
        (r1.h_min, e * r1.h_min + (1.0 - e) * r2.h_max),
        (e * r1.h_max + (1.0 - e) * r1.h_min, params.h_eta_max),
        (r1.h_max, e * r1.h_max + (1.0 - e) * r2.h_min),
        (e * r1.h_min + (1.0 - e) * r1.h_max, params.h_eta_min),
    ]
    return SupportRegion.from_points("pentagon-spectrum", pts)
