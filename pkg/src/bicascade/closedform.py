"""Closed-form scaling functions and multifractal spectra.

Conventions used throughout: all logarithms are base 2; ``-inf`` marks points
outside the support of a spectrum; a binomial parameter ``p`` gives left-child
mass fraction ``p``.  For a binomial measure with parameter p the spectrum is
supported on [h_min, h_max] where

    p < 1/2:  h_min = -log2(1-p),  h_max = -log2(p)

and mirrored for p > 1/2; the entropy exponent is
h_e = -p log2 p - (1-p) log2 (1-p) and the symmetry center
h_s = (h_min + h_max)/2.

The bivariate objects live on pairs (mu_p1, nu) where nu switches between p1
and p2 along a Bernoulli(eta) generation set: T is the joint scaling function
of the deterministic pair (mu_p1, mu_p2), tau_eta its eta-mixture with the
collapsed branch tau_p1(q1+q2), and tau_eta_affine the affine branch that
takes over in the mixed case (parameters on opposite sides of 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NEG_INF = float("-inf")

_SNAP = 1e-12  # absolute tolerance when snapping to a support boundary


class DegenerateMapError(ValueError):
    """The parametrizing map is not invertible for these parameters."""


class CaseMismatchError(ValueError):
    """Operation called with parameters of the wrong side configuration."""


def _check_p(p: float, name: str = "p") -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie strictly in (0, 1), got {p}")


# ---------------------------------------------------------------------------
# univariate binomial measure
# ---------------------------------------------------------------------------

def tau_binomial(p: float, q):
    """L^q scaling function of the binomial measure: -log2(p^q + (1-p)^q)."""
    _check_p(p)
    q = np.asarray(q, dtype=float)
    out = -np.logaddexp2(q * math.log2(p), q * math.log2(1.0 - p))
    return float(out) if out.ndim == 0 else out


def tau_binomial_deriv(p: float, q):
    """Exact derivative of ``tau_binomial`` in q.

    Equals the softmax-weighted average of -log2 p and -log2(1-p), so it
    decreases strictly from h_max to h_min as q runs over the reals.
    """
    _check_p(p)
    q = np.asarray(q, dtype=float)
    la, lb = math.log2(p), math.log2(1.0 - p)
    with np.errstate(over="ignore"):
        w0 = 1.0 / (1.0 + np.exp2(q * (lb - la)))  # weight of the p branch
    out = -(w0 * la + (1.0 - w0) * lb)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BinomialRange:
    h_min: float
    h_max: float
    h_e: float
    h_s: float


def binomial_range(p: float) -> BinomialRange:
    """Support endpoints, entropy exponent and symmetry center of D_{mu_p}."""
    _check_p(p)
    a, b = -math.log2(p), -math.log2(1.0 - p)
    h_min, h_max = min(a, b), max(a, b)
    h_e = p * a + (1.0 - p) * b
    return BinomialRange(h_min=h_min, h_max=h_max, h_e=h_e, h_s=0.5 * (h_min + h_max))


def _entropy2(g):
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(g > 0.0, -g * np.log2(np.maximum(g, 1e-300)), 0.0)
        t1 = np.where(g < 1.0, -(1 - g) * np.log2(np.maximum(1 - g, 1e-300)), 0.0)
    return t0 + t1


def binomial_spectrum(p: float, H):
    """Multifractal spectrum of the binomial measure.

    The exponent equation H = -gamma log2 p - (1-gamma) log2(1-p) is linear in
    the digit frequency gamma, so the spectrum is the binary entropy of its
    solution; -inf outside [h_min, h_max].
    """
    _check_p(p)
    H = np.asarray(H, dtype=float)
    if p == 0.5:
        out = np.where(np.abs(H - 1.0) <= _SNAP, 1.0, NEG_INF)
        return float(out) if out.ndim == 0 else out
    la, lb = math.log2(p), math.log2(1.0 - p)
    g = (H + lb) / (lb - la)
    g = np.where(np.abs(g) <= _SNAP, 0.0, g)
    g = np.where(np.abs(g - 1.0) <= _SNAP, 1.0, g)
    out = np.where((g >= 0.0) & (g <= 1.0), _entropy2(np.clip(g, 0.0, 1.0)), NEG_INF)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# pair geometry: kappa and the affine exponent map G
# ---------------------------------------------------------------------------

def kappa(p1: float, p2: float) -> float:
    """Slope log2((1-p2)/p2) / log2((1-p1)/p1) linking the two exponent scales.

    Positive exactly when p1 and p2 lie on the same side of 1/2.
    """
    _check_p(p1, "p1")
    _check_p(p2, "p2")
    if p1 == 0.5:
        raise ValueError("kappa undefined for p1 = 1/2 (zero denominator)")
    return math.log2((1.0 - p2) / p2) / math.log2((1.0 - p1) / p1)


def g_map(p1: float, p2: float, H):
    """Affine map sending a mu_p1 exponent to the matching mu_p2 exponent.

    G(H) = kappa * (H + log2(1-p1)) - log2(1-p2); a word with
    mu_p1-mass 2^(-jH) has mu_p2-mass exactly 2^(-j G(H)).
    """
    k = kappa(p1, p2)
    H = np.asarray(H, dtype=float)
    out = k * (H + math.log2(1.0 - p1)) - math.log2(1.0 - p2)
    return float(out) if out.ndim == 0 else out


def g_inverse(p1: float, p2: float, H2):
    k = kappa(p1, p2)
    H2 = np.asarray(H2, dtype=float)
    out = (H2 + math.log2(1.0 - p2)) / k - math.log2(1.0 - p1)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# bivariate scaling functions
# ---------------------------------------------------------------------------

def tau_pair(p1: float, p2: float, q1, q2):
    """Joint scaling function of (mu_p1, mu_p2):
    -log2(p1^q1 p2^q2 + (1-p1)^q1 (1-p2)^q2)."""
    _check_p(p1, "p1")
    _check_p(p2, "p2")
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    out = -np.logaddexp2(
        q1 * math.log2(p1) + q2 * math.log2(p2),
        q1 * math.log2(1.0 - p1) + q2 * math.log2(1.0 - p2),
    )
    return float(out) if out.ndim == 0 else out


def tau_eta(p1: float, p2: float, eta: float, q1, q2):
    """eta-mixture branch: eta * tau_p1(q1+q2) + (1-eta) * tau_pair."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    out = eta * tau_binomial(p1, q1 + q2) + (1.0 - eta) * tau_pair(p1, p2, q1, q2)
    return float(out) if np.ndim(out) == 0 else out


def tau_eta_affine(p1: float, p2: float, eta: float, q1, q2):
    """Affine branch q1*h1_min + q2*(eta*h1_max + (1-eta)*h2_min).

    Written through the support endpoints so that it is covariant under the
    digit flip (p1, p2) -> (1-p1, 1-p2).
    """
    r1, r2 = binomial_range(p1), binomial_range(p2)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    out = q1 * r1.h_min + q2 * (eta * r1.h_max + (1.0 - eta) * r2.h_min)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# case parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseParams:
    """Parameters (p1, p2, eta) of the pair (mu_p1, nu), with derived geometry.

    Requires p1, p2 != 1/2 so the side configuration (and kappa) is defined.
    """

    p1: float
    p2: float
    eta: float

    def __post_init__(self) -> None:
        _check_p(self.p1, "p1")
        _check_p(self.p2, "p2")
        if self.p1 == 0.5 or self.p2 == 0.5:
            raise ValueError("case parameters require p1, p2 != 1/2")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")

    @property
    def case(self) -> str:
        return "same-side" if (self.p1 - 0.5) * (self.p2 - 0.5) > 0 else "mixed"

    @property
    def kappa(self) -> float:
        return kappa(self.p1, self.p2)

    @property
    def range1(self) -> BinomialRange:
        return binomial_range(self.p1)

    @property
    def range2(self) -> BinomialRange:
        return binomial_range(self.p2)

    @property
    def h_eta_min(self) -> float:
        return self.eta * self.range1.h_min + (1.0 - self.eta) * self.range2.h_min

    @property
    def h_eta_max(self) -> float:
        return self.eta * self.range1.h_max + (1.0 - self.eta) * self.range2.h_max

    def g(self, H):
        return g_map(self.p1, self.p2, H)

    def g_inv(self, H2):
        return g_inverse(self.p1, self.p2, H2)

    def spectrum1(self, H):
        return binomial_spectrum(self.p1, H)

    def to_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "eta": self.eta, "case": self.case}


def tau_bivariate(params: CaseParams, q1, q2):
    """Closed-form bivariate scaling function of (mu_p1, nu).

    Equals tau_eta on the same side of 1/2 and min(tau_eta, tau_eta_affine)
    in the mixed case.
    """
    te = tau_eta(params.p1, params.p2, params.eta, q1, q2)
    if params.case == "same-side":
        return te
    ta = tau_eta_affine(params.p1, params.p2, params.eta, q1, q2)
    out = np.minimum(te, ta)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# same-side spectrum via the corner map
# ---------------------------------------------------------------------------

def m_map(params: CaseParams, alpha: float, beta: float) -> tuple[float, float]:
    """(alpha, beta) -> (eta a + (1-eta) b, eta a + (1-eta) G(b))."""
    e = params.eta
    return (
        e * alpha + (1.0 - e) * beta,
        e * alpha + (1.0 - e) * params.g(beta),
    )


def invert_m(params: CaseParams, H1: float, H2: float, tol: float = 1e-9):
    """Inverse of ``m_map`` where defined; ``None`` outside its range.

    Solving the 2x2 affine system needs eta in (0,1) and kappa != 1.
    """
    e, k = params.eta, params.kappa
    if e in (0.0, 1.0):
        raise DegenerateMapError("corner map not invertible for eta in {0, 1}")
    if abs(k - 1.0) < 1e-12:
        raise DegenerateMapError("corner map not invertible for kappa = 1")
    g0 = params.g(0.0)  # intercept of G - id is (kappa - 1) * beta + g0
    beta = ((H2 - H1) / (1.0 - e) - g0) / (k - 1.0)
    alpha = (H1 - (1.0 - e) * beta) / e
    r = params.range1
    if not (r.h_min - tol <= alpha <= r.h_max + tol):
        return None
    if not (r.h_min - tol <= beta <= r.h_max + tol):
        return None
    clip = lambda x: min(max(x, r.h_min), r.h_max)
    return clip(alpha), clip(beta)


def f_eta(params: CaseParams, alpha: float, beta: float) -> float:
    """eta D_p1(alpha) + (1-eta) D_p1(beta): dimension of the exponent pair."""
    d_a = binomial_spectrum(params.p1, alpha)
    d_b = binomial_spectrum(params.p1, beta)
    if d_a == NEG_INF or d_b == NEG_INF:
        return NEG_INF
    return params.eta * d_a + (1.0 - params.eta) * d_b


def spectrum_same_side(params: CaseParams, H1: float, H2: float) -> float:
    """Bivariate spectrum in the same-side case; -inf outside the parallelogram."""
    if params.case != "same-side":
        raise CaseMismatchError("spectrum_same_side requires same-side parameters")
    ab = invert_m(params, H1, H2)
    if ab is None:
        return NEG_INF
    return f_eta(params, *ab)


# ---------------------------------------------------------------------------
# mixed-case spectrum: constrained one-dimensional maximizations
# ---------------------------------------------------------------------------

_EMPTY_INTERVAL = 1e-14  # feasible alpha-intervals shorter than this are empty


def _golden_max(fun, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Maximum of a strictly concave function on [lo, hi] to ``tol`` in x."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return max(fun(x), fc, fd)


def _alpha_equality_threshold(params: CaseParams, H1: float, H2: float) -> float:
    # alpha at which eta a + (1-eta) G((H1 - eta a)/(1-eta)) equals H2;
    # both constrained systems share this threshold.
    e, k = params.eta, params.kappa
    g0 = params.g(0.0)
    return (H2 - k * H1 - (1.0 - e) * g0) / (e * (1.0 - k))


def spectrum_d1(params: CaseParams, H1: float, H2: float) -> float:
    """Best dimension with the first exponent pinned: maximize
    f_eta(alpha, (H1 - eta alpha)/(1-eta)) subject to the second exponent
    staying >= H2 along the slice.  -inf when infeasible.
    """
    if params.case != "mixed":
        raise CaseMismatchError("spectrum_d1 requires mixed-case parameters")
    e, r = params.eta, params.range1
    d = lambda H: binomial_spectrum(params.p1, H)
    if e == 0.0:
        ok = (r.h_min - _SNAP <= H1 <= r.h_max + _SNAP) and H2 <= params.g(H1) + _SNAP
        return d(H1) if ok else NEG_INF
    if e == 1.0:
        ok = (r.h_min - _SNAP <= H1 <= r.h_max + _SNAP) and H2 <= H1 + _SNAP
        return d(H1) if ok else NEG_INF
    lo = max(r.h_min, (H1 - (1.0 - e) * r.h_max) / e)
    hi = min(r.h_max, (H1 - (1.0 - e) * r.h_min) / e)
    lo = max(lo, _alpha_equality_threshold(params, H1, H2))
    if hi - lo < _EMPTY_INTERVAL:
        return NEG_INF
    fun = lambda a: f_eta(params, a, (H1 - e * a) / (1.0 - e))
    return _golden_max(fun, lo, hi)


def spectrum_d2(params: CaseParams, H1: float, H2: float) -> float:
    """Mirror of ``spectrum_d1`` with the second exponent pinned to H2."""
    if params.case != "mixed":
        raise CaseMismatchError("spectrum_d2 requires mixed-case parameters")
    e, r1, r2 = params.eta, params.range1, params.range2
    d = lambda H: binomial_spectrum(params.p1, H)
    if e == 0.0:
        beta = params.g_inv(H2)
        ok = (r1.h_min - _SNAP <= beta <= r1.h_max + _SNAP) and H1 <= beta + _SNAP
        return d(beta) if ok else NEG_INF
    if e == 1.0:
        ok = (r1.h_min - _SNAP <= H2 <= r1.h_max + _SNAP) and H1 <= H2 + _SNAP
        return d(H2) if ok else NEG_INF
    # G(beta) = (H2 - eta alpha)/(1-eta) must stay in the mu_p2 exponent range
    lo = max(r1.h_min, (H2 - (1.0 - e) * r2.h_max) / e)
    hi = min(r1.h_max, (H2 - (1.0 - e) * r2.h_min) / e)
    lo = max(lo, _alpha_equality_threshold(params, H1, H2))
    if hi - lo < _EMPTY_INTERVAL:
        return NEG_INF
    fun = lambda a: f_eta(params, a, params.g_inv((H2 - e * a) / (1.0 - e)))
    return _golden_max(fun, lo, hi)


def spectrum_mixed(params: CaseParams, H1: float, H2: float) -> float:
    """Bivariate spectrum in the mixed case: min of the two slice maxima."""
    d1 = spectrum_d1(params, H1, H2)
    if d1 == NEG_INF:
        return NEG_INF
    d2 = spectrum_d2(params, H1, H2)
    if d2 == NEG_INF:
        return NEG_INF
    return min(d1, d2)


# ---------------------------------------------------------------------------
# univariate spectrum of the switched measure
# ---------------------------------------------------------------------------

_Q_CAP = 8192.0  # derivative saturates to machine precision far before this


def nu_eta_exponent_solve(params: CaseParams, H: float) -> tuple[float, float]:
    """Solve eta tau'_p1(q) + (1-eta) tau'_p2(q) = H for q by bisection.

    Returns (q, residual).  The map is strictly decreasing, so a geometric
    bracket expansion from [-64, 64] always straddles interior exponents.
    """
    e = params.eta
    phi = lambda q: e * tau_binomial_deriv(params.p1, q) + (1.0 - e) * tau_binomial_deriv(
        params.p2, q
    )
    lo, hi = -64.0, 64.0
    while phi(lo) < H and lo > -_Q_CAP:
        lo *= 2.0
    while phi(hi) > H and hi < _Q_CAP:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = phi(mid)
        if abs(v - H) <= 1e-13:
            return mid, abs(v - H)
        if v > H:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo)):
            break
    mid = 0.5 * (lo + hi)
    return mid, abs(phi(mid) - H)


def spectrum_nu_eta(params: CaseParams, H: float) -> float:
    """Spectrum of the switched measure nu on [h_eta_min, h_eta_max].

    With q solving the stationarity equation, the value is
    eta D_p1(tau'_p1(q)) + (1-eta) D_p2(tau'_p2(q)); -inf outside.
    """
    if not params.h_eta_min - _SNAP <= H <= params.h_eta_max + _SNAP:
        return NEG_INF
    q, _ = nu_eta_exponent_solve(params, H)
    a1 = tau_binomial_deriv(params.p1, q)
    a2 = tau_binomial_deriv(params.p2, q)
    d1 = binomial_spectrum(params.p1, a1)
    d2 = binomial_spectrum(params.p2, a2)
    if d1 == NEG_INF or d2 == NEG_INF:
        return NEG_INF
    return params.eta * d1 + (1.0 - params.eta) * d2
