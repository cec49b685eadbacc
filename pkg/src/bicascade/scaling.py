"""Empirical scaling functions and local-dimension traces.

Two finite-scale scaling functions are computed for a pair of measures at
generation j:

* ``tilde_tau_exact``: plain-cell version, -(1/j) log2 sum_w m1(I_w)^q1
  m2(I_w)^q2.  For per-generation product measures the 2^j-term sum collapses
  to a product of j two-term factors, evaluated in O(j).
* ``tau3_*``: three-cell-window version, where each cell is replaced by the
  union of itself and its two same-generation neighbors (windows clipped at
  the ends of [0,1) lose the missing neighbor).  Zero window masses kill their
  term for every exponent.

``tau3_dp`` evaluates the window version exactly for product measures by
grouping words by their trailing run: the two neighbor ratios of a word
depend only on the run length at its end, so the partition sum splits into
2j run classes whose inner sums collapse like the plain product.  It agrees
with ``tau3_enumerated`` to rounding error at any depth and costs O(j).

Everything is done in log2 space with max-extracted log-sum-exp; numpy's
pairwise summation fixes the accumulation order, so results do not depend on
chunking or thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cascades import NEG_INF, Binomial, MeasureModel, Switched
from .dyadic import Word

DEFAULT_ENUMERATION_CAP = 24


def _require_product(model: MeasureModel, j: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = model.factor_pairs(j)
    if pairs is None:
        raise TypeError(
            f"{model.kind} is not a per-generation product measure; "
            "use the enumeration path (tau3_enumerated) instead"
        )
    return pairs


def _logsumexp2(a: np.ndarray, axis=None) -> np.ndarray:
    mx = np.max(a, axis=axis, keepdims=True)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    with np.errstate(invalid="ignore"):
        s = np.log2(np.sum(np.exp2(a - mx), axis=axis, keepdims=True))
    out = (mx + s).squeeze(axis) if axis is not None else float(mx + s)
    return out


# ---------------------------------------------------------------------------
# plain-cell scaling function, exact product collapse
# ---------------------------------------------------------------------------

def tilde_tau_exact_grid(
    m1: MeasureModel, m2: MeasureModel, j: int, q1: np.ndarray, q2: np.ndarray
) -> np.ndarray:
    """Vectorized ``tilde_tau_exact`` over flat arrays of moments."""
    if j < 1:
        raise ValueError("generation must be >= 1")
    l1, r1 = _require_product(m1, j)
    l2, r2 = _require_product(m2, j)
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    q2 = np.atleast_1d(np.asarray(q2, dtype=float))
    la1, lb1 = np.log2(l1), np.log2(r1)
    la2, lb2 = np.log2(l2), np.log2(r2)
    t0 = q1[:, None] * la1[None, :] + q2[:, None] * la2[None, :]
    t1 = q1[:, None] * lb1[None, :] + q2[:, None] * lb2[None, :]
    return -np.logaddexp2(t0, t1).sum(axis=1) / j


def tilde_tau_exact(m1: MeasureModel, m2: MeasureModel, j: int, q1: float, q2: float) -> float:
    """Plain-cell bivariate scaling value at generation j, exact in O(j)."""
    return float(tilde_tau_exact_grid(m1, m2, j, [q1], [q2])[0])


# ---------------------------------------------------------------------------
# window scaling function by enumeration
# ---------------------------------------------------------------------------

def enumerate_log_masses(model: MeasureModel, j: int) -> np.ndarray:
    """log2 masses of all 2^j generation-j cells, in x order."""
    own = getattr(model, "enumerate_log_masses", None)
    if own is not None:
        return own(j)
    pairs = model.factor_pairs(j)
    if pairs is not None:
        left, right = pairs
        lm = np.zeros(1)
        for level in range(j):
            nxt = np.empty(2 * lm.size)
            nxt[0::2] = lm + math.log2(left[level])
            nxt[1::2] = lm + math.log2(right[level])
            lm = nxt
        return lm
    return np.array([model.log_mass(Word.from_index(k, j)) for k in range(1 << j)])


def window_log_masses(log_masses: np.ndarray) -> np.ndarray:
    """log2 of cell + left neighbor + right neighbor, ends truncated."""
    with np.errstate(divide="ignore"):
        m = np.exp2(log_masses)
        w = m.copy()
        w[1:] += m[:-1]
        w[:-1] += m[1:]
        return np.log2(w)


def tau3_enumerated_grid(
    m1: MeasureModel,
    m2: MeasureModel,
    j: int,
    q1: np.ndarray,
    q2: np.ndarray,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> np.ndarray:
    if j < 1:
        raise ValueError("generation must be >= 1")
    if j > cap:
        raise ValueError(
            f"enumeration at generation {j} exceeds the cap of {cap} "
            f"({1 << j} cells); raise cap explicitly if intended"
        )
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    q2 = np.atleast_1d(np.asarray(q2, dtype=float))
    w1 = window_log_masses(enumerate_log_masses(m1, j))
    w2 = window_log_masses(enumerate_log_masses(m2, j))
    keep = np.isfinite(w1) & np.isfinite(w2)  # zero windows contribute 0 for all q
    w1, w2 = w1[keep], w2[keep]
    if w1.size == 0:
        return np.full(q1.shape, NEG_INF)
    out = np.empty(q1.shape)
    chunk = max(1, (1 << 22) // max(1, w1.size))
    for s in range(0, q1.size, chunk):
        t = q1[s : s + chunk, None] * w1[None, :] + q2[s : s + chunk, None] * w2[None, :]
        out[s : s + chunk] = _logsumexp2(t, axis=1)
    return -out / j


def tau3_enumerated(
    m1: MeasureModel,
    m2: MeasureModel,
    j: int,
    q1: float,
    q2: float,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Window scaling value by full enumeration of the 2^j cells."""
    return float(tau3_enumerated_grid(m1, m2, j, [q1], [q2], cap=cap)[0])


# ---------------------------------------------------------------------------
# window scaling function via trailing-run classes
# ---------------------------------------------------------------------------

def _suffix_sums(a: np.ndarray) -> np.ndarray:
    """s[k] = sum(a[k:]), with s[len] = 0."""
    out = np.zeros(a.size + 1)
    out[:-1] = np.cumsum(a[::-1])[::-1]
    return out


def tau3_dp_grid(
    m1: MeasureModel, m2: MeasureModel, j: int, q1: np.ndarray, q2: np.ndarray
) -> np.ndarray:
    """Exact window scaling values for product measures, O(j) per moment pair.

    Words are grouped by trailing run (final digit and run length t).  Within
    the class the free prefix sums to a product of per-generation factors, the
    tail mass is fixed, and both neighbor ratios (flip of the run, flip of the
    last digit) are constants of the class, so each class contributes one
    closed term; the extreme words 0^j and 1^j lack one neighbor each.
    """
    if j < 1:
        raise ValueError("generation must be >= 1")
    l1, r1 = _require_product(m1, j)
    l2, r2 = _require_product(m2, j)
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    q2 = np.atleast_1d(np.asarray(q2, dtype=float))
    la1, lb1 = np.log2(l1), np.log2(r1)
    la2, lb2 = np.log2(l2), np.log2(r2)

    t0 = q1[:, None] * la1[None, :] + q2[:, None] * la2[None, :]
    t1 = q1[:, None] * lb1[None, :] + q2[:, None] * lb2[None, :]
    lz = np.logaddexp2(t0, t1)  # (nq, j) per-generation prefix factors
    cumz = np.concatenate([np.zeros((q1.size, 1)), np.cumsum(lz, axis=1)], axis=1)

    sL1, sR1 = _suffix_sums(la1), _suffix_sums(lb1)
    sL2, sR2 = _suffix_sums(la2), _suffix_sums(lb2)

    def lse3(*parts):
        out = parts[0]
        for p in parts[1:]:
            out = np.logaddexp2(out, p)
        return out

    blocks = []
    if j >= 2:
        t = np.arange(1, j)  # run length, flip generation index k = j - t - 1
        k = j - t - 1
        # words u 0 1^t : tail mass, ratio to the +neighbor u 1 0^t,
        # ratio to the -neighbor (last digit flipped down)
        for (la, lb, sl, sr, q) in ((la1, lb1, sL1, sR1, q1), (la2, lb2, sL2, sR2, q2)):
            lt = la[k] + sr[k + 1]
            rp = (lb[k] - la[k]) + (sl[k + 1] - sr[k + 1])
            rm = la[j - 1] - lb[j - 1]
            lc = lse3(np.zeros_like(rp), rp, np.full_like(rp, rm))
            blocks.append(q[:, None] * (lt + lc)[None, :])
        ones_run = cumz[:, k] + blocks[0] + blocks[1]
        blocks = []
        # words u 1 0^t
        for (la, lb, sl, sr, q) in ((la1, lb1, sL1, sR1, q1), (la2, lb2, sL2, sR2, q2)):
            lt = lb[k] + sl[k + 1]
            rm = (la[k] - lb[k]) + (sr[k + 1] - sl[k + 1])
            rp = lb[j - 1] - la[j - 1]
            lc = lse3(np.zeros_like(rm), rm, np.full_like(rm, rp))
            blocks.append(q[:, None] * (lt + lc)[None, :])
        zeros_run = cumz[:, k] + blocks[0] + blocks[1]
        terms = [ones_run, zeros_run]
    else:
        terms = []

    # extreme words: 1^j has only a left neighbor, 0^j only a right one
    all_ones = (
        q1 * (sR1[0] + np.logaddexp2(0.0, la1[j - 1] - lb1[j - 1]))
        + q2 * (sR2[0] + np.logaddexp2(0.0, la2[j - 1] - lb2[j - 1]))
    )[:, None]
    all_zeros = (
        q1 * (sL1[0] + np.logaddexp2(0.0, lb1[j - 1] - la1[j - 1]))
        + q2 * (sL2[0] + np.logaddexp2(0.0, lb2[j - 1] - la2[j - 1]))
    )[:, None]
    terms.extend([all_ones, all_zeros])
    allt = np.concatenate(terms, axis=1)
    return -_logsumexp2(allt, axis=1) / j


def tau3_dp(m1: MeasureModel, m2: MeasureModel, j: int, q1: float, q2: float) -> float:
    """Window scaling value via the trailing-run collapse (product measures)."""
    return float(tau3_dp_grid(m1, m2, j, [q1], [q2])[0])


# ---------------------------------------------------------------------------
# coarse-grain counting
# ---------------------------------------------------------------------------

def coarse_counts(
    model: MeasureModel,
    j: int,
    interval: tuple[float, float],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[int, float]:
    """Number of generation-j cells whose coarse exponent log2 m(I_w)/(-j)
    falls in the closed interval, and log2(count)/j.

    Binomial and switched measures are counted exactly through digit-count
    binomials; other models fall back to enumeration below the cap.
    """
    a, b = interval
    if a > b:
        a, b = b, a
    count = 0
    if isinstance(model, Binomial):
        la, lb = math.log2(model.p), math.log2(1.0 - model.p)
        for n1 in range(j + 1):
            slope = -((j - n1) * la + n1 * lb) / j
            if a <= slope <= b:
                count += math.comb(j, n1)
    elif isinstance(model, Switched):
        ind = model.env.indicator[:j]
        ja = int(ind.sum())
        jc = j - ja
        la1, lb1 = math.log2(model.p1), math.log2(1.0 - model.p1)
        la2, lb2 = math.log2(model.p2), math.log2(1.0 - model.p2)
        for k1 in range(ja + 1):
            base = (ja - k1) * la1 + k1 * lb1
            c1 = math.comb(ja, k1)
            for k2 in range(jc + 1):
                slope = -(base + (jc - k2) * la2 + k2 * lb2) / j
                if a <= slope <= b:
                    count += c1 * math.comb(jc, k2)
    else:
        if j > cap:
            raise ValueError(f"enumeration at generation {j} exceeds the cap of {cap}")
        lm = enumerate_log_masses(model, j)
        slopes = lm / (-j)
        count = int(np.count_nonzero(np.isfinite(lm) & (slopes >= a) & (slopes <= b)))
    logratio = NEG_INF if count == 0 else math.log2(count) / j
    return count, logratio


# ---------------------------------------------------------------------------
# pointwise local-dimension traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointSpec:
    """Eventually periodic binary expansion: preperiod then repeated period."""

    preperiod: str = ""
    period: str = "0"

    def digit(self, generation: int) -> int:
        i = generation - 1
        if i < len(self.preperiod):
            return int(self.preperiod[i])
        return int(self.period[(i - len(self.preperiod)) % len(self.period)])


@dataclass(frozen=True)
class LocalDimTrace:
    point: PointSpec
    slopes: np.ndarray  # slopes[i] at generation i+1, over three-cell windows

    @property
    def running_infimum(self) -> np.ndarray:
        return np.minimum.accumulate(self.slopes)

    @property
    def tail_infimum(self) -> float:
        """Infimum over the tail window [j/2, j], damping early transients."""
        j = self.slopes.size
        return float(self.slopes[max(0, j // 2 - 1) :].min())


def local_dim_trace(model: MeasureModel, point: PointSpec, j_max: int) -> LocalDimTrace:
    """Per-generation slopes log2 m(window_j(x)) / (-j) along a point's cells.

    The window joins the point's cell with its two neighbors; the neighbor to
    cell mass ratios depend only on the trailing run of the digit string, so
    they update in O(1) per generation.
    """
    left, right = _require_product(model, j_max)
    la, lb = np.log2(left), np.log2(right)
    slopes = np.empty(j_max)
    lm = 0.0
    rho_plus = 0.0  # log2 m(I+)/m(I), meaningful unless the word is 1^j
    rho_minus = 0.0  # log2 m(I-)/m(I), meaningful unless the word is 0^j
    all_ones = True
    all_zeros = True
    prev_bit = -1
    for j in range(1, j_max + 1):
        i = j - 1
        bit = point.digit(j)
        if bit == 1:
            lm += lb[i]
            if not all_ones:  # a zero occurs before: the +neighbor flips the run
                if prev_bit == 1:
                    rho_plus = rho_plus + (la[i] - lb[i])
                else:
                    rho_plus = (lb[i - 1] - la[i - 1]) + (la[i] - lb[i])
            rho_minus = la[i] - lb[i]  # -neighbor flips just the final 1
            all_zeros = False
        else:
            lm += la[i]
            if not all_zeros:
                if prev_bit == 0:
                    rho_minus = rho_minus + (lb[i] - la[i])
                else:
                    rho_minus = (la[i - 1] - lb[i - 1]) + (lb[i] - la[i])
            rho_plus = lb[i] - la[i]
            all_ones = False
        prev_bit = bit
        window = 0.0
        if not all_ones:
            window = np.logaddexp2(window, rho_plus)
        if not all_zeros:
            window = np.logaddexp2(window, rho_minus)
        slopes[i] = -(lm + window) / j
    return LocalDimTrace(point=point, slopes=slopes)
