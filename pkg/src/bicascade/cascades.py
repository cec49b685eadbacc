"""Multiplicative cascade measures on dyadic intervals.

All mass queries are answered in log2 space; a mass of zero is represented by
``-inf`` (matching the convention that a zero factor annihilates a product for
every exponent).  Two measure families live here:

* ``Binomial(p)``: at every generation the left child receives fraction ``p``
  of its parent's mass and the right child ``1 - p``.
* ``Switched(p1, p2, env)``: the left fraction is ``p1`` at generations drawn
  into the random index set A of the environment and ``p2`` elsewhere.

Both are product measures: the mass of a cell is a product of one factor per
generation, which the scaling-function code exploits heavily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dyadic import GenIndexSet, Word

NEG_INF = float("-inf")


def _check_p(p: float, name: str = "p") -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie strictly in (0, 1), got {p}")


class MeasureModel:
    """Common surface for cascade measures.

    Subclasses answer ``log_mass`` for a word and, when the measure is a
    per-generation product, expose the factor sequences via ``factor_pairs``.
    """

    kind: str = "abstract"

    def log_mass(self, w: Word) -> float:
        raise NotImplementedError

    def factor_pairs(self, j: int) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """(left, right) linear factors for generations 1..j, or ``None``."""
        return None

    @property
    def max_depth(self) -> Optional[int]:
        """Deepest generation the model can answer, ``None`` if unbounded."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Binomial(MeasureModel):
    p: float

    kind = "binomial"

    def __post_init__(self) -> None:
        _check_p(self.p)

    def log_mass(self, w: Word) -> float:
        return log_mass_binomial(self.p, w)

    def factor_pairs(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        return np.full(j, self.p), np.full(j, 1.0 - self.p)

    def to_dict(self) -> dict:
        return {"kind": "binomial", "p": self.p}


@dataclass(frozen=True)
class Environment:
    """Realized random index set A = {j <= j_max : Y_j = 1}, Y_j iid Bernoulli(eta).

    Reproducible: one uniform per generation is drawn, in increasing
    generation order, from a single PCG64 stream keyed by ``seed``; generation
    j is a member iff its uniform is < eta.  Regenerating from
    (eta, seed, j_max) reproduces A bit for bit.
    """

    eta: float
    seed: int
    j_max: int
    members: GenIndexSet

    def __post_init__(self) -> None:
        if len(self.members) != self.j_max:
            raise ValueError("membership length must equal j_max")

    @property
    def indicator(self) -> np.ndarray:
        return np.asarray(self.members.membership, dtype=bool)

    def count_in_range(self, start: int, length: int) -> int:
        """#(A intersect {start, ..., start+length-1})."""
        if start < 1 or start + length - 1 > self.j_max:
            raise ValueError(
                f"range {start}..{start + length - 1} exceeds j_max={self.j_max}"
            )
        return int(self.indicator[start - 1 : start + length - 1].sum())

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "seed": self.seed,
            "j_max": self.j_max,
            "members_runs": self.members.to_runs(),
        }


def sample_environment(eta: float, seed: int, j_max: int) -> Environment:
    """Draw the index set A from iid Bernoulli(eta) marks, deterministically in the seed."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(j_max)
    members = GenIndexSet(tuple(bool(x) for x in (u < eta)))
    return Environment(eta=eta, seed=seed, j_max=j_max, members=members)


def environment_counts(env: Environment, start: int, length: int) -> tuple[int, float]:
    """Count of A in a window of ``length`` generations from ``start``, with
    the high-probability envelope sqrt(length * log(length) / eps_start),
    eps_J = (log J)^(-1/2).  Natural logarithms; degenerate starts give 0.
    """
    card = env.count_in_range(start, length)
    if start <= 1 or length <= 1:
        return card, 0.0
    eps = 1.0 / math.sqrt(math.log(start))
    bound = math.sqrt(length * math.log(length) / eps)
    return card, bound


@dataclass(frozen=True)
class Switched(MeasureModel):
    """Randomly switched cascade: parameter p1 on A, p2 off A."""

    p1: float
    p2: float
    env: Environment

    kind = "switched"

    def __post_init__(self) -> None:
        _check_p(self.p1, "p1")
        _check_p(self.p2, "p2")

    def log_mass(self, w: Word) -> float:
        return log_mass_switched(self, w)

    def factor_pairs(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        if j > self.env.j_max:
            raise ValueError(f"depth {j} exceeds environment j_max={self.env.j_max}")
        left = np.where(self.env.indicator[:j], self.p1, self.p2)
        return left, 1.0 - left

    @property
    def max_depth(self) -> int:
        return self.env.j_max

    def to_dict(self) -> dict:
        return {
            "kind": "switched",
            "p1": self.p1,
            "p2": self.p2,
            "eta": self.env.eta,
            "seed": self.env.seed,
            "j_max": self.env.j_max,
        }


def log_mass_binomial(p: float, w: Word) -> float:
    """log2 mu_p(I_w) = N0 log2 p + N1 log2 (1-p); never -inf."""
    _check_p(p)
    n0, n1 = w.digit_counts()
    return n0 * math.log2(p) + n1 * math.log2(1.0 - p)

def log_mass_switched(model: Switched, w: Word) -> float:
    """log2 of the switched-cascade mass, one factor per generation.

    Computed directly along the word; the product split across A and its
    complement (two binomial masses on the restricted words) is an identity
    checked in the tests, not the implementation route.
    """
    j = len(w)
    if j > model.env.j_max:
        raise ValueError(f"word depth {j} exceeds environment j_max={model.env.j_max}")
    ind = model.env.indicator
    total = 0.0
    for i, b in enumerate(w.bits):
        p = model.p1 if ind[i] else model.p2
        total += math.log2(p) if b == 0 else math.log2(1.0 - p)
    return total


def model_from_dict(d: dict) -> MeasureModel:
    """Rebuild a measure from its JSON description."""
    kind = d.get("kind")
    if kind == "binomial":
        return Binomial(p=float(d["p"]))
    if kind == "switched":
        env = sample_environment(float(d["eta"]), int(d["seed"]), int(d["j_max"]))
        return Switched(p1=float(d["p1"]), p2=float(d["p2"]), env=env)
    if kind == "counterexample":
        from .counterexample import CounterexampleMember, build_counterexample_schedule

        schedule = build_counterexample_schedule(int(d["n_max"]))
        return CounterexampleMember(schedule=schedule, index=int(d["index"]))
    raise ValueError(f"unknown measure kind: {kind!r}")
