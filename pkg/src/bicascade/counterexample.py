"""The alternating-scheme measure pair with disjoint spectrum supports.

Two measures nu_1, nu_2 are built simultaneously on even binary generations
by quad-steps (each quad-step refines generation 2j into 2(j+1)) using two
schemes:

* P1 (uniform refinement): every grandchild cell gets 1/4 of its ancestor's
  mass.
* P2 (Cantor halving): the first and last grandchild get 1/2 each, the middle
  two get 0.

Both schemes preserve total mass, and every nonzero cell of a given measure at
a given generation carries the same mass, so the whole construction reduces to
exact integer recursions on log2 masses and cell counts.  An epoch n consists
of four stages with scheme pairs (P1,P2), (P1,P1), (P2,P1), (P1,P1) for
(nu_1, nu_2), run until the stage-end generations j1 <= j2 <= j3 <= j4.  Each
stage end is the smallest integer j satisfying 5*j_prev/j <= eps_n/2 with
eps_n = 2^-(n+2) (the very first stage of an epoch uses 5*j_prev + 1 in the
numerator so that the rule is meaningful when j_prev = 0).

Generations grow super-exponentially (~1e26 by epoch 3), so all counters are
exact Python integers; no cell enumeration is ever required beyond what the
caller explicitly asks for at small depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cascades import NEG_INF, MeasureModel
from .dyadic import Word

# scheme pairs (nu1, nu2) for the four stages of every epoch
STAGE_SCHEMES: tuple[tuple[str, str], ...] = (
    ("P1", "P2"),
    ("P1", "P1"),
    ("P2", "P1"),
    ("P1", "P1"),
)

# per quad-generation increments of (log2 m, log2 c) for one measure
_SCHEME_DELTAS = {"P1": (-2, 2), "P2": (-1, 1)}


def epsilon(n: int) -> Fraction:
    """eps_n = 2^-(n+2)."""
    if n < 1:
        raise ValueError("epoch index starts at 1")
    return Fraction(1, 2 ** (n + 2))


@dataclass(frozen=True)
class Profile:
    """Exact log2 state of the pair at one even binary generation.

    ``log2_m{1,2}`` is the common log2 mass of the nonzero cells of each
    measure, ``log2_c{1,2}`` the log2 count of nonzero cells, ``log2_c12``
    the log2 count of jointly nonzero cells.  Mass conservation makes
    log2_m_i + log2_c_i = 0 at every generation.
    """

    log2_m1: int
    log2_m2: int
    log2_c1: int
    log2_c2: int
    log2_c12: int


@dataclass(frozen=True)
class Stage:
    """One constant-scheme segment: quad generations start+1 .. end."""

    start: int
    end: int
    scheme1: str
    scheme2: str
    start_profile: Profile


@dataclass(frozen=True)
class Epoch:
    n: int
    eps: Fraction
    j1: int
    j2: int
    j3: int
    j4: int

    @property
    def stage_ends(self) -> tuple[int, int, int, int]:
        return (self.j1, self.j2, self.j3, self.j4)


@dataclass(frozen=True)
class CounterexampleSchedule:
    n_max: int
    epochs: tuple[Epoch, ...]
    stages: tuple[Stage, ...]

    @property
    def max_even_generation(self) -> int:
        return 2 * self.epochs[-1].j4

    def profile_at(self, generation: int) -> Profile:
        """Exact profile at an even binary generation (2 <= g <= max)."""
        if generation % 2 != 0:
            raise ValueError(f"profiles exist at even generations only, got {generation}")
        quad = generation // 2
        if quad < 1 or quad > self.epochs[-1].j4:
            raise ValueError(
                f"generation {generation} outside the computed range "
                f"2..{self.max_even_generation}"
            )
        stage = self._stage_of(quad)
        d = quad - stage.start
        dm1, dc1 = _SCHEME_DELTAS[stage.scheme1]
        dm2, dc2 = _SCHEME_DELTAS[stage.scheme2]
        dc12 = 2 if (stage.scheme1, stage.scheme2) == ("P1", "P1") else 1
        p = stage.start_profile
        return Profile(
            log2_m1=p.log2_m1 + d * dm1,
            log2_m2=p.log2_m2 + d * dm2,
            log2_c1=p.log2_c1 + d * dc1,
            log2_c2=p.log2_c2 + d * dc2,
            log2_c12=p.log2_c12 + d * dc12,
        )

    def schemes_at(self, quad: int) -> tuple[str, str]:
        """Scheme pair applied on the step into quad generation ``quad``."""
        stage = self._stage_of(quad)
        return stage.scheme1, stage.scheme2

    def _stage_of(self, quad: int) -> Stage:
        for stage in self.stages:
            if stage.start < quad <= stage.end:
                return stage
        raise ValueError(f"quad generation {quad} outside the schedule")

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "epochs": [
                {
                    "n": e.n,
                    "eps": str(e.eps),
                    "j1": e.j1,
                    "j2": e.j2,
                    "j3": e.j3,
                    "j4": e.j4,
                    "milestone_profiles": [
                        vars(self.profile_at(2 * jj)) for jj in e.stage_ends
                    ],
                }
                for e in self.epochs
            ],
        }


def build_counterexample_schedule(n_max: int) -> CounterexampleSchedule:
    """Stage-end generations and exact profiles for epochs 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    epochs: list[Epoch] = []
    stages: list[Stage] = []
    prev_end = 0
    profile = Profile(0, 0, 0, 0, 0)
    for n in range(1, n_max + 1):
        eps = epsilon(n)
        factor = int(2 / eps)
        j1 = (5 * prev_end + 1) * factor
        j2 = 5 * j1 * factor
        j3 = 5 * j2 * factor
        j4 = 5 * j3 * factor
        ends = (j1, j2, j3, j4)
        start = prev_end
        for end, (s1, s2) in zip(ends, STAGE_SCHEMES):
            stages.append(Stage(start, end, s1, s2, profile))
            d = end - start
            dm1, dc1 = _SCHEME_DELTAS[s1]
            dm2, dc2 = _SCHEME_DELTAS[s2]
            dc12 = 2 if (s1, s2) == ("P1", "P1") else 1
            profile = Profile(
                profile.log2_m1 + d * dm1,
                profile.log2_m2 + d * dm2,
                profile.log2_c1 + d * dc1,
                profile.log2_c2 + d * dc2,
                profile.log2_c12 + d * dc12,
            )
            start = end
        epochs.append(Epoch(n=n, eps=eps, j1=j1, j2=j2, j3=j3, j4=j4))
        prev_end = j4
    return CounterexampleSchedule(n_max=n_max, epochs=tuple(epochs), stages=tuple(stages))


def counterexample_tau(
    schedule: CounterexampleSchedule, generation: int, q1: float, q2: float
) -> float:
    """Bivariate L^q scaling value of the pair at an even generation.

    Since every jointly nonzero cell contributes the same product
    m1^q1 * m2^q2 and all other cells contribute 0 (a zero factor kills the
    term for every exponent), the partition sum collapses exactly to
    c12 * m1^q1 * m2^q2.
    """
    p = schedule.profile_at(generation)
    return -(p.log2_c12 + q1 * p.log2_m1 + q2 * p.log2_m2) / generation


def counterexample_tau_limit(q1, q2):
    """Limiting scaling function: min of the three affine milestone planes."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    out = np.minimum(q1 + q2 - 1.0, np.minimum(q1 / 2 + q2 - 0.5, q1 + q2 / 2 - 0.5))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CounterexampleMember(MeasureModel):
    """One of the two measures, answering cell mass queries at even depth."""

    schedule: CounterexampleSchedule
    index: int

    kind = "counterexample"

    def __post_init__(self) -> None:
        if self.index not in (1, 2):
            raise ValueError("index selects measure 1 or 2")

    @property
    def max_depth(self) -> int:
        return self.schedule.max_even_generation

    def log_mass(self, w: Word) -> float:
        j = len(w)
        if j == 0:
            return 0.0
        if j % 2 != 0:
            raise ValueError("masses are defined at even generations only")
        for quad in range(1, j // 2 + 1):
            scheme = self.schedule.schemes_at(quad)[self.index - 1]
            if scheme == "P2":
                b1, b2 = w.bits[2 * quad - 2], w.bits[2 * quad - 1]
                if b1 != b2:  # P2 keeps only the first and last grandchild
                    return NEG_INF
        return float(getattr(self.schedule.profile_at(j), f"log2_m{self.index}"))

    def enumerate_log_masses(self, j: int) -> np.ndarray:
        """log2 masses of all 2^j cells of an even generation, in x order."""
        if j % 2 != 0:
            raise ValueError("masses are defined at even generations only")
        masses = np.zeros(1)
        for quad in range(1, j // 2 + 1):
            scheme = self.schedule.schemes_at(quad)[self.index - 1]
            if scheme == "P1":
                step = np.full(4, -2.0)
            else:
                step = np.array([-1.0, NEG_INF, NEG_INF, -1.0])
            masses = (masses[:, None] + step[None, :]).ravel()
        return masses

    def to_dict(self) -> dict:
        return {
            "kind": "counterexample",
            "n_max": self.schedule.n_max,
            "index": self.index,
        }
