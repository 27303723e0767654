"""Exact level-set calculus on cutting-and-stacking towers.

A ``LevelSet`` is a finite-measure set written as a union of distinct levels
of one stage's tower; its measure is (number of levels) x (level width),
an exact rational.  Refining to a deeper stage rewrites level l of stage j
as the levels {pos_j(i) + l : i = 1..r_j} of stage j+1 and preserves measure
exactly.

``apply_power_bounds`` computes mu(T^n A /\\ B) as an exact rational interval:
at a common stage J with h_J > |n| the map T^n sends level l to level l+n as
long as l+n stays inside [0, h_J); levels shifted past the top are deferred,
refined one stage deeper, and retried.  Whatever remains unresolved when the
stage budget runs out widens the interval; it never fabricates a point value.
Negative powers go through mu(T^n A /\\ B) = mu(T^{-n} B /\\ A), so only the
forward shifter exists.

Everything here is pure and immutable; memo tables are internal.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .construction import ConstructionParams, stage_geometry

DEFAULT_EXTRA_STAGES = 8
_MAX_STAGE_ENV = "RANK1_MAX_STAGE"


@dataclass(frozen=True)
class MeasureBound:
    """Exact rational interval [lo, hi] bracketing a measure value."""

    lo: Fraction
    hi: Fraction
    resolved_stage: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi):
            raise ValueError(f"bad measure interval [{self.lo}, {self.hi}]")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def unresolved_mass(self) -> Fraction:
        return self.hi - self.lo

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise ValueError(f"interval [{self.lo}, {self.hi}] is not exact")
        return self.lo

    @classmethod
    def exactly(cls, value, stage: int = 0) -> "MeasureBound":
        value = Fraction(value)
        return cls(value, value, stage)

    def __add__(self, other: "MeasureBound") -> "MeasureBound":
        return MeasureBound(
            self.lo + other.lo,
            self.hi + other.hi,
            max(self.resolved_stage, other.resolved_stage),
        )

    def scaled(self, c) -> "MeasureBound":
        c = Fraction(c)
        if c < 0:
            raise ValueError("scale factor must be >= 0")
        return MeasureBound(c * self.lo, c * self.hi, self.resolved_stage)

    def times(self, other: "MeasureBound") -> "MeasureBound":
        # both intervals are subsets of [0, oo)
        return MeasureBound(
            self.lo * other.lo,
            self.hi * other.hi,
            max(self.resolved_stage, other.resolved_stage),
        )

    def deviation_from(self, target: "MeasureBound") -> tuple[Fraction, Fraction]:
        """Range of |value - target| over both intervals."""
        dev_lo = max(Fraction(0), self.lo - target.hi, target.lo - self.hi)
        dev_hi = max(self.hi - target.lo, target.hi - self.lo)
        return dev_lo, dev_hi


@dataclass(frozen=True)
class LevelSet:
    """Union of distinct levels of one stage's tower."""

    params: ConstructionParams
    stage: int
    levels: tuple[int, ...]

    def __post_init__(self):
        geom = stage_geometry(self.params, self.stage)
        prev = -1
        for lvl in self.levels:
            if lvl <= prev:
                raise ValueError("levels must be strictly increasing")
            prev = lvl
        if self.levels and not (0 <= self.levels[0] and self.levels[-1] < geom.h):
            raise ValueError(f"levels must lie in [0, {geom.h}) at stage {self.stage}")

    @classmethod
    def from_levels(cls, params, stage: int, levels: Iterable[int]) -> "LevelSet":
        return cls(params, stage, tuple(sorted(set(int(v) for v in levels))))

    @classmethod
    def base(cls, params, stage: int) -> "LevelSet":
        """E_stage, the base level of the stage's tower."""
        return cls(params, stage, (0,))

    @classmethod
    def single(cls, params, stage: int, level: int) -> "LevelSet":
        """T^level E_stage, a single tower level."""
        return cls(params, stage, (int(level),))

    @classmethod
    def full_tower(cls, params, stage: int) -> "LevelSet":
        h = stage_geometry(params, stage).h
        return cls(params, stage, tuple(range(h)))

    @property
    def width(self) -> Fraction:
        return stage_geometry(self.params, self.stage).level_width

    @property
    def measure(self) -> Fraction:
        return len(self.levels) * self.width


def measure(a: LevelSet) -> Fraction:
    return a.measure


@lru_cache(maxsize=None)
def _refined_levels(a: LevelSet, to_stage: int) -> tuple[int, ...]:
    if to_stage == a.stage:
        return a.levels
    prev = _refined_levels(a, to_stage - 1)
    offsets = stage_geometry(a.params, to_stage - 1).column_offsets
    return tuple(sorted(off + lvl for off in offsets for lvl in prev))


@lru_cache(maxsize=None)
def _refined_index(a: LevelSet, to_stage: int) -> frozenset[int]:
    return frozenset(_refined_levels(a, to_stage))


def refine(a: LevelSet, to_stage: int) -> LevelSet:
    """Same point set, represented at a deeper stage.  Measure is preserved."""
    if to_stage < a.stage:
        raise ValueError("cannot refine to a shallower stage")
    return LevelSet(a.params, to_stage, _refined_levels(a, to_stage))


def _check_same_construction(a: LevelSet, b: LevelSet):
    if a.params != b.params:
        raise ValueError("level sets belong to different constructions")


def _align(a: LevelSet, b: LevelSet) -> tuple[LevelSet, LevelSet, int]:
    _check_same_construction(a, b)
    j = max(a.stage, b.stage)
    return refine(a, j), refine(b, j), j


def intersect(a: LevelSet, b: LevelSet) -> LevelSet:
    ra, rb, j = _align(a, b)
    return LevelSet.from_levels(a.params, j, set(ra.levels) & set(rb.levels))


def union(a: LevelSet, b: LevelSet) -> LevelSet:
    ra, rb, j = _align(a, b)
    return LevelSet.from_levels(a.params, j, set(ra.levels) | set(rb.levels))


def difference(a: LevelSet, b: LevelSet) -> LevelSet:
    ra, rb, j = _align(a, b)
    return LevelSet.from_levels(a.params, j, set(ra.levels) - set(rb.levels))


def _resolve_stage_budget(max_stage: int | None, start: int) -> int:
    if max_stage is None:
        max_stage = start + DEFAULT_EXTRA_STAGES
    env_cap = os.environ.get(_MAX_STAGE_ENV)
    if env_cap is not None:
        max_stage = min(max_stage, int(env_cap))
    return max(max_stage, start)


def apply_power_bounds(
    a: LevelSet, b: LevelSet, n: int, max_stage: int | None = None
) -> MeasureBound:
    """Exact rational bounds on mu(T^n A /\\ B).

    The interval collapses (lo == hi) when every deferred piece resolves
    within the stage budget; raising ``max_stage`` never widens the result.
    ``RANK1_MAX_STAGE`` caps the budget globally.
    """
    _check_same_construction(a, b)
    if n < 0:
        return apply_power_bounds(b, a, -n, max_stage)
    if n == 0:
        both = intersect(a, b)
        return MeasureBound.exactly(both.measure, both.stage)

    start = max(a.stage, b.stage)
    while stage_geometry(a.params, start).h <= n:
        start += 1
    budget = _resolve_stage_budget(max_stage, start)

    pending = list(_refined_levels(a, start))
    lo = Fraction(0)
    j = start
    while True:
        geom = stage_geometry(a.params, j)
        b_levels = _refined_index(b, j)
        hits = 0
        deferred = []
        for lvl in pending:
            moved = lvl + n
            if moved < geom.h:
                if moved in b_levels:
                    hits += 1
            else:
                deferred.append(lvl)
        if hits:
            lo += hits * geom.level_width
        if not deferred:
            return MeasureBound(lo, lo, j)
        if j >= budget:
            return MeasureBound(lo, lo + len(deferred) * geom.level_width, j)
        offsets = geom.column_offsets
        pending = [off + lvl for off in offsets for lvl in deferred]
        j += 1


# ---------------------------------------------------------------------------
# Textual form ("stage=3; levels=0,1,3,4") for CLI and fixtures


def format_level_set(a: LevelSet) -> str:
    return f"stage={a.stage}; levels={','.join(str(v) for v in a.levels)}"


def parse_level_set(text: str, params: ConstructionParams) -> LevelSet:
    stage = None
    levels: tuple[int, ...] | None = None
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "stage":
            stage = int(value)
        elif key == "levels":
            levels = tuple(int(v) for v in value.split(",") if v.strip() != "")
        else:
            raise ValueError(f"unknown level-set field {key!r}")
    if stage is None or levels is None:
        raise ValueError(f"level-set text needs stage= and levels=: {text!r}")
    return LevelSet.from_levels(params, stage, levels)
