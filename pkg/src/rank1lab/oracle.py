"""Brute-force interval model of the truncated system, independent of the
level calculus.

The stage-J tower is materialized as h_J explicit subintervals of the line,
laid out by replaying the stacking rule literally: stage 1 occupies
[0, h_1 * w_1), each cut slices every level interval into r equal parts in
place, and every spacer is allocated at the end of the used part of the line.
By induction every level of every stage is a single half-open interval and
the used space is [0, h_J * w_J), so the system is stored as a permutation
between "cells" (intervals of width w_J) and level indices.  T is the partial
piecewise translation moving level l onto level l+1; it is undefined on the
top level, and T^{-1} is undefined on the bottom one.

None of the tower-calculus refinement machinery is used here; that module is
validated against this one, so they share only the construction parameters.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .construction import ConstructionParams
from .tower import LevelSet


class _Stage:
    __slots__ = ("index", "cell_of_level", "level_of_cell", "subdivision")

    def __init__(self, index, cell_of_level, subdivision):
        self.index = index
        self.cell_of_level = cell_of_level
        self.subdivision = subdivision  # cells per stage-1 cell
        inverse = [0] * len(cell_of_level)
        for level, cell in enumerate(cell_of_level):
            inverse[cell] = level
        self.level_of_cell = inverse


_chains: dict[ConstructionParams, list[_Stage]] = {}
_chains_lock = threading.Lock()


def _stage(params: ConstructionParams, j: int) -> _Stage:
    with _chains_lock:
        chain = _chains.setdefault(params, [])
        if not chain:
            chain.append(_Stage(1, list(range(params.h1)), 1))
        while len(chain) < j:
            prev = chain[-1]
            h = len(prev.cell_of_level)
            r = params.cut_count(prev.index)
            spacers = params.spacer_vector(prev.index, h)
            cells = []
            free = h * r
            for column in range(r):
                for level in range(h):
                    cells.append(prev.cell_of_level[level] * r + column)
                for _ in range(spacers[column]):
                    cells.append(free)
                    free += 1
            chain.append(_Stage(prev.index + 1, cells, prev.subdivision * r))
        return chain[j - 1]


@dataclass(frozen=True)
class IntervalSystem:
    """Stage-J tower as explicit rational intervals of the line."""

    params: ConstructionParams
    stage: int

    @property
    def _data(self) -> _Stage:
        return _stage(self.params, self.stage)

    @property
    def height(self) -> int:
        return len(self._data.cell_of_level)

    @property
    def cell_width(self) -> Fraction:
        return self.params.base_width / self._data.subdivision

    def interval(self, level: int) -> tuple[Fraction, Fraction]:
        """[left, right) endpoints of the given tower level."""
        cell = self._data.cell_of_level[level]
        w = self.cell_width
        return cell * w, (cell + 1) * w

    def cells_of(self, a: LevelSet) -> set[int]:
        """Cells of this system covered by a shallower-stage level set."""
        if a.params != self.params:
            raise ValueError("level set belongs to a different construction")
        if a.stage > self.stage:
            raise ValueError("level set is finer than the system")
        shallow = _stage(self.params, a.stage)
        ratio = self._data.subdivision // shallow.subdivision
        cells: set[int] = set()
        for level in a.levels:
            start = shallow.cell_of_level[level] * ratio
            cells.update(range(start, start + ratio))
        return cells


@dataclass(frozen=True)
class OracleResult:
    value: Fraction
    undefined_mass: Fraction
    stage: int

    @property
    def fully_defined(self) -> bool:
        return self.undefined_mass == 0


class OrbitWalker:
    """Tracks the image of a set under repeated T or T^{-1} steps.

    Mass whose orbit leaves the stage-J tower is removed and accumulated as
    undefined.  Intended for incremental sweeps over consecutive powers.
    """

    def __init__(self, a: LevelSet, stage: int):
        self.system = IntervalSystem(a.params, stage)
        self._data = self.system._data
        self.cells = self.system.cells_of(a)
        self.undefined = Fraction(0)
        self.power = 0

    def step(self, direction: int = 1):
        data = self._data
        top = len(data.cell_of_level) - 1
        moved = set()
        if direction >= 0:
            for cell in self.cells:
                level = data.level_of_cell[cell]
                if level < top:
                    moved.add(data.cell_of_level[level + 1])
            self.power += 1
        else:
            for cell in self.cells:
                level = data.level_of_cell[cell]
                if level > 0:
                    moved.add(data.cell_of_level[level - 1])
            self.power -= 1
        self.undefined += (len(self.cells) - len(moved)) * self.system.cell_width
        self.cells = moved

    def value_against(self, b: LevelSet) -> Fraction:
        hits = self.cells & self.system.cells_of(b)
        return len(hits) * self.system.cell_width


def oracle_intersection(a: LevelSet, b: LevelSet, n: int, stage: int) -> OracleResult:
    """mu(T^n A /\\ B) by explicit orbit tracking in the stage-J system.

    Refuses |n| >= h_J (everything would leave the tower).  The returned
    value covers exactly the mass whose whole orbit segment stays inside the
    stage-J tower; the rest is reported as undefined, never guessed.
    """
    system = IntervalSystem(a.params, stage)
    if abs(n) >= system.height:
        raise ValueError(f"|n| = {abs(n)} >= tower height {system.height} at stage {stage}")
    walker = OrbitWalker(a, stage)
    for _ in range(abs(n)):
        walker.step(1 if n >= 0 else -1)
    return OracleResult(walker.value_against(b), walker.undefined, stage)
