"""Off-diagonal self-joinings and their finite-stage tower windows.

The shifted diagonal measure evaluates on rectangles as
Delta^k(A x B) = mu(A /\\ T^{-k} B) = mu(T^k A /\\ B); its graph pairs each
point x with T^k x.  The stage-j partial joining restricts that graph to the
pairs whose both coordinates sit inside the stage-j tower, which makes every
value a plain level count: for k >= 0 it counts levels i with i in A's
stage-j levels and i+k in B's, i+k < h_j (mirrored for k < 0), times the
level width.  Partial joinings grow with j and exhaust the full value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .construction import ConstructionParams, stage_geometry
from .tower import LevelSet, MeasureBound, apply_power_bounds, _refined_index


def delta_shift(a: LevelSet, b: LevelSet, k: int, max_stage: int | None = None) -> MeasureBound:
    """Delta^k(A x B) = mu(A /\\ T^{-k} B), delegated to the level calculus."""
    return apply_power_bounds(a, b, k, max_stage)


def partial_joining(a: LevelSet, b: LevelSet, k: int, j: int) -> MeasureBound:
    """Stage-j partial joining Delta^k_j(A x B); exact by construction."""
    if a.params != b.params:
        raise ValueError("level sets belong to different constructions")
    geom = stage_geometry(a.params, j)
    if abs(k) > geom.h:
        raise ValueError(f"|k| = {abs(k)} exceeds tower height {geom.h} at stage {j}")
    if max(a.stage, b.stage) > j:
        raise ValueError("sets are not representable at the requested stage")
    a_levels = _refined_index(a, j)
    b_levels = _refined_index(b, j)
    h = geom.h
    if k >= 0:
        count = sum(1 for i in a_levels if i + k < h and i + k in b_levels)
    else:
        m = -k
        count = sum(1 for i in a_levels if i >= m and i - m in b_levels)
    return MeasureBound.exactly(count * geom.level_width, j)


@dataclass(frozen=True)
class JoiningCombination:
    """Convex combination sum_k c^k Delta^k_j with weights summing to 1."""

    stage: int
    weights: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        total = Fraction(0)
        seen = set()
        for k, c in self.weights:
            if k in seen:
                raise ValueError(f"duplicate shift {k}")
            seen.add(k)
            if c < 0:
                raise ValueError("weights must be >= 0")
            total += c
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")

    @classmethod
    def from_dict(cls, stage: int, weights: dict[int, Fraction]) -> "JoiningCombination":
        return cls(stage, tuple(sorted((int(k), Fraction(c)) for k, c in weights.items())))


def combination_value(comb: JoiningCombination, a: LevelSet, b: LevelSet) -> MeasureBound:
    acc = MeasureBound.exactly(0)
    for k, c in comb.weights:
        if c == 0:
            continue
        acc = acc + partial_joining(a, b, k, comb.stage).scaled(c)
    return acc


@dataclass(frozen=True)
class WitnessRow:
    j: int
    k_chosen: int | None
    margin_lo: Fraction | None
    margin_hi: Fraction | None

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "k_chosen": str(self.k_chosen) if self.k_chosen is not None else None,
            "margin_lo": str(self.margin_lo) if self.margin_lo is not None else None,
            "margin_hi": str(self.margin_hi) if self.margin_hi is not None else None,
        }


@dataclass(frozen=True)
class WitnessReport:
    m: int
    rows: tuple[WitnessRow, ...]
    passed: bool
    vacuous: bool


def _witness_candidates(params: ConstructionParams, j: int, m: int) -> list[int]:
    h_j = stage_geometry(params, j).h
    h_prev = stage_geometry(params, j - 1).h
    raw = [
        m,
        m + h_j,
        m - h_j,
        m + h_j + h_prev,
        m + h_j - h_prev,
        m - h_j + h_prev,
        m - h_j - h_prev,
    ]
    return sorted(set(raw))


def domination_witness(
    params: ConstructionParams,
    m: int,
    rect_grid,
    j_range,
    eps=Fraction(0),
    max_stage: int | None = None,
) -> WitnessReport:
    """For each stage pick the shift k(j) whose Delta^{k(j)} dominates
    half of Delta^m uniformly over the rectangle grid.

    The margin is min over the grid of Delta^{k}(A x B) - (1/2) Delta^m(A x B);
    PASS needs margin >= -eps at every stage.  Candidates are the finite menu
    k = m, +-h_j + m, +-h_j +- h_{j-1} + m; ties prefer the largest |k| so the
    reported witness is a genuinely escaping shift.
    """
    eps = Fraction(eps)
    rect_grid = list(rect_grid)
    if not rect_grid:
        rows = tuple(WitnessRow(j, None, None, None) for j in j_range)
        return WitnessReport(m=m, rows=rows, passed=True, vacuous=True)
    half_base = [
        delta_shift(a, b, m, max_stage).scaled(Fraction(1, 2)) for a, b in rect_grid
    ]
    rows = []
    passed = True
    for j in j_range:
        best = None
        for k in _witness_candidates(params, j, m):
            margin_lo = None
            margin_hi = None
            for (a, b), half in zip(rect_grid, half_base):
                dk = delta_shift(a, b, k, max_stage)
                lo = dk.lo - half.hi
                hi = dk.hi - half.lo
                margin_lo = lo if margin_lo is None else min(margin_lo, lo)
                margin_hi = hi if margin_hi is None else min(margin_hi, hi)
            key = (margin_lo, abs(k), k)
            if best is None or key > best[0]:
                best = (key, k, margin_lo, margin_hi)
        _, k_chosen, margin_lo, margin_hi = best
        rows.append(WitnessRow(j, k_chosen, margin_lo, margin_hi))
        if margin_lo < -eps:
            passed = False
    return WitnessReport(m=m, rows=tuple(rows), passed=passed, vacuous=False)
