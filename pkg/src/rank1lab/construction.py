"""Rank-one cutting-and-stacking constructions.

A construction is determined by the initial tower height, a cut-count rule
r_j >= 2 and a spacer vector rule s_j = (s_j(1), ..., s_j(r_j)), s_j(i) >= 0.
Stage j+1 is built by cutting the stage-j tower into r_j equal-width columns,
adding s_j(i) fresh spacer levels on top of column i, and stacking the columns
left to right, so

    h_{j+1} = h_j * r_j + sum_i s_j(i)

and column i's base sits at offset pos(i) = sum_{i'<i} (h_j + s_j(i')) inside
the stage-(j+1) tower.  All widths and measures are exact rationals.

Spacer rules form a closed enumeration (zero, constant, c*j, c*h_j, j*h_j,
the block sequence 1,2, 1,2,3, 1,2,3,4, ..., and a scaled-height target) so a
config file reproduces a construction exactly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .serde import format_int, format_rational, parse_int, parse_rational


class InvalidConstructionError(ValueError):
    """Raised when parameters cannot define a valid construction."""


def block_sequence(j: int) -> int:
    """j-th element (1-indexed) of 1,2, 1,2,3, 1,2,3,4, ...

    Block b (b >= 1) is 1..b+1; every positive value recurs infinitely often.
    """
    if j < 1:
        raise ValueError("index must be >= 1")
    b = 1
    cum = 0
    while cum + b + 1 < j:
        cum += b + 1
        b += 1
    return j - cum


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _reference_height(j: int) -> int:
    # Heights of the halving family (h_1 = 2, h_{j+1} = (j+2) h_j), i.e. (j+1)!.
    return math.factorial(j + 1)


_SPACER_RULE_KINDS = (
    "zero",
    "constant",
    "linear",        # c * j
    "times_height",  # c * h_j
    "j_times_h",     # j * h_j
    "blocks",        # block_sequence(j)
    "scaled_target",
)


@dataclass(frozen=True)
class SpacerRule:
    """Deterministic spacer count as a function of (j, h_j)."""

    kind: str
    c: int = 1
    a: Fraction | None = None  # scaled_target only

    def __post_init__(self):
        if self.kind not in _SPACER_RULE_KINDS:
            raise InvalidConstructionError(f"unknown spacer rule {self.kind!r}")
        if self.kind == "scaled_target":
            if self.a is None or self.a <= 1:
                raise InvalidConstructionError("scaled_target needs a rational a > 1")
        elif self.c < 0:
            raise InvalidConstructionError("spacer multiplier must be >= 0")

    def evaluate(self, j: int, h: int) -> int:
        if self.kind == "zero":
            return 0
        if self.kind == "constant":
            return self.c
        if self.kind == "linear":
            return self.c * j
        if self.kind == "times_height":
            return self.c * h
        if self.kind == "j_times_h":
            return j * h
        if self.kind == "blocks":
            return block_sequence(j)
        # scaled_target: push the height from H_j to H_{j+1} = ceil(a * ref(j+1))
        # assuming r_j = 2 and a single nonzero spacer.
        target_next = _ceil(self.a * _reference_height(j + 1))
        return target_next - 2 * h


@dataclass(frozen=True)
class CutRule:
    """Cut count r_j: constant, or j + c for constructions with r_j -> oo."""

    kind: str  # "constant" | "j_plus"
    c: int

    def __post_init__(self):
        if self.kind == "constant":
            if self.c < 2:
                raise InvalidConstructionError("cut count must be >= 2")
        elif self.kind == "j_plus":
            if self.c < 1:
                raise InvalidConstructionError("j_plus cut rule needs c >= 1")
        else:
            raise InvalidConstructionError(f"unknown cut rule {self.kind!r}")

    def evaluate(self, j: int) -> int:
        if self.kind == "constant":
            return self.c
        return j + self.c


@dataclass(frozen=True)
class ConstructionParams:
    """Full recipe for a rank-one construction.

    ``spacer_tail`` gives rules for the last ``len(spacer_tail)`` columns of
    every stage; earlier columns get zero spacers.  This covers all preset
    families, including (0, ..., 0, block_sequence(j), j*h_j) shapes.
    """

    h1: int
    cuts: CutRule
    spacer_tail: tuple[SpacerRule, ...]
    base_width: Fraction = Fraction(1)
    family: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.h1 < 1:
            raise InvalidConstructionError("initial height must be >= 1")
        if self.base_width <= 0:
            raise InvalidConstructionError("base width must be positive")

    def cut_count(self, j: int) -> int:
        r = self.cuts.evaluate(j)
        if r < 2:
            raise InvalidConstructionError(f"cut count {r} < 2 at stage {j}")
        return r

    def spacer_vector(self, j: int, h: int) -> tuple[int, ...]:
        """s_j = (s_j(1), ..., s_j(r_j)) for a tower of height h at stage j."""
        r = self.cut_count(j)
        if len(self.spacer_tail) > r:
            raise InvalidConstructionError(
                f"{len(self.spacer_tail)} spacer rules but only {r} columns at stage {j}"
            )
        head = (0,) * (r - len(self.spacer_tail))
        tail = []
        for rule in self.spacer_tail:
            s = rule.evaluate(j, h)
            if s < 0:
                raise InvalidConstructionError(f"negative spacer count at stage {j}")
            if rule.kind == "scaled_target" and s < h:
                raise InvalidConstructionError(
                    f"scaled target spacer {s} < height {h} at stage {j}; "
                    "the scale factor is too close to 1"
                )
            tail.append(s)
        return head + tuple(tail)

    def label(self) -> str:
        return self.family or "custom"


@dataclass(frozen=True)
class StageGeometry:
    """Exact geometry of stage j and of the j -> j+1 stacking step."""

    j: int
    h: int
    level_width: Fraction
    r: int
    spacers: tuple[int, ...]
    column_offsets: tuple[int, ...]
    space_measure: Fraction

    @property
    def next_height(self) -> int:
        return self.column_offsets[-1] + self.h + self.spacers[-1]


_geometry_cache: dict[ConstructionParams, list[StageGeometry]] = {}
_geometry_lock = threading.Lock()


def _build_stage(params: ConstructionParams, j: int, h: int, width: Fraction) -> StageGeometry:
    spacers = params.spacer_vector(j, h)
    offsets = [0]
    for s in spacers[:-1]:
        offsets.append(offsets[-1] + h + s)
    return StageGeometry(
        j=j,
        h=h,
        level_width=width,
        r=len(spacers),
        spacers=spacers,
        column_offsets=tuple(offsets),
        space_measure=h * width,
    )


def stage_geometry(params: ConstructionParams, j: int) -> StageGeometry:
    """Geometry of stage j >= 1.  Memoized per construction; observationally pure."""
    if j < 1:
        raise ValueError("stage index must be >= 1")
    with _geometry_lock:
        chain = _geometry_cache.setdefault(params, [])
        if not chain:
            chain.append(_build_stage(params, 1, params.h1, params.base_width))
        while len(chain) < j:
            prev = chain[-1]
            chain.append(
                _build_stage(params, prev.j + 1, prev.next_height, prev.level_width / prev.r)
            )
        return chain[j - 1]


def height(params: ConstructionParams, j: int) -> int:
    return stage_geometry(params, j).h


def level_width(params: ConstructionParams, j: int) -> Fraction:
    return stage_geometry(params, j).level_width


# ---------------------------------------------------------------------------
# Named families


def toy() -> ConstructionParams:
    """Two columns, one spacer on the right column, h_1 = 1 (heights 2^j - 1)."""
    return ConstructionParams(
        h1=1,
        cuts=CutRule("constant", 2),
        spacer_tail=(SpacerRule("zero"), SpacerRule("constant", 1)),
        family="toy",
    )


def utv1() -> ConstructionParams:
    """Halving family: r = 2, s_j = (0, j*h_j), h_1 = 2, so h_j = (j+1)!."""
    return ConstructionParams(
        h1=2,
        cuts=CutRule("constant", 2),
        spacer_tail=(SpacerRule("zero"), SpacerRule("j_times_h")),
        family="utv1",
    )


def thm2(N: int) -> ConstructionParams:
    """r = N+1, s_j = (0, ..., 0, block_sequence(j), j*h_j); requires N >= 2."""
    if N < 2:
        raise InvalidConstructionError("thm2 family requires N >= 2")
    return ConstructionParams(
        h1=2,
        cuts=CutRule("constant", N + 1),
        spacer_tail=(SpacerRule("blocks"), SpacerRule("j_times_h")),
        family=f"thm2({N})",
    )


def scaled(a) -> ConstructionParams:
    """Heights tracking a * (halving-family heights) for rational a > 1.

    h_1 = ceil(2a) and s_j(2) = H_{j+1} - 2 H_j with H_j = ceil(a (j+1)!), so
    the heights equal H_j exactly.  Stages where s_j(2) < h_j are rejected
    when their geometry is first computed.
    """
    a = parse_rational(a)
    if a <= 1:
        raise InvalidConstructionError("scaled family requires a > 1")
    return ConstructionParams(
        h1=_ceil(a * _reference_height(1)),
        cuts=CutRule("constant", 2),
        spacer_tail=(SpacerRule("zero"), SpacerRule("scaled_target", a=a)),
        family=f"scaled({a})",
    )


_FAMILY_BUILDERS = {"toy": toy, "utv1": utv1, "thm2": thm2, "scaled": scaled}


def family(name: str, **kwargs) -> ConstructionParams:
    """Build a preset by name: toy, utv1, thm2 (N=...), scaled (a=...)."""
    try:
        builder = _FAMILY_BUILDERS[name]
    except KeyError:
        raise InvalidConstructionError(f"unknown family {name!r}") from None
    return builder(**kwargs)


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class PartialSumReport:
    """Partial sums of sum_j sum_i s_j(i) / (h_j r_j) through stage J."""

    stages: tuple[int, ...]
    terms: tuple[Fraction, ...]
    partial_sums: tuple[Fraction, ...]
    total: Fraction
    diverging: bool


def infinite_measure_partial_sum(params: ConstructionParams, J: int) -> PartialSumReport:
    """Exact partial sums of the infinite-measure criterion series.

    ``diverging`` is a heuristic: the increment gathered over the most recent
    half of the stages is at least the increment over the half before it (and
    positive), the pattern of a divergent series at this truncation.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    terms = []
    for j in range(1, J + 1):
        geom = stage_geometry(params, j)
        terms.append(Fraction(sum(geom.spacers), geom.h * geom.r))
    partial = []
    acc = Fraction(0)
    for t in terms:
        acc += t
        partial.append(acc)
    total = partial[-1]
    # compare increments over (J/2, J] and (J/4, J/2]
    half = partial[J // 2 - 1] if J // 2 >= 1 else Fraction(0)
    quarter = partial[J // 4 - 1] if J // 4 >= 1 else Fraction(0)
    recent = total - half
    earlier = half - quarter
    diverging = recent > 0 and recent >= earlier
    return PartialSumReport(
        stages=tuple(range(1, J + 1)),
        terms=tuple(terms),
        partial_sums=tuple(partial),
        total=total,
        diverging=diverging,
    )


@dataclass(frozen=True)
class StarConditionReport:
    """Ratio chains h_j/s_j(2), s_j(i)/s_j(i+1) and whether each shrinks."""

    stages: tuple[int, ...]
    chains: tuple[tuple[Fraction | None, ...], ...]  # None marks a zero divisor
    violations: tuple[str, ...]
    passed: bool


def condition_star_check(params: ConstructionParams, J: int) -> StarConditionReport:
    """Check the separated-growth condition s_j(1)=0, h_j << s_j(2) << ... << s_j(r)."""
    if J < 2:
        raise ValueError("need J >= 2 to compare consecutive stages")
    r = params.cut_count(1)
    for j in range(2, J + 1):
        if params.cut_count(j) != r:
            raise ValueError("condition (*) requires a constant cut count")
    violations: list[str] = []
    stages = tuple(range(1, J + 1))
    chains: list[tuple[Fraction | None, ...]] = []
    for j in stages:
        geom = stage_geometry(params, j)
        s = geom.spacers
        if s[0] != 0:
            violations.append(f"s_{j}(1) != 0")
        chain: list[Fraction | None] = []
        numerators = [geom.h] + list(s[1:-1])
        denominators = list(s[1:])
        for num, den in zip(numerators, denominators):
            if den == 0:
                violations.append(f"s_{j} has a zero interior spacer")
                chain.append(None)
            else:
                chain.append(Fraction(num, den))
        chains.append(tuple(chain))
    shrinking = True
    for pos in range(len(chains[0])):
        column = [c[pos] for c in chains]
        if any(v is None for v in column):
            shrinking = False
            continue
        if any(b >= a for a, b in zip(column, column[1:])):
            shrinking = False
    passed = shrinking and not violations
    return StarConditionReport(
        stages=stages,
        chains=tuple(chains),
        violations=tuple(violations),
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Config files


def _spacer_rule_from_config(entry) -> SpacerRule:
    if isinstance(entry, str):
        entry = {"rule": entry}
    if not isinstance(entry, dict):
        raise InvalidConstructionError(f"bad spacer rule {entry!r}")
    unknown = set(entry) - {"rule", "c", "a"}
    if unknown:
        raise InvalidConstructionError(f"unknown spacer rule keys {sorted(unknown)}")
    kind = entry.get("rule")
    if kind == "scaled_target":
        return SpacerRule(kind, a=parse_rational(entry["a"]))
    if "c" in entry:
        return SpacerRule(kind, c=parse_int(entry["c"]))
    return SpacerRule(kind)


def _spacer_rule_to_config(rule: SpacerRule):
    if rule.kind == "zero":
        return "zero"
    out = {"rule": rule.kind}
    if rule.kind == "scaled_target":
        out["a"] = format_rational(rule.a)
    elif rule.kind not in ("j_times_h", "blocks"):
        out["c"] = rule.c
    return out


def params_from_config(config: dict) -> ConstructionParams:
    """Build parameters from the JSON config form.

    Either {"family": name, ...family args} or
    {"h1": ..., "base_width": "p/q", "stages": {"r": ..., "spacers": [...]}}.
    Unknown keys are rejected.
    """
    if not isinstance(config, dict):
        raise InvalidConstructionError("construction config must be an object")
    if "family" in config:
        unknown = set(config) - {"family", "N", "a"}
        if unknown:
            raise InvalidConstructionError(f"unknown config keys {sorted(unknown)}")
        name = config["family"]
        kwargs = {}
        if "N" in config:
            kwargs["N"] = parse_int(config["N"])
        if "a" in config:
            kwargs["a"] = parse_rational(config["a"])
        return family(name, **kwargs)
    unknown = set(config) - {"h1", "base_width", "stages"}
    if unknown:
        raise InvalidConstructionError(f"unknown config keys {sorted(unknown)}")
    if "h1" not in config or "stages" not in config:
        raise InvalidConstructionError("config needs either 'family' or 'h1' + 'stages'")
    stages = config["stages"]
    unknown = set(stages) - {"r", "spacers"}
    if unknown:
        raise InvalidConstructionError(f"unknown stage keys {sorted(unknown)}")
    r_entry = stages.get("r")
    if isinstance(r_entry, dict):
        unknown = set(r_entry) - {"rule", "c"}
        if unknown:
            raise InvalidConstructionError(f"unknown cut rule keys {sorted(unknown)}")
        cuts = CutRule(r_entry.get("rule"), parse_int(r_entry.get("c", 1)))
    else:
        cuts = CutRule("constant", parse_int(r_entry))
    spacers = tuple(_spacer_rule_from_config(e) for e in stages.get("spacers", []))
    return ConstructionParams(
        h1=parse_int(config["h1"]),
        cuts=cuts,
        spacer_tail=spacers,
        base_width=parse_rational(config.get("base_width", "1/1")),
    )


def params_to_config(params: ConstructionParams) -> dict:
    """Inverse of params_from_config (always the explicit form)."""
    if params.cuts.kind == "constant":
        r = params.cuts.c
    else:
        r = {"rule": params.cuts.kind, "c": params.cuts.c}
    return {
        "h1": format_int(params.h1),
        "base_width": format_rational(params.base_width),
        "stages": {
            "r": r,
            "spacers": [_spacer_rule_to_config(rule) for rule in params.spacer_tail],
        },
    }
