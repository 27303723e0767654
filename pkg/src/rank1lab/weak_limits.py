"""Weak limits of powers T^{n(k)} against polynomial candidate operators.

A candidate limit is a finite nonnegative combination sum_p c_p T^p with
total weight <= 1 (the deficit is mass escaping to infinity).  For the preset
families the limits along n(k) = s + sum_i alpha_i h_{j_i(k)} are attained
exactly at finite stage, so the default tolerance is zero and deviations are
compared as rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import reports
from .construction import ConstructionParams, block_sequence, stage_geometry, thm2
from .tower import LevelSet, MeasureBound, apply_power_bounds, intersect


@dataclass(frozen=True)
class OperatorPolynomial:
    """Finite nonnegative combination sum_p c_p T^p with sum c_p <= 1."""

    coeffs: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        seen = set()
        total = Fraction(0)
        for p, c in self.coeffs:
            if p in seen:
                raise ValueError(f"duplicate power {p}")
            seen.add(p)
            if c < 0:
                raise ValueError("coefficients must be >= 0")
            total += c
        if total > 1:
            raise ValueError(f"total weight {total} > 1")

    @classmethod
    def from_dict(cls, coeffs: dict[int, Fraction]) -> "OperatorPolynomial":
        cleaned = tuple(sorted((int(p), Fraction(c)) for p, c in coeffs.items() if c != 0))
        return cls(cleaned)

    @property
    def total(self) -> Fraction:
        return sum((c for _, c in self.coeffs), Fraction(0))

    @property
    def escape_mass(self) -> Fraction:
        return 1 - self.total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*T^{p}" for p, c in self.coeffs)


_POLY_TERM = re.compile(
    r"^(?:(?P<c>\d+(?:/\d+)?)\s*\*\s*)?T\^(?P<p>-?\d+)$|^(?P<const>\d+(?:/\d+)?)$"
)


def parse_polynomial(text: str) -> OperatorPolynomial:
    """Parse "1/2*T^0 + 1/4*T^-1", "T^1", or "0"."""
    coeffs: dict[int, Fraction] = {}
    for raw in text.split("+"):
        raw = raw.strip()
        if not raw:
            continue
        m = _POLY_TERM.match(raw)
        if m is None:
            raise ValueError(f"cannot parse polynomial term {raw!r}")
        if m.group("const") is not None:
            p, c = 0, Fraction(m.group("const"))
        else:
            p = int(m.group("p"))
            c = Fraction(m.group("c")) if m.group("c") else Fraction(1)
        coeffs[p] = coeffs.get(p, Fraction(0)) + c
    return OperatorPolynomial.from_dict(coeffs)


def predict(
    poly: OperatorPolynomial, a: LevelSet, b: LevelSet, max_stage: int | None = None
) -> MeasureBound:
    """sum_p c_p mu(T^p A /\\ B); unresolved pieces propagate as intervals."""
    acc = MeasureBound.exactly(0)
    for p, c in poly.coeffs:
        acc = acc + apply_power_bounds(a, b, p, max_stage).scaled(c)
    return acc


@dataclass(frozen=True)
class CandidateSequence:
    """n(k) = s + sum_i alpha_i h_{k - lag_i} with strictly increasing lags.

    Lags are offsets from the running index k, so the selected stages
    j_i(k) = k - lag_i are strictly decreasing in i and walk to infinity
    together with k.
    """

    s: int = 0
    terms: tuple[tuple[int, int], ...] = ()  # (alpha_i, lag_i)

    def __post_init__(self):
        prev = -1
        for alpha, lag in self.terms:
            if alpha == 0:
                raise ValueError("alpha coefficients must be nonzero")
            if lag <= prev:
                raise ValueError("stage lags must be strictly increasing")
            prev = lag

    def min_stage(self, k: int) -> int:
        return k - self.terms[-1][1] if self.terms else k

    def evaluate(self, params: ConstructionParams, k: int) -> int:
        if self.terms and self.min_stage(k) < 2:
            raise ValueError(f"k = {k} selects a stage below 2")
        n = self.s
        for alpha, lag in self.terms:
            n += alpha * stage_geometry(params, k - lag).h
        return n

    def __str__(self) -> str:
        parts = []
        for alpha, lag in self.terms:
            idx = "k" if lag == 0 else f"k-{lag}"
            coeff = "" if alpha == 1 else ("-" if alpha == -1 else f"{alpha}*")
            parts.append(f"{coeff}h_{{{idx}}}")
        if self.s or not parts:
            parts.append(str(self.s))
        return " + ".join(parts).replace("+ -", "- ")


_SEQ_TOKEN = re.compile(
    r"(?P<sign>[+-])?\s*(?:(?P<mult>\d+)\s*\*\s*)?h_\{?\s*[jk](?:\s*-\s*(?P<lag>\d+))?\s*\}?"
    r"|(?P<sign2>[+-])?\s*(?P<const>\d+)"
)


def parse_sequence(text: str) -> CandidateSequence:
    """Parse "h_j", "h_k+h_{k-1}", "h_k + 1", "2*h_{k-2} - h_{k-3} + 5", ..."""
    terms: list[tuple[int, int]] = []
    s = 0
    pos = 0
    matched = False
    for m in _SEQ_TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse sequence near {text[pos:m.start()]!r}")
        pos = m.end()
        matched = True
        if m.group("const") is not None:
            sign = -1 if m.group("sign2") == "-" else 1
            s += sign * int(m.group("const"))
        else:
            sign = -1 if m.group("sign") == "-" else 1
            mult = int(m.group("mult")) if m.group("mult") else 1
            terms.append((sign * mult, int(m.group("lag") or 0)))
    if not matched or text[pos:].strip():
        raise ValueError(f"cannot parse sequence {text!r}")
    terms.sort(key=lambda t: t[1])
    return CandidateSequence(s=s, terms=tuple(terms))


@dataclass(frozen=True)
class LimitCheckRow:
    k: int
    n: int
    pair_index: int
    value: MeasureBound
    prediction: MeasureBound
    dev_lo: Fraction
    dev_hi: Fraction
    status: str


@dataclass(frozen=True)
class LimitReport:
    rows: tuple[LimitCheckRow, ...]
    max_deviation: Fraction
    status: str


def verify_limit(
    params: ConstructionParams,
    seq: CandidateSequence,
    poly: OperatorPolynomial,
    test_pairs,
    k_range,
    tol=Fraction(0),
    max_stage: int | None = None,
) -> LimitReport:
    """Compare mu(T^{n(k)} A /\\ B) against the polynomial prediction.

    Pairs whose interval is wider than the tolerance yield INCONCLUSIVE
    rows; only a deviation certainly above tol yields FAIL.
    """
    tol = Fraction(tol)
    rows = []
    max_dev = Fraction(0)
    for k in k_range:
        for idx, (a, b) in enumerate(test_pairs):
            n = seq.evaluate(params, k)
            value = apply_power_bounds(a, b, n, max_stage)
            pred = predict(poly, a, b, max_stage)
            dev_lo, dev_hi = value.deviation_from(pred)
            status = reports.classify_deviation(dev_lo, dev_hi, tol)
            rows.append(LimitCheckRow(k, n, idx, value, pred, dev_lo, dev_hi, status))
            max_dev = max(max_dev, dev_hi)
    status = reports.combine(r.status for r in rows)
    return LimitReport(tuple(rows), max_dev, status)


@dataclass(frozen=True)
class WindowScanReport:
    j: int
    window: tuple[int, int]
    dead_zone: tuple[int, int]
    window_rows: tuple[tuple[int, MeasureBound], ...]
    dead_rows: tuple[tuple[int, MeasureBound], ...]
    dead_zone_exact_zero: bool


def _spread(lo: int, hi: int, interior: int) -> list[int]:
    """lo, hi and `interior` evenly spread sample points of [lo, hi]."""
    span = hi - lo
    points = {lo, hi}
    for t in range(1, interior + 1):
        points.add(lo + (t * span) // (interior + 1))
    return sorted(points)


def scan_window(
    params: ConstructionParams,
    j: int,
    a: LevelSet,
    b: LevelSet,
    step: int | None = None,
    dead_samples: int | None = 64,
    max_stage: int | None = None,
) -> WindowScanReport:
    """Tabulate mu(T^n A /\\ B) over the active window around h_j and sample
    the dead zone [h_j + 2h_{j-1}, h_{j+1} - 2h_j], where values must vanish.

    ``dead_samples=None`` scans the dead zone exhaustively (toy-sized
    constructions only).
    """
    if j < 3:
        raise ValueError("scan needs j >= 3")
    if max(a.stage, b.stage) > j - 2:
        raise ValueError("test sets must be measurable strictly below stage j-1")
    h_prev = stage_geometry(params, j - 1).h
    h_j = stage_geometry(params, j).h
    h_next = stage_geometry(params, j + 1).h
    win_lo, win_hi = h_j - 2 * h_prev, h_j + 2 * h_prev
    dead_lo, dead_hi = h_j + 2 * h_prev, h_next - 2 * h_j
    if step is None:
        step = max(1, (win_hi - win_lo) // 64)
    window_ns = sorted(set(range(win_lo, win_hi + 1, step)) | {h_j, win_hi})
    if dead_hi < dead_lo:
        dead_ns = []  # spacers too small to open a dead zone at this stage
    elif dead_samples is None:
        if dead_hi - dead_lo > 200_000:
            raise ValueError("dead zone too large for an exhaustive scan")
        dead_ns = list(range(dead_lo, dead_hi + 1))
    else:
        dead_ns = _spread(dead_lo, dead_hi, dead_samples)
    window_rows = tuple((n, apply_power_bounds(a, b, n, max_stage)) for n in window_ns)
    dead_rows = tuple((n, apply_power_bounds(a, b, n, max_stage)) for n in dead_ns)
    exact_zero = all(bound.exact and bound.lo == 0 for _, bound in dead_rows)
    return WindowScanReport(
        j=j,
        window=(win_lo, win_hi),
        dead_zone=(dead_lo, dead_hi),
        window_rows=window_rows,
        dead_rows=dead_rows,
        dead_zone_exact_zero=exact_zero,
    )


@dataclass(frozen=True)
class MixtureLawRow:
    stage: int
    shift: int
    value: MeasureBound
    prediction: MeasureBound
    dev_lo: Fraction
    dev_hi: Fraction
    status: str


@dataclass(frozen=True)
class MixtureLawReport:
    n: int
    p: int
    stages: tuple[int, ...]
    rows: tuple[MixtureLawRow, ...]
    decreasing: bool
    status: str


def block_value_stages(p: int, j_max: int) -> tuple[int, ...]:
    """Stages j' <= j_max whose interleaved spacer value equals |p|."""
    return tuple(j for j in range(1, j_max + 1) if block_sequence(j) == abs(p))


def verify_mixture_law(
    N: int,
    n: int,
    p: int,
    a: LevelSet,
    b: LevelSet,
    stage_list=None,
    j_max: int = 9,
    tol=Fraction(0),
    max_stage: int | None = None,
) -> MixtureLawReport:
    """Check T^{-n h_j'} against ((N-n)/(N+1)) I + (1/(N+1)) T^p on (A, B).

    Stages are those with interleaved spacer value |p|; for negative p the
    forward powers T^{+n h_j'} are scanned instead.  Deviations are expected
    to shrink (non-strictly) along the stage list.
    """
    if not 1 <= n <= N:
        raise ValueError("need 1 <= n <= N")
    if p == 0:
        raise ValueError("p must be nonzero")
    if a.params != thm2(N):
        raise ValueError(f"sets must live over the thm2({N}) construction")
    if stage_list is None:
        # the law acts on sets already visible below the stage
        floor = max(a.stage, b.stage)
        stage_list = tuple(j for j in block_value_stages(p, j_max) if j > floor)
    stage_list = tuple(stage_list)
    if not stage_list:
        raise ValueError(
            "spacer-value preimage empty: p never occurs below the cutoff"
        )
    for j in stage_list:
        if block_sequence(j) != abs(p):
            raise ValueError(f"stage {j} has spacer value {block_sequence(j)}, not {abs(p)}")
    tol = Fraction(tol)
    identity_part = MeasureBound.exactly(intersect(a, b).measure).scaled(
        Fraction(N - n, N + 1)
    )
    shifted_part = apply_power_bounds(a, b, p, max_stage).scaled(Fraction(1, N + 1))
    prediction = identity_part + shifted_part
    sign = -1 if p > 0 else 1
    rows = []
    for j in stage_list:
        shift = sign * n * stage_geometry(a.params, j).h
        value = apply_power_bounds(a, b, shift, max_stage)
        dev_lo, dev_hi = value.deviation_from(prediction)
        rows.append(
            MixtureLawRow(j, shift, value, prediction, dev_lo, dev_hi,
                          reports.classify_deviation(dev_lo, dev_hi, tol))
        )
    decreasing = all(
        later.dev_hi <= earlier.dev_hi and later.dev_lo <= earlier.dev_lo
        for earlier, later in zip(rows, rows[1:])
    )
    return MixtureLawReport(
        n=n,
        p=p,
        stages=stage_list,
        rows=tuple(rows),
        decreasing=decreasing,
        status=reports.combine(r.status for r in rows),
    )
