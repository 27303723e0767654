"""Correlation sequences and spectral-type indicators.

c(n) = mu(T^n A /\\ A) / mu(A) for a chosen base set A: the Fourier
coefficients of the spectral measure of A's normalized indicator.  All
correlations are exact rationals; floating point appears only in the Fejer
density grids, the Toeplitz eigenvalue check and the suspension exponential.

Spectral conclusions are never asserted as booleans here.  The module emits
the indicators the verification layer interprets: persistent correlations
along the tower heights (non-Rajchman behaviour), finitely supported product
correlations (flat, Lebesgue-type behaviour), and the suspension correlation
floor they induce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .tower import LevelSet, apply_power_bounds


@dataclass(frozen=True)
class CorrelationSequence:
    """Sparse symmetric table n -> c(n), c(0) = 1, c(-n) = c(n).

    ``entries`` holds exact values keyed by |n|; shifts whose measure did not
    resolve are kept in ``unresolved`` as (lo, hi) pairs and never midpointed.
    Shifts absent from both were not computed.
    """

    entries: tuple[tuple[int, Fraction], ...]
    unresolved: tuple[tuple[int, tuple[Fraction, Fraction]], ...] = ()

    @cached_property
    def _table(self) -> dict[int, Fraction]:
        return dict(self.entries)

    @cached_property
    def _pending(self) -> dict[int, tuple[Fraction, Fraction]]:
        return dict(self.unresolved)

    def __post_init__(self):
        table = dict(self.entries)
        if table.get(0) != 1:
            raise ValueError("correlation sequences are normalized to c(0) = 1")
        if any(n < 0 for n in table) or any(n < 0 for n, _ in self.unresolved):
            raise ValueError("store nonnegative shifts only; c(-n) = c(n)")
        if any(abs(c) > 1 for c in table.values()):
            raise ValueError("|c(n)| <= 1 must hold")

    def has(self, n: int) -> bool:
        return abs(n) in self._table

    def value(self, n: int) -> Fraction:
        try:
            return self._table[abs(n)]
        except KeyError:
            if abs(n) in self._pending:
                raise ValueError(f"c({n}) did not resolve exactly") from None
            raise ValueError(f"c({n}) was not computed") from None

    def bounds(self, n: int) -> tuple[Fraction, Fraction]:
        if abs(n) in self._table:
            c = self._table[abs(n)]
            return c, c
        return self._pending[abs(n)]

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._table))

    def nonzero_support(self) -> tuple[int, ...]:
        return tuple(n for n in sorted(self._table) if n and self._table[n] != 0)


def correlations(a: LevelSet, n_list, max_stage: int | None = None) -> CorrelationSequence:
    """Exact correlations of the base set A over the requested shifts."""
    mass = a.measure
    if mass == 0:
        raise ValueError("base set must have positive measure")
    entries: dict[int, Fraction] = {0: Fraction(1)}
    unresolved: dict[int, tuple[Fraction, Fraction]] = {}
    for n in n_list:
        n = abs(int(n))
        if n in entries or n in unresolved:
            continue
        bound = apply_power_bounds(a, a, n, max_stage)
        if bound.exact:
            entries[n] = bound.lo / mass
        else:
            unresolved[n] = (bound.lo / mass, bound.hi / mass)
    return CorrelationSequence(
        entries=tuple(sorted(entries.items())),
        unresolved=tuple(sorted(unresolved.items())),
    )


def correlation_sequence(values: dict[int, Fraction]) -> CorrelationSequence:
    """Build a sequence from literal values (keys may be negative)."""
    table: dict[int, Fraction] = {}
    for n, c in values.items():
        c = Fraction(c)
        key = abs(int(n))
        if key in table and table[key] != c:
            raise ValueError(f"conflicting values for |n| = {key}")
        table[key] = c
    table.setdefault(0, Fraction(1))
    return CorrelationSequence(entries=tuple(sorted(table.items())))


def product_correlation(
    c1: CorrelationSequence, c2: CorrelationSequence, m: int, n: int, k: int
) -> Fraction:
    """Correlation of the rectangle vector under T^m (x) T^n: c1(mk) c2(nk)."""
    return c1.value(m * k) * c2.value(n * k)


_SUSPENSION_DEN = math.e - 1


def suspension_correlation(c: CorrelationSequence, k: int):
    """(e^{c(k)} - 1)/(e - 1): normalized suspension coefficient at shift k.

    Normalization maps c = 1 to 1 and c = 0 to 0.  Interval inputs map to
    interval outputs (exp is monotone).
    """
    lo, hi = c.bounds(k)
    f_lo = (math.exp(lo) - 1.0) / _SUSPENSION_DEN
    if lo == hi:
        return f_lo
    return (f_lo, (math.exp(hi) - 1.0) / _SUSPENSION_DEN)


@dataclass(frozen=True)
class SpectralDensityEstimate:
    order: int
    grid: tuple[float, ...]
    values: tuple[float, ...]
    max_mean_ratio: float
    top_share: float  # mass carried by the highest 5% of grid points


def fejer_density(c: CorrelationSequence, order: int, grid_size: int) -> SpectralDensityEstimate:
    """F_N(theta) = sum_{|n|<N} (1 - |n|/N) c(n) cos(n theta) on a uniform grid.

    Shifts not stored in the sequence count as zero, so the cost scales with
    the support, not with N; a huge N therefore probes stabilization of a
    finitely supported sequence for free.
    """
    if order < 1 or grid_size < 1:
        raise ValueError("order and grid size must be >= 1")
    support = [(n, float(c.value(n))) for n in c.support() if n < order]
    thetas = [2.0 * math.pi * t / grid_size for t in range(grid_size)]
    values = []
    for theta in thetas:
        acc = 0.0
        for n, cn in support:
            if n == 0:
                acc += cn
            else:
                acc += 2.0 * (1.0 - n / order) * cn * math.cos(n * theta)
        values.append(acc)
    mean = sum(values) / grid_size
    ratio = max(values) / mean if mean != 0 else float("inf")
    top_count = max(1, -(-grid_size // 20))
    total = sum(values)
    top_share = sum(sorted(values, reverse=True)[:top_count]) / total if total else 0.0
    return SpectralDensityEstimate(
        order=order,
        grid=tuple(thetas),
        values=tuple(values),
        max_mean_ratio=ratio,
        top_share=top_share,
    )


def toeplitz_min_eigenvalue(c: CorrelationSequence, order: int = 8) -> float:
    """Smallest eigenvalue of the Toeplitz section [c(i-j)], i,j < order."""
    row = [float(c.value(n)) for n in range(order)]
    matrix = np.array([[row[abs(i - j)] for j in range(order)] for i in range(order)])
    return float(np.linalg.eigvalsh(matrix)[0])
