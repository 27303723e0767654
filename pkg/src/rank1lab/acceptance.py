"""Acceptance suite: one callable per criterion, shared by the test module
and the CLI ``acceptance`` subcommand.

Each criterion returns a CriterionResult with a one-line detail; nothing here
prints.  Two criteria (6 and 9) contain a finite-stage claim that is provably
too strong for the thm2(2) family; they are implemented faithfully, fail with
the verified counterexample in the detail, and carry ``known_defect=True``.
The analysis lives in the README known-deviations section; the attainable
content of both is still covered by the green checks in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import reports
from .construction import height, thm2, toy, utv1
from .joinings import delta_shift, partial_joining, domination_witness
from .oracle import IntervalSystem, OrbitWalker, oracle_intersection
from .products import ProductSystem, dissipativity_scan, product_return, sample_shifts
from .spectral import (
    correlation_sequence,
    correlations,
    fejer_density,
    suspension_correlation,
    toeplitz_min_eigenvalue,
)
from .tower import LevelSet, apply_power_bounds
from .weak_limits import block_value_stages, scan_window, verify_mixture_law


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    known_defect: bool = False

    @property
    def status(self) -> str:
        return reports.PASS if self.passed else reports.FAIL


def _stage2_sets(params, shifts=(0, 1, 3)):
    return [LevelSet.single(params, 2, i) for i in shifts]


def criterion_1() -> CriterionResult:
    """Oracle equivalence on toy and utv1 at matched stage budget J = 6.

    For every ordered pair of stage <= 3 single-level sets and every
    0 <= n <= h_4, the oracle's (value, undefined mass) must equal the
    calculus' (lo, hi - lo) as rationals; n < 0 is the mirrored ordered pair.
    Exact-value equality is asserted wherever the orbit fully resolves at
    J = 6 (all of utv1), plus deep toy spot checks where exactness needs
    stage ~18.
    """
    J = 6
    checked = exact = 0
    for params in (toy(), utv1()):
        h4 = height(params, 4)
        sets = [
            LevelSet.single(params, s, lvl)
            for s in (1, 2, 3)
            for lvl in range(height(params, s))
        ]
        system = IntervalSystem(params, J)
        width = system.cell_width
        b_cells = {b: frozenset(system.cells_of(b)) for b in sets}
        for a in sets:
            walker = OrbitWalker(a, J)
            for n in range(h4 + 1):
                if n:
                    walker.step(1)
                for b in sets:
                    calc = apply_power_bounds(a, b, n, max_stage=J)
                    value = len(walker.cells & b_cells[b]) * width
                    checked += 1
                    if value != calc.lo or walker.undefined != calc.hi - calc.lo:
                        return CriterionResult(
                            1, "oracle-equivalence", False,
                            f"mismatch at {params.label()} stage{a.stage} n={n}",
                        )
                    if walker.undefined == 0:
                        exact += 1
                        if not calc.exact:
                            return CriterionResult(
                                1, "oracle-equivalence", False,
                                f"calculus not exact where oracle is, n={n}",
                            )
    # toy needs ~stage 18 for worst-case exactness; spot-check the deep end
    t = toy()
    deep = [
        (LevelSet.base(t, 1), LevelSet.base(t, 1), 15, 16),
        (LevelSet.single(t, 3, 6), LevelSet.single(t, 3, 0), 15, 18),
        (LevelSet.single(t, 2, 2), LevelSet.single(t, 3, 5), 14, 17),
    ]
    for a, b, n, deep_stage in deep:
        res = oracle_intersection(a, b, n, deep_stage)
        calc = apply_power_bounds(a, b, n, max_stage=deep_stage)
        if not (res.fully_defined and calc.exact and res.value == calc.value):
            return CriterionResult(1, "oracle-equivalence", False,
                                   f"deep toy check failed at n={n}")
    return CriterionResult(
        1, "oracle-equivalence", True,
        f"{checked} matched-budget identities, {exact} exact, 3 deep toy checks",
    )


def criterion_2() -> CriterionResult:
    """Halving: mu(T^{h_j} A /\\ A) = mu(A)/2 exactly, utv1, j = 3..8."""
    params = utv1()
    count = 0
    for a in _stage2_sets(params):
        for j in range(3, 9):
            bound = apply_power_bounds(a, a, height(params, j))
            if not (bound.exact and bound.value == a.measure / 2):
                return CriterionResult(2, "halving", False, f"failed at j={j}")
            count += 1
    return CriterionResult(2, "halving", True, f"{count} exact equalities")


def criterion_3() -> CriterionResult:
    """Iterated halving and the unit-shift reduction identity, utv1."""
    params = utv1()
    sets = _stage2_sets(params)
    quarters = shifts = 0
    for a in sets:
        for i in range(3, 8):
            for j in range(i + 1, 9):
                n = height(params, j) + height(params, i)
                bound = apply_power_bounds(a, a, n)
                if not (bound.exact and bound.value == a.measure / 4):
                    return CriterionResult(3, "iterated-halving", False,
                                           f"quarter failed at i={i} j={j}")
                quarters += 1
    for a in sets:
        for b in sets:
            base = apply_power_bounds(a, b, 1)
            for j in range(3, 9):
                bound = apply_power_bounds(a, b, height(params, j) + 1)
                if not (bound.exact and base.exact and bound.value == base.value / 2):
                    return CriterionResult(3, "iterated-halving", False,
                                           f"shift identity failed at j={j}")
                shifts += 1
    return CriterionResult(3, "iterated-halving", True,
                           f"{quarters} quarter + {shifts} shift identities")


def criterion_4() -> CriterionResult:
    """Dead zone: 64 samples + endpoints per zone are exactly zero, j = 4..7."""
    params = utv1()
    count = 0
    for a in _stage2_sets(params):
        for j in range(4, 8):
            report = scan_window(params, j, a, a, dead_samples=64)
            if not report.dead_zone_exact_zero:
                return CriterionResult(4, "dead-zone", False,
                                       f"nonzero in zone at j={j}")
            count += len(report.dead_rows)
    return CriterionResult(4, "dead-zone", True, f"{count} sampled shifts, all zero")


def criterion_5() -> CriterionResult:
    """Three-column limit law at the two largest qualifying stages <= 9."""
    params = thm2(2)
    a = LevelSet.base(params, 2)
    stages = block_value_stages(1, 9)[-2:]
    tol = Fraction(2, 100) * a.measure
    details = []
    for n in (1, 2):
        report = verify_mixture_law(2, n, 1, a, a, stage_list=stages, tol=tol)
        if report.status != reports.PASS:
            return CriterionResult(5, "three-column-limit", False,
                                   f"n={n}: status {report.status}")
        if not report.decreasing:
            return CriterionResult(5, "three-column-limit", False,
                                   f"n={n}: deviations not decreasing")
        details.append(f"n={n} devs " + ",".join(str(r.dev_hi) for r in report.rows))
    return CriterionResult(5, "three-column-limit", True,
                           f"stages {stages}; " + "; ".join(details))


def criterion_6(samples: int = 256) -> CriterionResult:
    """Dissipativity scan for T x T^3 over thm2(2) plus the T x T witness.

    The scan asserts the strong finite-stage form: every sampled return in
    (h_j, 8h_j] vanishes already for j in {4,5,6}.  That is provably false
    at j = 4, 5; the detail carries the oracle-confirmed counterexample and
    the README's known-deviations section carries the analysis.
    """
    params = thm2(2)
    system = ProductSystem(params, 1, params, 3)
    levels = [LevelSet.single(params, 2, i) for i in range(height(params, 2))]
    violations = []
    for j in (4, 5, 6):
        h_j = height(params, j)
        for a in levels:
            for b in levels:
                report = dissipativity_scan(system, a, b, h_j, 8 * h_j, samples)
                if report.unresolved:
                    return CriterionResult(6, "dissipativity-scan", False,
                                           f"unresolved shifts at j={j}")
                for k, lo, _ in report.nonzero_returns:
                    violations.append((j, a.levels[0], b.levels[0], k, lo))
    witness_params = utv1()
    e2 = LevelSet.base(witness_params, 2)
    self_product = ProductSystem(witness_params, 1, witness_params, 1)
    expected = (e2.measure / 2) ** 2
    for j in range(3, 9):
        bound = product_return(self_product, e2, e2, height(witness_params, j))
        if not (bound.exact and bound.value == expected):
            return CriterionResult(6, "dissipativity-scan", False,
                                   f"T x T witness failed at j={j}")
    if violations:
        j, la, lb, k, lo = violations[0]
        return CriterionResult(
            6, "dissipativity-scan", False,
            f"{len(violations)} nonzero returns at j in (4,5); first: j={j} "
            f"rect (T^{la}E2,T^{lb}E2) k={k} value {lo} (the finite-stage "
            "emptiness assertion fails below stage 6; witness part passed)",
            known_defect=True,
        )
    return CriterionResult(6, "dissipativity-scan", True,
                           "all sampled returns proven zero; witness exact")


def criterion_7() -> CriterionResult:
    """Joining-domination witness: margin >= 0 exactly on the 25-rectangle grid."""
    params = utv1()
    grid = [
        (LevelSet.single(params, 2, i), LevelSet.single(params, 2, k))
        for i in range(5)
        for k in range(5)
    ]
    for m in (0, 1, -1, 2, -2):
        report = domination_witness(params, m, grid, range(4, 9), eps=0)
        if report.vacuous or not report.passed:
            return CriterionResult(7, "joining-witness", False, f"failed at m={m}")
        for row in report.rows:
            if row.margin_lo != row.margin_hi or row.margin_lo < 0:
                return CriterionResult(7, "joining-witness", False,
                                       f"non-exact margin at m={m} j={row.j}")
    return CriterionResult(7, "joining-witness", True,
                           "margins exact and >= 0 for m in {0, ±1, ±2}")


def criterion_8() -> CriterionResult:
    """Partial joinings grow in j and exhaust the full value by stage(A)+4."""
    params = utv1()
    tol = Fraction(1, 10**6)
    grid = [
        (LevelSet.single(params, 2, i), LevelSet.single(params, 2, k))
        for i in range(5)
        for k in range(5)
    ]
    count = 0
    for a, b in grid:
        for k in range(-5, 6):
            values = [partial_joining(a, b, k, j).value for j in range(2, 7)]
            if any(v2 < v1 for v1, v2 in zip(values, values[1:])):
                return CriterionResult(8, "joining-exhaustion", False,
                                       f"not monotone at k={k}")
            full = delta_shift(a, b, k)
            if not full.exact or abs(full.value - values[-1]) > tol:
                return CriterionResult(8, "joining-exhaustion", False,
                                       f"gap at k={k}: {full.value - values[-1]}")
            count += 1
    return CriterionResult(8, "joining-exhaustion", True,
                           f"{count} (rectangle, k) pairs monotone and exhausted")


def criterion_9(probe_samples: int = 256) -> CriterionResult:
    """Spectral indicators.

    All single-system clauses hold exactly.  The product-correlation probe
    asserts vanishing for all probed k > h_4; it fails at the same
    small-stage shifts as criterion 6 and carries ``known_defect``.
    """
    params = utv1()
    e2 = LevelSet.base(params, 2)
    heights = [height(params, j) for j in range(3, 9)]
    base = correlations(e2, list(range(8)) + heights)
    if base.value(0) != 1:
        return CriterionResult(9, "spectral-indicators", False, "c(0) != 1")
    for n in (1, 5, heights[0]):
        if base.value(-n) != base.value(n):
            return CriterionResult(9, "spectral-indicators", False, "c(-n) != c(n)")
    eig = toeplitz_min_eigenvalue(base, order=8)
    if eig < -1e-9:
        return CriterionResult(9, "spectral-indicators", False,
                               f"Toeplitz eigenvalue {eig}")
    for h_j in heights:
        if base.value(h_j) != Fraction(1, 2):
            return CriterionResult(9, "spectral-indicators", False,
                                   f"c({h_j}) != 1/2")
        reference = (math.sqrt(math.e) - 1.0) / (math.e - 1.0)
        if abs(suspension_correlation(base, h_j) - reference) > 1e-12:
            return CriterionResult(9, "spectral-indicators", False,
                                   "suspension value off")
    # product correlations of T x T^3 over thm2(2)
    tparams = thm2(2)
    te2 = LevelSet.base(tparams, 2)
    h4 = height(tparams, 4)
    # the probe mirrors criterion 6's sampler over the zone just above h_4
    probes = sample_shifts(h4, 8 * h4, probe_samples)
    probe_corr = correlations(te2, list(probes) + [3 * k for k in probes])
    bad = [
        k for k in probes
        if probe_corr.value(k) != 0 and probe_corr.value(3 * k) != 0
    ]
    # Fejer stabilization of the finitely supported product table
    table = correlations(te2, list(range(h4 + 1)) + [3 * k for k in range(h4 + 1)])
    product_table = correlation_sequence(
        {k: table.value(k) * table.value(3 * k) for k in range(h4 + 1)}
    )
    order = 10**12
    grid = 257
    est_1 = fejer_density(product_table, order, grid)
    est_2 = fejer_density(product_table, 2 * order, grid)
    drift = max(abs(x - y) for x, y in zip(est_1.values, est_2.values))
    if drift > 1e-9:
        return CriterionResult(9, "spectral-indicators", False,
                               f"Fejer estimates drift by {drift}")
    if bad:
        k = bad[0]
        value = probe_corr.value(k) * probe_corr.value(3 * k)
        return CriterionResult(
            9, "spectral-indicators", False,
            f"{len(bad)} probed shifts > h_4 with nonzero product correlation; "
            f"first k={k} -> {value} (same finite-stage defect as criterion 6); "
            f"all other clauses passed, Fejer drift {drift:.2e}",
            known_defect=True,
        )
    return CriterionResult(9, "spectral-indicators", True,
                           f"all clauses passed, Fejer drift {drift:.2e}")


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
)


def run_all(numbers=None) -> list[CriterionResult]:
    selected = set(numbers) if numbers else None
    results = []
    for index, func in enumerate(CRITERIA, start=1):
        if selected is None or index in selected:
            results.append(func())
    return results
