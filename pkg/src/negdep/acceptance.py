"""Built-in verification suite.

Each criterion is a named, self-contained check returning (passed, detail).
The exact criteria admit zero tolerance; the statistical ones run on pinned
seeds of the deterministic stream, so the whole suite is reproducible.
tests/test_acceptance.py parametrizes over this registry, and the CLI
`reproduce-paper` command runs it directly.
"""

import time
from fractions import Fraction
from math import factorial, sqrt

import numpy as np

from .analyzer import (
    AnchoredBox,
    copula_equality_check,
    coordinate_independence_check,
    discrete_pair_pmf,
    no_shift_mass,
    nuod_scan,
    pair_box_prob,
    pair_marginal_prob,
    shift_only_conditional,
    stratified_pair_box_prob,
    triple_distinguisher,
)
from .rng import RngStream
from .samplers import generate
from .schemes import SchemeSpec, full_rsj, lhs_spec, patterson_spec
from .variance import integrand_library, variance_compare

__all__ = ["CRITERIA", "run_acceptance", "CriterionResult"]


class CriterionResult(tuple):
    __slots__ = ()

    def __new__(cls, passed, detail):
        return super().__new__(cls, (bool(passed), detail))

    @property
    def passed(self):
        return self[0]

    @property
    def detail(self):
        return self[1]


# -- independent oracle for the stratified closed form -----------------------


def _stratum_tail_fraction(c: int, x: Fraction, n: int) -> Fraction:
    """Fraction of stratum [c/n, (c+1)/n) lying inside [x, 1)."""
    lo = max(Fraction(c, n), x)
    hi = Fraction(c + 1, n)
    return (hi - lo) * n if hi > lo else Fraction(0)


def stratified_pair_oracle(q, r, n: int) -> Fraction:
    """Brute force: sum over ordered distinct stratum pairs of the overlap
    weights, each pair carrying probability 1/(n(n-1))."""
    q, r = Fraction(q), Fraction(r)
    total = Fraction(0)
    for j in range(n):
        wq = _stratum_tail_fraction(j, q, n)
        if wq == 0:
            continue
        for k in range(n):
            if j == k:
                continue
            total += wq * _stratum_tail_fraction(k, r, n)
    return total / (n * (n - 1))


# -- criteria ------------------------------------------------------------------


def criterion_discrete_pair_pmf_uniform() -> CriterionResult:
    """Exhaustive cell-pair law is the constant 1/(N(N-1))^d; under 60 s."""
    t0 = time.perf_counter()
    for n in (3, 5, 7):
        for d in (1, 2, 3):
            law = discrete_pair_pmf(n, d)
            expect = Fraction(1, (n * (n - 1)) ** d)
            if len(law.pmf) != (n * (n - 1)) ** d:
                return CriterionResult(False, f"support size off at N={n}, d={d}")
            if any(p != expect for p in law.pmf.values()):
                return CriterionResult(False, f"non-uniform pmf at N={n}, d={d}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60:
        return CriterionResult(False, f"took {elapsed:.1f}s (budget 60s)")
    return CriterionResult(True, f"9 (N,d) grids uniform, {elapsed:.2f}s")


def criterion_fixed_generator_counterexample() -> CriterionResult:
    """Fixed generator (1,1), N=5: joint 1/100 beats marginal product 4/625."""
    spec = SchemeSpec("rsj_lattice", 5, 2, generator=(1, 1))
    Q = AnchoredBox((Fraction(3, 5), Fraction(3, 5)))
    R = AnchoredBox((Fraction(4, 5), Fraction(4, 5)))
    joint = pair_box_prob(spec, Q, R)
    prodv = pair_marginal_prob(spec, Q, 0) * pair_marginal_prob(spec, R, 1)
    ok = joint == Fraction(1, 100) and prodv == Fraction(4, 625) and joint > prodv
    return CriterionResult(ok, f"joint={joint}, product={prodv}")


def criterion_nuod_certification() -> CriterionResult:
    """Zero scan violations for the fully randomized lattice and lhs, plus the
    per-coordinate factor inequality on a 50x50 anchor grid."""
    for n in (2, 3, 5, 7):
        for d in (1, 2, 3):
            for spec in (full_rsj(n, d), lhs_spec(n, d)):
                rep = nuod_scan(spec, 2 * n)
                if not rep.ok:
                    return CriterionResult(
                        False, f"violation for {spec.kind} N={n} d={d}: {rep.worst_violation}"
                    )
    for n in range(2, 9):
        for kq in range(50):
            for kr in range(50):
                q, r = Fraction(kq, 50), Fraction(kr, 50)
                if stratified_pair_box_prob(q, r, n) > (1 - q) * (1 - r):
                    return CriterionResult(False, f"factor inequality fails at N={n}, q={q}, r={r}")
    return CriterionResult(True, "24 scans clean; factor inequality holds on 50x50 grid for N=2..8")


def criterion_copula_and_independence() -> CriterionResult:
    """Lattice and lhs share the exact pair copula; coordinates factorize."""
    for n in (3, 5):
        for d in (2, 3):
            cc = copula_equality_check(n, d)
            if not cc.equal or cc.max_discrepancy != 0:
                return CriterionResult(False, f"copula mismatch at N={n}, d={d}: {cc.max_discrepancy}")
            if not coordinate_independence_check(n, d).ok:
                return CriterionResult(False, f"independence fails at N={n}, d={d}")
    return CriterionResult(True, "copula discrepancy 0 and factorization exact on {3,5}x{2,3}")


def criterion_triple_counts() -> CriterionResult:
    """Exactly one shifted lattice and [(N-2)!]^(d-1) latin grids contain a
    given coordinatewise-distinct pair of cell vectors."""
    cases = [(5, 2, (0, 0), (1, 2)), (5, 3, (0, 0, 0), (1, 2, 3)), (7, 2, (0, 0), (1, 2))]
    for n, d, a, b in cases:
        lat, lhsc = triple_distinguisher(n, d, a, b)
        want = factorial(n - 2) ** (d - 1)
        if lat != 1 or lhsc != want:
            return CriterionResult(False, f"N={n}, d={d}: got ({lat}, {lhsc}), want (1, {want})")
    return CriterionResult(True, "counts (1, 6), (1, 36), (1, 120) as constructed")


def criterion_no_shift_mass() -> CriterionResult:
    """Without the shift the first cell carries mass 1/N, not 1/N^d."""
    for n, d in ((5, 2), (3, 3)):
        mass = no_shift_mass(n, d)
        if mass != Fraction(1, n):
            return CriterionResult(False, f"N={n}, d={d}: mass {mass} != 1/{n}")
        if mass == Fraction(1, n**d):
            return CriterionResult(False, f"N={n}, d={d}: mass equals the uniform value")
    return CriterionResult(True, "mass 1/N for (5,2) and (3,3); uniform would need 1/N^d")


def criterion_fixed_distance_conditional() -> CriterionResult:
    """Shift-only randomization: conditional probability exactly 1."""
    for n in (5, 7):
        spec = SchemeSpec("rsj_lattice", n, 2, shift="continuous_torus", jitter=False)
        value = shift_only_conditional(spec, Fraction(1, 2 * n))
        if value != 1:
            return CriterionResult(False, f"lattice N={n}: conditional {value} != 1")
    value = shift_only_conditional(patterson_spec(5, 2), Fraction(1, 10))
    if value != 1:
        return CriterionResult(False, f"patterson: conditional {value} != 1")
    return CriterionResult(True, "conditional = 1 for N in {5,7} and midpoint sampling at eps=1/(2N)")


def criterion_stratified_closed_form_oracle() -> CriterionResult:
    """Closed form equals the ordered-stratum-pair oracle on the 1/(4N) grid
    and never exceeds (1-q)(1-r)."""
    for n in range(2, 9):
        for kq in range(4 * n):
            for kr in range(4 * n):
                q, r = Fraction(kq, 4 * n), Fraction(kr, 4 * n)
                closed = stratified_pair_box_prob(q, r, n)
                oracle = stratified_pair_oracle(q, r, n)
                if closed != oracle:
                    return CriterionResult(False, f"mismatch at N={n}, q={q}, r={r}")
                if closed > (1 - q) * (1 - r):
                    return CriterionResult(False, f"bound fails at N={n}, q={q}, r={r}")
    return CriterionResult(True, "closed form == oracle and <= (1-q)(1-r) on all 1/(4N) grids, N=2..8")


def criterion_variance_domination() -> CriterionResult:
    """Scheme variance at most the MC baseline (with 3-stderr slack) for the
    monotone battery; under 5 minutes."""
    t0 = time.perf_counter()
    reps = 10**4
    root = RngStream(20240)
    details = []
    job = 0
    for n, d in ((5, 2), (31, 4)):
        for spec in (full_rsj(n, d), lhs_spec(n, d)):
            for f in integrand_library(d):
                res = variance_compare(f, spec, reps, root.split(job))
                job += 1
                if not res.dominates:
                    return CriterionResult(
                        False,
                        f"{spec.kind} N={n} d={d} {f.name}: est {res.est_variance:.3e} "
                        f"> mc {res.mc_variance:.3e}",
                    )
                details.append(res.est_variance / res.mc_variance if res.mc_variance else 0.0)
    elapsed = time.perf_counter() - t0
    if elapsed >= 300:
        return CriterionResult(False, f"took {elapsed:.0f}s (budget 300s)")
    worst = max(details)
    return CriterionResult(True, f"16 cells dominate; worst var ratio {worst:.3f}; {elapsed:.0f}s")


def _chi2_threshold_3sigma(df: int) -> float:
    # chi-square has mean df and variance 2 df
    return df + 3.0 * sqrt(2.0 * df)


def criterion_sampling_scheme_property() -> CriterionResult:
    """Marginal uniformity of the first point at 4 sigma over 1e5 draws and
    an exchangeability histogram test at 3 sigma over 1e4 draws."""
    n, d = 5, 2
    reps = 10**5
    qs = [Fraction(k, 10) for k in range(1, 10)]
    for spec, seed in ((full_rsj(n, d), 2001), (lhs_spec(n, d), 2002)):
        root = RngStream(seed)
        first = np.empty((reps, d))
        first_cells = np.empty(reps, dtype=np.int64)
        last_cells = np.empty(reps, dtype=np.int64)
        for rep in range(reps):
            ps = generate(spec, root.split(rep).seed)
            pts = ps.floats()
            first[rep] = pts[0]
            cells = ps.cells()
            first_cells[rep] = cells[0, 0] * n + cells[0, 1]
            last_cells[rep] = cells[-1, 0] * n + cells[-1, 1]
        for i in range(d):
            for q in qs:
                emp = float((first[:, i] >= float(q)).mean())
                p = float(1 - q)
                sigma = sqrt(p * (1 - p) / reps)
                if abs(emp - p) > 4 * sigma:
                    return CriterionResult(
                        False, f"{spec.kind} coord {i} q={q}: {emp:.4f} vs {p:.4f}"
                    )
        # exchangeability: cell-vector histogram of p_1 vs p_n, each taken
        # from its own half of 1e4 draws so the two samples are independent
        h1 = np.bincount(first_cells[: 5 * 10**3], minlength=n * n).astype(float)
        h2 = np.bincount(last_cells[5 * 10**3 : 10**4], minlength=n * n).astype(float)
        tot = h1 + h2
        mask = tot > 0
        chi2 = float((((h1 - h2) ** 2)[mask] / tot[mask]).sum())
        df = int(mask.sum()) - 1
        if chi2 > _chi2_threshold_3sigma(df):
            return CriterionResult(False, f"{spec.kind} exchangeability chi2 {chi2:.1f} (df {df})")
    return CriterionResult(True, "marginals within 4 sigma; exchangeability chi-square within 3 sigma")


CRITERIA = [
    ("1", "discrete-pair-pmf-uniform", criterion_discrete_pair_pmf_uniform),
    ("2", "fixed-generator-counterexample", criterion_fixed_generator_counterexample),
    ("3", "nuod-scan-certification", criterion_nuod_certification),
    ("4", "copula-and-independence", criterion_copula_and_independence),
    ("5", "triple-containment-counts", criterion_triple_counts),
    ("6", "no-shift-mass", criterion_no_shift_mass),
    ("7", "fixed-distance-conditional", criterion_fixed_distance_conditional),
    ("8", "stratified-closed-form-oracle", criterion_stratified_closed_form_oracle),
    ("9", "variance-domination", criterion_variance_domination),
    ("10", "marginal-uniformity-and-exchangeability", criterion_sampling_scheme_property),
]


def run_acceptance(ids=None, echo=print) -> bool:
    """Run the selected criteria (all by default); one line per criterion."""
    wanted = set(ids) if ids else None
    all_ok = True
    for cid, name, fn in CRITERIA:
        if wanted is not None and cid not in wanted:
            continue
        result = fn()
        status = "PASS" if result.passed else "FAIL"
        echo(f"{status} criterion {cid} ({name}): {result.detail}")
        all_ok = all_ok and result.passed
    return all_ok
