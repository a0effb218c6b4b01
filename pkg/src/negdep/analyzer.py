"""Exact pairwise-dependence analysis.

Everything here is exact rational arithmetic.  The central objects are the
joint law of a pair of distinct points (as a probability mass function over
pairs of 1/n-grid cells, plus a per-cell position model) and anchored boxes
[x, 1).  On top of those sit:

  * closed-form stratified pair probabilities per coordinate,
  * exhaustive enumeration of the discrete (jitterless) pair law,
  * joint box probabilities for every supported scheme and ablation,
  * a negative-dependence scanner over anchored-box grids,
  * the structural checks that separate the shifted-lattice scheme from
    Latin hypercube sampling (copula equality, coordinate independence,
    triple containment counts), and
  * the ablation probes (missing shift, shift-only with fixed distances,
    fixed generator).

Jitter is never discretized: a cell pair contributes its pmf weight times
the exact overlap fraction of each anchored interval with each cell.  A
continuous torus shift is integrated in closed form as circle-arc overlaps.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial, floor, lcm

import numpy as np

from .exact import CircularInterval, circular_overlap, format_rational, is_prime, torus_dist
from .schemes import SchemeSpec, full_rsj, is_full_rsj, lhs_spec

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceededError",
    "UnsupportedSchemeError",
    "HypothesisViolatedError",
    "AnchoredBox",
    "PairLaw",
    "DependenceReport",
    "stratified_pair_box_prob",
    "patterson_pair_factor",
    "patterson_marginal_factor",
    "discrete_pair_pmf",
    "merge_counts",
    "pair_box_prob",
    "pair_marginal_prob",
    "nuod_scan",
    "copula_equality_check",
    "CopulaCheck",
    "coordinate_independence_check",
    "IndependenceReport",
    "triple_distinguisher",
    "shift_only_conditional",
    "no_shift_mass",
    "report_to_json_dict",
    "scan_pairs_rows",
]

DEFAULT_BUDGET = 10**8

# scanner table products stay below this to use int64; otherwise fall back
# to python-int (object dtype) arithmetic, exact either way
_INT64_SAFE_LIMIT = 2**62


def resolve_budget(budget=None) -> int:
    """Explicit argument, else the ND_BUDGET environment override, else default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("ND_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class BudgetExceededError(RuntimeError):
    """Enumeration would exceed the term budget; refusing to subsample."""


class UnsupportedSchemeError(ValueError):
    """The requested exact computation is not defined for this spec."""


class HypothesisViolatedError(ValueError):
    """A premise of the requested probe fails; the witness is in args[0]."""


@dataclass(frozen=True)
class AnchoredBox:
    """Box [anchor, 1) per coordinate; anchor coordinates in [0,1)."""

    anchor: tuple

    def __post_init__(self):
        anc = tuple(Fraction(a) for a in self.anchor)
        if any(not 0 <= a < 1 for a in anc):
            raise ValueError("anchor coordinates must lie in [0, 1)")
        object.__setattr__(self, "anchor", anc)

    @property
    def dim(self) -> int:
        return len(self.anchor)

    def volume(self) -> Fraction:
        v = Fraction(1)
        for a in self.anchor:
            v *= 1 - a
        return v


# -- per-coordinate closed forms ---------------------------------------------


def stratified_pair_box_prob(q, r, n: int) -> Fraction:
    """Exact P(p1 >= q, p2 >= r) for a stratified pair of distinct points.

    The pair of strata is uniform over ordered distinct pairs and each point
    is uniform inside its stratum.  With eta, rho the 1-based strata of q, r
    and eps_q = eta - n q, eps_r = rho - n r the in-stratum tail fractions:

        eta != rho:  (n(1-q) - 1)(1-r) / (n-1)        (q in the lower stratum)
        eta == rho:  (n-eta)(n-eta-1+eps_q+eps_r) / (n(n-1))

    Always <= (1-q)(1-r), with equality exactly when q = 0 or r = 0.
    """
    q, r = Fraction(q), Fraction(r)
    if not (0 <= q < 1 and 0 <= r < 1):
        raise ValueError("anchors must lie in [0, 1)")
    if n < 2:
        raise ValueError("a distinct pair needs at least two strata")
    eta = floor(n * q) + 1
    rho = floor(n * r) + 1
    if eta == rho:
        a = n - eta
        eps_q = eta - n * q
        eps_r = rho - n * r
        return Fraction(a) * (a - 1 + eps_q + eps_r) / (n * (n - 1))
    if eta > rho:
        q, r = r, q
    return (n * (1 - q) - 1) * (1 - r) / (n - 1)


def _midpoint_count(q, n: int) -> int:
    """Number of cell midpoints (2c+1)/(2n) lying in [q, 1)."""
    q = Fraction(q)
    # (2c+1)/(2n) >= q  <=>  c >= (2nq - 1)/2
    lo = 2 * n * q - 1
    c_min = -(-lo.numerator // (2 * lo.denominator)) if lo > 0 else 0
    return max(0, n - c_min)


def patterson_pair_factor(q, r, n: int) -> Fraction:
    """Exact P(p1 >= q, p2 >= r) per coordinate for midpoint lattice sampling."""
    if n < 2:
        raise ValueError("a distinct pair needs at least two strata")
    cq = _midpoint_count(q, n)
    cr = _midpoint_count(r, n)
    cboth = _midpoint_count(max(Fraction(q), Fraction(r)), n)
    return Fraction(cq * cr - cboth, n * (n - 1))


def patterson_marginal_factor(q, n: int) -> Fraction:
    return Fraction(_midpoint_count(q, n), n)


def _cell_overlap(c: int, q: Fraction, n: int) -> Fraction:
    """Fraction of cell [c/n, (c+1)/n) covered by [q, 1)."""
    w = Fraction(c + 1) - n * q
    if w <= 0:
        return Fraction(0)
    return w if w < 1 else Fraction(1)


def _cell_weight(c: int, q: Fraction, n: int, position: str) -> Fraction:
    """P(point >= q | cell c) under the scheme's in-cell position model."""
    if position == "jitter":
        return _cell_overlap(c, q, n)
    if position == "corner":
        return Fraction(1) if Fraction(c, n) >= q else Fraction(0)
    if position == "midpoint":
        return Fraction(1) if Fraction(2 * c + 1, 2 * n) >= q else Fraction(0)
    raise ValueError(f"unknown position model {position!r}")


# -- the discrete pair law ----------------------------------------------------


@dataclass(frozen=True)
class PairLaw:
    """Joint law of two distinct points: cell-pair pmf + position model.

    pmf maps (cells of p1, cells of p2) to exact probabilities summing to 1.
    position is "jitter" (uniform in cell), "corner" or "midpoint".
    """

    spec: SchemeSpec
    n: int
    dim: int
    pmf: dict
    position: str

    def validate(self) -> None:
        total = sum(self.pmf.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"pmf sums to {total}, expected 1")
        for z1, z2 in self.pmf:
            if any(a == b for a, b in zip(z1, z2)):
                raise ValueError("support contains a coordinate-equal cell pair")

    def marginal(self, side: int) -> dict:
        out = {}
        for (z1, z2), p in self.pmf.items():
            key = z1 if side == 0 else z2
            out[key] = out.get(key, Fraction(0)) + p
        return out


def _position_model(spec: SchemeSpec) -> str:
    if spec.kind == "patterson":
        return "midpoint"
    if spec.kind == "rsj_lattice" and not spec.jitter:
        return "corner"
    return "jitter"


def merge_counts(parts: list) -> np.ndarray:
    """Merge partial enumeration counts; addition is order-insensitive."""
    total = np.zeros_like(parts[0])
    for p in parts:
        total = total + p
    return total


def _rsj_enumeration_space(spec: SchemeSpec):
    n, d = spec.n, spec.dim
    if spec.generator == "random":
        gens = np.array(list(product(range(1, n), repeat=d)), dtype=np.int64)
    else:
        gens = np.array([spec.generator], dtype=np.int64)
    if spec.shift == "grid":
        shifts = np.array(list(product(range(n), repeat=d)), dtype=np.int64)
    elif spec.shift == "none":
        shifts = np.zeros((1, d), dtype=np.int64)
    else:
        raise UnsupportedSchemeError(
            "the discrete cell law is undefined for a continuous torus shift"
        )
    # all (g, s) combinations as rows
    gi = np.repeat(np.arange(len(gens)), len(shifts))
    si = np.tile(np.arange(len(shifts)), len(gens))
    return gens[gi], shifts[si]


def discrete_pair_pmf(n: int, dim: int, spec: SchemeSpec = None, budget=None, threads: int = 1) -> PairLaw:
    """Exhaustively enumerate the cell-pair law of two distinct points.

    For the lattice scheme this runs over every (generator, grid shift,
    ordered index pair); for stratified/lhs/patterson over every ordered
    pair of stratum assignments per coordinate.  Counts are exact; above
    the term budget the call refuses rather than sampling.
    """
    spec = spec if spec is not None else full_rsj(n, dim)
    if (spec.n, spec.dim) != (n, dim):
        raise ValueError("spec size does not match (n, dim)")
    budget = resolve_budget(budget)
    n_bins = (n * n) ** dim
    radix = np.int64(n * n) ** np.arange(dim, dtype=np.int64)

    if spec.kind == "rsj_lattice":
        g_rows, s_rows = _rsj_enumeration_space(spec)
        m_pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        terms = len(g_rows) * len(m_pairs)
        if terms > budget:
            raise BudgetExceededError(
                f"enumeration too large: {terms} terms exceeds budget {budget}"
            )

        def count_chunk(pairs):
            c = np.zeros(n_bins, dtype=np.int64)
            for a, b in pairs:
                z1 = (g_rows * a + s_rows) % n
                z2 = (g_rows * b + s_rows) % n
                idx = ((z1 * n + z2) * radix).sum(axis=1)
                c += np.bincount(idx, minlength=n_bins)
            return c

        if threads > 1:
            chunks = [m_pairs[i::threads] for i in range(threads)]
            chunks = [c for c in chunks if c]
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(count_chunk, chunks))
            counts = merge_counts(parts)
        else:
            counts = count_chunk(m_pairs)
        total = terms
    elif spec.kind in ("stratified1d", "lhs", "patterson"):
        # independent stratum permutations per coordinate: the pair of cells
        # in each coordinate is an ordered pair of distinct strata
        terms = (n * (n - 1)) ** dim
        if terms > budget:
            raise BudgetExceededError(
                f"enumeration too large: {terms} terms exceeds budget {budget}"
            )
        codes = np.array([z1 * n + z2 for z1 in range(n) for z2 in range(n) if z1 != z2],
                         dtype=np.int64)
        flat = np.zeros(1, dtype=np.int64)
        for i in range(dim):
            flat = (flat[:, None] + codes[None, :] * radix[i]).ravel()
        counts = np.bincount(flat, minlength=n_bins)
        total = terms
    else:
        raise UnsupportedSchemeError(f"no discrete pair law for kind {spec.kind!r}")

    pmf = {}
    for flat_idx in np.nonzero(counts)[0]:
        rem = int(flat_idx)
        z1, z2 = [], []
        for _ in range(dim):
            code = rem % (n * n)
            rem //= n * n
            z1.append(code // n)
            z2.append(code % n)
        pmf[(tuple(z1), tuple(z2))] = Fraction(int(counts[flat_idx]), total)
    law = PairLaw(spec=spec, n=n, dim=dim, pmf=pmf, position=_position_model(spec))
    law.validate()
    return law


# -- joint box probabilities ---------------------------------------------------


def _is_factorized(spec: SchemeSpec) -> bool:
    return spec.kind in ("stratified1d", "lhs", "patterson") or is_full_rsj(spec)


def _joint_factor(spec: SchemeSpec, q, r) -> Fraction:
    if spec.kind == "patterson":
        return patterson_pair_factor(q, r, spec.n)
    return stratified_pair_box_prob(q, r, spec.n)


def _marginal_factor(spec: SchemeSpec, q) -> Fraction:
    if spec.kind == "patterson":
        return patterson_marginal_factor(q, spec.n)
    return 1 - Fraction(q)


def _continuous_shift_pair_configs(spec: SchemeSpec):
    """Per-coordinate, equally likely (x1, x2) positions of an ordered pair
    before the torus shift is applied.

    For the shift-only lattice these are (gamma a / n, gamma b / n) over
    generators gamma and ordered index pairs (a, b).  For midpoint lattice
    sampling they are ordered pairs of distinct midpoints.
    """
    n = spec.n
    if spec.kind == "rsj_lattice":
        gens = range(1, n) if spec.generator == "random" else None
        configs_per_coord = []
        for i in range(spec.dim):
            coord_gens = gens if gens is not None else [spec.generator[i]]
            configs_per_coord.append(
                [
                    (Fraction((gam * a) % n, n), Fraction((gam * b) % n, n))
                    for gam in coord_gens
                    for a in range(n)
                    for b in range(n)
                    if a != b
                ]
            )
        return configs_per_coord
    if spec.kind == "patterson":
        mids = [Fraction(2 * c + 1, 2 * n) for c in range(n)]
        per_coord = [(x1, x2) for x1 in mids for x2 in mids if x1 != x2]
        return [list(per_coord) for _ in range(spec.dim)]
    raise UnsupportedSchemeError(f"no continuous-shift law for kind {spec.kind!r}")


def _shifted_pair_overlap(x1: Fraction, x2: Fraction, q: Fraction, r: Fraction) -> Fraction:
    """Measure of shifts u with x1+u in [q,1) and x2+u in [r,1) (mod 1)."""
    if q >= 1 or r >= 1:
        return Fraction(0)
    arc1 = CircularInterval((q - x1) % 1, 1 - q)
    arc2 = CircularInterval((r - x2) % 1, 1 - r)
    return circular_overlap(arc1, arc2)


def _continuous_shift_box_prob(spec: SchemeSpec, anchors1, anchors2, budget) -> Fraction:
    n = spec.n
    if spec.kind == "rsj_lattice" and spec.generator == "random":
        per_gamma = n - 1
    else:
        per_gamma = 1
    terms = spec.dim * per_gamma * n * (n - 1)
    if terms > resolve_budget(budget):
        raise BudgetExceededError("enumeration too large for continuous-shift integration")

    if spec.kind == "rsj_lattice":
        gammas = range(1, n) if spec.generator == "random" else None
        total = Fraction(0)
        count = 0
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                count += 1
                prod_term = Fraction(1)
                for i in range(spec.dim):
                    coord_gammas = gammas if gammas is not None else [spec.generator[i]]
                    acc = Fraction(0)
                    for gam in coord_gammas:
                        x1 = Fraction((gam * a) % n, n)
                        x2 = Fraction((gam * b) % n, n)
                        acc += _shifted_pair_overlap(x1, x2, anchors1[i], anchors2[i])
                    prod_term *= acc / len(coord_gammas)
                total += prod_term
        return total / count
    # midpoint sampling with an added torus shift: coordinates independent
    configs = _continuous_shift_pair_configs(spec)
    result = Fraction(1)
    for i in range(spec.dim):
        acc = Fraction(0)
        for x1, x2 in configs[i]:
            acc += _shifted_pair_overlap(x1, x2, anchors1[i], anchors2[i])
        result *= acc / len(configs[i])
    return result


def pair_box_prob(spec: SchemeSpec, Q: AnchoredBox, R: AnchoredBox,
                  method: str = "auto", budget=None, threads: int = 1) -> Fraction:
    """Exact P(p1 in Q, p2 in R) for anchored boxes Q, R.

    method "auto" picks the closed per-coordinate form when the joint law
    factorizes (stratified, lhs, patterson, fully randomized lattice) and
    exhaustive enumeration otherwise; "closed_form" and "enumeration" force
    a route.  A continuous torus shift (jitterless) is integrated exactly
    via circle-arc overlaps; combined with jitter it is unsupported.
    """
    if Q.dim != spec.dim or R.dim != spec.dim:
        raise ValueError("box dimension does not match the scheme")
    if spec.n < 2:
        raise ValueError("a pair probability needs n >= 2")
    if spec.kind == "rsj_lattice" and spec.shift == "continuous_torus":
        if spec.jitter:
            raise UnsupportedSchemeError(
                "continuous torus shift combined with jitter is not analyzed"
            )
        return _continuous_shift_box_prob(spec, Q.anchor, R.anchor, budget)

    if method not in ("auto", "closed_form", "enumeration"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed_form" or (method == "auto" and _is_factorized(spec)):
        if not _is_factorized(spec):
            raise UnsupportedSchemeError("no closed form for this spec; use enumeration")
        result = Fraction(1)
        for qi, ri in zip(Q.anchor, R.anchor):
            result *= _joint_factor(spec, qi, ri)
        return result

    law = discrete_pair_pmf(spec.n, spec.dim, spec, budget=budget, threads=threads)
    return _law_box_prob(law, Q, R)


def _law_box_prob(law: PairLaw, Q: AnchoredBox, R: AnchoredBox) -> Fraction:
    n, pos = law.n, law.position
    total = Fraction(0)
    for (z1, z2), p in law.pmf.items():
        w = p
        for c, q in zip(z1, Q.anchor):
            if w == 0:
                break
            w *= _cell_weight(c, q, n, pos)
        else:
            for c, r in zip(z2, R.anchor):
                if w == 0:
                    break
                w *= _cell_weight(c, r, n, pos)
        total += w
    return total


def pair_marginal_prob(spec: SchemeSpec, box: AnchoredBox, side: int = 0,
                       budget=None, threads: int = 1) -> Fraction:
    """Exact P(p_side in box) under the pair law of the scheme."""
    if box.dim != spec.dim:
        raise ValueError("box dimension does not match the scheme")
    if spec.kind == "rsj_lattice" and spec.shift == "continuous_torus":
        if spec.jitter:
            raise UnsupportedSchemeError(
                "continuous torus shift combined with jitter is not analyzed"
            )
        # a uniform torus shift makes each coordinate uniform
        return box.volume()
    if _is_factorized(spec):
        result = Fraction(1)
        for a in box.anchor:
            result *= _marginal_factor(spec, a)
        return result
    law = discrete_pair_pmf(spec.n, spec.dim, spec, budget=budget, threads=threads)
    marg = law.marginal(side)
    total = Fraction(0)
    for cells, p in marg.items():
        w = p
        for c, a in zip(cells, box.anchor):
            if w == 0:
                break
            w *= _cell_weight(c, a, law.n, law.position)
        total += w
    return total


# -- negative-dependence scan ---------------------------------------------------


@dataclass(frozen=True)
class DependenceReport:
    """Outcome of a grid scan: worst clamped excess and every witness.

    grid holds a description of the probed anchor grid (materializing all
    M^(2 dim) box pairs would be wasteful); witnesses list each violating
    (Q, R, joint, product) exactly.
    """

    spec: SchemeSpec
    grid: dict
    worst_violation: Fraction
    witnesses: tuple

    @property
    def ok(self) -> bool:
        return self.worst_violation == 0


def _factor_tables(spec: SchemeSpec, anchors):
    """Integer joint/product tables over a common denominator.

    Entry [k][l] of the joint table is the per-coordinate pair factor at
    (anchors[k], anchors[l]); the product table holds the product of the
    two marginal factors.  Returned as (joint, product, denominator).
    """
    joint = [[_joint_factor(spec, q, r) for r in anchors] for q in anchors]
    marg = [_marginal_factor(spec, q) for q in anchors]
    dens = [f.denominator for row in joint for f in row]
    dens += [(a * b).denominator for a in marg for b in marg]
    den = lcm(*dens)
    jt = [[int(f * den) for f in row] for row in joint]
    pt = [[int(a * b * den) for b in marg] for a in marg]
    return jt, pt, den


def _scan_factorized(spec: SchemeSpec, anchors, budget: int):
    m = len(anchors)
    dim = spec.dim
    pairs = m ** (2 * dim)
    if pairs > budget:
        raise BudgetExceededError(
            f"grid too large: {pairs} box pairs exceeds budget {budget}"
        )
    jt, pt, den = _factor_tables(spec, anchors)
    use_int64 = den**dim < _INT64_SAFE_LIMIT
    dtype = np.int64 if use_int64 else object
    jflat = np.array(jt, dtype=dtype).ravel()
    pflat = np.array(pt, dtype=dtype).ravel()

    rest_j = np.ones(1, dtype=dtype)
    rest_p = np.ones(1, dtype=dtype)
    for _ in range(dim - 1):
        rest_j = np.multiply.outer(rest_j, jflat).ravel()
        rest_p = np.multiply.outer(rest_p, pflat).ravel()

    worst = 0
    witnesses = []
    denom = Fraction(den) ** dim
    for head in range(m * m):
        dj = jflat[head] * rest_j - pflat[head] * rest_p
        bad = np.nonzero(dj > 0)[0]
        if len(bad):
            worst = max(worst, int(dj.max()))
            for tail in bad:
                # flat index is (m*m)-ary, most significant digit first;
                # digit -> (q index, r index) for that coordinate
                qk, rk = [], []
                rem = head * (m * m) ** (dim - 1) + int(tail)
                for level in range(dim):
                    place = (m * m) ** (dim - 1 - level)
                    code, rem = divmod(rem, place)
                    qk.append(code // m)
                    rk.append(code % m)
                Q = AnchoredBox(tuple(anchors[k] for k in qk))
                R = AnchoredBox(tuple(anchors[k] for k in rk))
                joint = Fraction(int(jflat[head] * rest_j[tail])) / denom
                prodv = Fraction(int(pflat[head] * rest_p[tail])) / denom
                witnesses.append((Q, R, joint, prodv))
    worst_frac = Fraction(worst) / denom if worst > 0 else Fraction(0)
    return worst_frac, witnesses


def _scan_enumerated(spec: SchemeSpec, anchors, budget: int, threads: int):
    law = discrete_pair_pmf(spec.n, spec.dim, spec, budget=budget, threads=threads)
    m = len(anchors)
    dim = spec.dim
    pairs = m ** (2 * dim)
    if pairs * max(1, len(law.pmf)) > budget:
        raise BudgetExceededError("grid scan exceeds enumeration budget")
    n, pos = law.n, law.position
    wtab = [[_cell_weight(c, a, n, pos) for a in anchors] for c in range(n)]

    marg1 = law.marginal(0)
    marg2 = law.marginal(1)

    def box_prob(marg, ks):
        tot = Fraction(0)
        for cells, p in marg.items():
            w = p
            for c, k in zip(cells, ks):
                if w == 0:
                    break
                w *= wtab[c][k]
            tot += w
        return tot

    worst = Fraction(0)
    witnesses = []
    all_boxes = list(product(range(m), repeat=dim))
    p1 = {ks: box_prob(marg1, ks) for ks in all_boxes}
    p2 = {ks: box_prob(marg2, ks) for ks in all_boxes}
    for qks in all_boxes:
        for rks in all_boxes:
            joint = Fraction(0)
            for (z1, z2), p in law.pmf.items():
                w = p
                for c, k in zip(z1, qks):
                    if w == 0:
                        break
                    w *= wtab[c][k]
                else:
                    for c, k in zip(z2, rks):
                        if w == 0:
                            break
                        w *= wtab[c][k]
                joint += w
            prodv = p1[qks] * p2[rks]
            if joint > prodv:
                excess = joint - prodv
                worst = max(worst, excess)
                Q = AnchoredBox(tuple(anchors[k] for k in qks))
                R = AnchoredBox(tuple(anchors[k] for k in rks))
                witnesses.append((Q, R, joint, prodv))
    return worst, witnesses


def nuod_scan(spec: SchemeSpec, grid_resolution: int, budget=None, threads: int = 1) -> DependenceReport:
    """Check joint <= product for all anchored-box pairs on the k/M grid.

    The product side uses the scheme's exact marginals (equal to box volume
    whenever the scheme is marginally uniform).  For factorizable schemes
    both sides are multilinear in the 2*dim anchor coordinates on each cell
    of the 1/n grid, so when M is a multiple of n the corner check on this
    grid certifies the inequality for every anchored box pair (anchors at 1
    make both sides vanish, so the open upper face is trivial).

    A continuous-torus-shift spec has no cell law and is not scanned; the
    fixed-distance probe (shift_only_conditional) covers that ablation.
    """
    if grid_resolution < 1:
        raise ValueError("grid resolution must be positive")
    budget = resolve_budget(budget)
    anchors = [Fraction(k, grid_resolution) for k in range(grid_resolution)]
    if _is_factorized(spec):
        worst, witnesses = _scan_factorized(spec, anchors, budget)
    else:
        worst, witnesses = _scan_enumerated(spec, anchors, budget, threads)
    witnesses.sort(key=lambda w: (w[2] - w[3], w[0].anchor, w[1].anchor), reverse=True)
    grid = {
        "resolution": grid_resolution,
        "anchors": f"k/{grid_resolution} for 0 <= k < {grid_resolution}",
        "boxes_per_side": grid_resolution**spec.dim,
        "pairs": grid_resolution ** (2 * spec.dim),
        "certifies_all_boxes": _is_factorized(spec) and grid_resolution % spec.n == 0,
    }
    return DependenceReport(spec=spec, grid=grid, worst_violation=worst,
                            witnesses=tuple(witnesses))


# -- structural separations -----------------------------------------------------


class CopulaCheck(tuple):
    """(equal, max_discrepancy) with attribute access."""

    __slots__ = ()

    def __new__(cls, equal, max_discrepancy):
        return super().__new__(cls, (equal, max_discrepancy))

    @property
    def equal(self):
        return self[0]

    @property
    def max_discrepancy(self):
        return self[1]


def copula_equality_check(n: int, dim: int, spec: SchemeSpec = None,
                          budget=None, threads: int = 1) -> CopulaCheck:
    """Compare the cell-pair pmf of a lattice spec with the lhs pmf.

    Both sides are exhaustive enumerations.  The fully randomized lattice
    matches lhs exactly (discrepancy 0); a fixed generator does not.
    """
    spec = spec if spec is not None else full_rsj(n, dim)
    law_a = discrete_pair_pmf(n, dim, spec, budget=budget, threads=threads)
    law_b = discrete_pair_pmf(n, dim, lhs_spec(n, dim), budget=budget, threads=threads)
    keys = set(law_a.pmf) | set(law_b.pmf)
    worst = Fraction(0)
    for k in keys:
        d = abs(law_a.pmf.get(k, Fraction(0)) - law_b.pmf.get(k, Fraction(0)))
        worst = max(worst, d)
    return CopulaCheck(worst == 0, worst)


@dataclass(frozen=True)
class IndependenceReport:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


def coordinate_independence_check(n: int, dim: int, spec: SchemeSpec = None,
                                  budget=None, threads: int = 1) -> IndependenceReport:
    """Verify that coordinate pair-cells factorize over every index subset.

    For each I subset of {0..dim-1} and every assignment of cell pairs on I,
    the joint marginal over I must equal the product of single-coordinate
    marginals.  Exact; returns the first failing assignment as witness.
    """
    spec = spec if spec is not None else full_rsj(n, dim)
    law = discrete_pair_pmf(n, dim, spec, budget=budget, threads=threads)

    def marginalize(idx):
        out = {}
        for (z1, z2), p in law.pmf.items():
            key = tuple((z1[i], z2[i]) for i in idx)
            out[key] = out.get(key, Fraction(0)) + p
        return out

    singles = [
        {key[0]: p for key, p in marginalize((i,)).items()} for i in range(dim)
    ]
    for size in range(2, dim + 1):
        for idx in combinations(range(dim), size):
            joint = marginalize(idx)
            for assignment in product(*(singles[i].keys() for i in idx)):
                expected = Fraction(1)
                for i, cellpair in zip(idx, assignment):
                    expected *= singles[i][cellpair]
                got = joint.get(tuple(assignment), Fraction(0))
                if got != expected:
                    return IndependenceReport(False, {
                        "subset": idx,
                        "cells": assignment,
                        "joint": got,
                        "product": expected,
                    })
    return IndependenceReport(True)


def triple_distinguisher(n: int, dim: int, a, b, budget=None) -> tuple:
    """Count discrete n-point configurations containing both cell vectors.

    Returns (lattice_count, lhs_count): the number of distinct shifted
    lattices and of distinct latin grids containing both a and b, by
    exhaustive construction.  Requires a, b to differ in every coordinate.
    """
    if n < 5 or not is_prime(n):
        raise ValueError("needs a prime n >= 5")
    if dim < 2:
        raise ValueError("needs dim >= 2")
    a = tuple(int(v) for v in a)
    b = tuple(int(v) for v in b)
    if len(a) != dim or len(b) != dim:
        raise ValueError("cell vectors must have length dim")
    if any(not 0 <= v < n for v in a + b):
        raise ValueError("cell indices must lie in [0, n)")
    if any(x == y for x, y in zip(a, b)):
        raise ValueError("cell vectors share a coordinate cell; they must differ everywhere")
    budget = resolve_budget(budget)

    lattice_terms = (n - 1) ** dim * n**dim
    if lattice_terms > budget:
        raise BudgetExceededError("lattice enumeration exceeds budget")
    seen = set()
    for g in product(range(1, n), repeat=dim):
        for s in product(range(n), repeat=dim):
            pts = frozenset(
                tuple((g[i] * m + s[i]) % n for i in range(dim)) for m in range(n)
            )
            if a in pts and b in pts:
                seen.add(pts)
    lattice_count = len(seen)

    # latin grids keyed by the first coordinate: the grid is determined by
    # one permutation per further coordinate mapping first-cell -> cell
    full = factorial(n) ** (dim - 1)
    if full <= min(budget, 10**6):
        lhs_count = 0
        for sigmas in product(permutations(range(n)), repeat=dim - 1):
            if all(
                sig[a[0]] == a[i + 1] and sig[b[0]] == b[i + 1]
                for i, sig in enumerate(sigmas)
            ):
                lhs_count += 1
    else:
        if factorial(n) * (dim - 1) > budget:
            raise BudgetExceededError("latin grid enumeration exceeds budget")
        lhs_count = 1
        for i in range(1, dim):
            per = sum(
                1
                for sig in permutations(range(n))
                if sig[a[0]] == a[i] and sig[b[0]] == b[i]
            )
            lhs_count *= per
    return lattice_count, lhs_count


# -- ablation probes --------------------------------------------------------------


def no_shift_mass(n: int, dim: int, budget=None) -> Fraction:
    """Exact P(p1 in [0, 1/n)^dim) for the unshifted jittered lattice.

    Enumerates (generator, point index); jitter keeps each point inside its
    cell, so the event is exactly "the point's cell vector is zero".  The
    value is 1/n for every dim, which breaks marginal uniformity as soon as
    dim >= 2 (a uniform point would give 1/n^dim).
    """
    budget = resolve_budget(budget)
    terms = (n - 1) ** dim * n
    if terms > budget:
        raise BudgetExceededError("enumeration exceeds budget")
    hits = 0
    for g in product(range(1, n), repeat=dim):
        for m in range(n):
            if all((gi * m) % n == 0 for gi in g):
                hits += 1
    return Fraction(hits, terms)


def shift_only_conditional(spec: SchemeSpec, epsilon, dim_index: int = None,
                           budget=None) -> Fraction:
    """Exact P(p1 in Q | p2 in R) for the fixed-distance probe.

    Q = [0,1)^(d-1) x [eps/2, 1) and R = [0,1)^(d-1) x [1-eps/2, 1) in the
    probed coordinate.  Supported: the jitterless lattice with a continuous
    torus shift, and midpoint (patterson) sampling with the same continuous
    shift applied (without a shift its conditioning event has probability
    zero because the marginal is discrete).  The premise that all pair
    distances in the probed coordinate exceed epsilon is verified by
    enumeration first; a violation raises with the witness configuration.
    Under the premise the conditional is 1, strictly above the box volume
    1 - eps/2, so the scheme cannot be pairwise negatively dependent.
    """
    eps = Fraction(epsilon)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError("epsilon must lie in (0, 1/2]")
    if spec.kind == "rsj_lattice":
        if spec.shift != "continuous_torus" or spec.jitter:
            raise UnsupportedSchemeError(
                "fixed-distance probe needs a jitterless continuous-torus shift"
            )
    elif spec.kind != "patterson":
        raise UnsupportedSchemeError(f"fixed-distance probe undefined for {spec.kind!r}")
    i = spec.dim - 1 if dim_index is None else dim_index
    if not 0 <= i < spec.dim:
        raise ValueError("dim_index out of range")

    configs = _continuous_shift_pair_configs(spec)
    coord_configs = configs[i]
    terms = len(coord_configs)
    if terms > resolve_budget(budget):
        raise BudgetExceededError("enumeration exceeds budget")

    for x1, x2 in coord_configs:
        d = torus_dist(x1, x2)
        if d <= eps:
            raise HypothesisViolatedError(
                f"pair distance {format_rational(d)} <= epsilon "
                f"{format_rational(eps)} at positions "
                f"({format_rational(x1)}, {format_rational(x2)})"
            )

    q = eps / 2
    r = 1 - eps / 2
    joint = Fraction(0)
    mass_r = Fraction(0)
    for x1, x2 in coord_configs:
        joint += _shifted_pair_overlap(x1, x2, q, r)
        mass_r += 1 - r  # measure of shifts putting x2 in [r, 1)
    return joint / mass_r


# -- serialization ------------------------------------------------------------------


def _box_strings(box: AnchoredBox) -> list:
    return [format_rational(a) for a in box.anchor]


def report_to_json_dict(report: DependenceReport) -> dict:
    from .schemes import spec_to_dict

    return {
        "scheme": spec_to_dict(report.spec),
        "grid": report.grid,
        "worst_violation": format_rational(report.worst_violation),
        "violations": [
            {
                "Q": _box_strings(Q),
                "R": _box_strings(R),
                "joint": format_rational(joint),
                "product": format_rational(prodv),
            }
            for Q, R, joint, prodv in report.witnesses
        ],
    }


def scan_pairs_rows(spec: SchemeSpec, grid_resolution: int, budget=None,
                    threads: int = 1):
    """One (Q, R, joint, product, violation) row per probed grid pair.

    The full per-pair table of a scan, for CSV export; the budget guards
    the M^(2 dim) blowup.  Rows are yielded in lexicographic anchor order.
    """
    budget = resolve_budget(budget)
    m = grid_resolution
    dim = spec.dim
    if m ** (2 * dim) > budget:
        raise BudgetExceededError(
            f"pair table too large: {m ** (2 * dim)} rows exceeds budget {budget}"
        )
    anchors = [Fraction(k, m) for k in range(m)]
    if _is_factorized(spec):
        jt = {
            (q, r): _joint_factor(spec, q, r) for q in anchors for r in anchors
        }
        mt = {q: _marginal_factor(spec, q) for q in anchors}
        for qa in product(anchors, repeat=dim):
            for ra in product(anchors, repeat=dim):
                joint = Fraction(1)
                prodv = Fraction(1)
                for qi, ri in zip(qa, ra):
                    joint *= jt[(qi, ri)]
                    prodv *= mt[qi] * mt[ri]
                yield AnchoredBox(qa), AnchoredBox(ra), joint, prodv, joint > prodv
        return
    law = discrete_pair_pmf(spec.n, spec.dim, spec, budget=budget, threads=threads)
    marg1, marg2 = law.marginal(0), law.marginal(1)
    n, pos = law.n, law.position

    def weighted(marg, box):
        tot = Fraction(0)
        for cells, p in marg.items():
            w = p
            for c, a in zip(cells, box.anchor):
                if w == 0:
                    break
                w *= _cell_weight(c, a, n, pos)
            tot += w
        return tot

    for qa in product(anchors, repeat=dim):
        Q = AnchoredBox(qa)
        pq = weighted(marg1, Q)
        for ra in product(anchors, repeat=dim):
            R = AnchoredBox(ra)
            joint = _law_box_prob(law, Q, R)
            prodv = pq * weighted(marg2, R)
            yield Q, R, joint, prodv, joint > prodv
