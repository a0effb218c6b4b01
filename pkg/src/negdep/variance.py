"""Replication-based variance comparison against the Monte Carlo baseline.

The lab estimates Var of an equal-weight quadrature over R independent
randomizations of a scheme and compares it to the MC variance Var(f)/n,
which is taken exactly whenever the integrand's variance is known in
closed form.  Integrands are coordinate-monotone so the dependence
structure of the scheme is what drives the comparison.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Callable, Optional

import numpy as np

from .rng import RngStream
from .samplers import lhs, patterson, rsj_rank1, stratified_1d
from .schemes import SchemeSpec, is_marginally_uniform, spec_from_dict, spec_to_dict

__all__ = [
    "Integrand",
    "additive_integrand",
    "product_integrand",
    "box_indicator_integrand",
    "origin_box_integrand",
    "smooth_monotone_integrand",
    "integrand_library",
    "get_integrand",
    "verify_monotone_flags",
    "mc_estimate",
    "rqmc_estimate",
    "VarianceResult",
    "variance_compare",
    "result_to_json_dict",
    "result_csv_header",
    "result_csv_row",
    "run_variance_batch",
]


@dataclass(frozen=True)
class Integrand:
    """A test function on [0,1)^arity with optional exact moments."""

    name: str
    arity: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    monotone_flags: tuple
    exact_mean: Optional[Fraction] = None
    exact_variance: Optional[Fraction] = None

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.arity:
            raise ValueError(f"expected points of shape (m, {self.arity})")
        return np.asarray(self.evaluator(pts), dtype=np.float64)


def additive_integrand(dim: int) -> Integrand:
    """Sum of coordinates; mean d/2, variance d/12."""
    return Integrand(
        name="additive",
        arity=dim,
        evaluator=lambda u: u.sum(axis=1),
        monotone_flags=("increasing",) * dim,
        exact_mean=Fraction(dim, 2),
        exact_variance=Fraction(dim, 12),
    )


def product_integrand(dim: int) -> Integrand:
    """Product of coordinates; mean (1/2)^d, variance (1/3)^d - (1/4)^d."""
    return Integrand(
        name="product",
        arity=dim,
        evaluator=lambda u: u.prod(axis=1),
        monotone_flags=("increasing",) * dim,
        exact_mean=Fraction(1, 2**dim),
        exact_variance=Fraction(1, 3**dim) - Fraction(1, 4**dim),
    )


def box_indicator_integrand(anchor) -> Integrand:
    """Indicator of the anchored box [anchor, 1); Bernoulli moments."""
    anc = tuple(Fraction(a) for a in anchor)
    lam = Fraction(1)
    for a in anc:
        lam *= 1 - a
    thresholds = np.array([float(a) for a in anc])

    def ev(u, t=thresholds):
        return (u >= t).all(axis=1).astype(np.float64)

    return Integrand(
        name="box_indicator",
        arity=len(anc),
        evaluator=ev,
        monotone_flags=("increasing",) * len(anc),
        exact_mean=lam,
        exact_variance=lam * (1 - lam),
    )


def origin_box_integrand(dim: int, edge) -> Integrand:
    """Indicator of [0, edge)^dim; decreasing in every coordinate.

    Useful for exhibiting bias of constructions that are not marginally
    uniform: its true mean is edge^dim.
    """
    e = Fraction(edge)
    if not 0 < e <= 1:
        raise ValueError("edge must lie in (0, 1]")
    lam = e**dim
    t = float(e)

    def ev(u, t=t):
        return (u < t).all(axis=1).astype(np.float64)

    return Integrand(
        name="origin_box",
        arity=dim,
        evaluator=ev,
        monotone_flags=("decreasing",) * dim,
        exact_mean=lam,
        exact_variance=lam * (1 - lam),
    )


def smooth_monotone_integrand(dim: int, alpha=Fraction(1)) -> Integrand:
    """Product of factors 1 + alpha (u_i - 1/2) with alpha in (0, 2).

    Each factor is positive and increasing; mean 1, variance
    (1 + alpha^2/12)^d - 1.
    """
    a = Fraction(alpha)
    if not 0 < a < 2:
        raise ValueError("alpha must lie in (0, 2)")
    af = float(a)

    def ev(u, af=af):
        return (1.0 + af * (u - 0.5)).prod(axis=1)

    return Integrand(
        name="smooth_monotone",
        arity=dim,
        evaluator=ev,
        monotone_flags=("increasing",) * dim,
        exact_mean=Fraction(1),
        exact_variance=(1 + a * a / 12) ** dim - 1,
    )


def constant_integrand(dim: int, value=Fraction(1)) -> Integrand:
    c = Fraction(value)
    cf = float(c)
    return Integrand(
        name="constant",
        arity=dim,
        evaluator=lambda u, cf=cf: np.full(u.shape[0], cf),
        monotone_flags=("none",) * dim,
        exact_mean=c,
        exact_variance=Fraction(0),
    )


_DEFAULT_BOX_ANCHOR = Fraction(3, 10)


def integrand_library(dim: int) -> list:
    """The standard coordinate-monotone battery at the given arity."""
    return [
        additive_integrand(dim),
        product_integrand(dim),
        box_indicator_integrand((_DEFAULT_BOX_ANCHOR,) * dim),
        smooth_monotone_integrand(dim),
    ]


def get_integrand(name: str, dim: int, **params) -> Integrand:
    if name == "additive":
        return additive_integrand(dim)
    if name == "product":
        return product_integrand(dim)
    if name == "box_indicator":
        anchor = params.get("anchor", (_DEFAULT_BOX_ANCHOR,) * dim)
        return box_indicator_integrand(anchor)
    if name == "origin_box":
        return origin_box_integrand(dim, params.get("edge", Fraction(1, 2)))
    if name == "smooth_monotone":
        return smooth_monotone_integrand(dim, params.get("alpha", Fraction(1)))
    if name == "constant":
        return constant_integrand(dim, params.get("value", Fraction(1)))
    known = "additive, product, box_indicator, origin_box, smooth_monotone, constant"
    raise ValueError(f"unknown integrand {name!r}; library provides: {known}")


def verify_monotone_flags(f: Integrand, rng: RngStream, probes: int = 1000) -> bool:
    """Spot-check the declared monotonicity by coordinate perturbations.

    For each probe, one coordinate is pushed toward its monotone direction
    and the function value must not move the wrong way.
    """
    d = f.arity
    for _ in range(probes):
        u = rng.uniform01(d)
        i = rng.integer(d)
        flag = f.monotone_flags[i]
        if flag == "none":
            continue
        v = u.copy()
        room = 1.0 - u[i]
        v[i] = u[i] + (0.5 + 0.5 * rng.uniform01(1)[0]) * room * 0.999
        base = f(u.reshape(1, d))[0]
        moved = f(v.reshape(1, d))[0]
        if flag == "increasing" and moved < base - 1e-12:
            return False
        if flag == "decreasing" and moved > base + 1e-12:
            return False
    return True


def mc_estimate(f: Integrand, n: int, rng: RngStream) -> float:
    """Equal-weight average of f over n iid uniform points."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = rng.uniform01(n * f.arity).reshape(n, f.arity)
    return float(f(pts).mean())


def _generate_stream(spec: SchemeSpec, rng: RngStream):
    if spec.kind == "stratified1d":
        return stratified_1d(spec.n, rng)
    if spec.kind == "lhs":
        return lhs(spec.n, spec.dim, rng)
    if spec.kind == "patterson":
        return patterson(spec.n, spec.dim, rng)
    return rsj_rank1(spec, rng)


def rqmc_estimate(f: Integrand, spec: SchemeSpec, rng: RngStream) -> float:
    """Equal-weight average of f over one randomization of the scheme.

    Unbiased for the integral whenever the scheme is marginally uniform;
    ablations that are not (e.g. shift "none") are still evaluated, and
    callers should surface the biased-capable flag from the comparison.
    """
    if f.arity != spec.dim:
        raise ValueError("integrand arity does not match scheme dim")
    ps = _generate_stream(spec, rng)
    return float(f(ps.floats()).mean())


@dataclass(frozen=True)
class VarianceResult:
    """Replication study of one (scheme, integrand, n) cell."""

    spec: SchemeSpec
    integrand: str
    n: int
    replications: int
    seed: int
    est_mean: float
    est_variance: float
    variance_stderr: float
    mc_variance: float
    mc_variance_exact: bool
    dominates: bool
    trivial: bool
    biased_capable: bool
    bias: Optional[float] = None


def variance_compare(f: Integrand, spec: SchemeSpec, replications: int,
                     rng: RngStream, threads: int = 1) -> VarianceResult:
    """Estimate Var of the scheme quadrature from independent replications.

    Each replication runs on its own substream (split by replication index),
    so the job set is order-independent and embarrassingly parallel; with
    threads > 1 the replications are farmed out to a thread pool and results
    land in their slots, keeping the output identical to the serial run.
    The MC baseline is Var(f)/n exactly when the integrand's variance is
    known, otherwise it is estimated from a matching number of MC
    replications on substreams offset by 2**32.  The domination flag allows
    the estimate three standard errors of slack:
    est <= mc * (1 + 3 rel-stderr).
    """
    if replications < 100:
        raise ValueError("need at least 100 replications")
    n = spec.n
    est = np.empty(replications)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        def job(rep):
            return rep, rqmc_estimate(f, spec, rng.split(rep))

        with ThreadPoolExecutor(max_workers=threads) as ex:
            for rep, value in ex.map(job, range(replications)):
                est[rep] = value
    else:
        for rep in range(replications):
            est[rep] = rqmc_estimate(f, spec, rng.split(rep))

    est_mean = float(est.mean())
    centered = est - est.mean()
    m2 = float((centered**2).mean())
    m4 = float((centered**4).mean())
    est_var = float(est.var(ddof=1))
    var_stderr = sqrt(max(m4 - m2 * m2, 0.0) / replications)

    if f.exact_variance is not None:
        mc_var = float(f.exact_variance) / n
        mc_exact = True
    else:
        mc = np.empty(replications)
        for rep in range(replications):
            mc[rep] = mc_estimate(f, n, rng.split(2**32 + rep))
        mc_var = float(mc.var(ddof=1))
        mc_exact = False

    trivial = est_var == 0.0 and mc_var == 0.0
    if trivial:
        dominates = True
    else:
        rel = var_stderr / est_var if est_var > 0 else 0.0
        dominates = est_var <= mc_var * (1.0 + 3.0 * rel)

    bias = None
    if f.exact_mean is not None:
        bias = est_mean - float(f.exact_mean)

    return VarianceResult(
        spec=spec,
        integrand=f.name,
        n=n,
        replications=replications,
        seed=rng.seed,
        est_mean=est_mean,
        est_variance=est_var,
        variance_stderr=var_stderr,
        mc_variance=mc_var,
        mc_variance_exact=mc_exact,
        dominates=dominates,
        trivial=trivial,
        biased_capable=not is_marginally_uniform(spec),
        bias=bias,
    )


def result_to_json_dict(res: VarianceResult) -> dict:
    return {
        "scheme": spec_to_dict(res.spec),
        "integrand": res.integrand,
        "n": res.n,
        "dim": res.spec.dim,
        "replications": res.replications,
        "seed": res.seed,
        "est_mean": res.est_mean,
        "est_variance": res.est_variance,
        "variance_stderr": res.variance_stderr,
        "mc_variance": res.mc_variance,
        "mc_variance_exact": res.mc_variance_exact,
        "dominates": res.dominates,
        "trivial": res.trivial,
        "biased_capable": res.biased_capable,
        "bias": res.bias,
    }


_CSV_FIELDS = [
    "scheme", "generator", "shift", "jitter", "integrand", "n", "dim",
    "replications", "seed", "est_mean", "est_variance", "variance_stderr",
    "mc_variance", "mc_variance_exact", "dominates", "trivial",
    "biased_capable", "bias",
]


def result_csv_header() -> list:
    return list(_CSV_FIELDS)


def result_csv_row(res: VarianceResult) -> list:
    d = spec_to_dict(res.spec)
    gen = d["generator"]
    gen_str = gen if isinstance(gen, str) else ";".join(str(v) for v in gen)
    return [
        d["kind"], gen_str, d["shift"], d["jitter"], res.integrand, res.n,
        res.spec.dim, res.replications, res.seed, repr(res.est_mean),
        repr(res.est_variance), repr(res.variance_stderr), repr(res.mc_variance),
        res.mc_variance_exact, res.dominates, res.trivial, res.biased_capable,
        "" if res.bias is None else repr(res.bias),
    ]


def run_variance_batch(config: dict, rng_seed=None) -> list:
    """Run the cross product of schemes x integrands x sizes from a config.

    Config keys: "seed", "replications", "sizes" ([[n, dim], ...]),
    "schemes" (spec dicts; "n"/"dim" filled from sizes when omitted),
    "integrands" (names).  Returns VarianceResult objects in a stable order.
    """
    seed = int(config.get("seed", 0)) if rng_seed is None else int(rng_seed)
    replications = int(config["replications"])
    sizes = [(int(n), int(d)) for n, d in config["sizes"]]
    results = []
    job = 0
    root = RngStream(seed)
    for stub in config["schemes"]:
        for (n, dim) in sizes:
            d = dict(stub)
            d.setdefault("n", n)
            d.setdefault("dim", dim)
            d["n"], d["dim"] = n, dim
            spec = spec_from_dict(d)
            for name in config["integrands"]:
                f = get_integrand(name, dim)
                results.append(variance_compare(f, spec, replications, root.split(job)))
                job += 1
    return results


def load_batch_config(text: str) -> dict:
    cfg = json.loads(text)
    for key in ("replications", "sizes", "schemes", "integrands"):
        if key not in cfg:
            raise ValueError(f"batch config missing key {key!r}")
    return cfg
