"""Point-set generation for every supported scheme.

Coordinates are held exactly: each coordinate is an integer numerator over
the common denominator n * 2**53, i.e. cell index times 2**53 plus a 53-bit
in-cell offset.  The rational view is exact; the float view is a derived
export.  Regenerating from (spec, seed) is bit-identical.

Draw order is pinned so seeds stay stable: generator, then shift, then
permutation(s), then jitters in point order (coordinates within a point).
"""

import csv
import io
import json

import numpy as np

from .exact import Rational, is_prime
from .rng import FRAC_BITS, RngStream
from .schemes import SchemeSpec, spec_from_dict, spec_to_dict

__all__ = [
    "MAX_N",
    "PointSet",
    "generate",
    "stratified_1d",
    "lhs",
    "patterson",
    "rank1_lattice_points",
    "rsj_rank1",
    "rsj_cell_matrix",
    "point_set_to_csv",
    "point_set_to_json",
    "point_set_from_json",
    "point_set_from_csv",
]

_FRAC_ONE = 1 << FRAC_BITS

# Coordinate numerators live in [0, n * 2**53) and all intermediate sums fit
# int64 for n up to this cap; plenty for desk scale.
MAX_N = 512


class PointSet:
    """n points in [0,1)^dim with exact coordinates and scheme metadata."""

    __slots__ = ("nums", "spec", "seed")

    def __init__(self, nums: np.ndarray, spec: SchemeSpec, seed: int):
        nums = np.asarray(nums, dtype=np.int64)
        if nums.ndim != 2 or nums.shape != (spec.n, spec.dim):
            raise ValueError(f"expected shape ({spec.n}, {spec.dim}), got {nums.shape}")
        hi = spec.n * _FRAC_ONE
        if nums.min(initial=0) < 0 or (nums.size and nums.max() >= hi):
            raise ValueError("coordinate numerators outside [0, n * 2**53)")
        self.nums = nums
        self.spec = spec
        self.seed = int(seed)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def dim(self) -> int:
        return self.spec.dim

    def cells(self) -> np.ndarray:
        """Integer cell index per coordinate (which 1/n stratum)."""
        return self.nums >> FRAC_BITS

    def offsets(self) -> np.ndarray:
        """53-bit in-cell offsets."""
        return self.nums & (_FRAC_ONE - 1)

    def rationals(self) -> list:
        den = self.n * _FRAC_ONE
        return [[Rational(int(v), den) for v in row] for row in self.nums]

    def floats(self) -> np.ndarray:
        return self.nums / float(self.n * _FRAC_ONE)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.spec == other.spec
            and self.seed == other.seed
            and np.array_equal(self.nums, other.nums)
        )

    def __repr__(self):
        return f"PointSet(n={self.n}, dim={self.dim}, kind={self.spec.kind!r}, seed={self.seed})"


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_N:
        raise ValueError(f"n is capped at {MAX_N} (exact int64 coordinate encoding)")


def _jitter_block(rng: RngStream, n: int, dim: int) -> np.ndarray:
    # one call, point-major layout: point order, coordinates within a point
    return rng.bits53_array(n * dim).astype(np.int64).reshape(n, dim)


def stratified_1d(n: int, rng: RngStream) -> PointSet:
    """Simple stratified sample: one uniform point in each stratum
    [(j-1)/n, j/n), delivered in uniformly permuted stratum order."""
    _check_n(n)
    spec = SchemeSpec("stratified1d", n, 1)
    cells = np.array(rng.permutation(n), dtype=np.int64).reshape(n, 1)
    nums = (cells << FRAC_BITS) + _jitter_block(rng, n, 1)
    return PointSet(nums, spec, rng.seed)


def lhs(n: int, dim: int, rng: RngStream) -> PointSet:
    """Latin hypercube sample: independent stratum permutations per
    coordinate, one uniform offset per point and coordinate."""
    _check_n(n)
    spec = SchemeSpec("lhs", n, dim)
    cells = np.empty((n, dim), dtype=np.int64)
    for i in range(dim):
        cells[:, i] = rng.permutation(n)
    nums = (cells << FRAC_BITS) + _jitter_block(rng, n, dim)
    return PointSet(nums, spec, rng.seed)


def patterson(n: int, dim: int, rng: RngStream) -> PointSet:
    """Lattice sampling in the Latin style: stratum permutations per
    coordinate with every point pinned to its cell midpoint (k - 1/2)/n."""
    _check_n(n)
    spec = SchemeSpec("patterson", n, dim)
    cells = np.empty((n, dim), dtype=np.int64)
    for i in range(dim):
        cells[:, i] = rng.permutation(n)
    nums = (cells << FRAC_BITS) + (1 << (FRAC_BITS - 1))  # exact midpoint 1/2
    return PointSet(nums, spec, rng.seed)


def rank1_lattice_points(g, n: int) -> PointSet:
    """The rank-1 lattice {0, g, 2g, ...} mod 1 in index order.

    g is a vector of field integers in {1,..,n-1} (the unit-interval
    generator is g/n).  This is the deterministic building block; sampling
    entry points additionally randomize and permute.
    """
    _check_n(n)
    if not is_prime(n):
        raise ValueError(f"N must be prime for a rank-1 lattice (got {n})")
    g = tuple(int(v) for v in g)
    if any(not 1 <= v < n for v in g):
        raise ValueError("degenerate generator: coordinates must be nonzero mod N")
    spec = SchemeSpec("rsj_lattice", n, len(g), generator=g, shift="none", jitter=False)
    idx = np.arange(n, dtype=np.int64).reshape(n, 1)
    cells = (idx * np.array(g, dtype=np.int64)) % n
    return PointSet(cells << FRAC_BITS, spec, 0)


def rsj_cell_matrix(g, shift_cells, n: int) -> np.ndarray:
    """Cell indices of the shifted lattice, row m = cells of point m.

    Pure function of (generator, grid shift); used by the sampler and by
    exhaustive structural tests.
    """
    g = np.asarray(g, dtype=np.int64)
    s = np.asarray(shift_cells, dtype=np.int64)
    idx = np.arange(n, dtype=np.int64).reshape(n, 1)
    return (idx * g + s) % n


def rsj_rank1(spec: SchemeSpec, rng: RngStream) -> PointSet:
    """Randomized rank-1 lattice sample under the given spec.

    Full scheme: generator uniform on {1,..,n-1}^d, shift uniform on the
    1/n grid, uniform point permutation, iid jitter on [0,1/n)^d.
    Ablations: shift="none" drops the shift, shift="continuous_torus"
    draws it uniform on [0,1)^d, jitter=False pins points to cell corners,
    generator=fixed uses the given vector.
    """
    if spec.kind != "rsj_lattice":
        raise ValueError(f"rsj_rank1 needs an rsj_lattice spec, got {spec.kind!r}")
    n, dim = spec.n, spec.dim
    _check_n(n)

    if spec.generator == "random":
        g = [rng.integer(n - 1) + 1 for _ in range(dim)]
    else:
        g = list(spec.generator)

    shift_frac = np.zeros(dim, dtype=np.int64)
    if spec.shift == "grid":
        s = [rng.integer(n) for _ in range(dim)]
    elif spec.shift == "continuous_torus":
        # uniform on [0,1) per coordinate, drawn as cell part plus 53-bit part
        s = []
        for i in range(dim):
            s.append(rng.integer(n))
            shift_frac[i] = rng.bits53()
    else:
        s = [0] * dim

    perm = np.array(rng.permutation(n), dtype=np.int64)
    jit = _jitter_block(rng, n, dim) if spec.jitter else np.zeros((n, dim), dtype=np.int64)

    base = rsj_cell_matrix(g, s, n)
    cells = base[perm, :]
    nums = ((cells << FRAC_BITS) + shift_frac + jit) % (n * _FRAC_ONE)
    return PointSet(nums, spec, rng.seed)


def generate(spec: SchemeSpec, seed: int) -> PointSet:
    """Generate the point set for (spec, seed); bit-identical on replay."""
    rng = RngStream(seed)
    if spec.kind == "stratified1d":
        return stratified_1d(spec.n, rng)
    if spec.kind == "lhs":
        return lhs(spec.n, spec.dim, rng)
    if spec.kind == "patterson":
        return patterson(spec.n, spec.dim, rng)
    return rsj_rank1(spec, rng)


# -- export / import --------------------------------------------------------


def point_set_to_csv(ps: PointSet) -> str:
    """CSV with metadata comment lines and one float row per point."""
    d = spec_to_dict(ps.spec)
    gen = d["generator"]
    gen_str = gen if isinstance(gen, str) else ",".join(str(v) for v in gen)
    buf = io.StringIO()
    buf.write(f"# scheme={d['kind']}, n={d['n']}, dim={d['dim']}, seed={ps.seed}\n")
    buf.write(f"# generator={gen_str}, shift={d['shift']}, jitter={d['jitter']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in ps.floats():
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def point_set_to_json(ps: PointSet) -> str:
    payload = {
        "spec": spec_to_dict(ps.spec),
        "seed": ps.seed,
        "frac_bits": FRAC_BITS,
        "nums": [[int(v) for v in row] for row in ps.nums],
        "points": [[float(v) for v in row] for row in ps.floats()],
    }
    return json.dumps(payload, sort_keys=True, indent=1)


def _validate_structure(ps: PointSet) -> None:
    cells = ps.cells()
    if ps.spec.kind in ("lhs", "patterson"):
        for i in range(ps.dim):
            if sorted(cells[:, i].tolist()) != list(range(ps.n)):
                raise ValueError("latin property violated: a stratum is hit twice")
    if ps.spec.kind == "stratified1d":
        if sorted(cells[:, 0].tolist()) != list(range(ps.n)):
            raise ValueError("stratification violated: a stratum is hit twice")
    if (
        ps.spec.kind == "rsj_lattice"
        and not ps.spec.jitter
        and ps.spec.shift in ("grid", "none")
    ):
        if np.any(ps.offsets() != 0):
            raise ValueError("jitterless grid scheme has off-grid coordinates")


def point_set_from_json(text: str) -> PointSet:
    payload = json.loads(text)
    if payload.get("frac_bits") != FRAC_BITS:
        raise ValueError("unsupported coordinate resolution")
    spec = spec_from_dict(payload["spec"])
    ps = PointSet(np.array(payload["nums"], dtype=np.int64), spec, payload["seed"])
    _validate_structure(ps)
    return ps


def point_set_from_csv(text: str):
    """Parse the float CSV export; returns (metadata dict, float array).

    The CSV carries floats only, so this is a lossy view: ranges and shape
    are validated, exact invariants are not recoverable.
    """
    meta = {}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            for part in line[1:].split(","):
                if "=" in part:
                    k, v = part.split("=", 1)
                    meta[k.strip()] = v.strip()
            continue
        rows.append([float(v) for v in line.split(",")])
    pts = np.array(rows, dtype=np.float64)
    if pts.size and (pts.min() < 0 or pts.max() >= 1):
        raise ValueError("coordinates outside [0, 1)")
    if "n" in meta and pts.shape[0] != int(meta["n"]):
        raise ValueError("row count does not match n in header")
    if "dim" in meta and pts.shape[1] != int(meta["dim"]):
        raise ValueError("column count does not match dim in header")
    return meta, pts
