"""Generalised delta-norms on function tables over a finite metric space.

A :class:`DeltaNormSpec` turns a kernel ``delta(x, y, f(x), f(y))`` and a set
of ordered point pairs into a sup- or inf-type norm on tables; the Lipschitz
and Hoelder norms are the built-in instances. The vector-valued kernel
``delta_tilde`` (when present) feeds the "attainment towards a point"
detectors, where orientation of the pair matters because the kernel is
antisymmetric even though the induced scalar kernel is symmetric.

Pair domains consist of ordered pairs; extremal pairs are reported with
lexicographic tie-breaking over (index of x, index of y) so certificates are
reproducible. Everything here is pure and immutable after construction;
evaluation over the pair domain is safe to parallelise with a deterministic
reduction order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    NormedSpaceInstance,
    Tolerance,
    TAIL_DECLARED,
    TAG_EXACT,
    LimsupEstimate,
    WitnessSequence,
    limsup_estimate,
    verify_norm_axioms,
    worst_tag,
)
from .errors import CheckFailure

MODE_SUP = "sup"
MODE_INF = "inf"


# ---------------------------------------------------------------------------
# Finite metric spaces and function tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Finite metric space given by a point list and a distance matrix."""

    points: tuple
    dist: np.ndarray
    base_point: object = None

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        d = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", d)
        n = len(pts)
        if n < 1 or d.shape != (n, n):
            raise CheckFailure("bad_metric", "distance matrix shape mismatch")
        if len(set(pts)) != n:
            raise CheckFailure("bad_metric", "duplicate point identifiers")
        tol = DEFAULT_TOL
        if np.any(np.abs(np.diag(d)) > 0):
            raise CheckFailure("bad_metric", "nonzero diagonal")
        if np.max(np.abs(d - d.T)) > tol.eps(float(np.max(d, initial=0.0))):
            raise CheckFailure("bad_metric", "asymmetric distances")
        off = d[~np.eye(n, dtype=bool)]
        if off.size and np.min(off) <= 0:
            raise CheckFailure("bad_metric", "nonpositive off-diagonal distance")
        eps = tol.eps(float(np.max(d, initial=0.0)))
        for k in range(n):
            if np.any(d > d[:, [k]] + d[[k], :] + eps):
                raise CheckFailure("bad_metric", "triangle inequality fails")
        if self.base_point is not None and self.base_point not in pts:
            raise CheckFailure("bad_metric", "base point not among points")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    @property
    def n_points(self) -> int:
        return len(self.points)

    def index(self, point) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise CheckFailure("bad_metric", f"unknown point {point!r}") from None

    def distance(self, a, b) -> float:
        return float(self.dist[self.index(a), self.index(b)])

    def ordered_pairs(self) -> tuple:
        n = self.n_points
        return tuple((i, j) for i in range(n) for j in range(n) if i != j)

    @classmethod
    def from_coordinates(cls, coords, base_point=None, points=None) -> "FiniteMetricSpace":
        """Metric space of points in R^k under the Euclidean distance."""
        arr = np.atleast_2d(np.asarray(coords, dtype=float))
        if arr.shape[0] == 1 and arr.shape[1] > 1 and np.ndim(coords) == 1:
            arr = arr.T
        diffs = arr[:, None, :] - arr[None, :, :]
        d = np.sqrt(np.sum(diffs * diffs, axis=2))
        pts = tuple(points) if points is not None else tuple(range(arr.shape[0]))
        return cls(points=pts, dist=d, base_point=base_point)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A map from a finite metric space into a normed target space.

    Values are stored as a ``(n_points, target.dim)`` array aligned with the
    domain's point order. Tables support the linear operations needed to
    build witness sequences.
    """

    domain: FiniteMetricSpace
    target: NormedSpaceInstance
    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.shape == (1, self.domain.n_points) and self.target.dim == 1:
            vals = vals.T
        if vals.shape != (self.domain.n_points, self.target.dim):
            raise CheckFailure(
                "dim_mismatch",
                f"values shape {vals.shape} does not match "
                f"({self.domain.n_points}, {self.target.dim})",
            )
        object.__setattr__(self, "values", vals)

    def value(self, point) -> np.ndarray:
        return self.values[self.domain.index(point)]

    def _check_compatible(self, other: "FunctionTable"):
        if self.domain is not other.domain and (
            self.domain.points != other.domain.points
            or not np.array_equal(self.domain.dist, other.domain.dist)
        ):
            raise CheckFailure("dim_mismatch", "tables live on different domains")
        if self.target.dim != other.target.dim:
            raise CheckFailure("dim_mismatch", "tables have different targets")

    def __add__(self, other: "FunctionTable") -> "FunctionTable":
        self._check_compatible(other)
        return FunctionTable(self.domain, self.target, self.values + other.values)

    def __sub__(self, other: "FunctionTable") -> "FunctionTable":
        self._check_compatible(other)
        return FunctionTable(self.domain, self.target, self.values - other.values)

    def __mul__(self, scalar) -> "FunctionTable":
        return FunctionTable(self.domain, self.target, float(scalar) * self.values)

    __rmul__ = __mul__

    @classmethod
    def from_mapping(cls, domain, target, mapping: dict) -> "FunctionTable":
        rows = [mapping[p] for p in domain.points]
        return cls(domain, target, np.array([np.atleast_1d(r) for r in rows], dtype=float))


# ---------------------------------------------------------------------------
# Delta-norm specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DeltaNormSpec:
    """Kernel + pair domain + sup/inf mode defining a norm on tables.

    ``delta`` maps ``(x, y, vx, vy)`` (point identifiers and their images) to
    a nonnegative real; ``delta_tilde`` is the optional vector-valued kernel
    whose target norm recovers ``delta``. ``pair_domain`` holds index pairs,
    kept in lexicographic order.
    """

    pair_domain: tuple
    mode: str
    delta: Callable
    delta_tilde: Optional[Callable]
    target: NormedSpaceInstance
    label: str = ""
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(j)) for (i, j) in self.pair_domain))
        if not pairs:
            raise CheckFailure("empty_domain", "pair domain must be nonempty")
        object.__setattr__(self, "pair_domain", pairs)
        if self.mode not in (MODE_SUP, MODE_INF):
            raise CheckFailure("bad_mode", f"unknown mode {self.mode!r}")
        object.__setattr__(self, "_pair_set", frozenset(pairs))

    def contains_pair(self, idx_pair) -> bool:
        return (int(idx_pair[0]), int(idx_pair[1])) in self._pair_set

    def restrict(self, pairs) -> "DeltaNormSpec":
        """Same kernel over a sub-domain of pairs."""
        sub = tuple(sorted(set(pairs)))
        for p in sub:
            if p not in self._pair_set:
                raise CheckFailure("pair_outside_domain", f"{p} not in domain")
        return DeltaNormSpec(sub, self.mode, self.delta, self.delta_tilde,
                             self.target, self.label + "|restricted", self.kind,
                             dict(self.params))


def _quotient_kernels(s1: FiniteMetricSpace, s2: NormedSpaceInstance, beta: float):
    denom = {}
    for (i, j) in s1.ordered_pairs():
        d = float(s1.dist[i, j])
        denom[(i, j)] = d if beta == 1 else d ** beta

    def delta_tilde(x, y, vx, vy, _s1=s1, _denom=denom):
        i, j = _s1.index(x), _s1.index(y)
        return (np.asarray(vx, dtype=float) - np.asarray(vy, dtype=float)) / _denom[(i, j)]

    def delta(x, y, vx, vy, _dt=delta_tilde, _s2=s2):
        return float(_s2.norm(_dt(x, y, vx, vy)))

    return delta, delta_tilde, denom


def make_lip0_spec(s1: FiniteMetricSpace, s2: NormedSpaceInstance) -> DeltaNormSpec:
    """Difference-quotient kernel over all ordered pairs of distinct points."""
    if s1.n_points < 2:
        raise CheckFailure("empty_domain", "need at least 2 points")
    delta, delta_tilde, denom = _quotient_kernels(s1, s2, 1.0)
    return DeltaNormSpec(
        pair_domain=s1.ordered_pairs(), mode=MODE_SUP, delta=delta,
        delta_tilde=delta_tilde, target=s2, label="lip0", kind="lip0",
        params={"beta": 1.0, "denom": denom},
    )


def make_holder_spec(s1: FiniteMetricSpace, s2: NormedSpaceInstance,
                     beta: float) -> DeltaNormSpec:
    """Hoelder variant: difference quotients against ``d(x, y)**beta``."""
    if not beta > 0:
        raise CheckFailure("bad_exponent", "beta must be positive")
    if s1.n_points < 2:
        raise CheckFailure("empty_domain", "need at least 2 points")
    delta, delta_tilde, denom = _quotient_kernels(s1, s2, float(beta))
    return DeltaNormSpec(
        pair_domain=s1.ordered_pairs(), mode=MODE_SUP, delta=delta,
        delta_tilde=delta_tilde, target=s2, label=f"holder({beta})", kind="holder",
        params={"beta": float(beta), "denom": denom},
    )


def verify_delta_consistency(spec: DeltaNormSpec, s1: FiniteMetricSpace,
                             samples: int = 1000, seed: int = 0,
                             tol: Tolerance = DEFAULT_TOL) -> float:
    """Worst deviation of ``delta`` from the target norm of ``delta_tilde``.

    Only meaningful when the spec carries the vector-valued kernel.
    """
    if spec.delta_tilde is None:
        raise CheckFailure("no_delta_tilde", "spec has no vector-valued kernel")
    rng = np.random.default_rng(seed)
    pairs = spec.pair_domain
    worst = 0.0
    for _ in range(samples):
        i, j = pairs[rng.integers(len(pairs))]
        x, y = s1.points[i], s1.points[j]
        vx = rng.standard_normal(spec.target.dim) * 2.0
        vy = rng.standard_normal(spec.target.dim) * 2.0
        a = float(spec.delta(x, y, vx, vy))
        b = float(spec.target.norm(np.asarray(spec.delta_tilde(x, y, vx, vy), dtype=float)))
        worst = max(worst, abs(a - b))
    return worst


# ---------------------------------------------------------------------------
# Delta-normed spaces
# ---------------------------------------------------------------------------

class DeltaNormedSpace:
    """Space of function tables normed by a delta-norm spec.

    Membership constraints: tables must live on the space's domain/target,
    and when ``require_base_zero`` is set the table must vanish exactly at
    the domain's base point. At construction the induced map is checked
    against the norm axioms on random member tables; failures downgrade the
    space's ``status`` to ``"seminorm-like"`` (attainment checks still run).
    """

    def __init__(self, domain: FiniteMetricSpace, target: NormedSpaceInstance,
                 spec: DeltaNormSpec, require_base_zero: bool = True, label: str = "",
                 validate_samples: int = 32, seed: int = 0,
                 tol: Tolerance = DEFAULT_TOL):
        self.domain = domain
        self.target = target
        self.spec = spec
        self.require_base_zero = bool(require_base_zero and domain.base_point is not None)
        self.label = label or spec.label
        self.status = "unvalidated"
        if validate_samples > 0:
            report = self.verify_table_norm_axioms(validate_samples, seed, tol)
            self.status = "norm" if report.all_pass else "seminorm-like"

    # -- membership ---------------------------------------------------------

    def contains(self, f: FunctionTable) -> bool:
        try:
            self.require_member(f)
            return True
        except CheckFailure:
            return False

    def require_member(self, f: FunctionTable):
        if f.domain is not self.domain and (
            f.domain.points != self.domain.points
            or not np.array_equal(f.domain.dist, self.domain.dist)
        ):
            raise CheckFailure("not_member", "table domain differs from space domain")
        if f.target.dim != self.target.dim:
            raise CheckFailure("not_member", "table target dim differs")
        if self.require_base_zero:
            base = f.values[self.domain.index(self.domain.base_point)]
            if np.any(base != 0.0):
                raise CheckFailure("not_member", "table does not vanish at base point")

    def random_member(self, rng, scale: float = 2.0) -> FunctionTable:
        vals = rng.standard_normal((self.domain.n_points, self.target.dim)) * scale
        if self.require_base_zero:
            vals[self.domain.index(self.domain.base_point)] = 0.0
        return FunctionTable(self.domain, self.target, vals)

    def verify_table_norm_axioms(self, samples: int = 32, seed: int = 0,
                                 tol: Tolerance = DEFAULT_TOL):
        """Run the norm-axiom battery on the induced table norm.

        Probes are drawn from the member subspace: when the base-point
        constraint is active, only the free coordinates are sampled.
        """
        base_idx = (self.domain.index(self.domain.base_point)
                    if self.require_base_zero else None)
        rows = [i for i in range(self.domain.n_points) if i != base_idx]
        flat_dim = len(rows) * self.target.dim

        def flat_norm(v):
            vals = np.zeros((self.domain.n_points, self.target.dim))
            vals[rows] = np.asarray(v, dtype=float).reshape(len(rows), self.target.dim)
            return delta_norm(self, FunctionTable(self.domain, self.target, vals),
                              _skip_membership=True).value

        from .core import custom_space  # local import to avoid cycle at module load
        probe_space = custom_space(flat_dim, flat_norm, label=self.label + "|flat")
        return verify_norm_axioms(probe_space, samples=max(samples, 8), seed=seed, tol=tol)


@dataclass(frozen=True)
class DeltaNormValue:
    value: float
    pair: tuple          # point identifiers (x, y)
    pair_index: tuple    # index pair into the domain

    def __float__(self):
        return self.value


def _vectorized_delta_values(space: DeltaNormedSpace, f: FunctionTable) -> np.ndarray:
    spec = space.spec
    pairs = np.asarray(spec.pair_domain, dtype=int)
    diffs = f.values[pairs[:, 0]] - f.values[pairs[:, 1]]
    denom = np.array([spec.params["denom"][tuple(p)] for p in map(tuple, pairs)])
    return spec.target.norm_rows(diffs) / denom


def delta_norm(space: DeltaNormedSpace, f: FunctionTable,
               _skip_membership: bool = False) -> DeltaNormValue:
    """Sup (or inf) of the kernel over the pair domain, with its extremal pair.

    Exact because the pair domain is finite; ties break lexicographically on
    (index of x, index of y).
    """
    if not _skip_membership:
        space.require_member(f)
    spec = space.spec
    if not spec.pair_domain:
        raise CheckFailure("empty_domain", "pair domain is empty")
    if spec.kind in ("lip0", "holder") and spec.target.norm_kind in (
            "euclidean", "p_norm", "weighted_p", "piecewise_linear"):
        vals = _vectorized_delta_values(space, f)
    else:
        pts = space.domain.points
        vals = np.array([
            float(spec.delta(pts[i], pts[j], f.values[i], f.values[j]))
            for (i, j) in spec.pair_domain
        ])
    idx = int(np.argmax(vals)) if spec.mode == MODE_SUP else int(np.argmin(vals))
    i, j = spec.pair_domain[idx]
    return DeltaNormValue(float(vals[idx]),
                          (space.domain.points[i], space.domain.points[j]), (i, j))


def make_lip0_space(s1: FiniteMetricSpace, s2: NormedSpaceInstance,
                    validate_samples: int = 32, seed: int = 0) -> DeltaNormedSpace:
    return DeltaNormedSpace(s1, s2, make_lip0_spec(s1, s2),
                            validate_samples=validate_samples, seed=seed)


def make_holder_space(s1: FiniteMetricSpace, s2: NormedSpaceInstance, beta: float,
                      validate_samples: int = 32, seed: int = 0) -> DeltaNormedSpace:
    return DeltaNormedSpace(s1, s2, make_holder_spec(s1, s2, beta),
                            validate_samples=validate_samples, seed=seed)


# ---------------------------------------------------------------------------
# Attainment detectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AttainmentResult:
    attained: bool
    residual: float
    tag: str
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.attained

    def to_dict(self) -> dict:
        return {"attained": self.attained, "residual": self.residual, "tag": self.tag,
                **{k: v for k, v in self.details.items() if np.isscalar(v)}}


def _resolve_pair(space: DeltaNormedSpace, pair) -> tuple:
    i, j = space.domain.index(pair[0]), space.domain.index(pair[1])
    if not space.spec.contains_pair((i, j)):
        raise CheckFailure("pair_outside_domain", f"pair {pair!r} not in the domain set")
    return i, j


def kernel_at(space: DeltaNormedSpace, f: FunctionTable, pair) -> float:
    """Scalar kernel value at one ordered pair."""
    i, j = _resolve_pair(space, pair)
    pts = space.domain.points
    return float(space.spec.delta(pts[i], pts[j], f.values[i], f.values[j]))


def vector_kernel_at(space: DeltaNormedSpace, f: FunctionTable, pair) -> np.ndarray:
    """Vector-valued kernel value at one ordered pair."""
    if space.spec.delta_tilde is None:
        raise CheckFailure("no_delta_tilde", "spec has no vector-valued kernel")
    i, j = _resolve_pair(space, pair)
    pts = space.domain.points
    return np.asarray(space.spec.delta_tilde(pts[i], pts[j], f.values[i], f.values[j]),
                      dtype=float)


def strong_attainment(space: DeltaNormedSpace, f: FunctionTable, pair,
                      tol: Tolerance = DEFAULT_TOL) -> AttainmentResult:
    """Does the table's norm equal the kernel value at this specific pair?"""
    norm_val = delta_norm(space, f)
    k = kernel_at(space, f, pair)
    residual = abs(norm_val.value - k)
    return AttainmentResult(
        residual <= tol.eps(norm_val.value, k), residual, TAG_EXACT,
        {"norm": norm_val.value, "kernel": k, "pair": tuple(pair)},
    )


def _norm_sequence(space: DeltaNormedSpace, seq: WitnessSequence) -> WitnessSequence:
    for el in seq.prefix:
        space.require_member(el)
    if seq.tail_mode == TAIL_DECLARED:
        space.require_member(seq.limit)
    return seq.map_scalar(lambda g: delta_norm(space, g).value)


def weak_attainment(x_space: DeltaNormedSpace, y_space: DeltaNormedSpace,
                    f: FunctionTable, pair, seq: WitnessSequence,
                    tol: Tolerance = DEFAULT_TOL) -> AttainmentResult:
    """Y-norms along the witness converge to the X-kernel value at ``pair``."""
    target_val = kernel_at(x_space, f, pair)
    norms = _norm_sequence(y_space, seq)
    gap = norms.map_scalar(lambda n: abs(float(n) - target_val))
    est = limsup_estimate(gap, tol)
    return AttainmentResult(
        tol.close(est.value, 0.0), est.value, est.tag,
        {"kernel": target_val, "pair": tuple(pair)},
    )


def _pair_gap_sequence(space: DeltaNormedSpace, f: FunctionTable, z: np.ndarray,
                       pair_seq: WitnessSequence) -> WitnessSequence:
    """Scalar sequence ``|| delta_tilde(pair_k) - z ||`` along a pair sequence.

    On a finite pair set a declared limit pair means the tail is eventually
    that pair, so mapping the limit through the kernel is exact.
    """
    def gap(pair):
        vec = vector_kernel_at(space, f, pair)
        return float(space.target.norm(vec - z))

    for p in pair_seq.prefix:
        _resolve_pair(space, p)
    if pair_seq.tail_mode == TAIL_DECLARED:
        _resolve_pair(space, pair_seq.limit)
    return pair_seq.map_scalar(gap)


def towards_point_attainment(space: DeltaNormedSpace, f: FunctionTable, z,
                             pair_seq: WitnessSequence,
                             tol: Tolerance = DEFAULT_TOL) -> AttainmentResult:
    """Vector kernel converges to ``z`` along the pairs and ``||f|| = ||z||``."""
    z_vec = space.target.check_vector(z)
    gaps = _pair_gap_sequence(space, f, z_vec, pair_seq)
    est = limsup_estimate(gaps, tol)
    norm_f = delta_norm(space, f).value
    norm_z = float(space.target.norm(z_vec))
    norm_ok = tol.close(norm_f, norm_z)
    return AttainmentResult(
        tol.close(est.value, 0.0) and norm_ok,
        max(est.value, abs(norm_f - norm_z)), est.tag,
        {"norm": norm_f, "z_norm": norm_z},
    )


def weak_towards_point_attainment(x_space: DeltaNormedSpace, y_space: DeltaNormedSpace,
                                  f: FunctionTable, z, pair_seq: WitnessSequence,
                                  fn_seq: WitnessSequence,
                                  tol: Tolerance = DEFAULT_TOL) -> AttainmentResult:
    """Vector kernel tends to ``z`` along pairs and Y-norms tend to ``||z||``.

    No clause relating ``||f||_X`` to ``||z||`` here; that distinguishes the
    weak variant from :func:`towards_point_attainment`.
    """
    z_vec = x_space.target.check_vector(z)
    gaps = _pair_gap_sequence(x_space, f, z_vec, pair_seq)
    kernel_est = limsup_estimate(gaps, tol)
    norm_z = float(x_space.target.norm(z_vec))
    norms = _norm_sequence(y_space, fn_seq)
    norm_gap = norms.map_scalar(lambda n: abs(float(n) - norm_z))
    norm_est = limsup_estimate(norm_gap, tol)
    ok = tol.close(kernel_est.value, 0.0) and tol.close(norm_est.value, 0.0)
    return AttainmentResult(
        ok, max(kernel_est.value, norm_est.value),
        worst_tag(kernel_est.tag, norm_est.tag),
        {"z_norm": norm_z},
    )
