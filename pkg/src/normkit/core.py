"""Finite-dimensional normed-space substrate.

Vectors are 1-d numpy arrays. A :class:`NormedSpaceInstance` bundles an
evaluable norm with a finite generating set of dual functionals; in finite
dimension pointwise convergence of a spanning family of functionals is
equivalent to weak convergence, which makes the weak-convergence and Schur
checks below exact (up to tolerance) rather than heuristic.

Sequences are represented by :class:`WitnessSequence`: a finite prefix plus a
declared tail mode. Tail behaviour of an infinite sequence is not decidable
from a finite prefix, so every estimate derived from a sequence carries a
confidence tag (``exact``, ``declared``, ``heuristic``, ``inconsistent``)
that propagates into downstream verdicts.

All operations are pure and deterministic given (inputs, seed); instances
are immutable after construction and safe for concurrent read-only use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CheckFailure

# Confidence tags, ordered from strongest to weakest.
TAG_EXACT = "exact"
TAG_DECLARED = "declared"
TAG_HEURISTIC = "heuristic"
TAG_INCONSISTENT = "inconsistent"

_TAG_ORDER = {TAG_EXACT: 0, TAG_DECLARED: 1, TAG_HEURISTIC: 2, TAG_INCONSISTENT: 3}

# Tail modes for WitnessSequence.
TAIL_CONSTANT = "constant_after_prefix"
TAIL_DECLARED = "declared_limit"
TAIL_UNRESOLVED = "unresolved"


def worst_tag(*tags: str) -> str:
    """Combine confidence tags; the weakest one wins."""
    return max(tags, key=lambda t: _TAG_ORDER[t])


@dataclass(frozen=True)
class Tolerance:
    """Uniform numeric comparison contract.

    Two reals compare equal when ``|a - b| <= abs + rel * max(1, |a|, |b|)``.
    """

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        if not (math.isfinite(self.rel) and math.isfinite(self.abs)):
            raise CheckFailure("bad_tolerance", "rel/abs must be finite")
        if self.rel < 0 or self.abs < 0:
            raise CheckFailure("bad_tolerance", "rel/abs must be nonnegative")

    def eps(self, *values: float) -> float:
        scale = 1.0
        for v in values:
            a = abs(float(v))
            if math.isfinite(a) and a > scale:
                scale = a
        return self.abs + self.rel * scale

    def close(self, a: float, b: float) -> bool:
        return abs(float(a) - float(b)) <= self.eps(a, b)

    def leq(self, a: float, b: float) -> bool:
        return float(a) <= float(b) + self.eps(a, b)


DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# Normed spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NormedSpaceInstance:
    """A finite-dimensional real vector space with an evaluable norm.

    ``dual_generators`` rows are linear functionals (applied as ``row @ v``)
    whose pointwise convergence characterises weak convergence; they must
    span the dual space, which is rank-checked at construction.
    """

    dim: int
    norm: Callable[[np.ndarray], float]
    norm_kind: str
    dual_generators: np.ndarray
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise CheckFailure("bad_space", "dim must be a positive integer")
        gens = np.atleast_2d(np.asarray(self.dual_generators, dtype=float))
        object.__setattr__(self, "dual_generators", gens)
        if gens.shape[1] != self.dim:
            raise CheckFailure("dim_mismatch", "dual generators have wrong width")
        if np.linalg.matrix_rank(gens) < self.dim:
            raise CheckFailure("bad_space", "dual generators do not span the dual")

    def check_vector(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.dim:
            raise CheckFailure(
                "dim_mismatch",
                f"expected vector of dim {self.dim}, got shape {arr.shape}",
            )
        return arr

    def norm_rows(self, mat: np.ndarray) -> np.ndarray:
        """Norms of each row of ``mat``; vectorised for the built-in kinds."""
        mat = np.atleast_2d(np.asarray(mat, dtype=float))
        kind = self.norm_kind
        if kind == "euclidean":
            return np.sqrt(np.sum(mat * mat, axis=1))
        if kind in ("p_norm", "weighted_p"):
            p = self.params["p"]
            w = self.params.get("weights")
            a = np.abs(mat) if w is None else np.abs(mat) * np.asarray(w, dtype=float)
            if p == math.inf:
                return np.max(a, axis=1)
            return np.sum(a ** p, axis=1) ** (1.0 / p)
        if kind == "piecewise_linear":
            rows = self.params["rows"]
            return np.max(np.abs(mat @ np.asarray(rows, dtype=float).T), axis=1)
        return np.array([float(self.norm(row)) for row in mat])

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "norm_kind": self.norm_kind, "label": self.label}
        for key in ("p", "weights", "rows"):
            if key in self.params:
                val = self.params[key]
                out[key] = val.tolist() if isinstance(val, np.ndarray) else val
        return out


def _coordinate_functionals(dim: int) -> np.ndarray:
    return np.eye(dim)


def euclidean_space(dim: int, label: str = "") -> NormedSpaceInstance:
    return NormedSpaceInstance(
        dim=dim,
        norm=lambda v: float(np.linalg.norm(np.asarray(v, dtype=float))),
        norm_kind="euclidean",
        dual_generators=_coordinate_functionals(dim),
        label=label or f"R^{dim} l2",
        params={"p": 2.0},
    )


def p_norm_space(dim: int, p: float, label: str = "") -> NormedSpaceInstance:
    if p == 2:
        return euclidean_space(dim, label)
    if not (p >= 1):
        raise CheckFailure("bad_exponent", "p must lie in [1, inf]")

    if p == math.inf:
        fn = lambda v: float(np.max(np.abs(np.asarray(v, dtype=float))))
    else:
        fn = lambda v: float(np.sum(np.abs(np.asarray(v, dtype=float)) ** p) ** (1.0 / p))
    return NormedSpaceInstance(
        dim=dim,
        norm=fn,
        norm_kind="p_norm",
        dual_generators=_coordinate_functionals(dim),
        label=label or f"R^{dim} l{p}",
        params={"p": float(p)},
    )


def weighted_p_space(dim: int, weights, p: float, label: str = "") -> NormedSpaceInstance:
    w = np.asarray(weights, dtype=float)
    if w.shape != (dim,) or np.any(w <= 0):
        raise CheckFailure("bad_space", "weights must be positive and match dim")
    if not (p >= 1):
        raise CheckFailure("bad_exponent", "p must lie in [1, inf]")

    if p == math.inf:
        fn = lambda v: float(np.max(w * np.abs(np.asarray(v, dtype=float))))
    else:
        fn = lambda v: float(np.sum(w * np.abs(np.asarray(v, dtype=float)) ** p) ** (1.0 / p))
    return NormedSpaceInstance(
        dim=dim,
        norm=fn,
        norm_kind="weighted_p",
        dual_generators=_coordinate_functionals(dim),
        label=label or f"R^{dim} weighted l{p}",
        params={"p": float(p), "weights": w},
    )


def piecewise_linear_space(rows, label: str = "") -> NormedSpaceInstance:
    """Norm given by ``max_i |row_i . v|``; rows must have full column rank."""
    mat = np.atleast_2d(np.asarray(rows, dtype=float))
    dim = mat.shape[1]
    if np.linalg.matrix_rank(mat) < dim:
        raise CheckFailure("bad_space", "generator rows are rank deficient (seminorm)")
    return NormedSpaceInstance(
        dim=dim,
        norm=lambda v: float(np.max(np.abs(mat @ np.asarray(v, dtype=float)))),
        norm_kind="piecewise_linear",
        dual_generators=mat,
        label=label or f"R^{dim} generator-form",
        params={"rows": mat},
    )


def custom_space(dim: int, fn: Callable[[np.ndarray], float], label: str = "",
                 dual_generators=None) -> NormedSpaceInstance:
    gens = _coordinate_functionals(dim) if dual_generators is None else dual_generators
    return NormedSpaceInstance(
        dim=dim, norm=fn, norm_kind="custom", dual_generators=gens, label=label
    )


def eval_norm(space: NormedSpaceInstance, v) -> float:
    """Evaluate ``space``'s norm at ``v`` (dimension checked)."""
    return float(space.norm(space.check_vector(v)))


# ---------------------------------------------------------------------------
# Norm axiom verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    worst_violation: float
    witness: Optional[tuple] = None


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "axioms": {
                c.name: {"passed": c.passed, "worst_violation": c.worst_violation}
                for c in self.checks
            },
        }


def _axiom_probes(dim: int, samples: int, seed: int) -> np.ndarray:
    """Structured probes (axis and axis-pair vectors) plus seeded random ones.

    The structured probes catch degenerate 'norms' that vanish off a generic
    direction (random Gaussian samples almost never hit coordinate axes).
    """
    rng = np.random.default_rng(seed)
    probes = []
    eye = np.eye(dim)
    for i in range(dim):
        probes.append(eye[i])
        probes.append(-eye[i])
        for j in range(i + 1, dim):
            probes.append(eye[i] + eye[j])
            probes.append(eye[i] - eye[j])
    scales = np.array([0.1, 1.0, 10.0])
    n_random = max(0, samples - len(probes))
    rand = rng.standard_normal((n_random, dim))
    rand *= scales[np.arange(n_random) % 3][:, None]
    return np.vstack([probes, rand]) if n_random else np.array(probes)


def verify_norm_axioms(space: NormedSpaceInstance, samples: int = 1000,
                       seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    """Sampled check of the norm axioms; failures are report content.

    Checked on structured + seeded random probes: value 0 at the zero vector
    (exact, no tolerance), nonnegativity, definiteness on nonzero probes,
    absolute homogeneity and the triangle inequality.
    """
    if samples < 1:
        raise CheckFailure("bad_argument", "samples must be >= 1")
    probes = _axiom_probes(space.dim, samples, seed)
    rng = np.random.default_rng(seed + 1)
    norms = np.array([float(space.norm(v)) for v in probes])

    zero_val = float(space.norm(np.zeros(space.dim)))
    zero = AxiomCheck("zero_at_zero", zero_val == 0.0, abs(zero_val))

    neg_idx = int(np.argmin(norms))
    nonneg = AxiomCheck(
        "nonnegativity", bool(norms[neg_idx] >= 0.0),
        max(0.0, -float(norms[neg_idx])), tuple(probes[neg_idx]),
    )

    nonzero_mask = np.max(np.abs(probes), axis=1) > 0
    defin_worst, defin_wit = math.inf, None
    for v, n in zip(probes[nonzero_mask], norms[nonzero_mask]):
        if n < defin_worst:
            defin_worst, defin_wit = n, tuple(v)
    definite = AxiomCheck(
        "definiteness", defin_worst > tol.abs, float(defin_worst), defin_wit
    )

    scalars = np.concatenate([[-2.5, -1.0, -0.5, 0.0, 0.5, 3.0],
                              rng.uniform(-5, 5, size=8)])
    hom_worst, hom_wit = 0.0, None
    for v, n in zip(probes[:200], norms[:200]):
        for a in scalars:
            lhs = float(space.norm(a * v))
            rhs = abs(a) * n
            dev = abs(lhs - rhs) - tol.eps(lhs, rhs)
            if dev > hom_worst:
                hom_worst, hom_wit = dev, (float(a), tuple(v))
    homogeneity = AxiomCheck("homogeneity", hom_worst <= 0.0, max(0.0, hom_worst), hom_wit)

    tri_worst, tri_wit = 0.0, None
    half = len(probes) // 2
    for u, v in zip(probes[:half], probes[half:2 * half]):
        lhs = float(space.norm(u + v))
        bound = float(space.norm(u)) + float(space.norm(v))
        dev = lhs - bound - tol.eps(lhs, bound)
        if dev > tri_worst:
            tri_worst, tri_wit = dev, (tuple(u), tuple(v))
    triangle = AxiomCheck("triangle", tri_worst <= 0.0, max(0.0, tri_worst), tri_wit)

    return AxiomReport(checks=(zero, nonneg, definite, homogeneity, triangle))


# ---------------------------------------------------------------------------
# Witness sequences and tail estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WitnessSequence:
    """Finite prefix of a sequence plus a declared tail mode.

    ``prefix`` elements may be vectors, function tables, reals, or pairs.
    With ``declared_limit`` the caller asserts where the tail converges; the
    declaration is cross-checked against the prefix trend and downgraded to
    ``inconsistent`` when the prefix contradicts it.
    """

    prefix: tuple
    tail_mode: str = TAIL_CONSTANT
    limit: object = None

    def __post_init__(self):
        if len(self.prefix) == 0:
            raise CheckFailure("bad_witness", "prefix must be nonempty")
        if self.tail_mode not in (TAIL_CONSTANT, TAIL_DECLARED, TAIL_UNRESOLVED):
            raise CheckFailure("bad_witness", f"unknown tail mode {self.tail_mode!r}")
        if self.tail_mode == TAIL_DECLARED and self.limit is None:
            raise CheckFailure("bad_witness", "declared_limit requires a limit element")
        object.__setattr__(self, "prefix", tuple(self.prefix))

    @property
    def length(self) -> int:
        return len(self.prefix)

    def map_scalar(self, fn: Callable) -> "WitnessSequence":
        """Apply a continuous map elementwise, preserving the tail mode.

        Valid for continuous ``fn`` (norms, functional evaluations): a
        declared limit maps to ``fn(limit)``.
        """
        mapped = tuple(float(fn(x)) for x in self.prefix)
        lim = float(fn(self.limit)) if self.tail_mode == TAIL_DECLARED else None
        return WitnessSequence(mapped, self.tail_mode, lim)


def constant_witness(element, repeat: int = 1) -> WitnessSequence:
    """The constant sequence at ``element`` (tail constant after prefix)."""
    return WitnessSequence(tuple([element] * max(1, repeat)), TAIL_CONSTANT)


def geometric_witness(element, n_terms: int = 8) -> WitnessSequence:
    """The sequence ``(1 - 1/n) * element`` for n = 1..n_terms, limit ``element``."""
    prefix = tuple((1.0 - 1.0 / n) * element for n in range(1, n_terms + 1))
    return WitnessSequence(prefix, TAIL_DECLARED, element)


@dataclass(frozen=True)
class LimsupEstimate:
    value: float
    tag: str

    @property
    def confident(self) -> bool:
        return self.tag in (TAG_EXACT, TAG_DECLARED)


def limsup_estimate(values: WitnessSequence, tol: Tolerance = DEFAULT_TOL) -> LimsupEstimate:
    """Estimate the limsup of a real sequence from its prefix and tail mode.

    * constant tail: the last prefix value, tag ``exact``;
    * declared limit: the declared value, tag ``declared`` when the prefix
      deviations shrink toward it (or already sit inside tolerance),
      otherwise ``inconsistent``;
    * unresolved tail: max over the trailing half of the prefix, tag
      ``heuristic`` (a finite prefix cannot certify tail behaviour).
    """
    vals = np.array([float(v) for v in values.prefix], dtype=float)
    n = len(vals)
    if values.tail_mode == TAIL_CONSTANT:
        return LimsupEstimate(float(vals[-1]), TAG_EXACT)
    if values.tail_mode == TAIL_DECLARED:
        lim = float(values.limit)
        dev = np.abs(vals - lim)
        eps = tol.eps(lim)
        win = max(1, n // 4)
        if np.max(dev[-win:]) <= eps:
            return LimsupEstimate(lim, TAG_DECLARED)
        if n >= 4:
            lead, trail = np.max(dev[:win]), np.max(dev[-win:])
            ok = trail <= 0.5 * lead + eps
        else:
            ok = dev[-1] <= dev[0] + eps
        return LimsupEstimate(lim, TAG_DECLARED if ok else TAG_INCONSISTENT)
    return LimsupEstimate(float(np.max(vals[n // 2:])), TAG_HEURISTIC)


def liminf_estimate(values: WitnessSequence, tol: Tolerance = DEFAULT_TOL) -> LimsupEstimate:
    neg = values.map_scalar(lambda x: -float(x))
    est = limsup_estimate(neg, tol)
    return LimsupEstimate(-est.value, est.tag)


# ---------------------------------------------------------------------------
# Weak convergence, Schur check, reverse triangle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakConvergenceReport:
    converges: bool
    residuals: tuple
    tag: str

    def to_dict(self) -> dict:
        return {"converges": self.converges, "tag": self.tag,
                "residuals": list(self.residuals)}


def weak_converges(space: NormedSpaceInstance, seq: WitnessSequence, limit,
                   tol: Tolerance = DEFAULT_TOL) -> WeakConvergenceReport:
    """Weak convergence test through the space's dual generators.

    True iff for every generator functional the limsup of
    ``|phi(f_n) - phi(limit)|`` sits inside tolerance. Because the
    generators span the dual, this is exact in finite dimension.
    """
    lim = space.check_vector(limit)
    for el in seq.prefix:
        space.check_vector(el)
    if seq.tail_mode == TAIL_DECLARED:
        space.check_vector(seq.limit)
    residuals, tags = [], []
    for phi in space.dual_generators:
        ref = float(phi @ lim)
        scalar_seq = seq.map_scalar(lambda v, phi=phi, ref=ref: abs(float(phi @ np.asarray(v, dtype=float)) - ref))
        est = limsup_estimate(scalar_seq, tol)
        residuals.append(est.value)
        tags.append(est.tag)
    ok = all(tol.close(r, 0.0) for r in residuals)
    return WeakConvergenceReport(ok, tuple(residuals), worst_tag(*tags))


@dataclass(frozen=True)
class SchurReport:
    status: str  # "pass" | "fail" | "not_applicable"
    weak: WeakConvergenceReport
    norm_limsup: Optional[LimsupEstimate]
    tag: str

    def to_dict(self) -> dict:
        out = {"status": self.status, "tag": self.tag, "weak": self.weak.to_dict()}
        if self.norm_limsup is not None:
            out["norm_limsup"] = self.norm_limsup.value
        return out


def schur_implication_check(space: NormedSpaceInstance, seq: WitnessSequence, limit,
                            tol: Tolerance = DEFAULT_TOL) -> SchurReport:
    """Check that weak convergence forces norm convergence on this instance.

    Finite-dimensional spaces always have this property, so a ``fail`` flags
    a tolerance or tail-mode artifact; it is reported, never swallowed.
    Returns ``not_applicable`` when the sequence does not converge weakly.
    """
    lim = space.check_vector(limit)
    weak = weak_converges(space, seq, lim, tol)
    if not weak.converges:
        return SchurReport("not_applicable", weak, None, weak.tag)
    dist_seq = seq.map_scalar(lambda v: float(space.norm(np.asarray(v, dtype=float) - lim)))
    est = limsup_estimate(dist_seq, tol)
    status = "pass" if tol.close(est.value, 0.0) else "fail"
    return SchurReport(status, weak, est, worst_tag(weak.tag, est.tag))


def reverse_triangle_gap(space: NormedSpaceInstance, u, v) -> float:
    """``norm(u - v) - |norm(u) - norm(v)|``; nonnegative for every norm."""
    a = space.check_vector(u)
    b = space.check_vector(v)
    return float(space.norm(a - b)) - abs(float(space.norm(a)) - float(space.norm(b)))
