"""Set-valued metric projection onto subsets of finite-dimensional spaces.

``project`` dispatches on the ambient norm and subset kind:

* Euclidean (or weighted-2) ambient + linear subspace: closed-form
  orthogonal projection, singleton solution, tag ``exact_euclidean``;
* polyhedral ambient norm (l1 / linf / weighted variants / generator form)
  + subspace or polytope: a linear program whose optimal face is enumerated
  vertex by vertex, tag ``lp_polytope``; the minimizer set of a convex
  problem is convex, so it is either a singleton or an infinite face;
* anything else: seeded multi-start pattern search with step halving, tag
  ``grid_refine``; the solution is a sample cloud and the cardinality class
  stays ``unknown``.

Minimizer sets are represented exactly only in the first two cases; that is
what the homogeneity and Hausdorff checks rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

from .core import (
    DEFAULT_TOL,
    NormedSpaceInstance,
    Tolerance,
    custom_space,
    verify_norm_axioms,
)
from .errors import CheckFailure

KIND_SUBSPACE = "linear_subspace"
KIND_POLYTOPE = "convex_polytope"
KIND_REAL_AXIS = "real_axis_in_C"

_MAX_FACE_COMBOS = 200_000


# ---------------------------------------------------------------------------
# Subset specifications
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SubsetSpec:
    """A projectable subset of an ambient normed space.

    ``own_norm`` is the subset's own norm (on its span), in general not the
    norm induced by the ambient one; it defaults to the induced norm. For
    subspace kinds it is validated against the norm axioms at construction,
    which in particular guarantees convexity and therefore the soundness of
    taking vertex maxima over polytope solution sets.
    """

    ambient: NormedSpaceInstance
    kind: str
    basis: Optional[np.ndarray] = None
    vertices: Optional[np.ndarray] = None
    own_norm: Optional[Callable] = None
    label: str = ""
    validate: bool = True

    def __post_init__(self):
        n = self.ambient.dim
        if self.kind == KIND_REAL_AXIS:
            if n != 2 or self.ambient.norm_kind != "euclidean":
                raise CheckFailure("bad_subset",
                                   "real-axis subset needs a Euclidean plane ambient")
            self.basis = np.array([[1.0, 0.0]])
        elif self.kind == KIND_SUBSPACE:
            if self.basis is None:
                raise CheckFailure("bad_subset", "subspace needs a basis")
            self.basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
            if self.basis.shape[1] != n:
                raise CheckFailure("bad_subset", "basis width != ambient dim")
            if np.linalg.matrix_rank(self.basis) < self.basis.shape[0]:
                raise CheckFailure("bad_subset", "basis rows are linearly dependent")
        elif self.kind == KIND_POLYTOPE:
            if self.vertices is None:
                raise CheckFailure("bad_subset", "polytope needs vertices")
            self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
            if self.vertices.shape[1] != n:
                raise CheckFailure("bad_subset", "vertex width != ambient dim")
            for i, j in combinations(range(len(self.vertices)), 2):
                if np.max(np.abs(self.vertices[i] - self.vertices[j])) <= 1e-12:
                    raise CheckFailure("bad_subset", "duplicate polytope vertices")
        else:
            raise CheckFailure("bad_subset", f"unknown kind {self.kind!r}")

        if self.own_norm is None:
            self.own_norm = self.ambient.norm
        if self.validate and self.kind in (KIND_SUBSPACE, KIND_REAL_AXIS):
            self._validate_own_norm()

    def _validate_own_norm(self):
        basis = self.basis
        coord_space = custom_space(
            basis.shape[0],
            lambda u: float(self.own_norm(np.asarray(u, dtype=float) @ basis)),
            label=(self.label or self.kind) + "|own",
        )
        report = verify_norm_axioms(coord_space, samples=200, seed=0)
        if not report.all_pass:
            failing = [c.name for c in report.checks if not c.passed]
            raise CheckFailure(
                "nonconvex_own_norm",
                "own norm fails axioms on the span (" + ", ".join(failing) + "); "
                "vertex maxima would be unsound")

    # -- geometry helpers ---------------------------------------------------

    @property
    def param_dim(self) -> int:
        return len(self.vertices) if self.kind == KIND_POLYTOPE else self.basis.shape[0]

    def param_to_point(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind == KIND_POLYTOPE:
            return u @ self.vertices
        return u @ self.basis

    def sample_points(self, rng, count: int, scale: float = 3.0) -> np.ndarray:
        """Seeded sample of subset points (for competitor checks)."""
        if self.kind == KIND_POLYTOPE:
            lam = rng.dirichlet(np.ones(len(self.vertices)), size=count)
            return lam @ self.vertices
        coeff = rng.standard_normal((count, self.basis.shape[0])) * scale
        return coeff @ self.basis


def real_axis_subset(label: str = "real_axis") -> SubsetSpec:
    """The real axis inside the Euclidean plane (complex numbers over R)."""
    from .core import euclidean_space

    return SubsetSpec(ambient=euclidean_space(2, "C"), kind=KIND_REAL_AXIS, label=label)


# ---------------------------------------------------------------------------
# Solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectionSolution:
    """Distance plus a representation of the minimizer set."""

    distance: float
    minimizers: np.ndarray        # (r, n)
    representation: str           # "singleton" | "polytope" | "samples"
    solver_tag: str               # "exact_euclidean" | "lp_polytope" | "grid_refine"
    cardinality_class: str        # "singleton" | "finite" | "infinite" | "unknown"
    cardinality: Optional[int] = None
    resolution: Optional[float] = None

    def point(self) -> np.ndarray:
        return self.minimizers[0]

    def to_dict(self) -> dict:
        return {
            "distance": self.distance,
            "representation": self.representation,
            "solver_tag": self.solver_tag,
            "cardinality_class": self.cardinality_class,
            "minimizers": np.asarray(self.minimizers).tolist(),
        }


def scale_solution(sol: ProjectionSolution, a: float) -> ProjectionSolution:
    """The solution set scaled by ``a`` (distances scale by ``|a|``)."""
    return ProjectionSolution(
        distance=abs(a) * sol.distance,
        minimizers=a * sol.minimizers,
        representation=sol.representation,
        solver_tag=sol.solver_tag,
        cardinality_class=sol.cardinality_class,
        cardinality=sol.cardinality,
        resolution=sol.resolution,
    )


def _dist_point_segment(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _dist_point_hull(p, vertices) -> float:
    """Euclidean distance from a point to the convex hull of ``vertices``."""
    verts = np.atleast_2d(vertices)
    if len(verts) == 1:
        return float(np.linalg.norm(p - verts[0]))
    if len(verts) == 2:
        return _dist_point_segment(p, verts[0], verts[1])
    from scipy.optimize import minimize

    m = len(verts)

    def obj(lam):
        r = p - lam @ verts
        return float(r @ r)

    def grad(lam):
        return -2.0 * (verts @ (p - lam @ verts))

    res = minimize(obj, np.full(m, 1.0 / m), jac=grad, method="SLSQP",
                   bounds=[(0.0, 1.0)] * m,
                   constraints=[{"type": "eq", "fun": lambda l: np.sum(l) - 1.0,
                                 "jac": lambda l: np.ones(m)}],
                   options={"ftol": 1e-16, "maxiter": 300})
    return float(math.sqrt(max(res.fun, 0.0)))


def point_to_solution_distance(p, sol: ProjectionSolution) -> float:
    p = np.asarray(p, dtype=float)
    if sol.representation == "samples":
        return float(np.min(np.linalg.norm(sol.minimizers - p, axis=1)))
    return _dist_point_hull(p, sol.minimizers)


def hausdorff_distance(a: ProjectionSolution, b: ProjectionSolution) -> float:
    """Euclidean Hausdorff distance between two representable solution sets."""
    d_ab = max(point_to_solution_distance(v, b) for v in a.minimizers)
    d_ba = max(point_to_solution_distance(v, a) for v in b.minimizers)
    return max(d_ab, d_ba)


# ---------------------------------------------------------------------------
# Solver paths
# ---------------------------------------------------------------------------

def _polyhedral_form(space: NormedSpaceInstance):
    """Return ("sup", G) or ("sum", w) when the norm is LP-representable."""
    kind, p = space.norm_kind, space.params.get("p")
    if kind == "piecewise_linear":
        return "sup", np.asarray(space.params["rows"], dtype=float)
    if kind == "p_norm" and p == math.inf:
        return "sup", np.eye(space.dim)
    if kind == "weighted_p" and p == math.inf:
        return "sup", np.diag(np.asarray(space.params["weights"], dtype=float))
    if kind == "p_norm" and p == 1:
        return "sum", np.ones(space.dim)
    if kind == "weighted_p" and p == 1:
        return "sum", np.asarray(space.params["weights"], dtype=float)
    return None


def _is_euclidean_like(space: NormedSpaceInstance) -> bool:
    if space.norm_kind == "euclidean":
        return True
    return space.norm_kind == "weighted_p" and space.params.get("p") == 2


def _default_solver(x_set: SubsetSpec) -> str:
    subspace_like = x_set.kind in (KIND_SUBSPACE, KIND_REAL_AXIS)
    if _is_euclidean_like(x_set.ambient) and subspace_like:
        return "exact_euclidean"
    if _polyhedral_form(x_set.ambient) is not None:
        return "lp_polytope"
    return "grid_refine"


def project(x_set: SubsetSpec, y, tol: Tolerance = DEFAULT_TOL,
            solver: Optional[str] = None, seed: int = 0,
            budget: int = 10_000) -> ProjectionSolution:
    """Best approximations to ``y`` in ``x_set`` under the ambient norm.

    ``solver`` forces a dispatch path (used for cross-solver oracle tests);
    by default the most exact applicable path is chosen.
    """
    y = x_set.ambient.check_vector(y)
    chosen = solver or _default_solver(x_set)
    if chosen == "exact_euclidean":
        if not (_is_euclidean_like(x_set.ambient)
                and x_set.kind in (KIND_SUBSPACE, KIND_REAL_AXIS)):
            raise CheckFailure("bad_argument",
                               "exact_euclidean needs a Euclidean ambient and a subspace")
        return _project_euclidean(x_set, y)
    if chosen == "lp_polytope":
        form = _polyhedral_form(x_set.ambient)
        if form is None:
            raise CheckFailure("bad_argument", "ambient norm is not LP-representable")
        return _project_lp(x_set, y, form, tol)
    if chosen == "grid_refine":
        return _project_grid(x_set, y, tol, seed=seed, budget=budget)
    raise CheckFailure("bad_argument", f"unknown solver {chosen!r}")


def _project_euclidean(x_set: SubsetSpec, y: np.ndarray) -> ProjectionSolution:
    basis = x_set.basis
    if x_set.ambient.norm_kind == "weighted_p":
        w = np.asarray(x_set.ambient.params["weights"], dtype=float)
        gram = basis * w @ basis.T
        rhs = basis @ (w * y)
    else:
        gram = basis @ basis.T
        rhs = basis @ y
    coeff = np.linalg.solve(gram, rhs)
    m = coeff @ basis
    return ProjectionSolution(
        distance=float(x_set.ambient.norm(y - m)),
        minimizers=m[None, :],
        representation="singleton",
        solver_tag="exact_euclidean",
        cardinality_class="singleton",
        cardinality=1,
    )


def _lp_constraints(x_set: SubsetSpec, y: np.ndarray, form):
    """Epigraph LP (cost, A_ub, b_ub, A_eq, b_eq, bounds, n_param)."""
    style, data = form
    if x_set.kind == KIND_POLYTOPE:
        mat, n_param = x_set.vertices, len(x_set.vertices)
    else:
        mat, n_param = x_set.basis, x_set.basis.shape[0]

    rows, rhs = [], []
    if style == "sup":
        G = data
        n_aux = 1
        cost = np.concatenate([np.zeros(n_param), [1.0]])
        C = mat @ G.T                       # (n_param, J): u . C[:, j] = g_j(x(u))
        r = G @ y
        for j in range(G.shape[0]):
            rows.append(np.concatenate([-C[:, j], [-1.0]]))
            rhs.append(-r[j])
            rows.append(np.concatenate([C[:, j], [-1.0]]))
            rhs.append(r[j])
    else:
        w = data
        n = len(y)
        n_aux = n
        cost = np.concatenate([np.zeros(n_param), w])
        for j in range(n):
            e = np.zeros(n_aux)
            e[j] = -1.0
            rows.append(np.concatenate([-mat[:, j], e]))
            rhs.append(-y[j])
            rows.append(np.concatenate([mat[:, j], e]))
            rhs.append(y[j])

    A_eq = b_eq = None
    bounds = [(None, None)] * n_param + [(None, None)] * n_aux
    if x_set.kind == KIND_POLYTOPE:
        A_eq = np.concatenate([np.ones(n_param), np.zeros(n_aux)])[None, :]
        b_eq = np.array([1.0])
        bounds = [(0.0, None)] * n_param + [(None, None)] * n_aux
    return cost, np.array(rows), np.array(rhs), A_eq, b_eq, bounds, n_param


def _face_polyhedron(x_set: SubsetSpec, y: np.ndarray, form, d_star: float):
    """Inequalities in parameter space cutting out the optimal face."""
    style, data = form
    mat = x_set.vertices if x_set.kind == KIND_POLYTOPE else x_set.basis
    n_param = mat.shape[0]
    rows, rhs = [], []
    if style == "sup":
        G = data
        C = mat @ G.T
        r = G @ y
        for j in range(G.shape[0]):
            rows.append(-C[:, j])
            rhs.append(d_star - r[j])
            rows.append(C[:, j])
            rhs.append(d_star + r[j])
    else:
        w = data
        n = len(y)
        if n > 16:
            raise CheckFailure("bad_subset", "l1 face enumeration limited to dim <= 16")
        for signs in product((-1.0, 1.0), repeat=n):
            sw = np.asarray(signs) * w
            rows.append(-(mat @ sw))
            rhs.append(d_star - float(sw @ y))
    A_eq = b_eq = None
    if x_set.kind == KIND_POLYTOPE:
        for i in range(n_param):
            e = np.zeros(n_param)
            e[i] = -1.0
            rows.append(e)
            rhs.append(0.0)
        A_eq = np.ones((1, n_param))
        b_eq = np.array([1.0])
    return np.array(rows), np.array(rhs), A_eq, b_eq


def _enumerate_vertices(A_ub, b_ub, A_eq, b_eq, feas_tol: float) -> np.ndarray:
    """Vertices of a bounded polyhedron in a low-dimensional space."""
    d = A_ub.shape[1]
    eq_rows = 0 if A_eq is None else np.linalg.matrix_rank(A_eq)
    free = d - eq_rows
    if free < 0:
        return np.empty((0, d))
    n_rows = len(A_ub)
    if math.comb(n_rows, free) > _MAX_FACE_COMBOS:
        raise CheckFailure("no_convergence",
                           "optimal-face enumeration too large; use the grid solver")
    found = []
    scale = max(1.0, float(np.max(np.abs(b_ub), initial=0.0)))
    for combo in combinations(range(n_rows), free):
        if A_eq is not None:
            M = np.vstack([A_eq, A_ub[list(combo)]])
            v = np.concatenate([b_eq, b_ub[list(combo)]])
        else:
            M = A_ub[list(combo)]
            v = b_ub[list(combo)]
        sol, _, rank, _ = np.linalg.lstsq(M, v, rcond=None)
        if rank < d or np.max(np.abs(M @ sol - v)) > feas_tol * scale:
            continue
        if np.all(A_ub @ sol <= b_ub + feas_tol * scale):
            found.append(sol)
    if not found:
        return np.empty((0, d))
    # tolerance dedup, deterministic order
    found.sort(key=lambda u: tuple(np.round(u, 12)))
    kept = []
    for u in found:
        if all(np.max(np.abs(u - k)) > 1e-9 * max(1.0, np.max(np.abs(u))) for k in kept):
            kept.append(u)
    return np.array(kept)


def _extreme_points(points: np.ndarray) -> np.ndarray:
    """Drop points that are convex combinations of the others."""
    if len(points) <= 2:
        return points
    keep = []
    for i, p in enumerate(points):
        others = np.delete(points, i, axis=0)
        m = len(others)
        A_eq = np.vstack([np.ones(m), others.T])
        b_eq = np.concatenate([[1.0], p])
        res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0.0, None)] * m,
                      method="highs")
        if res.status != 0:
            keep.append(p)
    return np.array(keep) if keep else points[:1]


def _project_lp(x_set: SubsetSpec, y: np.ndarray, form,
                tol: Tolerance) -> ProjectionSolution:
    cost, A_ub, b_ub, A_eq, b_eq, bounds, n_param = _lp_constraints(x_set, y, form)
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise CheckFailure("no_convergence", f"LP solver status {res.status}")
    d_star = float(res.fun)
    fA, fb, fAe, fbe = _face_polyhedron(x_set, y, form, d_star)
    verts_u = _enumerate_vertices(fA, fb, fAe, fbe, feas_tol=max(tol.abs, 1e-9))
    if len(verts_u) == 0:
        # fall back to the LP's own optimal point
        verts_u = res.x[:n_param][None, :]
    verts_x = np.array([x_set.param_to_point(u) for u in verts_u])
    # dedup in ambient coordinates, then keep extreme points only
    order = np.lexsort(verts_x.T[::-1])
    verts_x = verts_x[order]
    kept = []
    for p in verts_x:
        if all(np.max(np.abs(p - k)) > 1e-9 * max(1.0, np.max(np.abs(p))) for k in kept):
            kept.append(p)
    verts_x = _extreme_points(np.array(kept))
    singleton = len(verts_x) == 1
    return ProjectionSolution(
        distance=d_star,
        minimizers=verts_x,
        representation="singleton" if singleton else "polytope",
        solver_tag="lp_polytope",
        cardinality_class="singleton" if singleton else "infinite",
        cardinality=1 if singleton else None,
    )


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self) -> bool:
        self.used += 1
        return self.used <= self.limit


def _pattern_search(objective, start, step0, step_tol, budget, simplex=False):
    u = np.asarray(start, dtype=float).copy()
    if simplex:
        u = np.clip(u, 0.0, None)
        u /= max(np.sum(u), 1e-300)
    if not budget.spend():
        return u, math.inf, step0
    best = objective(u)
    step = step0
    d = len(u)
    while step >= step_tol:
        improved = False
        for i in range(d):
            for s in (step, -step):
                cand = u.copy()
                cand[i] += s
                if simplex:
                    cand = np.clip(cand, 0.0, None)
                    tot = np.sum(cand)
                    if tot <= 0:
                        continue
                    cand /= tot
                if not budget.spend():
                    return u, best, step
                val = objective(cand)
                if val < best:
                    best, u, improved = val, cand, True
        if not improved:
            step *= 0.5
    return u, best, step


def _project_grid(x_set: SubsetSpec, y: np.ndarray, tol: Tolerance,
                  seed: int, budget: int, n_starts: int = 8) -> ProjectionSolution:
    rng = np.random.default_rng(seed)
    ambient = x_set.ambient
    simplex = x_set.kind == KIND_POLYTOPE

    def objective(u):
        return float(ambient.norm(y - x_set.param_to_point(u)))

    if simplex:
        m = x_set.param_dim
        starts = [np.full(m, 1.0 / m)]
        starts += [rng.dirichlet(np.ones(m)) for _ in range(n_starts - 1)]
        step0 = 0.5
    else:
        u_ls, *_ = np.linalg.lstsq(x_set.basis.T, y, rcond=None)
        radius = float(np.max(np.abs(u_ls))) + 1.0
        starts = [u_ls]
        starts += [u_ls + rng.uniform(-radius, radius, size=len(u_ls))
                   for _ in range(n_starts - 1)]
        step0 = max(1.0, radius / 2.0)

    step_tol = max(tol.abs, 1e-12)
    tracker = _Budget(budget)
    results = []
    exhausted = False
    for s in starts:
        u, val, final_step = _pattern_search(objective, s, step0, step_tol, tracker,
                                             simplex=simplex)
        results.append((val, u, final_step))
        if tracker.used >= tracker.limit:
            exhausted = final_step >= step_tol
            break
    best_val = min(r[0] for r in results)
    eps_val = tol.eps(best_val) * 10
    cloud = []
    for val, u, _ in results:
        if val <= best_val + eps_val:
            p = x_set.param_to_point(u)
            if all(np.max(np.abs(p - q)) > 1e-6 for q in cloud):
                cloud.append(p)
    solution = ProjectionSolution(
        distance=best_val,
        minimizers=np.array(cloud),
        representation="samples",
        solver_tag="grid_refine",
        cardinality_class="unknown",
        resolution=max(r[2] for r in results),
    )
    if exhausted:
        raise CheckFailure("no_convergence",
                           f"evaluation budget {budget} exhausted", payload=solution)
    return solution


# ---------------------------------------------------------------------------
# Reports built on top of project()
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProximinalityReport:
    classification: str
    entries: tuple           # per probe: dict(distance, cardinality_class, error)

    def to_dict(self) -> dict:
        return {"classification": self.classification,
                "per_probe": [dict(e) for e in self.entries]}


def classify_proximinality(x_set: SubsetSpec, probe_points, tol: Tolerance = DEFAULT_TOL,
                           solver: Optional[str] = None) -> ProximinalityReport:
    """Observed projection cardinality over probes; a sample, not a proof."""
    probes = list(probe_points)
    if not probes:
        raise CheckFailure("bad_argument", "probe list must be nonempty")
    entries = []
    classes = []
    for y in probes:
        try:
            sol = project(x_set, y, tol, solver=solver)
            entries.append({"distance": sol.distance,
                            "cardinality_class": sol.cardinality_class,
                            "error": None})
            classes.append(sol.cardinality_class)
        except CheckFailure as exc:
            entries.append({"distance": None, "cardinality_class": None,
                            "error": exc.code})
            classes.append("error")
    if any(c in ("error", "unknown") for c in classes):
        label = "inconclusive"
    elif all(c == "singleton" for c in classes):
        label = "chebyshev_on_probes"
    elif all(c in ("singleton", "finite") for c in classes):
        label = "finite_proximinal_on_probes"
    else:
        label = "proximinal_on_probes"
    return ProximinalityReport(label, tuple(entries))


@dataclass(frozen=True)
class SupOwnNorm:
    value: float
    bounded: bool
    lower_bound_only: bool


def sup_own_norm(x_set: SubsetSpec, sol: ProjectionSolution) -> SupOwnNorm:
    """Supremum of the subset's own norm over a solution set.

    For polytope solution sets the maximum over vertices is exact because
    the own norm is convex (enforced at construction); sample clouds only
    give a lower bound and are flagged as such.
    """
    vals = [float(x_set.own_norm(m)) for m in sol.minimizers]
    value = max(vals)
    return SupOwnNorm(value, math.isfinite(value),
                      sol.representation == "samples")


@dataclass(frozen=True)
class TriangularReport:
    passed: bool
    checked: int
    worst_slack: float
    violation: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "checked": self.checked,
               "worst_slack": self.worst_slack}
        if self.violation is not None:
            out["violation"] = self.violation
        return out


def check_triangular(x_set: SubsetSpec, pair_probes, tol: Tolerance = DEFAULT_TOL,
                     solver: Optional[str] = None) -> TriangularReport:
    """Subadditivity of the projection-supremum over sums of targets.

    Stops at the first violation beyond tolerance and attaches the witness
    pair; otherwise reports the worst (smallest) slack seen.
    """
    worst = math.inf
    checked = 0
    for (y1, y2) in pair_probes:
        y1 = x_set.ambient.check_vector(y1)
        y2 = x_set.ambient.check_vector(y2)
        lhs = sup_own_norm(x_set, project(x_set, y1 + y2, tol, solver=solver)).value
        rhs = (sup_own_norm(x_set, project(x_set, y1, tol, solver=solver)).value
               + sup_own_norm(x_set, project(x_set, y2, tol, solver=solver)).value)
        slack = rhs - lhs
        checked += 1
        worst = min(worst, slack)
        if slack < -tol.eps(lhs, rhs):
            return TriangularReport(False, checked, worst, {
                "y1": y1.tolist(), "y2": y2.tolist(), "lhs": lhs, "rhs": rhs,
            })
    return TriangularReport(True, checked, worst)


# ---------------------------------------------------------------------------
# Discrete Bochner spaces and proximinality transfer
# ---------------------------------------------------------------------------

def bochner_aggregate(dists, weights, p) -> float:
    d = np.asarray(dists, dtype=float)
    w = np.asarray(weights, dtype=float)
    if p == math.inf:
        return float(np.max(d))
    return float(np.sum(w * d ** p) ** (1.0 / p))


def make_discrete_bochner(weights, target: NormedSpaceInstance, p) -> NormedSpaceInstance:
    """Weighted p-aggregation of target norms over finitely many atoms.

    Elements are tables of ``m`` target vectors, stored flat (row-major).
    For ``p = inf`` the norm is the max of the atom norms (every atom has
    positive weight by construction, so all atoms count).
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1 or np.any(w <= 0):
        raise CheckFailure("bad_measure", "weights must be positive and nonempty")
    if not (p >= 1):
        raise CheckFailure("bad_exponent", "p must lie in [1, inf]")
    m = w.size

    def norm(v):
        vals = np.asarray(v, dtype=float).reshape(m, target.dim)
        return bochner_aggregate(target.norm_rows(vals), w, p)

    return NormedSpaceInstance(
        dim=m * target.dim,
        norm=norm,
        norm_kind="custom",
        dual_generators=np.eye(m * target.dim),
        label=f"bochner(m={m}, p={p}) over {target.label}",
        params={"p": float(p), "weights": w, "atoms": m, "target": target},
    )


@dataclass(frozen=True)
class ProxTransferReport:
    passed: bool
    max_gap: float
    entries: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed, "max_gap": self.max_gap,
                "per_probe": [dict(e) for e in self.entries]}


def check_prox_transfer(x_in_y: SubsetSpec, weights, p, probe_tables,
                        tol: Tolerance = DEFAULT_TOL, gap_tol: float = 1e-6,
                        seed: int = 0) -> ProxTransferReport:
    """Atomwise projection versus a joint brute-force oracle.

    The primary route projects each atom independently and aggregates the
    per-atom distances; the oracle minimises the aggregated distance over
    all atoms jointly with a multi-start pattern search. Agreement certifies
    (on probes) that proximinality transfers to the weighted product space.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise CheckFailure("bad_measure", "weights must be positive")
    m = w.size
    ambient = x_in_y.ambient
    k = x_in_y.param_dim
    entries = []
    max_gap = 0.0
    rng = np.random.default_rng(seed)
    for table in probe_tables:
        F = np.asarray(table, dtype=float).reshape(m, ambient.dim)
        dists = [project(x_in_y, F[i], tol).distance for i in range(m)]
        d_atom = bochner_aggregate(dists, w, p)

        def objective(U):
            res = [float(ambient.norm(F[i] - x_in_y.param_to_point(U[i * k:(i + 1) * k])))
                   for i in range(m)]
            return bochner_aggregate(res, w, p)

        if x_in_y.kind == KIND_POLYTOPE:
            starts = [np.tile(np.full(k, 1.0 / k), m)]
        else:
            U0 = np.concatenate([
                np.linalg.lstsq(x_in_y.basis.T, F[i], rcond=None)[0] for i in range(m)
            ])
            starts = [U0]
        starts += [starts[0] + rng.uniform(-2, 2, size=m * k) for _ in range(5)]
        best = math.inf
        for s in starts:
            _, val, _ = _pattern_search(objective, s, 1.0, 1e-9, _Budget(40_000))
            best = min(best, val)
        gap = abs(d_atom - best)
        max_gap = max(max_gap, gap)
        entries.append({"atomwise": d_atom, "oracle": best, "gap": gap})
    return ProxTransferReport(max_gap <= gap_tol, max_gap, tuple(entries))


def validate_solution(x_set: SubsetSpec, y, sol: ProjectionSolution,
                      n_samples: int = 200, seed: int = 0,
                      tol: Tolerance = DEFAULT_TOL) -> dict:
    """Optimality cross-check: minimizers beat every sampled competitor."""
    y = x_set.ambient.check_vector(y)
    worst_min = max(float(x_set.ambient.norm(y - m)) - sol.distance
                    for m in sol.minimizers)
    samples = x_set.sample_points(np.random.default_rng(seed), n_samples)
    worst_comp = max(sol.distance - float(x_set.ambient.norm(y - x)) for x in samples)
    return {
        "minimizers_ok": worst_min <= tol.eps(sol.distance),
        "competitors_ok": worst_comp <= tol.eps(sol.distance),
        "worst_minimizer_excess": worst_min,
        "worst_competitor_gap": worst_comp,
    }
