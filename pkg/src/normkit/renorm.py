"""Renorming pipeline: projection-induced seminorm, kernel, quotient.

Starting from a subset X of Y that is triangular and bounded proximinal (a
hypothesis battery verifies both on seeded probes), the map

    induced(y) = sup of the X-norm over the best approximations to y

is a seminorm on Y whose restriction to X reproduces the X-norm. Its null
space is extracted constructively for the exactly solvable source kinds
(Euclidean subspaces, the real axis, LP-representable ambients); for
grid-solved sources the kernel is only sampled and quotient operations are
disabled. The quotient representative uses a fixed orthogonal complement of
the null space so results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .core import DEFAULT_TOL, NormedSpaceInstance, Tolerance, custom_space
from .errors import CheckFailure
from .membership import SpacePair, check_lh, VERDICT_IN_LH
from .projection import (
    KIND_POLYTOPE,
    KIND_REAL_AXIS,
    KIND_SUBSPACE,
    ProjectionSolution,
    SubsetSpec,
    _default_solver,
    _pattern_search,
    _Budget,
    check_triangular,
    hausdorff_distance,
    project,
    scale_solution,
    sup_own_norm,
)


@dataclass(eq=False)
class InducedSeminorm:
    """Evaluable projection-induced seminorm with its null-space data."""

    source: SubsetSpec
    tol: Tolerance
    null_basis: Optional[np.ndarray]     # orthonormal rows spanning the kernel
    quotient_dim: Optional[int]
    kernel_mode: str                     # "exact" | "searched" | "sampled"
    evidence: dict = field(default_factory=dict)

    def eval(self, y) -> float:
        sol = project(self.source, y, self.tol)
        return sup_own_norm(self.source, sol).value

    def solution(self, y) -> ProjectionSolution:
        return project(self.source, y, self.tol)

    def quotient_representative(self, y) -> np.ndarray:
        """Canonical representative of ``y`` modulo the null space.

        The representative is the component of ``y`` orthogonal (in the
        coordinate Euclidean structure) to the null space; the seminorm is
        checked to vanish on the discarded component.
        """
        y = self.source.ambient.check_vector(y)
        if self.null_basis is None:
            raise CheckFailure("quotient_disabled",
                               "kernel only sampled for this source; "
                               "no quotient representative available")
        if self.null_basis.size == 0:
            return y.copy()
        rep = y - self.null_basis.T @ (self.null_basis @ y)
        drop = self.eval(y - rep)
        if drop > self.tol.eps(self.eval(y)):
            raise CheckFailure("null_basis_stale",
                               f"seminorm of the discarded component is {drop:.3g}")
        return rep

    def to_dict(self) -> dict:
        return {
            "kernel_mode": self.kernel_mode,
            "quotient_dim": self.quotient_dim,
            "null_basis": None if self.null_basis is None else self.null_basis.tolist(),
            "evidence": self.evidence,
        }


def _seeded_probes(dim: int, count: int, seed: int, scale: float = 3.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((count, dim)) * scale


def _sample_x_elements(source: SubsetSpec, count: int, seed: int) -> np.ndarray:
    return source.sample_points(np.random.default_rng(seed), count)


def _search_kernel(eval_fn, dim: int, kernel_tol: float, seed: int) -> np.ndarray:
    """Null directions by coordinate screening plus unit-sphere minimisation.

    Each seminorm evaluation runs an LP projection, so the scan is kept
    cheap: coordinate and random unit directions first, then a pattern
    search polish only when the coarse minimum is already suspiciously
    small (a seminorm with a nontrivial kernel decays to zero along it, so
    a coarse scan cannot miss the kernel by a wide margin).
    """
    rng = np.random.default_rng(seed)
    kernel = []

    def restricted_eval(v):
        v = np.asarray(v, dtype=float)
        for b in kernel:
            v = v - (b @ v) * b
        n = float(np.linalg.norm(v))
        if n < 1e-12:
            return math.inf
        return eval_fn(v / n)

    coarse_dirs = list(np.eye(dim)) + list(-np.eye(dim))
    extra = rng.standard_normal((8 * dim, dim))
    coarse_dirs += [d / np.linalg.norm(d) for d in extra]

    while len(kernel) < dim:
        vals = [restricted_eval(d) for d in coarse_dirs]
        best = int(np.argmin(vals))
        if vals[best] > max(100 * kernel_tol, 0.05):
            break
        v, val, _ = _pattern_search(restricted_eval, coarse_dirs[best], 0.25, 1e-10,
                                    _Budget(1200))
        if val > kernel_tol:
            break
        v = np.asarray(v, dtype=float)
        for b in kernel:
            v = v - (b @ v) * b
        n = float(np.linalg.norm(v))
        if n < 1e-9:
            break
        kernel.append(v / n)
    return np.array(kernel) if kernel else np.empty((0, dim))


def build_induced_seminorm(x_set: SubsetSpec, tol: Tolerance = DEFAULT_TOL,
                           battery_pairs: int = 200, seed: int = 0,
                           probe_scale: float = 3.0) -> InducedSeminorm:
    """Verify the hypotheses on a probe battery and build the seminorm.

    Triangularity and boundedness are universally quantified hypotheses; the
    battery samples them (its size is recorded in the evidence). Battery
    failures raise ``hypothesis_failed_triangular`` / ``_bounded`` with the
    witness attached.
    """
    n = x_set.ambient.dim
    probes = _seeded_probes(n, 2 * battery_pairs, seed, probe_scale)
    pair_probes = list(zip(probes[:battery_pairs], probes[battery_pairs:]))
    tri = check_triangular(x_set, pair_probes, tol)
    if not tri.passed:
        raise CheckFailure("hypothesis_failed_triangular",
                           f"triangularity violated: {tri.violation}",
                           payload=tri)
    sup_vals = []
    for y in probes[:battery_pairs]:
        s = sup_own_norm(x_set, project(x_set, y, tol))
        if not s.bounded:
            raise CheckFailure("hypothesis_failed_bounded",
                               f"unbounded projection-supremum at {y.tolist()}")
        sup_vals.append(s.value)

    solver = _default_solver(x_set)

    def eval_fn(y):
        return sup_own_norm(x_set, project(x_set, y, tol)).value

    kernel_tol = tol.eps(1.0)
    if solver == "exact_euclidean":
        null = scipy.linalg.null_space(x_set.basis).T
        mode = "exact"
    elif solver == "lp_polytope" and x_set.kind in (KIND_SUBSPACE, KIND_REAL_AXIS):
        null = _search_kernel(eval_fn, n, kernel_tol, seed)
        mode = "searched"
    else:
        null = None
        mode = "sampled"

    sn = InducedSeminorm(
        source=x_set, tol=tol,
        null_basis=null,
        quotient_dim=None if null is None else n - len(null),
        kernel_mode=mode,
    )

    # construction invariants, recorded as evidence
    zero_val = sn.eval(np.zeros(n))
    x_samples = _sample_x_elements(x_set, 32, seed + 1)
    worst_restriction = 0.0
    for f in x_samples:
        worst_restriction = max(worst_restriction,
                                abs(sn.eval(f) - float(x_set.own_norm(f))))
    sn.evidence = {
        "battery_pairs": battery_pairs,
        "triangular_worst_slack": tri.worst_slack,
        "bounded_max_sup": max(sup_vals),
        "eval_zero": zero_val,
        "x_restriction_worst_dev": worst_restriction,
    }
    if zero_val != 0.0:
        raise CheckFailure("seminorm_construction_failed",
                           f"seminorm of 0 evaluates to {zero_val!r}")
    return sn


@dataclass(frozen=True)
class SeminormAxiomReport:
    all_pass: bool
    nonneg_worst: float
    homogeneity_worst: float
    triangle_worst: float
    set_homogeneity_worst: Optional[float]
    samples: int

    def to_dict(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "nonneg_worst": self.nonneg_worst,
            "homogeneity_worst": self.homogeneity_worst,
            "triangle_worst": self.triangle_worst,
            "set_homogeneity_worst": self.set_homogeneity_worst,
            "samples": self.samples,
        }


def verify_seminorm_axioms(sn: InducedSeminorm, samples: int = 1000, seed: int = 0,
                           tol: Optional[Tolerance] = None,
                           set_probes: int = 25) -> SeminormAxiomReport:
    """Seeded seminorm axioms, plus projection homogeneity as a set identity.

    The set check compares the solution set at ``a * y`` with the scaled
    solution set at ``y`` via Hausdorff distance; it runs only for
    representable (singleton/polytope) solution sets.
    """
    tol = tol or sn.tol
    n = sn.source.ambient.dim
    rng = np.random.default_rng(seed)
    scalars = np.array([-2.0, -1.0, 0.5, 3.0])
    nonneg_worst = 0.0
    hom_worst = 0.0
    tri_worst = 0.0
    for _ in range(samples):
        f1 = rng.standard_normal(n) * 3.0
        f2 = rng.standard_normal(n) * 3.0
        v1, v2 = sn.eval(f1), sn.eval(f2)
        nonneg_worst = max(nonneg_worst, -min(v1, v2))
        a = float(scalars[rng.integers(len(scalars))])
        hom_worst = max(hom_worst, abs(sn.eval(a * f1) - abs(a) * v1))
        tri_worst = max(tri_worst, sn.eval(f1 + f2) - (v1 + v2))
    hom_worst = max(hom_worst, abs(sn.eval(0.0 * rng.standard_normal(n))))

    set_worst = None
    if _default_solver(sn.source) != "grid_refine":
        set_worst = 0.0
        for _ in range(set_probes):
            y = rng.standard_normal(n) * 3.0
            base = sn.solution(y)
            for a in scalars:
                scaled = sn.solution(a * y)
                set_worst = max(set_worst,
                                hausdorff_distance(scaled, scale_solution(base, a)))
    scale = max(1.0, sn.evidence.get("bounded_max_sup", 1.0))
    ok = (nonneg_worst <= tol.abs
          and hom_worst <= tol.eps(scale)
          and tri_worst <= tol.eps(scale)
          and (set_worst is None or set_worst <= tol.eps(scale)))
    return SeminormAxiomReport(ok, nonneg_worst, hom_worst, tri_worst,
                               set_worst, samples)


@dataclass(frozen=True)
class LhEqualityReport:
    all_in_lh: bool
    worst_deviation: float
    samples: int

    def to_dict(self) -> dict:
        return {"all_in_lh": self.all_in_lh,
                "worst_deviation": self.worst_deviation,
                "samples": self.samples}


def renormed_pair(sn: InducedSeminorm) -> SpacePair:
    """Pair (X with its own norm, Y with the induced seminorm)."""
    n = sn.source.ambient.dim
    x_space = custom_space(n, sn.source.own_norm, label="X|own")
    y_space = custom_space(n, sn.eval, label="Y|induced")
    return SpacePair(x_space, y_space, label="renormed")


def verify_lh_equality(sn: InducedSeminorm, x_samples, tol: Optional[Tolerance] = None
                       ) -> LhEqualityReport:
    """Every X-sample must be norm maintaining under the induced seminorm."""
    tol = tol or sn.tol
    pair = renormed_pair(sn)
    worst = 0.0
    all_ok = True
    count = 0
    for f in x_samples:
        cert = check_lh(pair, np.asarray(f, dtype=float), tol)
        worst = max(worst, abs(cert.x_norm - cert.y_norm))
        all_ok = all_ok and cert.verdict == VERDICT_IN_LH
        count += 1
    return LhEqualityReport(all_ok, worst, count)


@dataclass(frozen=True)
class RenormReport:
    """Full pipeline outcome for one source set."""

    seminorm: InducedSeminorm
    axioms: SeminormAxiomReport
    lh_equality: LhEqualityReport

    @property
    def passed(self) -> bool:
        return self.axioms.all_pass and self.lh_equality.all_in_lh

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seminorm": self.seminorm.to_dict(),
            "axioms": self.axioms.to_dict(),
            "lh_equality": self.lh_equality.to_dict(),
        }


def run_renorm_pipeline(x_set: SubsetSpec, tol: Tolerance = DEFAULT_TOL,
                        battery_pairs: int = 200, axiom_samples: int = 1000,
                        lh_samples: int = 100, seed: int = 0) -> RenormReport:
    sn = build_induced_seminorm(x_set, tol, battery_pairs=battery_pairs, seed=seed)
    axioms = verify_seminorm_axioms(sn, samples=axiom_samples, seed=seed + 1, tol=tol)
    x_samples = _sample_x_elements(x_set, lh_samples, seed + 2)
    lh = verify_lh_equality(sn, x_samples, tol)
    return RenormReport(sn, axioms, lh)
