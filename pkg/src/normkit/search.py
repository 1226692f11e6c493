"""Randomized counterexample search over the toolkit's verified statements.

Each registered statement bundles an instance generator, a hypothesis
filter, and a conclusion evaluator returning a violation magnitude. Trials
are independent and reproducible: trial ``t`` of a search seeded with ``s``
draws from ``default_rng([s, t])``, so a finding's fingerprint (statement,
seed, trial) replays its violation bit for bit.

Violations are shrunk before reporting: fewer points / dimensions first,
then zeroed coordinates, then values rounded to one decimal, keeping both
the hypotheses and the violation alive at every step.

All registered statements are proved facts, so any finding signals a defect
in this toolkit rather than in the mathematics; the deliberately weakened
variant ``Thm2.2_weakened`` (its norm-convergence clause dropped) exists to
demonstrate that the search does find real violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    Tolerance,
    constant_witness,
    geometric_witness,
    limsup_estimate,
    reverse_triangle_gap,
)
from .delta import (
    delta_norm,
    strong_attainment,
    towards_point_attainment,
    vector_kernel_at,
    weak_attainment,
    weak_towards_point_attainment,
)
from .errors import CheckFailure
from .generators import (
    build_delta_instance,
    build_renorm_source,
    build_scaled_instance,
    build_vector_instance,
    delta_shrink_candidates,
    generate_delta_instance,
    generate_renorm_source,
    generate_scaled_instance,
    generate_vector_instance,
    renorm_shrink_candidates,
    scaled_shrink_candidates,
    vector_shrink_candidates,
)
from .membership import (
    VERDICT_IN_LH,
    VERDICT_IN_LHW_ONLY,
    check_lh,
    check_lhw,
    thm23_check,
)
from .projection import hausdorff_distance, project, scale_solution
from .renorm import build_induced_seminorm, verify_lh_equality, verify_seminorm_axioms


@dataclass(frozen=True)
class EvalOutcome:
    hypothesis: bool
    defect: float
    threshold: float
    notes: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.hypothesis and self.defect > self.threshold


@dataclass(frozen=True)
class Statement:
    statement_id: str
    claim: str
    generate: Callable
    evaluate: Callable
    shrink_candidates: Callable


@dataclass(frozen=True)
class Finding:
    statement_id: str
    seed: int
    trial: int
    magnitude: float
    threshold: float
    instance: dict
    shrunk_instance: dict
    shrunk_magnitude: float
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "fingerprint": {"statement": self.statement_id, "seed": self.seed,
                            "trial": self.trial},
            "magnitude": self.magnitude,
            "threshold": self.threshold,
            "instance": self.instance,
            "shrunk_instance": self.shrunk_instance,
            "shrunk_magnitude": self.shrunk_magnitude,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class SearchResult:
    statement_id: str
    claim: str
    trials: int
    seed: int
    hypothesis_hits: int
    findings: tuple

    def to_dict(self) -> dict:
        return {
            "statement": self.statement_id,
            "claim": self.claim,
            "trials": self.trials,
            "seed": self.seed,
            "hypothesis_hits": self.hypothesis_hits,
            "findings": [f.to_dict() for f in self.findings],
        }


# ---------------------------------------------------------------------------
# Statement evaluators
# ---------------------------------------------------------------------------

def _scaled_to_x_witness(pair, f, x: float, y: float, n_terms: int = 8):
    """Witness whose Y-norms tend to the X-norm: geometric at (x/y) * f."""
    g = pair.embed_element(f)
    if y == 0.0:
        return constant_witness(g)
    return geometric_witness((x / y) * g, n_terms)


def _eval_prop21(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    direct = check_lh(pair, f, tol)
    if direct.verdict != VERDICT_IN_LH:
        return EvalOutcome(False, 0.0, 0.0)
    cert = check_lhw(pair, f, None, tol)
    established = cert.verdict in (VERDICT_IN_LH, VERDICT_IN_LHW_ONLY)
    defect = 0.0 if established else max(cert.slack, tol.eps(cert.x_norm) * 2)
    return EvalOutcome(True, defect, tol.eps(cert.x_norm, cert.y_norm),
                       {"x": cert.x_norm, "y": cert.y_norm, "verdict": cert.verdict})


def _eval_prop23(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    direct = check_lh(pair, f, tol)
    if direct.verdict != VERDICT_IN_LH:
        return EvalOutcome(False, 0.0, 0.0)
    pair0 = delta_norm(pair.x_space, f).pair
    witness = geometric_witness(f, 8)
    weak = weak_attainment(pair.x_space, pair.y_space, f, pair0, witness, tol)
    conv = limsup_estimate(pair.y_distance_sequence(f, witness), tol)
    if not (weak and tol.close(conv.value, 0.0)):
        return EvalOutcome(False, 0.0, 0.0)
    strong = strong_attainment(pair.x_space, f, pair0, tol)
    return EvalOutcome(True, strong.residual, tol.eps(direct.x_norm),
                       {"pair0": list(pair0), "x": direct.x_norm})


def _generate_thm22(rng) -> dict:
    if rng.random() < 0.5:
        return generate_delta_instance(rng)
    return generate_scaled_instance(rng, scales=(0.25, 0.5, 0.75, 1.0))


def _build_mixed(inst: dict):
    if inst["family"] == "delta":
        return build_delta_instance(inst)
    return build_scaled_instance(inst)


def _mixed_shrink(inst: dict):
    if inst["family"] == "delta":
        yield from delta_shrink_candidates(inst)
    else:
        yield from scaled_shrink_candidates(inst)


def _eval_thm22(inst: dict, tol: Tolerance, weakened: bool = False) -> EvalOutcome:
    pair, f = _build_mixed(inst)
    x = pair.x_norm(f)
    y = pair.y_norm(pair.embed_element(f))
    witness = _scaled_to_x_witness(pair, f, x, y)
    norms = pair.y_norm_sequence(witness)
    bound = limsup_estimate(norms, tol)
    clause_one = bound.value <= x + tol.eps(bound.value, x)
    conv = limsup_estimate(norms.map_scalar(lambda v: abs(float(v) - y)), tol)
    clause_three = tol.close(conv.value, 0.0)
    hypothesis = clause_one and (weakened or clause_three)
    defect = abs(x - y) if hypothesis else 0.0
    return EvalOutcome(hypothesis, defect, tol.eps(x, y), {"x": x, "y": y})


def _eval_thm23(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    x = pair.x_norm(f)
    y = pair.y_norm(f)
    pair0 = delta_norm(pair.x_space, f).pair
    witness = _scaled_to_x_witness(pair, f, x, y)
    strong = strong_attainment(pair.x_space, f, pair0, tol)
    weak = weak_attainment(pair.x_space, pair.y_space, f, pair0, witness, tol)
    if not (strong and weak):
        return EvalOutcome(False, 0.0, 0.0)
    cert = thm23_check(pair, f, pair0, witness, tol)
    if cert.verdict == VERDICT_IN_LH:
        defect = abs(x - y)
    elif cert.verdict == VERDICT_IN_LHW_ONLY:
        defect = max(0.0, x - y)
    else:
        defect = 0.0
    return EvalOutcome(True, defect, tol.eps(x, y),
                       {"x": x, "y": y, "verdict": cert.verdict})


def _eval_prop25(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    x_space, y_space = pair.x_space, pair.y_space
    nv = delta_norm(x_space, f)
    z = vector_kernel_at(x_space, f, nv.pair)
    pair_seq = constant_witness(nv.pair)
    towards = towards_point_attainment(x_space, f, z, pair_seq, tol)
    defect = 0.0 if towards else towards.residual
    x, y = pair.x_norm(f), pair.y_norm(f)
    witness = _scaled_to_x_witness(pair, f, x, y)
    if weak_attainment(x_space, y_space, f, nv.pair, witness, tol):
        wt = weak_towards_point_attainment(x_space, y_space, f, z, pair_seq,
                                           witness, tol)
        if not wt:
            defect = max(defect, wt.residual)
    return EvalOutcome(True, defect, tol.eps(x, y), {"x": x})


def _eval_prop26(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    nv = delta_norm(pair.x_space, f)
    z = vector_kernel_at(pair.x_space, f, nv.pair)
    pair_seq = constant_witness(nv.pair)
    att_x = towards_point_attainment(pair.x_space, f, z, pair_seq, tol)
    att_y = towards_point_attainment(pair.y_space, f, z, pair_seq, tol)
    if not (att_x and att_y):
        return EvalOutcome(False, 0.0, 0.0)
    x, y = pair.x_norm(f), pair.y_norm(f)
    return EvalOutcome(True, abs(x - y), tol.eps(x, y), {"x": x, "y": y})


def _eval_prop28(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    x_space, y_space = pair.x_space, pair.y_space
    ny = delta_norm(y_space, f)
    if not x_space.spec.contains_pair(ny.pair_index):
        return EvalOutcome(False, 0.0, 0.0)
    z = vector_kernel_at(y_space, f, ny.pair)
    pair_seq = constant_witness(ny.pair)
    fn_seq = geometric_witness(f, 8)
    att_y = towards_point_attainment(y_space, f, z, pair_seq, tol)
    watt = weak_towards_point_attainment(x_space, y_space, f, z, pair_seq, fn_seq, tol)
    x, y = pair.x_norm(f), pair.y_norm(f)
    norms = pair.y_norm_sequence(fn_seq)
    bound = limsup_estimate(norms, tol)
    fn_is_lhw = (x <= y + tol.eps(x, y)
                 and bound.value <= x + tol.eps(bound.value, x))
    if not (att_y and watt and fn_is_lhw):
        return EvalOutcome(False, 0.0, 0.0)
    return EvalOutcome(True, abs(x - y), tol.eps(x, y), {"x": x, "y": y})


def _eval_thm24(inst: dict, tol: Tolerance) -> EvalOutcome:
    pair, f = build_delta_instance(inst)
    x_space, y_space = pair.x_space, pair.y_space
    nv = delta_norm(x_space, f)
    z = vector_kernel_at(x_space, f, nv.pair)
    pair_seq = constant_witness(nv.pair)
    fn_seq = geometric_witness(f, 8)
    att = towards_point_attainment(x_space, f, z, pair_seq, tol)
    watt = weak_towards_point_attainment(x_space, y_space, f, z, pair_seq, fn_seq, tol)
    conv = limsup_estimate(pair.y_distance_sequence(f, fn_seq), tol)
    if not (att and watt and tol.close(conv.value, 0.0)):
        return EvalOutcome(False, 0.0, 0.0)
    x, y = pair.x_norm(f), pair.y_norm(f)
    return EvalOutcome(True, abs(x - y), tol.eps(x, y), {"x": x, "y": y})


def _eval_thm31(inst: dict, tol: Tolerance) -> EvalOutcome:
    source = build_renorm_source(inst)
    seed = inst.get("probe_seed", 0)
    try:
        sn = build_induced_seminorm(source, tol, battery_pairs=8, seed=seed)
    except CheckFailure:
        return EvalOutcome(False, 0.0, 0.0)
    axioms = verify_seminorm_axioms(sn, samples=16, seed=seed + 1, tol=tol,
                                    set_probes=2)
    rng = np.random.default_rng(seed + 2)
    x_samples = source.sample_points(rng, 8)
    lh = verify_lh_equality(sn, x_samples, tol)
    kernel_defect = 0.0
    for f in x_samples:
        own = float(source.own_norm(f))
        if own > 0.05 and sn.eval(f) <= tol.eps(own):
            kernel_defect = max(kernel_defect, own)
    defect = max(axioms.nonneg_worst, axioms.homogeneity_worst,
                 axioms.triangle_worst, axioms.set_homogeneity_worst or 0.0,
                 lh.worst_deviation, kernel_defect)
    scale = max(1.0, sn.evidence.get("bounded_max_sup", 1.0))
    return EvalOutcome(True, defect, tol.eps(scale) * 4,
                       {"quotient_dim": sn.quotient_dim})


def _eval_lemma21(inst: dict, tol: Tolerance) -> EvalOutcome:
    space, u, v = build_vector_instance(inst)
    gap = reverse_triangle_gap(space, u, v)
    scale = max(float(space.norm(u)), float(space.norm(v)), 1.0)
    return EvalOutcome(True, max(0.0, -gap), tol.eps(scale), {"gap": gap})


def _generate_proj_source(rng) -> dict:
    inst = generate_renorm_source(rng)
    inst["probes"] = np.round(rng.standard_normal((2, inst["dim"])) * 3.0, 6).tolist()
    return inst


def _eval_eq38(inst: dict, tol: Tolerance) -> EvalOutcome:
    source = build_renorm_source(inst)
    worst = 0.0
    scale = 1.0
    for y in np.asarray(inst["probes"], dtype=float):
        base = project(source, y, tol)
        scale = max(scale, float(np.max(np.abs(y))))
        for a in (-2.0, 0.5, 3.0):
            worst = max(worst, hausdorff_distance(project(source, a * y, tol),
                                                  scale_solution(base, a)))
    return EvalOutcome(True, worst, tol.eps(scale) * 4, {})


STATEMENTS = {
    "Prop2.1": Statement(
        "Prop2.1",
        "norm-maintaining elements admit the constant weak-membership witness",
        generate_delta_instance, _eval_prop21, delta_shrink_candidates),
    "Prop2.3": Statement(
        "Prop2.3",
        "weak attainment with a Y-convergent witness forces strong attainment",
        generate_delta_instance, _eval_prop23, delta_shrink_candidates),
    "Thm2.2": Statement(
        "Thm2.2",
        "witness bound + norm convergence + global ordering force equal norms",
        _generate_thm22, _eval_thm22, _mixed_shrink),
    "Thm2.2_weakened": Statement(
        "Thm2.2_weakened",
        "deliberately broken variant: the norm-convergence clause is dropped",
        _generate_thm22,
        lambda inst, tol: _eval_thm22(inst, tol, weakened=True),
        _mixed_shrink),
    "Thm2.3": Statement(
        "Thm2.3",
        "strong + weak attainment at one pair certify (weak) membership",
        generate_delta_instance, _eval_thm23, delta_shrink_candidates),
    "Prop2.5": Statement(
        "Prop2.5",
        "attainment at a pair implies attainment towards the kernel value there",
        generate_delta_instance, _eval_prop25, delta_shrink_candidates),
    "Prop2.6": Statement(
        "Prop2.6",
        "attaining both norms towards one target vector forces equal norms",
        generate_delta_instance, _eval_prop26, delta_shrink_candidates),
    "Prop2.8": Statement(
        "Prop2.8",
        "a shared weak-membership/towards-attainment witness forces equal norms",
        generate_delta_instance, _eval_prop28, delta_shrink_candidates),
    "Thm2.4": Statement(
        "Thm2.4",
        "towards-attainment with a Y-convergent witness forces equal norms",
        generate_delta_instance, _eval_thm24, delta_shrink_candidates),
    "Thm3.1": Statement(
        "Thm3.1",
        "projection-induced seminorm: axioms, restriction, and kernel facts",
        generate_renorm_source, _eval_thm31, renorm_shrink_candidates),
    "Lemma2.1": Statement(
        "Lemma2.1",
        "reverse triangle inequality",
        generate_vector_instance, _eval_lemma21, vector_shrink_candidates),
    "Eq3.8": Statement(
        "Eq3.8",
        "projection homogeneity as a set identity",
        _generate_proj_source, _eval_eq38, renorm_shrink_candidates),
}


# ---------------------------------------------------------------------------
# Search loop, shrinking, replay
# ---------------------------------------------------------------------------

def _shrink(stmt: Statement, inst: dict, tol: Tolerance, max_steps: int = 200) -> dict:
    current = inst
    for _ in range(max_steps):
        improved = False
        for cand in stmt.shrink_candidates(current):
            try:
                out = stmt.evaluate(cand, tol)
            except CheckFailure:
                continue
            if out.violated:
                current = cand
                improved = True
                break
        if not improved:
            break
    return current


def counterexample_search(statement_id: str, trials: int, seed: int,
                          tol: Tolerance = DEFAULT_TOL) -> SearchResult:
    """Run ``trials`` seeded instances against one registered statement.

    Returns the hypothesis-hit count alongside the findings so that "zero
    findings out of zero applicable instances" is distinguishable from a
    genuine pass.
    """
    try:
        stmt = STATEMENTS[statement_id]
    except KeyError:
        raise CheckFailure("unknown_statement", statement_id) from None
    if trials < 1:
        raise CheckFailure("bad_argument", "trials must be >= 1")
    hits = 0
    findings = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        inst = stmt.generate(rng)
        out = stmt.evaluate(inst, tol)
        if not out.hypothesis:
            continue
        hits += 1
        if out.defect > out.threshold:
            shrunk = _shrink(stmt, inst, tol)
            shrunk_out = stmt.evaluate(shrunk, tol)
            findings.append(Finding(statement_id, seed, t, out.defect,
                                    out.threshold, inst, shrunk,
                                    shrunk_out.defect, out.notes))
    return SearchResult(statement_id, stmt.claim, trials, seed, hits,
                        tuple(findings))


def replay_finding(statement_id: str, seed: int, trial: int,
                   tol: Tolerance = DEFAULT_TOL) -> EvalOutcome:
    """Re-generate the fingerprinted instance and re-evaluate it."""
    try:
        stmt = STATEMENTS[statement_id]
    except KeyError:
        raise CheckFailure("unknown_statement", statement_id) from None
    rng = np.random.default_rng([seed, trial])
    return stmt.evaluate(stmt.generate(rng), tol)
