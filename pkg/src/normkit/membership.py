"""Membership deciders for norm-maintaining elements, with certificates.

For a pair of spaces X inside Y, an element is *norm maintaining* (verdict
``in_LH``) when its two norms coincide; the weak variant (``in_LHW_only``)
requires only ``||f||_X <= ||f||_Y`` plus a witness sequence in Y whose
norms eventually drop below ``||f||_X + eps``. Direct norm comparison is
complete, so ``check_lh`` can certify non-membership; witness-based checks
can only ever certify membership, hence the distinct ``undecided`` verdict.

Every upgrade path (a theorem that concludes full membership from weaker
data) cross-validates its conclusion against the direct comparison; a
disagreement is downgraded to ``undecided`` and flagged in the trace, never
silently returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .core import (
    DEFAULT_TOL,
    NormedSpaceInstance,
    Tolerance,
    TAG_EXACT,
    TAG_HEURISTIC,
    TAG_INCONSISTENT,
    TAIL_DECLARED,
    WitnessSequence,
    constant_witness,
    custom_space,
    limsup_estimate,
    liminf_estimate,
    schur_implication_check,
    weak_converges,
    worst_tag,
)
from .delta import (
    DeltaNormedSpace,
    FunctionTable,
    delta_norm,
    kernel_at,
    strong_attainment,
    towards_point_attainment,
    vector_kernel_at,
    weak_attainment,
    weak_towards_point_attainment,
)
from .errors import CheckFailure

VERDICT_IN_LH = "in_LH"
VERDICT_IN_LHW_ONLY = "in_LHW_only"
VERDICT_NOT_IN_LHW = "not_in_LHW"
VERDICT_UNDECIDED = "undecided"

ORDER_LE = "<="
ORDER_GE = ">="

_ESTABLISHED = (VERDICT_IN_LH, VERDICT_IN_LHW_ONLY)


def _certificate_tag(tag: str) -> str:
    # Certificates expose exact/declared/heuristic; an inconsistent declared
    # limit is the weakest evidence and maps to heuristic.
    return TAG_HEURISTIC if tag == TAG_INCONSISTENT else tag


@dataclass(frozen=True, eq=False)
class SpacePair:
    """A declared containment X inside Y with an embedding map.

    Either both spaces are :class:`NormedSpaceInstance` (vectors, with an
    optional linear embedding matrix) or both are :class:`DeltaNormedSpace`
    (tables over the same domain, identity embedding, nested pair domains).
    ``order_flag`` declares a global norm ordering on X and is verified by
    sampling, never assumed.
    """

    x_space: Union[NormedSpaceInstance, DeltaNormedSpace]
    y_space: Union[NormedSpaceInstance, DeltaNormedSpace]
    embed: Optional[np.ndarray] = None
    order_flag: Optional[str] = None
    label: str = ""

    def __post_init__(self):
        if self.order_flag not in (None, ORDER_LE, ORDER_GE):
            raise CheckFailure("bad_pair", f"unknown order flag {self.order_flag!r}")
        if self.is_delta_pair:
            if self.embed is not None:
                raise CheckFailure("bad_pair", "delta pairs use the identity embedding")
            xd, yd = self.x_space.spec.pair_domain, self.y_space.spec.pair_domain
            if not set(xd) <= set(yd):
                raise CheckFailure("pair_domain_not_nested",
                                   "X pair domain must be contained in Y's")
        elif isinstance(self.x_space, NormedSpaceInstance) and isinstance(
                self.y_space, NormedSpaceInstance):
            if self.embed is not None:
                m = np.atleast_2d(np.asarray(self.embed, dtype=float))
                if m.shape != (self.y_space.dim, self.x_space.dim):
                    raise CheckFailure("bad_pair", "embedding matrix shape mismatch")
                object.__setattr__(self, "embed", m)
            elif self.x_space.dim != self.y_space.dim:
                raise CheckFailure("bad_pair",
                                   "identity embedding needs equal dimensions")
        else:
            raise CheckFailure("bad_pair", "spaces must both be vector or both delta")

    @property
    def is_delta_pair(self) -> bool:
        return isinstance(self.x_space, DeltaNormedSpace)

    def embed_element(self, f):
        if self.is_delta_pair or self.embed is None:
            return f
        return self.embed @ self.x_space.check_vector(f)

    def x_norm(self, f) -> float:
        if self.is_delta_pair:
            return delta_norm(self.x_space, f).value
        return float(self.x_space.norm(self.x_space.check_vector(f)))

    def y_norm(self, g) -> float:
        if self.is_delta_pair:
            return delta_norm(self.y_space, g).value
        return float(self.y_space.norm(self.y_space.check_vector(g)))

    def y_norm_sequence(self, seq: WitnessSequence) -> WitnessSequence:
        """Map a witness of Y-elements to its Y-norm sequence (members only)."""
        if self.is_delta_pair:
            for el in seq.prefix:
                self.y_space.require_member(el)
            if seq.tail_mode == TAIL_DECLARED:
                self.y_space.require_member(seq.limit)
        return seq.map_scalar(self.y_norm)

    def y_distance_sequence(self, f, seq: WitnessSequence) -> WitnessSequence:
        """Sequence ``||embed(f) - f_n||_Y``."""
        g = self.embed_element(f)
        if self.is_delta_pair:
            return seq.map_scalar(lambda h: self.y_norm(g - h))
        g = self.y_space.check_vector(g)
        return seq.map_scalar(lambda h: self.y_norm(g - np.asarray(h, dtype=float)))

    def random_x_element(self, rng, scale: float = 2.0):
        if self.is_delta_pair:
            return self.x_space.random_member(rng, scale)
        return rng.standard_normal(self.x_space.dim) * scale

    def verify_embedding(self, samples: int = 64, seed: int = 0,
                         tol: Tolerance = DEFAULT_TOL) -> dict:
        """Sample-based check of embedding linearity and the order flag."""
        rng = np.random.default_rng(seed)
        worst_lin, worst_order = 0.0, 0.0
        for _ in range(samples):
            u = self.random_x_element(rng)
            v = self.random_x_element(rng)
            a, b = rng.uniform(-2, 2, size=2)
            if self.is_delta_pair:
                lin = 0.0  # identity embedding is linear by construction
            else:
                lhs = self.embed_element(a * u + b * v)
                rhs = a * self.embed_element(u) + b * self.embed_element(v)
                lin = float(np.max(np.abs(lhs - rhs)))
            worst_lin = max(worst_lin, lin)
            if self.order_flag is not None:
                xn, yn = self.x_norm(u), self.y_norm(self.embed_element(u))
                gap = xn - yn if self.order_flag == ORDER_LE else yn - xn
                worst_order = max(worst_order, gap - tol.eps(xn, yn))
        return {
            "linear_ok": worst_lin <= tol.abs * 10,
            "order_ok": worst_order <= 0.0,
            "worst_linearity": worst_lin,
            "worst_order_violation": max(0.0, worst_order),
        }


@dataclass(frozen=True)
class MembershipCertificate:
    """Outcome of a membership check, with the numbers that justify it."""

    verdict: str
    x_norm: float
    y_norm: float
    witness: Optional[WitnessSequence]
    confidence: str
    trace: str
    slack: float

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "x_norm": self.x_norm,
            "y_norm": self.y_norm,
            "confidence": self.confidence,
            "trace": self.trace,
            "slack": self.slack,
        }
        if self.witness is not None:
            out["witness"] = {"length": self.witness.length,
                              "tail_mode": self.witness.tail_mode}
        return out


def _norms(pair: SpacePair, f) -> tuple:
    x = pair.x_norm(f)
    y = pair.y_norm(pair.embed_element(f))
    return x, y


def check_lh(pair: SpacePair, f, tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Direct norm comparison; complete for both membership and exclusion.

    ``in_LH`` when the norms agree; ``not_in_LHW`` when the X-norm strictly
    exceeds the Y-norm (no witness can repair that); ``undecided`` when the
    X-norm is strictly smaller (weak membership stays open).
    """
    x, y = _norms(pair, f)
    if tol.close(x, y):
        return MembershipCertificate(VERDICT_IN_LH, x, y, None, TAG_EXACT,
                                     "check_lh: norms agree", abs(x - y))
    if x > y + tol.eps(x, y):
        return MembershipCertificate(VERDICT_NOT_IN_LHW, x, y, None, TAG_EXACT,
                                     "check_lh: x-norm exceeds y-norm", x - y)
    return MembershipCertificate(
        VERDICT_UNDECIDED, x, y, None, TAG_EXACT,
        "check_lh: norms differ; weak membership needs a witness", y - x)


def check_lhw(pair: SpacePair, f, candidate_witness: Optional[WitnessSequence] = None,
              tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Weak membership via a witness sequence (constant at ``f`` by default).

    Established iff ``||f||_X <= ||f||_Y`` and the limsup of the witness's
    Y-norms does not exceed ``||f||_X``. Failure to establish with the given
    witness yields ``undecided``, never a negative certificate.
    """
    x, y = _norms(pair, f)
    if x > y + tol.eps(x, y):
        return MembershipCertificate(VERDICT_NOT_IN_LHW, x, y, None, TAG_EXACT,
                                     "check_lhw: x-norm exceeds y-norm", x - y)
    witness = candidate_witness or constant_witness(pair.embed_element(f))
    est = limsup_estimate(pair.y_norm_sequence(witness), tol)
    if est.value <= x + tol.eps(est.value, x):
        verdict = VERDICT_IN_LH if tol.close(x, y) else VERDICT_IN_LHW_ONLY
        return MembershipCertificate(
            verdict, x, y, witness, _certificate_tag(est.tag),
            f"check_lhw: witness limsup {est.value:.6g} within x-norm", x - est.value)
    return MembershipCertificate(
        VERDICT_UNDECIDED, x, y, witness, _certificate_tag(est.tag),
        f"check_lhw: witness limsup {est.value:.6g} exceeds x-norm "
        "(membership not established by this witness)", est.value - x)


def _require_lhw_witness(pair: SpacePair, f, witness: WitnessSequence,
                         tol: Tolerance) -> MembershipCertificate:
    cert = check_lhw(pair, f, witness, tol)
    if cert.verdict not in _ESTABLISHED:
        raise CheckFailure("witness_not_lhw",
                           "witness does not establish weak membership")
    return cert


def _upgraded(pair: SpacePair, f, witness, base_trace: str, confidence: str,
              tol: Tolerance) -> MembershipCertificate:
    """Produce an ``in_LH`` certificate, cross-validated against check_lh."""
    direct = check_lh(pair, f, tol)
    if direct.verdict != VERDICT_IN_LH:
        return MembershipCertificate(
            VERDICT_UNDECIDED, direct.x_norm, direct.y_norm, witness,
            worst_tag(confidence, TAG_HEURISTIC),
            base_trace + "; crosscheck_mismatch: direct comparison disagrees",
            abs(direct.x_norm - direct.y_norm))
    return MembershipCertificate(
        VERDICT_IN_LH, direct.x_norm, direct.y_norm, witness,
        _certificate_tag(confidence), base_trace + "; crosscheck agrees",
        abs(direct.x_norm - direct.y_norm))


def lemma22_upgrade(pair: SpacePair, f, witness: WitnessSequence,
                    tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Upgrade weak membership to full membership via norm convergence.

    If the weak-membership witness also converges to ``f`` in the Y-norm,
    the Y-norm of ``f`` is squeezed below the X-norm and the two must agree.
    Without convergence the weak certificate is returned unchanged.
    """
    base = _require_lhw_witness(pair, f, witness, tol)
    conv = limsup_estimate(pair.y_distance_sequence(f, witness), tol)
    if tol.close(conv.value, 0.0):
        return _upgraded(pair, f, witness,
                         "lemma22_upgrade: witness converges to f in Y-norm",
                         worst_tag(base.confidence, conv.tag), tol)
    return MembershipCertificate(
        base.verdict, base.x_norm, base.y_norm, witness,
        worst_tag(base.confidence, _certificate_tag(conv.tag)),
        f"lemma22_upgrade: no upgrade, ||f - f_n||_Y limsup {conv.value:.6g}",
        base.slack)


def prop22_schur_upgrade(pair: SpacePair, f, witness: WitnessSequence,
                         tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Upgrade via weak convergence of the witness to ``f``.

    In finite dimension weak convergence forces norm convergence, which then
    feeds the norm-convergence upgrade. A witness that does not converge
    weakly leaves the weak certificate unchanged (not-applicable).
    """
    base = _require_lhw_witness(pair, f, witness, tol)
    flat_space, flat_seq, flat_limit = _flatten_for_weak(pair, f, witness)
    schur = schur_implication_check(flat_space, flat_seq, flat_limit, tol)
    if schur.status == "not_applicable":
        return MembershipCertificate(
            base.verdict, base.x_norm, base.y_norm, witness, base.confidence,
            "prop22_schur_upgrade: witness not weakly convergent to f; "
            "verdict unchanged", base.slack)
    if schur.status == "fail":
        return MembershipCertificate(
            base.verdict, base.x_norm, base.y_norm, witness,
            worst_tag(base.confidence, TAG_HEURISTIC),
            "prop22_schur_upgrade: weak convergence holds but norm convergence "
            "failed numerically (tolerance artifact); verdict unchanged",
            base.slack)
    return _upgraded(pair, f, witness,
                     "prop22_schur_upgrade: weakly convergent witness",
                     worst_tag(base.confidence, schur.tag), tol)


def _flatten_for_weak(pair: SpacePair, f, witness: WitnessSequence):
    """Represent Y-elements as flat vectors so dual functionals apply."""
    if not pair.is_delta_pair:
        space = pair.y_space
        return space, witness, pair.embed_element(f)

    y_space = pair.y_space
    shape = (y_space.domain.n_points, y_space.target.dim)

    def flat_norm(v):
        return delta_norm(
            y_space,
            FunctionTable(y_space.domain, y_space.target,
                          np.asarray(v, dtype=float).reshape(shape)),
            _skip_membership=True).value

    flat_space = custom_space(shape[0] * shape[1], flat_norm,
                              label=y_space.label + "|flat")
    flat_prefix = tuple(el.values.ravel() for el in witness.prefix)
    flat_limit = (witness.limit.values.ravel()
                  if witness.tail_mode == TAIL_DECLARED else None)
    flat_seq = WitnessSequence(flat_prefix, witness.tail_mode, flat_limit)
    return flat_space, flat_seq, f.values.ravel()


def thm22_check(pair: SpacePair, f, witness: WitnessSequence,
                branch: str = "unprimed",
                tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Full membership from a norm-ordered pair and a two-sided witness.

    Unprimed branch: the witness's Y-norms eventually drop below the X-norm
    and converge to the Y-norm, with the global ordering X <= Y; then both
    inequalities between the norms hold. The primed branch is the mirrored
    reading (ordering >=, norms eventually above the X-norm).
    """
    if branch not in ("unprimed", "primed"):
        raise CheckFailure("bad_argument", f"unknown branch {branch!r}")
    needed = ORDER_LE if branch == "unprimed" else ORDER_GE
    if pair.order_flag != needed:
        raise CheckFailure("order_flag_missing",
                           f"branch {branch} needs declared order {needed}")
    x, y = _norms(pair, f)
    norms = pair.y_norm_sequence(witness)
    if branch == "unprimed":
        bound = limsup_estimate(norms, tol)
        clause_one = bound.value <= x + tol.eps(bound.value, x)
    else:
        bound = liminf_estimate(norms, tol)
        clause_one = x <= bound.value + tol.eps(bound.value, x)
    conv = limsup_estimate(norms.map_scalar(lambda n: abs(float(n) - y)), tol)
    clause_three = tol.close(conv.value, 0.0)
    confidence = worst_tag(bound.tag, conv.tag)
    trace = f"thm22_check[{branch}]"
    if branch == "primed":
        trace += " (symmetric reading of the unprimed branch)"
    if clause_one and clause_three:
        return _upgraded(pair, f, witness, trace + ": clauses hold", confidence, tol)
    missing = [] if clause_one else ["witness-bound clause"]
    if not clause_three:
        missing.append("norm-convergence clause")
    return MembershipCertificate(
        VERDICT_UNDECIDED, x, y, witness, _certificate_tag(confidence),
        trace + ": failed " + " and ".join(missing), abs(x - y))


def _require_delta_pair(pair: SpacePair):
    if not pair.is_delta_pair:
        raise CheckFailure("delta_pair_required",
                           "attainment checks need delta-normed spaces")


def prop23_strong_from_weak(pair: SpacePair, f, pair0, witness: WitnessSequence,
                            tol: Tolerance = DEFAULT_TOL):
    """Strong attainment forced by weak attainment plus norm convergence.

    Preconditions (each failure raises its own code): ``f`` is norm
    maintaining, weakly attains at ``pair0`` with the witness, and the
    witness converges to ``f`` in the Y-norm. The returned attainment result
    must then be positive; a negative one is a reportable finding.
    """
    _require_delta_pair(pair)
    if check_lh(pair, f, tol).verdict != VERDICT_IN_LH:
        raise CheckFailure("not_lh", "f is not norm maintaining")
    weak = weak_attainment(pair.x_space, pair.y_space, f, pair0, witness, tol)
    if not weak:
        raise CheckFailure("not_weakly_attained",
                           f"weak attainment fails at {pair0!r}")
    conv = limsup_estimate(pair.y_distance_sequence(f, witness), tol)
    if not tol.close(conv.value, 0.0):
        raise CheckFailure("witness_not_convergent",
                           "witness does not converge to f in Y-norm")
    return strong_attainment(pair.x_space, f, pair0, tol)


def thm23_check(pair: SpacePair, f, pair0, witness: WitnessSequence,
                tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Membership from simultaneous strong and weak attainment at one pair.

    With attainment at ``pair0`` both ways, the witness realises the weak
    membership bound whenever ``||f||_X <= ||f||_Y``; if its Y-norms in fact
    converge to ``||f||_Y``, full membership follows without any ordering
    assumption.
    """
    _require_delta_pair(pair)
    strong = strong_attainment(pair.x_space, f, pair0, tol)
    if not strong:
        raise CheckFailure("not_strongly_attained",
                           f"strong attainment fails at {pair0!r}")
    weak = weak_attainment(pair.x_space, pair.y_space, f, pair0, witness, tol)
    if not weak:
        raise CheckFailure("not_weakly_attained",
                           f"weak attainment fails at {pair0!r}")
    x, y = _norms(pair, f)
    norms = pair.y_norm_sequence(witness)
    conv = limsup_estimate(norms.map_scalar(lambda n: abs(float(n) - y)), tol)
    confidence = worst_tag(weak.tag, conv.tag)
    if tol.close(conv.value, 0.0):
        return _upgraded(pair, f, witness,
                         "thm23_check: witness norms converge to the Y-norm",
                         confidence, tol)
    if x <= y + tol.eps(x, y):
        verdict = VERDICT_IN_LH if tol.close(x, y) else VERDICT_IN_LHW_ONLY
        return MembershipCertificate(
            verdict, x, y, witness, _certificate_tag(confidence),
            "thm23_check: weak membership established (witness reused)", y - x)
    return MembershipCertificate(
        VERDICT_NOT_IN_LHW, x, y, witness, _certificate_tag(confidence),
        "thm23_check: x-norm exceeds y-norm", x - y)


def prop26_towards_lh(pair: SpacePair, f, z, pair_seq_x: WitnessSequence,
                      pair_seq_y: WitnessSequence,
                      tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Membership when both norms are attained towards the same target vector.

    Attainment towards ``z`` pins each norm to ``||z||``, so the two norms
    coincide.
    """
    _require_delta_pair(pair)
    att_x = towards_point_attainment(pair.x_space, f, z, pair_seq_x, tol)
    if not att_x:
        raise CheckFailure("x_attainment_failed",
                           "X-norm not attained towards z")
    att_y = towards_point_attainment(pair.y_space, f, z, pair_seq_y, tol)
    if not att_y:
        raise CheckFailure("y_attainment_failed",
                           "Y-norm not attained towards z")
    return _upgraded(pair, f, None,
                     "prop26_towards_lh: both norms attained towards z",
                     worst_tag(att_x.tag, att_y.tag), tol)


@dataclass(frozen=True)
class TowardsReport:
    """Joint outcome of the towards-a-point norm-limit and upgrade checks."""

    norm_limit_holds: bool
    norm_limit_value: float
    certificate: MembershipCertificate
    tag: str

    def to_dict(self) -> dict:
        return {
            "norm_limit_holds": self.norm_limit_holds,
            "norm_limit_value": self.norm_limit_value,
            "tag": self.tag,
            "certificate": self.certificate.to_dict(),
        }


def prop27_prop28_towards(pair: SpacePair, f, z, pair_seq_y: WitnessSequence,
                          pair_seq_w: WitnessSequence, fn_seq: WitnessSequence,
                          lhw_witness: Optional[WitnessSequence] = None,
                          tol: Tolerance = DEFAULT_TOL) -> TowardsReport:
    """Norm-limit law for towards-attainment witnesses, plus the upgrade.

    When the Y-norm is attained towards ``z`` and ``f`` weakly attains the
    pair norm towards the same ``z`` with ``fn_seq``, the Y-norms along
    ``fn_seq`` must converge to ``||f||_Y`` (checked and reported). If the
    same ``fn_seq`` also witnesses weak membership, full membership follows.
    """
    _require_delta_pair(pair)
    att_y = towards_point_attainment(pair.y_space, f, z, pair_seq_y, tol)
    if not att_y:
        raise CheckFailure("y_attainment_failed", "Y-norm not attained towards z")
    watt = weak_towards_point_attainment(pair.x_space, pair.y_space, f, z,
                                         pair_seq_w, fn_seq, tol)
    if not watt:
        raise CheckFailure("weak_attainment_failed",
                           "weak attainment towards z fails with fn_seq")
    x, y = _norms(pair, f)
    norms = pair.y_norm_sequence(fn_seq)
    conv = limsup_estimate(norms.map_scalar(lambda n: abs(float(n) - y)), tol)
    norm_limit_holds = tol.close(conv.value, 0.0)

    base = check_lhw(pair, f, lhw_witness or fn_seq, tol)
    fn_bound = limsup_estimate(norms, tol)
    fn_is_lhw = (base.verdict in _ESTABLISHED
                 and fn_bound.value <= x + tol.eps(fn_bound.value, x))
    if fn_is_lhw:
        cert = _upgraded(pair, f, fn_seq,
                         "prop28: fn_seq witnesses both weak membership and "
                         "weak attainment towards z",
                         worst_tag(att_y.tag, watt.tag, fn_bound.tag), tol)
    else:
        cert = MembershipCertificate(
            base.verdict, x, y, fn_seq,
            base.confidence,
            "prop28: fn_seq is not a weak-membership witness; no upgrade",
            base.slack)
    return TowardsReport(norm_limit_holds, conv.value,
                         cert, worst_tag(att_y.tag, watt.tag, conv.tag))


def thm24_check(pair: SpacePair, f, z, pair_seq: WitnessSequence,
                fn_seq: WitnessSequence,
                tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Membership from towards-attainment plus Y-norm convergence to ``f``.

    The weak towards-attainment forces the witness norms to ``||z|| =
    ||f||_X``, while convergence to ``f`` forces them to ``||f||_Y``; the
    limit is unique.
    """
    _require_delta_pair(pair)
    att = towards_point_attainment(pair.x_space, f, z, pair_seq, tol)
    if not att:
        raise CheckFailure("not_attained_towards", "X-norm not attained towards z")
    watt = weak_towards_point_attainment(pair.x_space, pair.y_space, f, z,
                                         pair_seq, fn_seq, tol)
    if not watt:
        raise CheckFailure("not_weakly_attained_towards",
                           "weak attainment towards z fails with fn_seq")
    conv = limsup_estimate(pair.y_distance_sequence(f, fn_seq), tol)
    if not tol.close(conv.value, 0.0):
        x, y = _norms(pair, f)
        return MembershipCertificate(
            VERDICT_UNDECIDED, x, y, fn_seq,
            _certificate_tag(worst_tag(att.tag, watt.tag, conv.tag)),
            f"thm24_check: fn_seq does not converge to f in Y-norm "
            f"(limsup {conv.value:.6g})", abs(x - y))
    return _upgraded(pair, f, fn_seq,
                     "thm24_check: towards-attainment with convergent fn_seq",
                     worst_tag(att.tag, watt.tag, conv.tag), tol)
