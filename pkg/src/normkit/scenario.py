"""Scenario files: declarative instances plus an ordered check list.

A scenario is a JSON document (schema below) declaring named spaces, pairs,
tables, vectors and witness sequences, followed by checks that bind those
names to checker operations, optionally with expected outcomes. Loading
fully resolves every name (unresolved references are load errors, not
warnings); running executes the checks and compares expectations.

Top-level keys::

    schema_version   integer (currently 1)
    name             scenario label
    seed             integer, drives every seeded probe battery
    tolerance        {"rel": float, "abs": float}
    spaces           name -> space declaration (kind: normed | metric |
                     delta | subset)
    pairs            name -> {"x": space, "y": space, "embed"?: matrix,
                     "order"?: "<=" | ">="}
    tables           name -> {"space": delta-space, "values": [[...], ...]}
    vectors          name -> [numbers]
    witnesses        name -> witness declaration (kind: constant |
                     geometric | explicit | pairs)
    checks           [{"op": ..., "args": {...}, "expect"?: {...}}, ...]

Norm declarations: {"kind": "euclidean" | "p_norm" | "weighted_p" |
"piecewise_linear" | "scaled" | "expr", ...}. Expression norms and custom
delta kernels evaluate restricted Python expressions; scenario files are
trusted local inputs.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from jsonschema import Draft202012Validator

from .core import (
    DEFAULT_TOL,
    NormedSpaceInstance,
    Tolerance,
    WitnessSequence,
    constant_witness,
    custom_space,
    eval_norm,
    euclidean_space,
    geometric_witness,
    limsup_estimate,
    p_norm_space,
    piecewise_linear_space,
    reverse_triangle_gap,
    schur_implication_check,
    verify_norm_axioms,
    weak_converges,
    weighted_p_space,
)
from .delta import (
    DeltaNormSpec,
    DeltaNormedSpace,
    FiniteMetricSpace,
    FunctionTable,
    MODE_INF,
    MODE_SUP,
    delta_norm,
    make_holder_spec,
    make_lip0_spec,
    strong_attainment,
    towards_point_attainment,
    weak_attainment,
    weak_towards_point_attainment,
)
from .errors import CheckFailure
from .membership import (
    SpacePair,
    check_lh,
    check_lhw,
    lemma22_upgrade,
    prop22_schur_upgrade,
    prop23_strong_from_weak,
    prop26_towards_lh,
    prop27_prop28_towards,
    thm22_check,
    thm23_check,
    thm24_check,
)
from .projection import (
    KIND_POLYTOPE,
    KIND_REAL_AXIS,
    KIND_SUBSPACE,
    SubsetSpec,
    check_prox_transfer,
    check_triangular,
    classify_proximinality,
    project,
)
from .renorm import run_renorm_pipeline
from .search import counterexample_search

SCHEMA_VERSION = 1

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "checks"],
    "properties": {
        "schema_version": {"type": "integer"},
        "name": {"type": "string"},
        "seed": {"type": "integer"},
        "tolerance": {
            "type": "object",
            "properties": {"rel": {"type": "number"}, "abs": {"type": "number"}},
        },
        "spaces": {"type": "object"},
        "pairs": {"type": "object"},
        "tables": {"type": "object"},
        "vectors": {"type": "object"},
        "witnesses": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["op"],
                "properties": {
                    "op": {"type": "string"},
                    "name": {"type": "string"},
                    "args": {"type": "object"},
                    "expect": {"type": "object"},
                },
            },
        },
    },
}


@dataclass(eq=False)
class Scenario:
    name: str
    seed: int
    tol: Tolerance
    spaces: dict
    pairs: dict
    tables: dict
    vectors: dict
    witnesses: dict
    checks: list
    raw: dict = field(repr=False, default_factory=dict)


def _expr_norm(expr: str, dim: int) -> NormedSpaceInstance:
    namespace = {"abs": abs, "min": min, "max": max, "sqrt": math.sqrt,
                 "sum": sum, "np": np}
    code = compile(expr, "<norm expr>", "eval")

    def fn(v):
        return float(eval(code, {"__builtins__": {}}, {**namespace, "v": np.asarray(v, dtype=float)}))

    return custom_space(dim, fn, label=f"expr:{expr}")


def _build_norm(decl: dict, dim: int) -> NormedSpaceInstance:
    kind = decl.get("kind", "euclidean")
    if kind == "euclidean":
        return euclidean_space(dim)
    if kind == "p_norm":
        p = math.inf if decl["p"] in ("inf", "Infinity") else float(decl["p"])
        return p_norm_space(dim, p)
    if kind == "weighted_p":
        p = math.inf if decl["p"] in ("inf", "Infinity") else float(decl["p"])
        return weighted_p_space(dim, decl["weights"], p)
    if kind == "piecewise_linear":
        return piecewise_linear_space(decl["rows"])
    if kind == "scaled":
        base = _build_norm(decl["base"], dim)
        c = float(decl["factor"])
        if c <= 0:
            raise CheckFailure("parse_error", "scaled norm factor must be positive")
        return custom_space(dim, lambda v: c * float(base.norm(np.asarray(v, dtype=float))),
                            label=f"{c}*{base.label}")
    if kind == "expr":
        return _expr_norm(decl["expr"], dim)
    raise CheckFailure("parse_error", f"unknown norm kind {kind!r}")


def _build_metric(decl: dict) -> FiniteMetricSpace:
    base = decl.get("base_point")
    if "coords" in decl:
        return FiniteMetricSpace.from_coordinates(
            decl["coords"], base_point=base, points=decl.get("points"))
    pts = decl.get("points") or list(range(len(decl["dist"])))
    return FiniteMetricSpace(points=tuple(pts), dist=np.asarray(decl["dist"], dtype=float),
                             base_point=base)


def _build_delta_space(decl: dict, spaces: dict) -> DeltaNormedSpace:
    domain = _lookup(spaces, decl["domain"], FiniteMetricSpace)
    target = _lookup(spaces, decl["target"], NormedSpaceInstance)
    dd = decl["delta"]
    kind = dd.get("kind", "lip0")
    if kind == "lip0":
        spec = make_lip0_spec(domain, target)
    elif kind == "holder":
        spec = make_holder_spec(domain, target, float(dd["beta"]))
    elif kind == "custom":
        spec = _custom_delta_spec(dd, domain, target)
    else:
        raise CheckFailure("parse_error", f"unknown delta kind {kind!r}")
    if "pairs" in decl:
        wanted = []
        for (a, b) in decl["pairs"]:
            wanted.append((domain.index(a), domain.index(b)))
        spec = spec.restrict(wanted)
    return DeltaNormedSpace(
        domain, target, spec,
        require_base_zero=decl.get("require_base_zero", True),
        label=decl.get("label", ""),
        validate_samples=int(decl.get("validate_samples", 32)),
    )


def _custom_delta_spec(dd: dict, domain: FiniteMetricSpace,
                       target: NormedSpaceInstance) -> DeltaNormSpec:
    namespace = {"abs": abs, "min": min, "max": max, "sqrt": math.sqrt, "np": np,
                 "d": domain.distance, "norm": lambda v: float(target.norm(np.asarray(v, dtype=float)))}
    mode = dd.get("mode", MODE_SUP)
    if mode not in (MODE_SUP, MODE_INF):
        raise CheckFailure("parse_error", f"unknown delta mode {mode!r}")
    tilde_code = compile(dd["expr_tilde"], "<delta>", "eval") if "expr_tilde" in dd else None
    code = compile(dd["expr"], "<delta>", "eval") if "expr" in dd else None
    if code is None and tilde_code is None:
        raise CheckFailure("parse_error", "custom delta needs expr or expr_tilde")

    def delta_tilde(x, y, vx, vy):
        loc = {**namespace, "x": x, "y": y,
               "vx": np.asarray(vx, dtype=float), "vy": np.asarray(vy, dtype=float)}
        return np.atleast_1d(np.asarray(eval(tilde_code, {"__builtins__": {}}, loc),
                                        dtype=float))

    if code is not None:
        def delta(x, y, vx, vy):
            loc = {**namespace, "x": x, "y": y,
                   "vx": np.asarray(vx, dtype=float), "vy": np.asarray(vy, dtype=float)}
            return float(eval(code, {"__builtins__": {}}, loc))
    else:
        def delta(x, y, vx, vy):
            return float(target.norm(delta_tilde(x, y, vx, vy)))

    return DeltaNormSpec(
        pair_domain=domain.ordered_pairs(), mode=mode, delta=delta,
        delta_tilde=delta_tilde if tilde_code is not None else None,
        target=target, label=dd.get("label", "custom"), kind="custom")


def _build_subset(decl: dict, spaces: dict) -> SubsetSpec:
    ambient = _lookup(spaces, decl["ambient"], NormedSpaceInstance)
    kind = decl["subset_kind"]
    if kind not in (KIND_SUBSPACE, KIND_POLYTOPE, KIND_REAL_AXIS):
        raise CheckFailure("parse_error", f"unknown subset kind {kind!r}")
    own = decl.get("own_norm", {"kind": "induced"})
    own_kind = own.get("kind", "induced")
    if own_kind == "induced":
        own_fn = None
    elif own_kind == "scaled_induced":
        c = float(own["factor"])
        own_fn = lambda v: c * float(ambient.norm(np.asarray(v, dtype=float)))
    elif own_kind == "expr":
        sp = _expr_norm(own["expr"], ambient.dim)
        own_fn = sp.norm
    else:
        raise CheckFailure("parse_error", f"unknown own-norm kind {own_kind!r}")
    return SubsetSpec(
        ambient=ambient, kind=kind,
        basis=decl.get("basis"), vertices=decl.get("vertices"),
        own_norm=own_fn, label=decl.get("label", ""),
        validate=decl.get("validate", True))


def _lookup(mapping: dict, name: str, expected_type=None):
    if name not in mapping:
        raise CheckFailure("unresolved_name", f"unknown name {name!r}")
    obj = mapping[name]
    if expected_type is not None and not isinstance(obj, expected_type):
        raise CheckFailure("unresolved_name",
                           f"{name!r} is not a {expected_type.__name__}")
    return obj


def _build_witness(decl: dict, sc: Scenario) -> WitnessSequence:
    kind = decl.get("kind", "constant")
    if kind == "pairs":
        tail = decl.get("tail", "constant_after_prefix")
        prefix = tuple(tuple(p) for p in decl["pairs"])
        limit = tuple(decl["limit"]) if "limit" in decl else None
        return WitnessSequence(prefix, tail, limit)
    if kind in ("constant", "geometric"):
        el = _resolve_element(decl["of"], sc)
        if "scale" in decl:
            el = float(decl["scale"]) * el
        if kind == "constant":
            return constant_witness(el, repeat=int(decl.get("repeat", 1)))
        return geometric_witness(el, n_terms=int(decl.get("terms", 8)))
    if kind == "explicit":
        space = sc.spaces.get(decl.get("space", ""), None)
        elements = [_resolve_inline_element(e, sc, space) for e in decl["elements"]]
        tail = decl.get("tail", "constant_after_prefix")
        limit = (_resolve_inline_element(decl["limit"], sc, space)
                 if "limit" in decl else None)
        return WitnessSequence(tuple(elements), tail, limit)
    raise CheckFailure("parse_error", f"unknown witness kind {kind!r}")


def _resolve_element(name, sc: Scenario):
    if isinstance(name, str):
        if name in sc.tables:
            return sc.tables[name]
        if name in sc.vectors:
            return sc.vectors[name]
        raise CheckFailure("unresolved_name", f"unknown element {name!r}")
    return np.asarray(name, dtype=float)


def _resolve_inline_element(e, sc: Scenario, space):
    if isinstance(e, str):
        return _resolve_element(e, sc)
    arr = np.asarray(e, dtype=float)
    if isinstance(space, DeltaNormedSpace):
        return FunctionTable(space.domain, space.target, arr)
    return arr


def load_scenario(path) -> Scenario:
    """Parse, validate, and fully resolve a scenario file."""
    path = Path(path)
    if not path.exists():
        raise CheckFailure("parse_error", f"no such file: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CheckFailure("parse_error",
                           f"line {exc.lineno}: {exc.msg}") from None
    errors = sorted(Draft202012Validator(SCENARIO_SCHEMA).iter_errors(raw),
                    key=lambda e: list(e.path))
    if errors:
        loc = "/".join(str(p) for p in errors[0].path)
        raise CheckFailure("parse_error", f"schema violation at {loc}: {errors[0].message}")
    if raw["schema_version"] != SCHEMA_VERSION:
        raise CheckFailure("parse_error",
                           f"unsupported schema_version {raw['schema_version']}")

    tol_decl = raw.get("tolerance", {})
    sc = Scenario(
        name=raw.get("name", path.stem),
        seed=int(raw.get("seed", 0)),
        tol=Tolerance(rel=float(tol_decl.get("rel", DEFAULT_TOL.rel)),
                      abs=float(tol_decl.get("abs", DEFAULT_TOL.abs))),
        spaces={}, pairs={}, tables={}, vectors={}, witnesses={},
        checks=list(raw["checks"]), raw=raw,
    )

    declared = raw.get("spaces", {})
    order = {"metric": 0, "normed": 0, "delta": 1, "subset": 1}
    for name, decl in sorted(declared.items(), key=lambda kv: order.get(kv[1].get("kind"), 2)):
        kind = decl.get("kind")
        if kind == "normed":
            sc.spaces[name] = _build_norm(decl.get("norm", {}), int(decl["dim"]))
        elif kind == "metric":
            sc.spaces[name] = _build_metric(decl)
        elif kind == "delta":
            sc.spaces[name] = _build_delta_space(decl, sc.spaces)
        elif kind == "subset":
            sc.spaces[name] = _build_subset(decl, sc.spaces)
        else:
            raise CheckFailure("parse_error", f"space {name!r}: unknown kind {kind!r}")

    for name, vec in raw.get("vectors", {}).items():
        sc.vectors[name] = np.asarray(vec, dtype=float)

    for name, decl in raw.get("tables", {}).items():
        space = _lookup(sc.spaces, decl["space"], DeltaNormedSpace)
        sc.tables[name] = FunctionTable(space.domain, space.target,
                                        np.asarray(decl["values"], dtype=float))

    for name, decl in raw.get("pairs", {}).items():
        x = _lookup(sc.spaces, decl["x"])
        y = _lookup(sc.spaces, decl["y"])
        sc.pairs[name] = SpacePair(x, y, embed=decl.get("embed"),
                                   order_flag=decl.get("order"),
                                   label=name)

    for name, decl in raw.get("witnesses", {}).items():
        sc.witnesses[name] = _build_witness(decl, sc)

    for i, chk in enumerate(sc.checks):
        if chk["op"] not in CHECK_OPS:
            raise CheckFailure("unresolved_name",
                               f"check #{i}: unknown checker {chk['op']!r}")
    return sc


# ---------------------------------------------------------------------------
# Check adapters
# ---------------------------------------------------------------------------

def _arg_vector(sc: Scenario, args: dict, key: str) -> np.ndarray:
    val = args[key]
    if isinstance(val, str):
        return _lookup(sc.vectors, val)
    return np.asarray(val, dtype=float)


def _arg_table(sc: Scenario, args: dict, key: str):
    val = args[key]
    if isinstance(val, str):
        if val in sc.tables:
            return sc.tables[val]
        if val in sc.vectors:
            return sc.vectors[val]
        raise CheckFailure("unresolved_name", f"unknown element {val!r}")
    return np.asarray(val, dtype=float)


def _arg_witness(sc: Scenario, args: dict, key: str, default=None):
    if key not in args:
        return default
    return _lookup(sc.witnesses, args[key])


def _arg_probes(sc: Scenario, args: dict, dim: int, pairs: bool = False):
    decl = args.get("probes")
    if isinstance(decl, dict):
        count = int(decl.get("random", 100))
        scale = float(decl.get("scale", 3.0))
        seed = int(decl.get("seed", sc.seed))
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal(((2 * count) if pairs else count, dim)) * scale
        if pairs:
            return list(zip(pts[:count], pts[count:]))
        return list(pts)
    if pairs:
        return [(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
                for a, b in decl]
    return [np.asarray(p, dtype=float) for p in decl]


def _cert_result(cert) -> dict:
    return {"verdict": cert.verdict, "x_norm": cert.x_norm, "y_norm": cert.y_norm,
            "slack": cert.slack, "confidence": cert.confidence, "trace": cert.trace}


def _op_eval_norm(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], NormedSpaceInstance)
    return {"value": eval_norm(space, _arg_vector(sc, args, "vector"))}


def _op_verify_norm_axioms(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], NormedSpaceInstance)
    rep = verify_norm_axioms(space, samples=int(args.get("samples", 1000)),
                             seed=int(args.get("seed", sc.seed)), tol=tol)
    return rep.to_dict()


def _op_delta_norm(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], DeltaNormedSpace)
    nv = delta_norm(space, _arg_table(sc, args, "table"))
    return {"value": nv.value, "pair": list(nv.pair)}


def _op_strong_attainment(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], DeltaNormedSpace)
    res = strong_attainment(space, _arg_table(sc, args, "table"),
                            tuple(args["at"]), tol)
    return res.to_dict()


def _op_weak_attainment(sc, args, tol):
    pair = _lookup(sc.pairs, args["pair"], SpacePair)
    res = weak_attainment(pair.x_space, pair.y_space, _arg_table(sc, args, "table"),
                          tuple(args["at"]), _arg_witness(sc, args, "witness"), tol)
    return res.to_dict()


def _op_towards(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], DeltaNormedSpace)
    res = towards_point_attainment(space, _arg_table(sc, args, "table"),
                                   _arg_vector(sc, args, "z"),
                                   _arg_witness(sc, args, "pair_seq"), tol)
    return res.to_dict()


def _op_weak_towards(sc, args, tol):
    pair = _lookup(sc.pairs, args["pair"], SpacePair)
    res = weak_towards_point_attainment(
        pair.x_space, pair.y_space, _arg_table(sc, args, "table"),
        _arg_vector(sc, args, "z"), _arg_witness(sc, args, "pair_seq"),
        _arg_witness(sc, args, "fn_seq"), tol)
    return res.to_dict()


def _op_check_lh(sc, args, tol):
    return _cert_result(check_lh(_lookup(sc.pairs, args["pair"], SpacePair),
                                 _arg_table(sc, args, "f"), tol))


def _op_check_lhw(sc, args, tol):
    return _cert_result(check_lhw(_lookup(sc.pairs, args["pair"], SpacePair),
                                  _arg_table(sc, args, "f"),
                                  _arg_witness(sc, args, "witness"), tol))


def _op_lemma22(sc, args, tol):
    return _cert_result(lemma22_upgrade(_lookup(sc.pairs, args["pair"], SpacePair),
                                        _arg_table(sc, args, "f"),
                                        _arg_witness(sc, args, "witness"), tol))


def _op_prop22(sc, args, tol):
    return _cert_result(prop22_schur_upgrade(_lookup(sc.pairs, args["pair"], SpacePair),
                                             _arg_table(sc, args, "f"),
                                             _arg_witness(sc, args, "witness"), tol))


def _op_thm22(sc, args, tol):
    return _cert_result(thm22_check(_lookup(sc.pairs, args["pair"], SpacePair),
                                    _arg_table(sc, args, "f"),
                                    _arg_witness(sc, args, "witness"),
                                    args.get("branch", "unprimed"), tol))


def _op_thm23(sc, args, tol):
    return _cert_result(thm23_check(_lookup(sc.pairs, args["pair"], SpacePair),
                                    _arg_table(sc, args, "f"), tuple(args["at"]),
                                    _arg_witness(sc, args, "witness"), tol))


def _op_prop23(sc, args, tol):
    res = prop23_strong_from_weak(_lookup(sc.pairs, args["pair"], SpacePair),
                                  _arg_table(sc, args, "f"), tuple(args["at"]),
                                  _arg_witness(sc, args, "witness"), tol)
    return res.to_dict()


def _op_prop26(sc, args, tol):
    return _cert_result(prop26_towards_lh(
        _lookup(sc.pairs, args["pair"], SpacePair), _arg_table(sc, args, "f"),
        _arg_vector(sc, args, "z"), _arg_witness(sc, args, "pair_seq_x"),
        _arg_witness(sc, args, "pair_seq_y"), tol))


def _op_prop2728(sc, args, tol):
    rep = prop27_prop28_towards(
        _lookup(sc.pairs, args["pair"], SpacePair), _arg_table(sc, args, "f"),
        _arg_vector(sc, args, "z"), _arg_witness(sc, args, "pair_seq_y"),
        _arg_witness(sc, args, "pair_seq_w"), _arg_witness(sc, args, "fn_seq"),
        _arg_witness(sc, args, "lhw_witness"), tol)
    out = rep.to_dict()
    out["verdict"] = rep.certificate.verdict
    return out


def _op_thm24(sc, args, tol):
    return _cert_result(thm24_check(
        _lookup(sc.pairs, args["pair"], SpacePair), _arg_table(sc, args, "f"),
        _arg_vector(sc, args, "z"), _arg_witness(sc, args, "pair_seq"),
        _arg_witness(sc, args, "fn_seq"), tol))


def _op_weak_converges(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], NormedSpaceInstance)
    rep = weak_converges(space, _arg_witness(sc, args, "witness"),
                         _arg_vector(sc, args, "limit"), tol)
    return rep.to_dict()


def _op_schur(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], NormedSpaceInstance)
    rep = schur_implication_check(space, _arg_witness(sc, args, "witness"),
                                  _arg_vector(sc, args, "limit"), tol)
    return rep.to_dict()


def _op_reverse_triangle(sc, args, tol):
    space = _lookup(sc.spaces, args["space"], NormedSpaceInstance)
    return {"value": reverse_triangle_gap(space, _arg_vector(sc, args, "u"),
                                          _arg_vector(sc, args, "v"))}


def _op_project(sc, args, tol):
    x_set = _lookup(sc.spaces, args["set"], SubsetSpec)
    sol = project(x_set, _arg_vector(sc, args, "point"), tol,
                  solver=args.get("solver"))
    return {"distance": sol.distance, "minimizer": sol.point().tolist(),
            "cardinality_class": sol.cardinality_class,
            "solver_tag": sol.solver_tag,
            "minimizers": sol.minimizers.tolist()}


def _op_classify(sc, args, tol):
    x_set = _lookup(sc.spaces, args["set"], SubsetSpec)
    probes = _arg_probes(sc, args, x_set.ambient.dim)
    rep = classify_proximinality(x_set, probes, tol)
    return {"classification": rep.classification, "probes": len(probes)}


def _op_triangular(sc, args, tol):
    x_set = _lookup(sc.spaces, args["set"], SubsetSpec)
    probes = _arg_probes(sc, args, x_set.ambient.dim, pairs=True)
    rep = check_triangular(x_set, probes, tol)
    return rep.to_dict()


def _op_renorm(sc, args, tol):
    x_set = _lookup(sc.spaces, args["set"], SubsetSpec)
    rep = run_renorm_pipeline(
        x_set, tol,
        battery_pairs=int(args.get("battery_pairs", 200)),
        axiom_samples=int(args.get("axiom_samples", 1000)),
        lh_samples=int(args.get("lh_samples", 100)),
        seed=int(args.get("seed", sc.seed)))
    out = rep.to_dict()
    out["quotient_dim"] = rep.seminorm.quotient_dim
    out["axioms_pass"] = rep.axioms.all_pass
    out["lh_all"] = rep.lh_equality.all_in_lh
    return out


def _op_prox_transfer(sc, args, tol):
    x_set = _lookup(sc.spaces, args["set"], SubsetSpec)
    weights = np.asarray(args["weights"], dtype=float)
    p = math.inf if args["p"] in ("inf", "Infinity") else float(args["p"])
    decl = args.get("probes", {"random": 20})
    if isinstance(decl, dict):
        rng = np.random.default_rng(int(decl.get("seed", sc.seed)))
        probes = [rng.standard_normal(weights.size * x_set.ambient.dim)
                  * float(decl.get("scale", 2.0))
                  for _ in range(int(decl.get("random", 20)))]
    else:
        probes = [np.asarray(t, dtype=float) for t in decl]
    rep = check_prox_transfer(x_set, weights, p, probes, tol,
                              gap_tol=float(args.get("gap_tol", 1e-6)),
                              seed=int(args.get("seed", sc.seed)))
    return {"passed": rep.passed, "max_gap": rep.max_gap}


def _op_search(sc, args, tol):
    res = counterexample_search(args["statement"], int(args.get("trials", 1000)),
                                int(args.get("seed", sc.seed)), tol)
    return {"findings": len(res.findings), "hypothesis_hits": res.hypothesis_hits}


CHECK_OPS = {
    "eval_norm": _op_eval_norm,
    "verify_norm_axioms": _op_verify_norm_axioms,
    "delta_norm": _op_delta_norm,
    "strong_attainment": _op_strong_attainment,
    "weak_attainment": _op_weak_attainment,
    "towards_point_attainment": _op_towards,
    "weak_towards_point_attainment": _op_weak_towards,
    "check_lh": _op_check_lh,
    "check_lhw": _op_check_lhw,
    "lemma22_upgrade": _op_lemma22,
    "prop22_schur_upgrade": _op_prop22,
    "thm22_check": _op_thm22,
    "thm23_check": _op_thm23,
    "prop23_strong_from_weak": _op_prop23,
    "prop26_towards_lh": _op_prop26,
    "prop27_prop28_towards": _op_prop2728,
    "thm24_check": _op_thm24,
    "weak_converges": _op_weak_converges,
    "schur_implication_check": _op_schur,
    "reverse_triangle_gap": _op_reverse_triangle,
    "project": _op_project,
    "classify_proximinality": _op_classify,
    "check_triangular": _op_triangular,
    "renorm_pipeline": _op_renorm,
    "check_prox_transfer": _op_prox_transfer,
    "search": _op_search,
}


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckOutcome:
    name: str
    op: str
    result: Optional[dict]
    expected: Optional[dict]
    passed: Optional[bool]     # None when no expectation was declared
    error: Optional[str]
    mismatches: tuple
    duration: float

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"name": self.name, "op": self.op, "result": self.result,
               "expected": self.expected, "passed": self.passed,
               "error": self.error, "mismatches": list(self.mismatches)}
        if include_timing:
            out["duration_s"] = round(self.duration, 6)
        return out


@dataclass(frozen=True)
class RunReport:
    scenario: str
    seed: int
    outcomes: tuple

    @property
    def exit_status(self) -> int:
        bad = any(o.error is not None or o.passed is False for o in self.outcomes)
        return 1 if bad else 0

    @property
    def summary(self) -> dict:
        total = len(self.outcomes)
        failed = sum(1 for o in self.outcomes if o.error is not None or o.passed is False)
        return {"total": total, "failed": failed, "passed": total - failed}

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "kind": "check_run",
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "summary": self.summary,
            "results": [o.to_dict(include_timing) for o in self.outcomes],
        }


def _values_match(actual, expected, tol: Tolerance) -> bool:
    if isinstance(expected, bool) or isinstance(actual, bool):
        return bool(actual) == bool(expected)
    if isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        return tol.close(float(actual), float(expected))
    if isinstance(expected, (list, tuple)) and isinstance(actual, (list, tuple)):
        if len(expected) != len(actual):
            return False
        return all(_values_match(a, e, tol) for a, e in zip(actual, expected))
    return actual == expected


def run_checks(sc: Scenario) -> RunReport:
    """Execute every check; checker errors become failed rows, not crashes."""
    outcomes = []
    for i, chk in enumerate(sc.checks):
        name = chk.get("name", f"{chk['op']}#{i}")
        op = chk["op"]
        expected = chk.get("expect")
        tol = sc.tol
        if "tol" in chk:
            tol = Tolerance(rel=float(chk["tol"].get("rel", tol.rel)),
                            abs=float(chk["tol"].get("abs", tol.abs)))
        start = time.perf_counter()
        result, error, mismatches, passed = None, None, (), None
        try:
            result = CHECK_OPS[op](sc, chk.get("args", {}), tol)
            if expected is not None:
                mism = []
                for key, want in expected.items():
                    if key not in result:
                        mism.append(f"{key}: missing from result")
                    elif not _values_match(result[key], want, tol):
                        mism.append(f"{key}: got {result[key]!r}, expected {want!r}")
                mismatches = tuple(mism)
                passed = not mism
        except CheckFailure as exc:
            error = exc.code
            result = {"error_detail": exc.detail}
            passed = False if expected is not None else None
        outcomes.append(CheckOutcome(name, op, result, expected, passed, error,
                                     mismatches, time.perf_counter() - start))
    return RunReport(sc.name, sc.seed, tuple(outcomes))
