"""Command-line surface: parse input specs, run computations, emit reports.

All reports are deterministic: rationals are serialized as "p/q" strings in
lowest terms with an explicit sign, JSON objects are dumped with sorted keys,
and nothing depends on hash order.  Exit codes: 0 all requested identities
hold, 1 an identity fails, 2 usage error, 3 missing file, 4 malformed input,
5 a computation error propagated from a module.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from random import Random

from . import catalog
from .elliptic import elliptic_classes
from .errors import MalformedInput, TraceStabError
from .packets import (
    DualGroupModel,
    GaussianRational,
    ParameterModel,
    TestVector,
    TwoGroup,
    adjoint_factor,
    adjoint_factor_closed,
    invert_transfer,
    theta_transfer,
    transfer_factor,
    transfer_factor_closed,
    verify_adjoint,
)
from .rootdata import RootDatum, build_root_datum, canonical_key, cartan_type, central_subgroup
from .sigma import SigmaTable, sigma, verify_central_quotient, verify_ei
from .stabilize import (
    DiscreteModelSet,
    EndoscopicDescriptor,
    discrete_part,
    e_phi,
    endoscopic_form,
    i_phi,
    phi_disc,
    phi_s_disc,
    s_disc,
    s_disc_set,
    stable_form,
    verify_coefficients,
)
from .weylcoset import TwistedComponent, component, i_number, untwisted_component

EXIT_OK = 0
EXIT_IDENTITY_FAILED = 1
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_MALFORMED = 4
EXIT_MODULE_ERROR = 5


@dataclass
class RunConfig:
    subcommand: str
    target: str | None = None
    group: str | None = None
    theta: str | None = None
    z: str | None = None
    models: str | None = None
    model: str | None = None
    fmt: str = "json"
    seed: int = 0
    trials: int = 100
    threads: int = 1
    catalog_flag: bool = False


def fmt_q(x: Fraction) -> str:
    x = Fraction(x)
    if x == 0:
        return "0/1"
    sign = "-" if x < 0 else "+"
    return f"{sign}{abs(x.numerator)}/{x.denominator}"


def fmt_gauss(z: GaussianRational) -> dict:
    return {"re": fmt_q(z.re), "im": fmt_q(z.im)}


def parse_q(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text)
    raise MalformedInput(f"expected an exact rational, got {text!r}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def _load_json(path: str):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return json.loads(text, parse_float=_reject_float)


def _reject_float(s):
    raise MalformedInput(f"floats are not accepted in input files: {s}")


def _require_keys(obj: dict, required, optional=()):
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise MalformedInput(f"unknown fields in input: {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise MalformedInput(f"missing fields in input: {sorted(missing)}")


def _int_matrix(obj) -> tuple:
    if not isinstance(obj, list):
        raise MalformedInput("matrix must be a list of integer rows")
    out = []
    for row in obj:
        if not isinstance(row, list) or not all(isinstance(x, int) for x in row):
            raise MalformedInput("matrix rows must be lists of integers")
        out.append(tuple(row))
    return tuple(out)


def _datum_from_obj(obj) -> RootDatum:
    if isinstance(obj, str):
        return catalog.datum(obj)
    if not isinstance(obj, dict):
        raise MalformedInput("group spec must be a name or an object")
    _require_keys(obj, ("rank", "simple_roots", "simple_coroots"))
    if not isinstance(obj["rank"], int):
        raise MalformedInput("rank must be an integer")
    return build_root_datum(obj["rank"], _int_matrix(obj["simple_roots"]),
                            _int_matrix(obj["simple_coroots"]))


def _load_component(config: RunConfig) -> TwistedComponent:
    """Resolve --group (catalog name, datum file, or combined file) + --theta."""
    spec = config.group
    if spec is None:
        raise MalformedInput("--group is required")
    theta = None
    if spec in catalog.component_names() or spec in ("o2_twist", "a1a1_swap"):
        comp = catalog.named_component(spec)
        base, theta = comp.base, comp.theta
    else:
        obj = _load_json(spec)
        if isinstance(obj, dict) and "group" in obj:
            _require_keys(obj, ("group",), ("theta",))
            base = _datum_from_obj(obj["group"])
            if "theta" in obj:
                theta = _int_matrix(obj["theta"])
        else:
            base = _datum_from_obj(obj)
    if config.theta is not None:
        tobj = _load_json(config.theta)
        if isinstance(tobj, dict):
            _require_keys(tobj, ("theta",))
            tobj = tobj["theta"]
        theta = _int_matrix(tobj)
    if theta is None:
        return untwisted_component(base)
    return component(base, theta)


def _load_datum(config: RunConfig) -> RootDatum:
    spec = config.group
    if spec is None:
        raise MalformedInput("--group is required")
    if spec in catalog.datum_names():
        return catalog.datum(spec)
    obj = _load_json(spec)
    if isinstance(obj, dict) and "group" in obj:
        _require_keys(obj, ("group",), ("theta",))
        obj = obj["group"]
    return _datum_from_obj(obj)


def _bits_to_pair(key: str, sm_dim: int, r_dim: int) -> tuple[int, int]:
    if len(key) != sm_dim + r_dim or any(c not in "01" for c in key):
        raise MalformedInput(f"component key {key!r} must be {sm_dim + r_dim} bits")
    xm = sum((1 << i) for i, c in enumerate(key[:sm_dim]) if c == "1")
    xr = sum((1 << i) for i, c in enumerate(key[sm_dim:]) if c == "1")
    return xm, xr


def _pair_to_bits(x, sm_dim: int, r_dim: int) -> str:
    bits_m = "".join("1" if (x[0] >> i) & 1 else "0" for i in range(sm_dim))
    bits_r = "".join("1" if (x[1] >> i) & 1 else "0" for i in range(r_dim))
    return bits_m + bits_r


def _model_from_obj(obj, fallback_id: str) -> ParameterModel:
    _require_keys(obj, ("sM_dim", "r_dim"), ("dual_group", "id"))
    sm_dim, r_dim = obj["sM_dim"], obj["r_dim"]
    if not (isinstance(sm_dim, int) and isinstance(r_dim, int)):
        raise MalformedInput("group dimensions must be integers")
    dual = None
    if "dual_group" in obj and obj["dual_group"] is not None:
        dobj = obj["dual_group"]
        _require_keys(dobj, ("base", "thetas"))
        base = _datum_from_obj(dobj["base"])
        thetas = {}
        for key, mat in sorted(dobj["thetas"].items()):
            thetas[_bits_to_pair(key, sm_dim, r_dim)] = _int_matrix(mat)
        dual = DualGroupModel(base, thetas)
    model_id = obj.get("id", fallback_id)
    return ParameterModel(model_id, TwoGroup(sm_dim), TwoGroup(r_dim), dual)


def _descriptor_from_obj(obj, models_by_id) -> EndoscopicDescriptor:
    _require_keys(obj, ("group_label", "model_id", "x", "class_index", "out_card",
                        "out_phi_card", "zbar_generators", "sprime",
                        "splus_over_s_card", "s_phi_prime_card"))
    m = models_by_id.get(obj["model_id"])
    if m is None:
        raise MalformedInput(f"descriptor references unknown model {obj['model_id']!r}")
    x = _bits_to_pair(obj["x"], m.s_m.dim, m.r.dim)
    gens = tuple(tuple(parse_q(v) for v in g) for g in obj["zbar_generators"])
    zbar = central_subgroup(m.dual_group.base, gens)
    return EndoscopicDescriptor(
        group_label=obj["group_label"],
        model_id=obj["model_id"],
        x=x,
        class_index=obj["class_index"],
        out_card=obj["out_card"],
        out_phi_card=obj["out_phi_card"],
        zbar=zbar,
        sprime_datum=_datum_from_obj(obj["sprime"]),
        splus_over_s_card=obj["splus_over_s_card"],
        s_phi_prime_card=obj["s_phi_prime_card"],
    )


def parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(prog="tracestab",
                                     description="Exact spectral coefficients and "
                                                 "stabilization identity checks.")
    parser.add_argument("--threads", type=int, default=None,
                        help="parallelism for enumeration internals")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, group=True):
        if group:
            p.add_argument("--group", required=False)
            p.add_argument("--theta", required=False)
        p.add_argument("--format", dest="fmt", choices=("json", "tsv"), default="json")

    p = sub.add_parser("i-number")
    add_common(p)
    p = sub.add_parser("elliptic")
    add_common(p)
    p = sub.add_parser("sigma")
    add_common(p)
    p.add_argument("--catalog", action="store_true")
    p = sub.add_parser("verify")
    p.add_argument("target", choices=("ei", "central-quotient", "stabilization"))
    add_common(p)
    p.add_argument("--z")
    p.add_argument("--models")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p = sub.add_parser("packets")
    p.add_argument("target", choices=("verify",))
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    add_common(p, group=False)
    p = sub.add_parser("stabilize")
    p.add_argument("target", choices=("verify",))
    p.add_argument("--models", default="fixtures")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    add_common(p, group=False)
    p = sub.add_parser("report")
    p.add_argument("--seed", type=int, default=0)
    add_common(p, group=False)

    ns = parser.parse_args(argv)
    threads = ns.threads
    env_threads = os.environ.get("LTS_THREADS")
    if env_threads is not None:
        threads = int(env_threads)
    if threads is None:
        threads = 1
    return RunConfig(
        subcommand=ns.subcommand,
        target=getattr(ns, "target", None),
        group=getattr(ns, "group", None),
        theta=getattr(ns, "theta", None),
        z=getattr(ns, "z", None),
        models=getattr(ns, "models", None),
        model=getattr(ns, "model", None),
        fmt=getattr(ns, "fmt", "json"),
        seed=getattr(ns, "seed", 0),
        trials=getattr(ns, "trials", 100),
        threads=threads,
        catalog_flag=getattr(ns, "catalog", False),
    )


def _emit(config: RunConfig, obj, tsv_rows=None) -> None:
    if config.fmt == "tsv" and tsv_rows is not None:
        for row in tsv_rows:
            sys.stdout.write("\t".join(str(c) for c in row) + "\n")
    else:
        sys.stdout.write(_dump(obj))


def _run_i_number(config: RunConfig) -> int:
    comp = _load_component(config)
    value = i_number(comp)
    _emit(config, {"i": fmt_q(value)}, [("i", fmt_q(value))])
    return EXIT_OK


def _run_elliptic(config: RunConfig) -> int:
    comp = _load_component(config)
    classes = elliptic_classes(comp, threads=config.threads)
    rows = []
    items = []
    for cls in classes:
        rep = "(" + ",".join(fmt_q(c) for c in cls.rep.coords) + ")"
        ctype = ",".join(cartan_type(cls.centralizer_datum)) or "torus"
        items.append({"rep": [fmt_q(c) for c in cls.rep.coords],
                      "order": cls.rep.order,
                      "pi0": cls.pi0,
                      "centralizer_type": ctype,
                      "elliptic": cls.elliptic})
        rows.append((rep, cls.pi0, ctype))
    _emit(config, {"classes": items, "count": len(items)}, rows)
    return EXIT_OK


def _run_sigma(config: RunConfig, show_catalog: bool) -> int:
    table = SigmaTable()
    if show_catalog:
        rows = []
        items = []
        for name in catalog.datum_names():
            d = catalog.datum(name)
            value = sigma(d, table)
            ctype = ",".join(cartan_type(d)) or "torus"
            key = canonical_key(d).decode()
            rows.append((key, ctype, fmt_q(value)))
            items.append({"name": name, "key": key, "type": ctype, "sigma": fmt_q(value)})
        _emit(config, {"catalog": items}, rows)
        return EXIT_OK
    d = _load_datum(config)
    value = sigma(d, table)
    _emit(config, {"sigma": fmt_q(value)}, [("sigma", fmt_q(value))])
    return EXIT_OK


def _run_verify_ei(config: RunConfig) -> int:
    comp = _load_component(config)
    report = verify_ei(comp)
    obj = {
        "e": fmt_q(report.e),
        "i": fmt_q(report.i),
        "equal": report.equal,
        "per_class": [{"rep": [fmt_q(c) for c in t.rep], "pi0": t.pi0,
                       "sigma": fmt_q(t.sigma_value), "term": fmt_q(t.term)}
                      for t in report.per_class],
    }
    _emit(config, obj, [("e", fmt_q(report.e)), ("i", fmt_q(report.i)),
                        ("equal", report.equal)])
    return EXIT_OK if report.equal else EXIT_IDENTITY_FAILED


def _run_verify_central_quotient(config: RunConfig) -> int:
    d = _load_datum(config)
    if config.z is None:
        raise MalformedInput("--z FILE is required for central-quotient verification")
    zobj = _load_json(config.z)
    _require_keys(zobj, ("generators",))
    gens = tuple(tuple(parse_q(v) for v in g) for g in zobj["generators"])
    z = central_subgroup(d, gens)
    table = SigmaTable()
    ok = verify_central_quotient(d, z, table)
    _emit(config, {"order": z.order, "pass": ok})
    return EXIT_OK if ok else EXIT_IDENTITY_FAILED


def _packet_checks(m: ParameterModel, seed: int, trials: int) -> dict:
    rng = Random(seed)
    route_ok = all(
        transfer_factor(m, tau, x) == transfer_factor_closed(m, tau, x)
        and adjoint_factor(m, x, tau) == adjoint_factor_closed(m, x, tau)
        for tau in m.taus() for x in m.s_elements())
    scaling_ok = all(
        transfer_factor(m, tau, x) ==
        Fraction(m.r.size, m.s_size) * adjoint_factor(m, x, tau)
        for tau in m.taus() for x in m.s_elements())
    adjoint_ok = verify_adjoint(m)
    roundtrip_ok = True
    for _ in range(trials):
        f = catalog.random_test_vector(rng, [m])
        theta = {tau: theta_transfer(m, tau, f) for tau in m.taus()}
        for x in m.s_elements():
            if invert_transfer(m, x, theta) != f.value(m.model_id, x):
                roundtrip_ok = False
    return {
        "route_agreement": route_ok,
        "scaling_law": scaling_ok,
        "adjoint_relations": adjoint_ok,
        "transfer_roundtrip": roundtrip_ok,
    }


def _run_packets_verify(config: RunConfig) -> int:
    obj = _load_json(config.model)
    m = _model_from_obj(obj, fallback_id="model")
    checks = _packet_checks(m, config.seed, config.trials)
    ok = all(checks.values())
    _emit(config, {"model": m.model_id, "checks": checks, "pass": ok})
    return EXIT_OK if ok else EXIT_IDENTITY_FAILED


def _load_model_set(config: RunConfig):
    if config.models in (None, "fixtures"):
        models = catalog.fixture_models()
        descriptors = [d for ds in sorted(catalog.fixture_descriptors().items())
                       for d in ds[1]]
        return DiscreteModelSet(models), tuple(descriptors)
    obj = _load_json(config.models)
    _require_keys(obj, ("models",), ("descriptors",))
    models = tuple(_model_from_obj(o, f"model{i}") for i, o in enumerate(obj["models"]))
    by_id = {m.model_id: m for m in models}
    descriptors = tuple(_descriptor_from_obj(o, by_id) for o in obj.get("descriptors", ()))
    return DiscreteModelSet(models), descriptors


def _run_stabilize_verify(config: RunConfig) -> int:
    ms, descriptors = _load_model_set(config)
    rng = Random(config.seed)
    table = SigmaTable()
    identities = []

    def record(name: str, lhs: GaussianRational, rhs: GaussianRational):
        identities.append({
            "identity": name,
            "lhs": fmt_gauss(lhs),
            "rhs": fmt_gauss(rhs),
            "pass": lhs == rhs,
        })

    ones = TestVector.constant(ms.models, 1)
    vectors = [(0, ones, ones)]
    for k in range(1, config.trials + 1):
        vectors.append((k, catalog.random_test_vector(rng, ms.models),
                        catalog.random_test_vector(rng, ms.models)))
    for k, f1, f2 in vectors:
        record(f"discrete=stable[{k}]", discrete_part(ms, f1, f2),
               stable_form(ms, f1, f2, table))
    if descriptors:
        for k, f1, f2 in vectors[: max(1, min(10, len(vectors)))]:
            record(f"endoscopic=discrete[{k}]",
                   endoscopic_form(ms, descriptors, f1, f2, table),
                   discrete_part(ms, f1, f2))
    by_id = {m.model_id: m for m in ms.models}
    coefficient_checks = []
    for d in descriptors:
        report = verify_coefficients(by_id[d.model_id], d, table)
        for name, lhs, rhs, ok in report.checks:
            coefficient_checks.append({
                "descriptor": f"{d.group_label}/{d.model_id}",
                "check": name, "lhs": lhs, "rhs": rhs, "pass": ok,
            })

    ei_items = []
    for m in ms.models:
        for x in m.s_elements():
            e_val = e_phi(m, x, table)
            i_val = i_phi(m, x)
            ei_items.append({"model": m.model_id, "x": _pair_to_bits(x, m.s_m.dim, m.r.dim),
                             "e": fmt_q(e_val), "i": fmt_q(i_val), "pass": e_val == i_val})
    coset_items = []
    for m in ms.models:
        for x in m.s_elements():
            for y in m.s_elements():
                if x[1] == y[1]:
                    ok = i_phi(m, x) == i_phi(m, y)
                    if not ok:
                        coset_items.append({"model": m.model_id,
                                            "x": _pair_to_bits(x, m.s_m.dim, m.r.dim),
                                            "y": _pair_to_bits(y, m.s_m.dim, m.r.dim)})
    all_pass = (all(item["pass"] for item in identities)
                and all(item["pass"] for item in ei_items)
                and all(item["pass"] for item in coefficient_checks)
                and not coset_items)
    flags = [{"model": m.model_id,
              "discrete": phi_disc(m),
              "stably_discrete": phi_s_disc(m),
              "s_disc_components": sorted(
                  _pair_to_bits(x, m.s_m.dim, m.r.dim) for x in s_disc_set(m))}
             for m in ms.models]
    obj = {
        "seed": config.seed,
        "trials": config.trials,
        "models": flags,
        "identities": identities,
        "e_equals_i": ei_items,
        "coefficient_checks": coefficient_checks,
        "coset_constancy_failures": coset_items,
        "stable_distribution": fmt_gauss(s_disc(ms, ones, ones, table)),
        "pass": all_pass,
    }
    _emit(config, obj)
    return EXIT_OK if all_pass else EXIT_IDENTITY_FAILED


def _run_report(config: RunConfig) -> int:
    table = SigmaTable()
    sections = {}
    ei = []
    for name in catalog.component_names():
        comp = catalog.named_component(name)
        rep = verify_ei(comp, table)
        ei.append({"component": name, "e": fmt_q(rep.e), "i": fmt_q(rep.i),
                   "pass": rep.equal})
    sections["e_equals_i"] = ei
    sections["sigma"] = [{"name": n, "sigma": fmt_q(sigma(catalog.datum(n), table))}
                         for n in catalog.datum_names()]
    packet_checks = {}
    for sm in range(3):
        for r in range(3):
            m = ParameterModel(f"m{sm}{r}", TwoGroup(sm), TwoGroup(r))
            packet_checks[f"sM={sm},r={r}"] = all(
                _packet_checks(m, config.seed, 5).values())
    sections["packets"] = packet_checks
    stab_config = RunConfig(subcommand="stabilize", target="verify",
                            models="fixtures", seed=config.seed, trials=10)
    ms, descriptors = _load_model_set(stab_config)
    ones = TestVector.constant(ms.models, 1)
    sections["stabilization"] = {
        "discrete=stable": discrete_part(ms, ones, ones) == stable_form(ms, ones, ones, table),
        "endoscopic=discrete": endoscopic_form(ms, descriptors, ones, ones, table)
                                == discrete_part(ms, ones, ones),
    }
    ok = (all(item["pass"] for item in sections["e_equals_i"])
          and all(packet_checks.values())
          and all(sections["stabilization"].values()))
    _emit(config, {"sections": sections, "pass": ok})
    return EXIT_OK if ok else EXIT_IDENTITY_FAILED


def run(config: RunConfig) -> int:
    """Dispatch a parsed configuration; returns the process exit code."""
    try:
        if config.subcommand == "i-number":
            return _run_i_number(config)
        if config.subcommand == "elliptic":
            return _run_elliptic(config)
        if config.subcommand == "sigma":
            return _run_sigma(config, config.catalog_flag or config.group is None)
        if config.subcommand == "verify":
            if config.target == "ei":
                return _run_verify_ei(config)
            if config.target == "central-quotient":
                return _run_verify_central_quotient(config)
            return _run_stabilize_verify(config)
        if config.subcommand == "packets":
            return _run_packets_verify(config)
        if config.subcommand == "stabilize":
            return _run_stabilize_verify(config)
        if config.subcommand == "report":
            return _run_report(config)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"missing file: {exc}\n")
        return EXIT_MISSING_FILE
    except (MalformedInput, json.JSONDecodeError, KeyError, TypeError) as exc:
        sys.stderr.write(_dump({"error": {"kind": "malformed-input", "detail": str(exc)}}))
        return EXIT_MALFORMED
    except TraceStabError as exc:
        sys.stderr.write(_dump({"error": {"kind": type(exc).__name__, "detail": str(exc)}}))
        return EXIT_MODULE_ERROR


def main(argv=None) -> int:
    config = parse_args(sys.argv[1:] if argv is None else argv)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
