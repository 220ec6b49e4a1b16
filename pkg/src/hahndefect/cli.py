"""Command-line entry point: single computations and batch runs from a TOML config.

Exit status is 0 on success, 1 when a task failed or a bound was violated,
and 2 when the configuration could not be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .census import (
    DIVISIBLE_HULL,
    THEOREMS,
    VALUE_GROUP,
    BoundContext,
    BoundQuery,
    Target,
    bound_value,
    brute_force_distances,
    check_bounds,
    ndd_census,
    same_buckets,
    sample_polynomials,
)
from .distance import distance_of
from .extension import as_extension, classify_as, defect_certificate, scripted_extension
from .fields import (
    FieldDescriptor,
    FieldKind,
    SyntheticElement,
    SyntheticScript,
    Undecidable,
    insep_defect_exponent,
    p_degree,
)
from .hahn import artin_schreier_root, parse_series
from .ordgroup import CoordKind, OrderedGroupSpec

MODULI = {"vk": VALUE_GROUP, "divhull": DIVISIBLE_HULL, VALUE_GROUP: VALUE_GROUP, DIVISIBLE_HULL: DIVISIBLE_HULL}


class ConfigError(Exception):
    pass


# -- fields ------------------------------------------------------------------------------

def build_field(spec: dict, name: str = "") -> FieldDescriptor:
    """A FieldDescriptor from a config table (or the equivalent CLI flags)."""
    try:
        kind = FieldKind(spec.get("kind", "perfect-hull"))
        p = int(spec["p"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"field {name or '<default>'}: {exc}") from exc
    rank = int(spec.get("rank", 1))
    common = dict(
        coeff_degree=int(spec.get("coeff_degree", 1)),
        base_coeff_degree=int(spec.get("base_coeff_degree", 1)),
        declared_m=spec.get("declared_m"),
        declared_k=spec.get("declared_k"),
        name=name,
    )
    if "perfect_hull_in_completion" in spec:
        common["perfect_hull_in_completion"] = bool(spec["perfect_hull_in_completion"])
    if kind is FieldKind.LAURENT:
        return FieldDescriptor.laurent(p, int(spec.get("level", 0)), rank, **common)
    if kind is FieldKind.PERFECT_HULL:
        return FieldDescriptor.perfect_hull(p, rank, **common)
    if kind is FieldKind.FULL_RESTRICTED:
        coords = spec.get("coords", ["integers"] * rank)
        group = OrderedGroupSpec(p, tuple(CoordKind(c) for c in coords), int(spec.get("level", 0)))
        return FieldDescriptor.full_restricted(group, **common)
    script = SyntheticScript.from_mapping(spec.get("synthetic", {}), rank)
    return FieldDescriptor.synthetic(p, script, rank, **common)


def _field_from_args(args) -> FieldDescriptor:
    spec = {"kind": args.kind, "p": args.p, "rank": args.rank, "level": args.level,
            "coeff_degree": args.coeff_degree, "base_coeff_degree": args.base_coeff_degree}
    if args.coords:
        spec["coords"] = args.coords.split(",")
    return build_field(spec, args.field_name)


# -- tasks ---------------------------------------------------------------------------------

def _series(K: FieldDescriptor, text: str):
    return parse_series(text, K.field, K.rank)


def task_as_root(K: FieldDescriptor, task: dict, budget: int, seed: int) -> dict:
    rec = as_extension(_series(K, task["rhs"]), K)
    return rec.to_json()


def task_distance(K: FieldDescriptor, task: dict, budget: int, seed: int) -> dict:
    if K.kind is FieldKind.SYNTHETIC:
        a = SyntheticElement(task["element"])
    elif "rhs" in task:
        a = artin_schreier_root(_series(K, task["rhs"]))
    else:
        a = _series(K, task["element"])
    return distance_of(a, K, budget).to_json()


def task_classify(K: FieldDescriptor, task: dict, budget: int, seed: int) -> dict:
    samples = int(task.get("samples", 100))
    if K.kind is FieldKind.SYNTHETIC:
        rec = scripted_extension(task["element"], K)
    else:
        rec = as_extension(_series(K, task["rhs"]), K)
    return classify_as(rec, budget, samples, seed).to_json()


def _census_context(K: FieldDescriptor, task: dict, targets) -> BoundContext:
    try:
        m_field = insep_defect_exponent(K).m
    except Undecidable:
        m_field = None
    try:
        k = p_degree(K)
    except Undecidable:
        k = None
    i = int(task.get("i", 1))
    m_ext, e = task.get("m_ext"), task.get("e")
    if (m_ext is None or e is None) and targets and K.kind is not FieldKind.SYNTHETIC:
        t = targets[0]
        cert = defect_certificate(K, t.element, t.degree, int(task.get("cert_samples", 50)), 0)
        e = cert.e if e is None else e
        if m_ext is None:
            m_ext, d = 0, cert.d
            while d > 1:
                d //= K.p
                m_ext += 1
    theorems = tuple(task.get("theorems", THEOREMS))
    return BoundContext(
        r=int(task.get("r", K.rank)), m_field=task.get("m", m_field), m_ext=m_ext, k=k, i=i, e=e,
        degree=int(task.get("degree", K.p ** i)), trdeg=task.get("trdeg"), p=K.p,
        perfect_hull_in_completion=K.perfect_hull_in_completion, normal=bool(task.get("normal", False)),
        extensions=int(task.get("extensions", max(1, len(targets)))), theorems=theorems)


def task_census(K: FieldDescriptor, task: dict, budget: int, seed: int) -> dict:
    modulus = MODULI[task.get("modulus", "vk")]
    i = task.get("i")
    if K.kind is FieldKind.SYNTHETIC:
        labels = task.get("elements") or sorted(K.script.elements)
        report = ndd_census(labels, K, modulus=modulus, budget=budget,
                            max_degree_exp=None if i is None else int(i))
        targets = []
    else:
        rhss = task.get("rhs", [])
        rhss = [rhss] if isinstance(rhss, str) else list(rhss)
        targets = [Target(f"root({r})", artin_schreier_root(_series(K, r)), K.p) for r in rhss]
        count = int(task.get("samples", 50))
        degree_bound = int(task.get("degree_bound", K.p - 1))
        polys = sample_polynomials(K, count, degree_bound, seed)
        enumeration = {"degree_bound": degree_bound, "samples": len(polys), "seed": seed,
                       "coefficients": "unit * t^q, q integral in [-2, 2]"}
        report = ndd_census(targets, K, polys, modulus, budget, enumeration,
                            max_degree_exp=None if i is None else int(i))
        if task.get("oracle", False):
            direct = brute_force_distances(targets, K, polys, budget, modulus)
            if not same_buckets(direct, report.buckets):
                raise RuntimeError("transport and brute-force buckets disagree")
            report = replace(report, enumeration={**report.enumeration, "oracle": "agrees"})
    report = check_bounds(report, _census_context(K, task, targets))
    return report.to_json()


def task_verify(K: FieldDescriptor | None, task: dict, budget: int, seed: int) -> dict:
    params = {k: task.get(k) for k in ("r", "m", "k", "i", "e", "degree", "trdeg", "p")}
    out = []
    for theorem in task.get("theorems", []):
        value = bound_value(BoundQuery(theorem, **params))
        out.append({"theorem": theorem, "value": value, "verdict": "n/a"})
    return {"bounds": out}


TASKS = {
    "as-root": task_as_root,
    "distance": task_distance,
    "classify": task_classify,
    "census": task_census,
    "verify": task_verify,
}


def _violations(result: dict) -> int:
    return sum(1 for b in result.get("bounds", []) if b.get("verdict") == "violated")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# -- batch runs ------------------------------------------------------------------------------

def load_config(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(str(exc)) from exc
    fields = {}
    if "field" in cfg:
        spec = dict(cfg["field"])
        if "synthetic" in cfg and "synthetic" not in spec:
            spec["synthetic"] = cfg["synthetic"]
        fields["default"] = build_field(spec, spec.get("id", "default"))
    for name, spec in cfg.get("fields", {}).items():
        fields[name] = build_field(spec, name)
    tasks = cfg.get("tasks", [])
    for n, task in enumerate(tasks):
        if task.get("kind") not in TASKS:
            raise ConfigError(f"task {n + 1}: unknown kind {task.get('kind')!r}")
        ref = task.get("field", "default" if "default" in fields else None)
        if task["kind"] != "verify" and ref not in fields:
            raise ConfigError(f"task {n + 1}: field {ref!r} is not declared")
    run = cfg.get("run", {})
    budget = int(run.get("budget", 12))
    if budget <= 0:
        raise ConfigError("budget must be positive")
    return {"fields": fields, "tasks": tasks, "run": run}


def run_config(path: Path, out: Path | None = None, seed: int | None = None, budget: int | None = None) -> int:
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    run = cfg["run"]
    seed = int(run.get("seed", 0)) if seed is None else seed
    budget = int(run.get("budget", 12)) if budget is None else budget
    out = Path(run.get("out", "reports")) if out is None else out
    out.mkdir(parents=True, exist_ok=True)
    fields = cfg["fields"]
    summary = []
    status = 0
    for n, task in enumerate(cfg["tasks"], start=1):
        kind = task["kind"]
        ref = task.get("field", "default" if "default" in fields else None)
        K = fields.get(ref)
        entry = {"index": n, "kind": kind, "field": ref}
        try:
            result = TASKS[kind](K, task, int(task.get("budget", budget)), int(task.get("seed", seed)))
            report = {"task": n, "kind": kind, "field": ref, "status": "ok", "result": result}
            entry["status"] = "ok"
            violated = _violations(result)
            if violated:
                entry["violated"] = violated
                status = 1
        except Exception as exc:  # a failing task is reported, the run continues
            report = {"task": n, "kind": kind, "field": ref, "status": "error",
                      "error": {"type": type(exc).__name__, "message": str(exc)}}
            entry["status"] = "error"
            status = 1
        name = f"task-{n:02d}-{kind}.json"
        (out / name).write_text(_dump(report))
        entry["file"] = name
        summary.append(entry)
    (out / "summary.json").write_text(_dump({
        "config": path.name, "seed": seed, "budget": budget, "tasks": summary, "exit_status": status}))
    print(f"{len(summary)} task(s), exit status {status}; reports in {out}")
    return status


# -- argument parsing ------------------------------------------------------------------------

def _field_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--kind", default="perfect-hull", choices=["perfect-hull", "laurent", "full-restricted"])
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--level", type=int, default=0)
    sp.add_argument("--coeff-degree", type=int, default=1)
    sp.add_argument("--base-coeff-degree", type=int, default=1)
    sp.add_argument("--coords", help="comma-separated coordinate kinds for full-restricted fields")
    sp.add_argument("--field-name", default="")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--modulus", choices=["vk", "divhull"], default="vk")

    parser = argparse.ArgumentParser(prog="hahndefect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("as-root", parents=[common], help="Artin-Schreier root of a right-hand side")
    sp.add_argument("rhs")
    _field_flags(sp)

    sp = sub.add_parser("distance", parents=[common], help="distance of an element to the base field")
    sp.add_argument("element")
    _field_flags(sp)

    sp = sub.add_parser("classify", parents=[common], help="classify an Artin-Schreier extension")
    sp.add_argument("rhs")
    sp.add_argument("--samples", type=int, default=100)
    _field_flags(sp)

    sp = sub.add_parser("census", parents=[common], help="count distance classes of an Artin-Schreier extension")
    sp.add_argument("rhs", nargs="+")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--degree-bound", type=int, default=None)
    sp.add_argument("--oracle", action="store_true", help="cross-check against direct evaluation")
    _field_flags(sp)

    sp = sub.add_parser("verify", parents=[common], help="evaluate bounds")
    sp.add_argument("theorems", nargs="+", choices=THEOREMS)
    for name in ("r", "m", "k", "i", "e", "degree", "trdeg", "p"):
        sp.add_argument(f"--{name}", type=int, default=None)

    sp = sub.add_parser("run", parents=[common], help="execute a TOML experiment config")
    sp.add_argument("config", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_config(args.config, args.out, args.seed, args.budget)
    budget = args.budget or 12
    seed = args.seed or 0
    try:
        if args.command == "verify":
            task = {k: getattr(args, k) for k in ("r", "m", "k", "i", "e", "degree", "trdeg", "p")}
            task["theorems"] = args.theorems
            result = task_verify(None, task, budget, seed)
        else:
            K = _field_from_args(args)
            if args.command == "as-root":
                result = task_as_root(K, {"rhs": args.rhs}, budget, seed)
            elif args.command == "distance":
                result = task_distance(K, {"element": args.element}, budget, seed)
            elif args.command == "classify":
                result = task_classify(K, {"rhs": args.rhs, "samples": args.samples}, budget, seed)
            else:
                task = {"rhs": args.rhs, "samples": args.samples, "modulus": args.modulus, "oracle": args.oracle}
                if args.degree_bound is not None:
                    task["degree_bound"] = args.degree_bound
                result = task_census(K, task, budget, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        result = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        _emit(result, args.out)
        return 1
    _emit(result, args.out)
    return 1 if _violations(result) else 0


def _emit(result: dict, out: Path | None) -> None:
    text = _dump(result)
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


if __name__ == "__main__":
    sys.exit(main())
