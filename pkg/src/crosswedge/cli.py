"""Command-line front end.

    crosswedge omega|wedge|poletsky|extend|verify CONFIG [--seed S] [--out DIR] [--threads T]

CONFIG is a JSON file validated against a schema (unknown keys are
rejected).  Exit codes: 0 ok, 1 verification failure, 2 usage or config
error, 3 numerical failure.
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import cross, domains, extension, harmonic_measure, poletsky
from .export import write_csv, write_json
from .harmonic_measure import GridSpec, OmegaOptions, Verdict

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("omega", "wedge", "poletsky", "extend", "verify")


class ConfigError(Exception):
    pass


# -- schema -------------------------------------------------------------------------

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_INTERVAL = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_DOMAIN = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": [domains.DISC, domains.POLYGON, domains.SLIT_SQUARE]},
        "vertices": {"type": "array", "items": _POINT, "minItems": 3},
        "a": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "arcs": {"type": "array", "items": _INTERVAL},
    },
}
_GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["nx", "ny"],
    "properties": {
        "nx": {"type": "integer", "minimum": 1},
        "ny": {"type": "integer", "minimum": 1},
        "bounds": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
    },
}
_SAMPLER = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "shell": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
    },
}
_FIT = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "p": {"type": "integer", "minimum": 0},
        "q": {"type": "integer", "minimum": 0},
        "ridge": {"type": "number", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "counts": {"type": "array", "items": {"type": "integer", "minimum": 0},
                   "minItems": 3, "maxItems": 3},
        "probes": {"type": "integer", "minimum": 0},
    },
}
_FUNCTION = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name"],
    "properties": {
        "name": {"enum": ["exp_sum", "rational", "product", "constant"]},
        "value": {"type": "number"},
    },
}
_SUITES = ["closed_forms", "wos", "level_identity", "boundary_limit", "open_subset", "poletsky",
           "types", "extension", "two_constants", "uniqueness", "determinism"]

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "domain": _DOMAIN,
        "D": _DOMAIN,
        "G": _DOMAIN,
        "grid": _GRID,
        "sampler": _SAMPLER,
        "w": _POINT,
        "points": {"type": "array", "items": _POINT},
        "open_set": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                                 "minItems": 3, "maxItems": 3}},
        "budget": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 16},
        "family": {"enum": ["auto", poletsky.POLYNOMIAL, poletsky.EXPONENTIAL]},
        "oracle": {"type": "boolean"},
        "function": _FUNCTION,
        "fit": _FIT,
        "eps": {"type": "array", "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1}},
        "suites": {"type": "array", "items": {"enum": _SUITES}},
        "output": {"type": "string"},
    },
}


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema error at {where}: {exc.message}") from exc
    return cfg


def _domain(desc, need_arcs=True):
    try:
        d, arcs = domains.domain_from_descriptor(desc)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"schema error in domain descriptor {desc}: {exc}") from exc
    if need_arcs and arcs is None:
        raise ConfigError(f"domain descriptor {desc} needs 'arcs'")
    return d, arcs


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"command '{cfg['command']}' needs config keys {missing}")


def _sampler(cfg, args):
    s = cfg.get("sampler", {})
    return OmegaOptions(n=s.get("n", 10_000), shell=s.get("shell"),
                        seed=args.seed if args.seed is not None else s.get("seed", 0),
                        threads=args.threads or s.get("threads", 1))


def _grid(cfg):
    g = cfg.get("grid", {"nx": 21, "ny": 21})
    return GridSpec(g["nx"], g["ny"], tuple(g["bounds"]) if "bounds" in g else None)


def _function(desc):
    name = desc["name"]
    if name == "exp_sum":
        return lambda z, w: np.exp(z + w)
    if name == "rational":
        return lambda z, w: 1.0 / ((2.0 - z) * (2.0 - w))
    if name == "product":
        return lambda z, w: z * w
    value = desc.get("value", 1.0)
    return lambda z, w: value * np.ones(np.broadcast(z, w).shape)


# -- commands ------------------------------------------------------------------------

def cmd_omega(cfg, args, out):
    _require(cfg, "domain")
    d, A = _domain(cfg["domain"])
    opts = _sampler(cfg, args)
    field = harmonic_measure.omega_field(d, A, _grid(cfg), opts)
    field.to_csv(out / "omega_field.csv")
    write_json(out / "omega_summary.json", {
        "domain": domains.domain_to_descriptor(d, A), "method": field.method,
        "points": int(field.inside.sum()), "seed": opts.seed, "n": opts.n})
    return EXIT_OK


def _cross_spec(cfg, args):
    _require(cfg, "D", "G")
    D, A = _domain(cfg["D"])
    G, B = _domain(cfg["G"])
    opts = _sampler(cfg, args)
    try:
        return cross.CrossSpec(D, A, G, B, opts, opts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_wedge(cfg, args, out):
    spec = _cross_spec(cfg, args)
    w = complex(*cfg.get("w", [0.0, 0.0]))
    sl = cross.wedge_slice(spec, w, _grid(cfg))
    sl.to_csv(out / "wedge_slice.csv")
    counts = {v.value: int(sum(x is v for x in sl.verdicts[sl.inside])) for v in Verdict}
    write_json(out / "wedge_summary.json", {"w": w, "verdicts": counts, **spec.descriptor()})
    return EXIT_OK


def cmd_poletsky(cfg, args, out):
    _require(cfg, "open_set", "points")
    region, _ = _domain(cfg.get("domain", {"kind": domains.DISC}), need_arcs=False)
    A = poletsky.OpenDiscUnion(tuple((complex(x, y), r) for x, y, r in cfg["open_set"]))
    u = poletsky.ComplementIndicator(A)
    seed = args.seed if args.seed is not None else cfg.get("sampler", {}).get("seed", 0)
    threads = args.threads or cfg.get("sampler", {}).get("threads", 1)
    oracle = None
    if cfg.get("oracle", False):
        if region.kind != domains.DISC:
            raise ConfigError("the grid oracle is available on the unit disc only")
        oracle = poletsky.grid_relative_extremal(A.contains, h=0.01, zero_circles=A.discs)
    results = []
    for k, (x, y) in enumerate(cfg["points"]):
        res = poletsky.poisson_functional_estimate(
            u, complex(x, y), region, budget=cfg.get("budget", 10_000),
            seed=poletsky.streams.derive_seed(seed, k), m=cfg.get("m", poletsky.DEFAULT_M),
            family=cfg.get("family", "auto"), threads=threads)
        rec = {"z": complex(x, y), **res.to_dict()}
        if oracle is not None:
            rec["oracle"] = float(oracle(complex(x, y))[0])
        results.append(rec)
    write_json(out / "poletsky.json", {"seed": seed, "results": results})
    return EXIT_OK


def cmd_extend(cfg, args, out):
    _require(cfg, "D", "G", "function")
    spec = _cross_spec(cfg, args)
    f = _function(cfg["function"])
    fc = cfg.get("fit", {})
    seed = spec.opts_D.seed
    counts = fc.get("counts") or cross.default_counts(spec, fc.get("samples", 2000))
    samples = cross.sample_cross(spec, f, counts, seed=seed)
    fit = extension.fit_extension(samples, fc.get("p", 12), fc.get("q", 12),
                                  fc.get("ridge", extension.DEFAULT_RIDGE))
    samples.to_jsonl(out / "cross_samples.jsonl")
    fit.to_json(out / "fit.json")
    records = []
    for z, w in extension.wedge_probes(spec, fc.get("probes", 100), seed=seed + 1):
        c = extension.certify_error(fit, spec, z, w)
        records.append({"z": z, "w": w, "omega_sum": c.omega_sum, "bound": c.bound,
                        "actual_err": abs(c.value - complex(f(z, w)))})
    extension.write_certification_csv(out / "certification.csv", records)
    return EXIT_OK


# -- verification suites ----------------------------------------------------------------

def _disc():
    return domains.make_unit_disc()


def suite_closed_forms(opts):
    E = _disc()
    worst = 0.0
    for theta in (math.pi / 6, math.pi / 2, math.pi, 3 * math.pi / 2):
        v = harmonic_measure.omega_disc(0j, domains.ArcSet(E, [(0.0, theta)])).value
        worst = max(worst, abs(v - (1 - theta / (2 * math.pi))))
    return {"max_error": worst, "passed": worst < 1e-10}


def suite_wos(opts):
    E = _disc()
    A = domains.ArcSet(E, [(0.0, math.pi)])
    pts = extension.vogel_points(10, 0.9)
    worst, max_se = 0.0, 0.0
    ok = True
    for k, z in enumerate(pts):
        est = harmonic_measure.omega_wos(z, E, A, n=100_000, seed=opts.seed + k,
                                         threads=opts.threads)
        ref = harmonic_measure.omega_disc(z, A).value
        ok &= abs(est.value - ref) <= 3 * est.stderr and est.stderr < 0.005
        worst = max(worst, abs(est.value - ref) / max(est.stderr, 1e-300))
        max_se = max(max_se, est.stderr)
    return {"max_sigmas": worst, "max_stderr": max_se, "passed": bool(ok)}


def suite_level_identity(opts, eps_values=(0.25, 0.5)):
    E = _disc()
    A = domains.ArcSet(E, [(0.0, math.pi)])
    recs = []
    for eps in eps_values:
        pts = [z for z in extension.vogel_points(80, 0.9)
               if harmonic_measure.disc_omega_exact(z, A) < 0.9 * (1 - eps)][:5]
        recs += harmonic_measure.verify_level_identity(E, A, eps, pts, n=100_000,
                                                       seed=opts.seed, threads=opts.threads)
    worst = max(r["rel_err"] for r in recs)
    return {"max_rel_err": worst, "records": recs, "passed": worst < 0.02}


def suite_boundary_limit(opts):
    E = _disc()
    A = domains.ArcSet(E, [(-math.pi / 2, math.pi / 2)])
    disc = harmonic_measure.boundary_limit_check(E, A, 0.0, [1 - 2.0 ** -k for k in range(1, 13)])
    S = domains.make_slit_square(0.5)
    AS = domains.ArcSet(S, [(8.0, 10.0)])
    o = OmegaOptions(n=4000, seed=opts.seed, threads=opts.threads)
    up = harmonic_measure.boundary_limit_check(S, AS, 8.5, [1j * 2.0 ** -k for k in range(1, 13)], o)
    down = harmonic_measure.boundary_limit_check(S, AS, 9.5, [-1j * 2.0 ** -k for k in range(1, 13)], o)
    reps = {"disc": disc, "slit_upper": up, "slit_lower": down}
    return {**{k: {"final": r["final"], "passed": r["passed"]} for k, r in reps.items()},
            "passed": all(r["passed"] for r in reps.values())}


def suite_open_subset(opts, count=50):
    reps = [poletsky.open_subset_check(T, h=0.02)
            for T in poletsky.random_disc_subsets(count, seed=opts.seed)]
    worst = min(r["margin"] for r in reps)
    return {"configs": count, "min_margin": worst, "passed": worst >= -1e-2}


def suite_poletsky(opts):
    E = _disc()
    u = poletsky.ComplementIndicator(poletsky.OpenDiscUnion(((0j, 0.25),)))
    res = poletsky.poisson_functional_estimate(u, 0.5, E, budget=10_000, seed=opts.seed)
    exact = math.log(2.0) / math.log(4.0)
    return {"estimate": res.value, "target": exact, "feasibility": res.feasibility,
            "passed": bool(exact - 2.0 / poletsky.DEFAULT_M <= res.value <= 0.55)}


def suite_types(opts):
    S = domains.make_slit_square(0.5)
    rng = np.random.default_rng(opts.seed)
    square = rng.uniform(0.0, 8.0, 500)
    slit = rng.uniform(8.0, 10.0, 500)
    slit = slit[(slit != 8.0) & (slit != 9.0)]
    t1 = all(domains.classify_boundary_point(S, t) is domains.BoundaryPointType.TYPE1 for t in square)
    t2 = all(domains.classify_boundary_point(S, t) is domains.BoundaryPointType.TYPE2 for t in slit)
    return {"passed": bool(t1 and t2)}


def _half_specs():
    E = _disc()
    out = {}
    for name, arc in (("right", (-math.pi / 2, math.pi / 2)), ("left", (math.pi / 2, 3 * math.pi / 2))):
        out[name] = cross.CrossSpec(E, domains.ArcSet(E, [arc]), E, domains.ArcSet(E, [arc]))
    return out


_TEST_FUNCTIONS = {"exp_sum": _function({"name": "exp_sum"}),
                   "rational": _function({"name": "rational"})}


def suite_extension(opts):
    out = {"passed": True}
    for name, spec in _half_specs().items():
        for fname, f in _TEST_FUNCTIONS.items():
            fit = extension.fit_extension(
                cross.sample_cross(spec, f, cross.default_counts(spec, 2000), seed=opts.seed), 12, 12)
            bad = 0
            for z, w in extension.wedge_probes(spec, 100, seed=opts.seed + 1):
                c = extension.certify_error(fit, spec, z, w)
                bad += abs(c.value - f(z, w)) > c.bound
            ok = bad == 0 and fit.eps_W <= 1e-4
            out[f"{name}/{fname}"] = {"eps_W": fit.eps_W, "violations": bad, "passed": ok}
            out["passed"] &= ok
    return out


def suite_two_constants(opts):
    out = {"passed": True}
    for name, spec in _half_specs().items():
        for fname, f in _TEST_FUNCTIONS.items():
            rep = extension.two_constants_report(f, spec)
            ok = not rep["violations"]
            out[f"{name}/{fname}"] = {"checked": rep["checked"], "max_excess": rep["max_excess"],
                                      "passed": ok}
            out["passed"] &= ok
    return out


def suite_uniqueness(opts):
    out = {"passed": True}
    for name, spec in _half_specs().items():
        probes = extension.wedge_probes(spec, 50, seed=opts.seed + 7)
        rep = extension.uniqueness_check(spec, _TEST_FUNCTIONS["rational"], opts.seed,
                                         opts.seed + 1, 12, 12, cross.default_counts(spec, 2000),
                                         probes)
        out[name] = {"probes": len(rep["records"]), "passed": rep["passed"]}
        out["passed"] &= rep["passed"]
    return out


def suite_determinism(opts):
    S = domains.make_slit_square(0.5)
    A = domains.ArcSet(S, [(8.0, 10.0)])
    runs = [harmonic_measure.omega_wos(0.3 + 0.4j, S, A, n=20_000, seed=opts.seed, threads=t)
            for t in (1, 4, 8)]
    E = _disc()
    lv = [harmonic_measure.wos_level_set(
        0.2j, E, domains.ArcSet(E, [(0.0, math.pi)]), 0.3,
        lambda p: harmonic_measure.disc_omega_exact(p, domains.ArcSet(E, [(0.0, math.pi)])),
        20_000, seed=opts.seed, threads=t) for t in (1, 4, 8)]
    return {"passed": bool(runs[0] == runs[1] == runs[2] and lv[0] == lv[1] == lv[2])}


SUITES = {name: globals()[f"suite_{name}"] for name in _SUITES}


def cmd_verify(cfg, args, out):
    opts = _sampler(cfg, args)
    names = cfg.get("suites", list(SUITES))
    report = {}
    for name in names:
        t0 = time.perf_counter()
        kwargs = {"eps_values": tuple(cfg["eps"])} if name == "level_identity" and "eps" in cfg else {}
        rep = SUITES[name](opts, **kwargs)
        report[name] = rep
        print(f"{name}: {'pass' if rep['passed'] else 'FAIL'} ({time.perf_counter() - t0:.1f} s)",
              file=sys.stderr)
    passed = all(r["passed"] for r in report.values())
    write_json(out / "verify.json", {"passed": passed, "seed": opts.seed, "suites": report})
    return EXIT_OK if passed else EXIT_VERIFY


HANDLERS = {"omega": cmd_omega, "wedge": cmd_wedge, "poletsky": cmd_poletsky,
            "extend": cmd_extend, "verify": cmd_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="crosswedge", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", help="JSON experiment config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="output directory (default: config 'output' or '.')")
    p.add_argument("--threads", type=int, default=None, help="worker cap; results do not change")
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if cfg.setdefault("command", args.command) != args.command:
            raise ConfigError(f"config is for '{cfg['command']}', not '{args.command}'")
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        out = Path(args.out or cfg.get("output", "."))
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[args.command](cfg, args, out)
    except ConfigError as exc:
        print(f"crosswedge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"crosswedge: numerical failure in '{args.command}': {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
