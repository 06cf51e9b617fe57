"""``ra-bergman``: command-line front end.

Every subcommand reads a JSON config (``--config``) and/or flags generated
from its schema; the merged config is validated before anything runs.
Exit codes: 0 ok, 1 numerical FAIL, 2 invalid config.
"""

import argparse
import json
import math
import os
import sys
from contextlib import nullcontext
from importlib import resources

import jsonschema
import numpy as np

from . import discs, estimates, generator, moments, pde, space, suite
from .exceptions import (
    ConstructionFailureError,
    DegenerateInputError,
    EvaluationError,
    InvalidCurveError,
    InvalidInputError,
    InvalidParameterError,
    NotAMemberError,
    NumericalBreakdownError,
    NumericalOverflowError,
    OutOfDiscError,
    SearchFailureError,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("gen", "moments", "extend", "lift", "gram", "kernel", "eval-bound", "project", "fock-compare",
            "disc", "rays", "growth", "annulus-bound", "pde", "suite")


class ConfigError(Exception):
    pass


def load_schema(command):
    text = resources.files("ra_bergman").joinpath("schemas", f"{command}.json").read_text()
    return json.loads(text)


# --- flag parsing ---------------------------------------------------------

def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _point(text):
    v = _floats(text)
    if len(v) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    return v


def _points(text):
    return [_point(p) for p in text.split(";") if p.strip()]


def _complexes(text):
    out = []
    for part in text.split(","):
        c = complex(part.strip().replace("i", "j"))
        out.append(c.real if c.imag == 0 else [c.real, c.imag])
    return out


def _zeroset_arg(text):
    """A path, or an inline JSON object such as ``{"kind": "triple", "radius": 6}``."""
    return json.loads(text) if text.lstrip().startswith("{") else text


def _flag_value(prop, text):
    kind = prop.get("x-cli")
    if kind == "floats":
        vals = _floats(text)
        if prop.get("items", {}).get("type") == "integer":
            if any(v != int(v) for v in vals):
                raise ValueError(f"expected integers, got {text!r}")
            vals = [int(v) for v in vals]
        return vals
    if kind == "strings":
        return [s.strip() for s in text.split(",") if s.strip()]
    if kind == "point":
        return _point(text)
    if kind == "points":
        return _points(text)
    if kind == "complexes":
        return _complexes(text)
    if kind == "zeroset":
        return _zeroset_arg(text)
    t = prop.get("type")
    if t == "integer" or (prop.get("enum") and all(isinstance(e, int) for e in prop["enum"])):
        return int(text)
    if t == "number":
        return float(text)
    return text


def build_parser():
    parser = argparse.ArgumentParser(prog="ra-bergman", description="Real-analytic Bergman space experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        schema = load_schema(cmd)
        p = sub.add_parser(cmd, help=schema.get("title"))
        p.add_argument("--config", help="JSON config file (flags override its keys)")
        for key, prop in schema["properties"].items():
            flag = "--" + key.replace("_", "-")
            if prop.get("type") == "boolean":
                p.add_argument(flag, dest=key, action="store_const", const=True, default=None)
            else:
                p.add_argument(flag, dest=key, default=None, metavar=key.upper())
    return parser


def resolve_config(command, args):
    schema = load_schema(command)
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    for key, prop in schema["properties"].items():
        raw = getattr(args, key, None)
        if raw is None:
            continue
        if prop.get("type") == "boolean":
            cfg[key] = True
            continue
        try:
            cfg[key] = _flag_value(prop, raw)
        except ValueError as exc:
            raise ConfigError(f"--{key.replace('_', '-')}: {exc}") from exc
    validate_config(command, cfg, schema)
    return cfg


def validate_config(command, cfg, schema=None):
    schema = schema or load_schema(command)
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            path = ".".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{command}.{path}: {e.message}")
        raise ConfigError("; ".join(lines))


# --- shared helpers -------------------------------------------------------

def _c(p):
    return complex(p[0], p[1]) if isinstance(p, (list, tuple)) else complex(p)


def _cs(pts):
    return np.array([_c(p) for p in pts], dtype=complex)


def _num(x):
    x = complex(x)
    return [float(x.real), float(x.imag)]


def make_zeroset(spec, spacing=math.pi):
    if spec is None:
        return None
    if isinstance(spec, str):
        try:
            return generator.ZeroSet.load(spec)
        except OSError as exc:
            raise ConfigError(f"cannot read zero set {spec}: {exc}") from exc
    kind = spec["kind"]
    if kind == "triple":
        return generator.triple_lattice(spec.get("spacing", spacing), spec["radius"])
    if kind == "disc":
        return generator.disc_zero_set(spec["n_max"], spec.get("k", 1))
    if kind == "pentagon":
        return pentagon(spec["radius"])
    return generator.ZeroSet(_cs(spec["points"]))


def pentagon(radius):
    pts = radius * np.exp(2j * math.pi * np.arange(5) / 5)
    return generator.ZeroSet(pts, "explicit", {"pentagon_radius": float(radius)})


def make_generator(cfg):
    zs = make_zeroset(cfg.get("zeroset"), cfg.get("spacing", math.pi))
    if zs is None:
        return generator.TripleSineGenerator(cfg.get("spacing", math.pi)), None
    return generator.generator_for(zs), zs


def make_fn(name, gen):
    f = moments.named_function(name, gen)
    if name in ("zbar_g", "g") and f.log_abs is None:
        f = moments.FunctionHandle(f.evaluator, f.label,
                                   log_abs=lambda z: np.log(np.abs(z)) + gen.log_polar(z)[0])
    return f


def _model(cfg, gen):
    return space.BergmanKernelModel(
        gen, cutoff=cfg.get("cutoff", 9), degree_weight=cfg.get("degree_weight", 3),
        max_m=cfg.get("max_m"), max_n=cfg.get("max_n"), weight=cfg.get("weight", "gaussian"),
        grid_radius=cfg.get("grid_radius"), n_r=cfg.get("n_r", 160), n_theta=cfg.get("n_theta", 256),
        drop_tol=cfg.get("drop_tol", space.DEFAULT_DROP_TOL)).fit()


def _default_points():
    x = np.linspace(-1.0, 1.0, 3)
    return (x[:, None] + 1j * x[None, :]).ravel()


def emit(cfg, text, default_stream=None):
    """Write ``text`` to ``cfg['out']`` or stdout."""
    path = cfg.get("out")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        (default_stream or sys.stdout).write(text)


def _plain(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dump(obj):
    return json.dumps(obj, indent=1, sort_keys=True, default=_plain) + "\n"


# --- subcommands ----------------------------------------------------------

def cmd_gen(cfg):
    kind = cfg["kind"]
    if kind == "triple":
        X = generator.triple_lattice(cfg.get("spacing", math.pi), cfg.get("radius", 6.0))
    elif kind == "disc":
        X = generator.disc_zero_set(cfg.get("n_max", 3), cfg.get("k", 1))
    else:
        X = pentagon(cfg.get("radius", 0.5))
    emit(cfg, dump(X.to_dict()))
    return EXIT_OK


def cmd_moments(cfg):
    gen, X = make_generator(cfg)
    X = X or generator.triple_lattice(getattr(gen, "spacing", math.pi), 4.0)
    spacing = getattr(gen, "spacing", 1.0)
    radii = cfg.get("radii") or [f * spacing for f in (0.25, 0.5, 1.0, 2.0)]
    n_f = cfg.get("n_f", moments.DEFAULT_N_F)
    rep = moments.membership_test(make_fn(cfg["fn"], gen), X, radii, cfg.get("tol", moments.DEFAULT_TOL),
                                  cfg.get("n_theta", max(moments.DEFAULT_N_THETA, 4 * n_f + 16)), n_f)
    emit(cfg, rep.to_csv())
    sys.stderr.write(f"membership {'PASS' if rep.passed else 'FAIL'}: worst relative mass {rep.worst:.3e}\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_extend(cfg):
    gen, _ = make_generator(cfg)
    a = _c(cfg.get("center", [0, 0]))
    spec = moments.circle_moments(make_fn(cfg["fn"], gen), a, cfg["radius"])
    vals = moments.holo_extension(spec, _cs(cfg["at"]), cfg.get("tol", moments.DEFAULT_TOL))
    emit(cfg, dump({"center": _num(a), "radius": cfg["radius"], "max_negative": spec.max_negative,
                    "values": [{"z": _num(z), "value": _num(v)} for z, v in zip(_cs(cfg["at"]), vals)]}))
    return EXIT_OK


def cmd_lift(cfg):
    gen, _ = make_generator(cfg)
    a = _c(cfg.get("center", [0, 0]))
    t = cfg["t"]
    zs = _cs(cfg["at"])
    vals = moments.cr_lift(make_fn(cfg["fn"], gen), a, t, zs, cfg.get("tol", moments.DEFAULT_TOL))
    rows = []
    for z, v in zip(zs, vals):
        _, w = moments.leaf_point(a, t, z)
        rows.append({"z": _num(z), "w": _num(w), "value": _num(v)})
    emit(cfg, dump({"center": _num(a), "t": t, "values": rows}))
    return EXIT_OK


def cmd_gram(cfg):
    gen, _ = make_generator(cfg)
    m = _model(cfg, gen)
    G = m.gram_
    emit(cfg, dump({
        "index": [list(map(int, p)) for p in m.basis_.index.pairs], "size": G.size, "rank": m.rank_,
        "dropped": [list(map(int, m.basis_.index.pairs[i])) for i in m.kernel_.dropped],
        "condition": G.condition, "min_eigenvalue": G.min_eigenvalue, "grid": m.grid_.to_dict(),
        "log_scales": [float(s) for s in G.log_scales],
    }))
    return EXIT_OK


def cmd_kernel(cfg):
    gen, _ = make_generator(cfg)
    m = _model(cfg, gen)
    pts = _cs(cfg["points"]) if "points" in cfg else _default_points()
    emit(cfg, space.kernel_table(m.kernel_, pts, pts))
    Km = m.kernel(pts, pts)
    herm = float(np.max(np.abs(Km - Km.conj().T)))
    sys.stderr.write(f"kernel rank {m.rank_}, hermitian defect {herm:.3e}\n")
    return EXIT_OK


def cmd_eval_bound(cfg):
    gen, _ = make_generator(cfg)
    m = _model(cfg, gen)
    pts = _cs(cfg["points"])
    b = m.point_eval_bound(pts)
    emit(cfg, dump({"rank": m.rank_, "label": "model-space constant",
                    "bounds": [{"z": _num(z), "C_z": float(v)} for z, v in zip(pts, b)]}))
    return EXIT_OK


def cmd_project(cfg):
    gen, _ = make_generator(cfg)
    m = _model(cfg, gen)
    f = make_fn(cfg["fn"], gen)
    Tf = m.project(f)
    TTf = m.project(Tf)
    pts = _cs(cfg["points"]) if "points" in cfg else _default_points()
    fv, tv, ttv = f(pts), Tf(pts), TTf(pts)
    emit(cfg, dump({
        "fn": cfg["fn"], "rank": m.rank_,
        "idempotence_defect": float(np.max(np.abs(ttv - tv))),
        "values": [{"z": _num(z), "f": _num(a), "Tf": _num(b)} for z, a, b in zip(pts, fv, tv)],
    }))
    return EXIT_OK


def cmd_fock_compare(cfg):
    base = generator.TripleSineGenerator(cfg.get("spacing", math.pi))
    res = space.kernel_convergence_experiment(cfg["n"], cfg.get("max_m", 8), cfg.get("max_n", 2), base=base,
                                              weight=cfg.get("weight", "gaussian"),
                                              drop_tol=cfg.get("drop_tol", space.DEFAULT_DROP_TOL))
    emit(cfg, dump(res))
    return EXIT_OK


def cmd_disc(cfg):
    if "select" in cfg:
        a, b, c, d = cfg["select"]
        D = discs.select_separated_disc((complex(a, b), complex(c, d)), cfg.get("eps", 0.1), cfg.get("R1", 10.0))
    else:
        D = discs.make_disc(*cfg.get("params", [0.0, 1.0, 0.0, 1.0]), n=cfg.get("samples", 512))
    out = {"center": [_num(D.center[0]), _num(D.center[1])],
           "first": vars(D.first), "second": vars(D.second), "report": D.report}
    if cfg.get("check"):
        z0, w0 = D.center
        tests = {"1": lambda z, w: 1 + 0 * z, "z": lambda z, w: z, "w": lambda z, w: w, "zw": lambda z, w: z * w}
        out["cauchy_errors"] = {k: abs(discs.cauchy_eval(F, D) - F(z0, w0)) for k, F in tests.items()}
        if max(out["cauchy_errors"].values()) > 1e-8:
            emit(cfg, dump(out))
            return EXIT_FAIL
    emit(cfg, dump(out))
    return EXIT_OK


def cmd_rays(cfg):
    X = make_zeroset(cfg["zeroset"])
    ok, d = discs.five_point_predicate(X.points, _c(cfg["at"]))
    emit(cfg, dump({"verdict": ok, "directions": [float(x) for x in d],
                    "max_gap": float(np.max(np.diff(np.concatenate([d, [d[0] + 2 * math.pi]]))))}))
    return EXIT_OK


def cmd_growth(cfg):
    gen, _ = make_generator(cfg)
    r = np.linspace(cfg.get("rmin", 2.0), cfg.get("rmax", 20.0), cfg.get("n_radii", 37))
    rep = estimates.growth_profile(make_fn(cfg["fn"], gen), r, cfg.get("t"), cfg.get("n_theta", 256),
                                   cfg.get("discard", 3))
    emit(cfg, rep.to_csv())
    sys.stdout.write(dump(rep.to_dict())) if cfg.get("out") else sys.stderr.write(dump(rep.to_dict()))
    return EXIT_OK


def cmd_annulus_bound(cfg):
    Y = pentagon(cfg.get("pentagon_radius", 0.5))
    gen = generator.ProductGenerator(Y)
    p, r1, r2 = cfg.get("p", 3.0), cfg.get("r1", 1.0), cfg.get("r2", 2.0)
    rows = []
    for name in cfg["fn"]:
        ratio = estimates.annulus_bound_ratio(make_fn(name, gen), Y, p, r1, r2, tol=cfg.get("tol", moments.DEFAULT_TOL))
        rows.append({"fn": name, "ratio": ratio})
    emit(cfg, dump({"p": p, "r1": r1, "r2": r2, "ratios": rows, "empirical_C": max(r["ratio"] for r in rows)}))
    return EXIT_OK


def cmd_pde(cfg):
    gen, X = make_generator(cfg)
    st = pde.transport_solve([_c(u) for u in cfg["U"]], gen)
    ts = cfg.get("t", [0.0, 0.5, 1.0])
    R = cfg.get("grid_radius", 2.0)
    x = np.linspace(-R, R, 21)
    z = (x[:, None] + 1j * x[None, :]).ravel()
    z = z[np.abs(z) <= R]
    res = pde.pde_residual(st, z, ts, cfg.get("h", 1e-4), cfg.get("order", 4))
    probe = np.array([0.7 + 0.3j])
    table = [{"k": k, "degree_in_t": st.degree_in_t(k),
              "t_coefficients_at_probe": [_num(c[0]) for c in st.t_coefficients(k, probe)]} for k in range(st.m + 1)]
    out = {"m": st.m, "coefficients": table, "residual": res, "probe": _num(probe[0])}
    ok = res < cfg.get("residual_tol", 1e-7)
    if cfg.get("check_membership"):
        X = X or generator.triple_lattice(getattr(gen, "spacing", math.pi), 4.0)
        mem = pde.evolve_membership_check(st, X, ts, cfg.get("radii", [0.5, 1.0, 2.0]),
                                          cfg.get("tol", moments.DEFAULT_TOL))
        out["membership"] = {str(t): {"passed": r.passed, "worst": r.worst} for t, r in mem["reports"].items()}
        ok = ok and mem["passed"]
    out["passed"] = ok
    emit(cfg, dump(out))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_suite(cfg):
    res = suite.run(cfg["name"])
    emit(cfg, suite.dumps(res) + "\n")
    return EXIT_OK if res["passed"] else EXIT_FAIL


HANDLERS = {
    "gen": cmd_gen, "moments": cmd_moments, "extend": cmd_extend, "lift": cmd_lift, "gram": cmd_gram,
    "kernel": cmd_kernel, "eval-bound": cmd_eval_bound, "project": cmd_project,
    "fock-compare": cmd_fock_compare, "disc": cmd_disc, "rays": cmd_rays, "growth": cmd_growth,
    "annulus-bound": cmd_annulus_bound, "pde": cmd_pde, "suite": cmd_suite,
}

_FAIL_ERRORS = (NotAMemberError, OutOfDiscError, ConstructionFailureError, SearchFailureError,
                NumericalBreakdownError, NumericalOverflowError, EvaluationError, DegenerateInputError)
_CONFIG_ERRORS = (InvalidParameterError, InvalidInputError, InvalidCurveError)


def thread_limit():
    """Context manager capping BLAS/OpenMP threads at ``RA_BERGMAN_THREADS`` if set."""
    raw = os.environ.get("RA_BERGMAN_THREADS")
    if raw is None or raw == "":
        return nullcontext()
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        raise ConfigError(f"RA_BERGMAN_THREADS must be a positive integer, got {raw!r}") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def run(command, cfg):
    """Validate ``cfg`` and execute one subcommand; returns the exit code."""
    try:
        validate_config(command, cfg)
        with thread_limit():
            return HANDLERS[command](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return EXIT_CONFIG
    except _CONFIG_ERRORS as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return EXIT_CONFIG
    except _FAIL_ERRORS as exc:
        sys.stderr.write(f"FAIL: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
    except ConfigError as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return EXIT_CONFIG
    return run(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
