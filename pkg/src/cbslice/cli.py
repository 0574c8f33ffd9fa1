"""Command line front end: TOML problem specs in, JSON reports out.

Commands: analyze, tube-eval, verify, simulate.  Exit status is 0 when every
check passes, 1 when a check fails and 2 for usage or spec errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import dynamics
from .actions import standard_representation
from .harness import CheckLog, Options, run_all
from .liealg import LieAlgebraError, direct_product, so2, so3, special_orthogonal, torus, trivial_group
from .normalform import (
    NormalFormError,
    splitting_alpha0,
    splitting_K_subset_Gmu,
    symplectic_normal_space,
    tangent_level_chain,
    witt_artin,
)
from .slices import SliceError, build_slice_chart, check_case_flags
from .tube import ModelPoint, OutOfScopeError, TubeChart, TubeDomainError

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class SpecError(ValueError):
    """Invalid problem spec; ``errors`` lists every problem found."""

    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


# -- spec ------------------------------------------------------------------

GROUP_IDS = ("SO2", "SO3", "SO", "T", "trivial", "product")
HAMILTONIAN_IDS = ("free", "central", "zero")


@dataclass
class ProblemSpec:
    group: dict
    representation: dict
    q: list
    p: list
    options: Options = field(default_factory=Options)
    hamiltonian: dict = field(default_factory=lambda: {"id": "free"})
    simulation: dict = field(default_factory=dict)
    source: str = ""

    def build_group(self):
        return _build_group(self.group)

    def build_action(self):
        r = self.representation
        return standard_representation(self.build_group(), r.get("copies", 1), r.get("trivial", 0))

    def echo(self):
        return {
            "group": self.group,
            "representation": self.representation,
            "q": self.q,
            "p": self.p,
            "options": vars(self.options),
            "hamiltonian": self.hamiltonian,
            "simulation": self.simulation,
        }


def _build_group(entry):
    gid = entry.get("id")
    if gid == "SO2":
        return so2()
    if gid == "SO3":
        return so3()
    if gid == "SO":
        return special_orthogonal(int(entry["n"]))
    if gid == "T":
        return torus(int(entry["k"]))
    if gid == "trivial":
        return trivial_group(int(entry["n"]))
    if gid == "product":
        return direct_product(*[_build_group(f) for f in entry["factors"]])
    raise LieAlgebraError(f"unknown group id {gid!r}")


def _group_errors(entry, where="group"):
    errs = []
    if not isinstance(entry, dict):
        return [f"{where}: expected a table"]
    gid = entry.get("id")
    if gid not in GROUP_IDS:
        return [f"{where}.id: unknown group id {gid!r} (expected one of {', '.join(GROUP_IDS)})"]
    if gid == "SO" and not (isinstance(entry.get("n"), int) and entry["n"] >= 2):
        errs.append(f"{where}.n: SO needs an integer n >= 2")
    if gid == "trivial" and not (isinstance(entry.get("n"), int) and entry["n"] >= 1):
        errs.append(f"{where}.n: trivial needs an integer n >= 1")
    if gid == "T" and not (isinstance(entry.get("k"), int) and entry["k"] >= 1):
        errs.append(f"{where}.k: T needs an integer k >= 1")
    if gid == "product":
        factors = entry.get("factors")
        if not isinstance(factors, list) or not factors:
            errs.append(f"{where}.factors: product needs a non-empty list of groups")
        else:
            for i, f in enumerate(factors):
                errs.extend(_group_errors(f, f"{where}.factors[{i}]"))
    return errs


def _number_list(value, name, errs):
    if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        errs.append(f"{name}: expected a list of numbers")
        return None
    return [float(v) for v in value]


def validate_spec(data, source=""):
    """Turn a parsed TOML document into a ProblemSpec, collecting every error."""
    errs = []
    group = data.get("group")
    if group is None:
        errs.append("group: missing table")
    else:
        errs.extend(_group_errors(group))
    rep = data.get("representation", {"id": "standard"})
    if not isinstance(rep, dict) or rep.get("id", "standard") != "standard":
        errs.append(f"representation.id: unknown representation {rep.get('id') if isinstance(rep, dict) else rep!r} (expected 'standard')")
        rep = {"id": "standard"}
    rep = {"id": "standard", "copies": rep.get("copies", 1), "trivial": rep.get("trivial", 0)}
    for key in ("copies", "trivial"):
        if not isinstance(rep[key], int) or rep[key] < 0:
            errs.append(f"representation.{key}: expected a non-negative integer")
    if isinstance(rep["copies"], int) and isinstance(rep["trivial"], int) and rep["copies"] + rep["trivial"] == 0:
        errs.append("representation: dimension must be positive")

    point = data.get("point", {})
    q = p = None
    if not isinstance(point, dict):
        errs.append("point: expected a table")
        point = {}
    for key in ("q", "p"):
        if key not in point:
            errs.append(f"point.{key}: missing")
    if "q" in point:
        q = _number_list(point["q"], "point.q", errs)
    if "p" in point:
        p = _number_list(point["p"], "point.p", errs)

    dimQ = None
    if group is not None and not _group_errors(group) and not any(e.startswith("representation") for e in errs):
        try:
            dimQ = rep["copies"] * _build_group(group).n + rep["trivial"]
        except (LieAlgebraError, KeyError, ValueError) as exc:
            errs.append(f"group: {exc}")
    for name, vec in (("point.q", q), ("point.p", p)):
        if dimQ is not None and vec is not None and len(vec) != dimQ:
            errs.append(f"{name}: dimension mismatch, length {len(vec)} but the representation acts on R^{dimQ}")

    raw = data.get("options", {})
    opts = Options()
    known = {"seed": int, "tol": float, "tol_fd": float, "samples": int, "fd_step": float}
    for key, value in raw.items():
        if key not in known:
            errs.append(f"options.{key}: unknown option")
            continue
        kind = known[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or (kind is int and not isinstance(value, int)):
            errs.append(f"options.{key}: expected {kind.__name__}")
            continue
        setattr(opts, key, kind(value))
    for key in ("tol", "tol_fd", "fd_step"):
        if not getattr(opts, key) > 0:
            errs.append(f"options.{key}: must be positive")
    if opts.samples < 1:
        errs.append("options.samples: must be at least 1")

    ham = data.get("hamiltonian", {"id": "free"})
    if not isinstance(ham, dict) or ham.get("id") not in HAMILTONIAN_IDS:
        errs.append(f"hamiltonian.id: unknown Hamiltonian (expected one of {', '.join(HAMILTONIAN_IDS)})")
    else:
        for key in ("mass", "coeff", "power"):
            if key in ham and (isinstance(ham[key], bool) or not isinstance(ham[key], (int, float))):
                errs.append(f"hamiltonian.{key}: expected a number")
        if isinstance(ham.get("mass", 1.0), (int, float)) and not ham.get("mass", 1.0) > 0:
            errs.append("hamiltonian.mass: must be positive")

    sim = data.get("simulation", {})
    if not isinstance(sim, dict):
        errs.append("simulation: expected a table")
        sim = {}
    if "dt" in sim and not (isinstance(sim["dt"], (int, float)) and sim["dt"] > 0):
        errs.append("simulation.dt: must be a positive number")
    if "steps" in sim and not (isinstance(sim["steps"], int) and sim["steps"] >= 1):
        errs.append("simulation.steps: must be an integer >= 1")
    if errs:
        raise SpecError(errs)
    return ProblemSpec(group, rep, q, p, opts, ham, sim, source)


def parse_spec(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError([f"cannot read spec file {path}: {exc.strerror}"]) from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError([f"malformed TOML in {path}: {exc}"]) from exc
    return validate_spec(data, str(path))


# -- serialization -----------------------------------------------------------


def _encode(obj):
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(json.dumps(k) + ": " + _encode(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report):
    """Deterministic JSON: sorted keys, 17 significant digits, non-finite as strings."""
    return _encode(report) + "\n"


# -- commands ----------------------------------------------------------------


def _sub(s):
    return {"dim": s.dim, "basis": s.columns.T}


def _chart_summary(chart):
    return {
        "mu": chart.mu,
        "alpha": chart.alpha,
        "k": _sub(chart.k),
        "h": _sub(chart.h),
        "gmu": _sub(chart.gmu),
        "A": _sub(chart.A),
        "B": _sub(chart.B),
        "m": _sub(chart.m),
        "mk": _sub(chart.mk),
        "flags": check_case_flags(chart),
    }


def _build(spec: ProblemSpec):
    action = spec.build_action()
    return build_slice_chart(action, np.array(spec.q), np.array(spec.p))


def _tube_chart(spec: ProblemSpec, chart):
    return TubeChart(chart, seed=spec.options.seed)


def _report(command, spec, body, log: CheckLog | None = None):
    out = {"schema_version": SCHEMA_VERSION, "command": command, "spec": spec.echo(), "seed": spec.options.seed}
    out.update(body)
    if log is not None:
        out["checks"] = log.checks
        out["skipped"] = log.skipped
        out["summary"] = log.summary()
    return out


def run_analyze(spec: ProblemSpec):
    chart = _build(spec)
    opts = spec.options
    log = CheckLog()
    for name, r in chart.invariant_residuals().items():
        log.add("slices", name, r, opts.tol)
    nsd = symplectic_normal_space(chart)
    for name, r in nsd.invariant_residuals().items():
        log.add("normalform", f"Ns_{name}", r, opts.tol)
    wa = witt_artin(chart, nsd)
    normal = {
        "Ns_dim": nsd.dim,
        "kerdJ_dim": nsd.kerdJ.dim,
        "orbit_gmu_dim": nsd.orbit_gmu.dim,
        "omega_red": nsd.omega_red,
        "orbit_min_singular_value": nsd.min_singular,
        "witt_artin_dims": wa.dims(),
    }
    chain = tangent_level_chain(chart, nsd)
    flags = check_case_flags(chart)
    splits = {}
    for flag, builder, label in [("K_subset_Gmu", splitting_K_subset_Gmu, "K_subset_Gmu"), ("alpha_zero", splitting_alpha0, "alpha0")]:
        if flags[flag]:
            s = builder(chart, nsd, chain)
            splits[label] = {"matrix": s.matrix, "target_form": s.target_form, "congruence_residual": s.congruence_residual()}
            log.add("normalform", f"split_{label}_congruence", s.congruence_residual(), opts.tol)
    for name, s in chain.as_dict().items():
        log.add("normalform", f"chain_{name}_congruence", s.congruence_residual(), opts.tol)
    normal["splittings"] = splits
    body = {"chart": _chart_summary(chart), "normal_form": normal}
    if flags["Gmu_full"]:
        tc = _tube_chart(spec, chart)
        body["tube"] = {"U_bound": tc.U_bound, "base_condition": tc.condition(np.zeros(tc.dim_B)), "rho_max": tc.rho_max}
    else:
        body["tube"] = {"in_scope": False, "reason": "Gmu_full is false"}
    return _report("analyze", spec, body, log)


def parse_point(text):
    """Model point JSON: inline text or a path to a file."""
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError([f"point: malformed JSON ({exc.msg})"]) from exc
    if not isinstance(data, dict):
        raise SpecError(["point: expected a JSON object"])
    return data


def model_point_from_dict(tc: TubeChart, data):
    """Build a ModelPoint; nu may be given on m (length dim m) or on all of g."""
    G = tc.group
    errs = []
    if "g" in data and "xi" in data:
        errs.append("point: give either g or xi, not both")
    if "g" in data:
        g = np.array(data["g"], dtype=float)
        if g.shape != (G.n, G.n):
            errs.append(f"point.g: expected a {G.n}x{G.n} matrix")
        elif not G.is_member(g):
            errs.append("point.g: matrix is not in the group")
    elif "xi" in data:
        xi = np.array(data["xi"], dtype=float)
        if xi.shape != (G.dim,):
            errs.append(f"point.xi: expected {G.dim} algebra coordinates")
            g = None
        else:
            g = G.exp(xi)
    else:
        g = G.identity()
    nu = np.array(data.get("nu", np.zeros(tc.dim_m)), dtype=float)
    if nu.shape == (G.dim,):
        nu_m = tc.nu_coords(nu)
    elif nu.shape == (tc.dim_m,):
        nu_m = nu
    else:
        errs.append(f"point.nu: expected length {tc.dim_m} (on m) or {G.dim} (on g)")
        nu_m = None
    a = np.array(data.get("a", np.zeros(tc.dim_B)), dtype=float)
    delta = np.array(data.get("delta", np.zeros(tc.dim_B)), dtype=float)
    for name, v in (("a", a), ("delta", delta)):
        if v.shape != (tc.dim_B,):
            errs.append(f"point.{name}: expected length {tc.dim_B} (dimension of B)")
    if errs:
        raise SpecError(errs)
    return ModelPoint(g, nu_m, a, delta)


def run_tube_eval(spec: ProblemSpec, point: dict):
    chart = _build(spec)
    tc = _tube_chart(spec, chart)
    m = model_point_from_dict(tc, point)
    z = tc.tube_evaluate(m)
    alt = tc.tube_alternative(m)
    log = CheckLog()
    log.add("tube", "alternative_construction_agrees", np.abs(alt.flat() - z.flat()).max(), spec.options.tol)
    J = chart.action.momentum(z.point, z.covector)
    log.add("tube", "momentum_compatibility", np.abs(tc.model_momentum(m) - J).max(initial=0.0), spec.options.tol)
    body = {
        "model_point": {"g": m.g, "nu_m": m.nu, "a": m.a, "delta": m.delta},
        "q": z.point,
        "p": z.covector,
        "momentum": J,
        "gamma_condition": tc.condition(m.delta),
        "U_bound": tc.U_bound,
    }
    return _report("tube-eval", spec, body, log)


def run_verify(spec: ProblemSpec):
    chart = _build(spec)
    tc = _tube_chart(spec, chart) if check_case_flags(chart)["Gmu_full"] else None
    log = run_all(chart, spec.options, tc)
    body = {"chart": _chart_summary(chart)}
    if tc is not None:
        body["tube"] = {"U_bound": tc.U_bound}
    return _report("verify", spec, body, log)


def _hamiltonian(entry):
    hid = entry.get("id", "free")
    mass = float(entry.get("mass", 1.0))
    if hid == "free":
        return dynamics.free_particle(mass)
    if hid == "central":
        return dynamics.central_force(float(entry.get("coeff", 1.0)), float(entry.get("power", 2.0)), mass)
    return dynamics.zero_hamiltonian()


def _ratio(coarse, fine):
    return coarse / fine if fine > 0 else float("inf")


def run_simulate(spec: ProblemSpec, dt=None, steps=None):
    """Model flow against ambient flow at dt and dt/2, with drift diagnostics."""
    chart = _build(spec)
    tc = _tube_chart(spec, chart)
    sim = spec.simulation
    dt = float(sim.get("dt", 0.01) if dt is None else dt)
    steps = int(sim.get("steps", 100) if steps is None else steps)
    if dt <= 0 or steps < 1:
        raise SpecError(["simulate: dt must be positive and steps at least 1"])
    m0 = model_point_from_dict(tc, sim.get("initial", {}))
    hs = _hamiltonian(spec.hamiltonian)
    opts = spec.options
    log = CheckLog()
    log.add("dynamics", "hamiltonian_G_invariant", hs.invariance_residual(chart.action, opts.samples, opts.seed), opts.tol, opts.samples)
    runs = []
    for k in range(2):
        r = dynamics.compare_flows(tc, hs, m0, dt / 2**k, steps * 2**k)
        runs.append({key: r[key] for key in ("sup_error", "momentum_drift", "energy_drift")} | {"dt": dt / 2**k, "steps": steps * 2**k})
    ratio = _ratio(runs[0]["sup_error"], runs[1]["sup_error"])
    drift_ratio = _ratio(runs[0]["momentum_drift"], runs[1]["momentum_drift"])
    floor = float(sim.get("noise_floor", 1e-10))
    if runs[0]["sup_error"] > floor:
        log.add_bound("dynamics", "flow_order_ratio_above_10", ratio, 10.0)
        log.add("dynamics", "flow_order_ratio_below_24", ratio, 24.0)
    else:
        log.skip("dynamics", "flow_order", f"coarse sup_error {runs[0]['sup_error']:.3g} is below the noise floor {floor:.3g}")
    final = r["model"].model[-1]
    body = {
        "runs": runs,
        "sup_error_ratio": ratio,
        "momentum_drift_ratio": drift_ratio,
        "hamiltonian": hs.name,
        "final_model_state": {"g": final.g, "nu_m": final.nu, "a": final.a, "delta": final.delta},
    }
    return _report("simulate", spec, body, log)


# -- entry point ---------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="cbslice", description="Cotangent bundle slice computations.")
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="chart, normal space and splitting data")
    a.add_argument("--spec", required=True)
    a.add_argument("--out")
    t = sub.add_parser("tube-eval", help="evaluate the tube at a model point")
    t.add_argument("--spec", required=True)
    t.add_argument("--point", required=True, help="JSON object or path to a JSON file")
    t.add_argument("--out")
    v = sub.add_parser("verify", help="run every invariant suite on the chart")
    v.add_argument("--spec", required=True)
    v.add_argument("--seed", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--fd-step", type=float)
    v.add_argument("--out")
    s = sub.add_parser("simulate", help="integrate model and ambient flows")
    s.add_argument("--spec", required=True)
    s.add_argument("--dt", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--out")
    return parser


def _apply_overrides(spec, args):
    changes = {}
    for key in ("seed", "samples", "tol", "fd_step"):
        value = getattr(args, key, None)
        if value is not None:
            changes[key] = value
    if not changes:
        return spec
    opts = replace(spec.options, **changes)
    errs = [f"--{k.replace('_', '-')}: must be positive" for k in ("samples", "tol", "fd_step") if getattr(opts, k) <= 0]
    if errs:
        raise SpecError(errs)
    return replace(spec, options=opts)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        spec = _apply_overrides(parse_spec(args.spec), args)
        if args.command == "analyze":
            report = run_analyze(spec)
        elif args.command == "tube-eval":
            report = run_tube_eval(spec, parse_point(args.point))
        elif args.command == "verify":
            report = run_verify(spec)
        else:
            report = run_simulate(spec, args.dt, args.steps)
    except SpecError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OutOfScopeError, SliceError, NormalFormError, TubeDomainError, LieAlgebraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.get("summary", {}).get("all_passed", True) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
