"""Command-line front end: ``wigmagic <command> [options]``.

Every command writes its records to ``--output`` (CSV by default, JSON with
``--format json``), a ``<command>.summary.json`` summary carrying grids, seed,
tolerances and pass flags, and prints one summary line. Exit status is 0 on
success, 1 when a checked claim fails and 2 for usage or input errors.

Options may also come from a JSON ``--config`` file whose keys are the long
option names (dashes or underscores); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import families
from .families import FamilyId
from .measures import magic_report, stabilizer_extent, wigner_distance
from .phasespace import max_stab_l1, wigner
from .phasespace import write_csv as write_wigner_csv
from .qcore import DensityMatrix, PureState, bloch_state
from .stabgen import enumerate_stabilizers, expected_count, stabilizer_set

log = logging.getLogger("wigmagic")

DEFAULT_TOLERANCES = {"lp_gap": 1e-7, "closed_form": 1e-7, "assert": 1e-8}

COMMON_DEFAULTS = {
    "seed": 2024,
    "threads": 1,
    "output": "wigmagic-out",
    "format": "csv",
}

COMMAND_DEFAULTS = {
    "enumerate-stabilizers": {"n": 2},
    "wigner": {"state": "t-state"},
    "distance": {"state": "t-state"},
    "extent": {"state": "t-state"},
    "kappa-sweep": {"family": "ry", "points": 25},
    "dichotomy": {"rho": "t-state", "phi": list(ex.SCAN_PHIS), "thetas": list(ex.SCAN_THETAS)},
    "regression": {"phi": ex.REFERENCE_PHI, "rho_points": len(ex.EQUATORIAL_RHO_PHIS)},
    "noise-sweep": {"family": "rx", "theta": float(np.pi / 4), "points": 51, "p_max": 0.5, "channel": "global"},
    "monotonicity": {"samples": 2000},
    "tensor-suite": {"grid": 12, "pairs": 200},
    "max-c": {"restarts": 50},
    "verify": {"n": 2, "include_experiments": False},
}

STOCHASTIC = {"monotonicity", "max-c", "tensor-suite", "verify"}


class UsageError(Exception):
    """Bad flags, config or state input (exit status 2)."""


# ---------------------------------------------------------------- input parsing


def parse_state(text: str) -> DensityMatrix:
    """Named preset (t-state, bell, ry:θ, rx:θ, brz:θ) or JSON ``[[re, im], ...]`` amplitudes."""
    t = text.strip()
    low = t.lower()
    try:
        if low in ("t-state", "t"):
            return bloch_state(np.pi / 2, np.pi / 4)
        if low == "bell":
            return families.family_density(FamilyId.BELL_RZ, 0.0)
        for prefix, fam in (("ry:", FamilyId.RY), ("rx:", FamilyId.RX), ("brz:", FamilyId.BELL_RZ)):
            if low.startswith(prefix):
                return families.family_density(fam, float(t[len(prefix):]))
        if t.startswith("@"):
            t = Path(t[1:]).read_text()
        data = json.loads(t)
        amps = np.array([complex(re, im) for re, im in data])
        return PureState.normalized(amps).density()
    except (ValueError, TypeError, OSError) as exc:
        raise UsageError(f"cannot parse state {text!r}: {exc}") from exc


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    opts = dict(COMMON_DEFAULTS)
    opts.update({k.replace("-", "_"): v for k, v in COMMAND_DEFAULTS[command].items()})
    config = _load_config(args.config)
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(config.pop("tolerances", {}) or {})
    config.pop("command", None)
    opts.update(config)
    for key, value in vars(args).items():
        if key in ("config", "command", "func") or value is None:
            continue
        opts[key] = value
    for name, tol in tolerances.items():
        if not isinstance(tol, (int, float)) or tol <= 0:
            raise UsageError(f"tolerance {name!r} must be positive, got {tol!r}")
    opts["tolerances"] = tolerances
    if command in STOCHASTIC and opts.get("seed") is None:
        raise UsageError(f"{command} needs a seed")
    if opts["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return opts


# ---------------------------------------------------------------- output


class Output:
    def __init__(self, command: str, opts: dict):
        self.command = command
        self.opts = opts
        self.dir = Path(opts["output"])
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
            probe = self.dir / ".write-test"
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise UsageError(f"output directory {self.dir} is not writable: {exc}") from exc
        self.files: list[str] = []

    def records(self, name: str, rows: list[dict], columns=None) -> None:
        if self.opts["format"] == "json":
            path = self.dir / f"{name}.json"
            cols = columns or (list(rows[0]) if rows else [])
            payload = [{c: ex._jsonable(r.get(c)) for c in cols} for r in rows]
            path.write_text(json.dumps(payload, indent=2) + "\n")
        else:
            path = self.dir / f"{name}.csv"
            ex.write_csv(path, rows, columns)
        self.files.append(path.name)

    def summary(self, data: dict, passed: bool) -> None:
        meta = {
            "command": self.command,
            "passed": passed,
            "seed": self.opts.get("seed"),
            "tolerances": self.opts["tolerances"],
            "files": self.files,
        }
        meta.update(data)
        ex.write_summary(self.dir / f"{self.command}.summary.json", meta)


def _state_summary(rho: DensityMatrix) -> str:
    return f"{rho.nqubits}-qubit state"


# ---------------------------------------------------------------- commands


def cmd_enumerate(opts, out: Output):
    n = int(opts["n"])
    stabs = enumerate_stabilizers(n)
    rows = []
    for i, s in enumerate(stabs):
        row = {"index": i, "generators": s.label}
        for k, a in enumerate(s.vector.amplitudes):
            row[f"re{k}"] = float(a.real)
            row[f"im{k}"] = float(a.imag)
        rows.append(row)
    out.records(f"stabilizers_n{n}", rows)
    ok = len(stabs) == expected_count(n)
    out.summary({"n": n, "count": len(stabs), "expected": expected_count(n), "max_l1": max_stab_l1(stabs)}, ok)
    return ok, f"n={n}: {len(stabs)} stabilizer states (expected {expected_count(n)})"


def cmd_wigner(opts, out: Output):
    rho = parse_state(opts["state"])
    w = wigner(rho)
    rows = [{"index": i, "point": str(pt), "value": v} for i, (pt, v) in enumerate(w.rows())]
    if opts["format"] == "csv":
        write_wigner_csv(w, out.dir / "wigner.csv")
        out.files.append("wigner.csv")
    else:
        out.records("wigner", rows)
    out.summary({"state": opts["state"], "l1": w.l1(), "negative_entries": w.negative_count()}, True)
    return True, f"{_state_summary(rho)}: l1={w.l1():.12g}, {w.negative_count()} negative entries"


def cmd_distance(opts, out: Output):
    rho = parse_state(opts["state"])
    report = magic_report(rho)
    labels = [s.label for s in stabilizer_set(rho.nqubits)]
    rows = [
        {"index": i, "generators": labels[i], "weight": float(wt)}
        for i, wt in enumerate(report.nearest_free)
        if wt > 1e-12
    ]
    out.records("nearest_free", rows, ["index", "generators", "weight"])
    out.records(
        "witness",
        [{"index": i, "svec": float(v)} for i, v in enumerate(report.witness.svec)],
        ["index", "svec"],
    )
    gap_ok = abs(report.witness.gap - report.c) <= opts["tolerances"]["lp_gap"]
    out.summary({"state": opts["state"], "report": report.to_json(), "witness_gap_matches": gap_ok}, gap_ok)
    return gap_ok, f"C={report.c:.12g} (witness gap {report.witness.gap:.12g})"


def cmd_extent(opts, out: Output):
    rho = parse_state(opts["state"])
    stabs = stabilizer_set(rho.nqubits)
    ext = stabilizer_extent(rho, stabs)
    c = wigner_distance(rho, stabs).value
    rows = [
        {"index": i, "generators": stabs[i].label, "coefficient": v}
        for i, v in ext.decomposition.sparse().items()
    ]
    out.records("decomposition", rows, ["index", "generators", "coefficient"])
    recon = np.abs(ext.decomposition.reconstruct(stabs) - wigner(rho).values).max()
    ok = recon <= 1e-9 and ext.value >= 1 - 1e-9
    kappa = (ext.value - 1) / c if c > 1e-6 else None
    out.summary({"state": opts["state"], "gamma": ext.value, "c": c, "kappa": kappa, "reconstruction_error": recon}, ok)
    return ok, f"Gamma={ext.value:.12g}"


def cmd_kappa_sweep(opts, out: Output):
    fam = FamilyId.parse(opts["family"])
    grid = ex.default_theta_grid(int(opts["points"]))
    recs = ex.kappa_sweep(fam, grid, opts["threads"])
    cols = ["family", "theta", "c_lp", "c_closed", "gamma_lp", "gamma_closed", "kappa", "neg_entries", "witness_gap"]
    out.records(f"kappa_{fam.value}", ex.record_rows(recs), cols)
    tol = opts["tolerances"]["closed_form"]
    closed_ok = all(abs(r.c_lp - r.c_closed) <= tol and abs(r.gamma_lp - r.gamma_closed) <= tol for r in recs)
    kappa_ok = ex.kappa_is_constant(recs)
    ok = closed_ok and kappa_ok
    out.summary({"family": fam.value, "theta_grid": grid, "closed_form_ok": closed_ok, "kappa_constant": kappa_ok}, ok)
    kappas = [r.kappa for r in recs if r.kappa is not None]
    return ok, f"{fam.value}: {len(recs)} points, kappa in [{min(kappas):.9g}, {max(kappas):.9g}]"


def cmd_dichotomy(opts, out: Output):
    rho = parse_state(opts["rho"])
    phis = _float_list(opts["phi"])
    thetas = _float_list(opts["thetas"])
    recs = ex.dichotomy_scan(rho, ex.scan_grid(thetas, phis), opts["threads"])
    out.records("dichotomy", [r.row() for r in recs])
    viol = ex.sign_condition_violations(recs)
    out.summary(
        {"rho": opts["rho"], "thetas": thetas, "phis": phis, "sign_violations": len(viol)},
        True,
    )
    n_super = sum(r.superadditive for r in recs)
    return True, f"{len(recs)} sigma points, {n_super} superadditive, {len(viol)} sign-condition violations"


def cmd_regression(opts, out: Output):
    n = int(opts["rho_points"])
    rho_phis = np.linspace(0.0, np.pi / 2, n)
    sigmas = ex.regression_sigmas(float(opts["phi"]))
    recs = ex.regression_records(rho_phis, sigmas, opts["threads"])
    out.records("regression", [r.row() for r in recs])
    res = ex.deficit_regression(recs)
    ok = 0.30 <= res.slope <= 0.37 and res.r_squared >= 0.95
    out.summary(
        {
            "rho_phis": rho_phis,
            "sigmas": sigmas,
            "slope": res.slope,
            "r_squared": res.r_squared,
            "n_points": res.n_points,
            "per_sigma": [{"z": z, "slope": s, "r_squared": r2} for z, s, r2 in res.per_sigma],
            "protocol": "through-origin fit of deficit on C(rho), pooled over northern sigma",
        },
        ok,
    )
    return ok, f"slope={res.slope:.6g}, R^2={res.r_squared:.6g} over {res.n_points} points"


def cmd_noise(opts, out: Output):
    fam = FamilyId.parse(opts["family"])
    theta = float(opts["theta"])
    grid = np.round(np.linspace(0.0, float(opts["p_max"]), int(opts["points"])), 12)
    recs = ex.noise_sweep(fam, theta, grid, opts["channel"], opts["threads"])
    out.records("noise", ex.record_rows(recs), ["p", "c", "gamma", "kappa"])
    chk = ex.check_rigidity(fam, theta, recs)
    ok = chk.kappa_ok and chk.vanishing_ok
    out.summary(
        {
            "family": fam.value,
            "theta": theta,
            "channel": opts["channel"],
            "p_grid": grid,
            "p_star": chk.p_star,
            "kappa_ok": chk.kappa_ok,
            "vanishing_ok": chk.vanishing_ok,
            "worst_kappa_error": chk.worst_kappa_error,
            "largest_c_above": chk.largest_c_above,
        },
        ok,
    )
    return ok, (
        f"p*={chk.p_star:.6g}: kappa ok={chk.kappa_ok}, C above p*+0.01 max={chk.largest_c_above:.3g}"
    )


def cmd_monotonicity(opts, out: Output):
    stats = ex.monotonicity_sample(int(opts["samples"]), int(opts["seed"]), opts["threads"])
    rows = [{"index": i, "c_before": b, "c_after": a} for i, (b, a) in enumerate(stats.pairs)]
    out.records("monotonicity", rows, ["index", "c_before", "c_after"])
    ok = 0.44 <= stats.fraction_increased <= 0.54 and stats.max_increase >= 0.10
    summary = {k: v for k, v in vars(stats).items() if k != "pairs"}
    out.summary(summary, ok)
    return ok, (
        f"fraction increased {stats.fraction_increased:.4f} "
        f"({stats.fraction_increased_among_changed:.4f} of changed), max increase {stats.max_increase:.4f}"
    )


def cmd_tensor(opts, out: Output):
    g = int(opts["grid"])
    phis = np.linspace(0.0, 2 * np.pi, g, endpoint=False)
    eq = ex.equatorial_equality_check(phis, phis, opts["threads"])
    rhos = [bloch_state(t, 1.05) for t in ex.SCAN_THETAS]
    st_min, margins = ex.self_tensor_check(rhos, opts["threads"])
    sub_min, slacks = ex.submultiplicativity_check(ex.haar_pairs(int(opts["pairs"]), int(opts["seed"])), opts["threads"])
    rows = [{"theta": t, "self_tensor_margin": m} for t, m in zip(ex.SCAN_THETAS, margins)]
    out.records("self_tensor", rows, ["theta", "self_tensor_margin"])
    out.records("submultiplicativity", [{"index": i, "slack": s} for i, s in enumerate(slacks)], ["index", "slack"])
    ok = eq <= 1e-8 and sub_min >= -1e-7
    out.summary(
        {
            "equatorial_max_residual": eq,
            "self_tensor_min_margin": st_min,
            "submultiplicativity_min_slack": sub_min,
            "self_tensor_checked_as": "reported",
        },
        ok,
    )
    return ok, f"equatorial residual {eq:.3g}, self-tensor min {st_min:.3g}, submult min slack {sub_min:.3g}"


def cmd_max_c(opts, out: Output):
    res = ex.max_c_search(int(opts["restarts"]), int(opts["seed"]), opts["threads"])
    rows = [
        {"restart": i, "c": v, "neg_entries": k}
        for i, (v, k) in enumerate(zip(res.restart_values, res.restart_neg_entries))
    ]
    out.records("max_c", rows, ["restart", "c", "neg_entries"])
    ok = res.value >= 0.86 and res.neg_entries == 6
    out.summary(
        {"best_c": res.value, "neg_entries": res.neg_entries, "state": res.state, "restarts": int(opts["restarts"])},
        ok,
    )
    return ok, f"best C={res.value:.6g} with {res.neg_entries} negative entries"


def cmd_verify(opts, out: Output):
    from .verify import run_checks

    checks = run_checks(int(opts["n"]), int(opts["seed"]), opts["tolerances"], bool(opts["include_experiments"]))
    out.records("verify", [c._asdict() for c in checks], ["name", "passed", "detail"])
    failed = [c.name for c in checks if not c.passed]
    out.summary({"n": int(opts["n"]), "failed": failed, "n_checks": len(checks)}, not failed)
    return not failed, f"{len(checks) - len(failed)}/{len(checks)} checks passed" + (
        f"; failed: {', '.join(failed)}" if failed else ""
    )


COMMANDS = {
    "enumerate-stabilizers": cmd_enumerate,
    "wigner": cmd_wigner,
    "distance": cmd_distance,
    "extent": cmd_extent,
    "kappa-sweep": cmd_kappa_sweep,
    "dichotomy": cmd_dichotomy,
    "regression": cmd_regression,
    "noise-sweep": cmd_noise,
    "monotonicity": cmd_monotonicity,
    "tensor-suite": cmd_tensor,
    "max-c": cmd_max_c,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="worker processes (default 1)")
    common.add_argument("--output", help="output directory (default wigmagic-out)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("-v", "--verbose", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="wigmagic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("enumerate-stabilizers", "enumerate pure stabilizer states")
    p.add_argument("--n", type=int)
    for name, text in (("wigner", "Wigner vector of a state"), ("distance", "Wigner distance and witness"),
                       ("extent", "stabilizer extent and decomposition")):
        p = add(name, text)
        p.add_argument("--state", help="preset (t-state, bell, ry:θ, rx:θ, brz:θ) or JSON [[re, im], ...]")
    p = add("kappa-sweep", "family sweep of C, Gamma and kappa")
    p.add_argument("--family")
    p.add_argument("--points", type=int)
    p = add("dichotomy", "superadditivity scan of C(rho ⊗ sigma)")
    p.add_argument("--rho")
    p.add_argument("--phi", type=_float_list, help="comma-separated azimuths of sigma")
    p.add_argument("--thetas", type=_float_list, help="comma-separated polar angles of sigma")
    p = add("regression", "deficit regression over equatorial rho")
    p.add_argument("--phi", type=float)
    p.add_argument("--rho-points", type=int)
    p = add("noise-sweep", "family distance under depolarizing noise")
    p.add_argument("--family")
    p.add_argument("--theta", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--p-max", type=float)
    p.add_argument("--channel", choices=sorted(families.CHANNELS))
    p = add("monotonicity", "effect of H ⊗ I on C over Haar-random states")
    p.add_argument("--samples", type=int)
    p = add("tensor-suite", "tensor-product properties of C and Gamma")
    p.add_argument("--grid", type=int)
    p.add_argument("--pairs", type=int)
    p = add("max-c", "multi-start search for the largest C over pure two-qubit states")
    p.add_argument("--restarts", type=int)
    p = add("verify", "run the invariant suites")
    p.add_argument("--n", type=int)
    p.add_argument("--include-experiments", action="store_true", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        opts = resolve_options(args.command, args)
        out = Output(args.command, opts)
        ok, line = COMMANDS[args.command](opts, out)
    except UsageError as exc:
        print(f"wigmagic {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, families.BoundaryError) as exc:
        print(f"wigmagic {args.command}: error: {exc}", file=sys.stderr)
        return 2
    status = "ok" if ok else "FAILED"
    print(f"{args.command}: {status}: {line}")
    return 0 if ok else 1
