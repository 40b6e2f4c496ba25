"""Command-line front end.

Every output embeds a run manifest (command, resolved parameters, tool
version, format).  ``hiddenmeasure replay FILE`` re-runs the manifest found in
an earlier output and prints byte-identical results.

Exit codes: 0 success, 2 usage error, 3 input-file error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import re
import sys
from fractions import Fraction

from . import __version__
from .core import EpsilonMeasurement, UnitVector3
from .experiments import InterferometerConfig, epr_chsh_demo, rauch_interference, wheeler_mz
from .montecarlo import EstimatorConfig, Z_AXIS, estimate, state_at_angle, sweep_theta
from ._rng import derive_seed
from .probability_structure import (
    InvariantViolation,
    ScenarioError,
    bundled_scenario_path,
    kolmogorov_embeddable,
    load_scenario,
    parse_rule,
    worst_triad,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3, 4

TABLE_COLUMNS = ["epsilon", "theta", "analytic_p1", "empirical_f1", "stderr", "z"]

EPILOG = (
    "CSV columns (probe, sweep): " + ",".join(TABLE_COLUMNS) + ". "
    "Numbers carry 12 significant digits; the first CSV line is '# manifest: {json}'. "
    "Exit codes: 0 ok, 2 usage, 3 input file, 4 invariant violation."
)


class UsageError(Exception):
    pass


class InputFileError(Exception):
    pass


# --- formatting ----------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return fmt(v)
        return float(fmt(v))
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "__float__"):
        return _jsonable(float(v))
    raise TypeError(f"cannot serialize {v!r}")


def _flatten(prefix: str, v, out: list):
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), x, out)
    elif isinstance(v, (list, tuple)):
        for i, x in enumerate(v):
            _flatten(f"{prefix}.{i}", x, out)
    else:
        out.append((prefix, v))


def render(manifest: dict, result) -> str:
    buf = io.StringIO()
    if manifest["format"] == "json":
        json.dump({"manifest": manifest, "result": _jsonable(result)}, buf, indent=2, sort_keys=False)
        buf.write("\n")
        return buf.getvalue()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    if isinstance(result, list):
        buf.write(",".join(TABLE_COLUMNS) + "\n")
        for row in result:
            buf.write(",".join(fmt(row[c]) for c in TABLE_COLUMNS) + "\n")
    else:
        flat = []
        _flatten("", result, flat)
        buf.write("key,value\n")
        for k, v in flat:
            if v is None or isinstance(v, (bool, str)):
                v = json.dumps(v)
            else:
                v = fmt(v)
            buf.write(f"{k},{v}\n")
    return buf.getvalue()


# --- argument parsing helpers ----------------------------------------------------

_ANGLE = re.compile(r"^\s*([-+]?[0-9.eE+-]*?)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle(text: str) -> float:
    """Float literal, or a multiple of pi such as ``pi/2``, ``3pi/4``, ``-0.5*pi``."""
    text = text.strip()
    m = _ANGLE.match(text)
    try:
        if m:
            coef = m.group(1)
            coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
            den = float(m.group(2)) if m.group(2) else 1.0
            return coef * math.pi / den
        return float(text)
    except ValueError:
        raise UsageError(f"bad number {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """Comma list, or ``lin:START:STOP:NUM`` for NUM evenly spaced points."""
    text = text.strip()
    if not text:
        return []
    if text.startswith("lin:"):
        parts = text[4:].split(":")
        if len(parts) != 3:
            raise UsageError(f"bad grid {text!r}")
        lo, hi = parse_angle(parts[0]), parse_angle(parts[1])
        try:
            num = int(parts[2])
        except ValueError:
            raise UsageError(f"bad grid size {parts[2]!r}") from None
        if num < 0:
            raise UsageError("grid size must be >= 0")
        if num == 1:
            return [lo]
        return [lo + (hi - lo) * i / (num - 1) for i in range(num)]
    return [parse_angle(t) for t in text.split(",")]


def parse_vector(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"expected 'x,y,z', got {text!r}")
    try:
        v = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"expected 'x,y,z', got {text!r}") from None
    try:
        u = UnitVector3.of(*v)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return [u.x, u.y, u.z]


def _estimator(params) -> EstimatorConfig:
    try:
        return EstimatorConfig(params["samples"], params["seed"], params.get("shards", 1))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _measurement(epsilon: float) -> EpsilonMeasurement:
    try:
        return EpsilonMeasurement(Z_AXIS, epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --- commands --------------------------------------------------------------------
# Each takes fully resolved params (the manifest payload) and returns a result.

def run_probe(params):
    cfg = _estimator(params)
    m = _measurement(params["epsilon"])
    est = estimate(m, state_at_angle(params["theta"]), cfg)
    return [
        {
            "epsilon": params["epsilon"],
            "theta": params["theta"],
            "analytic_p1": est.analytic_p1,
            "empirical_f1": est.f1,
            "stderr": est.standard_error,
            "z": est.z_vs_analytic,
        }
    ]


def run_sweep(params):
    rows = []
    for i, eps in enumerate(params["epsilon_grid"]):
        _measurement(eps)
        if not params["theta_grid"]:
            continue
        cfg = _estimator(dict(params, seed=derive_seed(params["seed"], i)))
        for r in sweep_theta(eps, params["theta_grid"], cfg):
            rows.append(
                {
                    "epsilon": eps,
                    "theta": r.theta,
                    "analytic_p1": r.analytic_p1,
                    "empirical_f1": r.empirical_f1,
                    "stderr": r.standard_error,
                    "z": r.z,
                }
            )
    return rows


def _facet_dict(f):
    if f is None:
        return None
    return {"name": f.name, "margin": f.margin}


def run_bell(params):
    vs = [UnitVector3.of(*params[k]) for k in ("a", "aprime", "b", "bprime")]
    rep = epr_chsh_demo(*vs)
    labels = ["E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"]
    return {
        "correlations": dict(zip(labels, rep.correlations)),
        "S": rep.s,
        "S_max": rep.s_max,
        "embeddable": rep.embeddable,
        "violated_facet": _facet_dict(rep.violated_facet),
    }


def run_gleason(params):
    try:
        rule = parse_rule(params["rule"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if params["trials"] < 1:
        raise UsageError("trials must be >= 1")
    defect, triad = worst_triad(rule, params["u"], params["trials"], params["seed"])
    return {"rule": rule.name, "max_defect": defect, "argmax_triad": triad.tolist()}


def run_interf(params):
    if params["chi"] is not None:
        if not params["with_b"]:
            raise UsageError("--chi needs the recombining splitter (--with-b)")
        st = rauch_interference(params["chi"], extra_phase=params["phase"])
        kind = "rauch"
    else:
        st = wheeler_mz(InterferometerConfig(params["with_b"], params["phase"]))
        kind = "wheeler"
    return {"experiment": kind, "p_d1": st.p_d1, "p_d2": st.p_d2}


def _scenario_path(ref: str):
    if ref.startswith("bundled:"):
        return bundled_scenario_path(ref.split(":", 1)[1])
    return ref


def _sha256(path) -> str:
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise InputFileError(f"cannot read scenario: {exc}") from None


def run_embed(params):
    path = _scenario_path(params["scenario"])
    digest = _sha256(path)
    if params.get("scenario_sha256") not in (None, digest):
        raise InputFileError("scenario file changed since the manifest was written")
    try:
        s = load_scenario(path)
        res = kolmogorov_embeddable(s)
    except (ScenarioError, json.JSONDecodeError) as exc:
        raise InputFileError(f"bad scenario: {exc}") from None
    witness = None
    if res.witness is not None:
        witness = [
            {"assignment": dict(zip(s.names, key)), "p": p} for key, p in res.witness.items()
        ]
    return {
        "feasible": res.feasible,
        "exact": res.exact,
        "witness": witness,
        "violated_facet": _facet_dict(res.violated_facet),
    }


COMMANDS = {
    "probe": run_probe,
    "sweep": run_sweep,
    "bell": run_bell,
    "gleason": run_gleason,
    "interf": run_interf,
    "embed": run_embed,
}


def resolve_params(args) -> dict:
    cmd = args.command
    if cmd == "probe":
        return {
            "epsilon": args.epsilon,
            "theta": parse_angle(args.theta),
            "samples": args.samples,
            "seed": args.seed,
            "shards": args.shards,
        }
    if cmd == "sweep":
        return {
            "epsilon_grid": parse_grid(args.epsilon_grid),
            "theta_grid": parse_grid(args.theta_grid),
            "samples": args.samples,
            "seed": args.seed,
            "shards": args.shards,
        }
    if cmd == "bell":
        return {k: parse_vector(getattr(args, k)) for k in ("a", "aprime", "b", "bprime")}
    if cmd == "gleason":
        return {"rule": args.rule, "trials": args.trials, "seed": args.seed, "u": parse_vector(args.u)}
    if cmd == "interf":
        return {
            "with_b": args.with_b,
            "phase": parse_angle(args.phase),
            "chi": None if args.chi is None else parse_angle(args.chi),
        }
    if cmd == "embed":
        ref = args.scenario if args.scenario else f"bundled:{args.bundled}"
        return {"scenario": ref, "scenario_sha256": _sha256(_scenario_path(ref))}
    raise UsageError(f"unknown command {cmd!r}")


def make_manifest(command: str, params: dict, fmt_: str) -> dict:
    return {"tool": "hiddenmeasure", "version": __version__, "command": command, "params": params, "format": fmt_}


def execute(manifest: dict) -> str:
    cmd = manifest.get("command")
    if cmd not in COMMANDS:
        raise UsageError(f"unknown command {cmd!r}")
    if manifest.get("format") not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    return render(manifest, COMMANDS[cmd](manifest["params"]))


def read_manifest(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputFileError(str(exc)) from None
    try:
        if text.startswith("# manifest: "):
            return json.loads(text.splitlines()[0][len("# manifest: "):])
        return json.loads(text)["manifest"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputFileError(f"no manifest in {path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hiddenmeasure", description="Quantum-machine simulation toolkit.", epilog=EPILOG)
    p.add_argument("--version", action="version", version=f"hiddenmeasure {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_format(sp, default):
        sp.add_argument("--format", choices=("csv", "json"), default=default)

    sp = sub.add_parser("probe", help="analytic vs Monte Carlo P(O1) at one (epsilon, theta)", epilog=EPILOG)
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.add_argument("--theta", default="0", help="angle between state and measurement axis (radians, 'pi/2' ok)")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--shards", type=int, default=1)
    add_format(sp, "csv")

    sp = sub.add_parser("sweep", help="probe over an epsilon x theta grid", epilog=EPILOG)
    sp.add_argument("--epsilon-grid", default="1")
    sp.add_argument("--theta-grid", default="lin:0:pi:13", help="comma list or lin:START:STOP:NUM")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--shards", type=int, default=1)
    add_format(sp, "csv")

    sp = sub.add_parser("bell", help="singlet CHSH report with embeddability verdict")
    for name in ("a", "aprime", "b", "bprime"):
        sp.add_argument(f"--{name}", required=True, help="setting 'x,y,z' (normalized)")
    add_format(sp, "json")

    sp = sub.add_parser("gleason", help="largest frame-function defect over random triads")
    sp.add_argument("--rule", default="born2", help="born2, abspow:P, or mix:W*RULE+W*RULE")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--u", default="0,0,1", help="reference ray 'x,y,z'")
    add_format(sp, "json")

    sp = sub.add_parser("interf", help="Mach-Zehnder / spinor-rotation interferometer")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--with-b", dest="with_b", action="store_true", default=True)
    g.add_argument("--no-b", dest="with_b", action="store_false")
    sp.add_argument("--phase", default="0")
    sp.add_argument("--chi", default=None, help="spin rotation angle on one arm")
    add_format(sp, "json")

    sp = sub.add_parser("embed", help="Kolmogorov embeddability of a scenario JSON file")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario", help="path to scenario JSON")
    g.add_argument("--bundled", help="bundled scenario name (product_coins, singlet_chsh, machine_triple)")
    add_format(sp, "json")

    sp = sub.add_parser("replay", help="re-run the manifest embedded in an earlier output")
    sp.add_argument("file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            manifest = read_manifest(args.file)
        else:
            manifest = make_manifest(args.command, resolve_params(args), args.format)
        out = execute(manifest)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hiddenmeasure: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFileError as exc:
        print(f"hiddenmeasure: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"hiddenmeasure: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
