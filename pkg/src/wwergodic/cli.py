"""Command line front end.

    wwergodic weight   analyze|classify   WEIGHT.json
    wwergodic spectral estimate           WEIGHT.json
    wwergodic spectral affinity           A.json B.json
    wwergodic system   simulate|ww-uniform
    wwergodic vdc      check ARRAY.json | fuzz

Parameters come from built-in defaults, then ``--config FILE`` (a JSON object),
then ``--set key=value`` overrides (values parsed as JSON when possible).
Reports are JSON objects ``{"header", "config", "result"}``; only ``header``
carries the version and timestamp, so ``config`` + ``result`` are
reproducible byte for byte.

Exit codes: 0 success, 2 input error, 3 invariant violation.  ``weight
classify`` maps its verdict to 0 (consistent) or 10-14.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io as _stdio
import itertools
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__
from . import io as fio
from .besicovitch import (
    CONSISTENT,
    FAILS_1,
    FAILS_2,
    FAILS_3,
    INCONCLUSIVE,
    INCONCLUSIVE_2,
    ClassifyConfig,
    classify_besicovitch,
)
from .ncsystem import (
    Projection,
    bernoulli_stream,
    classical_uniform_sup,
    ergodic_average,
    kronecker_decomposition,
    l2_norm,
    op_norm,
    operator_correlation,
    operator_spectral_coeff,
    operator_spectral_coeff_density,
    random_commuting_system,
    random_operator,
    tau,
    uniform_ww_sup,
    weighted_average,
    matrix_to_json,
)
from .spectral import (
    affinity,
    affinity_sequences,
    detect_atoms,
    point_mass,
    spectral_lags,
    wiener_ladder,
)
from .vandercorput import vdc_bound, vdc_fuzz
from .weights import (
    amplitude_grid,
    correlation_table,
    default_ladder,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVARIANT = 3
VERDICT_EXIT = {CONSISTENT: 0, FAILS_1: 10, FAILS_2: 11, FAILS_3: 12, INCONCLUSIVE_2: 13, INCONCLUSIVE: 14}

DEFAULTS = {
    "weight analyze": {
        "input": None,
        "halfwidth": None,
        "ladder": None,
        "rungs": 5,
        "tolerance": 0.05,
        "points": [],
        "mass_halfwidth": None,
        "atom_threshold": 0.01,
    },
    "weight classify": {
        "input": None,
        "ladder": None,
        "rungs": 5,
        "halfwidth": None,
        "candidates": None,
        "grid": 8,
        "s_tol": 0.05,
        "discrete_tol": 0.1,
        "amp_tol": 0.05,
        "cond3_tol": 0.1,
        "peak_threshold": 0.01,
    },
    "spectral estimate": {"input": None, "n": None, "halfwidth": None, "threshold": 0.01, "wiener_tolerance": 0.01},
    "spectral affinity": {"inputs": [], "n": None, "halfwidth": None, "tolerance": 0.02, "atom_tol": 1e-3, "threshold": 0.01},
    "system simulate": {
        "system": None,
        "random_system": None,
        "x": None,
        "weight": None,
        "ladder": None,
        "check_n": None,
        "lags": None,
        "tolerance": 1e-10,
    },
    "system ww-uniform": {
        "channel": "classical",
        "stream": None,
        "box": [511, 511],
        "ladder": [[63, 63], [127, 127], [255, 255], [511, 511]],
        "grid": [64, 64],
        "system": None,
        "random_system": None,
        "x": None,
        "projection": None,
    },
    "vdc check": {"input": None, "h": [1, 1], "tolerance": 1e-10},
    "vdc fuzz": {"trials": 1000, "max_dim": 4, "max_n": 8, "h_policy": "all", "tolerance": 1e-10},
}


class InvariantViolation(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# report plumbing


def jsonable(obj):
    """Recursively convert numpy values, tuples and complex numbers for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def payload_bytes(report: dict) -> bytes:
    """The reproducible part of a report: config and result, canonical JSON."""
    body = {"config": report["config"], "result": report["result"]}
    return json.dumps(jsonable(body), sort_keys=True, separators=(",", ":")).encode()


def make_report(config: dict, result: dict) -> dict:
    return {
        "header": {
            "tool": "wwergodic",
            "version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        },
        "config": jsonable(config),
        "result": jsonable(result),
    }


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def to_csv(report: dict, table: Optional[list] = None) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table is not None:
        w.writerows(table)
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(report["result"]):
            w.writerow([k, v])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# config resolution


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def resolve_config(command: str, args) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS[command]))
    if args.config:
        data = fio.read_json(args.config)
        if not isinstance(data, dict):
            raise fio.InputError("config file must hold a JSON object")
        unknown = set(data) - set(cfg) - {"seed"}
        if unknown:
            raise fio.InputError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for item in args.set or []:
        if "=" not in item:
            raise fio.InputError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        if k not in cfg and k != "seed":
            raise fio.InputError(f"unknown config key {k!r}")
        cfg[k] = _parse_value(v)
    if args.inputs:
        if "inputs" in cfg:
            cfg["inputs"] = list(args.inputs)
        elif "input" in cfg:
            if len(args.inputs) != 1:
                raise fio.InputError("exactly one input path expected")
            cfg["input"] = args.inputs[0]
        else:
            raise fio.InputError(f"'{command}' takes no positional inputs")
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", None)
    return cfg


def _require_seed(cfg: dict, why: str) -> int:
    if cfg.get("seed") is None:
        raise fio.InputError(f"{why} is randomized: pass --seed or set 'seed' in the config")
    seed = int(cfg["seed"])
    if not 0 <= seed < 2**64:
        raise fio.InputError("seed must be an unsigned 64-bit integer")
    return seed


def _load_weight(cfg: dict, key: str = "input"):
    if not cfg.get(key):
        raise fio.InputError(f"missing '{key}' path")
    return fio.weight_from_json(fio.read_json(cfg[key]), seed=cfg.get("seed"))


def _index_list(value, d: int, name: str) -> tuple:
    if isinstance(value, int):
        return (value,) * d
    value = tuple(int(v) for v in value)
    if len(value) != d:
        raise fio.InputError(f"'{name}' must have {d} components")
    return value


# ---------------------------------------------------------------------------
# subcommands


def cmd_weight_analyze(cfg: dict):
    a = _load_weight(cfg)
    d = a.d
    H = _index_list(cfg["halfwidth"], d, "halfwidth") if cfg["halfwidth"] is not None else tuple(
        max(1, min(16, b // 4)) for b in a.box
    )
    if cfg["ladder"] is not None:
        ladder = [_index_list(n, d, "ladder") for n in cfg["ladder"]]
    else:
        top = tuple(max(b - h, 1) for b, h in zip(a.box, H))
        ladder = default_ladder(top, int(cfg["rungs"]))
    table = correlation_table(a, H, ladder, tolerance=float(cfg["tolerance"]))
    top = ladder[-1]
    Hm = _index_list(cfg["mass_halfwidth"], d, "mass_halfwidth") if cfg["mass_halfwidth"] is not None else tuple(
        max(h, min(1024, b // 5)) for h, b in zip(H, a.box)
    )
    n_mass = tuple(max(b - h, 0) for b, h in zip(a.box, Hm))
    coeffs = spectral_lags(a, n_mass, Hm)
    pts = np.array(cfg["points"], dtype=float).reshape(-1, d) if cfg["points"] else np.zeros((0, d))
    mu = detect_atoms(coeffs, Hm, candidates=pts if len(pts) else None, threshold=float(cfg["atom_threshold"]))
    points = []
    for p in pts:
        pm = point_mass(coeffs, p, Hm)
        amps = [complex(amplitude_grid(a, p[None, :], n)[0]) for n in ladder]
        points.append({"angles": p, "point_mass": pm.mass, "point_mass_imag": pm.imag, "amplitude_ladder": amps})
    result = {
        "correlation": table.to_dict(),
        "spectral": {
            "n": n_mass,
            "halfwidth": Hm,
            "total_mass": float(coeffs[tuple(Hm)].real),
            "atoms": mu.to_dict()["atoms"],
        },
        "points": points,
    }
    rows = [[f"m{j + 1}" for j in range(d)] + ["re", "im", "ladder_spread"]]
    rows += [list(m) + [v.real, v.imag, s] for m, v, s in table.rows()]
    return result, EXIT_OK, rows


def _grid_candidates(G: int, d: int) -> np.ndarray:
    return np.array(list(itertools.product(*[np.arange(G) / G] * d)), dtype=float)


def cmd_weight_classify(cfg: dict):
    a = _load_weight(cfg)
    d = a.d
    H = _index_list(cfg["halfwidth"], d, "halfwidth") if cfg["halfwidth"] is not None else None
    if cfg["ladder"] is not None:
        ladder = [_index_list(n, d, "ladder") for n in cfg["ladder"]]
    else:
        h = H or tuple(min(1024, max(1, b // 9)) for b in a.box)
        ladder = default_ladder(tuple(max(b - v, 1) for b, v in zip(a.box, h)), int(cfg["rungs"]))
    if cfg["candidates"] is not None:
        cand = np.array(cfg["candidates"], dtype=float).reshape(-1, d)
    else:
        cand = _grid_candidates(int(cfg["grid"]), d)
    if cand.size == 0:
        raise fio.InputError("candidate grid is empty")
    conf = ClassifyConfig(
        ladder=ladder,
        candidates=cand,
        halfwidth=H,
        s_tol=float(cfg["s_tol"]),
        discrete_tol=float(cfg["discrete_tol"]),
        amp_tol=float(cfg["amp_tol"]),
        cond3_tol=float(cfg["cond3_tol"]),
        peak_threshold=float(cfg["peak_threshold"]),
    )
    rep = classify_besicovitch(a, conf)
    return rep.to_dict(), VERDICT_EXIT[rep.verdict], None


def cmd_spectral_estimate(cfg: dict):
    a = _load_weight(cfg)
    d = a.d
    if cfg["halfwidth"] is not None:
        H = _index_list(cfg["halfwidth"], d, "halfwidth")
    else:
        H = tuple(max(1, min(1024, b // 5)) for b in a.box)
    n = _index_list(cfg["n"], d, "n") if cfg["n"] is not None else tuple(max(b - h, 0) for b, h in zip(a.box, H))
    coeffs = spectral_lags(a, n, H)
    mu = detect_atoms(coeffs, H, threshold=float(cfg["threshold"]))
    hs = sorted({tuple(max(1, v // s) for v in H) for s in (8, 4, 2, 1)})
    wl = wiener_ladder(coeffs, hs, tolerance=float(cfg["wiener_tolerance"]))
    result = {
        "n": n,
        "halfwidth": H,
        "total_mass": float(coeffs[tuple(H)].real),
        "measure": mu.to_dict(),
        "wiener": wl.to_dict(),
    }
    rows = [[f"m{j + 1}" for j in range(d)] + ["re", "im"]]
    for idx in np.ndindex(*coeffs.shape):
        v = coeffs[idx]
        rows.append([i - h for i, h in zip(idx, H)] + [v.real, v.imag])
    return result, EXIT_OK, rows


def cmd_spectral_affinity(cfg: dict):
    paths = cfg["inputs"]
    if len(paths) != 2:
        raise fio.InputError("affinity needs exactly two inputs")
    data = [fio.read_json(p) for p in paths]
    kinds = ["measure" if isinstance(x, dict) and ("atoms" in x or "density_fourier" in x) else "weight" for x in data]
    if kinds[0] != kinds[1]:
        raise fio.InputError("inputs must both be measures or both be weights")
    if kinds[0] == "measure":
        P, Q = (fio.measure_from_json(x) for x in data)
        if P.d != Q.d:
            raise fio.InputError("measures differ in dimension")
        return {"kind": "measures", "affinity": affinity(P, Q, tol=float(cfg["atom_tol"]))}, EXIT_OK, None
    a, b = (fio.weight_from_json(x, seed=cfg.get("seed")) for x in data)
    if a.d != b.d:
        raise fio.InputError("weights differ in dimension")
    d = a.d
    box = tuple(min(x, y) for x, y in zip(a.box, b.box))
    H = _index_list(cfg["halfwidth"], d, "halfwidth") if cfg["halfwidth"] is not None else tuple(
        max(1, min(1024, v // 5)) for v in box
    )
    n = _index_list(cfg["n"], d, "n") if cfg["n"] is not None else tuple(max(v - h, 0) for v, h in zip(box, H))
    thr = float(cfg["threshold"])
    sa = detect_atoms(spectral_lags(a, n, H), H, threshold=thr)
    sb = detect_atoms(spectral_lags(b, n, H), H, threshold=thr)
    rep = affinity_sequences(a, b, n, sa, sb, tolerance=float(cfg["tolerance"]), atom_tol=float(cfg["atom_tol"]))
    result = {"kind": "weights", **rep.to_dict(), "sigma_a": sa.to_dict(), "sigma_b": sb.to_dict()}
    return result, (EXIT_INVARIANT if rep.violation else EXIT_OK), None


def _load_system(cfg: dict):
    if cfg.get("system"):
        return fio.system_from_json(fio.read_json(cfg["system"])), None
    shape = cfg.get("random_system")
    if shape is None:
        raise fio.InputError("give 'system' (path) or 'random_system' ({N, d})")
    seed = _require_seed(cfg, "random_system")
    rng = np.random.default_rng(seed)
    return random_commuting_system(int(shape["N"]), int(shape["d"]), rng), rng


def _system_and_x(cfg: dict):
    sys_, rng = _load_system(cfg)
    xs = cfg.get("x")
    if xs is None or xs == "random":
        if rng is None:
            rng = np.random.default_rng(_require_seed(cfg, "random operator x"))
        x = random_operator(sys_.N, rng)
    else:
        x = fio.matrix_from_data(fio.read_json(xs))
    if x.shape != (sys_.N, sys_.N):
        raise fio.InputError("operator x does not match the system dimension")
    return sys_, x


def cmd_system_simulate(cfg: dict):
    sys_, x = _system_and_x(cfg)
    d = sys_.d
    weight = fio.weight_from_json(fio.read_json(cfg["weight"]), seed=cfg.get("seed")) if cfg.get("weight") else None
    if weight is not None and weight.d != d:
        raise fio.InputError("weight dimension differs from the system")
    ladder = [_index_list(n, d, "ladder") for n in (cfg["ladder"] or [[4] * d, [8] * d, [16] * d, [32] * d])]
    averages = []
    for n in ladder:
        A = weighted_average(sys_, x, weight, n) if weight is not None else ergodic_average(sys_, x, n)
        averages.append({"n": n, "op_norm": op_norm(A), "tau": tau(A), "matrix": matrix_to_json(A)})
    check_n = _index_list(cfg["check_n"], d, "check_n") if cfg["check_n"] is not None else (6,) * d
    lags = cfg["lags"] or [list(m) for m in itertools.product(range(-2, 3), repeat=d)]
    worst = 0.0
    two_path = []
    for m in lags:
        m = _index_list(m, d, "lags")
        A = operator_spectral_coeff(sys_, x, m, check_n)
        B = operator_spectral_coeff_density(sys_, x, m, check_n)
        scale = max(float(np.max(np.abs(A))), float(np.max(np.abs(B))), 1e-300)
        dev = float(np.max(np.abs(A - B))) / scale if np.any(A) or np.any(B) else 0.0
        worst = max(worst, dev)
        two_path.append({"m": m, "relative_deviation": dev, "tau": tau(A), "correlation": operator_correlation(sys_, x, m)})
    K = kronecker_decomposition(sys_)
    kd = K.to_dict()
    top = ladder[-1]
    limit_gap = l2_norm(ergodic_average(sys_, x, top) - K.fixed_point_projection(x))
    result = {
        "N": sys_.N,
        "d": d,
        "averages": averages,
        "two_path": {"n": check_n, "max_relative_deviation": worst, "lags": two_path},
        "kronecker": kd,
        "ergodic_limit_gap_l2": limit_gap,
    }
    tol = float(cfg["tolerance"])
    bad = worst > tol or max(kd["checks"][k] for k in kd["checks"]) > tol
    return result, (EXIT_INVARIANT if bad else EXIT_OK), None


def cmd_system_ww_uniform(cfg: dict):
    channel = cfg["channel"]
    grid = cfg["grid"]
    rungs = []
    if channel == "classical":
        if cfg.get("stream"):
            stream = fio.read_stream(cfg["stream"])
            source = "file"
        else:
            seed = _require_seed(cfg, "generated Bernoulli stream")
            stream = bernoulli_stream(cfg["box"], np.random.default_rng(seed))
            source = "bernoulli"
        d = stream.ndim
        G = _index_list(grid, d, "grid")
        for n in cfg["ladder"]:
            rungs.append(classical_uniform_sup(stream, G, _index_list(n, d, "ladder")).to_dict())
        extra = {"source": source}
    elif channel == "matrix":
        sys_, x = _system_and_x(cfg)
        d = sys_.d
        G = _index_list(grid, d, "grid")
        e = Projection(fio.matrix_from_data(fio.read_json(cfg["projection"]))) if cfg.get("projection") else None
        for n in cfg["ladder"]:
            rungs.append(uniform_ww_sup(sys_, x, e, _index_list(n, d, "ladder"), G).to_dict())
        # every operator of a matrix algebra lies in the Kronecker factor
        extra = {"kronecker_degenerate": True, "expectation": "non-decay" if np.any(x) else "zero"}
    else:
        raise fio.InputError("channel is 'classical' or 'matrix'")
    sups = [r["sup"] for r in rungs]
    result = {
        "channel": channel,
        "rungs": rungs,
        "sups": sups,
        "strictly_decreasing": all(b < a for a, b in zip(sups, sups[1:])),
        "final": sups[-1] if sups else None,
        **extra,
    }
    return result, EXIT_OK, None


def cmd_vdc_check(cfg: dict):
    if not cfg.get("input"):
        raise fio.InputError("missing 'input' path")
    arr = fio.operator_array_from_json(fio.read_json(cfg["input"]))
    h = _index_list(cfg["h"], 2, "h")
    if any(v < 0 for v in h):
        raise fio.InputError("h must be non-negative")
    r = vdc_bound(arr, *h)
    holds = r.holds(float(cfg["tolerance"]))
    result = {**r.to_dict(), "holds": holds, "guaranteed": arr.is_padded and not r.outside_hypothesis}
    violated = not holds and arr.is_padded and not r.outside_hypothesis
    return result, (EXIT_INVARIANT if violated else EXIT_OK), None


def cmd_vdc_fuzz(cfg: dict):
    seed = _require_seed(cfg, "vdc fuzz")
    rep = vdc_fuzz(
        seed,
        trials=int(cfg["trials"]),
        max_dim=int(cfg["max_dim"]),
        max_n=int(cfg["max_n"]),
        h_policy=str(cfg["h_policy"]),
        tol=float(cfg["tolerance"]),
    )
    return rep.to_dict(), (EXIT_INVARIANT if rep.violations else EXIT_OK), None


COMMANDS = {
    "weight analyze": cmd_weight_analyze,
    "weight classify": cmd_weight_classify,
    "spectral estimate": cmd_spectral_estimate,
    "spectral affinity": cmd_spectral_affinity,
    "system simulate": cmd_system_simulate,
    "system ww-uniform": cmd_system_ww_uniform,
    "vdc check": cmd_vdc_check,
    "vdc fuzz": cmd_vdc_fuzz,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON object with parameters")
    common.add_argument("--seed", type=int, metavar="U64", help="seed for randomized runs")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter")
    common.add_argument("inputs", nargs="*", help="input files")

    parser = argparse.ArgumentParser(prog="wwergodic", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)
    actions: dict[str, list[str]] = {}
    for name in COMMANDS:
        g, a = name.split()
        actions.setdefault(g, []).append(a)
    for g, acts in actions.items():
        gp = groups.add_parser(g)
        sub = gp.add_subparsers(dest="action", required=True)
        for a in acts:
            sub.add_parser(a, parents=[common])
    return parser


def run(argv=None) -> tuple[int, Optional[dict], str]:
    """Execute one command; returns ``(exit code, report, rendered text)``."""
    args = build_parser().parse_args(argv)
    command = f"{args.group} {args.action}"
    try:
        cfg = resolve_config(command, args)
        result, code, table = COMMANDS[command](cfg)
    except (fio.InputError, ValueError, KeyError, TypeError) as exc:
        msg = f"error: {exc}"
        return EXIT_INPUT, None, msg
    report = make_report(cfg, result)
    if args.format == "csv":
        text = to_csv(report, table)
    else:
        text = json.dumps(report, sort_keys=True, indent=2)
    return code, report, text


def main(argv=None) -> int:
    args_list = sys.argv[1:] if argv is None else argv
    code, report, text = run(args_list)
    if report is None:
        print(text, file=sys.stderr)
        return code
    parsed = build_parser().parse_args(args_list)
    if parsed.out:
        try:
            with open(parsed.out, "w", encoding="utf-8") as fh:
                fh.write(text + ("" if text.endswith("\n") else "\n"))
        except OSError as exc:
            print(f"error: cannot write {parsed.out}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
