"""Command-line front end.

Modes: seeded | online | coreset | adversary | verify | inequalities.
Every run writes report.json and trace.csv to the output directory; all
numeric output uses 17 significant digits so reports round-trip exactly
and rerunning a fixed (config, seed) pair reproduces the bytes.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import adversary, coreset, oracle, streaming
from .ellipsoid import log_volume, membership
from .state import RoundingState

MONOTONE_TOL = 1e-7
GENERATORS = ("ball", "gaussian", "lattice", "simplex-shell", "file")
MODES = ("seeded", "online", "coreset", "adversary", "verify", "inequalities")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    input_path: Optional[str] = None
    gen: Optional[str] = None
    d: int = 2
    n: int = 100
    lattice_n: int = 10
    r_big: float = 8.0
    c0: Optional[np.ndarray] = None
    r0: Optional[float] = None
    seed: int = 0
    out: str = "."
    verify_every: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        if (self.input_path is None) == (self.gen is None) and \
                self.mode not in ("adversary", "inequalities"):
            raise InputError("exactly one of --input and --gen is required")
        if self.d < 1 or self.n < 1 or self.lattice_n < 1:
            raise InputError("d, n, and N must be positive")

    @property
    def effective_verify_every(self) -> int:
        if self.verify_every is not None:
            return self.verify_every
        return 1 if self.d <= 6 else 0


def parse_points(path: str) -> np.ndarray:
    """Read one point per CSV line; '#' comments and blank lines skipped."""
    rows: List[List[float]] = []
    dim: Optional[int] = None
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(",")
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise InputError(f"non-numeric field at line {lineno}") from exc
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise InputError(
                f"ragged row at line {lineno}: expected {dim} fields, got {len(row)}")
        rows.append(row)
    if not rows:
        raise InputError("no points in input file")
    return np.asarray(rows, dtype=float)


def generate(spec: str, d: int, n: int, seed: int, lattice_n: int = 10,
             r_big: float = 8.0) -> np.ndarray:
    """Deterministic point streams for a fixed seed."""
    rng = np.random.default_rng(seed)
    if spec == "ball":
        g = rng.standard_normal((n, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        radii = rng.random(n) ** (1.0 / d)
        return g * radii[:, None]
    if spec == "gaussian":
        return rng.standard_normal((n, d))
    if spec == "lattice":
        return rng.integers(-lattice_n, lattice_n + 1, size=(n, d)).astype(float)
    if spec == "simplex-shell":
        trace = adversary.run_adversary(adversary.library_rule, d, r_big)
        return np.asarray(trace.points[:n] if n < len(trace.points)
                          else trace.points)
    raise InputError(f"unknown generator {spec!r}")


def _load_stream(config: RunConfig) -> np.ndarray:
    if config.input_path is not None:
        pts = parse_points(config.input_path)
        config.d = pts.shape[1]
        return pts
    return generate(config.gen, config.d, config.n, config.seed,
                    config.lattice_n, config.r_big)


# --- deterministic JSON with fixed-width floats -----------------------------


def _fmt(x: float) -> str:
    if x != x:
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k in sorted(obj):
            items.append(f'{pad}  "{k}": {to_json(obj[k], indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _steps_payload(report: streaming.RunReport) -> List[Dict]:
    return [
        {"t": r.t, "kind": r.step_kind, "alpha_inv": 1.0 / r.alpha,
         "log_vol": r.log_volume, "gamma": r.gamma}
        for r in report.records
    ]


def _trace_csv(steps: List[Dict]) -> str:
    lines = ["t,kind,alpha_inv,log_vol,gamma"]
    for s in steps:
        lines.append(",".join([str(s["t"]), s["kind"], _fmt(s["alpha_inv"]),
                               _fmt(s["log_vol"]), _fmt(s["gamma"])]))
    return "\n".join(lines) + "\n"


def _write_outputs(config: RunConfig, payload: Dict, steps: List[Dict]) -> None:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(to_json(payload) + "\n")
    (out / "trace.csv").write_text(_trace_csv(steps))


def _make_verifier(config: RunConfig):
    """A step observer that runs the monotone-step oracle every k steps."""
    every = config.effective_verify_every
    summary = {"checked": 0, "failures": 0, "worst_margin": math.inf}

    def observer(t, prev, next_, z, kind, gamma):
        if every <= 0 or t % every or kind in ("init", "skip", "local"):
            return
        cert = oracle.check_monotone_step(prev, next_, z, tol=MONOTONE_TOL)
        summary["checked"] += 1
        summary["worst_margin"] = min(summary["worst_margin"], cert.worst_margin)
        if not (cert.outer_ok and cert.inner_ok):
            summary["failures"] += 1

    return observer, summary


def _cert_payload(summary: Dict) -> Dict:
    worst = summary["worst_margin"]
    return {
        "checked": summary["checked"],
        "failures": summary["failures"],
        "worst_margin": (worst if summary["checked"] else 0.0),
    }


def run(config: RunConfig) -> int:
    """Execute one mode and write report.json / trace.csv. Returns the
    process exit code: 0 ok, 1 input error, 2 invariant violation."""
    payload: Dict = {"mode": config.mode, "d": config.d, "n": 0,
                     "final_alpha_inv": 1.0, "steps": [],
                     "certificates": {}, "constants": {}}

    if config.mode == "inequalities":
        reports = oracle.inequality_suite()
        reduced = adversary.reduced_case_grid()
        worst = min(r.worst_slack for r in reports)
        payload["certificates"] = {
            r.claim_id: {"worst_slack": r.worst_slack} for r in reports}
        payload["certificates"]["reduced_case"] = {
            "worst_slack": reduced.min_slack}
        payload["constants"] = {"lb_constant_observed": reduced.c_observed,
                                "grid_points": reduced.n_points}
        _write_outputs(config, payload, [])
        ok = worst >= -1e-12 and reduced.min_slack >= -1e-12
        return 0 if ok else 2

    if config.mode == "adversary":
        trace = adversary.run_adversary(adversary.library_rule,
                                        config.d, config.r_big)
        steps = [
            {"t": t, "kind": k, "alpha_inv": a, "log_vol": p, "gamma": 0.0}
            for t, (k, a, p) in enumerate(
                zip(trace.step_kinds, trace.a_values, trace.p_values), start=1)
        ]
        payload.update(n=len(steps), final_alpha_inv=trace.a_values[-1],
                       steps=steps)
        payload["constants"] = {
            "phase2_steps": trace.phase2_steps,
            "final_log_vol": trace.p_values[-1],
            "volume_target": config.d * math.log(config.r_big / 2.0),
        }
        payload["certificates"] = {"stop_reason": trace.stop_reason}
        _write_outputs(config, payload, steps)
        return 0

    points = _load_stream(config)
    payload["d"] = config.d
    payload["n"] = int(points.shape[0])
    observer, summary = _make_verifier(config)

    if config.mode in ("online", "verify") and config.c0 is None:
        state, report = streaming.run_fully_online(points, on_step=observer)
    elif config.mode in ("seeded", "verify"):
        if config.c0 is None or config.r0 is None:
            raise InputError("seeded mode needs --c0 and --r0")
        if config.c0.shape[0] != points.shape[1]:
            raise InputError("--c0 dimension does not match the points")
        state, report = streaming.run_seeded(points, config.c0, config.r0,
                                             on_step=observer)
    elif config.mode == "coreset":
        trace, report = coreset.run_coreset(points)
        state = trace.driver
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "selected.txt").write_text(
            "".join(f"{i}\n" for i in trace.selected))
        payload["constants"]["coreset_size"] = len(trace.selected)
    else:
        raise InputError(f"unknown mode {config.mode!r}")

    steps = _steps_payload(report)
    payload.update(final_alpha_inv=report.final_alpha_inv, steps=steps)
    payload["certificates"] = _cert_payload(summary)
    if config.gen == "lattice":
        denom = config.d * math.log(config.d * config.lattice_n)
        payload["constants"]["c_empirical"] = report.final_alpha_inv / denom
    payload["constants"]["worst_final_margin"] = max(
        float(membership(state.ellipsoid, p)) for p in points)
    _write_outputs(config, payload, steps)

    if config.mode == "verify":
        bad = summary["failures"] > 0 or (
            summary["checked"] and summary["worst_margin"] < -MONOTONE_TOL)
        return 2 if bad else 0
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ellipstream",
        description="Streaming ellipsoidal rounding of a point stream.")
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--input", help="CSV file of points, one per line")
    p.add_argument("--gen", choices=[g for g in GENERATORS if g != "file"],
                   help="synthetic stream generator")
    p.add_argument("--d", type=int, default=2, help="dimension")
    p.add_argument("--n", type=int, default=100, help="stream length")
    p.add_argument("--N", dest="lattice_n", type=int, default=10,
                   help="lattice half-width (integer coordinates in [-N, N])")
    p.add_argument("--R", dest="r_big", type=float, default=8.0,
                   help="outer radius for the adversary / shell generator")
    p.add_argument("--c0", help="seed-ball center, comma separated")
    p.add_argument("--r0", type=float, help="seed-ball radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--verify-every", type=int, default=None,
                   help="run the step oracle every k steps (0 = off; "
                        "default 1 for d <= 6, 0 otherwise)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    c0 = None
    if args.c0 is not None:
        try:
            c0 = np.asarray([float(f) for f in args.c0.split(",")], dtype=float)
        except ValueError:
            print("error: --c0 must be comma-separated numbers", file=sys.stderr)
            return 1
    try:
        config = RunConfig(
            mode=args.mode, input_path=args.input, gen=args.gen, d=args.d,
            n=args.n, lattice_n=args.lattice_n, r_big=args.r_big, c0=c0,
            r0=args.r0, seed=args.seed, out=args.out,
            verify_every=args.verify_every)
        return run(config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
