"""Command-line front end: config ingestion, dispatch, CSV emission.

Commands: ``bound`` (cut table and min-cut report), ``cfrate`` (optimized
compress-forward rate with binding constraints), ``sweep`` (relay-power
convergence CSV), ``verify`` (built-in verification suites).

The config is one JSON document::

    {
      "nodes": [
        {"id": 1, "role": "source", "power": 1.0, "position": [0.0, 0.0]},
        {"id": 2, "role": "relay", "power_db": 30, "noise": 1.0},
        {"id": 3, "role": "destination", "noise_db": 0}
      ],
      "gains": [[0,1,1],[1,0,1],[1,1,0]],
      "sweep": {"gammas": [1, 10, 100]},
      "cf": {"quantifier": "forall", "mode": "uniform", "tol": 1e-9, "top_k": 5},
      "verify": {"det_samples": 500, "network_samples": 100}
    }

``gains`` and ``path_loss`` are mutually exclusive: give the matrix
directly, or give per-node positions plus the path-loss law. Powers and
noises may be linear (``power``) or dB (``power_db``, converted as
10^(db/10)); exactly one of the pair. Command-line flags override the
``cf`` section.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 size
guard, 4 no feasible quantization. All numbers print with 12 significant
digits, so identical configs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import (
    build_rate_report,
    convergence_sweep,
    cut_rate_table,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    GuardExceeded,
    Infeasible,
    VerificationFailure,
)
from . import selftest
from .topology import (
    NetworkSpec,
    NodeSpec,
    PathLossParams,
    from_gains,
    from_geometry,
    validate,
)

_MODE_WORDS = {"uniform": "uniform_bisection", "coordinate": "coordinate_descent"}
_NODE_KEYS = {"id", "role", "position", "power", "power_db", "noise", "noise_db"}


def _fmt(x: float) -> str:
    return format(x, ".12g")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _linear_field(entry: dict, base: str, node_id: object) -> float | None:
    lin, db = entry.get(base), entry.get(f"{base}_db")
    if lin is not None and db is not None:
        raise ConfigError(f"node {node_id}: give {base} or {base}_db, not both")
    if db is not None:
        return 10.0 ** (float(db) / 10.0)
    return None if lin is None else float(lin)


def _node_from_entry(entry: object, index: int) -> NodeSpec:
    if not isinstance(entry, dict):
        raise ConfigError(f"nodes[{index}] must be an object")
    unknown = set(entry) - _NODE_KEYS
    if unknown:
        raise ConfigError(f"nodes[{index}] has unknown keys {sorted(unknown)}")
    node_id = entry.get("id")
    role = entry.get("role")
    if not isinstance(node_id, int):
        raise ConfigError(f"nodes[{index}] needs an integer id, got {node_id!r}")
    if role not in ("source", "relay", "destination"):
        raise ConfigError(f"node {node_id}: role must be source|relay|destination, got {role!r}")
    position = entry.get("position")
    if position is not None:
        if not (isinstance(position, (list, tuple)) and len(position) == 2):
            raise ConfigError(f"node {node_id}: position must be [x, y]")
        position = (float(position[0]), float(position[1]))
    power = _linear_field(entry, "power", node_id)
    noise = _linear_field(entry, "noise", node_id)
    if role in ("source", "relay") and power is None:
        raise ConfigError(f"node {node_id} ({role}) needs power or power_db")
    if role == "destination" and power is not None:
        raise ConfigError(f"node {node_id} (destination) must not have a power")
    if role in ("relay", "destination") and noise is None:
        raise ConfigError(f"node {node_id} ({role}) needs noise or noise_db")
    if role == "source" and noise is not None:
        raise ConfigError(f"node {node_id} (source) must not have a noise")
    try:
        return NodeSpec(id=node_id, role=role, position=position, power=power, noise=noise)
    except ValueError as exc:
        raise ConfigError(f"node {node_id}: {exc}") from exc


def network_from_config(doc: dict) -> NetworkSpec:
    nodes_doc = doc.get("nodes")
    if not isinstance(nodes_doc, list) or not nodes_doc:
        raise ConfigError("config needs a nonempty 'nodes' array")
    nodes = [_node_from_entry(e, i) for i, e in enumerate(nodes_doc)]
    has_gains = "gains" in doc
    has_pl = "path_loss" in doc
    if has_gains == has_pl:
        raise ConfigError("give exactly one of 'gains' or 'path_loss'")
    if has_gains:
        try:
            gains = np.asarray(doc["gains"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'gains' must be a numeric matrix: {exc}") from exc
        try:
            net = from_gains(nodes, gains)
        except DimensionMismatch as exc:
            raise ConfigError(str(exc)) from exc
    else:
        pl = doc["path_loss"]
        if not isinstance(pl, dict) or not {"kappa", "eta"} <= set(pl):
            raise ConfigError("'path_loss' must be an object with kappa and eta")
        try:
            params = PathLossParams(kappa=float(pl["kappa"]), eta=float(pl["eta"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad path_loss: {exc}") from exc
        try:
            net = from_geometry(nodes, params)
        except (ValueError, DimensionMismatch) as exc:
            raise ConfigError(str(exc)) from exc
    problems = validate(net)
    if problems:
        raise ConfigError("invalid network: " + "; ".join(problems))
    return net


def _cf_settings(doc: dict, args: argparse.Namespace) -> tuple[str, str, float, int]:
    cf = doc.get("cf", {})
    if not isinstance(cf, dict):
        raise ConfigError("'cf' must be an object")
    quantifier = args.quantifier or cf.get("quantifier", "forall")
    if quantifier not in ("forall", "exists"):
        raise ConfigError(f"quantifier must be forall or exists, got {quantifier!r}")
    mode_word = args.mode or cf.get("mode", "uniform")
    if mode_word not in _MODE_WORDS:
        raise ConfigError(f"mode must be uniform or coordinate, got {mode_word!r}")
    tol = args.tol if args.tol is not None else cf.get("tol", 1e-9)
    try:
        tol = float(tol)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad tol: {tol!r}") from exc
    if not tol > 0.0:
        raise ConfigError(f"tol must be > 0, got {tol!r}")
    top_k = getattr(args, "top_k", None)
    if top_k is None:
        top_k = cf.get("top_k", 5)
    try:
        top_k = int(top_k)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad top_k: {top_k!r}") from exc
    return quantifier, _MODE_WORDS[mode_word], tol, top_k


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _cut_label(ids: tuple[int, ...]) -> str:
    return "{" + ",".join(str(i) for i in ids) + "}"


def cmd_bound(args: argparse.Namespace) -> int:
    doc = load_config(args.config)
    net = network_from_config(doc)
    table = cut_rate_table(net, args.override_guard)
    best_cut, best_val = min(table, key=lambda cv: cv[1])
    lines = [
        f"nodes: {net.num_nodes} (relays {_cut_label(net.relay_ids)})",
        f"source-cut bound: {_fmt(table[0][1])} bits",
        f"min cut: {_cut_label(best_cut.sorted_ids())} at {_fmt(best_val)} bits",
        "",
        "per-cut rates (independent Gaussian inputs; the source cut is the",
        "binding upper bound, other cuts are input-law estimates):",
    ]
    width = max(len(_cut_label(c.sorted_ids())) for c, _ in table)
    lines.append(f"  {'tx_side'.ljust(width)}  rate_bits")
    for cut, val in table:
        lines.append(f"  {_cut_label(cut.sorted_ids()).ljust(width)}  {_fmt(val)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_cfrate(args: argparse.Namespace) -> int:
    doc = load_config(args.config)
    net = network_from_config(doc)
    quantifier, mode, tol, top_k = _cf_settings(doc, args)
    report = build_rate_report(
        net,
        mode=mode,
        quantifier=quantifier,
        tol=tol,
        top_k=top_k,
        override_guard=args.override_guard,
    )
    lines = [
        f"quantifier: {report.quantifier}   mode: {mode}",
        f"upper bound:   {_fmt(report.upper_bound_bits)} bits",
        f"cf rate:       {_fmt(report.cf_rate_bits)} bits",
        f"gap:           {_fmt(report.gap_bits)} bits",
        f"min cut:       {_cut_label(report.min_cut.sorted_ids())} at "
        f"{_fmt(report.min_cut_bits)} bits",
        "",
        "optimal quantization noise:",
    ]
    for rid, val in report.q_star.entries:
        lines.append(f"  relay {rid}: Q = {_fmt(val)}")
    if not report.q_star.entries:
        lines.append("  (no relays)")
    lines.append("")
    lines.append(f"tightest constraints (top {len(report.binding_constraints)}):")
    for cm in report.binding_constraints:
        inst = cm.instance
        blocks = "+".join(_cut_label(b) for b in inst.partition)
        recv = ",".join(str(r) for r in inst.assignment)
        lines.append(
            f"  S={_cut_label(inst.s)} blocks {blocks} -> receivers ({recv})"
            f"  margin_log2 {_fmt(cm.margin_log2)}"
        )
    if not report.binding_constraints:
        lines.append("  (none: no relay subsets)")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    doc = load_config(args.config)
    net = network_from_config(doc)
    quantifier, _, tol, _ = _cf_settings(doc, args)
    sweep_doc = doc.get("sweep")
    if not isinstance(sweep_doc, dict) or "gammas" not in sweep_doc:
        raise ConfigError("config needs a 'sweep' object with a 'gammas' array")
    raw = sweep_doc["gammas"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'sweep.gammas' must be a nonempty array")
    try:
        gammas = [float(g) for g in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'sweep.gammas' must be numeric: {exc}") from exc
    if any(b < a for a, b in zip(gammas, gammas[1:])):
        raise ConfigError(f"'sweep.gammas' must be sorted ascending, got {gammas}")
    if any(not g >= 1.0 for g in gammas):
        raise ConfigError(f"every gamma must be >= 1, got {gammas}")
    rows = convergence_sweep(net, gammas, quantifier, tol, args.override_guard)
    out = ["gamma,upper_bound_bits,cf_rate_bits,gap_bits,q_uniform,feasible"]
    for r in rows:
        out.append(
            ",".join(
                (
                    _fmt(r.gamma),
                    _fmt(r.upper_bound_bits),
                    _fmt(r.cf_rate_bits),
                    _fmt(r.gap_bits),
                    _fmt(r.q_uniform),
                    "true" if r.feasible else "false",
                )
            )
        )
    _emit("\n".join(out) + "\n", args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    overrides: dict = {}
    if args.config:
        doc = load_config(args.config)
        vdoc = doc.get("verify", {})
        if not isinstance(vdoc, dict):
            raise ConfigError("'verify' must be an object")
        if "alpha_offsets" in vdoc:
            overrides["alpha_offsets"] = _grid(vdoc["alpha_offsets"], "verify.alpha_offsets")
        if "beta_grid" in vdoc:
            overrides["beta_grid"] = _grid(vdoc["beta_grid"], "verify.beta_grid")
        if "det_samples" in vdoc:
            overrides["det_samples"] = _count(vdoc["det_samples"], "verify.det_samples")
        if "network_samples" in vdoc:
            overrides["net_samples"] = _count(vdoc["network_samples"], "verify.network_samples")
        if "seed" in vdoc:
            overrides["seed"] = _count(vdoc["seed"], "verify.seed", minimum=0)
    results = selftest.run_all(**overrides)
    name_w = max(len(r.name) for r in results)
    lines = []
    for r in results:
        word = "PASS" if r.passed else "FAIL"
        lines.append(f"{word}  {r.name.ljust(name_w)}  {r.detail}  ({r.elapsed_s:.2f}s)")
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} suites passed")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if passed == len(results) else 1


def _grid(value: object, where: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a nonempty array of numbers")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must be numeric: {exc}") from exc


def _count(value: object, where: str, minimum: int = 1) -> int:
    if not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{where} must be an integer >= {minimum}, got {value!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaycap",
        description=(
            "Cut-set capacity bounds and compress-forward achievable rates "
            "for Gaussian single-source relay networks"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, config_required: bool = True) -> None:
        sp.add_argument("--config", required=config_required, help="JSON config path")
        sp.add_argument("--quantifier", choices=("forall", "exists"), default=None,
                        help="constraint family quantifier (default from config, else forall)")
        sp.add_argument("--mode", choices=("uniform", "coordinate"), default=None,
                        help="quantization optimizer (default from config, else uniform)")
        sp.add_argument("--tol", type=float, default=None, help="bisection relative tolerance")
        sp.add_argument("--out", default=None, help="write output to this file instead of stdout")
        sp.add_argument("--override-guard", action="store_true",
                        help="allow exhaustive enumeration beyond the size guard")

    sp = sub.add_parser("bound", help="cut rates and the min-cut upper bound")
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("cfrate", help="optimize quantization and report the achievable rate")
    common(sp)
    sp.add_argument("--top-k", type=int, default=None, dest="top_k",
                    help="how many binding constraints to list (default 5)")
    sp.set_defaults(func=cmd_cfrate)

    sp = sub.add_parser("sweep", help="relay-power convergence CSV")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the built-in verification suites")
    common(sp, config_required=False)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GuardExceeded as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 3
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
