"""Command-line entry point: ``mvrcg {generate,sample,learn,bench,rerun}``.

Every command writes its outputs atomically and drops a ``*.manifest.json``
next to the main output recording the argv needed to reproduce it.

Exit codes: 0 success, 1 usage, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .citest import DataError, GaussianTester, OracleTester, SufficientStats, write_csv
from .evaluate import BenchGrid, run_benchmark
from .graph import GraphError, StructureError, from_edge_list, to_edge_list
from .learner import ConfigError, LearnerConfig, learn
from .simulate import GeneratorParams, cg_to_dag_with_latents, random_mvr_cg, sample_gaussian

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _commit(outputs: dict) -> None:
    """Write all outputs only once every one of them has been produced."""
    for path, text in outputs.items():
        _write_atomic(path, text)


def _manifest(command: str, argv: list, params: dict, inputs: list, outputs: list, started: float) -> str:
    doc = {
        "command": command,
        "argv": argv,
        "parameters": params,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "tool_version": __version__,
        "wall_clock_s": round(time.time() - started, 6),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _read_graph(path):
    try:
        return from_edge_list(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def cmd_generate(args, argv, started) -> int:
    N = min(2.0, max(args.p - 1, 0)) if args.N is None else args.N
    params = GeneratorParams(args.p, N, args.seed, args.k)
    G = random_mvr_cg(params)
    out = Path(args.out)
    mpath = out.with_name(out.name + ".manifest.json")
    latents = sum(1 for e in G.edges() if e[2] is e[3] and e[2].name == "ARROW")
    p = {"p": args.p, "N": N, "seed": args.seed, "k": args.k, "latent_count": latents}
    _commit({out: to_edge_list(G), mpath: _manifest("generate", argv, p, [], [out], started)})
    return EXIT_OK


def cmd_sample(args, argv, started) -> int:
    G = _read_graph(args.graph)
    if not G.is_mvr_cg():
        raise InputError(f"{args.graph}: not an MVR chain graph")
    ss = np.random.SeedSequence(args.seed).spawn(2)
    ldag = cg_to_dag_with_latents(G, int(ss[0].generate_state(1)[0]))
    data = sample_gaussian(ldag, args.n, int(ss[1].generate_state(1)[0]))
    out = Path(args.out)
    mpath = out.with_name(out.name + ".manifest.json")
    fd, tmp = tempfile.mkstemp(suffix=".csv")
    os.close(fd)
    try:
        write_csv(tmp, data.columns, data.rows)
        text = Path(tmp).read_text()
    finally:
        os.unlink(tmp)
    p = {"n": args.n, "seed": args.seed, "latent_count": len(ldag.latents)}
    _commit({out: text, mpath: _manifest("sample", argv, p, [args.graph], [out], started)})
    return EXIT_OK


def _parse_order(spec: str, variables: tuple) -> list | None:
    if spec == "asis":
        return None
    if spec.startswith("seed:"):
        try:
            k = int(spec[5:])
        except ValueError:
            raise UsageError(f"bad --order {spec!r}") from None
        perm = np.random.default_rng(k).permutation(len(variables))
        return [variables[i] for i in perm]
    if spec.startswith("file:"):
        path = spec[5:]
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        names = [t for t in text.replace(",", " ").split() if t]
        if sorted(names) != sorted(variables):
            raise InputError(f"{path}: ordering is not a permutation of the variables")
        return names
    raise UsageError(f"--order must be asis, seed:<k> or file:<path>, got {spec!r}")


def cmd_learn(args, argv, started) -> int:
    if (args.data is None) == (args.oracle is None):
        raise UsageError("give exactly one of --data and --oracle")
    try:
        base = LearnerConfig.from_variant(args.variant)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    if args.oracle is not None:
        truth = _read_graph(args.oracle)
        tester = OracleTester(truth)
        source = args.oracle
    else:
        try:
            stats = SufficientStats.from_csv(args.data)
        except OSError as exc:
            raise InputError(f"cannot read {args.data}: {exc}") from None
        tester = GaussianTester(stats, args.alpha)
        source = args.data
    ordering = _parse_order(args.order, tester.variables)
    try:
        config = LearnerConfig(
            base.skeleton_mode, base.triple_mode, base.rule_mode, args.alpha, ordering, args.lo, args.hi
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    res = learn(tester, config)
    prefix = Path(args.out)
    ess_path = prefix.with_name(prefix.name + ".essential.graph")
    fin_path = prefix.with_name(prefix.name + ".final.graph")
    diag_path = prefix.with_name(prefix.name + ".diagnostics.json")
    mpath = prefix.with_name(prefix.name + ".manifest.json")
    outputs = {
        ess_path: to_edge_list(res.essential),
        diag_path: json.dumps(res.diagnostics, indent=2, sort_keys=True) + "\n",
    }
    if res.final is not None:
        outputs[fin_path] = to_edge_list(res.final)
    params = {"variant": config.variant, "alpha": args.alpha, "order": args.order, "lo": args.lo, "hi": args.hi}
    outputs[mpath] = _manifest("learn", argv, params, [source], list(outputs), started)
    _commit(outputs)
    return EXIT_OK


def cmd_bench(args, argv, started) -> int:
    try:
        cfg = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: {exc}") from None
    try:
        grid = BenchGrid.from_dict(cfg)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{args.config}: {exc}") from None
    res = run_benchmark(grid, args.workers)
    out = Path(args.out)
    csv_path = out.with_name(out.name + ".csv")
    sum_path = out.with_name(out.name + ".summary.json")
    mpath = out.with_name(out.name + ".manifest.json")
    outputs = {csv_path: res.to_csv(), sum_path: res.summary_json()}
    outputs[mpath] = _manifest("bench", argv, grid.to_dict(), [args.config], list(outputs), started)
    if not res.rows:
        print(f"bench: every replicate failed ({len(res.failures)} failures)", file=sys.stderr)
        return EXIT_INTERNAL
    _commit(outputs)
    if res.failures:
        print(f"bench: {len(res.failures)} replicate(s) failed; see summary", file=sys.stderr)
    return EXIT_OK


def cmd_rerun(args, argv, started) -> int:
    try:
        doc = json.loads(Path(args.manifest).read_text())
        old = list(doc["argv"])
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.manifest}: {exc}") from None
    return main(old)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mvrcg", description="Structure learning for multivariate regression chain graphs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="random MVR chain graph")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--N", type=float, default=None, help="expected vertex degree (default min(2, p - 1))")
    g.add_argument("--k", type=int, default=None, help="number of chain components (random if omitted)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sample", help="Gaussian sample from a chain graph")
    s.add_argument("graph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    le = sub.add_parser("learn", help="learn a chain graph from data or an oracle")
    le.add_argument("--data")
    le.add_argument("--oracle", metavar="GRAPH")
    le.add_argument("--variant", default="stable-lmpc")
    le.add_argument("--alpha", type=float, default=0.005)
    le.add_argument("--order", default="asis")
    le.add_argument("--lo", type=float, default=50.0, help="majority-rule lower percentage")
    le.add_argument("--hi", type=float, default=50.0, help="majority-rule upper percentage")
    le.add_argument("--out", required=True, help="output path prefix")
    le.set_defaults(func=cmd_learn)

    b = sub.add_parser("bench", help="run a benchmark grid")
    b.add_argument("config", help="JSON grid description")
    b.add_argument("--out", required=True, help="output path prefix")
    b.add_argument("--workers", type=int, default=None)
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("rerun", help="re-execute the command recorded in a manifest")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_rerun)
    return ap


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.time()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if not 0 < getattr(args, "alpha", 0.5) < 1:
        print("mvrcg: error: alpha must lie in (0, 1)", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, argv, started)
    except UsageError as exc:
        print(f"mvrcg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, GraphError, StructureError, DataError, ValueError) as exc:
        print(f"mvrcg: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"mvrcg: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
