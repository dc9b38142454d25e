"""Command-line front end.

    bach run MODEL [--formula NAME] [--seed N] [--max-steps N] [--output text|structured]
    bach search MODEL [--formula NAME] [--max-depth N] [--all] [--output ...]
    bach ns-attack [--max-depth N] [--output ...]

Exit status: 0 on success (formula met / witness found / attack
reproduced), 1 otherwise, 2 when the model cannot be loaded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import BachError
from .explorer import SearchStatus, search, step_records
from .interpreter import Status, execute
from .ns_model import (
    attack_final_store_terms,
    build_ns_model,
    exchange_projection,
    expected_attack_summary,
)
from .parser import Model, load
from .store import Store

EXIT_OK, EXIT_FAIL, EXIT_LOAD = 0, 1, 2
MAX_SEED = 2**64 - 1


@dataclass
class CliConfig:
    command: str
    model_path: Optional[str] = None
    formula_name: Optional[str] = None
    seed: int = 0
    max_steps: int = 10_000
    max_depth: int = 64
    output: str = "text"
    all_witnesses: bool = False


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _seed(text: str) -> int:
    n = int(text)
    if not 0 <= n <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bach", description="Run and search Bach models under bsL constraints.")
    sub = p.add_subparsers(dest="command", required=True)

    def output_flag(sp):
        sp.add_argument("--output", choices=("text", "structured"), default="text")

    run = sub.add_parser("run", help="randomized constrained execution")
    run.add_argument("model_path", metavar="MODEL")
    run.add_argument("--formula", dest="formula_name", metavar="NAME")
    run.add_argument("--seed", type=_seed, default=0)
    run.add_argument("--max-steps", type=_positive, default=10_000)
    output_flag(run)

    srch = sub.add_parser("search", help="exhaustive bounded search for a witness")
    srch.add_argument("model_path", metavar="MODEL")
    srch.add_argument("--formula", dest="formula_name", metavar="NAME")
    srch.add_argument("--max-depth", type=_positive, default=64)
    srch.add_argument("--all", dest="all_witnesses", action="store_true")
    output_flag(srch)

    ns = sub.add_parser("ns-attack", help="reproduce Lowe's attack on the built-in model")
    ns.add_argument("--max-depth", type=_positive, default=64)
    output_flag(ns)
    return p


def _config(ns: argparse.Namespace) -> CliConfig:
    return CliConfig(**{k: v for k, v in vars(ns).items() if k in CliConfig.__dataclass_fields__})


def _emit_trace(path, out, structured: bool, witness: Optional[int] = None) -> None:
    if structured:
        for rec in step_records(path):
            if witness is not None:
                rec = {"witness": witness, **rec}
            out.write(json.dumps(rec, ensure_ascii=False) + "\n")
    else:
        for i, c in enumerate(path, start=1):
            out.write(f"({i})  {c.trace[-1]}\n")


def _load(cfg: CliConfig, err) -> Optional[Model]:
    try:
        return load(cfg.model_path)
    except OSError as e:
        err.write(f"bach: cannot read {cfg.model_path}: {e.strerror or e}\n")
    except BachError as e:
        err.write(f"bach: {cfg.model_path}:{e}\n")
    return None


def cmd_run(cfg: CliConfig, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    m = _load(cfg, err)
    if m is None:
        return EXIT_LOAD
    try:
        agent = m.entry_agent()
        f = m.goal_formula(cfg.formula_name)
    except BachError as e:
        err.write(f"bach: {e}\n")
        return EXIT_LOAD
    res = execute(agent, f, m.procs, m.formulae, cfg.seed, cfg.max_steps)
    structured = cfg.output == "structured"
    _emit_trace(res.path, out, structured)
    (err if structured else out).write(f"status: {res.status}\n")
    return EXIT_OK if res.status is Status.FORMULA_SATISFIED else EXIT_FAIL


def cmd_search(cfg: CliConfig, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    m = _load(cfg, err)
    if m is None:
        return EXIT_LOAD
    try:
        agent = m.entry_agent()
        f = m.goal_formula(cfg.formula_name)
    except BachError as e:
        err.write(f"bach: {e}\n")
        return EXIT_LOAD
    if f is None:
        err.write("bach: search needs a formula (--formula NAME or 'run ... with NAME')\n")
        return EXIT_LOAD
    structured = cfg.output == "structured"
    results = search(agent, f, m.procs, m.formulae, cfg.max_depth, all=cfg.all_witnesses)
    if not cfg.all_witnesses:
        results = [results]
    found = [r for r in results if r.found]
    if not found:
        msg = "depth limit" if results[0].status is SearchStatus.DEPTH_LIMIT else "exhausted"
        (err if structured else out).write(msg + "\n")
        return EXIT_FAIL
    for n, r in enumerate(found, start=1):
        if cfg.all_witnesses and not structured:
            if n > 1:
                out.write("\n")
            out.write(f"# witness {n} ({len(r.witness.trace)} steps)\n")
        _emit_trace(r.witness.path, out, structured, n if cfg.all_witnesses else None)
    return EXIT_OK


def cmd_ns_attack(cfg: CliConfig, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    m = build_ns_model()
    structured = cfg.output == "structured"
    r = search(m.entry_agent(), m.goal_formula(), m.procs, m.formulae, cfg.max_depth)
    if not r.found:
        msg = "depth limit" if r.status is SearchStatus.DEPTH_LIMIT else "exhausted"
        (err if structured else out).write(msg + "\n")
        return EXIT_FAIL
    summary = exchange_projection(r.witness.trace)
    matches = (summary == expected_attack_summary()
               and r.witness.final.store == Store(attack_final_store_terms()))
    _emit_trace(r.witness.path, out, structured)
    if structured:
        out.write(json.dumps({"summary": [{"sender": str(x.sender), "receiver": str(x.receiver),
                                           "message": str(x.content)} for x in summary],
                              "matches": matches}) + "\n")
    else:
        out.write("\n")
        for x in summary:
            out.write(f"{x}\n")
        out.write("\n" + ("man-in-the-middle attack reproduced\n" if matches
                          else "witness does not match the expected attack\n"))
    return EXIT_OK if matches else EXIT_FAIL


COMMANDS = {"run": cmd_run, "search": cmd_search, "ns-attack": cmd_ns_attack}


def main(argv=None) -> int:
    cfg = _config(build_parser().parse_args(argv))
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
