"""Command-line front end.

Exit codes are a stable contract: 0 ok, 1 usage/parse/protocol error,
2 deadlock, 3 illegal model, 4 oracle state cap exceeded.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import bench as bench_mod
from . import engine as engine_mod
from .engine import Engine, EngineError
from .model import Envelope, Illegal, MessageOccurrence, Mode, NoDeadlock, Role, validate_static
from .oracle import StateCapExceeded, cycle_check, simulate_exhaustive
from .parser import ParseError, parse_abstract, parse_dsl, parse_model, render_abstract, render_dsl
from .report import build_report, exit_code_for, to_json, to_text
from .signatures import SignatureSpace


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # exit code 2 means "deadlock" here, so usage errors must not use it
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="syncheck", description="Static deadlock checker for synchronous message-passing models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", parents=[], help="check a model file")
    p_check.add_argument("path")
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    p_check.add_argument("--mode", choices=("auto", "strict", "abstract"), default="auto")
    p_check.add_argument("--validate-only", action="store_true")

    p_stream = sub.add_parser("stream", help="check append/close events from stdin")
    p_stream.add_argument("--format", choices=("text", "json"), default="text")
    p_stream.add_argument("--mode", choices=("auto", "strict", "abstract"), default="auto")

    p_oracle = sub.add_parser("oracle", help="run a ground-truth backend on a model file")
    p_oracle.add_argument("path")
    p_oracle.add_argument("--backend", choices=("simulate", "cycle"), default="simulate")
    p_oracle.add_argument("--cap", type=int, default=10**6)
    p_oracle.add_argument("--format", choices=("text", "json"), default="text")

    p_bench = sub.add_parser("bench", help="time the engine against the cycle detector")
    p_bench.add_argument("--pattern", choices=bench_mod.PATTERNS, default="pairs")
    p_bench.add_argument("-P", "--processes", type=int, default=2)
    p_bench.add_argument("-M", "--messages", type=int, default=1000)
    p_bench.add_argument("--seeds", type=int, nargs="+", default=[0])
    p_bench.add_argument("--reps", type=int, default=3)
    p_bench.add_argument("--csv", action="store_true")

    p_gen = sub.add_parser("gen", help="write a generated model")
    p_gen.add_argument("--pattern", choices=bench_mod.PATTERNS, default="pairs")
    p_gen.add_argument("-P", "--processes", type=int, default=2)
    p_gen.add_argument("-M", "--messages", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument("--gen-format", choices=("dsl", "abstract"), default="dsl")
    return parser


def _emit(report: dict, fmt: str, out) -> None:
    print(to_json(report) if fmt == "json" else to_text(report), file=out)


def _parse_file(path: str, mode: str):
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if mode == "strict":
        return parse_dsl(text)
    if mode == "abstract":
        return parse_abstract(text)
    return parse_model(text)


def cmd_check(args, out, err) -> int:
    try:
        model = _parse_file(args.path, args.mode)
    except (OSError, ParseError) as exc:
        print(f"{args.path}: {exc}", file=err)
        return 1
    if args.validate_only:
        reason = validate_static(model)
        if reason is None:
            report = build_report(NoDeadlock(), model.space, messages=model.message_count)
            report["matchedPairs"] = 0  # nothing has been matched, only validated
        else:
            report = build_report(Illegal(reason), model.space, messages=model.message_count)
        _emit(report, args.format, out)
        return exit_code_for(report)
    verdict, eng = engine_mod.check_with_engine(model)
    report = build_report(verdict, model.space, messages=model.message_count, steps=eng.steps)
    _emit(report, args.format, out)
    return exit_code_for(report)


def _parse_stream_token(token: str, rank: int, space: SignatureSpace, mode: Mode) -> MessageOccurrence:
    if mode is Mode.STRICT:
        parts = token.split(",")
        if len(parts) not in (3, 4):
            raise ValueError(f"expected tag,src,dst[,comm], got {token!r}")
        tag, src, dst = (int(p) for p in parts[:3])
        comm = int(parts[3]) if len(parts) == 4 else 0
        env = Envelope(tag=tag, source=src, destination=dst, communicator=comm)
        if rank == env.source:
            role = Role.SEND
        elif rank == env.destination:
            role = Role.RECV
        else:
            raise ValueError(f"process {rank} is neither source nor destination of {token!r}")
        return MessageOccurrence(space.signature_for(env), role, env)
    return MessageOccurrence(space.intern_character(token))


def cmd_stream(args, out, err, stdin) -> int:
    space = SignatureSpace()
    engine: Optional[Engine] = None
    mode = {"strict": Mode.STRICT, "abstract": Mode.ABSTRACT, "auto": None}[args.mode]
    verdict = None
    saw_end = False

    for lineno, raw in enumerate(stdin, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "end":
                saw_end = True
                break
            if kind not in ("append", "close") or len(fields) < 2:
                raise ValueError(f"unknown event {line!r}")
            rank = int(fields[1])
            if kind == "append":
                if len(fields) < 3:
                    raise ValueError("append needs at least one token")
                if mode is None:
                    mode = Mode.STRICT if "," in fields[2] else Mode.ABSTRACT
                if engine is None:
                    engine = Engine(mode)
                occurrences = [_parse_stream_token(tok, rank, space, mode) for tok in fields[2:]]
                engine.append(rank, occurrences)
            else:
                if engine is None:
                    engine = Engine(mode or Mode.ABSTRACT)
                engine.close(rank)
        except (ValueError, EngineError) as exc:
            print(f"stdin:{lineno}: {exc}", file=err)
            return 1
        verdict = engine.drain()
        if isinstance(verdict, Illegal):
            break  # never recoverable; later events could only add noise

    if engine is None:
        engine = Engine(mode or Mode.ABSTRACT)
        verdict = engine.drain()
    if verdict is None:
        if not saw_end:
            verdict = engine.drain()
        if verdict is None:
            open_ranks = [r for r in engine.ranks() if not engine.is_closed(r)]
            print(f"protocol error: stream ended with open sequences {open_ranks}", file=err)
            return 1
    report = build_report(verdict, space, messages=engine.message_count, steps=engine.steps)
    _emit(report, args.format, out)
    return exit_code_for(report)


def cmd_oracle(args, out, err) -> int:
    try:
        model = _parse_file(args.path, "auto")
    except (OSError, ParseError) as exc:
        print(f"{args.path}: {exc}", file=err)
        return 1
    if args.backend == "simulate":
        try:
            result = simulate_exhaustive(model, cap=args.cap)
        except StateCapExceeded as exc:
            print(f"{args.path}: {exc}", file=err)
            return 4
        report = build_report(
            result.verdict,
            model.space,
            messages=model.message_count,
            confluence=result.confluence_agreed,
        )
    else:
        result = cycle_check(model)
        report = build_report(
            result.verdict,
            model.space,
            messages=model.message_count,
            witness=result.witness,
            unpaired=result.unpaired,
        )
    _emit(report, args.format, out)
    return exit_code_for(report)


def cmd_bench(args, out, err) -> int:
    rows = []
    try:
        for seed in args.seeds:
            spec = bench_mod.GenSpec(
                pattern=args.pattern,
                processes=args.processes,
                messages_per_process=args.messages,
                seed=seed,
            )
            rows.extend(bench_mod.bench_run(spec, repetitions=args.reps))
    except ValueError as exc:
        print(f"bench: {exc}", file=err)
        return 1
    if args.csv:
        print(bench_mod.CSV_HEADER, file=out)
        for row in rows:
            print(row.csv(), file=out)
    else:
        print(f"{'backend':<8} {'pattern':<8} {'P':>4} {'M':>8} {'n':>10} {'median_ms':>10} {'steps':>10}", file=out)
        for row in rows:
            steps = "-" if row.steps is None else str(row.steps)
            print(
                f"{row.backend:<8} {row.pattern:<8} {row.processes:>4} "
                f"{row.messages_per_process:>8} {row.n:>10} {row.median_ms:>10.3f} {steps:>10}",
                file=out,
            )
    return 0


def cmd_gen(args, out, err) -> int:
    try:
        spec = bench_mod.GenSpec(
            pattern=args.pattern,
            processes=args.processes,
            messages_per_process=args.messages,
            seed=args.seed,
        )
        model = bench_mod.generate(spec)
        text = render_dsl(model) if args.gen_format == "dsl" else render_abstract(model)
    except ValueError as exc:
        print(f"gen: {exc}", file=err)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        out.write(text)
    return 0


def main(argv: Optional[List[str]] = None, *, stdin=None, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    stdin = stdin if stdin is not None else sys.stdin
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return 1
    if args.command == "check":
        return cmd_check(args, out, err)
    if args.command == "stream":
        return cmd_stream(args, out, err, stdin)
    if args.command == "oracle":
        return cmd_oracle(args, out, err)
    if args.command == "bench":
        return cmd_bench(args, out, err)
    if args.command == "gen":
        return cmd_gen(args, out, err)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
