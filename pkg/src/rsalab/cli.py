"""Command-line interface.

Exit status: 0 success, 1 selftest failure, 2 domain error, 64 usage error.
Block streams on stdin/stdout are space-separated decimal.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, codec, rsa, spmd
from .errors import DomainError
from .modmath import AlgorithmSelector
from .selftest import run_selftest

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _algo_name(text: str) -> str:
    try:
        AlgorithmSelector.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _grid(text: str) -> tuple[int, int]:
    try:
        blocks, tpb = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected BLOCKS,THREADS, got {text!r}") from None
    return blocks, tpb


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rsalab", description="Toy RSA lab with an SPMD parallel map engine.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate a key pair from two small primes")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--e", type=int)
    p.add_argument("--out", required=True, help="basename for <out>.pub and <out>.priv")

    p = sub.add_parser("validate", help="check a claimed key pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)

    p = sub.add_parser("encode", help="lowercase text to a packet stream")
    p.add_argument("text", nargs="?", help="defaults to stdin")

    p = sub.add_parser("decode", help="packet stream to lowercase text")
    p.add_argument("packets", nargs="*", help="defaults to stdin")

    for name, key_help in (("encrypt", "public key file"), ("decrypt", "private key file")):
        p = sub.add_parser(name, help=f"{name} a block stream")
        p.add_argument("--key", required=True, help=key_help)
        p.add_argument("--algo", type=_algo_name, default="l2r",
                       help="naive, r2l, l2r, kary, sliding or halving")
        p.add_argument("--k", type=int, default=4, help="window for kary/sliding")
        p.add_argument("--faithful", action="store_true",
                       help="halving: keep the kernel's e=0 behaviour")
        p.add_argument("--parallel", type=_grid, metavar="BLOCKS,THREADS")
        p.add_argument("--workers", type=int)
        if name == "encrypt":
            p.add_argument("--text", help="encode this text instead of reading blocks")
        else:
            p.add_argument("--to-text", action="store_true", help="decode the result to letters")
        p.add_argument("blocks", nargs="*", help="decimal blocks; defaults to stdin")

    p = sub.add_parser("bench", help="run a benchmark sweep and print CSV")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--table1", action="store_true")
    which.add_argument("--table2", action="store_true")
    which.add_argument("--plan")
    p.add_argument("--out", help="write results here and the run log to <out>.log")
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int, default=0)

    sub.add_parser("selftest", help="run the embedded worked-example fixtures")
    return parser


def _read_blocks(args_blocks, stdin) -> list[int]:
    if args_blocks:
        return codec.parse_stream(" ".join(args_blocks))
    return codec.parse_stream(stdin.read())


def cmd_keygen(args, out) -> int:
    kp = rsa.keygen(args.p, args.q, args.e)
    rsa.write_key(f"{args.out}.pub", kp.public)
    rsa.write_key(f"{args.out}.priv", kp.private)
    print(f"n={kp.n} phi={kp.phi} e={kp.e} d={kp.d}", file=out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    report = rsa.validate_keypair(args.n, args.e, args.d, args.p, args.q)
    print(report, file=out)
    return EXIT_OK if report.overall else EXIT_DOMAIN


def cmd_transform(args, out, stdin) -> int:
    key = rsa.read_key(args.key)
    encrypting = args.command == "encrypt"
    if encrypting != isinstance(key, rsa.PublicKey):
        raise DomainError(f"{args.key}: {args.command} needs a "
                          f"{'public' if encrypting else 'private'} key")
    exponent = key.e if encrypting else key.d
    algo = AlgorithmSelector.parse(args.algo, args.k, args.faithful)
    if encrypting and args.text is not None:
        blocks = codec.encode_text(args.text)
    else:
        blocks = _read_blocks(args.blocks, stdin)
    for b in blocks:
        if b >= key.n:
            raise DomainError(f"block exceeds modulus: {b} >= {key.n}")

    context = (key.n, exponent, algo)
    if args.parallel:
        config = spmd.LaunchConfig(*args.parallel, workers=args.workers or spmd.default_workers())
        result, _ = spmd.launch_map(config, blocks, rsa.transform_kernel, context)
    else:
        result, _ = spmd.sequential_map(blocks, rsa.transform_kernel, context)

    if encrypting:
        print(codec.format_stream(result, width=1), file=out)
    elif args.to_text:
        print(codec.decode_packets(result), file=out)
    else:
        print(codec.format_stream(result), file=out)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    trials = args.trials or 20
    if args.table1:
        plan = bench.table1_plan(args.workers, trials, args.seed)
    elif args.table2:
        plan = bench.table2_plan(args.workers, trials, args.seed)
    else:
        plan = bench.load_plan(args.plan)
        if args.trials:
            plan.trials = args.trials
    emit = bench.emit_markdown if args.format == "md" else bench.emit_csv
    if args.out:
        with open(f"{args.out}.log", "w") as log:
            records = bench.run_bench(plan, log)
        Path(args.out).write_text(emit(records))
    else:
        records = bench.run_bench(plan)
        out.write(emit(records))
    failed = [r for r in records if r.error]
    for r in failed:
        print(f"size {r.data_size}: {r.error}", file=sys.stderr)
    return EXIT_DOMAIN if failed else EXIT_OK


def cmd_selftest(out) -> int:
    results = run_selftest()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<22} {detail}", file=out)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_SELFTEST


def main(argv=None, out=None, stdin=None) -> int:
    out = out or sys.stdout
    stdin = stdin or sys.stdin
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "keygen":
            return cmd_keygen(args, out)
        if args.command == "validate":
            return cmd_validate(args, out)
        if args.command == "encode":
            text = args.text if args.text is not None else stdin.read().strip()
            print(codec.format_stream(codec.encode_text(text)), file=out)
            return EXIT_OK
        if args.command == "decode":
            print(codec.decode_packets(_read_blocks(args.packets, stdin)), file=out)
            return EXIT_OK
        if args.command in ("encrypt", "decrypt"):
            return cmd_transform(args, out, stdin)
        if args.command == "bench":
            return cmd_bench(args, out)
        return cmd_selftest(out)
    except (DomainError, OSError) as exc:
        print(f"rsalab: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
