"""Command line: ``recsd gen|compile|verify|stats|demo``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numeric or parse failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from .csd import NotUnitaryError
from .generators import GENERATORS, dft, hadamard_n
from .matrix_core import DimensionError, Tolerance, frobenius_dist, num_bits, read_cmat, write_cmat
from .seo import SeoParseError, read_seo, reconstruct, stats, write_seo
from .synth import CompileOptions, compile_unitary, factor_labels
from .tree import dump_tree

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
VERIFY_TOL = 1e-7


class UsageError(Exception):
    pass


@dataclass
class CompileReport:
    source: str
    nb: int
    permutation: str
    counts: dict
    total: int
    cnots: int
    error: float
    seconds: float

    def as_text(self) -> str:
        kinds = " ".join(f"{k}={v}" for k, v in sorted(self.counts.items())) or "-"
        return "\n".join(
            [
                f"input        {self.source}",
                f"nb           {self.nb}",
                f"permutation  {self.permutation}",
                f"ops          {self.total} ({kinds})",
                f"cnots        {self.cnots}",
                f"error        {self.error:.3e}",
                f"wall time    {self.seconds:.3f}s",
            ]
        )


def _tolerance(tol: float) -> Tolerance:
    return Tolerance(diag_tol=tol, unitary_tol=tol)


def cmd_gen(args) -> int:
    if args.name == "random-unitary":
        u = GENERATORS[args.name](args.nbits, args.seed)
    else:
        u = GENERATORS[args.name](args.nbits)
    write_cmat(u, args.output if args.output else sys.stdout)
    return EXIT_OK


def cmd_compile(args) -> int:
    u = read_cmat(args.input)
    opts = CompileOptions(args.direction, args.permute, args.permute_side, _tolerance(args.tol), not args.no_peephole)
    start = time.perf_counter()
    result = compile_unitary(u, opts)
    seconds = time.perf_counter() - start
    program = result.program
    if args.output:
        write_seo(program, args.output)
    st = stats(program)
    report = CompileReport(
        source=args.input,
        nb=program.nb,
        permutation=program.metadata["permutation"] + f" ({program.metadata['permutation_side']})",
        counts=st.counts,
        total=st.total,
        cnots=st.cnots,
        error=result.error,
        seconds=seconds,
    )
    print(report.as_text())
    if args.dump_tree:
        print(dump_tree(result.tree))
    if not args.output:
        write_seo(program, sys.stdout)
    return EXIT_OK


def cmd_verify(args) -> int:
    u = read_cmat(args.matrix)
    program = read_seo(args.program)
    nb = num_bits(u.shape[0])
    if program.nb != nb:
        raise DimensionError(f"program acts on {program.nb} bits, matrix on {nb}")
    err = frobenius_dist(reconstruct(program), u)
    bound = 2**nb * VERIFY_TOL
    ok = err < bound
    print(f"error {err:.3e} bound {bound:.1e} {'OK' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_stats(args) -> int:
    print(stats(read_seo(args.program)).as_text())
    return EXIT_OK


def _demo_row(name: str, u, nb: int) -> list[str]:
    down = compile_unitary(u)
    up = compile_unitary(u, direction="uphill")
    st = stats(down.program)
    labels = factor_labels(down.tree)
    up_labels = factor_labels(up.tree)
    if down.permutation is not None:
        # U P = tree product, so U = tree product . P^-1
        labels.append("R(" + ",".join(map(str, down.permutation.inverse().image)) + ")")
    if up.permutation is not None:
        up_labels.insert(0, "R(" + ",".join(map(str, up.permutation.image)) + ")")
    return [
        f"{name} n={nb} ops={st.total} cnots={st.cnots} error={down.error:.2e} uphill_error={up.error:.2e}",
        f"  downhill: {' '.join(labels)}",
        f"  uphill:   {' '.join(up_labels)}",
    ]


def cmd_demo(args) -> int:
    if not 1 <= args.nbits <= 4:
        raise UsageError("demo needs 1 <= --nbits <= 4")
    lines = []
    for n in range(1, args.nbits + 1):
        lines += _demo_row("hadamard", hadamard_n(n), n)
    for n in range(1, args.nbits + 1):
        lines += _demo_row("fourier", dft(n), n)
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recsd", description="Recursive CSD quantum compiler")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a standard unitary as .cmat")
    p.add_argument("name", choices=sorted(GENERATORS))
    p.add_argument("--nbits", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compile", help="compile a .cmat into a .seo program")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--direction", choices=["downhill", "uphill"], default="downhill")
    p.add_argument("--permute", choices=["none", "root", "all"], default="root")
    p.add_argument("--permute-side", choices=["left", "right", "either"], default="left")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--no-peephole", action="store_true")
    p.add_argument("--dump-tree", action="store_true")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="check a program against a matrix")
    p.add_argument("matrix")
    p.add_argument("program")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="gate counts of a .seo program")
    p.add_argument("program")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("demo", help="compile Hadamard and Fourier matrices for n = 1..nbits")
    p.add_argument("--nbits", type=int, default=4)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if getattr(args, "tol", 1.0) <= 0:
            raise UsageError("--tol must be positive")
        if getattr(args, "nbits", 1) < 1:
            raise UsageError("--nbits must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"recsd: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotUnitaryError as exc:
        print(f"recsd: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SeoParseError, DimensionError, ValueError, ArithmeticError, OSError) as exc:
        print(f"recsd: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
