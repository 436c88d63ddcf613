"""Command-line front end.

    tfsam check FILE                 validate the type hierarchy
    tfsam compile FILE [--disasm]    compile a grammar, optionally list code
    tfsam unify FILE LEFT RIGHT      unify two terms over FILE's hierarchy
    tfsam parse FILE "w1 w2 ..."     parse an input string

Exit codes: 0 for success (including a FAIL unification result and "no
parse", which are answers), 1 for invalid input, 2 for I/O problems, 3
when a resource limit stops a parse.
"""

from __future__ import annotations

import argparse
import sys

from . import compiler, grammar, machine, parser, scan, terms


def main(argv=None) -> int:
    args = _arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (scan.SourceError, compiler.CompileError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except parser.UnknownWordError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except parser.LimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def cmd_check(args) -> int:
    h = grammar.load_hierarchy_only(_read(args.path))
    n = h.n_types
    print(f"{n} types, valid")
    print(f"lub table: {n * n} entries")
    return 0


def cmd_compile(args) -> int:
    g = grammar.load_grammar(_read(args.path))
    if args.disasm:
        print(compiler.disassemble(g.code))
    else:
        entries = sum(len(v) for v in g.lexicon.values())
        print(f"{len(g.code.instrs)} instructions, {len(g.rules)} rules, "
              f"{entries} lexical entries")
    return 0


def cmd_unify(args) -> int:
    h = grammar.load_hierarchy_only(_read(args.path))
    pair = [("left", terms.parse_term(args.left, h)),
            ("right", terms.parse_term(args.right, h))]
    for name, t in pair:
        violations = terms.well_typed_check(h, t)
        if violations:
            detail = "; ".join(str(v) for v in violations)
            print(f"error: {name} term is not totally well-typed: {detail}",
                  file=sys.stderr)
            return 1
    m = machine.MachineState(h, path_compression=not args.no_path_compression)
    regs = {}
    m.execute(compiler.compile_query(terms.flatten(pair[0][1])), regs)
    try:
        m.execute(compiler.compile_program(terms.flatten(pair[1][1])), regs)
    except machine.UnifyFailure:
        print("FAIL")
    else:
        print(terms.print_term(m.extract(regs[1])))
    if args.dump_heap:
        print(m.dump())
    return 0


def cmd_parse(args) -> int:
    g = grammar.load_grammar(_read(args.path))
    p = parser.ChartParser(g, max_items=args.max_items, max_pops=args.max_steps,
                           path_compression=not args.no_path_compression)
    result = p.parse(args.input.split())
    for head in result.heads:
        print(terms.print_term(head))
    if not result.accepted:
        print("no parse")
    if args.chart:
        print(result.chart.dump())
    return 0


def _read(path) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tfsam",
        description="Typed feature structure grammars: check, compile, unify, parse.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a type hierarchy or grammar file")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compile", help="compile a grammar file")
    p.add_argument("path")
    p.add_argument("--disasm", action="store_true", help="print the instruction listing")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("unify", help="unify two terms over a file's hierarchy")
    p.add_argument("path")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--dump-heap", action="store_true", help="print the heap afterwards")
    p.add_argument("--no-path-compression", action="store_true")
    p.set_defaults(func=cmd_unify)

    p = sub.add_parser("parse", help="parse a space-separated input string")
    p.add_argument("path")
    p.add_argument("input")
    p.add_argument("--chart", action="store_true", help="print the chart afterwards")
    p.add_argument("--max-items", type=int, default=100_000)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--no-path-compression", action="store_true")
    p.set_defaults(func=cmd_parse)

    return ap


if __name__ == "__main__":
    sys.exit(main())
