"""Compilation of feature terms and rules to abstract machine instructions.

Queries (structures that must exist on the heap) compile to two streams:
first one put_node per equation, in equation order, then every put_arc.
Arcs may therefore point at nodes built later in the same fragment, which
is what makes cyclic structures executable.  Programs (structures matched
against the heap) compile to one get_structure per equation followed by
unify_variable for a register's first textual occurrence and unify_value
for later ones; first-seen tracking spans the whole compiled fragment.

A rule compiles to

    start_rule n; <program code body 1>; move_dot; next_item; ...
    <program code body n>; move_dot; next_item; <query code head>; end_rule

with one register numbering for the whole rule, so reentrancies that span
rule elements simply reuse registers.  A lexical entry compiles to query
code only.  Input words compile to query code with an advance in front of
each word.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import terms
from .terms import EquationSet, MRS


class CompileError(Exception):
    pass


@dataclass(frozen=True)
class PutNode:
    type: str
    arity: int
    reg: int


@dataclass(frozen=True)
class PutVar:
    """Write an unexpanded most general node of the given type."""
    type: str
    reg: int


@dataclass(frozen=True)
class PutArc:
    reg: int
    offset: int
    target: int


@dataclass(frozen=True)
class GetStructure:
    type: str
    arity: int
    reg: int


@dataclass(frozen=True)
class UnifyVariable:
    reg: int


@dataclass(frozen=True)
class UnifyValue:
    reg: int


@dataclass(frozen=True)
class Advance:
    pass


@dataclass(frozen=True)
class StartRule:
    body_len: int


@dataclass(frozen=True)
class MoveDot:
    pass


@dataclass(frozen=True)
class NextItem:
    pass


@dataclass(frozen=True)
class EndRule:
    pass


Instruction = (PutNode | PutVar | PutArc | GetStructure | UnifyVariable
               | UnifyValue | Advance | StartRule | MoveDot | NextItem | EndRule)


@dataclass
class RuleInfo:
    rule_id: int
    label: str
    start: int                    # address of start_rule
    body_len: int
    frag_starts: list[int]        # first instruction of each body fragment
    head_start: int               # first instruction of the head's query code
    end: int                      # address of end_rule
    body_root_regs: list[int]
    body_root_shared: list[bool]  # root register already bound by an earlier fragment
    head_root_reg: int
    mrs: MRS


@dataclass
class LexEntry:
    word: str
    index: int
    label: str
    start: int
    length: int
    root_reg: int
    term: object


@dataclass
class CodeArea:
    instrs: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    lexicon: dict = field(default_factory=dict)   # word -> [LexEntry]

    def add_label(self, name):
        if name in self.labels:
            raise CompileError(f"duplicate label {name!r}")
        self.labels[name] = len(self.instrs)

    def extend(self, instrs):
        self.instrs.extend(instrs)


def compile_query(eqs: EquationSet) -> list:
    nodes = []
    arcs = []
    for eq in eqs.equations:
        if eq.type.startswith("~"):
            nodes.append(PutVar(eq.type[1:], eq.reg))
            continue
        nodes.append(PutNode(eq.type, len(eq.args), eq.reg))
        for k, a in enumerate(eq.args, start=1):
            arcs.append(PutArc(eq.reg, k, a))
    return nodes + arcs


def compile_program(eqs: EquationSet, seen=None) -> list:
    out = []
    if seen is None:
        seen = set()
    for eq in eqs.equations:
        if eq.type.startswith("~"):
            raise CompileError("unexpanded ~ node cannot be compiled as program code")
        out.append(GetStructure(eq.type, len(eq.args), eq.reg))
        seen.add(eq.reg)
        for a in eq.args:
            if a in seen:
                out.append(UnifyValue(a))
            else:
                seen.add(a)
                out.append(UnifyVariable(a))
    return out


def compile_rule(rule: MRS) -> list:
    instrs, _ = compile_rule_with_info(rule, rule_id=0, label="rule0", base=0)
    return instrs


def compile_rule_with_info(rule: MRS, rule_id, label, base) -> tuple[list, RuleInfo]:
    if not rule.is_rule or len(rule.roots) < 2:
        raise CompileError("a rule needs at least one body element and a head")
    eqs = terms.flatten(rule)
    bounds = [0] + eqs.boundaries
    body_len = len(rule.roots) - 1

    out = [StartRule(body_len)]
    seen = set()
    frag_starts = []
    shared = []
    for m in range(body_len):
        frag_starts.append(base + len(out))
        shared.append(eqs.roots[m] in seen)
        frag = EquationSet(eqs.equations[bounds[m]:bounds[m + 1]], [eqs.roots[m]], [])
        out.extend(compile_program(frag, seen))
        out.append(MoveDot())
        out.append(NextItem())
    head_start = base + len(out)
    head = EquationSet(eqs.equations[bounds[body_len]:bounds[body_len + 1]],
                       [eqs.roots[body_len]], [])
    out.extend(compile_query(head))
    end = base + len(out)
    out.append(EndRule())
    info = RuleInfo(rule_id, label, base, body_len, frag_starts, head_start, end,
                    eqs.roots[:body_len], shared, eqs.roots[body_len], rule)
    return out, info


def compile_input(words: MRS) -> list:
    """Query code for an input structure, one advance in front of each word.

    Each word is flattened on its own, so registers restart at X1 per word.
    """
    out = []
    for root in words.roots:
        out.append(Advance())
        out.extend(compile_query(terms.flatten(root)))
    return out


def compile_grammar(hierarchy, rules, lexicon) -> CodeArea:
    """Compile rule MRSs and lexical entries into one labeled code area."""
    code = CodeArea()
    for i, rule in enumerate(rules):
        label = f"rule{i}"
        code.add_label(label)
        instrs, info = compile_rule_with_info(rule, i, label, len(code.instrs))
        code.extend(instrs)
        code.rules.append(info)
    for word, entries in lexicon.items():
        for k, term in enumerate(entries):
            label = f"lex_{word}" if len(entries) == 1 else f"lex_{word}_{k + 1}"
            code.add_label(label)
            start = len(code.instrs)
            instrs = compile_query(terms.flatten(term))
            code.extend(instrs)
            code.lexicon.setdefault(word, []).append(
                LexEntry(word, k, label, start, len(instrs), 1, term))
    return code


# -- listing -----------------------------------------------------------------

def format_instruction(ins) -> str:
    match ins:
        case PutNode(t, n, r):
            return f"put_node {t}/{n},X{r}"
        case PutVar(t, r):
            return f"put_var {t},X{r}"
        case PutArc(r, k, j):
            return f"put_arc X{r},{k},X{j}"
        case GetStructure(t, n, r):
            return f"get_structure {t}/{n},X{r}"
        case UnifyVariable(r):
            return f"unify_variable X{r}"
        case UnifyValue(r):
            return f"unify_value X{r}"
        case Advance():
            return "advance"
        case StartRule(n):
            return f"start_rule {n}"
        case MoveDot():
            return "move_dot"
        case NextItem():
            return "next_item"
        case EndRule():
            return "end_rule"
    raise CompileError(f"unknown instruction {ins!r}")


def disassemble(code) -> str:
    """One instruction per line; labels of a code area appear as ``name:``."""
    if isinstance(code, CodeArea):
        instrs = code.instrs
        at = {}
        for name, addr in code.labels.items():
            at.setdefault(addr, []).append(name)
    else:
        instrs = code
        at = {}
    lines = []
    for i, ins in enumerate(instrs):
        for name in at.get(i, ()):
            lines.append(f"{name}:")
        lines.append(format_instruction(ins))
    for name in at.get(len(instrs), ()):
        lines.append(f"{name}:")
    return "\n".join(lines)


def assemble(text) -> CodeArea:
    """Parse a disassembly listing back into a code area (labels only)."""
    code = CodeArea()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.endswith(":"):
            code.add_label(line[:-1])
            continue
        op, _, rest = line.partition(" ")
        args = rest.replace(" ", "")
        code.instrs.append(_parse_instruction(op, args, line))
    return code


def _parse_instruction(op, args, line):
    def reg(s):
        if not s.startswith("X"):
            raise CompileError(f"bad register {s!r} in {line!r}")
        return int(s[1:])

    try:
        match op:
            case "put_node" | "get_structure":
                typed, r = args.split(",")
                t, n = typed.split("/")
                cls = PutNode if op == "put_node" else GetStructure
                return cls(t, int(n), reg(r))
            case "put_var":
                t, r = args.split(",")
                return PutVar(t, reg(r))
            case "put_arc":
                r, k, j = args.split(",")
                return PutArc(reg(r), int(k), reg(j))
            case "unify_variable":
                return UnifyVariable(reg(args))
            case "unify_value":
                return UnifyValue(reg(args))
            case "advance":
                return Advance()
            case "start_rule":
                return StartRule(int(args))
            case "move_dot":
                return MoveDot()
            case "next_item":
                return NextItem()
            case "end_rule":
                return EndRule()
    except CompileError:
        raise
    except Exception as e:
        raise CompileError(f"cannot parse instruction {line!r}: {e}") from None
    raise CompileError(f"unknown instruction {op!r} in {line!r}")
