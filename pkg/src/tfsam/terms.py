"""Feature terms: the textual and in-memory form of typed feature structures.

A term is a typed node with one argument per appropriate feature, in the
type's alphabetical feature order.  Reentrancy and cycles are written
with tags: ``#n term`` names a node, a bare ``#n`` refers back to it.  A
term is in normal form when every tag is defined (given a type and
arguments) at its first occurrence and at most once.  ``~t`` denotes an
unexpanded most general structure of type t; it is produced when results
of lazy unification are read back under appropriateness loops and is
accepted on input for round-tripping.

A multi-rooted structure (several terms sharing one tag scope) is written
``t1, t2, ... => tn``; the arrow marks the last root as the head and is
what distinguishes a rule from a plain sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import scan


class TermError(scan.SourceError):
    """A term is syntactically invalid, ill-formed or ill-typed."""


@dataclass(eq=False)
class Node:
    type: str
    args: list = field(default_factory=list)
    tag: str | None = None


@dataclass(eq=False)
class BackRef:
    tag: str


@dataclass(eq=False)
class MostGeneral:
    type: str
    tag: str | None = None


Term = Node | BackRef | MostGeneral


@dataclass
class MRS:
    """A multi-rooted structure; for rules the last root is the head."""
    roots: list
    is_rule: bool = False

    @property
    def body(self):
        return self.roots[:-1]

    @property
    def head(self):
        return self.roots[-1]


@dataclass(frozen=True)
class Equation:
    reg: int
    type: str
    args: tuple[int, ...]

    def __str__(self):
        if self.args:
            return f"X{self.reg} = {self.type}({','.join('X%d' % a for a in self.args)})"
        return f"X{self.reg} = {self.type}"


@dataclass
class EquationSet:
    equations: list[Equation]
    roots: list[int]
    boundaries: list[int]    # equation count after flattening each root

    def __str__(self):
        return "; ".join(str(e) for e in self.equations)


# -- parsing ---------------------------------------------------------------

def parse_term(text, hierarchy) -> Term:
    cur = scan.Cursor(scan.tokenize(text, error=TermError), error=TermError)
    p = _TermParser(cur, hierarchy)
    t = p.term()
    if not cur.at_end():
        cur.fail("unexpected input after term")
    p.finish()
    return t


def parse_term_tokens(cur, hierarchy) -> Term:
    p = _TermParser(cur, hierarchy)
    t = p.term()
    p.finish()
    return t


def parse_mrs(text, hierarchy) -> MRS:
    cur = scan.Cursor(scan.tokenize(text, error=TermError), error=TermError)
    mrs = parse_mrs_tokens(cur, hierarchy)
    if not cur.at_end():
        cur.fail("unexpected input after structure")
    return mrs


def parse_mrs_tokens(cur, hierarchy, stop=()) -> MRS:
    """Parse a multi-rooted structure from a token cursor.

    Stops in front of any token text in *stop* (used by the grammar-file
    reader, whose clauses end with a period).
    """
    p = _TermParser(cur, hierarchy)
    roots = [p.term()]
    is_rule = False
    while True:
        if cur.at(","):
            cur.next()
            roots.append(p.term())
        elif cur.at("=>"):
            cur.next()
            roots.append(p.term())
            is_rule = True
            break
        else:
            break
    if not (cur.at_end() or cur.peek().text in stop):
        cur.fail("expected ',' or '=>' between roots")
    p.finish()
    return MRS(roots, is_rule)


class _TermParser:
    def __init__(self, cur, hierarchy):
        self.cur = cur
        self.h = hierarchy
        self.defined = {}    # tag -> Node or MostGeneral
        self.used = {}       # tag -> first bare occurrence token

    def term(self):
        cur = self.cur
        if cur.at("#"):
            hash_tok = cur.next()
            tag = cur.expect_name("a tag name").text
            if cur.at_name() or cur.at("~"):
                if tag in self.defined:
                    raise TermError(f"tag #{tag} defined twice",
                                    hash_tok.line, hash_tok.col)
                if tag in self.used:
                    tok = self.used[tag]
                    raise TermError(f"tag #{tag} used before its definition",
                                    tok.line, tok.col)
                node = self.plain()
                node.tag = tag
                self.defined[tag] = node
                return node
            self.used.setdefault(tag, hash_tok)
            return BackRef(tag)
        return self.plain()

    def plain(self):
        cur = self.cur
        if cur.at("~"):
            cur.next()
            name = cur.expect_name("a type name")
            self._check_type(name)
            return MostGeneral(name.text)
        name = cur.expect_name("a type name")
        self._check_type(name)
        args = []
        if cur.at("("):
            cur.next()
            args.append(self.term())
            while cur.at(","):
                cur.next()
                args.append(self.term())
            cur.expect(")")
        want = self.h.arity(name.text)
        if len(args) != want:
            raise TermError(
                f"type {name.text!r} takes {want} argument(s), got {len(args)}",
                name.line, name.col)
        return Node(name.text, args)

    def _check_type(self, tok):
        if tok.text not in self.h.ids:
            raise TermError(f"unknown type {tok.text!r}", tok.line, tok.col)

    def finish(self):
        for tag, tok in self.used.items():
            if tag not in self.defined:
                raise TermError(f"tag #{tag} is never defined", tok.line, tok.col)


# -- printing --------------------------------------------------------------

def print_term(t) -> str:
    return _print(t, _referenced_tags(t))


def print_mrs(mrs) -> str:
    tags = set()
    for r in mrs.roots:
        tags |= _referenced_tags(r)
    parts = [_print(r, tags) for r in mrs.roots]
    if mrs.is_rule:
        return ", ".join(parts[:-1]) + " => " + parts[-1]
    return ", ".join(parts)


def _referenced_tags(t):
    tags = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, BackRef):
            tags.add(x.tag)
        elif isinstance(x, Node):
            stack.extend(x.args)
    return tags


def _print(t, tags):
    if isinstance(t, BackRef):
        return f"#{t.tag}"
    if isinstance(t, MostGeneral):
        prefix = f"#{t.tag} " if t.tag and t.tag in tags else ""
        return f"{prefix}~{t.type}"
    prefix = f"#{t.tag} " if t.tag and t.tag in tags else ""
    if t.args:
        return f"{prefix}{t.type}({','.join(_print(a, tags) for a in t.args)})"
    return f"{prefix}{t.type}"


# -- well-typedness ----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: str
    expected: str
    found: str

    def __str__(self):
        return f"at {self.path or '(root)'}: expected {self.expected}, found {self.found}"


def well_typed_check(hierarchy, t) -> list[Violation]:
    """Check every node's arguments against appropriateness; [] means ok.

    Reentrant targets are checked once, at their defining occurrence.
    """
    roots = t.roots if isinstance(t, MRS) else [t]
    defs = {}
    for r in roots:
        _collect_tags(r, defs)
    out = []
    checked = set()

    def node_type(x):
        return defs[x.tag].type if isinstance(x, BackRef) else x.type

    def walk(x, path):
        if isinstance(x, BackRef) or isinstance(x, MostGeneral):
            return
        if id(x) in checked:
            return
        checked.add(id(x))
        fs = hierarchy.features(x.type)
        vals = hierarchy.approp_list(x.type)
        if len(x.args) != len(fs):
            out.append(Violation(path, f"{len(fs)} argument(s) for {x.type}",
                                 f"{len(x.args)}"))
            return
        for f, v, a in zip(fs, vals, x.args):
            sub = f"{path}.{f}" if path else f
            found = node_type(a)
            if not hierarchy.subsumes(v, found):
                out.append(Violation(sub, hierarchy.tname(v), found))
            walk(a, sub)

    for r in roots:
        walk(r, "")
    return out


def _collect_tags(t, defs):
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, (Node, MostGeneral)) and x.tag:
            defs[x.tag] = x
        if isinstance(x, Node):
            stack.extend(x.args)


# -- flattening --------------------------------------------------------------

def flatten(t) -> EquationSet:
    """Turn a term or MRS into register equations.

    Registers are numbered from X1 in first-visit order: a node's
    arguments are numbered left to right when its equation is emitted,
    then each new argument is flattened in turn.  Numbering and tag scope
    are continuous across the roots of an MRS.
    """
    roots = t.roots if isinstance(t, MRS) else [t]
    defs = {}
    for r in roots:
        _collect_tags(r, defs)
    reg_of = {}
    next_reg = [1]
    equations = []
    scheduled = set()

    def assign(x):
        node = defs[x.tag] if isinstance(x, BackRef) else x
        key = id(node)
        if key not in reg_of:
            reg_of[key] = next_reg[0]
            next_reg[0] += 1
        return reg_of[key], node

    def emit(node, reg):
        if isinstance(node, MostGeneral):
            equations.append(Equation(reg, "~" + node.type, ()))
            return
        arg_regs = []
        pending = []
        for a in node.args:
            r, n = assign(a)
            arg_regs.append(r)
            if id(n) not in scheduled:
                scheduled.add(id(n))
                pending.append((n, r))
        equations.append(Equation(reg, node.type, tuple(arg_regs)))
        for n, r in pending:
            emit(n, r)

    root_regs = []
    boundaries = []
    for r in roots:
        reg, node = assign(r)
        root_regs.append(reg)
        if id(node) not in scheduled:
            scheduled.add(id(node))
            emit(node, reg)
        boundaries.append(len(equations))
    return EquationSet(equations, root_regs, boundaries)


# -- isomorphism -------------------------------------------------------------

def iso(a, b) -> bool:
    return iso_roots([a], [b])


def iso_roots(roots_a, roots_b) -> bool:
    """Graph isomorphism respecting types, argument positions and sharing.

    Multi-rooted: corresponding roots must map to each other under a
    single node bijection, so reentrancy across roots is compared too.
    """
    if len(roots_a) != len(roots_b):
        return False
    defs_a, defs_b = {}, {}
    for r in roots_a:
        _collect_tags(r, defs_a)
    for r in roots_b:
        _collect_tags(r, defs_b)

    def resolve(x, defs):
        return defs[x.tag] if isinstance(x, BackRef) else x

    a2b, b2a = {}, {}
    stack = [(resolve(x, defs_a), resolve(y, defs_b))
             for x, y in zip(roots_a, roots_b)]
    while stack:
        x, y = stack.pop()
        if id(x) in a2b or id(y) in b2a:
            if a2b.get(id(x)) is not y or b2a.get(id(y)) is not x:
                return False
            continue
        if type(x) is not type(y) or x.type != y.type:
            return False
        a2b[id(x)] = y
        b2a[id(y)] = x
        if isinstance(x, Node):
            if len(x.args) != len(y.args):
                return False
            for ax, ay in zip(x.args, y.args):
                stack.append((resolve(ax, defs_a), resolve(ay, defs_b)))
    return True


# -- most general terms -------------------------------------------------------

def most_general_term(hierarchy, t) -> Term:
    """The most general totally well-typed term of type *t*.

    Under an appropriateness loop the full structure would be infinite;
    expansion stops at the first repeated type on a branch and leaves an
    unexpanded ~type node there.
    """
    name = hierarchy.tname(t)

    def build(ty, on_branch):
        if ty in on_branch:
            return MostGeneral(hierarchy.tname(ty))
        tid = hierarchy.tid(ty)
        args = [build(v, on_branch | {ty})
                for v in hierarchy.approp_list(tid)]
        return Node(hierarchy.tname(ty), args)

    return build(hierarchy.tid(name), frozenset())
