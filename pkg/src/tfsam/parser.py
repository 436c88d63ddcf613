"""Bottom-up chart parser driving the abstract machine.

The chart is an (n+1) x (n+1) table of edge sets.  An active edge is a
rule with its first ``dot`` body elements already matched; instead of heap
pointers it carries a register snapshot (extracted terms), so edges stay
valid after the heap is rewound.  A complete edge is just its head term.

Combining an active edge ending at k with a complete edge spanning (k, j)
replays the snapshot onto the heap, builds a fresh copy of the complete
head, points the next body element's root register at it, and executes
that element's program code.  Whatever the outcome, the heap is rewound to
the checkpoint afterwards; results leave only as extracted terms.

The agenda holds edges, not only complete ones: a popped complete edge is
tried against the active edges in cells (k,k) down to (0,k), and a popped
active edge against the complete edges to its right.  Without the second
scan, an active edge created after some complete edge was popped would
never meet it.  Duplicate edges (same cell, rule, dot, and isomorphic
saved structures) are dropped, so the chart grows to a fixed point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import machine, terms

EMPTY_SNAPSHOT = machine.RegSnapshot((), ())


class UnknownWordError(Exception):
    def __init__(self, word, position):
        super().__init__(f"word {word!r} (position {position + 1}) is not in the lexicon")
        self.word = word
        self.position = position


class LimitExceeded(Exception):
    def __init__(self, what, limit):
        super().__init__(f"parse exceeded the {what} limit of {limit}")
        self.what = what
        self.limit = limit


@dataclass(eq=False)
class ActiveEdge:
    i: int
    j: int
    info: object            # RuleInfo of the rule being matched
    dot: int                # body elements already matched
    snapshot: machine.RegSnapshot

    @property
    def to_see(self):
        """Code address where matching resumes."""
        if self.dot < self.info.body_len:
            return self.info.frag_starts[self.dot]
        return self.info.head_start


@dataclass(eq=False)
class CompleteEdge:
    i: int
    j: int
    source: str             # rule label or lexical entry label
    head: object


class Chart:
    def __init__(self, n):
        self.n = n
        self.cells = {}

    def cell(self, i, j):
        return self.cells.get((i, j), [])

    def dump(self) -> str:
        lines = []
        for i, j in sorted(self.cells):
            edges = self.cells[(i, j)]
            if not edges:
                continue
            lines.append(f"({i},{j}):")
            for e in edges:
                if isinstance(e, ActiveEdge):
                    lines.append(f"  {e.info.label} @ {e.dot}")
                else:
                    lines.append(f"  {e.source}: {terms.print_term(e.head)}")
        return "\n".join(lines)


@dataclass
class ParseResult:
    words: list
    accepted: bool
    heads: list             # spanning heads compatible with the start term
    items: int
    pops: int
    chart: Chart


class ChartParser:
    def __init__(self, grammar, max_items=100_000, max_pops=1_000_000,
                 path_compression=True, verify_undo=False):
        self.grammar = grammar
        self.max_items = max_items
        self.max_pops = max_pops
        self.path_compression = path_compression
        self.verify_undo = verify_undo

    def parse(self, words) -> ParseResult:
        """Parse a sequence of words through the grammar's lexicon."""
        words = list(words)
        if not words:
            raise ValueError("input must contain at least one word")
        m = self._machine()
        code = self.grammar.code
        seeds = []
        for i, w in enumerate(words):
            entries = code.lexicon.get(w)
            if not entries:
                raise UnknownWordError(w, i)
            for entry in entries:
                scratch = {}
                m.execute(code.instrs[entry.start:entry.start + entry.length], scratch)
                head = m.extract(scratch[entry.root_reg])
                seeds.append(CompleteEdge(i, i + 1, entry.label, head))
        return self._run(m, words, seeds)

    def parse_terms(self, roots) -> ParseResult:
        """Parse an input given directly as terms, one per position."""
        roots = list(roots)
        if not roots:
            raise ValueError("input must contain at least one term")
        m = self._machine()
        seeds = []
        for i, root in enumerate(roots):
            head = m.extract(m.build_term(root))
            seeds.append(CompleteEdge(i, i + 1, f"input{i}", head))
        return self._run(m, [terms.print_term(r) for r in roots], seeds)

    def _machine(self):
        return machine.MachineState(self.grammar.hierarchy,
                                    path_compression=self.path_compression)

    def _run(self, m, words, seeds) -> ParseResult:
        n = len(words)
        chart = Chart(n)
        agenda = deque()
        items = 0

        def add(edge, enqueue=True):
            nonlocal items
            cell = chart.cells.setdefault((edge.i, edge.j), [])
            for e in cell:
                if _same_edge(e, edge):
                    return
            cell.append(edge)
            items += 1
            if items > self.max_items:
                raise LimitExceeded("chart item", self.max_items)
            if enqueue:
                agenda.append(edge)

        for e in seeds:
            add(e)
        for i in range(n):
            for info in self.grammar.code.rules:
                add(ActiveEdge(i, i, info, 0, EMPTY_SNAPSHOT), enqueue=False)

        pops = 0
        while agenda:
            edge = agenda.popleft()
            pops += 1
            if pops > self.max_pops:
                raise LimitExceeded("agenda pop", self.max_pops)
            if isinstance(edge, CompleteEdge):
                k = edge.i
                for i in range(k, -1, -1):
                    for a in list(chart.cell(i, k)):
                        if isinstance(a, ActiveEdge):
                            new = self._combine(m, a, edge)
                            if new is not None:
                                add(new)
            else:
                k = edge.j
                for j in range(k + 1, n + 1):
                    for c in list(chart.cell(k, j)):
                        if isinstance(c, CompleteEdge):
                            new = self._combine(m, edge, c)
                            if new is not None:
                                add(new)

        heads = [e.head for e in chart.cell(0, n)
                 if isinstance(e, CompleteEdge) and self._start_compatible(m, e.head)]
        return ParseResult(words, bool(heads), heads, items, pops, chart)

    def _combine(self, m, active, complete):
        """The fundamental rule: match a complete head against the next
        body element of an active edge.  Returns the new edge, or None."""
        info = active.info
        mark = m.checkpoint()
        before = list(m.heap) if self.verify_undo else None
        new = None
        try:
            m.restore_regs(active.snapshot)
            head_addr = m.build_term(complete.head)
            r = info.body_root_regs[active.dot]
            if info.body_root_shared[active.dot]:
                # this element's root was already built by an earlier one
                if not m.unify(m.reg(r), head_addr):
                    raise machine.UnifyFailure
            else:
                m.set_reg(r, head_addr)
            code = self.grammar.code.instrs
            start, stop = _fragment_range(info, active.dot)
            m.execute(code[start:stop])
            dot = active.dot + 1
            if dot == info.body_len:
                m.execute(code[info.head_start:info.end])
                head = m.extract(m.reg(info.head_root_reg))
                new = CompleteEdge(active.i, complete.j, info.label, head)
            else:
                new = ActiveEdge(active.i, complete.j, info, dot, m.snapshot_regs())
        except machine.UnifyFailure:
            new = None
        m.undo(mark)
        if before is not None and m.heap != before:
            raise machine.MachineError("undo left the heap changed")
        return new

    def _start_compatible(self, m, head):
        """True when the start term subsumes *head*: unifying the two
        gives back something isomorphic to *head*."""
        mark = m.checkpoint()
        try:
            a_start = m.build_term(self.grammar.start)
            a_head = m.build_term(head)
            if not m.unify(a_start, a_head):
                return False
            return terms.iso(m.extract(a_head), head)
        finally:
            m.undo(mark)


def _fragment_range(info, dot):
    """Addresses of body fragment *dot*'s program code, excluding the
    move_dot/next_item pair that follows it."""
    start = info.frag_starts[dot]
    nxt = info.frag_starts[dot + 1] if dot + 1 < info.body_len else info.head_start
    return start, nxt - 2


def _same_edge(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, ActiveEdge):
        return (a.info is b.info and a.dot == b.dot
                and a.snapshot.live == b.snapshot.live
                and terms.iso_roots(list(a.snapshot.roots), list(b.snapshot.roots)))
    return a.source == b.source and terms.iso(a.head, b.head)
