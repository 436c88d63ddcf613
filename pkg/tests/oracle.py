"""Reference implementations the tests trust, plus random input generators.

The unifier here is deliberately naive and shares nothing with the machine:
term graphs become vertex tables, unification is union-find over vertices
with children keyed by feature *name*, and type joins use a brute-force
least-upper-bound search over the subsumption relation.  Unexpanded
most-general leaves follow the same readout convention as the machine
(fully expanded, cut off with ~type at a repeated type on a branch), so
results from both sides are directly comparable with iso().
"""

from __future__ import annotations

from tfsam import machine, terms, typesys


def brute_lub(h, a, b):
    """Least upper bound by searching all common upper bounds."""
    uppers = [t for t in range(h.n_types)
              if h.subsumes(a, t) and h.subsumes(b, t)]
    for u in uppers:
        if all(h.subsumes(u, v) for v in uppers):
            return u
    return None


def unify_terms(h, a, b):
    """Unify two terms; returns the result term, or None on failure."""
    va, ra = _explode(h, a)
    vb, rb = _explode(h, b)
    off = len(va)
    concrete = [not v[0] for v in va] + [not v[0] for v in vb]
    ctype = [h.tid(v[1]) for v in va] + [h.tid(v[1]) for v in vb]
    children = [dict(v[2]) for v in va] + \
               [{f: c + off for f, c in v[2].items()} for v in vb]

    parent = list(range(len(ctype)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    work = [(ra, rb + off)]
    while work:
        x, y = work.pop()
        x, y = find(x), find(y)
        if x == y:
            continue
        t = brute_lub(h, ctype[x], ctype[y])
        if t is None:
            return None
        parent[y] = x
        ctype[x] = t
        concrete[x] = concrete[x] or concrete[y]
        for f, c in children[y].items():
            if f in children[x]:
                work.append((children[x][f], c))
            else:
                children[x][f] = c
    return _readout(h, find, ctype, concrete, children, find(ra))


def _explode(h, term):
    """Vertex table for a term graph: (is_mg, type name, {feature: vid})."""
    defs = {}
    _collect_defs(term, defs, set())
    ids = {}
    verts = []

    def visit(t):
        if isinstance(t, terms.BackRef):
            return visit(defs[t.tag])
        if id(t) in ids:
            return ids[id(t)]
        vid = len(verts)
        ids[id(t)] = vid
        if isinstance(t, terms.MostGeneral):
            verts.append((True, t.type, {}))
            return vid
        row = (False, t.type, {})
        verts.append(row)
        for f, arg in zip(h.features(t.type), t.args):
            row[2][f] = visit(arg)
        return vid

    return verts, visit(term)


def _collect_defs(t, defs, seen):
    if isinstance(t, terms.BackRef) or id(t) in seen:
        return
    seen.add(id(t))
    if t.tag is not None:
        defs[t.tag] = t
    if isinstance(t, terms.Node):
        for a in t.args:
            _collect_defs(a, defs, seen)


def _readout(h, find, ctype, concrete, children, root):
    shared = []
    visited = set()

    def scout(c):
        if c in visited:
            if c not in shared:
                shared.append(c)
            return
        visited.add(c)
        if not concrete[c]:
            return
        for f in h.features(ctype[c]):
            if f in children[c]:
                scout(find(children[c][f]))

    scout(root)
    tags = {c: str(i + 1) for i, c in enumerate(shared)}
    built = {}

    def read(c):
        if c in built:
            return terms.BackRef(tags[c])
        if not concrete[c]:
            t = terms.most_general_term(h, ctype[c])
            t.tag = tags.get(c)
            built[c] = t
            return t
        node = terms.Node(h.tname(ctype[c]), [], tags.get(c))
        built[c] = node
        for f in h.features(ctype[c]):
            if f in children[c]:
                node.args.append(read(find(children[c][f])))
            else:
                node.args.append(terms.most_general_term(h, h.approp(ctype[c], f)))
        return node

    return read(root)


def machine_unify(h, a, b, **kw):
    """Unify two terms on a fresh machine; result term or None."""
    m = machine.MachineState(h, **kw)
    pa = m.build_term(a)
    pb = m.build_term(b)
    if not m.unify(pa, pb):
        return None
    return m.extract(pa)


def canonical(h, t):
    """A term as the machine reads it back (most-general leaves expanded)."""
    m = machine.MachineState(h)
    return m.extract(m.build_term(t))


# -- random inputs ------------------------------------------------------------

def has_approp_loop(h) -> bool:
    state = [0] * h.n_types

    def dfs(t):
        if state[t] == 1:
            return True
        if state[t] == 2:
            return False
        state[t] = 1
        if any(dfs(v) for v in h.approp_list(t)):
            return True
        state[t] = 2
        return False

    return any(dfs(t) for t in range(h.n_types))


def random_hierarchy(rng, max_types=12, allow_loops=False):
    """A valid random hierarchy: a forest plus occasional diamonds, with
    fresh feature names so introducers stay unique.  Candidates that fail
    validation (or have appropriateness loops when those are not wanted)
    are resampled."""
    for _ in range(500):
        text = _random_spec(rng, max_types)
        try:
            h = typesys.load_hierarchy(text)
        except typesys.SpecError:
            continue
        if not allow_loops and has_approp_loop(h):
            continue
        return h, text
    raise RuntimeError("could not sample a valid hierarchy")


def _random_spec(rng, max_types):
    n = rng.randint(3, max_types - 1)
    names = [f"t{i}" for i in range(1, n + 1)]
    subs = {t: [] for t in ["bot"] + names}
    for i, name in enumerate(names):
        pool = ["bot"] + names[:i]
        chosen = {rng.choice(pool)}
        if i >= 2 and rng.random() < 0.3:
            chosen.add(rng.choice(pool))
        for p in chosen:
            subs[p].append(name)
    lines = []
    feature = 0
    for t in ["bot"] + names:
        line = f"{t} sub [{', '.join(subs[t])}]"
        if t != "bot":
            intro = []
            while rng.random() < 0.3 and len(intro) < 2:
                feature += 1
                intro.append(f"f{feature}: {rng.choice(['bot'] + names)}")
            if intro:
                line += f" intro [{', '.join(intro)}]"
        lines.append(line + ".")
    return "\n".join(lines)


def random_term(rng, h, max_nodes=8, allow_cycles=True, root_type=None):
    """A random totally well-typed term over *h*: reentrant, possibly
    cyclic, with ~type leaves where the node budget runs out."""
    nodes = []
    count = 0
    next_tag = [1]

    def pick_type(t_req):
        return rng.choice([u for u in range(h.n_types) if h.subsumes(t_req, u)])

    def reuse(t_req, path):
        pool = [nd for nd in nodes
                if h.subsumes(t_req, h.tid(nd.type))
                and (allow_cycles or id(nd) not in path)]
        if not pool:
            return None
        nd = rng.choice(pool)
        if nd.tag is None:
            nd.tag = str(next_tag[0])
            next_tag[0] += 1
        return terms.BackRef(nd.tag)

    def build(t_req, path):
        nonlocal count
        if nodes and (count >= max_nodes or rng.random() < 0.25):
            back = reuse(t_req, path)
            if back is not None:
                return back
        t = pick_type(t_req)
        if count >= max_nodes:
            return terms.MostGeneral(h.tname(t))
        count += 1
        node = terms.Node(h.tname(t), [])
        nodes.append(node)
        sub_path = path | {id(node)}
        for v in h.approp_list(t):
            node.args.append(build(v, sub_path))
        return node

    root = root_type if root_type is not None else rng.randrange(h.n_types)
    t = pick_type(root)
    count += 1
    node = terms.Node(h.tname(t), [])
    nodes.append(node)
    for v in h.approp_list(t):
        node.args.append(build(v, {id(node)}))
    return node


def random_pair(rng, h, max_nodes=8):
    """Two random terms; roots are usually comparable so that successful
    unifications are well represented."""
    a = random_term(rng, h, max_nodes)
    ra = h.tid(a.type)
    if rng.random() < 0.7:
        comparable = [t for t in range(h.n_types)
                      if h.subsumes(t, ra) or h.subsumes(ra, t)]
        b = random_term(rng, h, max_nodes, root_type=rng.choice(comparable))
    else:
        b = random_term(rng, h, max_nodes)
    return a, b
