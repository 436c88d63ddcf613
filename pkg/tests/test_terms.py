import pytest

from tfsam import terms
from tfsam.terms import (
    BackRef, MostGeneral, Node, flatten, iso, iso_roots, most_general_term,
    parse_mrs, parse_term, print_mrs, print_term, well_typed_check,
)


# -- parsing and printing ----------------------------------------------------

@pytest.mark.parametrize("text", [
    "d",
    "a(d2,d)",
    "c(bot,e(d,d1),d2,g(d))",
    "b(b(#1 d,#1),d)",
    "#1 g(#1)",
    "#1 a(#1,d)",
    "a(~bot,~d)",
])
def test_round_trip(text, example_hierarchy):
    t = parse_term(text, example_hierarchy)
    assert print_term(t) == text


def test_round_trip_under_appropriateness_loop(loop_hierarchy):
    t = parse_term("t(~t)", loop_hierarchy)
    assert print_term(t) == "t(~t)"
    assert isinstance(t.args[0], MostGeneral)


def test_whitespace_is_free(example_hierarchy):
    t = parse_term("b( b( #1 d ,\n #1 ) , d )", example_hierarchy)
    assert print_term(t) == "b(b(#1 d,#1),d)"


def test_unreferenced_tags_are_dropped_on_print(example_hierarchy):
    t = parse_term("a(#9 d2,d)", example_hierarchy)
    assert print_term(t) == "a(d2,d)"


@pytest.mark.parametrize("text,message", [
    ("zz", "unknown type 'zz'"),
    ("~zz", "unknown type 'zz'"),
    ("a(d)", "takes 2 argument"),
    ("d(d1)", "takes 0 argument"),
    ("a(d2,d) d", "unexpected input after term"),
    ("b(#1 d,#1 e)", "defined twice"),
    ("b(#1,#1 d)", "used before its definition"),
    ("b(#1,d)", "never defined"),
    ("a(d2,", "expected"),
    ("", "expected a type name"),
])
def test_parse_rejects(text, message, example_hierarchy):
    with pytest.raises(terms.TermError) as err:
        parse_term(text, example_hierarchy)
    assert message in str(err.value)


def test_errors_carry_positions(example_hierarchy):
    with pytest.raises(terms.TermError) as err:
        parse_term("a(d2,\nzz)", example_hierarchy)
    assert err.value.line == 2
    assert err.value.col == 1


# -- multi-rooted structures ---------------------------------------------------

def test_parse_mrs_rule(example_hierarchy):
    mrs = parse_mrs("a(bot,#3 d), d => a(d2,#3)", example_hierarchy)
    assert mrs.is_rule
    assert len(mrs.roots) == 3
    assert [r.type for r in mrs.body] == ["a", "d"]
    assert mrs.head.type == "a"
    assert print_mrs(mrs) == "a(bot,#3 d), d => a(d2,#3)"


def test_parse_mrs_plain_sequence(example_hierarchy):
    mrs = parse_mrs("d, d1", example_hierarchy)
    assert not mrs.is_rule
    assert print_mrs(mrs) == "d, d1"


def test_mrs_tags_are_scoped_across_roots(example_hierarchy):
    mrs = parse_mrs("#1 d, g(#1)", example_hierarchy)
    assert isinstance(mrs.roots[1].args[0], BackRef)
    assert mrs.roots[1].args[0].tag == "1"


def test_mrs_rejects_missing_separator(example_hierarchy):
    with pytest.raises(terms.TermError, match="',' or '=>'"):
        parse_mrs("a(d2,d) d", example_hierarchy)


# -- well-typedness ------------------------------------------------------------

def test_well_typed_accepts_concrete_and_mg_leaves(example_hierarchy):
    h = example_hierarchy
    assert well_typed_check(h, parse_term("a(d2,d)", h)) == []
    assert well_typed_check(h, parse_term("a(~bot,~d)", h)) == []
    assert well_typed_check(h, parse_term("#1 a(#1,d)", h)) == []
    assert well_typed_check(h, parse_term("b(#1 d,#1)", h)) == []


def test_well_typed_flags_too_general_argument(example_hierarchy):
    h = example_hierarchy
    out = well_typed_check(h, parse_term("a(bot,bot)", h))
    assert [str(v) for v in out] == ["at f3: expected d, found bot"]


def test_well_typed_paths_reach_nested_nodes(example_hierarchy):
    h = example_hierarchy
    out = well_typed_check(h, parse_term("g(g(bot))", h))
    assert [str(v) for v in out] == [
        "at f3: expected d, found g",
        "at f3.f3: expected d, found bot",
    ]


def test_well_typed_sees_through_backrefs_and_mg(example_hierarchy):
    h = example_hierarchy
    assert well_typed_check(h, parse_term("a(#1 e(d,d),#1)", h)) != []
    assert well_typed_check(h, parse_term("a(bot,~bot)", h)) != []


def test_well_typed_flags_wrong_arity_of_built_node(example_hierarchy):
    out = well_typed_check(example_hierarchy, Node("a", [Node("d", [])]))
    assert len(out) == 1
    assert "2 argument(s) for a" in str(out[0])


def test_well_typed_checks_shared_node_once(example_hierarchy):
    h = example_hierarchy
    # the shared bot fails under f3 only; its defining occurrence under f1 is fine
    out = well_typed_check(h, parse_term("a(#1 bot,#1)", h))
    assert [str(v) for v in out] == ["at f3: expected d, found bot"]


def test_well_typed_covers_every_mrs_root(example_hierarchy):
    h = example_hierarchy
    out = well_typed_check(h, parse_mrs("d, a(bot,bot)", h))
    assert len(out) == 1


# -- flattening ----------------------------------------------------------------

def test_flatten_shared_argument(example_hierarchy):
    eqs = flatten(parse_term("a(#1 d1,#1)", example_hierarchy))
    assert str(eqs) == "X1 = a(X2,X2); X2 = d1"
    assert eqs.roots == [1]
    assert eqs.boundaries == [2]


def test_flatten_nested_sharing(example_hierarchy):
    eqs = flatten(parse_term("b(b(#1 d,#1),d)", example_hierarchy))
    assert str(eqs) == "X1 = b(X2,X3); X2 = b(X4,X4); X4 = d; X3 = d"


def test_flatten_backref_into_earlier_subtree(example_hierarchy):
    # the second argument reuses a node defined inside the first
    eqs = flatten(parse_term("b(b(#1 d,#1),#1)", example_hierarchy))
    assert str(eqs) == "X1 = b(X2,X3); X2 = b(X3,X3); X3 = d"


def test_flatten_cycle(example_hierarchy):
    eqs = flatten(parse_term("#1 g(#1)", example_hierarchy))
    assert str(eqs) == "X1 = g(X1)"


def test_flatten_most_general_leaf(loop_hierarchy):
    eqs = flatten(parse_term("t(~t)", loop_hierarchy))
    assert str(eqs) == "X1 = t(X2); X2 = ~t"


def test_flatten_mrs_numbering_and_boundaries(example_hierarchy):
    eqs = flatten(parse_mrs("a(bot,#3 d), d => a(d2,#3)", example_hierarchy))
    assert str(eqs) == ("X1 = a(X2,X3); X2 = bot; X3 = d; "
                        "X4 = d; X5 = a(X6,X3); X6 = d2")
    assert eqs.roots == [1, 4, 5]
    assert eqs.boundaries == [3, 4, 6]


def test_flatten_root_shared_between_roots(example_hierarchy):
    eqs = flatten(parse_mrs("#1 d, g(#1)", example_hierarchy))
    assert str(eqs) == "X1 = d; X2 = g(X1)"
    assert eqs.roots == [1, 2]
    assert eqs.boundaries == [1, 2]
    repeated = flatten(parse_mrs("#1 d, #1", example_hierarchy))
    assert repeated.roots == [1, 1]
    assert repeated.boundaries == [1, 1]


# -- isomorphism ---------------------------------------------------------------

def test_iso_ignores_tag_names(example_hierarchy):
    h = example_hierarchy
    assert iso(parse_term("b(#7 d,#7)", h), parse_term("b(#1 d,#1)", h))


def test_iso_distinguishes_sharing_from_copies(example_hierarchy):
    h = example_hierarchy
    assert not iso(parse_term("a(#1 d,#1)", h), parse_term("a(d,d)", h))


def test_iso_distinguishes_cycle_from_unrolling(example_hierarchy):
    h = example_hierarchy
    assert not iso(parse_term("#1 g(#1)", h), parse_term("g(#2 g(#2))", h))
    assert iso(parse_term("#1 g(g(#1))", h), parse_term("#2 g(g(#2))", h))


def test_iso_separates_mg_from_expanded(example_hierarchy):
    h = example_hierarchy
    assert not iso(parse_term("~d", h), parse_term("d", h))
    assert iso(parse_term("~d", h), parse_term("~d", h))


def test_iso_roots_respects_cross_root_sharing(example_hierarchy):
    h = example_hierarchy
    shared = parse_mrs("#1 d, g(#1)", h)
    copied = parse_mrs("d, g(d)", h)
    again = parse_mrs("#2 d, g(#2)", h)
    assert iso_roots(shared.roots, again.roots)
    assert not iso_roots(shared.roots, copied.roots)
    assert not iso_roots(shared.roots, shared.roots[:1])


def test_iso_roots_is_positional(example_hierarchy):
    h = example_hierarchy
    a = [parse_term("d", h), parse_term("d1", h)]
    b = [parse_term("d1", h), parse_term("d", h)]
    assert not iso_roots(a, b)


# -- most general terms ----------------------------------------------------------

def test_most_general_term_expands_all_features(example_hierarchy):
    h = example_hierarchy
    assert iso(most_general_term(h, "c"), parse_term("c(bot,bot,d,bot)", h))
    assert iso(most_general_term(h, "bot"), parse_term("bot", h))
    assert well_typed_check(h, most_general_term(h, "c")) == []


def test_most_general_term_cuts_off_at_loop(loop_hierarchy):
    h = loop_hierarchy
    assert iso(most_general_term(h, "t"), parse_term("t(~t)", h))
    assert iso(most_general_term(h, "u"), parse_term("u(t(~t))", h))
