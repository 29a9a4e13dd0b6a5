"""Parser, printer and length-metric tests."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from atlh.formula import (
    And,
    Atom,
    CoalFG,
    CoalG,
    CoalU,
    CoalX,
    FalseF,
    FormulaError,
    Hartley,
    Knows,
    LogOfCount,
    MutualKnows,
    Not,
    Or,
    Real,
    TrueF,
    formula_length,
    parse_formula,
    pretty_print,
    subformulas_by_length,
)


def test_parse_atom():
    assert parse_formula("p") == Atom("p")
    assert parse_formula("true") == TrueF()
    assert parse_formula("false") == FalseF()


def test_parse_precedence():
    assert parse_formula("p & q | r") == Or(And(Atom("p"), Atom("q")), Atom("r"))
    assert parse_formula("p | q & r") == Or(Atom("p"), And(Atom("q"), Atom("r")))
    assert parse_formula("!p & q") == And(Not(Atom("p")), Atom("q"))
    assert parse_formula("!(p & q)") == Not(And(Atom("p"), Atom("q")))
    assert parse_formula("!!p") == Not(Not(Atom("p")))


def test_parse_left_associative():
    assert parse_formula("p & q & r") == And(And(Atom("p"), Atom("q")), Atom("r"))
    assert parse_formula("p | q | r") == Or(Or(Atom("p"), Atom("q")), Atom("r"))


def test_parse_coalition_operators():
    assert parse_formula("<a> X p") == CoalX(("a",), Atom("p"))
    assert parse_formula("<a, b> G p") == CoalG(("a", "b"), Atom("p"))
    assert parse_formula("<a> (p U q)") == CoalU(("a",), Atom("p"), Atom("q"))
    assert parse_formula("<a> F p") == CoalU(("a",), TrueF(), Atom("p"))
    assert parse_formula("<> X p") == CoalX((), Atom("p"))


def test_coalitions_are_sorted_and_deduped():
    assert parse_formula("<b, a, b> X p") == CoalX(("a", "b"), Atom("p"))


def test_parse_knowledge():
    assert parse_formula("K[a] p") == Knows("a", Atom("p"))
    assert parse_formula("K[a] !p") == Knows("a", Not(Atom("p")))
    assert parse_formula("E[a, b] p") == MutualKnows(("a", "b"), Atom("p"))


def test_mutual_knowledge_requires_agents():
    with pytest.raises(FormulaError):
        MutualKnows((), Atom("p"))


def test_parse_coercion_doubt_property():
    f = parse_formula("<v> F (Voted & H[c] >= 2 {V_A, V_B})")
    expected = CoalU(
        ("v",),
        TrueF(),
        And(Atom("Voted"), Hartley("c", ">=", Real(Fraction(2)), (Atom("V_A"), Atom("V_B")))),
    )
    assert f == expected


def test_parse_hartley_log_threshold():
    f = parse_formula("H[a] = log(3) {p, q}")
    assert f == Hartley("a", "=", LogOfCount(3), (Atom("p"), Atom("q")))


def test_parse_hartley_fraction_threshold():
    f = parse_formula("H[a] < 3/2 {p}")
    assert f == Hartley("a", "<", Real(Fraction(3, 2)), (Atom("p"),))


def test_parse_hartley_decimal_threshold():
    f = parse_formula("H[a] <= 1.5 {p}")
    assert f == Hartley("a", "<=", Real(Fraction(3, 2)), (Atom("p"),))


def test_hartley_empty_set_is_error():
    with pytest.raises(FormulaError):
        parse_formula("H[a] = 1 {}")


def test_hartley_duplicate_member_is_error():
    with pytest.raises(FormulaError):
        parse_formula("H[a] = 1 {p, p}")
    with pytest.raises(FormulaError):
        Hartley("a", "=", Real(1), (Atom("p"), Atom("p")))


def test_hartley_bad_comparison_reports_position():
    with pytest.raises(FormulaError) as exc:
        parse_formula("H[a] ! 1 {p}")
    assert exc.value.line == 1
    assert exc.value.col == 6


def test_log_threshold_must_be_positive():
    with pytest.raises(FormulaError):
        parse_formula("H[a] = log(0) {p}")
    with pytest.raises(FormulaError):
        LogOfCount(0)


def test_negative_threshold_rejected():
    with pytest.raises(FormulaError):
        Real(Fraction(-1, 2))


def test_parse_reach_then_maintain():
    f = parse_formula("<v> F (Voted & G !p)")
    assert f == CoalFG(("v",), Atom("Voted"), Not(Atom("p")))
    f = parse_formula("<v> F (G p)")
    assert f == CoalFG(("v",), TrueF(), Atom("p"))
    f = parse_formula("<v> F G p")
    assert f == CoalFG(("v",), TrueF(), Atom("p"))
    f = parse_formula("<v> F (a & b & G p)")
    assert f == CoalFG(("v",), And(Atom("a"), Atom("b")), Atom("p"))


def test_bare_g_outside_f_is_error():
    with pytest.raises(FormulaError):
        parse_formula("G p")
    with pytest.raises(FormulaError):
        parse_formula("p & G q")
    with pytest.raises(FormulaError):
        parse_formula("<a> X (G p)")
    with pytest.raises(FormulaError):
        parse_formula("<a> F (p | G q)")


def test_g_as_plain_atom_still_works():
    assert parse_formula("G & p") == And(Atom("G"), Atom("p"))
    assert parse_formula("G") == Atom("G")


def test_two_g_conjuncts_rejected():
    with pytest.raises(FormulaError):
        parse_formula("<a> F (G p & G q)")


def test_parse_error_positions():
    with pytest.raises(FormulaError) as exc:
        parse_formula("p &")
    assert exc.value.line == 1
    with pytest.raises(FormulaError) as exc:
        parse_formula("p\n& $")
    assert exc.value.line == 2
    assert exc.value.col == 3


def test_comments_are_skipped():
    assert parse_formula("p # trailing\n& q") == And(Atom("p"), Atom("q"))


def test_trailing_garbage_rejected():
    with pytest.raises(FormulaError):
        parse_formula("p q")


def test_length_examples():
    assert formula_length(Atom("p")) == 1
    assert formula_length(parse_formula("p & q")) == 3
    assert formula_length(parse_formula("!p")) == 2
    assert formula_length(parse_formula("H[a] = 1 {p, q}")) == 3
    assert formula_length(parse_formula("<a, b> G p")) == 4
    assert formula_length(parse_formula("<a> F p")) == 4  # true U p
    assert formula_length(parse_formula("<a> (p U q)")) == 4
    assert formula_length(parse_formula("K[a] p")) == 2
    assert formula_length(parse_formula("E[a, b] p")) == 3
    assert formula_length(parse_formula("<> X p")) == 2


def test_length_reach_then_maintain():
    # counted as <A> (true U (goal & G inv))
    assert formula_length(parse_formula("<a> F (p & G q)")) == 7
    assert formula_length(parse_formula("<a> F (G q)")) == 5


def test_subformula_order():
    assert subformulas_by_length(Atom("p")) == [Atom("p")]
    f = parse_formula("p & !p")
    assert subformulas_by_length(f) == [Atom("p"), Not(Atom("p")), f]
    h = parse_formula("H[a] = 1 {q, p}")
    assert subformulas_by_length(h) == [Atom("p"), Atom("q"), h]


def test_subformulas_parent_sorts_after_children():
    f = parse_formula("<v> F (Voted & G !(K[c] V_A | K[c] !V_A))")
    subs = subformulas_by_length(f)
    assert subs[-1] == f
    index = {g: i for i, g in enumerate(subs)}
    for g in subs:
        for child in _children(g):
            assert index[child] < index[g]


def _children(f):
    from atlh import formula as fm

    match f:
        case fm.Not(sub) | fm.CoalX(_, sub) | fm.CoalG(_, sub) | fm.Knows(_, sub) | fm.MutualKnows(_, sub):
            return [sub]
        case fm.And(left, right) | fm.Or(left, right):
            return [left, right]
        case fm.CoalU(_, hold, goal):
            return [hold, goal]
        case fm.CoalFG(_, goal, invariant):
            return [goal, invariant]
        case fm.Hartley(_, _, _, beta):
            return list(beta)
        case _:
            return []


def test_pretty_print_examples():
    cases = [
        "p",
        "p & q | r",
        "p | q & r",
        "!p",
        "!(p & q)",
        "<a> X p",
        "<a, b> G !p",
        "<a> (p U q)",
        "<a> F p",
        "<> G p",
        "K[a] p",
        "E[a, b] (p | q)",
        "H[a] = log(3) {p, q}",
        "H[c] >= 2 {V_A, V_B}",
        "H[a] < 1/3 {p}",
        "H[a] <= 1.5 {p}",
        "<v> F (Voted & G !(K[c] V_A | K[c] !V_A))",
        "<v> F (G p)",
    ]
    for text in cases:
        assert pretty_print(parse_formula(text)) == text


def test_round_trip_structural():
    texts = [
        "p & (q & r)",
        "(p | q) & r",
        "!(p | q) & !!r",
        "<a> F (p & q & G !r)",
        "<a> (p & q U r | s)",
        "H[a] > 0.25 {p & q, !r, <b> X s}",
        "E[b, a] K[a] !<a, c> F p",
    ]
    for text in texts:
        f = parse_formula(text)
        assert parse_formula(pretty_print(f)) == f


_names = st.sampled_from(["p", "q", "r", "V_A"])
_agents = st.sampled_from(["a", "b", "c"])


def _formulas(depth):
    if depth == 0:
        return st.one_of(
            _names.map(Atom),
            st.just(TrueF()),
            st.just(FalseF()),
        )
    sub = _formulas(depth - 1)
    coalitions = st.lists(_agents, max_size=2).map(tuple)
    thresholds = st.one_of(
        st.integers(min_value=1, max_value=4).map(LogOfCount),
        st.fractions(min_value=0, max_value=3).map(Real),
    )
    betas = st.lists(sub, min_size=1, max_size=3, unique=True).map(tuple)
    return st.one_of(
        sub,
        sub.map(Not),
        st.tuples(sub, sub).map(lambda t: And(*t)),
        st.tuples(sub, sub).map(lambda t: Or(*t)),
        st.tuples(coalitions, sub).map(lambda t: CoalX(*t)),
        st.tuples(coalitions, sub).map(lambda t: CoalG(*t)),
        st.tuples(coalitions, sub, sub).map(lambda t: CoalU(*t)),
        st.tuples(coalitions, sub, sub).map(lambda t: CoalFG(*t)),
        st.tuples(_agents, sub).map(lambda t: Knows(*t)),
        st.tuples(st.lists(_agents, min_size=1, max_size=2).map(tuple), sub).map(
            lambda t: MutualKnows(*t)
        ),
        st.tuples(_agents, st.sampled_from(["<", "<=", ">", ">=", "="]), thresholds, betas).map(
            lambda t: Hartley(*t)
        ),
    )


@given(_formulas(3))
def test_round_trip_random(f):
    assert parse_formula(pretty_print(f)) == f


@given(_formulas(3))
def test_subformulas_include_self_last(f):
    subs = subformulas_by_length(f)
    assert subs[-1] == f
    assert len(set(subs)) == len(subs)
