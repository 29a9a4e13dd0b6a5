"""Translations between knowledge and uncertainty operators.

Knowledge reduces to uncertainty cheaply: knowing a fact means it holds and
carries zero uncertainty. The reverse direction is intentionally exponential:
an uncertainty comparison becomes a disjunction over exact class counts,
each expressed through knowledge of the signed combinations of the set
members.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb
from random import Random

from .formula import (
    And,
    Atom,
    CoalFG,
    CoalG,
    CoalU,
    CoalX,
    FalseF,
    Formula,
    Hartley,
    Knows,
    LogOfCount,
    MutualKnows,
    Not,
    Or,
    TrueF,
    formula_length,
    pretty_print,
)
from .mcheck import CheckOptions, check, compare_log
from .sampling import random_cegm, random_formula


class TranslateError(ValueError):
    """Raised when a translation exceeds its size caps or gets bad arguments."""


def _dedupe(members) -> tuple:
    """Drop repeated uncertainty-set members, keeping first-seen order.

    Rewriting can map two distinct members to the same formula; equal
    members contribute identical coordinates to every valuation pattern,
    so merging them never changes the pattern count.
    """
    out = []
    for m in members:
        if m not in out:
            out.append(m)
    return tuple(out)


def _rebuild(f: Formula, rec) -> Formula:
    """Rebuild a node with every child mapped through `rec`."""
    match f:
        case Atom() | TrueF() | FalseF():
            return f
        case Not(sub):
            return Not(rec(sub))
        case And(left, right):
            return And(rec(left), rec(right))
        case Or(left, right):
            return Or(rec(left), rec(right))
        case CoalX(coal, sub):
            return CoalX(coal, rec(sub))
        case CoalG(coal, sub):
            return CoalG(coal, rec(sub))
        case CoalU(coal, hold, goal):
            return CoalU(coal, rec(hold), rec(goal))
        case CoalFG(coal, goal, inv):
            return CoalFG(coal, rec(goal), rec(inv))
        case Knows(agent, sub):
            return Knows(agent, rec(sub))
        case MutualKnows(coal, sub):
            return MutualKnows(coal, rec(sub))
        case Hartley(agent, cmp, thr, beta):
            return Hartley(agent, cmp, thr, _dedupe(rec(b) for b in beta))
    raise TypeError(f"not a formula: {f!r}")


def k_to_h(f: Formula) -> Formula:
    """Replace knowledge by uncertainty, innermost-first.

    `K[a] x` becomes `x & H[a] = log(1) {x}`; mutual knowledge expands to the
    conjunction of the members' rewritten knowledge.
    """
    match f:
        case Knows(agent, sub):
            sub2 = k_to_h(sub)
            return And(sub2, Hartley(agent, "=", LogOfCount(1), (sub2,)))
        case MutualKnows(coal, sub):
            parts = [k_to_h(Knows(a, sub)) for a in coal]
            out = parts[0]
            for p in parts[1:]:
                out = And(out, p)
            return out
        case _:
            return _rebuild(f, k_to_h)


def phi_beta(beta, cap: int = 4) -> list[Formula]:
    """The 2^n signed conjunctions over `beta`, positive signs first.

    Ordering is lexicographic in the sign tuples with plain before negated,
    so `[x, y]` yields x&y, x&!y, !x&y, !x&!y.
    """
    members = list(beta)
    if not members:
        raise TranslateError("empty formula set")
    if len(members) > cap:
        raise TranslateError(f"formula set of size {len(members)} exceeds cap {cap}")
    out = []
    for signs in product((1, 0), repeat=len(members)):
        parts = [b if s else Not(b) for s, b in zip(signs, members)]
        conj = parts[0]
        for p in parts[1:]:
            conj = And(conj, p)
        out.append(conj)
    return out


def t_nm(n: int, m: int) -> list[tuple[int, ...]]:
    """All 0/1 tuples of length 2^n with exactly m zeros, ascending."""
    size = 2**n
    if not 1 <= m <= size:
        raise TranslateError(f"m must be between 1 and {size}, got {m}")
    return [t for t in product((0, 1), repeat=size) if sum(t) == size - m]


def _count_formula(agent: str, alphas, m: int, n: int) -> Formula:
    """Exactly m of the 2^n signed combinations are epistemically possible.

    A combination is ruled out when the agent knows its negation; the tuples
    select which combinations are known-impossible (1) versus possible (0).
    """
    disjuncts = []
    for t in reversed(t_nm(n, m)):
        parts = []
        for tj, alpha in zip(t, alphas):
            lit: Formula = Knows(agent, Not(alpha))
            parts.append(lit if tj else Not(lit))
        conj = parts[0]
        for p in parts[1:]:
            conj = And(conj, p)
        disjuncts.append(conj)
    out = disjuncts[0]
    for d in disjuncts[1:]:
        out = Or(out, d)
    return out


def h_eq_to_k(agent: str, beta, m: int, cap: int = 4) -> Formula:
    """Knowledge formula equivalent to `H[agent] = log(m) beta`."""
    members = list(beta)
    alphas = phi_beta(members, cap)
    size = len(alphas)
    if not 1 <= m <= size:
        raise TranslateError(f"m must be between 1 and {size}, got {m}")
    return _count_formula(agent, alphas, m, len(members))


def _expansion_size(alpha_sizes, counts, n: int) -> int:
    """formula_length of the disjunction of count formulas, without building it."""
    size = 2**n
    base = sum(2 + s for s in alpha_sizes) + (size - 1)
    total = 0
    for m in counts:
        tuples = comb(size, m)
        total += tuples * (base + m) + (tuples - 1)
    return total + (len(counts) - 1)


def h_to_k(f: Formula, beta_cap: int = 4, node_cap: int = 10**6) -> Formula:
    """Replace uncertainty by knowledge, innermost-first.

    Every threshold is first normalized to the set of class counts that
    satisfy it (counts range over 1..2^n); the result is false for an empty
    set, true for the full range, else the disjunction of count formulas.
    The construction is exponential by design, hence the caps.
    """

    def rec(g: Formula) -> Formula:
        match g:
            case Hartley(agent, cmp, thr, beta):
                members = list(_dedupe(rec(b) for b in beta))
                return _expand(agent, cmp, thr, members)
            case _:
                return _rebuild(g, rec)

    def _expand(agent, cmp, thr, members) -> Formula:
        n = len(members)
        if n > beta_cap:
            raise TranslateError(
                f"uncertainty set of size {n} exceeds cap {beta_cap}"
            )
        size = 2**n
        counts = [c for c in range(1, size + 1) if compare_log(c, cmp, thr)]
        if not counts:
            return FalseF()
        if len(counts) == size:
            return TrueF()
        nodes = _expansion_size([formula_length(b) for b in members], counts, n)
        if nodes > node_cap:
            raise TranslateError(
                f"translation would have {nodes} nodes, over the cap {node_cap}"
            )
        alphas = phi_beta(members, beta_cap)
        parts = [_count_formula(agent, alphas, m, n) for m in counts]
        out = parts[0]
        for p in parts[1:]:
            out = Or(out, p)
        return out

    return rec(f)


# ---------------------------------------------------------------------------
# Random equivalence harness


@dataclass
class TranslationReport:
    """Per-sample verdict lines plus the mismatch count."""

    lines: list[str]
    mismatches: int

    def __str__(self) -> str:
        return "\n".join(self.lines)


def check_translation_equivalence(
    samples: int = 100,
    seed: int = 0,
    max_states: int = 6,
    max_agents: int = 3,
    beta_max: int = 2,
    opts: CheckOptions | None = None,
) -> TranslationReport:
    """Compare direct checking against both translations on random models.

    Each sample draws a model and a formula from its own derived seed,
    translates the formula both ways, and verifies state-by-state agreement.
    """
    opts = opts or CheckOptions()
    root = Random(seed)
    seeds = [root.getrandbits(64) for _ in range(samples)]
    lines = []
    mismatches = 0
    for s in seeds:
        rng = Random(s)
        model = random_cegm(rng, max_states=max_states, max_agents=max_agents)
        f = random_formula(
            rng, model.props, model.agents, depth=3, strategic_budget=1, beta_max=beta_max
        )
        verdict = "ok"
        for translated in (h_to_k(f, beta_cap=beta_max), k_to_h(f)):
            for q in model.states:
                if check(model, q, f, opts) != check(model, q, translated, opts):
                    verdict = f"mismatch@{q}"
                    break
            if verdict != "ok":
                break
        if verdict != "ok":
            mismatches += 1
        lines.append(
            f"seed={s} states={len(model.states)} formula={pretty_print(f)} verdict={verdict}"
        )
    return TranslationReport(lines, mismatches)
