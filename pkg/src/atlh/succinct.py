"""Succinctness experiments: model families, the formula-size game engine,
and a minimal-formula oracle for the knowledge-only fragment.

The model family pairs one full binary-valuation model against the family
of its single-state deletions; separating the two sides with knowledge-only
formulas is provably expensive, while one uncertainty operator does it in
linear size. Two independent engines measure the knowledge-only cost: a
game-tree search whose minimal winning tree size equals the minimal formula
size, and a semantic-fingerprint enumeration that finds an actual minimal
formula.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .cegm import Cegm
from .formula import (
    Atom,
    Formula,
    Hartley,
    Knows,
    Not,
    Or,
    Real,
    formula_length,
)
from .translate import TranslateError, h_to_k


class SuccinctError(ValueError):
    """Raised for out-of-range family parameters or blown engine caps."""


# ---------------------------------------------------------------------------
# Model families


def gen_Mn(n: int) -> Cegm:
    """The 2^n-state model over p_1..p_n: state q<t> makes p_i true exactly
    when bit i-1 of t is set; one agent that cannot tell any states apart."""
    if not 1 <= n <= 12:
        raise SuccinctError(f"n must be between 1 and 12, got {n}")
    states = [f"q{t}" for t in range(2**n)]
    return _family_model(n, states)


def gen_Nnj(n: int, j: int) -> Cegm:
    """gen_Mn(n) with state q<j> removed; removing the initial q0 is not allowed."""
    if not 1 <= n <= 12:
        raise SuccinctError(f"n must be between 1 and 12, got {n}")
    if not 1 <= j <= 2**n - 1:
        raise SuccinctError(f"j must be between 1 and {2**n - 1}, got {j}")
    states = [f"q{t}" for t in range(2**n) if t != j]
    return _family_model(n, states)


def _family_model(n: int, states: list[str]) -> Cegm:
    obs = [("a", left, right) for left, right in zip(states, states[1:])]
    trans = {(q, ("eps",)): q for q in states}
    props = [f"p_{i}" for i in range(1, n + 1)]
    valuation = {
        f"p_{i}": [q for q in states if int(q[1:]) >> (i - 1) & 1]
        for i in range(1, n + 1)
    }
    return Cegm(["a"], states, "q0", {"a": ["eps"]}, None, trans, obs, props, valuation)


def phi_n(n: int) -> Formula:
    """Uncertainty formula of length n+1 that pins the class count at 2^n."""
    if n < 1:
        raise SuccinctError(f"n must be positive, got {n}")
    beta = tuple(Atom(f"p_{i}") for i in range(1, n + 1))
    return Hartley("a", "=", Real(Fraction(n)), beta)


@dataclass(frozen=True)
class PointedModel:
    """A model with a distinguished state."""

    model: Cegm
    state: str

    def __post_init__(self):
        if self.state not in self.model.state_index:
            raise SuccinctError(f"state {self.state} not in model")


def separation_instance(n: int) -> tuple[list[PointedModel], list[PointedModel]]:
    """The experiment's two sides: the full model at q0 against every deletion."""
    left = [PointedModel(gen_Mn(n), "q0")]
    right = [PointedModel(gen_Nnj(n, j), "q0") for j in range(1, 2**n)]
    return left, right


# ---------------------------------------------------------------------------
# Shared vocabulary of a pointed-model collection


def _vocabulary(pointed):
    """Models in first-appearance order, plus props/agents common to all."""
    models = []
    seen = set()
    for pm in pointed:
        if id(pm.model) not in seen:
            seen.add(id(pm.model))
            models.append(pm.model)
    props = [p for p in models[0].props if all(p in m.valuation for m in models)]
    agents = [a for a in models[0].agents if all(a in m.actions for m in models)]
    return models, props, agents


# ---------------------------------------------------------------------------
# Formula-size game

_INF = float("inf")


class _FsgSearch:
    """Budgeted search for the smallest winning game tree.

    A node holds two pointed-model sets; a win is a tree where every leaf is
    closed by an atom true on its whole left side and false on its whole
    right side. Moves: close by atom (one node), negate (swap sides), split
    the left side over two children, or pick an epistemic successor for
    every right element while the left side expands to all successors.
    Results are memoized as exact costs or lower bounds.
    """

    def __init__(self, atoms, agents):
        self.atoms = atoms
        self.agents = agents
        self.exact: dict = {}
        self.lb: dict = {}
        self._order: dict = {}

    def _key(self, pm: PointedModel):
        rank = self._order.setdefault(id(pm.model), len(self._order))
        return (rank, pm.model.state_index[pm.state])

    def _closes(self, C, D) -> bool:
        for p in self.atoms:
            if all(pm.state in pm.model.valuation[p] for pm in C) and all(
                pm.state not in pm.model.valuation[p] for pm in D
            ):
                return True
        return False

    def solve(self, C, D, budget: int):
        """Exact minimal win size if it is <= budget, else None."""
        if budget < 1:
            return None
        key = (C, D)
        cached = self.exact.get(key)
        if cached is not None:
            return cached if cached <= budget else None
        if self.lb.get(key, 1) > budget:
            return None
        if C & D:
            self.exact[key] = _INF
            return None

        if self._closes(C, D):
            self.exact[key] = 1
            return 1

        best = None
        bound = budget

        # negation: swap sides
        sub = self.solve(D, C, bound - 1)
        if sub is not None:
            best = 1 + sub
            bound = best - 1

        # knowledge: left expands to whole classes, right picks one per class
        for a in self.agents:
            expanded = frozenset(
                PointedModel(pm.model, q2)
                for pm in C
                for q2 in pm.model.epistemic_class(a, pm.state)
            )
            groups: dict = {}
            for pm in D:
                cls = pm.model.epistemic_class(a, pm.state)
                groups.setdefault((id(pm.model), cls), (pm.model, cls))
            group_list = [
                (model, sorted(cls, key=model.state_index.__getitem__))
                for model, cls in groups.values()
            ]
            group_list.sort(key=lambda mc: self._key(PointedModel(mc[0], mc[1][0])))
            tried = set()
            for picks in product(*(members for _, members in group_list)):
                chosen = frozenset(
                    PointedModel(model, pick)
                    for (model, _), pick in zip(group_list, picks)
                )
                if chosen in tried:
                    continue
                tried.add(chosen)
                sub = self.solve(expanded, chosen, bound - 1)
                if sub is not None and (best is None or 1 + sub < best):
                    best = 1 + sub
                    bound = best - 1

        # disjunction: split the left side (right side copied to both children)
        if len(C) >= 2:
            members = sorted(C, key=self._key)
            first, rest = members[0], members[1:]
            k = len(rest)
            for bits in range(2**k - 1):
                left = frozenset(
                    [first] + [rest[i] for i in range(k) if bits >> i & 1]
                )
                right = frozenset(rest[i] for i in range(k) if not bits >> i & 1)
                sub1 = self.solve(left, D, bound - 2)
                if sub1 is None:
                    continue
                sub2 = self.solve(right, D, bound - 1 - sub1)
                if sub2 is None:
                    continue
                if best is None or 1 + sub1 + sub2 < best:
                    best = 1 + sub1 + sub2
                    bound = best - 1

        if best is not None:
            self.exact[key] = best
            return best
        self.lb[key] = max(self.lb.get(key, 1), budget + 1)
        return None


def fsg_min_win(A, B, kmax: int):
    """Smallest winning tree size separating A from B, or None above kmax."""
    A, B = frozenset(A), frozenset(B)
    if not A or not B:
        raise SuccinctError("both sides must be non-empty")
    _, props, agents = _vocabulary(list(A) + list(B))
    search = _FsgSearch(props, agents)
    for k in range(1, kmax + 1):
        found = search.solve(A, B, k)
        if found is not None:
            return found
    return None


# ---------------------------------------------------------------------------
# Minimal-formula oracle (atoms, negation, disjunction, knowledge)


def min_mel_formula(A, B, size_cap: int):
    """Smallest knowledge-only formula true on all of A and false on all of B.

    Formulas are enumerated by size and deduplicated by their truth bit
    vector over every state of every involved model, so each semantic class
    is visited once, at its minimal size. Returns (formula, size) or None.
    """
    A, B = list(A), list(B)
    if not A or not B:
        raise SuccinctError("both sides must be non-empty")
    models, props, agents = _vocabulary(A + B)

    offsets = {}
    total = 0
    for m in models:
        offsets[id(m)] = total
        total += len(m.states)
    if total > 16:
        raise SuccinctError(f"fingerprint space 2^{total} exceeds the 2^16 cap")
    full = (1 << total) - 1

    def bit(pm: PointedModel) -> int:
        return 1 << (offsets[id(pm.model)] + pm.model.state_index[pm.state])

    need = 0
    for pm in A:
        need |= bit(pm)
    forbid = 0
    for pm in B:
        forbid |= bit(pm)
    if need & forbid:
        return None

    class_masks = {}  # agent -> list of class bitmasks across models
    for a in agents:
        masks = []
        for m in models:
            base = offsets[id(m)]
            for cls in m.epistemic_classes(a):
                cm = 0
                for q in cls:
                    cm |= 1 << (base + m.state_index[q])
                masks.append(cm)
        class_masks[a] = masks

    def separates(fp: int) -> bool:
        return fp & need == need and fp & forbid == 0

    seen: dict[int, Formula] = {}
    levels: dict[int, list[int]] = {}

    def register(fp: int, formula: Formula, size: int):
        if fp in seen:
            return None
        seen[fp] = formula
        levels.setdefault(size, []).append(fp)
        if separates(fp):
            return formula
        return None

    for size in range(1, size_cap + 1):
        found = None
        if size == 1:
            for p in props:
                fp = 0
                for m in models:
                    base = offsets[id(m)]
                    for q in m.valuation[p]:
                        fp |= 1 << (base + m.state_index[q])
                found = found or register(fp, Atom(p), size)
        prev = levels.get(size - 1, ())
        for fp in prev:
            found = found or register(full & ~fp, Not(seen[fp]), size)
        for a in agents:
            masks = class_masks[a]
            for fp in prev:
                kfp = 0
                for cm in masks:
                    if fp & cm == cm:
                        kfp |= cm
                found = found or register(kfp, Knows(a, seen[fp]), size)
        for i in range(1, size - 1):
            j = size - 1 - i
            if j < i:
                break
            for x in levels.get(i, ()):
                fx = seen[x]
                for y in levels.get(j, ()):
                    z = x | y
                    if z not in seen:
                        found = found or register(z, Or(fx, seen[y]), size)
        if found is not None:
            return found, size
    return None


# ---------------------------------------------------------------------------
# Experiment rows


def succinctness_rows(
    nmax: int,
    exact_nmax: int = 2,
    kmax: int | None = None,
    beta_cap: int = 4,
    node_cap: int = 10**6,
    mel_cap: int = 40,
):
    """One experiment row per n: formula lengths plus (for small n) the two
    engines' minimal knowledge-only sizes. Values that blow a cap are None."""
    rows = []
    for n in range(1, nmax + 1):
        started = time.perf_counter()
        f = phi_n(n)
        translated = None
        try:
            translated = formula_length(h_to_k(f, beta_cap=beta_cap, node_cap=node_cap))
        except TranslateError:
            pass
        fsg = mel = None
        if n <= exact_nmax:
            A, B = separation_instance(n)
            found = min_mel_formula(A, B, mel_cap)
            if found is not None:
                mel = found[1]
            limit = kmax if kmax is not None else (mel if mel is not None else 2**n + 4)
            fsg = fsg_min_win(A, B, limit)
        rows.append(
            {
                "n": n,
                "len_phi_n": formula_length(f),
                "len_translated": translated,
                "fsg_min": fsg,
                "mel_min": mel,
                "wallclock_ms": int((time.perf_counter() - started) * 1000),
            }
        )
    return rows
