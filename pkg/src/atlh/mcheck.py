"""Bottom-up labeling model checker for strategic-epistemic formulas.

Subformulas are evaluated shortest-first, so every operator sees its
arguments as already-computed state sets (bitmasks over the model's state
order). Strategic operators enumerate memoryless strategies for the
coalition, evaluate the universal path condition on the graph restricted
by each strategy, and take the union of the validated states.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

from .cegm import Cegm
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
    Real,
    Threshold,
    TrueF,
    subformulas_by_length,
)


class CheckError(ValueError):
    """Raised when a formula does not fit the model (unknown atom or agent)."""


@dataclass(frozen=True)
class CheckOptions:
    """Strategy mode (`ir` uniform / `Ir` unrestricted), success scope, threads.

    Objective scope requires the path condition from the queried state only;
    subjective scope requires it from every state some coalition member
    considers possible there.
    """

    strategy_mode: str = "ir"
    success_scope: str = "objective"
    threads: int = 1

    def __post_init__(self):
        if self.strategy_mode not in ("ir", "Ir"):
            raise CheckError(f"unknown strategy mode {self.strategy_mode!r}")
        if self.success_scope not in ("objective", "subjective"):
            raise CheckError(f"unknown success scope {self.success_scope!r}")
        if self.threads < 1:
            raise CheckError("threads must be positive")


class Strategy:
    """A memoryless collective strategy: one action per coalition agent and state."""

    def __init__(self, coalition: tuple[str, ...], actions: dict):
        self.coalition = coalition
        self.actions = actions  # agent -> {state -> action}

    def action(self, agent: str, state: str) -> str:
        return self.actions[agent][state]

    def __str__(self) -> str:
        if not self.coalition:
            return "(empty coalition)"
        parts = []
        for a in self.coalition:
            moves = " ".join(f"{q}={x}" for q, x in self.actions[a].items())
            parts.append(f"{a}: {moves}")
        return "; ".join(parts)


# ---------------------------------------------------------------------------
# Exact threshold comparison


def _cmp(value_cmp: str, left, right) -> bool:
    if value_cmp == "<":
        return left < right
    if value_cmp == "<=":
        return left <= right
    if value_cmp == ">":
        return left > right
    if value_cmp == ">=":
        return left >= right
    return left == right


def compare_log(count: int, cmp: str, threshold: Threshold) -> bool:
    """Decide log2(count) <cmp> threshold exactly, without floating point.

    A `log(k)` threshold reduces to comparing count against k. A rational
    threshold p/q reduces to comparing count**q against 2**p over integers.
    """
    if count < 1:
        raise CheckError(f"class count must be positive, got {count}")
    if isinstance(threshold, LogOfCount):
        return _cmp(cmp, count, threshold.count)
    p = threshold.value.numerator
    q = threshold.value.denominator
    return _cmp(cmp, count**q, 2**p)


# ---------------------------------------------------------------------------
# Epistemic and uncertainty evaluation on bitmasks


def _class_count(class_states, beta_masks, state_index) -> int:
    vectors = set()
    for q in class_states:
        bit = 1 << state_index[q]
        vectors.add(tuple(1 if mask & bit else 0 for mask in beta_masks))
    return len(vectors)


def hartley_classes(model: Cegm, agent: str, state: str, beta_labels) -> int:
    """Number of distinct valuation patterns of `beta_labels` inside the
    agent's epistemic class at `state`."""
    masks = [model.mask(labels) for labels in beta_labels]
    cls = model.epistemic_class(agent, state)
    return _class_count(cls, masks, model.state_index)


# ---------------------------------------------------------------------------
# Strategic operators


class _CoalitionEngine:
    """Choice points and successor buckets for one coalition on one model.

    A strategy is a tuple of actions, one per choice point (an epistemic
    class in `ir` mode, a single state in `Ir` mode, per coalition agent).
    Buckets map each state and coalition-action tuple to the mask of states
    reachable under any opponent response.
    """

    def __init__(self, model: Cegm, coalition, mode: str):
        self.model = model
        self.coalition = tuple(a for a in model.agents if a in set(coalition))
        members = set(self.coalition)
        self.choice_points = []
        for a in self.coalition:
            if mode == "ir":
                for cls in model.epistemic_classes(a):
                    states = sorted(cls, key=model.state_index.__getitem__)
                    self.choice_points.append((a, tuple(states), model.avail(a, states[0])))
            else:
                for q in model.states:
                    self.choice_points.append((a, (q,), model.avail(a, q)))
        cp_of = {}
        for idx, (a, states, _) in enumerate(self.choice_points):
            for q in states:
                cp_of[a, q] = idx
        self.state_cps = [
            tuple(cp_of[a, q] for a in self.coalition) for q in model.states
        ]
        proj = [i for i, a in enumerate(model.agents) if a in members]
        self.buckets = []
        for q in model.states:
            bucket = {}
            cols = [model.avail(a, q) for a in model.agents]
            for profile in product(*cols):
                key = tuple(profile[i] for i in proj)
                target = 1 << model.state_index[model.trans[q, profile]]
                bucket[key] = bucket.get(key, 0) | target
            self.buckets.append(bucket)
        self._start_masks = None

    def choice_tuples(self):
        """All strategies, in choice-point-order by action-declaration order."""
        return product(*(options for (_, _, options) in self.choice_points))

    def succ(self, choices) -> list[int]:
        return [
            bucket[tuple(choices[j] for j in cps)]
            for bucket, cps in zip(self.buckets, self.state_cps)
        ]

    def start_masks(self) -> list[int]:
        """Subjective start set per state: union of members' classes."""
        if self._start_masks is None:
            model = self.model
            masks = []
            for q in model.states:
                m = 0
                for a in self.coalition:
                    m |= model.mask(model.epistemic_class(a, q))
                masks.append(m)
            self._start_masks = masks
        return self._start_masks

    def strategy_from(self, choices) -> Strategy:
        actions: dict = {a: {} for a in self.coalition}
        for (agent, states, _), chosen in zip(self.choice_points, choices):
            for q in states:
                actions[agent][q] = chosen
        ordered = {
            a: dict(sorted(actions[a].items(), key=lambda kv: self.model.state_index[kv[0]]))
            for a in self.coalition
        }
        return Strategy(self.coalition, ordered)


def _pre_all(succ, n: int, target: int) -> int:
    out = 0
    for i in range(n):
        if succ[i] & ~target == 0:
            out |= 1 << i
    return out


def _ag(succ, n: int, target: int) -> int:
    z = target
    while True:
        nz = 0
        for i in range(n):
            if z >> i & 1 and succ[i] & ~z == 0:
                nz |= 1 << i
        if nz == z:
            return z
        z = nz


def _au(succ, n: int, hold: int, goal: int) -> int:
    z = goal
    while True:
        nz = z
        for i in range(n):
            if not z >> i & 1 and hold >> i & 1 and succ[i] & ~z == 0:
                nz |= 1 << i
        if nz == z:
            return z
        z = nz


def _condition(succ, n: int, full: int, kind: str, args) -> int:
    """States from which every path under the strategy meets the condition."""
    if kind == "X":
        return _pre_all(succ, n, args[0])
    if kind == "G":
        return _ag(succ, n, args[0])
    if kind == "U":
        return _au(succ, n, args[0], args[1])
    if kind == "FG":
        safe = args[0] & _ag(succ, n, args[1])
        return _au(succ, n, full, safe)
    raise CheckError(f"unknown temporal kind {kind!r}")


def _validated(engine: _CoalitionEngine, w: int, scope: str, full: int) -> int:
    """States whose whole start set lies inside the winning set `w`."""
    if scope == "objective":
        return w
    v = 0
    for i, sm in enumerate(engine.start_masks()):
        if sm & ~w == 0:
            v |= 1 << i
    return v


def _strategic_mask(engine: _CoalitionEngine, kind: str, args, opts: CheckOptions) -> int:
    model = engine.model
    n = len(model.states)
    full = model.full_mask

    def run(choice_batch) -> int:
        acc = 0
        for choices in choice_batch:
            w = _condition(engine.succ(choices), n, full, kind, args)
            acc |= _validated(engine, w, opts.success_scope, full)
            if acc == full:
                break
        return acc

    if opts.threads == 1:
        result = 0
        for choices in engine.choice_tuples():
            w = _condition(engine.succ(choices), n, full, kind, args)
            result |= _validated(engine, w, opts.success_scope, full)
            if result == full:
                return result
        return result

    all_choices = list(engine.choice_tuples())
    chunk = max(1, -(-len(all_choices) // opts.threads))
    batches = [all_choices[i : i + chunk] for i in range(0, len(all_choices), chunk)]
    result = 0
    with ThreadPoolExecutor(max_workers=opts.threads) as pool:
        for part in pool.map(run, batches):
            result |= part
    return result


def enumerate_strategies(model: Cegm, coalition, opts: CheckOptions | None = None):
    """Yield each collective strategy exactly once, in deterministic order."""
    opts = opts or CheckOptions()
    _require_agents(model, coalition)
    engine = _CoalitionEngine(model, coalition, opts.strategy_mode)
    for choices in engine.choice_tuples():
        yield engine.strategy_from(choices)


def strategic_holds(model: Cegm, state, coalition, kind, arg_labels, opts=None) -> bool:
    """Can the coalition enforce the condition from `state` (its start set)?"""
    opts = opts or CheckOptions()
    _require_agents(model, coalition)
    if state not in model.state_index:
        raise CheckError(f"unknown state {state}")
    args = [model.mask(labels) for labels in arg_labels]
    engine = _CoalitionEngine(model, coalition, opts.strategy_mode)
    n = len(model.states)
    full = model.full_mask
    if opts.success_scope == "objective":
        start = 1 << model.state_index[state]
    else:
        start = engine.start_masks()[model.state_index[state]]
    for choices in engine.choice_tuples():
        w = _condition(engine.succ(choices), n, full, kind, args)
        if start & ~w == 0:
            return True
    return False


# ---------------------------------------------------------------------------
# Labeling


def _require_agents(model: Cegm, agents) -> None:
    for a in agents:
        if a not in model.actions:
            raise CheckError(f"unknown agent {a}")


def _validate(model: Cegm, f: Formula) -> None:
    for g in subformulas_by_length(f):
        match g:
            case Atom(name):
                if name not in model.valuation:
                    raise CheckError(f"unknown atom {name}")
            case Knows(agent, _) | Hartley(agent, _, _, _):
                _require_agents(model, (agent,))
            case CoalX(coal, _) | CoalG(coal, _) | MutualKnows(coal, _):
                _require_agents(model, coal)
            case CoalU(coal, _, _) | CoalFG(coal, _, _):
                _require_agents(model, coal)


def _knows_mask(model: Cegm, agent: str, sub: int) -> int:
    out = 0
    for cls in model.epistemic_classes(agent):
        cm = model.mask(cls)
        if cm & ~sub == 0:
            out |= cm
    return out


def _hartley_mask(model: Cegm, g: Hartley, lab: dict) -> int:
    beta_masks = [lab[b] for b in g.beta]
    out = 0
    for cls in model.epistemic_classes(g.agent):
        count = _class_count(cls, beta_masks, model.state_index)
        if compare_log(count, g.cmp, g.threshold):
            out |= model.mask(cls)
    return out


def _label_masks(model: Cegm, f: Formula, opts: CheckOptions) -> dict:
    _validate(model, f)
    full = model.full_mask
    engines: dict = {}
    lab: dict = {}
    for g in subformulas_by_length(f):
        match g:
            case Atom(name):
                mask = model.mask(model.valuation[name])
            case TrueF():
                mask = full
            case FalseF():
                mask = 0
            case Not(sub):
                mask = full & ~lab[sub]
            case And(left, right):
                mask = lab[left] & lab[right]
            case Or(left, right):
                mask = lab[left] | lab[right]
            case Knows(agent, sub):
                mask = _knows_mask(model, agent, lab[sub])
            case MutualKnows(coal, sub):
                mask = full
                for a in coal:
                    mask &= _knows_mask(model, a, lab[sub])
            case Hartley():
                mask = _hartley_mask(model, g, lab)
            case CoalX(coal, sub):
                mask = _strategic(engines, model, coal, "X", [lab[sub]], opts)
            case CoalG(coal, sub):
                mask = _strategic(engines, model, coal, "G", [lab[sub]], opts)
            case CoalU(coal, hold, goal):
                mask = _strategic(engines, model, coal, "U", [lab[hold], lab[goal]], opts)
            case CoalFG(coal, goal, inv):
                mask = _strategic(engines, model, coal, "FG", [lab[goal], lab[inv]], opts)
            case _:
                raise CheckError(f"cannot label {g!r}")
        lab[g] = mask
    return lab


def _strategic(engines, model, coalition, kind, args, opts) -> int:
    key = (coalition, opts.strategy_mode)
    engine = engines.get(key)
    if engine is None:
        engine = engines[key] = _CoalitionEngine(model, coalition, opts.strategy_mode)
    return _strategic_mask(engine, kind, args, opts)


def label(model: Cegm, f: Formula, opts: CheckOptions | None = None) -> dict:
    """State sets for every subformula of `f`, keyed by subformula."""
    opts = opts or CheckOptions()
    masks = _label_masks(model, f, opts)
    return {g: frozenset(model.states_of(m)) for g, m in masks.items()}


def check(model: Cegm, state: str, f: Formula, opts: CheckOptions | None = None) -> bool:
    """Does `f` hold at `state`?"""
    opts = opts or CheckOptions()
    if state not in model.state_index:
        raise CheckError(f"unknown state {state}")
    masks = _label_masks(model, f, opts)
    return bool(masks[f] >> model.state_index[state] & 1)


def find_witness(model: Cegm, state: str, f: Formula, opts: CheckOptions | None = None):
    """First strategy validating a top-level strategic formula at `state`.

    Returns None when `f` is not strategic at top level or no strategy works.
    """
    opts = opts or CheckOptions()
    match f:
        case CoalX(coal, sub):
            kind, parts = "X", [sub]
        case CoalG(coal, sub):
            kind, parts = "G", [sub]
        case CoalU(coal, hold, goal):
            kind, parts = "U", [hold, goal]
        case CoalFG(coal, goal, inv):
            kind, parts = "FG", [goal, inv]
        case _:
            return None
    if state not in model.state_index:
        raise CheckError(f"unknown state {state}")
    lab = _label_masks(model, And(parts[0], parts[1]) if len(parts) == 2 else parts[0], opts)
    args = [lab[p] for p in parts]
    engine = _CoalitionEngine(model, coal, opts.strategy_mode)
    n = len(model.states)
    full = model.full_mask
    if opts.success_scope == "objective":
        start = 1 << model.state_index[state]
    else:
        start = engine.start_masks()[model.state_index[state]]
    for choices in engine.choice_tuples():
        w = _condition(engine.succ(choices), n, full, kind, args)
        if start & ~w == 0:
            return engine.strategy_from(choices)
    return None
