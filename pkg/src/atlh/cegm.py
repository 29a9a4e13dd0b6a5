"""Concurrent epistemic game models: validation, file format, class queries.

A model has a fixed agent/state ordering (declaration order), per-agent
action availability, a deterministic transition function that is total on
exactly the available joint actions, one epistemic equivalence relation per
agent, and a propositional valuation. Everything downstream (labeling,
strategy enumeration, serialization) iterates in declaration order, which
keeps runs deterministic.
"""

from __future__ import annotations

from itertools import product


class ModelError(ValueError):
    """Raised for malformed model text or inconsistent model data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Cegm:
    """An explicit-state concurrent game model with epistemic relations.

    Immutable after construction; all queries are read-only.
    """

    def __init__(
        self,
        agents,
        states,
        initial,
        actions,
        avail=None,
        trans=None,
        obs=(),
        props=(),
        valuation=None,
    ):
        """Validate and normalize the model.

        `avail` maps (agent, state) to an action list; missing pairs default
        to all of the agent's declared actions. `obs` is an iterable of
        (agent, state, state) indistinguishability links; the reflexive,
        symmetric, transitive closure is computed. `valuation` maps each
        proposition in `props` to the states where it holds.
        """
        self.agents = tuple(agents)
        self.states = tuple(states)
        self.initial = initial
        if not self.agents:
            raise ModelError("a model needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise ModelError("duplicate agent name")
        if not self.states:
            raise ModelError("a model needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state name")
        self.state_index = {q: i for i, q in enumerate(self.states)}
        if initial not in self.state_index:
            raise ModelError(f"initial state {initial} is not a declared state")

        self.actions = {}
        for a in self.agents:
            acts = tuple(actions.get(a, ()))
            if not acts:
                raise ModelError(f"agent {a} has no actions")
            if len(set(acts)) != len(acts):
                raise ModelError(f"duplicate action for agent {a}")
            self.actions[a] = acts

        avail = dict(avail or {})
        self._avail = {}
        for a in self.agents:
            declared = self.actions[a]
            order = {x: i for i, x in enumerate(declared)}
            for q in self.states:
                chosen = avail.pop((a, q), None)
                if chosen is None:
                    self._avail[a, q] = declared
                    continue
                chosen = list(chosen)
                if not chosen:
                    raise ModelError(f"empty availability for agent {a} at state {q}")
                for x in chosen:
                    if x not in order:
                        raise ModelError(f"action {x} not declared for agent {a}")
                if len(set(chosen)) != len(chosen):
                    raise ModelError(f"duplicate available action for agent {a} at state {q}")
                self._avail[a, q] = tuple(sorted(chosen, key=order.__getitem__))
        if avail:
            (a, q) = next(iter(avail))
            raise ModelError(f"availability for unknown agent/state pair ({a}, {q})")

        self.trans = {}
        for (q, profile), target in (trans or {}).items():
            profile = tuple(profile)
            if q not in self.state_index:
                raise ModelError(f"transition from unknown state {q}")
            if target not in self.state_index:
                raise ModelError(f"transition to unknown state {target}")
            if len(profile) != len(self.agents):
                raise ModelError(
                    f"transition at {q} has {len(profile)} actions for {len(self.agents)} agents"
                )
            for a, x in zip(self.agents, profile):
                if x not in self._avail[a, q]:
                    raise ModelError(
                        f"transition at {q} uses action {x} unavailable to agent {a}"
                    )
            self.trans[q, profile] = target
        for q in self.states:
            for profile in product(*(self._avail[a, q] for a in self.agents)):
                if (q, profile) not in self.trans:
                    raise ModelError(
                        f"missing transition at {q} for profile ({', '.join(profile)})"
                    )

        # union-find closure of the declared indistinguishability links
        parent = {(a, q): (a, q) for a in self.agents for q in self.states}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, q, q2 in obs:
            if a not in self.actions:
                raise ModelError(f"observation link for unknown agent {a}")
            if q not in self.state_index or q2 not in self.state_index:
                raise ModelError(f"observation link {q} ~ {q2} uses an unknown state")
            parent[find((a, q))] = find((a, q2))

        self._class_of = {a: {} for a in self.agents}
        self._classes = {}
        for a in self.agents:
            groups = {}
            for q in self.states:
                groups.setdefault(find((a, q)), []).append(q)
            classes = sorted(groups.values(), key=lambda c: self.state_index[c[0]])
            self._classes[a] = tuple(frozenset(c) for c in classes)
            for cls in self._classes[a]:
                for q in cls:
                    self._class_of[a][q] = cls

        for a in self.agents:
            for cls in self._classes[a]:
                avails = {self._avail[a, q] for q in cls}
                if len(avails) > 1:
                    members = ", ".join(sorted(cls, key=self.state_index.__getitem__))
                    raise ModelError(
                        f"agent {a} has differing availability inside class {{{members}}}"
                    )

        self.props = tuple(props)
        if len(set(self.props)) != len(self.props):
            raise ModelError("duplicate proposition name")
        self.valuation = {}
        for p in self.props:
            extension = tuple((valuation or {}).get(p, ()))
            for q in extension:
                if q not in self.state_index:
                    raise ModelError(f"proposition {p} declared at unknown state {q}")
            self.valuation[p] = frozenset(extension)

    # -- queries ------------------------------------------------------------

    def avail(self, agent: str, state: str) -> tuple[str, ...]:
        """Available actions, in the agent's declaration order."""
        try:
            return self._avail[agent, state]
        except KeyError:
            raise ModelError(f"unknown agent/state pair ({agent}, {state})") from None

    def epistemic_class(self, agent: str, state: str) -> frozenset:
        """All states the agent cannot tell apart from `state` (including it)."""
        try:
            return self._class_of[agent][state]
        except KeyError:
            raise ModelError(f"unknown agent {agent} or state {state}") from None

    def epistemic_classes(self, agent: str) -> tuple[frozenset, ...]:
        """The agent's partition of the state space, in state order."""
        try:
            return self._classes[agent]
        except KeyError:
            raise ModelError(f"unknown agent {agent}") from None

    def successors(self, state: str, partial=None) -> frozenset:
        """States reachable in one step when `partial` fixes some agents' actions.

        Unassigned agents range over their available actions.
        """
        if state not in self.state_index:
            raise ModelError(f"unknown state {state}")
        partial = partial or {}
        columns = []
        for a in self.agents:
            if a in partial:
                x = partial[a]
                if x not in self._avail[a, state]:
                    raise ModelError(f"action {x} unavailable to agent {a} at state {state}")
                columns.append((x,))
            else:
                columns.append(self._avail[a, state])
        for a in partial:
            if a not in self.actions:
                raise ModelError(f"unknown agent {a}")
        return frozenset(self.trans[state, profile] for profile in product(*columns))

    # -- bitmask helpers (state sets are ints with bit i = states[i]) -------

    def mask(self, states) -> int:
        m = 0
        for q in states:
            m |= 1 << self.state_index[q]
        return m

    def states_of(self, mask: int) -> tuple[str, ...]:
        return tuple(q for i, q in enumerate(self.states) if mask >> i & 1)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.states)) - 1


# ---------------------------------------------------------------------------
# File format


def _names(text: str, line: int, what: str) -> list[str]:
    names = text.split()
    for n in names:
        if not (n[0].isalpha() or n[0] == "_") or not all(c.isalnum() or c == "_" for c in n):
            raise ModelError(f"bad {what} name {n!r}", line)
    return names


def load_model(text: str) -> Cegm:
    """Parse the line-oriented model format and validate the result."""
    agents = None
    states = None
    initial = None
    actions = {}
    avail = {}
    trans = {}
    obs = []
    props = []
    valuation = {}

    def declared_state(name: str, line: int) -> str:
        if states is None or name not in states_set:
            raise ModelError(f"unknown state {name}", line)
        return name

    states_set: set = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line and "->" not in line:
            raise ModelError(f"unrecognized line {line!r}", lineno)
        head, _, tail = line.partition(":")
        key = head.split()
        if key[:1] == ["agents"] and len(key) == 1:
            if agents is not None:
                raise ModelError("duplicate agents declaration", lineno)
            agents = _names(tail, lineno, "agent")
            if not agents or len(set(agents)) != len(agents):
                raise ModelError("agents must be non-empty and distinct", lineno)
        elif key[:1] == ["states"] and len(key) == 1:
            if states is not None:
                raise ModelError("duplicate states declaration", lineno)
            states = _names(tail, lineno, "state")
            states_set = set(states)
            if not states or len(states_set) != len(states):
                raise ModelError("states must be non-empty and distinct", lineno)
        elif key[:1] == ["init"] and len(key) == 1:
            if initial is not None:
                raise ModelError("duplicate init declaration", lineno)
            names = _names(tail, lineno, "state")
            if len(names) != 1:
                raise ModelError("expected exactly one initial state", lineno)
            initial = declared_state(names[0], lineno)
        elif key[:1] == ["actions"]:
            if len(key) != 2:
                raise ModelError("expected `actions <agent>: ...`", lineno)
            if agents is None or key[1] not in agents:
                raise ModelError(f"unknown agent {key[1]}", lineno)
            if key[1] in actions:
                raise ModelError(f"duplicate actions declaration for {key[1]}", lineno)
            actions[key[1]] = _names(tail, lineno, "action")
        elif key[:1] == ["avail"]:
            if len(key) != 3:
                raise ModelError("expected `avail <agent> <state>: ...`", lineno)
            agent, state = key[1], key[2]
            if agents is None or agent not in agents:
                raise ModelError(f"unknown agent {agent}", lineno)
            declared_state(state, lineno)
            if (agent, state) in avail:
                raise ModelError(f"duplicate avail declaration for {agent} at {state}", lineno)
            avail[agent, state] = _names(tail, lineno, "action")
        elif key[:1] == ["obs"]:
            if len(key) != 2:
                raise ModelError("expected `obs <agent>: <state> ~ <state>`", lineno)
            if agents is None or key[1] not in agents:
                raise ModelError(f"unknown agent {key[1]}", lineno)
            sides = tail.split("~")
            if len(sides) != 2:
                raise ModelError("expected exactly one `~` in observation link", lineno)
            left = _names(sides[0], lineno, "state")
            right = _names(sides[1], lineno, "state")
            if len(left) != 1 or len(right) != 1:
                raise ModelError("observation link needs one state on each side", lineno)
            obs.append((key[1], declared_state(left[0], lineno), declared_state(right[0], lineno)))
        elif key[:1] == ["prop"]:
            if len(key) != 2:
                raise ModelError("expected `prop <name>: <states>`", lineno)
            name = key[1]
            if name in valuation:
                raise ModelError(f"duplicate proposition {name}", lineno)
            props.append(name)
            valuation[name] = [declared_state(q, lineno) for q in _names(tail, lineno, "state")]
        elif line.startswith("trans "):
            rest = line[len("trans "):]
            if "(" not in rest or ")" not in rest or "->" not in rest:
                raise ModelError("expected `trans <state> (<actions>) -> <state>`", lineno)
            src_text, _, rest = rest.partition("(")
            profile_text, _, rest = rest.partition(")")
            arrow, _, target_text = rest.partition("->")
            if arrow.strip():
                raise ModelError("expected `->` right after the action profile", lineno)
            src = declared_state(src_text.strip(), lineno)
            target = declared_state(target_text.strip(), lineno)
            profile = tuple(x.strip() for x in profile_text.split(","))
            if agents is None or len(profile) != len(agents):
                raise ModelError("action profile length differs from agent count", lineno)
            if (src, profile) in trans:
                raise ModelError(f"duplicate transition at {src} for ({', '.join(profile)})", lineno)
            trans[src, profile] = target
        else:
            raise ModelError(f"unrecognized line {line!r}", lineno)

    if agents is None:
        raise ModelError("missing agents declaration")
    if states is None:
        raise ModelError("missing states declaration")
    if initial is None:
        raise ModelError("missing init declaration")
    return Cegm(agents, states, initial, actions, avail, trans, obs, props, valuation)


def save_model(model: Cegm) -> str:
    """Serialize canonically; loading the result reproduces the model."""
    out = []
    out.append("agents: " + " ".join(model.agents))
    out.append("states: " + " ".join(model.states))
    out.append("init: " + model.initial)
    for a in model.agents:
        out.append(f"actions {a}: " + " ".join(model.actions[a]))
    for a in model.agents:
        for q in model.states:
            chosen = model.avail(a, q)
            if chosen != model.actions[a]:
                out.append(f"avail {a} {q}: " + " ".join(chosen))
    order = [{x: i for i, x in enumerate(model.actions[a])} for a in model.agents]
    by_state: dict[str, list] = {q: [] for q in model.states}
    for (s, p) in model.trans:
        by_state[s].append(p)
    for q in model.states:
        profiles = sorted(
            by_state[q], key=lambda p: tuple(order[i][x] for i, x in enumerate(p))
        )
        for profile in profiles:
            out.append(f"trans {q} ({', '.join(profile)}) -> {model.trans[q, profile]}")
    for a in model.agents:
        for cls in model.epistemic_classes(a):
            members = sorted(cls, key=model.state_index.__getitem__)
            for left, right in zip(members, members[1:]):
                out.append(f"obs {a}: {left} ~ {right}")
    for p in model.props:
        members = sorted(model.valuation[p], key=model.state_index.__getitem__)
        out.append(f"prop {p}: " + " ".join(members))
    return "\n".join(out) + "\n"
