"""Moore machines with pluggable effects, and their composition by lenses.

A machine has finite states, a readout onto its output space, and an update
``(state, input) -> F(state)`` for one of three effects: deterministic
(identity), nondeterministic (powerset) or probabilistic (finitely-supported
exact-rational distributions).  Each effect carries the lax-monoidal pairing
``F(A) x F(B) -> F(A x B)`` that makes parallel products work.

Lenses act on machines without touching states: the forward map re-reads the
output, the backward map translates incoming inputs using the current
output.  Wiring diagrams therefore compose machines by a parallel product
followed by one lens action, and feedback wires read the *current* readouts
of sibling components, which is what breaks instantaneous loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ArityMismatch,
    EffectMismatch,
    HorizonTooLarge,
    InterfaceMismatch,
)
from .lens import (
    Chart,
    DirectedWiringDiagram,
    FiniteLens,
    FiniteSpace,
    Interface,
    UNIT_SPACE,
    dwd_to_lens,
    pair_index,
    space_product,
)


class Effect:
    """One of the three update effects; subclasses are stateless singletons."""

    name: str

    def validate(self, value, n_states: int) -> None:
        raise NotImplementedError

    def outcomes(self, value) -> list[tuple[int, Fraction | None]]:
        """Support of an effectful value, with weights for distributions."""
        raise NotImplementedError

    def map(self, f, value):
        """Functorial action along a state map ``f: int -> int``."""
        raise NotImplementedError

    def pair(self, a, b, pair_fn):
        """Lax monoidal pairing into a product state space."""
        raise NotImplementedError


class _Identity(Effect):
    name = "identity"

    def validate(self, value, n_states):
        if not isinstance(value, int) or not 0 <= value < n_states:
            raise ValueError(f"deterministic update entry {value!r} is not a state")

    def outcomes(self, value):
        return [(value, None)]

    def map(self, f, value):
        return f(value)

    def pair(self, a, b, pair_fn):
        return pair_fn(a, b)


class _Powerset(Effect):
    name = "powerset"

    def validate(self, value, n_states):
        if not isinstance(value, tuple) or list(value) != sorted(set(value)):
            raise ValueError(f"powerset entry {value!r} is not a canonical sorted set")
        for s in value:
            if not 0 <= s < n_states:
                raise ValueError(f"powerset entry mentions unknown state {s}")

    def outcomes(self, value):
        return [(s, None) for s in value]

    def map(self, f, value):
        return tuple(sorted({f(s) for s in value}))

    def pair(self, a, b, pair_fn):
        return tuple(sorted(pair_fn(x, y) for x in a for y in b))


class _FiniteDist(Effect):
    name = "dist"

    def validate(self, value, n_states):
        if not isinstance(value, tuple):
            raise ValueError("distribution entries must be tuples of (state, weight)")
        total = Fraction(0)
        prev = -1
        for s, p in value:
            if not 0 <= s < n_states:
                raise ValueError(f"distribution mentions unknown state {s}")
            if s <= prev:
                raise ValueError("distribution support must be strictly sorted")
            if not isinstance(p, Fraction) or p <= 0:
                raise ValueError("weights must be positive exact rationals")
            prev = s
            total += p
        if total != 1:
            raise ValueError(f"distribution weights sum to {total}, not 1")

    def outcomes(self, value):
        return list(value)

    def map(self, f, value):
        merged: dict[int, Fraction] = {}
        for s, p in value:
            t = f(s)
            merged[t] = merged.get(t, Fraction(0)) + p
        return tuple(sorted(merged.items()))

    def pair(self, a, b, pair_fn):
        merged: dict[int, Fraction] = {}
        for x, p in a:
            for y, q in b:
                merged[pair_fn(x, y)] = merged.get(pair_fn(x, y), Fraction(0)) + p * q
        return tuple(sorted(merged.items()))


IDENTITY = _Identity()
POWERSET = _Powerset()
FINITE_DIST = _FiniteDist()

EFFECTS = {e.name: e for e in (IDENTITY, POWERSET, FINITE_DIST)}


def dist(*pairs: tuple[int, Fraction]) -> tuple[tuple[int, Fraction], ...]:
    """Canonicalize a list of (state, weight) pairs into a distribution."""
    merged: dict[int, Fraction] = {}
    for s, p in pairs:
        merged[s] = merged.get(s, Fraction(0)) + Fraction(p)
    return tuple(sorted((s, p) for s, p in merged.items() if p))


@dataclass(frozen=True)
class Machine:
    """States, readout and effectful update over a finite interface.

    ``update[s * |I| + i]`` is the effect value for state ``s`` on input
    ``i``; ``readout[s]`` is the output index.
    """

    effect: Effect
    states: FiniteSpace
    inputs: FiniteSpace
    outputs: FiniteSpace
    readout: tuple[int, ...]
    update: tuple

    def __post_init__(self):
        object.__setattr__(self, "readout", tuple(self.readout))
        object.__setattr__(self, "update", tuple(self.update))
        if len(self.readout) != self.states.size:
            raise ArityMismatch("one readout entry per state required")
        if any(not 0 <= o < self.outputs.size for o in self.readout):
            raise ArityMismatch("readout entry outside the output space")
        if len(self.update) != self.states.size * self.inputs.size:
            raise ArityMismatch("one update entry per (state, input) required")
        for entry in self.update:
            self.effect.validate(entry, self.states.size)

    @property
    def interface(self) -> Interface:
        return Interface(self.outputs, self.inputs)

    def update_at(self, s: int, i: int):
        return self.update[s * self.inputs.size + i]


def act_lens(m: Machine, lens: FiniteLens) -> Machine:
    """Change a machine's interface along a lens; states are untouched."""
    if lens.src != m.interface:
        raise InterfaceMismatch("lens domain differs from the machine interface")
    readout = tuple(lens.fwd[m.readout[s]] for s in range(m.states.size))
    new_inputs = lens.tgt.input_space
    update = tuple(
        m.update_at(s, lens.apply_bwd(m.readout[s], i))
        for s in range(m.states.size)
        for i in range(new_inputs.size)
    )
    return Machine(m.effect, m.states, new_inputs, lens.tgt.output_space, readout, update)


def parallel(m1: Machine, m2: Machine) -> Machine:
    """Product machine; updates pair through the effect's monoidal structure."""
    if m1.effect is not m2.effect:
        raise EffectMismatch(f"cannot pair effects {m1.effect.name} and {m2.effect.name}")
    states = space_product(m1.states, m2.states)
    inputs = space_product(m1.inputs, m2.inputs)
    outputs = space_product(m1.outputs, m2.outputs)

    def pair_states(x: int, y: int) -> int:
        return pair_index(m1.states, m2.states, x, y)

    readout = []
    update = []
    for s1 in range(m1.states.size):
        for s2 in range(m2.states.size):
            readout.append(pair_index(m1.outputs, m2.outputs, m1.readout[s1], m2.readout[s2]))
            for i1 in range(m1.inputs.size):
                for i2 in range(m2.inputs.size):
                    update.append(
                        m1.effect.pair(m1.update_at(s1, i1), m2.update_at(s2, i2), pair_states)
                    )
    return Machine(m1.effect, states, inputs, outputs, tuple(readout), tuple(update))


def trivial_machine(effect: Effect = IDENTITY) -> Machine:
    """The one-state machine on the unit interface (the monoidal unit)."""
    if effect is IDENTITY:
        entry = 0
    elif effect is POWERSET:
        entry = (0,)
    else:
        entry = ((0, Fraction(1)),)
    return Machine(effect, UNIT_SPACE, UNIT_SPACE, UNIT_SPACE, (0,), (entry,))


def compose_via_dwd(d: DirectedWiringDiagram, machines: list[Machine]) -> Machine:
    """Parallel all components, then act by the diagram's routing lens.

    Feedback wires read sibling readouts of the current state, so cycles
    between boxes are fine.
    """
    lens = dwd_to_lens(d)
    if not isinstance(lens, FiniteLens):
        raise InterfaceMismatch("a diagram over real ports cannot act on finite machines")
    if not machines:
        return act_lens(trivial_machine(), lens)
    combined = machines[0]
    for m in machines[1:]:
        combined = parallel(combined, m)
    return act_lens(combined, lens)


@dataclass(frozen=True)
class Trace:
    """Inputs consumed, states visited, and outputs read along the way.

    ``len(states) == len(inputs) + 1`` except for truncated nondeterministic
    traces that hit a deadlock (an empty update set).
    """

    inputs: tuple[int, ...]
    states: tuple[int, ...]
    outputs: tuple[int, ...]


DEFAULT_TRACE_BOUND = 100_000


def simulate(m: Machine, init: int, inputs: list[int], bound: int = DEFAULT_TRACE_BOUND):
    """Run a machine on an input word.

    Returns a single :class:`Trace` for deterministic machines, a list of
    traces for powerset machines (deadlocked branches come back truncated),
    and a list of ``(Trace, probability)`` pairs for distributions.
    """
    if not 0 <= init < m.states.size:
        raise ArityMismatch(f"initial state {init} outside the state space")
    for i in inputs:
        if not 0 <= i < m.inputs.size:
            raise ArityMismatch(f"input {i} outside the input space")

    if m.effect is IDENTITY:
        states = [init]
        for i in inputs:
            states.append(m.update_at(states[-1], i))
        return Trace(tuple(inputs), tuple(states), tuple(m.readout[s] for s in states))

    if m.effect is POWERSET:
        partial = [[init]]
        for step, i in enumerate(inputs):
            extended = []
            for states in partial:
                if len(states) <= step:
                    extended.append(states)  # already deadlocked
                    continue
                nexts = m.update_at(states[-1], i)
                if not nexts:
                    extended.append(states)
                    continue
                for s in nexts:
                    extended.append(states + [s])
            if len(extended) > bound:
                raise HorizonTooLarge(
                    f"enumeration reached {len(extended)} traces (bound {bound})"
                )
            partial = extended
        return [
            Trace(
                tuple(inputs[: len(states) - 1]),
                tuple(states),
                tuple(m.readout[s] for s in states),
            )
            for states in partial
        ]

    # exact distribution over traces
    weighted: list[tuple[list[int], Fraction]] = [([init], Fraction(1))]
    for i in inputs:
        extended = []
        for states, p in weighted:
            for s, q in m.update_at(states[-1], i):
                extended.append((states + [s], p * q))
        if len(extended) > bound:
            raise HorizonTooLarge(
                f"enumeration reached {len(extended)} traces (bound {bound})"
            )
        weighted = extended
    return [
        (
            Trace(tuple(inputs), tuple(states), tuple(m.readout[s] for s in states)),
            p,
        )
        for states, p in weighted
    ]


@dataclass(frozen=True)
class MachineMap:
    """A state map lying over an interface chart."""

    chart: Chart
    state_map: tuple[int, ...]


def machine_map_failures(mm: MachineMap, m1: Machine, m2: Machine) -> list[str]:
    """Violated readout/update squares, one message per (state, input) pair.

    The update square is read effect-appropriately: equality for
    deterministic machines, image containment for powerset, pushforward
    equality for distributions.
    """
    if mm.chart.src != m1.interface or mm.chart.tgt != m2.interface:
        raise ArityMismatch("chart endpoints differ from the machine interfaces")
    if len(mm.state_map) != m1.states.size:
        raise ArityMismatch("one image per state required")
    if any(not 0 <= t < m2.states.size for t in mm.state_map):
        raise ArityMismatch("state map entry outside the target machine")
    if m1.effect is not m2.effect:
        raise EffectMismatch("machine maps require a common effect")

    failures = []
    s = mm.state_map
    for x in range(m1.states.size):
        if m2.readout[s[x]] != mm.chart.apply_fwd(m1.readout[x]):
            failures.append(
                f"readout square fails at state {m1.states.values[x]!r}"
            )
    for x in range(m1.states.size):
        for i in range(m1.inputs.size):
            pushed = m1.effect.map(lambda v: s[v], m1.update_at(x, i))
            target = m2.update_at(s[x], mm.chart.apply_push(m1.readout[x], i))
            if m1.effect is POWERSET:
                ok = set(pushed) <= set(target)
            else:
                ok = pushed == target
            if not ok:
                failures.append(
                    f"update square fails at state {m1.states.values[x]!r}, "
                    f"input {m1.inputs.values[i]!r}"
                )
    return failures


def check_machine_map(mm: MachineMap, m1: Machine, m2: Machine) -> bool:
    return not machine_map_failures(mm, m1, m2)


def compose_machine_maps(a: MachineMap, b: MachineMap, m1: Machine) -> MachineMap:
    """Vertical composite of machine maps (charts compose forward)."""
    chart = Chart(
        a.chart.src,
        b.chart.tgt,
        tuple(b.chart.fwd[v] for v in a.chart.fwd),
        tuple(
            b.chart.apply_push(a.chart.apply_fwd(o), a.chart.apply_push(o, i))
            for o in range(a.chart.src.output_space.size)
            for i in range(a.chart.src.input_space.size)
        ),
    )
    state_map = tuple(b.state_map[v] for v in a.state_map)
    return MachineMap(chart, state_map)


def window_interface(horizon: int) -> Interface:
    """The interface of a clock window: times as outputs, one trivial input."""
    return Interface(FiniteSpace(tuple(str(k) for k in range(horizon + 1))), UNIT_SPACE)


def window_chart(m_interface: Interface, inputs: list[int], outputs: list[int]) -> Chart:
    """The chart out of a horizon-T window that prescribes an input word and
    an output word; T+1 outputs and T+1 inputs (the last input is unused by
    trajectory enumeration)."""
    if len(inputs) != len(outputs):
        raise ArityMismatch("need as many prescribed inputs as outputs")
    horizon = len(outputs) - 1
    return Chart(window_interface(horizon), m_interface, tuple(outputs), tuple(inputs))


def window_machine(horizon: int) -> Machine:
    """The cyclic clock on a finite window: each tick advances the time."""
    n = horizon + 1
    space = FiniteSpace(tuple(str(k) for k in range(n)))
    return Machine(
        IDENTITY,
        space,
        UNIT_SPACE,
        space,
        tuple(range(n)),
        tuple((k + 1) % n for k in range(n)),
    )


def enumerate_trajectories(m: Machine, chart: Chart, horizon: int) -> list[tuple[int, ...]]:
    """All state sequences matching a window's prescribed behavior.

    A sequence ``s_0..s_T`` qualifies when every readout matches the
    prescribed output and every step follows the update on the prescribed
    input (membership for powerset machines, support membership for
    distributions).
    """
    if chart.tgt != m.interface:
        raise ArityMismatch("chart target differs from the machine interface")
    if horizon + 1 > len(chart.fwd):
        raise ArityMismatch("window shorter than the requested horizon")
    outputs = [chart.fwd[k] for k in range(horizon + 1)]
    inputs = [chart.push[k * chart.src.input_space.size] for k in range(horizon + 1)]

    sequences: list[tuple[int, ...]] = []

    def extend(prefix: list[int], k: int) -> None:
        if m.readout[prefix[-1]] != outputs[k]:
            return
        if k == horizon:
            sequences.append(tuple(prefix))
            return
        for nxt, _ in m.effect.outcomes(m.update_at(prefix[-1], inputs[k])):
            extend(prefix + [nxt], k + 1)

    for s0 in range(m.states.size):
        extend([s0], 0)
    return sequences


def support_machine(m: Machine) -> Machine:
    """Forget probabilities: the supports of a distribution machine's rows.

    This is the machine image of the support morphism from distributions to
    the nondeterministic effect.
    """
    if m.effect is not FINITE_DIST:
        raise EffectMismatch("support is taken of a distribution machine")
    update = tuple(
        tuple(sorted(s for s, _ in entry)) for entry in m.update
    )
    return Machine(POWERSET, m.states, m.inputs, m.outputs, m.readout, update)
