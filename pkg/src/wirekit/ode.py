"""Euclidean ODE systems, their wiring-diagram composition, and Euler steps.

An ODE system exposes some functions of its state and accepts named inputs;
its vector field gives one displacement expression per state variable.
Directed wiring diagrams compose systems symbolically: every component input
is literally substituted by the expression its source exposes (no
simplification), so evaluating the composite field equals evaluating the
routed components exactly.

The Euler method turns an ODE system into a discrete-time vector machine
``x' = x + h * u(x, i)`` with the same exposed outputs.  Discretizing and
then wiring agrees with wiring and then discretizing up to floating-point
reassociation, which the test suite pins at 1e-9 relative.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite

from .errors import (
    ArityMismatch,
    CyclicThroughOuterInput,
    InterfaceMismatch,
    NonFiniteValue,
)
from .expr import BinOp, Const, Expr, Var
from .lens import REAL, DirectedWiringDiagram, VectorLens, dwd_to_lens


@dataclass(frozen=True)
class OdeSystem:
    """State variables, exposed outputs, named inputs, and a vector field.

    ``expose[k]`` is an expression over the state variables; ``field[k]`` is
    the displacement of ``states[k]`` over state and input variables.
    """

    states: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    expose: tuple[Expr, ...]
    field: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "expose", tuple(self.expose))
        object.__setattr__(self, "field", tuple(self.field))
        if len(self.expose) != len(self.outputs):
            raise ArityMismatch("one exposed expression per output required")
        if len(self.field) != len(self.states):
            raise ArityMismatch("one field expression per state required")
        state_vars = set(self.states)
        all_vars = state_vars | set(self.inputs)
        for e in self.expose:
            extra = e.free_vars() - state_vars
            if extra:
                raise ArityMismatch(f"exposed expression mentions non-state variables {extra}")
        for e in self.field:
            extra = e.free_vars() - all_vars
            if extra:
                raise ArityMismatch(f"field expression mentions unknown variables {extra}")

    @property
    def n_state(self) -> int:
        return len(self.states)

    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)


def _fresh(base: str, used: set[str]) -> str:
    if base not in used:
        used.add(base)
        return base
    k = 2
    while f"{base}_{k}" in used:
        k += 1
    used.add(f"{base}_{k}")
    return f"{base}_{k}"


def dwd_apply_ode(d: DirectedWiringDiagram, systems: list[OdeSystem]) -> OdeSystem:
    """Couple ODE systems along a diagram by literal substitution.

    Component state variables are renamed apart (box name prefixes break
    clashes); each component input is replaced by the exposing expression of
    its source, or by the outer input variable it is fed from.  Cycles among
    boxes are fine because exposed expressions only mention states.
    """
    d.validate()
    if len(systems) != len(d.boxes):
        raise ArityMismatch(f"diagram has {len(d.boxes)} boxes, got {len(systems)} systems")
    for b, (box, sys) in enumerate(zip(d.boxes, systems)):
        if any(p.type != REAL for p in box.inputs + box.outputs):
            raise InterfaceMismatch(f"box {box.name!r} has non-real ports")
        if len(box.inputs) != sys.n_in or len(box.outputs) != sys.n_out:
            raise ArityMismatch(
                f"box {box.name!r} has {len(box.inputs)}/{len(box.outputs)} ports but the "
                f"system has {sys.n_in}/{sys.n_out}"
            )

    outer_in_names = [p.name for p in d.outer_inputs]
    used = set(outer_in_names)
    renames: list[dict[str, Expr]] = []
    composite_states: list[str] = []
    for box, sys in zip(d.boxes, systems):
        table: dict[str, Expr] = {}
        for name in sys.states:
            candidate = name if name not in used else f"{box.name}_{name}"
            fresh = _fresh(candidate, used)
            table[name] = Var(fresh)
            composite_states.append(fresh)
        renames.append(table)

    def source_expr(source) -> Expr:
        if source[0] == "outer":
            return Var(outer_in_names[source[1]])
        _, b, j = source
        return systems[b].expose[j].substitute(renames[b])

    field: list[Expr] = []
    for b, (box, sys) in enumerate(zip(d.boxes, systems)):
        feeds = {
            sys.inputs[k]: source_expr(d.wires[("box", b, k)]) for k in range(sys.n_in)
        }
        for e in sys.field:
            field.append(e.substitute(renames[b]).substitute(feeds))

    expose: list[Expr] = []
    for j in range(len(d.outer_outputs)):
        source = d.wires[("outer", j)]
        if source[0] == "outer":
            raise CyclicThroughOuterInput(
                f"outer output {d.outer_outputs[j].name!r} is fed by an outer input"
            )
        _, b, k = source
        expose.append(systems[b].expose[k].substitute(renames[b]))

    return OdeSystem(
        tuple(composite_states),
        tuple(outer_in_names),
        tuple(p.name for p in d.outer_outputs),
        tuple(expose),
        tuple(field),
    )


@dataclass(frozen=True)
class VectorMachine:
    """A discrete-time machine on real vectors, defined by expressions.

    ``step[k]`` gives the next value of ``states[k]`` over state and input
    variables; ``readout[k]`` exposes an output over state variables.
    """

    states: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    step: tuple[Expr, ...]
    readout: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "step", tuple(self.step))
        object.__setattr__(self, "readout", tuple(self.readout))
        if len(self.step) != len(self.states):
            raise ArityMismatch("one step expression per state required")
        if len(self.readout) != len(self.outputs):
            raise ArityMismatch("one readout expression per output required")

    def step_at(self, state: tuple[float, ...], inputs: tuple[float, ...]) -> tuple[float, ...]:
        env = dict(zip(self.states, state))
        env.update(zip(self.inputs, inputs))
        return tuple(e.eval(env) for e in self.step)

    def read(self, state: tuple[float, ...]) -> tuple[float, ...]:
        env = dict(zip(self.states, state))
        return tuple(e.eval(env) for e in self.readout)


def euler(sys: OdeSystem, h: float) -> VectorMachine:
    """Discretize: ``x' = x + h * u(x, i)``, readout unchanged."""
    if h <= 0:
        raise ValueError("step size must be positive")
    step = tuple(
        BinOp("+", Var(x), BinOp("*", Const(h), u)) for x, u in zip(sys.states, sys.field)
    )
    return VectorMachine(sys.states, sys.inputs, sys.outputs, step, sys.expose)


def act_vector_lens(vm: VectorMachine, lens: VectorLens) -> VectorMachine:
    """Lens action on a vector machine; mirrors the finite case symbolically."""
    if lens.src_out != len(vm.outputs) or lens.src_in != len(vm.inputs):
        raise InterfaceMismatch("lens domain differs from the machine interface")
    used = set(vm.states)
    new_inputs = tuple(_fresh(f"i{j}", used) for j in range(lens.tgt_in))
    out_sub = {f"o{j}": vm.readout[j] for j in range(lens.src_out)}
    in_sub = {f"i{j}": Var(new_inputs[j]) for j in range(lens.tgt_in)}
    routed = [lens.bwd[k].substitute(out_sub).substitute(in_sub) for k in range(lens.src_in)]
    feeds = dict(zip(vm.inputs, routed))
    step = tuple(e.substitute(feeds) for e in vm.step)
    readout = tuple(lens.fwd[j].substitute(out_sub) for j in range(lens.tgt_out))
    new_outputs = tuple(f"y{j}" for j in range(lens.tgt_out))
    return VectorMachine(vm.states, new_inputs, new_outputs, step, readout)


def vector_parallel(vm1: VectorMachine, vm2: VectorMachine) -> VectorMachine:
    """Disjoint union of vector machines, renaming the right block apart."""
    used = set(vm1.states) | set(vm1.inputs)
    sub: dict[str, Expr] = {}
    states2 = []
    for x in vm2.states:
        fresh = _fresh(x, used)
        sub[x] = Var(fresh)
        states2.append(fresh)
    inputs2 = []
    for x in vm2.inputs:
        fresh = _fresh(x, used)
        sub[x] = Var(fresh)
        inputs2.append(fresh)
    return VectorMachine(
        vm1.states + tuple(states2),
        vm1.inputs + tuple(inputs2),
        vm1.outputs + vm2.outputs,
        vm1.step + tuple(e.substitute(sub) for e in vm2.step),
        vm1.readout + tuple(e.substitute(sub) for e in vm2.readout),
    )


def compose_vector_via_dwd(d: DirectedWiringDiagram, machines: list[VectorMachine]) -> VectorMachine:
    """Wire vector machines: parallel product, then the routing lens."""
    lens = dwd_to_lens(d)
    if not isinstance(lens, VectorLens):
        raise InterfaceMismatch("a diagram over finite ports cannot act on vector machines")
    if not machines:
        return act_vector_lens(VectorMachine((), (), (), (), ()), lens)
    combined = machines[0]
    for vm in machines[1:]:
        combined = vector_parallel(combined, vm)
    return act_vector_lens(combined, lens)


@dataclass(frozen=True)
class RealTrace:
    """States, inputs and exposed outputs of a discrete-time simulation."""

    states: tuple[tuple[float, ...], ...]
    inputs: tuple[tuple[float, ...], ...]
    outputs: tuple[tuple[float, ...], ...]


def simulate_ode(
    sys: OdeSystem,
    h: float,
    steps: int,
    init: tuple[float, ...] | list[float],
    input_signal=None,
) -> RealTrace:
    """Iterate the Euler step; outputs are recorded at every state.

    ``input_signal`` maps a step index to the input vector (defaults to
    zeros).  Raises :class:`NonFiniteValue` with the step index when the
    state leaves the finite floats.
    """
    vm = euler(sys, h)
    return simulate_vector(vm, steps, init, input_signal)


def simulate_vector(
    vm: VectorMachine,
    steps: int,
    init: tuple[float, ...] | list[float],
    input_signal=None,
) -> RealTrace:
    if len(init) != len(vm.states):
        raise ArityMismatch(f"initial state needs {len(vm.states)} components")
    if input_signal is None:
        input_signal = lambda k: (0.0,) * len(vm.inputs)
    elif isinstance(input_signal, (list, tuple)):
        signal_list = [tuple(float(v) for v in row) for row in input_signal]
        input_signal = lambda k, rows=signal_list: rows[k]

    state = tuple(float(v) for v in init)
    states = [state]
    inputs = []
    for k in range(steps):
        i = tuple(input_signal(k))
        if len(i) != len(vm.inputs):
            raise ArityMismatch(f"input at step {k} needs {len(vm.inputs)} components")
        state = vm.step_at(state, i)
        if not all(isfinite(v) for v in state):
            raise NonFiniteValue(f"state became non-finite at step {k + 1}")
        inputs.append(i)
        states.append(state)
    outputs = tuple(vm.read(s) for s in states)
    return RealTrace(tuple(states), tuple(inputs), outputs)
