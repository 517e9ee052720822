"""Interfaces, lenses, charts, and directed wiring diagrams.

A lens between interfaces ``{I1/O1} -> {I2/O2}`` is a forward map on outputs
together with a backward map on inputs parameterized by the source output.
A chart runs both maps forward and is the right notion of interface map for
system maps.  Lenses and charts mirror the cospan/span pair of
:mod:`wirekit.wiring`: the same two-class composition contract, instantiated
in the simple fibration instead of finite sets.

Directed wiring diagrams are presented combinatorially (boxes, ports, wires)
and elaborate to lenses whose forward/backward maps are pure routing: the
forward map reads each outer output off the inner output that feeds it, and
the backward map routes each inner input from its source.  Wires may copy
(an output may feed many sinks) and discard (an output may feed none), and
cycles between boxes are legal because routing never evaluates a box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    CyclicThroughOuterInput,
    DanglingPort,
    InterfaceMismatch,
    MultipleFeeds,
    TypeClash,
)
from .expr import Expr, Var


@dataclass(frozen=True)
class FiniteSpace:
    """An enumerated value space; values are indices with display names."""

    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def size(self) -> int:
        return len(self.values)

    def index(self, name: str) -> int:
        try:
            return self.values.index(name)
        except ValueError:
            raise KeyError(f"value {name!r} not in space {self.values}") from None


UNIT_SPACE = FiniteSpace(("",))


def space_product(a: FiniteSpace, b: FiniteSpace) -> FiniteSpace:
    """Lexicographic product, first factor major; names concatenate."""
    return FiniteSpace(tuple(x + y for x in a.values for y in b.values))


def pair_index(a: FiniteSpace, b: FiniteSpace, ia: int, ib: int) -> int:
    return ia * b.size + ib


def unpair_index(a: FiniteSpace, b: FiniteSpace, i: int) -> tuple[int, int]:
    return divmod(i, b.size)


@dataclass(frozen=True)
class VectorSpace:
    """The real vector space of a given dimension."""

    dim: int


@dataclass(frozen=True)
class Interface:
    """An output space over an input space (what a system exposes/accepts)."""

    output_space: FiniteSpace | VectorSpace
    input_space: FiniteSpace | VectorSpace


@dataclass(frozen=True)
class FiniteLens:
    """A lens between finite interfaces, stored as dense tables.

    ``fwd[o1]`` is the target output; ``bwd[o1 * |I2| + i2]`` is the source
    input (source-output-major lexicographic order).
    """

    src: Interface
    tgt: Interface
    fwd: tuple[int, ...]
    bwd: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "fwd", tuple(self.fwd))
        object.__setattr__(self, "bwd", tuple(self.bwd))
        o1, i1 = self.src.output_space, self.src.input_space
        o2, i2 = self.tgt.output_space, self.tgt.input_space
        if len(self.fwd) != o1.size or any(not 0 <= v < o2.size for v in self.fwd):
            raise InterfaceMismatch("forward table does not fit the interfaces")
        if len(self.bwd) != o1.size * i2.size or any(
            not 0 <= v < i1.size for v in self.bwd
        ):
            raise InterfaceMismatch("backward table does not fit the interfaces")

    def apply_fwd(self, o1: int) -> int:
        return self.fwd[o1]

    def apply_bwd(self, o1: int, i2: int) -> int:
        return self.bwd[o1 * self.tgt.input_space.size + i2]

    def then(self, other: "FiniteLens") -> "FiniteLens":
        return lens_compose(self, other)


def identity_lens(interface: Interface) -> FiniteLens:
    o, i = interface.output_space, interface.input_space
    fwd = tuple(range(o.size))
    bwd = tuple(i2 for _ in range(o.size) for i2 in range(i.size))
    return FiniteLens(interface, interface, fwd, bwd)


def lens_compose(l1: FiniteLens, l2: FiniteLens) -> FiniteLens:
    """Sequential composite: forwards compose, backwards thread through."""
    if l1.tgt != l2.src:
        raise InterfaceMismatch("middle interfaces differ")
    o1 = l1.src.output_space
    i3 = l2.tgt.input_space
    fwd = tuple(l2.fwd[l1.fwd[o]] for o in range(o1.size))
    bwd = tuple(
        l1.apply_bwd(o, l2.apply_bwd(l1.fwd[o], i))
        for o in range(o1.size)
        for i in range(i3.size)
    )
    return FiniteLens(l1.src, l2.tgt, fwd, bwd)


def product_interface(a: Interface, b: Interface) -> Interface:
    return Interface(
        space_product(a.output_space, b.output_space),
        space_product(a.input_space, b.input_space),
    )


def lens_parallel(l1: FiniteLens, l2: FiniteLens) -> FiniteLens:
    """Side-by-side product; backward arguments interleave per factor."""
    src = product_interface(l1.src, l2.src)
    tgt = product_interface(l1.tgt, l2.tgt)
    ob1, ob2 = l1.src.output_space, l2.src.output_space
    ib1, ib2 = l1.src.input_space, l2.src.input_space
    ot1, ot2 = l1.tgt.output_space, l2.tgt.output_space
    it1, it2 = l1.tgt.input_space, l2.tgt.input_space

    fwd = []
    bwd = []
    for oa in range(ob1.size):
        for ob in range(ob2.size):
            fwd.append(pair_index(ot1, ot2, l1.fwd[oa], l2.fwd[ob]))
            for ia in range(it1.size):
                for ib in range(it2.size):
                    bwd.append(
                        pair_index(ib1, ib2, l1.apply_bwd(oa, ia), l2.apply_bwd(ob, ib))
                    )
    return FiniteLens(src, tgt, tuple(fwd), tuple(bwd))


@dataclass(frozen=True)
class Chart:
    """An interface map running forward on both sides.

    ``fwd[o1]`` is the target output; ``push[o1 * |I1| + i1]`` is the target
    input.  Construction is deliberately lenient — use :func:`check_chart`
    to validate, so malformed charts can be represented and reported.
    """

    src: Interface
    tgt: Interface
    fwd: tuple[int, ...]
    push: tuple[int, ...]

    def apply_fwd(self, o1: int) -> int:
        return self.fwd[o1]

    def apply_push(self, o1: int, i1: int) -> int:
        return self.push[o1 * self.src.input_space.size + i1]


def identity_chart(interface: Interface) -> Chart:
    o, i = interface.output_space, interface.input_space
    return Chart(
        interface,
        interface,
        tuple(range(o.size)),
        tuple(i1 for _ in range(o.size) for i1 in range(i.size)),
    )


def chart_problems(c: Chart) -> list[str]:
    """Totality and arity violations, one message per offending entry."""
    problems = []
    o1, i1 = c.src.output_space, c.src.input_space
    o2, i2 = c.tgt.output_space, c.tgt.input_space
    if len(c.fwd) != o1.size:
        problems.append(f"forward table has {len(c.fwd)} rows, expected {o1.size}")
    if len(c.push) != o1.size * i1.size:
        problems.append(f"input table has {len(c.push)} rows, expected {o1.size * i1.size}")
    for k, v in enumerate(c.fwd):
        if not 0 <= v < o2.size:
            problems.append(f"forward entry {k} = {v} outside target outputs")
    for k, v in enumerate(c.push):
        if not 0 <= v < i2.size:
            problems.append(f"input entry {k} = {v} outside target inputs")
    return problems


def check_chart(c: Chart) -> bool:
    return not chart_problems(c)


@dataclass(frozen=True)
class VectorLens:
    """A lens between real-vector interfaces, given by expression vectors.

    Forward expressions use variables ``o0..`` (source outputs); backward
    expressions additionally use ``i0..`` (target inputs).
    """

    src_out: int
    src_in: int
    tgt_out: int
    tgt_in: int
    fwd: tuple[Expr, ...]
    bwd: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "fwd", tuple(self.fwd))
        object.__setattr__(self, "bwd", tuple(self.bwd))
        if len(self.fwd) != self.tgt_out or len(self.bwd) != self.src_in:
            raise InterfaceMismatch("expression vectors do not fit the interfaces")

    def then(self, other: "VectorLens") -> "VectorLens":
        if (self.tgt_out, self.tgt_in) != (other.src_out, other.src_in):
            raise InterfaceMismatch("middle interfaces differ")
        mid_out = {f"o{j}": self.fwd[j] for j in range(self.tgt_out)}
        fwd = tuple(e.substitute(mid_out) for e in other.fwd)
        mid_in = {f"i{j}": other.bwd[j].substitute(mid_out) for j in range(self.tgt_in)}
        bwd = tuple(e.substitute(mid_in) for e in self.bwd)
        return VectorLens(self.src_out, self.src_in, other.tgt_out, other.tgt_in, fwd, bwd)


def identity_vector_lens(n_out: int, n_in: int) -> VectorLens:
    return VectorLens(
        n_out,
        n_in,
        n_out,
        n_in,
        tuple(Var(f"o{j}") for j in range(n_out)),
        tuple(Var(f"i{j}") for j in range(n_in)),
    )


def vector_lens_parallel(l1: VectorLens, l2: VectorLens) -> VectorLens:
    shift = {f"o{j}": Var(f"o{j + l1.src_out}") for j in range(l2.src_out)}
    shift.update({f"i{j}": Var(f"i{j + l1.tgt_in}") for j in range(l2.tgt_in)})
    fwd = l1.fwd + tuple(e.substitute(shift) for e in l2.fwd)
    bwd = l1.bwd + tuple(e.substitute(shift) for e in l2.bwd)
    return VectorLens(
        l1.src_out + l2.src_out,
        l1.src_in + l2.src_in,
        l1.tgt_out + l2.tgt_out,
        l1.tgt_in + l2.tgt_in,
        fwd,
        bwd,
    )


REAL = "real"

# wire endpoints: ("box", box_index, port_index) or ("outer", port_index)
Endpoint = tuple


@dataclass(frozen=True)
class Port:
    name: str
    type: str


@dataclass(frozen=True)
class Box:
    name: str
    inputs: tuple[Port, ...]
    outputs: tuple[Port, ...]


@dataclass
class DirectedWiringDiagram:
    """Boxes with typed ports, an outer boundary, and a wiring.

    ``wires`` maps each sink (inner input or outer output) to its unique
    source (inner output or outer input); :class:`MultipleFeeds` is raised
    by :meth:`add_wire` on a second feed.  ``types`` maps a type name to its
    value names, or to ``None`` for the real line.
    """

    boxes: list[Box] = field(default_factory=list)
    outer_inputs: list[Port] = field(default_factory=list)
    outer_outputs: list[Port] = field(default_factory=list)
    wires: dict[Endpoint, Endpoint] = field(default_factory=dict)
    types: dict[str, tuple[str, ...] | None] = field(default_factory=dict)

    def add_wire(self, source: Endpoint, sink: Endpoint) -> None:
        if sink in self.wires:
            raise MultipleFeeds(f"sink {sink} is already fed")
        self.wires[sink] = source

    def type_of_source(self, source: Endpoint) -> str:
        if source[0] == "outer":
            return self.outer_inputs[source[1]].type
        _, b, j = source
        return self.boxes[b].outputs[j].type

    def type_of_sink(self, sink: Endpoint) -> str:
        if sink[0] == "outer":
            return self.outer_outputs[sink[1]].type
        _, b, k = sink
        return self.boxes[b].inputs[k].type

    def sinks(self) -> list[Endpoint]:
        out: list[Endpoint] = []
        for b, box in enumerate(self.boxes):
            out.extend(("box", b, k) for k in range(len(box.inputs)))
        out.extend(("outer", j) for j in range(len(self.outer_outputs)))
        return out

    def validate(self) -> None:
        """Raise if a required port dangles, a wire is ill-typed, or a type
        is undeclared."""
        for port in self._all_ports():
            if port.type != REAL and port.type not in self.types:
                raise TypeClash(f"port {port.name!r} has undeclared type {port.type!r}")
        for sink in self.sinks():
            if sink not in self.wires:
                raise DanglingPort(f"sink {sink} has no feeding wire")
            source = self.wires[sink]
            self._check_endpoint(source)
            if self.type_of_source(source) != self.type_of_sink(sink):
                raise TypeClash(
                    f"wire {source} -> {sink} connects type "
                    f"{self.type_of_source(source)!r} to {self.type_of_sink(sink)!r}"
                )

    def _check_endpoint(self, source: Endpoint) -> None:
        if source[0] == "outer":
            if not 0 <= source[1] < len(self.outer_inputs):
                raise DanglingPort(f"unknown outer input {source[1]}")
        else:
            _, b, j = source
            if not 0 <= b < len(self.boxes) or not 0 <= j < len(self.boxes[b].outputs):
                raise DanglingPort(f"unknown box output {source}")

    def _all_ports(self):
        for box in self.boxes:
            yield from box.inputs
            yield from box.outputs
        yield from self.outer_inputs
        yield from self.outer_outputs

    def is_vector(self) -> bool:
        ports = list(self._all_ports())
        reals = [p for p in ports if p.type == REAL]
        if reals and len(reals) != len(ports):
            raise TypeClash("diagram mixes real and finite port types")
        return bool(reals) or (not ports and not self.types)

    def inner_output_index(self) -> dict[Endpoint, int]:
        index = {}
        for b, box in enumerate(self.boxes):
            for j in range(len(box.outputs)):
                index[("box", b, j)] = len(index)
        return index

    def inner_input_index(self) -> dict[Endpoint, int]:
        index = {}
        for b, box in enumerate(self.boxes):
            for k in range(len(box.inputs)):
                index[("box", b, k)] = len(index)
        return index


def _space_of(d: DirectedWiringDiagram, type_name: str) -> FiniteSpace:
    values = d.types[type_name]
    if values is None:
        raise TypeClash(f"type {type_name!r} is not finite")
    return FiniteSpace(values)


def _product_space(spaces: list[FiniteSpace]) -> FiniteSpace:
    acc = UNIT_SPACE
    for s in spaces:
        acc = space_product(acc, s)
    return acc


def _decode(sizes: list[int], flat: int) -> list[int]:
    out = [0] * len(sizes)
    for k in range(len(sizes) - 1, -1, -1):
        flat, out[k] = divmod(flat, sizes[k])
    return out


def _encode(sizes: list[int], coords: list[int]) -> int:
    flat = 0
    for size, c in zip(sizes, coords):
        flat = flat * size + c
    return flat


def dwd_to_lens(d: DirectedWiringDiagram) -> FiniteLens | VectorLens:
    """Elaborate a diagram into the routing lens from the product of its
    inner interfaces to its outer interface.

    An outer output fed by an outer input has no lens realization (the
    forward map cannot see inputs), so such diagrams are rejected.
    """
    d.validate()
    for j in range(len(d.outer_outputs)):
        if d.wires[("outer", j)][0] == "outer":
            raise CyclicThroughOuterInput(
                f"outer output {d.outer_outputs[j].name!r} is fed by an outer input; "
                "outputs must be readable without input values"
            )
    if d.is_vector():
        return _dwd_to_vector_lens(d)
    return _dwd_to_finite_lens(d)


def _dwd_to_vector_lens(d: DirectedWiringDiagram) -> VectorLens:
    out_index = d.inner_output_index()

    def source_expr(source: Endpoint) -> Expr:
        if source[0] == "outer":
            return Var(f"i{source[1]}")
        return Var(f"o{out_index[source]}")

    fwd = tuple(Var(f"o{out_index[d.wires[('outer', j)]]}") for j in range(len(d.outer_outputs)))
    bwd = tuple(
        source_expr(d.wires[sink])
        for sink, _ in sorted(d.inner_input_index().items(), key=lambda kv: kv[1])
    )
    return VectorLens(
        len(out_index),
        len(d.inner_input_index()),
        len(d.outer_outputs),
        len(d.outer_inputs),
        fwd,
        bwd,
    )


def _dwd_to_finite_lens(d: DirectedWiringDiagram) -> FiniteLens:
    out_ports = [
        ("box", b, j) for b, box in enumerate(d.boxes) for j in range(len(box.outputs))
    ]
    in_ports = [
        ("box", b, k) for b, box in enumerate(d.boxes) for k in range(len(box.inputs))
    ]
    out_sizes = [_space_of(d, d.type_of_source(p)).size for p in out_ports]
    in_sizes = [_space_of(d, d.type_of_sink(p)).size for p in in_ports]
    outer_in_sizes = [_space_of(d, p.type).size for p in d.outer_inputs]
    outer_out_sizes = [_space_of(d, p.type).size for p in d.outer_outputs]

    src = Interface(
        _product_space([_space_of(d, d.type_of_source(p)) for p in out_ports]),
        _product_space([_space_of(d, d.type_of_sink(p)) for p in in_ports]),
    )
    tgt = Interface(
        _product_space([_space_of(d, p.type) for p in d.outer_outputs]),
        _product_space([_space_of(d, p.type) for p in d.outer_inputs]),
    )
    out_pos = {p: k for k, p in enumerate(out_ports)}
    in_pos = {p: k for k, p in enumerate(in_ports)}

    fwd = []
    bwd = []
    for o_flat in range(src.output_space.size):
        o_coords = _decode(out_sizes, o_flat)
        outer_out = [o_coords[out_pos[d.wires[("outer", j)]]] for j in range(len(d.outer_outputs))]
        fwd.append(_encode(outer_out_sizes, outer_out))
        for i_flat in range(tgt.input_space.size):
            i_coords = _decode(outer_in_sizes, i_flat)
            inner_in = []
            for sink in in_ports:
                source = d.wires[sink]
                if source[0] == "outer":
                    inner_in.append(i_coords[source[1]])
                else:
                    inner_in.append(o_coords[out_pos[source]])
            bwd.append(_encode(in_sizes, inner_in))
    return FiniteLens(src, tgt, tuple(fwd), tuple(bwd))
