"""Cospans and spans of finite sets: interaction patterns between interfaces.

A cospan ``M -> J <- N`` is an undirected wiring diagram: the left leg sends
inner ports to junctions, the right leg sends outer ports to junctions.
Cospans compose by pushout over the shared boundary; spans compose by
pullback.  Both instantiate the same contract — two classes of legs closed
under composition, plus the (co)limit that splices them — which is why this
module and :mod:`wirekit.lens` mirror each other; the generic calculus itself
is not exposed.

Composites come back in canonical-label normal form, so equality of
interactions is decided "up to iso" by :func:`iso_cospans` rather than by raw
field comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import finset
from .errors import BoundaryMismatch, ArityMismatch, TypeClash
from .finset import FinFunction


@dataclass(frozen=True)
class Cospan:
    """A cospan ``left: M -> J``, ``right: N -> J``.

    ``junction_types`` optionally names the type of each junction; port types
    on either boundary are induced along the legs, so the typing invariant
    (legs commute with typing) holds by construction.
    """

    left: FinFunction
    right: FinFunction
    junction_types: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.left.cod != self.right.cod:
            raise BoundaryMismatch(
                f"cospan legs must share an apex: {self.left.cod} != {self.right.cod}"
            )
        if self.junction_types is not None:
            object.__setattr__(self, "junction_types", tuple(self.junction_types))
            if len(self.junction_types) != self.apex:
                raise TypeClash("one type per junction required")

    @property
    def apex(self) -> int:
        return self.left.cod

    @property
    def inner_ports(self) -> int:
        return self.left.dom

    @property
    def outer_ports(self) -> int:
        return self.right.dom

    def left_types(self) -> tuple[str, ...] | None:
        if self.junction_types is None:
            return None
        return tuple(self.junction_types[j] for j in self.left.table)

    def right_types(self) -> tuple[str, ...] | None:
        if self.junction_types is None:
            return None
        return tuple(self.junction_types[j] for j in self.right.table)

    def right_leg_is_mono(self) -> bool:
        return self.right.is_mono


def identity_cospan(n: int, types: tuple[str, ...] | None = None) -> Cospan:
    return Cospan(finset.identity(n), finset.identity(n), types)


def compose_cospans(c1: Cospan, c2: Cospan) -> Cospan:
    """Splice ``M -> J <- N`` and ``N -> J' <- K`` along N by pushout."""
    if c1.right.dom != c2.left.dom:
        raise BoundaryMismatch(
            f"shared boundary differs: {c1.right.dom} != {c2.left.dom}"
        )
    t1, t2 = c1.right_types(), c2.left_types()
    if t1 is not None and t2 is not None and t1 != t2:
        raise TypeClash(f"boundary port types differ: {t1} vs {t2}")

    po = finset.pushout(c1.right, c2.left)
    types = _merge_apex_types(c1, c2, po)
    return Cospan(c1.left.then(po.inj_left), c2.right.then(po.inj_right), types)


def _merge_apex_types(c1: Cospan, c2: Cospan, po: finset.PushoutResult) -> tuple[str, ...] | None:
    if c1.junction_types is None or c2.junction_types is None:
        return None
    types: list[str | None] = [None] * po.apex
    for j, q in enumerate(po.inj_left.table):
        types[q] = c1.junction_types[j]
    for j, q in enumerate(po.inj_right.table):
        prev = types[q]
        if prev is not None and prev != c2.junction_types[j]:
            raise TypeClash(
                f"junctions of types {prev!r} and {c2.junction_types[j]!r} were identified"
            )
        types[q] = c2.junction_types[j]
    return tuple(t for t in types)  # type: ignore[misc]


def parallel_cospans(c1: Cospan, c2: Cospan) -> Cospan:
    """Place two cospans side by side (blockwise coproduct of everything)."""
    left = finset.coproduct([c1.left, c2.left])
    right = finset.coproduct([c1.right, c2.right])
    types = None
    if c1.junction_types is not None and c2.junction_types is not None:
        types = c1.junction_types + c2.junction_types
    elif (c1.junction_types is None) != (c2.junction_types is None):
        raise TypeClash("cannot take the parallel product of a typed and an untyped cospan")
    return Cospan(left, right, types)


@dataclass(frozen=True)
class CospanMap:
    """A square between cospans: maps on both boundaries and on junctions."""

    m: FinFunction
    n: FinFunction
    j: FinFunction


def check_cospan_map(sq: CospanMap, src: Cospan, tgt: Cospan) -> bool:
    """True iff both squares of the map commute pointwise."""
    if sq.m.dom != src.inner_ports or sq.m.cod != tgt.inner_ports:
        raise ArityMismatch("boundary map m does not match the inner boundaries")
    if sq.n.dom != src.outer_ports or sq.n.cod != tgt.outer_ports:
        raise ArityMismatch("boundary map n does not match the outer boundaries")
    if sq.j.dom != src.apex or sq.j.cod != tgt.apex:
        raise ArityMismatch("junction map does not match the apexes")
    left_ok = src.left.then(sq.j) == sq.m.then(tgt.left)
    right_ok = src.right.then(sq.j) == sq.n.then(tgt.right)
    return left_ok and right_ok


def compose_cospan_maps(a: CospanMap, b: CospanMap) -> CospanMap:
    return CospanMap(a.m.then(b.m), a.n.then(b.n), a.j.then(b.j))


@dataclass(frozen=True)
class Span:
    """A span ``left: X -> A``, ``right: X -> B`` (read as ``A <- X -> B``)."""

    left: FinFunction
    right: FinFunction

    def __post_init__(self):
        if self.left.dom != self.right.dom:
            raise BoundaryMismatch(
                f"span legs must share a domain: {self.left.dom} != {self.right.dom}"
            )

    @property
    def apex(self) -> int:
        return self.left.dom


def identity_span(n: int) -> Span:
    return Span(finset.identity(n), finset.identity(n))


def compose_spans(s1: Span, s2: Span) -> Span:
    """Splice ``A <- X -> B`` and ``B <- Y -> C`` over B by pullback."""
    if s1.right.cod != s2.left.cod:
        raise BoundaryMismatch(
            f"middle objects differ: {s1.right.cod} != {s2.left.cod}"
        )
    pb = finset.pullback(s1.right, s2.left)
    return Span(pb.proj_left.then(s1.left), pb.proj_right.then(s2.right))


def span_relation(s: Span) -> set[tuple[int, int]]:
    """The binary relation ``{(left(x), right(x))}`` induced by a span."""
    return {(s.left.table[x], s.right.table[x]) for x in range(s.apex)}


def iso_cospans(c1: Cospan, c2: Cospan) -> FinFunction | None:
    """Find a junction bijection commuting with both legs, or None.

    The legs force the bijection on their images; junctions hit by neither
    leg are unconstrained and are matched by type in ascending order.
    """
    if c1.inner_ports != c2.inner_ports or c1.outer_ports != c2.outer_ports:
        return None
    if c1.apex != c2.apex:
        return None

    phi: dict[int, int] = {}
    used: set[int] = set()

    def assign(j1: int, j2: int) -> bool:
        if j1 in phi:
            return phi[j1] == j2
        if j2 in used:
            return False
        if c1.junction_types is not None and c2.junction_types is not None:
            if c1.junction_types[j1] != c2.junction_types[j2]:
                return False
        phi[j1] = j2
        used.add(j2)
        return True

    for p in range(c1.inner_ports):
        if not assign(c1.left.table[p], c2.left.table[p]):
            return None
    for p in range(c1.outer_ports):
        if not assign(c1.right.table[p], c2.right.table[p]):
            return None

    free1 = [j for j in range(c1.apex) if j not in phi]
    free2 = [j for j in range(c2.apex) if j not in used]
    if c1.junction_types is None or c2.junction_types is None:
        for j1, j2 in zip(free1, free2):
            phi[j1] = j2
    else:
        by_type: dict[str, list[int]] = {}
        for j2 in free2:
            by_type.setdefault(c2.junction_types[j2], []).append(j2)
        for j1 in free1:
            bucket = by_type.get(c1.junction_types[j1])
            if not bucket:
                return None
            phi[j1] = bucket.pop(0)

    return FinFunction(c1.apex, c2.apex, tuple(phi[j] for j in range(c1.apex)))
