"""Petri nets, their maps and pushouts, and gluing along wiring diagrams.

An open Petri net exposes some of its species through a port map; an
undirected wiring diagram acts on a family of open nets by gluing species
that meet at a junction.  The glue is a pushout of net homomorphisms, taken
componentwise on species and transitions; transitions are never merged by
the diagram action (junctions are species-only).

Species/transition name labels are cosmetic: they are merged with a
"left wins, slash-join on clash" convention and excluded from equality,
which is decided up to isomorphism by :func:`petri_iso`.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import finset
from .errors import ArityMismatch, BoundaryMismatch, IndexOutOfRange, InvalidLeg, TypeClash
from .finset import FinFunction
from .wiring import Cospan, CospanMap


@dataclass(frozen=True)
class Multiset:
    """A finite multiset of species indices, stored sparse and sorted."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        prev = -1
        for idx, count in self.entries:
            if idx <= prev:
                raise ValueError("multiset entries must be strictly sorted by index")
            if count < 1:
                raise ValueError("multiplicities must be positive")
            prev = idx

    @staticmethod
    def of(counts: dict[int, int]) -> "Multiset":
        return Multiset(tuple(sorted((i, c) for i, c in counts.items() if c)))

    @staticmethod
    def empty() -> "Multiset":
        return Multiset(())

    def to_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def max_index(self) -> int:
        return self.entries[-1][0] if self.entries else -1

    def shift(self, offset: int) -> "Multiset":
        return Multiset(tuple((i + offset, c) for i, c in self.entries))


def multiset_push(f: FinFunction, ms: Multiset) -> Multiset:
    """Push a multiset forward along ``f``, summing counts over fibers."""
    if ms.max_index() >= f.dom:
        raise IndexOutOfRange(
            f"multiset mentions index {ms.max_index()} but the function has domain {f.dom}"
        )
    counts: dict[int, int] = {}
    for i, c in ms.entries:
        j = f.table[i]
        counts[j] = counts.get(j, 0) + c
    return Multiset.of(counts)


@dataclass(frozen=True)
class PetriNet:
    """Species, transitions, and source/target multisets per transition."""

    species: tuple[str, ...]
    transitions: tuple[str, ...]
    src: tuple[Multiset, ...]
    tgt: tuple[Multiset, ...]

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "src", tuple(self.src))
        object.__setattr__(self, "tgt", tuple(self.tgt))
        if len(self.src) != len(self.transitions) or len(self.tgt) != len(self.transitions):
            raise ValueError("need one source and one target multiset per transition")
        for ms in self.src + self.tgt:
            if ms.max_index() >= len(self.species):
                raise IndexOutOfRange("multiset mentions an unknown species")

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_transitions(self) -> int:
        return len(self.transitions)


def discrete_net(names: tuple[str, ...]) -> PetriNet:
    """A net with the given species and no transitions."""
    return PetriNet(tuple(names), (), (), ())


@dataclass(frozen=True)
class PetriMap:
    """A net homomorphism: a species map and a transition map."""

    f: FinFunction
    g: FinFunction


def identity_map(net: PetriNet) -> PetriMap:
    return PetriMap(finset.identity(net.n_species), finset.identity(net.n_transitions))


def check_petri_map(m: PetriMap, P: PetriNet, Q: PetriNet) -> bool:
    """True iff pushing sources and targets along the species map matches."""
    if m.f.dom != P.n_species or m.f.cod != Q.n_species:
        raise ArityMismatch("species map does not fit the nets")
    if m.g.dom != P.n_transitions or m.g.cod != Q.n_transitions:
        raise ArityMismatch("transition map does not fit the nets")
    for t in range(P.n_transitions):
        u = m.g.table[t]
        if multiset_push(m.f, P.src[t]) != Q.src[u]:
            return False
        if multiset_push(m.f, P.tgt[t]) != Q.tgt[u]:
            return False
    return True


def _merge_names(members: list[str], fallback: str) -> str:
    """Left wins, slash-join on clash; empty names are placeholders."""
    seen: list[str] = []
    for name in members:
        if name and name not in seen:
            seen.append(name)
    if not seen:
        return fallback
    return "/".join(seen)


def petri_pushout(
    apex: PetriNet, left: PetriMap, P: PetriNet, right: PetriMap, Q: PetriNet
) -> tuple[PetriNet, PetriMap, PetriMap]:
    """Pushout of the span ``P <-left- apex -right-> Q`` in nets.

    Species and transitions are pushed out componentwise; the glued sources
    and targets are the originals pushed along the species injection, which
    agree on identified transitions because the legs are homomorphisms.
    """
    if not check_petri_map(left, apex, P):
        raise InvalidLeg("left leg is not a Petri net map")
    if not check_petri_map(right, apex, Q):
        raise InvalidLeg("right leg is not a Petri net map")

    sp = finset.pushout(left.f, right.f)
    tr = finset.pushout(left.g, right.g)

    sp_members: list[list[str]] = [[] for _ in range(sp.apex)]
    for i in range(P.n_species):
        sp_members[sp.inj_left.table[i]].append(P.species[i])
    for i in range(Q.n_species):
        sp_members[sp.inj_right.table[i]].append(Q.species[i])
    species_names = [_merge_names(ms, f"s{cls}") for cls, ms in enumerate(sp_members)]

    tr_members: list[list[str]] = [[] for _ in range(tr.apex)]
    src: list[Multiset | None] = [None] * tr.apex
    tgt: list[Multiset | None] = [None] * tr.apex
    for t in range(P.n_transitions):
        cls = tr.inj_left.table[t]
        tr_members[cls].append(P.transitions[t])
        pushed_src = multiset_push(sp.inj_left, P.src[t])
        pushed_tgt = multiset_push(sp.inj_left, P.tgt[t])
        if src[cls] is not None and (src[cls] != pushed_src or tgt[cls] != pushed_tgt):
            raise InvalidLeg("identified transitions disagree after gluing")
        src[cls], tgt[cls] = pushed_src, pushed_tgt
    for t in range(Q.n_transitions):
        cls = tr.inj_right.table[t]
        tr_members[cls].append(Q.transitions[t])
        pushed_src = multiset_push(sp.inj_right, Q.src[t])
        pushed_tgt = multiset_push(sp.inj_right, Q.tgt[t])
        if src[cls] is not None and (src[cls] != pushed_src or tgt[cls] != pushed_tgt):
            raise InvalidLeg("identified transitions disagree after gluing")
        src[cls], tgt[cls] = pushed_src, pushed_tgt
    transition_names = [_merge_names(ms, f"t{cls}") for cls, ms in enumerate(tr_members)]

    result = PetriNet(
        tuple(species_names),
        tuple(transition_names),
        tuple(src),  # type: ignore[arg-type]
        tuple(tgt),  # type: ignore[arg-type]
    )
    return result, PetriMap(sp.inj_left, tr.inj_left), PetriMap(sp.inj_right, tr.inj_right)


@dataclass(frozen=True)
class OpenPetriNet:
    """A Petri net with an interface of ports exposing species.

    ``port_types`` optionally names a type per port, used only to check
    against a typed wiring diagram; untyped nets fit any diagram.
    """

    net: PetriNet
    port_map: FinFunction
    port_types: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.port_map.cod != self.net.n_species:
            raise ArityMismatch("port map must land in the net's species")
        if self.port_types is not None:
            object.__setattr__(self, "port_types", tuple(self.port_types))
            if len(self.port_types) != self.port_map.dom:
                raise TypeClash("one type per port required")

    @property
    def interface(self) -> int:
        return self.port_map.dom


@dataclass(frozen=True)
class OpenPetriMap:
    """A net map together with an interface map making the port square commute."""

    interface_map: FinFunction
    net_map: PetriMap


def check_open_map(m: OpenPetriMap, A: OpenPetriNet, B: OpenPetriNet) -> bool:
    if m.interface_map.dom != A.interface or m.interface_map.cod != B.interface:
        raise ArityMismatch("interface map does not fit the open nets")
    if not check_petri_map(m.net_map, A.net, B.net):
        return False
    return A.port_map.then(m.net_map.f) == m.interface_map.then(B.port_map)


def compose_open_maps(a: OpenPetriMap, b: OpenPetriMap) -> OpenPetriMap:
    return OpenPetriMap(
        a.interface_map.then(b.interface_map),
        PetriMap(a.net_map.f.then(b.net_map.f), a.net_map.g.then(b.net_map.g)),
    )


def empty_open_net() -> OpenPetriNet:
    return OpenPetriNet(discrete_net(()), finset.initial(0))


def open_parallel(a: OpenPetriNet, b: OpenPetriNet) -> OpenPetriNet:
    """Disjoint union of open nets; the interface is the coproduct of ports."""
    net = PetriNet(
        a.net.species + b.net.species,
        a.net.transitions + b.net.transitions,
        a.net.src + tuple(ms.shift(a.net.n_species) for ms in b.net.src),
        a.net.tgt + tuple(ms.shift(a.net.n_species) for ms in b.net.tgt),
    )
    port_map = finset.coproduct([a.port_map, b.port_map])
    types = None
    if a.port_types is not None and b.port_types is not None:
        types = a.port_types + b.port_types
    return OpenPetriNet(net, port_map, types)


def uwd_apply(
    uwd: Cospan,
    systems: list[OpenPetriNet] | tuple[OpenPetriNet, ...],
    require_mono_right: bool = False,
) -> OpenPetriNet:
    """Glue open nets along the junctions of an undirected wiring diagram.

    The inner boundary of ``uwd`` must be the concatenation of the systems'
    interfaces (in argument order).  Junctions become species; every port's
    species is identified with its junction; the outer boundary becomes the
    composite's interface.
    """
    blocks = [s.interface for s in systems]
    if uwd.left.dom != sum(blocks):
        raise BoundaryMismatch(
            f"diagram expects {uwd.left.dom} inner ports, systems provide {sum(blocks)}"
        )
    if require_mono_right and not uwd.right_leg_is_mono():
        raise BoundaryMismatch("diagram's outer leg is not a monomorphism")
    if uwd.junction_types is not None:
        port_types: list[str] | None = []
        for s in systems:
            if s.port_types is None:
                port_types = None
                break
            port_types.extend(s.port_types)
        if port_types is not None and tuple(port_types) != uwd.left_types():
            raise TypeClash("system port types do not match the diagram's inner boundary")

    combined = empty_open_net()
    for s in systems:
        combined = open_parallel(combined, s)

    junctions = discrete_net(tuple("" for _ in range(uwd.apex)))
    ports = discrete_net(tuple("" for _ in range(combined.interface)))
    to_systems = PetriMap(combined.port_map, finset.initial(combined.net.n_transitions))
    to_junctions = PetriMap(uwd.left, finset.initial(0))
    glued, _, inj_junc = petri_pushout(ports, to_systems, combined.net, to_junctions, junctions)

    return OpenPetriNet(glued, uwd.right.then(inj_junc.f), uwd.right_types())


def composite_species_injections(
    uwd: Cospan, systems: list[OpenPetriNet]
) -> tuple[FinFunction, FinFunction]:
    """Species injections (from stacked systems, from junctions) of a composite."""
    combined = empty_open_net()
    for s in systems:
        combined = open_parallel(combined, s)
    sp = finset.pushout(combined.port_map, uwd.left)
    return sp.inj_left, sp.inj_right


def induced_composite_map(
    sq: CospanMap,
    uwd_src: Cospan,
    uwd_tgt: Cospan,
    component_maps: list[OpenPetriMap],
    systems_src: list[OpenPetriNet],
    systems_tgt: list[OpenPetriNet],
) -> OpenPetriMap:
    """The composite-to-composite map induced by componentwise system maps
    lying over an interaction map ``sq``."""
    src_sys, src_junc = composite_species_injections(uwd_src, systems_src)
    tgt_sys, tgt_junc = composite_species_injections(uwd_tgt, systems_tgt)

    f_blocks = finset.coproduct([m.net_map.f for m in component_maps])
    g_blocks = finset.coproduct([m.net_map.g for m in component_maps])

    table = [0] * src_sys.cod
    for i in range(src_sys.dom):
        table[src_sys.table[i]] = tgt_sys.table[f_blocks.table[i]]
    for j in range(src_junc.dom):
        table[src_junc.table[j]] = tgt_junc.table[sq.j.table[j]]
    f = FinFunction(src_sys.cod, tgt_sys.cod, tuple(table))
    return OpenPetriMap(sq.n, PetriMap(f, g_blocks))


def _species_signature(net: PetriNet, s: int) -> tuple:
    uses = []
    for t in range(net.n_transitions):
        src_c = dict(net.src[t].entries).get(s, 0)
        tgt_c = dict(net.tgt[t].entries).get(s, 0)
        if src_c or tgt_c:
            uses.append((src_c, tgt_c))
    return tuple(sorted(uses))


def _transition_signature(net: PetriNet, t: int) -> tuple:
    return (
        tuple(sorted(c for _, c in net.src[t].entries)),
        tuple(sorted(c for _, c in net.tgt[t].entries)),
    )


def _match_transitions(P: PetriNet, Q: PetriNet, f: FinFunction) -> FinFunction | None:
    """A transition bijection compatible with the species bijection ``f``."""
    g_table: list[int] = []
    used: set[int] = set()

    def backtrack(t: int) -> bool:
        if t == P.n_transitions:
            return True
        want_src = multiset_push(f, P.src[t])
        want_tgt = multiset_push(f, P.tgt[t])
        for u in range(Q.n_transitions):
            if u not in used and Q.src[u] == want_src and Q.tgt[u] == want_tgt:
                used.add(u)
                g_table.append(u)
                if backtrack(t + 1):
                    return True
                used.remove(u)
                g_table.pop()
        return False

    if backtrack(0):
        return FinFunction(P.n_transitions, Q.n_transitions, tuple(g_table))
    return None


def petri_iso(P: PetriNet, Q: PetriNet, pin: dict[int, int] | None = None) -> PetriMap | None:
    """A bijective net map ``P -> Q`` if one exists, else None.

    ``pin`` forces chosen species assignments (used to respect port maps).
    Backtracking over species seeded by degree/multiset signatures;
    exponential in the worst case but fine at desk scale.
    """
    if P.n_species != Q.n_species or P.n_transitions != Q.n_transitions:
        return None
    p_sig = [_species_signature(P, s) for s in range(P.n_species)]
    q_sig = [_species_signature(Q, s) for s in range(Q.n_species)]
    if sorted(p_sig) != sorted(q_sig):
        return None
    if sorted(_transition_signature(P, t) for t in range(P.n_transitions)) != sorted(
        _transition_signature(Q, t) for t in range(Q.n_transitions)
    ):
        return None

    pin = dict(pin or {})
    if len(set(pin.values())) != len(pin):
        return None
    for s1, s2 in pin.items():
        if p_sig[s1] != q_sig[s2]:
            return None

    candidates = [
        [s2 for s2 in range(Q.n_species) if q_sig[s2] == p_sig[s1]]
        for s1 in range(P.n_species)
    ]
    free = [s for s in range(P.n_species) if s not in pin]
    order = sorted(free, key=lambda s: len(candidates[s]))
    assignment = dict(pin)
    used = set(pin.values())

    def backtrack(k: int) -> PetriMap | None:
        if k == len(order):
            f = FinFunction(
                P.n_species, Q.n_species, tuple(assignment[s] for s in range(P.n_species))
            )
            g = _match_transitions(P, Q, f)
            if g is not None:
                return PetriMap(f, g)
            return None
        s1 = order[k]
        for s2 in candidates[s1]:
            if s2 in used:
                continue
            assignment[s1] = s2
            used.add(s2)
            found = backtrack(k + 1)
            if found is not None:
                return found
            used.remove(s2)
            del assignment[s1]
        return None

    return backtrack(0)


def open_petri_iso(A: OpenPetriNet, B: OpenPetriNet) -> PetriMap | None:
    """A net iso that is the identity on the interface (matches port maps)."""
    if A.interface != B.interface:
        return None
    pin: dict[int, int] = {}
    for p in range(A.interface):
        s1, s2 = A.port_map.table[p], B.port_map.table[p]
        if pin.get(s1, s2) != s2:
            return None
        pin[s1] = s2
    return petri_iso(A.net, B.net, pin=pin)
