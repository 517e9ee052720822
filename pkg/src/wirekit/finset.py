"""Finite sets and functions: the kernel every other module builds on.

A finite set is identified with the initial segment ``{0, .., n-1}`` of the
naturals; a function between two of them is a lookup table.  The module
provides the three (co)limit constructions the rest of the library needs:
coproducts, pushouts (quotient by a union-find coequalizer) and pullbacks.

All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CodomainMismatch, DomainMismatch, TypeClash


@dataclass(frozen=True)
class FinFunction:
    """A total function ``{0..dom-1} -> {0..cod-1}`` given by its table."""

    dom: int
    cod: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if self.dom < 0 or self.cod < 0:
            raise ValueError("negative set size")
        if len(self.table) != self.dom:
            raise ValueError(f"table length {len(self.table)} != dom {self.dom}")
        for i, v in enumerate(self.table):
            if not 0 <= v < self.cod:
                raise ValueError(f"table[{i}] = {v} not below cod {self.cod}")

    def __call__(self, i: int) -> int:
        return self.table[i]

    def then(self, other: "FinFunction") -> "FinFunction":
        return compose(self, other)

    @property
    def is_identity(self) -> bool:
        return self.dom == self.cod and all(v == i for i, v in enumerate(self.table))

    @property
    def is_mono(self) -> bool:
        return len(set(self.table)) == self.dom

    @property
    def is_epi(self) -> bool:
        return len(set(self.table)) == self.cod

    @property
    def is_iso(self) -> bool:
        return self.dom == self.cod and self.is_mono

    def inverse(self) -> "FinFunction | None":
        """The inverse function if the table is a bijection, else None."""
        if not self.is_iso:
            return None
        inv = [0] * self.cod
        for i, v in enumerate(self.table):
            inv[v] = i
        return FinFunction(self.cod, self.dom, tuple(inv))

    def image(self) -> set[int]:
        return set(self.table)

    def to_json(self) -> dict:
        return {"dom": self.dom, "cod": self.cod, "table": list(self.table)}

    @staticmethod
    def from_json(data: dict) -> "FinFunction":
        return FinFunction(int(data["dom"]), int(data["cod"]), tuple(data["table"]))


def identity(n: int) -> FinFunction:
    return FinFunction(n, n, tuple(range(n)))


def constant(dom: int, cod: int, value: int) -> FinFunction:
    return FinFunction(dom, cod, (value,) * dom)


def initial(cod: int) -> FinFunction:
    """The unique map out of the empty set."""
    return FinFunction(0, cod, ())


def compose(f: FinFunction, g: FinFunction) -> FinFunction:
    """Diagrammatic composite: first ``f``, then ``g``."""
    if f.cod != g.dom:
        raise DomainMismatch(f"cannot compose: f.cod = {f.cod} but g.dom = {g.dom}")
    return FinFunction(f.dom, g.cod, tuple(g.table[v] for v in f.table))


def coproduct(fs: list[FinFunction] | tuple[FinFunction, ...]) -> FinFunction:
    """Blockwise disjoint union of functions, with canonical offsets.

    The i-th block of the domain maps into the i-th block of the codomain;
    an empty list yields the unique map ``0 -> 0``.
    """
    table: list[int] = []
    cod_offset = 0
    for f in fs:
        table.extend(v + cod_offset for v in f.table)
        cod_offset += f.cod
    return FinFunction(sum(f.dom for f in fs), cod_offset, tuple(table))


def coproduct_injections(sizes: list[int]) -> list[FinFunction]:
    """Canonical injections ``A_i -> A_0 + .. + A_k`` for the given sizes."""
    total = sum(sizes)
    out = []
    offset = 0
    for n in sizes:
        out.append(FinFunction(n, total, tuple(range(offset, offset + n))))
        offset += n
    return out


class _UnionFind:
    """Union-find with path compression over ``{0..n-1}``."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


@dataclass(frozen=True)
class PushoutResult:
    """Apex and injections of a pushout ``B -> apex <- C``.

    The quotient classes are labelled canonically: classes are numbered in
    ascending order of their smallest member of ``B + C`` (B block first), so
    equal inputs always produce bit-identical output.
    """

    apex: int
    inj_left: FinFunction
    inj_right: FinFunction


def pushout(f: FinFunction, g: FinFunction) -> PushoutResult:
    """Pushout of the span ``B <-f- A -g-> C``.

    The apex is ``(B + C) / ~`` where ``f(a) ~ g(a)`` for every ``a``; the
    quotient is computed by union-find.
    """
    if f.dom != g.dom:
        raise DomainMismatch(f"span legs must share a domain: {f.dom} != {g.dom}")
    n_left, n_right = f.cod, g.cod
    uf = _UnionFind(n_left + n_right)
    for a in range(f.dom):
        uf.union(f.table[a], n_left + g.table[a])

    # canonical labels: number classes by smallest member, ascending
    smallest: dict[int, int] = {}
    for x in range(n_left + n_right):
        r = uf.find(x)
        if r not in smallest:
            smallest[r] = x
    labels = {r: i for i, (r, _) in enumerate(sorted(smallest.items(), key=lambda kv: kv[1]))}

    apex = len(labels)
    inj_left = FinFunction(n_left, apex, tuple(labels[uf.find(b)] for b in range(n_left)))
    inj_right = FinFunction(
        n_right, apex, tuple(labels[uf.find(n_left + c)] for c in range(n_right))
    )
    return PushoutResult(apex, inj_left, inj_right)


@dataclass(frozen=True)
class PullbackResult:
    """Apex and projections of a pullback of a cospan ``B -> D <- C``.

    The apex enumerates the pairs ``(b, c)`` with ``f(b) = g(c)`` in
    lexicographic order.
    """

    apex: int
    proj_left: FinFunction
    proj_right: FinFunction


def pullback(f: FinFunction, g: FinFunction) -> PullbackResult:
    if f.cod != g.cod:
        raise CodomainMismatch(f"cospan legs must share a codomain: {f.cod} != {g.cod}")
    pairs = [(b, c) for b in range(f.dom) for c in range(g.dom) if f.table[b] == g.table[c]]
    proj_left = FinFunction(len(pairs), f.dom, tuple(b for b, _ in pairs))
    proj_right = FinFunction(len(pairs), g.dom, tuple(c for _, c in pairs))
    return PullbackResult(len(pairs), proj_left, proj_right)


@dataclass(frozen=True)
class TypedFinSet:
    """A finite set typed over a named type set.

    ``typing`` sends each element to an index into ``types``.
    """

    size: int
    types: tuple[str, ...]
    typing: FinFunction

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if self.typing.dom != self.size:
            raise ValueError("typing domain must equal the set size")
        if self.typing.cod != len(self.types):
            raise ValueError("typing codomain must equal the number of types")

    def type_of(self, i: int) -> str:
        return self.types[self.typing.table[i]]

    def type_names(self) -> tuple[str, ...]:
        return tuple(self.type_of(i) for i in range(self.size))

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "types": list(self.types),
            "typing": list(self.typing.table),
        }

    @staticmethod
    def from_json(data: dict) -> "TypedFinSet":
        types = tuple(data["types"])
        table = tuple(data["typing"])
        return TypedFinSet(len(table), types, FinFunction(len(table), len(types), table))


def check_typed(f: FinFunction, src: TypedFinSet, tgt: TypedFinSet) -> None:
    """Require ``f`` to commute with the typings; raise TypeClash otherwise."""
    if f.dom != src.size or f.cod != tgt.size:
        raise DomainMismatch("function does not match the typed sets' sizes")
    for i in range(f.dom):
        if src.type_of(i) != tgt.type_of(f.table[i]):
            raise TypeClash(
                f"element {i} has type {src.type_of(i)!r} but its image has "
                f"type {tgt.type_of(f.table[i])!r}"
            )
