import itertools
import random

import pytest
from hypothesis import given, strategies as st

from wirekit import finset
from wirekit.errors import CodomainMismatch, DomainMismatch, TypeClash
from wirekit.finset import FinFunction, TypedFinSet, identity


def closure_classes(f: FinFunction, g: FinFunction) -> list[set[int]]:
    """Independent pushout oracle: reflexive-symmetric-transitive closure of
    the relation f(a) ~ g(a) on the disjoint union of the codomains."""
    n = f.cod + g.cod
    related = {(x, x) for x in range(n)}
    for a in range(f.dom):
        related.add((f.table[a], f.cod + g.table[a]))
        related.add((f.cod + g.table[a], f.table[a]))
    changed = True
    while changed:
        changed = False
        for (x, y), (u, v) in itertools.product(list(related), repeat=2):
            if y == u and (x, v) not in related:
                related.add((x, v))
                changed = True
    classes = []
    seen = set()
    for x in range(n):
        if x in seen:
            continue
        cls = {y for y in range(n) if (x, y) in related}
        classes.append(cls)
        seen |= cls
    return classes


def random_function(rng: random.Random, max_size: int = 6) -> FinFunction:
    dom = rng.randrange(max_size + 1)
    cod = rng.randrange(1, max_size + 1)
    return FinFunction(dom, cod, tuple(rng.randrange(cod) for _ in range(dom)))


class TestCompose:
    def test_identity_composite(self):
        assert finset.compose(identity(3), identity(3)) == identity(3)

    def test_pointwise(self):
        f = FinFunction(2, 1, (0, 0))
        g = FinFunction(1, 3, (2,))
        assert finset.compose(f, g) == FinFunction(2, 3, (2, 2))

    def test_swap_involution(self):
        swap = FinFunction(2, 2, (1, 0))
        assert finset.compose(swap, swap) == identity(2)

    def test_mismatch(self):
        with pytest.raises(DomainMismatch):
            finset.compose(identity(2), identity(3))

    @given(st.data())
    def test_associative_unital(self, data):
        sizes = [data.draw(st.integers(1, 5)) for _ in range(4)]
        tables = [
            tuple(data.draw(st.integers(0, sizes[k + 1] - 1)) for _ in range(sizes[k]))
            for k in range(3)
        ]
        f, g, h = (
            FinFunction(sizes[k], sizes[k + 1], tables[k]) for k in range(3)
        )
        assert finset.compose(finset.compose(f, g), h) == finset.compose(f, finset.compose(g, h))
        assert finset.compose(identity(f.dom), f) == f
        assert finset.compose(f, identity(f.cod)) == f


class TestCoproduct:
    def test_empty(self):
        assert finset.coproduct([]) == FinFunction(0, 0, ())

    def test_identities(self):
        assert finset.coproduct([identity(2), identity(2)]) == identity(4)

    def test_offsets(self):
        f = FinFunction(1, 2, (0,))
        g = FinFunction(1, 2, (1,))
        assert finset.coproduct([f, g]) == FinFunction(2, 4, (0, 3))

    def test_injections_jointly_surjective_blockwise_injective(self, rng):
        sizes = [rng.randrange(4) for _ in range(3)]
        injs = finset.coproduct_injections(sizes)
        total = sum(sizes)
        covered = set()
        for inj in injs:
            assert inj.is_mono
            covered |= inj.image()
        assert covered == set(range(total))


class TestPushout:
    def test_identity_span(self):
        for n in range(4):
            po = finset.pushout(identity(n), identity(n))
            assert po.apex == n
            assert po.inj_left == identity(n)
            assert po.inj_right == identity(n)

    def test_glue_on_shared_species(self):
        # B = {S, I}, C = {I, R}, glued along a single point landing on I in both
        f = FinFunction(1, 2, (1,))
        g = FinFunction(1, 2, (0,))
        po = finset.pushout(f, g)
        assert po.apex == 3
        # canonical labels: classes numbered by smallest member of B + C
        assert po.inj_left == FinFunction(2, 3, (0, 1))
        assert po.inj_right == FinFunction(2, 3, (1, 2))

    def test_cocone_commutes(self, rng):
        for _ in range(200):
            dom = rng.randrange(5)
            f = random_span_leg(rng, dom)
            g = random_span_leg(rng, dom)
            po = finset.pushout(f, g)
            assert finset.compose(f, po.inj_left) == finset.compose(g, po.inj_right)

    def test_matches_closure_oracle(self, rng):
        for _ in range(300):
            dom = rng.randrange(5)
            f = random_span_leg(rng, dom)
            g = random_span_leg(rng, dom)
            po = finset.pushout(f, g)
            classes = closure_classes(f, g)
            assert po.apex == len(classes)
            # oracle labels via the same canonical rule: smallest member, ascending
            ordered = sorted(classes, key=min)
            label = {x: k for k, cls in enumerate(ordered) for x in cls}
            assert po.inj_left.table == tuple(label[b] for b in range(f.cod))
            assert po.inj_right.table == tuple(label[f.cod + c] for c in range(g.cod))

    def test_universal_property_small(self):
        # every competing cocone factors uniquely, checked exhaustively
        for a, b, c in itertools.product(range(3), range(1, 4), range(1, 4)):
            for f_table in itertools.product(range(b), repeat=a):
                for g_table in itertools.product(range(c), repeat=a):
                    f = FinFunction(a, b, f_table)
                    g = FinFunction(a, c, g_table)
                    po = finset.pushout(f, g)
                    for target in range(1, 3):
                        for u_table in itertools.product(range(target), repeat=b):
                            u = FinFunction(b, target, u_table)
                            for v_table in itertools.product(range(target), repeat=c):
                                v = FinFunction(c, target, v_table)
                                if finset.compose(f, u) != finset.compose(g, v):
                                    continue
                                mediators = [
                                    m
                                    for m_table in itertools.product(range(target), repeat=po.apex)
                                    for m in [FinFunction(po.apex, target, m_table)]
                                    if finset.compose(po.inj_left, m) == u
                                    and finset.compose(po.inj_right, m) == v
                                ]
                                assert len(mediators) == 1

    def test_mismatch(self):
        with pytest.raises(DomainMismatch):
            finset.pushout(identity(2), identity(3))


def random_span_leg(rng: random.Random, dom: int) -> FinFunction:
    cod = rng.randrange(1, 7)
    return FinFunction(dom, cod, tuple(rng.randrange(cod) for _ in range(dom)))


class TestPullback:
    def test_along_identity(self):
        g = FinFunction(3, 4, (1, 1, 2))
        pb = finset.pullback(identity(4), g)
        assert pb.apex == g.dom
        assert pb.proj_right == identity(3)
        assert pb.proj_left == g

    def test_enumerates_pairs(self):
        f = FinFunction(2, 1, (0, 0))
        g = FinFunction(1, 1, (0,))
        assert finset.pullback(f, g).apex == 2

    def test_swap_pairs(self):
        f = FinFunction(2, 2, (0, 1))
        g = FinFunction(2, 2, (1, 0))
        pb = finset.pullback(f, g)
        assert pb.apex == 2
        assert pb.proj_left.table == (0, 1)
        assert pb.proj_right.table == (1, 0)

    def test_cone_commutes_and_universal_small(self):
        for b, c, d in itertools.product(range(3), range(3), range(1, 3)):
            for f_table in itertools.product(range(d), repeat=b):
                for g_table in itertools.product(range(d), repeat=c):
                    f = FinFunction(b, d, f_table)
                    g = FinFunction(c, d, g_table)
                    pb = finset.pullback(f, g)
                    assert finset.compose(pb.proj_left, f) == finset.compose(pb.proj_right, g)
                    for apex in range(3):
                        for u_table in itertools.product(range(max(b, 1)), repeat=apex):
                            if b == 0 and apex > 0:
                                continue
                            for v_table in itertools.product(range(max(c, 1)), repeat=apex):
                                if c == 0 and apex > 0:
                                    continue
                                u = FinFunction(apex, b, u_table)
                                v = FinFunction(apex, c, v_table)
                                if finset.compose(u, f) != finset.compose(v, g):
                                    continue
                                mediators = [
                                    m
                                    for m_table in itertools.product(range(max(pb.apex, 1)), repeat=apex)
                                    if pb.apex > 0 or apex == 0
                                    for m in [FinFunction(apex, pb.apex, m_table)]
                                    if finset.compose(m, pb.proj_left) == u
                                    and finset.compose(m, pb.proj_right) == v
                                ]
                                assert len(mediators) == 1

    def test_mismatch(self):
        with pytest.raises(CodomainMismatch):
            finset.pullback(identity(2), identity(3))


class TestIso:
    def test_identity(self):
        assert identity(5).is_iso
        assert identity(5).inverse() == identity(5)

    def test_collapse_not_iso(self):
        f = FinFunction(2, 1, (0, 0))
        assert not f.is_iso
        assert f.inverse() is None

    def test_swap(self):
        swap = FinFunction(2, 2, (1, 0))
        assert swap.is_iso
        assert swap.inverse() == swap


class TestTyped:
    def test_typing_commutes(self):
        types = ("species",)
        src = TypedFinSet(2, types, FinFunction(2, 1, (0, 0)))
        tgt = TypedFinSet(3, types, FinFunction(3, 1, (0, 0, 0)))
        finset.check_typed(FinFunction(2, 3, (0, 2)), src, tgt)

    def test_type_clash(self):
        src = TypedFinSet(1, ("a", "b"), FinFunction(1, 2, (0,)))
        tgt = TypedFinSet(1, ("a", "b"), FinFunction(1, 2, (1,)))
        with pytest.raises(TypeClash):
            finset.check_typed(identity(1), src, tgt)

    def test_json_round_trip(self):
        t = TypedFinSet(2, ("a", "b"), FinFunction(2, 2, (1, 0)))
        assert TypedFinSet.from_json(t.to_json()) == t
        f = FinFunction(2, 3, (0, 2))
        assert FinFunction.from_json(f.to_json()) == f
