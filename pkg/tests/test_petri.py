import random

import pytest

from wirekit import finset, petri, wiring
from wirekit.errors import ArityMismatch, BoundaryMismatch, IndexOutOfRange, InvalidLeg
from wirekit.finset import FinFunction, identity
from wirekit.petri import (
    Multiset,
    OpenPetriMap,
    OpenPetriNet,
    PetriMap,
    PetriNet,
    check_open_map,
    check_petri_map,
    discrete_net,
    multiset_push,
    open_parallel,
    open_petri_iso,
    petri_iso,
    petri_pushout,
    uwd_apply,
)
from wirekit.wiring import Cospan, CospanMap


def infection_net() -> OpenPetriNet:
    net = PetriNet(
        ("S", "I"), ("inf",), (Multiset.of({0: 1, 1: 1}),), (Multiset.of({1: 2}),)
    )
    return OpenPetriNet(net, FinFunction(2, 2, (0, 1)))


def recovery_net() -> OpenPetriNet:
    net = PetriNet(("I", "R"), ("rec",), (Multiset.of({0: 1}),), (Multiset.of({1: 1}),))
    return OpenPetriNet(net, FinFunction(2, 2, (0, 1)))


def sir_net() -> OpenPetriNet:
    net = PetriNet(
        ("S", "I", "R"),
        ("inf", "rec"),
        (Multiset.of({0: 1, 1: 1}), Multiset.of({1: 1})),
        (Multiset.of({1: 2}), Multiset.of({2: 1})),
    )
    return OpenPetriNet(net, identity(3))


def sis_net() -> OpenPetriNet:
    net = PetriNet(
        ("S", "I"),
        ("inf", "rec"),
        (Multiset.of({0: 1, 1: 1}), Multiset.of({1: 1})),
        (Multiset.of({1: 2}), Multiset.of({0: 1})),
    )
    return OpenPetriNet(net, identity(2))


def sir_uwd() -> Cospan:
    return Cospan(FinFunction(4, 3, (0, 1, 1, 2)), identity(3))


def sir_to_sis_map() -> OpenPetriMap:
    return OpenPetriMap(
        FinFunction(3, 2, (0, 1, 0)),
        PetriMap(FinFunction(3, 2, (0, 1, 0)), identity(2)),
    )


class TestMultiset:
    def test_push_identity(self):
        ms = Multiset.of({0: 1, 2: 3})
        assert multiset_push(identity(3), ms) == ms

    def test_push_sums_over_fibers(self):
        collapse = FinFunction(2, 1, (0, 0))  # S and R onto S
        assert multiset_push(collapse, Multiset.of({0: 1, 1: 1})) == Multiset.of({0: 2})

    def test_push_empty(self):
        assert multiset_push(identity(3), Multiset.empty()) == Multiset.empty()

    def test_push_preserves_total(self, rng):
        for _ in range(100):
            n = rng.randrange(1, 6)
            cod = rng.randrange(1, 4)
            f = FinFunction(n, cod, tuple(rng.randrange(cod) for _ in range(n)))
            ms = Multiset.of({i: rng.randrange(1, 4) for i in range(n) if rng.random() < 0.6})
            assert multiset_push(f, ms).total() == ms.total()

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            multiset_push(identity(1), Multiset.of({3: 1}))

    def test_sortedness_enforced(self):
        with pytest.raises(ValueError):
            Multiset(((2, 1), (0, 1)))


class TestPetriMap:
    def test_identity(self):
        P = sir_net().net
        assert check_petri_map(petri.identity_map(P), P, P)

    def test_sir_to_sis_quotient(self):
        m = PetriMap(FinFunction(3, 2, (0, 1, 0)), identity(2))
        assert check_petri_map(m, sir_net().net, sis_net().net)

    def test_sir_to_sis_perturbed(self):
        m = PetriMap(FinFunction(3, 2, (0, 1, 0)), FinFunction(2, 2, (0, 0)))
        assert not check_petri_map(m, sir_net().net, sis_net().net)

    def test_arity(self):
        with pytest.raises(ArityMismatch):
            check_petri_map(petri.identity_map(sir_net().net), sir_net().net, sis_net().net)


class TestPetriPushout:
    def test_identity_legs(self):
        P = sir_net().net
        idm = petri.identity_map(P)
        glued, inj_p, inj_q = petri_pushout(P, idm, P, idm, P)
        assert petri_iso(glued, P) is not None
        assert check_petri_map(inj_p, P, glued)

    def test_sir_from_infection_and_recovery(self):
        one = discrete_net(("I",))
        left = PetriMap(FinFunction(1, 2, (1,)), finset.initial(1))
        right = PetriMap(FinFunction(1, 2, (0,)), finset.initial(1))
        glued, inj_p, inj_q = petri_pushout(
            one, left, infection_net().net, right, recovery_net().net
        )
        assert glued.n_species == 3
        assert glued.n_transitions == 2
        assert petri_iso(glued, sir_net().net) is not None
        assert check_petri_map(inj_p, infection_net().net, glued)
        assert check_petri_map(inj_q, recovery_net().net, glued)

    def test_discrete_reduces_to_finset(self, rng):
        for _ in range(100):
            a = rng.randrange(4)
            f_cod = rng.randrange(1, 5)
            f = FinFunction(a, f_cod, tuple(rng.randrange(f_cod) for _ in range(a)))
            g_cod = rng.randrange(1, 5)
            g = FinFunction(a, g_cod, tuple(rng.randrange(g_cod) for _ in range(a)))
            apex = discrete_net(tuple(f"a{i}" for i in range(a)))
            P = discrete_net(tuple(f"p{i}" for i in range(f.cod)))
            Q = discrete_net(tuple(f"q{i}" for i in range(g.cod)))
            glued, inj_p, inj_q = petri_pushout(
                apex,
                PetriMap(f, finset.initial(0)),
                P,
                PetriMap(g, finset.initial(0)),
                Q,
            )
            po = finset.pushout(f, g)
            assert glued.n_species == po.apex
            assert inj_p.f == po.inj_left
            assert inj_q.f == po.inj_right

    def test_invalid_leg(self):
        loop = PetriNet(("I",), ("t",), (Multiset.of({0: 1}),), (Multiset.of({0: 1}),))
        # t -> inf is not a homomorphism: the pushed source misses a species
        bad = PetriMap(FinFunction(1, 2, (0,)), FinFunction(1, 1, (0,)))
        with pytest.raises(InvalidLeg):
            petri_pushout(loop, bad, infection_net().net, bad, infection_net().net)


class TestUwdApply:
    def test_single_box_identity_uwd(self):
        inf = infection_net()
        composite = uwd_apply(wiring.identity_cospan(2), [inf])
        assert open_petri_iso(composite, inf) is not None

    def test_paper_sir_composite(self):
        composite = uwd_apply(sir_uwd(), [infection_net(), recovery_net()])
        assert composite.interface == 3
        assert composite.net.n_species == 3
        assert composite.net.n_transitions == 2
        assert open_petri_iso(composite, sir_net()) is not None
        # cosmetic but deterministic: system names win over junction placeholders
        assert composite.net.species == ("S", "I", "R")

    def test_species_count_by_closure(self, rng):
        for _ in range(60):
            systems = []
            total_ports = 0
            for _ in range(rng.randrange(1, 3)):
                n_sp = rng.randrange(1, 4)
                ports = rng.randrange(3)
                net = discrete_net(tuple(f"x{i}" for i in range(n_sp)))
                pm = FinFunction(ports, n_sp, tuple(rng.randrange(n_sp) for _ in range(ports)))
                systems.append(OpenPetriNet(net, pm))
                total_ports += ports
            j = rng.randrange(1, 4)
            outer = rng.randrange(3)
            uwd = Cospan(
                FinFunction(total_ports, j, tuple(rng.randrange(j) for _ in range(total_ports))),
                FinFunction(outer, j, tuple(rng.randrange(j) for _ in range(outer))),
            )
            composite = uwd_apply(uwd, systems)
            total_species = sum(s.net.n_species for s in systems)
            po = finset.pushout(
                finset.coproduct([s.port_map for s in systems]), uwd.left
            )
            assert composite.net.n_species == po.apex
            merges = total_species + j - po.apex
            assert composite.net.n_species == total_species + j - merges

    def test_boundary_mismatch(self):
        with pytest.raises(BoundaryMismatch):
            uwd_apply(sir_uwd(), [infection_net()])

    def test_functorial_up_to_iso(self, rng):
        for _ in range(40):
            inf, rec = infection_net(), recovery_net()
            c1 = sir_uwd()
            outer = rng.randrange(3)
            j2 = rng.randrange(1, 4)
            c2 = Cospan(
                FinFunction(3, j2, tuple(rng.randrange(j2) for _ in range(3))),
                FinFunction(outer, j2, tuple(rng.randrange(j2) for _ in range(outer))),
            )
            nested = uwd_apply(c2, [uwd_apply(c1, [inf, rec])])
            flat = uwd_apply(wiring.compose_cospans(c1, c2), [inf, rec])
            assert open_petri_iso(nested, flat) is not None


class TestOpenParallel:
    def test_unit(self):
        inf = infection_net()
        u = open_parallel(inf, petri.empty_open_net())
        assert u.net == inf.net and u.port_map == inf.port_map

    def test_infection_recovery(self):
        p = open_parallel(infection_net(), recovery_net())
        assert p.interface == 4
        assert p.net.n_species == 4
        assert p.net.n_transitions == 2
        assert p.net.species == ("S", "I", "I", "R")

    def test_strictly_associative(self):
        a, b, c = infection_net(), recovery_net(), infection_net()
        left = open_parallel(open_parallel(a, b), c)
        right = open_parallel(a, open_parallel(b, c))
        assert left == right


class TestOpenMap:
    def test_identity(self):
        sir = sir_net()
        m = OpenPetriMap(identity(3), petri.identity_map(sir.net))
        assert check_open_map(m, sir, sir)

    def test_paper_sir_to_sis(self):
        assert check_open_map(sir_to_sis_map(), sir_net(), sis_net())

    def test_perturbed_interface_map_fails(self):
        m = sir_to_sis_map()
        bad = OpenPetriMap(FinFunction(3, 2, (0, 1, 1)), m.net_map)
        assert not check_open_map(bad, sir_net(), sis_net())


class TestMapsOfComposites:
    def test_sir_fixture_inclusion(self):
        # include the 3-junction diagram into one with a fourth, idle junction
        src_uwd = sir_uwd()
        tgt_uwd = Cospan(FinFunction(4, 4, (0, 1, 1, 2)), FinFunction(3, 4, (0, 1, 2)))
        sq = CospanMap(identity(4), identity(3), FinFunction(3, 4, (0, 1, 2)))
        assert wiring.check_cospan_map(sq, src_uwd, tgt_uwd)

        systems = [infection_net(), recovery_net()]
        comp_maps = [
            OpenPetriMap(identity(2), petri.identity_map(systems[0].net)),
            OpenPetriMap(identity(2), petri.identity_map(systems[1].net)),
        ]
        induced = petri.induced_composite_map(sq, src_uwd, tgt_uwd, comp_maps, systems, systems)
        assert check_open_map(
            induced, uwd_apply(src_uwd, systems), uwd_apply(tgt_uwd, systems)
        )

    def test_random_junction_inclusions(self, rng):
        for _ in range(40):
            inf, rec = infection_net(), recovery_net()
            src_uwd = Cospan(
                FinFunction(4, 3, tuple(rng.randrange(3) for _ in range(4))),
                FinFunction(2, 3, tuple(rng.randrange(3) for _ in range(2))),
            )
            extra = rng.randrange(1, 3)
            incl = FinFunction(3, 3 + extra, (0, 1, 2))
            tgt_uwd = Cospan(src_uwd.left.then(incl), src_uwd.right.then(incl))
            sq = CospanMap(identity(4), identity(2), incl)
            assert wiring.check_cospan_map(sq, src_uwd, tgt_uwd)
            comp_maps = [
                OpenPetriMap(identity(2), petri.identity_map(inf.net)),
                OpenPetriMap(identity(2), petri.identity_map(rec.net)),
            ]
            induced = petri.induced_composite_map(
                sq, src_uwd, tgt_uwd, comp_maps, [inf, rec], [inf, rec]
            )
            assert check_open_map(
                induced, uwd_apply(src_uwd, [inf, rec]), uwd_apply(tgt_uwd, [inf, rec])
            )


class TestPetriIso:
    def test_self(self):
        P = sir_net().net
        iso = petri_iso(P, P)
        assert iso is not None
        assert check_petri_map(iso, P, P)

    def test_recovers_permutation(self, rng):
        P = sir_net().net
        perm = [0, 1, 2]
        rng.shuffle(perm)
        f = FinFunction(3, 3, tuple(perm))
        Q = PetriNet(
            tuple(P.species[f.inverse().table[i]] for i in range(3)),
            P.transitions,
            tuple(multiset_push(f, ms) for ms in P.src),
            tuple(multiset_push(f, ms) for ms in P.tgt),
        )
        iso = petri_iso(P, Q)
        assert iso is not None
        assert check_petri_map(iso, P, Q)
        assert iso.f.is_iso and iso.g.is_iso

    def test_sir_vs_sis_none(self):
        assert petri_iso(sir_net().net, sis_net().net) is None
