import itertools

import pytest

from atomtopos.atomic import is_atomic
from atomtopos.cohesion import (
    HypothesisNotMet, atomic_contractible, check_delta_gamma, check_gamma_lambda,
    check_pi_delta, codiscrete, counit_delta_gamma, decidables_and_atoms, discrete, gamma,
    is_connected, is_contractible_family, mclarty_report, no_motion_check, pi, pi_map,
    pi_product_map, right_adjoint_rigidity, string_adjunctions,
)
from atomtopos.diagram import (
    enumerate_presheaves, global_sections, identity, is_decidable, nat_list, omega,
    representable, terminal, two,
)
from atomtopos.diagram import test_family as named_family
from atomtopos.sites import BUILTIN_IDS, builtin

from oracles import brute_components, brute_nat


def family(C):
    return [X for _, X in named_family(C)]


def site(site_id):
    return builtin(site_id).category


MCLARTY = [s for s in BUILTIN_IDS if builtin(s).expected["mclarty"]]


# --- the four functors ------------------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_pi_and_gamma_against_brute_force(site_id):
    C = site(site_id)
    one = terminal(C)
    for X in family(C):
        assert pi(X) == brute_components(X)
        assert len(gamma(X)) == len(brute_nat(one, X))


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_discrete_round_trips(site_id):
    C = site(site_id)
    comps = pi(terminal(C))
    for n in range(4):
        D = discrete(C, range(n))
        assert pi(D) == n * comps
        assert len(gamma(D)) == n ** comps


def test_reflexive_graph_examples():
    C = site("reflexive_graph")
    assert pi(representable(C, "E")) == 1
    # points of y_E: loops at a vertex, i.e. sections of the degeneracy
    assert len(gamma(representable(C, "E"))) == len(brute_nat(terminal(C), representable(C, "E")))


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_codiscrete_sizes(site_id):
    C = site(site_id)
    for n in range(3):
        L = codiscrete(C, range(n))
        for a in C.objects:
            assert L.size(a) == n ** len(gamma(representable(C, a)))


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_pi_delta_and_delta_gamma(site_id):
    C = site(site_id)
    for X in family(C):
        for n in range(3):
            assert check_pi_delta(X, range(n))
            assert check_delta_gamma(X, range(n))


@pytest.mark.parametrize("site_id", [s for s in BUILTIN_IDS if s != "discrete2"])
def test_gamma_lambda_on_sites_with_terminal(site_id):
    C = site(site_id)
    for X in family(C):
        for n in range(3):
            assert check_gamma_lambda(X, range(n))


def test_gamma_lambda_fails_without_tiny_terminal():
    # on the disjoint two-object site no representable has a point, so
    # Lambda(empty) = 1 while Fun(Gamma 1, empty) is empty
    C = site("discrete2")
    one = terminal(C)
    assert codiscrete(C, []).profile() == (1, 1)
    assert not check_gamma_lambda(one, [])
    assert all(check_gamma_lambda(X, range(n)) for X in family(C) for n in (1, 2))


def test_string_adjunctions_report():
    C = site("E-op")
    assert all(string_adjunctions(C, family(C)).values())


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_pi_is_functorial(site_id):
    C = site(site_id)
    fam = [X for X in family(C) if X.total_size() <= 8]
    for X, Y, Z in itertools.product(fam[:4], repeat=3):
        for f in nat_list(X, Y)[:3]:
            for g in nat_list(Y, Z)[:3]:
                assert pi_map(g @ f) == tuple(pi_map(g)[k] for k in pi_map(f))


def test_points_embed_into_elements():
    C = site("reflexive_graph")
    for X in family(C):
        for a in C.objects:
            vals = [g.at(a)[0] for g in gamma(X)]
            # a point is fixed by its vertex, and its edge is the loop there
            assert len(set(vals)) == len(vals)


# --- McLarty diagnostics ------------------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_mclarty_profile_matches_expected(site_id):
    rep = mclarty_report(site(site_id), 3)
    expected = builtin(site_id).expected
    assert rep.mclarty == expected["mclarty"]
    assert sorted(rep.failing()) == sorted(expected.get("failing", []))


def test_discrete2_counterexamples():
    rep = mclarty_report(site("discrete2"), 3)
    checks = {c.name: c for c in rep.checks}
    assert checks["two_valued"].detail == {"gamma_omega": 4}
    pair = checks["pi_preserves_products"].detail["counterexample"]
    assert len(pair["pair"]) == 2
    assert pair["pi_product"] != pair["pi_left"] * pair["pi_right"]


def test_discrete2_product_witness_replays():
    C = site("discrete2")
    X, Y = representable(C, "a"), representable(C, "b")
    m = pi_product_map(X, Y)
    assert len(m) != pi(X) * pi(Y)


def test_chain3_nullstellensatz_witness():
    rep = mclarty_report(site("chain3"), 3)
    check = {c.name: c for c in rep.checks}["nullstellensatz"]
    assert check.detail["counterexample"] == "y:0"
    y0 = representable(site("chain3"), "0")
    assert not y0.is_empty() and gamma(y0) == []


def test_counit_monic_failure_replays():
    C = site("discrete2")
    assert not counit_delta_gamma(two(C)).is_mono()
    assert counit_delta_gamma(two(site("E-op"))).is_mono()


def test_omega_points_two_valued():
    for site_id in BUILTIN_IDS:
        C = site(site_id)
        assert (len(gamma(omega(C))) == 2) == ("two_valued" not in builtin(site_id).expected.get("failing", []))


# --- connectedness, rigidity, contractibility ---------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_representables_connected(site_id):
    C = site(site_id)
    assert all(is_connected(representable(C, c)) for c in C.objects)


@pytest.mark.parametrize("site_id", MCLARTY)
def test_atomic_implies_connected(site_id):
    C = site(site_id)
    for T in enumerate_presheaves(C, 2) + family(C):
        if is_atomic(T).atomic:
            assert is_connected(T)


def test_disconnected_atomic_in_set_times_set():
    C = site("discrete2")
    one = terminal(C)
    assert is_atomic(one).atomic and pi(one) == 2


def test_no_motion_for_terminal():
    C = site("E-op")
    one = terminal(C)
    for A in family(C):
        if is_decidable(A):
            assert no_motion_check(one, A)


def test_no_motion_requires_point():
    C = site("chain3")
    with pytest.raises(HypothesisNotMet):
        no_motion_check(representable(C, "0"), two(C))


@pytest.mark.parametrize("site_id", MCLARTY)
def test_rigidity(site_id):
    C = site(site_id)
    for T in family(C):
        if not is_atomic(T).atomic:
            continue
        for Y in family(C):
            assert right_adjoint_rigidity(T, Y) == {"gamma_iso": True, "pi_iso": True}


def test_rigidity_requires_atomic():
    C = site("E-op")
    with pytest.raises(HypothesisNotMet):
        right_adjoint_rigidity(representable(C, "*"), two(C))


@pytest.mark.parametrize("site_id", MCLARTY)
def test_contractibility_indicators(site_id):
    C = site(site_id)
    dec = [A for A in family(C) if is_decidable(A)]
    for T in family(C):
        if not is_atomic(T).atomic:
            continue
        res = atomic_contractible(T, dec, family(C))
        assert res["two_zero_iso"]
        assert all(res["a_zero_isos"]) and all(res["pi_exponential_isos"])
        assert is_contractible_family(T, family(C))


def test_retract_of_contractible():
    C = site("reflexive_graph")
    yE, one = representable(C, "E"), terminal(C)
    # 1 is a retract of the edge y_E through either endpoint
    p = global_sections(yE)[0]
    assert nat_list(yE, one)[0] @ p == identity(one)
    assert is_contractible_family(yE, family(C)) and is_contractible_family(one, family(C))


def test_decidables_and_atoms_setE():
    res = decidables_and_atoms(site("E-op"), 4)
    assert res["decidable_atomic"] == 1 and res["decidable_atomic_terminal"]
    assert res["delta_reflects_atomic"] and res["pi_preserves_atomic"]


def test_delta_two_not_atomic_on_graphs():
    C = site("reflexive_graph")
    assert not is_atomic(discrete(C, range(2))).atomic
    assert is_atomic(discrete(C, range(1))).atomic
