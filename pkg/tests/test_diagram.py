import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomtopos._util import BudgetExceeded
from atomtopos.diagram import (
    Diagram, InvalidPresheaf, NatTrans, Presheaf, SubPresheaf, category_of_elements,
    classify, classifying_maps, coequalizer, colimit, complement, complement_by_search,
    constant, count_nat, coproduct, density_comparison, diagonal, enumerate_nat,
    enumerate_presheaves, epi_mono_factorize, equalizer, exponential, global_sections,
    identity, image, initial, is_complemented, is_decidable, iso_search, limit, nat_list,
    omega, pi0, pi0_map, product, projections, pull_back_true, pullback, pushout,
    representable, representable_map, singleton, subobjects, terminal,
    to_terminal, true_map, two, yoneda, yoneda_element,
)
from atomtopos.diagram import test_family as named_family
from atomtopos.fincat import opposite, terminal_category
from atomtopos.sites import BUILTIN_IDS, builtin, chain3, idempotent_monoid

from oracles import (
    brute_components, brute_iso, brute_nat, brute_presheaves, brute_sieves,
    brute_subobjects,
)

EOP = opposite(idempotent_monoid())


def family(site_id):
    return [X for _, X in named_family(builtin(site_id).category)]


def small_family(site_id):
    """Family members small enough for brute-force hom enumeration."""
    return [X for X in family(site_id) if X.total_size() <= 6]


def idempotent_presheaf(table):
    """A presheaf over opposite(E) from the table of the idempotent ``e``."""
    n = len(table)
    return Presheaf(EOP, {"*": [str(i) for i in range(n)]}, {"e": tuple(table)})


# --- presheaves and representables -----------------------------------------------

def test_invalid_presheaf_is_rejected():
    with pytest.raises(InvalidPresheaf):
        idempotent_presheaf([1, 0])     # e.e = e fails for a swap


def test_representable_examples():
    T = terminal_category()
    assert iso_search(representable(T, "*"), terminal(T)) is not None
    y = representable(EOP, "*")
    assert y.size("*") == 2
    C = chain3()
    ym = representable(C, "m")
    assert ym.size("0") == 1 and ym.size("1") == 0


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_yoneda_bijection(site_id):
    C = builtin(site_id).category
    for X in family(site_id):
        for c in C.objects:
            maps = nat_list(representable(C, c), X)
            assert len(maps) == X.size(c)
            assert sorted(X.position(c, yoneda_element(t, c)) for t in maps) == list(range(X.size(c)))
            assert all(yoneda(X, c, yoneda_element(t, c)) == t for t in maps)


# --- natural transformations ------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_enumerate_nat_matches_brute_force(site_id):
    fam = small_family(site_id)
    for X, Y in itertools.product(fam, repeat=2):
        got = [t.comp for t in enumerate_nat(X, Y)]
        assert len(got) == len(set(got))
        assert set(got) == set(brute_nat(X, Y))
        assert count_nat(X, Y) == len(got)


def test_enumeration_is_deterministic():
    C = chain3()
    X, Y = omega(C), two(C)
    assert [t.comp for t in enumerate_nat(X, Y)] == [t.comp for t in enumerate_nat(X, Y)]


def test_nat_examples():
    assert len(global_sections(omega(EOP))) == 2
    for X in family("chain3"):
        assert len(nat_list(X, terminal(chain3()))) == 1


def test_budget_is_enforced():
    C = chain3()
    with pytest.raises(BudgetExceeded) as exc:
        nat_list(omega(C), omega(C), budget=3)
    assert exc.value.count > 3


def test_injective_enumeration():
    C = chain3()
    X = two(C)
    isos = nat_list(X, X, injective=True)
    assert len(isos) == 2 and all(t.is_iso() for t in isos)


def test_iso_examples():
    C = chain3()
    X = omega(C)
    assert iso_search(X, X) is not None
    assert iso_search(terminal(C), two(C)) is None
    assert iso_search(product(representable(C, "m"), representable(C, "1")),
                      representable(C, "m")) is not None


# --- limits and colimits ----------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_product_with_terminal(site_id):
    C = builtin(site_id).category
    for X in family(site_id):
        assert iso_search(product(X, terminal(C)), X) is not None


def test_representable_products_are_meets():
    C = chain3()
    for a, b in itertools.product(C.objects, repeat=2):
        meet = min(a, b, key="0m1".index)
        assert brute_iso(product(representable(C, a), representable(C, b)),
                         representable(C, meet))


def test_product_universal_property():
    C = chain3()
    X, Y = two(C), omega(C)
    p1, p2 = projections(X, Y)
    for Z in family("chain3")[:4]:
        pairs = [(f, g) for f in nat_list(Z, X) for g in nat_list(Z, Y)]
        maps = nat_list(Z, product(X, Y))
        assert len(maps) == len(pairs)
        assert {((p1 @ h).comp, (p2 @ h).comp) for h in maps} == {(f.comp, g.comp) for f, g in pairs}


def test_equalizer_and_pullback():
    C = chain3()
    X = two(C)
    f, g = nat_list(terminal(C), X)
    E, e = equalizer(f, g)
    assert E.is_empty()
    E, e = equalizer(f, f)
    assert e.is_iso()
    # pullback of a mono is a mono
    m = true_map(C)
    for h in nat_list(two(C), omega(C)):
        P, q1, q2 = pullback(h, m)
        assert q1.is_mono()


def test_general_limit_of_a_span():
    C = chain3()
    X = omega(C)
    f = to_terminal(X)
    g = to_terminal(two(C))
    L, legs = limit(Diagram((X, two(C), terminal(C)), ((0, 2, f), (1, 2, g))))
    assert iso_search(L, product(X, two(C))) is not None


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_two_has_two_elements_everywhere(site_id):
    C = builtin(site_id).category
    assert all(n == 2 for n in two(C).profile())
    # 2 = 1 + 1, so pieces and points double those of 1
    assert len(pi0(two(C))) == 2 * len(pi0(terminal(C)))
    assert len(global_sections(two(C))) == 2 ** len(pi0(terminal(C)))


def test_coequalizer_of_points():
    C = chain3()
    f, g = nat_list(terminal(C), two(C))
    Q, q = coequalizer(f, g)
    assert iso_search(Q, terminal(C)) is not None
    assert q.is_epi()


def test_pushout_and_coproduct():
    C = chain3()
    one = terminal(C)
    S, i1, i2 = coproduct(one, one)
    assert iso_search(S, two(C)) is not None
    f = to_terminal(initial(C))
    P, j1, j2 = pushout(f, f)
    assert iso_search(P, two(C)) is not None


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_density(site_id):
    for X in family(site_id):
        L, comp = density_comparison(X)
        assert comp.is_iso()


# --- epi-mono factorization ----------------------------------------------------------

@pytest.mark.parametrize("site_id", ["chain3", "E-op", "reflexive_graph"])
def test_epi_mono_laws(site_id):
    fam = small_family(site_id)
    for X, Y in itertools.product(fam, repeat=2):
        for f in nat_list(X, Y):
            e, m = epi_mono_factorize(f)
            assert m @ e == f and e.is_epi() and m.is_mono()
            im = image(f)
            # least subobject through which f factors
            for S in subobjects(Y):
                if all(v in S.at(a) for a in Y.index.objects for v in f.at(a)):
                    assert all(im.at(a) <= S.at(a) for a in Y.index.objects)


def test_factorizing_an_iso_and_an_epi():
    C = chain3()
    X = two(C)
    e, m = epi_mono_factorize(identity(X))
    assert m.is_iso() and e.is_iso()
    f = to_terminal(X)
    e, m = epi_mono_factorize(f)
    assert m.is_iso() and e == NatTrans(X, e.cod, f.comp)


# --- exponentials ------------------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_exponential_cardinality_brute_force(site_id):
    C = builtin(site_id).category
    fam = small_family(site_id)
    for X, Y in itertools.product(fam[:5], repeat=2):
        E = exponential(X, Y).obj
        for a in C.objects:
            assert E.size(a) == len(brute_nat(product(representable(C, a), X), Y))


def test_exponent_one():
    for site_id in BUILTIN_IDS:
        C = builtin(site_id).category
        for X in family(site_id):
            assert iso_search(exponential(terminal(C), X).obj, X) is not None


@pytest.mark.parametrize("n,m", [(1, 1), (2, 2), (3, 2), (2, 3), (3, 3)])
def test_setE_exponential_formula(n, m):
    # X and T with a single fixed point each: e sends everything to element 0
    X = idempotent_presheaf([0] * n)
    T = idempotent_presheaf([0] * m)
    E = exponential(T, X).obj
    assert E.size("*") == n ** (2 * m - 1)
    fixed = sum(1 for i, v in enumerate(E.action["e"]) if i == v)
    assert fixed == n ** (m - 1)


@pytest.mark.parametrize("site_id", ["chain3", "E-op", "discrete2"])
def test_exponential_adjunction(site_id):
    fam = small_family(site_id)
    for X, Y in itertools.product(fam[:4], repeat=2):
        Ex = exponential(X, Y)
        for Z in fam[:4]:
            left = nat_list(product(Z, X), Y)
            right = nat_list(Z, Ex.obj)
            assert len(left) == len(right)
            for g in left:
                h = Ex.transpose(g, Z)
                assert Ex.untranspose(h) == g
            for h in right:
                assert Ex.transpose(Ex.untranspose(h), Z) == h


# --- classifier and subobjects --------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_omega_is_sieves(site_id):
    C = builtin(site_id).category
    Om = omega(C)
    for a in C.objects:
        assert set(Om.sets[a]) == set(brute_sieves(C, a))


def test_omega_examples():
    assert omega(terminal_category()).profile() == (2,)
    assert set(omega(EOP).sets["*"]) == {frozenset(), frozenset({"e"}), frozenset({"1", "e"})}


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_subobjects_match_brute_force(site_id):
    for X in small_family(site_id):
        got = {S.members for S in subobjects(X)}
        assert len(got) == len(subobjects(X))
        assert got == set(brute_subobjects(X))


@pytest.mark.parametrize("site_id", ["chain3", "E-op", "reflexive_graph", "discrete2"])
def test_classification_is_unique(site_id):
    for X in small_family(site_id):
        for S in subobjects(X):
            chi = classify(S)
            assert pull_back_true(chi) == S
            assert classifying_maps(S) == [chi]


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_representables_indecomposable(site_id):
    C = builtin(site_id).category
    for c in C.objects:
        y = representable(C, c)
        comp = [S for S in subobjects(y) if is_complemented(S)]
        assert sorted((S.is_bottom(), S.is_top()) for S in comp) == [(False, True), (True, False)]


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_complement_agrees_with_search(site_id):
    for X in small_family(site_id):
        for S in subobjects(X):
            assert complement(S) == complement_by_search(S)


def test_decidability_examples():
    assert not is_decidable(representable(EOP, "*"))
    for site_id in BUILTIN_IDS:
        C = builtin(site_id).category
        for n in range(4):
            assert is_decidable(constant(C, [str(i) for i in range(n)]))


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_singleton_is_monic(site_id):
    for X in small_family(site_id):
        assert singleton(X).is_mono()


# --- pieces and points ----------------------------------------------------------------

@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_pieces(site_id):
    C = builtin(site_id).category
    for c in C.objects:
        assert len(pi0(representable(C, c))) == 1
    for X in family(site_id):
        assert len(pi0(X)) == brute_components(X)
        assert len(pi0(X)) == len(comma_like_components(X))


def comma_like_components(X):
    # components of the category of elements, by graph search on its arrows
    G = category_of_elements(X)
    seen, comps = set(), []
    for o in G.objects:
        if o in seen:
            continue
        block = {o}
        frontier = [o]
        while frontier:
            u = frontier.pop()
            for f in G.arrows:
                for v, w in ((f.dom, f.cod), (f.cod, f.dom)):
                    if v == u and w not in block:
                        block.add(w)
                        frontier.append(w)
        seen |= block
        comps.append(block)
    return comps


def test_pieces_of_discrete_terminal():
    C = builtin("discrete2").category
    assert len(pi0(terminal(C))) == 2


def test_pi0_is_functorial():
    C = chain3()
    X, Y, Z = omega(C), two(C), terminal(C)
    for f in nat_list(X, Y):
        for g in nat_list(Y, Z):
            gf = pi0_map(g @ f)
            assert gf == tuple(pi0_map(g)[k] for k in pi0_map(f))


def test_representable_map():
    C = chain3()
    t = representable_map(C, "0<=m")
    assert t.dom == representable(C, "0") and t.cod == representable(C, "m")
    assert t.is_mono()


# --- enumeration up to isomorphism ---------------------------------------------------

@pytest.mark.parametrize("site_id,bound", [("terminal", 3), ("E-op", 3), ("chain3", 1),
                                           ("discrete2", 2), ("reflexive_graph", 1)])
def test_enumerate_presheaves_matches_brute_force(site_id, bound):
    C = builtin(site_id).category
    got = enumerate_presheaves(C, bound)
    ref = brute_presheaves(C, bound)
    assert len(got) == len(ref)
    for X in ref:
        assert sum(1 for Y in got if brute_iso(X, Y)) == 1


def test_setE_classes_at_bound_four():
    # idempotent self-maps of an n-set up to conjugacy: 1, 1, 2, 3, 5
    assert len(enumerate_presheaves(EOP, 4)) == 1 + 1 + 2 + 3 + 5


# --- property tests --------------------------------------------------------------------

def make_idempotent(flags, targets):
    # fixed points are 0 and every i with flags[i]; the rest go to a fixed point
    fixed = [i for i, f in enumerate(flags) if f or i == 0]
    return [i if i in fixed else fixed[t % len(fixed)] for i, t in enumerate(targets)]


tables = st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.booleans(), min_size=n, max_size=n),
    st.lists(st.integers(0, 3), min_size=n, max_size=n))).map(lambda p: make_idempotent(*p))


@settings(max_examples=60, deadline=None)
@given(tables, tables)
def test_setE_homs_match_brute_force(a, b):
    X, Y = idempotent_presheaf(a), idempotent_presheaf(b)
    assert {t.comp for t in enumerate_nat(X, Y)} == set(brute_nat(X, Y))
    assert count_nat(X, Y) == len(brute_nat(X, Y))
    assert (iso_search(X, Y) is not None) == brute_iso(X, Y)
