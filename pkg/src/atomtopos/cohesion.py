"""Pieces, points and the constant-presheaf string ``Pi -| Delta -| Gamma -| Lambda``."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .atomic import eval_at_point, is_atomic, right_adjoint, sub_bang, sub_point
from .diagram import (
    NatTrans, Presheaf, constant, enumerate_nat, enumerate_presheaves, exponential,
    global_sections, identity, image, is_decidable, iso_search, label, nat_list, omega,
    pi0, pi0_map, product, projections, representable, sigma, terminal, test_family, to_terminal, two,
    yoneda,
)
from .fincat import FinCat


class HypothesisNotMet(ValueError):
    pass


# --- the four functors ----------------------------------------------------------------

def pi(X: Presheaf) -> int:
    return len(pi0(X))


def pi_map(f: NatTrans) -> tuple[int, ...]:
    return pi0_map(f)


def discrete(C: FinCat, S: Sequence) -> Presheaf:
    return constant(C, [str(s) for s in S])


def gamma(X: Presheaf) -> list[NatTrans]:
    return global_sections(X)


def codiscrete(C: FinCat, S: Sequence) -> Presheaf:
    """``Lambda(S)(a)`` = functions ``Gamma(y_a) -> S``, as tuples of values."""
    S = [str(s) for s in S]
    pts = {a: gamma(representable(C, a)) for a in C.objects}
    sets = {a: tuple(itertools.product(S, repeat=len(pts[a]))) for a in C.objects}
    pos = {a: {v: n for n, v in enumerate(sets[a])} for a in C.objects}
    action = {}
    for f in C.arrows:
        yf = yoneda(representable(C, f.cod), f.dom, f.name)
        where = [pts[f.cod].index(yf @ g) for g in pts[f.dom]]
        action[f.name] = tuple(pos[f.dom][tuple(phi[w] for w in where)] for phi in sets[f.cod])
    return Presheaf(C, sets, action, check=False)


def counit_delta_gamma(X: Presheaf) -> NatTrans:
    """``Delta Gamma X -> X``, ``(gamma, a) |-> gamma_a(*)``."""
    C = X.index
    pts = gamma(X)
    D = constant(C, [str(n) for n in range(len(pts))])
    return NatTrans(D, X, [[g.at(a)[0] for g in pts] for a in C.objects])


def pi_product_map(X: Presheaf, Y: Presheaf) -> tuple[tuple[int, int], ...]:
    """``Pi(X x Y) -> Pi X x Pi Y`` as a list of component pairs."""
    p1, p2 = projections(X, Y)
    return tuple(zip(pi_map(p1), pi_map(p2)))


# --- adjunction bijections ----------------------------------------------------------------

def check_pi_delta(X: Presheaf, S: Sequence) -> bool:
    """``Nat(X, Delta S) ~ Fun(Pi X, S)``: maps are constant on components and
    every function arises exactly once."""
    C = X.index
    D = discrete(C, S)
    comps = pi0(X)
    funcs = set()
    maps = nat_list(X, D)
    for t in maps:
        vals = []
        for comp in comps:
            seen = {t.at(a)[i] for a, i in comp}
            if len(seen) != 1:
                return False
            vals.append(seen.pop())
        funcs.add(tuple(vals))
    return len(funcs) == len(maps) == len(S) ** len(comps)


def check_delta_gamma(X: Presheaf, S: Sequence) -> bool:
    """``Nat(Delta S, X) ~ Fun(S, Gamma X)`` via ``s |-> (a |-> t_a(s))``."""
    C = X.index
    D = discrete(C, S)
    pts = {g.comp: n for n, g in enumerate(gamma(X))}
    one = terminal(C)
    funcs = set()
    maps = nat_list(D, X)
    for t in maps:
        vals = []
        for k in range(len(S)):
            g = NatTrans(one, X, [[c[k]] for c in t.comp])
            if g.violations():
                return False
            vals.append(pts[g.comp])
        funcs.add(tuple(vals))
    return len(funcs) == len(maps) == len(pts) ** len(S)


def check_gamma_lambda(X: Presheaf, S: Sequence) -> bool:
    """``Fun(Gamma X, S) ~ Nat(X, Lambda S)``; a function ``g`` goes to
    ``t_a(x) = (sigma |-> g(x^ . sigma))``."""
    C = X.index
    L = codiscrete(C, S)
    S = [str(s) for s in S]
    pts = gamma(X)
    where = {g.comp: n for n, g in enumerate(pts)}
    ypts = {a: gamma(representable(C, a)) for a in C.objects}
    built = set()
    for g in itertools.product(range(len(S)), repeat=len(pts)):
        comp = []
        for a in C.objects:
            col = []
            for x in X.sets[a]:
                xh = yoneda(X, a, x)
                val = tuple(S[g[where[(xh @ sg).comp]]] for sg in ypts[a])
                col.append(L.position(a, val))
            comp.append(col)
        t = NatTrans(X, L, comp)
        if t.violations():
            return False
        built.add(t.comp)
    return built == {t.comp for t in enumerate_nat(X, L)}


# --- reports -----------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, **self.detail}


@dataclass
class CohesionReport:
    site: str
    bound: int
    checks: list[Check]

    @property
    def mclarty(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {"site": self.site, "bound": self.bound, "mclarty": self.mclarty,
                "checks": [c.as_dict() for c in self.checks]}


def _describe(X: Presheaf, names: dict) -> str:
    return names.get(X) or label(X.profile())


def objects_at_bound(C: FinCat, bound: int, extra: Sequence[tuple[str, Presheaf]] = ()):
    """Family members first (named), then enumerated presheaves not already present."""
    fam = test_family(C, extra)
    names = {X: n for n, X in fam}
    objs = [X for _, X in fam]
    for n, X in enumerate(enumerate_presheaves(C, bound)):
        if not any(X.profile() == Y.profile() and iso_search(X, Y) for Y in objs):
            names[X] = f"enum:{n}"
            objs.append(X)
    return objs, names


def mclarty_report(C: FinCat, bound: int = 3, *, site_id: str = "",
                   extra: Sequence[tuple[str, Presheaf]] = ()) -> CohesionReport:
    rep = _mclarty(C, bound, tuple(extra))
    return CohesionReport(site_id, bound, rep.checks)


@functools.lru_cache(maxsize=32)
def _mclarty(C: FinCat, bound: int, extra: tuple) -> CohesionReport:
    objs, names = objects_at_bound(C, bound, extra)
    checks = []

    # Delta fully faithful: Nat(Delta S, Delta S') ~ Fun(S, S')
    bad = None
    for m, n in itertools.product(range(1, bound + 1), repeat=2):
        got = len(nat_list(discrete(C, range(m)), discrete(C, range(n))))
        if got != n ** m:
            bad = {"sizes": [m, n], "maps": got, "functions": n ** m}
            break
    checks.append(Check("delta_fully_faithful", bad is None, {"counterexample": bad} if bad else {}))

    bad = next((X for X in objs if not counit_delta_gamma(X).is_mono()), None)
    checks.append(Check("counit_monic", bad is None,
                        {"counterexample": _describe(bad, names)} if bad else {}))

    # binary pairs first, then the empty product Pi(1) = 1
    bad = None
    for X, Y in itertools.combinations_with_replacement(objs, 2):
        m = pi_product_map(X, Y)
        if len(set(m)) != len(m) or len(m) != pi(X) * pi(Y):
            bad = {"pair": [_describe(X, names), _describe(Y, names)],
                   "pi_product": len(m), "pi_left": pi(X), "pi_right": pi(Y)}
            break
    if bad is None and pi(terminal(C)) != 1:
        bad = {"pair": [], "pi_product": pi(terminal(C)), "pi_left": 1, "pi_right": 1}
    checks.append(Check("pi_preserves_products", bad is None,
                        {"counterexample": bad} if bad else {}))

    bad = next((X for X in objs if not X.is_empty() and not gamma(X)), None)
    checks.append(Check("nullstellensatz", bad is None,
                        {"counterexample": _describe(bad, names)} if bad else {}))

    n_omega = len(gamma(omega(C)))
    checks.append(Check("two_valued", n_omega == 2, {"gamma_omega": n_omega}))

    bad = None
    for X in objs:
        U = image(to_terminal(X)).to_presheaf()
        if next(enumerate_nat(U, X), None) is None:
            bad = X
            break
    checks.append(Check("supports_split", bad is None,
                        {"counterexample": _describe(bad, names)} if bad else {}))
    return CohesionReport("", bound, checks)


def string_adjunctions(C: FinCat, family: Sequence[Presheaf], sizes=(0, 1, 2)) -> dict[str, bool]:
    res = {"pi_delta": True, "delta_gamma": True, "gamma_lambda": True}
    for X in family:
        for n in sizes:
            S = list(range(n))
            res["pi_delta"] &= check_pi_delta(X, S)
            res["delta_gamma"] &= check_delta_gamma(X, S)
            res["gamma_lambda"] &= check_gamma_lambda(X, S)
    return res


# --- connectedness, rigidity, contractibility ------------------------------------------------

def is_connected(X: Presheaf) -> bool:
    return pi(X) == 1


def first_point(T: Presheaf) -> NatTrans:
    pts = gamma(T)
    if not pts:
        raise HypothesisNotMet("object has no global element")
    return pts[0]


def no_motion_check(T: Presheaf, A: Presheaf, p: NatTrans | None = None) -> bool:
    """``ev^0_A = ev . <id, 0 . !>: A^T -> A`` is an isomorphism."""
    p = first_point(T) if p is None else p
    return eval_at_point(p, A).is_iso()


def right_adjoint_rigidity(T: Presheaf, Y: Presheaf) -> dict[str, bool]:
    """``Gamma(Y_T) ~ Gamma(Y)`` through ``1^T ~ 1``, and ``Pi(Y_!)`` bijective."""
    if not is_atomic(T).atomic:
        raise HypothesisNotMet("object is not atomic")
    C = T.index
    one = terminal(C)
    R = right_adjoint(T, Y)
    one_T = exponential(T, one).obj
    bang = to_terminal(one_T)
    images = [R.transpose(g @ bang, one) for g in gamma(Y)]
    targets = gamma(R.obj)
    gamma_iso = len(set(images)) == len(images) == len(targets) and set(images) == set(targets)
    m = pi_map(sub_bang(T, Y))
    pi_iso = len(set(m)) == len(m) == pi(Y)
    return {"gamma_iso": gamma_iso, "pi_iso": pi_iso}


def is_contractible_family(T: Presheaf, family: Sequence[Presheaf]) -> bool:
    return all(pi(exponential(X, T).obj) == 1 for X in family)


def atomic_contractible(T: Presheaf, decidables: Sequence[Presheaf],
                        family: Sequence[Presheaf]) -> dict:
    """The three contractibility indicators for an atomic ``T``."""
    if not is_atomic(T).atomic:
        raise HypothesisNotMet("object is not atomic")
    p = first_point(T)
    C = T.index
    two_zero = sub_point(p, two(C)).is_iso()
    a_zero = [sub_point(p, A).is_iso() for A in decidables]
    pis = []
    for X in family:
        m = pi_map(sigma(X, T))
        pis.append(len(set(m)) == len(m) == pi(exponential(T, X).obj))
    return {"two_zero_iso": two_zero, "a_zero_isos": a_zero, "pi_exponential_isos": pis}


def decidables_and_atoms(C: FinCat, bound: int) -> dict:
    objs = enumerate_presheaves(C, bound)
    one = terminal(C)
    dec = [X for X in objs if is_decidable(X)]
    atoms = [X for X in objs if is_atomic(X).atomic]
    both = [X for X in dec if is_atomic(X).atomic]
    delta_reflects = all(not is_atomic(discrete(C, range(n))).atomic or n == 1
                         for n in range(bound + 1))
    return {
        "objects": len(objs), "decidable": len(dec), "atomic": len(atoms),
        "decidable_atomic": len(both),
        "decidable_atomic_terminal": all(iso_search(X, one) is not None for X in both),
        "delta_reflects_atomic": delta_reflects,
        "pi_preserves_atomic": all(pi(T) == 1 for T in atoms),
        "atomics": atoms,
    }
