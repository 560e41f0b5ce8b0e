"""Verification suites over the builtin sites, the explicit Set^E exponential,
and a search for atomic objects over small generated sites."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import atomic as at
from . import cohesion as co
from . import diagram as dg
from ._util import BudgetExceeded
from .diagram import NatTrans, Presheaf, identity, iso_search, nat_list, terminal
from .fincat import FinCat, from_table, monoid_category, opposite, poset_category
from .sites import BUILTIN_IDS, builtin, builtin_sites


@dataclass
class SuiteResult:
    suite: str
    bound: int
    checks: list[co.Check] = field(default_factory=list)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, **detail) -> None:
        self.checks.append(co.Check(name, bool(passed), detail))

    def as_dict(self, timing: bool = False) -> dict:
        d = {"suite": self.suite, "bound": self.bound, "passed": self.passed,
             "checks": [c.as_dict() for c in self.checks]}
        if timing and self.wall_time is not None:
            d["wall_time"] = round(self.wall_time, 3)
        return d


def family(C: FinCat) -> list[Presheaf]:
    return [X for _, X in dg.test_family(C)]


def atomics_at_bound(C: FinCat, bound: int) -> list[Presheaf]:
    """Atomic objects among the family and the presheaves enumerated at ``bound``,
    one per isomorphism class."""
    out: list[Presheaf] = []
    for X in family(C) + dg.enumerate_presheaves(C, bound):
        if at.is_atomic(X).atomic and not any(
                X.profile() == Y.profile() and iso_search(X, Y) for Y in out):
            out.append(X)
    return out


def mclarty_sites(bound: int) -> list:
    return [s for s in builtin_sites() if co.mclarty_report(s.category, bound).mclarty]


def _name(X: Presheaf, C: FinCat) -> str:
    for n, Y in dg.test_family(C):
        if Y == X:
            return n
    return "profile" + dg.label(X.profile())


# --- individual suites -------------------------------------------------------------

def suite_setE_atoms(res: SuiteResult, bound: int) -> None:
    C = builtin("E-op").category
    one = terminal(C)
    objs = dg.enumerate_presheaves(C, bound)
    atomic = []
    for X in objs:
        v = at.is_atomic(X)
        res.add(f"verdict replays: {dg.label(X.to_raw()['action'])}", v.verify())
        if v.atomic:
            atomic.append(X)
    res.add("only the terminal object is atomic",
            len(atomic) == 1 and iso_search(atomic[0], one) is not None,
            objects=len(objs), atomic=len(atomic))


def single_fixed_point(C: FinCat, n: int) -> Presheaf:
    """The E-set with ``n`` elements whose idempotent sends everything to ``"0"``."""
    sets = {"*": [str(i) for i in range(n)]}
    return Presheaf(C, sets, {"e": [0] * n})


class ExplicitSetEExponential:
    """``B^A`` as equivariant maps ``f: Z2 x A -> B`` with
    ``f(0, alpha a) = beta f(n, a)``, acted on by ``f |-> f . (0 x 1)``."""

    def __init__(self, A: Presheaf, B: Presheaf):
        self.A, self.B = A, B
        C = A.index
        As, Bs = A.sets["*"], B.sets["*"]
        alpha = [As[j] for j in A.action["e"]]
        beta = {b: Bs[j] for b, j in zip(Bs, B.action["e"])}
        dom = [(n, a) for n in (0, 1) for a in As]
        maps = []
        for vals in itertools.product(Bs, repeat=len(dom)):
            f = dict(zip(dom, vals))
            if all(f[(0, al)] == beta[f[(n, a)]] for n, a in dom for al in [alpha[As.index(a)]]):
                maps.append(tuple(vals))
        self.dom = dom
        self.maps = maps
        pos = {m: i for i, m in enumerate(maps)}
        shift = [dom.index((0, a)) for _, a in dom]
        act = [pos[tuple(m[s] for s in shift)] for m in maps]
        self.obj = Presheaf(C, {"*": maps}, {"e": act})

    def value(self, f: tuple, n: int, a) -> object:
        return f[self.dom.index((n, a))]

    def ev(self) -> NatTrans:
        """``ev(f, a) = f(1, a)``."""
        P = dg.product(self.obj, self.A)
        col = [self.B.position("*", self.value(f, 1, a)) for f, a in P.sets["*"]]
        return NatTrans(P, self.B, [col], check=True)

    def transpose(self, g: NatTrans, Z: Presheaf) -> NatTrans:
        """``g^(c)(n, a) = g(s^(1-n) c, a)`` with ``s`` the action on ``Z``."""
        col = []
        for c in Z.sets["*"]:
            f = []
            for n, a in self.dom:
                cc = c if n == 1 else Z.act("e", c)
                f.append(g.apply("*", (cc, a)))
            col.append(self.obj.position("*", tuple(f)))
        return NatTrans(Z, self.obj, [col], check=True)

    def comparison(self) -> NatTrans:
        """To the generic exponential: ``phi(u, a) = f(n(u), a)`` with
        ``n(1) = 1``, ``n(e) = 0``."""
        E = dg.exponential(self.A, self.B)
        col = []
        for f in self.maps:
            comp = [tuple(self.B.position("*", self.value(f, 1 if u == "1" else 0, a))
                          for u, a in E.prods["*"].sets["*"])]
            col.append(E.index_of("*", tuple(comp)))
        return NatTrans(self.obj, E.obj, [col], check=True)


def setE_exponential_crosscheck(A: Presheaf, B: Presheaf,
                                probes: Sequence[Presheaf] = ()) -> dict[str, bool]:
    ex = ExplicitSetEExponential(A, B)
    E = dg.exponential(A, B)
    c = ex.comparison()
    iso = c.is_iso()
    ev_ok = E.ev @ dg.product_map(c, identity(A)) == ex.ev()
    tr_ok = True
    for Z in probes:
        for g in dg.enumerate_nat(dg.product(Z, A), B):
            tr_ok &= c @ ex.transpose(g, Z) == E.transpose(g, Z)
    return {"iso": iso, "ev": ev_ok, "transpose": tr_ok}


def suite_setE_exponentials(res: SuiteResult, bound: int) -> None:
    C = builtin("E-op").category
    probes = dg.enumerate_presheaves(C, 2)
    for n, m in itertools.product(range(1, bound + 1), repeat=2):
        X, T = single_fixed_point(C, n), single_fixed_point(C, m)
        XT = dg.exponential(T, X).obj
        size = XT.size("*")
        fix = sum(1 for i, j in enumerate(XT.action["e"]) if i == j)
        res.add(f"|X^T| = |X|^(2|T|-1) for |X|={n}, |T|={m}", size == n ** (2 * m - 1),
                got=size, expected=n ** (2 * m - 1))
        res.add(f"|Fix| = |X|^(|T|-1) for |X|={n}, |T|={m}", fix == n ** (m - 1),
                got=fix, expected=n ** (m - 1))
        cc = setE_exponential_crosscheck(T, X, probes if n * m <= 4 else ())
        res.add(f"explicit exponential agrees for |X|={n}, |T|={m}", all(cc.values()), **cc)


def suite_two_sub_t(res: SuiteResult, bound: int) -> None:
    C = builtin("chain3").category
    two = dg.two(C)
    for t in C.objects:
        T = dg.representable(C, t)
        R = at.right_adjoint(T, two)
        iso = iso_search(R.obj, two)
        res.add(f"2_(y_{t}) ~ 2", iso is not None and not iso.violations())
        res.add(f"Gamma(2_(y_{t})) has 2 elements", len(co.gamma(R.obj)) == 2)


def suite_density(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        for X in family(C) + dg.enumerate_presheaves(C, min(bound, 2)):
            _, m = dg.density_comparison(X)
            res.add(f"{s.id}: density {_name(X, C)}", m.is_iso() and not m.violations())


def suite_engine(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        fam = family(C)
        for X in fam:
            nm = _name(X, C)
            res.add(f"{s.id}: Yoneda counts {nm}",
                    all(len(nat_list(dg.representable(C, c), X)) == X.size(c) for c in C.objects))
            res.add(f"{s.id}: Yoneda natural {nm}", yoneda_natural(X))
            res.add(f"{s.id}: |Nat({nm}, 1)| = 1", len(nat_list(X, terminal(C))) == 1)
            _, m = dg.density_comparison(X)
            res.add(f"{s.id}: density {nm}", m.is_iso())
            res.add(f"{s.id}: singleton monic {nm}", dg.singleton(X).is_mono())
            uniq = all(dg.classifying_maps(S) == [dg.classify(S)] for S in dg.subobjects(X))
            res.add(f"{s.id}: classifier unique on subobjects of {nm}", uniq)
            for Y in fam:
                ok = all(epi_mono_laws(f) for f in nat_list(X, Y))
                res.add(f"{s.id}: epi-mono laws {nm} -> {_name(Y, C)}", ok)
        for c in C.objects:
            yc = dg.representable(C, c)
            comp = [S for S in dg.subobjects(yc) if dg.is_complemented(S)]
            res.add(f"{s.id}: y_{c} has only trivial complemented subobjects",
                    len(comp) == 2 and all(S.is_bottom() or S.is_top() for S in comp))
            res.add(f"{s.id}: y_{c} connected", co.pi(yc) == 1)


def yoneda_natural(X: Presheaf) -> bool:
    """``x |-> x^`` commutes with the actions: ``(X(f)x)^ = x^ . y_f``."""
    C = X.index
    for f in C.arrows:
        yf = dg.representable_map(C, f.name)
        for x in X.sets[f.cod]:
            if dg.yoneda(X, f.dom, X.act(f.name, x)) != dg.yoneda(X, f.cod, x) @ yf:
                return False
    return all(dg.yoneda_element(dg.yoneda(X, c, x), c) == x
               for c in C.objects for x in X.sets[c])


def epi_mono_laws(f: NatTrans) -> bool:
    e, m = dg.epi_mono_factorize(f)
    if not (e.is_epi() and m.is_mono() and m @ e == f):
        return False
    # least: any mono n with f factoring through n contains the image
    im = dg.image(f)
    for S in dg.subobjects(f.cod):
        contains_f = all(v in S.members[k] for k, c in enumerate(f.comp) for v in c)
        if contains_f and not all(im.members[k] <= S.members[k] for k in range(len(f.comp))):
            return False
    return True


def suite_adjunction(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        fam = family(C)
        for T in atomics_at_bound(C, min(bound, 2)):
            tn = _name(T, C)
            for X in fam:
                xn = _name(X, C)
                R = at.right_adjoint(T, X)
                ok = all(R.check_adjunction(Y)["bijective"] for Y in fam)
                res.add(f"{s.id}: T={tn}, X={xn}: transposes inverse", ok)
                tri = at.triangle_identities(T, X)
                res.add(f"{s.id}: T={tn}, X={xn}: triangle identities", all(tri.values()))
            res.add(f"{s.id}: T={tn}: transposes natural", adjunction_natural(T, fam))


def adjunction_natural(T: Presheaf, fam: Sequence[Presheaf]) -> bool:
    """Naturality in both variables of ``Nat(Y^T, X) ~ Nat(Y, X_T)`` against
    every map between family members."""
    for X in fam:
        R = at.right_adjoint(T, X)
        for Y in fam:
            hs = nat_list(dg.exponential(T, Y).obj, X)
            for Y2 in fam:
                for g in nat_list(Y2, Y):
                    gT = dg.exp_map(g, T)
                    for h in hs:
                        if R.transpose(h @ gT, Y2) != R.transpose(h, Y) @ g:
                            return False
            for X2 in fam:
                R2 = at.right_adjoint(T, X2)
                for x in nat_list(X, X2):
                    xT = at.ra_map(x, T)
                    for h in hs:
                        if R2.transpose(x @ h, Y) != xT @ R.transpose(h, Y):
                            return False
    return True


def suite_thmB(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        fam = family(C)
        atoms = atomics_at_bound(C, min(bound, 2))
        for T, S in itertools.combinations_with_replacement(atoms, 2):
            res.add(f"{s.id}: product of atomics {_name(T, C)} x {_name(S, C)} atomic",
                    at.is_atomic(dg.product(T, S)).atomic)
        for T in atoms:
            for q, i in at.splittings(T):
                retract_checks(res, f"{s.id}: {_name(T, C)} split {dg.label(q.cod.profile())}",
                               T, q, i, fam)


def retract_checks(res: SuiteResult, tag: str, T, q, i, fam) -> None:
    Q = q.cod
    res.add(f"{tag}: retract atomic", at.is_atomic(Q).atomic)
    adj = {X: at.RetractAdjoint(T, q, i, X) for X in fam}
    ok = all(adj[X].check(Y)["bijective"] for X in fam for Y in fam)
    res.add(f"{tag}: Z represents Nat((-)^Q, X)", ok)
    if not at.is_atomic(Q).atomic:
        return
    thetas = {X: adj[X].comparison() for X in fam}
    res.add(f"{tag}: Z ~ X_Q", all(t.is_iso() and not t.violations() for t in thetas.values()))
    nat = True
    for X in fam:
        for X2 in fam:
            for x in nat_list(X, X2):
                nat &= thetas[X2] @ adj[X].z_map(adj[X2], x) == at.ra_map(x, Q) @ thetas[X]
    res.add(f"{tag}: Z ~ X_Q natural in X", nat)


def suite_thmA(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        one = terminal(C)
        for X in family(C):
            res.add(f"{s.id}: j_(1,{_name(X, C)}) = singleton", at.j_equals_singleton(X))
            r = at.thmA_suite(identity(one), X)
            res.add(f"{s.id}: T=1, X={_name(X, C)}: diagrams", all(r.values()),
                    **{k: v for k, v in r.items() if not v})
    catalog = atom_site_search(SearchConfig(bound=min(bound, 2)))
    for entry in catalog:
        for T, pts in zip(entry["atomics"], entry["points"]):
            if pts == 0:
                continue
            thmA_on(res, entry["site"], entry["category"], T, entry["atomics"])


def thmA_on(res: SuiteResult, site: str, C: FinCat, T: Presheaf, atoms) -> None:
    fam = family(C)
    others = [f for S in atoms for f in nat_list(T, S)]
    for p in co.gamma(T):
        for X in fam:
            r = at.thmA_suite(p, X, others)
            res.add(f"{site}: T={dg.label(T.profile())}, X={_name(X, C)}: j monic and squares",
                    all(r.values()), **{k: v for k, v in r.items() if not v})


def suite_thmC(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        rep = co.mclarty_report(C, min(bound, 3))
        if not rep.mclarty:
            one = terminal(C)
            res.add(f"{s.id}: exploratory (fails {', '.join(rep.failing())}); "
                    f"1 atomic with {co.pi(one)} pieces", True,
                    atomic=at.is_atomic(one).atomic, pieces=co.pi(one))
            continue
        d = co.decidables_and_atoms(C, bound)
        res.add(f"{s.id}: atomic and decidable implies terminal", d["decidable_atomic_terminal"],
                decidable=d["decidable"], atomic=d["atomic"])
        res.add(f"{s.id}: atomic implies connected", all(co.is_connected(T) for T in d["atomics"]))
        res.add(f"{s.id}: Delta reflects atomic objects", d["delta_reflects_atomic"])
        res.add(f"{s.id}: Pi preserves atomic objects", d["pi_preserves_atomic"])


def suite_thmD(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        if not co.mclarty_report(C, min(bound, 3)).mclarty:
            continue
        for T in atomics_at_bound(C, bound):
            for Y in family(C):
                r = co.right_adjoint_rigidity(T, Y)
                res.add(f"{s.id}: T={_name(T, C)}, Y={_name(Y, C)}: Gamma(Y_T) ~ Gamma(Y)",
                        r["gamma_iso"])
                res.add(f"{s.id}: T={_name(T, C)}, Y={_name(Y, C)}: Pi(Y_!) iso", r["pi_iso"])


def suite_contractibility(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        if not co.mclarty_report(C, min(bound, 3)).mclarty:
            continue
        fam = family(C)
        dec = [X for X in dg.enumerate_presheaves(C, bound) if dg.is_decidable(X)]
        for T in atomics_at_bound(C, bound):
            r = co.atomic_contractible(T, dec, fam)
            flags = [r["two_zero_iso"], all(r["a_zero_isos"]), all(r["pi_exponential_isos"]),
                     co.is_contractible_family(T, fam)]
            res.add(f"{s.id}: T={_name(T, C)}: indicators agree", len(set(flags)) == 1,
                    indicators=flags)
            res.add(f"{s.id}: T={_name(T, C)}: contractible", all(flags))
            for A in dec:
                res.add(f"{s.id}: T={_name(T, C)}: no motion for decidable "
                        f"{dg.label(A.profile())}", co.no_motion_check(T, A))


def suite_section3(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        C = s.category
        fam = family(C)
        atoms = atomics_at_bound(C, min(bound, 2))
        for T, S in itertools.product(atoms, repeat=2):
            tag = f"{s.id}: {_name(T, C)} -> {_name(S, C)}"
            for n, f in enumerate(nat_list(T, S)):
                phi = at.sub_family(f, fam)
                psi = at.phi_to_psi(phi, T, S)
                res.add(f"{tag} [{n}]: phi natural", not phi.naturality_failures())
                res.add(f"{tag} [{n}]: psi natural", not psi.naturality_failures())
                res.add(f"{tag} [{n}]: round trip", at.psi_to_phi(psi, T, S).equals(phi))
                res.add(f"{tag} [{n}]: X_f unique",
                        all(at.sub_f_candidates(f, X) == [phi(X)] for X in fam))
            idT = at.identity_family(at.ra_functor(T), fam)
            if T == S:
                res.add(f"{tag}: identity goes to identity", at.phi_to_psi(idT, T, T).equals(
                    at.identity_family(at.exp_functor(T), fam)))
        for T in atoms:
            for p in co.gamma(T):
                res.add(f"{s.id}: X_! . X_p = id for T={_name(T, C)}",
                        all(at.sub_bang(T, X) @ at.sub_point(p, X) == identity(X) for X in fam))
        reps = [dg.representable(C, c) for c in C.objects]
        for B, A in itertools.product(reps, repeat=2):
            for f in nat_list(B, A):
                pf = at.prod_family(f, fam)
                back = at.exp_to_prod(at.prod_to_exp(pf, A, B), A, B)
                rec = at.recover_arrow(back, A, B)
                res.add(f"{s.id}: (-) x f recovered for f: {_name(B, C)} -> {_name(A, C)}",
                        back.equals(pf) and rec["is_product_with_arrow"] and rec["arrow"] == f)


def suite_mclarty(res: SuiteResult, bound: int) -> None:
    for s in builtin_sites():
        rep = co.mclarty_report(s.category, bound, site_id=s.id)
        want = s.expected.get("mclarty")
        res.add(f"{s.id}: McLarty profile as expected", rep.mclarty == want,
                failing=rep.failing())
        if not rep.mclarty:
            res.add(f"{s.id}: failing checks as expected",
                    sorted(rep.failing()) == sorted(s.expected.get("failing", [])),
                    failing=rep.failing())


SUITES: dict[str, Callable[[SuiteResult, int], None]] = {
    "thmA": suite_thmA,
    "thmB": suite_thmB,
    "thmC": suite_thmC,
    "thmD": suite_thmD,
    "contractibility": suite_contractibility,
    "section3": suite_section3,
    "setE_atoms": suite_setE_atoms,
    "setE_exponentials": suite_setE_exponentials,
    "two_sub_t": suite_two_sub_t,
    "density": suite_density,
    "engine": suite_engine,
    "adjunction": suite_adjunction,
    "mclarty": suite_mclarty,
}

DEFAULT_BOUNDS = {"setE_atoms": 4, "thmC": 4}


def run_suite(suite_id: str, bound: int | None = None) -> SuiteResult:
    if suite_id not in SUITES:
        raise KeyError(f"unknown suite {suite_id!r}; known: {', '.join(SUITES)}")
    bound = DEFAULT_BOUNDS.get(suite_id, 3) if bound is None else bound
    if bound < 1:
        raise ValueError("bound must be at least 1")
    res = SuiteResult(suite_id, bound)
    start = time.perf_counter()
    try:
        SUITES[suite_id](res, bound)
    except BudgetExceeded as exc:
        res.add("budget", False, error=str(exc))
        res.wall_time = time.perf_counter() - start
        raise
    res.wall_time = time.perf_counter() - start
    return res


# --- search over small sites ------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    max_poset: int = 3
    max_monoid: int = 3
    finset_sizes: tuple[int, ...] = (0, 1, 2)
    bound: int = 2
    include_builtins: bool = True


def posets(n: int) -> Iterable[tuple[str, FinCat]]:
    """Partial orders on ``n`` points, one per isomorphism class."""
    pts = list(range(n))
    pairs = [(a, b) for a in pts for b in pts if a != b]
    seen = set()
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = {p for p, bit in zip(pairs, bits) if bit}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, b) in rel and (b, c) in rel and a != c and (a, c) not in rel
               for a, b, c in itertools.permutations(pts, 3)):
            continue
        canon = min(tuple(sorted((perm[a], perm[b]) for a, b in rel))
                    for perm in itertools.permutations(pts))
        if canon in seen:
            continue
        seen.add(canon)
        names = [str(p) for p in pts]
        C = poset_category(names, lambda a, b, rel=rel: a == b or (int(a), int(b)) in rel)
        yield f"poset{n}:{sorted(rel)}", C


def monoids(n: int) -> Iterable[tuple[str, list[list[int]]]]:
    """Monoid tables on ``{0..n-1}`` with unit 0, one per isomorphism class."""
    els = list(range(n))
    rest = els[1:]
    seen = set()
    for vals in itertools.product(els, repeat=len(rest) ** 2):
        tab = [[0] * n for _ in els]
        for x in els:
            tab[0][x] = x
            tab[x][0] = x
        for (x, y), v in zip(itertools.product(rest, rest), vals):
            tab[x][y] = v
        if any(tab[tab[x][y]][z] != tab[x][tab[y][z]] for x in els for y in els for z in els):
            continue
        canon = min(tuple(tuple(inv[tab[perm[x]][perm[y]]] for y in els) for x in els)
                    for perm in [(0,) + p for p in itertools.permutations(rest)]
                    for inv in [{v: k for k, v in enumerate(perm)}])
        if canon in seen:
            continue
        seen.add(canon)
        yield f"monoid{n}:{canon}", tab


def monoid_site(tab) -> FinCat:
    names = ["1"] + [f"m{x}" for x in range(1, len(tab))]
    return monoid_category(names, lambda x, y: names[tab[names.index(x)][names.index(y)]], "1")


def finset_site(sizes: Sequence[int]) -> FinCat:
    """Full subcategory of finite sets on the given cardinalities."""
    objs = [f"n{k}" for k in sizes]
    arrows, funcs = [], {}
    for a, m in zip(objs, sizes):
        for b, n in zip(objs, sizes):
            for f in itertools.product(range(n), repeat=m):
                name = f"id_{a}" if a == b and f == tuple(range(m)) else f"{a}>{b}:{''.join(map(str, f))}"
                funcs[name] = (a, b, f)
                if not name.startswith("id_"):
                    arrows.append((name, a, b))
    lookup = {v: k for k, v in funcs.items()}
    compose = []
    for g, (b, c, gf) in funcs.items():
        for f, (a, b2, ff) in funcs.items():
            if b2 == b:
                compose.append((g, f, lookup[(a, c, tuple(gf[x] for x in ff))]))
    return from_table(objs, arrows, compose)


def generated_sites(cfg: SearchConfig) -> Iterable[tuple[str, FinCat]]:
    if cfg.include_builtins:
        for s in builtin_sites():
            yield f"builtin:{s.id}", s.category
    for n in range(1, cfg.max_poset + 1):
        yield from posets(n)
    for n in range(2, cfg.max_monoid + 1):
        for name, tab in monoids(n):
            C = monoid_site(tab)
            yield name, C
            yield name + ":op", opposite(C)
    for k in range(1, len(cfg.finset_sizes) + 1):
        for sizes in itertools.combinations(cfg.finset_sizes, k):
            C = finset_site(sizes)
            yield f"finset{list(sizes)}", C
            yield f"finset{list(sizes)}:op", opposite(C)


def retracts_of_representables(C: FinCat) -> list[Presheaf]:
    out = []
    for c in C.objects:
        yc = dg.representable(C, c)
        for q, _ in at.splittings(yc):
            out.append(q.cod)
    return out


def atom_site_search(cfg: SearchConfig = SearchConfig()) -> list[dict]:
    """Catalog atomic objects (with their numbers of points) over generated sites.

    Candidates are 1, the retracts of representables and the presheaves with
    at most ``cfg.bound`` elements per object.
    """
    catalog = []
    for name, C in generated_sites(cfg):
        cands = [terminal(C)] + retracts_of_representables(C) + dg.enumerate_presheaves(C, cfg.bound)
        atoms: list[Presheaf] = []
        for X in cands:
            if at.is_atomic(X).atomic and not any(
                    X.profile() == Y.profile() and iso_search(X, Y) for Y in atoms):
                atoms.append(X)
        catalog.append({
            "site": name, "category": C, "atomics": atoms,
            "points": [len(co.gamma(T)) for T in atoms],
            "connected": [co.is_connected(T) for T in atoms],
            "terminal": [iso_search(T, terminal(C)) is not None for T in atoms],
        })
    return catalog


def pointed_nonterminal(catalog: Sequence[dict]) -> list[tuple[str, Presheaf]]:
    return [(e["site"], T) for e in catalog
            for T, p, t in zip(e["atomics"], e["points"], e["terminal"]) if p and not t]


def builtin_profile(site_id: str, bound: int = 3) -> dict:
    """Computed counterpart of a builtin's expected-profile record."""
    C = builtin(site_id).category
    rep = co.mclarty_report(C, bound)
    prof = {"mclarty": rep.mclarty,
            "atomic_representables": sorted(c for c in C.objects
                                            if at.is_atomic(dg.representable(C, c)).atomic)}
    if not rep.mclarty:
        prof["failing"] = sorted(rep.failing())
    atoms = atomics_at_bound(C, min(bound, 2))
    if all(iso_search(T, terminal(C)) is not None for T in atoms) and len(atoms) == 1:
        prof["atomics"] = ["1"]
    return prof


__all__ = ["SUITES", "SuiteResult", "run_suite", "atom_site_search", "SearchConfig", "pointed_nonterminal",
           "setE_exponential_crosscheck", "BUILTIN_IDS", "builtin_profile"]
