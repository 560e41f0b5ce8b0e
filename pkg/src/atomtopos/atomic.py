"""Atomicity decisions and the calculus of amazing right adjoints.

``T`` is atomic when ``(-)^T`` has a right adjoint ``(-)_T``. In a presheaf
topos on a finite category this holds iff every ``y_a x T`` is a retract of a
representable, which turns the question into finitely many finite searches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .diagram import (
    NatTrans, Presheaf, SubPresheaf, classify, count_nat, diagonal, enumerate_nat, epi_mono_factorize,
    exp_contra, exp_map, exponential, identity, iso_search, nat_list, omega, pairing,
    product, product_map, projections, representable, representable_map, sigma, singleton,
    terminal, yoneda,
)


class NotAtomicError(ValueError):
    pass


class NoPointError(ValueError):
    pass


# --- tininess and atomicity ------------------------------------------------------

@dataclass(frozen=True)
class Retraction:
    """``X`` is a retract of ``y_c``: ``s: X -> y_c``, ``r: y_c -> X``, ``r.s = id``."""

    c: str
    s: NatTrans
    r: NatTrans

    def holds(self) -> bool:
        return (self.r @ self.s) == identity(self.s.dom)


@dataclass(frozen=True)
class TinyVerdict:
    subject: Presheaf
    witness: Retraction | None
    log: tuple[dict, ...]

    @property
    def tiny(self) -> bool:
        return self.witness is not None


def is_tiny(X: Presheaf, *, budget: int | None = None) -> TinyVerdict:
    """Search every object ``c``, section ``s: X -> y_c`` and retraction
    ``r: y_c -> X`` (all of them, via Yoneda) for ``r.s = id``."""
    C = X.index
    ident = identity(X)
    log = []
    for c in C.objects:
        yc = representable(C, c)
        sections = nat_list(X, yc, budget=budget)
        retractions = [yoneda(X, c, x) for x in X.sets[c]]
        pairs = 0
        for s in sections:
            for r in retractions:
                pairs += 1
                if r @ s == ident:
                    log.append({"object": c, "sections": len(sections),
                                "retractions": len(retractions), "pairs_checked": pairs,
                                "found": True})
                    return TinyVerdict(X, Retraction(c, s, r), tuple(log))
        log.append({"object": c, "sections": len(sections),
                    "retractions": len(retractions), "pairs_checked": pairs, "found": False})
    return TinyVerdict(X, None, tuple(log))


@dataclass(frozen=True)
class AtomicityVerdict:
    """Either per-object witnesses that every ``y_a x T`` is a retract of a
    representable, or one object ``a`` whose search came up empty."""

    subject: Presheaf
    atomic: bool
    witnesses: Mapping[str, Retraction] = field(default_factory=dict)
    certificate: tuple[str, TinyVerdict] | None = None

    def verify(self) -> bool:
        """Replay the record: witnesses compose to identities, or the
        certificate's search covered every object with nothing found."""
        T = self.subject
        C = T.index
        if self.atomic:
            return set(self.witnesses) == set(C.objects) and all(
                w.s.dom == product(representable(C, a), T) and w.holds()
                for a, w in self.witnesses.items())
        if self.certificate is None:
            return False
        a, tv = self.certificate
        return (tv.witness is None and [e["object"] for e in tv.log] == list(C.objects)
                and tv.subject == product(representable(C, a), T))


@lru_cache(maxsize=4096)
def is_atomic(T: Presheaf) -> AtomicityVerdict:
    C = T.index
    witnesses = {}
    for a in C.objects:
        tv = is_tiny(product(representable(C, a), T))
        if not tv.tiny:
            return AtomicityVerdict(T, False, {}, (a, tv))
        witnesses[a] = tv.witness
    return AtomicityVerdict(T, True, witnesses)


# --- right adjoints ------------------------------------------------------------

@lru_cache(maxsize=None)
def _power_map(T: Presheaf, f: str) -> NatTrans:
    """``(y_f)^T: (y_a)^T -> (y_b)^T``."""
    return exp_map(representable_map(T.index, f), T)


class RightAdjoint:
    """``X_T`` with ``X_T(a) = Nat((y_a)^T, X)`` and the adjunction data.

    On a non-atomic ``T`` the same formula is computed but flagged
    ``candidate_only``; :meth:`adjunction_failure` then looks for a witness
    that the formula does not give a right adjoint.
    """

    def __init__(self, T: Presheaf, X: Presheaf, verdict: AtomicityVerdict | None = None):
        C = T.index
        self.T, self.X, self.index = T, X, C
        self.verdict = verdict if verdict is not None else is_atomic(T)
        self.candidate_only = not self.verdict.atomic
        self.powers = {a: exponential(T, representable(C, a)) for a in C.objects}
        sets = {a: tuple(enumerate_nat(self.powers[a].obj, X)) for a in C.objects}
        self._lookup = {a: {k.comp: n for n, k in enumerate(sets[a])} for a in C.objects}
        action = {}
        for f in C.arrows:
            yfT = _power_map(T, f.name)
            action[f.name] = tuple(self._lookup[f.dom][(k @ yfT).comp] for k in sets[f.cod])
        self.obj = Presheaf(C, sets, action, check=False)

    def index_of(self, a: str, comp) -> int:
        return self._lookup[a][comp]

    def transpose(self, h: NatTrans, Y: Presheaf) -> NatTrans:
        """``h: Y^T -> X`` to ``Y -> X_T``: ``y |-> h . (y^)^T``."""
        C, T = self.index, self.T
        comp = []
        for a in C.objects:
            col = []
            for y in Y.sets[a]:
                k = h @ exp_map(yoneda(Y, a, y), T)
                col.append(self._lookup[a][k.comp])
            comp.append(col)
        return NatTrans(Y, self.obj, comp)

    def untranspose(self, k: NatTrans, Y: Presheaf) -> NatTrans:
        """``k: Y -> X_T`` to ``Y^T -> X`` through the retraction witnesses."""
        if self.candidate_only:
            t, failures = self.untranspose_search(k, Y)
            if failures:
                raise NotAtomicError(f"no transpose: {failures[0]}")
            return t
        C, X = self.index, self.X
        EY = exponential(self.T, Y)
        comp = []
        for c in C.objects:
            w = self.verdict.witnesses[c]
            d = w.c
            rid = w.r.apply(d, C.identity(d))
            s_el = self.powers[d].element(c, w.s.comp)
            col = []
            for phi in EY.obj.sets[c]:
                y = phi.apply(d, rid)
                kd = k.apply(d, y)
                col.append(X.position(c, kd.apply(c, s_el)))
            comp.append(col)
        return NatTrans(EY.obj, X, comp)

    def untranspose_search(self, k: NatTrans, Y: Presheaf) -> tuple[NatTrans | None, list[str]]:
        """Untranspose without witnesses: for ``phi`` in ``Y^T(c)`` try every
        ``(d, y, psi)`` with ``y^ . psi = phi`` and demand one common value."""
        C, X, T = self.index, self.X, self.T
        EY = exponential(T, Y)
        pre: dict[tuple[str, int], list] = {}
        for d in C.objects:
            for yi, y in enumerate(Y.sets[d]):
                yhT = exp_map(yoneda(Y, d, y), T)
                kd = k.at(d)[yi]
                kd_nat = self.obj.sets[d][kd]
                for c in C.objects:
                    kc = C.obj_pos[c]
                    for psi_i, img in enumerate(yhT.comp[kc]):
                        pre.setdefault((c, img), []).append(kd_nat.comp[kc][psi_i])
        failures, comp = [], []
        for c in C.objects:
            col = []
            for n, phi in enumerate(EY.obj.sets[c]):
                vals = sorted(set(pre.get((c, n), ())))
                if not vals:
                    failures.append(f"element {n} of Y^T({c}) has no preimage")
                    col.append(0)
                elif len(vals) > 1:
                    failures.append(f"element {n} of Y^T({c}) has inconsistent values "
                                    f"{[X.sets[c][v] for v in vals]}")
                    col.append(vals[0])
                else:
                    col.append(vals[0])
            comp.append(col)
        if X.is_empty() and any(EY.obj.profile()):
            return None, failures or ["empty target with nonempty domain"]
        t = NatTrans(EY.obj, X, comp)
        bad = t.violations()
        failures.extend(bad)
        return (None if failures else t), failures

    def check_adjunction(self, Y: Presheaf) -> dict:
        """Bijection ``Nat(Y^T, X) ~ Nat(Y, X_T)``.

        Hom counts are compared first (componentwise, cheap). When they agree
        both sides are enumerated; for a genuine adjoint ``untranspose`` must
        invert ``transpose``, for a candidate ``transpose`` must be injective.
        """
        EY = exponential(self.T, Y)
        n_left, n_right = count_nat(EY.obj, self.X), count_nat(Y, self.obj)
        if n_left != n_right:
            return {"left": n_left, "right": n_right, "bijective": False,
                    "failure": {"direction": "count", "map": None,
                                "detail": [f"|Nat(Y^T, X)| = {n_left}, |Nat(Y, X_T)| = {n_right}"]}}
        left = nat_list(EY.obj, self.X)
        failure = None
        if self.candidate_only:
            seen: dict = {}
            for h in left:
                t = self.transpose(h, Y)
                if t in seen:
                    failure = {"direction": "transpose not injective", "map": h,
                               "detail": [f"collides with map {seen[t]}"]}
                    break
                seen[t] = len(seen)
        else:
            for h in left:
                if self.untranspose(self.transpose(h, Y), Y) != h:
                    failure = {"direction": "untranspose.transpose", "map": h, "detail": []}
                    break
            if failure is None:
                for k in nat_list(Y, self.obj):
                    if self.transpose(self.untranspose(k, Y), Y) != k:
                        failure = {"direction": "transpose.untranspose", "map": k, "detail": []}
                        break
        return {"left": n_left, "right": n_right, "bijective": failure is None,
                "failure": failure}

    def adjunction_failure(self, family: Sequence[Presheaf]) -> dict | None:
        for Y in family:
            res = self.check_adjunction(Y)
            if not res["bijective"]:
                return {"test_object": Y, **res}
        return None


@lru_cache(maxsize=1024)
def right_adjoint(T: Presheaf, X: Presheaf) -> RightAdjoint:
    return RightAdjoint(T, X)


def ra_map(g: NatTrans, T: Presheaf) -> NatTrans:
    """``g_T: X_T -> X'_T`` by postcomposition."""
    src, dst = right_adjoint(T, g.dom), right_adjoint(T, g.cod)
    C = T.index
    comp = []
    for a in C.objects:
        comp.append([dst.index_of(a, (g @ k).comp) for k in src.obj.sets[a]])
    return NatTrans(src.obj, dst.obj, comp)


def unit(T: Presheaf, Y: Presheaf) -> NatTrans:
    """``eta_Y: Y -> (Y^T)_T``."""
    YT = exponential(T, Y).obj
    return right_adjoint(T, YT).transpose(identity(YT), Y)


def counit(T: Presheaf, X: Presheaf) -> NatTrans:
    """``eps_X: (X_T)^T -> X``."""
    R = right_adjoint(T, X)
    return R.untranspose(identity(R.obj), R.obj)


def triangle_identities(T: Presheaf, X: Presheaf) -> dict[str, bool]:
    YT = exponential(T, X).obj
    first = counit(T, YT) @ exp_map(unit(T, X), T) == identity(YT)
    XT = right_adjoint(T, X).obj
    second = ra_map(counit(T, X), T) @ unit(T, XT) == identity(XT)
    return {"eps_T.eta^T": first, "eps_T.eta_T": second}


def require_atomic(T: Presheaf) -> AtomicityVerdict:
    v = is_atomic(T)
    if not v.atomic:
        raise NotAtomicError("object is not atomic")
    return v


# --- (-)_f, points and the bang map ---------------------------------------------------

def sub_f(f: NatTrans, X: Presheaf) -> NatTrans:
    """``X_f: X_T -> X_S`` for ``f: T -> S``: the S-transpose of
    ``eps_{T,X} . (X_T)^f``."""
    T, S = f.dom, f.cod
    require_atomic(T)
    require_atomic(S)
    XT = right_adjoint(T, X).obj
    return right_adjoint(S, X).transpose(counit(T, X) @ exp_contra(XT, f), XT)


def sub_f_square(f: NatTrans, X: Presheaf, m: NatTrans) -> bool:
    """``eps_{S,X} . m^S = eps_{T,X} . (X_T)^f``, the defining square of ``X_f``."""
    T, S = f.dom, f.cod
    XT = right_adjoint(T, X).obj
    return counit(S, X) @ exp_map(m, S) == counit(T, X) @ exp_contra(XT, f)


def sub_f_candidates(f: NatTrans, X: Presheaf) -> list[NatTrans]:
    """Every ``m: X_T -> X_S`` satisfying the defining square (by search)."""
    XT = right_adjoint(f.dom, X).obj
    XS = right_adjoint(f.cod, X).obj
    return [m for m in enumerate_nat(XT, XS) if sub_f_square(f, X, m)]


def eval_at_point(p: NatTrans, X: Presheaf) -> NatTrans:
    """``X^T -> X``, ``phi |-> phi_a(id_a, p_a(*))``."""
    T = p.cod
    C = T.index
    E = exponential(T, X)
    comp = []
    for a in C.objects:
        t = p.apply(a, "*")
        col = [X.position(a, phi.apply(a, (C.identity(a), t))) for phi in E.obj.sets[a]]
        comp.append(col)
    return NatTrans(E.obj, X, comp)


def sub_point(p: NatTrans, X: Presheaf) -> NatTrans:
    """``X_p: X -> X_T`` for a point ``p: 1 -> T``."""
    T = p.cod
    require_atomic(T)
    return right_adjoint(T, X).transpose(eval_at_point(p, X), X)


def sub_bang(T: Presheaf, X: Presheaf) -> NatTrans:
    """``X_!: X_T -> X``, ``eps_X . sigma^T_{X_T}``."""
    require_atomic(T)
    XT = right_adjoint(T, X).obj
    return counit(T, X) @ sigma(XT, T)


# --- retracts -----------------------------------------------------------------------

class RetractAdjoint:
    """The object ``Z`` representing ``Nat((-)^Q, X)`` for a retract
    ``q: T -> Q``, ``i: Q -> T`` of an atomic ``T``.

    ``Z`` is the image of ``X_r`` with ``r = i . q``; ``theta: X_T ->> Z`` and
    ``incl: Z >-> X_T`` are the two halves of the factorization.
    """

    def __init__(self, T: Presheaf, q: NatTrans, i: NatTrans, X: Presheaf):
        if q.dom != T or i.cod != T or q.cod != i.dom:
            raise ValueError("q and i do not form a retraction of T")
        if q @ i != identity(q.cod):
            raise ValueError("q . i is not the identity")
        require_atomic(T)
        self.T, self.Q, self.q, self.i, self.X = T, q.cod, q, i, X
        self.ra = right_adjoint(T, X)
        self.r = i @ q
        self.theta, self.incl = epi_mono_factorize(sub_f(self.r, X))
        self.Z = self.theta.cod

    def psi(self, f: NatTrans, Y: Presheaf) -> NatTrans:
        """``f: Y^Q -> X`` to ``Y -> Z``."""
        return self.theta @ self.ra.transpose(f @ exp_contra(Y, self.i), Y)

    def psi_inverse(self, g: NatTrans, Y: Presheaf) -> NatTrans:
        """``g: Y -> Z`` to ``Y^Q -> X``."""
        return self.ra.untranspose(self.incl @ g, Y) @ exp_contra(Y, self.q)

    def check(self, Y: Presheaf) -> dict:
        left = nat_list(exponential(self.Q, Y).obj, self.X)
        right = nat_list(Y, self.Z)
        ok = (len(left) == len(right)
              and all(self.psi_inverse(self.psi(f, Y), Y) == f for f in left)
              and all(self.psi(self.psi_inverse(g, Y), Y) == g for g in right))
        return {"left": len(left), "right": len(right), "bijective": ok}

    def comparison(self) -> NatTrans:
        """``Z -> X_Q``, the transpose of ``Psi^{-1}(id_Z)``; needs ``Q`` atomic."""
        require_atomic(self.Q)
        return right_adjoint(self.Q, self.X).transpose(
            self.psi_inverse(identity(self.Z), self.Z), self.Z)

    def z_map(self, other: "RetractAdjoint", x: NatTrans) -> NatTrans:
        """``Z_x = theta' . x_T . incl`` for ``x: X -> X'``."""
        return other.theta @ ra_map(x, self.T) @ self.incl


def splittings(T: Presheaf) -> list[tuple[NatTrans, NatTrans]]:
    """Every idempotent ``e`` on ``T``, split through its image ``e = i . q``."""
    out = []
    for e in enumerate_nat(T, T):
        if e @ e != e:
            continue
        q, i = epi_mono_factorize(e)
        out.append((q, i))
    return out


# --- generalized singletons ------------------------------------------------------------

def xi_pairing(T: Presheaf, X: Presheaf, Y: Presheaf) -> NatTrans:
    """``X_T x Y_T -> (X x Y)_T``."""
    RX, RY = right_adjoint(T, X), right_adjoint(T, Y)
    RP = right_adjoint(T, product(X, Y))
    P = product(RX.obj, RY.obj)
    C = T.index
    comp = []
    for a in C.objects:
        col = []
        for k1 in RX.obj.sets[a]:
            for k2 in RY.obj.sets[a]:
                col.append(RP.index_of(a, pairing(k1, k2).comp))
        comp.append(col)
    return NatTrans(P, RP.obj, comp)


def gen_singleton(p: NatTrans, X: Presheaf) -> NatTrans:
    """``j_{p,X}: X_T -> (Omega_T)^X``, the X-transpose of
    ``(delta_X)_T . xi . (1 x X_p)``."""
    T = p.cod
    if p.dom != terminal(T.index):
        raise NoPointError("p is not a point 1 -> T")
    require_atomic(T)
    C = T.index
    XT = right_adjoint(T, X).obj
    delta_T = ra_map(classify(diagonal(X)), T)
    g = delta_T @ xi_pairing(T, X, X) @ product_map(identity(XT), sub_point(p, X))
    OmT = right_adjoint(T, omega(C)).obj
    return exponential(X, OmT).transpose(g, XT)


def thmA_suite(p: NatTrans, X: Presheaf, others: Sequence[NatTrans] = ()) -> dict[str, bool]:
    """The monicity and commuting diagrams for ``j_{p,X}``.

    ``others`` are maps ``f: T -> S`` into atomic ``S`` for the naturality
    square; ``(v)`` is the comparison with ``{-}_X`` when ``T = 1``.
    """
    T = p.cod
    C = T.index
    Om = omega(C)
    j = gen_singleton(p, X)
    single = singleton(X)
    res = {"(i) j monic": j.is_mono()}
    om_p = sub_point(p, Om)
    res["(ii) j.X_p = (Omega_p)^X.{-}"] = j @ sub_point(p, X) == exp_map(om_p, X) @ single
    OmT = right_adjoint(T, Om).obj
    lhs = exp_map(counit(T, Om), X) @ swap_alpha(OmT, X, T) @ exp_map(j, T)
    res["(iii) counit diagram"] = lhs == single @ counit(T, X)
    for n, f in enumerate(others):
        S = f.cod
        om_f = sub_f(f, Om)
        ok = exp_map(om_f, X) @ j == gen_singleton(f @ p, X) @ sub_f(f, X)
        res[f"(iv) naturality square [{n}]"] = ok
    if T.total_size() == len(C.objects) and T == terminal(C):
        res["(v) j_{1,X} = {-}_X"] = j_equals_singleton(X)
    return res


def j_equals_singleton(X: Presheaf) -> bool:
    """For ``T = 1``, ``p = id``: ``j`` equals ``{-}_X`` once ``X_1 ~ X`` and
    ``Omega_1 ~ Omega`` are identified by the canonical maps ``X_p``, ``Omega_!``."""
    C = X.index
    one = terminal(C)
    p = identity(one)
    j = gen_singleton(p, X)
    back = exp_map(sub_bang(one, omega(C)), X)
    return back @ j @ sub_point(p, X) == singleton(X)


# --- exponent swapping ------------------------------------------------------------------

def swap_alpha(A: Presheaf, X: Presheaf, T: Presheaf) -> NatTrans:
    """``alpha_A: (A^X)^T -> (A^T)^X``,
    ``v_d(g, x)_e(h, t) = u_e(g.h, t)_e(id_e, X(h)x)``."""
    C = A.index
    AX = exponential(X, A)
    AXT = exponential(T, AX.obj)
    AT = exponential(T, A)
    ATX = exponential(X, AT.obj)
    comp = []
    for c in C.objects:
        col = []
        for u in AXT.obj.sets[c]:
            vcomp = []
            for d in C.objects:
                row = []
                for g, x in ATX.prods[c].sets[d]:
                    wcomp = []
                    for e in C.objects:
                        wrow = []
                        for h, t in AT.prods[d].sets[e]:
                            psi = u.apply(e, (C.compose(g, h), t))
                            val = psi.apply(e, (C.identity(e), X.act(h, x)))
                            wrow.append(A.position(e, val))
                        wcomp.append(tuple(wrow))
                    row.append(AT.index_of(d, tuple(wcomp)))
                vcomp.append(tuple(row))
            col.append(ATX.index_of(c, tuple(vcomp)))
        comp.append(col)
    return NatTrans(AXT.obj, ATX.obj, comp)


def dist_beta(A: Presheaf, B: Presheaf, X: Presheaf) -> NatTrans:
    """``beta: (A x B)^X -> A^X x B^X``, ``phi |-> (pi_A . phi, pi_B . phi)``."""
    C = A.index
    AB = exponential(X, product(A, B))
    AX, BX = exponential(X, A), exponential(X, B)
    pa, pb = projections(A, B)
    P = product(AX.obj, BX.obj)
    comp = []
    for a in C.objects:
        nb = BX.obj.size(a)
        comp.append([AX.index_of(a, (pa @ phi).comp) * nb + BX.index_of(a, (pb @ phi).comp)
                     for phi in AB.obj.sets[a]])
    return NatTrans(AB.obj, P, comp)


def name_of(f: NatTrans) -> NatTrans:
    """The name ``'f': 1 -> Y^X`` of ``f: X -> Y``."""
    X, Y = f.dom, f.cod
    one = terminal(X.index)
    return exponential(X, Y).transpose(f @ projections(one, X)[1], one)


def coherence_check(A: Presheaf, B: Presheaf, X: Presheaf, T: Presheaf) -> dict[str, bool]:
    aAB = swap_alpha(product(A, B), X, T)
    top = (product_map(swap_alpha(A, X, T), swap_alpha(B, X, T))
           @ dist_beta(exponential(X, A).obj, exponential(X, B).obj, T)
           @ exp_map(dist_beta(A, B, X), T))
    bottom = (dist_beta(exponential(T, A).obj, exponential(T, B).obj, X)
              @ exp_map(dist_beta(A, B, T), X) @ aAB)
    sig = swap_alpha(A, X, T) @ exp_map(sigma(A, X), T) == sigma(exponential(T, A).obj, X)
    name_id = (swap_alpha(X, X, T) @ exp_map(name_of(identity(X)), T)
               == name_of(sigma(X, T)) @ _one_power_iso(T))
    return {"interchange": top == bottom, "sigma": sig, "names": name_id}


def _one_power_iso(T: Presheaf) -> NatTrans:
    """``1^T -> 1``."""
    one = terminal(T.index)
    E = exponential(T, one)
    return NatTrans(E.obj, one, [[0] * E.obj.size(a) for a in T.index.objects])


# --- family-level natural transformations --------------------------------------------------

@dataclass(frozen=True)
class EndoFunctor:
    """An endofunctor given by its object and arrow rules."""

    name: str
    on_obj: Callable[[Presheaf], Presheaf]
    on_map: Callable[[NatTrans], NatTrans]


def exp_functor(T: Presheaf) -> EndoFunctor:
    return EndoFunctor("(-)^T", lambda X: exponential(T, X).obj, lambda g: exp_map(g, T))


def ra_functor(T: Presheaf) -> EndoFunctor:
    require_atomic(T)
    return EndoFunctor("(-)_T", lambda X: right_adjoint(T, X).obj, lambda g: ra_map(g, T))


def prod_functor(B: Presheaf) -> EndoFunctor:
    return EndoFunctor("(-)xB", lambda X: product(X, B),
                       lambda g: product_map(g, identity(B)))


class FamilyNatTrans:
    """A transformation ``F => G`` between endofunctors, known through a rule
    that produces the component at any object and recorded on a finite family."""

    def __init__(self, source: EndoFunctor, target: EndoFunctor,
                 rule: Callable[[Presheaf], NatTrans], family: Sequence[Presheaf]):
        self.source, self.target, self.rule = source, target, rule
        self.family = tuple(family)
        self._cache: dict[Presheaf, NatTrans] = {}

    def __call__(self, X: Presheaf) -> NatTrans:
        if X not in self._cache:
            self._cache[X] = self.rule(X)
        return self._cache[X]

    def naturality_failures(self, max_maps: int | None = None) -> list[tuple[int, int, NatTrans]]:
        """Check ``G(g) . c_X = c_Y . F(g)`` for every ``g: X -> Y`` in the family."""
        bad = []
        for n, X in enumerate(self.family):
            for m, Y in enumerate(self.family):
                for k, g in enumerate(enumerate_nat(X, Y)):
                    if max_maps is not None and k >= max_maps:
                        break
                    if self.target.on_map(g) @ self(X) != self(Y) @ self.source.on_map(g):
                        bad.append((n, m, g))
        return bad

    def equals(self, other: "FamilyNatTrans") -> bool:
        return all(self(X) == other(X) for X in self.family)


def identity_family(F: EndoFunctor, family) -> FamilyNatTrans:
    return FamilyNatTrans(F, F, lambda X: identity(F.on_obj(X)), family)


def phi_to_psi(phi: FamilyNatTrans, T: Presheaf, S: Presheaf) -> FamilyNatTrans:
    """From ``phi: (-)_T => (-)_S`` to ``psi: (-)^S => (-)^T``,
    ``psi_X = eps_{S,X^T} . (phi_{X^T} . eta_{T,X})^S``."""
    def rule(X):
        XT = exponential(T, X).obj
        return right_adjoint(S, XT).untranspose(phi(XT) @ unit(T, X), X)
    return FamilyNatTrans(exp_functor(S), exp_functor(T), rule, phi.family)


def psi_to_phi(psi: FamilyNatTrans, T: Presheaf, S: Presheaf) -> FamilyNatTrans:
    """From ``psi: (-)^S => (-)^T`` to ``phi: (-)_T => (-)_S``,
    ``phi_X = (eps_{T,X} . psi_{X_T})_S . eta_{S,X_T}``."""
    def rule(X):
        XT = right_adjoint(T, X).obj
        return right_adjoint(S, X).transpose(counit(T, X) @ psi(XT), XT)
    return FamilyNatTrans(ra_functor(T), ra_functor(S), rule, psi.family)


def exp_unit(A: Presheaf, X: Presheaf) -> NatTrans:
    """Unit of ``(-) x A -| (-)^A`` at ``X``: ``X -> (X x A)^A``."""
    P = product(X, A)
    return exponential(A, P).transpose(identity(P), X)


def exp_to_prod(phi: FamilyNatTrans, A: Presheaf, B: Presheaf) -> FamilyNatTrans:
    """From ``phi: (-)^A => (-)^B`` to ``psi: (-) x B => (-) x A``."""
    def rule(X):
        P = product(X, A)
        return exponential(B, P).untranspose(phi(P) @ exp_unit(A, X))
    return FamilyNatTrans(prod_functor(B), prod_functor(A), rule, phi.family)


def prod_to_exp(psi: FamilyNatTrans, A: Presheaf, B: Presheaf) -> FamilyNatTrans:
    """``phi_X = (psi_X)^*``: precompose with ``psi`` under the exponentials,
    ``phi_X: X^A -> X^B`` the B-transpose of ``ev_A . psi_{X^A}``."""
    def rule(X):
        XA = exponential(A, X)
        return exponential(B, X).transpose(XA.ev @ psi(XA.obj), XA.obj)
    return FamilyNatTrans(exp_functor(A), exp_functor(B), rule, psi.family)


def prod_family(f: NatTrans, family) -> FamilyNatTrans:
    """``X x f: X x B -> X x A`` for ``f: B -> A``."""
    B, A = f.dom, f.cod
    return FamilyNatTrans(prod_functor(B), prod_functor(A),
                          lambda X: product_map(identity(X), f), family)


def recover_arrow(psi: FamilyNatTrans, A: Presheaf, B: Presheaf) -> dict:
    """``f = pi_A . psi_1 . pi_B^{-1}``; then test ``psi_X = X x f`` on the family."""
    one = terminal(A.index)
    p1B = projections(one, B)[1]
    p1A = projections(one, A)[1]
    f = p1A @ psi(one) @ p1B.inverse()
    failing = [n for n, X in enumerate(psi.family) if psi(X) != product_map(identity(X), f)]
    return {"arrow": f, "is_product_with_arrow": not failing, "failing_members": failing}


def sub_family(f: NatTrans, family) -> FamilyNatTrans:
    """``(-)_f: (-)_T => (-)_S``."""
    return FamilyNatTrans(ra_functor(f.dom), ra_functor(f.cod), lambda X: sub_f(f, X), family)
