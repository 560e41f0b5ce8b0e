"""Brute-force reference computations used as test oracles.

Everything here works from raw action tables by exhaustive search over all
functions or permutations, independently of the search engine under test.
"""

import itertools

from atomtopos.diagram import Presheaf


def all_functions(n, m):
    return itertools.product(range(m), repeat=n)


def is_natural(X, Y, comp):
    C = X.index
    for f in C.arrows:
        a, b = C.obj_pos[f.dom], C.obj_pos[f.cod]
        for x in range(X.size(f.cod)):
            if comp[a][X.action[f.name][x]] != Y.action[f.name][comp[b][x]]:
                return False
    return True


def brute_nat(X, Y):
    """Every natural transformation as a tuple of position maps."""
    C = X.index
    spaces = [list(all_functions(X.size(a), Y.size(a))) for a in C.objects]
    return [comp for comp in itertools.product(*spaces) if is_natural(X, Y, comp)]


def brute_iso(X, Y):
    if X.profile() != Y.profile():
        return False
    C = X.index
    spaces = [list(itertools.permutations(range(X.size(a)))) for a in C.objects]
    return any(is_natural(X, Y, comp) for comp in itertools.product(*spaces))


def brute_presheaves(C, bound):
    """All functorial action tables with at most ``bound`` elements per object,
    deduplicated by brute-force isomorphism."""
    arrows = [f for f in C.arrows if not C.is_identity(f.name)]
    reps = []
    for sizes in itertools.product(range(bound + 1), repeat=len(C.objects)):
        n = dict(zip(C.objects, sizes))
        sets = {a: [str(i) for i in range(n[a])] for a in C.objects}
        spaces = [list(all_functions(n[f.cod], n[f.dom])) for f in arrows]
        for tables in itertools.product(*spaces):
            action = {f.name: t for f, t in zip(arrows, tables)}
            X = Presheaf(C, sets, action, check=False)
            if X.violations():
                continue
            if not any(brute_iso(X, Y) for Y in reps):
                reps.append(X)
    return reps


def brute_sieves(C, a):
    """Sets of arrows into ``a`` closed under precomposition."""
    into = [f.name for f in C.arrows if f.cod == a]
    out = []
    for bits in range(2 ** len(into)):
        S = {into[k] for k in range(len(into)) if bits >> k & 1}
        if all(C.compose(s, g) in S for s in S for g in C.arrows_into(C.dom(s))):
            out.append(frozenset(S))
    return out


def brute_subobjects(X):
    """Action-closed pointwise subsets, by trying every subset."""
    C = X.index
    spaces = [list(itertools.product((0, 1), repeat=X.size(a))) for a in C.objects]
    out = []
    for choice in itertools.product(*spaces):
        ok = True
        for f in C.arrows:
            mb, ma = choice[C.obj_pos[f.cod]], choice[C.obj_pos[f.dom]]
            if any(mb[x] and not ma[X.action[f.name][x]] for x in range(len(mb))):
                ok = False
                break
        if ok:
            out.append(tuple(frozenset(i for i, v in enumerate(c) if v) for c in choice))
    return out


def brute_components(X):
    """Components of the category of elements by union-find."""
    C = X.index
    parent = {(a, i): (a, i) for a in C.objects for i in range(X.size(a))}

    def find(u):
        while parent[u] != u:
            u = parent[u]
        return u

    for f in C.arrows:
        for i in range(X.size(f.cod)):
            parent[find((f.cod, i))] = find((f.dom, X.action[f.name][i]))
    return len({find(u) for u in parent})
