"""Presheaves on a finite category and the topos operations on them.

A presheaf ``X`` on ``C`` stores, for every object ``a``, an ordered tuple of
hashable elements, and for every arrow ``f: a -> b`` the action
``X(b) -> X(a)`` as a tuple of positions. Natural transformations store one
position map per object, in the order of ``C.objects``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from ._util import LIMITS, BudgetExceeded, components
from .fincat import FinCat


class InvalidPresheaf(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class InvalidNatTrans(ValueError):
    pass


def label(x) -> str:
    """Stable string form of an element, used in reports and files."""
    if isinstance(x, str):
        return x
    if isinstance(x, NatTrans):
        return "<" + ";".join(",".join(map(str, c)) for c in x.comp) + ">"
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(label(y) for y in x) + ")"
    return str(x)


class Presheaf:
    """A finite-set-valued contravariant functor on ``index``."""

    def __init__(self, index: FinCat, sets: Mapping[str, Sequence],
                 action: Mapping[str, Sequence[int]] | None = None, *, check: bool = True):
        self.index = index
        self.sets: dict[str, tuple] = {a: tuple(sets.get(a, ())) for a in index.objects}
        action = dict(action or {})
        full = {}
        for arr in index.arrows:
            if arr.name in action:
                full[arr.name] = tuple(action[arr.name])
            elif index.is_identity(arr.name):
                full[arr.name] = tuple(range(len(self.sets[arr.dom])))
            else:
                raise InvalidPresheaf([f"missing action of arrow {arr.name!r}"])
        self.action: dict[str, tuple[int, ...]] = full
        if check:
            errors = self.violations()
            if errors:
                raise InvalidPresheaf(errors)

    @classmethod
    def from_maps(cls, index: FinCat, sets: Mapping[str, Sequence],
                  action: Mapping[str, Mapping]) -> "Presheaf":
        """Build from element-level maps ``action[f][x] = X(f)(x)``."""
        errors = []
        pos = {a: {x: i for i, x in enumerate(sets.get(a, ()))} for a in index.objects}
        table = {}
        for f, mapping in action.items():
            if f not in index.arrow_pos:
                errors.append(f"unknown arrow {f!r}")
                continue
            dom, cod = index.dom(f), index.cod(f)
            try:
                table[f] = [pos[dom][mapping[x]] for x in sets.get(cod, ())]
            except KeyError as exc:
                errors.append(f"action of {f!r} undefined or out of range at {exc.args[0]!r}")
        if errors:
            raise InvalidPresheaf(errors)
        return cls(index, sets, table)

    def violations(self) -> list[str]:
        C = self.index
        errors = []
        for o, elems in self.sets.items():
            if len(set(elems)) != len(elems):
                errors.append(f"duplicate elements at {o!r}")
        for arr in C.arrows:
            m = self.action[arr.name]
            if len(m) != len(self.sets[arr.cod]) or any(
                    not 0 <= v < len(self.sets[arr.dom]) for v in m):
                errors.append(f"action of {arr.name!r} is not a function "
                              f"X({arr.cod}) -> X({arr.dom})")
        if errors:
            return errors
        for o in C.objects:
            if self.action[C.identity(o)] != tuple(range(len(self.sets[o]))):
                errors.append(f"identity {C.identity(o)!r} does not act as identity")
        for (g, f), h in C.compose_table.items():
            ag, af, ah = self.action[g], self.action[f], self.action[h]
            if any(ah[x] != af[ag[x]] for x in range(len(ag))):
                errors.append(f"functoriality fails for ({g},{f})")
        return errors

    # element access
    def elements(self, a: str) -> tuple:
        return self.sets[a]

    def size(self, a: str) -> int:
        return len(self.sets[a])

    @cached_property
    def _positions(self) -> dict[str, dict]:
        return {a: {x: i for i, x in enumerate(xs)} for a, xs in self.sets.items()}

    def position(self, a: str, x) -> int:
        return self._positions[a][x]

    def act(self, f: str, x):
        """``X(f)(x)`` by value, for ``x`` in ``X(cod f)``."""
        C = self.index
        i = self._positions[C.cod(f)][x]
        return self.sets[C.dom(f)][self.action[f][i]]

    def profile(self) -> tuple[int, ...]:
        return tuple(len(self.sets[a]) for a in self.index.objects)

    def total_size(self) -> int:
        return sum(self.profile())

    def is_empty(self) -> bool:
        return self.total_size() == 0

    @cached_property
    def _key(self):
        return (self.index, tuple(self.sets[a] for a in self.index.objects),
                tuple(self.action[f.name] for f in self.index.arrows))

    @cached_property
    def _hash(self) -> int:
        return hash(self._key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Presheaf) or self._hash != other._hash:
            return False
        return self._key == other._key

    def __repr__(self):
        return f"Presheaf(profile={dict(zip(self.index.objects, self.profile()))})"

    def relabel(self) -> "Presheaf":
        """Same shape with elements renamed ``"0", "1", ...`` per object."""
        return Presheaf(self.index, {a: [str(i) for i in range(len(xs))]
                                     for a, xs in self.sets.items()}, self.action, check=False)

    def to_raw(self) -> dict:
        C = self.index
        return {
            "sets": {a: [label(x) for x in self.sets[a]] for a in C.objects},
            "action": {f.name: {label(self.sets[f.cod][i]): label(self.sets[f.dom][j])
                                for i, j in enumerate(self.action[f.name])}
                       for f in C.non_identity_arrows()},
        }


class NatTrans:
    """A family of position maps ``comp[k]: dom(objects[k]) -> cod(objects[k])``."""

    __slots__ = ("dom", "cod", "comp", "_hash")

    def __init__(self, dom: Presheaf, cod: Presheaf, comp, *, check: bool = False):
        self.dom = dom
        self.cod = cod
        self.comp: tuple[tuple[int, ...], ...] = tuple(tuple(c) for c in comp)
        self._hash = hash(self.comp)
        if check:
            bad = self.violations()
            if bad:
                raise InvalidNatTrans("; ".join(bad))

    @classmethod
    def from_maps(cls, dom: Presheaf, cod: Presheaf, maps: Mapping[str, Mapping]) -> "NatTrans":
        comp = [[cod.position(a, maps[a][x]) for x in dom.sets[a]] for a in dom.index.objects]
        return cls(dom, cod, comp, check=True)

    def violations(self) -> list[str]:
        X, Y, C = self.dom, self.cod, self.dom.index
        if Y.index != C:
            return ["domain and codomain live on different indices"]
        errors = []
        for k, a in enumerate(C.objects):
            c = self.comp[k]
            if len(c) != X.size(a) or any(not 0 <= v < Y.size(a) for v in c):
                errors.append(f"component at {a!r} is not a function")
        if errors:
            return errors
        pos = C.obj_pos
        for f in C.arrows:
            ca, cb = self.comp[pos[f.dom]], self.comp[pos[f.cod]]
            xf, yf = X.action[f.name], Y.action[f.name]
            if any(ca[xf[x]] != yf[cb[x]] for x in range(len(cb))):
                errors.append(f"naturality fails at arrow {f.name!r}")
        return errors

    def at(self, a: str) -> tuple[int, ...]:
        return self.comp[self.dom.index.obj_pos[a]]

    def apply(self, a: str, x):
        i = self.dom.position(a, x)
        return self.cod.sets[a][self.at(a)[i]]

    def __matmul__(self, other: "NatTrans") -> "NatTrans":
        """``self . other``."""
        if other.cod is not self.dom and other.cod != self.dom:
            raise InvalidNatTrans("composite of non-composable transformations")
        comp = [tuple(g[v] for v in f) for g, f in zip(self.comp, other.comp)]
        return NatTrans(other.dom, self.cod, comp)

    def is_mono(self) -> bool:
        return all(len(set(c)) == len(c) for c in self.comp)

    def is_epi(self) -> bool:
        return all(len(set(c)) == self.cod.size(a)
                   for c, a in zip(self.comp, self.dom.index.objects))

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def inverse(self) -> "NatTrans":
        if not self.is_iso():
            raise InvalidNatTrans("not an isomorphism")
        comp = []
        for c in self.comp:
            inv = [0] * len(c)
            for i, v in enumerate(c):
                inv[v] = i
            comp.append(inv)
        return NatTrans(self.cod, self.dom, comp)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NatTrans) or self._hash != other._hash:
            return False
        return (self.comp == other.comp
                and (self.dom is other.dom or self.dom == other.dom)
                and (self.cod is other.cod or self.cod == other.cod))

    def __repr__(self):
        return f"NatTrans({label(self)})"


def identity(X: Presheaf) -> NatTrans:
    return NatTrans(X, X, [range(X.size(a)) for a in X.index.objects])


# --- basic objects -----------------------------------------------------------

@lru_cache(maxsize=None)
def terminal(C: FinCat) -> Presheaf:
    return Presheaf(C, {a: ("*",) for a in C.objects},
                    {f.name: (0,) for f in C.arrows}, check=False)


@lru_cache(maxsize=None)
def initial(C: FinCat) -> Presheaf:
    return Presheaf(C, {}, {f.name: () for f in C.arrows}, check=False)


@lru_cache(maxsize=None)
def representable(C: FinCat, c: str) -> Presheaf:
    """``y_c = C(-, c)``, acting by precomposition."""
    if c not in C.obj_pos:
        raise KeyError(f"unknown object {c!r}")
    sets = {a: C.hom(a, c) for a in C.objects}
    pos = {a: {g: i for i, g in enumerate(sets[a])} for a in C.objects}
    action = {f.name: tuple(pos[f.dom][C.compose(g, f.name)] for g in sets[f.cod])
              for f in C.arrows}
    return Presheaf(C, sets, action, check=False)


def yoneda(X: Presheaf, c: str, x) -> NatTrans:
    """The map ``y_c -> X`` sending ``id_c`` to ``x``."""
    C = X.index
    yc = representable(C, c)
    i = X.position(c, x)
    comp = [[X.action[g][i] for g in yc.sets[a]] for a in C.objects]
    return NatTrans(yc, X, comp)


def yoneda_element(t: NatTrans, c: str):
    """Inverse Yoneda: the image of ``id_c`` under ``t: y_c -> X``."""
    C = t.dom.index
    return t.apply(c, C.identity(c))


def representable_map(C: FinCat, f: str) -> NatTrans:
    """``y_f: y_a -> y_b`` (postcomposition) for ``f: a -> b``."""
    return yoneda(representable(C, C.cod(f)), C.dom(f), f)


@lru_cache(maxsize=None)
def two(C: FinCat) -> Presheaf:
    """``2 = 1 + 1``."""
    one = terminal(C)
    return coproduct(one, one)[0]


def constant(C: FinCat, elements: Sequence) -> Presheaf:
    n = len(elements)
    return Presheaf(C, {a: tuple(elements) for a in C.objects},
                    {f.name: tuple(range(n)) for f in C.arrows}, check=False)


# --- enumeration of natural transformations ----------------------------------

def _object_order(X: Presheaf) -> list[int]:
    objs = X.index.objects
    return sorted(range(len(objs)), key=lambda k: (len(X.sets[objs[k]]), k))


def enumerate_nat(X: Presheaf, Y: Presheaf, *, injective: bool = False,
                  budget: int | None = None) -> Iterator[NatTrans]:
    """All natural transformations ``X => Y`` in a fixed deterministic order.

    Components are assigned element by element, objects in ascending order of
    ``|X(a)|``; each assignment is propagated along every arrow (a value at
    ``x in X(b)`` forces the value at ``X(f)(x)`` for every ``f: a -> b``).
    ``injective=True`` restricts to pointwise-injective transformations.
    Raises :class:`BudgetExceeded` when more than ``budget`` candidate states
    are visited.
    """
    C = X.index
    if Y.index != C:
        raise ValueError("presheaves live on different indices")
    budget = LIMITS.states if budget is None else budget
    objs = C.objects
    n_obj = len(objs)
    xs = [len(X.sets[a]) for a in objs]
    ys = [len(Y.sets[a]) for a in objs]
    for k in range(n_obj):
        if xs[k] and not ys[k]:
            return
        if injective and xs[k] > ys[k]:
            return

    # cons[b][x] = [(a, X(f)(x), Y(f)) for f: a -> b non-identity]
    cons: list[list[list]] = [[[] for _ in range(xs[k])] for k in range(n_obj)]
    for f in C.non_identity_arrows():
        ka, kb = C.obj_pos[f.dom], C.obj_pos[f.cod]
        xf, yf = X.action[f.name], Y.action[f.name]
        for x in range(xs[kb]):
            cons[kb][x].append((ka, xf[x], yf))

    vals = [[-1] * xs[k] for k in range(n_obj)]
    used = [dict() for _ in range(n_obj)] if injective else None
    trail: list[tuple[int, int]] = []
    order = [(k, i) for k in _object_order(X) for i in range(xs[k])]

    def assign(k: int, i: int, v: int) -> bool:
        stack = [(k, i, v)]
        while stack:
            k, i, v = stack.pop()
            cur = vals[k][i]
            if cur == v:
                continue
            if cur != -1:
                return False
            if used is not None:
                if v in used[k]:
                    return False
                used[k][v] = i
            vals[k][i] = v
            trail.append((k, i))
            for ka, j, yf in cons[k][i]:
                stack.append((ka, j, yf[v]))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            k, i = trail.pop()
            if used is not None:
                del used[k][vals[k][i]]
            vals[k][i] = -1

    def next_free(start: int) -> int:
        while start < len(order):
            k, i = order[start]
            if vals[k][i] == -1:
                return start
            start += 1
        return start

    def snapshot() -> NatTrans:
        return NatTrans(X, Y, vals)

    states = 0
    first = next_free(0)
    if first == len(order):
        yield snapshot()
        return
    frames = [[first, 0, 0]]
    while frames:
        frame = frames[-1]
        pos, v, mark = frame
        undo(mark)
        k, i = order[pos]
        if v >= ys[k]:
            frames.pop()
            continue
        frame[1] = v + 1
        states += 1
        if states > budget:
            raise BudgetExceeded("enumerate_nat", states, budget)
        if assign(k, i, v):
            nxt = next_free(pos + 1)
            if nxt == len(order):
                yield snapshot()
            else:
                frames.append([nxt, 0, len(trail)])
    undo(0)


def nat_list(X: Presheaf, Y: Presheaf, **kw) -> list[NatTrans]:
    return list(enumerate_nat(X, Y, **kw))


def count_nat(X: Presheaf, Y: Presheaf, *, budget: int | None = None) -> int:
    """``|Nat(X, Y)|`` as a product over the connected components of ``X``."""
    total = 1
    for comp in pi0(X):
        members = [{i for b, i in comp if b == a} for a in X.index.objects]
        part = SubPresheaf(X, members, check=False).to_presheaf()
        n = sum(1 for _ in enumerate_nat(part, Y, budget=budget))
        if n == 0:
            return 0
        total *= n
    return total


def iso_search(X: Presheaf, Y: Presheaf, *, budget: int | None = None) -> NatTrans | None:
    """A natural isomorphism ``X => Y`` or None."""
    if X.profile() != Y.profile():
        return None
    return next(enumerate_nat(X, Y, injective=True, budget=budget), None)


def global_sections(X: Presheaf) -> list[NatTrans]:
    return nat_list(terminal(X.index), X)


# --- limits -----------------------------------------------------------------

@lru_cache(maxsize=4096)
def _product(X: Presheaf, Y: Presheaf) -> tuple[Presheaf, NatTrans, NatTrans]:
    C = X.index
    sets = {a: tuple(itertools.product(X.sets[a], Y.sets[a])) for a in C.objects}
    action = {}
    for f in C.arrows:
        xf, yf = X.action[f.name], Y.action[f.name]
        ny = len(Y.sets[f.dom])
        action[f.name] = tuple(xf[i] * ny + yf[j]
                               for i in range(len(xf)) for j in range(len(yf)))
    P = Presheaf(C, sets, action, check=False)
    p1 = NatTrans(P, X, [[i for i in range(X.size(a)) for _ in range(Y.size(a))]
                         for a in C.objects])
    p2 = NatTrans(P, Y, [[j for _ in range(X.size(a)) for j in range(Y.size(a))]
                         for a in C.objects])
    return P, p1, p2


def product(X: Presheaf, Y: Presheaf) -> Presheaf:
    """Pointwise product; elements are pairs ``(x, y)``."""
    return _product(X, Y)[0]


def projections(X: Presheaf, Y: Presheaf) -> tuple[NatTrans, NatTrans]:
    _, p1, p2 = _product(X, Y)
    return p1, p2


def pairing(f: NatTrans, g: NatTrans) -> NatTrans:
    """``<f, g>: Z -> X x Y``."""
    P = product(f.cod, g.cod)
    C = P.index
    comp = []
    for k, a in enumerate(C.objects):
        ny = g.cod.size(a)
        comp.append([u * ny + v for u, v in zip(f.comp[k], g.comp[k])])
    return NatTrans(f.dom, P, comp)


def product_map(f: NatTrans, g: NatTrans) -> NatTrans:
    """``f x g: X x Y -> X' x Y'``."""
    p1, p2 = projections(f.dom, g.dom)
    return pairing(f @ p1, g @ p2)


def diagonal_map(X: Presheaf) -> NatTrans:
    return pairing(identity(X), identity(X))


def to_terminal(X: Presheaf) -> NatTrans:
    one = terminal(X.index)
    return NatTrans(X, one, [[0] * X.size(a) for a in X.index.objects])


@dataclass(frozen=True)
class Diagram:
    """A finite diagram of presheaves: nodes and edges ``(i, j, X_i -> X_j)``."""

    nodes: tuple[Presheaf, ...]
    edges: tuple[tuple[int, int, NatTrans], ...] = ()

    def __post_init__(self):
        for i, j, m in self.edges:
            if m.dom != self.nodes[i] or m.cod != self.nodes[j]:
                raise ValueError(f"edge {i}->{j} does not match its nodes")


def limit(D: Diagram, index: FinCat | None = None) -> tuple[Presheaf, list[NatTrans]]:
    """Pointwise limit; elements are tuples with one entry per node."""
    C = index if index is not None else D.nodes[0].index
    sets, raw = {}, {}
    for a in C.objects:
        k = C.obj_pos[a]
        tuples = []
        for combo in itertools.product(*(range(N.size(a)) for N in D.nodes)):
            if all(m.comp[k][combo[i]] == combo[j] for i, j, m in D.edges):
                tuples.append(combo)
        raw[a] = tuples
        sets[a] = tuple(tuple(N.sets[a][c] for N, c in zip(D.nodes, combo))
                        for combo in tuples)
    pos = {a: {t: n for n, t in enumerate(raw[a])} for a in C.objects}
    action = {}
    for f in C.arrows:
        action[f.name] = tuple(
            pos[f.dom][tuple(N.action[f.name][c] for N, c in zip(D.nodes, t))]
            for t in raw[f.cod])
    L = Presheaf(C, sets, action, check=False)
    legs = [NatTrans(L, N, [[t[n] for t in raw[a]] for a in C.objects])
            for n, N in enumerate(D.nodes)]
    return L, legs


def equalizer(f: NatTrans, g: NatTrans) -> tuple[Presheaf, NatTrans]:
    """Equalizer as a subpresheaf of ``dom f`` with its inclusion."""
    S = SubPresheaf(f.dom, [frozenset(i for i in range(len(cf)) if cf[i] == cg[i])
                            for cf, cg in zip(f.comp, g.comp)])
    return S.to_presheaf(), S.inclusion()


def pullback(f: NatTrans, g: NatTrans) -> tuple[Presheaf, NatTrans, NatTrans]:
    L, legs = limit(Diagram((f.dom, g.dom, f.cod), ((0, 2, f), (1, 2, g))))
    return L, legs[0], legs[1]


# --- colimits ---------------------------------------------------------------

def colimit(D: Diagram, index: FinCat | None = None) -> tuple[Presheaf, list[NatTrans]]:
    """Pointwise colimit; an element is the least ``(node, element)`` of its class."""
    C = index if index is not None else D.nodes[0].index
    sets, cls_of = {}, {}
    for a in C.objects:
        k = C.obj_pos[a]
        offsets, flat = [], []
        for n, N in enumerate(D.nodes):
            offsets.append(len(flat))
            flat.extend((n, i) for i in range(N.size(a)))
        edges = [(offsets[i] + x, offsets[j] + m.comp[k][x])
                 for i, j, m in D.edges for x in range(D.nodes[i].size(a))]
        labels, count = components(len(flat), edges)
        reps = [None] * count
        for (n, i), lab in zip(flat, labels):
            if reps[lab] is None:
                reps[lab] = (n, D.nodes[n].sets[a][i])
        sets[a] = tuple(reps)
        cls_of[a] = (offsets, labels)
    action = {}
    for f in C.arrows:
        offs_b, lab_b = cls_of[f.cod]
        offs_a, lab_a = cls_of[f.dom]
        table = [0] * len(sets[f.cod])
        for n, N in enumerate(D.nodes):
            for i in range(N.size(f.cod)):
                table[lab_b[offs_b[n] + i]] = lab_a[offs_a[n] + N.action[f.name][i]]
        action[f.name] = tuple(table)
    L = Presheaf(C, sets, action, check=False)
    inj = []
    for n, N in enumerate(D.nodes):
        comp = []
        for a in C.objects:
            offs, labs = cls_of[a]
            comp.append([labs[offs[n] + i] for i in range(N.size(a))])
        inj.append(NatTrans(N, L, comp))
    return L, inj


def coproduct(X: Presheaf, Y: Presheaf) -> tuple[Presheaf, NatTrans, NatTrans]:
    L, (i1, i2) = colimit(Diagram((X, Y)))
    return L, i1, i2


def coequalizer(f: NatTrans, g: NatTrans) -> tuple[Presheaf, NatTrans]:
    L, inj = colimit(Diagram((f.dom, f.cod), ((0, 1, f), (0, 1, g))))
    return L, inj[1]


def pushout(f: NatTrans, g: NatTrans) -> tuple[Presheaf, NatTrans, NatTrans]:
    L, inj = colimit(Diagram((f.dom, f.cod, g.cod), ((0, 1, f), (0, 2, g))))
    return L, inj[1], inj[2]


def elements_diagram(X: Presheaf) -> tuple[Diagram, list[tuple[str, object]]]:
    """The diagram ``(a, x) |-> y_a`` over the category of elements of ``X``."""
    C = X.index
    nodes_idx = [(a, x) for a in C.objects for x in X.sets[a]]
    pos = {n: i for i, n in enumerate(nodes_idx)}
    nodes = tuple(representable(C, a) for a, _ in nodes_idx)
    edges = []
    for f in C.non_identity_arrows():
        yf = representable_map(C, f.name)
        for x in X.sets[f.cod]:
            edges.append((pos[(f.dom, X.act(f.name, x))], pos[(f.cod, x)], yf))
    return Diagram(nodes, tuple(edges)), nodes_idx


def density_comparison(X: Presheaf) -> tuple[Presheaf, NatTrans]:
    """``colim_{(a,x)} y_a`` and the canonical comparison map to ``X``."""
    D, nodes_idx = elements_diagram(X)
    C = X.index
    if not D.nodes:
        L = initial(C)
        return L, NatTrans(L, X, [[] for _ in C.objects])
    L, inj = colimit(D, C)
    comp = []
    for a in C.objects:
        table = [None] * L.size(a)
        for n, (b, x) in enumerate(nodes_idx):
            for u_pos, u in enumerate(D.nodes[n].sets[a]):
                cls = inj[n].at(a)[u_pos]
                img = X.position(a, X.act(u, x))
                if table[cls] is not None and table[cls] != img:
                    raise InvalidNatTrans("cocone comparison is not well defined")
                table[cls] = img
        comp.append(table)
    return L, NatTrans(L, X, comp, check=True)


# --- subobjects ---------------------------------------------------------------

class SubPresheaf:
    """A pointwise subset of ``ambient`` closed under the action."""

    def __init__(self, ambient: Presheaf, members, *, check: bool = True):
        self.ambient = ambient
        self.members: tuple[frozenset[int], ...] = tuple(frozenset(m) for m in members)
        if check and not self.is_closed():
            raise InvalidPresheaf(["subset not closed under the action"])

    @classmethod
    def from_elements(cls, ambient: Presheaf, members: Mapping[str, Iterable]) -> "SubPresheaf":
        return cls(ambient, [frozenset(ambient.position(a, x) for x in members.get(a, ()))
                             for a in ambient.index.objects])

    def is_closed(self) -> bool:
        C, X = self.ambient.index, self.ambient
        for f in C.arrows:
            m_b = self.members[C.obj_pos[f.cod]]
            m_a = self.members[C.obj_pos[f.dom]]
            if any(X.action[f.name][x] not in m_a for x in m_b):
                return False
        return True

    def at(self, a: str) -> frozenset[int]:
        return self.members[self.ambient.index.obj_pos[a]]

    def contains(self, a: str, x) -> bool:
        return self.ambient.position(a, x) in self.at(a)

    def to_presheaf(self) -> Presheaf:
        X, C = self.ambient, self.ambient.index
        keep = {a: sorted(self.at(a)) for a in C.objects}
        pos = {a: {i: n for n, i in enumerate(keep[a])} for a in C.objects}
        sets = {a: [X.sets[a][i] for i in keep[a]] for a in C.objects}
        action = {f.name: [pos[f.dom][X.action[f.name][i]] for i in keep[f.cod]]
                  for f in C.arrows}
        return Presheaf(C, sets, action, check=False)

    def inclusion(self) -> NatTrans:
        S = self.to_presheaf()
        C = self.ambient.index
        return NatTrans(S, self.ambient, [sorted(self.at(a)) for a in C.objects])

    def meet(self, other: "SubPresheaf") -> "SubPresheaf":
        return SubPresheaf(self.ambient, [a & b for a, b in zip(self.members, other.members)],
                           check=False)

    def join(self, other: "SubPresheaf") -> "SubPresheaf":
        return SubPresheaf(self.ambient, [a | b for a, b in zip(self.members, other.members)],
                           check=False)

    def is_bottom(self) -> bool:
        return not any(self.members)

    def is_top(self) -> bool:
        return all(len(m) == self.ambient.size(a)
                   for m, a in zip(self.members, self.ambient.index.objects))

    def __eq__(self, other):
        return (isinstance(other, SubPresheaf) and self.members == other.members
                and self.ambient == other.ambient)

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"SubPresheaf({[sorted(m) for m in self.members]})"


def image(f: NatTrans) -> SubPresheaf:
    return SubPresheaf(f.cod, [frozenset(c) for c in f.comp], check=False)


def epi_mono_factorize(f: NatTrans) -> tuple[NatTrans, NatTrans]:
    """``f = m . e`` with ``e`` onto the image and ``m`` its inclusion."""
    im = image(f)
    m = im.inclusion()
    C = f.dom.index
    comp = []
    for k, a in enumerate(C.objects):
        where = {i: n for n, i in enumerate(m.comp[k])}
        comp.append([where[v] for v in f.comp[k]])
    return NatTrans(f.dom, m.dom, comp), m


def subobjects(X: Presheaf, *, budget: int | None = None) -> list[SubPresheaf]:
    """All subpresheaves, each produced once, in a deterministic order."""
    budget = LIMITS.subobjects if budget is None else budget
    C = X.index
    flat = [(k, i) for k, a in enumerate(C.objects) for i in range(X.size(a))]
    down: dict[tuple[int, int], set] = {}
    for k, a in enumerate(C.objects):
        for i in range(X.size(a)):
            down[(k, i)] = {(C.obj_pos[C.dom(f)], X.action[f][i]) for f in C.arrows_into(a)}
    out: list[SubPresheaf] = []

    def emit(chosen: set):
        members = [set() for _ in C.objects]
        for k, i in chosen:
            members[k].add(i)
        out.append(SubPresheaf(X, members, check=False))
        if len(out) > budget:
            raise BudgetExceeded("subobjects", len(out), budget)

    def rec(n: int, chosen: set, excluded: set):
        while n < len(flat) and flat[n] in chosen:
            n += 1
        if n == len(flat):
            emit(chosen)
            return
        el = flat[n]
        rec(n + 1, chosen, excluded | {el})
        closure = down[el]
        if not closure & excluded:
            rec(n + 1, chosen | closure, excluded)

    rec(0, set(), set())
    return out


def complement(S: SubPresheaf) -> SubPresheaf | None:
    """The complement of ``S`` if it exists.

    A complement must be the pointwise set complement (meet 0 and join X are
    pointwise), so it exists iff that set is closed under the action.
    """
    X = S.ambient
    rest = [frozenset(range(X.size(a))) - m for m, a in zip(S.members, X.index.objects)]
    cand = SubPresheaf(X, rest, check=False)
    return cand if cand.is_closed() else None


def complement_by_search(S: SubPresheaf) -> SubPresheaf | None:
    for T in subobjects(S.ambient):
        if S.meet(T).is_bottom() and S.join(T).is_top():
            return T
    return None


def is_complemented(S: SubPresheaf) -> bool:
    return complement(S) is not None


def diagonal(X: Presheaf) -> SubPresheaf:
    P = product(X, X)
    return SubPresheaf(P, [frozenset(i * X.size(a) + i for i in range(X.size(a)))
                           for a in X.index.objects], check=False)


def is_decidable(X: Presheaf) -> bool:
    return is_complemented(diagonal(X))


# --- subobject classifier -------------------------------------------------------

@lru_cache(maxsize=None)
def omega(C: FinCat) -> Presheaf:
    """Presheaf of sieves; a sieve on ``a`` is a frozenset of arrow names."""
    sets = {}
    for a in C.objects:
        ya = representable(C, a)
        sieves = []
        for S in subobjects(ya):
            sieves.append(frozenset(g for k, b in enumerate(C.objects)
                                    for g in (ya.sets[b][i] for i in S.members[k])))
        sieves.sort(key=lambda s: (len(s), sorted(s)))
        sets[a] = tuple(sieves)
    pos = {a: {s: i for i, s in enumerate(sets[a])} for a in C.objects}
    action = {}
    for f in C.arrows:
        table = []
        for S in sets[f.cod]:
            pulled = frozenset(g for g in C.arrows_into(f.dom) if C.compose(f.name, g) in S)
            table.append(pos[f.dom][pulled])
        action[f.name] = tuple(table)
    return Presheaf(C, sets, action, check=False)


def maximal_sieve(C: FinCat, a: str) -> frozenset:
    return frozenset(C.arrows_into(a))


def true_map(C: FinCat) -> NatTrans:
    Om = omega(C)
    return NatTrans(terminal(C), Om,
                    [[Om.position(a, maximal_sieve(C, a))] for a in C.objects])


def classify(S: SubPresheaf) -> NatTrans:
    """Characteristic map ``X -> Omega`` of ``S``."""
    X = S.ambient
    C = X.index
    Om = omega(C)
    comp = []
    for a in C.objects:
        col = []
        for i in range(X.size(a)):
            sieve = frozenset(g for g in C.arrows_into(a)
                              if X.action[g][i] in S.at(C.dom(g)))
            col.append(Om.position(a, sieve))
        comp.append(col)
    return NatTrans(X, Om, comp)


def pull_back_true(chi: NatTrans) -> SubPresheaf:
    C = chi.dom.index
    Om = chi.cod
    top = [Om.position(a, maximal_sieve(C, a)) for a in C.objects]
    return SubPresheaf(chi.dom, [frozenset(i for i, v in enumerate(c) if v == t)
                                 for c, t in zip(chi.comp, top)], check=False)


def classifying_maps(S: SubPresheaf) -> list[NatTrans]:
    """Every map ``X -> Omega`` that pulls ``true`` back to ``S`` (by search)."""
    return [chi for chi in enumerate_nat(S.ambient, omega(S.ambient.index))
            if pull_back_true(chi) == S]


# --- exponentials -------------------------------------------------------------

class Exponential:
    """``Y^X`` with ``Y^X(a) = Nat(y_a x X, Y)`` and its adjunction data."""

    def __init__(self, X: Presheaf, Y: Presheaf, *, budget: int | None = None):
        C = X.index
        self.exponent = X
        self.base = Y
        self.index = C
        self.prods = {a: product(representable(C, a), X) for a in C.objects}
        sets = {a: tuple(enumerate_nat(self.prods[a], Y, budget=budget)) for a in C.objects}
        self._lookup = {a: {t.comp: i for i, t in enumerate(sets[a])} for a in C.objects}
        action = {}
        for f in C.arrows:
            shift = self._shift(f.name)
            action[f.name] = tuple(self._lookup[f.dom][self._precompose(t, shift)]
                                   for t in sets[f.cod])
        self.obj = Presheaf(C, sets, action, check=False)

    def _shift(self, f: str) -> list[list[int]]:
        """Position map of ``y_f x X: y_a x X -> y_b x X`` per object."""
        C, X = self.index, self.exponent
        a, b = C.dom(f), C.cod(f)
        ya, yb = representable(C, a), representable(C, b)
        out = []
        for c in C.objects:
            nx = X.size(c)
            out.append([yb.position(c, C.compose(f, u)) * nx + x
                        for u in ya.sets[c] for x in range(nx)])
        return out

    @staticmethod
    def _precompose(t: NatTrans, shift) -> tuple:
        return tuple(tuple(col[s] for s in sh) for col, sh in zip(t.comp, shift))

    def index_of(self, a: str, comp) -> int:
        return self._lookup[a][comp]

    def element(self, a: str, comp) -> NatTrans:
        return self.obj.sets[a][self._lookup[a][comp]]

    @cached_property
    def ev(self) -> NatTrans:
        """``ev: Y^X x X -> Y``, ``(phi, x) |-> phi_a(id_a, x)``."""
        C, X = self.index, self.exponent
        P = product(self.obj, X)
        comp = []
        for a in C.objects:
            k = C.obj_pos[a]
            id_pos = representable(C, a).position(a, C.identity(a))
            nx = X.size(a)
            comp.append([phi.comp[k][id_pos * nx + x]
                         for phi in self.obj.sets[a] for x in range(nx)])
        return NatTrans(P, self.base, comp)

    def transpose(self, g: NatTrans, Z: Presheaf | None = None) -> NatTrans:
        """``g: Z x X -> Y`` to ``Z -> Y^X``."""
        C, X = self.index, self.exponent
        if Z is None:
            Z = _product_factor(g.dom, X)
        comp = []
        for a in C.objects:
            ya = representable(C, a)
            col = []
            for z in range(Z.size(a)):
                t = []
                for c in C.objects:
                    nx = X.size(c)
                    gc = g.comp[C.obj_pos[c]]
                    row = []
                    for u in ya.sets[c]:
                        zu = Z.action[u][z]
                        row.extend(gc[zu * nx + x] for x in range(nx))
                    t.append(tuple(row))
                col.append(self._lookup[a][tuple(t)])
            comp.append(col)
        return NatTrans(Z, self.obj, comp)

    def untranspose(self, h: NatTrans) -> NatTrans:
        """``h: Z -> Y^X`` to ``Z x X -> Y``."""
        return self.ev @ product_map(h, identity(self.exponent))

    def postcompose(self, g: NatTrans, other: "Exponential") -> NatTrans:
        """``g^X: Y^X -> Y'^X`` for ``g: Y -> Y'`` (``other`` is ``Y'^X``)."""
        C = self.index
        comp = []
        for a in C.objects:
            col = []
            for phi in self.obj.sets[a]:
                t = tuple(tuple(gc[v] for v in pc) for gc, pc in zip(g.comp, phi.comp))
                col.append(other._lookup[a][t])
            comp.append(col)
        return NatTrans(self.obj, other.obj, comp)


def _product_factor(P: Presheaf, X: Presheaf) -> Presheaf:
    """Recover ``Z`` from ``P = Z x X`` built by :func:`product`."""
    C = P.index
    sets = {}
    for a in C.objects:
        nx = X.size(a)
        elems = P.sets[a]
        sets[a] = tuple(elems[i * nx][0] for i in range(len(elems) // nx)) if nx else None
    if any(v is None for v in sets.values()):
        raise ValueError("cannot recover the left factor of a product with an empty factor; "
                         "pass the factor explicitly")
    action = {}
    for f in C.arrows:
        nxb, nxa = X.size(f.cod), X.size(f.dom)
        pf = P.action[f.name]
        action[f.name] = tuple(pf[i * nxb] // nxa for i in range(len(sets[f.cod])))
    Z = Presheaf(C, sets, action, check=False)
    if product(Z, X) != P:
        raise ValueError("domain is not a product with the exponent")
    return Z


@lru_cache(maxsize=2048)
def exponential(X: Presheaf, Y: Presheaf) -> Exponential:
    """``Y^X`` (note the order: exponent first)."""
    return Exponential(X, Y)


def exp_map(g: NatTrans, X: Presheaf) -> NatTrans:
    """``g^X: A^X -> B^X`` for ``g: A -> B``."""
    return exponential(X, g.dom).postcompose(g, exponential(X, g.cod))


def exp_contra(A: Presheaf, f: NatTrans) -> NatTrans:
    """``A^f: A^T -> A^S`` for ``f: S -> T``."""
    S, T = f.dom, f.cod
    ET, ES = exponential(T, A), exponential(S, A)
    C = A.index
    comp = []
    for a in C.objects:
        ya = representable(C, a)
        shift = product_map(identity(ya), f)
        col = []
        for phi in ET.obj.sets[a]:
            col.append(ES.index_of(a, (phi @ shift).comp))
        comp.append(col)
    return NatTrans(ET.obj, ES.obj, comp)


def sigma(A: Presheaf, X: Presheaf) -> NatTrans:
    """``sigma^X_A: A -> A^X``, the transpose of the projection ``A x X -> A``."""
    return exponential(X, A).transpose(projections(A, X)[0], A)


def singleton(X: Presheaf) -> NatTrans:
    """``{-}_X: X -> Omega^X``, transpose of the diagonal's characteristic map."""
    delta = classify(diagonal(X))
    return exponential(X, omega(X.index)).transpose(delta, X)


# --- pieces and points ------------------------------------------------------------

def category_of_elements(X: Presheaf) -> FinCat:
    """``int X``: objects ``a#i`` for ``X(a)[i]``, arrows ``f#i`` for
    ``f: a -> b`` and ``i`` in ``X(b)``."""
    from .fincat import from_table
    C = X.index
    objs = [f"{a}#{i}" for a in C.objects for i in range(X.size(a))]
    arrows, compose, idents = [], [], {}
    for f in C.arrows:
        for i in range(X.size(f.cod)):
            src = f"{f.dom}#{X.action[f.name][i]}"
            arrows.append((f"{f.name}#{i}", src, f"{f.cod}#{i}"))
            if C.is_identity(f.name):
                idents[f"{f.cod}#{i}"] = f"{f.name}#{i}"
    for (g, f), h in C.compose_table.items():
        for i in range(X.size(C.cod(g))):
            j = X.action[g][i]
            compose.append((f"{g}#{i}", f"{f}#{j}", f"{h}#{i}"))
    return from_table(objs, arrows, compose, identities=idents)


def pi0(X: Presheaf) -> list[tuple[tuple[str, int], ...]]:
    """Connected components of ``int X``; members are ``(object, position)``."""
    C = X.index
    nodes = [(a, i) for a in C.objects for i in range(X.size(a))]
    pos = {n: k for k, n in enumerate(nodes)}
    edges = [(pos[(f.cod, i)], pos[(f.dom, X.action[f.name][i])])
             for f in C.non_identity_arrows() for i in range(X.size(f.cod))]
    labels, count = components(len(nodes), edges)
    groups: list[list] = [[] for _ in range(count)]
    for n, lab in zip(nodes, labels):
        groups[lab].append(n)
    return [tuple(g) for g in groups]


def pi0_map(f: NatTrans) -> tuple[int, ...]:
    """The induced function ``pi0(dom f) -> pi0(cod f)`` on component numbers."""
    src, dst = pi0(f.dom), pi0(f.cod)
    where = {m: k for k, comp in enumerate(dst) for m in comp}
    out = []
    for comp in src:
        a, i = comp[0]
        out.append(where[(a, f.at(a)[i])])
    return tuple(out)


def test_family(C: FinCat, extra: Sequence[tuple[str, Presheaf]] = ()) -> list[tuple[str, Presheaf]]:
    """Representables, 0, 1, 2, Omega, then any extra named presheaves."""
    fam = [(f"y:{c}", representable(C, c)) for c in C.objects]
    fam += [("0", initial(C)), ("1", terminal(C)), ("2", two(C)), ("Omega", omega(C))]
    fam += list(extra)
    return fam


# --- enumeration of presheaves up to isomorphism ---------------------------------------

def _action_tables(C: FinCat, sizes: Sequence[int], budget: int) -> Iterator[dict]:
    """All functorial action tables for a fixed size profile."""
    arrows = [f for f in C.non_identity_arrows()]
    idx = {f.name: n for n, f in enumerate(arrows)}
    n_of = {a: sizes[k] for k, a in enumerate(C.objects)}
    tables = [[-1] * n_of[f.cod] for f in arrows]
    # rules[(h or g)] : constraints (g, f, h) with X(h) = X(f) . X(g)
    rules = []
    for (g, f), h in C.compose_table.items():
        if C.is_identity(g) or C.is_identity(f):
            continue
        rules.append((g, f, h))
    by_g: dict[str, list] = {}
    by_f: dict[str, list] = {}
    by_h: dict[str, list] = {}
    for r in rules:
        by_g.setdefault(r[0], []).append(r)
        by_f.setdefault(r[1], []).append(r)
        by_h.setdefault(r[2], []).append(r)

    def val(name, x):
        if C.is_identity(name):
            return x
        return tables[idx[name]][x]

    trail: list[tuple[int, int]] = []

    def assign(ai: int, x: int, v: int) -> bool:
        stack = [(ai, x, v)]
        while stack:
            ai, x, v = stack.pop()
            cur = tables[ai][x]
            if cur == v:
                continue
            if cur != -1:
                return False
            tables[ai][x] = v
            trail.append((ai, x))
            name = arrows[ai].name
            checks = []
            for g, f, h in by_g.get(name, ()):
                checks.append((g, f, h, x))
            for g, f, h in by_h.get(name, ()):
                checks.append((g, f, h, x))
            for g, f, h in by_f.get(name, ()):
                for y in range(n_of[C.cod(g)]):
                    if val(g, y) == x:
                        checks.append((g, f, h, y))
            for g, f, h, y in checks:
                gy = val(g, y)
                if gy == -1:
                    continue
                fgy = val(f, gy)
                hy = val(h, y)
                if fgy != -1 and hy != -1:
                    if fgy != hy:
                        return False
                elif fgy != -1:
                    if C.is_identity(h):
                        if fgy != y:
                            return False
                    else:
                        stack.append((idx[h], y, fgy))
                elif hy != -1:
                    if C.is_identity(f):
                        if hy != gy:
                            return False
                    else:
                        stack.append((idx[f], gy, hy))
        return True

    def undo(mark):
        while len(trail) > mark:
            ai, x = trail.pop()
            tables[ai][x] = -1

    slots = [(ai, x) for ai, f in enumerate(arrows) for x in range(n_of[f.cod])]
    for ai, f in enumerate(arrows):
        if n_of[f.cod] and not n_of[f.dom]:
            return
    states = 0

    def rec(n):
        nonlocal states
        while n < len(slots) and tables[slots[n][0]][slots[n][1]] != -1:
            n += 1
        if n == len(slots):
            yield {f.name: tuple(tables[ai]) for ai, f in enumerate(arrows)}
            return
        ai, x = slots[n]
        for v in range(n_of[arrows[ai].dom]):
            states += 1
            if states > budget:
                raise BudgetExceeded("enumerate_presheaves", states, budget)
            mark = len(trail)
            if assign(ai, x, v):
                yield from rec(n + 1)
            undo(mark)

    yield from rec(0)


def _invariant(X: Presheaf, rounds: int = 3) -> tuple:
    """Isomorphism invariant: multiset of element colours after colour refinement."""
    C = X.index
    arrows = C.non_identity_arrows()
    colour = {(a, i): (a,) for a in C.objects for i in range(X.size(a))}
    for _ in range(rounds):
        pre: dict[tuple, list] = {k: [] for k in colour}
        post: dict[tuple, list] = {k: [] for k in colour}
        for f in arrows:
            for i, j in enumerate(X.action[f.name]):
                post[(f.cod, i)].append((f.name, colour[(f.dom, j)]))
                pre[(f.dom, j)].append((f.name, colour[(f.cod, i)]))
        colour = {k: (colour[k], tuple(sorted(post[k])), tuple(sorted(pre[k])))
                  for k in colour}
        names = {c: n for n, c in enumerate(sorted(set(colour.values())))}
        colour = {k: (k[0], names[c]) for k, c in colour.items()}
    return (X.profile(), tuple(sorted(colour.values())))


def enumerate_presheaves(C: FinCat, bound: int, *, total: int | None = None,
                         budget: int | None = None) -> list[Presheaf]:
    """Presheaves with at most ``bound`` elements at each object (and at most
    ``total`` elements overall, if given), one per isomorphism class.

    Elements are named ``"0", "1", ...``; order is by size profile, then by
    action tables.
    """
    budget = LIMITS.states if budget is None else budget
    reps: list[Presheaf] = []
    buckets: dict[tuple, list[Presheaf]] = {}
    for sizes in itertools.product(range(bound + 1), repeat=len(C.objects)):
        if total is not None and sum(sizes) > total:
            continue
        sets = {a: [str(i) for i in range(n)] for a, n in zip(C.objects, sizes)}
        for tables in _action_tables(C, sizes, budget):
            X = Presheaf(C, sets, tables, check=False)
            key = _invariant(X)
            bucket = buckets.setdefault(key, [])
            if any(iso_search(Y, X, budget=budget) is not None for Y in bucket):
                continue
            bucket.append(X)
            reps.append(X)
    reps.sort(key=lambda X: (X.total_size(), X.profile()))
    return reps
