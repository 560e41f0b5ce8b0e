"""Finite categories given by composition tables, and functors between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from ._util import components


class Arrow(NamedTuple):
    name: str
    dom: str
    cod: str


class InvalidCategory(ValueError):
    """Raised by :func:`validate_category`; ``errors`` lists every violation."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class FinCat:
    """A validated finite category.

    Objects and arrows are opaque string identifiers kept in lexicographic
    order. ``compose[(g, f)]`` is the name of ``g . f`` (``f`` first).
    Instances are immutable; build them with :func:`validate_category`.
    """

    def __init__(self, objects, arrows, identities, compose):
        self.objects: tuple[str, ...] = tuple(objects)
        self.arrows: tuple[Arrow, ...] = tuple(arrows)
        self.identities: dict[str, str] = dict(identities)
        self.compose_table: dict[tuple[str, str], str] = dict(compose)
        self._arrow = {a.name: a for a in self.arrows}
        self.obj_pos = {o: k for k, o in enumerate(self.objects)}
        self.arrow_pos = {a.name: k for k, a in enumerate(self.arrows)}

    # structural identity
    @cached_property
    def _key(self):
        return (self.objects, self.arrows,
                tuple(sorted(self.identities.items())),
                tuple(sorted(self.compose_table.items())))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FinCat) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FinCat(objects={list(self.objects)}, arrows={len(self.arrows)})"

    def arrow(self, name: str) -> Arrow:
        return self._arrow[name]

    def dom(self, f: str) -> str:
        return self._arrow[f].dom

    def cod(self, f: str) -> str:
        return self._arrow[f].cod

    def identity(self, a: str) -> str:
        return self.identities[a]

    def is_identity(self, f: str) -> bool:
        arr = self._arrow[f]
        return self.identities[arr.dom] == f

    def compose(self, g: str, f: str) -> str:
        """``g . f``; raises KeyError when ``cod(f) != dom(g)``."""
        return self.compose_table[(g, f)]

    @cached_property
    def _homs(self) -> dict[tuple[str, str], tuple[str, ...]]:
        homs: dict[tuple[str, str], list[str]] = {
            (a, b): [] for a in self.objects for b in self.objects}
        for arr in self.arrows:
            homs[(arr.dom, arr.cod)].append(arr.name)
        return {k: tuple(v) for k, v in homs.items()}

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._homs[(a, b)]

    def arrows_into(self, b: str) -> tuple[str, ...]:
        return tuple(a.name for a in self.arrows if a.cod == b)

    def arrows_from(self, a: str) -> tuple[str, ...]:
        return tuple(x.name for x in self.arrows if x.dom == a)

    def non_identity_arrows(self) -> tuple[Arrow, ...]:
        return tuple(a for a in self.arrows if not self.is_identity(a.name))

    def composable_pairs(self) -> Iterable[tuple[str, str]]:
        for g in self.arrows:
            for f in self.arrows:
                if f.cod == g.dom:
                    yield g.name, f.name

    def endomorphisms(self, a: str) -> tuple[str, ...]:
        return self.hom(a, a)

    def idempotents(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.arrows
                     if a.dom == a.cod and self.compose(a.name, a.name) == a.name)

    def to_raw(self) -> dict:
        """Canonical raw description (identity composites omitted)."""
        compose = [[g, f, h] for (g, f), h in sorted(self.compose_table.items())
                   if not (self.is_identity(g) or self.is_identity(f))]
        out = {
            "objects": list(self.objects),
            "arrows": [{"name": a.name, "dom": a.dom, "cod": a.cod}
                       for a in self.arrows],
            "compose": compose,
        }
        if any(self.identities[o] != f"id_{o}" for o in self.objects):
            out["identities"] = dict(sorted(self.identities.items()))
        return out


def validate_category(raw: Mapping) -> FinCat:
    """Build a :class:`FinCat` from a raw description, checking every law.

    ``raw`` has keys ``objects``, ``arrows`` (``{name, dom, cod}`` records),
    ``compose`` (triples ``[g, f, h]`` meaning ``g . f = h``) and optionally
    ``identities``. Identities default to ``id_<object>`` and are added when
    missing; composites with an identity may be omitted.
    """
    errors: list[str] = []
    objects = [str(o) for o in raw.get("objects", [])]
    seen = set()
    for o in objects:
        if o in seen:
            errors.append(f"duplicate object {o!r}")
        seen.add(o)

    arrows: dict[str, Arrow] = {}
    for rec in raw.get("arrows", []):
        if isinstance(rec, Mapping):
            name, dom, cod = rec.get("name"), rec.get("dom"), rec.get("cod")
        else:
            name, dom, cod = rec
        name, dom, cod = str(name), str(dom), str(cod)
        if name in arrows:
            errors.append(f"duplicate arrow {name!r}")
            continue
        if dom not in seen:
            errors.append(f"dangling dom {dom!r} of arrow {name!r}")
        if cod not in seen:
            errors.append(f"dangling cod {cod!r} of arrow {name!r}")
        arrows[name] = Arrow(name, dom, cod)

    identities = {str(k): str(v) for k, v in dict(raw.get("identities", {})).items()}
    for o in objects:
        ident = identities.setdefault(o, f"id_{o}")
        if ident not in arrows:
            arrows[ident] = Arrow(ident, o, o)
        elif arrows[ident].dom != o or arrows[ident].cod != o:
            errors.append(f"identity {ident!r} is not an endomorphism of {o!r}")
    if errors:
        raise InvalidCategory(errors)

    compose: dict[tuple[str, str], str] = {}
    for triple in raw.get("compose", []):
        g, f, h = (str(x) for x in triple)
        bad = [x for x in (g, f, h) if x not in arrows]
        if bad:
            errors.append(f"unknown arrow(s) {bad} in composite ({g},{f})")
            continue
        if arrows[f].cod != arrows[g].dom:
            errors.append(f"non-composable pair ({g},{f})")
            continue
        if (g, f) in compose and compose[(g, f)] != h:
            errors.append(f"conflicting composite ({g},{f}): {compose[(g, f)]} vs {h}")
            continue
        compose[(g, f)] = h
    for f in arrows.values():
        for key, val in (((identities[f.cod], f.name), f.name),
                         ((f.name, identities[f.dom]), f.name)):
            if key in compose and compose[key] != val:
                errors.append(f"identity law fails for {f.name!r}: "
                              f"{key[0]}.{key[1]} = {compose[key]}")
            compose[key] = val
    if errors:
        raise InvalidCategory(errors)

    errors.extend(check_laws(objects, arrows, compose))
    if errors:
        raise InvalidCategory(errors)
    objects = sorted(objects)
    arrow_list = sorted(arrows.values(), key=lambda a: a.name)
    return FinCat(objects, arrow_list, identities, compose)


def check_laws(objects, arrows: Mapping[str, Arrow], compose) -> list[str]:
    errors = []
    for g in arrows.values():
        for f in arrows.values():
            if f.cod != g.dom:
                continue
            h = compose.get((g.name, f.name))
            if h is None:
                errors.append(f"missing composite ({g.name},{f.name})")
            elif arrows[h].dom != f.dom or arrows[h].cod != g.cod:
                errors.append(f"composite ({g.name},{f.name}) = {h} has wrong dom/cod")
    if errors:
        return errors
    for h in arrows.values():
        for g in arrows.values():
            if g.cod != h.dom:
                continue
            hg = compose[(h.name, g.name)]
            for f in arrows.values():
                if f.cod != g.dom:
                    continue
                left = compose[(h.name, compose[(g.name, f.name)])]
                right = compose[(hg, f.name)]
                if left != right:
                    errors.append(f"associativity fails for ({h.name},{g.name},{f.name})")
    return errors


def from_table(objects, arrows, compose=(), identities=None) -> FinCat:
    raw = {"objects": list(objects),
           "arrows": [{"name": n, "dom": d, "cod": c} for n, d, c in arrows],
           "compose": [list(t) for t in compose]}
    if identities:
        raw["identities"] = dict(identities)
    return validate_category(raw)


def opposite(C: FinCat) -> FinCat:
    arrows = [Arrow(a.name, a.cod, a.dom) for a in C.arrows]
    compose = {(f, g): h for (g, f), h in C.compose_table.items()}
    return FinCat(C.objects, arrows, C.identities, compose)


def terminal_category() -> FinCat:
    return from_table(["*"], [])


def discrete_category(objects: Iterable[str]) -> FinCat:
    return from_table(list(objects), [])


def poset_category(elements, leq) -> FinCat:
    """Category of a finite poset; ``leq(a, b)`` gives the order. Arrows are
    named ``a<=b`` with identities ``id_a``."""
    elements = list(elements)

    def name(a, b):
        return f"id_{a}" if a == b else f"{a}<={b}"

    arrows = [(name(a, b), a, b) for a in elements for b in elements
              if a != b and leq(a, b)]
    compose = []
    for a, b, c in itertools.product(elements, repeat=3):
        if a != b and b != c and leq(a, b) and leq(b, c):
            compose.append((name(b, c), name(a, b), name(a, c)))
    return from_table(elements, arrows, compose)


def monoid_category(elements, mult, unit, obj: str = "*") -> FinCat:
    """One-object category of a finite monoid; ``mult(x, y)`` is ``x*y``,
    read as the composite ``x . y``."""
    arrows = [(x, obj, obj) for x in elements if x != unit]
    compose = [(x, y, mult(x, y)) for x in elements for y in elements
               if x != unit and y != unit]
    return from_table([obj], arrows, compose, identities={obj: unit})


@dataclass(frozen=True)
class FinFunctor:
    source: FinCat
    target: FinCat
    obj_map: Mapping[str, str]
    arr_map: Mapping[str, str]

    def __post_init__(self):
        errors = functor_violations(self)
        if errors:
            raise InvalidCategory(errors)

    def __call__(self, x: str) -> str:
        if x in self.arr_map:
            return self.arr_map[x]
        return self.obj_map[x]

    def opposite(self) -> "FinFunctor":
        return FinFunctor(opposite(self.source), opposite(self.target),
                          self.obj_map, self.arr_map)

    def is_full(self) -> bool:
        S, T = self.source, self.target
        return all(
            {self.arr_map[f] for f in S.hom(a, b)}
            == set(T.hom(self.obj_map[a], self.obj_map[b]))
            for a in S.objects for b in S.objects)

    def is_faithful(self) -> bool:
        S = self.source
        return all(len({self.arr_map[f] for f in S.hom(a, b)}) == len(S.hom(a, b))
                   for a in S.objects for b in S.objects)


def functor_violations(F: FinFunctor) -> list[str]:
    S, T = F.source, F.target
    errors = []
    for o in S.objects:
        if F.obj_map.get(o) not in T.obj_pos:
            errors.append(f"object {o!r} not mapped into target")
    for a in S.arrows:
        img = F.arr_map.get(a.name)
        if img is None or img not in T.arrow_pos:
            errors.append(f"arrow {a.name!r} not mapped into target")
            continue
        if T.dom(img) != F.obj_map.get(a.dom) or T.cod(img) != F.obj_map.get(a.cod):
            errors.append(f"arrow {a.name!r} mapped with wrong dom/cod")
    if errors:
        return errors
    for o in S.objects:
        if F.arr_map[S.identity(o)] != T.identity(F.obj_map[o]):
            errors.append(f"identity of {o!r} not preserved")
    for (g, f), h in S.compose_table.items():
        if T.compose(F.arr_map[g], F.arr_map[f]) != F.arr_map[h]:
            errors.append(f"composite ({g},{f}) not preserved")
    return errors


def identity_functor(C: FinCat) -> FinFunctor:
    return FinFunctor(C, C, {o: o for o in C.objects},
                      {a.name: a.name for a in C.arrows})


def karoubi_envelope(C: FinCat) -> tuple[FinCat, FinFunctor]:
    """Idempotent completion of ``C`` with the embedding ``c -> (c, id_c)``.

    Objects are named after their idempotent; an arrow ``(a,e) -> (b,e')`` is
    an arrow ``f`` with ``e' . f . e = f``, named ``"e'|f|e"``.
    """
    idem = C.idempotents()
    arrows, compose = [], []
    for e in idem:
        for e2 in idem:
            for f in C.hom(C.dom(e), C.dom(e2)):
                if C.compose(e2, C.compose(f, e)) == f:
                    arrows.append((f"{e2}|{f}|{e}", e, e2, f))
    by_obj: dict[str, list] = {}
    for rec in arrows:
        by_obj.setdefault(rec[2], []).append(rec)
    for g in arrows:
        for f in by_obj.get(g[1], []):
            h = C.compose(g[3], f[3])
            compose.append((g[0], f[0], f"{g[2]}|{h}|{f[1]}"))
    K = from_table(idem, [(n, d, c) for n, d, c, _ in arrows], compose,
                   identities={e: f"{e}|{e}|{e}" for e in idem})
    obj_map = {o: C.identity(o) for o in C.objects}
    arr_map = {a.name: f"{C.identity(a.cod)}|{a.name}|{C.identity(a.dom)}"
               for a in C.arrows}
    return K, FinFunctor(C, K, obj_map, arr_map)


def split_idempotent(C: FinCat, e: str):
    """A splitting ``(b, r: a->b, s: b->a)`` with ``s.r = e`` and ``r.s = id_b``,
    or None."""
    a = C.dom(e)
    for b in C.objects:
        for r in C.hom(a, b):
            for s in C.hom(b, a):
                if C.compose(s, r) == e and C.compose(r, s) == C.identity(b):
                    return b, r, s
    return None


def idempotents_split(C: FinCat) -> bool:
    return all(split_idempotent(C, e) is not None for e in C.idempotents())


def comma_components(F: FinFunctor, j: str) -> list[list[tuple[str, str]]]:
    """Connected components of the comma category ``(j | F)``.

    Elements are pairs ``(u, k)`` with ``u: j -> F(k)``; ``(u, k)`` is joined
    to ``(F(v) . u, k')`` for every ``v: k -> k'``.
    """
    Jp, J = F.source, F.target
    nodes = [(u, k) for k in Jp.objects for u in J.hom(j, F.obj_map[k])]
    pos = {n: i for i, n in enumerate(nodes)}
    edges = []
    for v in Jp.arrows:
        for u in J.hom(j, F.obj_map[v.dom]):
            edges.append((pos[(u, v.dom)],
                          pos[(J.compose(F.arr_map[v.name], u), v.cod)]))
    labels, count = components(len(nodes), edges)
    groups: list[list[tuple[str, str]]] = [[] for _ in range(count)]
    for n, lab in zip(nodes, labels):
        groups[lab].append(n)
    return groups


# --- structure probes -------------------------------------------------------

def initial_objects(C: FinCat) -> list[str]:
    return [a for a in C.objects if all(len(C.hom(a, b)) == 1 for b in C.objects)]


def terminal_objects(C: FinCat) -> list[str]:
    return [b for b in C.objects if all(len(C.hom(a, b)) == 1 for a in C.objects)]


@dataclass(frozen=True)
class ProductCone:
    left: str
    right: str
    apex: str
    p1: str
    p2: str


def find_product(C: FinCat, a: str, b: str) -> ProductCone | None:
    """Search every cone over ``(a, b)`` for one with the universal property."""
    for p in C.objects:
        for p1 in C.hom(p, a):
            for p2 in C.hom(p, b):
                if _is_product(C, p, p1, p2, a, b):
                    return ProductCone(a, b, p, p1, p2)
    return None


def _is_product(C, p, p1, p2, a, b) -> bool:
    for x in C.objects:
        mediators: dict[tuple[str, str], int] = {}
        for h in C.hom(x, p):
            key = (C.compose(p1, h), C.compose(p2, h))
            mediators[key] = mediators.get(key, 0) + 1
        for f in C.hom(x, a):
            for g in C.hom(x, b):
                if mediators.get((f, g), 0) != 1:
                    return False
    return True


@dataclass
class StructureReport:
    initial: list[str]
    terminal: list[str]
    binary_products: bool
    products: dict[tuple[str, str], ProductCone | None] = field(repr=False)
    all_objects_pointed: bool
    all_objects_copointed: bool
    idempotents_split: bool

    def as_dict(self) -> dict:
        return {
            "initial": self.initial,
            "terminal": self.terminal,
            "binary_products": self.binary_products,
            "products": {f"{a},{b}": (None if c is None else
                                      {"apex": c.apex, "p1": c.p1, "p2": c.p2})
                         for (a, b), c in sorted(self.products.items())},
            "all_objects_pointed": self.all_objects_pointed,
            "all_objects_copointed": self.all_objects_copointed,
            "idempotents_split": self.idempotents_split,
        }


def structure_report(C: FinCat) -> StructureReport:
    """Exhaustive structure probes.

    An object is *pointed* when it receives an arrow from a terminal object
    and *copointed* when it maps to an initial object.
    """
    init, term = initial_objects(C), terminal_objects(C)
    products = {(a, b): find_product(C, a, b) for a in C.objects for b in C.objects}
    pointed = bool(term) and all(C.hom(term[0], c) for c in C.objects)
    copointed = bool(init) and all(C.hom(c, init[0]) for c in C.objects)
    return StructureReport(init, term, all(v is not None for v in products.values()),
                           products, pointed, copointed, idempotents_split(C))


def product_functor(C: FinCat, t: str) -> FinFunctor:
    """``(-) x t`` on a category with the needed binary products.

    The action on arrows is the unique mediating arrow.
    """
    cones = {a: find_product(C, a, t) for a in C.objects}
    missing = [a for a, c in cones.items() if c is None]
    if missing:
        raise ValueError(f"no product with {t!r} for {missing}")
    arr_map = {}
    for f in C.arrows:
        src, dst = cones[f.dom], cones[f.cod]
        want = (C.compose(f.name, src.p1), src.p2)
        found = [h for h in C.hom(src.apex, dst.apex)
                 if (C.compose(dst.p1, h), C.compose(dst.p2, h)) == want]
        arr_map[f.name] = found[0]
    return FinFunctor(C, C, {a: cones[a].apex for a in C.objects}, arr_map)
