"""Builtin index categories."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .fincat import FinCat, discrete_category, from_table, monoid_category, opposite, \
    poset_category, terminal_category


@dataclass(frozen=True)
class BuiltinSite:
    id: str
    category: FinCat
    note: str
    expected: dict = field(default_factory=dict)


def idempotent_monoid() -> FinCat:
    """``E = {1, e}`` with ``e.e = e``, as a one-object category."""
    return monoid_category(["1", "e"], lambda x, y: "1" if x == y == "1" else "e", "1")


def chain3() -> FinCat:
    order = {"0": 0, "m": 1, "1": 2}
    return poset_category(["0", "m", "1"], lambda a, b: order[a] <= order[b])


def reflexive_graph() -> FinCat:
    """Vertices ``V`` and edges ``E``; ``s, t: V -> E`` pick source and
    target, ``l: E -> V`` the degenerate loop."""
    arrows = [("s", "V", "E"), ("t", "V", "E"), ("l", "E", "V"),
              ("sl", "E", "E"), ("tl", "E", "E")]
    compose = [("l", "s", "id_V"), ("l", "t", "id_V"), ("s", "l", "sl"), ("t", "l", "tl"),
               ("sl", "s", "s"), ("sl", "t", "s"), ("tl", "s", "t"), ("tl", "t", "t"),
               ("l", "sl", "l"), ("l", "tl", "l"),
               ("sl", "sl", "sl"), ("sl", "tl", "sl"), ("tl", "sl", "tl"), ("tl", "tl", "tl")]
    return from_table(["E", "V"], arrows, compose)


_NOTES = {
    "terminal": "one object, one arrow; presheaves are finite sets",
    "E-op": "the monoid {1, e} with e.e = e, opposite; presheaves are sets "
            "with an idempotent endofunction",
    "chain3": "the chain 0 <= m <= 1, a finite Heyting lattice with all meets",
    "discrete2": "two objects, identities only; presheaves are pairs of sets",
    "reflexive_graph": "presheaves are reflexive graphs",
}

_EXPECTED = {
    "terminal": {"mclarty": True, "atomic_representables": ["*"], "atomics": ["1"]},
    "E-op": {"mclarty": True, "atomic_representables": [], "atomics": ["1"]},
    "chain3": {"mclarty": False, "atomic_representables": ["0", "1", "m"],
               "failing": ["counit_monic", "nullstellensatz", "two_valued"]},
    "discrete2": {"mclarty": False, "atomic_representables": [], "atomics": ["1"],
                  "failing": ["counit_monic", "delta_fully_faithful", "nullstellensatz",
                              "pi_preserves_products", "two_valued"]},
    "reflexive_graph": {"mclarty": True, "atomic_representables": ["V"], "atomics": ["1"]},
}

_BUILDERS = {
    "terminal": terminal_category,
    "E-op": lambda: opposite(idempotent_monoid()),
    "chain3": chain3,
    "discrete2": lambda: discrete_category(["a", "b"]),
    "reflexive_graph": reflexive_graph,
}

BUILTIN_IDS = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def builtin(site_id: str) -> BuiltinSite:
    if site_id not in _BUILDERS:
        raise KeyError(f"unknown builtin site {site_id!r}; known: {', '.join(BUILTIN_IDS)}")
    return BuiltinSite(site_id, _BUILDERS[site_id](), _NOTES[site_id], _EXPECTED[site_id])


def builtin_sites() -> list[BuiltinSite]:
    return [builtin(s) for s in BUILTIN_IDS]
