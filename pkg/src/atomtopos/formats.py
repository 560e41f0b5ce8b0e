"""JSON site, presheaf and report formats."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

from . import __version__
from .atomic import AtomicityVerdict, Retraction
from .diagram import (
    InvalidNatTrans, InvalidPresheaf, NatTrans, Presheaf, identity, initial, label, omega, product,
    representable, terminal, two,
)
from .fincat import FinCat, InvalidCategory, opposite, validate_category
from .sites import builtin


class InputError(ValueError):
    """Unreadable, malformed or inconsistent input (exit code 2)."""


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, UTF-8 text."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from None


# --- sites ----------------------------------------------------------------------

def site_to_raw(C: FinCat) -> dict:
    return C.to_raw()


def site_digest(C: FinCat) -> str:
    canon = json.dumps(site_to_raw(C), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _check_site_shape(raw: Any, where: str) -> None:
    if not isinstance(raw, Mapping):
        raise InputError(f"{where}: a site must be a JSON object")
    for key in ("objects", "arrows"):
        if not isinstance(raw.get(key, []), list):
            raise InputError(f"{where}: {key!r} must be a list")
    if not isinstance(raw.get("compose", []), list):
        raise InputError(f"{where}: 'compose' must be a list")
    for rec in raw.get("arrows", []):
        if not (isinstance(rec, Mapping) and {"name", "dom", "cod"} <= set(rec)):
            raise InputError(f"{where}: each arrow needs name, dom and cod")
    for t in raw.get("compose", []):
        if not (isinstance(t, list) and len(t) == 3):
            raise InputError(f"{where}: each composite is a triple [g, f, h]")


def parse_site(raw: Any, where: str = "site") -> FinCat:
    """Validate a raw site; law violations raise :class:`InvalidCategory`."""
    _check_site_shape(raw, where)
    return validate_category(raw)


def load_site(spec: str | Mapping, base: Path | None = None) -> tuple[FinCat, str]:
    """``builtin:<id>``, a path, or an inline mapping; returns (site, label)."""
    if isinstance(spec, Mapping):
        return parse_site(spec, "inline site"), "inline"
    if spec.startswith("builtin:"):
        try:
            return builtin(spec.split(":", 1)[1]).category, spec
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    path = Path(spec) if base is None or Path(spec).is_absolute() else base / spec
    return parse_site(read_json(path), str(path)), str(spec)


# --- presheaves -----------------------------------------------------------------

def presheaf_from_raw(raw: Any, C: FinCat | None = None, where: str = "presheaf",
                      base: Path | None = None) -> Presheaf:
    """Parse a presheaf document.

    ``variance: "copresheaf"`` means the action maps go along the arrows of the
    given site; such data is stored as a presheaf on the opposite site.
    """
    if not isinstance(raw, Mapping):
        raise InputError(f"{where}: a presheaf must be a JSON object")
    variance = raw.get("variance", "presheaf")
    if variance not in ("presheaf", "copresheaf"):
        raise InputError(f"{where}: variance must be 'presheaf' or 'copresheaf'")
    if "site" in raw:
        try:
            site, _ = load_site(raw["site"], base)
        except InvalidCategory as exc:
            raise InputError(f"{where}: invalid site: {exc}") from None
        index = opposite(site) if variance == "copresheaf" else site
        if C is not None and index != C:
            raise InputError(f"{where}: presheaf lives on a different site")
    elif C is not None:
        index = C
    else:
        raise InputError(f"{where}: no site given")
    sets = raw.get("sets", {})
    action = raw.get("action", {})
    if not isinstance(sets, Mapping) or not isinstance(action, Mapping):
        raise InputError(f"{where}: 'sets' and 'action' must be objects")
    unknown = [o for o in sets if o not in index.obj_pos]
    if unknown:
        raise InputError(f"{where}: unknown objects {unknown}")
    sets = {o: [str(x) for x in sets.get(o, [])] for o in index.objects}
    maps = {str(f): {str(k): str(v) for k, v in m.items()} for f, m in action.items()}
    for arr in index.arrows:
        if index.is_identity(arr.name) and arr.name not in maps:
            maps[arr.name] = {x: x for x in sets[arr.cod]}
    try:
        return Presheaf.from_maps(index, sets, maps)
    except InvalidPresheaf as exc:
        raise InputError(f"{where}: {exc}") from None


def presheaf_to_raw(X: Presheaf) -> dict:
    return {"variance": "presheaf", "site": site_to_raw(X.index), **X.to_raw()}


def resolve_presheaf(spec: str, C: FinCat) -> tuple[str, Presheaf]:
    """A named presheaf (``1``, ``0``, ``2``, ``Omega``, ``y:<obj>``) or a file."""
    if spec == "1":
        return spec, terminal(C)
    if spec == "0":
        return spec, initial(C)
    if spec == "2":
        return spec, two(C)
    if spec == "Omega":
        return spec, omega(C)
    if spec.startswith("y:"):
        obj = spec[2:]
        if obj not in C.obj_pos:
            raise InputError(f"unknown object {obj!r} in {spec!r}")
        return spec, representable(C, obj)
    path = Path(spec)
    return spec, presheaf_from_raw(read_json(path), C, spec, path.parent)


# --- maps and verdicts -------------------------------------------------------------

def nat_to_raw(t: NatTrans) -> dict:
    C = t.dom.index
    return {a: {label(t.dom.sets[a][i]): label(t.cod.sets[a][v]) for i, v in enumerate(t.at(a))}
            for a in C.objects}


def nat_from_raw(raw: Mapping, dom: Presheaf, cod: Presheaf) -> NatTrans:
    C = dom.index
    comp = []
    for a in C.objects:
        cpos = {label(y): n for n, y in enumerate(cod.sets[a])}
        comp.append([cpos[raw[a][label(x)]] for x in dom.sets[a]])
    return NatTrans(dom, cod, comp, check=True)


def verdict_to_raw(v: AtomicityVerdict) -> dict:
    if v.atomic:
        return {"atomic": True,
                "witnesses": {a: {"object": w.c, "s": nat_to_raw(w.s), "r": nat_to_raw(w.r)}
                              for a, w in v.witnesses.items()}}
    a, tv = v.certificate
    return {"atomic": False, "certificate": {"object": a, "search": list(tv.log),
                                             "complete": True}}


def replay_witness(T: Presheaf, a: str, raw: Mapping) -> bool:
    """Standalone check that a serialized witness for ``y_a x T`` composes to
    the identity; malformed or non-natural data replays as ``False``."""
    C = T.index
    P = product(representable(C, a), T)
    try:
        yc = representable(C, raw["object"])
        s = nat_from_raw(raw["s"], P, yc)
        r = nat_from_raw(raw["r"], yc, P)
    except (KeyError, TypeError, InvalidNatTrans):
        return False
    return Retraction(raw["object"], s, r).holds() and r @ s == identity(P)


# --- reports ----------------------------------------------------------------------

def make_report(command: list[str], C: FinCat | None, results: Any,
                budget: Mapping[str, int], **extra) -> dict:
    rep = {"tool": "atomtopos", "version": __version__, "command": list(command),
           "site_digest": site_digest(C) if C is not None else None,
           "results": results, "budget": dict(budget)}
    rep.update(extra)
    return rep


def emit(report: Mapping, fmt: str = "human") -> str:
    if fmt == "machine":
        return dumps(report)
    return "\n".join(_human(report, 0)) + "\n"


def parse_report(text: str) -> dict:
    return json.loads(text)


def _human(obj: Any, depth: int) -> list[str]:
    pad = "  " * depth
    lines = []
    if isinstance(obj, Mapping):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (Mapping, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_human(v, depth + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (Mapping, list)) and v:
                sub = _human(v, depth + 1)
                lines.append(f"{pad}- " + sub[0].lstrip())
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _scalar(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if isinstance(v, (list, dict)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)
