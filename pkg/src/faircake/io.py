"""JSON cake files and machine-readable solve records.

A cake file looks like::

    {
      "agents": ["Alice", "Bob"],
      "slices": [{"length": "1", "densities": ["1", "0"]}, ...],
      "enlargement": [{"length": "1", "densities": ["2", "0"]}]
    }

``length`` defaults to 1 and ``enlargement`` is optional. Numbers may be JSON
numbers or strings such as ``"7/3"``; a decimal like ``0.2`` means exactly
1/5. Records always write
rationals as ``"a/b"`` strings so nothing is lost to floats.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .cake import Allocation, AllocationError, Cake, CakeError, Slice, as_fraction
from .ceei import PriceVector


class CakeFormatError(ValueError):
    """A cake or allocation file could not be parsed."""


def _num(value, where: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError) as exc:
        raise CakeFormatError(f"{where}: {exc}") from None


def parse_slices(items, n_agents: int, block: str) -> list[Slice]:
    if not isinstance(items, list):
        raise CakeFormatError(f"'{block}' must be a list of slices")
    out = []
    for j, item in enumerate(items):
        where = f"{block}[{j}]"
        if not isinstance(item, dict) or "densities" not in item:
            raise CakeFormatError(f"{where}: expected an object with 'densities'")
        dens = item["densities"]
        if not isinstance(dens, list) or len(dens) != n_agents:
            raise CakeFormatError(f"{where}: need {n_agents} densities, one per agent")
        values = tuple(_num(d, f"{where}.densities[{i}]") for i, d in enumerate(dens))
        length = _num(item.get("length", 1), f"{where}.length")
        try:
            out.append(Slice(length, values))
        except CakeError as exc:
            raise CakeFormatError(f"{where}: {exc}") from None
    return out


def parse_cake(obj: Any) -> tuple[Cake, tuple]:
    """Cake and enlargement slices (possibly empty) from a decoded JSON object."""
    if not isinstance(obj, dict):
        raise CakeFormatError("a cake file must hold a JSON object")
    agents = obj.get("agents")
    if not isinstance(agents, list) or not agents:
        raise CakeFormatError("'agents' must be a non-empty list of names")
    slices = parse_slices(obj.get("slices"), len(agents), "slices")
    extra = parse_slices(obj.get("enlargement", []), len(agents), "enlargement")
    try:
        cake = Cake(tuple(agents), tuple(slices))
        if extra:
            Cake(tuple(agents), tuple(slices) + tuple(extra))
    except CakeError as exc:
        raise CakeFormatError(str(exc)) from None
    return cake, tuple(extra)


def load_cake(path) -> tuple[Cake, tuple]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CakeFormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CakeFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_cake(obj)


def cake_to_json(cake: Cake, extra=()) -> dict:
    def dump(s: Slice):
        return {"length": str(s.length), "densities": [str(d) for d in s.densities]}
    obj = {"agents": list(cake.agents), "slices": [dump(s) for s in cake.slices]}
    if extra:
        obj["enlargement"] = [dump(s) for s in extra]
    return obj


def fixture_names() -> list[str]:
    root = resources.files("faircake") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir()
                  if p.name.endswith(".json") and not p.name.endswith(".alloc.json"))


def load_fixture(name: str) -> tuple[Cake, tuple]:
    """A bundled cake by name, e.g. ``load_fixture("leximin_example")``."""
    path = resources.files("faircake") / "fixtures" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no fixture {name!r}; available: {', '.join(fixture_names())}")
    return parse_cake(json.loads(path.read_text()))


def load_fixture_allocation(name: str, cake: Cake):
    path = resources.files("faircake") / "fixtures" / f"{name}.alloc.json"
    return parse_allocation(json.loads(path.read_text()), cake)


# -- records ---------------------------------------------------------------------

def _out(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_out(x) for x in v]
    if isinstance(v, dict):
        return {k: _out(x) for k, x in v.items()}
    return v


def result_record(cake: Cake, result) -> dict:
    rec = {
        "rule": result.rule,
        "agents": list(cake.agents),
        "fractions": _out(result.allocation.fractions),
        "absolute": _out(result.utilities.absolute),
        "relative": _out(result.utilities.relative),
    }
    if result.prices is not None:
        rec["prices"] = _out(result.prices.densities)
    if result.diagnostics:
        rec["diagnostics"] = _out(result.diagnostics)
    return rec


def _price(v, where):
    if isinstance(v, float):
        return v
    return _num(v, where)


def parse_allocation(obj: Any, cake: Cake) -> tuple[Allocation, Optional[PriceVector]]:
    """Allocation (and prices, if present) from a record or a bare ``fractions`` object."""
    if isinstance(obj, list):
        obj = {"fractions": obj}
    if not isinstance(obj, dict) or "fractions" not in obj:
        raise CakeFormatError("an allocation needs a 'fractions' matrix")
    rows = obj["fractions"]
    if not isinstance(rows, list) or len(rows) != cake.n_agents:
        raise CakeFormatError(f"'fractions' needs {cake.n_agents} rows, one per agent")
    fr = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != cake.n_slices:
            raise CakeFormatError(f"fractions row {i} ({cake.agents[i]}) needs {cake.n_slices} entries")
        fr.append(tuple(_num(x, f"fractions[{i}][{j}]")
                        for j, x in enumerate(row)))
    try:
        alloc = Allocation(tuple(fr))
    except AllocationError as exc:
        raise CakeFormatError(str(exc)) from None
    prices = None
    if "prices" in obj and obj["prices"] is not None:
        p = obj["prices"]
        if not isinstance(p, list) or len(p) != cake.n_slices:
            raise CakeFormatError(f"'prices' needs {cake.n_slices} densities, one per slice")
        prices = PriceVector(tuple(_price(x, f"prices[{j}]") for j, x in enumerate(p)))
    return alloc, prices


def dumps(record: dict) -> str:
    return json.dumps(record, indent=2)
