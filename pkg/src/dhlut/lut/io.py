"""JSON table files.

A table file is a single JSON object::

    {"version": 1, "variant": "full" | "hlut" | "dhlut", "m": 3, "min_count": 8,
     "mode": "sequential", "lanes": [0, 1], "coverage": 0.98, "training_seed": 7,
     "weights_mode": "analytic", "rng": "...",
     "lut1": [[...], ...], "lut2": [[...], ...] | "lut2_deg": [[...], ...] | "table": [[...], ...],
     "counts": {...}, "partition": [[g0, ..., g7], ...], "eta": [...]}

Arrays are per lane, in table index order. Floats are written with Python's
shortest round-trip repr, so loading restores every value bit for bit.
"""

import json

import numpy as np

from ..errors import InvalidInput, IoError
from ..shaping import RNG_NAME
from .degeneration import Partition
from .tables import DhLut, FullLut, HLut

FORMAT_VERSION = 1


def _rows(a):
    return [[float(v) for v in row] for row in np.asarray(a)]


def _int_rows(a):
    return [[int(v) for v in row] for row in np.asarray(a)]


def table_to_dict(table):
    doc = {
        "version": FORMAT_VERSION,
        "variant": table.variant,
        "m": table.m,
        "min_count": table.min_count,
        "mode": getattr(table, "mode", None),
        "lanes": list(range(table.lanes)),
        "coverage": table.coverage,
        "training_seed": table.seed,
        "weights_mode": getattr(table, "weights_mode", None),
        "rng": RNG_NAME,
    }
    if isinstance(table, FullLut):
        doc["table"] = _rows(table.table)
        doc["counts"] = {"table": _int_rows(table.counts)}
    elif isinstance(table, HLut):
        doc["lut1"] = _rows(table.lut1)
        doc["lut2"] = _rows(table.lut2)
        doc["counts"] = {"lut1": _int_rows(table.counts1), "lut2": _int_rows(table.counts2)}
    elif isinstance(table, DhLut):
        doc["lut1"] = _rows(table.lut1)
        doc["lut2_deg"] = _rows(table.lut2_deg)
        doc["partition"] = [list(p.group_of) for p in table.partitions]
        doc["eta"] = list(table.eta)
    else:
        raise InvalidInput(f"not a look-up table: {type(table).__name__}")
    return doc


def table_from_dict(doc):
    if doc.get("version") != FORMAT_VERSION:
        raise InvalidInput(f"unsupported table file version {doc.get('version')!r}")
    variant = doc.get("variant")
    common = {"m": doc["m"], "min_count": doc["min_count"], "seed": doc.get("training_seed")}
    if variant == "full":
        return FullLut(np.array(doc["table"], dtype=float), np.array(doc["counts"]["table"]), **common)
    if variant == "hlut":
        return HLut(
            np.array(doc["lut1"], dtype=float), np.array(doc["lut2"], dtype=float),
            np.array(doc["counts"]["lut1"]), np.array(doc["counts"]["lut2"]),
            mode=doc["mode"], **common,
        )
    if variant == "dhlut":
        return DhLut(
            np.array(doc["lut1"], dtype=float), np.array(doc["lut2_deg"], dtype=float),
            partitions=tuple(Partition(tuple(g)) for g in doc["partition"]),
            mode=doc["mode"], weights_mode=doc["weights_mode"], eta=tuple(doc.get("eta", ())),
            coverage=doc["coverage"], **common,
        )
    raise InvalidInput(f"unknown table variant {variant!r}")


def save_table(table, path):
    text = json.dumps(table_to_dict(table), indent=1) + "\n"
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write table file {path}: {exc}") from exc


def load_table(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read table file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc
    return table_from_dict(doc)
