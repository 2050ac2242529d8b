"""JSON model files.

Floats are written with Python's shortest round-trip ``repr``, so parsing
returns the identical doubles and re-serialising gives identical bytes.
Complex numbers are ``[re, im]`` pairs.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path

from .errors import ModelFileError
from .geometry import ModelParams
from .local_model import LocalModelSpec
from .tower import LevelData, Model, Mutation, SubDisc

FORMAT = "baker-lab-model"
VERSION = 1


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _z(v) -> complex:
    if not (isinstance(v, list) and len(v) == 2):
        raise ModelFileError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def params_to_dict(p: ModelParams) -> dict:
    return {"mu": p.mu, "rho": p.rho, "K": p.K, "zeta0": _c(p.zeta0), "r0": p.r0,
            "j_max": p.j_max, "teich_constant": p.teich_constant}


def params_from_dict(d: dict) -> ModelParams:
    return ModelParams(mu=float(d["mu"]), rho=float(d["rho"]), K=float(d["K"]), zeta0=_z(d["zeta0"]),
                       r0=float(d["r0"]), j_max=int(d["j_max"]), teich_constant=float(d["teich_constant"]),
                       validate=False)


def _subdisc_to_dict(s: SubDisc) -> dict:
    sp = s.spec
    return {
        "index": s.index,
        "parent": s.parent,
        "omega": _c(sp.zeta),
        "rho": sp.r,
        "eta": sp.eta,
        "theta": sp.theta,
        "a": _c(sp.a),
        "alpha": _c(sp.alpha),
        "eps": sp.eps,
        "p": _c(sp.p),
        "crit_points": [_c(c) for c in s.crit_points],
        "crit_values": [_c(v) for v in s.crit_values],
        # absent terms (no siblings, no cousins) are +inf, written as "inf"
        "clearance": {k: (v if math.isfinite(v) else repr(v)) for k, v in s.clearance.items()},
    }


def _subdisc_from_dict(d: dict, mu: float) -> SubDisc:
    spec = LocalModelSpec(zeta=_z(d["omega"]), r=float(d["rho"]), eta=float(d["eta"]), theta=float(d["theta"]),
                          a=_z(d["a"]), alpha=_z(d["alpha"]), eps=float(d["eps"]), p=_z(d["p"]), mu=mu)
    cp = tuple(_z(c) for c in d["crit_points"])
    cv = tuple(_z(v) for v in d["crit_values"])
    if len(cp) != 2 or len(cv) != 2:
        raise ModelFileError("each sub-disc needs exactly two critical points and values")
    return SubDisc(index=int(d["index"]), spec=spec, parent=d["parent"],
                   clearance={k: float(v) for k, v in d["clearance"].items()},
                   crit_points=cp, crit_values=cv)


def model_to_dict(model: Model, lazy: bool = False, metadata: dict | None = None) -> dict:
    mut = model.mutation
    d = {
        "format": FORMAT,
        "version": VERSION,
        "params": params_to_dict(model.params),
        "lazy": bool(lazy),
        "mutation": None if mut is None else {"eps_factor": mut.eps_factor,
                                              "swap_targets_level": mut.swap_targets_level},
        "check_kw": dict(sorted(model.check_kw.items())),
        "levels": [{"j": lv.j, "back_targets": [_c(t) for t in lv.back_targets],
                    "subdiscs": [_subdisc_to_dict(s) for s in lv.subdiscs]} for lv in model.built_levels],
    }
    if metadata:
        d["metadata"] = metadata
    return d


def model_from_dict(d: dict) -> Model:
    if not isinstance(d, dict) or d.get("format") != FORMAT:
        raise ModelFileError("not a baker-lab model file")
    if d.get("version") != VERSION:
        raise ModelFileError(f"unsupported model file version {d.get('version')!r} (expected {VERSION})")
    try:
        params = params_from_dict(d["params"])
        levels = []
        for k, lv in enumerate(d["levels"]):
            if lv["j"] != k:
                raise ModelFileError(f"level {k} is stored out of order")
            subs = tuple(_subdisc_from_dict(s, params.mu) for s in lv["subdiscs"])
            levels.append(LevelData(j=k, subdiscs=subs, back_targets=tuple(_z(t) for t in lv["back_targets"])))
        mut = d.get("mutation")
        mutation = None if mut is None else Mutation(float(mut["eps_factor"]), mut["swap_targets_level"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from exc
    return Model(params, levels, mutation=mutation, check_kw=d.get("check_kw") or {})


def dumps(d: dict) -> str:
    return json.dumps(d, indent=1, allow_nan=False) + "\n"


def fingerprint(model: Model) -> str:
    """sha256 over parameters and per-level constants (no metadata)."""
    d = model_to_dict(model)
    d.pop("lazy")
    return hashlib.sha256(json.dumps(d, sort_keys=True, allow_nan=False).encode()).hexdigest()


def default_metadata() -> dict:
    from . import __version__

    meta = {"generator": f"baker_lab {__version__}"}
    # timestamps only on request, so that repeated builds stay byte-identical
    if "SOURCE_DATE_EPOCH" in os.environ:
        meta["source_date_epoch"] = int(os.environ["SOURCE_DATE_EPOCH"])
    return meta


def save(model: Model, path, lazy: bool = False, metadata: dict | None = None) -> str:
    text = dumps(model_to_dict(model, lazy, default_metadata() if metadata is None else metadata))
    Path(path).write_text(text)
    return text


def load(path) -> Model:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_dict(d)
