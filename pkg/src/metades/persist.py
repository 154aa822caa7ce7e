"""JSON persistence for trained systems.

The file stores everything needed to reproduce classification exactly:
pool member parameters, the fitted NB selector, the selection split, the
frozen f5 scales, the hyper-parameters, and any AdaBoost model. Floats are
written with shortest-round-trip precision and keys are sorted, so saving
the same system twice yields byte-identical files. Derived state (the
pool's cached behavior on the selection split) is recomputed on load.
"""

from __future__ import annotations

import json

import numpy as np

from .base import DecisionStump, Perceptron
from .baselines import AdaBoostModel
from .core import TrainedSystem
from .datagen import Dataset
from .meta_features import build_reference_cache
from .nb import GaussianNBModel
from .pool import Pool

FORMAT_VERSION = "1"


def _encode_member(c) -> dict:
    if isinstance(c, Perceptron):
        return {"kind": "perceptron", "w": [float(v) for v in c.w],
                "b": float(c.b)}
    if isinstance(c, DecisionStump):
        return {"kind": "stump", "feature": int(c.feature),
                "threshold": float(c.threshold), "polarity": int(c.polarity),
                "side_posteriors": [[float(p) for p in pair]
                                    for pair in c.side_posteriors]}
    raise ValueError(f"cannot serialize classifier of type {type(c).__name__}")


def _decode_member(d: dict):
    if d["kind"] == "perceptron":
        return Perceptron(w=(d["w"][0], d["w"][1]), b=d["b"])
    if d["kind"] == "stump":
        sp = d["side_posteriors"]
        return DecisionStump(feature=d["feature"], threshold=d["threshold"],
                             polarity=d["polarity"],
                             side_posteriors=((sp[0][0], sp[0][1]),
                                              (sp[1][0], sp[1][1])))
    raise ValueError(f"unknown classifier kind {d['kind']!r}")


def system_to_dict(sys: TrainedSystem) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "hyperparameters": {"k": sys.k, "kp": sys.kp, "h_c": float(sys.h_c),
                            "upsilon": float(sys.upsilon)},
        "pool": [_encode_member(c) for c in sys.pool.classifiers],
        "nb": {"priors": [float(v) for v in sys.model.priors],
               "means": [[float(v) for v in row] for row in sys.model.means],
               "variances": [[float(v) for v in row]
                             for row in sys.model.variances]},
        "dsel": {"x": [[float(a), float(b)] for a, b in sys.dsel.x],
                 "y": [int(v) for v in sys.dsel.y],
                 "split": sys.dsel.split},
        "f5_norms": [float(v) for v in sys.norms],
        "adaboost": None,
    }
    if sys.adaboost is not None:
        doc["adaboost"] = {
            "stages": [_encode_member(c) for c in sys.adaboost.stages],
            "alphas": [float(a) for a in sys.adaboost.alphas],
        }
    return doc


def system_from_dict(doc: dict) -> TrainedSystem:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}; "
                         f"this build reads version {FORMAT_VERSION!r}")
    try:
        pool = Pool(tuple(_decode_member(d) for d in doc["pool"]))
        hp = doc["hyperparameters"]
        model = GaussianNBModel(np.array(doc["nb"]["priors"]),
                                np.array(doc["nb"]["means"]),
                                np.array(doc["nb"]["variances"]))
        dsel = Dataset(np.array(doc["dsel"]["x"], dtype=np.float64),
                       np.array(doc["dsel"]["y"], dtype=np.int64),
                       doc["dsel"]["split"])
        norms = np.asarray(doc["f5_norms"], dtype=np.float64)
        booster = None
        if doc["adaboost"] is not None:
            booster = AdaBoostModel(
                tuple(_decode_member(d) for d in doc["adaboost"]["stages"]),
                tuple(doc["adaboost"]["alphas"]))
        return TrainedSystem(pool, model, dsel, build_reference_cache(pool, dsel),
                             norms, int(hp["k"]), int(hp["kp"]),
                             float(hp["h_c"]), float(hp["upsilon"]), booster)
    except (KeyError, IndexError, TypeError) as exc:
        raise ValueError(f"model file violates the version-1 schema: {exc}") from exc


def save_system(sys: TrainedSystem, path) -> None:
    text = json.dumps(system_to_dict(sys), sort_keys=True,
                      separators=(",", ":"))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text + "\n")


def load_system(path) -> TrainedSystem:
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"model file is not valid JSON "
                         f"(truncated or corrupt): {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("model file violates the version-1 schema: "
                         "top level must be an object")
    return system_from_dict(doc)
