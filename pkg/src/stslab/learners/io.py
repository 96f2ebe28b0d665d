"""Model persistence: length-prefixed binary, magic STSM1, little-endian f64."""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import ParseError
from . import TrainedModel
from .knn import KnnModel
from .lstm import LstmModel
from .mlp import MlpModel
from .naive_bayes import GnbModel
from .svm import SvmModel

MODEL_MAGIC = b"STSM1"


def _arrays_and_meta(model: TrainedModel) -> tuple[dict[str, np.ndarray], dict]:
    meta = {"k": model.k, "n_classes": model.n_classes, "notes": model.notes}
    inner = model.inner
    if model.variant == "knn":
        meta["knn_k"] = inner.k_neighbors
        arrays = {"train_x": inner.train_x, "train_y": np.asarray(inner.train_y, dtype=float)}
    elif model.variant == "gnb":
        arrays = {
            "means": inner.means, "variances": inner.variances,
            "log_priors": inner.log_priors,
            "absent": np.asarray(inner.absent_classes, dtype=float),
        }
    elif model.variant == "svm":
        meta["gamma"] = inner.gamma
        arrays = {
            "support_x": inner.support_x, "coef": inner.coef, "bias": inner.bias,
            "reachable": inner.reachable.astype(float),
            "converged": inner.converged.astype(float),
        }
    elif model.variant == "mlp":
        arrays = dict(inner.weights)
    elif model.variant == "lstm":
        meta["hidden"] = inner.hidden
        arrays = dict(inner.weights)
    else:
        raise ValueError(f"unknown variant {model.variant!r}")
    return arrays, meta


def _rebuild(variant: str, meta: dict, arrays: dict[str, np.ndarray]) -> TrainedModel:
    n_classes = meta["n_classes"]
    if variant == "knn":
        inner = KnnModel(train_x=arrays["train_x"],
                         train_y=arrays["train_y"].astype(np.int64),
                         k_neighbors=meta["knn_k"], n_classes=n_classes)
    elif variant == "gnb":
        inner = GnbModel(means=arrays["means"], variances=arrays["variances"],
                         log_priors=arrays["log_priors"],
                         absent_classes=tuple(arrays["absent"].astype(int)),
                         n_classes=n_classes)
    elif variant == "svm":
        inner = SvmModel(support_x=arrays["support_x"], coef=arrays["coef"],
                         bias=arrays["bias"], gamma=meta["gamma"],
                         reachable=arrays["reachable"].astype(bool),
                         converged=arrays["converged"].astype(bool),
                         n_classes=n_classes)
    elif variant == "mlp":
        inner = MlpModel(weights=arrays, n_classes=n_classes)
    elif variant == "lstm":
        inner = LstmModel(weights=arrays, n_classes=n_classes, hidden=meta["hidden"])
    else:
        raise ParseError(f"unknown variant {variant!r} in model file")
    return TrainedModel(variant=variant, k=meta["k"], n_classes=n_classes,
                        inner=inner, notes=meta.get("notes", {}))


def save_model(model: TrainedModel, path) -> None:
    arrays, meta = _arrays_and_meta(model)
    variant = model.variant.encode("utf-8")
    meta_blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", len(variant)))
        fh.write(variant)
        fh.write(struct.pack("<I", len(meta_blob)))
        fh.write(meta_blob)
        fh.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays.items():
            data = np.ascontiguousarray(arr, dtype="<f8")
            name_b = name.encode("utf-8")
            fh.write(struct.pack("<I", len(name_b)))
            fh.write(name_b)
            fh.write(struct.pack("<B", data.ndim))
            fh.write(struct.pack(f"<{data.ndim}Q", *data.shape))
            fh.write(data.tobytes())


def load_model(path) -> TrainedModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:5] != MODEL_MAGIC:
        raise ParseError(f"bad magic {blob[:5]!r}, expected {MODEL_MAGIC!r}")
    off = 5
    try:
        def take(n: int) -> bytes:
            nonlocal off
            if len(blob) < off + n:
                raise ParseError("truncated model file")
            out = blob[off:off + n]
            off += n
            return out

        (vlen,) = struct.unpack("<I", take(4))
        variant = take(vlen).decode("utf-8")
        (mlen,) = struct.unpack("<I", take(4))
        meta = json.loads(take(mlen).decode("utf-8"))
        (count,) = struct.unpack("<I", take(4))
        arrays: dict[str, np.ndarray] = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<I", take(4))
            name = take(nlen).decode("utf-8")
            (ndim,) = struct.unpack("<B", take(1))
            shape = struct.unpack(f"<{ndim}Q", take(8 * ndim))
            size = int(np.prod(shape)) if ndim else 1
            arrays[name] = np.frombuffer(take(8 * size), dtype="<f8").reshape(shape).copy()
    except (struct.error, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed model file: {exc}") from exc
    return _rebuild(variant, meta, arrays)
