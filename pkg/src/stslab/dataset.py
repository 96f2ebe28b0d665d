"""Feature construction, labeling, dataset generation and persistence.

A sample's feature matrix is 4xK: column k holds (|h_SkD|, |h_SkE|, |h_TE|,
|h_TD|) when transmitter k's backhaul is active and zeros otherwise, then the
whole matrix is normalized to zero mean with unit range. Labels are the oracle
selection (1..K) or K+1 when no backhaul is active.

Files: a CSV format with a single config-echo header line and one row of
4K features + label per sample, and an equivalent binary format (magic STSL1,
little-endian, f64 features, i32 labels).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .backhaul import sample_backhaul_batch
from .channel import ChannelBatch, ChannelRealization, MC_CHUNK, batch_secrecy_rates, sample_channel_batch, solve_secondary_power, transmitter_secrecy_rates
from .config import SystemConfig, config_echo, config_from_echo
from .errors import ConfigError, ParseError, SchemaError
from .selection import select_optimal, select_optimal_batch

BINARY_MAGIC = b"STSL1"


@dataclass(frozen=True)
class DatasetMeta:
    """Enough to regenerate the dataset bit-exactly."""

    cfg: SystemConfig
    seed: int
    m: int


@dataclass
class Dataset:
    features: np.ndarray  # (m, 4, K) normalized, float64
    labels: np.ndarray    # (m,) int32 in 1..K+1
    meta: DatasetMeta

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def k(self) -> int:
        return self.features.shape[2]

    @property
    def n_classes(self) -> int:
        return self.k + 1

    def flat_features(self) -> np.ndarray:
        """(m, 4K) view in flattening order: column 1 rows 1-4, column 2, ..."""
        m, r, k = self.features.shape
        return self.features.transpose(0, 2, 1).reshape(m, r * k)

    def sequence_features(self) -> np.ndarray:
        """(m, K, 4): one timestep per transmitter column, for the recurrent model."""
        return self.features.transpose(0, 2, 1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Dataset)
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels)
                and self.meta == other.meta)


def build_feature_matrix(real: ChannelRealization, backhaul) -> np.ndarray:
    """Raw 4xK matrix of CSI magnitudes with inactive columns zeroed."""
    indicators = np.asarray(backhaul, dtype=np.uint8)
    k = real.k
    raw = np.empty((4, k), dtype=float)
    raw[0] = np.abs(real.h_sd)
    raw[1] = np.abs(real.h_se)
    raw[2] = abs(real.h_te)
    raw[3] = abs(real.h_td)
    raw[:, indicators == 0] = 0.0
    return raw


def build_feature_batch(batch: ChannelBatch, indicators: np.ndarray) -> np.ndarray:
    """(n, 4, K) raw magnitude matrices for a channel batch."""
    n, k = batch.h_sd.shape
    raw = np.empty((n, 4, k), dtype=float)
    raw[:, 0, :] = np.abs(batch.h_sd)
    raw[:, 1, :] = np.abs(batch.h_se)
    raw[:, 2, :] = np.abs(batch.h_te)[:, None]
    raw[:, 3, :] = np.abs(batch.h_td)[:, None]
    raw *= indicators[:, None, :]
    return raw


def normalize(raw: np.ndarray) -> np.ndarray:
    """Zero-mean, unit-range normalization over all 4K entries.

    t_i = (d_i - mean(d)) / (max(d) - min(d)); a constant matrix (max == min)
    carries no information and maps to all zeros.
    """
    raw = np.asarray(raw, dtype=float)
    span = raw.max() - raw.min()
    if span == 0.0:
        return np.zeros_like(raw)
    return (raw - raw.mean()) / span


def normalize_batch(raw: np.ndarray) -> np.ndarray:
    """Per-sample normalization of (n, 4, K) raw matrices."""
    flat = raw.reshape(raw.shape[0], -1)
    span = flat.max(axis=1) - flat.min(axis=1)
    mean = flat.mean(axis=1)
    safe = np.where(span == 0.0, 1.0, span)
    out = (raw - mean[:, None, None]) / safe[:, None, None]
    out[span == 0.0] = 0.0
    return out


def label_sample(real: ChannelRealization, backhaul, cfg: SystemConfig,
                 p_s: float | None = None) -> int:
    """Oracle label from unmasked channels: best active transmitter, else K+1.

    P_S defaults to the configuration's power solve (fixed per configuration,
    not per realization).
    """
    if p_s is None:
        p_s = solve_secondary_power(cfg).require_feasible()
    rates = transmitter_secrecy_rates(cfg, p_s, real)
    outcome = select_optimal(rates, backhaul)
    return cfg.k_transmitters + 1 if outcome.selected is None else outcome.selected


def generate_dataset(cfg: SystemConfig, m: int, seed: int) -> Dataset:
    """m iid labeled samples; deterministic given (cfg, seed)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    p_s = solve_secondary_power(cfg).require_feasible()
    rng = np.random.default_rng(seed)
    k = cfg.k_transmitters
    features = np.empty((m, 4, k), dtype=float)
    labels = np.empty(m, dtype=np.int32)
    done = 0
    while done < m:
        n = min(MC_CHUNK, m - done)
        batch = sample_channel_batch(cfg, n, rng)
        indicators = sample_backhaul_batch(cfg.delta, n, rng)
        rates = batch_secrecy_rates(cfg, p_s, batch)
        labels[done:done + n], _ = select_optimal_batch(rates, indicators)
        features[done:done + n] = normalize_batch(build_feature_batch(batch, indicators))
        done += n
    return Dataset(features=features, labels=labels, meta=DatasetMeta(cfg=cfg, seed=seed, m=m))


def regenerate_raw(cfg: SystemConfig, m: int, seed: int):
    """Raw (channel batch, indicator) stream exactly as generate_dataset drew it.

    Yields (start_index, ChannelBatch, indicators) chunks; used by tests to
    recompute labels from first principles.
    """
    rng = np.random.default_rng(seed)
    done = 0
    while done < m:
        n = min(MC_CHUNK, m - done)
        batch = sample_channel_batch(cfg, n, rng)
        indicators = sample_backhaul_batch(cfg.delta, n, rng)
        yield done, batch, indicators
        done += n


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def save_dataset(ds: Dataset, path) -> None:
    """Write the CSV (or STSL1 binary, by .stsl extension) dataset file."""
    if str(path).endswith(".stsl"):
        _save_binary(ds, path)
        return
    header = config_echo(ds.meta.cfg, ds.meta.seed, ds.meta.m)
    flat = ds.flat_features()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(ds.m):
            fh.write(",".join(_fmt(v) for v in flat[i]))
            fh.write(f",{int(ds.labels[i])}\n")


def load_dataset(path) -> Dataset:
    if str(path).endswith(".stsl"):
        return _load_binary(path)
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError("empty dataset file", line=1)
        try:
            cfg, seed, m = config_from_echo(header_line.rstrip("\n").split(","))
        except ConfigError as exc:
            raise ParseError(f"bad header: {exc}", line=1) from exc
        k = cfg.k_transmitters
        width = 4 * k + 1
        features = np.empty((m, 4, k), dtype=float)
        labels = np.empty(m, dtype=np.int32)
        row = 0
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != width:
                raise SchemaError(
                    f"expected 4K+1 = {width} fields for K={k}, got {len(parts)}",
                    line=lineno)
            if row >= m:
                raise SchemaError(f"more rows than the declared m={m}", line=lineno)
            try:
                values = [float(v) for v in parts[:-1]]
                label = int(parts[-1])
            except ValueError as exc:
                raise ParseError(f"non-numeric field: {exc}", line=lineno) from exc
            if not 1 <= label <= k + 1:
                raise SchemaError(f"label {label} outside 1..{k + 1}", line=lineno)
            features[row] = np.asarray(values).reshape(k, 4).T
            labels[row] = label
            row += 1
        if row != m:
            raise ParseError(f"truncated dataset: header declares m={m}, found {row} rows")
    return Dataset(features=features, labels=labels, meta=DatasetMeta(cfg=cfg, seed=seed, m=m))


def _save_binary(ds: Dataset, path) -> None:
    header = ",".join(config_echo(ds.meta.cfg, ds.meta.seed, ds.meta.m)).encode("utf-8")
    flat = np.ascontiguousarray(ds.flat_features(), dtype="<f8")
    labels = np.ascontiguousarray(ds.labels, dtype="<i4")
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(struct.pack("<Q", ds.m))
        fh.write(flat.tobytes())
        fh.write(labels.tobytes())


def _load_binary(path) -> Dataset:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:5] != BINARY_MAGIC:
        raise ParseError(f"bad magic {blob[:5]!r}, expected {BINARY_MAGIC!r}")
    off = 5
    try:
        (hlen,) = struct.unpack_from("<I", blob, off)
        off += 4
        if len(blob) < off + hlen:
            raise ParseError("truncated header")
        header = blob[off:off + hlen].decode("utf-8")
        off += hlen
        (m,) = struct.unpack_from("<Q", blob, off)
        off += 8
    except struct.error as exc:
        raise ParseError(f"truncated file: {exc}") from exc
    try:
        cfg, seed, m_echo = config_from_echo(header.split(","))
    except ConfigError as exc:
        raise ParseError(f"bad header: {exc}") from exc
    if m_echo != m:
        raise SchemaError(f"header m={m_echo} disagrees with record count {m}")
    k = cfg.k_transmitters
    need = m * 4 * k * 8 + m * 4
    if len(blob) - off != need:
        raise SchemaError(f"payload is {len(blob) - off} bytes, expected {need}")
    flat = np.frombuffer(blob, dtype="<f8", count=m * 4 * k, offset=off)
    off += m * 4 * k * 8
    labels = np.frombuffer(blob, dtype="<i4", count=m, offset=off).astype(np.int32)
    features = flat.reshape(m, k, 4).transpose(0, 2, 1).copy()
    return Dataset(features=features, labels=labels.copy(),
                   meta=DatasetMeta(cfg=cfg, seed=seed, m=m))
