"""System, training and experiment configuration.

All physical quantities are stored in linear scale; dB values are converted
once at construction/load time (x_linear = 10**(x_dB/10)). Channel variances
are the 1/lambda of each link, i.e. E[|h|^2].
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigError

DEFAULT_GAMMA_T_DB = 8.0
DEFAULT_SWEEP_DB = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]
DEFAULT_M_TRAIN = 20_000
DEFAULT_M_TEST = 200_000
MODEL_VARIANTS = ("knn", "gnb", "svm", "mlp", "lstm")


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """Physical and channel parameters of one operating point (linear scale)."""

    k_transmitters: int
    inv_lambda_sd: tuple[float, ...]  # E[|h_SkD|^2] per transmitter
    inv_lambda_se: tuple[float, ...]  # E[|h_SkE|^2] per transmitter
    inv_lambda_sr: tuple[float, ...]  # E[|h_SkR|^2] per transmitter
    inv_lambda_tr: float
    inv_lambda_td: float
    inv_lambda_te: float
    p_t: float                        # primary transmit power; Gamma_T = p_t/n0
    delta: tuple[float, ...]          # backhaul reliabilities, one per transmitter
    n0: float = 1.0
    phi: float = 0.1
    r_primary: float = 0.5            # threshold rate of the primary outage (bits/s/Hz)
    r_secrecy: float = 0.5            # secrecy threshold rate R_th (bits/s/Hz)

    def __post_init__(self):
        k = self.k_transmitters
        if not isinstance(k, int) or k < 1:
            raise ConfigError(f"k_transmitters must be a positive integer, got {k!r}")
        for name in ("inv_lambda_sd", "inv_lambda_se", "inv_lambda_sr", "delta"):
            vec = getattr(self, name)
            if len(vec) != k:
                raise ConfigError(f"{name} must have length K={k}, got {len(vec)}")
        for name in ("inv_lambda_sd", "inv_lambda_se", "inv_lambda_sr"):
            if any(not (v > 0.0) for v in getattr(self, name)):
                raise ConfigError(f"{name} entries must be strictly positive")
        for name in ("inv_lambda_tr", "inv_lambda_td", "inv_lambda_te"):
            if not (getattr(self, name) > 0.0):
                raise ConfigError(f"{name} must be strictly positive")
        if not (0.0 < self.phi < 1.0):
            raise ConfigError(f"phi must lie in (0,1), got {self.phi}")
        if not (self.p_t > 0.0):
            raise ConfigError(f"p_t must be positive, got {self.p_t}")
        if self.n0 < 0.0:
            raise ConfigError(f"n0 must be nonnegative, got {self.n0}")
        if any(not (0.0 <= d <= 1.0) for d in self.delta):
            raise ConfigError("delta entries must lie in [0,1]")
        # r_primary = 0 would make the SINR threshold 0 and the allowed
        # secondary power unbounded.
        if not (self.r_primary > 0.0):
            raise ConfigError(f"r_primary must be positive, got {self.r_primary}")
        if self.r_secrecy < 0.0:
            raise ConfigError(f"r_secrecy must be nonnegative, got {self.r_secrecy}")

    @property
    def gamma0(self) -> float:
        """Primary SINR outage threshold 2**r_primary - 1."""
        return 2.0 ** self.r_primary - 1.0

    @property
    def gamma_t_db(self) -> float:
        return linear_to_db(self.p_t / self.n0) if self.n0 > 0 else math.inf

    def with_gamma_t_db(self, gamma_t_db: float) -> "SystemConfig":
        """Same system at a different Gamma_T = P_T/N_0 operating point."""
        return replace(self, p_t=db_to_linear(gamma_t_db) * (self.n0 if self.n0 > 0 else 1.0))


def _broadcast(value, k: int, name: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * k
    vec = tuple(float(v) for v in value)
    if len(vec) != k:
        raise ConfigError(f"{name} must be a scalar or a length-{k} list, got {len(vec)} values")
    return vec


def iid_config(k: int, gamma_t_db: float = DEFAULT_GAMMA_T_DB, delta: float | list = 0.8,
               phi: float = 0.1, r_primary: float = 0.5, r_secrecy: float = 0.5) -> SystemConfig:
    """IID parameter set: per-link variances (3,-6,3,-3,-3,6) dB, identical across k."""
    return SystemConfig(
        k_transmitters=k,
        inv_lambda_sd=(db_to_linear(3.0),) * k,
        inv_lambda_se=(db_to_linear(-3.0),) * k,
        inv_lambda_sr=(db_to_linear(-3.0),) * k,
        inv_lambda_tr=db_to_linear(3.0),
        inv_lambda_td=db_to_linear(-6.0),
        inv_lambda_te=db_to_linear(6.0),
        p_t=db_to_linear(gamma_t_db),
        delta=_broadcast(delta, k, "delta"),
        n0=1.0,
        phi=phi,
        r_primary=r_primary,
        r_secrecy=r_secrecy,
    )


def inid_config(k: int, gamma_t_db: float = DEFAULT_GAMMA_T_DB,
                phi: float = 0.1, r_primary: float = 0.5, r_secrecy: float = 0.5) -> SystemConfig:
    """INID parameter sets for K=4 and K=12.

    K=4: 1/lambda_sd = (0,3,6,9) dB, 1/lambda_se = (-6,-3,0,3) dB,
         delta = (0.90,0.92,0.94,0.96).
    K=12: 1/lambda_sd = -12..21 dB step 3, 1/lambda_se = -21..12 dB step 3,
          delta = 0.78..1.00 step 0.02.
    """
    if k == 4:
        sd_db = [0.0, 3.0, 6.0, 9.0]
        se_db = [-6.0, -3.0, 0.0, 3.0]
        delta = (0.90, 0.92, 0.94, 0.96)
    elif k == 12:
        sd_db = [-12.0 + 3.0 * i for i in range(12)]
        se_db = [-21.0 + 3.0 * i for i in range(12)]
        delta = tuple(round(0.78 + 0.02 * i, 2) for i in range(12))
    else:
        raise ConfigError(f"INID parameter set defined for K in (4, 12), got {k}")
    return SystemConfig(
        k_transmitters=k,
        inv_lambda_sd=tuple(db_to_linear(v) for v in sd_db),
        inv_lambda_se=tuple(db_to_linear(v) for v in se_db),
        inv_lambda_sr=(db_to_linear(-3.0),) * k,
        inv_lambda_tr=db_to_linear(3.0),
        inv_lambda_td=db_to_linear(-6.0),
        inv_lambda_te=db_to_linear(6.0),
        p_t=db_to_linear(gamma_t_db),
        delta=delta,
        n0=1.0,
        phi=phi,
        r_primary=r_primary,
        r_secrecy=r_secrecy,
    )


@dataclass(frozen=True)
class TrainConfig:
    """Shared hyperparameters for the five classifiers."""

    learning_rate: float = 1e-3
    minibatch: int = 128
    epochs: int = 20
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    # SVM
    svm_gamma: float | None = None    # RBF width; None -> 1/(4K) at training time
    svm_c: float = 1.0                # box constraint
    svm_subsample: int = 5000         # per-binary-problem training cap
    svm_tol: float = 1e-3             # KKT tolerance
    svm_max_passes: int = 10
    # k-NN
    knn_k: int = 5
    # LSTM
    lstm_hidden: int = 100
    # MLP
    mlp_hidden1: int = 256
    mlp_hidden2: int = 128

    def __post_init__(self):
        if self.learning_rate <= 0 or self.minibatch < 1 or self.epochs < 1:
            raise ConfigError("learning_rate must be positive; minibatch and epochs >= 1")
        if self.knn_k < 1 or self.lstm_hidden < 1 or self.svm_subsample < 1:
            raise ConfigError("knn_k, lstm_hidden and svm_subsample must be >= 1")
        if self.svm_c <= 0 or (self.svm_gamma is not None and self.svm_gamma <= 0):
            raise ConfigError("svm_c and svm_gamma must be positive")


@dataclass
class ExperimentConfig:
    """Everything one CLI command needs: system, training, sweep, sizes, seed."""

    system: SystemConfig
    train: TrainConfig
    sweep_gamma_t_db: list[float] = field(default_factory=lambda: list(DEFAULT_SWEEP_DB))
    m_train: int = DEFAULT_M_TRAIN
    m_test: int = DEFAULT_M_TEST
    models: list[str] = field(default_factory=lambda: list(MODEL_VARIANTS))
    master_seed: int = 0
    config_hash: str = ""             # sha256 of the config file bytes, if loaded from one

    def __post_init__(self):
        if not self.sweep_gamma_t_db:
            raise ConfigError("sweep.gamma_t_db must be nonempty")
        if self.m_train < 1 or self.m_test < 1:
            raise ConfigError("data.m_train and data.m_test must be >= 1")
        for m in self.models:
            if m not in MODEL_VARIANTS:
                raise ConfigError(f"unknown model variant {m!r} (known: {', '.join(MODEL_VARIANTS)})")


# ---------------------------------------------------------------------------
# Config file parsing: flat `key = value` lines with dotted namespaces.
# Values: int/float scalars, [a, b, c] lists, bare words. '#' starts a comment.
# ---------------------------------------------------------------------------

_KEY_RE = re.compile(r"^[a-z][a-z0-9_.]*$")

_SCALAR_CHANNEL_KEYS = {
    "channel.inv_lambda_tr_db": "inv_lambda_tr",
    "channel.inv_lambda_td_db": "inv_lambda_td",
    "channel.inv_lambda_te_db": "inv_lambda_te",
}
_VECTOR_CHANNEL_KEYS = {
    "channel.inv_lambda_sd_db": "inv_lambda_sd",
    "channel.inv_lambda_se_db": "inv_lambda_se",
    "channel.inv_lambda_sr_db": "inv_lambda_sr",
}
_TRAIN_KEYS = {
    "train.learning_rate": "learning_rate",
    "train.minibatch": "minibatch",
    "train.epochs": "epochs",
    "train.adam_beta1": "adam_beta1",
    "train.adam_beta2": "adam_beta2",
    "train.adam_eps": "adam_eps",
    "train.svm_gamma": "svm_gamma",
    "train.svm_c": "svm_c",
    "train.svm_subsample": "svm_subsample",
    "train.svm_tol": "svm_tol",
    "train.svm_max_passes": "svm_max_passes",
    "train.knn_k": "knn_k",
    "train.lstm_hidden": "lstm_hidden",
    "train.mlp_hidden1": "mlp_hidden1",
    "train.mlp_hidden2": "mlp_hidden2",
}
_KNOWN_KEYS = (
    {"preset", "channel.k", "channel.gamma_t_db", "channel.n0", "channel.phi",
     "channel.r_primary", "channel.r_secrecy", "backhaul.delta",
     "sweep.gamma_t_db", "data.m_train", "data.m_test", "models.list", "seed"}
    | set(_SCALAR_CHANNEL_KEYS) | set(_VECTOR_CHANNEL_KEYS) | set(_TRAIN_KEYS)
)


def _parse_value(text: str, key: str):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ConfigError(f"{key}: unterminated list {text!r}")
        inner = text[1:-1].strip()
        return [] if not inner else [_parse_value(v, key) for v in inner.split(",")]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config_text(text: str) -> dict:
    """Parse the flat key-value format into a {key: value} dict. Unknown keys raise."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {lineno}: malformed key {key!r}")
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _parse_value(value, key)
    return out


def _as_float_list(value, key: str) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, list) and all(isinstance(v, (int, float)) for v in value):
        return [float(v) for v in value]
    raise ConfigError(f"{key} must be a number or a list of numbers")


def experiment_config_from_dict(cfg: dict, config_hash: str = "") -> ExperimentConfig:
    """Build an ExperimentConfig from parsed keys; a preset fills channel defaults."""
    cfg = dict(cfg)
    preset = cfg.pop("preset", None)
    k = cfg.pop("channel.k", None)
    gamma_t_db = float(cfg.pop("channel.gamma_t_db", DEFAULT_GAMMA_T_DB))
    common = {
        "phi": float(cfg.pop("channel.phi", 0.1)),
        "r_primary": float(cfg.pop("channel.r_primary", 0.5)),
        "r_secrecy": float(cfg.pop("channel.r_secrecy", 0.5)),
    }
    delta = cfg.pop("backhaul.delta", None)

    if preset is not None:
        if k is None:
            raise ConfigError("preset requires channel.k")
        if preset == "iid":
            system = iid_config(int(k), gamma_t_db, delta=0.8 if delta is None else delta, **common)
        elif preset == "inid":
            system = inid_config(int(k), gamma_t_db, **common)
            if delta is not None:
                system = replace(system, delta=_broadcast(delta, int(k), "backhaul.delta"))
        else:
            raise ConfigError(f"unknown preset {preset!r} (known: iid, inid)")
        for key in list(_SCALAR_CHANNEL_KEYS) + list(_VECTOR_CHANNEL_KEYS) + ["channel.n0"]:
            if key in cfg:
                raise ConfigError(f"{key} conflicts with preset={preset}")
    else:
        if k is None:
            raise ConfigError("channel.k is required")
        k = int(k)
        missing = [key for key in list(_VECTOR_CHANNEL_KEYS) + list(_SCALAR_CHANNEL_KEYS)
                   if key not in cfg]
        if missing:
            raise ConfigError(f"missing channel keys (or use a preset): {', '.join(missing)}")
        n0 = float(cfg.pop("channel.n0", 1.0))
        vec = {
            field_name: tuple(db_to_linear(v) for v in
                              _broadcast_db(cfg.pop(key), k, key))
            for key, field_name in _VECTOR_CHANNEL_KEYS.items()
        }
        system = SystemConfig(
            k_transmitters=k,
            inv_lambda_tr=db_to_linear(float(cfg.pop("channel.inv_lambda_tr_db"))),
            inv_lambda_td=db_to_linear(float(cfg.pop("channel.inv_lambda_td_db"))),
            inv_lambda_te=db_to_linear(float(cfg.pop("channel.inv_lambda_te_db"))),
            p_t=db_to_linear(gamma_t_db) * (n0 if n0 > 0 else 1.0),
            delta=_broadcast(0.8 if delta is None else delta, k, "backhaul.delta"),
            n0=n0,
            **vec,
            **common,
        )

    train_kwargs = {}
    for key, field_name in _TRAIN_KEYS.items():
        if key in cfg:
            train_kwargs[field_name] = cfg.pop(key)
    seed = int(cfg.pop("seed", 0))
    train = TrainConfig(seed=seed, **train_kwargs)

    sweep = _as_float_list(cfg.pop("sweep.gamma_t_db", list(DEFAULT_SWEEP_DB)), "sweep.gamma_t_db")
    models = cfg.pop("models.list", list(MODEL_VARIANTS))
    if isinstance(models, str):
        models = [models]
    m_train = int(cfg.pop("data.m_train", DEFAULT_M_TRAIN))
    m_test = int(cfg.pop("data.m_test", DEFAULT_M_TEST))
    if cfg:
        raise ConfigError(f"unused keys: {', '.join(sorted(cfg))}")
    return ExperimentConfig(
        system=system, train=train, sweep_gamma_t_db=sweep,
        m_train=m_train, m_test=m_test, models=list(models),
        master_seed=seed, config_hash=config_hash,
    )


def _broadcast_db(value, k: int, key: str) -> list[float]:
    vals = _as_float_list(value, key)
    if len(vals) == 1:
        return vals * k
    if len(vals) != k:
        raise ConfigError(f"{key} must be a scalar or a length-{k} list, got {len(vals)} values")
    return vals


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()[:16]
    parsed = parse_config_text(raw.decode("utf-8"))
    return experiment_config_from_dict(parsed, config_hash=digest)


def config_echo(cfg: SystemConfig, seed: int, m: int) -> list[str]:
    """Flat field list used as the dataset header: K,<k>,seed,<s>,m,<m>,<full config echo>."""
    def fmt(x: float) -> str:
        return repr(float(x))

    def fmtvec(xs) -> str:
        return ";".join(fmt(x) for x in xs)

    return [
        "K", str(cfg.k_transmitters), "seed", str(seed), "m", str(m),
        "phi", fmt(cfg.phi), "r_primary", fmt(cfg.r_primary), "r_secrecy", fmt(cfg.r_secrecy),
        "p_t", fmt(cfg.p_t), "n0", fmt(cfg.n0),
        "inv_lambda_sd", fmtvec(cfg.inv_lambda_sd),
        "inv_lambda_se", fmtvec(cfg.inv_lambda_se),
        "inv_lambda_sr", fmtvec(cfg.inv_lambda_sr),
        "inv_lambda_tr", fmt(cfg.inv_lambda_tr),
        "inv_lambda_td", fmt(cfg.inv_lambda_td),
        "inv_lambda_te", fmt(cfg.inv_lambda_te),
        "delta", fmtvec(cfg.delta),
    ]


def config_from_echo(fields_list: list[str]) -> tuple[SystemConfig, int, int]:
    """Inverse of config_echo: returns (SystemConfig, seed, m)."""
    if len(fields_list) % 2 != 0:
        raise ConfigError("config echo must be key,value pairs")
    pairs = dict(zip(fields_list[::2], fields_list[1::2]))
    try:
        k = int(pairs["K"])
        seed = int(pairs["seed"])
        m = int(pairs["m"])
        cfg = SystemConfig(
            k_transmitters=k,
            inv_lambda_sd=tuple(float(v) for v in pairs["inv_lambda_sd"].split(";")),
            inv_lambda_se=tuple(float(v) for v in pairs["inv_lambda_se"].split(";")),
            inv_lambda_sr=tuple(float(v) for v in pairs["inv_lambda_sr"].split(";")),
            inv_lambda_tr=float(pairs["inv_lambda_tr"]),
            inv_lambda_td=float(pairs["inv_lambda_td"]),
            inv_lambda_te=float(pairs["inv_lambda_te"]),
            p_t=float(pairs["p_t"]),
            delta=tuple(float(v) for v in pairs["delta"].split(";")),
            n0=float(pairs["n0"]),
            phi=float(pairs["phi"]),
            r_primary=float(pairs["r_primary"]),
            r_secrecy=float(pairs["r_secrecy"]),
        )
    except KeyError as exc:
        raise ConfigError(f"config echo missing field {exc}") from exc
    return cfg, seed, m
