"""
Experiment configuration files

Flat UTF-8 text: `key = value` lines, `#` comments, comma-separated lists,
`start:stop:step` ranges (stop included) and `file:<path>` references to
distribution text files, resolved relative to the config file. Per-relay
and per-window values use dotted keys (`gamma.2`, `q.3`, `gamma_window.1`).
Source-relay erasure probabilities go under a `[deltas]` header, one row per
source and one column per relay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from analysis.density_evolution import MultiRelayMode, WindowDrive
from codes.dist import (
    DegreeDistribution,
    DistKind,
    from_coefficients,
    from_weights,
    load_distribution,
    robust_soliton,
)
from codes.relay import (
    BufferSelection,
    ErasurePolicy,
    RelayConfig,
    RelayScheme,
    WindowSpec,
    eep_selection,
)
from codes.source import SourceConfig
from config.constants import (
    COMPARISON_TARGETS,
    DEFAULT_CONVENTIONAL_POLICY,
    DEFAULT_OVERHEADS,
    DEFAULT_RSD_C,
    DEFAULT_RSD_DELTA,
    DEFAULT_RSD_K,
    DEFAULT_SCHEDULING,
    DEFAULT_SCHEME,
    DEFAULT_TRIALS,
    EEP_RELAY_GAMMA,
)
from config.environment import get_default_seed
from utils.errors import ConfigInvalid, DltError
from utils.validation_utils import (
    validate_increasing,
    validate_probability,
    validate_probability_vector,
)


class Scheduling(str, Enum):
    ROUND_ROBIN = "round_robin"
    RANDOM_ONE = "random_one"
    ALL = "all"


class DeAxis(str, Enum):
    TRANSMISSION = "transmission"
    RECEPTION = "reception"


_SCALAR_KEYS = {
    "sources", "relays", "K", "depth", "scheme", "omega", "rsd_k", "rsd_c", "rsd_delta",
    "gamma", "q", "alpha", "block_lengths", "windows", "theta", "policy", "selection",
    "scheduling", "relay_deltas", "source_delta", "overheads", "trials", "seed", "payload",
    "targets", "de_mode", "de_axis", "window_drive", "clamp_degree",
}
_DOTTED_KEYS = {"gamma", "q", "gamma_window"}
_SECTIONS = {"deltas"}


@dataclass(frozen=True)
class ExperimentConfig:
    block_lengths: tuple
    depth: int
    omega: DegreeDistribution
    relays: tuple
    source_deltas: tuple
    relay_deltas: tuple
    scheme: RelayScheme = RelayScheme(DEFAULT_SCHEME)
    scheduling: Scheduling = Scheduling(DEFAULT_SCHEDULING)
    overheads: tuple = ()
    trials: int = DEFAULT_TRIALS
    seed: int = 1
    payload: bool = False
    windows: WindowSpec | None = None
    targets: tuple = COMPARISON_TARGETS
    de_mode: MultiRelayMode = MultiRelayMode.WEIGHTED
    de_axis: DeAxis = DeAxis.TRANSMISSION
    window_drive: WindowDrive = WindowDrive.SHARE
    clamp_degree: bool = True
    source_path: str | None = field(default=None, compare=False)

    def __post_init__(self):
        S, R = self.num_sources, self.num_relays
        if S < 1 or R < 1:
            raise ConfigInvalid("Need at least one source and one relay")
        if len(self.source_deltas) != S or any(len(row) != R for row in self.source_deltas):
            raise ConfigInvalid(f"[deltas] must have {S} rows of {R} values")
        if len(self.relay_deltas) != R:
            raise ConfigInvalid(f"relay_deltas needs {R} values, got {len(self.relay_deltas)}")
        try:
            for row in self.source_deltas:
                for delta in row:
                    validate_probability(delta, "source-relay delta")
            for delta in self.relay_deltas:
                validate_probability(delta, "relay-destination delta")
            validate_increasing(self.overheads, "overheads")
        except ValueError as error:
            raise ConfigInvalid(str(error)) from error
        if self.overheads[0] <= 0:
            raise ConfigInvalid("Overhead grid must be positive")
        if self.trials < 1:
            raise ConfigInvalid(f"trials must be >= 1, got {self.trials}")
        if self.scheme.partitioned_sources:
            for i, k in enumerate(self.block_lengths, start=1):
                if k % self.depth:
                    raise ConfigInvalid(f"Block length {k} of source {i} is not divisible by depth {self.depth}")

    @property
    def num_sources(self) -> int:
        return len(self.block_lengths)

    @property
    def num_relays(self) -> int:
        return len(self.relays)

    @property
    def K(self) -> int:
        return sum(self.block_lengths)

    @property
    def alpha(self) -> tuple:
        return tuple(k / self.K for k in self.block_lengths)

    @property
    def importance(self) -> dict | None:
        """{source_id: importance class} when windows are configured"""
        if self.windows is None:
            return None
        return {s + 1: c for s, c in enumerate(self.windows.membership)}

    def source_configs(self) -> list:
        """SourceConfig per source, with contiguous global offsets"""
        depth = self.depth if self.scheme.partitioned_sources else 1
        configs = []
        offset = 0
        for i, k in enumerate(self.block_lengths, start=1):
            configs.append(SourceConfig(i, k, depth, self.omega, offset, self.clamp_degree))
            offset += k
        return configs

    def describe(self) -> list:
        """(label, value) pairs for the configuration summary"""
        return [
            ("Sources", f"{self.num_sources} (K = {self.K})"),
            ("Relays", str(self.num_relays)),
            ("Scheme", f"{self.scheme.value}, D = {self.depth}"),
            ("Scheduling", self.scheduling.value),
            ("Windows", "none" if self.windows is None else f"{self.windows.num_windows} classes"),
            ("Overheads", f"{self.overheads[0]:g} .. {self.overheads[-1]:g} ({len(self.overheads)} points)"),
            ("Trials", str(self.trials)),
            ("Seed", str(self.seed)),
        ]


def parse_range(value: str) -> list:
    """`start:stop:step` with stop included, or a comma-separated list"""
    if ":" not in value:
        return _floats(value)
    parts = value.split(":")
    if len(parts) != 3:
        raise ConfigInvalid(f"Range must be start:stop:step, got {value!r}")
    start, stop, step = (_float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ConfigInvalid(f"Range {value!r} must have step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _float(text):
    try:
        return float(text.strip())
    except ValueError:
        raise ConfigInvalid(f"Expected a number, got {text!r}")


def _int(text):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigInvalid(f"Expected an integer, got {text!r}")


def _floats(text):
    return [_float(t) for t in text.split(",") if t.strip()]


def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigInvalid(f"Expected a boolean, got {text!r}")


def _enum(enum_type, text, key):
    try:
        return enum_type(text.strip())
    except ValueError:
        valid = ", ".join(member.value for member in enum_type)
        raise ConfigInvalid(f"Invalid {key} {text.strip()!r}. Valid values are: {valid}")


def _distribution(text, kind, base_dir, normalize=False):
    text = text.strip()
    if text.startswith("file:"):
        return load_distribution(base_dir / text[len("file:"):].strip(), kind=kind)
    values = _floats(text)
    if normalize:
        return from_weights(values, kind=kind)
    return from_coefficients(values, kind=kind, allow_trailing_zero=kind is DistKind.SELECTION)


def tokenize(text: str):
    """
    Split config text into key/value pairs and section rows

    Returns:
        (values: {key: raw string}, sections: {name: [row strings]})
    """
    values = {}
    sections = {name: [] for name in _SECTIONS}
    section = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigInvalid(f"Line {number}: unknown section [{section}]")
            continue
        if "=" not in line:
            if section is None:
                raise ConfigInvalid(f"Line {number}: expected key = value, got {raw_line!r}")
            sections[section].append(line)
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        base, _, suffix = key.partition(".")
        if suffix:
            if base not in _DOTTED_KEYS or not suffix.isdigit():
                raise ConfigInvalid(f"Line {number}: unknown key {key!r}")
        elif key not in _SCALAR_KEYS:
            raise ConfigInvalid(f"Line {number}: unknown key {key!r}")
        if key in values:
            raise ConfigInvalid(f"Line {number}: duplicate key {key!r}")
        values[key] = value
    return values, sections


def parse_config(text: str, base_dir=".", source_path=None) -> ExperimentConfig:
    """
    Build an ExperimentConfig from config text

    Raises:
        ConfigInvalid: For unknown keys, malformed values or inconsistent settings
    """
    base_dir = Path(base_dir)
    values, sections = tokenize(text)
    try:
        return _build(values, sections, base_dir, source_path)
    except ConfigInvalid:
        raise
    except FileNotFoundError:
        raise
    except (DltError, ValueError) as error:
        raise ConfigInvalid(str(error)) from error


def load_config(path) -> ExperimentConfig:
    """
    Read and parse a config file

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigInvalid: If the content is invalid
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), path.parent, str(path))


def _block_lengths(values):
    if "block_lengths" in values:
        lengths = [_int(t) for t in values["block_lengths"].split(",") if t.strip()]
        if any(k < 1 for k in lengths):
            raise ConfigInvalid("Block lengths must be positive")
        return lengths
    if "K" not in values:
        raise ConfigInvalid("Give block_lengths, or K (with alpha or sources)")
    K = _int(values["K"])
    if "alpha" in values:
        alpha = validate_probability_vector(_floats(values["alpha"]), "alpha")
    else:
        S = _int(values.get("sources", "1"))
        alpha = [1.0 / S] * S
    lengths = [int(round(a * K)) for a in alpha]
    if sum(lengths) != K:
        raise ConfigInvalid(f"alpha * K does not split K = {K} into whole blocks: {lengths}")
    return lengths


def _omega(values, base_dir):
    spec = values.get("omega", "rsd").strip()
    if spec == "rsd":
        return robust_soliton(
            _int(values.get("rsd_k", str(DEFAULT_RSD_K))),
            _float(values.get("rsd_c", str(DEFAULT_RSD_C))),
            _float(values.get("rsd_delta", str(DEFAULT_RSD_DELTA))),
        )
    return _distribution(spec, DistKind.CHECK, base_dir)


def _per_relay(values, key, R, default):
    raw = [values.get(f"{key}.{j}", values.get(key, default)) for j in range(1, R + 1)]
    extra = [k for k in values if k.startswith(f"{key}.") and not 1 <= int(k.split(".")[1]) <= R]
    if extra:
        raise ConfigInvalid(f"Keys {extra} refer to relays outside 1..{R}")
    return raw


def _build(values, sections, base_dir, source_path):
    block_lengths = _block_lengths(values)
    S = len(block_lengths)
    if "sources" in values and _int(values["sources"]) != S:
        raise ConfigInvalid(f"sources = {values['sources']} but {S} block lengths given")
    R = _int(values.get("relays", "1"))
    if R < 1:
        raise ConfigInvalid("relays must be >= 1")
    depth = _int(values.get("depth", "1"))
    scheme = _enum(RelayScheme, values.get("scheme", DEFAULT_SCHEME), "scheme")
    omega = _omega(values, base_dir)
    alpha = tuple(k / sum(block_lengths) for k in block_lengths)

    windows = None
    if "windows" in values:
        membership = tuple(_int(t) for t in values["windows"].split(","))
        classes = max(membership)
        if "theta" not in values:
            raise ConfigInvalid("windows needs theta")
        theta = _distribution(values["theta"], DistKind.WINDOW_ASSIGNMENT, base_dir, normalize=True)
        gammas = []
        for j in range(1, classes + 1):
            key = f"gamma_window.{j}"
            if key not in values:
                raise ConfigInvalid(f"windows needs {key}")
            gammas.append(_distribution(values[key], DistKind.RELAY, base_dir, normalize=True))
        windows = WindowSpec(membership, theta, tuple(gammas))

    default_gamma = ", ".join(str(g) for g in EEP_RELAY_GAMMA)
    gammas = [
        _distribution(raw, DistKind.RELAY, base_dir, normalize=True)
        for raw in _per_relay(values, "gamma", R, default_gamma)
    ]
    selections = []
    for raw in _per_relay(values, "q", R, None):
        selections.append(eep_selection(alpha) if raw is None else _distribution(raw, DistKind.SELECTION, base_dir))
    policy = _enum(ErasurePolicy, values.get("policy", DEFAULT_CONVENTIONAL_POLICY), "policy")
    selection = _enum(BufferSelection, values.get("selection", BufferSelection.NEWEST.value), "selection")
    relays = tuple(
        RelayConfig(j, gammas[j - 1], selections[j - 1], scheme, depth, windows, policy, selection)
        for j in range(1, R + 1)
    )

    relay_deltas = _floats(values.get("relay_deltas", "0"))
    if len(relay_deltas) == 1:
        relay_deltas = relay_deltas * R
    if sections["deltas"]:
        source_deltas = [tuple(_floats(row)) for row in sections["deltas"]]
    else:
        source_deltas = [tuple([_float(values.get("source_delta", "0"))] * R)] * S

    seed = _int(values["seed"]) if "seed" in values else get_default_seed()

    return ExperimentConfig(
        block_lengths=tuple(block_lengths),
        depth=depth,
        omega=omega,
        relays=relays,
        source_deltas=tuple(source_deltas),
        relay_deltas=tuple(relay_deltas),
        scheme=scheme,
        scheduling=_enum(Scheduling, values.get("scheduling", DEFAULT_SCHEDULING), "scheduling"),
        overheads=tuple(parse_range(values.get("overheads", DEFAULT_OVERHEADS))),
        trials=_int(values.get("trials", str(DEFAULT_TRIALS))),
        seed=seed,
        payload=_bool(values.get("payload", "false")),
        windows=windows,
        targets=tuple(_floats(values["targets"])) if "targets" in values else COMPARISON_TARGETS,
        de_mode=_enum(MultiRelayMode, values.get("de_mode", MultiRelayMode.WEIGHTED.value), "de_mode"),
        de_axis=_enum(DeAxis, values.get("de_axis", DeAxis.TRANSMISSION.value), "de_axis"),
        window_drive=_enum(WindowDrive, values.get("window_drive", WindowDrive.SHARE.value), "window_drive"),
        clamp_degree=_bool(values.get("clamp_degree", "true")),
        source_path=source_path,
    )
