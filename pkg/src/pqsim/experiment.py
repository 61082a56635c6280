"""Experiment configuration: sources per port, the network transfer matrix,
detectors per mode, and optional mode-mismatch bookkeeping.

Configurations are declared as JSON.  Non-SPDC sources fill free ports in
declaration order (or pin one with ``"port"``); SPDC entries always name
their ``herald`` and ``signal`` ports.  The network is either an inline or
on-disk matrix, the identity, or a uniform-loss model that realizes
``sqrt(eta_l) * U`` with a seeded Haar-random unitary.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detectors import DetectorModel
from .errors import ConfigError, ContractionError, DimensionError
from .linalg import haar_unitary, validate_transfer
from .matrixio import load_matrix, matrix_from_dict, matrix_to_dict
from .processes import LossModel, uniform_loss_eta
from .rng import RngStream
from .states import (
    Coherent,
    MixedSinglePhoton,
    SourceModel,
    SpdcPair,
    Thermal,
    Vacuum,
    n_ports,
)

SCHEME_SINGLE_PHOTON = "single-photon"
SCHEME_SPDC = "spdc"


@dataclass(frozen=True)
class PortSource:
    """A source together with the input port(s) it occupies."""

    source: SourceModel
    ports: tuple[int, ...]

    def __post_init__(self):
        ports = tuple(int(p) for p in self.ports)
        if len(ports) != n_ports(self.source):
            raise ConfigError(
                f"sources: {type(self.source).__name__} occupies "
                f"{n_ports(self.source)} port(s), got {ports}"
            )
        if len(set(ports)) != len(ports):
            raise ConfigError(f"sources: duplicate port in {ports}")
        object.__setattr__(self, "ports", ports)


@dataclass(frozen=True)
class Mismatch:
    """Fractions of the input-coupling and in-network photon losses that
    still reach the detectors as random counts."""

    f_b: float = 0.0
    f_l: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.f_b <= 1.0:
            raise ConfigError(f"mismatch.f_b: must be in [0, 1], got {self.f_b}")
        if not 0.0 <= self.f_l <= 1.0:
            raise ConfigError(f"mismatch.f_l: must be in [0, 1], got {self.f_l}")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Validated experiment description; the unit every engine consumes."""

    modes: int
    sources: tuple[PortSource, ...]
    transfer: np.ndarray
    detectors: tuple[DetectorModel, ...]
    mismatch: Mismatch | None = None
    scheme: str | None = None
    lon_spec: dict | None = None

    def __post_init__(self):
        if self.modes < 1:
            raise ConfigError(f"modes: must be >= 1, got {self.modes}")
        covered = [p for entry in self.sources for p in entry.ports]
        if sorted(covered) != list(range(self.modes)):
            raise ConfigError(
                "sources: ports must cover each of "
                f"0..{self.modes - 1} exactly once, got {sorted(covered)}"
            )
        try:
            transfer = validate_transfer(self.transfer)
        except (ContractionError, DimensionError) as exc:
            raise ConfigError(f"lon: {exc}") from exc
        if transfer.shape[0] != self.modes:
            raise ConfigError(
                f"lon: matrix is {transfer.shape[0]} x {transfer.shape[1]} "
                f"but the experiment has {self.modes} modes"
            )
        if len(self.detectors) != self.modes:
            raise ConfigError(
                f"detectors: need one per mode ({self.modes}), got {len(self.detectors)}"
            )
        scheme = self.scheme
        if scheme is None:
            has_spdc = any(isinstance(e.source, SpdcPair) for e in self.sources)
            scheme = SCHEME_SPDC if has_spdc else SCHEME_SINGLE_PHOTON
        if scheme not in (SCHEME_SINGLE_PHOTON, SCHEME_SPDC):
            raise ConfigError(f"scheme: unknown scheme {scheme!r}")
        object.__setattr__(self, "transfer", transfer)
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        object.__setattr__(self, "scheme", scheme)

    # ndarray fields break the generated __eq__; compare content instead.
    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return (
            self.modes == other.modes
            and self.sources == other.sources
            and np.array_equal(self.transfer, other.transfer)
            and self.detectors == other.detectors
            and self.mismatch == other.mismatch
            and self.scheme == other.scheme
        )

    def source_on_port(self, port: int) -> SourceModel:
        for entry in self.sources:
            if port in entry.ports:
                return entry.source
        raise ConfigError(f"no source assigned to port {port}")

    def identical_detectors(self) -> DetectorModel | None:
        """The common detector model, or None when modes differ."""
        first = self.detectors[0]
        return first if all(d == first for d in self.detectors) else None

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> dict:
        sources = []
        for entry in self.sources:
            sources.append(_source_to_dict(entry))
        lon = self.lon_spec if self.lon_spec is not None else (
            {"kind": "matrix"} | matrix_to_dict(self.transfer)
        )
        out = {
            "modes": self.modes,
            "scheme": self.scheme,
            "sources": sources,
            "lon": lon,
            "detectors": [{"eta_d": d.eta_d, "p_d": d.p_d} for d in self.detectors],
        }
        if self.mismatch is not None:
            out["mismatch"] = {"f_b": self.mismatch.f_b, "f_l": self.mismatch.f_l}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def config_hash(self) -> str:
        """SHA-256 of the canonicalized JSON form; stable across platforms."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "ExperimentConfig":
        return _config_from_dict(data, base_dir)


def _source_to_dict(entry: PortSource) -> dict:
    src = entry.source
    if isinstance(src, Vacuum):
        return {"kind": "vacuum", "port": entry.ports[0]}
    if isinstance(src, MixedSinglePhoton):
        return {"kind": "single_photon", "mu": src.mu, "eta_b": src.eta_b,
                "port": entry.ports[0]}
    if isinstance(src, Coherent):
        amp = complex(src.amplitude)
        return {"kind": "coherent", "amplitude": [amp.real, amp.imag],
                "port": entry.ports[0]}
    if isinstance(src, Thermal):
        return {"kind": "thermal", "mean_photons": src.mean_photons,
                "port": entry.ports[0]}
    if isinstance(src, SpdcPair):
        return {"kind": "spdc", "r": src.r, "eta_bl": src.eta_bl,
                "herald": entry.ports[0], "signal": entry.ports[1]}
    raise ConfigError(f"sources: cannot serialize {src!r}")


def _require_number(data: dict, field: str, context: str, default=None):
    if field not in data:
        if default is not None:
            return default
        raise ConfigError(f"{context}.{field}: required field is missing")
    value = data[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{context}.{field}: expected a number, got {value!r}")
    return value


def _parse_source(raw, index: int) -> tuple[SourceModel, dict]:
    context = f"sources[{index}]"
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict):
        raise ConfigError(f"{context}: expected an object or source name, got {raw!r}")
    kind = raw.get("kind")
    try:
        if kind == "vacuum":
            return Vacuum(), raw
        if kind == "single_photon":
            return MixedSinglePhoton(
                mu=_require_number(raw, "mu", context),
                eta_b=_require_number(raw, "eta_b", context, default=1.0),
            ), raw
        if kind == "coherent":
            amp = raw.get("amplitude")
            if not (isinstance(amp, (list, tuple)) and len(amp) == 2):
                raise ConfigError(f"{context}.amplitude: expected [re, im]")
            return Coherent(amplitude=complex(float(amp[0]), float(amp[1]))), raw
        if kind == "thermal":
            return Thermal(mean_photons=_require_number(raw, "mean_photons", context)), raw
        if kind == "spdc":
            return SpdcPair(
                r=_require_number(raw, "r", context),
                eta_bl=_require_number(raw, "eta_bl", context, default=1.0),
            ), raw
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc
    raise ConfigError(f"{context}.kind: unknown source kind {kind!r}")


def _assign_ports(parsed, modes: int) -> list[PortSource]:
    claimed: dict[int, int] = {}

    def claim(port, index, context):
        if not isinstance(port, int) or not 0 <= port < modes:
            raise ConfigError(f"{context}: port {port!r} outside 0..{modes - 1}")
        if port in claimed:
            raise ConfigError(
                f"{context}: port {port} already taken by sources[{claimed[port]}]"
            )
        claimed[port] = index

    entries: list[tuple[int, SourceModel, tuple[int, ...] | None]] = []
    for index, (source, raw) in enumerate(parsed):
        if isinstance(source, SpdcPair):
            if "herald" not in raw or "signal" not in raw:
                raise ConfigError(
                    f"sources[{index}]: spdc entries must name herald and signal ports"
                )
            herald, signal = raw["herald"], raw["signal"]
            claim(herald, index, f"sources[{index}].herald")
            claim(signal, index, f"sources[{index}].signal")
            entries.append((index, source, (herald, signal)))
        elif "port" in raw:
            claim(raw["port"], index, f"sources[{index}].port")
            entries.append((index, source, (raw["port"],)))
        else:
            entries.append((index, source, None))

    free = [p for p in range(modes) if p not in claimed]
    out = []
    for index, source, ports in entries:
        if ports is None:
            if not free:
                raise ConfigError(
                    f"sources[{index}]: more sources than free ports (modes={modes})"
                )
            ports = (free.pop(0),)
        out.append(PortSource(source, ports))
    if free:
        raise ConfigError(
            f"sources: ports {free} have no source; the port-source map must "
            "cover every mode (invariant: port counts consistent)"
        )
    return out


def _parse_lon(raw, modes: int, base_dir) -> tuple[np.ndarray, dict]:
    if raw in ("identity", None):
        raw = {"kind": "identity"}
    if not isinstance(raw, dict):
        raise ConfigError(f"lon: expected an object or 'identity', got {raw!r}")
    kind = raw.get("kind")
    if kind == "identity":
        return np.eye(modes, dtype=complex), {"kind": "identity"}
    if kind == "matrix":
        if "file" in raw:
            path = Path(raw["file"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            try:
                matrix = load_matrix(path)
            except (OSError, DimensionError) as exc:
                raise ConfigError(f"lon.file: {exc}") from exc
            return matrix, dict(raw)
        try:
            return matrix_from_dict(raw), dict(raw)
        except DimensionError as exc:
            raise ConfigError(f"lon: {exc}") from exc
    if kind == "uniform-loss":
        m = int(_require_number(raw, "M", "lon"))
        model = LossModel(
            eta0=_require_number(raw, "eta0", "lon"),
            ell=int(_require_number(raw, "ell", "lon")),
            modes=m,
        )
        seed = int(_require_number(raw, "unitary_seed", "lon", default=0))
        eta_l = uniform_loss_eta(model)
        unitary = haar_unitary(m, RngStream(seed))
        return np.sqrt(eta_l) * unitary, dict(raw)
    raise ConfigError(f"lon.kind: unknown network kind {kind!r}")


def _parse_detectors(raw, modes: int) -> tuple[DetectorModel, ...]:
    def one(d, context):
        if not isinstance(d, dict):
            raise ConfigError(f"{context}: expected an object, got {d!r}")
        try:
            return DetectorModel(
                eta_d=_require_number(d, "eta_d", context),
                p_d=_require_number(d, "p_d", context, default=0.0),
            )
        except ValueError as exc:
            raise ConfigError(f"{context}: {exc}") from exc

    if isinstance(raw, dict):
        return (one(raw, "detectors"),) * modes
    if isinstance(raw, list):
        if len(raw) != modes:
            raise ConfigError(
                f"detectors: need one per mode ({modes}), got {len(raw)}"
            )
        return tuple(one(d, f"detectors[{k}]") for k, d in enumerate(raw))
    raise ConfigError(f"detectors: expected an object or list, got {raw!r}")


def _config_from_dict(data: dict, base_dir=None) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config: expected a JSON object, got {type(data).__name__}")
    modes = data.get("modes")
    if not isinstance(modes, int) or modes < 1:
        raise ConfigError(f"modes: expected a positive integer, got {modes!r}")
    raw_sources = data.get("sources")
    if not isinstance(raw_sources, list) or not raw_sources:
        raise ConfigError("sources: expected a non-empty list")
    parsed = [_parse_source(raw, k) for k, raw in enumerate(raw_sources)]
    port_sources = _assign_ports(parsed, modes)
    if "lon" not in data:
        raise ConfigError("lon: required field is missing")
    transfer, lon_spec = _parse_lon(data["lon"], modes, base_dir)
    if "detectors" not in data:
        raise ConfigError("detectors: required field is missing")
    detectors = _parse_detectors(data["detectors"], modes)
    mismatch = None
    if "mismatch" in data and data["mismatch"] is not None:
        raw_mm = data["mismatch"]
        if not isinstance(raw_mm, dict):
            raise ConfigError(f"mismatch: expected an object, got {raw_mm!r}")
        mismatch = Mismatch(
            f_b=_require_number(raw_mm, "f_b", "mismatch", default=0.0),
            f_l=_require_number(raw_mm, "f_l", "mismatch", default=0.0),
        )
    scheme = data.get("scheme")
    if scheme is not None and scheme not in (SCHEME_SINGLE_PHOTON, SCHEME_SPDC):
        raise ConfigError(f"scheme: unknown scheme {scheme!r}")
    if scheme == SCHEME_SPDC and modes % 2 != 0:
        raise ConfigError(
            "scheme: the spdc scheme pairs every herald with a signal, "
            f"which needs an even mode count (got {modes}); port pairing failed"
        )
    return ExperimentConfig(
        modes=modes,
        sources=tuple(port_sources),
        transfer=transfer,
        detectors=detectors,
        mismatch=mismatch,
        scheme=scheme,
        lon_spec=lon_spec,
    )


def parse_config(path) -> ExperimentConfig:
    """Load and validate an experiment configuration from a JSON file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
    return _config_from_dict(data, base_dir=path.parent)
