"""YAML run configurations and potential-spec serialisation.

Complex numbers are written as ``[re, im]``; physical quantities carry their
unit in the key (``L_um``, ``lambda0_nm``, ``alpha_per_cm``).

Example::

    slab:
      medium: {n0: 3.4, L_um: 300, lambda0_nm: 1500, gamma_hat: 0.02, alpha_per_cm: 200}
      modes: [1358, 1359, 1360, 1361, 1362]
      nus: [0, 0.1, 0.2, 0.3, 0.5]
    output: {path: table.csv, format: csv}
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ValidationError
from .potential import Barrier, DeltaArray, GainProfile, GenericRegular, ProfileKind, validate
from .slab import SlabMedium


class ConfigError(ValidationError):
    """The configuration file is malformed."""


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ConfigError(f"expected a number or [re, im], got {v!r}")


def spec_to_dict(spec) -> dict:
    if isinstance(spec, DeltaArray):
        return {"delta_array": {"centers": list(spec.centers),
                                "couplings": [encode_complex(z) for z in spec.couplings]}}
    if isinstance(spec, Barrier):
        p = spec.profile
        if p.kind is ProfileKind.CUSTOM:
            raise ConfigError("custom profiles hold a callable and cannot be serialised")
        return {"barrier": {"z1": encode_complex(spec.z1), "z2": encode_complex(spec.z2),
                            "eps": spec.eps, "profile": {"kind": p.kind.value, "nu": p.nu}}}
    if isinstance(spec, GenericRegular):
        raise ConfigError("generic potentials hold a callable and cannot be serialised")
    raise ConfigError(f"not a potential spec: {spec!r}")


def spec_from_dict(d: dict):
    if not isinstance(d, dict) or len(d) != 1:
        raise ConfigError("a potential needs exactly one of: delta_array, barrier")
    (tag, body), = d.items()
    if not isinstance(body, dict):
        raise ConfigError(f"section {tag!r} must be a mapping")
    try:
        if tag == "delta_array":
            spec = DeltaArray(tuple(float(a) for a in body["centers"]),
                              tuple(decode_complex(z) for z in body["couplings"]))
        elif tag == "barrier":
            prof = body.get("profile", {})
            spec = Barrier(decode_complex(body["z1"]), decode_complex(body.get("z2", 0)),
                           float(body.get("eps", 0.0)),
                           GainProfile(ProfileKind(prof.get("kind", "single")), float(prof.get("nu", 0.0))))
        else:
            raise ConfigError(f"unknown potential type {tag!r}")
    except KeyError as e:
        raise ConfigError(f"missing key {e.args[0]!r} in {tag}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ConfigError(str(e)) from None
    return validate(spec)


MEDIUM_KEYS = ("n0", "L_um", "lambda0_nm", "gamma_hat", "alpha_per_cm")


def medium_to_dict(m: SlabMedium) -> dict:
    return {k: getattr(m, k) for k in MEDIUM_KEYS}


def medium_from_dict(d: dict) -> SlabMedium:
    unknown = set(d) - set(MEDIUM_KEYS)
    if unknown:
        raise ConfigError(f"unknown medium keys {sorted(unknown)} (units go in the key, e.g. L_um)")
    try:
        return SlabMedium(**{k: float(v) for k, v in d.items()})
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ConfigError(str(e)) from None


@dataclass
class RunConfig:
    command: str
    block: dict
    output_path: str | None = None
    output_format: str = "csv"
    tolerances: dict = field(default_factory=dict)
    threads: int | None = None


COMMANDS = ("deltas", "slab")


def load_config(path) -> RunConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from None
    return parse_config(raw)


def parse_config(raw) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    blocks = [c for c in COMMANDS if c in raw]
    if len(blocks) != 1:
        raise ConfigError(f"config needs exactly one command block out of {COMMANDS}")
    cmd = blocks[0]
    out = raw.get("output", {}) or {}
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")
    extra = set(raw) - {cmd, "output", "tolerance", "threads"}
    if extra:
        raise ConfigError(f"unknown top-level keys {sorted(extra)}")
    threads = raw.get("threads")
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        raise ConfigError("threads must be a positive integer")
    return RunConfig(cmd, raw[cmd] or {}, out.get("path"), fmt, dict(raw.get("tolerance", {}) or {}), threads)


def dump_config(cfg: RunConfig) -> str:
    d = {cfg.command: cfg.block, "output": {"format": cfg.output_format}}
    if cfg.output_path:
        d["output"]["path"] = cfg.output_path
    if cfg.tolerances:
        d["tolerance"] = cfg.tolerances
    if cfg.threads:
        d["threads"] = cfg.threads
    return yaml.safe_dump(d, sort_keys=False)
