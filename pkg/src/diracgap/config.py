"""Run configuration: JSON schema with strict key checking, CLI overrides,
and a content hash for resume bookkeeping."""

import hashlib
import json
from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class SweepConfig:
    count: int = 100
    seed0: int = 1
    modes: int = 4
    amplitude: float = 0.2


@dataclass(frozen=True)
class SolverConfig:
    n: int = 140
    eps: float = 5.0
    m_bnd: int = 140
    m_int_h: float = 0.105
    e_scan: tuple = (1.3, 2.4, 0.02)
    accept_tol: float = 1e-4
    trunc_tol: float = 1e-10
    sweep: SweepConfig = SweepConfig()


_TOP_KEYS = {"N", "eps", "M_bnd", "M_int_h", "E_scan", "accept_tol", "trunc_tol", "sweep"}
_SWEEP_KEYS = {"count", "seed0", "modes", "amplitude"}


def config_from_dict(obj):
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    sweep_obj = obj.get("sweep", {})
    unknown = set(sweep_obj) - _SWEEP_KEYS
    if unknown:
        raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
    base = SolverConfig()
    sweep = SweepConfig(
        count=int(sweep_obj.get("count", base.sweep.count)),
        seed0=int(sweep_obj.get("seed0", base.sweep.seed0)),
        modes=int(sweep_obj.get("modes", base.sweep.modes)),
        amplitude=float(sweep_obj.get("amplitude", base.sweep.amplitude)),
    )
    e_scan = obj.get("E_scan", list(base.e_scan))
    if len(e_scan) != 3:
        raise ValueError("E_scan must be [lo, hi, step]")
    return SolverConfig(
        n=int(obj.get("N", base.n)),
        eps=float(obj.get("eps", base.eps)),
        m_bnd=int(obj.get("M_bnd", base.m_bnd)),
        m_int_h=float(obj.get("M_int_h", base.m_int_h)),
        e_scan=tuple(float(v) for v in e_scan),
        accept_tol=float(obj.get("accept_tol", base.accept_tol)),
        trunc_tol=float(obj.get("trunc_tol", base.trunc_tol)),
        sweep=sweep,
    )


def config_to_dict(cfg):
    return {
        "N": cfg.n,
        "eps": cfg.eps,
        "M_bnd": cfg.m_bnd,
        "M_int_h": cfg.m_int_h,
        "E_scan": list(cfg.e_scan),
        "accept_tol": cfg.accept_tol,
        "trunc_tol": cfg.trunc_tol,
        "sweep": asdict(cfg.sweep),
    }


def load_config(path=None, overrides=()):
    """Config from an optional JSON file plus key=value overrides.

    Override keys use the JSON names, with sweep fields addressed as
    sweep.count etc.; values are parsed as JSON when possible.
    """
    obj = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    for item in overrides:
        key, _, raw = item.partition("=")
        if not _:
            raise ValueError(f"override {item!r} is not key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        if key.startswith("sweep."):
            obj.setdefault("sweep", {})[key.split(".", 1)[1]] = value
        else:
            obj[key] = value
    return config_from_dict(obj)


def config_hash(cfg):
    blob = json.dumps(config_to_dict(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def save_resolved_config(cfg, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def with_updates(cfg, **kwargs):
    return replace(cfg, **kwargs)
