"""Strict JSON run configuration and report schemas."""
import json
import warnings
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigurationError, PhysicsDomainError, ValidityWarning
from .geometry import LoopSpec, Placement
from .units import FieldBias, MaterialParams, material_from_name


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MaterialCfg(_Strict):
    gamma0: float
    gammaq: float
    Ms: float
    ka: float
    DeltaNV: float


class FluxCfg(_Strict):
    """Explicit flux factors, replacing the circular-coil integrals."""

    Ix: float
    Iy: float = 0.0
    Iz: float = 0.0


class LoopCfg(_Strict):
    l: float
    tau: float
    Cap: Optional[float] = None
    per_unit_L: Optional[float] = None
    per_unit_C: Optional[float] = None
    Bc: Optional[float] = Field(default=None, description="critical field of the wire (T)")
    inductance_model: Literal["full", "leading_log"] = "full"


class PlacementCfg(_Strict):
    d: float
    h: float = 0.0
    flux: Optional[FluxCfg] = None


class QubitCfg(_Strict):
    r_q: float
    theta: float = float(np.pi / 2)
    varphi: float = 0.0


class FieldCfg(_Strict):
    B0: float


class LatticeCfg(_Strict):
    kind: Literal["chain", "ring", "checkerboard"] = "chain"
    N: int = 8
    boundary: Literal["periodic", "open"] = "periodic"
    omega0: Optional[float] = None
    Jrate: Optional[float] = None
    a: Optional[float] = None
    nk: Optional[int] = None


class DynamicsCfg(_Strict):
    kappa: float = 0.0
    T2_star: Optional[float] = None
    t_max: Optional[float] = None
    n_t: int = 2048
    g: Optional[float] = None
    Jrate: Optional[float] = None
    Delta: Optional[float] = None
    backend: Literal["sector", "fock"] = "sector"
    n_max: int = 2
    n_points: int = 10
    x_range: List[float] = Field(default_factory=lambda: [1e-3, 1e-1])
    kappa_range: List[float] = Field(default_factory=lambda: [2 * np.pi * 1e3, 2 * np.pi * 1e7, 41])
    T2_range: List[float] = Field(default_factory=lambda: [1e-6, 1.0, 41])


class OutputCfg(_Strict):
    path: Optional[str] = None
    format: Literal["csv", "json"] = "json"


class RunConfig(_Strict):
    material: Union[str, MaterialCfg] = "yig"
    loop: Optional[LoopCfg] = None
    placement: Optional[PlacementCfg] = None
    magnet_radius: Optional[float] = None
    qubit: Optional[QubitCfg] = None
    field: Optional[FieldCfg] = None
    lattice: Optional[LatticeCfg] = None
    dynamics: Optional[DynamicsCfg] = None
    output: OutputCfg = OutputCfg()


def _format_validation(err):
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"])
        parts.append(f"{loc}: {e['msg']}")
    first = err.errors()[0]["loc"] if err.errors() else ()
    return "; ".join(parts), ".".join(str(x) for x in first) or None


def parse_config(data):
    """Validate a decoded JSON document; raises ConfigurationError naming the field path."""
    try:
        return RunConfig.model_validate(data)
    except ValidationError as err:
        msg, path = _format_validation(err)
        error = ConfigurationError(msg)
        error.path = path
        raise error from None


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"invalid JSON in {path}: {err}") from None
    cfg = parse_config(data)
    validate_physics(cfg)
    return cfg


def require(cfg, *names):
    """Return the named sections, raising if any is missing."""
    out = []
    for name in names:
        value = getattr(cfg, name)
        if value is None:
            raise ConfigurationError("section is required for this command", path=name)
        out.append(value)
    return out[0] if len(out) == 1 else out


# conversion to domain objects; physics preconditions are enforced by their constructors


def material(cfg):
    if isinstance(cfg.material, str):
        try:
            return material_from_name(cfg.material)
        except KeyError as err:
            raise ConfigurationError(str(err.args[0]), path="material") from None
    return MaterialParams(**cfg.material.model_dump())


def loop_spec(cfg, l_override=None):
    lc = require(cfg, "loop")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        return LoopSpec(l=lc.l if l_override is None else l_override, tau=lc.tau, Cap=lc.Cap,
                        per_unit_L=lc.per_unit_L, per_unit_C=lc.per_unit_C)


def placement(cfg, h_override=None):
    pc = require(cfg, "placement")
    return Placement(d=pc.d, h=pc.h if h_override is None else h_override)


def field_bias(cfg):
    return FieldBias(require(cfg, "field").B0)


def validate_physics(cfg):
    """Build every domain object present in ``cfg`` so invalid values fail at load time."""
    material(cfg)
    if cfg.loop is not None:
        loop_spec(cfg)
    if cfg.placement is not None:
        placement(cfg)
    if cfg.field is not None:
        field_bias(cfg)
    if cfg.magnet_radius is not None and not cfg.magnet_radius > 0:
        raise PhysicsDomainError(f"magnet_radius must be positive, got {cfg.magnet_radius!r}")


# ---------------------------------------------------------------------------
# report schemas (output documents re-parse under these)


class GeometryReport(_Strict):
    Ix: float
    Iy: float
    Iz: float
    L_full: float
    L_leading_log: float
    d_c: Optional[float]
    Phi_e: float
    Phi_bias: Optional[float]
    l_over_d: float
    h_over_d: float


class CouplingReport(_Strict):
    J12_rad_s: float
    J12_hz: float
    J12_dipolar_rad_s: float
    J12_dipolar_hz: float
    ratio: float
    ratio_large_loop: float
    J12_linear_I_rad_s: float
    J12_linear_I_hz: float
    ratio_linear_I: float
    omega_j_rad_s: float
    omega_j_hz: float
    g_dressed_rad_s: Optional[float]
    g_dressed_hz: Optional[float]
    g_maintext_rad_s: Optional[float]
    g_maintext_hz: Optional[float]
    omega_sigma_rad_s: Optional[float]
    omega_sigma_hz: Optional[float]
    Theta: Optional[float]
    F: float
    L: float


class SwapReport(_Strict):
    t_star_s: float
    epsilon: float
    g_eff_rad_s: Optional[float]
    kappa_eff_rad_s: Optional[float]
    Gamma_eff_rad_s: Optional[float]
    C0: Optional[float]
    alpha_gamma: Optional[float]
    alpha_kappa: Optional[float]


class FitAlphaReport(_Strict):
    alpha_gamma: float
    alpha_kappa: float
    alpha_kappa_caption: float
    r2_gamma: float
    r2_kappa: float
    poor_linearity: bool
    g_over_J: float
    n_points: int


REPORTS = {
    "geometry": GeometryReport,
    "coupling": CouplingReport,
    "swap": SwapReport,
    "fit-alpha": FitAlphaReport,
}
