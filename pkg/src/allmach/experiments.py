"""Test-problem setups and the run driver behind the CLI."""
import math
import os
import time
from dataclasses import asdict, dataclass, field as dc_field, fields, replace
from enum import Enum

import numpy as np

from . import diagnostics
from .eos import GasModel, primitive_to_conserved
from .errors import ConfigError, EulerError
from .fluxes import FluxKind
from .solver import DEFAULT_CFL, Boundary, Field2D, Reconstruction, build_grid, evolve

# core angular velocity of the vortex is 5, so one revolution takes 2 pi / 5
GRESHO_REVOLUTION = 2.0 * math.pi / 5.0
SOUND_WAVE_LEFT = (1.0, 0.75, 0.0, 1.0)
SOUND_WAVE_RIGHT = (0.125, 0.0, 0.0, 0.1)
PURE_CONTACT_LEFT = (1.0, 0.0, 0.0, 1.0)
PURE_CONTACT_RIGHT = (0.5, 0.0, 0.0, 1.0)
RIEMANN_BOUNDARY = (Boundary.TRANSMISSIVE, Boundary.PERIODIC)


class Experiment(Enum):
    SOUND_WAVE = "SoundWave"
    CONTACT = "Contact"
    PURE_CONTACT = "PureContact"
    GRESHO = "Gresho"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "").replace("_", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown experiment {text!r}; expected one of {', '.join(m.value for m in cls)}")


def _riemann_field(nx, left, right, gas):
    if nx < 2:
        raise ConfigError(f"a Riemann problem needs nx >= 2, got {nx}")
    grid = build_grid((0.0, 1.0, 0.0, 1.0), nx, 1)
    x = grid.x_centers()
    w = np.where((x < 0.5)[:, None], np.array(left), np.array(right))[:, None, :]
    return Field2D(grid, primitive_to_conserved(w, gas), 0.0, RIEMANN_BOUNDARY)


def setup_sound_wave(nx, gas=GasModel()):
    """Standing sound wave: (1, 0.75, 1) left of x = 0.5, (0.125, 0, 0.1) right of it."""
    return _riemann_field(nx, SOUND_WAVE_LEFT, SOUND_WAVE_RIGHT, gas)


def setup_contact(nx, gas=GasModel()):
    return _riemann_field(nx, SOUND_WAVE_LEFT, SOUND_WAVE_RIGHT, gas)


def setup_pure_contact(nx, gas=GasModel()):
    """Stationary contact: density 1 -> 0.5 at rest under uniform pressure."""
    return _riemann_field(nx, PURE_CONTACT_LEFT, PURE_CONTACT_RIGHT, gas)


def gresho_azimuthal_speed(r):
    r = np.asarray(r, dtype=float)
    return np.where(r < 0.2, 5.0 * r, np.where(r < 0.4, 2.0 - 5.0 * r, 0.0))


def gresho_background_pressure(mach_ref, gamma):
    return 1.0 / (2.0 * gamma * mach_ref ** 2)


def gresho_pressure(r, mach_ref, gamma):
    r = np.asarray(r, dtype=float)
    pc = gresho_background_pressure(mach_ref, gamma)
    rs = np.maximum(r, 1e-300)
    inner = pc + 12.5 * r ** 2
    ring = pc + 4.0 * np.log(5.0 * rs) + 4.0 - 20.0 * r + 12.5 * r ** 2
    outer = pc + 4.0 * math.log(2.0) - 2.0
    return np.where(r < 0.2, inner, np.where(r < 0.4, ring, outer))


def setup_gresho(nx, ny, mach_ref, gas=GasModel()):
    """Gresho vortex at (0.5, 0.5) on the periodic unit square, sampled at cell centers."""
    grid = build_grid((0.0, 1.0, 0.0, 1.0), nx, ny)
    x, y = grid.meshgrid()
    dx, dy = x - 0.5, y - 0.5
    r = np.hypot(dx, dy)
    phi = np.arctan2(dy, dx)
    speed = gresho_azimuthal_speed(r)
    w = np.stack([np.ones_like(r), -speed * np.sin(phi), speed * np.cos(phi),
                  gresho_pressure(r, mach_ref, gas.gamma)], axis=-1)
    return Field2D(grid, primitive_to_conserved(w, gas), 0.0, (Boundary.PERIODIC, Boundary.PERIODIC))


def gresho_mach_ratio(field, mach_ref, gas=GasModel()):
    """Initial max local Mach number relative to its low-Mach estimate sqrt(2) * mach_ref."""
    return float(diagnostics.mach_field(field, gas).max()) / (math.sqrt(2.0) * mach_ref)


@dataclass
class RunConfig:
    experiment: Experiment = Experiment.SOUND_WAVE
    flux: FluxKind = FluxKind.ES_LM
    m_cut: float = 0.0
    nx: int = 100
    ny: int = 1
    reconstruction: Reconstruction = None
    cfl: float = DEFAULT_CFL
    t_end: float = None
    gamma: float = 1.4
    gas_constant: float = 1.0
    mach_ref: float = 0.1
    output_dir: str = None
    output_stride: int = 1

    @property
    def gas(self):
        return GasModel(self.gamma, self.gas_constant)

    def resolved(self):
        """Fill experiment-dependent defaults and validate."""
        cfg = replace(self)
        if cfg.reconstruction is None:
            cfg.reconstruction = (Reconstruction.LIMITED_LINEAR if cfg.experiment is Experiment.GRESHO
                                  else Reconstruction.CONSTANT)
        if cfg.t_end is None:
            cfg.t_end = 0.1 * GRESHO_REVOLUTION if cfg.experiment is Experiment.GRESHO else 0.2
        if cfg.experiment is not Experiment.GRESHO and cfg.ny != 1:
            raise ConfigError("Riemann experiments run on nx x 1 grids; set ny = 1")
        checks = [
            (cfg.gamma > 1.0, "gamma must exceed 1"),
            (cfg.gas_constant > 0.0, "gas_constant must be positive"),
            (0.0 <= cfg.m_cut <= 1.0, "m_cut must lie in [0, 1]"),
            (0.0 < cfg.cfl <= 1.0, "cfl must lie in (0, 1]"),
            (cfg.nx >= 1 and cfg.ny >= 1, "nx and ny must be >= 1"),
            (cfg.t_end >= 0.0, "t_end must be non-negative"),
            (cfg.mach_ref > 0.0, "mach_ref must be positive"),
            (cfg.output_stride >= 1, "output_stride must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        return cfg

    def describe(self):
        out = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, FluxKind):
                val = val.label
            elif isinstance(val, Enum):
                val = val.value
            out.append(f"{f.name} = {val}")
        return out

    @classmethod
    def from_mapping(cls, mapping, base=None):
        """Build a config from string values (config file or CLI overrides)."""
        cfg = base or cls()
        known = {f.name: f for f in fields(cls)}
        updates = {}
        for key, raw in mapping.items():
            key = key.strip().replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if raw is None:
                continue
            try:
                updates[key] = _coerce(key, raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
        return replace(cfg, **updates)


_FLOAT_KEYS = {"m_cut", "cfl", "t_end", "gamma", "gas_constant", "mach_ref"}
_INT_KEYS = {"nx", "ny", "output_stride"}


def _coerce(key, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if key == "experiment":
        return Experiment.parse(text)
    if key == "flux":
        return FluxKind.parse(text)
    if key == "reconstruction":
        return Reconstruction.parse(text)
    if key in _FLOAT_KEYS:
        return float(text)
    if key in _INT_KEYS:
        return int(text)
    return text


def parse_config_text(text):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def load_config(path, overrides=None):
    try:
        with open(path) as fh:
            mapping = parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = RunConfig.from_mapping(mapping)
    if overrides:
        cfg = RunConfig.from_mapping(overrides, base=cfg)
    return cfg


@dataclass
class ExperimentResult:
    config: RunConfig
    final_field: Field2D
    records: list = dc_field(default_factory=list)
    wall_time: float = 0.0
    initial_field: Field2D = None


def initial_field(cfg):
    gas = cfg.gas
    if cfg.experiment is Experiment.SOUND_WAVE:
        return setup_sound_wave(cfg.nx, gas)
    if cfg.experiment is Experiment.CONTACT:
        return setup_contact(cfg.nx, gas)
    if cfg.experiment is Experiment.PURE_CONTACT:
        return setup_pure_contact(cfg.nx, gas)
    return setup_gresho(cfg.nx, cfg.ny, cfg.mach_ref, gas)


def run(config, write=True, max_steps=None):
    """Evolve one experiment, collecting diagnostics every ``output_stride`` steps."""
    cfg = config.resolved()
    gas = cfg.gas
    field0 = initial_field(cfg)
    if cfg.experiment is Experiment.GRESHO and cfg.mach_ref <= 0.1:
        ratio = gresho_mach_ratio(field0, cfg.mach_ref, gas)
        if abs(ratio - 1.0) > 0.1:
            raise EulerError(f"Gresho initial max Mach is {ratio:.3f} x sqrt(2) mach_ref, expected within 10%")

    records = [diagnostics.record(field0, cfg.flux, gas, cfg.m_cut)]

    def collect(field, step):
        if step % cfg.output_stride == 0:
            records.append(diagnostics.record(field, cfg.flux, gas, cfg.m_cut))

    start = time.perf_counter()
    final = evolve(field0, cfg.t_end, cfg.flux, cfg.reconstruction, cfg.cfl, gas, cfg.m_cut,
                   callbacks=(collect,), max_steps=max_steps)
    wall = time.perf_counter() - start
    if records[-1].time < final.time:
        records.append(diagnostics.record(final, cfg.flux, gas, cfg.m_cut))
    result = ExperimentResult(cfg, final, records, wall, field0)
    if write and cfg.output_dir:
        write_outputs(result)
    return result


def run_reference(nx=100_000, output_dir=None, cfl=DEFAULT_CFL, output_stride=None):
    """LLF, constant reconstruction, sound-wave data to t = 0.2."""
    cfg = RunConfig(Experiment.SOUND_WAVE, FluxKind.LLF, nx=nx, cfl=cfl, t_end=0.2,
                    reconstruction=Reconstruction.CONSTANT, output_dir=output_dir,
                    output_stride=output_stride or 10 ** 9)
    return run(cfg)


SWEEP_FLUXES = (FluxKind.ROE, FluxKind.ROE_LM, FluxKind.ES, FluxKind.ES_KES, FluxKind.ES_LM, FluxKind.ES_KES_LM)
SWEEP_MACH = (1.0, 0.1, 0.01)


def sweep_configs(base=None, fluxes=SWEEP_FLUXES, machs=SWEEP_MACH):
    base = base or RunConfig(Experiment.GRESHO, nx=32, ny=32)
    root = base.output_dir
    out = []
    for mach in machs:
        for kind in fluxes:
            sub = None if root is None else os.path.join(root, f"{kind.label}_M{mach:g}")
            out.append(replace(base, experiment=Experiment.GRESHO, flux=kind, mach_ref=mach, output_dir=sub))
    return out


def _run_quiet(cfg):
    return run(cfg)


def sweep(base=None, fluxes=SWEEP_FLUXES, machs=SWEEP_MACH, jobs=1):
    """Gresho runs over flux kinds x reference Mach numbers; each run owns its output directory."""
    configs = sweep_configs(base, fluxes, machs)
    if jobs <= 1:
        return [run(cfg) for cfg in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_quiet, configs))


def field_rows(field, gas):
    w = field.primitive(gas)
    s = diagnostics.entropy_field(field, gas)
    mach = diagnostics.mach_field(field, gas)
    x = field.grid.x_centers()
    y = field.grid.y_centers()
    for j in range(field.grid.ny):
        for i in range(field.grid.nx):
            yield (x[i], y[j], w[i, j, 0], w[i, j, 1], w[i, j, 2], w[i, j, 3], mach[i, j], s[i, j])


FIELD_COLUMNS = ("x", "y", "rho", "u", "v", "p", "mach", "entropy")


def write_field_csv(field, path, gas=GasModel(), comments=()):
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(FIELD_COLUMNS) + "\n")
        for row in field_rows(field, gas):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_field_csv(path):
    """Structured array with the field CSV columns."""
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return np.genfromtxt(lines, delimiter=",", names=True)


def write_outputs(result):
    cfg = result.config
    os.makedirs(cfg.output_dir, exist_ok=True)
    header = cfg.describe() + [f"final_time = {result.final_field.time!r}"]
    write_field_csv(result.final_field, os.path.join(cfg.output_dir, "field.csv"), cfg.gas, header)
    diagnostics.write_records_csv(result.records, os.path.join(cfg.output_dir, "diagnostics.csv"), header)


def downsample(field, factor):
    """Conservative block average of an nx x 1 field by an integer factor in x."""
    nx = field.grid.nx
    if nx % factor:
        raise ValueError(f"nx={nx} is not divisible by {factor}")
    cells = field.cells.reshape(nx // factor, factor, field.grid.ny, 4).mean(axis=1)
    g = field.grid
    grid = build_grid((g.x_min, g.x_max, g.y_min, g.y_max), nx // factor, g.ny)
    return Field2D(grid, cells, field.time, field.boundary)


def l1_density_error(field, reference):
    """Cell-averaged L1 distance in density after block-averaging ``reference`` onto ``field``'s grid."""
    ref = downsample(reference, reference.grid.nx // field.grid.nx)
    return float(np.abs(field.cells[..., 0] - ref.cells[..., 0]).sum() * field.grid.cell_area)


def config_dict(cfg):
    out = asdict(cfg)
    for key, val in out.items():
        if isinstance(val, FluxKind):
            out[key] = val.label
        elif isinstance(val, Enum):
            out[key] = val.value
    return out
