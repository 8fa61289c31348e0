"""Experiment configuration files.

Grammar: one ``key = value`` per line, ``#`` starts a comment, blank lines
are ignored.  Keys are dotted (``kinetics.r``, ``params.chi``,
``grid.n``, ``solver.t_end``, ``output.dir``); top-level keys are
``preset``, ``model`` and ``init``.  Numbers are decimal literals.  Either
``preset = para1`` or a complete ``kinetics`` block is required; explicit
keys override the preset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from evasion.kinetics import (
    FunctionalResponseSpec,
    GrowthSpec,
    KineticsSpec,
    ModelVariant,
    ResponseFamily,
    SignalLaw,
    SignalProductionSpec,
)
from evasion.model import PARA1, ModelParams
from evasion.pde_solver import Constant, Gaussian, Grid, InitialDataSpec, SolverConfig


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, path=None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line


PRESETS = {"para1": PARA1}

_KINETICS_NUM = {"r", "K", "a", "beta", "alpha", "d", "exponent", "c", "conversion", "delta", "mu", "gamma", "eta"}
_KINETICS_STR = {"family", "signal"}
_PARAMS_NUM = {"chi", "xi", "D1", "d_p", "d_w", "L"}
_PARAMS_INT = {"dim"}
_GRID_INT = {"n"}
_SOLVER_NUM = {f.name for f in fields(SolverConfig)} - {"reactions", "max_steps"}
_OUTPUT_STR = {"dir"}
_OUTPUT_NUM = {"snapshot_every"}
_TOP_STR = {"preset", "model", "init"}

# keys a config must provide when no preset is given
_REQUIRED_KINETICS = ("r", "a", "beta", "delta", "mu", "gamma")


@dataclass
class ExperimentConfig:
    params: ModelParams
    dim: int = 1
    n: int = 100
    init: str = "cosine:j=1"
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "out"
    preset: str | None = None
    overridden: set = field(default_factory=set)

    @property
    def grid(self) -> Grid:
        return Grid(self.dim, self.params.L, self.n)

    @property
    def initial(self) -> InitialDataSpec:
        return parse_init(self.init)

    @property
    def is_pure_preset(self) -> bool:
        """True when the kinetics and diffusivities are exactly a preset's."""
        return self.preset is not None and not (self.overridden & (_KINETICS_KEYS | {"params.D1", "params.d_p", "params.d_w"}))


_KINETICS_KEYS = {f"kinetics.{k}" for k in _KINETICS_NUM | _KINETICS_STR}


def parse_init(text: str) -> InitialDataSpec:
    """``cosine:j=1[,aN=..,aP=..,aW=..]``, ``gaussian-NP[:amp=..,width=..]``,
    ``gaussian-P[...]`` or ``constant``."""
    kind, _, rest = text.strip().partition(":")
    opts: dict[str, str] = {}
    if rest:
        for part in rest.split(","):
            k, eq, v = part.partition("=")
            if not eq:
                raise ConfigError(f"bad init option {part!r}")
            opts[k.strip()] = v.strip()

    def num(key, default):
        try:
            return float(opts.pop(key)) if key in opts else default
        except ValueError:
            raise ConfigError(f"init option {key} is not a number") from None

    kind = kind.strip()
    if kind == "cosine":
        jtxt = opts.pop("j", "1")
        try:
            j = tuple(int(x) for x in jtxt.split("x")) if "x" in jtxt else int(jtxt)
        except ValueError:
            raise ConfigError(f"bad mode index {jtxt!r}") from None
        spec = InitialDataSpec.cosine(j, (num("aN", 0.1), num("aP", 0.1), num("aW", 1.0)))
    elif kind in ("gaussian-NP", "gaussian-P"):
        amp, width = num("amp", 1.0), num("width", 1.0)
        g = Gaussian(amp, width)
        spec = InitialDataSpec(N=g if kind == "gaussian-NP" else Constant(), P=g)
    elif kind == "constant":
        spec = InitialDataSpec()
    else:
        raise ConfigError(f"unknown initial data {kind!r}")
    if opts:
        raise ConfigError(f"unknown init options {sorted(opts)}")
    return spec


def _number(text: str, key: str, line: int, integer: bool = False):
    try:
        v = int(text) if integer else float(text)
    except ValueError:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"{key} must be {kind}, got {text!r}", line) from None
    if not integer and not math.isfinite(v):
        raise ConfigError(f"{key} must be finite", line)
    return v


def parse_config_text(text: str, path=None) -> ExperimentConfig:
    raw: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, eq, val = body.partition("=")
        key, val = key.strip(), val.strip()
        if not eq or not key or not val:
            raise ConfigError(f"expected 'key = value', got {line.strip()!r}", lineno, path)
        section, _, name = key.rpartition(".")
        if section == "":
            if key not in _TOP_STR:
                raise ConfigError(f"unknown key {key!r}", lineno, path)
            value = val
        elif section == "kinetics" and name in _KINETICS_NUM:
            value = _number(val, key, lineno)
        elif section == "kinetics" and name in _KINETICS_STR:
            value = val
        elif section == "params" and name in _PARAMS_NUM:
            value = _number(val, key, lineno)
        elif section == "params" and name in _PARAMS_INT:
            value = _number(val, key, lineno, integer=True)
        elif section == "grid" and name in _GRID_INT:
            value = _number(val, key, lineno, integer=True)
        elif section == "solver" and name in _SOLVER_NUM:
            value = _number(val, key, lineno)
        elif section == "output" and name in _OUTPUT_STR:
            value = val
        elif section == "output" and name in _OUTPUT_NUM:
            value = _number(val, key, lineno)
        else:
            raise ConfigError(f"unknown key {key!r}", lineno, path)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno, path)
        raw[key] = (value, lineno)
    if not raw:
        raise ConfigError("empty configuration: a preset or a kinetics block is required", None, path)
    return build_config({k: v for k, (v, _) in raw.items()}, {k: ln for k, (_, ln) in raw.items()}, path)


def build_config(values: dict, lines: dict | None = None, path=None) -> ExperimentConfig:
    """Assemble and validate a config from flat dotted keys."""
    lines = lines or {}

    def err(msg, *keys):
        ln = next((lines[k] for k in keys if k in lines), None)
        return ConfigError(msg, ln, path)

    preset = values.get("preset")
    base: dict[str, float] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise err(f"unknown preset {preset!r}", "preset")
        base = dict(PRESETS[preset])
    kin = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("kinetics.")}
    merged = {**base, **{k: v for k, v in kin.items() if k not in _KINETICS_STR}}
    if preset is None:
        missing = [k for k in _REQUIRED_KINETICS if k not in merged]
        if "c" not in merged and "conversion" not in merged:
            missing.append("c")
        if missing:
            raise err(f"kinetics block incomplete, missing {', '.join('kinetics.' + m for m in missing)}")
    try:
        model = ModelVariant(values.get("model", "B"))
    except ValueError:
        raise err(f"unknown model {values.get('model')!r}", "model") from None

    alpha = float(merged.get("alpha", 0.0))
    fam_default = ResponseFamily.HOLLING_II
    if preset is None and alpha > 0:
        fam_default = ResponseFamily.BEDDINGTON_DEANGELIS
    try:
        family = ResponseFamily(kin.get("family", fam_default))
        signal = SignalLaw(kin.get("signal", SignalLaw.ODOR))
    except ValueError as exc:
        raise err(str(exc), "kinetics.family", "kinetics.signal") from None

    try:
        a = float(merged["a"])
        conversion = float(merged["conversion"]) if "conversion" in merged else float(merged["c"]) / a
        kinetics = KineticsSpec(
            growth=GrowthSpec(r=float(merged["r"]), K=float(merged.get("K", 1.0))),
            response=FunctionalResponseSpec(
                family=family,
                a=a,
                beta=float(merged["beta"]),
                alpha=alpha,
                d=float(merged.get("d", 0.0)),
                exponent=float(merged.get("exponent", 2.0)),
            ),
            signal=SignalProductionSpec(law=signal, gamma=float(merged["gamma"])),
            conversion=conversion,
            delta=float(merged["delta"]),
            mu=float(merged["mu"]),
            eta=float(merged.get("eta", 0.0)),
        )
    except ValueError as exc:
        raise err(f"invalid kinetics: {exc}", *sorted(k for k in values if k.startswith("kinetics."))) from None

    chi = float(values.get("params.chi", 0.0))
    xi = float(values.get("params.xi", 0.0))
    if model is not ModelVariant.A and xi != 0:
        raise err(f"model {model.value} has no prey-taxis; params.xi must be 0", "params.xi", "model")
    if model is ModelVariant.B2 and kinetics.eta <= 0:
        raise err("model B2 requires kinetics.eta > 0", "kinetics.eta", "model")
    dim = int(values.get("params.dim", 1))
    if dim not in (1, 2):
        raise err("params.dim must be 1 or 2", "params.dim")
    L = float(values.get("params.L", 1.0 if dim == 1 else 10.0))
    D = (
        float(values.get("params.D1", 1.0)),
        float(values.get("params.d_p", merged.get("d_p", 0.01))),
        float(values.get("params.d_w", merged.get("d_w", 0.01))),
    )
    try:
        params = ModelParams(kinetics, model, chi, xi, D, L)
    except ValueError as exc:
        raise err(str(exc), "params.chi", "params.xi", "params.L") from None

    solver_kw = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("solver.")}
    if "output.snapshot_every" in values:
        solver_kw.setdefault("snapshot_every", values["output.snapshot_every"])
    solver_kw.setdefault("t_end", 500.0 if dim == 1 else 200.0)
    try:
        solver = SolverConfig(**solver_kw)
    except (TypeError, ValueError) as exc:
        raise err(f"invalid solver block: {exc}", *sorted(k for k in values if k.startswith("solver."))) from None

    init = values.get("init", "cosine:j=1" if dim == 1 else "gaussian-P")
    try:
        parse_init(init)
    except ConfigError as exc:
        raise err(str(exc), "init") from None
    n = int(values.get("grid.n", 100))
    try:
        Grid(dim, L, n)
    except ValueError as exc:
        raise err(str(exc), "grid.n") from None
    return ExperimentConfig(
        params=params,
        dim=dim,
        n=n,
        init=init,
        solver=solver,
        output_dir=str(values.get("output.dir", "out")),
        preset=preset,
        overridden={k for k in values if k != "preset"},
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config_text(text, path)


# defaults that depend on the dimension; recomputed when only dim changes
_DIM_DEPENDENT = ("params.L", "solver.t_end", "init")


def with_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    """Reapply ``build_config`` with additional dotted keys on top of ``cfg``."""
    new = {k: v for k, v in overrides.items() if v is not None}
    values = config_values(cfg)
    if "params.dim" in new:
        for key in _DIM_DEPENDENT:
            if key not in cfg.overridden and key not in new:
                values.pop(key, None)
    values.update(new)
    out = build_config(values)
    out.overridden = set(cfg.overridden) | set(new)
    return out


def config_values(cfg: ExperimentConfig) -> dict:
    """Flat dotted-key view of a config (inverse of ``build_config``)."""
    p = cfg.params
    k = p.kinetics
    r = k.response
    v = {
        "model": p.variant.value,
        "kinetics.r": k.growth.r,
        "kinetics.K": k.growth.K,
        "kinetics.a": r.a,
        "kinetics.beta": r.beta,
        "kinetics.alpha": r.alpha,
        "kinetics.d": r.d,
        "kinetics.exponent": r.exponent,
        "kinetics.family": r.family.value,
        "kinetics.signal": k.signal.law.value,
        "kinetics.gamma": k.signal.gamma,
        "kinetics.conversion": k.conversion,
        "kinetics.delta": k.delta,
        "kinetics.mu": k.mu,
        "kinetics.eta": k.eta,
        "params.chi": p.chi,
        "params.xi": p.xi,
        "params.D1": p.D[0],
        "params.d_p": p.D[1],
        "params.d_w": p.D[2],
        "params.L": p.L,
        "params.dim": cfg.dim,
        "grid.n": cfg.n,
        "init": cfg.init,
        "output.dir": cfg.output_dir,
    }
    for f in fields(SolverConfig):
        v[f"solver.{f.name}"] = getattr(cfg.solver, f.name)
    if cfg.preset is not None:
        v["preset"] = cfg.preset
    return v


def preset_config(name: str = "para1") -> ExperimentConfig:
    return build_config({"preset": name})


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PRESETS",
    "build_config",
    "config_values",
    "load_config",
    "parse_config_text",
    "parse_init",
    "preset_config",
    "with_overrides",
]
