"""
Run configuration for mfreelab.

TOML documents are validated with pydantic; every validation problem is
reported as a ConfigError listing `field: problem` lines.
"""
import pathlib
import sys
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from mfree.errors import ConfigError, MfreeError
from mfree.limit_law import BlockModel
from mfree.numeric import Profile
from mfree.series import parse_grid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ROUTES = ("combinatorial", "continued_fraction", "fock", "walks", "closed_form")
TWO_BLOCK_ROUTES = ("walks", "closed_form")

Scalar = Union[int, float, str]


class ModelConfig(BaseModel):
    u: List[List[Scalar]]
    d: List[Scalar]
    relaxed: bool = False
    name: str = ""

    @field_validator("u")
    @classmethod
    def _square(cls, u):
        if not u or any(len(row) != len(u) for row in u):
            raise ValueError("u must be a non-empty square list of rows")
        return u

    def build(self, profile: Profile = Profile.RATIONAL) -> BlockModel:
        return BlockModel.from_rows(self.u, self.d, profile, self.relaxed, self.name)


class DensityConfig(BaseModel):
    law: str = "mu"
    grid: str = "-3:3:601"
    eps: float = Field(default=1e-3, gt=0)
    depth: int = Field(default=40, ge=1)

    @field_validator("grid")
    @classmethod
    def _grid(cls, grid):
        try:
            parse_grid(grid)
        except MfreeError as exc:
            raise ValueError(str(exc))
        return grid


class FockConfig(BaseModel):
    engine: str = "blocks"
    flavor: str = "standard"

    @field_validator("engine")
    @classmethod
    def _engine(cls, engine):
        if engine not in ("direct", "blocks"):
            raise ValueError("engine must be direct or blocks")
        return engine

    @field_validator("flavor")
    @classmethod
    def _flavor(cls, flavor):
        if flavor not in ("standard", "strong"):
            raise ValueError("flavor must be standard or strong")
        return flavor


class RunConfig(BaseModel):
    model: ModelConfig
    max_order: int = 8
    routes: List[str] = Field(default_factory=lambda: ["combinatorial", "continued_fraction"])
    fock_sizes: List[int] = Field(default_factory=list)
    numeric_profile: Profile = Profile.RATIONAL
    output: str = "mfree-out"
    tolerance: Optional[float] = None
    density: DensityConfig = Field(default_factory=DensityConfig)
    fock: FockConfig = Field(default_factory=FockConfig)

    @field_validator("numeric_profile", mode="before")
    @classmethod
    def _profile(cls, value):
        try:
            return Profile.parse(value)
        except MfreeError as exc:
            raise ValueError(str(exc))

    @field_validator("max_order")
    @classmethod
    def _order(cls, value):
        if value < 2:
            raise ValueError(f"max_order must be >= 2, got {value}")
        return value

    @field_validator("routes")
    @classmethod
    def _routes(cls, routes):
        if not routes:
            raise ValueError("at least one route is required")
        unknown = [r for r in routes if r not in ROUTES]
        if unknown:
            raise ValueError(f"unknown routes {unknown}; expected a subset of {list(ROUTES)}")
        return list(dict.fromkeys(routes))

    @field_validator("fock_sizes")
    @classmethod
    def _sizes(cls, sizes):
        if any(n < 1 for n in sizes):
            raise ValueError("fock sizes must be positive")
        return sorted(set(sizes))

    @model_validator(mode="after")
    def _cross_field(self):
        try:
            block_model = self.model.build(self.numeric_profile)
        except MfreeError as exc:
            raise ValueError(f"model: {exc}")
        for route in TWO_BLOCK_ROUTES:
            if route in self.routes and block_model.r != 2:
                raise ValueError(f"the {route} route requires r = 2, model has r = {block_model.r}")
        if "fock" in self.routes and not self.fock_sizes:
            raise ValueError("the fock route requires non-empty fock_sizes")
        return self

    def block_model(self) -> BlockModel:
        return self.model.build(self.numeric_profile)


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "config"
        message = err["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, "):]
        lines.append(f"{where}: {message}")
    return "\n".join(lines)


def load_toml(path: pathlib.Path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")


def load_model_file(path: pathlib.Path) -> Dict[str, Any]:
    doc = load_toml(path)
    if "model" not in doc:
        raise ConfigError(f"{path}: missing [model] table")
    return doc["model"]


def build_run_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc))


def merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; values of `override` that are None are ignored."""
    out = dict(base)
    for key, value in override.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def load_run_document(path: pathlib.Path) -> Dict[str, Any]:
    """
    Flatten a run file into RunConfig fields.

    `[run].model` may name a model file (relative to the run file) and an
    inline `[model]` table overrides it.
    """
    doc = load_toml(path)
    run = dict(doc.get("run", {}))
    model_ref = run.pop("model", None)
    if "model" in doc:
        run["model"] = doc["model"]
    elif isinstance(model_ref, str):
        run["model"] = load_model_file(path.parent / model_ref)
    for section in ("density", "fock"):
        if section in doc:
            run[section] = doc[section]
    if "tolerance" in doc.get("crosscheck", {}):
        run["tolerance"] = doc["crosscheck"]["tolerance"]
    return run
