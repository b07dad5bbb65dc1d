from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path
from typing import Any, List, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ParameterError

load_dotenv()


class Settings(BaseSettings):
    app_name: str = "TopoSIMP Ground-Truth Engine"
    environment: str = "development"
    log_level: str = "INFO"

    # Material (dimensionless moduli)
    e0: float = 1.0
    emin: float = 1e-9
    nu: float = 0.3
    penal: float = 3.0

    # SIMP defaults
    volfrac: float = 0.5
    rmin: float = 1.5
    move_limit: float = 0.2
    change_tol: float = 0.01
    max_iters: int = 200
    oc_tol: float = 1e-4

    # Load sampling range in N
    force_min: float = -100.0
    force_max: float = 100.0

    residual_tol: float = 1e-9
    # elements at or below this density do not carry load in the compliance metric
    void_threshold: float = 1e-2

    # Metrics / loss
    lambda_topo: float = 0.1
    essential_penalty: float = 1.0
    betti_threshold: float = 0.5

    dataset_format_version: int = 1
    jobs: int = 1

    # Optional TOML file overriding the built-in BC templates
    templates_file: Optional[str] = None

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_prefix="TOPO_", case_sensitive=False
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()


def parse_resolution(value: str | Tuple[int, int] | List[int]) -> Tuple[int, int]:
    """Parse ``ROWSxCOLS`` (nely x nelx) into a ``(nely, nelx)`` tuple."""
    if isinstance(value, (tuple, list)):
        rows, cols = (int(v) for v in value)
    else:
        parts = str(value).lower().replace(" ", "").split("x")
        if len(parts) != 2:
            raise ParameterError(f"resolution must look like 40x80, got {value!r}")
        try:
            rows, cols = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParameterError(f"resolution must look like 40x80, got {value!r}") from exc
    if rows < 1 or cols < 1:
        raise ParameterError(f"resolution must be positive, got {value!r}")
    return rows, cols


def load_config_file(path: str | Path | None) -> dict[str, Any]:
    """Read a flat TOML run configuration. Missing path -> empty dict."""
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise ParameterError(f"config file not found: {p}")
    try:
        with p.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"config {p}: {exc}") from exc
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ParameterError(f"config {p}: flat keys only, got table(s) {', '.join(nested)}")
    return data


def _settings_default(name: str):
    return Field(default_factory=lambda: getattr(get_settings(), name))


class RunConfig(BaseModel):
    """Fully resolved configuration of one CLI run; echoed to ``run.json``."""

    model_config = ConfigDict(extra="forbid")

    command: str
    config_path: Optional[str] = None
    out: Optional[str] = None
    seed: int = 0

    # domain
    resolution: Optional[Tuple[int, int]] = None  # (nely, nelx)
    nelx: Optional[int] = None
    nely: Optional[int] = None
    template: str = "a"
    templates: List[str] = Field(default_factory=lambda: ["a", "b"])
    fixed_dofs: Optional[List[int]] = None
    # (ix, iy, fx, fy) with iy counted from the top node row
    loads: List[Tuple[int, int, float, float]] = Field(default_factory=list)

    # generation
    n: int = 0
    n_forces: int = 1
    augment: bool = False
    jobs: int = _settings_default("jobs")

    # evaluation
    dataset: Optional[str] = None
    predictions: Optional[str] = None
    field: Optional[str] = None
    index: int = 0
    lambda_topo: float = _settings_default("lambda_topo")
    essential_penalty: float = _settings_default("essential_penalty")
    round_before_metrics: bool = False
    fraction: float = 0.01

    # material
    e0: float = _settings_default("e0")
    emin: float = _settings_default("emin")
    nu: float = _settings_default("nu")
    penal: float = _settings_default("penal")

    # SIMP
    volfrac: float = _settings_default("volfrac")
    rmin: float = _settings_default("rmin")
    move_limit: float = _settings_default("move_limit")
    change_tol: float = _settings_default("change_tol")
    max_iters: int = _settings_default("max_iters")
    oc_tol: float = _settings_default("oc_tol")

    png: bool = False

    @field_validator("resolution", mode="before")
    @classmethod
    def _parse_res(cls, v):
        if v is None:
            return v
        return parse_resolution(v)

    @field_validator("templates", mode="before")
    @classmethod
    def _split_templates(cls, v):
        if isinstance(v, str):
            return [s.strip() for s in v.split(",") if s.strip()]
        return v

    @field_validator("n", "n_forces", "jobs", "index")
    @classmethod
    def _non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be >= 0")
        return v

    def grid_shape(self, default: Optional[Tuple[int, int]] = None) -> Tuple[int, int]:
        """Return ``(nely, nelx)`` from ``resolution``, then ``nely``/``nelx``, then ``default``."""
        if self.resolution is not None:
            return self.resolution
        if self.nelx is not None and self.nely is not None:
            return self.nely, self.nelx
        if default is not None:
            return default
        raise ParameterError("resolution: give --res ROWSxCOLS or nelx/nely in the config")

    def material(self):
        from .models import MaterialModel

        return MaterialModel(e0=self.e0, emin=self.emin, nu=self.nu, penal=self.penal)

    def simp(self):
        from .models import SimpConfig

        return SimpConfig(
            volfrac=self.volfrac,
            rmin=self.rmin,
            penal=self.penal,
            move_limit=self.move_limit,
            change_tol=self.change_tol,
            max_iters=self.max_iters,
            oc_tol=self.oc_tol,
        )


def resolve_run_config(command: str, config_path: str | None, overrides: dict[str, Any]) -> RunConfig:
    """Merge config-file values with CLI overrides (``None`` means not given)."""
    data: dict[str, Any] = dict(load_config_file(config_path))
    given = {k: v for k, v in overrides.items() if v is not None}
    # the grid is either resolution or nelx/nely; a flag replaces both forms from the file
    if "resolution" in given:
        data.pop("nelx", None)
        data.pop("nely", None)
    if "nelx" in given or "nely" in given:
        data.pop("resolution", None)
    data.update(given)
    data["command"] = command
    data["config_path"] = str(config_path) if config_path else None
    return RunConfig.model_validate(data)
