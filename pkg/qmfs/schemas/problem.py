import json
import logging
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qmfs.core.errors import ConfigError, ScaleError
from qmfs.models.enums import CheckName, ProblemMode, SolverPath, SurfaceKind
from qmfs.numerics.chiral import MediumParams, WaveNumberPair, derive_wave_numbers
from qmfs.numerics.geometry import SurfaceGeometry, sample_sphere
from qmfs.numerics.kernels import WaveNumber
from qmfs.numerics.solver import BenchmarkSetup, BoundaryData
from qmfs.numerics.verify import FdCheckConfig, random_shell_points

logger = logging.getLogger(__name__)

Vector3 = Tuple[float, float, float]


class SurfaceSpec(BaseModel):
    """Closed boundary surface"""
    model_config = ConfigDict(extra="forbid")

    kind: SurfaceKind = Field(default=SurfaceKind.SPHERE, description="Surface kind (sphere or ellipsoid)")
    center: Vector3 = Field(default=(0.0, 0.0, 0.0), description="Center of the surface")
    radii: Vector3 = Field(default=(1.0, 1.0, 1.0), description="Semi-axes")

    @model_validator(mode="after")
    def check_radii(self) -> "SurfaceSpec":
        if self.kind is SurfaceKind.PARAMETRIC:
            raise ValueError("parametric surfaces are only available through the Python API")
        if min(self.radii) <= 0:
            raise ValueError("radii must be positive")
        if self.kind is SurfaceKind.SPHERE and len(set(self.radii)) != 1:
            raise ValueError("a sphere needs three equal radii")
        return self

    def geometry(self) -> SurfaceGeometry:
        return SurfaceGeometry(self.kind, self.center, self.radii)


class DipoleData(BaseModel):
    """Trace of a magnetic dipole field"""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["dipole"] = "dipole"
    c: Vector3 = Field(default=(0.0, 0.0, 1.0), description="Dipole moment")
    position: Vector3 = Field(default=(0.0, 0.0, 0.0), description="Dipole location")

    @model_validator(mode="after")
    def check_moment(self) -> "DipoleData":
        if not any(self.c):
            raise ValueError("dipole moment must be non-zero")
        return self


class SamplesData(BaseModel):
    """Tangential trace sampled at the collocation nodes"""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["samples"] = "samples"
    path: str = Field(..., description="CSV with columns f1_re,f1_im,f2_re,f2_im,f3_re,f3_im")


BoundaryDataSpec = Annotated[Union[DipoleData, SamplesData], Field(discriminator="kind")]


class EvaluationSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    radius: float = Field(5.0, gt=0, description="Radius of the evaluation sphere")
    count: int = Field(200, ge=1, description="Number of evaluation points")


class SolverSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: SolverPath = Field(default=SolverPath.SQUARE_LU, description="square or least-squares")
    overdetermination: float = Field(1.0, ge=1.0, description="Collocation nodes per 2N")
    collocation_count: Optional[int] = Field(None, ge=4, description="Fixed node count")


class FdSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    step: float = Field(1e-3, gt=0, description="Step for nested finite differences")
    tolerance: float = Field(1e-3, gt=0, description="Relative tolerance of nested checks")
    point_count: int = Field(20, ge=1, description="Random check points in 0.5 <= |x| <= 3")
    seed: int = Field(0, description="Seed of the check points")


class ProblemConfig(BaseModel):
    """Problem description read by every subcommand"""
    model_config = ConfigDict(extra="forbid")

    surface: SurfaceSpec = Field(default_factory=SurfaceSpec)
    medium: MediumParams = Field(default_factory=MediumParams)
    mode: ProblemMode = Field(default=ProblemMode.EXTERIOR)
    boundary_data: BoundaryDataSpec = Field(default_factory=DipoleData)
    n: Optional[int] = Field(None, ge=1, description="Source count for `solve`")
    n_list: List[int] = Field(default_factory=list, description="Source counts for `sweep`")
    aux_scale: float = Field(0.15, gt=0, description="Homothety factor of the auxiliary surface")
    evaluation: EvaluationSpec = Field(default_factory=EvaluationSpec)
    solver: SolverSpec = Field(default_factory=SolverSpec)
    output: Optional[str] = Field(None, description="CSV output path")
    checks: List[CheckName] = Field(default_factory=lambda: list(CheckName))
    fd: FdSpec = Field(default_factory=FdSpec)

    @model_validator(mode="after")
    def check_counts(self) -> "ProblemConfig":
        if any(n < 1 for n in self.n_list):
            raise ValueError("n_list entries must be >= 1")
        return self

    def sizes(self) -> List[int]:
        """Sorted distinct N values: n_list, or [n] when no list is given."""
        if self.n_list:
            return sorted(set(self.n_list))
        return [self.n] if self.n is not None else []

    def fd_config(self) -> FdCheckConfig:
        points = random_shell_points(self.fd.point_count, 0.5, 3.0, seed=self.fd.seed)
        return FdCheckConfig(
            step=self.fd.step,
            points=[tuple(float(v) for v in p) for p in points],
            tolerance=self.fd.tolerance,
        )


def _error_path(loc) -> str:
    return ".".join(str(part) for part in loc)


def load_config(path: str) -> ProblemConfig:
    """Read and schema-validate a JSON problem file."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc

    try:
        config = ProblemConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(first["msg"], field_path=_error_path(first["loc"])) from exc
    logger.debug("config loaded path=%s sizes=%s", path, config.sizes())
    return config


def resolve_problem(config: ProblemConfig) -> Tuple[WaveNumber, WaveNumberPair, BenchmarkSetup]:
    """
    Semantic validation ahead of any solve: derives the wave numbers and checks
    that the auxiliary surface, the dipole and the evaluation sphere sit on the
    sides of the boundary the mode requires.
    """
    alpha, pair = derive_wave_numbers(config.medium)
    surface = config.surface.geometry()
    mode = config.mode

    if mode is ProblemMode.EXTERIOR and not 0.0 < config.aux_scale < 1.0:
        raise ScaleError(f"exterior problems need 0 < aux_scale < 1, got {config.aux_scale}")
    if mode is ProblemMode.INTERIOR and not config.aux_scale > 1.0:
        raise ScaleError(f"interior problems need aux_scale > 1, got {config.aux_scale}")

    # exterior: singularity and sources inside, field measured outside; interior: the reverse
    wants_inside = mode is ProblemMode.EXTERIOR
    data = None
    c = position = (0.0, 0.0, 0.0)
    if isinstance(config.boundary_data, DipoleData):
        c, position = config.boundary_data.c, config.boundary_data.position
        if bool(surface.contains(np.asarray(position))) != wants_inside:
            side = "inside" if wants_inside else "outside"
            raise ConfigError(f"dipole must lie {side} the surface", field_path="boundary_data.position")
    else:
        try:
            data = BoundaryData.from_samples(config.boundary_data.path)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"unreadable samples file: {exc}", field_path="boundary_data.path") from exc

    points = sample_sphere(config.evaluation.radius, config.evaluation.count, surface.center)
    inside = surface.contains(points)
    if wants_inside and np.any(inside):
        raise ConfigError("evaluation sphere must lie outside the surface", field_path="evaluation.radius")
    if not wants_inside and not np.all(inside):
        raise ConfigError("evaluation sphere must lie inside the surface", field_path="evaluation.radius")

    setup = BenchmarkSetup(
        surface=surface,
        pair=pair,
        c=tuple(c),
        position=tuple(position),
        mode=mode,
        aux_scale=config.aux_scale,
        eval_radius=config.evaluation.radius,
        eval_count=config.evaluation.count,
        overdetermination=config.solver.overdetermination,
        collocation_count=config.solver.collocation_count,
        solver_path=config.solver.path,
        data=data,
    )
    if data is not None:
        rows = len(data.samples)
        for n in config.sizes():
            if setup.node_count(n) != rows:
                raise ConfigError(
                    f"samples file has {rows} rows but N={n} uses {setup.node_count(n)} collocation nodes; "
                    "set solver.collocation_count to the row count",
                    field_path="boundary_data.path",
                )
    return alpha, pair, setup
