"""
Collocation assembly and solution for the quaternionic MFS.

Ansatz (exterior problem, sources y_j inside the body):

    phi_N(x) = sum_j K_{alpha1}(x - y_j) a_j      (D + alpha1) phi_N = 0
    psi_N(x) = sum_j K_{-alpha2}(x - y_j) b_j     (D - alpha2) psi_N = 0

with kernels multiplied by the coefficients from the right. Every collocation
node contributes four rows:

    [ 1/2 (Vec phi + Vec psi) x n ] . t1 = f . t1
    [ 1/2 (Vec phi + Vec psi) x n ] . t2 = f . t2
    Sc phi = g_phi   (0 for Maxwell data)
    Sc psi = g_psi   (0 for Maxwell data)

Columns: 4 per source for a_j (j = 0..N-1), then 4 per source for b_j.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg
from scipy.spatial import cKDTree

from qmfs.core.config import settings
from qmfs.core.errors import NodeSourceCollisionError, SingularSystemError, TangentialityError
from qmfs.models.enums import KernelSign, ProblemMode, SolverPath
from qmfs.numerics.biquat import Biquaternion, ComplexVector3, left_matrix, qmul_arrays
from qmfs.numerics.chiral import WaveNumberPair, chiral_dipole_field_batch, recover_EH
from qmfs.numerics.geometry import (
    SampleSet,
    SourcePool,
    SurfaceGeometry,
    make_source_pool,
    sample_sphere,
    sample_surface,
)
from qmfs.numerics.kernels import WaveNumber, as_wave_number, kernel_batch

logger = logging.getLogger(__name__)

TraceFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

PHI_SIGN = KernelSign.PLUS
PSI_SIGN = KernelSign.MINUS


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundaryData:
    """
    Tangential trace f = [E x n] on the boundary, either as a closed form
    trace(points, normals) or as samples aligned with the collocation nodes.

    scalar_trace, when given, returns the targets for (Sc phi, Sc psi) as an
    (m, 2) array; Maxwell problems leave it unset (targets zero).
    """

    trace: Optional[TraceFn] = None
    samples: Optional[np.ndarray] = None
    scalar_trace: Optional[TraceFn] = None

    def __post_init__(self) -> None:
        if (self.trace is None) == (self.samples is None):
            raise ValueError("exactly one of trace or samples must be given")

    def values(self, nodes: SampleSet) -> np.ndarray:
        if self.trace is not None:
            values = np.asarray(self.trace(nodes.points, nodes.normals), dtype=complex)
        else:
            values = np.asarray(self.samples, dtype=complex)
            if values.shape != (len(nodes), 3):
                raise ValueError(
                    f"boundary samples have shape {values.shape}, expected ({len(nodes)}, 3)"
                )
        normal_part = np.abs(np.sum(values * nodes.normals, axis=-1))
        limit = settings.tangential_tol * max(1.0, float(np.max(np.abs(values), initial=0.0)))
        if np.any(normal_part > limit):
            raise TangentialityError(
                f"boundary data has a normal component up to {normal_part.max():.3e}"
            )
        return values

    def scalar_values(self, nodes: SampleSet) -> np.ndarray:
        if self.scalar_trace is None:
            return np.zeros((len(nodes), 2), dtype=complex)
        return np.asarray(self.scalar_trace(nodes.points, nodes.normals), dtype=complex)

    @classmethod
    def from_dipole(
        cls,
        pair: WaveNumberPair,
        c: Sequence[float],
        position: Sequence[float] = (0.0, 0.0, 0.0),
    ) -> "BoundaryData":
        c = np.asarray(c, dtype=float)
        position = np.asarray(position, dtype=float)

        def trace(points: np.ndarray, normals: np.ndarray) -> np.ndarray:
            e_field, _ = chiral_dipole_field_batch(pair, c, points, position)
            return np.cross(e_field, normals)

        return cls(trace=trace)

    @classmethod
    def from_ansatz(cls, ansatz: "MfsAnsatz") -> "BoundaryData":
        """Data generated by an ansatz itself (manufactured solutions)."""

        def trace(points: np.ndarray, normals: np.ndarray) -> np.ndarray:
            phi, psi = _potentials(ansatz, points)
            return 0.5 * np.cross(phi[:, 1:] + psi[:, 1:], normals)

        def scalar_trace(points: np.ndarray, normals: np.ndarray) -> np.ndarray:
            phi, psi = _potentials(ansatz, points)
            return np.stack([phi[:, 0], psi[:, 0]], axis=-1)

        return cls(trace=trace, scalar_trace=scalar_trace)

    @classmethod
    def from_samples(cls, path: str) -> "BoundaryData":
        """CSV with columns f1_re, f1_im, f2_re, f2_im, f3_re, f3_im, one row per node."""
        frame = pd.read_csv(path, float_precision="round_trip")
        values = np.stack(
            [frame[f"f{k}_re"].to_numpy() + 1j * frame[f"f{k}_im"].to_numpy() for k in (1, 2, 3)],
            axis=-1,
        )
        return cls(samples=values)


@dataclass(frozen=True, eq=False)
class MfsAnsatz:
    pool1: SourcePool
    pool2: SourcePool
    pair: WaveNumberPair
    a: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.pool1.count != self.pool2.count:
            raise ValueError("both source pools must have the same size")
        for name in ("a", "b"):
            value = getattr(self, name)
            if value is not None:
                value = np.asarray(value, dtype=complex)
                if value.shape != (self.count, 4):
                    raise ValueError(f"coefficients {name} must have shape ({self.count}, 4)")
                object.__setattr__(self, name, value)

    @property
    def count(self) -> int:
        return self.pool1.count

    @property
    def is_solved(self) -> bool:
        return self.a is not None and self.b is not None

    def with_coefficients(self, a: np.ndarray, b: np.ndarray) -> "MfsAnsatz":
        return replace(self, a=a, b=b)

    def coefficient_vector(self) -> np.ndarray:
        return np.concatenate([self.a.reshape(-1), self.b.reshape(-1)])

    @classmethod
    def on_pool(cls, pool: SourcePool, pair: WaveNumberPair) -> "MfsAnsatz":
        return cls(pool1=pool, pool2=pool, pair=pair)


@dataclass(frozen=True, eq=False)
class CollocationSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    ansatz: MfsAnsatz
    node_count: int

    @property
    def is_square(self) -> bool:
        return self.matrix.shape[0] == self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class SolveReport:
    coefficients: MfsAnsatz
    residual_norm: float
    condition_estimate: float
    solver_path: SolverPath


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _check_separation(nodes: SampleSet, ansatz: MfsAnsatz, scale: float) -> None:
    limit = settings.collision_tol * scale
    for pool in (ansatz.pool1, ansatz.pool2):
        gaps, _ = cKDTree(pool.points).query(nodes.points)
        if gaps.min() <= limit:
            raise NodeSourceCollisionError(
                f"collocation node within {gaps.min():.3e} of a source (limit {limit:.3e})"
            )


def _row_block(nodes: SampleSet, ansatz: MfsAnsatz, rows: slice) -> np.ndarray:
    points = nodes.points[rows]
    normals = nodes.normals[rows]
    frames = (nodes.tangents1[rows], nodes.tangents2[rows])
    n_nodes, n_sources = len(points), ansatz.count

    block = np.zeros((n_nodes, 4, 8 * n_sources), dtype=complex)
    pools = (
        (ansatz.pool1, ansatz.pair.alpha1, PHI_SIGN, 0),
        (ansatz.pool2, ansatz.pair.alpha2, PSI_SIGN, 1),
    )
    for pool, alpha, sign, part in pools:
        kernels = kernel_batch(alpha, sign, points[:, None, :] - pool.points[None, :, :])
        # (nodes, sources, 4, 4): components of K·e_k
        products = left_matrix(kernels)
        vector_rows = products[:, :, 1:, :]
        columns = slice(4 * n_sources * part, 4 * n_sources * (part + 1))
        for row, tangent in enumerate(frames):
            # (v x n) . t == v . (n x t)
            weight = 0.5 * np.cross(normals, tangent)
            coeffs = np.einsum("mc,mjck->mjk", weight, vector_rows)
            block[:, row, columns] = coeffs.reshape(n_nodes, -1)
        block[:, 2 + part, columns] = products[:, :, 0, :].reshape(n_nodes, -1)
    return block.reshape(4 * n_nodes, 8 * n_sources)


def assemble(
    nodes: SampleSet,
    ansatz: MfsAnsatz,
    data: BoundaryData,
    scale: Optional[float] = None,
    workers: Optional[int] = None,
) -> CollocationSystem:
    """Dense (4M) x (8N) collocation system for the given nodes and source pools."""
    if scale is None:
        scale = max(1.0, 0.5 * float(np.ptp(nodes.points, axis=0).max()))
    _check_separation(nodes, ansatz, scale)

    f_values = data.values(nodes)
    scalar_targets = data.scalar_values(nodes)
    rhs = np.zeros((len(nodes), 4), dtype=complex)
    rhs[:, 0] = np.sum(f_values * nodes.tangents1, axis=-1)
    rhs[:, 1] = np.sum(f_values * nodes.tangents2, axis=-1)
    rhs[:, 2:] = scalar_targets

    workers = settings.max_workers if workers is None else workers
    if workers > 1 and len(nodes) > workers:
        bounds = np.linspace(0, len(nodes), workers + 1, dtype=int)
        slices = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda rows: _row_block(nodes, ansatz, rows), slices))
        matrix = np.vstack(blocks)
    else:
        matrix = _row_block(nodes, ansatz, slice(None))

    logger.debug("assembled shape=%s nodes=%d sources=%d", matrix.shape, len(nodes), ansatz.count)
    return CollocationSystem(matrix=matrix, rhs=rhs.reshape(-1), ansatz=ansatz, node_count=len(nodes))


# ---------------------------------------------------------------------------
# Solve
# ---------------------------------------------------------------------------

def _least_squares(matrix: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, float]:
    solution, _, rank, singular_values = scipy.linalg.lstsq(matrix, rhs)
    if rank < matrix.shape[1]:
        raise SingularSystemError(
            f"collocation matrix has numerical rank {rank} < {matrix.shape[1]} unknowns"
        )
    condition = float(singular_values[0] / singular_values[-1])
    return solution, condition


def solve(system: CollocationSystem, path: Optional[SolverPath] = None) -> SolveReport:
    """LU for square, well-conditioned systems; least squares otherwise."""
    matrix, rhs = system.matrix, system.rhs
    requested = SolverPath(path) if path is not None else SolverPath.SQUARE_LU

    if system.is_square and requested is SolverPath.SQUARE_LU:
        condition = float(np.linalg.cond(matrix))
        if np.isfinite(condition) and condition <= settings.condition_limit:
            solution = scipy.linalg.lu_solve(scipy.linalg.lu_factor(matrix), rhs)
            solver_path = SolverPath.SQUARE_LU
        else:
            logger.warning(
                "condition estimate %.3e above limit %.1e, switching to least squares",
                condition,
                settings.condition_limit,
            )
            solution, condition = _least_squares(matrix, rhs)
            solver_path = SolverPath.LEAST_SQUARES
    else:
        solution, condition = _least_squares(matrix, rhs)
        solver_path = SolverPath.LEAST_SQUARES

    residual = float(np.max(np.abs(matrix @ solution - rhs), initial=0.0))
    n_sources = system.ansatz.count
    a = solution[: 4 * n_sources].reshape(n_sources, 4)
    b = solution[4 * n_sources:].reshape(n_sources, 4)
    logger.debug("solved path=%s cond=%.3e residual=%.3e", solver_path.value, condition, residual)
    return SolveReport(
        coefficients=system.ansatz.with_coefficients(a, b),
        residual_norm=residual,
        condition_estimate=condition,
        solver_path=solver_path,
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _potentials(ansatz: MfsAnsatz, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=float)
    k_phi = kernel_batch(ansatz.pair.alpha1, PHI_SIGN, points[:, None, :] - ansatz.pool1.points[None])
    k_psi = kernel_batch(ansatz.pair.alpha2, PSI_SIGN, points[:, None, :] - ansatz.pool2.points[None])
    # kernel on the left, coefficient on the right
    phi = qmul_arrays(k_phi, ansatz.a[None]).sum(axis=1)
    psi = qmul_arrays(k_psi, ansatz.b[None]).sum(axis=1)
    return phi, psi


def evaluate_batch(
    ansatz: MfsAnsatz, points: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """E, H (P, 3) and the full quaternions phi, psi (P, 4) at many points."""
    if not ansatz.is_solved:
        raise ValueError("ansatz has no coefficients")
    phi, psi = _potentials(ansatz, points)
    e_field = 0.5 * (phi[:, 1:] + psi[:, 1:])
    h_field = (phi[:, 1:] - psi[:, 1:]) / 2j
    return e_field, h_field, phi, psi


def evaluate(
    ansatz: MfsAnsatz, x: Sequence[float]
) -> Tuple[ComplexVector3, ComplexVector3, Biquaternion, Biquaternion]:
    _, _, phi, psi = evaluate_batch(ansatz, np.asarray(x, dtype=float)[None, :])
    phi_q = Biquaternion.from_array(phi[0])
    psi_q = Biquaternion.from_array(psi[0])
    # scalar parts are reported through phi/psi, E and H come from the vector parts
    E, H = recover_EH(phi_q.vec.to_biquaternion(), psi_q.vec.to_biquaternion())
    return E, H, phi_q, psi_q


def boundary_residual(ansatz: MfsAnsatz, data: BoundaryData, check_nodes: SampleSet) -> float:
    """max over nodes of |1/2[(phi+psi) x n] - f| + |Sc phi - g_phi| + |Sc psi - g_psi|."""
    _, _, phi, psi = evaluate_batch(ansatz, check_nodes.points)
    tangential = 0.5 * np.cross(phi[:, 1:] + psi[:, 1:], check_nodes.normals)
    f_values = data.values(check_nodes)
    targets = data.scalar_values(check_nodes)
    per_node = (
        np.linalg.norm(tangential - f_values, axis=-1)
        + np.abs(phi[:, 0] - targets[:, 0])
        + np.abs(psi[:, 0] - targets[:, 1])
    )
    return float(per_node.max(initial=0.0))


# ---------------------------------------------------------------------------
# Dipole benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BenchmarkSetup:
    surface: SurfaceGeometry
    pair: WaveNumberPair
    c: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    position: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    mode: ProblemMode = ProblemMode.EXTERIOR
    aux_scale: float = 0.15
    eval_radius: float = 5.0
    eval_count: int = 200
    overdetermination: float = 1.0
    collocation_count: Optional[int] = None
    solver_path: SolverPath = SolverPath.SQUARE_LU
    data: Optional[BoundaryData] = None

    def node_count(self, n: int) -> int:
        if self.collocation_count is not None:
            return self.collocation_count
        return max(4, int(math.ceil(2 * n * self.overdetermination)))


@dataclass(frozen=True, eq=False)
class BenchmarkResult:
    n: int
    err_e: float
    err_h: float
    report: SolveReport
    wall_time_ms: float


def run_benchmark(setup: BenchmarkSetup, n: int) -> BenchmarkResult:
    """Solve one problem of size N and compare against the exact dipole field."""
    started = time.perf_counter()
    nodes = sample_surface(setup.surface, setup.node_count(n))
    pool = make_source_pool(setup.surface, ProblemMode(setup.mode).source_side, setup.aux_scale, n)
    ansatz = MfsAnsatz.on_pool(pool, setup.pair)

    data = setup.data or BoundaryData.from_dipole(setup.pair, setup.c, setup.position)
    system = assemble(nodes, ansatz, data, scale=setup.surface.scale)
    report = solve(system, setup.solver_path)

    err_e = err_h = float("nan")
    if setup.data is None:
        points = sample_sphere(setup.eval_radius, setup.eval_count, setup.surface.center)
        e_approx, h_approx, _, _ = evaluate_batch(report.coefficients, points)
        e_exact, h_exact = chiral_dipole_field_batch(
            setup.pair, np.asarray(setup.c, float), points, np.asarray(setup.position, float)
        )
        err_e = float(np.max(np.abs(e_approx - e_exact)))
        err_h = float(np.max(np.abs(h_approx - h_exact)))

    wall_ms = (time.perf_counter() - started) * 1000.0
    logger.info(
        "solved N=%d path=%s cond=%.3e residual=%.3e errE=%.3e errH=%.3e wall_ms=%.1f",
        n,
        report.solver_path.value,
        report.condition_estimate,
        report.residual_norm,
        err_e,
        err_h,
        wall_ms,
    )
    return BenchmarkResult(n=n, err_e=err_e, err_h=err_h, report=report, wall_time_ms=wall_ms)


def solve_dipole_benchmark(
    N: int,
    alpha: WaveNumber = WaveNumber(1.0),
    c: Sequence[float] = (0.0, 0.0, 1.0),
    aux_scale: float = 0.15,
    eval_radius: float = 5.0,
    eval_count: int = 200,
) -> Tuple[float, float, SolveReport]:
    """Achiral magnetic dipole at the origin, unit sphere boundary, sources on a smaller sphere."""
    alpha = as_wave_number(alpha)
    setup = BenchmarkSetup(
        surface=SurfaceGeometry.sphere(1.0),
        pair=WaveNumberPair(alpha, alpha),
        c=tuple(c),
        aux_scale=aux_scale,
        eval_radius=eval_radius,
        eval_count=eval_count,
    )
    result = run_benchmark(setup, N)
    return result.err_e, result.err_h, result.report
