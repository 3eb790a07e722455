from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from qmfs.models.enums import SolverPath
from qmfs.numerics.solver import BenchmarkResult

CSV_COLUMNS: List[str] = ["N", "errE", "errH", "residual", "cond", "wall_ms"]


def format_error(value: float) -> str:
    """0.334E-03 style: mantissa in [0.1, 1), three digits, two-digit exponent."""
    if value != value:
        return "nan"
    if value == 0:
        return "0.000E+00"
    mantissa, exponent = f"{value:.2E}".split("E")
    shifted = float(mantissa) / 10.0
    return f"{shifted:.3f}E{int(exponent) + 1:+03d}"


class ResultRecord(BaseModel):
    """One solve; mirrors the N | error E | error H table plus diagnostics"""
    n: int = Field(..., ge=1, description="Sources per pool")
    err_e: float = Field(..., description="Max abs error of E on the evaluation sphere")
    err_h: float = Field(..., description="Max abs error of H on the evaluation sphere")
    residual_norm: float = Field(..., ge=0, description="Max abs residual of the linear system")
    condition_estimate: float = Field(..., description="2-norm condition number estimate")
    solver_path: SolverPath
    wall_time_ms: float = Field(..., ge=0)
    config: Dict[str, Any] = Field(default_factory=dict, description="Problem config echo")

    @classmethod
    def from_result(cls, result: BenchmarkResult, config: Optional[Dict[str, Any]] = None) -> "ResultRecord":
        return cls(
            n=result.n,
            err_e=result.err_e,
            err_h=result.err_h,
            residual_norm=result.report.residual_norm,
            condition_estimate=result.report.condition_estimate,
            solver_path=result.report.solver_path,
            wall_time_ms=result.wall_time_ms,
            config=config or {},
        )

    def csv_row(self, deterministic: bool = True) -> Dict[str, Any]:
        return {
            "N": self.n,
            "errE": repr(self.err_e),
            "errH": repr(self.err_h),
            "residual": repr(self.residual_norm),
            "cond": repr(self.condition_estimate),
            "wall_ms": "" if deterministic else repr(self.wall_time_ms),
        }

    def table_row(self) -> str:
        return f"{self.n:>5d}  {format_error(self.err_e):>12s}  {format_error(self.err_h):>12s}"
