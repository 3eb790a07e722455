import enum


class KernelSign(str, enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def factor(self) -> int:
        return 1 if self is KernelSign.PLUS else -1

    @property
    def opposite(self) -> "KernelSign":
        return KernelSign.MINUS if self is KernelSign.PLUS else KernelSign.PLUS


class SurfaceKind(str, enum.Enum):
    SPHERE = "sphere"
    ELLIPSOID = "ellipsoid"
    PARAMETRIC = "parametric"


class PoolSide(str, enum.Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"


class ProblemMode(str, enum.Enum):
    EXTERIOR = "exterior"
    INTERIOR = "interior"

    @property
    def source_side(self) -> PoolSide:
        # exterior problems carry their sources inside the body and vice versa
        return PoolSide.INTERIOR if self is ProblemMode.EXTERIOR else PoolSide.EXTERIOR


class SolverPath(str, enum.Enum):
    SQUARE_LU = "square"
    LEAST_SQUARES = "least-squares"


class BoundaryDataKind(str, enum.Enum):
    DIPOLE = "dipole"
    SAMPLES = "samples"


class CheckName(str, enum.Enum):
    FACTORIZATION = "factorization"
    KERNEL_ANNIHILATION = "kernel_annihilation"
    MOISIL_THEODORESCO = "moisil_theodoresco"
    PROJECTIONS = "projections"
    DIAGONALIZATION = "diagonalization"
    CAUCHY = "cauchy"
    RADIATION = "radiation"
