from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, ConfigDict, Field, create_model, model_validator

from core.config import DECAY_RATE, DEFAULT_TOL, ORACLE_NODES
from core.frac_deriv import FracMethod, KernelSource
from core.hyp2var import Hyp2Kind

STRICT = ConfigDict(extra="forbid", allow_inf_nan=False)


class UsageError(Exception):
    """Malformed command line or configuration file"""
    exit_code = 1


class Command(Enum):
    """CLI commands"""
    EVAL = "eval"
    KERNEL = "kernel"
    DERIV = "deriv"
    FRACDERIV = "fracderiv"
    VERIFY = "verify"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


class Domain(Enum):
    """Sampling domain of the derivative operators"""
    SQUARE = "square"
    TRIANGLE = "triangle"


class Suite(Enum):
    """Verification suites run by `verify`"""
    BIORTHO = "biortho"
    KERNELS = "kernels"
    BOUNDARY = "boundary"
    SYMMETRY = "symmetry"
    PDE = "pde"
    CONTINUATION = "continuation"
    FRACDERIV_CONVERGENCE = "fracderiv-convergence"
    ALL = "all"


class RunConfig(BaseModel):
    """One CLI invocation after flags and the config file are merged"""
    model_config = STRICT

    command: Command
    parameters: Dict[str, str] = Field(default_factory=dict)
    output: Optional[str] = Field(default=None, description="Report path; stdout when omitted")
    format: OutputFormat = OutputFormat.JSON
    tol: float = Field(default=DEFAULT_TOL, gt=0.0)


# --- Command arguments (parsed from RunConfig.parameters) -------------------

EVAL_PARAMETERS: Dict[Hyp2Kind, Tuple[str, ...]] = {
    Hyp2Kind.F1: ("a", "b1", "b2", "c"),
    Hyp2Kind.F2: ("a", "b1", "b2", "c1", "c2"),
    Hyp2Kind.F3: ("a1", "a2", "b1", "b2", "c"),
    Hyp2Kind.F3EXT: ("a1", "a2", "b1", "b2", "c", "d1", "d2"),
    Hyp2Kind.H2: ("a", "b1", "b2", "c1", "c2"),
    Hyp2Kind.FP: ("a", "b1", "b2", "c1", "c2"),
    Hyp2Kind.FQ: ("a", "b1", "b2", "c1", "c2"),
    Hyp2Kind.FPR: ("a", "b1", "b2", "c1", "c2"),
}


@lru_cache(maxsize=None)
def eval_arguments(kind: Hyp2Kind) -> Type[BaseModel]:
    """Model requiring exactly the parameters of kind plus x and y"""
    fields = {name: (float, ...) for name in EVAL_PARAMETERS[kind] + ("x", "y")}
    return create_model(f"{kind.name}Arguments", __config__=STRICT, **fields)


RAW_KERNEL_KEYS = ("a", "b", "c", "d", "e")
DERIVATIVE_KEYS = ("alpha", "beta", "gamma", "k", "n", "mu", "nu")


class KernelArguments(BaseModel):
    model_config = STRICT

    s: float
    t: float
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    d: Optional[float] = None
    e: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    k: Optional[int] = None
    n: Optional[int] = None
    mu: Optional[float] = None
    nu: Optional[float] = None
    from_deriv: bool = False
    oracle: bool = False
    strict: bool = False
    oracle_nodes: int = Field(default=ORACLE_NODES, ge=4)

    @model_validator(mode="after")
    def one_style(self):
        wanted, other = ((DERIVATIVE_KEYS, RAW_KERNEL_KEYS) if self.from_deriv
                         else (RAW_KERNEL_KEYS, DERIVATIVE_KEYS))
        missing = [key for key in wanted if getattr(self, key) is None]
        mixed = [key for key in other if getattr(self, key) is not None]
        if missing:
            raise ValueError(f"missing kernel parameters: {', '.join(missing)}")
        if mixed:
            raise ValueError(f"parameters {', '.join(mixed)} belong to the other "
                             f"parameterization (use --from-deriv for alpha..nu)")
        return self

    def supplied(self) -> Dict[str, float]:
        keys = DERIVATIVE_KEYS if self.from_deriv else RAW_KERNEL_KEYS
        return {key: getattr(self, key) for key in keys}


class GridArguments(BaseModel):
    """Grid, test function and weight shared by `deriv` and `fracderiv`"""
    model_config = STRICT

    domain: Domain
    f: str = Field(min_length=1)
    x0: float
    x1: float
    nx: int = Field(ge=1)
    y0: float
    y1: float
    ny: int = Field(ge=1)
    delta: float = Field(gt=0.0)
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta_exp: float = 0.0
    m: Optional[int] = None
    l: Optional[int] = None
    k: Optional[int] = None
    n: Optional[int] = None
    n_nodes: Optional[int] = Field(default=None, ge=2)

    @model_validator(mode="after")
    def orders_match_domain(self):
        if self.domain is Domain.SQUARE:
            wanted, other = ("m", "l"), ("k", "n")
        else:
            wanted, other = ("k", "n"), ("m", "l", "delta_exp")
        missing = [key for key in wanted if getattr(self, key) is None]
        if missing:
            raise ValueError(f"{self.domain.value} domain needs {', '.join(missing)}")
        extra = [key for key in other if key in self.model_fields_set]
        if extra:
            raise ValueError(f"{', '.join(extra)} not used on the {self.domain.value} domain")
        return self

    def grid(self) -> Tuple[List[float], List[float]]:
        def axis(lo, hi, count):
            if count == 1:
                return [lo]
            return [lo + (hi - lo) * i / (count - 1) for i in range(count)]
        return axis(self.x0, self.x1, self.nx), axis(self.y0, self.y1, self.ny)


class DerivArguments(GridArguments):
    """Integer-order derivative over a grid; the order and weight flags live on GridArguments"""


class FracDerivArguments(GridArguments):
    mu: float
    nu: float
    method: Optional[FracMethod] = None
    source: KernelSource = KernelSource.CLOSED
    kappa: float = Field(default=DECAY_RATE, gt=0.0)


class VerifyArguments(BaseModel):
    model_config = STRICT

    suite: Suite
    samples: int = Field(default=20, ge=1, le=50)
    seed: int = 20240611


# --- Records ---------------------------------------------------------------

class EvalRecord(BaseModel):
    kind: str
    params: Dict[str, float]
    x: float
    y: float
    value: float
    terms_used: int
    err_estimate: float
    converged: bool


class KernelRecord(BaseModel):
    region: str
    params: Dict[str, float]
    s: float
    t: float
    value: float
    oracle_value: Optional[float] = None
    abs_diff: Optional[float] = None


class GridRow(BaseModel):
    x: float
    y: float
    value: float
    reference: Optional[float] = None
    abs_err: Optional[float] = None


class GridReport(BaseModel):
    command: str
    domain: str
    function: str
    params: Dict[str, float]
    rows: List[GridRow]


class CheckRecord(BaseModel):
    name: str
    measured: float
    tolerance: float
    passed: bool = Field(serialization_alias="pass")


class VerifyReport(BaseModel):
    suite: str
    checks: List[CheckRecord]
    failed: int
    passed: bool = Field(serialization_alias="pass")
