import logging
import math
from typing import Callable, Dict, Optional

from pydantic import ValidationError

from core.errors import DivergenceError, OrthoDerivError, RegionError, TruncationError
from core.frac_deriv import FracMethod, FracSpec, TriangleFracSpec, w_delta_square, w_delta_triangle
from core.frac_kernel import DerivativeParams, KernelParams, derivative_kernel_oracle, kernel_closed_form
from core.hyp2var import Hyp2Kind, Hyp2Params, RegionStatus, convergence_region, evaluate
from core.ortho_deriv import SquareJacobiSpec, TriangleDerivSpec, d_delta_square, d_delta_triangle
from core.quad_oracle import integrate_kernel_region
from core.regions import region_classify
from core.triangle_basis import TriangleWeight

from .models import (
    EVAL_PARAMETERS,
    Command,
    DerivArguments,
    Domain,
    EvalRecord,
    FracDerivArguments,
    GridArguments,
    GridReport,
    GridRow,
    KernelArguments,
    KernelRecord,
    RunConfig,
    UsageError,
    VerifyArguments,
    VerifyReport,
    eval_arguments,
)
from .registry import RegistryFunction, lookup
from .report import emit, render
from .suites import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 4

PointOperator = Callable[[RegistryFunction, float, float], float]


class CommandHandlers:
    """Container for CLI command handlers; each returns the process exit code"""

    def __init__(self):
        self._commands: Dict[Command, Callable[[RunConfig], int]] = {
            Command.EVAL: self.cmd_eval,
            Command.KERNEL: self.cmd_kernel,
            Command.DERIV: self.cmd_deriv,
            Command.FRACDERIV: self.cmd_fracderiv,
            Command.VERIFY: self.cmd_verify,
        }

    def run(self, config: RunConfig) -> int:
        """Dispatch config to its command and map failures to exit codes"""
        try:
            return self._commands[config.command](config)
        except ValidationError as exc:
            logger.error(f"{config.command.value}: invalid parameters: {exc}")
            return UsageError.exit_code
        except UsageError as exc:
            logger.error(f"{config.command.value}: {exc}")
            return exc.exit_code
        except OrthoDerivError as exc:
            logger.error(f"{config.command.value} failed: {exc}")
            return exc.exit_code
        except (OverflowError, FloatingPointError, ZeroDivisionError) as exc:
            logger.error(f"{config.command.value}: numeric failure: {exc!r}")
            return DivergenceError.exit_code

    def _emit(self, config: RunConfig, record) -> None:
        emit(render(record, config.format), config.output)

    def cmd_eval(self, config: RunConfig) -> int:
        """Evaluate one two-variable hypergeometric function"""
        params = dict(config.parameters)
        kind_text = params.pop("kind", None)
        try:
            kind = Hyp2Kind(kind_text)
        except ValueError:
            raise UsageError(f"unknown function kind {kind_text!r}; "
                             f"choose one of {', '.join(k.value for k in Hyp2Kind)}") from None
        args = eval_arguments(kind).model_validate(params)
        names = EVAL_PARAMETERS[kind]
        status = convergence_region(kind, args.x, args.y)
        if status is RegionStatus.OUTSIDE:
            raise RegionError(f"({args.x}, {args.y}) is outside the {kind.value} series "
                              f"and continuation regions")
        logger.debug(f"{kind.value} at ({args.x}, {args.y}): {status.value}")
        values = tuple(getattr(args, name) for name in names)
        result = evaluate(Hyp2Params(kind, values, args.x, args.y), tol=config.tol)
        if not result.converged:
            logger.warning(f"{kind.value} at ({args.x}, {args.y}) did not reach tolerance "
                           f"{config.tol:g} after {result.terms_used} terms")
        record = EvalRecord(kind=kind.value, params=dict(zip(names, values)), x=args.x, y=args.y,
                            value=result.value, terms_used=result.terms_used,
                            err_estimate=result.err_estimate, converged=result.converged)
        self._emit(config, record)
        return EXIT_OK

    def cmd_kernel(self, config: RunConfig) -> int:
        """Closed-form kernel at (s, t), optionally checked against quadrature"""
        args = KernelArguments.model_validate(config.parameters)
        region = region_classify(args.s, args.t)
        if args.from_deriv:
            dp = DerivativeParams(args.alpha, args.beta, args.gamma, args.k, args.n, args.mu, args.nu)
            p = KernelParams.from_derivative(dp)
        else:
            dp = None
            p = KernelParams(args.a, args.b, args.c, args.d, args.e)
        value = kernel_closed_form(region, p, args.s, args.t, strict=args.strict, tol=config.tol)
        record = KernelRecord(region=region.value, params=args.supplied(), s=args.s, t=args.t, value=value)
        if args.oracle:
            if dp is not None:
                oracle = derivative_kernel_oracle(dp, args.s, args.t, args.oracle_nodes)
            else:
                oracle = integrate_kernel_region(region, p, args.s, args.t, args.oracle_nodes)
            record.oracle_value = oracle
            record.abs_diff = abs(value - oracle)
        self._emit(config, record)
        return EXIT_OK

    def cmd_deriv(self, config: RunConfig) -> int:
        """Finite-delta orthogonal derivative over an (x, y) grid"""
        args = DerivArguments.model_validate(config.parameters)
        function = lookup(args.f)
        if args.domain is Domain.SQUARE:
            spec = SquareJacobiSpec(args.alpha, args.beta, args.gamma, args.delta_exp, args.m, args.l)
            orders = (args.m, args.l)

            def operator(f, x, y):
                return d_delta_square(f, x, y, spec, args.delta, args.n_nodes)
        else:
            spec = TriangleDerivSpec(TriangleWeight(args.alpha, args.beta, args.gamma),
                                     args.k, args.n, args.delta)
            orders = (args.k, args.n - args.k)

            def operator(f, x, y):
                return d_delta_triangle(f, x, y, spec, args.n_nodes)

        reference = function.partial(*orders) if function.partial is not None else None
        self._emit(config, self._grid(Command.DERIV, args, function, operator, reference))
        return EXIT_OK

    def cmd_fracderiv(self, config: RunConfig) -> int:
        """Finite-delta fractional derivative over an (x, y) grid"""
        args = FracDerivArguments.model_validate(config.parameters)
        function = lookup(args.f)
        n_nodes = args.n_nodes or (32 if args.domain is Domain.SQUARE else 24)
        if args.domain is Domain.SQUARE:
            spec = FracSpec(args.alpha, args.beta, args.gamma, args.delta_exp, args.m, args.l,
                            args.mu, args.nu)
            method = args.method or FracMethod.KERNEL

            def operator(f, x, y):
                return w_delta_square(f, x, y, spec, args.delta, n_nodes, method, args.kappa)
        else:
            dp = DerivativeParams(args.alpha, args.beta, args.gamma, args.k, args.n, args.mu, args.nu)
            spec = TriangleFracSpec(dp, args.delta)
            method = args.method or FracMethod.WEYL

            def operator(f, x, y):
                return w_delta_triangle(f, x, y, spec, n_nodes, method, args.kappa, args.source)

        logger.info(f"fractional derivative on the {args.domain.value} by the {method.value} method")
        self._emit(config, self._grid(Command.FRACDERIV, args, function, operator, function.fractional))
        return EXIT_OK

    def _grid(self, command: Command, args: GridArguments, function: RegistryFunction,
              operator: PointOperator, reference: Optional[Callable]) -> GridReport:
        """Operator values row by row; points where it fails become NaN rows"""
        xs, ys = args.grid()
        rows = []
        for x in xs:
            for y in ys:
                try:
                    value = operator(function.func, x, y)
                except (RegionError, TruncationError) as exc:
                    logger.warning(f"point ({x}, {y}) flagged: {exc}")
                    value = math.nan
                row = GridRow(x=x, y=y, value=value)
                if reference is not None:
                    row.reference = float(reference(x, y))
                    row.abs_err = abs(value - row.reference)
                rows.append(row)
        params = {key: float(value) for key, value in args.model_dump(exclude_none=True).items()
                  if isinstance(value, (int, float)) and not isinstance(value, bool)}
        return GridReport(command=command.value, domain=args.domain.value, function=function.name,
                          params=params, rows=rows)

    def cmd_verify(self, config: RunConfig) -> int:
        """Run a verification suite; exit 4 when any check fails"""
        args = VerifyArguments.model_validate(config.parameters)
        checks = run_suite(args.suite, args.samples, args.seed, config.tol)
        failed = sum(1 for c in checks if not c.passed)
        report = VerifyReport(suite=args.suite.value, checks=checks, failed=failed, passed=failed == 0)
        self._emit(config, report)
        if failed:
            logger.error(f"{failed} of {len(checks)} checks failed in suite {args.suite.value}")
            return EXIT_VERIFY_FAILED
        return EXIT_OK
