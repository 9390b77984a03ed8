from __future__ import annotations

import argparse
import asyncio
import sys
from collections.abc import Awaitable, Callable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import NoReturn

from pydantic import ValidationError

from app.application.dto import (
    BoundsInputDTO,
    BoundsTableDTO,
    ChannelDTO,
    CurveDTO,
    ExperimentDTO,
    GridDTO,
    ModelDTO,
    PipelineDTO,
    PovmDumpDTO,
    PovmDumpInputDTO,
    ScanInputDTO,
    SimulateInputDTO,
    SquashCompareInputDTO,
    StatisticsDTO,
    VerdictDTO,
    VerifyInputDTO,
)
from app.application.exceptions import ConfigFileError, ExperimentSpecError
from app.application.ports.presenters import State
from app.application.use_cases import (
    ComputeBoundsUseCase,
    DumpPovmUseCase,
    RunExperimentUseCase,
    ScanEtaMinUseCase,
    SimulateStatisticsUseCase,
    SquashCompareUseCase,
    VerifyEntanglementUseCase,
)
from app.config import BaseConfig, get_settings
from app.config.logging import get_logger
from app.infrastructure.files import (
    emit_plot_data,
    format_problem_dump,
    load_experiments,
    load_model,
    load_statistics,
    model_from_schema,
)
from app.infrastructure.files.schemas import ModelFile
from app.interface.cli.adapters import CliPresenter
from app.interface.cli.dependencies import get_backend_factory
from app.interface.cli.render import (
    render_bounds,
    render_curve,
    render_experiment,
    render_grid,
    render_povm,
    render_statistics,
    render_verdict,
)
from app.interface.cli.utils import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    exit_code_for_presenter,
    worst_exit_code,
)

logger = get_logger(__name__)

type Handler = Callable[[argparse.Namespace, BaseConfig], Awaitable[int]]


class UsageError(Exception):
    """Command line could not be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _resend(text: str) -> int | None:
    if text.lower() in ("inf", "infinity"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("n-resend must be a positive integer or 'inf'")
    return value


def _tolerance(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1e-3:
        raise argparse.ArgumentTypeError("tolerance must be in (0, 1e-3]")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigFileError(f"Cannot write {out}: {e.strerror or e}.") from e


def _report[D](
    presenter: CliPresenter, render: Callable[[D], str], out: Path | None
) -> int:
    """Write a rendered DTO or the failure message; return the exit code."""
    if presenter.state in (State.OK, State.INCONCLUSIVE) and not isinstance(
        presenter.response, str
    ):
        _write(render(presenter.response), out)
    else:
        print(f"error: {presenter.response}", file=sys.stderr)
    return exit_code_for_presenter(presenter)


def _model(args: argparse.Namespace) -> ModelDTO:
    """Resolve the detector model from ``--model-file`` or the ``--scheme``/``--eta`` shortcut.

    Raises:
        ConfigFileError: If neither is given or they disagree.
    """
    if args.model_file is not None:
        model = load_model(args.model_file)
        if args.scheme is not None and args.scheme != model.scheme:
            raise ConfigFileError(
                f"--scheme {args.scheme} contradicts the {model.scheme} model file."
            )
        return model
    if args.scheme is None:
        raise ConfigFileError("Give --model-file or --scheme.")
    try:
        spec = ModelFile(scheme=args.scheme, spatial_modes=args.spatial_modes, eta=args.eta)
    except ValidationError as e:
        raise ConfigFileError(str(e)) from e
    return model_from_schema(spec, f"eta={args.eta:g}")


def _pipeline(args: argparse.Namespace, settings: BaseConfig) -> PipelineDTO:
    return PipelineDTO(
        cutoff=args.cutoff or settings.EVM_VERIFIER_CUTOFF,
        max_ideal_grade=getattr(args, "max_ideal_grade", None),
        renormalize=not getattr(args, "no_renormalize", False),
        extended_pair_set=getattr(args, "extended_pair_set", False),
        threads=args.threads or settings.EVM_VERIFIER_THREADS,
    )


# Trade-off curves fix omega = 0.05, r = 0.5 and p = 0.01 unless overridden.
TRADEOFF_CHANNEL = ChannelDTO(0.05, 0.5, 0.01)


def _channel(args: argparse.Namespace, defaults: ChannelDTO = ChannelDTO(0.0)) -> ChannelDTO:
    def pick(value: float | None, default: float) -> float:
        return default if value is None else value

    return ChannelDTO(
        pick(args.omega, defaults.omega),
        pick(args.loss, defaults.loss),
        pick(args.p_multi, defaults.multi_photon),
        args.n_resend,
    )


async def _simulate(args: argparse.Namespace, settings: BaseConfig) -> int:
    presenter = CliPresenter[StatisticsDTO]()
    uc = SimulateStatisticsUseCase(get_backend_factory(args.tolerance))
    await uc.execute(SimulateInputDTO(_model(args), _channel(args)), presenter)
    return _report(presenter, render_statistics, args.out)


async def _bounds(args: argparse.Namespace, settings: BaseConfig) -> int:
    if args.etas:
        if args.scheme is None:
            raise ConfigFileError("--etas needs --scheme.")
        models = tuple(
            model_from_schema(
                ModelFile(scheme=args.scheme, spatial_modes=args.spatial_modes, eta=eta),
                f"{eta:g}",
            )
            for eta in args.etas
        )
    else:
        models = (_model(args),)
    presenter = CliPresenter[BoundsTableDTO]()
    uc = ComputeBoundsUseCase(get_backend_factory(args.tolerance))
    max_grade = args.max_grade or settings.EVM_VERIFIER_BOUNDS_MAX_GRADE
    await uc.execute(BoundsInputDTO(models, max_grade, not args.no_ppt), presenter)
    return _report(presenter, render_bounds, args.out)


async def _verify(args: argparse.Namespace, settings: BaseConfig) -> int:
    model = _model(args)
    statistics = load_statistics(args.statistics, model.scheme)
    dto = VerifyInputDTO(
        model,
        statistics,
        _pipeline(args, settings),
        strict_ledger=not args.lenient_ledger,
        dump_problem=args.dump is not None,
    )
    presenter = CliPresenter[VerdictDTO]()
    await VerifyEntanglementUseCase(get_backend_factory(args.tolerance)).execute(dto, presenter)
    code = _report(presenter, render_verdict, args.out)
    if args.dump is not None and isinstance(presenter.response, VerdictDTO):
        _write(format_problem_dump(presenter.response), args.dump)
    return code


async def _scan(args: argparse.Namespace, settings: BaseConfig) -> int:
    tradeoff = args.kind == "tradeoff"
    abscissae = args.etas if tradeoff else args.omegas
    if not abscissae:
        raise ConfigFileError(f"A {args.kind} scan needs --{'etas' if tradeoff else 'omegas'}.")
    if args.scheme is None:
        raise ConfigFileError("A scan needs --scheme.")
    dto = ScanInputDTO(
        kind=args.kind,
        scheme=args.scheme,
        channel=_channel(args, TRADEOFF_CHANNEL if tradeoff else ChannelDTO(0.0)),
        abscissae=tuple(abscissae),
        spatial_modes=args.spatial_modes,
        eta_range=(args.eta_range[0], args.eta_range[1]),
        eta_h=args.eta_h,
        eta_d=args.eta_d,
        pipeline=_pipeline(args, settings),
    )
    presenter = CliPresenter[CurveDTO]()
    await ScanEtaMinUseCase(get_backend_factory(args.tolerance)).execute(dto, presenter)
    return _report(presenter, render_curve, args.out)


async def _squash_compare(args: argparse.Namespace, settings: BaseConfig) -> int:
    dto = SquashCompareInputDTO(
        model=_model(args),
        omegas=tuple(args.omegas),
        multi_photons=tuple(args.p_multis),
        loss=args.loss,
        n_resend=args.n_resend,
        baseline=args.baseline,
        pipeline=_pipeline(args, settings),
    )
    presenter = CliPresenter[GridDTO]()
    await SquashCompareUseCase(get_backend_factory(args.tolerance)).execute(dto, presenter)
    return _report(presenter, render_grid, args.out)


async def _povm_dump(args: argparse.Namespace, settings: BaseConfig) -> int:
    dto = PovmDumpInputDTO(_model(args), args.cutoff or settings.EVM_VERIFIER_CUTOFF)
    presenter = CliPresenter[PovmDumpDTO]()
    await DumpPovmUseCase(get_backend_factory(args.tolerance)).execute(dto, presenter)
    return _report(presenter, render_povm, args.out)


async def _experiment(args: argparse.Namespace, settings: BaseConfig) -> int:
    uc = RunExperimentUseCase(get_backend_factory(args.tolerance))
    codes: list[int] = []
    for dto, out in load_experiments(args.spec):
        pipeline = replace(
            dto.pipeline,
            cutoff=args.cutoff or dto.pipeline.cutoff,
            threads=args.threads or settings.EVM_VERIFIER_THREADS,
        )
        presenter = CliPresenter[ExperimentDTO]()
        await uc.execute(replace(dto, pipeline=pipeline), presenter)
        target = out if args.out is None else args.out / f"{dto.name}.csv"
        codes.append(_report(presenter, render_experiment, target))
    return worst_exit_code(codes)


async def _plot_data(args: argparse.Namespace, settings: BaseConfig) -> int:
    try:
        text = args.csv.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigFileError(f"Cannot read {args.csv}: {e.strerror or e}.") from e
    _write(emit_plot_data(text), args.out)
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--model-file", type=Path, help="YAML detector-model config")
    group.add_argument("--scheme", choices=("active", "passive"))
    group.add_argument("--eta", type=_probability, default=1.0, help="symmetric-model shortcut")
    group.add_argument("--spatial-modes", type=_positive, default=1)
    group.add_argument("--cutoff", type=int, help="EVM ideal-operator cutoff")
    group.add_argument("--tolerance", type=_tolerance, help="solver tolerance")
    group.add_argument("--threads", type=_positive, help="worker processes for grids")
    group.add_argument("--out", type=Path, help="output file (directory for 'experiment')")
    return common


def _channel_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--omega", type=_probability)
    parser.add_argument("--loss", type=_probability)
    parser.add_argument("--p-multi", type=_probability)
    parser.add_argument("--n-resend", type=_resend, default=None, help="integer or 'inf'")


def _pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-ideal-grade", type=int, help="-1 keeps measurement operators only")
    parser.add_argument("--no-renormalize", action="store_true")
    parser.add_argument("--extended-pair-set", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="evm-verifier",
        description="Entanglement verification under detector-efficiency mismatch.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="toy-channel statistics CSV")
    _channel_flags(p)
    p.set_defaults(handler=_simulate)

    p = sub.add_parser("bounds", parents=[common], help="photon-number bound tables")
    p.add_argument("--max-grade", type=int)
    p.add_argument("--etas", type=_probability, nargs="+", help="symmetric models to tabulate")
    p.add_argument("--no-ppt", action="store_true", help="drop the PPT constraint")
    p.set_defaults(handler=_bounds)

    p = sub.add_parser("verify", parents=[common], help="verify entanglement from statistics")
    p.add_argument("--statistics", type=Path, required=True, help="CSV: x, y, probability")
    p.add_argument(
        "--lenient-ledger", action="store_true", help="log ledger drift instead of failing"
    )
    p.add_argument("--dump", type=Path, help="write operators, constraints and witness")
    _pipeline_flags(p)
    p.set_defaults(handler=_verify)

    p = sub.add_parser("scan", parents=[common], help="eta_min or trade-off curves")
    p.add_argument("--kind", choices=("eta-min", "tradeoff"), default="eta-min")
    p.add_argument("--omegas", type=_probability, nargs="+")
    p.add_argument("--etas", type=_probability, nargs="+", help="eta_V grid of a trade-off")
    p.add_argument("--eta-range", type=_probability, nargs=2, default=(0.0, 1.0))
    p.add_argument("--eta-h", type=_probability, default=1.0)
    p.add_argument("--eta-d", type=_probability, default=1.0)
    _channel_flags(p)
    _pipeline_flags(p)
    p.set_defaults(handler=_scan)

    p = sub.add_parser("squash-compare", parents=[common], help="compare against a baseline")
    p.add_argument("--omegas", type=_probability, nargs="+", required=True)
    p.add_argument("--p-multis", type=_probability, nargs="+", required=True)
    p.add_argument("--loss", type=_probability, default=0.0)
    p.add_argument("--n-resend", type=_resend, default=2)
    p.add_argument("--baseline", choices=("squash", "measurement-only"), default="squash")
    _pipeline_flags(p)
    p.set_defaults(handler=_squash_compare)

    p = sub.add_parser("povm-dump", parents=[common], help="POVM elements and relation checks")
    p.set_defaults(handler=_povm_dump)

    p = sub.add_parser("experiment", parents=[common], help="run a YAML batch spec")
    p.add_argument("spec", type=Path)
    p.set_defaults(handler=_experiment)

    p = sub.add_parser("plot-data", parents=[common], help="gnuplot columns from a CSV artifact")
    p.add_argument("csv", type=Path)
    p.set_defaults(handler=_plot_data)
    return parser


async def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        settings = get_settings()
        handler: Handler = args.handler
        code = await handler(args, settings)
    except (UsageError, ValueError, ConfigFileError, ExperimentSpecError) as e:
        print(f"error: {e}", file=sys.stderr)
        logger.warning({"event": "command_rejected", "error": type(e).__name__, "reason": str(e)})
        return EXIT_CONFIG_ERROR
    logger.info({"event": "command_finished", "command": args.command, "exit_code": code})
    return code


def main(argv: Sequence[str] | None = None) -> int:
    return asyncio.run(run(argv))
