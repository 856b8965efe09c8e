"""
Command-line entry point.

Handlers only validate input, delegate to the pipeline / analyzers and map
errors to exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .analyzers import ClusterAnalyzer, CorrelationAnalyzer, KpiRepository, OrdinationAnalyzer
from .analyzers.correlation_analyzer import PUBLISHED_TOLERANCE
from .config import Settings, get_settings
from .dataset_init import export_datasets
from .errors import KpiError, UnknownDataset
from .models import (
    CaMap, DatasetName, Linkage, Metric, MetricKind, PipelineConfig, Report, Stage,
    StandardizeMode, StandardizeSpec, ZeroVariancePolicy,
)
from .pipeline import load_frame, run_pipeline, write_files
from .svg_renderer import render_series

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage problems as exceptions instead of exiting with 2"""

    def error(self, message: str):
        raise UsageError(message)


def _dataset_options() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)
    source = parent.add_mutually_exclusive_group()
    source.add_argument("--input", help="KPI CSV file")
    source.add_argument("--builtin", help="builtin dataset name (see 'datasets')")
    parent.add_argument("--standardize", choices=[mode.value for mode in StandardizeMode])
    parent.add_argument("--zero-variance", choices=[policy.value for policy in ZeroVariancePolicy])
    parent.add_argument("--ca-map", choices=[joint_map.value for joint_map in CaMap])
    parent.add_argument("--out", help="output directory")
    parent.add_argument("--format", help="comma separated subset of json,csv,svg")
    return parent


def _analysis_options() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)
    parent.add_argument("--metric", choices=[kind.value for kind in MetricKind])
    parent.add_argument("--power-p", type=float)
    parent.add_argument("--power-r", type=float)
    parent.add_argument("--linkage", choices=[linkage.value for linkage in Linkage])
    parent.add_argument("--k", type=int)
    parent.add_argument("--dim", type=int)
    parent.add_argument("--factors", type=int)
    return parent


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="kpistat", description="Statistical analysis of network QoS KPIs")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    dataset, analysis = _dataset_options(), _analysis_options()
    commands.add_parser("correlate", parents=[dataset], help="correlation matrix with p-values")
    commands.add_parser("cluster", parents=[dataset, analysis], help="hierarchical clustering")
    commands.add_parser("mds", parents=[dataset, analysis], help="classical multidimensional scaling")
    commands.add_parser("ca", parents=[dataset], help="correspondence analysis")
    commands.add_parser("fa", parents=[dataset, analysis], help="maximum-likelihood factor analysis")
    commands.add_parser("pipeline", parents=[dataset, analysis], help="run every analysis")

    datasets = commands.add_parser("datasets", help="list builtin datasets")
    datasets.add_argument("--export", metavar="DIR", help="write the builtin CSV files to DIR")

    series = commands.add_parser("series", parents=[dataset], help="time-series plot of one KPI")
    series.add_argument("--variable", required=True, help="variable label")
    return parser


def _option(args: argparse.Namespace, name: str, fallback):
    value = getattr(args, name, None)
    return fallback if value is None else value


def build_config(args: argparse.Namespace, settings: Settings, stages: List[Stage]) -> PipelineConfig:
    """CLI flags override settings from the environment"""
    if args.input is None and args.builtin is None:
        raise UsageError("one of --input or --builtin is required")
    builtin = None
    if args.builtin is not None:
        try:
            builtin = DatasetName(args.builtin)
        except ValueError:
            raise UnknownDataset(args.builtin)

    metric_kind = MetricKind(_option(args, "metric", settings.metric))
    metric = Metric(kind=metric_kind)
    if metric_kind == MetricKind.POWER or getattr(args, "power_p", None) is not None \
            or getattr(args, "power_r", None) is not None:
        metric = Metric(kind=metric_kind, p=getattr(args, "power_p", None), r=getattr(args, "power_r", None))

    formats = settings.formats
    if args.format is not None:
        formats = Settings(formats=args.format).formats

    return PipelineConfig(
        input_path=args.input,
        builtin=builtin,
        standardize=StandardizeSpec(
            mode=_option(args, "standardize", settings.standardize),
            zero_variance_policy=_option(args, "zero_variance", settings.zero_variance),
        ),
        metric=metric,
        linkage=_option(args, "linkage", settings.linkage),
        k_clusters=_option(args, "k", settings.k),
        mds_dim=_option(args, "dim", settings.dim),
        fa_factors=_option(args, "factors", settings.factors),
        outputs=_option(args, "out", settings.output_dir),
        formats=formats,
        stages=stages,
        ca_map=_option(args, "ca_map", settings.ca_map),
    )


def _print_correlation(report: Report) -> None:
    print(CorrelationAnalyzer.to_table_text(report.correlation), end="")
    if report.config.builtin is None:
        return
    published = KpiRepository.dataset_info(report.config.builtin).published_correlations
    if not published:
        return
    discrepancies = CorrelationAnalyzer.compare_published(report.correlation, published)
    print(f"published table: {len(published) - len(discrepancies)} of {len(published)} cells "
          f"within {PUBLISHED_TOLERANCE:g}")
    for cell in discrepancies:
        print(f"  {cell.row} / {cell.column}: published {cell.published:.7f}, "
              f"computed {cell.computed:.7f}, difference {cell.difference:+.7f}")


def _print_clusters(report: Report) -> None:
    for index, members in enumerate(ClusterAnalyzer.clusters(report.clustering.partition)):
        print(f"cluster {index}: {', '.join(members)}")


def _print_embedding(report: Report) -> None:
    embedding = report.embedding
    print(f"cumulative proportion (first two dimensions): {embedding.proportion(2):.4f}")
    for m, value in enumerate(embedding.stress_by_dim, start=1):
        print(f"stress dim {m}: {value:.6f}")


def _print_ca(report: Report) -> None:
    ca = report.ca
    print(f"total inertia: {ca.total_inertia:.6g}")
    for row, column in OrdinationAnalyzer.nearest_columns(ca, joint_map=report.config.ca_map).items():
        print(f"{row} -> {column}")


def _print_factors(report: Report) -> None:
    model = report.factors
    print(f"converged: {model.converged} after {model.iterations} iterations")
    for label, row, omega in zip(model.variable_labels, model.loadings, model.uniquenesses):
        print(f"{label}: " + " ".join(f"{value:8.4f}" for value in row) + f"  uniqueness {omega:.4f}")


def _print_narrative(report: Report) -> None:
    for finding in report.narrative:
        print(finding.message)


STAGE_COMMANDS = {
    "correlate": ([Stage.CORRELATION], _print_correlation),
    "cluster": ([Stage.CLUSTERING], _print_clusters),
    "mds": ([Stage.MDS], _print_embedding),
    "ca": ([Stage.CA], _print_ca),
    "fa": ([Stage.FACTOR_ANALYSIS], _print_factors),
    "pipeline": (list(Stage), _print_narrative),
}


def list_datasets(args: argparse.Namespace) -> int:
    if args.export:
        for path in export_datasets(args.export):
            print(path)
        return EXIT_OK
    for info in KpiRepository.list_datasets():
        print(f"{info.name.value}: {info.title} ({info.n_samples} samples x {info.n_variables} variables)")
        for alias, target in info.aliases.items():
            print(f"  alias: {alias} -> {target}")
        for note in info.notes:
            print(f"  note: {note}")
    return EXIT_OK


def plot_series(args: argparse.Namespace, settings: Settings) -> int:
    config = build_config(args, settings, [])
    frame = load_frame(config)
    path, = write_files(Path(config.outputs), {"series.svg": render_series(frame, args.variable)})
    print(path)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings = get_settings()
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level, logging.INFO),
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        if args.command == "datasets":
            return list_datasets(args)
        if args.command == "series":
            return plot_series(args, settings)

        stages, show = STAGE_COMMANDS[args.command]
        report = run_pipeline(build_config(args, settings, stages))
        show(report)
        return EXIT_OK
    except (UsageError, ValidationError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KpiError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
