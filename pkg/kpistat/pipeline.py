"""
End-to-end analysis run: standardize, correlate, cluster, scale, CA and
factor analysis, then write the requested report files.
"""
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional

from .analyzers import (
    ClusterAnalyzer, CorrelationAnalyzer, DistanceAnalyzer, FactorAnalyzer, KpiRepository,
    OrdinationAnalyzer,
)
from .errors import DomainError, InputNotFound, KpiError, StageError
from .models import (
    CaMap, CaResult, ClusterResult, CorrelationResult, Embedding, Finding, KpiFrame, OutputFormat,
    PipelineConfig, Report, Stage, StandardizeMode, StandardizeSpec,
)
from .svg_renderer import render_dendrogram, render_scatter

logger = logging.getLogger(__name__)

CLOSE_CORRELATION = 0.6
MDS_REFERENCE_BAND = 0.02
# stages that read the standardized frame; CA reads the raw table
STANDARDIZED_STAGES = {Stage.CORRELATION, Stage.CLUSTERING, Stage.MDS, Stage.FACTOR_ANALYSIS}


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Qualify any analysis error raised inside with the stage name"""
    logger.info("Stage '%s' started", name)
    try:
        yield
    except StageError:
        raise
    except KpiError as e:
        logger.error("Stage '%s' failed: %s", name, e.detail)
        raise StageError(name, e) from e
    logger.info("Stage '%s' finished", name)


def load_frame(config: PipelineConfig) -> KpiFrame:
    if config.builtin is not None:
        return KpiRepository.builtin_dataset(config.builtin)
    path = Path(config.input_path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputNotFound(str(path))
    except (OSError, UnicodeDecodeError) as e:
        raise InputNotFound(str(path), str(e))
    return KpiRepository.load_csv(text)


def check_config(config: PipelineConfig, n_samples: int) -> None:
    """k_clusters <= n and mds_dim <= n - 1, checked for the stages that use them"""
    if Stage.CLUSTERING in config.stages and config.k_clusters > n_samples:
        raise DomainError(f"k_clusters ({config.k_clusters}) exceeds the number of samples ({n_samples})")
    if Stage.MDS in config.stages and config.mds_dim > n_samples - 1:
        raise DomainError(f"mds_dim ({config.mds_dim}) must be at most n_samples - 1 ({n_samples - 1})")


def build_narrative(
    correlation: Optional[CorrelationResult],
    clustering: Optional[ClusterResult],
    embedding: Optional[Embedding],
    ca: Optional[CaResult],
    ca_map: CaMap = CaMap.COLUMN_PRINCIPAL,
) -> List[Finding]:
    findings: List[Finding] = []
    if ca is not None:
        for row, column in OrdinationAnalyzer.nearest_columns(ca, joint_map=ca_map).items():
            findings.append(Finding(
                kind="ca_association",
                message=f"{row} is dominantly associated with {column}",
                labels=[row, column],
            ))
    if correlation is not None:
        labels = correlation.variable_labels
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                r = correlation.r[i][j]
                if r > CLOSE_CORRELATION:
                    findings.append(Finding(
                        kind="close_correlation",
                        message=f"{labels[i]} and {labels[j]} are closely correlated (r = {r:.4f})",
                        labels=[labels[i], labels[j]],
                    ))
    if clustering is not None:
        for members in ClusterAnalyzer.clusters(clustering.partition):
            if len(members) == 1:
                findings.append(Finding(
                    kind="isolated_sample",
                    message=f"{members[0]} forms a cluster of its own (isolated sample period)",
                    labels=members,
                ))
    if embedding is not None and embedding.cumulative_proportion:
        share = embedding.proportion(2)
        findings.append(Finding(
            kind="mds_proportion",
            message=f"The first two MDS dimensions carry {share * 100:.2f}% of the positive eigenvalue sum",
            labels=[],
        ))
    return findings


def mds_reference(config: PipelineConfig, raw: KpiFrame, embedding: Embedding) -> Optional[Finding]:
    """Two-dimension MDS share under every scaling, set against the dataset's published share"""
    if config.builtin is None or not embedding.cumulative_proportion:
        return None
    reference = KpiRepository.dataset_info(config.builtin).published_mds_proportion
    if reference is None:
        return None

    shares = {}
    for mode in StandardizeMode:
        if mode == config.standardize.mode:
            shares[mode] = embedding.proportion(2)
            continue
        try:
            frame = KpiRepository.standardize(
                raw, StandardizeSpec(mode=mode, zero_variance_policy=config.standardize.zero_variance_policy)
            )
            distances = DistanceAnalyzer.distance_matrix(frame, config.metric)
            shares[mode] = OrdinationAnalyzer.classical_mds(distances, config.mds_dim).proportion(2)
        except KpiError as e:
            logger.debug("No MDS share for '%s' scaling: %s", mode.value, e.detail)

    within = [mode.value for mode, share in shares.items() if abs(share - reference) <= MDS_REFERENCE_BAND]
    observed = ", ".join(f"'{mode.value}' {share * 100:.2f}%" for mode, share in shares.items())
    verdict = ", ".join(f"'{name}'" for name in within) if within else "no scaling"
    return Finding(
        kind="mds_reference",
        message=(
            f"Published two-dimension MDS share is {reference * 100:.2f}%; scalings give {observed}; "
            f"within {MDS_REFERENCE_BAND * 100:.0f} points: {verdict}"
        ),
        labels=within,
    )


def _points(labels: List[str], coordinates) -> List:
    return [(label, row[0], row[1] if len(row) > 1 else 0.0) for label, row in zip(labels, coordinates)]


def report_files(report: Report, formats: List[OutputFormat]) -> Dict[str, str]:
    """File name -> content for every requested output format"""
    files: Dict[str, str] = {}
    if OutputFormat.JSON in formats:
        files["report.json"] = report.model_dump_json(indent=2) + "\n"
        if report.correlation is not None:
            files["correlation.json"] = CorrelationAnalyzer.to_json(report.correlation) + "\n"
        if report.clustering is not None:
            files["dendrogram.nwk"] = report.clustering.newick + "\n"
    if OutputFormat.CSV in formats:
        if report.correlation is not None:
            files["correlation_r.csv"] = CorrelationAnalyzer.to_csv(report.correlation, "r")
            files["correlation_p.csv"] = CorrelationAnalyzer.to_csv(report.correlation, "p")
        if report.clustering is not None:
            files["partition.csv"] = "label,cluster\n" + "".join(
                f"{label},{cluster}\n" for label, cluster in report.clustering.partition.items()
            )
        if report.embedding is not None:
            files["mds_coordinates.csv"] = OrdinationAnalyzer.coordinates_csv(
                report.embedding.labels, report.embedding.coordinates
            )
        if report.ca is not None:
            files["ca_rows.csv"] = OrdinationAnalyzer.coordinates_csv(report.ca.row_labels, report.ca.row_coords)
            files["ca_columns.csv"] = OrdinationAnalyzer.coordinates_csv(report.ca.column_labels, report.ca.col_coords)
    if OutputFormat.SVG in formats:
        if report.clustering is not None:
            files["dendrogram.svg"] = render_dendrogram(report.clustering.dendrogram)
        if report.embedding is not None:
            files["mds.svg"] = render_scatter(
                _points(report.embedding.labels, report.embedding.coordinates), title="MDS"
            )
        if report.ca is not None:
            rows, columns = OrdinationAnalyzer.joint_map(report.ca, report.config.ca_map)
            files["ca.svg"] = render_scatter(
                _points(report.ca.row_labels, rows.tolist()),
                _points(report.ca.column_labels, columns.tolist()),
                title="Correspondence analysis",
            )
    return files


def write_files(directory: Path, files: Dict[str, str]) -> List[Path]:
    """Write all files or none: anything already written is removed on failure"""
    written: List[Path] = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for name, content in files.items():
            path = directory / name
            path.write_text(content, encoding="utf-8", newline="\n")
            written.append(path)
            logger.info("✅ Wrote %s", path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        logger.error("❌ Writing reports to %s failed; partial outputs removed", directory)
        raise
    return written


def run_pipeline(config: PipelineConfig, write: bool = True) -> Report:
    logger.info("🚀 Running pipeline on %s", config.dataset)
    with stage("load"):
        raw = load_frame(config)
        check_config(config, raw.n_samples)

    frame = raw
    stages = set(config.stages)
    if stages & STANDARDIZED_STAGES:
        with stage("standardize"):
            frame = KpiRepository.standardize(raw, config.standardize)

    correlation = clustering = embedding = ca = factors = None
    distances = None

    if Stage.CORRELATION in stages:
        with stage(Stage.CORRELATION.value):
            correlation = CorrelationAnalyzer.correlation_matrix(frame)

    if Stage.CLUSTERING in stages or Stage.MDS in stages:
        with stage("distances"):
            distances = DistanceAnalyzer.distance_matrix(frame, config.metric)

    if Stage.CLUSTERING in stages:
        with stage(Stage.CLUSTERING.value):
            tree = ClusterAnalyzer.agglomerate(distances, config.linkage)
            clustering = ClusterResult(
                linkage=config.linkage,
                k=config.k_clusters,
                partition=ClusterAnalyzer.cut(tree, config.k_clusters),
                dendrogram=tree,
                newick=ClusterAnalyzer.to_newick(tree),
            )

    if Stage.MDS in stages:
        with stage(Stage.MDS.value):
            embedding = OrdinationAnalyzer.classical_mds(distances, config.mds_dim)

    if Stage.CA in stages:
        with stage(Stage.CA.value):
            ca = OrdinationAnalyzer.correspondence(raw)

    if Stage.FACTOR_ANALYSIS in stages:
        with stage(Stage.FACTOR_ANALYSIS.value):
            matrix = correlation if correlation is not None else CorrelationAnalyzer.correlation_matrix(frame)
            factors = FactorAnalyzer.fa_ml(
                matrix.r, config.fa_factors, frame.n_samples, labels=matrix.variable_labels
            )

    narrative = build_narrative(correlation, clustering, embedding, ca, config.ca_map)
    if embedding is not None:
        reference = mds_reference(config, raw, embedding)
        if reference is not None:
            narrative.append(reference)

    report = Report(
        config=config,
        dataset=config.dataset,
        n_samples=frame.n_samples,
        n_variables=frame.n_variables,
        correlation=correlation,
        clustering=clustering,
        embedding=embedding,
        ca=ca,
        factors=factors,
        narrative=narrative,
    )

    if write and config.formats:
        write_files(Path(config.outputs), report_files(report, config.formats))
    logger.info("✅ Pipeline complete")
    return report
