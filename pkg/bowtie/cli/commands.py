"""
Bow-tie CLI commands
Decomposition, statistics, temporal snapshots, synthetic data, and oracle checks
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from datetime import date, datetime
from typing import Optional, Union

import click
import numpy as np
from tqdm import tqdm

from bowtie.errors import InputError
from bowtie.ingest.parsers import INPUT_FORMATS, load_label_sets, write_edge_list, write_metadata
from bowtie.ingest.validation import validate_degrees
from bowtie.macrostructure import Classification, decompose, read_labels, write_labels, write_summary
from bowtie.models.models import ComponentLabel
from bowtie.stats import (
    CCDF_METRICS, OutlierCategory, abandoned_fraction, builtin_label_masks, ccdf,
    component_profile, degree_summary, label_crosstab, top_k_outliers
)
from bowtie.synth import (
    PlantSpec, canon11_graph, oracle_classify, planted_bowtie, random_digraph,
    same_classification, synthetic_metadata
)
from bowtie.temporal import agreement, evolution, new_account_attribution, snapshot
from bowtie.utils import write_csv, write_json
from bowtie.cli.run_config import RunConfig, with_run_config

logger = logging.getLogger(__name__)

DATE = click.DateTime(formats=['%Y-%m-%d'])

# Arc densities (m / n) cycled through by oracle-check
ORACLE_DENSITIES = (0.5, 1, 2, 4)


def shared_options(f):
    """Flags every command accepts"""
    options = [
        click.option('--edges', type=click.Path(dir_okay=False), help='Arc file (src follows dst)'),
        click.option('--format', 'input_format', type=click.Choice(INPUT_FORMATS), default=None,
                     help='Arc file format'),
        click.option('--meta', type=click.Path(dir_okay=False), help='Account metadata CSV'),
        click.option('--out', type=click.Path(file_okay=False), default='.', show_default=True,
                     help='Output directory'),
        click.option('--labels', type=click.Path(dir_okay=False), help='External label sets ("id[,set]" lines)'),
        click.option('--threads', type=int, default=None, help='Worker threads (advisory)'),
        click.option('--seed', type=int, default=None, help='Random seed'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _as_date(value: Optional[datetime]) -> Optional[date]:
    return value.date() if value is not None else None


def _sizes_message(counts) -> str:
    return ', '.join(f"{label.name}={int(counts[label])}" for label in ComponentLabel)


# ============================================================================
# DECOMPOSE
# ============================================================================

@click.command('decompose')
@shared_options
@with_run_config()
def cmd_decompose(run: RunConfig, settings):
    """Classify every account and write labels.csv and summary.json"""
    d = run.load_dataset()
    classification, summary = decompose(d.graph, method=run.scc_method)
    write_labels(classification, run.output_path(settings.LABELS_FILE))
    write_summary(summary, run.output_path(settings.SUMMARY_FILE))

    return {
        'success': True,
        'message': f"decomposed {d.node_count} nodes: {_sizes_message(summary.sizes)}",
        'summary': summary.to_dict()
    }


# ============================================================================
# STATS
# ============================================================================

@click.command('stats')
@shared_options
@click.option('--k', type=int, default=None, help='Outliers per category')
@click.option('--as-of', type=DATE, default=None, help='Reference date for account age')
@with_run_config()
def cmd_stats(run: RunConfig, settings, k, as_of):
    """Per-component profiles, CCDFs, degree summary, outliers and label cross-tabs"""
    k = k if k is not None else settings.OUTLIER_K
    if k < 1:
        raise InputError("--k must be at least 1")
    reference = _as_date(as_of)

    d = run.load_dataset()
    classification, _ = decompose(d.graph, method=run.scc_method)

    # everything is computed before the first file is written
    documents = {
        settings.PROFILE_FILE: component_profile(d, classification).to_dict(),
        settings.DEGREE_SUMMARY_FILE: {
            'in': degree_summary(d, 'in'),
            'out': degree_summary(d, 'out')
        },
        settings.ABANDONED_FILE: abandoned_fraction(
            d, classification,
            max_followers=settings.ABANDONED_MAX_FOLLOWERS,
            max_followings=settings.ABANDONED_MAX_FOLLOWINGS,
            min_age_months=settings.ABANDONED_MIN_AGE_MONTHS,
            reference_date=reference,
        ),
    }

    masks = builtin_label_masks(d) if d.has_meta.any() else {}
    documents[settings.OUTLIERS_FILE] = {
        scope: [top_k_outliers(d, classification, category, k, scope=scope,
                               label_mask=masks.get('suspended')).to_dict()
                for category in OutlierCategory]
        for scope in ('global', 'per_component')
    }

    crosstabs = [label_crosstab(d, classification, mask, name=name).to_dict()
                 for name, mask in masks.items()]
    if run.labels:
        default_name = os.path.splitext(os.path.basename(run.labels))[0]
        crosstabs += [label_crosstab(d, classification, ids, name=name).to_dict()
                      for name, ids in load_label_sets(run.labels, default_name).items()]
    documents[settings.CROSSTAB_FILE] = {'label_sets': crosstabs}

    curves = {}
    for metric in CCDF_METRICS:
        for label in ComponentLabel:
            curves[f"{metric}_{label.name}.csv"] = ccdf(d, classification, metric, label,
                                                        reference_date=reference)
            # zero values dropped, for log-scale plots
            curves[f"{metric}_{label.name}_nonzero.csv"] = ccdf(d, classification, metric, label,
                                                                filter_zeros=True, reference_date=reference)

    for name, payload in documents.items():
        write_json(run.output_path(name), payload)
    for name, curve in curves.items():
        curve.write(run.output_path(settings.CCDF_DIR, name))

    return {
        'success': True,
        'message': f"wrote statistics for {d.node_count} nodes ({len(curves)} CCDF files, "
                   f"{len(crosstabs)} label sets)"
    }


# ============================================================================
# TEMPORAL
# ============================================================================

@click.command('snapshot')
@shared_options
@click.option('--as-of', type=DATE, required=True, help='Snapshot date (YYYY-MM-DD)')
@with_run_config()
def cmd_snapshot(run: RunConfig, settings, as_of):
    """Classify the graph of accounts created on or before --as-of"""
    d = run.load_dataset()
    s = snapshot(d, as_of.date(), method=run.scc_method)
    folder = f"snapshot_{s.as_of.isoformat()}"
    write_labels(s.classification, run.output_path(folder, settings.LABELS_FILE))
    write_summary(s.summary, run.output_path(folder, settings.SUMMARY_FILE))

    return {
        'success': True,
        'message': f"snapshot {s.as_of.isoformat()}: {s.node_count} nodes "
                   f"({s.excluded_undated} undated excluded): {_sizes_message(s.summary.sizes)}"
    }


@click.command('evolve')
@shared_options
@click.option('--start', type=DATE, required=True, help='First snapshot date')
@click.option('--end', type=DATE, required=True, help='Last snapshot date')
@click.option('--step-months', type=int, default=1, show_default=True, help='Months between snapshots')
@with_run_config()
def cmd_evolve(run: RunConfig, settings, start, end, step_months):
    """Component sizes on a monthly grid and where new accounts land"""
    start, end = start.date(), end.date()
    if start > end:
        raise InputError(f"--start {start} is after --end {end}")
    if step_months < 1:
        raise InputError("--step-months must be at least 1")

    d = run.load_dataset()
    series = evolution(d, start, end, step_months, method=run.scc_method,
                       threads=run.threads, progress=run.show_progress)
    series.write(run.output_path(settings.EVOLUTION_FILE), run.output_path(settings.ATTRIBUTION_FILE))

    return {
        'success': True,
        'message': f"computed {len(series.snapshots)} snapshots from {start} to {end}"
    }


def _parse_point(value: str) -> Union[date, str]:
    """A diff endpoint is either a YYYY-MM-DD date or a labels CSV path"""
    try:
        return date.fromisoformat(value)
    except ValueError:
        if not os.path.isfile(value):
            raise InputError(f"'{value}' is neither a YYYY-MM-DD date nor an existing labels file")
        return value


@click.command('diff')
@shared_options
@click.option('--older', required=True, help='Date or labels CSV')
@click.option('--newer', required=True, help='Date or labels CSV')
@with_run_config(require_edges=False)
def cmd_diff(run: RunConfig, settings, older, newer):
    """Compare two snapshots or two labels files"""
    older_point, newer_point = _parse_point(older), _parse_point(newer)
    dated = [p for p in (older_point, newer_point) if isinstance(p, date)]
    if dated and not run.edges:
        raise InputError("--edges is required when --older or --newer is a date")

    d = run.load_dataset() if dated else None
    snapshots = {}

    def resolve(point) -> Classification:
        if isinstance(point, date):
            if point not in snapshots:
                snapshots[point] = snapshot(d, point, method=run.scc_method)
            return snapshots[point].classification
        return read_labels(point)

    report = agreement(resolve(older_point), resolve(newer_point))
    payload = {'agreement': report.to_dict()}

    if len(dated) == 2:
        attribution = new_account_attribution(snapshots[older_point], snapshots[newer_point])
        write_csv(run.output_path(settings.ATTRIBUTION_FILE),
                  ('period_end', 'label', 'new_accounts', 'fraction'), attribution.rows())
        payload['attribution'] = attribution.to_dict()
    write_json(run.output_path(settings.AGREEMENT_FILE), payload)

    if report.no_overlap:
        message = "no common accounts"
    else:
        message = f"{report.common} common accounts, agreement {report.fraction:.4f}"
    return {'success': True, 'message': message}


# ============================================================================
# DEGREE VALIDATION
# ============================================================================

@click.command('validate-degrees')
@shared_options
@with_run_config()
def cmd_validate_degrees(run: RunConfig, settings):
    """Compare API-reported follower/following counts with graph degrees"""
    if not run.meta:
        raise InputError("--meta is required for validate-degrees")
    d = run.load_dataset()
    report = validate_degrees(d)
    report.write(run.output_path(settings.DEGREE_DIFF_FILE), run.output_path(settings.DEGREE_VALIDATION_FILE))

    return {
        'success': True,
        'message': f"{report.population} accounts checked; "
                   f"followers exact {report.zero_fraction('followers'):.4f}, "
                   f"followings exact {report.zero_fraction('followings'):.4f}"
    }


# ============================================================================
# SYNTHETIC DATA
# ============================================================================

def _label_counts(values, flag: str) -> dict:
    """Parse repeated LABEL=N flags"""
    parsed = {}
    for value in values:
        name, sep, count = value.partition('=')
        try:
            if not sep:
                raise ValueError(f"expected LABEL=N, got '{value}'")
            parsed[ComponentLabel.parse(name)] = int(count)
        except ValueError as e:
            raise InputError(f"{flag}: {e}")
    return parsed


@click.command('generate')
@shared_options
@click.option('--size', 'sizes', multiple=True, metavar='LABEL=N', help='Planted component size (repeatable)')
@click.option('--depth', 'depths', multiple=True, metavar='LABEL=N', help='Levels of a directional component')
@click.option('--lsc-extra-arcs', type=int, default=0, show_default=True, help='Random arcs inside the LSC')
@click.option('--canon11', is_flag=True, help='Write the eleven-node example instead of a planted graph')
@with_run_config(require_edges=False)
def cmd_generate(run: RunConfig, settings, sizes, depths, lsc_extra_arcs, canon11):
    """Write a planted bow-tie with its metadata and expected labels"""
    if canon11:
        graph = canon11_graph()
        expected = oracle_classify(graph, max_n=settings.ORACLE_MAX_N)
    else:
        spec = PlantSpec(
            sizes=_label_counts(sizes, '--size'),
            lsc_extra_arcs=lsc_extra_arcs,
            depth=_label_counts(depths, '--depth'),
            seed=run.seed,
        )
        graph, expected = planted_bowtie(spec, verify=True, max_n=settings.ORACLE_MAX_N)

    meta = synthetic_metadata(graph, seed=run.seed)
    write_edge_list(graph.external_arcs(), run.output_path(settings.EDGES_FILE))
    write_metadata(meta, run.output_path(settings.META_FILE))
    write_labels(expected, run.output_path(settings.EXPECTED_LABELS_FILE))

    return {
        'success': True,
        'message': f"generated {graph.node_count} nodes and {graph.arc_count} arcs: "
                   f"{_sizes_message(np.bincount(expected.labels, minlength=len(ComponentLabel)))}"
    }


# ============================================================================
# ORACLE CHECK
# ============================================================================

def _oracle_trial(trial: int, seed: int, max_n: int, method: str) -> bool:
    """Decompose one seeded random digraph and compare with the oracle"""
    rng = np.random.default_rng([seed, trial])
    n = int(rng.integers(2, max_n + 1))
    density = ORACLE_DENSITIES[trial % len(ORACLE_DENSITIES)]
    m = min(int(round(density * n)), n * (n - 1))
    g = random_digraph(n, m, seed=int(rng.integers(0, 2 ** 32)))
    classification, _ = decompose(g, method=method)
    matched = same_classification(classification, oracle_classify(g, max_n=max_n))
    if not matched:
        logger.error("trial %d (n=%d, m=%d) disagrees with the oracle", trial, n, m)
    return matched


@click.command('oracle-check')
@shared_options
@click.option('--trials', type=int, default=1000, show_default=True, help='Random digraphs to check')
@click.option('--max-n', type=int, default=200, show_default=True, help='Largest node count')
@with_run_config(require_edges=False)
def cmd_oracle_check(run: RunConfig, settings, trials, max_n):
    """Differential test of the pipeline against the brute-force oracle"""
    if trials < 1:
        raise InputError("--trials must be at least 1")
    if not 2 <= max_n <= settings.ORACLE_MAX_N:
        raise InputError(f"--max-n must be between 2 and {settings.ORACLE_MAX_N}")

    with ThreadPoolExecutor(max_workers=run.threads) as pool:
        results = pool.map(lambda t: _oracle_trial(t, run.seed, max_n, run.scc_method), range(trials))
        matched = sum(tqdm(results, total=trials, desc='oracle', disable=not run.show_progress))

    click.echo(f"{matched}/{trials} matched")
    return {
        'success': matched == trials,
        'message': f"{matched} of {trials} random digraphs matched the oracle",
        'exit_code': 0 if matched == trials else 3
    }


COMMANDS = (
    cmd_decompose,
    cmd_stats,
    cmd_snapshot,
    cmd_evolve,
    cmd_diff,
    cmd_validate_degrees,
    cmd_generate,
    cmd_oracle_check,
)
