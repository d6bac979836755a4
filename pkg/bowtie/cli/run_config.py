"""
Per-run configuration for CLI commands
Resolves flags over config defaults, validates paths, and hands commands a RunConfig
"""
import os
from dataclasses import dataclass, field
from functools import wraps
from typing import Dict, List, Optional

import click

from bowtie.errors import InputError
from bowtie.ingest.parsers import INPUT_FORMATS, load_dataset
from bowtie.models.models import Dataset
from bowtie.scc import SCC_METHODS


@dataclass
class RunConfig:
    """Everything one command invocation needs"""
    edges: Optional[str] = None
    input_format: str = 'edge-list'
    meta: Optional[str] = None
    out: str = '.'
    labels: Optional[str] = None
    threads: int = 1
    seed: int = 0
    scc_method: str = 'scipy'
    chunk_arcs: int = 1_000_000
    show_progress: bool = False
    options: Dict = field(default_factory=dict)

    def output_path(self, *parts: str) -> str:
        """Path under the output directory, creating parent directories"""
        path = os.path.join(self.out, *parts)
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        return path

    def load_dataset(self) -> Dataset:
        return load_dataset(self.edges, input_format=self.input_format, meta_path=self.meta,
                            chunk_arcs=self.chunk_arcs)


def validate_run_config(run: RunConfig, require_edges: bool = True) -> List[str]:
    """Validate a run configuration"""
    errors = []

    if require_edges:
        if not run.edges:
            errors.append("--edges is required")
        elif not os.path.isfile(run.edges):
            errors.append(f"edge file not found: {run.edges}")
    if run.meta and not os.path.isfile(run.meta):
        errors.append(f"metadata file not found: {run.meta}")
    if run.labels and not os.path.isfile(run.labels):
        errors.append(f"labels file not found: {run.labels}")

    if run.input_format not in INPUT_FORMATS:
        errors.append(f"--format must be one of {', '.join(INPUT_FORMATS)}")
    if run.scc_method not in SCC_METHODS:
        errors.append(f"SCC method must be one of {', '.join(SCC_METHODS)}")
    if run.threads < 1:
        errors.append("--threads must be at least 1")

    if os.path.exists(run.out) and not os.path.isdir(run.out):
        errors.append(f"output path is not a directory: {run.out}")

    return errors


def with_run_config(require_edges: bool = True):
    """
    Decorator for commands: build the RunConfig from shared flags and settings,
    validate it, and pass it as the first argument
    """
    def decorator(f):
        @wraps(f)
        def decorated_function(edges, input_format, meta, out, labels, threads, seed, **kwargs):
            settings = click.get_current_context().obj
            run = RunConfig(
                edges=edges,
                input_format=input_format or settings.INPUT_FORMAT,
                meta=meta,
                out=out,
                labels=labels,
                threads=threads if threads is not None else settings.THREADS,
                seed=seed if seed is not None else settings.SEED,
                scc_method=settings.SCC_METHOD,
                chunk_arcs=settings.INGEST_CHUNK_ARCS,
                show_progress=settings.SHOW_PROGRESS,
                options=kwargs,
            )
            errors = validate_run_config(run, require_edges=require_edges)
            if errors:
                raise InputError('; '.join(errors))
            os.makedirs(run.out, exist_ok=True)
            return f(run, settings, **kwargs)

        return decorated_function
    return decorator
