"""Data ingestion, session replay, experiment grids and report formats."""
from .config import RunConfig, build_config
from .data import Fixed, RandomUniform, Stream, StreamSpec, ingest_csv, parse_rate, resample, split_chronological
from .experiment import Cell, prepare, run_matrix, run_stream
from .session import SessionResult, run_session

__all__ = [
    "Cell",
    "Fixed",
    "RandomUniform",
    "RunConfig",
    "SessionResult",
    "Stream",
    "StreamSpec",
    "build_config",
    "ingest_csv",
    "parse_rate",
    "prepare",
    "resample",
    "run_matrix",
    "run_session",
    "run_stream",
    "split_chronological",
]
