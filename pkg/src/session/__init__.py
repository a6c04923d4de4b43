"""
Session Package

Statement grammar shared by Cadabra-style and FORM-style scripts, the
immutable Session, batch execution (run_script) and the REPL step.
"""

from .script_session import (
    Session,
    StatementExecutor,
    Transcript,
    TranscriptEntry,
    execute_statement,
    repl_step,
    run_script,
)
from .script_statements import Statement, StatementKind, classify, parse_script, split_statements

__all__ = [
    'Session',
    'StatementExecutor',
    'Transcript',
    'TranscriptEntry',
    'execute_statement',
    'repl_step',
    'run_script',
    'Statement',
    'StatementKind',
    'classify',
    'parse_script',
    'split_statements',
]
