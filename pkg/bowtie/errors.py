"""
Error types for the bow-tie pipeline
Each error carries the process exit status the CLI reports for it
"""
from typing import Optional


class BowtieError(Exception):
    """Base class for all pipeline failures"""

    exit_code = 1


class InputError(BowtieError):
    """Missing or unusable input (path does not exist, bad flag value)"""
    exit_code = 1


class ParseError(InputError):
    """Malformed input file content"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ''
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ': '
        elif line is not None:
            location = f"line {line}: "
        super().__init__(f"{location}{message}")


class ResourceExhaustedError(BowtieError):
    """Ran out of memory; names the pipeline phase that failed"""
    exit_code = 2

    def __init__(self, phase: str, detail: str = ''):
        self.phase = phase
        message = f"out of memory during {phase}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class ContractViolation(BowtieError):
    """A precondition or structural invariant does not hold"""
    exit_code = 3


class EmptyGraphError(ContractViolation):
    """Operation is undefined on a graph with no nodes"""


class InvalidSpecError(ContractViolation):
    """Planted-structure specification cannot be realised"""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__('; '.join(self.errors))
