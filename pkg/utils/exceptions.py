"""
Exception hierarchy and the mapping onto command exit codes
"""
import logging

from django.core.management.base import CommandError
from rest_framework import serializers

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


class ArchaeologyError(Exception):
    """Base class for every error raised by the netarch apps."""
    exit_code = EXIT_USAGE


class GraphError(ArchaeologyError, ValueError):
    """Invalid graph construction, relabeling or edge-list text."""


class ModelSpecError(ArchaeologyError, ValueError):
    """Random-graph model parameters out of range."""


class AnchorSearchError(ArchaeologyError, ValueError):
    """Bad arguments to the double-cycle detector."""


class EstimationError(ArchaeologyError, ValueError):
    """Root estimation cannot be configured (missing m, bad epsilon)."""


class InputEncodingError(ArchaeologyError, ValueError):
    """Input text is not valid UTF-8."""

    def __init__(self, source, error):
        self.source = str(source)
        super().__init__(f"{self.source}: not valid UTF-8 ({error.reason} at byte {error.start})")


class ResourceGuardError(ArchaeologyError):
    """Input exceeds a configured size guard."""
    exit_code = EXIT_GUARD


class EmissionError(ArchaeologyError):
    """Reading or writing an artifact failed."""
    exit_code = EXIT_IO

    def __init__(self, path, error):
        self.path = str(path)
        self.error = error
        super().__init__(f"{self.path}: {error}")


def command_error_for(exc):
    """
    Translate an exception raised while running a command into a CommandError
    carrying the exit code contract: 1 I/O, 2 usage/validation, 3 guard.
    """
    if isinstance(exc, CommandError):
        return exc

    if isinstance(exc, ArchaeologyError):
        returncode = exc.exit_code
        message = str(exc)
    elif isinstance(exc, serializers.ValidationError):
        returncode = EXIT_USAGE
        message = f"Invalid input: {exc.detail}"
    elif isinstance(exc, OSError):
        returncode = EXIT_IO
        filename = getattr(exc, 'filename', None)
        message = f"{filename}: {exc.strerror}" if filename else str(exc)
    else:
        return None

    logger.error(f"Command failed ({returncode}): {message}")
    return CommandError(message, returncode=returncode)
