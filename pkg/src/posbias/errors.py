"""Exception hierarchy shared across the package.

Each class carries the CLI exit code for its category, so the command-line
front end can map any caught error to a status without inspecting messages.
"""

from __future__ import annotations


class PosbiasError(Exception):
    """Base class for all categorized errors."""

    exit_code = 1
    category = "data"


class DataError(PosbiasError):
    """Input data is structurally valid to read but unusable for the request."""

    exit_code = 1
    category = "data"


class ConfigError(PosbiasError):
    """Invalid configuration: bad flag values, malformed templates, bad specs."""

    exit_code = 2
    category = "config"


class FileError(PosbiasError):
    """Filesystem failure: unreadable input, unparseable file, failed write."""

    exit_code = 3
    category = "i/o"


class RemoteError(PosbiasError):
    """Remote endpoint failure: transport, authentication, exhausted retries."""

    exit_code = 4
    category = "remote"
