"""Exception hierarchy. The CLI maps these onto exit codes."""


class ArtifactError(Exception):
    """Base class for every error raised by psido2."""

    exit_code = 1


class PreconditionError(ArtifactError):
    """A mathematical precondition failed (exit code 1)."""

    exit_code = 1


class FormatError(ArtifactError):
    """Malformed input data or files (exit code 2)."""

    exit_code = 2
