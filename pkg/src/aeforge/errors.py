class AeforgeError(Exception):
    """Base for all package errors."""


class ValidationError(AeforgeError):
    """Bad arguments, shapes, or configuration (CLI exit code 1)."""


class FormatError(AeforgeError):
    """Malformed file content: PPM, checkpoints, manifests, reports (exit 2)."""
