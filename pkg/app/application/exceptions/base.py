class ApplicationError(Exception):
    """Base class for failures of inputs, files and solver runs around the domain."""
