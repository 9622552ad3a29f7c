"""Exception hierarchy shared by the library, the HTTP service, and the CLI.

Every error carries a stable machine ``code`` so the API layer can map it to
exactly one response shape and the CLI to one exit code.
"""

from __future__ import annotations


class UrbanLensError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "error"
    http_status = 400

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.message = message
        self.parameter = parameter


class BadParameterError(UrbanLensError):
    code = "bad_parameter"
    http_status = 400


class UnknownLayerError(UrbanLensError):
    code = "unknown_layer"
    http_status = 404


class UnsupportedLayerError(UrbanLensError):
    """Operation requires a geometry kind the layer does not have."""

    code = "unsupported_layer"
    http_status = 400


class IngestError(UrbanLensError):
    """Malformed input data; message locates the offending row or feature."""

    code = "ingest_invalid"
    http_status = 400


class StageMissingError(UrbanLensError):
    """A pipeline stage has not run yet; message names the CLI command."""

    code = "stage_missing"
    http_status = 409

    def __init__(self, stage: str, command: str):
        super().__init__(
            f"pipeline stage '{stage}' has not been run; run `urbanlens {command}` first",
            parameter=stage,
        )
        self.stage = stage
        self.command = command


class WorkspaceError(UrbanLensError):
    """Workspace file missing, corrupt, or wrong version."""

    code = "workspace_invalid"
    http_status = 500


class WorkspaceVersionError(WorkspaceError):
    code = "workspace_version"
