"""Shim errors."""


class ShimError(Exception):
    pass


class SchemaError(ShimError):
    """An emitted event violates the metric-line schema."""


class SpawnFailure(ShimError):
    """The wrapped command could not be started."""


class WorkspaceUnwritable(ShimError):
    pass


class MissingWeightFile(ShimError):
    pass
