"""Exception hierarchy shared across the package.

Every error raised on a contract violation derives from :class:`QcError`
so callers (CLI, service) can convert them into structured messages with
a single except clause.
"""


class QcError(Exception):
    """Base class for all dmriqc errors."""


class GraphError(QcError):
    """Invalid pipeline dependency graph definition."""


class CycleDetected(GraphError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("dependency cycle: " + " -> ".join(self.cycle))


class UnknownDependency(GraphError):
    pass


class DuplicateNode(GraphError):
    pass


class UnknownNode(GraphError):
    pass


class UnknownUnit(GraphError):
    pass


class FitError(QcError):
    """Tensor fitting cannot proceed on the given acquisition."""


class InsufficientDirections(FitError):
    pass


class SingularDesign(FitError):
    pass


class SeedOutsideMask(QcError):
    pass


class InvalidSpec(QcError):
    """Malformed phantom or render specification."""


class DiagnosticError(QcError):
    """A check's input contract is violated."""


class MaskEmpty(DiagnosticError):
    pass


class ShapeMismatch(DiagnosticError):
    pass


class EmptyInput(DiagnosticError):
    pass


class FormatError(QcError):
    """Structured parse failure for an on-disk format."""


class BadMagic(FormatError):
    pass


class BadHeader(FormatError):
    pass


class UnsupportedDatatype(FormatError):
    pass


class TruncatedData(FormatError):
    def __init__(self, expected: int, actual: int, context: str = ""):
        self.expected = expected
        self.actual = actual
        msg = f"expected {expected} bytes, found {actual}"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class CountMismatch(FormatError):
    pass


class MalformedNumber(FormatError):
    pass


class NonUnitVector(FormatError):
    pass


class UnterminatedStream(FormatError):
    pass


class RaggedRows(FormatError):
    pass


class NonBinaryToken(FormatError):
    pass


class NotSquare(FormatError):
    pass


class SchemaViolation(FormatError):
    pass


class ManifestError(QcError):
    """Dataset manifest fails validation."""


class MissingArtifact(ManifestError):
    def __init__(self, entries):
        # entries: list of (scan_id, node, kind, path)
        self.entries = list(entries)
        lines = ", ".join(f"{s}/{n}/{k}" for s, n, k, _ in self.entries)
        super().__init__(f"missing artifacts: {lines}")


class UnknownNodeReference(ManifestError):
    pass


class DuplicateScanId(ManifestError):
    pass


class IoFailure(QcError):
    pass


class EmptyVolume(QcError):
    pass


class SliceOutOfRange(QcError):
    pass
