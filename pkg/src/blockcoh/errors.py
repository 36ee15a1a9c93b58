"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class BlockCoherenceError(ValueError):
    pass


class OverlappingGroups(BlockCoherenceError):
    pass


class IncompleteCover(BlockCoherenceError):
    pass


class EmptyGroup(BlockCoherenceError):
    pass


class DimensionMismatch(BlockCoherenceError):
    pass


class NotNormalized(BlockCoherenceError):
    pass


class NotADensityMatrix(BlockCoherenceError):
    pass


class NotCPTP(BlockCoherenceError):
    pass


class NotUnitary(BlockCoherenceError):
    pass


class SingularSystem(BlockCoherenceError):
    pass


class Infeasible(BlockCoherenceError):
    """Conversion is impossible; ``detail`` carries the diagnostic (e.g. failing prefix sum)."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class ZeroWeightPolicy(BlockCoherenceError):
    pass


class VerificationFailed(BlockCoherenceError):
    def __init__(self, clause, message):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class NotIncoherent(BlockCoherenceError):
    pass


class NotAConversion(BlockCoherenceError):
    pass


class CertificateViolation(BlockCoherenceError):
    pass


class InvalidMixture(BlockCoherenceError):
    pass


class NotBlockIncoherent(BlockCoherenceError):
    pass


class RankBoundExceeded(BlockCoherenceError):
    pass


class TooLarge(BlockCoherenceError):
    pass


class SchemaViolation(BlockCoherenceError):
    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
