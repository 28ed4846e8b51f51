"""Exception hierarchy shared by every module."""


class UnunfoldError(Exception):
    """Base class for all errors raised by this package."""


class MeshError(UnunfoldError):
    pass


class NonManifoldEdge(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class DegenerateFace(MeshError):
    pass


class BadEulerCharacteristic(MeshError):
    pass


class NotADisk(MeshError):
    pass


class ConstructionError(UnunfoldError):
    pass


class EmbeddingSolveFailure(ConstructionError):
    pass


class EmbeddingInvalid(ConstructionError):
    pass


class BoundaryMismatch(ConstructionError):
    pass


class InvalidStacking(ConstructionError):
    pass


class CurvatureSignViolation(ConstructionError):
    pass


class CrownTooShort(ConstructionError):
    pass


class NonDevelopablePiece(UnunfoldError):
    pass


class CurvatureSignatureMismatch(UnunfoldError):
    pass


class DegenerateInput(UnunfoldError):
    pass


class PrecisionExhausted(UnunfoldError):
    pass


class TooLarge(UnunfoldError):
    pass


class ParseError(UnunfoldError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class IoError(UnunfoldError, OSError):
    """Reading or writing a file failed."""
