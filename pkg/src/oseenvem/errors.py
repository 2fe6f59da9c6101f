"""Exception types raised by the library."""


class OseenVemError(Exception):
    pass


class DegenerateCell(OseenVemError):
    pass


class GenerationFailure(OseenVemError):
    pass


class ParseError(OseenVemError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class TriangulationFailure(OseenVemError):
    pass


class SingularProjector(OseenVemError):
    pass


class DimensionMismatch(OseenVemError):
    pass


class SolverFailure(OseenVemError):
    pass


class SingularMatrix(SolverFailure):
    pass


class MissingExact(OseenVemError):
    pass


class DomainError(OseenVemError, ValueError):
    pass
