"""Exception hierarchy.  Everything raised on bad input derives from ApmError."""


class ApmError(Exception):
    pass


class ParseError(ApmError):
    pass


class UnknownSymbol(ApmError):
    pass


class UnknownConstant(UnknownSymbol):
    pass


class ArityMismatch(ApmError):
    pass


class SortMismatch(ApmError):
    pass


class UnknownTheory(ApmError):
    pass


class UnsupportedModuloTheory(ApmError):
    pass


class NonFlattenableSymbol(ApmError):
    pass


class IllTypedLinearTerm(ApmError):
    pass


class MalformedStep(ApmError):
    pass


class BoundExhausted(ApmError):
    pass


class NotLocal(ApmError):
    pass


class NotLeftMonomial(ApmError):
    pass


class NotRepresentable(ApmError):
    pass


class InvalidOrder(ApmError):
    pass
