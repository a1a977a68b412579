"""Exception hierarchy shared by every module of the package."""


class RoughGranError(Exception):
    """Base class for all errors raised by roughgran."""


class ParseError(RoughGranError):
    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class SchemaError(RoughGranError):
    pass


class DeterminismError(RoughGranError):
    """An operation that needs single-valued cells met a set-valued one."""


class OrderingError(RoughGranError):
    pass


class NumericError(RoughGranError):
    pass


class DimensionError(RoughGranError, ValueError):
    pass


class ParameterError(RoughGranError, ValueError):
    pass


class BoundsError(RoughGranError, IndexError):
    pass


class DomainError(RoughGranError):
    """Input lies outside the domain of a partial map."""


class ContractError(RoughGranError):
    """A map produced a value outside its declared codomain (a bug signal)."""


class CapacityError(RoughGranError):
    pass


class DiscretizationError(RoughGranError):
    pass


class DegenerateColumnError(DiscretizationError):
    pass
