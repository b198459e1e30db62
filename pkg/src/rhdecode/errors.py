"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, quantity: str, size: int, budget: int) -> None:
        super().__init__(f"{quantity}: {size} exceeds enumeration budget {budget}")
        self.quantity = quantity
        self.size = size
        self.budget = budget


class NotControllable(ValueError):
    def __init__(self, rank: int, delta: int) -> None:
        super().__init__(f"(A, B) not controllable: controllability rank {rank} < {delta}")
        self.rank = rank


class NotObservable(ValueError):
    def __init__(self, rank: int, delta: int) -> None:
        super().__init__(f"(A, C) not observable: observability rank {rank} < {delta}")
        self.rank = rank


class SpecError(ValueError):
    """A code, sequence or configuration file is malformed.

    ``where`` names the offending line or field.
    """

    def __init__(self, source: str, where: str, message: str) -> None:
        super().__init__(f"{source}: {where}: {message}")
        self.source = source
        self.where = where
