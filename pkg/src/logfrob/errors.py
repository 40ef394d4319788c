"""Exception types shared across modules."""


class StructuralError(ValueError):
    """Operands live in different rings (variables or truncation bounds differ)."""


class NotAUnit(ArithmeticError):
    """The constant term of a matrix series is singular."""


class NotIsomorphismCase(ValueError):
    """The map X -> -C_X xi is not an isomorphism at the origin."""


class MalformedPairing(ValueError):
    """A pairing matrix has terms below z^w."""


class GenerationFailure(ArithmeticError):
    """The generator words do not produce a spanning set of first columns."""

    def __init__(self, order, rank, n):
        super().__init__(f"order {order}: first columns have rank {rank} < {n}")
        self.order = order
        self.rank = rank


class InternalConsistencyError(ArithmeticError):
    """A flatness residual did not vanish after solving an order."""


class PairingEscape(ArithmeticError):
    """The extended pairing acquired a term below z^w."""


class Underdetermined(ValueError):
    """No associativity coefficient isolates the next unknown invariant."""


class Inconsistent(ValueError):
    """Associativity equations contradict the given invariants."""


class NotNilpotent(ValueError):
    pass


class NotMHS(ValueError):
    pass


class NotOpposite(ValueError):
    pass


class NotGriffiths(ValueError):
    pass


class InputError(ValueError):
    """Invalid JSON input; ``path`` is a JSON pointer."""

    def __init__(self, path, message):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path
        self.message = message
