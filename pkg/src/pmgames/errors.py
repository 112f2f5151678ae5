"""Exception types shared across the package."""


class PMGamesError(Exception):
    """Base class for all package errors."""


class BoundExceeded(PMGamesError):
    """An exhaustive routine was asked to run above its size guard."""

    def __init__(self, what: str, size: int, bound: int):
        super().__init__(f"{what}: size {size} exceeds bound {bound}")
        self.size = size
        self.bound = bound


class NotAnAllocation(PMGamesError):
    """A vector that must sum to v(N) does not."""


class UnknownVertex(PMGamesError, KeyError):
    pass


class UnknownPlayer(PMGamesError, KeyError):
    pass


class EdgeNotInGraph(PMGamesError):
    pass


class CapacityViolated(PMGamesError):
    pass


class WidthError(PMGamesError):
    """Raised when a construction needs a different partition width."""


class NotBipartite(PMGamesError):
    pass


class NotPerfectGame(PMGamesError):
    pass


class BranchBudgetExceeded(PMGamesError):
    pass


class UnbalancedCertificate(PMGamesError):
    def __init__(self, player: str, total):
        super().__init__(f"weights containing player {player!r} sum to {total}, not 1")
        self.player = player
        self.total = total


class ParseError(PMGamesError):
    pass


class ValidationError(PMGamesError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations
