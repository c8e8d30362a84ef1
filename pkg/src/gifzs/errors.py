"""Exceptions raised by the fuzzy attractor library."""


class GifzsError(Exception):
    """Base class for all library errors."""


class GridMismatchError(GifzsError):
    """Raised when operands live on different boxes or level lattices."""

    def __init__(self, message: str = "operands must share box and levels"):
        super().__init__(message)


class NotNormalError(GifzsError):
    """Raised when a fuzzy set that must be normal has no cell at the top level."""

    def __init__(self, what: str = "fuzzy set"):
        self.what = what
        super().__init__(f"{what} is not normal: no cell reaches membership 1")


class EmptySetError(GifzsError):
    """Raised when a crisp cell set that must be nonempty is empty."""

    def __init__(self, what: str = "cell set"):
        self.what = what
        super().__init__(f"{what} is empty")


class OffLatticeError(GifzsError):
    """Raised when a threshold is not a multiple of 1/L."""

    def __init__(self, value: float, levels: int):
        self.value = value
        self.levels = levels
        super().__init__(f"threshold {value!r} is not on the 1/{levels} lattice")


class NonNestedCutsError(GifzsError):
    """Raised when a stack of cuts is not nonincreasing in the level."""

    def __init__(self, level: int):
        self.level = level
        super().__init__(f"cut at level {level} is not contained in the cut at level {level - 1}")


class GreyMapError(GifzsError):
    """Raised when grey-level samples cannot represent an ndrc map."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        prefix = f"grey {index}: " if index is not None else ""
        super().__init__(f"{prefix}{message}")


class InadmissibleError(GifzsError):
    """Raised when a grey system violates an admissibility clause."""

    def __init__(self, clause: str, detail: str, index: int | None = None):
        self.clause = clause
        self.detail = detail
        self.index = index
        super().__init__(f"admissibility clause {clause} violated: {detail}")


class NotContractiveError(GifzsError):
    """Raised when a map's Lipschitz bound is not below 1."""

    def __init__(self, index: int, lipschitz: float):
        self.index = index
        self.lipschitz = lipschitz
        super().__init__(f"map {index}: Lipschitz bound {lipschitz:.6g} ≥ 1")


class EpsilonTooSmallError(GifzsError):
    """Raised when the approximation accuracy is below what the grid can resolve."""

    def __init__(self, epsilon: float, minimum: float):
        self.epsilon = epsilon
        self.minimum = minimum
        super().__init__(f"epsilon {epsilon:.6g} is too small for this grid; minimum feasible is above {minimum:.6g}")


class ConfigError(GifzsError):
    """Raised when a system description cannot be turned into a valid system."""

    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.message = message
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}{field}: {message}")


class ImageFormatError(GifzsError):
    """Raised when a PGM file is malformed or incompatible."""
