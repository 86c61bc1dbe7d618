"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class DesignError(ValueError):
    """An interaction design is malformed or cannot be constructed."""


class CapacityError(RuntimeError):
    """A dense 2**N object was requested above the configured cap."""


class SingularCovarianceError(ValueError):
    """Cholesky factorization met a non-positive pivot.

    Attributes
    ----------
    pivot : int
        Zero-based index (in the original variable order) of the offending variable.
    value : float
        The conditional variance found at that pivot.
    """

    def __init__(self, pivot, value):
        super().__init__(f"covariance is not positive definite at variable {pivot} "
                         f"(conditional variance {value:.3g})")
        self.pivot = pivot
        self.value = value
