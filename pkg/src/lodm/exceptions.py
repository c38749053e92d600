"""Exception types raised by the package."""


class DomainError(ValueError):
    """A value lies outside the domain of a kernel, link or parameter set."""


class NotInvertibleError(ValueError):
    """The autoregressive coefficients are outside the stability region."""


class NoCurveError(ValueError):
    """No equivalence curve exists because the coprimality condition holds."""
