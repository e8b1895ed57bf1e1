"""Exception hierarchy shared by every module."""


class FlagMirrorError(Exception):
    """Base class for all library errors."""


class ParameterError(FlagMirrorError):
    """Invalid or degenerate numeric parameters."""


class NonGenericParameters(ParameterError):
    def __init__(self, exponents, labels=None):
        self.exponents = tuple(exponents)
        if labels is None:
            text = str(self.exponents)
        else:
            text = " * ".join(
                f"{lab}^{e}" for lab, e in zip(labels, self.exponents) if e
            )
        super().__init__(f"monomial equals 1 at these parameters: {text}")


class DegenerateModulus(ParameterError):
    """Raised when |q| >= 1."""


class GenericityExhausted(ParameterError):
    """The sampler could not find generic parameters within its retry budget."""


class PochhammerPole(FlagMirrorError):
    """A vanishing factor sits in the denominator of a Pochhammer symbol."""


class ZeroArgument(FlagMirrorError):
    """Theta function evaluated with a zero square root."""


class DivisionByZeroTheta(FlagMirrorError):
    """A theta function in a denominator vanishes."""


class SymmetrizationPole(DivisionByZeroTheta):
    """A theta(t_b/t_a) denominator of the symmetrization vanishes."""


class ZeroDiagonal(FlagMirrorError):
    """A stable-envelope diagonal restriction vanished."""


class CoincidentCoordinates(FlagMirrorError):
    """Two coordinates of a Macdonald operator coincide."""


class TailTooLarge(FlagMirrorError):
    """The truncated series tail exceeds the tolerance budget."""
