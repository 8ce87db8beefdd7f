"""Exception hierarchy shared by every module of the package."""


class PauliAnnulusError(Exception):
    """Base class for all errors raised by :mod:`pauli_annulus`."""


class DomainError(PauliAnnulusError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvariantError(PauliAnnulusError, RuntimeError):
    """A structural invariant that must hold by construction was violated."""


class NumericalGuardError(PauliAnnulusError, ArithmeticError):
    """A numerical guard (exponent range, spectral gap, ...) failed."""


class ResolutionError(NumericalGuardError):
    """The grid is too coarse to resolve the exponential weight."""


class CoercivityError(NumericalGuardError):
    """The angular-momentum window failed to stabilise."""
