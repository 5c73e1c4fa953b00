"""Exception hierarchy shared by all modules."""


class ConnexionLabError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ConnexionLabError):
    pass


class ZeroLeadingTerm(ConnexionLabError):
    pass


class IrrationalRootOfUnity(ConnexionLabError):
    pass


class InsufficientTruncation(ConnexionLabError):
    pass


class NonIntegralIrregularity(ConnexionLabError):
    pass


class NilpotentLeading(ConnexionLabError):
    pass


class IrrationalSpectrum(ConnexionLabError):
    pass


class NotLogarithmic(ConnexionLabError):
    pass


class RamificationGuardExceeded(ConnexionLabError):
    pass


class DomainError(ConnexionLabError):
    pass


class BadDominanceOrder(ConnexionLabError):
    pass


class InconsistentResidues(ConnexionLabError):
    pass


class UnstableDimensions(ConnexionLabError):
    pass


class NonconvergentQuadrature(ConnexionLabError):
    pass


class SectorContainsCosZero(ConnexionLabError):
    pass


class NotMonotone(ConnexionLabError):
    pass


class UnboundedRatio(ConnexionLabError):
    pass
