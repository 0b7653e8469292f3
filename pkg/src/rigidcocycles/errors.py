"""Exception types shared across the package."""


class CocycleError(ValueError):
    """Base class for all domain errors raised by this package."""


class NonResidue(CocycleError):
    """Square root requested of a quadratic nonresidue."""


class NotAUnit(CocycleError):
    """Operation requires a p-adic unit (valuation zero)."""


class NotSplit(CocycleError):
    """Discriminant is not a square modulo p."""


class BadDiscriminant(CocycleError):
    """Integer is not congruent to 0 or 1 modulo 4."""


class SquareDiscriminant(CocycleError):
    """Operation requires a nonsquare discriminant."""


class NotHeegner(CocycleError):
    """Form is not divisible by p in its leading coefficient."""


class DiscDivisibleByP(CocycleError):
    """p divides the discriminant, so the annular residue vanishes."""


class EqualEndpoints(CocycleError):
    """Modular-symbol pair with equal endpoints."""


class EvaluationOutsideDomain(CocycleError):
    """Function handle cannot be evaluated at a required point."""


class OnBoundary(CocycleError):
    """Point is indistinguishable from P1(Qp) at working precision."""


class PoleHit(CocycleError):
    """Summand denominator vanishes to working precision."""


class LevelTooShallow(CocycleError):
    """Evaluation point is not separated from the partition balls."""


class OddOrientation(CocycleError):
    """Edge is not in the plus orbit of the standard edge."""


class EndpointIsRoot(CocycleError):
    """Geodesic endpoint coincides with a root of the form."""


class ConfigInvalid(CocycleError):
    """Run configuration violates a module precondition."""
