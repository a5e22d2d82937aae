"""Exception types raised across nlslab."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateInputError(ValueError):
    """The input carries no weight to normalise against (e.g. zero trace)."""


class PreconditionError(ValueError):
    """A closed-form expression was asked for outside its validity condition."""


class UnphysicalRegimeError(DomainError):
    """Paired attenuation would need nu > 1, i.e. gain below 1/tau."""


class PhysicalityError(AssertionError):
    """A density operator lost Hermiticity or positivity during a debug check."""
