"""Exception types shared across the package."""


class InvariantError(RuntimeError):
    """Raised when an identity that must hold by construction fails numerically.

    This signals an implementation fault (or a tolerance set far below
    floating-point resolution), never a property of the physics being modelled.
    """
