"""Exception types shared across the package."""


class FractafoldError(Exception):
    """Base class for all package errors."""


class ConvergenceError(FractafoldError):
    """An iteration or quadrature failed to meet its tolerance within the cap."""


class DiscriminantError(FractafoldError, ValueError):
    """No real inverse branch exists for the requested value."""


class PoleError(FractafoldError, ValueError):
    """A closed form was evaluated at one of its poles."""


class ForbiddenEigenvalueError(FractafoldError, ValueError):
    """The local extension system is singular at this eigenvalue."""


class SizeCapError(FractafoldError, ValueError):
    """A dense computation was requested above the configured size cap."""


class AdmissibilityError(FractafoldError, ValueError):
    """An eigenvalue address is not admissible for the requested construction."""


class NotInE6Error(FractafoldError, ValueError):
    """A function on the honeycomb edge graph fails the triangle criterion."""


class GraphError(FractafoldError, ValueError):
    """Invalid graph parameters or mismatched graph pairs."""
