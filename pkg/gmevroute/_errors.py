#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#


class NetworkError(ValueError):
    """
    Raised when a network, route set or input file violates its schema or
    one of the route set invariants.
    """


class DomainError(ValueError):
    """
    Raised when model inputs fall outside the domain of a model, for example
    a nonnegative utility under a multiplicative generating vector.
    """


class DegenerateRouteError(DomainError):
    """
    Raised when a route has no cost left after removing its overlap with a
    reference route.

    :param route: Route whose non-overlapping part is empty.
    :param reference: Reference route.
    """
    def __init__(self, route, reference, message=None):
        self.route = route
        self.reference = reference
        if message is None:
            message = (
                'Route ' + str(route) + ' has zero non-overlapping cost with '
                'reference route ' + str(reference) + '.')
        super(DegenerateRouteError, self).__init__(message)


class ConvergenceError(RuntimeError):
    """
    Raised when an iterative scheme stops at its iteration cap.

    :param message: Description of the failure.
    :param residual: Residual at the last iterate.
    """
    def __init__(self, message, residual=None):
        self.residual = residual
        super(ConvergenceError, self).__init__(message)


class EstimationError(RuntimeError):
    """
    Raised when every start of a maximum-likelihood fit fails.

    :param message: Description of the failure.
    :param diagnostics: One entry per start describing why it failed.
    """
    def __init__(self, message, diagnostics=None):
        self.diagnostics = list(diagnostics or [])
        super(EstimationError, self).__init__(message)


class SpecificationError(ValueError):
    """
    Raised when a model, policy or problem specification is malformed.
    """
