#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import numpy as np

from ._errors import DomainError


class UtilitySpecification(object):
    """
    Systematic route utilities ``V_r = c - cost_r``, with the travel cost
    parameter normalised to -1.

    The constant ``c`` is fixed at zero for additive models, where it is not
    identified. Multiplicative models need ``c`` below the cheapest route
    cost so that every utility is negative.

    :param constant: The constant ``c``.
    :type constant: float
    """
    def __init__(self, constant=0.0):
        constant = float(constant)
        if not np.isfinite(constant):
            raise DomainError('The utility constant has to be finite.')
        self._constant = constant

    def constant(self):
        return self._constant

    def utilities(self, rs):
        """
        Returns the systematic utility of every route of ``rs``.
        """
        return self._constant - rs.route_costs()

    def __repr__(self):
        return 'UtilitySpecification(constant=' + repr(self._constant) + ')'


def negative_utilities(rs, u):
    """
    Returns the utilities of ``rs`` under ``u`` after checking that all are
    negative, as multiplicative generating vectors require.
    """
    v = u.utilities(rs)
    if np.any(v >= 0):
        r = rs.route_ids()[int(np.argmax(v))]
        raise DomainError(
            'Multiplicative models need negative utilities; route ' + str(r)
            + ' has utility ' + str(float(np.max(v))) + ' with constant c = '
            + str(u.constant()) + '.')
    return v


class GeneratingVector(object):
    """
    Abstract base class for generating vectors, the map from systematic
    utilities to the positive argument of a generating function.
    """
    #: Short code used in model names and specification files.
    code = None

    def is_multiplicative(self):
        """
        Returns ``True`` if the vector needs negative utilities.
        """
        raise NotImplementedError

    def log_values(self, rs, u):
        """
        Returns ``log(y)`` for route set ``rs`` under utilities ``u``.
        """
        raise NotImplementedError


class AdditiveVector(GeneratingVector):
    """
    The additive generating vector ``y_r = exp(V_r)``.

    Extends :class:`GeneratingVector`.
    """
    code = 'A'

    def is_multiplicative(self):
        return False

    def log_values(self, rs, u):
        return u.utilities(rs)


class MultiplicativeVector(GeneratingVector):
    """
    The multiplicative generating vector ``y_r = -1 / V_r``.

    Extends :class:`GeneratingVector`.
    """
    code = 'M'

    def is_multiplicative(self):
        return True

    def log_values(self, rs, u):
        return -np.log(-negative_utilities(rs, u))


class _HybridVector(GeneratingVector):
    def __init__(self, rho):
        rho = float(rho)
        if not np.isfinite(rho) or rho <= 0:
            raise DomainError(
                'The hybrid scale ratio rho has to be positive, got '
                + str(rho) + '.')
        self._rho = rho

    def rho(self):
        return self._rho

    def is_multiplicative(self):
        return True


class HybridAdditiveVector(_HybridVector):
    """
    Hybrid generating vector ``y_r = exp(V_r) / (-V_r)^rho`` built around
    the additive vector.

    Extends :class:`GeneratingVector`.

    :param rho: Positive ratio between the additive and multiplicative
        scales.
    """
    code = 'HA'

    def log_values(self, rs, u):
        v = negative_utilities(rs, u)
        return v - self._rho * np.log(-v)


class HybridMultiplicativeVector(_HybridVector):
    """
    Hybrid generating vector ``y_r = exp(V_r / rho) / (-V_r)`` built around
    the multiplicative vector.

    Extends :class:`GeneratingVector`.

    :param rho: Positive ratio between the additive and multiplicative
        scales.
    """
    code = 'HM'

    def log_values(self, rs, u):
        v = negative_utilities(rs, u)
        return v / self._rho - np.log(-v)


def gen_vector(kind, rs, u):
    """
    Returns the generating vector of the given kind for route set ``rs``
    under utilities ``u``.

    :param kind: A :class:`GeneratingVector`.
    :param rs: A :class:`RouteSet`.
    :param u: A :class:`UtilitySpecification`.
    """
    return np.exp(kind.log_values(rs, u))
