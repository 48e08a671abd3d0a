#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import numpy as np
from scipy import stats
from scipy.special import gamma

from ._errors import DegenerateRouteError, DomainError
from ._generating_vectors import negative_utilities
from ._reference import function_for_reference


class MomentReport(object):
    """
    Per-route expected values and variances of the random route utilities,
    and the expected maximum utility where it has a closed form.

    :param means: Expected utility per route.
    :param variances: Utility variance per route.
    :param expected_maximum: Expected maximum utility, or ``None``.
    """
    def __init__(self, means, variances, expected_maximum=None):
        self.means = np.asarray(means, dtype=float)
        self.variances = np.asarray(variances, dtype=float)
        if np.any(self.variances < 0):
            raise ValueError('Variances have to be nonnegative.')
        self.expected_maximum = (
            None if expected_maximum is None else float(expected_maximum))

    def to_dict(self, route_ids=None):
        if route_ids is None:
            route_ids = list(range(len(self.means)))
        return {
            'routes': list(route_ids),
            'means': self.means.tolist(),
            'variances': self.variances.tolist(),
            'expected_maximum': self.expected_maximum,
        }


def _check_utilities(G, utilities):
    v = np.asarray(utilities, dtype=float)
    if v.shape != (G.n_routes(),):
        raise ValueError(
            'Expected ' + str(G.n_routes()) + ' utilities, got shape '
            + str(v.shape) + '.')
    return v


def additive_moments(G, utilities):
    r"""
    Returns the moments of an additive model with type I extreme value
    utilities,

    .. math::
        E[U_r] = V_r + \frac{\ln G(1_r) + \gamma}{\mu}, \quad
        Var[U_r] = \frac{\pi^2}{6 \mu^2}, \quad
        E[\max_r U_r] = \frac{\ln G(e^{V}) + \gamma}{\mu}.

    :param G: A :class:`GeneratingFunction`.
    :param utilities: Systematic route utilities ``V``.
    """
    v = _check_utilities(G, utilities)
    mu = G.scale()
    means = v + (G.unit_log_values() + np.euler_gamma) / mu
    variances = np.full(len(v), np.pi ** 2 / (6 * mu ** 2))
    expected_maximum = (G.log_value(v) + np.euler_gamma) / mu
    return MomentReport(means, variances, expected_maximum)


def _gamma_terms(mu):
    first = gamma(1 + 1 / mu)
    return first, gamma(1 + 2 / mu) - first ** 2


def multiplicative_moments(G, utilities):
    r"""
    Returns the moments of a multiplicative model with reversed Weibull
    utilities,

    .. math::
        E[U_r] = \frac{V_r \Gamma(1 + 1/\mu)}{G(1_r)^{1/\mu}}, \quad
        Var[U_r] = \frac{V_r^2 (\Gamma(1 + 2/\mu) - \Gamma(1 + 1/\mu)^2)}
            {G(1_r)^{2/\mu}},

    and expected maximum :math:`-G(-1/V)^{-1/\mu} \Gamma(1 + 1/\mu)`.

    :param G: A :class:`GeneratingFunction`.
    :param utilities: Negative systematic route utilities ``V``.
    """
    v = _check_utilities(G, utilities)
    if np.any(v >= 0):
        raise DomainError(
            'Multiplicative moments need negative utilities.')
    mu = G.scale()
    first, spread = _gamma_terms(mu)
    inverse_scales = np.exp(-G.unit_log_values() / mu)
    means = v * first * inverse_scales
    variances = v ** 2 * spread * inverse_scales ** 2
    expected_maximum = -np.exp(-G.log_value(-np.log(-v)) / mu) * first
    return MomentReport(means, variances, expected_maximum)


def md_conditional_moments(G, rs, u, ref):
    """
    Returns the expected values and variances of the route utilities of a
    multiplicative delta model given reference route ``ref``.

    The reference route keeps its full multiplicative moments. Every other
    route splits into the links it does not share with ``ref``, which carry
    its own error term, and the shared links, which carry the error term of
    ``ref``. The expected maximum is not available.

    :param G: A :class:`GeneratingFunction`, or a callable mapping a
        reference route onto one.
    """
    G = function_for_reference(G, ref)
    v = negative_utilities(rs, u)
    k = rs.route_index(ref)
    mu = G.scale()
    first, spread = _gamma_terms(mu)
    inverse_scales = np.exp(-G.unit_log_values() / mu)

    own = u.constant() - rs.non_overlap_costs()[:, k]
    shared = -rs.overlap_costs()[:, k]
    route_ids = rs.route_ids()
    means = np.empty(rs.n_routes())
    variances = np.empty(rs.n_routes())
    for p in range(rs.n_routes()):
        if p == k:
            means[p] = v[p] * first * inverse_scales[p]
            variances[p] = v[p] ** 2 * spread * inverse_scales[p] ** 2
            continue
        if own[p] >= 0:
            raise DegenerateRouteError(route_ids[p], ref)
        own_term = own[p] * inverse_scales[p]
        shared_term = shared[p] * inverse_scales[k]
        means[p] = (own_term + shared_term) * first
        variances[p] = (own_term ** 2 + shared_term ** 2) * spread
    return MomentReport(means, variances)


def sample_utilities(utilities, mu, kind='additive', n=1, seed=None):
    """
    Draws random route utilities of the independent multinomial models.

    Additive utilities are ``V_r`` plus a Gumbel error with scale ``1/mu``;
    multiplicative utilities are ``V_r`` times a Weibull error with shape
    ``mu``.

    :param utilities: Systematic route utilities ``V``.
    :param mu: Scale parameter.
    :param kind: ``'additive'`` or ``'multiplicative'``.
    :param n: Number of draws.
    :param seed: Seed or :class:`numpy.random.Generator`.
    :returns: Array of shape ``(n, n_routes)``.
    """
    v = np.asarray(utilities, dtype=float)
    if mu <= 0:
        raise DomainError('The scale parameter mu has to be positive.')
    rng = np.random.default_rng(seed)
    shape = (int(n), len(v))
    if kind == 'additive':
        return v + stats.gumbel_r.rvs(
            scale=1 / mu, size=shape, random_state=rng)
    if kind == 'multiplicative':
        if np.any(v >= 0):
            raise DomainError(
                'Multiplicative utilities need negative systematic '
                'utilities.')
        return v * stats.weibull_min.rvs(mu, size=shape, random_state=rng)
    raise ValueError('Unknown utility kind ' + repr(kind) + '.')
