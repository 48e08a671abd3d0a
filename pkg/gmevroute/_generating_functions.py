#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import numpy as np
from scipy.special import logsumexp

from ._errors import DomainError
from ._network import (
    inclusion_matrix,
    path_size_factors,
    ref_path_size_factors,
    similarity_matrix,
    SIMILARITY_EPSILON
)


class GeneratingFunction(object):
    """
    Abstract base class for the mu-homogeneous generating functions of the
    GMEV route choice models.

    Subclasses work in log space: :meth:`log_value` and :meth:`log_gradient`
    take ``log(z)`` and return ``log(G(z))`` and ``log(dG/dz_r)``. Entries of
    ``log(z)`` may be ``-inf`` (a zero argument) when evaluating ``G`` at
    unit vectors.

    :param mu: Scale parameter, has to be positive.
    :type mu: float
    """
    def __init__(self, mu):
        super(GeneratingFunction, self).__init__()
        mu = float(mu)
        if not np.isfinite(mu) or mu <= 0:
            raise DomainError(
                'The scale parameter mu has to be positive, got '
                + str(mu) + '.')
        self._mu = mu

    def scale(self):
        """
        Returns the scale parameter ``mu``, the degree of homogeneity.
        """
        return self._mu

    def n_routes(self):
        """
        Returns the number of routes the function is defined on.
        """
        raise NotImplementedError

    def log_value(self, log_z):
        """
        Returns ``log(G(z))``.
        """
        raise NotImplementedError

    def log_gradient(self, log_z):
        """
        Returns the vector ``log(G_r(z))`` of log partial derivatives.
        """
        raise NotImplementedError

    def unit_log_values(self):
        """
        Returns the vector ``log(G(1_r))`` of the function evaluated at every
        unit vector.
        """
        n = self.n_routes()
        values = np.empty(n)
        for r in range(n):
            log_z = np.full(n, -np.inf)
            log_z[r] = 0.0
            values[r] = self.log_value(log_z)
        return values


class MultinomialFunction(GeneratingFunction):
    r"""
    Generating function of the independent multinomial models,

    .. math::
        G(z) = \sum_r z_r^\mu.

    Extends :class:`GeneratingFunction`.

    :param mu: Scale parameter.
    :param n_routes: Number of routes.
    """
    def __init__(self, mu, n_routes):
        super(MultinomialFunction, self).__init__(mu)
        self._n_routes = int(n_routes)

    def n_routes(self):
        return self._n_routes

    def log_value(self, log_z):
        with np.errstate(divide='ignore'):
            return logsumexp(self._mu * log_z)

    def log_gradient(self, log_z):
        return np.log(self._mu) + (self._mu - 1) * log_z


class PathSizeFunction(GeneratingFunction):
    r"""
    Generating function of the path-size models,

    .. math::
        G(z) = \sum_r PS_r^\beta z_r^\mu.

    Extends :class:`GeneratingFunction`.

    :param mu: Scale parameter.
    :param beta: Path-size exponent.
    :param factors: Path-size factors, each in ``(0, 1]``.
    """
    def __init__(self, mu, beta, factors):
        super(PathSizeFunction, self).__init__(mu)
        factors = np.asarray(factors, dtype=float)
        if factors.ndim != 1 or np.any(factors <= 0) or np.any(
                factors > 1 + 1e-12):
            raise DomainError('Path-size factors have to lie in (0, 1].')
        self._beta = float(beta)
        self._factors = factors
        self._log_weights = self._beta * np.log(factors)

    @classmethod
    def from_route_set(cls, rs, mu, beta, reference=None):
        """
        Builds the function on a route set, using the reference-specific
        path-size factors when ``reference`` is given.
        """
        if reference is None:
            factors = path_size_factors(rs)
        else:
            factors = ref_path_size_factors(rs, reference)
        return cls(mu, beta, factors)

    def beta(self):
        return self._beta

    def factors(self):
        return self._factors

    def n_routes(self):
        return len(self._factors)

    def log_value(self, log_z):
        with np.errstate(divide='ignore'):
            return logsumexp(self._log_weights + self._mu * log_z)

    def log_gradient(self, log_z):
        return self._log_weights + np.log(self._mu) + (self._mu - 1) * log_z


class PairedCombinatorialFunction(GeneratingFunction):
    r"""
    Generating function of the paired combinatorial models,

    .. math::
        G(z) = \sum_r \sum_{p \neq r}
            \left(z_r^{\mu/(1-\varphi_{rp})} + z_p^{\mu/(1-\varphi_{rp})}
            \right)^{1-\varphi_{rp}},

    summed over ordered pairs.

    Extends :class:`GeneratingFunction`.

    :param mu: Scale parameter.
    :param similarity: Symmetric matrix of similarity indices; the diagonal
        is ignored.
    """
    def __init__(self, mu, similarity):
        super(PairedCombinatorialFunction, self).__init__(mu)
        phi = np.array(similarity, dtype=float)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1] or phi.shape[0] < 2:
            raise DomainError(
                'Similarity indices have to form a square matrix of at least '
                'two routes.')
        np.fill_diagonal(phi, 0.0)
        if np.any(phi < 0) or np.any(phi > 1 - SIMILARITY_EPSILON + 1e-15):
            raise DomainError(
                'Similarity indices have to lie in [0, 1 - '
                + str(SIMILARITY_EPSILON) + '].')
        if not np.allclose(phi, phi.T, rtol=0, atol=1e-12):
            raise DomainError('Similarity indices have to be symmetric.')

        self._phi = phi
        self._exponents = self._mu / (1 - phi)
        self._off_diagonal = ~np.eye(len(phi), dtype=bool)

    @classmethod
    def from_route_set(cls, rs, mu):
        return cls(mu, similarity_matrix(rs))

    def similarity(self):
        return self._phi

    def n_routes(self):
        return len(self._phi)

    def _log_pair_sums(self, log_z):
        # log(z_r^a + z_p^a) for every ordered pair
        a = self._exponents
        return np.logaddexp(a * log_z[:, None], a * log_z[None, :])

    def log_value(self, log_z):
        with np.errstate(divide='ignore', invalid='ignore'):
            terms = (1 - self._phi) * self._log_pair_sums(log_z)
            return logsumexp(terms[self._off_diagonal])

    def log_gradient(self, log_z):
        with np.errstate(divide='ignore', invalid='ignore'):
            terms = ((self._exponents - 1) * log_z[:, None]
                     - self._phi * self._log_pair_sums(log_z))
            terms = np.where(self._off_diagonal, terms, -np.inf)
            return np.log(2 * self._mu) + logsumexp(terms, axis=1)


class LinkNestedFunction(GeneratingFunction):
    r"""
    Generating function of the link-nested models, a cross-nested structure
    with one nest per link,

    .. math::
        G(z) = \sum_l \left(\sum_r \alpha_{lr} z_r^{\mu_l}\right)^{\mu/\mu_l}.

    Links used by no route are dropped.

    Extends :class:`GeneratingFunction`.

    :param mu: Scale parameter.
    :param inclusion: Inclusion coefficients of shape ``(n_links,
        n_routes)``.
    :param nest_scales: Nest scale per link. Each has to be at least ``mu``
        unless ``allow_small_nest_scales`` is set.
    :param allow_small_nest_scales: Accept nest scales below ``mu``.
    """
    def __init__(self, mu, inclusion, nest_scales,
                 allow_small_nest_scales=False):
        super(LinkNestedFunction, self).__init__(mu)
        alpha = np.asarray(inclusion, dtype=float)
        nest_scales = np.asarray(nest_scales, dtype=float)
        if alpha.ndim != 2 or nest_scales.shape != (alpha.shape[0],):
            raise DomainError(
                'Expected one nest scale per row of the inclusion matrix.')
        if np.any(alpha < 0):
            raise DomainError('Inclusion coefficients have to be nonnegative.')
        if np.any(~np.isfinite(nest_scales)) or np.any(nest_scales <= 0):
            raise DomainError('Nest scales have to be positive.')
        if not allow_small_nest_scales and np.any(
                nest_scales < self._mu * (1 - 1e-12)):
            raise DomainError(
                'Nest scales have to be at least mu = ' + str(self._mu)
                + '; got ' + str(np.min(nest_scales)) + '.')

        used = np.any(alpha > 0, axis=1)
        self._n_routes = alpha.shape[1]
        self._alpha = alpha[used]
        self._nest_scales = nest_scales[used]

    @classmethod
    def from_route_set(cls, rs, mu, nest_scales=None,
                       allow_small_nest_scales=False):
        """
        Builds the function on a route set. ``nest_scales`` maps link
        identifiers to nest scales; links not listed use ``mu``, and scales
        of links missing from the route set are ignored so that one model
        can be evaluated on several scenarios.
        """
        nest_scales = dict(nest_scales or {})
        scales = np.array([
            float(nest_scales.get(link_id, mu)) for link_id in rs.link_ids()])
        return cls(mu, inclusion_matrix(rs), scales, allow_small_nest_scales)

    def inclusion(self):
        return self._alpha

    def nest_scales(self):
        return self._nest_scales

    def n_routes(self):
        return self._n_routes

    def _log_nest_sums(self, log_z):
        with np.errstate(divide='ignore', invalid='ignore'):
            return logsumexp(
                self._nest_scales[:, None] * log_z[None, :], b=self._alpha,
                axis=1)

    def log_value(self, log_z):
        log_s = self._log_nest_sums(log_z)
        with np.errstate(divide='ignore', invalid='ignore'):
            return logsumexp(self._mu / self._nest_scales * log_s)

    def log_gradient(self, log_z):
        log_s = self._log_nest_sums(log_z)
        with np.errstate(divide='ignore', invalid='ignore'):
            exponents = (
                (self._nest_scales[:, None] - 1) * log_z[None, :]
                + (self._mu / self._nest_scales - 1)[:, None] * log_s[:, None])
            return np.log(self._mu) + logsumexp(
                exponents, b=self._alpha, axis=0)


def _check_argument(G, z):
    z = np.asarray(z, dtype=float)
    if z.shape != (G.n_routes(),):
        raise ValueError(
            'Expected a vector of length ' + str(G.n_routes()) + ', got shape '
            + str(z.shape) + '.')
    if np.any(~np.isfinite(z)) or np.any(z <= 0):
        raise DomainError('Generating function arguments have to be positive.')
    return z


def eval_G(G, z):
    """
    Evaluates the generating function ``G`` at a positive vector ``z``.
    """
    z = _check_argument(G, z)
    return float(np.exp(G.log_value(np.log(z))))


def grad_G(G, z):
    """
    Returns the analytic partial derivatives of ``G`` at a positive vector
    ``z``.
    """
    z = _check_argument(G, z)
    return np.exp(G.log_gradient(np.log(z)))


def log_choice_probabilities(G, log_y):
    """
    Returns log choice probabilities ``log(y_r G_r(y) / sum_p y_p G_p(y))``
    for a generating vector given by its logarithm.
    """
    log_y = np.asarray(log_y, dtype=float)
    if log_y.shape != (G.n_routes(),):
        raise ValueError(
            'Expected a generating vector of length ' + str(G.n_routes())
            + ', got shape ' + str(log_y.shape) + '.')
    if np.any(~np.isfinite(log_y)):
        raise DomainError('Generating vectors have to be strictly positive.')
    terms = log_y + G.log_gradient(log_y)
    return terms - logsumexp(terms)


def choice_probabilities(G, y):
    """
    Returns the choice probabilities ``P_r = y_r G_r(y) / sum_p y_p G_p(y)``.

    :param G: A :class:`GeneratingFunction`.
    :param y: Strictly positive generating vector.
    """
    y = _check_argument(G, y)
    probabilities = np.exp(log_choice_probabilities(G, np.log(y)))
    return probabilities / np.sum(probabilities)
