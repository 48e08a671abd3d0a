#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import concurrent.futures
import logging
import warnings

import numpy as np

from ._errors import DomainError
from ._network import Link, Route, RouteSet

logger = logging.getLogger(__name__)

#: Number of draws per random stream; independent of the worker count.
CHUNK_SIZE = 100000

COVARIANCE_KINDS = ('arithmetic', 'geometric')


class MnpSpecification(object):
    r"""
    Configuration of the multinomial probit ground truth,

    .. math::
        U_r = V^0_r + \beta \hat{\tau}_r + \theta \hat{\tau}_r \xi_r
            + \varepsilon_r,

    where the foreseen travel time error has standard deviation proportional
    to the travel time estimate and the analyst error :math:`\varepsilon_r`
    is independent with standard deviation :math:`\sigma_\varepsilon`.

    :param tau_hat: Positive travel time estimate per route.
    :param theta: Nonnegative proportionality constant of the foreseen
        travel time standard deviation.
    :param sigma_eps: Nonnegative analyst error standard deviation.
    :param cov_kind: ``'arithmetic'`` or ``'geometric'`` mean of the route
        travel times in the overlap covariance.
    :param v0: Other systematic utility per route, zero by default.
    :param beta: Travel time parameter.
    """
    def __init__(self, tau_hat, theta=0.2, sigma_eps=10.0,
                 cov_kind='arithmetic', v0=None, beta=-1.0):
        tau_hat = np.asarray(tau_hat, dtype=float)
        if tau_hat.ndim != 1 or np.any(~(tau_hat > 0)):
            raise DomainError('Travel time estimates have to be positive.')
        if not theta >= 0 or not sigma_eps >= 0:
            raise DomainError('theta and sigma_eps have to be nonnegative.')
        if cov_kind not in COVARIANCE_KINDS:
            raise DomainError(
                'Unknown covariance kind ' + repr(cov_kind) + '.')
        if v0 is None:
            v0 = np.zeros(len(tau_hat))
        v0 = np.asarray(v0, dtype=float)
        if v0.shape != tau_hat.shape:
            raise DomainError('Expected one value of v0 per route.')

        self.tau_hat = tau_hat
        self.theta = float(theta)
        self.sigma_eps = float(sigma_eps)
        self.cov_kind = cov_kind
        self.v0 = v0
        self.beta = float(beta)

    def mean(self):
        """
        Returns the systematic utilities ``v0 + beta * tau_hat``.
        """
        return self.v0 + self.beta * self.tau_hat


def build_covariance(rs, spec, repair=False):
    """
    Returns the covariance matrix of the probit route utilities.

    Off-diagonal entries are ``theta^2 tau_rs m(tau_r, tau_s)`` with
    ``tau_rs`` the overlap cost of the two routes and ``m`` the arithmetic or
    geometric mean; the diagonal is ``theta^2 tau_r^2``. The analyst error
    variance is added to the diagonal.

    :param rs: A :class:`RouteSet` whose link costs are travel times.
    :param spec: A :class:`MnpSpecification`.
    :param repair: Clip negative eigenvalues to zero instead of raising when
        the assembled matrix is not positive semidefinite.
    """
    tau = spec.tau_hat
    if len(tau) != rs.n_routes():
        raise DomainError(
            'Expected ' + str(rs.n_routes()) + ' travel time estimates, got '
            + str(len(tau)) + '.')
    if spec.cov_kind == 'arithmetic':
        means = (tau[:, None] + tau[None, :]) / 2
    else:
        means = np.sqrt(np.outer(tau, tau))
    cov = spec.theta ** 2 * np.array(rs.overlap_costs()) * means
    np.fill_diagonal(cov, spec.theta ** 2 * tau ** 2)
    cov += spec.sigma_eps ** 2 * np.eye(len(tau))

    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    tolerance = 1e-10 * max(1.0, np.max(np.abs(eigenvalues)))
    if np.min(eigenvalues) < -tolerance:
        if not repair:
            raise DomainError(
                'The covariance matrix is not positive semidefinite; smallest '
                'eigenvalue ' + str(np.min(eigenvalues)) + '.')
        message = (
            'Clipping negative covariance eigenvalues; smallest was '
            + str(np.min(eigenvalues)) + '.')
        logger.warning(message)
        warnings.warn(message)
        clipped = np.clip(eigenvalues, 0, None)
        cov = (eigenvectors * clipped) @ eigenvectors.T
        cov = (cov + cov.T) / 2
    return cov


def _factor(cov):
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    # semidefinite matrices have no Cholesky factor
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    tolerance = 1e-10 * max(1.0, np.max(np.abs(eigenvalues)))
    if np.min(eigenvalues) < -tolerance:
        raise DomainError(
            'Cannot factorise a covariance matrix that is not positive '
            'semidefinite.')
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0, None))


def _count_maxima(mean, factor, n, seed_sequence):
    rng = np.random.default_rng(seed_sequence)
    draws = mean + rng.standard_normal((n, len(mean))) @ factor.T
    return np.bincount(np.argmax(draws, axis=1), minlength=len(mean))


def simulate_probabilities(mean, cov, n, seed, stream=(), n_workers=1):
    """
    Estimates the probit choice probabilities by drawing ``n`` joint normal
    utility vectors and counting which route has the highest utility.

    The draws are split into chunks of :data:`CHUNK_SIZE`, each with its own
    random stream spawned from ``seed`` and ``stream``, so the result does
    not depend on ``n_workers``.

    :param mean: Mean utilities.
    :param cov: Covariance matrix.
    :param n: Number of draws.
    :param seed: Nonnegative integer seed.
    :param stream: Extra nonnegative integers identifying the stream, for
        example the scenario.
    :param n_workers: Number of threads.
    :returns: Tuple of choice probabilities and their standard errors.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    n = int(n)
    if n < 1:
        raise ValueError('The number of draws has to be at least 1.')
    if cov.shape != (len(mean), len(mean)):
        raise ValueError('Mean and covariance dimensions do not match.')
    if not np.allclose(cov, cov.T, rtol=0, atol=1e-10):
        raise DomainError('The covariance matrix has to be symmetric.')
    factor = _factor(cov)

    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)
    children = np.random.SeedSequence(
        [int(seed)] + [int(key) for key in stream]).spawn(len(sizes))

    if n_workers > 1 and len(sizes) > 1:
        with concurrent.futures.ThreadPoolExecutor(n_workers) as executor:
            counts = list(executor.map(
                lambda job: _count_maxima(mean, factor, *job),
                zip(sizes, children)))
    else:
        counts = [_count_maxima(mean, factor, size, child)
                  for size, child in zip(sizes, children)]

    probabilities = np.sum(counts, axis=0) / n
    standard_errors = np.sqrt(probabilities * (1 - probabilities) / n)
    return probabilities, standard_errors


def foreseen_variance_share(spec):
    """
    Returns the share of the foreseen travel time error in the utility
    variance of every route.
    """
    foreseen = spec.theta ** 2 * spec.tau_hat ** 2
    return foreseen / (foreseen + spec.sigma_eps ** 2)


def scenario_stream(x):
    """
    Returns the random stream key of the example network at ``x``.
    """
    return (int(round(1000 * float(x))),)


def generate_example_network(x, theta=0.2, sigma_eps=10.0,
                             cov_kind='arithmetic'):
    """
    Returns the five-link, three-route example network at parameter ``x``
    and its probit specification.

    Link travel times are ``x``, ``1.05x + 12``, ``10``, ``0.95x + 8`` and
    ``x``. The upper route uses links 1 and 2, the middle route links 1, 3
    and 5, and the lower route links 4 and 5. Links of zero travel time (at
    ``x = 0``) are left out; they contribute nothing to any cost.

    :param x: Nonnegative network parameter.
    :returns: Tuple of :class:`RouteSet` and :class:`MnpSpecification`.
    """
    x = float(x)
    if not x >= 0:
        raise DomainError('The network parameter x has to be nonnegative.')
    times = {
        '1': x,
        '2': 1.05 * x + 12,
        '3': 10.0,
        '4': 0.95 * x + 8,
        '5': x,
    }
    routes = {
        'upper': ['1', '2'],
        'middle': ['1', '3', '5'],
        'lower': ['4', '5'],
    }
    kept = [link for link in times if times[link] > 0]
    rs = RouteSet(
        [Link(link, times[link]) for link in kept],
        [Route(route, [link for link in links if link in kept])
         for route, links in routes.items()])
    spec = MnpSpecification(
        rs.route_costs(), theta=theta, sigma_eps=sigma_eps, cov_kind=cov_kind)
    return rs, spec
