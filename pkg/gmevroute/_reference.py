#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import logging
import numbers

import numpy as np
from scipy.special import logsumexp

from ._errors import (
    ConvergenceError,
    DegenerateRouteError,
    DomainError,
    NetworkError,
    SpecificationError
)
from ._generating_functions import log_choice_probabilities
from ._generating_vectors import GeneratingVector, negative_utilities

logger = logging.getLogger(__name__)


class MultiplicativeDeltaVector(GeneratingVector):
    r"""
    Reference-route generating vector of the multiplicative delta models.

    With reference route :math:`r`, the entry of route :math:`p \neq r` is
    the ratio of the utilities of the links that the two routes do not
    share,

    .. math::
        y_p = \frac{\Delta_{r \setminus p} - c}{\Delta_{p \setminus r} - c},

    where :math:`\Delta_{p \setminus r}` is the cost of the links of
    :math:`p` not on :math:`r` and every route carries its own copy of the
    utility constant :math:`c`. The entry of the reference route is 1.

    Extends :class:`GeneratingVector`.

    :param reference: Identifier of the reference route.
    """
    code = 'MD'

    def __init__(self, reference):
        self._reference = reference

    def reference(self):
        return self._reference

    def is_multiplicative(self):
        return True

    def log_values(self, rs, u):
        negative_utilities(rs, u)
        k = rs.route_index(self._reference)
        delta = rs.non_overlap_costs()
        c = u.constant()
        numerators = delta[k, :] - c
        denominators = delta[:, k] - c

        route_ids = rs.route_ids()
        log_y = np.zeros(rs.n_routes())
        for p in range(rs.n_routes()):
            if p == k:
                continue
            if numerators[p] <= 0 or denominators[p] <= 0:
                if numerators[p] < 0 or denominators[p] < 0:
                    raise DomainError(
                        'Non-overlapping utility of routes '
                        + str(route_ids[p]) + ' and ' + str(self._reference)
                        + ' is not negative for constant c = ' + str(c) + '.')
                raise DegenerateRouteError(route_ids[p], self._reference)
            log_y[p] = np.log(numerators[p]) - np.log(denominators[p])
        return log_y


def md_gen_vector(rs, u, ref):
    """
    Returns the multiplicative delta generating vector of route set ``rs``
    for reference route ``ref``.
    """
    return np.exp(MultiplicativeDeltaVector(ref).log_values(rs, u))


def function_for_reference(G, ref):
    # G is a generating function or a callable building one per reference
    if callable(G) and not hasattr(G, 'log_gradient'):
        return G(ref)
    return G


def conditional_probabilities(G, rs, u, ref):
    """
    Returns the probabilities of choosing each route of ``rs`` given
    reference route ``ref``.

    :param G: A :class:`GeneratingFunction`, or a callable that maps a
        reference route identifier onto one.
    """
    log_y = MultiplicativeDeltaVector(ref).log_values(rs, u)
    G = function_for_reference(G, ref)
    probabilities = np.exp(log_choice_probabilities(G, log_y))
    return probabilities / np.sum(probabilities)


def conditional_matrix(G, rs, u, references=None):
    """
    Returns the conditional choice matrix; row ``r`` holds the choice
    probabilities given reference route ``r``.

    :param references: Optional subset of reference routes. Rows of other
        routes are filled with ``nan``.
    """
    route_ids = rs.route_ids()
    if references is None:
        references = route_ids
    matrix = np.full((rs.n_routes(), rs.n_routes()), np.nan)
    for ref in references:
        matrix[rs.route_index(ref)] = conditional_probabilities(G, rs, u, ref)
    return matrix


class ReferencePolicy(object):
    """
    Abstract base class for the rules that assign probabilities to the
    reference routes of a multiplicative delta model.
    """
    def references(self, route_ids):
        """
        Returns the reference routes whose conditional probabilities are
        needed.
        """
        return list(route_ids)

    def distribution(self, matrix, route_ids=None):
        """
        Returns the probability of every route being the reference route.
        """
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    @staticmethod
    def from_dict(data):
        """
        Builds a policy from its JSON form ``{"policy": "equal" | "markov" |
        "fixed", "ref": ..., "tol": ..., "max_iter": ...}``.
        """
        if isinstance(data, str):
            data = {'policy': data}
        if not isinstance(data, dict) or 'policy' not in data:
            raise SpecificationError(
                'A reference policy needs a "policy" entry.')
        name = data['policy']
        if name == 'equal':
            return EqualPolicy()
        if name == 'markov':
            return MarkovChainPolicy(
                tolerance=data.get('tol', MarkovChainPolicy.TOLERANCE),
                max_iterations=data.get(
                    'max_iter', MarkovChainPolicy.MAX_ITERATIONS))
        if name == 'fixed':
            if 'ref' not in data:
                raise SpecificationError(
                    'A fixed reference policy needs "ref".')
            return FixedPolicy(data['ref'])
        raise SpecificationError(
            'Unknown reference policy ' + repr(name) + '.')


class EqualPolicy(ReferencePolicy):
    """
    Every route is the reference route with equal probability.

    Extends :class:`ReferencePolicy`.
    """
    def distribution(self, matrix, route_ids=None):
        n = len(matrix)
        return np.full(n, 1.0 / n)

    def to_dict(self):
        return {'policy': 'equal'}


class FixedPolicy(ReferencePolicy):
    """
    A single route is always the reference route.

    Extends :class:`ReferencePolicy`.

    :param ref: Identifier of the reference route, or its position when no
        route identifiers are supplied.
    """
    def __init__(self, ref):
        self._ref = ref

    def reference(self):
        return self._ref

    def references(self, route_ids):
        if self._ref not in list(route_ids):
            raise NetworkError('Unknown reference route ' + str(self._ref)
                               + '.')
        return [self._ref]

    def distribution(self, matrix, route_ids=None):
        n = len(matrix)
        if route_ids is not None:
            route_ids = list(route_ids)
            if self._ref not in route_ids:
                raise NetworkError(
                    'Unknown reference route ' + str(self._ref) + '.')
            k = route_ids.index(self._ref)
        elif isinstance(self._ref, numbers.Integral) and 0 <= self._ref < n:
            k = int(self._ref)
        else:
            raise NetworkError(
                'Reference route ' + str(self._ref) + ' cannot be resolved '
                'without route identifiers.')
        distribution = np.zeros(n)
        distribution[k] = 1.0
        return distribution

    def to_dict(self):
        return {'policy': 'fixed', 'ref': self._ref}


class MarkovChainPolicy(ReferencePolicy):
    """
    Reference probabilities equal to the choice probabilities, found as the
    stationary distribution of the conditional choice matrix by power
    iteration from the uniform vector.

    Extends :class:`ReferencePolicy`.

    :param tolerance: Sup-norm tolerance on ``pi - pi M``.
    :param max_iterations: Iteration cap.
    """
    TOLERANCE = 1e-10
    MAX_ITERATIONS = 10000

    def __init__(self, tolerance=TOLERANCE, max_iterations=MAX_ITERATIONS):
        tolerance = float(tolerance)
        if not tolerance > 0:
            raise DomainError('The Markov chain tolerance has to be positive.')
        if int(max_iterations) < 1:
            raise DomainError(
                'The Markov chain iteration cap has to be at least 1.')
        self._tolerance = tolerance
        self._max_iterations = int(max_iterations)

    def tolerance(self):
        return self._tolerance

    def max_iterations(self):
        return self._max_iterations

    def distribution(self, matrix, route_ids=None, start=None):
        matrix = np.asarray(matrix, dtype=float)
        n = len(matrix)
        if start is None:
            pi = np.full(n, 1.0 / n)
        else:
            pi = np.asarray(start, dtype=float)
            pi = pi / np.sum(pi)

        residual = np.inf
        for iteration in range(1, self._max_iterations + 1):
            following = pi @ matrix
            following /= np.sum(following)
            residual = np.max(np.abs(following - pi))
            pi = following
            if residual <= self._tolerance:
                logger.debug(
                    'Markov chain converged after %d iterations.', iteration)
                return pi

        raise ConvergenceError(
            'Markov chain reference policy did not converge within '
            + str(self._max_iterations) + ' iterations; residual '
            + str(residual) + '.', residual=residual)

    def to_dict(self):
        return {
            'policy': 'markov',
            'tol': self._tolerance,
            'max_iter': self._max_iterations,
        }


def _check_conditional_matrix(matrix):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError('A conditional choice matrix has to be square.')
    if np.any(~(matrix > 0)):
        raise DomainError(
            'Conditional choice probabilities have to be strictly positive.')
    if not np.allclose(matrix.sum(axis=1), 1, rtol=0, atol=1e-9):
        raise DomainError(
            'Rows of a conditional choice matrix have to sum to one.')
    return matrix


def reference_distribution(policy, M, route_ids=None):
    """
    Returns the reference-route probabilities under ``policy`` for the
    conditional choice matrix ``M``.
    """
    return policy.distribution(_check_conditional_matrix(M), route_ids)


def log_md_probabilities(G, rs, u, policy):
    """
    Returns the log choice probabilities of a multiplicative delta model.
    The conditional rows and the mixture stay in log space, so routes with
    negligible probability keep a finite value.

    :param G: A :class:`GeneratingFunction`, or a callable mapping a
        reference route onto one.
    """
    route_ids = rs.route_ids()
    references = policy.references(route_ids)
    rows = [rs.route_index(ref) for ref in references]

    n = rs.n_routes()
    log_matrix = np.full((n, n), -np.inf)
    for ref, row in zip(references, rows):
        log_y = MultiplicativeDeltaVector(ref).log_values(rs, u)
        log_matrix[row] = log_choice_probabilities(
            function_for_reference(G, ref), log_y)
    matrix = np.exp(log_matrix)

    if len(references) < n:
        weights = policy.distribution(matrix, route_ids)
    else:
        weights = reference_distribution(policy, matrix, route_ids)
    with np.errstate(divide='ignore'):
        log_weights = np.log(weights[rows])
    log_p = logsumexp(log_weights[:, None] + log_matrix[rows], axis=0)
    return log_p - logsumexp(log_p)


def md_probabilities(G, rs, u, policy):
    """
    Returns the choice probabilities of a multiplicative delta model, the
    mixture of the conditional probabilities over the reference-route
    distribution of ``policy``.

    :param G: A :class:`GeneratingFunction`, or a callable mapping a
        reference route onto one.
    """
    probabilities = np.exp(log_md_probabilities(G, rs, u, policy))
    return probabilities / np.sum(probabilities)
