#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import logging

import numpy as np
import pandas as pd

from ._dataset_library_api import DatasetLibrary
from ._errors import DomainError, EstimationError
from ._estimation import ChoiceDataset, MaximumLikelihoodEstimator
from ._models import FUNCTIONS, model_probabilities, ModelSpecification
from ._probit import (
    build_covariance,
    generate_example_network,
    scenario_stream,
    simulate_probabilities
)
from ._reference import EqualPolicy, MarkovChainPolicy

logger = logging.getLogger(__name__)

#: Tolerance below which a probability change counts as no change.
BEHAVIOUR_TOLERANCE = 1e-10

#: Outcomes of the behaviour check as printed for A-MN, M-MN and MΔ-MN.
EXPECTED_BEHAVIOUR = {
    'B': '=',
    'C1': 'converge',
    'C2': 'diverge',
}
RECORDED_BEHAVIOUR = {
    'A-MN': {'B': '=', 'C1': '=', 'C2': 'diverge'},
    'M-MN': {'B': 'converge', 'C1': 'converge', 'C2': 'diverge'},
    'MΔ-MN': {'B': '=', 'C1': 'converge', 'C2': 'diverge'},
}


def default_models():
    """
    Returns the twelve model instances of the example network study: the
    four generating functions combined with the additive, multiplicative and
    multiplicative delta vectors.

    The delta models use the Markov chain policy with the multinomial and
    path-size functions and the equal policy otherwise.
    """
    models = []
    for vector in ('A', 'M', 'MD'):
        for function in FUNCTIONS:
            if vector == 'A':
                spec = ModelSpecification(function, vector, mu=0.1)
            else:
                policy = None
                if vector == 'MD':
                    policy = MarkovChainPolicy() \
                        if function in ('MN', 'PS') else EqualPolicy()
                spec = ModelSpecification(
                    function, vector, mu=5.0, c=-1.0,
                    reference_policy=policy)
            models.append(spec)
    return models


class NetworkExperiment(object):
    """
    Estimation and validation study on the five-link example network.

    Multinomial probit probabilities are simulated for every network
    parameter ``x``; the probabilities of two ranges of ``x`` are turned into
    datasets of ``n`` observations per scenario. Every model is estimated on
    each dataset and validated on the other.

    Example::

        experiment = NetworkExperiment(n=100000, seed=1)
        truth = experiment.ground_truth()
        results = experiment.run()

    :param n: Number of probit draws, and observations, per scenario.
    :param seed: Seed of the probit draws and of the multi-start values.
    :param theta: Proportionality constant of the foreseen travel time
        standard deviation.
    :param sigma_eps: Analyst error standard deviation.
    :param cov_kind: ``'arithmetic'`` or ``'geometric'``.
    :param n_workers: Number of threads of the probit simulation.
    """
    X_VALUES = tuple(range(41))
    DATASETS = {
        'short': tuple(range(5, 16)),
        'long': tuple(range(25, 36)),
    }

    def __init__(self, n=100000, seed=0, theta=0.2, sigma_eps=10.0,
                 cov_kind='arithmetic', n_workers=1):
        if int(n) < 1:
            raise ValueError('The number of draws has to be at least 1.')
        self._n = int(n)
        self._seed = int(seed)
        self._theta = theta
        self._sigma_eps = sigma_eps
        self._cov_kind = cov_kind
        self._n_workers = n_workers
        self._x_values = list(self.X_VALUES)
        self._datasets = dict(self.DATASETS)
        self._models = default_models()
        self._n_starts = MaximumLikelihoodEstimator.N_STARTS
        self._truth = {}

    def set_x_values(self, x_values):
        self._x_values = [float(x) for x in x_values]

    def set_datasets(self, datasets):
        """
        Sets the named ranges of ``x`` the datasets are built from.
        """
        datasets = {name: tuple(xs) for name, xs in dict(datasets).items()}
        if len(datasets) == 0:
            raise ValueError('At least one dataset is needed.')
        self._datasets = datasets

    def set_models(self, models):
        self._models = list(models)

    def set_n_starts(self, n_starts):
        self._n_starts = int(n_starts)

    def models(self):
        return list(self._models)

    def route_set(self, x):
        return generate_example_network(
            x, self._theta, self._sigma_eps, self._cov_kind)[0]

    def simulate(self, x):
        """
        Returns the probit probabilities and standard errors at ``x``.
        """
        x = float(x)
        if x not in self._truth:
            rs, spec = generate_example_network(
                x, self._theta, self._sigma_eps, self._cov_kind)
            cov = build_covariance(rs, spec)
            self._truth[x] = simulate_probabilities(
                spec.mean(), cov, self._n, self._seed,
                stream=scenario_stream(x), n_workers=self._n_workers)
        return self._truth[x]

    def ground_truth(self):
        """
        Returns the probit probabilities over the ``x`` grid as a
        :class:`pandas.DataFrame` with one row per ``x``.
        """
        rows = []
        route_ids = self.route_set(self._x_values[0]).route_ids()
        for x in self._x_values:
            probabilities, errors = self.simulate(x)
            row = {'x': x}
            row.update(dict(zip(route_ids, probabilities)))
            row.update({
                'se_' + route: error
                for route, error in zip(route_ids, errors)})
            rows.append(row)
        return pd.DataFrame(rows)

    def dataset(self, name):
        """
        Returns the named dataset; its counts are the simulated
        probabilities times ``n``.
        """
        xs = self._datasets[name]
        counts = [self.simulate(x)[0] * self._n for x in xs]
        return ChoiceDataset(
            [float(x) for x in xs], [self.route_set(x) for x in xs], counts)

    def estimate(self, specification, train):
        """
        Estimates one model on the dataset ``train`` and validates it on the
        other datasets. Returns the :class:`EstimationResult`.
        """
        estimator = MaximumLikelihoodEstimator(
            specification, self.dataset(train))
        estimator.set_n_starts(self._n_starts)
        estimator.set_seed(self._seed)
        result = estimator.run()
        for name in self._datasets:
            if name != train:
                result.set_validation(self.dataset(name))
        return result

    def run(self):
        """
        Estimates every model on every dataset.

        Returns a dictionary from ``(model name, dataset name)`` to
        :class:`EstimationResult`, or to the :class:`EstimationError` of a
        failed fit.
        """
        results = {}
        for specification in self._models:
            for train in self._datasets:
                key = (specification.name(), train)
                try:
                    results[key] = self.estimate(specification, train)
                except EstimationError as e:
                    logger.warning('%s on %s failed: %s', key[0], train, e)
                    results[key] = e
        return results

    @staticmethod
    def results_frame(results):
        """
        Returns the estimation and validation summary of :meth:`run` as a
        :class:`pandas.DataFrame`.
        """
        rows = []
        for (model, train), result in results.items():
            row = {'model': model, 'train': train}
            if isinstance(result, EstimationError):
                row['error'] = str(result)
            else:
                row.update(result.parameters)
                row.update({
                    'log_likelihood': result.log_likelihood,
                    'log_likelihood_per_observation':
                        result.log_likelihood_per_observation(),
                    'validation_log_likelihood':
                        result.validation_log_likelihood,
                    'pinned': ' '.join(result.pinned),
                    'converged': result.converged,
                })
            rows.append(row)
        return pd.DataFrame(rows)

    def curves(self, results):
        """
        Returns the probabilities of every fitted model over the ``x`` grid
        as a long :class:`pandas.DataFrame`; points outside a model's domain
        are ``NaN``.
        """
        rows = []
        for (model, train), result in results.items():
            if isinstance(result, EstimationError):
                continue
            for x in self._x_values:
                rs = self.route_set(x)
                try:
                    probabilities = model_probabilities(
                        rs, result.specification)
                except DomainError:
                    probabilities = np.full(rs.n_routes(), np.nan)
                for route, p in zip(rs.route_ids(), probabilities):
                    rows.append({
                        'model': model, 'train': train, 'x': x,
                        'route_id': route, 'probability': p})
        return pd.DataFrame(rows)


def _trend(before, after):
    if np.max(np.abs(after - before)) <= BEHAVIOUR_TOLERANCE:
        return '='
    if abs(after[0] - after[1]) < abs(before[0] - before[1]):
        return 'converge'
    return 'diverge'


def behaviour_check(mu=1.0, c=-1.0):
    """
    Compares the choice probabilities of A-MN, M-MN and MΔ-MN on the
    two-route network A with those on networks B, C1 and C2.

    Returns a :class:`pandas.DataFrame` with one row per model and network
    change: the observed trend (``'='``, ``'converge'`` or ``'diverge'``),
    the trend expected of travellers, whether the model shows it and whether
    the observed trend is the one recorded for the model.

    :param mu: Scale of the three models.
    :param c: Utility constant of the multiplicative models; it has to be
        negative for MΔ-MN to diverge on C2.
    """
    library = DatasetLibrary()
    base = library.behaviour_network('A')
    models = [
        ModelSpecification('MN', 'A', mu=mu),
        ModelSpecification('MN', 'M', mu=mu, c=c),
        ModelSpecification(
            'MN', 'MD', mu=mu, c=c, reference_policy=EqualPolicy()),
    ]
    rows = []
    for spec in models:
        before = model_probabilities(base, spec)
        for change, expected in EXPECTED_BEHAVIOUR.items():
            after = model_probabilities(
                library.behaviour_network(change), spec)
            observed = _trend(before, after)
            rows.append({
                'model': spec.name(),
                'network': change,
                'observed': observed,
                'expected': expected,
                'realistic': observed == expected,
                'matches_record':
                    observed == RECORDED_BEHAVIOUR[spec.name()][change],
            })
    return pd.DataFrame(rows)
