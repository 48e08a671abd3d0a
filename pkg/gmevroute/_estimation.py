#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import concurrent.futures
import logging

import numpy as np
import pandas as pd
import pints

from ._errors import (
    ConvergenceError,
    DomainError,
    EstimationError,
    NetworkError,
    SpecificationError
)
from ._models import GMEVModel, ReducedModel

logger = logging.getLogger(__name__)

#: Margin keeping the utility constant below the cheapest route cost.
CONSTANT_MARGIN = 1e-6

#: Boxes the multi-start values are drawn from.
START_BOXES = {
    'mu_additive': (1e-3, 50.0),
    'mu_multiplicative': (0.1, 200.0),
    'c': (-200.0, 0.0),
    'beta': (-2.0, 5.0),
    'rho': (0.1, 10.0),
    'nest_ratio': (1.0, 1e4),
}

METHODS = {
    'nelder-mead': pints.NelderMead,
    'cmaes': pints.CMAES,
}

# Per-observation log-likelihood returned outside the model domain
_PENALTY = -1e12


class ChoiceDataset(object):
    """
    Observed route choice frequencies over a list of scenarios that share
    their routes.

    Counts are stored as real numbers so that probability-weighted
    observations can be used.

    :param keys: Scenario keys, for example network parameters.
    :param route_sets: One :class:`RouteSet` per scenario.
    :param counts: Array of shape ``(n_scenarios, n_routes)`` of
        nonnegative counts in route order.
    """
    def __init__(self, keys, route_sets, counts):
        keys = list(keys)
        route_sets = list(route_sets)
        counts = np.array(counts, dtype=float)
        if len(keys) == 0:
            raise NetworkError('A dataset needs at least one scenario.')
        if len(route_sets) != len(keys) or counts.ndim != 2 or \
                counts.shape[0] != len(keys):
            raise NetworkError(
                'Expected one route set and one row of counts per scenario.')
        route_ids = route_sets[0].route_ids()
        for rs in route_sets:
            if rs.route_ids() != route_ids:
                raise NetworkError(
                    'All scenarios of a dataset have to share their routes.')
        if counts.shape[1] != len(route_ids):
            raise NetworkError(
                'Expected ' + str(len(route_ids)) + ' counts per scenario.')
        if np.any(~np.isfinite(counts)) or np.any(counts < 0):
            raise NetworkError('Counts have to be nonnegative.')
        if np.any(counts.sum(axis=1) <= 0):
            raise NetworkError(
                'Every scenario needs a positive number of observations.')

        self._keys = keys
        self._route_sets = route_sets
        self._counts = counts
        self._route_ids = route_ids

    @classmethod
    def from_frame(cls, frame, route_set_for):
        """
        Builds a dataset from a long table with columns ``scenario_key``,
        ``route_id`` and ``count``.

        :param frame: A :class:`pandas.DataFrame`.
        :param route_set_for: Callable returning the :class:`RouteSet` of a
            scenario key.
        """
        missing = {'scenario_key', 'route_id', 'count'} - set(frame.columns)
        if missing:
            raise NetworkError(
                'Dataset is missing columns ' + str(sorted(missing)) + '.')
        keys = list(pd.unique(frame['scenario_key']))
        route_sets = [route_set_for(key) for key in keys]
        counts = np.zeros((len(keys), route_sets[0].n_routes()))
        for row, key in enumerate(keys):
            rs = route_sets[row]
            rows = frame[frame['scenario_key'] == key]
            for route_id, count in zip(rows['route_id'], rows['count']):
                counts[row, rs.route_index(str(route_id))] += float(count)
        return cls(keys, route_sets, counts)

    @classmethod
    def read_csv(cls, path, route_set_for):
        """
        Loads a dataset CSV file; lines starting with ``#`` are ignored.
        """
        frame = pd.read_csv(path, comment='#', dtype={'route_id': str})
        return cls.from_frame(frame, route_set_for)

    def to_frame(self):
        """
        Returns the dataset as a long :class:`pandas.DataFrame`.
        """
        rows = []
        for key, counts in zip(self._keys, self._counts):
            for route_id, count in zip(self._route_ids, counts):
                rows.append(
                    {'scenario_key': key, 'route_id': route_id,
                     'count': count})
        return pd.DataFrame(
            rows, columns=['scenario_key', 'route_id', 'count'])

    def keys(self):
        return list(self._keys)

    def route_sets(self):
        return list(self._route_sets)

    def route_ids(self):
        return list(self._route_ids)

    def counts(self):
        return self._counts

    def n_scenarios(self):
        return len(self._keys)

    def n_observations(self):
        return float(np.sum(self._counts))

    def min_route_cost(self):
        return float(min(np.min(rs.route_costs()) for rs in self._route_sets))

    def scaled(self, factor):
        """
        Returns a copy with every count multiplied by ``factor``.
        """
        return ChoiceDataset(
            self._keys, self._route_sets, self._counts * factor)


class ChoiceLogLikelihood(pints.ProblemLogLikelihood):
    r"""
    Multinomial log-likelihood of a route choice model,

    .. math::
        \log L = \sum_s \sum_r n_{sr} \log P_r(\theta; s).

    Extends :class:`pints.ProblemLogLikelihood`.

    :param problem: A :class:`pints.MultiOutputProblem` whose model is a
        :class:`ChoiceModel`, whose times are scenario indices and whose
        values are the counts.
    """
    def __init__(self, problem):
        super(ChoiceLogLikelihood, self).__init__(problem)
        self._model = problem._model
        self._counts = np.asarray(self._values, dtype=float)

    def evaluate(self, parameters):
        """
        Returns the log-likelihood, raising a :class:`DomainError` outside
        the model domain.
        """
        log_p = self._model.log_probabilities(parameters, self._times)
        with np.errstate(invalid='ignore'):
            terms = np.where(self._counts > 0, self._counts * log_p, 0.0)
        return float(np.sum(terms))

    def __call__(self, parameters):
        try:
            return self.evaluate(parameters)
        except DomainError:
            return -np.inf


def _problem(model, data):
    return pints.MultiOutputProblem(
        model, np.arange(data.n_scenarios(), dtype=float), data.counts())


def _model_parameters(model, specification, params):
    # Parameter vector in model order; unspecified entries come from the
    # specification
    params = dict(params or {})
    unknown = set(params) - set(model.parameter_names())
    if unknown:
        raise SpecificationError(
            'Unknown parameters ' + str(sorted(unknown)) + ' for model '
            + specification.name() + '.')
    values = []
    for name in model.parameter_names():
        if name in params:
            values.append(float(params[name]))
        elif name.startswith('mu_'):
            link = model._nest_links[name]
            values.append(float(
                specification.nest_scales.get(
                    link, params.get('mu', specification.mu))))
        else:
            values.append(float(getattr(specification, name)))
    return np.array(values)


def log_likelihood(specification, params, data):
    """
    Returns the log-likelihood of ``data`` under the model ``specification``
    with parameter values ``params``.

    :param specification: A :class:`ModelSpecification`.
    :param params: Dictionary from parameter name to value; parameters not
        listed take the specification's values.
    :param data: A :class:`ChoiceDataset`.
    """
    model = GMEVModel(specification, data.route_sets())
    values = _model_parameters(model, specification, params)
    return ChoiceLogLikelihood(_problem(model, data)).evaluate(values)


def validate(specification, params, data):
    """
    Returns the log-likelihood of fitted parameters on another dataset,
    without refitting.
    """
    return log_likelihood(specification, params, data)


class _SearchSpace(object):
    """
    Maps between model parameters and the unconstrained search space.

    Scales are log-transformed, the utility constant is ``c_max - s^2`` and
    nest scales are ``mu (1 + s^2)``, so the boundaries ``c = c_max`` and
    ``mu_l = mu`` are reachable.
    """
    def __init__(self, names, c_max, allow_small_nest_scales, mu=1.0):
        self._names = list(names)
        self._mu = mu
        self._c_max = c_max
        self._free_nests = allow_small_nest_scales

    def to_model(self, search):
        search = np.asarray(search, dtype=float)
        values = {}
        for name, s in zip(self._names, search):
            if name in ('mu', 'rho'):
                values[name] = np.exp(s)
            elif name == 'c':
                values[name] = self._c_max - s ** 2
            else:
                values[name] = s
        mu = values.get('mu', self._mu)
        for name, s in zip(self._names, search):
            if name.startswith('mu_'):
                values[name] = np.exp(s) if self._free_nests else \
                    mu * (1 + s ** 2)
        return np.array([values[name] for name in self._names])

    def to_search(self, parameters):
        parameters = np.asarray(parameters, dtype=float)
        values = dict(zip(self._names, parameters))
        search = []
        for name in self._names:
            value = values[name]
            if name in ('mu', 'rho'):
                search.append(np.log(value))
            elif name == 'c':
                search.append(np.sqrt(max(self._c_max - value, 0.0)))
            elif name.startswith('mu_'):
                if self._free_nests:
                    search.append(np.log(value))
                else:
                    ratio = value / values.get('mu', self._mu)
                    search.append(np.sqrt(max(ratio - 1, 0.0)))
            else:
                search.append(value)
        return np.array(search)


class _SearchLogLikelihood(pints.LogPDF):
    """
    Log-likelihood per observation as a function of the search vector.
    A reference chain that fails to converge counts as a point outside
    the domain; its message is kept in ``last_error``.
    """
    def __init__(self, log_likelihood, space, n_observations):
        super(_SearchLogLikelihood, self).__init__()
        self._log_likelihood = log_likelihood
        self._space = space
        self._n_observations = n_observations
        self.last_error = None

    def n_parameters(self):
        return self._log_likelihood.n_parameters()

    def __call__(self, search):
        try:
            value = self._log_likelihood(self._space.to_model(search))
        except ConvergenceError as e:
            self.last_error = str(e)
            return _PENALTY
        if not np.isfinite(value):
            return _PENALTY
        return value / self._n_observations


class EstimationResult(object):
    """
    Result of a maximum-likelihood fit.

    :param specification: The fitted :class:`ModelSpecification`.
    :param parameters: Dictionary of all model parameters, fixed ones
        included.
    :param log_likelihood: Log-likelihood at the estimate.
    :param n_observations: Number of observations in the training data.
    :param converged: ``True`` if the best start stopped before its
        iteration cap.
    :param iterations: Iterations of the best start.
    :param pinned: Names of parameters at a domain boundary.
    :param fixed: Dictionary of parameters held fixed.
    :param starts: Per-start diagnostics.
    """
    def __init__(self, specification, parameters, log_likelihood,
                 n_observations, converged, iterations, pinned=(),
                 fixed=None, starts=()):
        self.specification = specification
        self.parameters = dict(parameters)
        self.log_likelihood = float(log_likelihood)
        self.n_observations = float(n_observations)
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.pinned = list(pinned)
        self.fixed = dict(fixed or {})
        self.starts = list(starts)
        self.validation_log_likelihood = None
        self.validation_n_observations = None
        self.standard_errors = None

    def log_likelihood_per_observation(self):
        return self.log_likelihood / self.n_observations

    def set_validation(self, data):
        """
        Evaluates the fitted model on another dataset and stores the
        validation log-likelihood.
        """
        self.validation_log_likelihood = validate(
            self.specification, self.parameters, data)
        self.validation_n_observations = data.n_observations()
        return self.validation_log_likelihood

    def to_dict(self):
        return {
            'model': self.specification.name(),
            'specification': self.specification.to_dict(),
            'parameters': self.parameters,
            'pinned': self.pinned,
            'fixed': self.fixed,
            'log_likelihood': self.log_likelihood,
            'log_likelihood_per_observation':
                self.log_likelihood_per_observation(),
            'n_observations': self.n_observations,
            'converged': self.converged,
            'iterations': self.iterations,
            'validation_log_likelihood': self.validation_log_likelihood,
            'validation_n_observations': self.validation_n_observations,
            'standard_errors': self.standard_errors,
            'starts': self.starts,
        }


class MaximumLikelihoodEstimator(object):
    """
    Multi-start maximum-likelihood estimation of a GMEV model with
    :class:`pints.OptimisationController`.

    Start values are drawn from :data:`START_BOXES` with a seeded generator;
    the first start uses the specification's own values when they lie in the
    model domain.

    Example::

        estimator = MaximumLikelihoodEstimator(specification, data)
        estimator.set_n_starts(5)
        result = estimator.run()

    :param specification: A :class:`ModelSpecification`.
    :param data: A :class:`ChoiceDataset`.
    """
    N_STARTS = 5
    MAX_ITERATIONS = 5000
    MAX_UNCHANGED_ITERATIONS = 200
    UNCHANGED_THRESHOLD = 1e-12

    def __init__(self, specification, data):
        if not isinstance(data, ChoiceDataset):
            raise TypeError('The data has to be a gmevroute.ChoiceDataset.')
        self._specification = specification
        self._data = data
        self._model = ReducedModel(
            GMEVModel(specification, data.route_sets()))
        self._n_starts = self.N_STARTS
        self._seed = 0
        self._max_iterations = self.MAX_ITERATIONS
        self._max_unchanged = self.MAX_UNCHANGED_ITERATIONS
        self._method = 'nelder-mead'
        self._n_workers = 1

    def model(self):
        return self._model

    def set_fixed_parameters(self, name_value_dict):
        """
        Fixes model parameters at the given values.
        """
        self._model.fix_parameters(name_value_dict)

    def set_n_starts(self, n_starts):
        if int(n_starts) < 1:
            raise ValueError('At least one start is needed.')
        self._n_starts = int(n_starts)

    def set_seed(self, seed):
        self._seed = int(seed)

    def set_max_iterations(self, iterations):
        self._max_iterations = int(iterations)

    def set_max_unchanged_iterations(self, iterations):
        self._max_unchanged = int(iterations)

    def set_method(self, method):
        if method not in METHODS:
            raise ValueError(
                'Unknown method ' + repr(method) + '; expected one of '
                + ', '.join(METHODS) + '.')
        self._method = method

    def set_parallel(self, n_workers):
        """
        Runs the starts on ``n_workers`` threads.
        """
        self._n_workers = max(1, int(n_workers))

    def _mu(self):
        # Scale used when mu itself is fixed
        return self._model.fixed_parameters().get('mu', self._specification.mu)

    def _c_max(self):
        return min(0.0, self._data.min_route_cost() - CONSTANT_MARGIN)

    def _starts(self, names):
        rng = np.random.default_rng(self._seed)
        spec = self._specification
        mu_box = START_BOXES[
            'mu_multiplicative' if spec.is_multiplicative() else 'mu_additive']
        c_low, c_high = START_BOXES['c']
        c_high = min(c_high, self._c_max())

        def log_uniform(box):
            return float(np.exp(rng.uniform(np.log(box[0]), np.log(box[1]))))

        starts = []
        own = self._own_start(names)
        if own is not None:
            starts.append(own)
        while len(starts) < self._n_starts:
            values = {}
            for name in names:
                if name == 'mu':
                    values[name] = log_uniform(mu_box)
                elif name == 'c':
                    values[name] = rng.uniform(c_low, c_high)
                elif name == 'beta':
                    values[name] = rng.uniform(*START_BOXES['beta'])
                elif name == 'rho':
                    values[name] = log_uniform(START_BOXES['rho'])
            mu = values.get('mu', self._mu())
            for name in names:
                if name.startswith('mu_'):
                    values[name] = mu * log_uniform(START_BOXES['nest_ratio'])
            starts.append(np.array([values[name] for name in names]))
        return starts[:self._n_starts]

    def _own_start(self, names):
        values = []
        spec = self._specification
        for name in names:
            if name.startswith('mu_'):
                link = self._model._model._nest_links[name]
                values.append(spec.nest_scales.get(link, spec.mu))
            else:
                values.append(getattr(spec, name))
        values = np.array(values, dtype=float)
        if 'c' in names and values[names.index('c')] > self._c_max():
            return None
        return values

    def _run_start(self, index, start, log_likelihood, space, method):
        function = _SearchLogLikelihood(
            log_likelihood, space, self._data.n_observations())
        x0 = space.to_search(start)
        sigma0 = np.maximum(0.5, 0.1 * np.abs(x0))
        diagnostics = {'start': index, 'x0': start.tolist()}
        if not function(x0) > _PENALTY:
            diagnostics['error'] = (
                function.last_error or 'start outside the model domain')
            return None, diagnostics
        try:
            opt = pints.OptimisationController(
                function, x0, sigma0=sigma0, method=method)
            opt.set_max_iterations(self._max_iterations)
            opt.set_max_unchanged_iterations(
                self._max_unchanged, self.UNCHANGED_THRESHOLD)
            opt.set_log_to_screen(False)
            x_best, f_best = opt.run()
        except (ConvergenceError, DomainError, ValueError,
                FloatingPointError) as e:
            diagnostics['error'] = str(e)
            return None, diagnostics
        iterations = opt.iterations()
        diagnostics.update({
            'log_likelihood_per_observation': float(f_best),
            'iterations': int(iterations),
            'converged': bool(iterations < self._max_iterations),
        })
        logger.debug('Start %d of %s: %s', index,
                     self._specification.name(), diagnostics)
        if not f_best > _PENALTY:
            diagnostics['error'] = 'no feasible point found'
            return None, diagnostics
        return (x_best, f_best, iterations), diagnostics

    def run(self):
        """
        Runs every start and returns the :class:`EstimationResult` of the
        best one. Raises an :class:`EstimationError` if all starts fail.
        """
        names = self._model.parameter_names()
        if len(names) == 0:
            raise EstimationError('All model parameters are fixed.')
        log_likelihood = ChoiceLogLikelihood(_problem(self._model, self._data))
        space = _SearchSpace(
            names, self._c_max(), self._specification.allow_small_nest_scales,
            self._mu())
        starts = self._starts(names)
        method = METHODS[self._method]
        if method is pints.CMAES and len(names) == 1:
            # CMA-ES needs at least two dimensions
            logger.warning(
                '%s has a single free parameter; using Nelder-Mead.',
                self._specification.name())
            method = pints.NelderMead

        jobs = list(enumerate(starts))
        if self._n_workers > 1:
            with concurrent.futures.ThreadPoolExecutor(
                    self._n_workers) as executor:
                outcomes = list(executor.map(
                    lambda job: self._run_start(
                        job[0], job[1], log_likelihood, space, method), jobs))
        else:
            outcomes = [self._run_start(index, start, log_likelihood, space,
                                        method)
                        for index, start in jobs]

        diagnostics = [outcome[1] for outcome in outcomes]
        successful = [outcome[0] for outcome in outcomes
                      if outcome[0] is not None]
        if not successful:
            raise EstimationError(
                'Every start of the ' + self._specification.name()
                + ' fit failed.', diagnostics)
        x_best, f_best, iterations = max(successful, key=lambda s: s[1])

        values = dict(zip(names, space.to_model(x_best)))
        pinned = []
        mu = values.get('mu', self._mu())
        c_max = self._c_max()
        if 'c' in values and c_max - values['c'] <= 1e-6 * max(1, abs(c_max)):
            values['c'] = c_max
            pinned.append('c')
        for name in names:
            if name.startswith('mu_') and \
                    not self._specification.allow_small_nest_scales and \
                    values[name] - mu <= 1e-6 * mu:
                values[name] = mu
                pinned.append(name)

        fixed = self._model.fixed_parameters()
        parameters = dict(fixed)
        parameters.update({name: float(value)
                           for name, value in values.items()})
        fitted = self._model.specification(
            np.array([values[name] for name in names]))
        total = log_likelihood.evaluate(
            np.array([values[name] for name in names]))

        result = EstimationResult(
            fitted, parameters, total, self._data.n_observations(),
            converged=iterations < self._max_iterations,
            iterations=iterations, pinned=pinned, fixed=fixed,
            starts=diagnostics)
        logger.info(
            '%s estimated: %s, log-likelihood %g.',
            self._specification.name(), parameters, total)
        return result


def estimate(specification, data, n_starts=MaximumLikelihoodEstimator.N_STARTS,
             seed=0, fixed=None, method='nelder-mead'):
    """
    Fits ``specification`` to ``data`` by multi-start maximum likelihood and
    returns the :class:`EstimationResult`.

    :param specification: A :class:`ModelSpecification`.
    :param data: A :class:`ChoiceDataset`.
    :param n_starts: Number of starts.
    :param seed: Seed of the start values.
    :param fixed: Optional dictionary of parameters held fixed.
    :param method: ``'nelder-mead'`` or ``'cmaes'``.
    """
    estimator = MaximumLikelihoodEstimator(specification, data)
    if fixed:
        estimator.set_fixed_parameters(fixed)
    estimator.set_n_starts(n_starts)
    estimator.set_seed(seed)
    estimator.set_method(method)
    return estimator.run()
