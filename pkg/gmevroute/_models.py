#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import copy
import json
import numbers

import numpy as np
import pints

from ._errors import SpecificationError
from ._generating_functions import (
    LinkNestedFunction,
    log_choice_probabilities,
    MultinomialFunction,
    PairedCombinatorialFunction,
    PathSizeFunction
)
from ._generating_vectors import (
    AdditiveVector,
    HybridAdditiveVector,
    HybridMultiplicativeVector,
    MultiplicativeVector,
    UtilitySpecification
)
from ._reference import (
    log_md_probabilities,
    MarkovChainPolicy,
    MultiplicativeDeltaVector,
    ReferencePolicy
)

#: Generating function codes.
FUNCTIONS = ('MN', 'PS', 'PC', 'LN')

#: Generating vector codes.
VECTORS = ('A', 'M', 'MD', 'HA', 'HM')

_VECTOR_NAMES = {'A': 'A', 'M': 'M', 'MD': 'MΔ', 'HA': 'HA', 'HM': 'HM'}


def _real(data, key, default):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise SpecificationError(
            'Model entry "' + key + '" has to be a number, got '
            + repr(value) + '.')
    return float(value)


class ModelSpecification(object):
    """
    One GMEV route choice model: a generating function, a generating vector
    and their parameters.

    :param function: Generating function code, one of ``'MN'``, ``'PS'``,
        ``'PC'``, ``'LN'``.
    :param vector: Generating vector code, one of ``'A'`` (additive), ``'M'``
        (multiplicative), ``'MD'`` (multiplicative delta), ``'HA'`` and
        ``'HM'`` (hybrids).
    :param mu: Scale parameter.
    :param beta: Path-size exponent (``PS`` only).
    :param rho: Ratio of scales (hybrids only).
    :param c: Utility constant. Ignored by additive vectors.
    :param nest_scales: Mapping from link identifier to nest scale (``LN``
        only); unlisted links use ``mu``.
    :param reference_policy: A :class:`ReferencePolicy` (``MD`` only);
        defaults to the Markov chain policy.
    :param reference_path_size: Use reference-specific path-size factors in
        ``MD-PS`` models.
    :param allow_small_nest_scales: Accept nest scales below ``mu``.
    """
    def __init__(self, function='MN', vector='A', mu=1.0, beta=0.0, rho=1.0,
                 c=0.0, nest_scales=None, reference_policy=None,
                 reference_path_size=False, allow_small_nest_scales=False):
        if function not in FUNCTIONS:
            raise SpecificationError(
                'Unknown generating function ' + repr(function) + '; expected '
                'one of ' + ', '.join(FUNCTIONS) + '.')
        if vector not in VECTORS:
            raise SpecificationError(
                'Unknown generating vector ' + repr(vector) + '; expected '
                'one of ' + ', '.join(VECTORS) + '.')
        if reference_policy is None:
            reference_policy = MarkovChainPolicy()
        if not isinstance(reference_policy, ReferencePolicy):
            reference_policy = ReferencePolicy.from_dict(reference_policy)

        self.function = function
        self.vector = vector
        self.mu = float(mu)
        self.beta = float(beta)
        self.rho = float(rho)
        self.c = float(c)
        self.nest_scales = dict(nest_scales or {})
        self.reference_policy = reference_policy
        self.reference_path_size = bool(reference_path_size)
        self.allow_small_nest_scales = bool(allow_small_nest_scales)

    @classmethod
    def from_dict(cls, data):
        """
        Builds a specification from the model JSON schema ``{"function",
        "vector", "mu", "beta"?, "rho"?, "c"?, "nest_scales"?,
        "reference_policy"?, "reference_path_size"?,
        "allow_small_nest_scales"?}``.
        """
        if not isinstance(data, dict):
            raise SpecificationError('A model has to be a JSON object.')
        for key in ('function', 'vector', 'mu'):
            if key not in data:
                raise SpecificationError('A model needs "' + key + '".')
        nest_scales = data.get('nest_scales', {})
        if not isinstance(nest_scales, dict):
            raise SpecificationError(
                'Model entry "nest_scales" has to be an object.')
        return cls(
            function=data['function'],
            vector=data['vector'],
            mu=_real(data, 'mu', 1.0),
            beta=_real(data, 'beta', 0.0),
            rho=_real(data, 'rho', 1.0),
            c=_real(data, 'c', 0.0),
            nest_scales={
                link: _real(nest_scales, link, None) for link in nest_scales},
            reference_policy=data.get('reference_policy'),
            reference_path_size=data.get('reference_path_size', False),
            allow_small_nest_scales=data.get(
                'allow_small_nest_scales', False))

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SpecificationError(
                'Model file ' + str(path) + ' is not valid JSON: ' + str(e))
        return cls.from_dict(data)

    def to_dict(self):
        data = {
            'function': self.function,
            'vector': self.vector,
            'mu': self.mu,
        }
        if self.function == 'PS':
            data['beta'] = self.beta
        if self.is_multiplicative():
            data['c'] = self.c
        if self.vector in ('HA', 'HM'):
            data['rho'] = self.rho
        if self.function == 'LN':
            data['nest_scales'] = dict(self.nest_scales)
            data['allow_small_nest_scales'] = self.allow_small_nest_scales
        if self.vector == 'MD':
            data['reference_policy'] = self.reference_policy.to_dict()
            data['reference_path_size'] = self.reference_path_size
        return data

    def name(self):
        """
        Returns the model name, for example ``'A-MN'`` or ``'MΔ-PS'``.
        """
        return _VECTOR_NAMES[self.vector] + '-' + self.function

    def is_multiplicative(self):
        """
        Returns ``True`` for models that need negative utilities.
        """
        return self.vector != 'A'

    def with_parameters(self, **parameters):
        """
        Returns a copy with the given attributes replaced.
        """
        other = copy.copy(self)
        other.nest_scales = dict(self.nest_scales)
        for key, value in parameters.items():
            if not hasattr(other, key):
                raise SpecificationError(
                    'Unknown model attribute ' + repr(key) + '.')
            setattr(other, key, value)
        return other

    def utility(self):
        """
        Returns the :class:`UtilitySpecification` of the model.
        """
        return UtilitySpecification(self.c if self.is_multiplicative() else 0)

    def build_function(self, rs, reference=None):
        """
        Returns the generating function of the model on route set ``rs``.
        ``reference`` selects reference-specific path-size factors.
        """
        if self.function == 'MN':
            return MultinomialFunction(self.mu, rs.n_routes())
        if self.function == 'PS':
            return PathSizeFunction.from_route_set(
                rs, self.mu, self.beta, reference)
        if self.function == 'PC':
            return PairedCombinatorialFunction.from_route_set(rs, self.mu)
        return LinkNestedFunction.from_route_set(
            rs, self.mu, self.nest_scales, self.allow_small_nest_scales)

    def function_factory(self, rs):
        """
        Returns the generating function of a multiplicative delta model,
        either one function or a callable building one per reference route.
        """
        if self.function == 'PS' and self.reference_path_size:
            return lambda ref: self.build_function(rs, ref)
        return self.build_function(rs)

    def build_vector(self, reference=None):
        """
        Returns the generating vector of the model.
        """
        if self.vector == 'A':
            return AdditiveVector()
        if self.vector == 'M':
            return MultiplicativeVector()
        if self.vector == 'HA':
            return HybridAdditiveVector(self.rho)
        if self.vector == 'HM':
            return HybridMultiplicativeVector(self.rho)
        return MultiplicativeDeltaVector(reference)


def log_model_probabilities(rs, specification, utility=None):
    """
    Returns the log choice probabilities of a model on route set ``rs``.
    """
    u = specification.utility() if utility is None else utility
    if specification.vector == 'MD':
        return log_md_probabilities(
            specification.function_factory(rs), rs, u,
            specification.reference_policy)
    G = specification.build_function(rs)
    log_y = specification.build_vector().log_values(rs, u)
    return log_choice_probabilities(G, log_y)


def model_probabilities(rs, specification, utility=None):
    """
    Returns the choice probabilities of a model on route set ``rs``.

    :param rs: A :class:`RouteSet`.
    :param specification: A :class:`ModelSpecification`.
    :param utility: Optional :class:`UtilitySpecification` replacing the
        one implied by the specification's constant.
    """
    probabilities = np.exp(log_model_probabilities(rs, specification, utility))
    return probabilities / np.sum(probabilities)


class ChoiceModel(pints.ForwardModel):
    """
    Abstract base class for route choice models over a list of scenarios.

    The ``times`` passed to :meth:`simulate` are scenario indices, and the
    outputs are the choice probabilities of the routes.

    Extends :class:`pints.ForwardModel`.
    """
    def __init__(self):
        super(ChoiceModel, self).__init__()

    def n_outputs(self):
        """
        Returns the number of model outputs.
        """
        raise NotImplementedError

    def n_parameters(self):
        """
        Returns the number of model parameters.
        """
        raise NotImplementedError

    def output_names(self):
        """
        Returns the names of the model outputs.
        """
        raise NotImplementedError

    def parameter_names(self):
        """
        Returns the names of the model parameters.
        """
        raise NotImplementedError

    def log_probabilities(self, parameters, times):
        """
        Returns the log choice probabilities, an array of shape
        ``(n_times, n_outputs)``.

        :param parameters: An array-like object with parameter values of length
            :meth:`n_parameters`.
        :type parameters: list | numpy.ndarray
        :param times: Scenario indices.
        :type times: list | numpy.ndarray
        """
        raise NotImplementedError

    def simulate(self, parameters, times):
        """
        Returns the choice probabilities, a NumPy array of shape
        ``(n_times, n_outputs)``.

        :param parameters: An array-like object with parameter values of length
            :meth:`n_parameters`.
        :type parameters: list | numpy.ndarray
        :param times: Scenario indices.
        :type times: list | numpy.ndarray
        """
        return np.exp(self.log_probabilities(parameters, times))


def shared_links(route_sets):
    """
    Returns the identifiers of the links used by at least two routes in any
    of the route sets, in order of first appearance.
    """
    links = []
    for rs in route_sets:
        for link_id, usage in zip(rs.link_ids(), rs.link_usage()):
            if usage >= 2 and link_id not in links:
                links.append(link_id)
    return links


class GMEVModel(ChoiceModel):
    """
    A GMEV route choice model evaluated on a list of scenario route sets that
    share their route identifiers.

    The parameters are ``mu``, then ``beta`` for path-size models, ``c`` for
    models with a multiplicative vector, ``rho`` for hybrids and
    ``mu_<link>`` for every link-nested nest shared by two or more routes.
    Nests of unshared links keep the scale ``mu``.

    Extends :class:`ChoiceModel`.

    :param specification: A :class:`ModelSpecification`; its parameter
        values are the template the parameters are inserted into.
    :param route_sets: Scenario route sets.
    """
    def __init__(self, specification, route_sets):
        super(GMEVModel, self).__init__()
        route_sets = list(route_sets)
        if len(route_sets) == 0:
            raise SpecificationError('A choice model needs a scenario.')
        route_ids = route_sets[0].route_ids()
        for rs in route_sets[1:]:
            if rs.route_ids() != route_ids:
                raise SpecificationError(
                    'All scenarios have to share the same routes.')

        self._specification = specification
        self._route_sets = route_sets
        self._output_names = route_ids

        names = ['mu']
        if specification.function == 'PS':
            names.append('beta')
        if specification.is_multiplicative():
            names.append('c')
        if specification.vector in ('HA', 'HM'):
            names.append('rho')
        self._nest_links = {}
        if specification.function == 'LN':
            for link_id in shared_links(route_sets):
                self._nest_links['mu_' + str(link_id)] = link_id
                names.append('mu_' + str(link_id))
        self._parameter_names = names
        self._n_parameters = len(names)

    def n_outputs(self):
        return len(self._output_names)

    def n_parameters(self):
        return self._n_parameters

    def n_scenarios(self):
        return len(self._route_sets)

    def output_names(self):
        return list(self._output_names)

    def parameter_names(self):
        return list(self._parameter_names)

    def route_sets(self):
        return list(self._route_sets)

    def specification(self, parameters=None):
        """
        Returns the model specification with ``parameters`` inserted.
        """
        if parameters is None:
            return self._specification
        parameters = np.asarray(parameters, dtype=float)
        if parameters.shape != (self._n_parameters,):
            raise ValueError(
                'Expected ' + str(self._n_parameters) + ' parameters, got '
                'shape ' + str(parameters.shape) + '.')

        values = {}
        nest_scales = dict(self._specification.nest_scales)
        for name, value in zip(self._parameter_names, parameters):
            if name in self._nest_links:
                nest_scales[self._nest_links[name]] = float(value)
            else:
                values[name] = float(value)
        if self._specification.function == 'LN':
            values['nest_scales'] = nest_scales
        return self._specification.with_parameters(**values)

    def scenario_indices(self, times):
        indices = np.round(np.asarray(times, dtype=float)).astype(int)
        if np.any(indices < 0) or np.any(indices >= len(self._route_sets)):
            raise ValueError(
                'Scenario indices have to lie in [0, '
                + str(len(self._route_sets) - 1) + '].')
        return indices

    def log_probabilities(self, parameters, times):
        specification = self.specification(parameters)
        indices = self.scenario_indices(times)
        output = np.empty((len(indices), self.n_outputs()))
        for row, index in enumerate(indices):
            output[row] = log_model_probabilities(
                self._route_sets[index], specification)
        return output


class ReducedModel(ChoiceModel):
    """
    Wraps a :class:`ChoiceModel` and holds some of its parameters at fixed
    values, for example the utility constant ``c`` at zero. The remaining
    parameters keep their order.

    Extends :class:`ChoiceModel`.

    :param model: The :class:`ChoiceModel` to wrap.
    """
    def __init__(self, model):
        super(ReducedModel, self).__init__()
        if not isinstance(model, ChoiceModel):
            raise TypeError(
                'The model has to be an instance of a gmevroute.ChoiceModel.')
        self._model = model
        self._names = [str(name) for name in model.parameter_names()]
        self._fixed = {}

    def fix_parameters(self, name_value_dict):
        """
        Fixes the named parameters at the given values. A value of ``None``
        frees the parameter again.

        :param name_value_dict: Mapping from parameter name to value.
        :type name_value_dict: dict
        """
        if not isinstance(name_value_dict, dict):
            raise ValueError(
                'Fixed parameters have to be given as a name-value '
                'dictionary.')
        unknown = set(name_value_dict) - set(self._names)
        if unknown:
            raise ValueError(
                'Unknown model parameters ' + str(sorted(unknown)) + '.')
        for name, value in name_value_dict.items():
            if value is None:
                self._fixed.pop(name, None)
            else:
                self._fixed[name] = float(value)

    def fixed_parameters(self):
        """
        Returns a dictionary of the fixed parameters and their values.
        """
        return {
            name: self._fixed[name] for name in self._names
            if name in self._fixed}

    def n_fixed_parameters(self):
        return len(self._fixed)

    def n_outputs(self):
        return self._model.n_outputs()

    def n_parameters(self):
        return len(self._names) - len(self._fixed)

    def output_names(self):
        return self._model.output_names()

    def parameter_names(self):
        return [name for name in self._names if name not in self._fixed]

    def full_parameters(self, parameters):
        """
        Returns the parameters of the wrapped model, with the fixed values
        inserted.
        """
        parameters = np.asarray(parameters, dtype=float).reshape(-1)
        if len(parameters) != self.n_parameters():
            raise ValueError(
                'Expected ' + str(self.n_parameters()) + ' parameters, got '
                + str(len(parameters)) + '.')
        free = iter(parameters)
        return np.array([
            self._fixed[name] if name in self._fixed else next(free)
            for name in self._names])

    def specification(self, parameters=None):
        if parameters is None:
            return self._model.specification()
        return self._model.specification(self.full_parameters(parameters))

    def n_scenarios(self):
        return self._model.n_scenarios()

    def route_sets(self):
        return self._model.route_sets()

    def log_probabilities(self, parameters, times):
        return self._model.log_probabilities(
            self.full_parameters(parameters), times)
