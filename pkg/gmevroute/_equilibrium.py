#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import logging
import numbers

import numpy as np
from scipy.special import logsumexp

from ._core import IterationCollector
from ._errors import DomainError, SpecificationError
from ._models import log_model_probabilities, ModelSpecification
from ._network import RouteSet
from ._reference import FixedPolicy

logger = logging.getLogger(__name__)

STEP_RULES = ('msa', 'sra')


class LinkCostFunction(object):
    """
    Abstract base class for nondecreasing link cost functions of the link
    flow.

    :param t0: Positive free-flow cost.
    """
    def __init__(self, t0):
        if isinstance(t0, bool) or not isinstance(t0, numbers.Real) or not (
                t0 > 0 and np.isfinite(t0)):
            raise SpecificationError(
                'The free-flow cost t0 has to be positive, got '
                + repr(t0) + '.')
        self._t0 = float(t0)

    def free_flow(self):
        return self._t0

    def __call__(self, flow):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    @staticmethod
    def from_dict(data):
        """
        Builds a cost function from ``{"type": "constant" | "affine" |
        "bpr", "t0": ..., ...}``.
        """
        if not isinstance(data, dict) or 'type' not in data:
            raise SpecificationError('A cost function needs a "type".')
        kind = data['type']
        try:
            if kind == 'constant':
                return ConstantCost(data['t0'])
            if kind == 'affine':
                return AffineCost(data['t0'], data['slope'])
            if kind == 'bpr':
                return BPRCost(
                    data['t0'], data['capacity'], data.get('a', 0.15),
                    data.get('b', 4.0))
        except KeyError as e:
            raise SpecificationError(
                'Cost function of type ' + repr(kind) + ' needs '
                + str(e) + '.')
        raise SpecificationError('Unknown cost function type ' + repr(kind))


class ConstantCost(LinkCostFunction):
    """
    Flow-independent link cost.

    Extends :class:`LinkCostFunction`.
    """
    def __call__(self, flow):
        return self._t0 + 0 * np.asarray(flow, dtype=float)

    def to_dict(self):
        return {'type': 'constant', 't0': self._t0}


class AffineCost(LinkCostFunction):
    """
    Link cost ``t0 + slope * flow``.

    Extends :class:`LinkCostFunction`.

    :param t0: Positive free-flow cost.
    :param slope: Nonnegative cost increase per unit flow.
    """
    def __init__(self, t0, slope):
        super(AffineCost, self).__init__(t0)
        if not slope >= 0:
            raise SpecificationError('The slope has to be nonnegative.')
        self._slope = float(slope)

    def __call__(self, flow):
        return self._t0 + self._slope * np.asarray(flow, dtype=float)

    def to_dict(self):
        return {'type': 'affine', 't0': self._t0, 'slope': self._slope}


class BPRCost(LinkCostFunction):
    """
    Bureau of Public Roads link cost ``t0 (1 + a (flow / capacity)^b)``.

    Extends :class:`LinkCostFunction`.
    """
    def __init__(self, t0, capacity, a=0.15, b=4.0):
        super(BPRCost, self).__init__(t0)
        if not capacity > 0:
            raise SpecificationError('The capacity has to be positive.')
        if not a >= 0 or not b >= 0:
            raise SpecificationError('BPR parameters have to be nonnegative.')
        self._capacity = float(capacity)
        self._a = float(a)
        self._b = float(b)

    def __call__(self, flow):
        ratio = np.asarray(flow, dtype=float) / self._capacity
        return self._t0 * (1 + self._a * ratio ** self._b)

    def to_dict(self):
        return {'type': 'bpr', 't0': self._t0, 'capacity': self._capacity,
                'a': self._a, 'b': self._b}


class SUEProblem(object):
    """
    A stochastic user equilibrium problem for one origin-destination pair.

    :param route_set: A :class:`RouteSet`; its link costs are used for links
        without a cost function.
    :param demand: Positive demand ``D``.
    :param cost_functions: Mapping from link identifier to
        :class:`LinkCostFunction`.
    :param specification: The :class:`ModelSpecification` of the route
        choice model.
    """
    def __init__(self, route_set, demand, cost_functions, specification):
        if not demand > 0:
            raise SpecificationError('The demand has to be positive.')
        cost_functions = dict(cost_functions)
        unknown = set(cost_functions) - set(route_set.link_ids())
        if unknown:
            raise SpecificationError(
                'Cost functions given for unknown links '
                + str(sorted(str(link) for link in unknown)) + '.')
        self._rs = route_set
        self._demand = float(demand)
        self._specification = specification
        self._functions = [
            cost_functions.get(link_id) for link_id in route_set.link_ids()]
        self._experimental = (
            specification.vector == 'MD'
            and not isinstance(specification.reference_policy, FixedPolicy))
        if self._experimental:
            logger.warning(
                'Equilibrium with a %s reference policy is experimental; the '
                'mixture is not a single generating-function model.',
                type(specification.reference_policy).__name__)

    @classmethod
    def from_dict(cls, data):
        """
        Builds a problem from ``{"network", "demand", "cost_functions",
        "model"}``.
        """
        if not isinstance(data, dict):
            raise SpecificationError('A problem has to be a JSON object.')
        for key in ('network', 'demand', 'model'):
            if key not in data:
                raise SpecificationError('A problem needs "' + key + '".')
        functions = data.get('cost_functions', {})
        if not isinstance(functions, dict):
            raise SpecificationError('"cost_functions" has to be an object.')
        return cls(
            RouteSet.from_dict(data['network']),
            data['demand'],
            {link: LinkCostFunction.from_dict(function)
             for link, function in functions.items()},
            ModelSpecification.from_dict(data['model']))

    def route_set(self):
        return self._rs

    def demand(self):
        return self._demand

    def specification(self):
        return self._specification

    def is_experimental(self):
        return self._experimental

    def route_set_at(self, flows):
        """
        Returns the route set with link costs evaluated at route flows
        ``flows``.
        """
        link_flows = self._rs.incidence() @ flows
        costs = np.array(self._rs.link_costs())
        for index, function in enumerate(self._functions):
            if function is not None:
                costs[index] = function(link_flows[index])
        return self._rs.with_link_costs(costs)

    def check_flows(self, flows):
        flows = np.asarray(flows, dtype=float)
        if flows.shape != (self._rs.n_routes(),):
            raise ValueError(
                'Expected ' + str(self._rs.n_routes()) + ' route flows.')
        if np.any(~(flows > 0)):
            raise DomainError('Route flows have to be strictly positive.')
        if abs(np.sum(flows) - self._demand) > 1e-9 * self._demand:
            raise DomainError(
                'Route flows have to sum to the demand ' + str(self._demand)
                + ', got ' + str(np.sum(flows)) + '.')
        return flows

    def evaluate(self, flows):
        """
        Returns the log choice probabilities and the generalised costs at
        route flows ``flows``.
        """
        flows = self.check_flows(flows)
        rs = self.route_set_at(flows)
        spec = self._specification
        if self._experimental:
            log_p = log_model_probabilities(rs, spec)
            return log_p, -log_p + np.log(flows)

        reference = None
        if spec.vector == 'MD':
            reference = spec.reference_policy.reference()
        G = spec.build_function(
            rs, reference if spec.reference_path_size else None)
        log_y = spec.build_vector(reference).log_values(rs, spec.utility())
        terms = log_y + G.log_gradient(log_y)
        return terms - logsumexp(terms), -terms + np.log(flows)

    def free_flow_probabilities(self):
        """
        Returns the choice probabilities at zero flow.
        """
        rs = self.route_set_at(np.zeros(self._rs.n_routes()))
        log_p = log_model_probabilities(rs, self._specification)
        probabilities = np.exp(log_p)
        return probabilities / np.sum(probabilities)

    def probabilities(self, flows):
        """
        Returns the choice probabilities at route flows ``flows``.
        """
        log_p, _ = self.evaluate(flows)
        return np.exp(log_p)


def generalized_cost(problem, f):
    """
    Returns the generalised stochastic cost ``-ln(y_r G_r(y)) + ln f_r`` of
    every route at route flows ``f``, with ``y`` built from the link costs
    at ``f``.
    """
    return problem.evaluate(f)[1]


def _gap(flows, costs):
    lowest = np.min(costs)
    excess = float(np.sum(flows * (costs - lowest)))
    denominator = abs(float(np.sum(flows) * lowest))
    if denominator <= 1e-12 * max(1.0, excess):
        return excess, True
    return excess / denominator, False


def duality_gap(problem, f):
    """
    Returns the relative duality gap
    ``sum_r f_r (c_r - min c) / |sum_r f_r min c|`` of route flows ``f``.
    When the denominator vanishes the absolute gap is returned and a warning
    is logged.
    """
    flows = problem.check_flows(f)
    gap, absolute = _gap(flows, generalized_cost(problem, flows))
    if absolute:
        logger.warning('Degenerate duality gap denominator; reporting the '
                       'absolute gap %g.', gap)
    return gap


def successive_averages(problem, step_rule='msa'):
    """
    Iterates the method of successive averages towards the stochastic user
    equilibrium of ``problem``.

    Starts from the flows the model assigns at free-flow costs and moves
    towards ``D * P(f)`` with step ``1 / (k + 1)`` (``'msa'``), or with the
    self-regulated step ``1 / b_k`` (``'sra'``), where ``b_k`` grows by 1.5
    when the residual grew and by 0.01 when it fell.

    Yields
    -------
    Tuple ``(iteration, flows, costs, gap, residual, gap_is_absolute)`` for
    every iterate, starting at iteration 0. The generator never stops on its
    own.
    """
    if step_rule not in STEP_RULES:
        raise SpecificationError('Unknown step rule ' + repr(step_rule) + '.')
    demand = problem.demand()
    flows = demand * problem.free_flow_probabilities()
    iteration = 0
    weight = 1.0
    previous_residual = np.inf
    while True:
        log_p, costs = problem.evaluate(flows)
        target = demand * np.exp(log_p)
        residual = float(np.max(np.abs(flows - target))) / demand
        gap, absolute = _gap(flows, costs)
        yield iteration, flows, costs, gap, residual, absolute

        if step_rule == 'msa':
            step = 1.0 / (iteration + 1)
        else:
            if iteration > 0:
                weight += 1.5 if residual >= previous_residual else 0.01
            step = 1.0 / weight
        previous_residual = residual

        flows = flows + step * (target - flows)
        flows = flows * (demand / np.sum(flows))
        iteration += 1


class SUESolution(object):
    """
    Result of :class:`SUESolver`.

    :param flows: Route flows.
    :param costs: Generalised costs at ``flows``.
    :param gap: Duality gap at ``flows``.
    :param residual: ``max_r |f_r / D - P_r(f)|`` at ``flows``.
    :param iterations: Number of iterations run.
    :param converged: ``True`` if the tolerances were met.
    :param gap_is_absolute: ``True`` if ``gap`` is an absolute gap.
    :param trajectory: :class:`pandas.DataFrame` of the iterations.
    :param route_ids: Route identifiers.
    """
    def __init__(self, flows, costs, gap, residual, iterations, converged,
                 gap_is_absolute, trajectory, route_ids):
        self.flows = np.array(flows)
        self.costs = np.array(costs)
        self.gap = float(gap)
        self.residual = float(residual)
        self.iterations = int(iterations)
        self.converged = bool(converged)
        self.gap_is_absolute = bool(gap_is_absolute)
        self.trajectory = trajectory
        self.route_ids = list(route_ids)

    def to_dict(self):
        return {
            'routes': self.route_ids,
            'flows': self.flows.tolist(),
            'generalized_costs': self.costs.tolist(),
            'duality_gap': self.gap,
            'gap_is_absolute': self.gap_is_absolute,
            'residual': self.residual,
            'iterations': self.iterations,
            'converged': self.converged,
        }


class SUESolver(object):
    """
    Solves a :class:`SUEProblem` with the method of successive averages.

    Example::

        solver = SUESolver(problem)
        solver.set_gap_tolerance(1e-8)
        solution = solver.run()

    :param problem: A :class:`SUEProblem`.
    """
    MAX_ITERATIONS = 5000
    GAP_TOLERANCE = 1e-6
    RESIDUAL_TOLERANCE = 1e-6

    def __init__(self, problem):
        if not isinstance(problem, SUEProblem):
            raise TypeError('The problem has to be a gmevroute.SUEProblem.')
        self._problem = problem
        self._max_iterations = self.MAX_ITERATIONS
        self._gap_tolerance = self.GAP_TOLERANCE
        self._residual_tolerance = self.RESIDUAL_TOLERANCE
        self._step_rule = 'msa'
        self._record_every = 1

    def set_max_iterations(self, iterations):
        if int(iterations) < 1:
            raise ValueError('The iteration cap has to be at least 1.')
        self._max_iterations = int(iterations)

    def set_gap_tolerance(self, tolerance):
        """
        Sets the duality gap below which the solver may stop.
        """
        if not tolerance > 0:
            raise ValueError('The gap tolerance has to be positive.')
        self._gap_tolerance = float(tolerance)

    def set_residual_tolerance(self, tolerance):
        """
        Sets the tolerance on the residual ``max_r |f_r / D - P_r(f)|``. It
        is an extra stopping condition: the solver stops only when both the
        gap and the residual are below their tolerances.
        """
        if not tolerance > 0:
            raise ValueError('The residual tolerance has to be positive.')
        self._residual_tolerance = float(tolerance)

    def set_step_rule(self, rule):
        if rule not in STEP_RULES:
            raise ValueError('Unknown step rule ' + repr(rule) + '.')
        self._step_rule = rule

    def set_record_every(self, every):
        """
        Records one iteration in ``every`` in the trajectory.
        """
        self._record_every = int(every)

    def run(self):
        """
        Runs the solver and returns a :class:`SUESolution`. When the
        iteration cap is reached the iterate with the smallest gap is
        returned with ``converged`` set to ``False``.
        """
        route_ids = self._problem.route_set().route_ids()
        collector = IterationCollector(
            ['iteration', 'duality_gap', 'residual']
            + ['flow_' + str(r) for r in route_ids], every=self._record_every)
        collector.begin()

        best = None
        converged = False
        iterates = successive_averages(self._problem, self._step_rule)
        for iteration, flows, costs, gap, residual, absolute in iterates:
            collector.report(
                np.concatenate([[iteration, gap, residual], flows]))
            if best is None or gap < best[3]:
                best = (iteration, np.array(flows), costs, gap, residual,
                        absolute)
            if gap <= self._gap_tolerance and \
                    residual <= self._residual_tolerance:
                best = (iteration, np.array(flows), costs, gap, residual,
                        absolute)
                converged = True
                break
            if iteration + 1 >= self._max_iterations:
                break
        iterates.close()

        logger.info(
            'Equilibrium %s after %d iterations, duality gap %g.',
            'reached' if converged else 'not reached', iteration + 1, best[3])
        return SUESolution(
            flows=best[1], costs=best[2], gap=best[3], residual=best[4],
            iterations=iteration + 1, converged=converged,
            gap_is_absolute=best[5], trajectory=collector.to_frame(),
            route_ids=route_ids)


def solve_sue(problem, max_iterations=SUESolver.MAX_ITERATIONS,
              gap_tolerance=SUESolver.GAP_TOLERANCE, step_rule='msa'):
    """
    Solves ``problem`` with a :class:`SUESolver` and returns the
    :class:`SUESolution`.
    """
    solver = SUESolver(problem)
    solver.set_max_iterations(max_iterations)
    solver.set_gap_tolerance(gap_tolerance)
    solver.set_step_rule(step_rule)
    return solver.run()
