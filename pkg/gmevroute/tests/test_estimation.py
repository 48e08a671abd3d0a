#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import os
import tempfile
import unittest

import numpy as np
import pandas as pd
import pints

import gmevroute as gr


def scenarios():
    rs = gr.DatasetLibrary().simple_network()
    return [rs, rs.with_link_costs({'4': 12}), rs.with_link_costs({'4': 2})]


def synthetic(specification, route_sets, n=100000):
    # expected counts, so the maximum-likelihood estimate is exact
    counts = [n * gr.model_probabilities(rs, specification)
              for rs in route_sets]
    return gr.ChoiceDataset(range(len(route_sets)), route_sets, counts)


class TestChoiceDataset(unittest.TestCase):
    """
    Test the 'ChoiceDataset' class.
    """
    @classmethod
    def setUpClass(cls):
        cls.route_sets = scenarios()[:2]

    def test__init__(self):
        data = gr.ChoiceDataset(
            ['a', 'b'], self.route_sets, [[10, 5, 10], [4, 0, 1]])
        self.assertEqual(data.keys(), ['a', 'b'])
        self.assertEqual(data.n_scenarios(), 2)
        self.assertEqual(data.n_observations(), 30)
        self.assertEqual(data.route_ids(), ['upper', 'middle', 'lower'])
        self.assertEqual(data.min_route_cost(), 4)
        self.assertEqual(len(data.route_sets()), 2)
        np.testing.assert_array_equal(data.scaled(2).counts()[1], [8, 0, 2])

    def test_errors(self):
        rs = self.route_sets[0]
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset([], [], np.zeros((0, 3)))
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset([0, 1], [rs], [[1, 1, 1]])
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset([0], [rs], [[1, 1]])
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset([0], [rs], [[1, -1, 1]])
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset([0], [rs], [[0, 0, 0]])
        other = gr.DatasetLibrary().behaviour_network('A')
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset([0, 1], [rs, other], [[1, 1, 1], [1, 1, 1]])

    def test_frame(self):
        data = gr.ChoiceDataset(
            [0, 1], self.route_sets, [[10, 5, 10], [4, 0, 1]])
        frame = data.to_frame()
        self.assertEqual(
            list(frame.columns), ['scenario_key', 'route_id', 'count'])
        self.assertEqual(len(frame), 6)

        lookup = dict(enumerate(self.route_sets))
        other = gr.ChoiceDataset.from_frame(frame, lookup.get)
        np.testing.assert_array_equal(other.counts(), data.counts())
        self.assertEqual(other.keys(), [0, 1])

        # repeated rows add up
        frame = pd.DataFrame({
            'scenario_key': [0, 0, 0],
            'route_id': ['upper', 'upper', 'lower'],
            'count': [1, 2, 3]})
        other = gr.ChoiceDataset.from_frame(frame, lookup.get)
        np.testing.assert_array_equal(other.counts(), [[3, 0, 3]])

        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset.from_frame(
                frame.drop(columns='count'), lookup.get)
        frame['route_id'] = ['upper', 'upper', 'unknown']
        with self.assertRaises(gr.NetworkError):
            gr.ChoiceDataset.from_frame(frame, lookup.get)

    def test_read_csv(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'data.csv')
            with open(path, 'w') as f:
                f.write('# tool: gmevroute\n')
                f.write('scenario_key,route_id,count\n')
                f.write('0,upper,10\n0,middle,5\n0,lower,10\n')
            data = gr.ChoiceDataset.read_csv(
                path, lambda key: self.route_sets[0])
        np.testing.assert_array_equal(data.counts(), [[10, 5, 10]])


class TestChoiceLogLikelihood(unittest.TestCase):
    """
    Test the 'ChoiceLogLikelihood' class and the 'log_likelihood' and
    'validate' functions.
    """
    @classmethod
    def setUpClass(cls):
        cls.route_sets = scenarios()[:2]
        cls.data = gr.ChoiceDataset(
            [0, 1], cls.route_sets, [[40, 20, 40], [50, 30, 20]])

    def test_log_likelihood(self):
        spec = gr.ModelSpecification('MN', 'M', mu=2, c=-1)
        expected = sum(
            np.sum(counts * np.log(gr.model_probabilities(rs, spec)))
            for rs, counts in zip(self.route_sets, self.data.counts()))
        self.assertAlmostEqual(
            gr.log_likelihood(spec, {}, self.data), expected, delta=1e-9)

        other = gr.ModelSpecification('MN', 'M', mu=3, c=-2)
        self.assertAlmostEqual(
            gr.log_likelihood(other, {'mu': 2, 'c': -1}, self.data),
            expected, delta=1e-9)
        self.assertEqual(
            gr.validate(spec, {}, self.data),
            gr.log_likelihood(spec, {}, self.data))

        with self.assertRaises(gr.SpecificationError):
            gr.log_likelihood(spec, {'beta': 1}, self.data)
        with self.assertRaises(gr.DomainError):
            gr.log_likelihood(spec, {'c': 5}, self.data)

    def test_nest_scales_default_to_mu(self):
        spec = gr.ModelSpecification('LN', 'A')
        mn = gr.ModelSpecification('MN', 'A', mu=2)
        self.assertAlmostEqual(
            gr.log_likelihood(spec, {'mu': 2}, self.data),
            gr.log_likelihood(mn, {}, self.data), delta=1e-8)

    def test_pints_interface(self):
        model = gr.GMEVModel(
            gr.ModelSpecification('MN', 'M'), self.route_sets)
        problem = pints.MultiOutputProblem(
            model, [0.0, 1.0], self.data.counts())
        function = gr.ChoiceLogLikelihood(problem)
        self.assertEqual(function.n_parameters(), 2)
        self.assertTrue(np.isfinite(function([2, -1])))
        self.assertEqual(function([2, 5]), -np.inf)
        with self.assertRaises(gr.DomainError):
            function.evaluate([2, 5])

    def test_zero_counts(self):
        data = gr.ChoiceDataset([0], self.route_sets[:1], [[10, 0, 5]])
        spec = gr.ModelSpecification('MN', 'A')
        p = gr.model_probabilities(self.route_sets[0], spec)
        self.assertAlmostEqual(
            gr.log_likelihood(spec, {}, data),
            10 * np.log(p[0]) + 5 * np.log(p[2]), delta=1e-9)


class TestMaximumLikelihoodEstimator(unittest.TestCase):
    """
    Test the 'MaximumLikelihoodEstimator' class and the 'estimate' function.
    """
    @classmethod
    def setUpClass(cls):
        cls.route_sets = scenarios()
        cls.truth = gr.ModelSpecification('MN', 'M', mu=3, c=-2)
        cls.data = synthetic(cls.truth, cls.route_sets)

    def test__init__(self):
        spec = gr.ModelSpecification('MN', 'A')
        with self.assertRaises(TypeError):
            gr.MaximumLikelihoodEstimator(spec, 'data')
        estimator = gr.MaximumLikelihoodEstimator(spec, self.data)
        self.assertIsInstance(estimator.model(), gr.ReducedModel)
        with self.assertRaises(ValueError):
            estimator.set_n_starts(0)
        with self.assertRaises(ValueError):
            estimator.set_method('bfgs')

    def test_additive_recovery(self):
        truth = gr.ModelSpecification('MN', 'A', mu=0.7)
        data = synthetic(truth, self.route_sets[:1])
        result = gr.estimate(gr.ModelSpecification('MN', 'A'), data,
                             n_starts=2)
        self.assertAlmostEqual(result.parameters['mu'], 0.7, delta=1e-4)
        self.assertEqual(result.specification.mu, result.parameters['mu'])
        self.assertTrue(result.converged)
        self.assertEqual(result.pinned, [])
        self.assertEqual(len(result.starts), 2)

    def test_multiplicative_recovery(self):
        result = gr.estimate(gr.ModelSpecification('MN', 'M'), self.data,
                             n_starts=2)
        self.assertAlmostEqual(result.parameters['mu'], 3, delta=0.03)
        self.assertAlmostEqual(result.parameters['c'], -2, delta=0.02)
        self.assertAlmostEqual(
            result.log_likelihood,
            gr.log_likelihood(self.truth, {}, self.data), delta=1e-3)
        self.assertLess(
            result.log_likelihood_per_observation(), 0)

    def test_pinned_constant(self):
        # a positive constant lies outside the estimable range c <= 0
        truth = gr.ModelSpecification('MN', 'M', mu=3, c=1)
        data = synthetic(truth, self.route_sets)
        result = gr.estimate(gr.ModelSpecification('MN', 'M'), data,
                             n_starts=2)
        self.assertIn('c', result.pinned)
        self.assertEqual(result.parameters['c'], 0)

    def test_fixed_parameters(self):
        result = gr.estimate(
            gr.ModelSpecification('MN', 'M'), self.data, n_starts=2,
            fixed={'c': -2})
        self.assertEqual(result.fixed, {'c': -2.0})
        self.assertEqual(result.parameters['c'], -2)
        self.assertAlmostEqual(result.parameters['mu'], 3, delta=1e-3)

        estimator = gr.MaximumLikelihoodEstimator(
            gr.ModelSpecification('MN', 'M'), self.data)
        estimator.set_fixed_parameters({'mu': 3, 'c': -2})
        with self.assertRaises(gr.EstimationError):
            estimator.run()

    def test_reference_chain_failure(self):
        # a chain capped at one step never converges, so every start fails
        spec = gr.ModelSpecification(
            'MN', 'MD', reference_policy=gr.MarkovChainPolicy(
                max_iterations=1))
        with self.assertRaises(gr.EstimationError) as context:
            gr.estimate(spec, self.data, n_starts=2)
        diagnostics = context.exception.diagnostics
        self.assertEqual(len(diagnostics), 2)
        for index, start in enumerate(diagnostics):
            self.assertEqual(start['start'], index)
            self.assertIn('Markov chain', start['error'])

    def test_seed(self):
        spec = gr.ModelSpecification('MN', 'A')
        first = gr.estimate(spec, self.data, n_starts=3, seed=4)
        second = gr.estimate(spec, self.data, n_starts=3, seed=4)
        self.assertEqual(first.parameters, second.parameters)
        self.assertEqual(
            [start['x0'] for start in first.starts],
            [start['x0'] for start in second.starts])

    def test_parallel(self):
        spec = gr.ModelSpecification('MN', 'A')
        estimator = gr.MaximumLikelihoodEstimator(spec, self.data)
        estimator.set_n_starts(3)
        estimator.set_parallel(3)
        parallel = estimator.run()
        serial = gr.estimate(spec, self.data, n_starts=3)
        self.assertEqual(parallel.parameters, serial.parameters)

    def test_single_parameter_cmaes(self):
        spec = gr.ModelSpecification('MN', 'A')
        with self.assertLogs('gmevroute', level='WARNING'):
            result = gr.estimate(spec, self.data, n_starts=1, method='cmaes')
        self.assertTrue(np.isfinite(result.log_likelihood))

    def test_validation(self):
        result = gr.estimate(gr.ModelSpecification('MN', 'M'), self.data,
                             n_starts=1)
        other = gr.ChoiceDataset(
            [0], self.route_sets[:1], [[40, 20, 40]])
        value = result.set_validation(other)
        self.assertEqual(value, result.validation_log_likelihood)
        self.assertEqual(result.validation_n_observations, 100)
        self.assertAlmostEqual(
            value,
            gr.validate(result.specification, result.parameters, other),
            delta=1e-9)

        data = result.to_dict()
        self.assertEqual(data['model'], 'M-MN')
        for key in ('parameters', 'pinned', 'fixed', 'log_likelihood',
                    'log_likelihood_per_observation', 'n_observations',
                    'converged', 'iterations', 'validation_log_likelihood',
                    'starts'):
            self.assertIn(key, data)


if __name__ == '__main__':
    unittest.main()
