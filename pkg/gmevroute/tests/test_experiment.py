#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import os
import unittest

import numpy as np

import gmevroute as gr


class TestDefaultModels(unittest.TestCase):
    """
    Test the 'default_models' function.
    """
    def test_default_models(self):
        models = gr.default_models()
        self.assertEqual(
            [spec.name() for spec in models],
            ['A-MN', 'A-PS', 'A-PC', 'A-LN', 'M-MN', 'M-PS', 'M-PC', 'M-LN',
             'MΔ-MN', 'MΔ-PS', 'MΔ-PC', 'MΔ-LN'])
        self.assertIsInstance(models[8].reference_policy, gr.MarkovChainPolicy)
        self.assertIsInstance(models[10].reference_policy, gr.EqualPolicy)
        self.assertEqual(models[0].mu, 0.1)
        self.assertEqual(models[4].c, -1)


class TestBehaviourCheck(unittest.TestCase):
    """
    Test the 'behaviour_check' function.
    """
    def test_recorded_outcomes(self):
        frame = gr.behaviour_check()
        self.assertEqual(len(frame), 9)
        self.assertTrue(frame['matches_record'].all())
        observed = {
            (row.model, row.network): row.observed
            for row in frame.itertuples()}
        self.assertEqual(observed[('A-MN', 'B')], '=')
        self.assertEqual(observed[('M-MN', 'B')], 'converge')
        self.assertEqual(observed[('MΔ-MN', 'B')], '=')
        self.assertEqual(observed[('MΔ-MN', 'C1')], 'converge')

    def test_realistic(self):
        frame = gr.behaviour_check()
        realistic = frame[frame['model'] == 'MΔ-MN']['realistic']
        self.assertTrue(realistic.all())
        self.assertFalse(frame[frame['model'] == 'A-MN']['realistic'].all())

    def test_positive_constant(self):
        # without a negative constant the delta model no longer reacts to
        # doubling both branches the way it is recorded
        frame = gr.behaviour_check(c=0)
        row = frame[(frame['model'] == 'MΔ-MN') & (frame['network'] == 'C2')]
        self.assertEqual(row['observed'].iloc[0], '=')
        self.assertFalse(frame['matches_record'].all())


class TestNetworkExperiment(unittest.TestCase):
    """
    Test the 'NetworkExperiment' class on a small grid.
    """
    @classmethod
    def setUpClass(cls):
        cls.experiment = gr.NetworkExperiment(n=2000, seed=3)
        cls.experiment.set_x_values([5, 10])
        cls.experiment.set_datasets({'short': (5, 6, 7), 'long': (25, 26)})
        cls.experiment.set_models([gr.ModelSpecification('MN', 'A', mu=0.1)])
        cls.experiment.set_n_starts(1)

    def test__init__(self):
        with self.assertRaises(ValueError):
            gr.NetworkExperiment(n=0)
        with self.assertRaises(ValueError):
            self.experiment.set_datasets({})
        experiment = gr.NetworkExperiment()
        self.assertEqual(len(experiment.models()), 12)

    def test_simulate(self):
        p, se = self.experiment.simulate(5)
        self.assertAlmostEqual(np.sum(p), 1, places=12)
        self.assertEqual(len(se), 3)
        self.assertIs(self.experiment.simulate(5.0)[0], p)

        other = gr.NetworkExperiment(n=2000, seed=3)
        np.testing.assert_array_equal(other.simulate(5)[0], p)

    def test_ground_truth(self):
        frame = self.experiment.ground_truth()
        self.assertEqual(frame['x'].tolist(), [5, 10])
        self.assertEqual(
            list(frame.columns),
            ['x', 'upper', 'middle', 'lower', 'se_upper', 'se_middle',
             'se_lower'])
        np.testing.assert_allclose(
            frame[['upper', 'middle', 'lower']].sum(axis=1), 1)

    def test_dataset(self):
        data = self.experiment.dataset('short')
        self.assertEqual(data.keys(), [5, 6, 7])
        np.testing.assert_allclose(data.counts().sum(axis=1), 2000)
        np.testing.assert_allclose(
            data.route_sets()[1].route_costs(),
            self.experiment.route_set(6).route_costs())

    def test_run(self):
        results = self.experiment.run()
        self.assertEqual(
            sorted(results), [('A-MN', 'long'), ('A-MN', 'short')])
        result = results[('A-MN', 'short')]
        self.assertIsInstance(result, gr.EstimationResult)
        self.assertEqual(
            result.validation_n_observations,
            self.experiment.dataset('long').n_observations())

        frame = gr.NetworkExperiment.results_frame(results)
        self.assertEqual(len(frame), 2)
        self.assertIn('validation_log_likelihood', frame.columns)

        curves = self.experiment.curves(results)
        self.assertEqual(len(curves), 2 * 2 * 3)
        totals = curves.groupby(['train', 'x'])['probability'].sum()
        np.testing.assert_allclose(totals, 1)

    def test_failed_fits(self):
        results = {('M-MN', 'short'): gr.EstimationError('no start', [])}
        frame = gr.NetworkExperiment.results_frame(results)
        self.assertEqual(frame['error'].tolist(), ['no start'])
        self.assertEqual(len(self.experiment.curves(results)), 0)


@unittest.skipUnless(
    os.environ.get('GMEVROUTE_SLOW'),
    'slow; run with $ python run-tests.py --slow')
class TestNetworkExperimentReproduction(unittest.TestCase):
    """
    Test the 'NetworkExperiment' class at 10^5 observations per scenario on
    the default datasets and models.
    """
    @classmethod
    def setUpClass(cls):
        cls.experiment = gr.NetworkExperiment(n=100000, seed=1)
        cls.results = cls.experiment.run()

    def result(self, model, train):
        result = self.results[(model, train)]
        self.assertIsInstance(result, gr.EstimationResult)
        return result

    def test_estimates(self):
        self.assertAlmostEqual(
            self.result('A-MN', 'short').parameters['mu'], 0.107,
            delta=0.020)
        self.assertAlmostEqual(
            self.result('A-MN', 'long').parameters['mu'], 0.0699,
            delta=0.014)

        result = self.result('M-MN', 'long')
        self.assertAlmostEqual(result.parameters['mu'], 5.593, delta=1.2)
        self.assertIn('c', result.pinned)
        self.assertEqual(result.parameters['c'], 0)

        self.assertAlmostEqual(
            self.result('A-PS', 'long').parameters['beta'], 0.501,
            delta=0.2)

    def test_multiplicative_fits_better(self):
        for train in ('short', 'long'):
            for function in ('MN', 'PS', 'PC', 'LN'):
                additive = self.result('A-' + function, train)
                for vector in ('M-', 'MΔ-'):
                    other = self.result(vector + function, train)
                    self.assertGreaterEqual(
                        other.log_likelihood, additive.log_likelihood)

    def test_delta_validates_better(self):
        for train in ('short', 'long'):
            for function in ('MN', 'PS'):
                self.assertGreaterEqual(
                    self.result('MΔ-' + function, train)
                    .validation_log_likelihood,
                    self.result('A-' + function, train)
                    .validation_log_likelihood)


if __name__ == '__main__':
    unittest.main()
