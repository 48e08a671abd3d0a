#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import unittest
from unittest.mock import patch

import numpy as np
from parameterized import parameterized
from scipy.stats import norm

import gmevroute as gr


class TestMnpSpecification(unittest.TestCase):
    """
    Test the 'MnpSpecification' class.
    """
    def test__init__(self):
        spec = gr.MnpSpecification([10, 20])
        self.assertEqual(spec.theta, 0.2)
        self.assertEqual(spec.sigma_eps, 10)
        self.assertEqual(spec.cov_kind, 'arithmetic')
        np.testing.assert_array_equal(spec.v0, [0, 0])

        with self.assertRaises(gr.DomainError):
            gr.MnpSpecification([10, 0])
        with self.assertRaises(gr.DomainError):
            gr.MnpSpecification([[10, 20]])
        with self.assertRaises(gr.DomainError):
            gr.MnpSpecification([10, 20], theta=-1)
        with self.assertRaises(gr.DomainError):
            gr.MnpSpecification([10, 20], sigma_eps=np.nan)
        with self.assertRaises(gr.DomainError):
            gr.MnpSpecification([10, 20], cov_kind='harmonic')
        with self.assertRaises(gr.DomainError):
            gr.MnpSpecification([10, 20], v0=[1])

    def test_mean(self):
        spec = gr.MnpSpecification([10, 20], v0=[1, 2], beta=-2)
        np.testing.assert_array_equal(spec.mean(), [-19, -38])


class TestGenerateExampleNetwork(unittest.TestCase):
    """
    Test the 'generate_example_network' function.
    """
    def test_route_costs(self):
        rs, spec = gr.generate_example_network(10)
        self.assertEqual(rs.route_ids(), ['upper', 'middle', 'lower'])
        np.testing.assert_allclose(rs.route_costs(), [32.5, 30, 27.5])
        np.testing.assert_allclose(spec.tau_hat, rs.route_costs())
        np.testing.assert_allclose(
            gr.DatasetLibrary().example_network(10).route_costs(),
            rs.route_costs())

    def test_zero(self):
        # links of zero travel time are dropped
        rs, spec = gr.generate_example_network(0)
        self.assertEqual(rs.link_ids(), ['2', '3', '4'])
        np.testing.assert_allclose(rs.route_costs(), [12, 10, 8])
        np.testing.assert_array_equal(rs.overlap_costs()[0, 1:], [0, 0])

    def test_errors(self):
        with self.assertRaises(gr.DomainError):
            gr.generate_example_network(-1)


class TestBuildCovariance(unittest.TestCase):
    """
    Test the 'build_covariance' function.
    """
    @parameterized.expand([(x,) for x in (0, 1, 5, 12.5, 40)])
    def test_arithmetic(self, x):
        rs, spec = gr.generate_example_network(x)
        cov = gr.build_covariance(rs, spec)
        self.assertAlmostEqual(
            cov[0, 1], 0.04 * (2.025 * x ** 2 + 11 * x), delta=1e-9)
        np.testing.assert_allclose(
            np.diag(cov), 0.04 * rs.route_costs() ** 2 + 100)
        np.testing.assert_array_equal(cov, cov.T)
        self.assertTrue(np.all(np.linalg.eigvalsh(cov) > 0))

    def test_geometric(self):
        x = 10
        rs, spec = gr.generate_example_network(x, cov_kind='geometric')
        cov = gr.build_covariance(rs, spec)
        tau = rs.route_costs()
        self.assertAlmostEqual(
            cov[0, 1], 0.04 * x * np.sqrt(tau[0] * tau[1]), delta=1e-9)
        # upper and lower routes share no link
        self.assertEqual(cov[0, 2], 0)

    def test_dimensions(self):
        rs = gr.DatasetLibrary().simple_network()
        with self.assertRaises(gr.DomainError):
            gr.build_covariance(rs, gr.MnpSpecification([1, 2]))

    def test_repair(self):
        rs = gr.DatasetLibrary().simple_network()
        spec = gr.MnpSpecification([1, 1, 1], theta=1, sigma_eps=0)
        overlap = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=float)
        with patch.object(rs, 'overlap_costs', return_value=overlap):
            with self.assertRaises(gr.DomainError):
                gr.build_covariance(rs, spec)
            with self.assertWarns(UserWarning):
                cov = gr.build_covariance(rs, spec, repair=True)
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(cov)), -1e-10)
        np.testing.assert_allclose(cov, cov.T)


class TestSimulateProbabilities(unittest.TestCase):
    """
    Test the 'simulate_probabilities' function.
    """
    def test_two_routes(self):
        n = 200000
        p, se = gr.simulate_probabilities([0, 1], np.eye(2), n, seed=1)
        expected = norm.cdf(1 / np.sqrt(2))
        self.assertLessEqual(abs(p[1] - expected), 4 * se[1])
        self.assertAlmostEqual(np.sum(p), 1, places=12)
        np.testing.assert_allclose(se, np.sqrt(p * (1 - p) / n))

    def test_semidefinite(self):
        # perfectly correlated utilities keep their order
        p, se = gr.simulate_probabilities([0, 1], np.ones((2, 2)), 1000, 2)
        np.testing.assert_array_equal(p, [0, 1])
        np.testing.assert_array_equal(se, [0, 0])

    def test_workers(self):
        rs, spec = gr.generate_example_network(20)
        cov = gr.build_covariance(rs, spec)
        n = 2 * gr._probit.CHUNK_SIZE + 12345
        stream = gr.scenario_stream(20)
        p1, _ = gr.simulate_probabilities(
            spec.mean(), cov, n, 7, stream, n_workers=1)
        p8, _ = gr.simulate_probabilities(
            spec.mean(), cov, n, 7, stream, n_workers=8)
        np.testing.assert_array_equal(p1, p8)

        p, _ = gr.simulate_probabilities(
            spec.mean(), cov, n, 7, gr.scenario_stream(21))
        self.assertFalse(np.array_equal(p, p1))

    def test_errors(self):
        with self.assertRaises(ValueError):
            gr.simulate_probabilities([0, 1], np.eye(2), 0, 1)
        with self.assertRaises(ValueError):
            gr.simulate_probabilities([0, 1], np.eye(3), 10, 1)
        with self.assertRaises(gr.DomainError):
            gr.simulate_probabilities(
                [0, 1], np.array([[1, 0.5], [0, 1]]), 10, 1)
        with self.assertRaises(gr.DomainError):
            gr.simulate_probabilities(
                [0, 1], np.array([[1, 2], [2, 1]]), 10, 1)


class TestHelpers(unittest.TestCase):
    """
    Test the 'foreseen_variance_share' and 'scenario_stream' functions.
    """
    def test_foreseen_variance_share(self):
        spec = gr.MnpSpecification([10, 50])
        np.testing.assert_allclose(
            gr.foreseen_variance_share(spec), [4 / 104, 100 / 200])

    def test_scenario_stream(self):
        self.assertEqual(gr.scenario_stream(2.5), (2500,))
        self.assertEqual(gr.scenario_stream(0), (0,))
        self.assertNotEqual(gr.scenario_stream(1), gr.scenario_stream(2))


if __name__ == '__main__':
    unittest.main()
