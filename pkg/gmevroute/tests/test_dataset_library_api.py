#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import os
import tempfile
import unittest

import numpy as np

import gmevroute as gr


class TestDatasetLibrary(unittest.TestCase):
    """
    Test the 'DatasetLibrary' class.
    """
    def test_simple_network(self):
        rs = gr.DatasetLibrary().simple_network()
        self.assertIsInstance(rs, gr.RouteSet)
        np.testing.assert_array_equal(rs.route_costs(), [4, 5, 4])

    def test_behaviour_networks(self):
        library = gr.DatasetLibrary()
        costs = {
            'A': [2, 3],
            'B': [3, 4],
            'C1': [3, 4],
            'C2': [3, 5],
        }
        for name, expected in costs.items():
            rs = library.behaviour_network(name)
            self.assertEqual(rs.route_ids(), ['upper', 'lower'])
            np.testing.assert_array_equal(rs.route_costs(), expected)
        np.testing.assert_array_equal(
            library.behaviour_network('c1').route_costs(), [3, 4])
        with self.assertRaises(ValueError):
            library.behaviour_network('D')

    def test_example_network(self):
        rs = gr.DatasetLibrary().example_network(10)
        np.testing.assert_allclose(rs.route_costs(), [32.5, 30, 27.5])

    def test_load_dataset(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'data.csv')
            with open(path, 'w') as f:
                f.write('scenario_key,route_id,count\n')
                f.write('5,upper,10\n5,middle,20\n5,lower,30\n')
                f.write('10.5,upper,1\n10.5,lower,2\n')
            data = gr.DatasetLibrary().load_dataset(path)
            self.assertEqual(data.keys(), [5, 10.5])
            np.testing.assert_array_equal(
                data.counts(), [[10, 20, 30], [1, 0, 2]])
            np.testing.assert_allclose(
                data.route_sets()[1].route_costs(),
                gr.DatasetLibrary().example_network(10.5).route_costs())

            simple = gr.DatasetLibrary().simple_network()
            data = gr.DatasetLibrary().load_dataset(
                path, lambda key: simple)
            self.assertIs(data.route_sets()[0], simple)


if __name__ == '__main__':
    unittest.main()
