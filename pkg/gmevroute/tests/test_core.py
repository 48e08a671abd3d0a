#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import unittest

import numpy as np

import gmevroute as gr


class TestOutputCollector(unittest.TestCase):
    """
    Test the 'OutputCollector' base class.
    """
    def test__init__(self):
        collector = gr.OutputCollector(['a', 'b'])
        self.assertEqual(collector.n_outputs(), 2)
        self.assertEqual(collector.output_names(), ['a', 'b'])

    def test_abstract_methods(self):
        collector = gr.OutputCollector(['a'])
        with self.assertRaises(NotImplementedError):
            collector.begin()
        with self.assertRaises(NotImplementedError):
            collector.report([1])

    def test_set_outputs(self):
        collector = gr.OutputCollector(['a', 'b', 'c'])
        collector.set_outputs(['c', 'a'])
        self.assertEqual(collector.n_outputs(), 2)
        self.assertEqual(collector.output_names(), ['a', 'c'])
        with self.assertRaises(ValueError):
            collector.set_outputs(['d'])


class TestIterationCollector(unittest.TestCase):
    """
    Test the 'IterationCollector' class.
    """
    def test__init__(self):
        with self.assertRaises(ValueError):
            gr.IterationCollector(['a'], every=0)

    def test_every_row(self):
        collector = gr.IterationCollector(['a', 'b'])
        collector.begin()
        for i in range(4):
            collector.report([i, 2 * i])
        np.testing.assert_array_equal(
            collector.retrieve(), [[0, 0], [1, 2], [2, 4], [3, 6]])

    def test_thinning(self):
        collector = gr.IterationCollector(['a'], every=3)
        collector.begin()
        for i in range(7):
            collector.report([i])
        np.testing.assert_array_equal(collector.retrieve()[:, 0], [0, 3, 6])

        # the latest row is always kept
        collector.report([7])
        np.testing.assert_array_equal(
            collector.retrieve()[:, 0], [0, 3, 6, 7])

        collector.begin()
        self.assertEqual(collector.retrieve().shape, (0, 1))

    def test_to_frame(self):
        collector = gr.IterationCollector(['a', 'b', 'c'])
        collector.begin()
        collector.report([1, 2, 3])
        collector.set_outputs(['c'])
        frame = collector.to_frame()
        self.assertEqual(list(frame.columns), ['c'])
        self.assertEqual(frame['c'].tolist(), [3])

    def test_errors(self):
        collector = gr.IterationCollector(['a', 'b'])
        with self.assertRaises(RuntimeError):
            collector.report([1, 2])
        with self.assertRaises(RuntimeError):
            collector.retrieve()
        collector.begin()
        with self.assertRaises(ValueError):
            collector.report([1, 2, 3])


if __name__ == '__main__':
    unittest.main()
