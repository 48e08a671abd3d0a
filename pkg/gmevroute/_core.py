#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import typing

import numpy as np
import pandas as pd


class OutputCollector(object):
    """
    Base class for collectors of the rows an iterative solver reports.

    Subclasses implement :meth:`begin` and :meth:`report` and store the
    collected rows, one column per output name, in ``self._data``.

    :param outputNames: Column names of the reported rows.
    """
    def __init__(self, outputNames: typing.List[str]):
        self._output_names = list(outputNames)
        self._selected = list(range(len(self._output_names)))

    def n_outputs(self):
        """
        Returns the number of selected outputs.
        """
        return len(self._selected)

    def output_names(self):
        """
        Returns the selected output names, in reporting order.
        """
        return [self._output_names[i] for i in self._selected]

    def set_outputs(self, outputs):
        """
        Restricts :meth:`retrieve` to the named outputs. The reporting order
        of the columns is kept.
        """
        unknown = [name for name in outputs if name not in self._output_names]
        if unknown:
            raise ValueError('Unknown output names: ' + ', '.join(
                str(name) for name in unknown))
        wanted = set(outputs)
        self._selected = [
            i for i, name in enumerate(self._output_names) if name in wanted]

    def begin(self, *args, **kwargs):
        """
        Called once before the first row is reported.
        """
        raise NotImplementedError

    def report(self, row):
        """
        Called with the row of every iteration.
        """
        raise NotImplementedError

    def retrieve(self):
        """
        Returns the collected rows, restricted to the selected outputs.
        """
        return self._data[:, self._selected]


class IterationCollector(OutputCollector):
    """
    Collects one row per solver iteration, keeping every ``every``-th row
    and always the latest one.

    :param outputNames: Column names of the reported rows.
    :param every: Keep one row in ``every``.
    """
    def __init__(self, outputNames: typing.List[str], every: int = 1):
        super(IterationCollector, self).__init__(outputNames)
        if int(every) < 1:
            raise ValueError('every has to be a positive integer')
        self._every = int(every)
        self._rows = None

    def begin(self):
        self._rows = []
        self._count = 0
        self._last = None

    def report(self, row):
        row = np.asarray(row, dtype=float)
        if self._rows is None:
            raise RuntimeError('begin() has to be called before report()')
        if row.shape != (len(self._output_names),):
            raise ValueError('Invalid row shape ' + str(row.shape))
        if self._count % self._every == 0:
            self._rows.append(row)
            self._last = None
        else:
            self._last = row
        self._count += 1

    def retrieve(self):
        if self._rows is None:
            raise RuntimeError('Nothing has been collected')
        rows = list(self._rows)
        if self._last is not None:
            rows.append(self._last)
        self._data = np.array(rows).reshape(-1, len(self._output_names))
        return super(IterationCollector, self).retrieve()

    def to_frame(self):
        """
        Returns the collected rows as a :class:`pandas.DataFrame`.
        """
        return pd.DataFrame(self.retrieve(), columns=self.output_names())
