#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import os

from ._estimation import ChoiceDataset
from ._network import RouteSet
from ._probit import generate_example_network

BEHAVIOUR_NETWORKS = ('A', 'B', 'C1', 'C2')


class DatasetLibrary(object):
    """DatasetLibrary Class:
    A data library class which contains the route sets used to illustrate
    and test the route choice models.

    Each network method returns a :class:`RouteSet`.
    """
    def __init__(self):
        self._directory = os.path.join(
            os.path.dirname(__file__), 'data_library')

    def simple_network(self):
        """
        Returns the simple three-route overlap network.

        The upper route uses links ``1`` (cost 3) and ``2`` (cost 1), the
        middle route links ``1`` and ``3`` (cost 2), and the lower route the
        single link ``4`` (cost 4). Route costs are 4, 5 and 4.
        """
        return RouteSet.from_json(
            os.path.join(self._directory, 'simple_network.json'))

    def behaviour_network(self, name):
        """
        Returns one of the two-route networks ``'A'``, ``'B'``, ``'C1'`` and
        ``'C2'`` that probe model behaviour under simple network changes.

        Both routes consist of their own branch followed by the link
        ``shared``. Network A has branches of cost 1 and 2 and a shared cost
        of 1; B doubles the shared part, C1 adds 1 to both branches and C2
        doubles both branches.
        """
        name = str(name).upper()
        if name not in BEHAVIOUR_NETWORKS:
            raise ValueError(
                'Unknown behaviour network ' + repr(name) + '; expected one '
                'of ' + ', '.join(BEHAVIOUR_NETWORKS) + '.')
        return RouteSet.from_json(os.path.join(
            self._directory, 'behaviour_network_' + name.lower() + '.json'))

    def example_network(self, x):
        """
        Returns the five-link, three-route example network at parameter
        ``x``; see :func:`generate_example_network`.
        """
        return generate_example_network(x)[0]

    def load_dataset(self, path, route_set_for=None):
        """
        Loads a choice frequency CSV file with columns ``scenario_key``,
        ``route_id`` and ``count`` as a :class:`ChoiceDataset`.

        :param path: Path of the CSV file.
        :param route_set_for: Callable returning the :class:`RouteSet` of a
            scenario key; by default the key is read as the parameter ``x``
            of the example network.
        """
        if route_set_for is None:
            def route_set_for(key):
                return self.example_network(float(key))
        return ChoiceDataset.read_csv(path, route_set_for)
