#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import json
import numbers

import numpy as np

from ._errors import DegenerateRouteError, NetworkError

#: Upper clamp on similarity indices is ``1 - SIMILARITY_EPSILON``.
SIMILARITY_EPSILON = 1e-6


class Link(object):
    """
    A network link with a positive generalised cost.

    :param link_id: Opaque identifier of the link.
    :param cost: Positive generalised cost (for example minutes).
    :type cost: float
    """
    def __init__(self, link_id, cost):
        if isinstance(cost, bool) or not isinstance(cost, numbers.Real):
            raise NetworkError(
                'Cost of link ' + str(link_id) + ' has to be a real number.')
        if not np.isfinite(cost) or cost <= 0:
            raise NetworkError(
                'Cost of link ' + str(link_id) + ' has to be positive, got '
                + str(cost) + '.')
        self._id = link_id
        self._cost = float(cost)

    @property
    def id(self):
        return self._id

    @property
    def cost(self):
        return self._cost

    def __repr__(self):
        return 'Link(' + repr(self._id) + ', ' + repr(self._cost) + ')'


class Route(object):
    """
    A route, given as an ordered sequence of link identifiers.

    :param route_id: Opaque identifier of the route.
    :param links: Ordered link identifiers. A link may appear only once.
    """
    def __init__(self, route_id, links):
        links = tuple(links)
        if len(links) == 0:
            raise NetworkError(
                'Route ' + str(route_id)
                + ' has to contain at least one link.')
        if len(set(links)) != len(links):
            raise NetworkError(
                'Route ' + str(route_id) + ' uses a link more than once.')
        self._id = route_id
        self._links = links

    @property
    def id(self):
        return self._id

    @property
    def links(self):
        return self._links

    def __repr__(self):
        return 'Route(' + repr(self._id) + ', ' + repr(list(self._links)) + ')'


class RouteSet(object):
    """
    An explicit route set of a single origin-destination pair.

    Holds the links and routes and caches the link-route incidence, route
    costs, pairwise overlap costs and link usage counts. Instances are not
    modified after construction, so all derived quantities can be shared
    between threads.

    :param links: Sequence of :class:`Link`.
    :param routes: Sequence of :class:`Route`.
    """
    def __init__(self, links, routes):
        links = list(links)
        routes = list(routes)
        if len(routes) == 0:
            raise NetworkError(
                'A route set has to contain at least one route.')

        self._link_ids = [link.id for link in links]
        if len(set(self._link_ids)) != len(self._link_ids):
            raise NetworkError('Link identifiers have to be unique.')
        self._route_ids = [route.id for route in routes]
        if len(set(self._route_ids)) != len(self._route_ids):
            raise NetworkError('Route identifiers have to be unique.')

        self._links = links
        self._routes = routes
        self._link_index = {
            link_id: index for index, link_id in enumerate(self._link_ids)}
        self._route_index = {
            route_id: index for index, route_id in enumerate(self._route_ids)}

        incidence = np.zeros((len(links), len(routes)))
        seen = {}
        for column, route in enumerate(routes):
            for link_id in route.links:
                try:
                    incidence[self._link_index[link_id], column] = 1.0
                except KeyError:
                    raise NetworkError(
                        'Route ' + str(route.id) + ' references unknown link '
                        + str(link_id) + '.')
            key = frozenset(route.links)
            if key in seen:
                raise NetworkError(
                    'Routes ' + str(seen[key]) + ' and ' + str(route.id)
                    + ' have identical link sets.')
            seen[key] = route.id

        self._incidence = incidence
        self._link_costs = np.array([link.cost for link in links])
        self._route_costs = incidence.T @ self._link_costs
        self._overlap = incidence.T @ (self._link_costs[:, None] * incidence)
        self._usage = incidence.sum(axis=1)

        for array in (self._incidence, self._link_costs, self._route_costs,
                      self._overlap, self._usage):
            array.setflags(write=False)

    @classmethod
    def from_dict(cls, data):
        """
        Builds a route set from a dictionary with the network JSON schema
        ``{"links": [{"id", "cost"}], "routes": [{"id", "links"}]}``.
        """
        if not isinstance(data, dict):
            raise NetworkError('A network has to be a JSON object.')
        for key in ('links', 'routes'):
            if key not in data or not isinstance(data[key], list):
                raise NetworkError(
                    'A network needs a list under "' + key + '".')
        links = []
        for position, entry in enumerate(data['links']):
            try:
                links.append(Link(entry['id'], entry['cost']))
            except (KeyError, TypeError):
                raise NetworkError(
                    'Link entry ' + str(position) + ' needs "id" and "cost".')
        routes = []
        for position, entry in enumerate(data['routes']):
            try:
                route_links = entry['links']
                route_id = entry['id']
            except (KeyError, TypeError):
                raise NetworkError(
                    'Route entry ' + str(position) + ' needs "id" and '
                    '"links".')
            if not isinstance(route_links, list):
                raise NetworkError(
                    'Links of route ' + str(route_id) + ' have to be a list.')
            routes.append(Route(route_id, route_links))
        return cls(links, routes)

    @classmethod
    def from_json(cls, path):
        """
        Loads a route set from a network JSON file.
        """
        try:
            with open(path) as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise NetworkError(
                'Network file ' + str(path) + ' is not valid JSON: ' + str(e))
        return cls.from_dict(data)

    def to_dict(self):
        """
        Returns the network JSON representation of the route set.
        """
        return {
            'links': [
                {'id': link.id, 'cost': link.cost} for link in self._links],
            'routes': [
                {'id': route.id, 'links': list(route.links)}
                for route in self._routes],
        }

    def with_link_costs(self, costs):
        """
        Returns a copy of the route set with the link costs replaced.

        :param costs: Mapping from link identifier to new cost, or an array
            in link order.
        """
        if isinstance(costs, dict):
            values = [costs.get(link_id, link.cost)
                      for link_id, link in zip(self._link_ids, self._links)]
        else:
            values = np.asarray(costs, dtype=float)
            if values.shape != (self.n_links(),):
                raise NetworkError(
                    'Expected ' + str(self.n_links()) + ' link costs, got '
                    'shape ' + str(values.shape) + '.')
        links = [Link(link_id, float(value))
                 for link_id, value in zip(self._link_ids, values)]
        return RouteSet(links, self._routes)

    def n_links(self):
        return len(self._links)

    def n_routes(self):
        return len(self._routes)

    def link_ids(self):
        return list(self._link_ids)

    def route_ids(self):
        return list(self._route_ids)

    def route(self, route_id):
        return self._routes[self.route_index(route_id)]

    def route_index(self, route_id):
        """
        Returns the position of a route in the route order.
        """
        try:
            return self._route_index[route_id]
        except (KeyError, TypeError):
            raise NetworkError('Unknown route ' + str(route_id) + '.')

    def link_costs(self):
        return self._link_costs

    def route_costs(self):
        return self._route_costs

    def overlap_costs(self):
        """
        Returns the symmetric matrix of pairwise overlap costs; the diagonal
        holds the route costs.
        """
        return self._overlap

    def incidence(self):
        """
        Returns the link-route incidence matrix of shape
        ``(n_links, n_routes)``.
        """
        return self._incidence

    def link_usage(self):
        """
        Returns the number of routes using each link.
        """
        return self._usage

    def non_overlap_costs(self):
        """
        Returns the matrix whose entry ``(p, r)`` is the cost of the links of
        ``p`` that are not on ``r``.
        """
        return self._route_costs[:, None] - self._overlap

    def __repr__(self):
        return ('RouteSet(' + str(self.n_links()) + ' links, '
                + str(self.n_routes()) + ' routes)')


def route_cost(rs, r):
    """
    Returns the cost of route ``r``, the sum of its link costs.
    """
    return float(rs.route_costs()[rs.route_index(r)])


def overlap_cost(rs, r, s):
    """
    Returns the summed cost of the links shared by routes ``r`` and ``s``.
    """
    return float(rs.overlap_costs()[rs.route_index(r), rs.route_index(s)])


def path_size_factors(rs):
    r"""
    Returns the path-size factor of every route,

    .. math::
        PS_r = \frac{1}{c_r} \sum_{l \in L_r} \frac{c_l}{\#_l},

    where :math:`\#_l` counts the routes of ``rs`` using link :math:`l`.
    """
    shares = rs.link_costs() / np.maximum(rs.link_usage(), 1)
    return (rs.incidence().T @ shares) / rs.route_costs()


def ref_path_size_factors(rs, ref):
    """
    Returns path-size factors computed over the links each route does not
    share with the reference route ``ref``. The reference route itself gets
    factor 1.

    Raises a :class:`DegenerateRouteError` when a route lies entirely on the
    reference route.
    """
    k = rs.route_index(ref)
    incidence = rs.incidence()
    outside = incidence * (1.0 - incidence[:, [k]])
    shares = rs.link_costs() / np.maximum(rs.link_usage(), 1)
    numerators = outside.T @ shares
    denominators = outside.T @ rs.link_costs()

    factors = np.ones(rs.n_routes())
    route_ids = rs.route_ids()
    for p in range(rs.n_routes()):
        if p == k:
            continue
        if denominators[p] <= 0:
            raise DegenerateRouteError(route_ids[p], ref)
        factors[p] = numerators[p] / denominators[p]
    return factors


def similarity_matrix(rs):
    """
    Returns the symmetric matrix of similarity indices
    ``overlap(r, p) / sqrt(cost_r * cost_p)``, clamped to at most
    ``1 - SIMILARITY_EPSILON``.
    """
    if rs.n_routes() < 2:
        raise NetworkError(
            'Similarity indices need a route set with at least two routes.')
    costs = rs.route_costs()
    phi = rs.overlap_costs() / np.sqrt(np.outer(costs, costs))
    return np.minimum(phi, 1.0 - SIMILARITY_EPSILON)


def inclusion_matrix(rs):
    """
    Returns the inclusion coefficients ``alpha`` of shape
    ``(n_links, n_routes)``, with ``alpha[l, r] = cost_l / cost_r`` for links
    on route ``r`` and zero elsewhere. Every column sums to one.
    """
    costs = rs.link_costs()[:, None]
    return rs.incidence() * costs / rs.route_costs()[None, :]
