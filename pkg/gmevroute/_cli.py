#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#
"""
Command line interface of gmevroute.

Every subcommand reads JSON/CSV inputs, writes JSON or CSV with a metadata
header and exits with 0 on success, 2 on invalid input, 3 on a model domain
violation and 4 when an iterative scheme or an estimation fails.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np
import pandas as pd

from ._dataset_library_api import DatasetLibrary
from ._equilibrium import STEP_RULES, SUEProblem, SUESolver
from ._errors import (
    ConvergenceError,
    DomainError,
    EstimationError,
    NetworkError,
    SpecificationError
)
from ._estimation import (
    ChoiceDataset,
    MaximumLikelihoodEstimator,
    METHODS,
    validate
)
from ._experiment import behaviour_check, NetworkExperiment
from ._models import model_probabilities, ModelSpecification
from ._moments import (
    additive_moments,
    md_conditional_moments,
    multiplicative_moments
)
from ._network import RouteSet
from ._probit import (
    build_covariance,
    COVARIANCE_KINDS,
    foreseen_variance_share,
    generate_example_network,
    MnpSpecification,
    scenario_stream,
    simulate_probabilities
)
from .version_info import VERSION

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4


def _metadata(args, **extra):
    data = {'tool': 'gmevroute', 'version': VERSION,
            'command': args.command}
    for key in ('seed', 'n'):
        if getattr(args, key, None) is not None:
            data[key] = getattr(args, key)
    data.update(extra)
    return data


def _write_json(data, metadata, path=None):
    text = json.dumps(dict(data, metadata=metadata), indent=2)
    if path is None:
        print(text)
    else:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text + '\n')


def _write_csv(frame, metadata, path=None):
    header = ''.join(
        '# ' + key + ': ' + str(value) + '\n'
        for key, value in metadata.items())
    text = header + frame.to_csv(index=False)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)


def _write(args, data, frame, metadata):
    if args.format == 'csv':
        _write_csv(frame, metadata, args.out)
    else:
        _write_json(data, metadata, args.out)


def _parse_x_range(text):
    # start:stop or start:stop:step, stop inclusive
    try:
        parts = [float(part) for part in text.split(':')]
    except ValueError:
        raise argparse.ArgumentTypeError(
            'Expected start:stop[:step], got ' + repr(text) + '.')
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(
            'Expected start:stop[:step], got ' + repr(text) + '.')
    step = parts[2] if len(parts) == 3 else 1.0
    if step <= 0 or parts[1] < parts[0]:
        raise argparse.ArgumentTypeError('Invalid x range ' + repr(text))
    n = int(np.floor((parts[1] - parts[0]) / step + 1e-9)) + 1
    return [parts[0] + i * step for i in range(n)]


def _parse_fixed(items):
    fixed = {}
    for item in items or []:
        name, sep, value = item.partition('=')
        if not sep:
            raise SpecificationError(
                'Expected name=value for --fix, got ' + repr(item) + '.')
        try:
            fixed[name.strip()] = float(value)
        except ValueError:
            raise SpecificationError(
                'Value of fixed parameter ' + name + ' is not a number.')
    return fixed


def _route_set_for(args):
    if getattr(args, 'network', None):
        rs = RouteSet.from_json(args.network)
        return lambda key: rs
    library = DatasetLibrary()
    return lambda key: library.example_network(float(key))


def _probabilities_frame(route_ids, probabilities, **columns):
    frame = pd.DataFrame({'route_id': route_ids,
                          'probability': probabilities})
    for key, value in columns.items():
        frame[key] = value
    return frame


def run_probs(args):
    rs = RouteSet.from_json(args.network)
    spec = ModelSpecification.from_json(args.model)
    probabilities = model_probabilities(rs, spec)
    data = {'model': spec.name(),
            'probabilities': dict(zip(rs.route_ids(),
                                      probabilities.tolist()))}
    _write(args, data, _probabilities_frame(rs.route_ids(), probabilities),
           _metadata(args, model=spec.name()))
    return EXIT_OK


def run_moments(args):
    rs = RouteSet.from_json(args.network)
    spec = ModelSpecification.from_json(args.model)
    u = spec.utility()
    if spec.vector == 'A':
        report = additive_moments(spec.build_function(rs), u.utilities(rs))
    elif spec.vector == 'M':
        report = multiplicative_moments(
            spec.build_function(rs), u.utilities(rs))
    elif spec.vector == 'MD':
        if args.reference is None:
            raise SpecificationError(
                'Moments of a delta model need --reference.')
        report = md_conditional_moments(
            spec.function_factory(rs), rs, u, args.reference)
    else:
        raise DomainError(
            'Moments are not available for hybrid generating vectors.')
    frame = pd.DataFrame({
        'route_id': rs.route_ids(),
        'mean': report.means,
        'variance': report.variances,
    })
    _write(args, report.to_dict(rs.route_ids()), frame,
           _metadata(args, model=spec.name()))
    return EXIT_OK


def run_mnp(args):
    if args.network:
        rs = RouteSet.from_json(args.network)
        scenarios = [(None, rs, MnpSpecification(
            rs.route_costs(), args.theta, args.sigma_eps, args.cov_kind))]
    else:
        scenarios = []
        for x in args.x_range:
            rs, spec = generate_example_network(
                x, args.theta, args.sigma_eps, args.cov_kind)
            scenarios.append((x, rs, spec))

    rows = []
    for x, rs, spec in scenarios:
        cov = build_covariance(rs, spec, repair=args.repair)
        stream = () if x is None else scenario_stream(x)
        probabilities, errors = simulate_probabilities(
            spec.mean(), cov, args.n, args.seed, stream, args.workers)
        shares = foreseen_variance_share(spec)
        for route, p, se, share in zip(
                rs.route_ids(), probabilities, errors, shares):
            rows.append({'x': x, 'route_id': route, 'probability': p,
                         'standard_error': se,
                         'foreseen_variance_share': share})
    frame = pd.DataFrame(rows)
    if args.network:
        frame = frame.drop(columns='x')
    _write(args, {'probabilities': frame.to_dict(orient='records')}, frame,
           _metadata(args, theta=args.theta, sigma_eps=args.sigma_eps,
                     cov_kind=args.cov_kind))
    return EXIT_OK


def run_estimate(args):
    spec = ModelSpecification.from_json(args.model)
    route_set_for = _route_set_for(args)
    train = ChoiceDataset.read_csv(args.train, route_set_for)
    estimator = MaximumLikelihoodEstimator(spec, train)
    fixed = _parse_fixed(args.fix)
    if fixed:
        try:
            estimator.set_fixed_parameters(fixed)
        except ValueError as e:
            raise SpecificationError(str(e))
    estimator.set_n_starts(args.starts)
    estimator.set_seed(args.seed)
    estimator.set_method(args.method)
    result = estimator.run()
    if args.validate:
        result.set_validation(
            ChoiceDataset.read_csv(args.validate, route_set_for))

    frame = pd.DataFrame([dict(result.parameters, model=spec.name(),
                               log_likelihood=result.log_likelihood,
                               converged=result.converged)])
    _write(args, result.to_dict(), frame, _metadata(args, model=spec.name()))
    return EXIT_OK if result.converged else EXIT_CONVERGENCE


def run_validate(args):
    spec = ModelSpecification.from_json(args.model)
    data = ChoiceDataset.read_csv(args.data, _route_set_for(args))
    value = validate(spec, {}, data)
    result = {
        'model': spec.name(),
        'log_likelihood': value,
        'log_likelihood_per_observation': value / data.n_observations(),
        'n_observations': data.n_observations(),
    }
    _write(args, result, pd.DataFrame([result]),
           _metadata(args, model=spec.name()))
    return EXIT_OK


def run_sue(args):
    try:
        with open(args.problem) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SpecificationError(
            'Problem file ' + str(args.problem) + ' is not valid JSON: '
            + str(e))
    problem = SUEProblem.from_dict(data)
    solver = SUESolver(problem)
    solver.set_max_iterations(args.max_iterations)
    solver.set_gap_tolerance(args.gap_tolerance)
    solver.set_step_rule(args.step_rule)
    solution = solver.run()

    metadata = _metadata(args, model=problem.specification().name(),
                         step_rule=args.step_rule)
    if problem.is_experimental():
        metadata['experimental'] = True
    if args.trajectory:
        _write_csv(solution.trajectory, metadata, args.trajectory)
    frame = pd.DataFrame({
        'route_id': solution.route_ids,
        'flow': solution.flows,
        'generalized_cost': solution.costs,
    })
    _write(args, solution.to_dict(), frame, metadata)
    return EXIT_OK if solution.converged else EXIT_CONVERGENCE


def run_example_study(args):
    os.makedirs(args.out, exist_ok=True)
    experiment = NetworkExperiment(
        n=args.n, seed=args.seed, n_workers=args.workers)
    experiment.set_n_starts(args.starts)
    metadata = _metadata(args)

    _write_csv(experiment.ground_truth(), metadata,
               os.path.join(args.out, 'ground_truth.csv'))
    for name in experiment.DATASETS:
        _write_csv(experiment.dataset(name).to_frame(), metadata,
                   os.path.join(args.out, 'dataset_' + name + '.csv'))
    results = experiment.run()
    _write_csv(NetworkExperiment.results_frame(results), metadata,
               os.path.join(args.out, 'estimates.csv'))
    _write_csv(experiment.curves(results), metadata,
               os.path.join(args.out, 'curves.csv'))
    failed = [key for key, result in results.items()
              if isinstance(result, EstimationError)]
    return EXIT_CONVERGENCE if failed else EXIT_OK


def run_behavior_check(args):
    table = behaviour_check(mu=args.mu, c=args.c)
    table['mark'] = np.where(table['realistic'], '✓', '✗')
    _write(args, {'cells': table.to_dict(orient='records')}, table,
           _metadata(args, mu=args.mu, c=args.c))
    return EXIT_OK if table['matches_record'].all() else EXIT_CHECK_FAILED


def _add_output_flags(parser, default_format='json'):
    parser.add_argument('--out', help='Output file; standard output if not '
                        'given.')
    parser.add_argument('--format', choices=('json', 'csv'),
                        default=default_format)


def build_parser():
    """
    Returns the :class:`argparse.ArgumentParser` of the ``gmevroute``
    command.
    """
    parser = argparse.ArgumentParser(
        prog='gmevroute',
        description='GMEV route choice models: probabilities, moments, '
                    'probit ground truth, estimation and equilibrium.')
    parser.add_argument('--version', action='version', version=VERSION)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true')
    verbosity.add_argument('--quiet', action='store_true')
    subparsers = parser.add_subparsers(dest='command', required=True)

    sub = subparsers.add_parser('probs', help='Route choice probabilities.')
    sub.add_argument('--network', required=True)
    sub.add_argument('--model', required=True)
    _add_output_flags(sub)
    sub.set_defaults(func=run_probs)

    sub = subparsers.add_parser('moments', help='Utility moments.')
    sub.add_argument('--network', required=True)
    sub.add_argument('--model', required=True)
    sub.add_argument('--reference', help='Reference route of delta models.')
    _add_output_flags(sub)
    sub.set_defaults(func=run_moments)

    sub = subparsers.add_parser(
        'mnp', help='Simulated multinomial probit probabilities.')
    sub.add_argument('--network', help='Network whose link costs are travel '
                     'times; the example network over --x-range otherwise.')
    sub.add_argument('--x-range', type=_parse_x_range, default='0:40',
                     help='start:stop[:step] of the example network.')
    sub.add_argument('--n', type=int, default=100000)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--theta', type=float, default=0.2)
    sub.add_argument('--sigma-eps', type=float, default=10.0)
    sub.add_argument('--cov-kind', choices=COVARIANCE_KINDS,
                     default='arithmetic')
    sub.add_argument('--repair', action='store_true',
                     help='Clip negative covariance eigenvalues.')
    sub.add_argument('--workers', type=int, default=1)
    _add_output_flags(sub, 'csv')
    sub.set_defaults(func=run_mnp)

    sub = subparsers.add_parser('estimate', help='Maximum likelihood fit.')
    sub.add_argument('--model', required=True)
    sub.add_argument('--train', required=True, help='Dataset CSV.')
    sub.add_argument('--validate', help='Validation dataset CSV.')
    sub.add_argument('--network', help='Route set shared by all scenarios; '
                     'scenario keys are example network parameters '
                     'otherwise.')
    sub.add_argument('--fix', action='append', metavar='NAME=VALUE')
    sub.add_argument('--starts', type=int,
                     default=MaximumLikelihoodEstimator.N_STARTS)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--method', choices=sorted(METHODS),
                     default='nelder-mead')
    _add_output_flags(sub)
    sub.set_defaults(func=run_estimate)

    sub = subparsers.add_parser(
        'validate', help='Log-likelihood of a fitted model on a dataset.')
    sub.add_argument('--model', required=True)
    sub.add_argument('--data', required=True)
    sub.add_argument('--network')
    _add_output_flags(sub)
    sub.set_defaults(func=run_validate)

    sub = subparsers.add_parser('sue', help='Stochastic user equilibrium.')
    sub.add_argument('--problem', required=True)
    sub.add_argument('--step-rule', choices=STEP_RULES, default='msa')
    sub.add_argument('--max-iterations', type=int,
                     default=SUESolver.MAX_ITERATIONS)
    sub.add_argument('--gap-tolerance', type=float,
                     default=SUESolver.GAP_TOLERANCE)
    sub.add_argument('--trajectory', help='CSV file of the gap trajectory.')
    _add_output_flags(sub)
    sub.set_defaults(func=run_sue)

    sub = subparsers.add_parser(
        'paper-example', help='Example network estimation study.')
    sub.add_argument('--out', required=True, help='Output directory.')
    sub.add_argument('--n', type=int, default=100000)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--starts', type=int,
                     default=MaximumLikelihoodEstimator.N_STARTS)
    sub.add_argument('--workers', type=int, default=1)
    sub.set_defaults(func=run_example_study)

    sub = subparsers.add_parser(
        'behavior-check', help='Behaviour under simple network changes.')
    sub.add_argument('--mu', type=float, default=1.0)
    sub.add_argument('--c', type=float, default=-1.0)
    _add_output_flags(sub, 'csv')
    sub.set_defaults(func=run_behavior_check)
    return parser


def main(argv=None):
    """
    Runs the command line interface and returns its exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format='%(levelname)s %(name)s: %(message)s')

    if args.command == 'paper-example' and args.n < 10000:
        print('error: paper-example needs --n of at least 10000',
              file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (NetworkError, SpecificationError, OSError) as e:
        print('error: ' + str(e), file=sys.stderr)
        return EXIT_INPUT
    except DomainError as e:
        print('error: ' + str(e), file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, EstimationError) as e:
        print('error: ' + str(e), file=sys.stderr)
        return EXIT_CONVERGENCE
