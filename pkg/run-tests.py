#
# Test runner for gmevroute: unit tests, copyright headers and documentation.
#

import argparse
import datetime
import inspect
import os
import re
import subprocess
import sys
import unittest

PACKAGE = 'gmevroute'

HEADER = """#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#"""

# Modules that may appear in the public namespace of the package.
EXPOSED_MODULES = [
    'gmevroute.version_info',
]

DOC_SOURCE = os.path.join('docs', 'source')


def run_unit_tests():
    """
    Discovers and runs every ``test*.py`` file in the package test folder.
    """
    suite = unittest.defaultTestLoader.discover(
        os.path.join(PACKAGE, 'tests'), pattern='test*.py')
    result = unittest.TextTestRunner(verbosity=2).run(suite)
    sys.exit(0 if result.wasSuccessful() else 1)


def run_copyright_checks():
    """
    Checks that LICENSE.md carries the current year and that every Python
    source file of the package starts with the license header.
    """
    print('\nChecking copyright notices.')
    failed = False

    year = str(datetime.date.today().year)
    with open('LICENSE.md', encoding='utf-8') as f:
        if 'Copyright (c) ' + year not in f.read():
            print('LICENSE.md does not carry the year ' + year + '.')
            failed = True

    for directory, _, names in os.walk(PACKAGE):
        for name in sorted(names):
            if not name.endswith('.py'):
                continue
            path = os.path.join(directory, name)
            with open(path, encoding='utf-8') as f:
                if not f.read().startswith(HEADER):
                    print('Missing license header: ' + path)
                    failed = True

    if failed:
        print('FAILED')
        sys.exit(1)
    print('Copyright notices are complete.')


def run_doctests():
    """
    Builds the documentation and checks that the public interface of the
    package is documented.
    """
    print('\nBuilding documentation.')
    code = subprocess.call([
        'sphinx-build', '-b', 'doctest', DOC_SOURCE,
        os.path.join('docs', 'build', 'html'), '-W'])
    if code != 0:
        print('FAILED')
        sys.exit(code)

    print('\nChecking the public interface against the documentation.')
    documented = documented_symbols()
    missing, modules = undocumented_symbols(documented)
    for name in modules:
        print('  unexpected module in public interface: ' + name)
    for name in missing:
        print('  not documented in any RST file: ' + name)
    if missing or modules:
        print('FAILED')
        sys.exit(1)
    print('The public interface is documented.')


def documented_symbols():
    """
    Returns the set of fully qualified names that appear in an
    ``autoclass`` or ``autofunction`` directive, and fails on duplicates.
    """
    module_pattern = re.compile(r'\.\.\s*\S*module::\s*(\S+)')
    symbol_pattern = re.compile(r'\.\.\s*auto(?:class|function)::\s*(\S+)')

    found = []
    for directory, _, names in os.walk(DOC_SOURCE):
        for name in sorted(names):
            if not name.endswith('.rst'):
                continue
            module = ''
            with open(os.path.join(directory, name), encoding='utf-8') as f:
                for line in f:
                    match = module_pattern.search(line)
                    if match:
                        module = match.group(1) + '.'
                        continue
                    match = symbol_pattern.search(line)
                    if match:
                        found.append(module + match.group(1))

    duplicates = sorted({name for name in found if found.count(name) > 1})
    if duplicates:
        for name in duplicates:
            print('  documented more than once: ' + name)
        print('FAILED')
        sys.exit(1)
    return set(found)


def undocumented_symbols(documented):
    """
    Returns the public classes and functions of the package that are not in
    ``documented``, and the unexpected modules in its namespace.
    """
    package = __import__(PACKAGE)
    missing = []
    modules = []
    for name in sorted(dir(package)):
        if name.startswith('_'):
            continue
        value = getattr(package, name)
        if inspect.ismodule(value):
            if value.__name__ not in EXPOSED_MODULES:
                modules.append(value.__name__)
        elif inspect.isclass(value) or inspect.isfunction(value):
            qualified = PACKAGE + '.' + value.__name__
            if qualified not in documented:
                missing.append(qualified)
    return missing, modules


if __name__ == '__main__':
    parser = argparse.ArgumentParser(
        description='Run the checks of gmevroute.',
        epilog='To run a single test file, use e.g.'
               ' $ python gmevroute/tests/test_models.py',
    )
    parser.add_argument(
        '--unit',
        action='store_true',
        help='Run all unit tests.',
    )
    parser.add_argument(
        '--slow',
        action='store_true',
        help='Run all unit tests, including the large-sample'
             ' reproduction of the example network study.',
    )
    parser.add_argument(
        '--copyright',
        action='store_true',
        help='Check the license year and the source file headers.',
    )
    parser.add_argument(
        '--doctest',
        action='store_true',
        help='Build the docs and check every public name is documented.',
    )
    args = parser.parse_args()

    if args.copyright:
        run_copyright_checks()
    if args.doctest:
        run_doctests()
    if args.slow:
        os.environ['GMEVROUTE_SLOW'] = '1'
    if args.unit or args.slow:
        run_unit_tests()
    if not (args.unit or args.slow or args.copyright or args.doctest):
        parser.print_help()
