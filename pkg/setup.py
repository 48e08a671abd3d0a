#
# gmevroute setuptools script
#
from setuptools import setup, find_packages


def get_version():
    """
    Get version number from the gmevroute module.
    The easiest way would be to just ``import gmevroute``, but note that this
    may fail if the dependencies have not been installed yet. Instead, we've
    put the version number in a simple version_info module, that we'll import
    here by temporarily adding the gmevroute directory to the pythonpath using
    sys.path.
    """
    import os
    import sys

    sys.path.append(os.path.abspath('gmevroute'))
    from version_info import VERSION as version
    sys.path.pop()

    return version


def get_readme():
    """
    Load README.md text for use as description.
    """
    with open('README.md', encoding='utf-8') as f:
        return f.read()


setup(
    # Module name (lowercase)
    name='gmevroute',

    # Version
    version=get_version(),

    description='Generalized multivariate extreme value route choice models, estimation and stochastic user equilibrium.',  # noqa

    long_description=get_readme(),
    long_description_content_type='text/markdown',

    license='BSD 3-Clause "New" or "Revised" License',

    maintainer='',

    maintainer_email='',

    # Packages to include
    packages=find_packages(include=('gmevroute', 'gmevroute.*')),
    include_package_data=True,
    package_data={
        'gmevroute': ['data_library/*.json'],
    },

    # Command line interface
    entry_points={
        'console_scripts': [
            'gmevroute = gmevroute._cli:main',
        ],
    },

    # List of dependencies
    install_requires=[
        # Dependencies go here!
        'numpy',
        'pandas',
        'parameterized',
        'pints',
        'scipy',
    ],
    extras_require={
        'docs': [
            # Sphinx for doc generation. Version 1.7.3 has a bug:
            'sphinx>=1.5, !=1.7.3',
        ],
        'dev': [
            # Flake8 for code style checking
            'flake8>=3',
        ],
    },
)
