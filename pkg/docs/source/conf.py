#
# Sphinx configuration of the gmevroute documentation.
#
import os
import sys

sys.path.insert(0, os.path.abspath('../..'))
sys.path.insert(0, os.path.abspath('../../gmevroute'))

from version_info import VERSION  # noqa

project = 'gmevroute'
copyright = '2026, gmevroute developers'
author = 'gmevroute developers'
release = VERSION

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
]

# Members of documented classes, including those inherited from pints
autodoc_default_options = {
    'members': None,
    'inherited-members': None,
}

templates_path = []
exclude_patterns = []

html_theme = 'alabaster'
html_static_path = []
