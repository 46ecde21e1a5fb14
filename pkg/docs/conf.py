# Configuration file for the Sphinx documentation builder.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

about = dict()
with open(os.path.join('..', 'cert', '__version__.py'), 'r') as f:
    exec(f.read(), about)

project = u'cert'
copyright = u'2024, info@neuroinfo.org'
author = u'info@neuroinfo.org'
version = about['__version__']
release = about['__version__']

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary'
]

templates_path = ['_templates']
source_suffix = ['.rst', '.md']
master_doc = 'index'
language = None
exclude_patterns = [u'_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

html_theme = 'alabaster'
html_theme_options = {
    'show_powered_by': False,
    'github_user': 'harvard-nrg',
    'github_repo': 'cert',
    'github_banner': True,
    'show_related': False,
}
htmlhelp_basename = 'certdoc'

latex_documents = [
    (master_doc, 'cert.tex', u'cert Documentation',
     u'info@neuroinfo.org', 'manual'),
]

man_pages = [
    (master_doc, 'cert', u'cert Documentation',
     [author], 1)
]
