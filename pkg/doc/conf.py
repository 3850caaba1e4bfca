# -*- coding: utf-8 -*-
#
# marswitch documentation build configuration file.
#
# All configuration values have a default; values that are commented out
# serve to show the default.

from datetime import datetime

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx_click",
    "numpydoc",
    "sphinx_copybutton",
]

source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = u'marswitch'
copyright = f'2025-{datetime.today().year}'
author = u'marswitch contributors'

# The short X.Y version.
from marswitch import __version__ as version  # noqa
# The full version, including alpha/beta/rc tags.
release = version

language = 'en'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# generate autosummary even if no references
autosummary_generate = True

# remove warnings: "toctree contains reference to nonexisting document"
numpydoc_show_class_members = False

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_book_theme"

html_theme_options = {
    "home_page_in_toc": True,
    "pygments_light_style": "colorful",
    "pygments_dark_style": "github-dark",
}

htmlhelp_basename = 'marswitchdoc'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/devdocs', None),
    'scipy': ('https://scipy.github.io/devdocs', None),
    'pandas': ('https://pandas.pydata.org/docs', None),
}
intersphinx_timeout = 5

# -- Options for copybutton ---------------------------------------------
copybutton_prompt_text = r">>> |\.\.\. |\$ "
copybutton_prompt_is_regexp = True
