# Configuration file for the Sphinx documentation builder.
# build with: python -m sphinx -b html . _build/html

import os
import sys

import tomli

sys.path.insert(0, os.path.abspath(".."))

# -- Project information -----------------------------------------------------

project = "pyk3fibration"

# Get version from pyproject.toml
try:
    with open(os.path.join(os.path.dirname(__file__), "..", "pyproject.toml"), "rb") as f:
        release = tomli.load(f)["project"]["version"]
except (FileNotFoundError, KeyError):
    release = "0.1.0"
    print(f"Warning: Could not read version from pyproject.toml, using {release}")

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "myst_parser",
    "sphinx_autodoc_typehints",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_title = "pyk3fibration Documentation"
html_short_title = "pyk3fibration"

# -- Extension configuration -------------------------------------------------

autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
    "undoc-members": True,
    "show-inheritance": True,
}

# NumPy style docstrings
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_include_init_with_doc = False
napoleon_use_param = True
napoleon_use_rtype = True

intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
    "sympy": ("https://docs.sympy.org/latest/", None),
}

myst_enable_extensions = ["colon_fence", "deflist", "dollarmath"]

autosummary_generate = True
