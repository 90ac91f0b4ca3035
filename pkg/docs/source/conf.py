# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------

project = "expcorr"
copyright = "2026, expcorr developers"
author = "expcorr developers"

# -- General configuration ---------------------------------------------------

extensions = [
    "myst_parser",
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]

myst_enable_extensions = [
    "attrs_block",
    "dollarmath",
]

autodoc_default_options = {
    "public-members": True,
    "exclude-members": "__weakref__, __hash__, __repr__, __subclasshook__",
}


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_book_theme"
html_static_path = ["_static"]
