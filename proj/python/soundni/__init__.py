"""Noninterference checking for a small while language.

The heavy lifting happens in the C++ extension; this module turns its JSON
output into dictionaries.
"""

import json

from . import _core
from ._core import ParseError, parse, run

__all__ = ["ParseError", "check", "check_file", "corpus", "parse", "run"]


def check(source, engine="redsoundrse", single_engine="soundse", domain="intervals", bound=3,
          path_cap=4096, all_paths=False, solver=None, timeout_ms=5000, name="<string>"):
    """Analyze one program and return the verdict document as a dict."""
    text = _core.check(source, engine=engine, single_engine=single_engine, domain=domain, bound=bound,
                       path_cap=path_cap, all_paths=all_paths, solver=solver, timeout_ms=timeout_ms, name=name)
    return json.loads(text)


def check_file(path, **kwargs):
    with open(path, encoding="utf-8") as f:
        source = f.read()
    kwargs.setdefault("name", path)
    return check(source, **kwargs)


def corpus(directory, bound=3, solver=None):
    """Run the default engine matrix over every *.imp file in a directory."""
    return json.loads(_core.corpus(directory, bound=bound, solver=solver))
