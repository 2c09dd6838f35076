"""CPT-value solver for Markov chains and MDPs.

Models and parameters are passed as JSON documents: a path, a JSON string,
or an already-parsed dict.
"""
import json
import os

from . import _core
from ._core import DomainError, ParseError, SolverError, ValidationError

__all__ = [
    "cpt",
    "eu",
    "lipschitz_constant",
    "solve",
    "chain_prospect",
    "frontier",
    "ParseError",
    "ValidationError",
    "DomainError",
    "SolverError",
]


def _document(doc):
    if doc is None:
        return None
    if isinstance(doc, dict):
        return json.dumps(doc)
    if isinstance(doc, (str, os.PathLike)) and os.path.isfile(doc):
        with open(doc, encoding="utf-8") as f:
            return f.read()
    return str(doc)


def cpt(outcomes, probs, params=None):
    return _core.cpt(list(outcomes), list(probs), _document(params))


def eu(outcomes, probs, params=None):
    return _core.eu(list(outcomes), list(probs), _document(params))


def lipschitz_constant(outcomes, params=None):
    return _core.lipschitz_constant(list(outcomes), _document(params))


def solve(model, params=None, epsilon=0.01, mode="cpt", direction="max", bnb=True):
    """Returns the result document as a dict."""
    text = _core.solve(_document(model), _document(params), epsilon, mode, direction, bnb)
    return json.loads(text)


def chain_prospect(model):
    """Induced prospect of a Markov chain as (outcomes, probs)."""
    return _core.chain_prospect(_document(model))


def frontier(model, epsilon=1e-6):
    return _core.frontier(_document(model), epsilon)
