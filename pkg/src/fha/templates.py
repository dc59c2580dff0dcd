"""Build core syntax from surface text with placeholders.

Placeholders are parsed as top-level type or term names and then replaced by
the given closed types and terms.  This keeps library constructions readable.
A term placeholder given as ``(term, type)`` is inlined with a type annotation.
"""

from __future__ import annotations

from typing import Iterable, Optional

from . import syntax as s
from .syntax import Mode
from .typenf import beta_types_in


def _scope(types, terms, effects: Iterable[s.EffectDecl], base: Optional[s.Program]):
    decls = list(base.decls) if base else []
    decls += [s.TypeDef(n, s.TY, s.UNIT) for n in types]
    decls += [s.TermDef(n, s.UNIT, s.UNIT_V) for n in terms]
    decls += [s.EffectDef(e) for e in effects]
    return s.Program(tuple(decls))


def annotate(term: s.Term, type_: s.TypeExpr) -> s.Term:
    """``(\\(x:T). x) t``: pins the type of an inlined term for the checker."""
    return s.App(s.Lam(type_, s.Var(0), "x"), term)


def _finish(node, types, terms):
    terms = {k: annotate(*v) if isinstance(v, tuple) else v for k, v in terms.items()}
    return beta_types_in(s.replace_consts(node, types, terms))


def ty(text: str, types: Optional[dict] = None, effects=(), base=None) -> s.TypeExpr:
    from .parser import parse_type
    types = types or {}
    return _finish(parse_type(text, _scope(types, {}, effects, base), "<template>"), types, {})


def tm(text: str, types: Optional[dict] = None, terms: Optional[dict] = None, effects=(),
       base=None) -> s.Term:
    from .parser import parse_term
    types, terms = types or {}, terms or {}
    node = parse_term(text, _scope(types, terms, effects, base), "<template>")
    return _finish(node, types, terms)


def co(text: str, types: Optional[dict] = None, terms: Optional[dict] = None, effects=(),
       base=None, mode: Mode = Mode.TOTAL) -> s.Comp:
    from .parser import parse_comp
    types, terms = types or {}, terms or {}
    node = parse_comp(text, _scope(types, terms, effects, base), mode, "<template>")
    return _finish(node, types, terms)
