"""Type-level normalization: beta, optional eta, optional unfolding of definitions."""

from __future__ import annotations

from typing import Callable, Optional

from . import syntax as s

Lookup = Optional[Callable[[str], s.TypeExpr]]


def normal_form(t: s.TypeExpr, lookup: Lookup = None, eta: bool = True) -> s.TypeExpr:
    """Beta-normal (and eta-short when ``eta``) form of ``t``.

    ``lookup`` maps a ``TConst`` name to its closed body; without it constants
    stay opaque.  Simply-kinded type lambdas always normalize.
    """
    match t:
        case s.TVar() | s.TUnit() | s.TBool() | s.TEmpty():
            return t
        case s.TConst(name):
            if lookup is None:
                return t
            return normal_form(lookup(name), lookup, eta)
        case s.TArrow(a, b):
            return s.TArrow(normal_form(a, lookup, eta), normal_form(b, lookup, eta))
        case s.TProd(a, b):
            return s.TProd(normal_form(a, lookup, eta), normal_form(b, lookup, eta))
        case s.TSum(a, b):
            return s.TSum(normal_form(a, lookup, eta), normal_form(b, lookup, eta))
        case s.TTh(e, a):
            return s.TTh(e, normal_form(a, lookup, eta))
        case s.TPTh(e, a):
            return s.TPTh(e, normal_form(a, lookup, eta))
        case s.TForall(k, body, name):
            return s.TForall(k, normal_form(body, lookup, eta), name)
        case s.TLam(k, body, name):
            nb = normal_form(body, lookup, eta)
            if (eta and isinstance(nb, s.TApp) and nb.arg == s.TVar(0)
                    and 0 not in s.free_type_vars(nb.fn)):
                return s.shift_type(nb.fn, 0, -1)
            return s.TLam(k, nb, name)
        case s.TApp(f, a):
            nf = normal_form(f, lookup, eta)
            na = normal_form(a, lookup, eta)
            if isinstance(nf, s.TLam):
                return normal_form(s.subst_type(nf.body, na), lookup, eta)
            return s.TApp(nf, na)
    raise s.InternalError(f"not a type: {t!r}")


def beta_types_in(node):
    """Contract every type-level beta redex inside any syntax node."""

    def fn(n):
        if isinstance(n, s.TApp) and isinstance(n.fn, s.TLam):
            return normal_form(n, None, eta=False)
        return n

    return s.map_nodes(node, fn)
