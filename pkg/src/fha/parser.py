"""Surface syntax: tokenizer, recursive-descent parser, and pretty printer.

Names are resolved while parsing, so the result is already in de Bruijn form.
Effect expressions ``E1 ++ E2`` that were not declared explicitly are
synthesized as coproduct declarations the first time they are mentioned.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import syntax as s
from .syntax import Mode
from ._stack import deep

KEYWORDS = frozenset("""
    Ty Unit Bool Empty forall Th PTh tt ff ite fst snd inl inr case absurd
    thunk pthunk handle handler via thalg val let in op force fix throw catch
    type effect term main hfunctor
""".split())

_SYMBOLS = ("/\\", "->", "~>", "++", "\\", "(", ")", "[", "]", "{", "}", ":", ";", ",",
            ".", "=", "+", "*")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*")
_SPACE = re.compile(r"(?:\s+|--[^\n]*)+")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start}-{self.end}"


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: frozenset = frozenset()):
        self.span = span
        self.message = message
        self.expected = frozenset(expected)
        text = f"{span}: error: {message}"
        if self.expected:
            text += "\n  expected one of: " + ", ".join(sorted(self.expected))
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "kw", "sym", "eof"
    text: str
    start: int
    end: int


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    pos, n = 0, len(source)
    while True:
        m = _SPACE.match(source, pos)
        if m:
            pos = m.end()
        if pos >= n:
            toks.append(Token("eof", "", n, n))
            return toks
        m = _IDENT.match(source, pos)
        if m:
            word = m.group()
            toks.append(Token("kw" if word in KEYWORDS else "id", word, pos, m.end()))
            pos = m.end()
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, pos):
                toks.append(Token("sym", sym, pos, pos + len(sym)))
                pos += len(sym)
                break
        else:
            raise ParseError(SourceSpan(file, pos, pos + 1),
                             f"unexpected character {source[pos]!r}")


def effect_name(parts) -> str:
    """Canonical name of an effect expression tree (str or (left, right))."""
    if isinstance(parts, str):
        return parts
    left, right = parts
    ln = effect_name(left)
    if isinstance(left, tuple):
        ln = f"({ln})"
    return f"{ln}++{effect_name(right)}"


def split_effect_name(name: str):
    """Inverse of :func:`effect_name`: parse a canonical name into a tree."""
    toks = tokenize(name)
    pos = 0

    def expr():
        nonlocal pos
        left = atom()
        if toks[pos].text == "++":
            pos += 1
            return (left, expr())
        return left

    def atom():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t.text == "(":
            e = expr()
            pos += 1
            return e
        return t.text

    return expr()


class _Globals:
    """Top-level names visible while parsing (prelude plus earlier decls)."""

    def __init__(self):
        self.types: dict[str, s.TypeDef] = {}
        self.effects: dict[str, s.EffectDecl] = {}
        self.terms: dict[str, s.TypeExpr] = {}
        self.handlers: dict[str, s.HandlerExpr] = {}
        self.ops: dict[str, tuple[str, int, s.OpSig]] = {}

    def add(self, d: s.Decl) -> None:
        if isinstance(d, s.TypeDef):
            self.types[d.name] = d
        elif isinstance(d, s.EffectDef):
            self.effects[d.name] = d.decl
            for i, op in enumerate(d.decl.ops or ()):
                self.ops[op.name] = (d.name, i, op)
        elif isinstance(d, s.TermDef):
            self.terms[d.name] = d.type
        elif isinstance(d, s.HandlerDef):
            self.handlers[d.name] = d.handler


def globals_of(prog: Optional[s.Program]) -> _Globals:
    g = _Globals()
    for d in (prog.decls if prog else ()):
        g.add(d)
    return g


class _Parser:
    def __init__(self, source: str, file: str, prelude: Optional[s.Program]):
        self.source = source
        self.file = file
        self.toks = tokenize(source, file)
        self.pos = 0
        self.g = globals_of(prelude)
        self.decls: list[s.Decl] = []
        self.tvars: list[str] = []
        self.vars: list[str] = []

    # -------------------------------------------------------------- helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "kw") and t.text == text

    def span(self, start: int, end: Optional[int] = None) -> SourceSpan:
        if end is None:
            end = max(start, self.toks[self.pos - 1].end if self.pos else start)
        return SourceSpan(self.file, start, end)

    def error(self, message: str, expected=(), tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(SourceSpan(self.file, tok.start, max(tok.end, tok.start)), message,
                          frozenset(expected))

    def advance(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.peek().text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}", {text})
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> str:
        t = self.peek()
        if t.kind != "id":
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}", {what})
        self.pos += 1
        return t.text

    def field(self, name: str) -> None:
        t = self.peek()
        if t.kind != "id" or t.text != name:
            raise self.error(f"expected field {name!r}", {name})
        self.pos += 1
        self.expect("=")

    def emit(self, d: s.Decl) -> None:
        self.decls.append(d)
        self.g.add(d)

    # -------------------------------------------------------------- program

    def program(self) -> s.Program:
        while self.peek().kind != "eof":
            self.decl()
        return s.Program(tuple(self.decls))

    def _fresh_name(self, name: str, table: dict, tok: Token) -> None:
        if name in table:
            raise self.error(f"duplicate declaration of {name!r}", tok=tok)

    def decl(self) -> None:
        start = self.peek().start
        if self.accept("type"):
            tok = self.peek()
            name = self.ident("type name")
            self._fresh_name(name, self.g.types, tok)
            self.expect(":")
            kind = self.kind()
            self.expect("=")
            body = self.type()
            self.emit(s.TypeDef(name, kind, body, (start, self.span(start).end)))
        elif self.accept("effect"):
            tok = self.peek()
            name = effect_name(self.effect_tree())
            self._fresh_name(name, self.g.effects, tok)
            if self.accept("{"):
                ops = []
                while not self.at("}"):
                    otok = self.peek()
                    oname = self.ident("operation name")
                    # across effects a later row shadows earlier operation sugar
                    if any(o.name == oname for o in ops):
                        raise self.error(f"duplicate operation {oname!r}", tok=otok)
                    self.expect(":")
                    p = self.type()
                    self.expect("~>")
                    a = self.type()
                    ops.append(s.OpSig(oname, p, a))
                    if not self.accept(";"):
                        break
                self.expect("}")
                from .stdlib import elaborate_row
                decl = elaborate_row(ops, name)
            else:
                self.expect("=")
                self.expect("hfunctor")
                self.expect("{")
                self.field("carrier")
                carrier = self.type()
                self.expect(";")
                self.field("hfmap")
                hfmap = self.term()
                self.expect(";")
                self.field("hmap")
                hmap = self.term()
                self.accept(";")
                self.expect("}")
                decl = s.EffectDecl(name, carrier, hfmap, hmap)
            self.emit(s.EffectDef(decl, (start, self.span(start).end)))
        elif self.accept("term"):
            tok = self.peek()
            name = self.ident("term name")
            self._fresh_name(name, self.g.terms, tok)
            self.expect(":")
            ty = self.type()
            self.expect("=")
            body = self.term()
            self.emit(s.TermDef(name, ty, body, (start, self.span(start).end)))
        elif self.accept("handler"):
            tok = self.peek()
            name = self.ident("handler name")
            self._fresh_name(name, self.g.handlers, tok)
            self.expect(":")
            eff = self.effect_ref()
            self.expect("=")
            h = self.handler_body(eff)
            self.emit(s.HandlerDef(name, h, (start, self.span(start).end)))
        elif self.accept("main"):
            mode = Mode.TOTAL
            if self.accept("["):
                t = self.peek()
                if t.kind == "id" and t.text in ("total", "partial"):
                    self.pos += 1
                    mode = Mode(t.text)
                else:
                    raise self.error("expected 'total' or 'partial'", {"total", "partial"})
                self.expect("]")
            if any(isinstance(d, s.Main) for d in self.decls):
                raise self.error("duplicate main declaration")
            eff = self.effect_ref()
            self.expect(":")
            ty = self.type()
            self.expect("=")
            c = self.comp(mode)
            self.emit(s.Main(mode, eff, ty, c, span=(start, self.span(start).end)))
        else:
            raise self.error("expected a declaration",
                             {"type", "effect", "term", "handler", "main"})

    # -------------------------------------------------------------- effects

    def effect_tree(self):
        left = self.effect_atom()
        if self.accept("++"):
            return (left, self.effect_tree())
        return left

    def effect_atom(self):
        if self.accept("("):
            e = self.effect_tree()
            self.expect(")")
            return e
        return self.ident("effect name")

    def effect_ref(self) -> str:
        tok = self.peek()
        return self.resolve_effect(self.effect_tree(), tok)

    def resolve_effect(self, tree, tok: Token) -> str:
        name = effect_name(tree)
        if name in self.g.effects:
            return name
        if isinstance(tree, str):
            raise self.error(f"unknown effect {name!r}", tok=tok)
        left = self.resolve_effect(tree[0], tok)
        right = self.resolve_effect(tree[1], tok)
        from .stdlib import coprod_hf
        decl = coprod_hf(self.g.effects[left], self.g.effects[right], name)
        self.emit(s.EffectDef(decl, (tok.start, tok.start)))
        return name

    # -------------------------------------------------------------- kinds

    def kind(self) -> s.Kind:
        k = self.kind_atom()
        if self.accept("->"):
            return s.KArrow(k, self.kind())
        return k

    def kind_atom(self) -> s.Kind:
        if self.accept("Ty"):
            return s.TY
        if self.accept("("):
            k = self.kind()
            self.expect(")")
            return k
        raise self.error("expected a kind", {"Ty", "("})

    # -------------------------------------------------------------- types

    def binder(self, default_kind: bool) -> tuple[str, object]:
        """``(x : T)`` or ``(a : K)``; a bare name means kind Ty."""
        if default_kind and self.peek().kind == "id":
            return self.ident(), s.TY
        self.expect("(")
        name = self.ident("binder name")
        self.expect(":")
        return name, None

    def type(self) -> s.TypeExpr:
        if self.at("forall") or self.at("\\"):
            is_forall = self.advance().text == "forall"
            name, k = self.binder(True)
            if k is None:
                k = self.kind()
                self.expect(")")
            self.expect(".")
            self.tvars.append(name)
            try:
                body = self.type()
            finally:
                self.tvars.pop()
            return s.TForall(k, body, name) if is_forall else s.TLam(k, body, name)
        left = self.type_sum()
        if self.accept("->"):
            return s.TArrow(left, self.type())
        return left

    def type_sum(self) -> s.TypeExpr:
        left = self.type_prod()
        if self.accept("+"):
            return s.TSum(left, self.type_sum())
        return left

    def type_prod(self) -> s.TypeExpr:
        left = self.type_app()
        if self.accept("*"):
            return s.TProd(left, self.type_prod())
        return left

    def type_app(self) -> s.TypeExpr:
        if self.at("Th") or self.at("PTh"):
            total = self.advance().text == "Th"
            eff = self.effect_ref_atom()
            arg = self.type_atom()
            head = s.TTh(eff, arg) if total else s.TPTh(eff, arg)
        else:
            head = self.type_atom()
        while self._type_atom_start():
            head = s.TApp(head, self.type_atom())
        return head

    def effect_ref_atom(self) -> str:
        tok = self.peek()
        return self.resolve_effect(self.effect_atom(), tok)

    def _type_atom_start(self) -> bool:
        t = self.peek()
        return t.kind == "id" or (t.kind in ("kw", "sym") and t.text in ("Unit", "Bool", "Empty", "("))

    def type_atom(self) -> s.TypeExpr:
        t = self.peek()
        if self.accept("Unit"):
            return s.UNIT
        if self.accept("Bool"):
            return s.BOOL
        if self.accept("Empty"):
            return s.EMPTY
        if self.accept("("):
            ty = self.type()
            self.expect(")")
            return ty
        if t.kind == "id":
            self.pos += 1
            for i in range(len(self.tvars) - 1, -1, -1):
                if self.tvars[i] == t.text:
                    return s.TVar(len(self.tvars) - 1 - i)
            if t.text in self.g.types:
                return s.TConst(t.text)
            raise self.error(f"unbound type variable {t.text!r}", tok=t)
        raise self.error("expected a type", {"type"})

    # -------------------------------------------------------------- terms

    def term(self) -> s.Term:
        if self.accept("\\"):
            self.expect("(")
            name = self.ident("variable name")
            self.expect(":")
            ann = self.type()
            self.expect(")")
            self.expect(".")
            self.vars.append(name)
            try:
                body = self.term()
            finally:
                self.vars.pop()
            return s.Lam(ann, body, name)
        if self.accept("/\\"):
            name, k = self.binder(True)
            if k is None:
                k = self.kind()
                self.expect(")")
            self.expect(".")
            self.tvars.append(name)
            try:
                body = self.term()
            finally:
                self.tvars.pop()
            return s.TyLam(k, body, name)
        if self.accept("thunk"):
            return s.Thunk(self.comp(Mode.TOTAL))
        if self.accept("pthunk"):
            return s.PThunk(self.comp(Mode.PARTIAL))
        if self.accept("handle"):
            result = None
            if self.accept("["):
                result = self.type()
                self.expect("]")
            h = self.handler_expr()
            mode = self.handler_mode(h)
            return s.Handle(h, self.comp(mode), result)
        return self.term_app()

    def handler_mode(self, h: s.HandlerLike) -> Mode:
        if isinstance(h, s.HandlerRef):
            h = self.g.handlers[h.name]
        return h.mode

    def term_app(self) -> s.Term:
        head = self.term_prefix()
        while True:
            if self.accept("["):
                head = s.TyApp(head, self.type())
                self.expect("]")
            elif self._term_atom_start():
                head = s.App(head, self.term_atom())
            else:
                return head

    def _target(self) -> Optional[s.TypeExpr]:
        if self.accept("["):
            ty = self.type()
            self.expect("]")
            return ty
        return None

    def term_prefix(self) -> s.Term:
        if self.accept("ite"):
            c = self.term_atom()
            a = self.term_atom()
            return s.Ite(c, a, self.term_atom())
        if self.accept("fst"):
            return s.Fst(self.term_atom())
        if self.accept("snd"):
            return s.Snd(self.term_atom())
        if self.accept("inl"):
            tgt = self._target()
            return s.Inl(tgt, self.term_atom())
        if self.accept("inr"):
            tgt = self._target()
            return s.Inr(tgt, self.term_atom())
        if self.accept("absurd"):
            self.expect("[")
            tgt = self.type()
            self.expect("]")
            return s.Absurd(tgt, self.term_atom())
        return self.term_atom()

    def _term_atom_start(self) -> bool:
        t = self.peek()
        if t.kind == "id":
            return True
        return t.kind in ("kw", "sym") and t.text in ("tt", "ff", "(", "case")

    def term_atom(self) -> s.Term:
        t = self.peek()
        if self.accept("tt"):
            return s.TT
        if self.accept("ff"):
            return s.FF
        if self.accept("("):
            if self.accept(")"):
                return s.UNIT_V
            a = self.term()
            if self.accept(","):
                b = self.term()
                self.expect(")")
                return s.Pair(a, b)
            self.expect(")")
            return a
        if self.accept("case"):
            scrut = self.term()
            self.expect("{")
            self.expect("inl")
            ln = self.ident("variable name")
            self.expect("->")
            left = self.bound_term(ln)
            self.expect(";")
            self.expect("inr")
            rn = self.ident("variable name")
            self.expect("->")
            right = self.bound_term(rn)
            self.accept(";")
            self.expect("}")
            return s.Case(scrut, left, right, ln, rn)
        if t.kind == "id":
            self.pos += 1
            for i in range(len(self.vars) - 1, -1, -1):
                if self.vars[i] == t.text:
                    return s.Var(len(self.vars) - 1 - i)
            if t.text in self.g.terms:
                return s.Const(t.text)
            raise self.error(f"unbound variable {t.text!r}", tok=t)
        raise self.error(f"expected a term, found {t.text or 'end of input'!r}", {"term"})

    def bound_term(self, name: str) -> s.Term:
        self.vars.append(name)
        try:
            return self.term()
        finally:
            self.vars.pop()

    def bound_comp(self, name: str, mode: Mode) -> s.Comp:
        self.vars.append(name)
        try:
            return self.comp(mode)
        finally:
            self.vars.pop()

    # -------------------------------------------------------------- handlers

    def handler_expr(self) -> s.HandlerLike:
        t = self.peek()
        if self.accept("handler"):
            eff = self.effect_ref_atom()
            return self.handler_body(eff)
        if self.accept("thalg"):
            eff = self.effect_ref_atom()
            from .stdlib import th_alg
            return th_alg(self.g.effects[eff])
        if t.kind == "id":
            self.pos += 1
            if t.text not in self.g.handlers:
                raise self.error(f"unknown handler {t.text!r}", tok=t)
            return s.HandlerRef(t.text)
        raise self.error("expected a handler", {"handler", "thalg", "handler name"})

    def handler_body(self, eff: str) -> s.HandlerExpr:
        self.expect("{")
        self.field("M")
        monad = self.type()
        self.expect(";")
        self.field("ret")
        ret = self.term()
        self.expect(";")
        self.field("bind")
        bind = self.term()
        self.expect(";")
        self.field("malg")
        malg = self.term()
        self.accept(";")
        self.expect("}")
        via = None
        if self.accept("via"):
            via = self.type_atom()
        return s.HandlerExpr(eff, monad, ret, bind, malg, via)

    # -------------------------------------------------------------- comps

    def comp(self, mode: Mode) -> s.Comp:
        t = self.peek()
        if self.accept("val"):
            return s.Val(self.term(), mode)
        if self.accept("let"):
            name = self.ident("variable name")
            ann = None
            if self.accept(":"):
                ann = self.type()
            self.expect("=")
            bound = self.comp(mode)
            self.expect("in")
            body = self.bound_comp(name, mode)
            return s.LetIn(bound, body, ann, mode, name)
        if self.accept("op"):
            res = self._target()
            operand = self.term_atom()
            name, body = self.continuation(mode)
            return s.Op(operand, body, res, mode, name)
        if self.accept("force"):
            return s.Force(self.term(), mode)
        if self.accept("fix"):
            self.expect("(")
            name = self.ident("variable name")
            self.expect(".")
            body = self.bound_comp(name, mode)
            self.expect(")")
            return s.Fix(body, mode, name)
        if self.accept("throw"):
            self._need_exc(t)
            res = self._target()
            return s.Op(s.Inl(None, s.UNIT_V), s.Val(s.Var(0), mode), res, mode)
        if self.accept("catch"):
            self._need_exc(t)
            res = self._target()
            a = self.paren_comp(mode)
            b = self.paren_comp(mode)
            wrap = s.Thunk if mode is Mode.TOTAL else s.PThunk
            return s.Op(s.Inr(None, s.Pair(wrap(a), wrap(b))), s.Val(s.Var(0), mode), res, mode)
        if self.at("("):
            return self.paren_comp(mode)
        if t.kind == "id" and t.text in self.g.ops:
            self.pos += 1
            _, index, sig = self.g.ops[t.text]
            arg = self.term_atom()
            payload = s.Pair(arg, s.Lam(sig.result, s.Var(0), "x"))
            operand = s.Inl(None, payload)
            for _ in range(index):
                operand = s.Inr(None, operand)
            return s.Op(operand, s.Val(s.Var(0), mode), sig.result, mode)
        raise self.error(f"expected a computation, found {t.text or 'end of input'!r}",
                         {"val", "let", "op", "force", "fix", "throw", "catch"})

    def _need_exc(self, tok: Token) -> None:
        if "Exc" not in self.g.effects:
            raise self.error(f"{tok.text!r} needs the Exc effect in scope", tok=tok)

    def paren_comp(self, mode: Mode) -> s.Comp:
        self.expect("(")
        c = self.comp(mode)
        self.expect(")")
        return c

    def continuation(self, mode: Mode):
        if self.at("(") and self.peek(1).kind == "id" and self.at(".", 2):
            self.advance()
            name = self.ident()
            self.expect(".")
            body = self.bound_comp(name, mode)
            self.expect(")")
            return name, body
        return "x", s.Val(s.Var(0), mode)


@deep
def parse_program(source: str, prelude: Optional[s.Program] = None,
                  file: str = "<input>") -> s.Program:
    """Parse a whole ``.fha`` file; names may refer to ``prelude`` declarations.

    Only the file's own declarations are returned (including coproduct effects
    synthesized for ``E1 ++ E2`` mentions).
    """
    return _Parser(source, file, prelude).program()


def _entry(source: str, prelude, file, what: str):
    p = _Parser(source, file, prelude)
    out = getattr(p, what)()
    if p.peek().kind != "eof":
        raise p.error(f"unexpected {p.peek().text!r} after {what}")
    return out


def parse_type(source: str, prelude: Optional[s.Program] = None, file: str = "<input>"):
    return _entry(source, prelude, file, "type")


def parse_term(source: str, prelude: Optional[s.Program] = None, file: str = "<input>"):
    return _entry(source, prelude, file, "term")


def parse_kind(source: str) -> s.Kind:
    return _entry(source, None, "<input>", "kind")


def parse_comp(source: str, prelude: Optional[s.Program] = None, mode: Mode = Mode.TOTAL,
               file: str = "<input>") -> s.Comp:
    p = _Parser(source, file, prelude)
    c = p.comp(mode)
    if p.peek().kind != "eof":
        raise p.error(f"unexpected {p.peek().text!r} after computation")
    return c


# ===================================================================== printer


@dataclass
class _Names:
    """Names in scope for the printer; globals are avoided when binding."""
    tvars: tuple = ()
    vars: tuple = ()
    type_globals: frozenset = frozenset()
    term_globals: frozenset = frozenset()
    op_names: frozenset = frozenset()
    handlers: dict = field(default_factory=dict)


def _pick(hint: str, taken) -> str:
    base = re.sub(r"[^A-Za-z0-9_']", "", hint or "")
    if not base or not base[0].isalpha():
        base = "x" + base
    if base not in taken and base not in KEYWORDS:
        return base
    i = 1
    while f"{base}{i}" in taken or f"{base}{i}" in KEYWORDS:
        i += 1
    return f"{base}{i}"


class Printer:
    def __init__(self, names: Optional[_Names] = None):
        self.n = names or _Names()

    # kinds
    def kind(self, k: s.Kind, top: bool = True) -> str:
        if isinstance(k, s.KTy):
            return "Ty"
        out = f"{self.kind(k.dom, False)} -> {self.kind(k.cod)}"
        return out if top else f"({out})"

    # types: levels 0 full, 1 sum, 2 prod, 3 app, 4 atom
    def type(self, t: s.TypeExpr, level: int = 0) -> str:
        n = self.n
        match t:
            case s.TVar(i):
                if i >= len(n.tvars):
                    return f"?t{i}"
                return n.tvars[len(n.tvars) - 1 - i]
            case s.TUnit():
                return "Unit"
            case s.TBool():
                return "Bool"
            case s.TEmpty():
                return "Empty"
            case s.TConst(name):
                return name
            case s.TForall(k, body, hint) | s.TLam(k, body, hint):
                name = _pick(hint, set(n.tvars) | n.type_globals)
                kw = "forall " if isinstance(t, s.TForall) else "\\"
                inner = Printer(_Names(n.tvars + (name,), n.vars, n.type_globals,
                                       n.term_globals, n.op_names, n.handlers))
                out = f"{kw}({name}:{self.kind(k)}). {inner.type(body, 0)}"
                return out if level == 0 else f"({out})"
            case s.TArrow(a, b):
                out = f"{self.type(a, 1)} -> {self.type(b, 0)}"
                return out if level == 0 else f"({out})"
            case s.TSum(a, b):
                out = f"{self.type(a, 2)} + {self.type(b, 1)}"
                return out if level <= 1 else f"({out})"
            case s.TProd(a, b):
                out = f"{self.type(a, 3)} * {self.type(b, 2)}"
                return out if level <= 2 else f"({out})"
            case s.TApp(f, a):
                out = f"{self.type(f, 3)} {self.type(a, 4)}"
                return out if level <= 3 else f"({out})"
            case s.TTh(e, a) | s.TPTh(e, a):
                kw = "Th" if isinstance(t, s.TTh) else "PTh"
                out = f"{kw} {self.effect(e)} {self.type(a, 4)}"
                return out if level <= 3 else f"({out})"
        raise s.InternalError(f"not a type: {t!r}")

    @staticmethod
    def effect(name: str) -> str:
        return f"({name.replace('++', ' ++ ')})" if "++" in name else name

    def _bind_var(self, hint: str) -> tuple[str, "Printer"]:
        n = self.n
        name = _pick(hint, set(n.vars) | n.term_globals | n.op_names)
        return name, Printer(_Names(n.tvars, n.vars + (name,), n.type_globals,
                                    n.term_globals, n.op_names, n.handlers))

    def _bind_tvar(self, hint: str) -> tuple[str, "Printer"]:
        n = self.n
        name = _pick(hint, set(n.tvars) | n.type_globals)
        return name, Printer(_Names(n.tvars + (name,), n.vars, n.type_globals,
                                    n.term_globals, n.op_names, n.handlers))

    # terms: levels 0 full, 1 app, 2 atom
    def term(self, t: s.Term, level: int = 0) -> str:
        n = self.n

        def wrap(out: str, need: int) -> str:
            return out if level <= need else f"({out})"

        match t:
            case s.Var(i):
                if i >= len(n.vars):
                    return f"?v{i}"
                return n.vars[len(n.vars) - 1 - i]
            case s.Const(name):
                return name
            case s.Tt():
                return "tt"
            case s.Ff():
                return "ff"
            case s.UnitV():
                return "()"
            case s.Lam(ann, body, hint):
                name, inner = self._bind_var(hint)
                return wrap(f"\\({name}:{self.type(ann)}). {inner.term(body)}", 0)
            case s.TyLam(k, body, hint):
                name, inner = self._bind_tvar(hint)
                return wrap(f"/\\({name}:{self.kind(k)}). {inner.term(body)}", 0)
            case s.App(f, a):
                return wrap(f"{self.term(f, 1)} {self.term(a, 2)}", 1)
            case s.TyApp(f, a):
                return wrap(f"{self.term(f, 1)} [{self.type(a)}]", 1)
            case s.Ite(c, a, b):
                return wrap(f"ite {self.term(c, 2)} {self.term(a, 2)} {self.term(b, 2)}", 1)
            case s.Pair(a, b):
                return f"({self.term(a)}, {self.term(b)})"
            case s.Fst(p):
                return wrap(f"fst {self.term(p, 2)}", 1)
            case s.Snd(p):
                return wrap(f"snd {self.term(p, 2)}", 1)
            case s.Inl(tgt, a) | s.Inr(tgt, a):
                kw = "inl" if isinstance(t, s.Inl) else "inr"
                ann = f"[{self.type(tgt)}]" if tgt is not None else ""
                return wrap(f"{kw}{ann} {self.term(a, 2)}", 1)
            case s.Absurd(tgt, a):
                return wrap(f"absurd[{self.type(tgt)}] {self.term(a, 2)}", 1)
            case s.Case(scrut, left, right, ln, rn):
                lname, li = self._bind_var(ln)
                rname, ri = self._bind_var(rn)
                return (f"case {self.term(scrut)} {{ inl {lname} -> {li.term(left)} ; "
                        f"inr {rname} -> {ri.term(right)} }}")
            case s.Thunk(c):
                return wrap(f"thunk {self.comp(c)}", 0)
            case s.PThunk(c):
                return wrap(f"pthunk {self.comp(c)}", 0)
            case s.Handle(h, c, res):
                ann = f"[{self.type(res)}]" if res is not None else ""
                return wrap(f"handle{ann} {self.handler(h, inline=True)} {self.comp(c)}", 0)
        raise s.InternalError(f"not a term: {t!r}")

    def handler(self, h: s.HandlerLike, inline: bool = False) -> str:
        if isinstance(h, s.HandlerRef):
            return h.name
        head = f"handler {self.effect(h.effect)} " if inline else ""
        out = (f"{head}{{ M = {self.type(h.monad)}; ret = {self.term(h.ret)}; "
               f"bind = {self.term(h.bind)}; malg = {self.term(h.malg)} }}")
        if h.via is not None:
            out += f" via {self.type(h.via, 4)}"
        return out

    def comp(self, c: s.Comp) -> str:
        match c:
            case s.Val(t):
                return f"val {self.term(c.term)}"
            case s.LetIn(bound, body, ann, _, hint):
                name, inner = self._bind_var(hint)
                annot = f" : {self.type(ann)}" if ann is not None else ""
                return f"let {name}{annot} = {self.comp(bound)} in {inner.comp(body)}"
            case s.Op(p, body, res, _, hint):
                name, inner = self._bind_var(hint)
                annot = f"[{self.type(res)}]" if res is not None else ""
                return f"op{annot} {self.term(p, 2)} ({name}. {inner.comp(body)})"
            case s.Force(t):
                return f"force {self.term(t)}"
            case s.Fix(body, _, hint):
                name, inner = self._bind_var(hint)
                return f"fix ({name}. {inner.comp(body)})"
        raise s.InternalError(f"not a computation: {c!r}")

    def decl(self, d: s.Decl) -> str:
        match d:
            case s.TypeDef(name, k, body):
                return f"type {name} : {self.kind(k)} = {self.type(body)}"
            case s.EffectDef(decl):
                head = f"effect {split_name_for_decl(decl.name)}"
                if decl.ops is not None:
                    ops = "; ".join(f"{o.name} : {self.type(o.param)} ~> {self.type(o.result)}"
                                    for o in decl.ops)
                    return f"{head} {{ {ops} }}" if ops else f"{head} {{ }}"
                return (f"{head} = hfunctor {{\n  carrier = {self.type(decl.carrier)};\n"
                        f"  hfmap = {self.term(decl.hfmap)};\n  hmap = {self.term(decl.hmap)}\n}}")
            case s.TermDef(name, ty, body):
                return f"term {name} : {self.type(ty)} = {self.term(body)}"
            case s.HandlerDef(name, h):
                return f"handler {name} : {self.effect(h.effect)} = {self.handler(h)}"
            case s.Main(mode, eff, ty, c):
                return f"main[{mode.value}] {self.effect(eff)} : {self.type(ty)} = {self.comp(c)}"
        raise s.InternalError(f"not a declaration: {d!r}")


def split_name_for_decl(name: str) -> str:
    return name.replace("++", " ++ ")


def _printer_for(context: Optional[s.Program], decls=()) -> Printer:
    types, terms, ops = set(), set(), set()
    for d in list(context.decls if context else ()) + list(decls):
        if isinstance(d, s.TypeDef):
            types.add(d.name)
        elif isinstance(d, s.TermDef):
            terms.add(d.name)
        elif isinstance(d, s.EffectDef):
            ops.update(o.name for o in d.decl.ops or ())
    return Printer(_Names(type_globals=frozenset(types), term_globals=frozenset(terms),
                          op_names=frozenset(ops)))


def pretty_print(p: s.Program, prelude: Optional[s.Program] = None) -> str:
    """Render a program as re-parseable surface text (one declaration per block)."""
    pr = _printer_for(prelude, p.decls)
    return "\n\n".join(pr.decl(d) for d in p.decls) + ("\n" if p.decls else "")


def pretty_type(t: s.TypeExpr, context: Optional[s.Program] = None,
                tvars: tuple = ()) -> str:
    pr = _printer_for(context)
    pr.n.tvars = tuple(tvars)
    return pr.type(t)


def pretty_term(t: s.Term, context: Optional[s.Program] = None) -> str:
    return _printer_for(context).term(t)


def pretty_comp(c: s.Comp, context: Optional[s.Program] = None) -> str:
    return _printer_for(context).comp(c)


def pretty_kind(k: s.Kind) -> str:
    return Printer().kind(k)
