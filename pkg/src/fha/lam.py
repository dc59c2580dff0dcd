"""Untyped lambda calculus: terms, normal-order normalization, decoding, text I/O.

The normalizer is a call-by-name environment machine for weak head reduction
plus a read-back pass under binders.  Together they compute the
leftmost-outermost normal form.  Both loops are iterative, so deeply nested
terms do not exhaust the Python stack.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from ._stack import deep


@dataclass(frozen=True)
class LVar:
    index: int


@dataclass(frozen=True)
class LLam:
    body: "LamTerm"
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class LApp:
    fn: "LamTerm"
    arg: "LamTerm"


@dataclass(frozen=True)
class LFreeConst:
    name: str


LamTerm = Union[LVar, LLam, LApp, LFreeConst]


class BudgetExceeded(Exception):
    """Normalization ran out of beta steps (the term may diverge)."""

    def __init__(self, steps: int):
        super().__init__(f"budget exceeded after {steps} beta steps")
        self.steps = steps


class LamParseError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{position}: {message}")
        self.message = message
        self.position = position


@dataclass(frozen=True)
class ReduceBudget:
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("budget must be at least 1")


# ------------------------------------------------------------ constructors


def lam(*names_and_body):
    """``lam("x", "y", body)`` builds nested abstractions with name hints."""
    *names, body = names_and_body
    for n in reversed(names):
        body = LLam(body, n)
    return body


def app(fn: LamTerm, *args: LamTerm) -> LamTerm:
    for a in args:
        fn = LApp(fn, a)
    return fn


def shift(t: LamTerm, cutoff: int, amount: int) -> LamTerm:
    """Shift free indices ``>= cutoff`` (recursive; used on small terms)."""
    match t:
        case LVar(i):
            return LVar(i + amount) if i >= cutoff else t
        case LLam(b, n):
            return LLam(shift(b, cutoff + 1, amount), n)
        case LApp(f, a):
            return LApp(shift(f, cutoff, amount), shift(a, cutoff, amount))
    return t


# ------------------------------------------------------------- normalizer

# Environment entries: ("clo", term, env) or ("lvl", level).  Environments are
# cons lists (entry, rest) so sharing is cheap.


def _lookup(env, i: int):
    while i:
        env = env[1]
        i -= 1
    return env[0]


class _Machine:
    def __init__(self, budget: int):
        self.budget = budget
        self.steps = 0

    def whnf(self, term, env):
        """Weak head normal form: ("lam", body, env, name) or ("neu", head, args)."""
        stack = []
        while True:
            cls = type(term)
            if cls is LApp:
                arg = term.arg
                # Variables are pushed as their existing entry, so chains of
                # variable-to-variable closures never build up.
                stack.append(_lookup(env, arg.index) if type(arg) is LVar else ("clo", arg, env))
                term = term.fn
            elif cls is LLam:
                if not stack:
                    return ("lam", term.body, env, term.name)
                self.steps += 1
                if self.steps > self.budget:
                    raise BudgetExceeded(self.steps - 1)
                env = (stack.pop(), env)
                term = term.body
            elif cls is LVar:
                entry = _lookup(env, term.index)
                if entry[0] == "clo":
                    term, env = entry[1], entry[2]
                else:
                    stack.reverse()
                    return ("neu", ("lvl", entry[1]), stack)
            elif cls is LFreeConst:
                stack.reverse()
                return ("neu", ("const", term.name), stack)
            else:
                raise TypeError(f"not a lambda term: {term!r}")

    def normalize(self, term, env=None, depth: int = 0) -> LamTerm:
        tasks: list = [("eval", term, env, depth)]
        out: list = []
        while tasks:
            task = tasks.pop()
            tag = task[0]
            if tag == "eval":
                _, t, e, d = task
                r = self.whnf(t, e)
                if r[0] == "lam":
                    tasks.append(("lam", r[3]))
                    tasks.append(("eval", r[1], (("lvl", d), r[2]), d + 1))
                else:
                    head, args = r[1], r[2]
                    h = LVar(d - head[1] - 1) if head[0] == "lvl" else LFreeConst(head[1])
                    tasks.append(("app", h, len(args)))
                    for a in reversed(args):
                        if a[0] == "lvl":
                            tasks.append(("var", a[1], d))
                        else:
                            tasks.append(("eval", a[1], a[2], d))
            elif tag == "lam":
                out.append(LLam(out.pop(), task[1]))
            elif tag == "var":
                out.append(LVar(task[2] - task[1] - 1))
            else:
                _, h, n = task
                if n:
                    args = out[-n:]
                    del out[-n:]
                    for a in args:
                        h = LApp(h, a)
                out.append(h)
        return out[0]


def _budget_steps(budget) -> int:
    if isinstance(budget, ReduceBudget):
        return budget.max_steps
    if budget < 1:
        raise ValueError("budget must be at least 1")
    return int(budget)


def normalize_with_steps(t: LamTerm, budget=1_000_000) -> tuple[LamTerm, int]:
    """Normal form of ``t`` and the number of beta steps used.

    Raises :class:`BudgetExceeded` when more than ``budget`` steps are needed.
    """
    m = _Machine(_budget_steps(budget))
    return m.normalize(t), m.steps


def normalize(t: LamTerm, budget=1_000_000) -> LamTerm:
    return normalize_with_steps(t, budget)[0]


def whnf_head(t: LamTerm, budget=1_000_000):
    """Head constant name and argument terms of ``t``'s normal form, or None.

    Only the head is reduced eagerly; the spine is fully normalized.
    """
    nf = normalize(t, budget)
    args = []
    while isinstance(nf, LApp):
        args.append(nf.arg)
        nf = nf.fn
    if isinstance(nf, LFreeConst):
        return nf.name, list(reversed(args))
    return None


def bohm_equal(a: LamTerm, b: LamTerm, depth: int = 64, budget=1_000_000) -> bool:
    """Compare the Boehm trees of ``a`` and ``b`` down to ``depth`` levels.

    Head normal forms are computed lazily and share one step budget, so terms
    without a normal form (such as ``Y f``) can still be compared.  Below
    ``depth`` the trees are assumed equal.
    """
    m = _Machine(_budget_steps(budget))

    def head(entry):
        return m.whnf(entry[1], entry[2]) if entry[0] == "clo" else ("neu", entry, [])

    work = [(("clo", a, None), ("clo", b, None), 0, depth)]
    while work:
        xa, xb, lvl, d = work.pop()
        if d <= 0:
            continue
        ra, rb = head(xa), head(xb)
        if ra[0] != rb[0]:
            return False
        if ra[0] == "lam":
            here = ("lvl", lvl)
            work.append((("clo", ra[1], (here, ra[2])), ("clo", rb[1], (here, rb[2])), lvl + 1, d))
            continue
        if ra[1] != rb[1] or len(ra[2]) != len(rb[2]):
            return False
        for x, y in zip(ra[2], rb[2]):
            work.append((x, y, lvl, d - 1))
    return True


def convertible(a: LamTerm, b: LamTerm, budget=1_000_000, depth: int = 64) -> bool:
    """Beta-convertibility: equal normal forms, or equal Boehm trees to ``depth``
    when either side has no normal form within ``budget``.
    """
    try:
        return normalize(a, budget) == normalize(b, budget)
    except BudgetExceeded:
        return bohm_equal(a, b, depth, budget)


TT_NAME, FF_NAME, UNKNOWN = "tt", "ff", "unknown"


def decode_bool(t: LamTerm, budget=1_000_000) -> str:
    """Return ``"tt"``, ``"ff"`` or ``"unknown"`` for a purported Church boolean."""
    try:
        nf = normalize(LApp(LApp(t, LFreeConst("T")), LFreeConst("F")), budget)
    except BudgetExceeded:
        return UNKNOWN
    if nf == LFreeConst("T"):
        return TT_NAME
    if nf == LFreeConst("F"):
        return FF_NAME
    return UNKNOWN


# --------------------------------------------------------------- text I/O

_TOKEN = re.compile(r"\s*(?:(--[^\n]*)|(\\|λ)|(\.)|(\()|(\))|([A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text: str):
    pos = 0
    toks = []
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise LamParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group(1) is None:
            kind = [k for k, g in zip(("lam", "dot", "lp", "rp", "id"), m.groups()[1:]) if g][0]
            start = m.start(m.lastindex)
            toks.append((kind, m.group(m.lastindex), start))
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


@deep
def parse_lam(text: str, free: Iterable[str] = ()) -> LamTerm:
    """Parse ``\\x. e`` / juxtaposition / parentheses into a :class:`LamTerm`.

    Unbound identifiers are errors unless listed in ``free``; those become
    :class:`LFreeConst`.
    """
    toks = _tokenize(text)
    free = set(free)
    pos = 0
    scope: list[str] = []

    def peek():
        return toks[pos]

    def expect(kind):
        nonlocal pos
        tok = toks[pos]
        if tok[0] != kind:
            raise LamParseError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        pos += 1
        return tok

    # Iterative-friendly recursion: abstraction bodies nest, applications loop.
    def term():
        nonlocal pos
        if peek()[0] == "lam":
            pos += 1
            name = expect("id")[1]
            expect("dot")
            scope.append(name)
            body = term()
            scope.pop()
            return LLam(body, name)
        fn = atom()
        while peek()[0] in ("id", "lp", "lam"):
            if peek()[0] == "lam":
                fn = LApp(fn, term())
                break
            fn = LApp(fn, atom())
        return fn

    def atom():
        nonlocal pos
        tok = peek()
        if tok[0] == "lp":
            pos += 1
            t = term()
            expect("rp")
            return t
        if tok[0] == "id":
            pos += 1
            name = tok[1]
            for i in range(len(scope) - 1, -1, -1):
                if scope[i] == name:
                    return LVar(len(scope) - 1 - i)
            if name in free:
                return LFreeConst(name)
            raise LamParseError(f"unbound variable {name!r}", tok[2])
        raise LamParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    t = term()
    if peek()[0] != "eof":
        raise LamParseError(f"unexpected {peek()[1]!r}", peek()[2])
    return t


def print_lam(t: LamTerm) -> str:
    """Render with binder hints, renaming only where a hint would capture."""
    parts: list[str] = []
    consts = frozenset(_free_consts(t))
    # tasks: ("t", term, scope, ctx) where ctx: 0 top, 1 function position, 2 argument
    tasks: list = [("t", t, (), 0)]
    while tasks:
        task = tasks.pop()
        if task[0] == "s":
            parts.append(task[1])
            continue
        _, u, scope, ctx = task
        if isinstance(u, LVar):
            if u.index >= len(scope):
                raise ValueError(f"unbound index {u.index}")
            parts.append(scope[len(scope) - 1 - u.index])
        elif isinstance(u, LFreeConst):
            parts.append(u.name)
        elif isinstance(u, LLam):
            name = _fresh(u.name or "x", scope, consts)
            if ctx:
                parts.append("(")
                tasks.append(("s", ")"))
            parts.append(f"\\{name}. ")
            tasks.append(("t", u.body, scope + (name,), 0))
        else:
            if ctx == 2:
                parts.append("(")
                tasks.append(("s", ")"))
            tasks.append(("t", u.arg, scope, 2))
            tasks.append(("s", " "))
            tasks.append(("t", u.fn, scope, 1))
    return "".join(parts)


def _free_consts(t: LamTerm) -> set[str]:
    out, stack = set(), [t]
    while stack:
        u = stack.pop()
        if isinstance(u, LFreeConst):
            out.add(u.name)
        elif isinstance(u, LLam):
            stack.append(u.body)
        elif isinstance(u, LApp):
            stack.extend((u.fn, u.arg))
    return out


def _fresh(hint: str, scope: tuple, consts: frozenset) -> str:
    base = re.sub(r"[^A-Za-z0-9_']", "", hint) or "x"
    if not (base[0].isalpha() or base[0] == "_"):
        base = "x" + base
    taken = set(scope) | consts
    if base not in taken:
        return base
    i = len(scope)
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def size(t: LamTerm) -> int:
    n, stack = 0, [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, LLam):
            stack.append(u.body)
        elif isinstance(u, LApp):
            stack.extend((u.fn, u.arg))
    return n


def church_bool(b: bool) -> LamTerm:
    return lam("t", "f", LVar(1) if b else LVar(0))


OMEGA = LApp(LLam(LApp(LVar(0), LVar(0)), "x"), LLam(LApp(LVar(0), LVar(0)), "x"))
Y = LLam(LApp(LLam(LApp(LVar(1), LApp(LVar(0), LVar(0))), "x"),
              LLam(LApp(LVar(1), LApp(LVar(0), LVar(0))), "x")), "f")


def closed(t: LamTerm, depth: int = 0) -> bool:
    stack = [(t, depth)]
    while stack:
        u, d = stack.pop()
        if isinstance(u, LVar) and u.index >= d:
            return False
        if isinstance(u, LLam):
            stack.append((u.body, d + 1))
        elif isinstance(u, LApp):
            stack.extend(((u.fn, d), (u.arg, d)))
    return True


__all__ = [
    "LVar", "LLam", "LApp", "LFreeConst", "LamTerm", "BudgetExceeded", "LamParseError",
    "ReduceBudget", "normalize", "normalize_with_steps", "decode_bool", "parse_lam",
    "print_lam", "lam", "app", "church_bool", "OMEGA", "Y", "size", "closed", "whnf_head",
]

