"""Hand-written closed programs with hand-derived results.

Every scenario is a complete program run against the prelude.  Source
scenarios share ``HEADER`` (boolean helpers, Church numerals, a boolean
state row with its handler); modular scenarios are assembled from the
effect-family builders in :mod:`fha.stdlib`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from . import parser
from . import stdlib
from . import syntax as s
from .syntax import Mode

HEADER = r"""
term not : Bool -> Bool = \(b:Bool). ite b ff tt
term and : Bool -> Bool -> Bool = \(a:Bool). \(b:Bool). ite a b ff
term orElse : Maybe Bool -> Bool = \(m: Maybe Bool). case m { inl u -> ff ; inr b -> b }
term isNothing : Maybe Bool -> Bool = \(m: Maybe Bool). case m { inl u -> tt ; inr b -> ff }

type Nat : Ty = forall (a:Ty). (a -> a) -> a -> a
term zero : Nat = /\(a:Ty). \(f:a -> a). \(x:a). x
term succ : Nat -> Nat = \(n:Nat). /\(a:Ty). \(f:a -> a). \(x:a). f (n [a] f x)
term add : Nat -> Nat -> Nat = \(m:Nat). \(n:Nat). /\(a:Ty). \(f:a -> a). \(x:a). m [a] f (n [a] f x)
term mult : Nat -> Nat -> Nat = \(m:Nat). \(n:Nat). /\(a:Ty). \(f:a -> a). m [a] (n [a] f)
term two : Nat = succ (succ zero)
term three : Nat = succ two
term isZero : Nat -> Bool = \(n:Nat). n [Bool] (\(b:Bool). ff) tt
term isEven : Nat -> Bool = \(n:Nat). n [Bool] not tt
term pred : Nat -> Nat =
  \(n:Nat). fst (n [Nat * Nat] (\(p:Nat * Nat). (snd p, succ (snd p))) (zero, zero))

effect St { get : Unit ~> Bool; put : Bool ~> Unit; }

handler hSt : St = {
  M = \(a:Ty). Bool -> a * Bool;
  ret = /\(a:Ty). \(x:a). \(s:Bool). (x, s);
  bind = /\(a:Ty). /\(b:Ty). \(m: Bool -> a * Bool). \(k: a -> Bool -> b * Bool).
         \(s:Bool). k (fst (m s)) (snd (m s));
  malg = /\(a:Ty). \(o: Unit * (Bool -> a) + (Bool * (Unit -> a) + Empty)).
         case o { inl g -> \(s:Bool). (snd g s, s) ;
                  inr r -> case r { inl p -> \(s:Bool). (snd p (), fst p) ;
                                    inr e -> absurd[Bool -> a * Bool] e } }
}
"""

# (name, expected, declarations and main)
SOURCES: tuple[tuple[str, str, str], ...] = (
    ("val_tt", "tt", "main[total] VoidH : Bool = val tt"),
    ("val_ff", "ff", "main[total] VoidH : Bool = val ff"),
    ("not_tt", "ff", "main[total] VoidH : Bool = val not tt"),
    ("let_chain", "ff",
     "main[total] VoidH : Bool = let x = val tt in let y = val not x in val and x y"),
    ("ite_nested", "tt", "main[total] VoidH : Bool = val ite (not ff) (ite ff ff tt) ff"),
    ("pair_snd", "tt",
     "main[total] VoidH : Bool = let p : Bool * Bool = val (ff, tt) in val snd p"),
    ("case_inl", "tt",
     "main[total] VoidH : Bool = val case (inl[Bool + Unit] ff) { inl b -> not b ; inr u -> ff }"),
    ("case_nested_sum", "tt",
     "main[total] VoidH : Bool =\n"
     "  val case (inr[Unit + (Bool + Bool)] (inr tt)) {\n"
     "    inl u -> ff ; inr s -> case s { inl a -> not a ; inr b -> b } }"),
    ("absurd_branch", "tt",
     "main[total] VoidH : Bool =\n"
     "  val case (inl[Bool + Empty] tt) { inl b -> b ; inr e -> absurd[Bool] e }"),
    ("church_three", "ff", "main[total] VoidH : Bool = val three [Bool] not tt"),
    ("church_add", "ff", "main[total] VoidH : Bool = val add two two [Bool] not ff"),
    ("church_mult", "tt", "main[total] VoidH : Bool = val mult two three [Bool] not tt"),
    ("church_is_zero", "tt", "main[total] VoidH : Bool = val isZero zero"),
    ("church_succ_nonzero", "ff", "main[total] VoidH : Bool = val isZero (succ zero)"),
    ("church_even", "tt", "main[total] VoidH : Bool = val isEven (mult two two)"),
    ("church_pred", "tt", "main[total] VoidH : Bool = val isZero (pred (succ zero))"),
    ("church_pred_two", "ff", "main[total] VoidH : Bool = val isZero (pred two)"),
    ("poly_id", "ff",
     "term id : forall (a:Ty). a -> a = /\\(a:Ty). \\(x:a). x\n"
     "main[total] VoidH : Bool = val id [Bool] ff"),
    ("poly_id_fun", "ff",
     "term id : forall (a:Ty). a -> a = /\\(a:Ty). \\(x:a). x\n"
     "main[total] VoidH : Bool = val id [Bool -> Bool] not tt"),
    ("twice_twice", "tt",
     "term twice : (Bool -> Bool) -> Bool -> Bool = \\(f:Bool -> Bool). \\(x:Bool). f (f x)\n"
     "main[total] VoidH : Bool = val twice (twice not) tt"),
    ("type_operator", "ff",
     "type Twin : Ty -> Ty = \\(a:Ty). a * a\n"
     "term swap : Twin Bool -> Twin Bool = \\(p: Twin Bool). (snd p, fst p)\n"
     "main[total] VoidH : Bool = val fst (swap (tt, ff))"),
    ("const_type", "tt",
     "type K : Ty -> Ty -> Ty = \\(a:Ty). \\(b:Ty). a\n"
     "term k : K Bool Unit = tt\n"
     "main[total] VoidH : Bool = val k"),
    ("higher_kinded", "tt",
     "term keep : forall (F:Ty -> Ty). forall (a:Ty). F a -> F a =\n"
     "  /\\(F:Ty -> Ty). /\\(a:Ty). \\(x:F a). x\n"
     "main[total] VoidH : Bool = val orElse (keep [Maybe] [Bool] (inr tt))"),
    ("church_bool", "ff",
     "type CBool : Ty = forall (a:Ty). a -> a -> a\n"
     "term ctrue : CBool = /\\(a:Ty). \\(x:a). \\(y:a). x\n"
     "main[total] VoidH : Bool = val ctrue [Bool] ff tt"),
    ("church_pair", "tt",
     "type CPair : Ty = forall (r:Ty). (Bool -> Bool -> r) -> r\n"
     "term mk : Bool -> Bool -> CPair = \\(a:Bool). \\(b:Bool). /\\(r:Ty). \\(k: Bool -> Bool -> r). k a b\n"
     "main[total] VoidH : Bool = val mk ff tt [Bool] (\\(a:Bool). \\(b:Bool). b)"),
    ("force_thunk", "tt", "main[total] VoidH : Bool =\n"
     "  let t : Th VoidH Bool = val thunk val tt in let x = force t in val x"),
    ("thunk_function", "ff",
     "main[total] VoidH : Bool =\n"
     "  let k : Bool -> Th VoidH Bool = val (\\(b:Bool). thunk val not b) in force (k tt)"),
    ("deep_let", "tt",
     "main[total] VoidH : Bool =\n"
     "  let a = val tt in let b = val not a in let c = val not b in\n"
     "  let d = val and a c in let e = val not d in val not e"),
    ("exc_throw_or_else", "ff", "main[total] VoidH : Bool = val orElse (handle hExc throw[Bool])"),
    ("exc_throw_nothing", "tt",
     "main[total] VoidH : Bool = val isNothing (handle hExc (let x = throw[Bool] in val tt))"),
    ("exc_catch_recover", "tt",
     "main[total] VoidH : Bool = val orElse (handle hExc (catch (throw) (val tt)))"),
    ("exc_catch_no_throw", "ff",
     "main[total] VoidH : Bool = val orElse (handle hExc (catch (val ff) (val tt)))"),
    ("exc_nested_catch", "tt",
     "main[total] VoidH : Bool = val orElse (handle hExc (catch (catch (throw) (throw)) (val tt)))"),
    ("exc_rethrow", "tt",
     "main[total] VoidH : Bool = val isNothing (handle hExc (catch (throw) (throw)))"),
    ("exc_let_after_catch", "tt",
     "main[total] VoidH : Bool =\n"
     "  val orElse (handle hExc (let x = catch[Bool] (throw[Bool]) (val ff) in val not x))"),
    ("exc_thunked", "tt",
     "term risky : Th Exc Bool = thunk throw\n"
     "main[total] VoidH : Bool = val orElse (handle hExc (catch (force risky) (val tt)))"),
    ("exc_twice", "ff",
     "main[total] VoidH : Bool =\n"
     "  val and (orElse (handle hExc (val tt))) (orElse (handle hExc throw[Bool]))"),
    ("exc_in_ite", "tt",
     "main[total] VoidH : Bool =\n"
     "  val orElse (handle hExc (catch (force (ite tt (thunk throw[Bool]) (thunk val ff))) (val tt)))"),
    ("st_get", "ff", "main[total] VoidH : Bool = val fst ((handle hSt (get ())) ff)"),
    ("st_put_get", "tt",
     "main[total] VoidH : Bool = val fst ((handle hSt (let u = put tt in get ())) ff)"),
    ("st_final_state", "ff",
     "main[total] VoidH : Bool = val snd ((handle[Unit] hSt (put ff)) tt)"),
    ("st_flip_twice", "tt",
     "term flip : Th St Bool = thunk let b = get () in let u = put (not b) in val b\n"
     "main[total] VoidH : Bool =\n"
     "  let p : Bool * Bool = val ((handle hSt (let x = force flip in force flip)) tt) in\n"
     "  val and (not (fst p)) (snd p)"),
    ("st_branch", "ff",
     "main[total] VoidH : Bool =\n"
     "  val fst ((handle hSt (let b = get () in\n"
     "    let k : Th St Bool = val ite b (thunk val ff) (thunk val tt) in force k)) tt)"),
    ("st_overwrite", "tt",
     "main[total] VoidH : Bool =\n"
     "  val fst ((handle hSt (let u = put ff in let v = put tt in get ())) ff)"),
    ("st_count_church", "ff",
     "term toggle : Th St Unit = thunk let b = get () in put (not b)\n"
     "term times : Nat -> Th St Unit -> Th St Unit =\n"
     "  \\(n:Nat). \\(t: Th St Unit). n [Th St Unit] (\\(k: Th St Unit). thunk let u = force t in force k) (thunk val ())\n"
     "main[total] VoidH : Bool = val snd ((handle[Unit] hSt (force (times three toggle))) tt)"),
    ("odd_handler_let", "tt",
     "handler hOdd : Exc = {\n"
     "  M = \\(a:Ty). Bool;\n"
     "  ret = /\\(a:Ty). \\(x:a). tt;\n"
     "  bind = /\\(a:Ty). /\\(b:Ty). \\(m:Bool). \\(k: a -> Bool). ff;\n"
     "  malg = /\\(a:Ty). \\(o: Unit + Bool * Bool). tt\n"
     "}\n"
     "main[total] VoidH : Bool = val handle[Bool] hOdd (let x = val tt in val x)"),
    ("handler_literal", "ff",
     "main[total] VoidH : Bool =\n"
     "  val handle[Bool] handler Exc {\n"
     "    M = \\(a:Ty). Bool;\n"
     "    ret = /\\(a:Ty). \\(x:a). ff;\n"
     "    bind = /\\(a:Ty). /\\(b:Ty). \\(m:Bool). \\(k: a -> Bool). m;\n"
     "    malg = /\\(a:Ty). \\(o: Unit + Bool * Bool). tt\n"
     "  } (val tt)"),
)


@dataclass(frozen=True)
class Scenario:
    name: str
    program: s.Program
    expected: str
    source: Optional[str] = field(default=None, compare=False)


def source_program(body: str, prelude: Optional[s.Program] = None) -> s.Program:
    return parser.parse_program(HEADER + "\n" + body + "\n", prelude or stdlib.builtin_prelude())


def source_scenarios(prelude: Optional[s.Program] = None) -> list[Scenario]:
    pre = prelude or stdlib.builtin_prelude()
    return [Scenario(name, source_program(body, pre), exp, HEADER + "\n" + body)
            for name, exp, body in SOURCES]


# ------------------------------------------------------------ corpus files

_EXPECT = re.compile(r"^-- expect: (.*)$", re.MULTILINE)


def corpus_names() -> list[str]:
    """Stems of the bundled ``corpus/*.fha`` files, sorted."""
    root = resources.files(__package__) / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".fha"))


def corpus_path(name: str):
    """Location of a bundled corpus file (a real path for regular installs)."""
    return resources.files(__package__) / "corpus" / f"{name}.fha"


def corpus_source(name: str) -> str:
    return corpus_path(name).read_text()


def expected_of(source: str) -> Optional[str]:
    """The value named by a ``-- expect:`` line, if the source has one."""
    m = _EXPECT.search(source)
    return m.group(1).strip() if m else None


def corpus_scenarios(prelude: Optional[s.Program] = None) -> list[Scenario]:
    pre = prelude or stdlib.builtin_prelude()
    out = []
    for name in corpus_names():
        src = corpus_source(name)
        prog = parser.parse_program(src, pre, f"{name}.fha")
        out.append(Scenario(name, prog, expected_of(src) or "", src))
    return out


def hand_written(prelude: Optional[s.Program] = None) -> list[Scenario]:
    """Corpus files, source scenarios and modular scenarios, in that order."""
    return corpus_scenarios(prelude) + source_scenarios(prelude) + modular_scenarios()


# ------------------------------------------------------------ modular handlers


def _bool_main(decls: tuple, comp: s.Comp, ty: s.TypeExpr, project: s.Term) -> s.Program:
    """``let r : ty = comp in val project`` where ``project`` mentions ``r`` as index 0."""
    main = s.Main(Mode.TOTAL, "VoidH", s.BOOL, s.LetIn(comp, s.Val(project), ty, name="r"))
    return s.Program(tuple(decls) + (main,))


def _not(t: s.Term) -> s.Term:
    return s.Ite(t, s.FF, s.TT)


def _is_left(t: s.Term) -> s.Term:
    return s.Case(t, s.TT, s.FF, "u", "v")


def modular_scenarios() -> list[Scenario]:
    """Programs handled by modular state and exception handlers, alone and stacked."""
    bb = s.TProd(s.BOOL, s.BOOL)
    maybe_b = s.TSum(s.UNIT, s.BOOL)
    out = []

    st = stdlib.state_modular(s.BOOL, s.TT)
    srow = st.input_row(stdlib.VOID_ROW, "MState")
    # get; put (not x); get  from tt ~> (ff, ff)
    c = s.LetIn(srow.call("get", s.UNIT_V),
                s.LetIn(srow.call("put", _not(s.Var(0))), srow.call("get", s.UNIT_V)))
    comp = stdlib.modular_handle(st, c, stdlib.VOID_ROW, s.BOOL, input_row=srow)
    out.append(Scenario("modular_state_value", _bool_main((srow.effect_def(),), comp, bb,
                                                          s.Fst(s.Var(0))), "ff"))
    out.append(Scenario("modular_state_final", _bool_main((srow.effect_def(),), comp, bb,
                                                          _not(s.Snd(s.Var(0)))), "tt"))

    ex = stdlib.exception_modular()
    erow = ex.input_row(stdlib.VOID_ROW, "MRaise")
    raise_ = s.LetIn(erow.call("raise", s.UNIT_V), s.Val(s.Absurd(s.BOOL, s.Var(0))))
    comp = stdlib.modular_handle(ex, raise_, stdlib.VOID_ROW, s.BOOL, input_row=erow)
    out.append(Scenario("modular_raise", _bool_main((erow.effect_def(),), comp, maybe_b,
                                                    _is_left(s.Var(0))), "tt"))
    comp = stdlib.modular_handle(ex, s.Val(s.FF), stdlib.VOID_ROW, s.BOOL, input_row=erow)
    out.append(Scenario("modular_no_raise", _bool_main((erow.effect_def(),), comp, maybe_b,
                                                       _is_left(s.Var(0))), "ff"))

    # state handled first, forwarding raise to the exception handler underneath
    both = st.input_row(erow, "MStateRaise")
    c = s.LetIn(both.call("put", s.FF),
                s.LetIn(both.call("get", s.UNIT_V),
                        _raise_if(both, s.Var(0))))
    inner = stdlib.modular_handle(st, c, erow, s.BOOL, input_row=both, output_row=erow)
    comp = stdlib.modular_handle(ex, inner, stdlib.VOID_ROW, bb, input_row=erow)
    res = s.TSum(s.UNIT, bb)
    decls = (erow.effect_def(), both.effect_def())
    # put ff; get ~> ff; no raise on ff; result inr (ff, ff)
    out.append(Scenario("modular_state_over_raise", _bool_main(
        decls, comp, res, s.Case(s.Var(0), s.FF, _not(s.Fst(s.Var(0))), "u", "p")), "tt"))

    c = s.LetIn(both.call("get", s.UNIT_V), _raise_if(both, s.Var(0)))
    inner = stdlib.modular_handle(st, c, erow, s.BOOL, input_row=both, output_row=erow)
    comp = stdlib.modular_handle(ex, inner, stdlib.VOID_ROW, bb, input_row=erow)
    # initial tt: raise, so the whole run is inl ()
    out.append(Scenario("modular_raise_under_state", _bool_main(
        decls, comp, res, _is_left(s.Var(0))), "tt"))
    return out


def _raise_if(row: stdlib.EffectRow, cond: s.Term) -> s.Comp:
    """``force (ite cond (thunk (raise; absurd)) (thunk val cond))`` at ``row``."""
    raise_ = s.LetIn(row.call("raise", s.UNIT_V), s.Val(s.Absurd(s.BOOL, s.Var(0))))
    return s.Force(s.Ite(cond, s.Thunk(raise_), s.Thunk(s.Val(cond))))
