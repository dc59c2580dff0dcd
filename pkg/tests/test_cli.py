import io
import subprocess
import sys

import pytest

from fha import cli, scenarios


def corpus(name):
    return str(scenarios.corpus_path(name))


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    args = cli.build_parser().parse_args(list(argv))
    cfg = cli.CliConfig(args.command, getattr(args, "input", None), args.fuel, args.lam_budget,
                        args.no_prelude, args.output)
    code = cli.dispatch(cfg, io.StringIO(stdin), out, err)
    return code, out.getvalue(), err.getvalue()


def test_run_prints_the_value():
    assert run("run", corpus("exc_catch")) == (0, "inr ff\n", "")


def test_check_prints_ok():
    assert run("check", corpus("church_two"))[:2] == (0, "ok\n")


def test_extract_then_eval_lambda():
    code, lam_text, _ = run("extract", corpus("true"))
    assert code == 0 and lam_text.startswith("-- type: Bool\n")
    assert run("eval-lambda", "-", stdin=lam_text)[:2] == (0, "tt\n")


@pytest.mark.parametrize("name", scenarios.corpus_names())
def test_run_and_extraction_agree(name):
    code, value, _ = run("run", corpus(name))
    _, lam_text, _ = run("extract", corpus(name))
    assert code == 0
    assert run("eval-lambda", "-", stdin=lam_text)[1] == value


def test_extract_to_file(tmp_path):
    out = tmp_path / "state.lam"
    assert run("extract", corpus("state"), "-o", str(out))[:2] == (0, "")
    assert run("eval-lambda", str(out))[1] == "(ff,tt)\n"


def test_type_error_exits_1():
    code, _, err = run("check", "-", stdin="main[total] VoidH : Bool = val ()")
    assert code == 1 and "type mismatch" in err


def test_parse_error_exits_1():
    assert run("check", "-", stdin="main[total] VoidH : Bool = val (")[0] == 1


def test_lambda_parse_error_exits_1():
    assert run("eval-lambda", "-", stdin=r"\x. y")[0] == 1


def test_missing_file_exits_2(tmp_path):
    code, _, err = run("run", str(tmp_path / "missing.fha"))
    assert code == 2 and "cannot read" in err


def test_unwritable_output_exits_2(tmp_path):
    assert run("extract", corpus("true"), "-o", str(tmp_path / "no" / "x.lam"))[0] == 2


def test_timeout_exits_3():
    src = "main[partial] VoidH : Bool = fix (self. force self)"
    assert run("run", "-", "--fuel", "500", stdin=src) == (3, "timeout(500)\n", "")
    _, lam_text, _ = run("extract", "-", stdin=src)
    code, out, _ = run("eval-lambda", "-", "--lam-budget", "500", stdin=lam_text)
    assert code == 3 and "budget exceeded" in out


def test_main_with_operations_is_rejected():
    src = "effect E { e : Unit ~> Bool; }\nmain[total] E : Bool = e ()"
    code, _, err = run("run", "-", stdin=src)
    assert code == 1 and "without operations" in err


def test_stuck_exits_4(monkeypatch):
    # checked programs never get stuck, so the evaluator is stubbed here
    monkeypatch.setattr(cli.ev, "run_program", lambda *a: cli.ev.Stuck("stub"))
    code, out, _ = run("run", corpus("true"))
    assert code == 4 and out == "stuck: stub\n"


def test_no_prelude():
    assert run("run", corpus("exc_catch"), "--no-prelude")[0] == 1
    assert run("run", "-", "--no-prelude", stdin="main[total] VoidH : Bool = val tt")[0] == 1


def test_prelude_from_environment(monkeypatch, tmp_path):
    alt = tmp_path / "prelude.fha"
    alt.write_text("effect VoidH = hfunctor {\n"
                   "  carrier = \\(F:Ty -> Ty). \\(A:Ty). Empty;\n"
                   "  hfmap = /\\(F:Ty -> Ty). \\(fm: forall (a:Ty). forall (b:Ty). (a -> b) -> F a -> F b).\n"
                   "          /\\(a:Ty). /\\(b:Ty). \\(f: a -> b). \\(o: Empty). o;\n"
                   "  hmap = /\\(F:Ty -> Ty). \\(fmF: forall (a:Ty). forall (b:Ty). (a -> b) -> F a -> F b).\n"
                   "         /\\(G:Ty -> Ty). \\(fmG: forall (a:Ty). forall (b:Ty). (a -> b) -> G a -> G b).\n"
                   "         \\(sg: forall (a:Ty). F a -> G a). /\\(a:Ty). \\(o: Empty). o\n"
                   "}\n"
                   "term yes : Bool = tt\n")
    monkeypatch.setenv("FHA_PRELUDE", str(alt))
    assert run("run", "-", stdin="main[total] VoidH : Bool = val yes")[:2] == (0, "tt\n")
    monkeypatch.setenv("FHA_PRELUDE", str(tmp_path / "none.fha"))
    assert run("check", corpus("true"))[0] == 2


def test_fuel_must_be_positive():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["run", "x", "--fuel", "0"])
    with pytest.raises(ValueError):
        cli.CliConfig("run", "x", fuel=0)


def test_console_script_end_to_end():
    py = [sys.executable, "-m", "fha.cli"]
    ext = subprocess.run(py + ["extract", corpus("true")], capture_output=True, text=True)
    out = subprocess.run(py + ["eval-lambda", "-"], input=ext.stdout, capture_output=True,
                         text=True)
    assert out.returncode == 0 and out.stdout == "tt\n"
    bad = subprocess.run(py + ["run", "/nonexistent.fha"], capture_output=True, text=True)
    assert bad.returncode == 2
