import subprocess
import sys

import pytest

from pathprov.cli import main, run

DIAMOND = "edge s a _ 1/2\nedge s b _ 1/2\nedge a t _ 1/2\nedge b t _ 1/2\n"
QUERY = "edge x y _\nedge y z _\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {"diamond.g": DIAMOND, "q.g": QUERY, "f.cnf": "p mcnf 2 1\n1 2\n",
                       "cyc.g": "edge s t _ 1/2\nedge t s _ 1/2\n",
                       "w.txt": "weight s>a:_ 1/2\nweight s>b:_ 1/2\n"
                                "weight a>t:_ 1/2\nweight b>t:_ 1/2\n"}.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def report(out):
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line)


def head(result):
    """Status and the human-readable first line of a text-format run."""
    status, out, _ = result
    return status, out.splitlines()[0] if out else ""


def test_classify(files):
    status, line = head(run(["classify", files["diamond.g"]]))
    assert status == 0 and line.split() == ["DAG", "All"]
    status, out, _ = run(["classify", files["q.g"], "--format", "report"])
    assert report(out)["classes"] == "1WP,2WP,DWT,PT,DAG,All"


def test_hom(files):
    assert head(run(["hom", files["q.g"], files["diamond.g"]])) == (0, "true")


@pytest.mark.parametrize("method", ["brute", "nobdd"])
def test_pqe_exact(files, method):
    status, out, _ = run(["pqe-exact", files["q.g"], files["diamond.g"], "--method", method])
    assert status == 0 and out.splitlines()[0] == "7/16"
    assert report(out) == {"value": "7/16", "decimal": "0.4375", "method": method}


def test_pqe_exact_cap(files):
    status, _, err = run(["pqe-exact", files["q.g"], files["diamond.g"], "--cap", "2"])
    assert status == 1 and err.startswith("TooLarge:")


def test_compile_and_count(files):
    nob = str(files["dir"] / "d.nobdd")
    status, out, _ = run(["compile", files["q.g"], files["diamond.g"], "-o", nob,
                          "--format", "report"])
    assert status == 0 and report(out)["output"] == nob
    assert head(run(["count", nob])) == (0, "7")
    assert head(run(["count", nob, "--weights", files["w.txt"]])) == (0, "7/16")
    status, out, _ = run(["count", nob, "--weights", files["w.txt"], "--unweighted",
                          "--format", "report"])
    rep = report(out)
    assert rep["value"] == "7/16" and rep["models"] == "7" and float(rep["normalizer_log2"]) == 4
    status, out, _ = run(["compile", files["q.g"], files["diamond.g"], "--no-prune",
                          "--format", "report"])
    assert report(out)["nodes"] == "19"


def test_count_unweighted_needs_weights(files):
    nob = str(files["dir"] / "d.nobdd")
    run(["compile", files["q.g"], files["diamond.g"], "-o", nob])
    assert run(["count", nob, "--unweighted"])[0] == 2


@pytest.mark.parametrize("method", ["nobdd", "karp-luby", "monte-carlo"])
def test_estimate_methods(files, method):
    status, out, _ = run(["estimate", files["q.g"], files["diamond.g"], "--method", method,
                          "--format", "report", "--seed", "3"])
    rep = report(out)
    assert status == 0 and rep["exact"] == "7/16"
    assert abs(float(rep["estimate"]) - 7 / 16) < 0.1


def test_estimate_deterministic(files):
    argv = ["estimate", "--method", "nobdd", "--epsilon", "0.05", "--seed", "7",
            files["q.g"], files["diamond.g"]]
    first = run(argv)
    assert first == run(argv) == run(argv + ["--workers", "8"])


def test_estimate_figure(files):
    png = files["dir"] / "e.png"
    status, out, _ = run(["estimate", files["q.g"], files["diamond.g"], "--figure", str(png),
                          "--format", "report"])
    assert status == 0 and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert report(out)["figure"] == str(png)


def test_stcon(files):
    status, out, _ = run(["stcon", files["diamond.g"], "--source", "s", "--target", "t",
                          "--exact"])
    assert status == 0 and out.startswith("0.4375 (exact 7/16)")
    assert run(["stcon", files["cyc.g"], "--source", "s", "--target", "t"])[2].startswith(
        "CycleError:")
    status, _, err = run(["stcon", files["diamond.g"], "--source", "s", "--target", "zz"])
    assert status == 1 and err.startswith("DomainMismatch:")


def test_rpq(files, tmp_path):
    inst = tmp_path / "r.g"
    inst.write_text("edge u v a 1/2\nedge v w b 1/2\nedge w x c 1/2\nedge x y d 1/2\n")
    status, out, _ = run(["rpq", "ab*c", str(inst), "--exact", "--format", "report"])
    rep = report(out)
    assert status == 0 and rep["exact"] == "1/8" and rep["local"] == "true"
    status, out, _ = run(["rpq", "ab*c", str(inst), "--format", "report", "--seed", "2"])
    assert report(out)["mode"] == "local"
    assert abs(float(report(out)["estimate"]) - 1 / 8) <= 0.1 / 8
    status, out, _ = run(["rpq", "ab*c", str(inst), "--union", "d", "--exact",
                          "--format", "report"])
    assert report(out)["exact"] == "9/16"


def test_minify():
    from pathprov.automata import parse_dfa, regex_to_dfa
    status, text, _ = run(["minify", "aa*"])
    body = text.split("\n\n")[0] if "\n\n" in text else text
    dfa_text = "\n".join(ln for ln in body.splitlines() if "=" not in ln)
    assert status == 0 and parse_dfa(dfa_text).equivalent(regex_to_dfa("a"))
    rep = report(run(["minify", "aa*", "--format", "report"])[1])
    assert rep["words"] == "a" and rep["bounded"] == "true"


@pytest.mark.parametrize("kind", ["1wp-all", "dwt-dwt", "2wp-dwt", "2wp-pt", "rpq"])
def test_gadget_then_verify(files, kind):
    prefix = str(files["dir"] / kind)
    d = ["--d", "6"] if kind in ("1wp-all", "rpq") else []
    status, _, _ = run(["gadget", kind, "--cnf", files["f.cnf"], "--out", prefix, *d])
    assert status == 0
    assert head(run(["verify-represents", prefix + ".query", prefix + ".instance",
                     "--cnf", files["f.cnf"]])) == (0, "true")
    assert head(run(["pqe-exact", prefix + ".query", prefix + ".instance"])) == (0, "3/4")


def test_gadget_pp2dnf(files):
    status, out, _ = run(["gadget", "pp2dnf", "--cnf", files["f.cnf"]])
    assert status == 0 and "---" in out


def test_usage_errors(files):
    assert run(["no-such-command"])[0] == 2
    assert run(["classify", str(files["dir"] / "missing.g")])[0] == 2
    status, _, err = run(["gadget", "1wp-all", "--cnf", files["f.cnf"], "--d", "1"])
    assert status == 1 and err.startswith("DegreeExceeded:")


def test_main_writes_streams(files, capsys):
    assert main(["pqe-exact", files["q.g"], files["diamond.g"]]) == 0
    assert capsys.readouterr().out.startswith("7/16\nvalue=7/16\n")


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "pathprov.cli", "pqe-exact", files["q.g"],
                           files["diamond.g"]], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "7/16"
