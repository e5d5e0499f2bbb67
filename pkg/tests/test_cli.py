import io
import subprocess
import sys

import pytest

from coxtree.cli import EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_OK, run


def _run(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def _fields(text):
    out = {}
    for line in text.splitlines():
        if ": " in line:
            k, v = line.split(": ", 1)
            out.setdefault(k, v)
    return out


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "coxtree.cli", *argv], capture_output=True, text=True)


@pytest.mark.parametrize("name,category,verdict", [
    ("a2", "PositiveDefinite", "finite"),
    ("dinf", "AffineDegenerate", "affine"),
    ("figure", "IndefiniteNondegenerate", "simple"),
])
def test_classify(name, category, verdict):
    code, text = _run("classify", f"builtin:{name}")
    f = _fields(text)
    assert code == EXIT_OK
    assert f["coxtree-report"] == "1" and f["command"] == "classify"
    assert f["category"] == category
    assert verdict in f["verdict"].lower()
    assert text.rstrip().endswith("status: pass")


def test_graph_file(tmp_path):
    path = tmp_path / "g.cox"
    path.write_text("vertices: x y z\nx y 3\ny z inf\n")
    code, text = _run("length", str(path), "x", "y", "x", "y")
    assert code == EXIT_OK
    assert _fields(text)["normal_form"] == "y x"


def test_length_identity():
    code, text = _run("length", "builtin:figure", "e")
    assert code == EXIT_OK and _fields(text)["length"] == "0"


def test_input_errors(tmp_path):
    assert _run("classify", str(tmp_path / "missing.cox"))[0] == EXIT_INPUT
    assert _run("length", "builtin:figure", "a", "z")[0] == EXIT_INPUT
    assert _run("gamma", "builtin:figure", "--prime", "2")[0] == EXIT_INPUT
    assert _run("classify", "builtin:nosuch")[0] == EXIT_INPUT
    assert _run("shape", "builtin:figure", "a", "b")[0] == EXIT_INPUT
    bad = tmp_path / "bad.cox"
    bad.write_text("vertices: x y\nx y 1\n")
    assert _run("classify", str(bad))[0] == EXIT_INPUT


def test_failed_check_exit():
    code, text = _run("icc", "builtin:figure", "--w", "a", "--radii", "3,3")
    assert code == EXIT_FAIL
    assert "check.icc_growth: fail" in text and text.rstrip().endswith("status: fail")


def test_cap_exit():
    res = _cli("ball", "builtin:figure", "8", "--ball-cap", "20")
    assert res.returncode == EXIT_CAP and "resource limit" in res.stderr


def test_orbits_and_shape():
    code, text = _run("orbits", "builtin:dinf")
    f = _fields(text)
    assert code == EXIT_OK and f["lambda"] == "2" and f["config.prime"] == "3"
    code, text = _run("shape", "builtin:dinf", "s", "t", "s", "t")
    assert code == EXIT_OK and _fields(text)["shape"] == "(2,2)"


def test_trees_dump():
    code, text = _run("trees", "builtin:dinf", "--radius", "3", "--dump", "0")
    assert code == EXIT_OK
    edges = [line for line in text.splitlines() if line.startswith("edge: ")]
    assert edges == ["edge: 0 1 s", "edge: 0 2 t.s.t", "edge: 1 3 s.t.s.t.s"]
    assert _run("trees", "builtin:dinf", "--dump", "9")[0] == EXIT_INPUT


def test_free_command():
    code, text = _run("free", "builtin:figure", "--gamma", "b c b c b c", "--maxlen", "4")
    f = _fields(text)
    assert code == EXIT_OK
    assert f["check.ping_pong"] == "pass" and f["check.free"] == "pass"
    assert _run("free", "builtin:figure", "--gamma", "a")[0] == EXIT_INPUT


def test_haagerup_command():
    code, text = _run("haagerup", "builtin:dinf", "--n", "4", "--trials", "5", "--workers", "2")
    assert code == EXIT_OK and "check.haagerup_shape: pass" in text
    assert "config.workers" not in text
    assert _run("haagerup", "builtin:dinf", "--n", "3", "--mode", "length")[0] == EXIT_INPUT


def test_report_is_deterministic_and_worker_independent():
    a = _cli("report", "builtin:dinf", "--seed", "3", "--trials", "10", "--workers", "1")
    b = _cli("report", "builtin:dinf", "--seed", "3", "--trials", "10", "--workers", "4")
    assert a.returncode == 0 and a.stdout == b.stdout
    assert a.stdout.startswith("coxtree-report: 1\n")
