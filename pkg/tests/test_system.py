import numpy as np
import pytest

from coxtree.system import (
    BUILTINS,
    INF,
    CoxeterInputError,
    CoxeterMatrix,
    CoxeterSystem,
    builtin,
    load_system,
    parse_coxeter_graph,
)


def test_parse_basic():
    cm = parse_coxeter_graph("# comment\nvertices: a b c\na b 3\nb c inf\n")
    assert cm.names == ("a", "b", "c")
    assert cm.label("a", "b") == 3 and cm.label("b", "c") == INF and cm.label("a", "c") == 2
    assert cm.L == 3


@pytest.mark.parametrize("text", [
    "",
    "a b 3\n",
    "vertices: a b\na b 1\n",
    "vertices: a b\na b 3\na b 4\n",
    "vertices: a b\na c 3\n",
    "vertices: a b\na a 3\n",
    "vertices: a b\na b three\n",
    "vertices: a a\n",
    "vertices: a b\na b\n",
    "vertices: 1x\n",
])
def test_parse_rejects(text):
    with pytest.raises(CoxeterInputError):
        parse_coxeter_graph(text)


def test_repeated_consistent_edge_ok():
    cm = parse_coxeter_graph("vertices: a b\na b 5\nb a 5\n")
    assert cm.label("a", "b") == 5


def test_to_text_round_trip():
    for name in BUILTINS:
        cm = builtin(name).cm
        assert parse_coxeter_graph(cm.to_text()) == cm


def test_load_from_path(tmp_path):
    p = tmp_path / "g.cox"
    p.write_text("vertices: x y\nx y 4\n")
    S = load_system(str(p))
    assert S.rank == 2 and S.cm.L == 4


def test_missing_builtin():
    with pytest.raises(FileNotFoundError):
        load_system("builtin:nope")


def test_matrix_validation():
    with pytest.raises(CoxeterInputError):
        CoxeterMatrix(("a", "b"), ((1, 3), (4, 1)))
    with pytest.raises(CoxeterInputError):
        CoxeterMatrix(("a",), ((2,),))


@pytest.mark.parametrize("name", BUILTINS)
def test_generators_are_involutions_preserving_form(name):
    S = builtin(name)
    K = S.field
    n = S.rank
    B = np.array([[K.float_value(S.two_b[i, j]) / 2 for j in range(n)] for i in range(n)])
    for s in range(n):
        M = np.array([[K.float_value(S.gens[s, i, j]) for j in range(n)] for i in range(n)])
        assert np.allclose(M @ M, np.eye(n))
        # sigma(s) preserves B: M^T B M = B
        assert np.allclose(M.T @ B @ M, B)


def test_braid_relation_orders(a2):
    S = a2
    K = S.field
    f = lambda m: np.array([[K.float_value(m[i, j]) for j in range(S.rank)] for i in range(S.rank)])  # noqa: E731
    st = f(S.gens[0]) @ f(S.gens[1])
    assert np.allclose(np.linalg.matrix_power(st, 3), np.eye(2))
    assert not np.allclose(st, np.eye(2))


def test_word_parsing(figure):
    assert figure.parse_word("a b c") == (0, 1, 2)
    assert figure.format_word(()) == "e"
    with pytest.raises(KeyError):
        figure.parse_word("z")


def test_system_equality():
    assert builtin("a2") == CoxeterSystem(builtin("a2").cm)
