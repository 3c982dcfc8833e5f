import ast
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import regcgm
from regcgm import oracle
from regcgm.cgm import RestartMemory, apply_Ht
from regcgm.exceptions import CurvatureViolation, Singular

from _util import curvature_pair, random_memory, spd


def test_bt_identity():
    e1 = np.eye(2)[0]
    np.testing.assert_allclose(oracle.assemble_Bt(RestartMemory.from_pair(e1, e1)), np.eye(2), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_bt_spd(seed):
    B = oracle.assemble_Bt(random_memory(np.random.default_rng(seed), 4))
    np.testing.assert_array_equal(B, B.T)
    assert np.linalg.eigvalsh(B).min() > 0


@pytest.mark.parametrize("seed", range(5))
def test_bk1_secant(seed):
    rng = np.random.default_rng(seed)
    mem = random_memory(rng, 6)
    p, y = curvature_pair(rng, 6)
    B = oracle.assemble_Bk1(mem, p, y)
    np.testing.assert_allclose(B @ p, y, rtol=1e-10, atol=1e-10 * np.abs(y).max())
    np.testing.assert_array_equal(B, B.T)


def test_bk1_curvature():
    mem = RestartMemory.from_pair(np.ones(2), np.ones(2))
    with pytest.raises(CurvatureViolation):
        oracle.assemble_Bk1(mem, np.array([1.0, 0.0]), np.array([-1.0, 0.0]))


@pytest.mark.parametrize("seed", range(5))
def test_inverse_pairs(seed):
    rng = np.random.default_rng(seed)
    mem = random_memory(rng, 5)
    p, y = curvature_pair(rng, 5)
    I = np.eye(5)
    assert np.abs(oracle.assemble_Ht(mem) @ oracle.assemble_Bt(mem) - I).max() <= 1e-10
    assert np.abs(oracle.assemble_Hk1(mem, p, y) @ oracle.assemble_Bk1(mem, p, y) - I).max() <= 1e-10


def test_inverse_and_condition_basics():
    I = np.eye(4)
    np.testing.assert_array_equal(oracle.dense_inverse(I), I)
    assert oracle.condition_number(I) == 1.0
    assert oracle.condition_number(np.diag([1.0, 10.0])) == pytest.approx(10.0)


def test_nonsymmetric_inverse():
    M = np.array([[1.0, 2.0], [0.0, 3.0]])
    np.testing.assert_allclose(oracle.dense_inverse(M) @ M, np.eye(2), atol=1e-15)
    assert oracle.condition_number(M) == pytest.approx(np.linalg.cond(M))


def test_singular():
    with pytest.raises(Singular):
        oracle.dense_inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(Singular):
        oracle.dense_inverse(np.zeros((3, 3)))
    assert oracle.condition_number(np.zeros((2, 2))) == np.inf


def test_shape_and_size_limits():
    with pytest.raises(ValueError):
        oracle.dense_inverse(np.ones((2, 3)))
    with pytest.raises(ValueError):
        oracle.materialize(lambda v: v, oracle.MAX_DIM + 1)


def test_materialize():
    rng = np.random.default_rng(0)
    mem = random_memory(rng, 7)
    H = oracle.materialize(lambda v: apply_Ht(v, mem), 7)
    np.testing.assert_allclose(H, oracle.assemble_Ht(mem), rtol=1e-12, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.sampled_from([0.1, 1.0, 100.0]))
def test_condition_bound(seed, lam):
    B = spd(np.random.default_rng(seed), 6, kappa=1e4)
    kB = oracle.condition_number(B)
    kR = oracle.condition_number(oracle.dense_inverse(B + lam * np.eye(6)))
    assert kR <= kB * (1 + 1e-8)


def test_solvers_do_not_import_oracle():
    pkg = pathlib.Path(regcgm.__file__).parent
    for path in pkg.rglob("*.py"):
        if path.name == "oracle.py":
            continue
        tree = ast.parse(path.read_text())
        for node in ast.walk(tree):
            if isinstance(node, ast.ImportFrom):
                names = [node.module or ""] + [a.name for a in node.names]
            elif isinstance(node, ast.Import):
                names = [a.name for a in node.names]
            else:
                continue
            assert not any("oracle" in n for n in names), path
