import numpy as np
import pytest
from hypothesis import given, strategies as st

from oseenvem import lps
from oseenvem.mesh import generate_structured_quads
from oseenvem.vemspace import SpaceCache, build_local_space
from oseenvem.verify import random_polygon

from conftest import unit_square

TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]])
P = lps.StabilizationParams()


def _space(seed, nv, k):
    return build_local_space(random_polygon(np.random.default_rng(seed), nv, concave=nv > 5), k)


spaces = st.builds(_space, st.integers(0, 5000), st.integers(4, 7), st.sampled_from([1, 2]))


def test_params_validation_and_tau():
    with pytest.raises(ValueError):
        lps.StabilizationParams(c1=-1)
    with pytest.raises(ValueError):
        lps.StabilizationParams(c3=float("nan"))
    assert lps.StabilizationParams(2, 3, 4).tau(0.5) == (1.0, 3.0, 1.0)


def test_sup_norm_samples_field():
    sp = build_local_space(unit_square(), 1)
    pts = np.vstack([sp.xq, sp.xb])
    assert lps.sup_norm(sp, lambda X: X) == pytest.approx(np.hypot(*pts.T).max(), rel=1e-14)
    assert lps.sup_norm(sp, lambda X: X) <= np.sqrt(2)
    assert lps.sup_norm(sp, np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_L1_zero_field():
    sp = build_local_space(unit_square(), 2)
    assert not lps.local_L1(sp, np.zeros(2), P).any()


def test_L1_nonzero_on_triangle_k1():
    sp = build_local_space(TRIANGLE, 1)
    L1 = lps.local_L1(sp, np.array([1.0, 1.0]), P)
    m10 = sp.D[:, 1]
    assert m10 @ L1 @ m10 > 1e-3 * sp.h * 2


@given(spaces, st.floats(-3, 3), st.floats(-3, 3))
def test_L1_vanishes_on_lower_degree(sp, bx, by):
    L1 = lps.local_L1(sp, np.array([bx, by]), P)
    scale = max(1.0, np.abs(L1).max())
    assert np.abs(L1 @ sp.D[:, : sp.nk1]).max() <= 1e-12 * scale


def test_L2_translation_and_rotation_free():
    sp = build_local_space(random_polygon(np.random.default_rng(1), 5), 1)
    L2 = lps.local_L2(sp, P)
    c = sp.D[:, 0]
    z = np.zeros_like(c)
    for v in (np.concatenate([c, z]), np.concatenate([z, c])):
        assert np.abs(L2 @ v).max() < 1e-13
    # v = (x, -y): divergence free and linear
    x = sp.D[:, 1] * sp.h + sp.centroid[0] * c
    y = sp.D[:, 2] * sp.h + sp.centroid[1] * c
    v = np.concatenate([x, -y])
    assert abs(v @ L2 @ v) < 1e-12


def test_L2_dilation_value():
    sp = build_local_space(random_polygon(np.random.default_rng(2), 6), 1)
    c = sp.D[:, 0]
    x = sp.D[:, 1] * sp.h + sp.centroid[0] * c
    y = sp.D[:, 2] * sp.h + sp.centroid[1] * c
    v = np.concatenate([x, y])
    tau2 = 0.7
    L2 = lps.local_L2(sp, lps.StabilizationParams(c2=tau2))
    assert v @ L2 @ v == pytest.approx(tau2 * 4 * sp.area, rel=1e-12)


def test_L3_constants_and_lower_degree():
    for k in (1, 2):
        sp = build_local_space(random_polygon(np.random.default_rng(3), 5), k)
        L3 = lps.local_L3(sp, P)
        assert np.abs(L3 @ sp.D[:, : sp.nk1]).max() < 1e-13


def test_L3_linear_on_unit_square_k1():
    sp = build_local_space(unit_square(), 1)
    p = sp.D[:, 1]
    # the projected-gradient fluctuation vanishes, the S_p part does not
    R = sp.PGk[0] @ p
    R[: sp.nk1] -= sp.PG[0] @ p
    assert np.abs(R).max() < 1e-14
    assert p @ lps.local_L3(sp, P) @ p > 0


@given(spaces, st.integers(0, 100))
def test_psd(sp, seed):
    rng = np.random.default_rng(seed)
    mats = [lps.local_L1(sp, rng.standard_normal(2), P), lps.local_L2(sp, P), lps.local_L3(sp, P)]
    for M in mats:
        x = rng.standard_normal(M.shape[0])
        scale = max(1.0, np.abs(M).max())
        assert x @ M @ x >= -1e-14 * scale * (x @ x)
        assert np.allclose(M, M.T, atol=1e-14 * scale)


def test_L3_scales_like_h_squared():
    vals = []
    for n in (2, 4, 8, 16):
        sp = SpaceCache(generate_structured_quads(n), 2)[0]
        L3 = lps.local_L3(sp, P)
        vals.append(np.abs(L3).max() / sp.h**2)
    assert max(vals) / min(vals) < 2.0
