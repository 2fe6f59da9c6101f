"""Element matrices of the discrete bilinear forms and the VEM stabilizers.

Velocity matrices act on one scalar component (N_E x N_E) unless stated
otherwise; the two velocity components share them block-diagonally.
"""

from __future__ import annotations

import numpy as np

from .vemspace import LocalSpace


def _field(fn, pts):
    """Evaluate a vector field ``fn(points) -> (n, 2)``; arrays pass through as precomputed values."""
    out = np.asarray(fn(pts) if callable(fn) else fn, dtype=float)
    return np.broadcast_to(out, (len(pts), 2)) if out.ndim == 1 else out


def stabilizer_matrices(space: LocalSpace):
    """(S_grad, S_0, S_p): dofi-dofi, |E|-scaled dofi-dofi and dofi-dofi."""
    n = space.ndof
    eye = np.eye(n)
    return eye, space.area * eye, eye.copy()


def fluctuation(P_hat: np.ndarray) -> np.ndarray:
    return np.eye(P_hat.shape[0]) - P_hat


def local_a(space: LocalSpace, mu: float) -> np.ndarray:
    """mu [ (Pi0_{k-1} grad w, Pi0_{k-1} grad z) + S_grad((I - PiN) w, (I - PiN) z) ]."""
    if mu == 0.0:
        return np.zeros((space.ndof, space.ndof))
    H1 = space.H[: space.nk1, : space.nk1]
    K = sum(P.T @ H1 @ P for P in space.PG)
    F = fluctuation(space.PiN_hat)
    return mu * (K + F.T @ F)


def local_d(space: LocalSpace, gamma: float) -> np.ndarray:
    """gamma [ (Pi0_k w, Pi0_k z) + S_0((I - Pi0_k) w, (I - Pi0_k) z) ]."""
    if gamma == 0.0:
        return np.zeros((space.ndof, space.ndof))
    P0 = space.P0
    F = fluctuation(space.P0_hat)
    return gamma * (P0.T @ space.H @ P0 + space.area * (F.T @ F))


def local_b(space: LocalSpace) -> np.ndarray:
    """(2 N_E) x N_E matrix of (Pi0_{k-1} div z, Pi0_k q); rows are [z_1 ; z_2]."""
    HP = space.H[: space.nk1, :] @ space.P0
    return np.vstack([space.PG[0].T @ HP, space.PG[1].T @ HP])


def local_c_skew(space: LocalSpace, B, B_bnd=None) -> np.ndarray:
    """Skew part of the boundary-corrected convective form.

    c(w, z) = int_E (grad Pi0_k w) B . Pi0_k z + int_dE (B.n) (I - Pi0_k) w . Pi0_k z,
    per component, returned as (c(w, z) - c(z, w)) / 2.  ``B`` is a field or
    its values at the interior points; ``B_bnd`` optionally gives the values at
    the boundary points.
    """
    P0 = space.P0
    Bq = _field(B, space.xq)
    Vw = space.Vq * space.wq[:, None]
    conv = (space.Gxq * Bq[:, :1] + space.Gyq * Bq[:, 1:]) @ P0
    M = (Vw @ P0).T @ conv
    Bb = _field(B if B_bnd is None else B_bnd, space.xb)
    bn = (Bb * space.nb).sum(1) * space.wb
    VbP = space.Vb @ P0
    M += (VbP * bn[:, None]).T @ (space.Tb - VbP)
    # rows index the test function z, columns the trial w
    return 0.5 * (M - M.T)


def local_c_hat(space: LocalSpace, B) -> np.ndarray:
    """Skew part of int_E (Pi0_{k-1} grad w) B . Pi0_k z, no boundary term."""
    Bq = _field(B, space.xq)
    V1 = space.Vq[:, : space.nk1]
    conv = (V1 * Bq[:, :1]) @ space.PG[0] + (V1 * Bq[:, 1:]) @ space.PG[1]
    M = ((space.Vq * space.wq[:, None]) @ space.P0).T @ conv
    return 0.5 * (M - M.T)


def local_load(space: LocalSpace, f) -> np.ndarray:
    """(N_E, 2) array of int_E f_d Pi0_k phi_j."""
    fq = _field(f, space.xq)
    VP = space.Vq @ space.P0
    return (VP * space.wq[:, None]).T @ fq


def convective_matrix(space: LocalSpace, B, variant: str = "skew", B_bnd=None) -> np.ndarray:
    if variant == "skew":
        return local_c_skew(space, B, B_bnd)
    if variant == "hat":
        return local_c_hat(space, B)
    raise ValueError(f"unknown convective variant {variant!r} (expected 'skew' or 'hat')")
