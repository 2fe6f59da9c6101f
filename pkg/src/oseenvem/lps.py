"""Local projection stabilization terms and their element scalings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import _field, fluctuation
from .vemspace import LocalSpace


@dataclass(frozen=True)
class StabilizationParams:
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"stabilization constant {name} must be finite and >= 0, got {v}")

    def tau(self, h: float):
        """(tau1, tau2, tau3) on an element of diameter h."""
        return self.c1 * h, self.c2, self.c3 * h * h


def sup_norm(space: LocalSpace, B, B_bnd=None) -> float:
    """max |B| over the interior and edge quadrature points."""
    bq = _field(B, space.xq)
    bb = _field(B if B_bnd is None else B_bnd, space.xb)
    return float(np.sqrt(max((bq**2).sum(1).max(), (bb**2).sum(1).max())))


def local_L1(space: LocalSpace, B, params: StabilizationParams, B_E: float | None = None) -> np.ndarray:
    """tau1 B_E^2 S_grad((I - PiN_{k-1}) w, (I - PiN_{k-1}) z), per component."""
    if B_E is None:
        B_E = sup_norm(space, B)
    tau1 = params.tau(space.h)[0]
    F = fluctuation(space.PiN1_hat)
    return tau1 * B_E**2 * (F.T @ F)


def local_L2(space: LocalSpace, params: StabilizationParams) -> np.ndarray:
    """tau2 [ (Pi0_{k-1} div w, Pi0_{k-1} div z) + S_grad((I - PiN_k) w, (I - PiN_k) z) ].

    Returned as a (2 N_E) x (2 N_E) matrix in [w_1 ; w_2] ordering.
    """
    tau2 = params.tau(space.h)[1]
    n = space.ndof
    H1 = space.H[: space.nk1, : space.nk1]
    Dv = np.hstack([space.PG[0], space.PG[1]])
    F = fluctuation(space.PiN_hat)
    M = Dv.T @ H1 @ Dv
    S = F.T @ F
    M[:n, :n] += S
    M[n:, n:] += S
    return tau2 * M


def local_L3(space: LocalSpace, params: StabilizationParams) -> np.ndarray:
    """tau3 [ ((Pi0_k - Pi0_{k-1}) grad p, same for q) + S_p((I - PiN_{k-1}) p, (I - PiN_{k-1}) q) ]."""
    tau3 = params.tau(space.h)[2]
    nk1 = space.nk1
    M = np.zeros((space.ndof, space.ndof))
    for d in range(2):
        R = space.PGk[d].copy()
        R[:nk1] -= space.PG[d]
        M += R.T @ space.H @ R
    F = fluctuation(space.PiN1_hat)
    return tau3 * (M + F.T @ F)
