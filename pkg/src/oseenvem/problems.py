"""Manufactured Oseen problems on the unit square with closed-form data.

Every field takes an (n, 2) array of points.  Vector fields return (n, 2),
gradients (n, 2, 2) with ``grad_u[:, i, j] = d u_i / d x_j``, scalars (n,).
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, MissingExact

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OseenProblem:
    """-mu Lap u + (grad u) B + gamma u + grad p = f, div u = 0, u = g on the boundary."""

    name: str
    mu: float
    gamma: float
    B: Field
    f: Field
    g: Field
    u: Optional[Field] = None
    grad_u: Optional[Field] = None
    p: Optional[Field] = None
    grad_p: Optional[Field] = None
    lap_u: Optional[Field] = None
    params: dict = field(default_factory=dict)

    @property
    def has_exact(self) -> bool:
        return self.u is not None and self.grad_u is not None and self.p is not None

    def require_exact(self):
        if not self.has_exact:
            raise MissingExact(f"problem {self.name!r} has no exact solution")

    def residual(self, pts: np.ndarray) -> np.ndarray:
        """Pointwise residual of the momentum equation, (n, 2)."""
        if self.lap_u is None or self.grad_p is None or not self.has_exact:
            raise MissingExact(f"problem {self.name!r} lacks the derivatives for a residual check")
        Gu = self.grad_u(pts)
        Bv = self.B(pts)
        conv = np.einsum("nij,nj->ni", Gu, Bv)
        return -self.mu * self.lap_u(pts) + conv + self.gamma * self.u(pts) + self.grad_p(pts) - self.f(pts)

    def check(self, n_samples: int = 100, seed: int = 0, rtol: float = 1e-8, interior: float = 0.0) -> float:
        """Spot-check the momentum residual and div B, div u at random points.

        Returns the worst relative momentum residual; raises ``DomainError`` if
        any check fails.
        """
        rng = np.random.default_rng(seed)
        pts = interior + (1.0 - 2.0 * interior) * rng.random((n_samples, 2))
        if self.has_exact and self.lap_u is not None and self.grad_p is not None:
            Gu = self.grad_u(pts)
            Bv = self.B(pts)
            terms = [self.mu * np.abs(self.lap_u(pts)), np.abs(np.einsum("nij,nj->ni", Gu, Bv)),
                     self.gamma * np.abs(self.u(pts)), np.abs(self.grad_p(pts)), np.abs(self.f(pts))]
            scale = max(float(np.max(t)) for t in terms) or 1.0
            rel = float(np.abs(self.residual(pts)).max()) / scale
            if rel > rtol:
                raise DomainError(f"{self.name}: momentum residual {rel:.3e} exceeds {rtol:.1e}")
            div_u = np.abs(Gu[:, 0, 0] + Gu[:, 1, 1]).max() / max(np.abs(Gu).max(), 1.0)
            if div_u > 1e-10:
                raise DomainError(f"{self.name}: div u = {div_u:.3e} at sample points")
        else:
            rel = 0.0
        return rel


def _vec(a, b):
    return np.stack([a, b], axis=-1)


def _mat(a11, a12, a21, a22):
    return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)


def _const_field(c):
    c = np.asarray(c, dtype=float)
    return lambda pts: np.broadcast_to(c, (len(pts), 2)).copy()


def divergence_fd(fn: Field, pts: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference divergence of a vector field."""
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    return ((fn(pts + ex)[:, 0] - fn(pts - ex)[:, 0]) + (fn(pts + ey)[:, 1] - fn(pts - ey)[:, 1])) / (2 * step)


def _check_nonneg(**kw):
    for k, v in kw.items():
        if not np.isfinite(v) or v < 0:
            raise DomainError(f"{k} must be finite and >= 0, got {v}")


# F(t) = t^2 (t-1)^2 and G(t) = F'(t)/2 = t (2t-1)(t-1)
def _F(t):
    return t**2 * (t - 1) ** 2


def _G(t):
    return 2 * t**3 - 3 * t**2 + t


def _G1(t):
    return 6 * t**2 - 6 * t + 1


def _G2(t):
    return 12 * t - 6


def example1(mu: float = 1.0, gamma: float = 1.0) -> OseenProblem:
    """Polynomial velocity with B = (1, 1); the pressure equals the second velocity component."""
    _check_nonneg(mu=mu, gamma=gamma)

    def u(P):
        x, y = P[:, 0], P[:, 1]
        return _vec(2 * _F(x) * _G(y), -2 * _G(x) * _F(y))

    def grad_u(P):
        x, y = P[:, 0], P[:, 1]
        return _mat(4 * _G(x) * _G(y), 2 * _F(x) * _G1(y),
                    -2 * _G1(x) * _F(y), -4 * _G(x) * _G(y))

    def lap_u(P):
        x, y = P[:, 0], P[:, 1]
        return _vec(4 * _G1(x) * _G(y) + 2 * _F(x) * _G2(y),
                    -2 * _G2(x) * _F(y) - 4 * _G(x) * _G1(y))

    def p(P):
        x, y = P[:, 0], P[:, 1]
        return -2 * _G(x) * _F(y)

    def grad_p(P):
        return grad_u(P)[:, 1, :]

    def f(P):
        Gu = grad_u(P)
        return -mu * lap_u(P) + Gu.sum(axis=2) + gamma * u(P) + grad_p(P)

    return OseenProblem("example1", mu, gamma, _const_field((1.0, 1.0)), f, u, u, grad_u, p, grad_p,
                        lap_u, {"mu": mu, "gamma": gamma})


def _b_ex2(P):
    x, y = P[:, 0], P[:, 1]
    s = (x + y**2) ** 4
    return _vec(10 * y * s + 1.0 / 3.0, -5 * s - 0.5)


def example2(mu: float = 1.0) -> OseenProblem:
    """Trigonometric velocity and pressure with a variable divergence-free field."""
    _check_nonneg(mu=mu)
    tp = 2 * np.pi

    def u(P):
        a, b = tp * P[:, 0], tp * P[:, 1]
        return _vec(np.sin(a) * np.cos(b), -np.cos(a) * np.sin(b))

    def grad_u(P):
        a, b = tp * P[:, 0], tp * P[:, 1]
        ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
        return tp * _mat(ca * cb, -sa * sb, sa * sb, -ca * cb)

    def lap_u(P):
        return -2 * tp**2 * u(P)

    def p(P):
        a, b = tp * P[:, 0], tp * P[:, 1]
        return np.sin(a) * np.cos(b)

    def grad_p(P):
        return grad_u(P)[:, 0, :]

    def f(P):
        conv = np.einsum("nij,nj->ni", grad_u(P), _b_ex2(P))
        return 2 * tp**2 * mu * u(P) + conv + grad_p(P)

    return OseenProblem("example2", mu, 0.0, _b_ex2, f, u, u, grad_u, p, grad_p, lap_u, {"mu": mu})


class _Stretch:
    """psi(t) = 1 - cos(sigma(t)), sigma(t) = 2 pi (e^{rt} - 1) / (e^r - 1), with derivatives."""

    def __init__(self, r: float):
        self.r = r
        self.scale = 2 * np.pi / np.expm1(r)

    def derivs(self, t):
        r = self.r
        s = self.scale * np.expm1(r * t)
        s1 = self.scale * r * np.exp(r * t)
        s2 = r * s1
        s3 = r * s2
        sn, cs = np.sin(s), np.cos(s)
        psi = 1 - cs
        psi1 = sn * s1
        psi2 = cs * s1**2 + sn * s2
        psi3 = -sn * s1**3 + 3 * cs * s1 * s2 + sn * s3
        return psi, psi1, psi2, psi3


def vortex_center(r1: float, r2: float):
    return (np.log((np.exp(r1) + 1) / 2) / r1, np.log((np.exp(r2) + 1) / 2) / r2)


def example3(mu: float = 1e-8, r1: float = 0.1, r2: float | None = None) -> OseenProblem:
    """Confined vortex with u = B; gamma = 1."""
    if r2 is None:
        r2 = r1
    _check_nonneg(mu=mu)
    if not (r1 > 0 and r2 > 0):
        raise DomainError(f"r1 and r2 must be > 0, got {r1}, {r2}")
    sx, sy = _Stretch(r1), _Stretch(r2)
    c = 4 * np.pi**2
    gamma = 1.0

    def parts(P):
        return sx.derivs(P[:, 0]), sy.derivs(P[:, 1])

    def u(P):
        (a0, a1, _, _), (b0, b1, _, _) = parts(P)
        return _vec(a0 * b1, -a1 * b0) / c

    def grad_u(P):
        (a0, a1, a2, _), (b0, b1, b2, _) = parts(P)
        return _mat(a1 * b1, a0 * b2, -a2 * b0, -a1 * b1) / c

    def lap_u(P):
        (a0, a1, a2, a3), (b0, b1, b2, b3) = parts(P)
        return _vec(a2 * b1 + a0 * b3, -(a3 * b0 + a1 * b2)) / c

    def p(P):
        (_, a1, _, _), (_, b1, _, _) = parts(P)
        return a1 * b1 / c

    def grad_p(P):
        (_, a1, a2, _), (_, b1, b2, _) = parts(P)
        return _vec(a2 * b1, a1 * b2) / c

    def f(P):
        uu = u(P)
        conv = np.einsum("nij,nj->ni", grad_u(P), uu)
        return -mu * lap_u(P) + conv + gamma * uu + grad_p(P)

    return OseenProblem("example3", mu, gamma, u, f, u, u, grad_u, p, grad_p, lap_u,
                        {"mu": mu, "r1": r1, "r2": r2})


def layer(t, mu: float):
    """(1 - e^{t/mu}) / (1 - e^{1/mu}) evaluated without overflow."""
    t = np.asarray(t, dtype=float)
    return np.exp((t - 1) / mu) * np.expm1(-t / mu) / np.expm1(-1 / mu)


def layer_derivs(t, mu: float):
    """(phi, phi', phi'') of :func:`layer`."""
    phi = layer(t, mu)
    d1 = np.exp((t - 1) / mu) / (mu * -np.expm1(-1 / mu))
    return phi, d1, d1 / mu


def example4(mu: float = 1e-2) -> OseenProblem:
    """Boundary layers at x = 1 and y = 1, B = (1, 1), gamma = 0, p = x - y."""
    if not (np.isfinite(mu) and mu > 0):
        raise DomainError(f"example4 needs mu > 0, got {mu}")

    def u(P):
        x, y = P[:, 0], P[:, 1]
        return _vec(y - layer(y, mu), x - layer(x, mu))

    def grad_u(P):
        x, y = P[:, 0], P[:, 1]
        _, dy, _ = layer_derivs(y, mu)
        _, dx, _ = layer_derivs(x, mu)
        z = np.zeros_like(x)
        return _mat(z, 1 - dy, 1 - dx, z)

    def lap_u(P):
        x, y = P[:, 0], P[:, 1]
        return _vec(-layer_derivs(y, mu)[2], -layer_derivs(x, mu)[2])

    def p(P):
        return P[:, 0] - P[:, 1]

    def grad_p(P):
        return _vec(np.ones(len(P)), -np.ones(len(P)))

    # -mu phi'' = -phi' cancels the convective layer term exactly
    f = _const_field((2.0, 0.0))
    return OseenProblem("example4", mu, 0.0, _const_field((1.0, 1.0)), f, u, u, grad_u, p, grad_p,
                        lap_u, {"mu": mu})


def stokes_patch(k: int = 1, mu: float = 1.0) -> OseenProblem:
    """Stokes flow whose exact solution lies in the discrete space of degree k."""
    if k not in (1, 2):
        raise DomainError(f"stokes_patch is defined for k in (1, 2), got {k}")
    _check_nonneg(mu=mu)
    zero = _const_field((0.0, 0.0))
    if k == 1:
        def u(P):
            return _vec(P[:, 1], P[:, 0])

        def grad_u(P):
            o, z = np.ones(len(P)), np.zeros(len(P))
            return _mat(z, o, o, z)

        def p(P):
            return np.zeros(len(P))

        grad_p = lap_u = zero
        f = zero
    else:
        def u(P):
            return _vec(P[:, 1] ** 2, P[:, 0] ** 2)

        def grad_u(P):
            z = np.zeros(len(P))
            return _mat(z, 2 * P[:, 1], 2 * P[:, 0], z)

        def p(P):
            return P[:, 0] + P[:, 1] - 1.0

        grad_p = _const_field((1.0, 1.0))
        lap_u = _const_field((2.0, 2.0))
        f = _const_field((1.0 - 2.0 * mu, 1.0 - 2.0 * mu))
    return OseenProblem(f"stokes_patch{k}", mu, 0.0, zero, f, u, u, grad_u, p, grad_p, lap_u,
                        {"k": k, "mu": mu})


def load_custom(target: str, **params) -> OseenProblem:
    """Build a user problem from ``"package.module:factory"``; the factory returns an OseenProblem."""
    mod_name, _, attr = target.partition(":")
    if not mod_name or not attr:
        raise DomainError(f"custom problem must be given as module:factory, got {target!r}")
    factory = getattr(importlib.import_module(mod_name), attr)
    prob = factory(**params)
    if not isinstance(prob, OseenProblem):
        raise DomainError(f"{target} did not return an OseenProblem")
    return prob


PROBLEMS = ("example1", "example2", "example3", "example4", "stokes_patch", "custom")


def get_problem(name: str, mu: float | None = None, gamma: float | None = None,
                r1: float | None = None, r2: float | None = None, k: int = 1,
                custom: str | None = None) -> OseenProblem:
    """Problem factory keyed by id; parameters left as None take the problem defaults."""
    kw = lambda **d: {a: b for a, b in d.items() if b is not None}  # noqa: E731
    if name == "example1":
        return example1(**kw(mu=mu, gamma=gamma))
    if name == "example2":
        return example2(**kw(mu=mu))
    if name == "example3":
        return example3(**kw(mu=mu, r1=r1, r2=r2))
    if name == "example4":
        return example4(**kw(mu=mu))
    if name == "stokes_patch":
        return stokes_patch(k, **kw(mu=mu))
    if name == "custom":
        if not custom:
            raise DomainError("problem 'custom' needs a module:factory target")
        return load_custom(custom, **kw(mu=mu, gamma=gamma, r1=r1, r2=r2))
    raise DomainError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}")
