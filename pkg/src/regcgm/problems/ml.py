"""Huber regression and group LASSO instances with seeded random data.

Random draws use numpy's PCG64 generator. A ``SeedSequence(seed)`` is
spawned into independent child streams: child 0 draws ``A``, child 1 draws
the true coefficients (and group sizes / zero pattern for group LASSO),
child 2 draws the noise ``v``. Data are bit-reproducible for a given seed
and numpy version.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import Problem

NOISE_VAR = 0.1
GROUP_DELTA = 1e-12


def _streams(seed: int):
    children = np.random.SeedSequence(seed).spawn(3)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _design(rng, m: int, n: int) -> np.ndarray:
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)
    return A


def _check_dims(A, b):
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValueError(f"A must be (m, n) and b (m,), got {A.shape} and {b.shape}")
    return A, b


@dataclass(frozen=True)
class HuberInstance:
    A: np.ndarray
    b: np.ndarray
    seed: int = -1

    def __post_init__(self):
        A, b = _check_dims(self.A, self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class GroupLassoInstance:
    A: np.ndarray
    b: np.ndarray
    group_sizes: tuple
    rho: float
    seed: int = -1
    bounds: tuple = field(init=False, repr=False)

    def __post_init__(self):
        A, b = _check_dims(self.A, self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        sizes = tuple(int(s) for s in self.group_sizes)
        if any(s < 1 for s in sizes) or sum(sizes) != A.shape[1]:
            raise ValueError("group sizes must be positive and sum to n")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "group_sizes", sizes)
        edges = np.concatenate([[0], np.cumsum(sizes)])
        object.__setattr__(self, "bounds", tuple(zip(edges[:-1].tolist(), edges[1:].tolist())))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def groups(self) -> list:
        return [range(lo, hi) for lo, hi in self.bounds]


def gen_huber(m: int, n: int, seed: int) -> HuberInstance:
    """Random Huber regression data: unit-norm N(0, 1) columns, b = A x_true + v."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    ra, rx, rv = _streams(seed)
    A = _design(ra, m, n)
    x_true = rx.standard_normal(n) / np.sqrt(n)
    b = A @ x_true + np.sqrt(NOISE_VAR) * rv.standard_normal(m)
    return HuberInstance(A, b, seed)


def gen_glasso(m: int, N: int, K: int, seed: int) -> GroupLassoInstance:
    """Random group LASSO data with N groups of size uniform on {1, ..., K}.

    Half of the groups (rounded down) have zero true coefficients and
    ``rho = 0.001 * ||A'b||_inf``.
    """
    if m < 1 or N < 1 or K < 1:
        raise ValueError("m, N and K must be >= 1")
    ra, rx, rv = _streams(seed)
    sizes = rx.integers(1, K, size=N, endpoint=True)
    n = int(sizes.sum())
    A = _design(ra, m, n)
    x_true = rx.standard_normal(n)
    zero = rx.choice(N, size=N // 2, replace=False)
    edges = np.concatenate([[0], np.cumsum(sizes)])
    for i in zero:
        x_true[edges[i] : edges[i + 1]] = 0.0
    b = A @ x_true + np.sqrt(NOISE_VAR) * rv.standard_normal(m)
    rho = 1e-3 * np.abs(A.T @ b).max()
    return GroupLassoInstance(A, b, tuple(sizes.tolist()), float(rho), seed)


def huber_value_grad(inst: HuberInstance, x) -> tuple[float, np.ndarray]:
    """sum_i h(z_i) with z = Ax - b, h(z) = z^2/2 for |z| <= 1 and |z| - 1/2 otherwise."""
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise ValueError(f"x must have shape ({inst.n},), got {x.shape}")
    z = inst.A @ x - inst.b
    az = np.abs(z)
    inner = az <= 1.0
    f = 0.5 * (z[inner] ** 2).sum() + (az[~inner] - 0.5).sum()
    w = np.where(inner, z, np.sign(z))
    return float(f), inst.A.T @ w


def glasso_value_grad(inst: GroupLassoInstance, x, info: dict | None = None):
    """0.5 ||Ax - b||^2 + rho * sum_i ||x_i||.

    The penalty gradient of a group with ``||x_i|| < 1e-12`` is set to zero;
    when that happens ``info["nondifferentiable_hit"]`` is set to True.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise ValueError(f"x must have shape ({inst.n},), got {x.shape}")
    r = inst.A @ x - inst.b
    g = inst.A.T @ r
    pen = 0.0
    hit = False
    for lo, hi in inst.bounds:
        xi = x[lo:hi]
        nrm = float(np.sqrt(xi @ xi))
        pen += nrm
        if nrm < GROUP_DELTA:
            hit = True
        else:
            g[lo:hi] += inst.rho * xi / nrm
    if info is not None:
        info["nondifferentiable_hit"] = info.get("nondifferentiable_hit", False) or hit
    return float(0.5 * r @ r + inst.rho * pen), g


def _as_problem(name, vg, n, f_star=None):
    return Problem(
        name=name,
        dim=n,
        eval_f=lambda x: vg(x)[0],
        eval_grad=lambda x: vg(x)[1],
        x0=np.zeros(n),
        known_f_star=f_star,
        value_grad=vg,
    )


def huber_problem(inst: HuberInstance, name: str | None = None) -> Problem:
    name = name or f"huber_m{inst.m}_n{inst.n}_s{inst.seed}"
    return _as_problem(name, lambda x: huber_value_grad(inst, x), inst.n)


def glasso_problem(inst: GroupLassoInstance, name: str | None = None, info: dict | None = None) -> Problem:
    name = name or f"glasso_m{inst.m}_N{len(inst.group_sizes)}_s{inst.seed}"
    return _as_problem(name, lambda x: glasso_value_grad(inst, x, info), inst.n)
