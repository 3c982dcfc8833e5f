"""Analytic unconstrained test problems (CUTEr forms, standard starting points)."""
from __future__ import annotations

import numpy as np

from .base import Problem


def _make(name, fg, x0, f_star=None):
    x0 = np.asarray(x0, dtype=float)
    return Problem(
        name=name,
        dim=x0.size,
        eval_f=lambda x: fg(x)[0],
        eval_grad=lambda x: fg(x)[1],
        x0=x0,
        known_f_star=f_star,
        value_grad=fg,
    )


def _rosen_like(name, power, a, b):
    # a*(x2 - x1**power)**2 + b*(1 - x1)**2
    def fg(x):
        x1, x2 = x
        r = x2 - x1**power
        s = 1.0 - x1
        f = a * r * r + b * s * s
        g = np.array([-2.0 * a * r * power * x1 ** (power - 1) - 2.0 * b * s, 2.0 * a * r])
        return f, g

    return _make(name, fg, [-1.2, 1.0], 0.0)


def rosenbr():
    return _rosen_like("rosenbr", 2, 100.0, 1.0)


def s206():
    return _rosen_like("s206", 2, 1.0, 100.0)


def s211():
    return _rosen_like("s211", 3, 100.0, 1.0)


def cube():
    return _rosen_like("cube", 3, 100.0, 1.0)


def s201():
    def fg(x):
        f = 4.0 * (x[0] - 5.0) ** 2 + (x[1] - 6.0) ** 2
        return f, np.array([8.0 * (x[0] - 5.0), 2.0 * (x[1] - 6.0)])

    return _make("s201", fg, [8.0, 9.0], 0.0)


def beale():
    c = np.array([1.5, 2.25, 2.625])

    def fg(x):
        x1, x2 = x
        pw = np.array([x2, x2**2, x2**3])
        r = c - x1 * (1.0 - pw)
        dr1 = -(1.0 - pw)
        dr2 = x1 * np.array([1.0, 2.0 * x2, 3.0 * x2**2])
        return r @ r, np.array([2.0 * r @ dr1, 2.0 * r @ dr2])

    return _make("beale", fg, [1.0, 1.0], 0.0)


def watson(n: int = 31):
    if n < 2:
        raise ValueError("watson needs n >= 2")
    t = np.arange(1, 30) / 29.0
    j = np.arange(n)
    T = t[:, None] ** j[None, :]  # t_i^(j-1), 1-based j
    D = np.zeros((29, n))
    D[:, 1:] = j[1:] * t[:, None] ** (j[1:] - 1)  # (j-1) t_i^(j-2)

    def fg(x):
        s = T @ x
        r = D @ x - s * s - 1.0
        J = D - 2.0 * s[:, None] * T
        r30 = x[0]
        r31 = x[1] - x[0] ** 2 - 1.0
        f = r @ r + r30 * r30 + r31 * r31
        g = 2.0 * (J.T @ r)
        g[0] += 2.0 * r30 - 4.0 * x[0] * r31
        g[1] += 2.0 * r31
        return f, g

    return _make(f"watson{n}" if n != 31 else "watson", fg, np.zeros(n))


# (alpha, beta, gamma, delta, k1, k2, k3, k4) for DIXMAAN A..L
_DIXMAAN = {
    "a": (1.0, 0.0, 0.125, 0.125, 0, 0, 0, 0),
    "b": (1.0, 0.0625, 0.0625, 0.0625, 0, 0, 0, 0),
    "c": (1.0, 0.125, 0.125, 0.125, 0, 0, 0, 0),
    "d": (1.0, 0.26, 0.26, 0.26, 0, 0, 0, 0),
    "e": (1.0, 0.0, 0.125, 0.125, 1, 0, 0, 1),
    "f": (1.0, 0.0625, 0.0625, 0.0625, 1, 0, 0, 1),
    "g": (1.0, 0.125, 0.125, 0.125, 1, 0, 0, 1),
    "h": (1.0, 0.26, 0.26, 0.26, 1, 0, 0, 1),
    "i": (1.0, 0.0, 0.125, 0.125, 2, 0, 0, 2),
    "j": (1.0, 0.0625, 0.0625, 0.0625, 2, 0, 0, 2),
    "k": (1.0, 0.125, 0.125, 0.125, 2, 0, 0, 2),
    "l": (1.0, 0.26, 0.26, 0.26, 2, 0, 0, 2),
}


def dixmaan(variant: str, n: int = 3000):
    """DIXMAAN{A..L}; ``n`` must be a multiple of 3."""
    variant = variant.lower()
    if variant not in _DIXMAAN:
        raise ValueError(f"unknown dixmaan variant {variant!r}")
    if n % 3 or n < 3:
        raise ValueError("dixmaan needs n a positive multiple of 3")
    al, be, ga, de, k1, k2, k3, k4 = _DIXMAAN[variant]
    m = n // 3
    w = np.arange(1, n + 1) / n
    w1, w2, w3, w4 = w**k1, w[: n - 1] ** k2, w[: 2 * m] ** k3, w[:m] ** k4

    def fg(x):
        u = x[1:] + x[1:] ** 2
        f2 = be * w2 * x[:-1] ** 2 * u**2
        xm4 = x[m : 3 * m] ** 4
        f = (
            1.0
            + al * (w1 * x * x).sum()
            + f2.sum()
            + ga * (w3 * x[: 2 * m] ** 2 * xm4).sum()
            + de * (w4 * x[:m] * x[2 * m :]).sum()
        )
        g = 2.0 * al * w1 * x
        g[:-1] += 2.0 * be * w2 * x[:-1] * u**2
        g[1:] += 2.0 * be * w2 * x[:-1] ** 2 * u * (1.0 + 2.0 * x[1:])
        g[: 2 * m] += 2.0 * ga * w3 * x[: 2 * m] * xm4
        g[m : 3 * m] += 4.0 * ga * w3 * x[: 2 * m] ** 2 * x[m : 3 * m] ** 3
        g[:m] += de * w4 * x[2 * m :]
        g[2 * m :] += de * w4 * x[:m]
        return f, g

    return _make(f"dixmaan{variant}", fg, np.full(n, 2.0), 1.0)


def brownbs():
    def fg(x):
        r1 = x[0] - 1e6
        r2 = x[1] - 2e-6
        r3 = x[0] * x[1] - 2.0
        f = r1 * r1 + r2 * r2 + r3 * r3
        return f, np.array([2.0 * r1 + 2.0 * r3 * x[1], 2.0 * r2 + 2.0 * r3 * x[0]])

    return _make("brownbs", fg, [1.0, 1.0], 0.0)


def sineval():
    c = 1e4

    def fg(x):
        r = x[1] - np.sin(x[0])
        f = c * r * r + 0.25 * x[0] ** 2
        return f, np.array([-2.0 * c * r * np.cos(x[0]) + 0.5 * x[0], 2.0 * c * r])

    return _make("sineval", fg, [4.712389, -1.0], 0.0)


def powellsg():
    def fg(x):
        x1, x2, x3, x4 = x
        a, b, c, d = x1 + 10 * x2, x3 - x4, x2 - 2 * x3, x1 - x4
        f = a * a + 5 * b * b + c**4 + 10 * d**4
        g = np.array(
            [
                2 * a + 40 * d**3,
                20 * a + 4 * c**3,
                10 * b - 8 * c**3,
                -10 * b - 40 * d**3,
            ]
        )
        return f, g

    return _make("powellsg", fg, [3.0, -1.0, 0.0, 1.0], 0.0)


def dqdrtic(n: int = 5000):
    if n < 3:
        raise ValueError("dqdrtic needs n >= 3")

    def fg(x):
        f = (x[:-2] ** 2).sum() + 100.0 * (x[1:-1] ** 2).sum() + 100.0 * (x[2:] ** 2).sum()
        g = np.zeros_like(x)
        g[:-2] += 2.0 * x[:-2]
        g[1:-1] += 200.0 * x[1:-1]
        g[2:] += 200.0 * x[2:]
        return f, g

    return _make("dqdrtic", fg, np.full(n, 3.0), 0.0)


def hilberta(n: int = 10):
    i = np.arange(1, n + 1)
    H = 1.0 / (i[:, None] + i[None, :] - 1.0)

    def fg(x):
        Hx = H @ x
        return 0.5 * x @ Hx, Hx

    return _make("hilberta", fg, np.full(n, -3.0), 0.0)


def tridia(n: int = 10000):
    if n < 2:
        raise ValueError("tridia needs n >= 2")
    i = np.arange(2, n + 1, dtype=float)

    def fg(x):
        r = 2.0 * x[1:] - x[:-1]
        f = (x[0] - 1.0) ** 2 + (i * r * r).sum()
        g = np.zeros_like(x)
        g[0] = 2.0 * (x[0] - 1.0)
        g[1:] += 4.0 * i * r
        g[:-1] -= 2.0 * i * r
        return f, g

    return _make("tridia", fg, np.ones(n), 0.0)


def _registry():
    reg = {
        "rosenbr": rosenbr,
        "s206": s206,
        "s201": s201,
        "s211": s211,
        "cube": cube,
        "beale": beale,
        "watson": watson,
        "brownbs": brownbs,
        "sineval": sineval,
        "powellsg": powellsg,
        "dqdrtic": dqdrtic,
        "hilberta": hilberta,
        "tridia": tridia,
    }
    for v in _DIXMAAN:
        reg[f"dixmaan{v}"] = lambda n=3000, v=v: dixmaan(v, n)
    return reg


PROBLEMS = _registry()

# problems with a quadratic objective
QUADRATIC = frozenset({"s201", "dqdrtic", "hilberta", "tridia"})


def get_problem(name: str, **kw) -> Problem:
    try:
        factory = PROBLEMS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(**kw)
