"""Worked potential families in the coordinates used throughout the tests
and scenarios."""
from __future__ import annotations

import numpy as np

from .lg import LGPotential


def pn_mirror(n: int, q: complex) -> LGPotential:
    """x_1 + ... + x_n + q/(x_1...x_n), the projective-space mirror."""
    exps = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    exps.append(tuple(-1 for _ in range(n)))
    coeffs = [1.0] * n + [complex(q)]
    return LGPotential(exps, coeffs)


def p1_mirror(q: complex) -> LGPotential:
    return pn_mirror(1, q)


def p2_mirror(q: complex) -> LGPotential:
    return pn_mirror(2, q)


def bl_line_p4_potential(q1: complex, q2: complex) -> LGPotential:
    """x1+x2+x3+x4 + q1 q2/(x1 x2 x3 x4) + x1 x2 x3/q1, the blowup chart."""
    exps = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
            (-1, -1, -1, -1), (1, 1, 1, 0)]
    coeffs = [1.0, 1.0, 1.0, 1.0, complex(q1) * complex(q2),
              1.0 / complex(q1)]
    return LGPotential(exps, coeffs)


def bl_line_p4_family_lambda(t_of_lambda=None):
    """Family lam -> potential along the Example path, with
    t(lam) = lam^{2/3} + lam^{2/5} unless overridden; q1 = 1/t,
    q2 = lam q1^{3/2}."""
    if t_of_lambda is None:
        def t_of_lambda(lam):
            return lam ** (2.0 / 3.0) + lam ** (2.0 / 5.0)

    def family(lam):
        lam = complex(lam)
        t = complex(t_of_lambda(lam))
        q1 = 1.0 / t
        q2 = lam * q1 ** 1.5
        return bl_line_p4_potential(q1, q2)
    return family


def bl_line_p4_oracle_values(lam, t_of_lambda=None):
    """Critical values t^{-1/2}(5x + 3x^3) over the nine roots of
    x^5 (x^2+1)^2 = lam, sorted by decreasing imaginary part."""
    if t_of_lambda is None:
        def t_of_lambda(l):
            return l ** (2.0 / 3.0) + l ** (2.0 / 5.0)
    lam = complex(lam)
    t = complex(t_of_lambda(lam))
    p = np.zeros(10, dtype=complex)
    p[0], p[2], p[4], p[9] = 1, 2, 1, -lam
    roots = np.roots(p)
    vals = [t ** -0.5 * (5 * x + 3 * x ** 3) for x in roots]
    vals.sort(key=lambda v: (-v.imag, v.real))
    return vals


def cyclic_orbifold_potential(d: int, t: complex) -> LGPotential:
    """x2 + x1^d/x2 + t x1 on the [C^2/mu_d] chart."""
    return LGPotential([(0, 1), (d, -1), (1, 0)], [1.0, 1.0, complex(t)])


def cyclic_resolution_potential(d: int, q: complex) -> LGPotential:
    """x2 + q x1^d/x2 + x1 on the resolution chart (q = t^{-d})."""
    return LGPotential([(0, 1), (d, -1), (1, 0)], [1.0, complex(q), 1.0])


def blowup_c2_potential(t: complex) -> LGPotential:
    """x1 + x2 + t x1 x2 on the C^2 chart of the blowup wall."""
    return LGPotential([(1, 0), (0, 1), (1, 1)], [1.0, 1.0, complex(t)])
