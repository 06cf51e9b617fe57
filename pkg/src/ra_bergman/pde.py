"""The transport equation ``u_t + u_{zbar} = 0`` on polynomials in ``conj(z) g(z)``.

Writing ``u(t, z) = sum_k u_k(t, z) (conj(z) g(z))^k`` with ``u_k``
holomorphic in ``z`` and using ``d/dzbar (conj(z) g)^k = k g (conj(z) g)^(k-1)``
gives ``d_t u_k + (k + 1) g u_{k+1} = 0``, whose solution is

    u_k(t, z) = sum_{j=0}^{m-k} (-t g)^j / j! * (k+j)!/k! * U_{k+j}(z).
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_complex_array
from .exceptions import InvalidParameterError
from .moments import DEFAULT_TOL, FunctionHandle, membership_test


def _as_coefficient(U):
    if callable(U):
        return U
    c = complex(U)
    return lambda z: np.full(np.shape(z), c, dtype=complex)


@dataclass(frozen=True)
class PolyBarState:
    """Solution of the transport problem with initial data ``sum_k U_k(z) (conj(z) g(z))^k``.

    ``U`` entries are numbers or holomorphic callables; ``generator`` is any
    callable ``z -> g(z)``.
    """

    U: tuple
    generator: object

    def __post_init__(self):
        if len(self.U) == 0:
            raise InvalidParameterError("need at least one initial coefficient")
        object.__setattr__(self, "U", tuple(self.U))

    @property
    def m(self):
        return len(self.U) - 1

    @property
    def constant_data(self):
        return not any(callable(u) for u in self.U)

    def _g(self, z):
        return np.asarray(self.generator(z.ravel()), dtype=complex).reshape(z.shape)

    def t_coefficients(self, k, z):
        """Coefficients of ``u_k(., z)`` as a polynomial in ``t`` (ascending powers)."""
        z = np.asarray(z, dtype=complex)
        g = self._g(z)
        out = []
        for j in range(self.m - k + 1):
            c = (-1) ** j / math.factorial(j) * math.factorial(k + j) / math.factorial(k)
            out.append(c * g**j * _as_coefficient(self.U[k + j])(z))
        return out

    def coefficient(self, k, t, z):
        """``u_k(t, z)``."""
        if not 0 <= k <= self.m:
            raise InvalidParameterError(f"k must lie in [0, {self.m}]")
        total = 0j
        for j, c in enumerate(self.t_coefficients(k, z)):
            total = total + c * t**j
        return total

    def degree_in_t(self, k, probe=0.7 + 0.3j, tol=1e-14):
        """Degree of ``u_k`` in ``t`` (at a probe point off the zero set)."""
        coeffs = [abs(complex(np.ravel(c)[0])) for c in self.t_coefficients(k, np.array([probe]))]
        scale = max(coeffs) or 1.0
        nz = [j for j, c in enumerate(coeffs) if c > tol * scale]
        return max(nz) if nz else 0

    def __call__(self, t, z):
        z = np.asarray(z, dtype=complex)
        zg = np.conj(z) * self._g(z)
        out = np.zeros(z.shape, dtype=complex)
        for k in range(self.m, -1, -1):
            out = out * zg + self.coefficient(k, t, z)
        return out

    def at(self, t):
        """``z -> u(t, z)`` as a function handle."""
        return FunctionHandle(lambda z: self(t, z), f"u({t})")

    def advance(self, t1):
        """The state whose initial data is ``u(t1, .)``; its solution at ``t`` equals this one at ``t1 + t``."""
        U = tuple((lambda z, k=k: self.coefficient(k, t1, np.asarray(z, dtype=complex))) for k in range(self.m + 1))
        return PolyBarState(U, self.generator)


def transport_solve(U, gen):
    """Closed-form solution for initial coefficients ``U_0, ..., U_m``."""
    return PolyBarState(tuple(U), gen)


def _central(f, x, step, h, order):
    if order == 2:
        return (f(x + step * h) - f(x - step * h)) / (2.0 * h)
    return (8.0 * (f(x + step * h) - f(x - step * h)) - (f(x + 2 * step * h) - f(x - 2 * step * h))) / (12.0 * h)


def pde_residual(state, z, t_samples, h=1e-4, order=4):
    """``max |d_t u + d_zbar u|`` by central differences, ``d_zbar = (d_x + i d_y)/2``.

    ``order`` selects the 3-point (2) or 5-point (4) central stencil.  With
    ``h = 1e-4`` the 3-point stencil's truncation error alone is of order
    ``1e-6`` for cubic data on ``|z| <= 2``.
    """
    if order not in (2, 4):
        raise InvalidParameterError("order must be 2 or 4")
    z, _ = check_complex_array(z)
    worst = 0.0
    for t in np.atleast_1d(np.asarray(t_samples, dtype=float)):
        ut = _central(lambda s: state(s, z), t, 1.0, h, order)
        ux = _central(lambda w: state(t, w), z, 1.0, h, order)
        uy = _central(lambda w: state(t, w), z, 1j, h, order)
        worst = max(worst, float(np.max(np.abs(ut + 0.5 * (ux + 1j * uy)))))
    return worst


def evolve_membership_check(state, X, t_samples, radii, tol=DEFAULT_TOL):
    """``membership_test`` for ``z -> u(t, z)`` at each sampled ``t``."""
    reports = {float(t): membership_test(state.at(float(t)), X, radii, tol) for t in t_samples}
    return {"passed": all(r.passed for r in reports.values()), "reports": reports}
