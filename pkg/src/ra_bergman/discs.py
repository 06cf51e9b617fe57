"""Half-disc conformal map, attached analytic discs, and the wedge geometry.

Every disc component here is a "lens map": the unit disc is sent to the
upper half-plane by ``xi = i(1 + zeta)/(1 - zeta)``, dilated by ``kappa``,
opened to the sector ``0 < arg q < beta`` by ``q = (kappa xi)^(beta/pi)`` and
carried to a circular lens over the chord ``[x1, x2]`` by a Moebius map.  The
lower half-circle lands on the chord and the upper half-circle on the arc.
``beta = pi/2``, ``[x1, x2] = [-1, 1]``, ``kappa = 1`` is the half-disc map.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_complex_array
from .exceptions import (
    ConstructionFailureError,
    DomainError,
    InvalidInputError,
    InvalidParameterError,
    SearchFailureError,
)

T_HALF_DISC = math.tan(math.pi / 8.0)  # phi(0) = i t
_EDGE = 1e-12


def _sqrt_upper(xi):
    """Square root on the closed upper half-plane, branch cut on the negative imaginary axis."""
    return np.exp(0.25j * math.pi) * np.sqrt(-1j * xi)


def phi(zeta):
    """Conformal map of the unit disc onto the upper half-disc with ``phi(+-1) = +-1``, ``phi(-i) = 0``."""
    zeta, scalar = check_complex_array(zeta, name="zeta")
    if np.any(np.abs(zeta) > 1.0 + _EDGE):
        raise DomainError("phi is defined on the closed unit disc")
    one = np.abs(zeta - 1.0) < _EDGE
    zs = np.where(one, 0.0, zeta)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = 1j * (1.0 + zs) / (1.0 - zs)
        q = _sqrt_upper(xi)
        w = (q - 1.0) / (q + 1.0)
    w = np.where(one, 1.0 + 0j, w)
    return w[0] if scalar else w


def psi(w):
    """Inverse of ``phi``: ``m3(m2(m1(w)))`` with ``m1 = (1+w)/(1-w)``, ``m2 = q^2``, ``m3 = (xi-i)/(xi+i)``."""
    w, scalar = check_complex_array(w, name="w")
    if np.any((np.abs(w) > 1.0 + _EDGE) | (w.imag < -_EDGE)):
        raise DomainError("psi is defined on the closed upper half-disc")
    one = np.abs(w - 1.0) < _EDGE
    ws = np.where(one, 0.0, w)
    q = (1.0 + ws) / (1.0 - ws)
    xi = q * q
    zeta = (xi - 1j) / (xi + 1j)
    zeta = np.where(one, 1.0 + 0j, zeta)
    return zeta[0] if scalar else zeta


def phi_ab(a, b, zeta):
    """``(b/t)(phi(zeta) + a t / b)``, so ``phi_ab(0) = a + i b``."""
    if not b > 0:
        raise InvalidParameterError(f"b must be positive, got {b}")
    return (b / T_HALF_DISC) * phi(zeta) + a


def boundary_xi(theta):
    """``xi(e^{i theta}) = -cot(theta/2)`` computed from the distances to the nearest corner.

    Upper half-circle gives ``xi < 0``, lower half-circle ``xi > 0``.
    """
    th = np.mod(np.asarray(theta, dtype=float), 2.0 * math.pi)
    upper = th <= math.pi
    dl = np.where(upper, th, th - math.pi)
    dr = np.where(upper, math.pi - th, 2.0 * math.pi - th)
    with np.errstate(divide="ignore"):
        return np.where(upper, -np.sin(dr / 2) / np.sin(dl / 2), np.sin(dl / 2) / np.sin(dr / 2))


@dataclass(frozen=True)
class LensMap:
    """Conformal map of the unit disc onto the lens over ``[x1, x2]`` with corner angle ``beta``."""

    x1: float
    x2: float
    beta: float = math.pi / 2
    kappa: float = 1.0

    def __post_init__(self):
        if not self.x2 > self.x1:
            raise InvalidParameterError("lens needs x1 < x2")
        if not 0 < self.beta < math.pi:
            raise InvalidParameterError("lens angle must lie in (0, pi)")
        if not self.kappa > 0:
            raise InvalidParameterError("kappa must be positive")

    @classmethod
    def affine_half_disc(cls, a, b):
        """The lens for ``phi_ab``: ``[a - b/t, a + b/t]`` with a right-angle corner."""
        if not b > 0:
            raise InvalidParameterError(f"b must be positive, got {b}")
        return cls(a - b / T_HALF_DISC, a + b / T_HALF_DISC)

    def from_xi(self, xi):
        xi = np.asarray(xi, dtype=complex)
        inf = ~np.isfinite(xi)
        xs = np.where(inf, 1.0, xi)
        arg = np.arctan2(np.maximum(xs.imag, 0.0) + 0.0, xs.real)
        q = np.abs(self.kappa * xs) ** (self.beta / math.pi) * np.exp(1j * arg * self.beta / math.pi)
        w = (self.x1 + self.x2 * q) / (1.0 + q)
        return np.where(inf, self.x2 + 0j, w)

    def __call__(self, zeta):
        zeta, scalar = check_complex_array(zeta, name="zeta")
        if np.any(np.abs(zeta) > 1.0 + _EDGE):
            raise DomainError("lens maps are defined on the closed unit disc")
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = 1j * (1.0 + zeta) / (1.0 - zeta)
        xi = np.where(np.abs(zeta - 1.0) < _EDGE, np.inf, xi)
        w = self.from_xi(xi)
        return w[0] if scalar else w

    def derivative(self, zeta):
        zeta, scalar = check_complex_array(zeta, name="zeta")
        xi = 1j * (1.0 + zeta) / (1.0 - zeta)
        dxi = 2j / (1.0 - zeta) ** 2
        arg = np.arctan2(np.maximum(xi.imag, 0.0) + 0.0, xi.real)
        e = self.beta / math.pi
        q = np.abs(self.kappa * xi) ** e * np.exp(1j * arg * e)
        d = (self.x2 - self.x1) / (1.0 + q) ** 2 * e * q / xi * dxi
        return d[0] if scalar else d

    def boundary(self, theta):
        return self.from_xi(boundary_xi(theta))

    def chord_margin(self):
        """Distance of the chord ``[x1, x2]`` from the imaginary axis (0 if it crosses it)."""
        return 0.0 if self.x1 <= 0.0 <= self.x2 else min(abs(self.x1), abs(self.x2))

    def sup_modulus(self):
        """``max |w|`` over the closed lens, attained on the boundary."""
        th = np.linspace(0.0, 2.0 * math.pi, 2049)
        return float(max(np.max(np.abs(self.boundary(th))), abs(self.x1), abs(self.x2)))


@dataclass(frozen=True)
class AnalyticDisc:
    """``Phi(zeta) = (L1(zeta), L2(-zeta))`` with lower circle on ``M1 = {Im z = 0}`` and upper on ``M2 = {Im w = 0}``."""

    first: LensMap
    second: LensMap
    report: dict = field(default_factory=dict)

    def __call__(self, zeta):
        zeta, scalar = check_complex_array(zeta, name="zeta")
        z, w = self.first(zeta), self.second(-zeta)
        return (z[0], w[0]) if scalar else (z, w)

    @property
    def center(self):
        return complex(self.first(0.0)), complex(self.second(0.0))

    def boundary(self, theta):
        xi = boundary_xi(theta)
        with np.errstate(divide="ignore"):
            xi2 = np.where(xi == 0.0, np.inf, -1.0 / np.where(xi == 0.0, 1.0, xi))
        xi2 = np.where(np.isinf(xi), 0.0, xi2)
        return self.first.from_xi(xi), self.second.from_xi(xi2)

    def derivatives(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return self.first.derivative(zeta), -self.second.derivative(-zeta)

    def verify(self, n=512):
        """Maximal violations of the boundary conditions on ``n`` samples."""
        th = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        z, w = self.boundary(th)
        upper = th <= math.pi
        return {
            "M1_violation": float(np.max(np.abs(z.imag[~upper]))),
            "M2_violation": float(np.max(np.abs(w.imag[upper]))),
            "first_below_axis": float(max(0.0, -np.min(z.imag[upper]))),
            "second_below_axis": float(max(0.0, -np.min(w.imag[~upper]))),
            "samples": int(n),
        }


def _checked(disc, tol=1e-8, n=512):
    rep = disc.verify(n)
    worst = max(rep["M1_violation"], rep["M2_violation"], rep["first_below_axis"], rep["second_below_axis"])
    rep["max_violation"] = worst
    if worst > tol:
        raise ConstructionFailureError(f"disc boundary violates the Levi-flat conditions by {worst:.3e}", report=rep)
    return AnalyticDisc(disc.first, disc.second, rep)


def make_disc(a, b, c, d, n=512):
    """``Phi_{a,b,c,d}(zeta) = (phi_ab(zeta), phi_cd(-zeta))`` with a verification report."""
    if not (b > 0 and d > 0):
        raise InvalidParameterError(f"need b > 0 and d > 0, got b={b}, d={d}")
    return _checked(AnalyticDisc(LensMap.affine_half_disc(a, b), LensMap.affine_half_disc(c, d)), n=n)


def _tanh_sinh(n):
    """Nodes as distances from the left end of ``[0, 1]``, distances from the right end, and weights."""
    h = 6.0 / (n - 1)
    t = -3.0 + h * np.arange(n)
    u = 0.5 * math.pi * np.sinh(t)
    left = 1.0 / (1.0 + np.exp(-2.0 * u))
    right = 1.0 / (1.0 + np.exp(2.0 * u))
    wts = h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2 / 2.0
    return left, right, wts


def _mean_value(F, disc, n):
    half = n // 2
    left, right, wts = _tanh_sinh(half)
    # upper half-circle theta in (0, pi), lower half-circle theta in (pi, 2 pi)
    dl, dr = math.pi * left, math.pi * right
    xi_up = -np.sin(dr / 2) / np.sin(dl / 2)
    xi_lo = np.sin(dl / 2) / np.sin(dr / 2)
    xi = np.concatenate([xi_up, xi_lo])
    z = disc.first.from_xi(xi)
    w = disc.second.from_xi(-1.0 / xi)
    vals = np.asarray(F(z, w), dtype=complex) * np.ones_like(z)
    return complex(np.sum(vals * np.concatenate([wts, wts])) / 2.0)


def cauchy_eval(F, disc, n=256, report=False):
    """``F(Phi(0))`` from boundary values of ``F`` holomorphic near the disc image.

    Uses the mean-value form of the Cauchy formula,
    ``F(Phi(0)) = (1/2pi) int F(Phi(e^{i theta})) d theta``, integrated by
    tanh-sinh on each half-circle to absorb the corner singularities at
    ``zeta = +-1``.  With ``report=True`` also returns the change against
    half the samples.
    """
    if n < 16 or n % 2:
        raise InvalidParameterError("n must be an even integer >= 16")
    val = _mean_value(F, disc, n)
    if not report:
        return val
    coarse = _mean_value(F, disc, n // 2)
    return val, abs(val - coarse)


def _candidate(p, x_near, beta):
    """Lens with a chord end at ``x_near`` (same side of 0 as Re p) whose centre image is ``p``."""
    sign = 1.0 if p.real > 0 else -1.0
    pm = complex(sign * p.real, p.imag)  # mirror into the right half-plane
    x1 = float(x_near)
    d = (x1 - pm) * complex(math.cos(math.pi - beta / 2), math.sin(math.pi - beta / 2))
    if d.imag >= 0:
        return None
    x2 = float((pm - d * (pm.imag / d.imag)).real)
    if not x2 > x1:
        return None
    if sign < 0:
        x1, x2 = -x2, -x1
    kappa = float((abs(p - x1) / abs(x2 - p)) ** (math.pi / beta))
    lens = LensMap(x1, x2, beta, kappa)
    if abs(complex(lens(0.0)) - p) > 1e-9 * (1 + abs(p)):
        return None
    return lens


def _lens_candidates(p, n_aspect=64, n_shift=19):
    out = []
    for alpha in np.geomspace(1.0 / 8.0, 8.0, n_aspect):
        beta = 2.0 * math.atan(alpha)
        for frac in np.linspace(0.05, 0.95, n_shift):
            lens = _candidate(p, frac * abs(p.real), beta)
            if lens is not None:
                out.append(lens)
    return out


def select_separated_disc(p, eps, R1, n_aspect=64, n_shift=19):
    """A disc through ``p`` whose flat boundary pieces keep ``|Re| > C eps`` and ``|Phi| < R2 < R1``.

    The condition is imposed where the boundary lies on the respective flat
    (``Re Phi1`` on the lower half-circle, ``Re Phi2`` on the upper one).  The
    search runs over lens targets (corner angle ``beta = 2 atan(alpha)`` for
    64 aspect ratios ``alpha`` in ``[1/8, 8]``, and chord positions), with the
    hyperbolic dilation fixed by requiring ``Phi(0) = p``.
    """
    p1, p2 = complex(p[0]), complex(p[1])
    a, b, c, d = p1.real, p1.imag, p2.real, p2.imag
    if not (eps > 0 and b > eps and d > eps and abs(a) > eps and abs(c) > eps):
        raise InvalidParameterError(f"need b, d, |a|, |c| > eps={eps}; got p={p}")
    if not math.hypot(abs(p1), abs(p2)) < R1:
        raise InvalidParameterError(f"|p| must be below R1={R1}")
    cands = [_lens_candidates(pi, n_aspect, n_shift) for pi in (p1, p2)]
    if not cands[0] or not cands[1]:
        raise SearchFailureError("no lens in the search family passes through p", best=None)
    m1, m2 = (np.array([lens.chord_margin() for lens in c]) for c in cands)
    s1, s2 = (np.array([lens.sup_modulus() for lens in c]) for c in cands)
    margin = np.minimum(m1[:, None], m2[None, :])
    sup = np.hypot(s1[:, None], s2[None, :])
    feasible = 1.001 * sup < R1
    score = np.where(feasible, margin, -np.inf)
    i, j = np.unravel_index(np.argmax(score - 1e-12 * sup), score.shape)
    L1, L2 = cands[0][i], cands[1][j]
    info = {"margin_first": float(L1.chord_margin()), "margin_second": float(L2.chord_margin()),
            "sup_modulus": float(sup[i, j]), "R2": float(max(1.001 * sup[i, j], 1.001 * eps))}
    if not (feasible[i, j] and margin[i, j] > 0):
        # report the smallest-modulus pair among those with a positive margin
        k, l = np.unravel_index(np.argmin(np.where(margin > 0, sup, np.inf)), sup.shape)
        info = {"margin_first": float(cands[0][k].chord_margin()), "margin_second": float(cands[1][l].chord_margin()),
                "sup_modulus": float(sup[k, l])}
        raise SearchFailureError(
            f"no lens pair fits inside |Phi| < R1={R1}: smallest modulus with positive margin is {sup[k, l]:.3e}",
            best=info)
    margin = float(margin[i, j])
    disc = _checked(AnalyticDisc(L1, L2))
    C = min(0.99, 0.999 * margin / eps)
    disc.report.update(info, C=C, eps=eps, R1=R1)
    return disc


def wedge_chart(z, w):
    """``(zeta, tau, jac) = (z w, z w - z - w, z - w)``."""
    z, w = complex(z), complex(w)
    return z * w, z * w - z - w, z - w


def fiber_directions(points, z):
    """Directions ``-arg(z - a)`` in ``[0, 2 pi)`` of the fibre rays over ``z``."""
    pts = check_complex_array(points, allow_scalar=False)[0]
    diff = complex(z) - pts
    if np.any(np.abs(diff) < 1e-14):
        raise InvalidInputError("z coincides with a point of the set; fibre ray undefined")
    return np.sort(np.mod(-np.angle(diff), 2.0 * math.pi))


def five_point_predicate(points, z):
    """True iff there are at least 5 fibre rays and every angular gap between consecutive ones is below pi."""
    pts = check_complex_array(points, allow_scalar=False)[0]
    if len(pts) < 5:
        raise InvalidInputError(f"need at least 5 points, got {len(pts)}")
    d = fiber_directions(pts, z)
    gaps = np.diff(np.concatenate([d, [d[0] + 2.0 * math.pi]]))
    return bool(np.max(gaps) < math.pi - 1e-12), d
