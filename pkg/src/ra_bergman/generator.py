"""Discrete zero sets and entire generators vanishing simply on them.

Two zero-set families are provided: the union of three rotated copies of a
1-D lattice, and a dyadic family of small regular pentagons accumulating at
the unit circle.  Generators are evaluated together with their derivative,
and also in log-polar form so that callers can work far out in the plane
without overflowing.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_complex_array, check_positive
from .exceptions import GeneratorOverflowError, InvalidInputError, InvalidParameterError

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
_ROTATIONS = (1.0 + 0.0j, OMEGA, OMEGA.conjugate())

# below this |u| the triple-sine quotient is evaluated by its Taylor series
_TAYLOR_RADIUS = 1e-2


@dataclass(frozen=True)
class ZeroSet:
    """A finite window of a discrete set of complex points."""

    points: np.ndarray
    kind: str = "explicit"
    params: dict = field(default_factory=dict)
    omega: complex = OMEGA

    def __post_init__(self):
        pts, _ = check_complex_array(self.points, name="points")
        if len(np.unique(pts)) != len(pts):
            raise InvalidInputError("zero-set points must be distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def contains(self, z, tol=1e-12):
        z, scalar = check_complex_array(z)
        hit = np.min(np.abs(z[:, None] - self.points[None, :]), axis=1) <= tol * (1 + np.abs(z))
        return bool(hit[0]) if scalar else hit

    def within(self, radius):
        keep = np.abs(self.points) <= radius
        return ZeroSet(self.points[keep], "explicit", {"source": self.kind, "radius": radius})

    def scaled(self, factor):
        params = {"source": self.kind, "scale": factor, **{f"source_{k}": v for k, v in self.params.items()}}
        return ZeroSet(self.points * factor, "explicit", params)

    def to_dict(self):
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "points": [[float(p.real), float(p.imag)] for p in self.points],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            pts = np.array([complex(re, im) for re, im in data["points"]], dtype=complex)
            return cls(pts, data.get("kind", "explicit"), dict(data.get("params", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed zero-set document: {exc}") from exc

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def triple_lattice(s, R):
    """Points ``s*j``, ``s*j*omega``, ``s*j*omega**2`` (j integer) with modulus <= R."""
    check_positive(s, "s")
    check_positive(R, "R")
    jmax = int(math.floor(R / s + 1e-12))
    pts = [0j]
    for j in range(1, jmax + 1):
        for rot in _ROTATIONS:
            for sign in (1, -1):
                pts.append(complex(sign * s * j * rot.real, sign * s * j * rot.imag))
    return ZeroSet(np.array(pts), "triple-lattice", {"spacing": float(s), "radius": float(R)})


def disc_zero_set(n_max, k):
    """Vertices of ``k * 2**n`` regular pentagons in each dyadic annulus ``n = 1..n_max``.

    Annulus n is ``1 - 2**-n <= |z| < 1 - 2**-(n+1)``.  Each pentagon has side
    ``2**-(n+2)`` and its centre on ``|z| = 1 - 3 * 2**-(n+2)``, with one vertex
    pointing radially outward.
    """
    check_positive(n_max, "n_max", integer=True)
    check_positive(k, "k", integer=True)
    pts = []
    for n in range(1, n_max + 1):
        count = k * 2**n
        side = 2.0 ** (-n - 2)
        circum = side / (2.0 * math.sin(math.pi / 5))
        rc = 1.0 - 3.0 * side
        for i in range(count):
            ang = 2.0 * math.pi * i / count
            centre = rc * complex(math.cos(ang), math.sin(ang))
            for v in range(5):
                pts.append(centre + circum * complex(math.cos(ang + 2 * math.pi * v / 5),
                                                     math.sin(ang + 2 * math.pi * v / 5)))
    pts = np.array(pts)
    assert np.all(np.abs(pts) < 1.0)
    return ZeroSet(pts, "disc-dyadic", {"n_max": int(n_max), "k": int(k)})


@dataclass(frozen=True)
class BlaschkeSum:
    moduli: np.ndarray
    partial_sums: np.ndarray
    subtotals: dict

    @property
    def total(self):
        return float(self.partial_sums[-1]) if len(self.partial_sums) else 0.0

    def level_ratios(self):
        levels = sorted(self.subtotals)
        return {n: self.subtotals[n + 1] / self.subtotals[n] for n in levels if n + 1 in self.subtotals}


def dyadic_level(modulus):
    """Index n of the annulus ``1 - 2**-n <= |a| < 1 - 2**-(n+1)`` containing ``modulus``."""
    return int(math.floor(-math.log2(1.0 - modulus)))


def blaschke_sum(X, t):
    """Cumulative sums of ``(1 - |a|)**t`` in order of increasing modulus, plus per-annulus subtotals."""
    check_positive(t, "t")
    pts = X.points if isinstance(X, ZeroSet) else check_complex_array(X)[0]
    mod = np.sort(np.abs(pts))
    if np.any(mod >= 1.0):
        raise InvalidInputError("blaschke_sum needs points in the open unit disc")
    terms = (1.0 - mod) ** t
    subtotals = {}
    for m, term in zip(mod, terms):
        n = dyadic_level(m)
        subtotals[n] = subtotals.get(n, 0.0) + float(term)
    return BlaschkeSum(mod, np.cumsum(terms), subtotals)


def _log_polar_sin(w):
    """log|sin w| and arg(sin w) without overflow for large |Im w|."""
    x, y = w.real, w.imag
    ay = np.abs(y)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        big = ay > 1.0
        e2 = np.exp(-2.0 * ay)
        log_big = ay - math.log(2.0) + 0.5 * np.log1p(e2 * e2 - 2.0 * np.cos(2.0 * x) * e2)
        log_small = np.log(np.abs(np.sin(np.where(big, 0.0, w))))
        arg = np.arctan2(np.cos(x) * np.tanh(y), np.sin(x))
    return np.where(big, log_big, log_small), arg


class Generator:
    """An entire function with simple zeros on a discrete set.

    Subclasses implement ``_values(z) -> (g, g')`` and ``_log_polar(z)``.
    """

    kind = "abstract"

    def __call__(self, z):
        return eval_g(self, z)[0]

    def derivative(self, z):
        return eval_g(self, z)[1]

    def log_polar(self, z):
        z, scalar = check_complex_array(z)
        lg, ag = self._log_polar(z)
        return (lg[0], ag[0]) if scalar else (lg, ag)

    def zeros(self, radius):
        raise NotImplementedError

    def scaled(self, n):
        return ScaledGenerator(self, n)


class TripleSineGenerator(Generator):
    """``g(z) = (s/pi) * G(pi z / s)`` with ``G(u) = sin(u) sin(omega u) sin(omega^2 u) / u^2``.

    The default ``spacing = pi`` gives ``G`` itself, whose zeros are
    ``pi * (Z u omega Z u omega^2 Z)``.  ``g'(0) = 1`` for every spacing.
    """

    kind = "triple-sine"

    def __init__(self, spacing=math.pi):
        self.spacing = float(check_positive(spacing, "spacing"))
        self._scale = math.pi / self.spacing

    def _values(self, z):
        u = z * self._scale
        near = np.abs(u) < _TAYLOR_RADIUS
        uf = np.where(near, 1.0, u)
        s1, s2, s3 = np.sin(uf), np.sin(OMEGA * uf), np.sin(OMEGA.conjugate() * uf)
        c1, c2, c3 = np.cos(uf), np.cos(OMEGA * uf), np.cos(OMEGA.conjugate() * uf)
        S = s1 * s2 * s3
        dS = c1 * s2 * s3 + OMEGA * s1 * c2 * s3 + OMEGA.conjugate() * s1 * s2 * c3
        g = S / uf**2
        dg = dS / uf**2 - 2.0 * S / uf**3
        u6 = u**6
        g = np.where(near, u - u * u6 / 945.0, g)
        dg = np.where(near, 1.0 - 7.0 * u6 / 945.0, dg)
        return g / self._scale, dg

    def _log_polar(self, z):
        u = z * self._scale
        near = np.abs(u) < _TAYLOR_RADIUS
        uf = np.where(near, 1.0, u)
        logs, args = zip(*(_log_polar_sin(r * uf) for r in _ROTATIONS))
        with np.errstate(divide="ignore"):
            lg = sum(logs) - 2.0 * np.log(np.abs(uf)) - math.log(self._scale)
            ag = sum(args) - 2.0 * np.angle(uf)
            taylor = (u - u**7 / 945.0) / self._scale
            lg = np.where(near, np.log(np.abs(taylor)), lg)
        ag = np.where(near, np.angle(taylor), ag)
        return lg, ag

    def zeros(self, radius):
        return triple_lattice(self.spacing, radius)

    def __repr__(self):
        return f"TripleSineGenerator(spacing={self.spacing!r})"


class ProductGenerator(Generator):
    """Truncated Weierstrass product over a zero set.

    ``g(z) = z**[0 in X] * prod_{0 < |a| <= R0} E_p(z/a)`` with the primary
    factors ``E_p(u) = (1 - u) exp(u + u**2/2 + ... + u**p/p)``.
    """

    kind = "truncated-product"

    def __init__(self, zeroset, degree=1, radius=math.inf):
        if not isinstance(zeroset, ZeroSet):
            zeroset = ZeroSet(zeroset)
        check_positive(degree, "degree", strict=False, integer=True)
        self.zeroset = zeroset
        self.degree = int(degree)
        self.radius = float(radius)
        pts = zeroset.points
        self._has_origin = bool(np.any(pts == 0))
        self._a = pts[(pts != 0) & (np.abs(pts) <= self.radius)]

    def _factors(self, z):
        a = self._a[None, :]
        u = z[:, None] / a
        poly = np.zeros_like(u)
        for k in range(1, self.degree + 1):
            poly = poly + u**k / k
        ex = np.exp(poly)
        f = (a - z[:, None]) / a * ex
        df = -(u**self.degree) / a * ex
        return f, df, u, poly

    def _values(self, z):
        f, df, _, _ = self._factors(z)
        ones = np.ones((len(z), 1), dtype=complex)
        prefix = np.cumprod(np.hstack([ones, f[:, :-1]]), axis=1) if f.shape[1] else ones[:, :0]
        suffix = np.cumprod(np.hstack([ones, f[:, :0:-1]]), axis=1)[:, ::-1] if f.shape[1] else ones[:, :0]
        prod = np.prod(f, axis=1)
        dprod = np.sum(df * prefix * suffix, axis=1)
        if self._has_origin:
            return z * prod, prod + z * dprod
        return prod, dprod

    def _log_polar(self, z):
        a = self._a[None, :]
        u = z[:, None] / a
        poly = np.zeros_like(u)
        for k in range(1, self.degree + 1):
            poly = poly + u**k / k
        lin = (a - z[:, None]) / a
        with np.errstate(divide="ignore"):
            lg = np.sum(np.log(np.abs(lin)) + poly.real, axis=1)
            ag = np.sum(np.angle(lin) + poly.imag, axis=1)
            if self._has_origin:
                lg = lg + np.log(np.abs(z))
                ag = ag + np.angle(z)
        return lg, ag

    def zeros(self, radius):
        pts = self.zeroset.points
        return ZeroSet(pts[np.abs(pts) <= min(radius, self.radius)], "explicit", {"source": self.zeroset.kind})

    def __repr__(self):
        return f"ProductGenerator(n_zeros={len(self.zeroset)}, degree={self.degree}, radius={self.radius})"


class ScaledGenerator(Generator):
    """``g_n(z) = g(n z) / n``: zeros at ``X / n`` and ``g_n'(0) = g'(0)``."""

    kind = "scaled"

    def __init__(self, base, n):
        check_positive(n, "n", integer=True)
        self.base = base
        self.n = int(n)

    def _values(self, z):
        g, dg = self.base._values(self.n * z)
        return g / self.n, dg

    def _log_polar(self, z):
        lg, ag = self.base._log_polar(self.n * z)
        return lg - math.log(self.n), ag

    def zeros(self, radius):
        return self.base.zeros(radius * self.n).scaled(1.0 / self.n)

    def __repr__(self):
        return f"ScaledGenerator({self.base!r}, n={self.n})"


def eval_g(gen, z, log=False):
    """Evaluate a generator and its derivative.

    Returns ``(g, g')``; with ``log=True`` returns ``(log|g|, arg g)`` instead,
    which never overflows.  Raises ``GeneratorOverflowError`` if ``g`` or
    ``g'`` leaves float range.
    """
    z, scalar = check_complex_array(z)
    if log:
        lg, ag = gen._log_polar(z)
        return (lg[0], ag[0]) if scalar else (lg, ag)
    with np.errstate(over="ignore", invalid="ignore"):
        g, dg = gen._values(z)
    bad = ~(np.isfinite(g) & np.isfinite(dg))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise GeneratorOverflowError(f"generator overflow at z={z[i]!r}; request log=True")
    return (g[0], dg[0]) if scalar else (g, dg)


def generator_for(zeroset):
    """The natural generator for a zero set: triple-sine for lattices, truncated product otherwise."""
    if zeroset.kind == "triple-lattice":
        return TripleSineGenerator(spacing=zeroset.params["spacing"])
    if zeroset.kind in ("disc-dyadic", "explicit"):
        return ProductGenerator(zeroset)
    raise InvalidParameterError(f"unknown zero-set kind {zeroset.kind!r}")
