"""Circle moments, membership in the algebra, holomorphic extension and CR lifts.

A continuous ``f`` belongs to the algebra attached to a discrete set ``X``
when, on every circle centred at a point of ``X``, all negative Fourier
coefficients vanish.  Everything here works from sampled circle spectra.
"""

import csv
import io
import math
import re
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_complex_array, check_positive, check_tolerance
from .exceptions import (
    DegenerateInputError,
    EvaluationError,
    InvalidCurveError,
    InvalidParameterError,
    NotAMemberError,
    OutOfDiscError,
)
from .quadrature import Annulus, Disc, norm_p

DEFAULT_N_THETA = 256
DEFAULT_N_F = 32
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class FunctionHandle:
    """A vectorised complex function of one complex variable."""

    evaluator: object
    label: str = "f"
    series: object = None
    log_abs: object = None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.asarray(self.evaluator(z), dtype=complex)
        return np.broadcast_to(out, z.shape).copy() if out.shape != z.shape else out

    def __repr__(self):
        return f"FunctionHandle({self.label!r})"


def as_handle(f, label=None):
    if isinstance(f, FunctionHandle):
        return f
    if isinstance(f, SeriesRep):
        return f.to_handle()
    if callable(f):
        return FunctionHandle(f, label or getattr(f, "__name__", "f"))
    raise InvalidParameterError(f"cannot interpret {f!r} as a function")


@dataclass(frozen=True)
class SeriesRep:
    """``f(z) = sum_{m,n} a[m, n] z^m (conj(z) g(z))^n`` for a generator ``g``."""

    coefficients: np.ndarray
    generator: object

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        object.__setattr__(self, "coefficients", a)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        zg = np.conj(z) * self.generator(z.ravel()).reshape(z.shape)
        out = np.zeros_like(z)
        M, N = self.coefficients.shape
        for n in range(N - 1, -1, -1):
            inner = np.zeros_like(z)
            for m in range(M - 1, -1, -1):
                inner = inner * z + self.coefficients[m, n]
            out = out * zg + inner
        return out

    def to_handle(self, label="series"):
        return FunctionHandle(self, label, series=self)


def named_function(name, generator=None):
    """Library of test functions addressable by name from the CLI.

    ``zbar_g``, ``zbar``, ``one``, ``g``, ``z^k`` and ``zbar_g^k``.
    """
    need_g = name.startswith("zbar_g") or name == "g"
    if need_g and generator is None:
        raise InvalidParameterError(f"function {name!r} needs a generator")
    if name == "zbar_g":
        return FunctionHandle(lambda z: np.conj(z) * generator(z.ravel()).reshape(z.shape), "zbar_g")
    if name == "zbar":
        return FunctionHandle(np.conj, "zbar")
    if name == "one":
        return FunctionHandle(lambda z: np.ones_like(z), "one")
    if name == "g":
        return FunctionHandle(lambda z: generator(z.ravel()).reshape(z.shape), "g",
                              log_abs=lambda z: generator.log_polar(z)[0])
    m = re.fullmatch(r"z\^(\d+)", name)
    if m:
        k = int(m.group(1))
        return FunctionHandle(lambda z: z**k, name)
    m = re.fullmatch(r"zbar_g\^(\d+)", name)
    if m:
        k = int(m.group(1))
        return FunctionHandle(lambda z: (np.conj(z) * generator(z.ravel()).reshape(z.shape)) ** k, name)
    raise InvalidParameterError(f"unknown function name {name!r}")


@dataclass(frozen=True)
class CircleSpectrum:
    """Discrete Fourier coefficients ``c_n``, ``-n_f <= n <= n_f``, of ``theta -> f(a + r e^{i theta})``."""

    center: complex
    radius: float
    coefficients: np.ndarray
    n_theta: int
    samples: np.ndarray = field(repr=False)

    @property
    def n_f(self):
        return (len(self.coefficients) - 1) // 2

    def c(self, n):
        if abs(n) > self.n_f:
            raise IndexError(f"coefficient {n} outside +-{self.n_f}")
        return self.coefficients[n + self.n_f]

    @property
    def negative(self):
        return self.coefficients[: self.n_f]

    @property
    def nonnegative(self):
        return self.coefficients[self.n_f:]

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.samples)))

    @property
    def max_negative(self):
        return float(np.max(np.abs(self.negative))) if self.n_f else 0.0

    @property
    def relative_negative_mass(self):
        return self.max_negative / max(1.0, self.sup_norm)

    def lp_norm(self, p):
        """Circle L^p norm against normalised arc length ``d theta / 2 pi``."""
        return float(np.mean(np.abs(self.samples) ** p) ** (1.0 / p))

    def is_member(self, tol=DEFAULT_TOL):
        return self.relative_negative_mass <= tol


def circle_moments(f, a, r, n_theta=DEFAULT_N_THETA, n_f=DEFAULT_N_F):
    """``c_n = (1/N) sum_j f(a + r e^{i theta_j}) e^{-i n theta_j}`` for ``|n| <= n_f``."""
    check_positive(r, "r")
    check_positive(n_theta, "n_theta", integer=True)
    check_positive(n_f, "n_f", strict=False, integer=True)
    if n_theta < 4 * n_f + 16:
        raise InvalidParameterError(f"n_theta={n_theta} too small for n_f={n_f} (need >= 4*n_f + 16)")
    f = as_handle(f)
    a = complex(a)
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    z = a + r * np.exp(1j * theta)
    try:
        vals = f(z)
    except Exception as exc:
        raise EvaluationError(f"evaluator {f.label!r} failed on circle |z-{a}|={r}: {exc}") from exc
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise EvaluationError(f"evaluator {f.label!r} non-finite at sample {i} (z={z[i]!r})", index=i)
    fft = np.fft.fft(vals) / n_theta
    coeffs = np.concatenate([fft[n_theta - n_f:], fft[: n_f + 1]])
    return CircleSpectrum(a, float(r), coeffs, n_theta, vals)


@dataclass(frozen=True)
class CircleResult:
    center: complex
    radius: float
    max_negative: float
    sup_norm: float
    relative: float
    verdict: str


@dataclass(frozen=True)
class MembershipReport:
    rows: list
    tol: float

    @property
    def passed(self):
        return all(row.verdict == "PASS" for row in self.rows)

    @property
    def worst(self):
        return max((row.relative for row in self.rows if np.isfinite(row.relative)), default=0.0)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["center_re", "center_im", "radius", "max_neg_coeff", "sup_norm", "verdict"])
        for row in self.rows:
            writer.writerow([repr(row.center.real), repr(row.center.imag), repr(row.radius),
                             repr(row.max_negative), repr(row.sup_norm), row.verdict])
        return buf.getvalue()


def membership_test(f, X, radii, tol=DEFAULT_TOL, n_theta=DEFAULT_N_THETA, n_f=DEFAULT_N_F):
    """Check that ``f`` has no negative moments on each circle ``|z - a| = r``, ``a`` in ``X``."""
    tol = check_tolerance(tol)
    radii = [float(check_positive(r, "radius")) for r in radii]
    centers = getattr(X, "points", None)
    centers = check_complex_array(X if centers is None else centers)[0]
    f = as_handle(f)
    rows = []
    for a in centers:
        for r in radii:
            try:
                spec = circle_moments(f, a, r, n_theta, n_f)
            except EvaluationError:
                rows.append(CircleResult(complex(a), r, math.inf, math.inf, math.inf, "OVERFLOW"))
                continue
            rel = spec.relative_negative_mass
            rows.append(CircleResult(complex(a), r, spec.max_negative, spec.sup_norm, rel,
                                     "PASS" if rel <= tol else "FAIL"))
    return MembershipReport(rows, tol)


def _check_member(spec, tol):
    if spec.relative_negative_mass > tol:
        raise NotAMemberError(
            f"negative Fourier mass {spec.max_negative:.3e} on |z-{spec.center}|={spec.radius} exceeds "
            f"tol*max(1, sup)={tol * max(1.0, spec.sup_norm):.3e}; no holomorphic extension",
            mass=spec.max_negative,
        )


def _extend(spec, z, closed):
    z, scalar = check_complex_array(z)
    zeta = (z - spec.center) / spec.radius
    outside = np.abs(zeta) > 1.0 + 1e-12 if closed else np.abs(zeta) >= 1.0
    if np.any(outside):
        i = int(np.argmax(outside))
        raise OutOfDiscError(f"|z - a| = {abs(z[i] - spec.center)} is not inside radius {spec.radius}")
    out = np.zeros_like(z)
    for c in spec.nonnegative[::-1]:
        out = out * zeta + c
    return out[0] if scalar else out


def holo_extension(spec, z, tol=DEFAULT_TOL, closed=False):
    """Evaluate ``f_r(z) = sum_{n>=0} c_n ((z - a)/r)^n`` inside the circle.

    Refuses (``NotAMemberError``) when the negative coefficients are above
    tolerance rather than silently dropping them.  ``closed=True`` also
    accepts points on the circle itself.
    """
    _check_member(spec, check_tolerance(tol))
    return _extend(spec, z, closed=closed)


def cr_lift(f, a, t, z, tol=DEFAULT_TOL, n_theta=DEFAULT_N_THETA, n_f=DEFAULT_N_F):
    """Value of the lift of ``f`` at the point ``(z, t/(z-a) + conj(a))`` of the leaf with parameter ``t``.

    This is the holomorphic extension from the circle of radius ``sqrt(t)``;
    on that circle it reproduces ``f``.
    """
    check_positive(t, "t")
    spec = circle_moments(f, a, math.sqrt(t), n_theta, n_f)
    _check_member(spec, check_tolerance(tol))
    return _extend(spec, z, closed=True)


def leaf_point(a, t, z):
    """The point ``(z, w)`` of the leaf ``w = t/(z - a) + conj(a)``."""
    return complex(z), t / (complex(z) - a) + np.conj(a)


def slice_ratio(f, a, t, rho, tol=DEFAULT_TOL, n_theta=DEFAULT_N_THETA, n_f=DEFAULT_N_F):
    """Leaf-to-plane L^2 ratio ``int_{|z-a|<=rho} |f_r|^2 dA / int_{|z-a|<=r} |f|^2 dA``, ``r = sqrt(t)``.

    The numerator is exact from the Taylor coefficients (Parseval on discs).
    """
    check_positive(t, "t")
    r = math.sqrt(t)
    if not 0 < rho <= r * (1 + 1e-12):
        raise InvalidParameterError(f"need 0 < rho <= sqrt(t), got rho={rho}, sqrt(t)={r}")
    spec = circle_moments(f, a, r, n_theta, n_f)
    _check_member(spec, check_tolerance(tol))
    n = np.arange(len(spec.nonnegative))
    num = float(np.sum(np.abs(spec.nonnegative) ** 2 * math.pi * rho**2 * (rho / r) ** (2 * n) / (n + 1)))
    den = norm_p(as_handle(f), Disc(r, complex(a)), None, 2.0) ** 2
    if den == 0.0:
        raise DegenerateInputError("f vanishes identically on the disc")
    return num / den


@dataclass(frozen=True)
class TransverseCurve:
    """``t -> (r(t), z(t))`` for ``t`` in ``[0, b]``; ``z(t)`` is an offset from the circle centre.

    Must satisfy ``K t < r(t) - |z(t)| < t / K`` on ``(0, b]`` with ``r`` monotone.
    """

    b: float
    radius: object
    point: object
    K: float

    def __post_init__(self):
        check_positive(self.b, "b")
        if not 0 < self.K < 1:
            raise InvalidParameterError(f"K must lie in (0, 1), got {self.K}")

    @classmethod
    def radial(cls, r0, b, angle=0.0, K=0.4):
        """Moves inward along a ray while the radius grows: ``r = r0 + t``, ``|z| = r0 - t``."""
        if not 0 < b < r0:
            raise InvalidParameterError("need 0 < b < r0")
        u = complex(math.cos(angle), math.sin(angle))
        return cls(float(b), lambda t: r0 + t, lambda t: (r0 - t) * u, K)

    def validate(self, n=256):
        t = np.linspace(0.0, self.b, n + 1)
        r = np.asarray(self.radius(t), dtype=float)
        gap = r - np.abs(np.asarray(self.point(t), dtype=complex))
        if not (np.all(np.diff(r) >= 0) or np.all(np.diff(r) <= 0)):
            raise InvalidCurveError("radius function is not monotone")
        t, gap = t[1:], gap[1:]
        bad = ~((self.K * t < gap) & (gap < t / self.K))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise InvalidCurveError(f"transversality fails at t={t[i]}: r - |z| = {gap[i]}")
        return float(np.min(r)), float(np.max(r))


def transverse_curve_ratio(f, a, curve, p, n_t=32, tol=DEFAULT_TOL, n_theta=DEFAULT_N_THETA, n_f=DEFAULT_N_F):
    """``int_0^b |f_{r(t)}(z(t))| dt`` over the annulus ``L^p`` norm of ``f`` between the extreme radii."""
    if not p > 2:
        raise InvalidParameterError(f"p must exceed 2, got {p}")
    r1, r2 = curve.validate()
    if r2 <= r1:
        raise InvalidCurveError("radius function is constant; the annulus is empty")
    x, w = np.polynomial.legendre.leggauss(n_t)
    ts = 0.5 * curve.b * (x + 1)
    ws = 0.5 * curve.b * w
    total = 0.0
    for t, wt in zip(ts, ws):
        spec = circle_moments(f, a, float(curve.radius(t)), n_theta, n_f)
        _check_member(spec, check_tolerance(tol))
        total += wt * abs(_extend(spec, complex(a) + complex(curve.point(t)), closed=False))
    return total / norm_p(as_handle(f), Annulus(complex(a), r1, r2), None, p)


def moment_functional(f, a, k, r1, r2, n_r=48, n_theta=DEFAULT_N_THETA):
    """``int_{r1}^{r2} c_{-k}(r) r dr`` by Gauss-Legendre in ``r``."""
    x, w = np.polynomial.legendre.leggauss(n_r)
    rs = r1 + 0.5 * (r2 - r1) * (x + 1)
    ws = 0.5 * (r2 - r1) * w
    n_f = max(k, 1)
    return complex(sum(wr * r * circle_moments(f, a, r, max(n_theta, 4 * n_f + 16), n_f).c(-k)
                       for r, wr in zip(rs, ws)))


def holder_constant(r1, r2, p):
    """``C`` with ``|int c_{-k}(r) r dr| <= C ||f||_{L^p(annulus)}``."""
    q = p / (p - 1.0) if p > 1 else math.inf
    area = math.pi * (r2**2 - r1**2)
    return (area ** (1.0 / q) if math.isfinite(q) else 1.0) / (2.0 * math.pi)
