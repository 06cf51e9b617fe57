"""Polar quadrature on discs and annuli with radial weights.

Radial nodes are Gauss-Legendre, angular nodes are equispaced (trapezoid
rule, exact for trigonometric polynomials of degree < n_theta).  All sums
are taken radial-major in a fixed order so that results are reproducible.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._validation import check_positive
from .exceptions import EvaluationError, InvalidParameterError


@dataclass(frozen=True)
class Weight:
    """A strictly positive radial weight ``w(|z|)``.

    ``kind`` is ``"gaussian"`` (``exp(-|z|^2)``), ``"exponential"``
    (``exp(-k|z|)``), ``"none"`` (``1``) or ``"custom"`` with ``log_weight``
    mapping ``|z|`` to ``log w``.
    """

    kind: str = "gaussian"
    k: float = 1.0
    log_weight: object = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "exponential", "none", "custom"):
            raise InvalidParameterError(f"unknown weight kind {self.kind!r}")
        if self.kind == "exponential":
            check_positive(self.k, "k")
        if self.kind == "custom" and not callable(self.log_weight):
            raise InvalidParameterError("custom weight needs a log_weight callable")

    def log(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "gaussian":
            return -(r**2)
        if self.kind == "exponential":
            return -self.k * r
        if self.kind == "none":
            return np.zeros_like(r)
        return np.asarray(self.log_weight(r), dtype=float)

    def __call__(self, z):
        return np.exp(self.log(np.abs(z)))

    @classmethod
    def parse(cls, spec):
        """``"gaussian"``, ``"none"`` or ``"exponential:<k>"``."""
        if isinstance(spec, Weight):
            return spec
        if spec is None or spec == "none":
            return cls("none")
        if spec == "gaussian":
            return cls("gaussian")
        if isinstance(spec, str) and spec.startswith("exponential"):
            _, _, k = spec.partition(":")
            return cls("exponential", float(k) if k else 1.0)
        raise InvalidParameterError(f"cannot parse weight {spec!r}")

    def describe(self):
        return f"exponential:{self.k}" if self.kind == "exponential" else self.kind


GAUSSIAN = Weight("gaussian")
NO_WEIGHT = Weight("none")


@dataclass(frozen=True)
class PolarGrid:
    """Gauss-Legendre in ``r`` on ``[r_min, R]`` times trapezoid in theta, about ``center``."""

    R: float = 8.0
    n_r: int = 160
    n_theta: int = 256
    center: complex = 0j
    r_min: float = 0.0

    def __post_init__(self):
        check_positive(self.R, "R")
        check_positive(self.n_r, "n_r", integer=True)
        check_positive(self.n_theta, "n_theta", integer=True)
        if not 0.0 <= self.r_min < self.R:
            raise InvalidParameterError(f"need 0 <= r_min < R, got r_min={self.r_min}, R={self.R}")

    @cached_property
    def radial(self):
        x, w = np.polynomial.legendre.leggauss(self.n_r)
        half = 0.5 * (self.R - self.r_min)
        return self.r_min + half * (x + 1.0), half * w

    @cached_property
    def theta(self):
        return 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta

    @cached_property
    def nodes(self):
        """Node array of shape (n_r, n_theta)."""
        r, _ = self.radial
        return self.center + r[:, None] * np.exp(1j * self.theta)[None, :]

    @cached_property
    def area_weights(self):
        """``r dr dtheta`` weights, shape (n_r, n_theta)."""
        r, w = self.radial
        return np.repeat((r * w * 2.0 * math.pi / self.n_theta)[:, None], self.n_theta, axis=1)

    def reduce(self, values):
        """Radial-major weighted sum of an (n_r, n_theta) array."""
        return np.sum(np.sum(values * self.area_weights, axis=1))

    def refined(self, factor=2):
        return PolarGrid(self.R, self.n_r * factor, self.n_theta * factor, self.center, self.r_min)

    def to_dict(self):
        return {"R": self.R, "n_r": self.n_r, "n_theta": self.n_theta}

    @classmethod
    def from_dict(cls, data):
        return cls(float(data.get("R", 8.0)), int(data.get("n_r", 160)), int(data.get("n_theta", 256)))


@dataclass(frozen=True)
class Disc:
    R: float
    center: complex = 0j


@dataclass(frozen=True)
class Annulus:
    center: complex
    r1: float
    r2: float


def _evaluate(f, z):
    try:
        vals = np.asarray(f(z.ravel()), dtype=complex)
    except EvaluationError:
        raise
    except Exception as exc:
        raise EvaluationError(f"evaluator failed on quadrature nodes: {exc}") from exc
    if vals.shape != (z.size,):
        vals = np.broadcast_to(vals, (z.size,))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise EvaluationError(f"non-finite value at node {i} (z={z.ravel()[i]!r})", index=i)
    return vals.reshape(z.shape)


def integrate(f, grid=None, w=GAUSSIAN):
    """``sum f(z) w(z) dA`` over the grid nodes."""
    grid = grid or PolarGrid()
    z = grid.nodes
    return grid.reduce(_evaluate(f, z) * w(z))


def inner(f, h, grid=None, w=GAUSSIAN):
    """``<f, h> = int f conj(h) w dA``."""
    grid = grid or PolarGrid()
    z = grid.nodes
    return grid.reduce(_evaluate(f, z) * np.conj(_evaluate(h, z)) * w(z))


def region_grid(region, n_r=160, n_theta=256):
    if isinstance(region, Disc):
        return PolarGrid(region.R, n_r, n_theta, region.center)
    if isinstance(region, Annulus):
        if not 0.0 <= region.r1 < region.r2:
            raise InvalidParameterError(f"annulus needs 0 <= r1 < r2, got ({region.r1}, {region.r2})")
        return PolarGrid(region.r2, n_r, n_theta, region.center, region.r1)
    raise InvalidParameterError(f"unknown region {region!r}")


def norm_p(f, region, w=None, p=2.0, n_r=160, n_theta=256):
    """``(int_region |f|^p w dA)^(1/p)``; ``w=None`` means unweighted."""
    if not p >= 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    grid = region_grid(region, n_r, n_theta)
    z = grid.nodes
    vals = np.abs(_evaluate(f, z)) ** p
    if w is not None:
        vals = vals * w(z)
    return float(grid.reduce(vals).real) ** (1.0 / p)


def suggest_radius(log_abs, w=GAUSSIAN, tail=1e-16, r_max=200.0, step=0.125, n_angles=96):
    """Truncation radius beyond which ``|f|^2 w r`` stays below ``tail`` times its peak.

    ``log_abs`` is a callable returning ``log|f(z)|`` (shape ``(n,)``) or, for
    several functions at once, an array of shape ``(k, n)``; a list of such
    callables is also accepted.  The largest radius over all functions wins.
    """
    r = np.arange(step, r_max + step, step)
    th = 2.0 * math.pi * np.arange(n_angles) / n_angles
    z = r[:, None] * np.exp(1j * th)[None, :]
    cut = math.log(tail)
    fns = log_abs if isinstance(log_abs, (list, tuple)) else [log_abs]
    radius = 1.0
    for fn in fns:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.atleast_2d(np.asarray(fn(z.ravel()), dtype=float))
            profs = np.max(2.0 * vals.reshape(len(vals), *z.shape), axis=2) + w.log(r) + np.log(r)
        for prof in profs:
            peak = int(np.argmax(prof))
            above = np.nonzero(prof[peak:] > prof[peak] + cut)[0]
            radius = max(radius, r[peak + above[-1]] + 1.0)
    if radius >= r_max:
        raise InvalidParameterError("integrand does not decay within r_max; the weight is too weak")
    return float(radius)
