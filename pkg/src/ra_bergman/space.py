"""Finite-dimensional models of the weighted real-analytic Bergman space.

The model space is spanned by ``e_mn(z) = z^m (conj(z) g(z))^n`` over a
finite index set.  Basis functions are evaluated in log-polar form and
diagonal-normalised, the weighted Gram matrix is factored by pivoted
Cholesky, and the resulting orthonormal system gives a finite-rank
reproducing kernel.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, solve_triangular
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_array, check_positive
from .exceptions import (
    DegenerateInputError,
    InvalidParameterError,
    NumericalBreakdownError,
    NumericalOverflowError,
)
from .generator import ScaledGenerator, TripleSineGenerator, ZeroSet, generator_for
from .moments import FunctionHandle, as_handle
from .quadrature import GAUSSIAN, PolarGrid, Weight, _evaluate, suggest_radius

DEFAULT_DROP_TOL = 1e-10
_LOG_MAX = 700.0


@dataclass(frozen=True)
class BasisIndex:
    """Ordered ``(m, n)`` pairs, lexicographic in ``(n, m)``; the holomorphic block comes first."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted({(int(m), int(n)) for m, n in self.pairs}, key=lambda p: (p[1], p[0])))
        if not pairs:
            raise InvalidParameterError("empty basis index")
        if any(m < 0 or n < 0 for m, n in pairs):
            raise InvalidParameterError("basis indices must be non-negative")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def cutoff(cls, c, degree_weight=3):
        """All ``(m, n)`` with ``m + degree_weight * n <= c``."""
        check_positive(c, "cutoff", strict=False, integer=True)
        check_positive(degree_weight, "degree_weight", integer=True)
        return cls(tuple((m, n) for n in range(c // degree_weight + 1) for m in range(c - degree_weight * n + 1)))

    @classmethod
    def rectangular(cls, M, N):
        check_positive(M, "M", strict=False, integer=True)
        check_positive(N, "N", strict=False, integer=True)
        return cls(tuple((m, n) for n in range(N + 1) for m in range(M + 1)))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def m(self):
        return np.array([p[0] for p in self.pairs])

    @property
    def n(self):
        return np.array([p[1] for p in self.pairs])

    @property
    def holomorphic(self):
        """Positions of the ``n = 0`` block (a leading slice)."""
        return np.nonzero(self.n == 0)[0]


class Basis:
    """The functions ``e_mn / s_mn`` for an index set, with ``s_mn`` the weighted L^2 norm of ``e_mn``."""

    def __init__(self, generator, index, log_scales=None):
        self.generator = generator
        self.index = index
        self.log_scales = np.zeros(len(index)) if log_scales is None else np.asarray(log_scales, dtype=float)

    def __len__(self):
        return len(self.index)

    def log_raw(self, z):
        """``(log|e_mn(z)|, arg e_mn(z))`` for every basis element, shape ``(k, len(z))``."""
        z = np.asarray(z, dtype=complex).ravel()
        m, n = self.index.m[:, None], self.index.n[:, None]
        with np.errstate(divide="ignore"):
            lz = np.log(np.abs(z))[None, :]
        th = np.angle(z)[None, :]
        if np.any(n > 0):
            lg, ag = self.generator.log_polar(z)
            lg, ag = lg[None, :], ag[None, :]
        else:
            lg = ag = np.zeros_like(lz)
        with np.errstate(invalid="ignore"):
            logabs = np.where(m > 0, m * lz, 0.0) + np.where(n > 0, n * (lz + lg), 0.0)
            phase = m * th + n * (ag - th)
        return logabs, phase

    def evaluate(self, z, normalized=True):
        """Matrix ``E[i, j] = e_j(z_i)``."""
        logabs, phase = self.log_raw(z)
        if normalized:
            logabs = logabs - self.log_scales[:, None]
        if np.any(logabs > _LOG_MAX):
            raise NumericalOverflowError("basis values exceed float range at the requested points")
        return (np.exp(logabs) * np.exp(1j * phase)).T

    def handles(self, normalized=True):
        out = []
        for j, (m, n) in enumerate(self.index):
            out.append(FunctionHandle(lambda z, j=j: self._column(z, j, normalized), f"e_{m}{n}"))
        return out

    def _column(self, z, j, normalized):
        z = np.asarray(z, dtype=complex)
        return self.evaluate(z.ravel(), normalized)[:, j].reshape(z.shape)


def _grid_for(basis, weight, R=None, n_r=160, n_theta=256):
    if R is None:
        R = suggest_radius(lambda z: basis.log_raw(z)[0], weight)
    return PolarGrid(float(R), n_r, n_theta)


def build_basis(gen, M=None, N=None, *, cutoff=None, degree_weight=3, index=None, weight=GAUSSIAN, grid=None):
    """Diagonal-normalised basis ``e_mn = z^m (conj(z) g)^n / ||.||``.

    The index set is ``index`` if given, else the rectangle ``0 <= m <= M,
    0 <= n <= N``, else the skewed cutoff ``m + degree_weight * n <= cutoff``.
    """
    if index is None:
        if M is not None:
            index = BasisIndex.rectangular(M, N or 0)
        elif cutoff is not None:
            index = BasisIndex.cutoff(cutoff, degree_weight)
        else:
            raise InvalidParameterError("give an index, (M, N) or cutoff")
    basis = Basis(gen, index)
    weight = Weight.parse(weight)
    grid = grid or _grid_for(basis, weight)
    logabs, _ = basis.log_raw(grid.nodes.ravel())
    logabs = 2.0 * logabs + weight.log(np.abs(grid.nodes.ravel()))[None, :]
    peak = np.max(logabs, axis=1, keepdims=True)
    aw = grid.area_weights.ravel()
    mass = np.array([np.sum(np.sum((np.exp(row - p) * aw).reshape(grid.nodes.shape), axis=1))
                     for row, p in zip(logabs, peak)])
    basis.log_scales = 0.5 * (peak[:, 0] + np.log(mass))
    return basis


@dataclass(frozen=True)
class GramMatrix:
    matrix: np.ndarray
    log_scales: np.ndarray
    min_eigenvalue: float
    condition: float

    @property
    def size(self):
        return self.matrix.shape[0]

    def unnormalized(self):
        """Gram matrix of the raw ``e_mn`` (undoing the diagonal normalisation)."""
        d = np.exp(self.log_scales)
        return d[:, None] * self.matrix * d[None, :]

    def rank(self, drop_tol=DEFAULT_DROP_TOL):
        ev = np.linalg.eigvalsh(self.matrix)
        return int(np.sum(ev > drop_tol * ev[-1]))


def _weighted_values(basis, grid, weight):
    z = grid.nodes.ravel()
    E = basis.evaluate(z)
    W = grid.area_weights.ravel() * weight(z)
    return E, W


def gram_from_values(E, W):
    """``G[j, k] = sum_i W_i E[i, j] conj(E[i, k])``; fixed contraction order, no BLAS."""
    G = np.einsum("ij,ik->jk", E * W[:, None], np.conj(E), optimize=False)
    return 0.5 * (G + G.conj().T)


def gram(basis, grid=None, w=GAUSSIAN):
    """Weighted Gram matrix of a basis; raises ``NumericalBreakdownError`` if clearly indefinite."""
    w = Weight.parse(w)
    grid = grid or _grid_for(basis, w)
    E, W = _weighted_values(basis, grid, w)
    G = gram_from_values(E, W)
    ev = np.linalg.eigvalsh(G)
    scale = float(np.max(np.abs(ev)))
    if ev[0] < -1e-10 * scale:
        raise NumericalBreakdownError(f"Gram matrix indefinite: min eigenvalue {ev[0]:.3e}", eigenvalues=ev)
    cond = float(ev[-1] / ev[0]) if ev[0] > 0 else math.inf
    return GramMatrix(G, basis.log_scales.copy(), float(ev[0]), cond)


@dataclass(frozen=True)
class KernelRep:
    """Orthonormal functions ``phi = E @ coef`` and the kernel ``K(z, w) = Phi(z) Phi(w)^H``."""

    basis: Basis
    coef: np.ndarray
    pivots: np.ndarray
    dropped: np.ndarray
    weight: Weight
    grid: PolarGrid
    meta: dict = field(default_factory=dict)

    @property
    def rank(self):
        return self.coef.shape[1]

    def features(self, z):
        z, scalar = check_complex_array(z)
        Phi = self.basis.evaluate(z) @ self.coef
        return Phi[0] if scalar else Phi

    def matrix(self, zs, ws):
        """``[K(z_i, w_j)]``."""
        return self.features(np.atleast_1d(zs)) @ self.features(np.atleast_1d(ws)).conj().T

    def diagonal(self, z):
        Phi = self.features(np.atleast_1d(z))
        return np.sum(np.abs(Phi) ** 2, axis=1)


def orthonormalize(G, drop_tol=DEFAULT_DROP_TOL, basis=None, weight=GAUSSIAN, grid=None):
    """Pivoted Cholesky ``G[S, S] = L L^H``; pivots below ``drop_tol`` (relative) are dropped.

    Returns a ``KernelRep`` when ``basis`` is given, else ``(coef, pivots, dropped)``.
    """
    A = np.asarray(getattr(G, "matrix", G), dtype=complex)
    k = A.shape[0]
    dmax = float(np.max(A.diagonal().real))
    if dmax <= 0:
        raise DegenerateInputError("Gram matrix has no positive diagonal entries")
    c, piv, rank, info = lapack.zpstrf(A, tol=drop_tol * dmax, lower=1)
    if info < 0:
        raise NumericalBreakdownError(f"zpstrf failed with info={info}")
    piv = piv - 1
    if rank == 0:
        raise DegenerateInputError("numerical rank 0")
    L = np.tril(c[:rank, :rank])
    inv = solve_triangular(L, np.eye(rank, dtype=complex), lower=True)
    coef = np.zeros((k, rank), dtype=complex)
    coef[piv[:rank], :] = inv.T
    pivots, dropped = piv[:rank].copy(), np.sort(piv[rank:])
    if basis is None:
        return coef, pivots, dropped
    return KernelRep(basis, coef, pivots, dropped, Weight.parse(weight), grid)


def kernel_eval(K, z, w):
    """``K(z, w) = sum_k phi_k(z) conj(phi_k(w))``, elementwise for equal-length arrays."""
    z, sz = check_complex_array(z)
    w, sw = check_complex_array(w)
    out = np.sum(K.features(z) * np.conj(K.features(w)), axis=1)
    return out[0] if sz and sw else out


def fock_kernel(z, w):
    """``exp(z conj(w)) / pi``."""
    z, sz = check_complex_array(z)
    w, sw = check_complex_array(w)
    e = z * np.conj(w)
    if np.any(e.real > 709.0):
        raise NumericalOverflowError("exp(z conj(w)) overflows; |z w| too large")
    out = np.exp(e) / math.pi
    return out[0] if sz and sw else out


def truncated_fock_kernel(z, w, M):
    e = np.asarray(z, dtype=complex) * np.conj(np.asarray(w, dtype=complex))
    term = np.ones_like(e)
    total = np.ones_like(e)
    for m in range(1, M + 1):
        term = term * e / m
        total = total + term
    return total / math.pi


def point_eval_bound(K, z):
    """``sqrt(K(z, z))``: the optimal ``C_z`` with ``|f(z)| <= C_z ||f||`` on the model space."""
    z, scalar = check_complex_array(z)
    out = np.sqrt(np.maximum(K.diagonal(z), 0.0))
    return float(out[0]) if scalar else out


def project(f, K, grid=None, w=None):
    """Orthogonal projection ``T f = sum_k <f, phi_k> phi_k`` onto the model space."""
    f = as_handle(f)
    grid = grid or K.grid
    w = K.weight if w is None else Weight.parse(w)
    z = grid.nodes.ravel()
    W = grid.area_weights.ravel() * w(z)
    Phi = K.basis.evaluate(z) @ K.coef
    fv = _evaluate(f, grid.nodes).ravel()
    coeffs = np.einsum("i,ik->k", fv * W, np.conj(Phi), optimize=False)

    def Tf(zz):
        zz = np.asarray(zz, dtype=complex)
        return (K.features(zz.ravel()) @ coeffs).reshape(zz.shape)

    return FunctionHandle(Tf, f"T({f.label})")


def kernel_table(K, zs, ws):
    """CSV text with columns z_re, z_im, w_re, w_im, K_re, K_im over all pairs."""
    zs, _ = check_complex_array(zs)
    ws, _ = check_complex_array(ws)
    Km = K.matrix(zs, ws)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["z_re", "z_im", "w_re", "w_im", "K_re", "K_im"])
    for i, z in enumerate(zs):
        for j, w in enumerate(ws):
            out.writerow([repr(float(v)) for v in (z.real, z.imag, w.real, w.imag, Km[i, j].real, Km[i, j].imag)])
    return buf.getvalue()


class BergmanKernelModel(TransformerMixin, BaseEstimator):
    """Estimator wrapper around the model space.

    ``fit(X)`` takes the zero set (complex points or a ``ZeroSet``) and builds
    the generator, the normalised basis, the Gram matrix and the kernel.
    With ``X=None`` the ``generator`` parameter is used, defaulting to the
    triple-sine function.  ``transform(Z)`` returns the orthonormal features
    ``Phi(Z)``, so ``transform(Z) @ transform(W).conj().T`` is the kernel.
    """

    def __init__(self, generator=None, cutoff=9, degree_weight=3, max_m=None, max_n=None,
                 weight="gaussian", grid_radius=None, n_r=160, n_theta=256, drop_tol=DEFAULT_DROP_TOL):
        self.generator = generator
        self.cutoff = cutoff
        self.degree_weight = degree_weight
        self.max_m = max_m
        self.max_n = max_n
        self.weight = weight
        self.grid_radius = grid_radius
        self.n_r = n_r
        self.n_theta = n_theta
        self.drop_tol = drop_tol

    def _resolve_generator(self, X):
        if X is not None:
            zs = X if isinstance(X, ZeroSet) else ZeroSet(check_complex_array(X, allow_scalar=False)[0])
            return generator_for(zs)
        return self.generator if self.generator is not None else TripleSineGenerator()

    def fit(self, X=None, y=None):
        check_positive(self.drop_tol, "drop_tol")
        weight = Weight.parse(self.weight)
        gen = self._resolve_generator(X)
        if self.max_m is not None:
            index = BasisIndex.rectangular(self.max_m, self.max_n or 0)
        else:
            index = BasisIndex.cutoff(self.cutoff, self.degree_weight)
        grid = _grid_for(Basis(gen, index), weight, self.grid_radius, self.n_r, self.n_theta)
        basis = build_basis(gen, index=index, weight=weight, grid=grid)
        self.generator_ = gen
        self.basis_ = basis
        self.grid_ = grid
        self.gram_ = gram(basis, grid, weight)
        self.kernel_ = orthonormalize(self.gram_, self.drop_tol, basis, weight, grid)
        self.rank_ = self.kernel_.rank
        self.n_features_out_ = self.rank_
        return self

    def transform(self, X):
        check_is_fitted(self, "kernel_")
        return self.kernel_.features(check_complex_array(X, allow_scalar=False)[0])

    def kernel(self, Z, W):
        check_is_fitted(self, "kernel_")
        return self.kernel_.matrix(Z, W)

    def point_eval_bound(self, Z):
        check_is_fitted(self, "kernel_")
        return point_eval_bound(self.kernel_, Z)

    def project(self, f):
        check_is_fitted(self, "kernel_")
        return project(f, self.kernel_)


def _intersection_dim(mats, cos_tol=1e-8):
    """Dimension of the intersection of column spaces, via principal angles."""
    Q = np.linalg.qr(mats[0])[0]
    for A in mats[1:]:
        B = np.linalg.qr(A)[0]
        U, s, _ = np.linalg.svd(Q.conj().T @ B)
        keep = s > 1.0 - cos_tol
        Q = Q @ U[:, keep]
        if Q.shape[1] == 0:
            break
    return Q.shape[1], Q


def kernel_convergence_experiment(n_list, M=8, N=2, eval_points=None, base=None, weight=GAUSSIAN,
                                  drop_tol=DEFAULT_DROP_TOL, intersection_radius=1.5, seed=0):
    """Compare ``K_n`` for ``X/n`` with the Fock kernel.

    Each row reports the sup over ``eval_points`` pairs of ``|K_n - e^{z conj w}/pi|``
    and its split into the holomorphic-block part (truncated Fock kernel, the
    same for every ``n``) and the rest.  The summary also gives the dimension of
    the intersection of all model spaces, sampled on ``|z| <= intersection_radius``.
    """
    base = base or TripleSineGenerator()
    rng = np.random.default_rng(seed)
    if eval_points is None:
        eval_points = np.sqrt(rng.uniform(0, 1, 16)) * np.exp(2j * math.pi * rng.uniform(0, 1, 16))
    pts = check_complex_array(eval_points)[0]
    probe = intersection_radius * np.sqrt(rng.uniform(0, 1, 240)) * np.exp(2j * math.pi * rng.uniform(0, 1, 240))
    zz, ww = np.meshgrid(pts, pts, indexing="ij")
    fock = fock_kernel(zz.ravel(), ww.ravel()).reshape(zz.shape)
    rows, samples = [], []
    for n in n_list:
        gen = base if n == 1 else ScaledGenerator(base, n)
        row = {"n": int(n)}
        try:
            model = BergmanKernelModel(gen, max_m=M, max_n=N, weight=weight, drop_tol=drop_tol).fit()
        except (NumericalBreakdownError, DegenerateInputError, NumericalOverflowError) as exc:
            row.update(status="breakdown", message=str(exc))
            rows.append(row)
            continue
        hol = model.basis_.index.holomorphic
        Eh = model.basis_.evaluate(pts)[:, hol]
        Gh = model.gram_.matrix[np.ix_(hol, hol)]
        coef_h, _, _ = orthonormalize(Gh, drop_tol)
        Ph = Eh @ coef_h
        K_hol = Ph @ Ph.conj().T
        K_n = model.kernel(pts, pts)
        row.update(
            status="ok",
            rank=int(model.rank_),
            dropped=int(len(model.kernel_.dropped)),
            grid_radius=model.grid_.R,
            sup_total=float(np.max(np.abs(K_n - fock))),
            sup_holomorphic=float(np.max(np.abs(K_hol - fock))),
            sup_nonholomorphic=float(np.max(np.abs(K_n - K_hol))),
        )
        rows.append(row)
        samples.append(model.basis_.evaluate(probe))
    dim = _intersection_dim(samples)[0] if samples else 0
    return {"rows": rows, "intersection_dim": int(dim), "holomorphic_dim": M + 1}
