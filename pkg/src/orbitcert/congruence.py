"""Numerical certificate that the orbits of a normal subgroup are congruent.

Given points p, q the conjugator g carries q to p.  If the subalgebra s' is an
ideal, Ad(g) preserves s' and g maps the orbit S'.q onto S'.p; both facts are
measured here: the first as a subspace gap, the second by sampling S'.q,
pushing the samples through g, and bounding their distance to S'.p by an
explicit point of S'.p found by minimisation over exponential coordinates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from . import exact, kernels
from .errors import NumericError, PreconditionError
from .models import MatrixModel, Point, check_group, gram, make_point
from .subalgebra import IdealCheck, Subalgebra

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchOptions:
    multistart: int = 4
    maxfev: int = 4000
    ftarget: float = 1e-11
    xtol: float = 1e-10
    ftol: float = 1e-14
    step: float = 0.25
    spread: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class CongruenceConfig:
    tol_conjugator: float = 1e-9
    tol_normality: float = 1e-9
    tol_orbit: float = 1e-6
    budget: int = 64
    radius: float | None = None  # None: pi for the circle action, 1 otherwise
    bidirectional: bool = True
    search: SearchOptions = field(default_factory=SearchOptions)


@dataclass(frozen=True)
class OrbitSample:
    basepoint: Point
    subalgebra: Subalgebra
    parameters: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    def point(self, i: int) -> Point:
        c = self.points[i]
        return Point(self.basepoint.model, c if self.basepoint.coords.ndim == 2 else c.reshape(-1))


@dataclass(frozen=True)
class OrbitDistance:
    value: float
    converged: bool
    theta: np.ndarray
    nfev: int = 0


@dataclass
class CongruenceReport:
    model: dict
    subalgebra: str
    p: list
    q: list
    conjugator: list
    conjugator_residual: float
    normality_residual: float
    max_distance_to_orbit: float
    samples_used: int
    unconverged: int
    verdict: str
    tolerances: dict
    seed: int
    circumference_error: float | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


# -- charts -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitChart:
    """Float data for exponential coordinates of the second kind over s'.

    The guess arrays let :func:`kernels.peel_coords` recover coordinates of a
    point on the orbit; ``guess`` is False when the subalgebra carries no root
    grading, in which case searches start from zero and random seeds only.
    """

    model: MatrixModel
    sub: Subalgebra
    mats: np.ndarray
    guess: bool
    W: np.ndarray
    Winv: np.ndarray
    omega_pinv: np.ndarray
    a_mats: np.ndarray
    theta0_map: np.ndarray
    T: np.ndarray
    levels: np.ndarray

    def guess_args(self) -> tuple:
        return (self.W, self.Winv, self.omega_pinv, self.a_mats, self.theta0_map, self.T, self.levels, self.mats)


def _empty_chart(model: MatrixModel, sub: Subalgebra, guess: bool) -> OrbitChart:
    d = model.size
    k = sub.dim
    return OrbitChart(
        model, sub, np.ascontiguousarray(sub.float_basis), guess,
        np.eye(d), np.eye(d), np.zeros((0, d)), np.zeros((0, d, d)),
        np.zeros((0, 0)), np.zeros((k, d * d)), np.zeros(k, dtype=np.int64),
    )


def make_chart(model: MatrixModel, sub: Subalgebra, ambient: Subalgebra | None = None) -> OrbitChart:
    if model.compact:
        J = model.complex_structure
        circle = sub.dim == 1 and exact.Echelon([J]).contains(sub.basis[0])
        if circle and sub.basis[0].tolist() != J.tolist():
            circle = False  # the kernel reads angles against J itself
        return _empty_chart(model, sub, circle)
    if sub.degrees is None or ambient is None or ambient.degrees is None or not ambient.contains_span(sub):
        return _empty_chart(model, sub, False)
    if list(sub.degrees) != sorted(sub.degrees):
        return _empty_chart(model, sub, False)

    d = model.size
    a_idx = [i for i, deg in enumerate(ambient.degrees) if deg == 0]
    a_exact = [ambient.basis[i] for i in a_idx]
    a_mats = np.array([exact.to_float(H) for H in a_exact])
    generic = sum((1.0 / (k + 1.7)) * a_mats[k] for k in range(len(a_mats)))
    _, W = np.linalg.eigh(generic)
    Winv = W.T
    omega = np.array([[(Winv @ H @ W)[j, j] for H in a_mats] for j in range(d)])
    omega_pinv = np.linalg.pinv(omega)

    G = np.array([[float(x) for x in row] for row in gram(model, a_exact)])
    A_flat = a_mats.reshape(len(a_mats), -1).T
    k0 = sum(1 for deg in sub.degrees if deg == 0)
    if k0:
        sub0 = sub.float_basis[:k0].reshape(k0, -1).T
        Ap, *_ = np.linalg.lstsq(A_flat, sub0, rcond=None)
        theta0_map = np.linalg.solve(Ap.T @ G @ Ap, Ap.T @ G)
    else:
        theta0_map = np.zeros((0, len(a_mats)))

    k = sub.dim
    T = np.zeros((k, d * d))
    levels = np.array(sub.degrees, dtype=np.int64)
    for lev in sorted(set(sub.degrees) - {0}):
        amb = np.array([exact.to_float(ambient.basis[i]).ravel() for i, deg in enumerate(ambient.degrees) if deg == lev]).T
        Qm, _ = np.linalg.qr(amb)
        P = Qm @ Qm.T
        rows = [i for i, deg in enumerate(sub.degrees) if deg == lev]
        B = sub.float_basis[rows].reshape(len(rows), -1).T
        T[rows] = np.linalg.pinv(B) @ P
    return OrbitChart(
        model, sub, np.ascontiguousarray(sub.float_basis), True,
        np.ascontiguousarray(W), np.ascontiguousarray(Winv), omega_pinv,
        np.ascontiguousarray(a_mats), theta0_map, T, levels,
    )


# -- conjugator and normality -----------------------------------------------------

def _complex(v: np.ndarray) -> np.ndarray:
    m = v.shape[0] // 2
    return v[:m] + 1j * v[m:]


def _householder_to_e1(z: np.ndarray) -> tuple[np.ndarray, float]:
    m = z.shape[0]
    alpha = float(np.angle(z[0])) if abs(z[0]) > 0 else 0.0
    target = np.zeros(m, dtype=complex)
    target[0] = np.exp(1j * alpha)
    w = z - target
    nw = np.vdot(w, w).real
    if nw < 1e-30:
        return np.eye(m, dtype=complex), alpha
    return np.eye(m, dtype=complex) - 2.0 * np.outer(w, w.conj()) / nw, alpha


def transitive_conjugator(model: MatrixModel, p: Point, q: Point) -> np.ndarray:
    """g in the transitive group S with g.q = p.

    Noncompact models use the simply transitive AN-section (Cholesky factor
    for SPD matrices); the Hopf model uses a product of two complex
    Householder reflections, an element of U(n+1).
    """
    if np.array_equal(p.coords, q.coords):
        return np.eye(model.size)
    if model.compact:
        zp, zq = _complex(p.coords), _complex(q.coords)
        Hp, ap = _householder_to_e1(zp)
        Hq, aq = _householder_to_e1(zq)
        D = np.eye(len(zp), dtype=complex)
        D[0, 0] = np.exp(1j * (ap - aq))
        U = Hp @ D @ Hq
        return np.block([[U.real, -U.imag], [U.imag, U.real]])
    try:
        sp = kernels.section(model.kind, p.column())
        sq = kernels.section(model.kind, q.column())
    except Exception as exc:  # LinAlgError from Cholesky, math domain error
        raise NumericError(f"section failed on a corrupted point: {exc}") from exc
    return sp @ np.linalg.inv(sq)


def conjugator_residual(model: MatrixModel, g: np.ndarray, p: Point, q: Point) -> float:
    return float(np.max(np.abs(kernels.act(model.kind, g, q.column()) - p.column())))


def _orthonormal(vectors: np.ndarray) -> np.ndarray:
    U, svals, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(svals > 1e-12 * max(svals.max(initial=0.0), 1.0)))
    return U[:, :rank]


def subspace_gap(A: np.ndarray, B: np.ndarray) -> float:
    """Sine of the largest principal angle between column spans of A and B."""
    Qa, Qb = _orthonormal(A), _orthonormal(B)
    if Qa.shape[1] != Qb.shape[1]:
        return 1.0
    if Qa.shape[1] == 0:
        return 0.0
    R = Qa - Qb @ (Qb.T @ Qa)
    return float(min(1.0, np.linalg.norm(R, 2)))


def ad_normality(model: MatrixModel, g, s_prime: Subalgebra) -> float:
    """Gap between Ad(g)s' and s'."""
    g = np.asarray(exact.to_float(g))
    gi = np.linalg.inv(g)
    F = s_prime.float_basis
    conj = np.array([(g @ X @ gi).ravel() for X in F]).T
    return subspace_gap(conj, F.reshape(len(F), -1).T)


# -- orbits -----------------------------------------------------------------------

def _halton(dim: int, budget: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((budget, 0))
    h = qmc.Halton(d=dim, scramble=False).random(budget)
    # shift by 1/2 so the first point lands on the centre of the cube
    return np.mod(h + 0.5, 1.0)


def default_radius(model: MatrixModel, radius: float | None) -> float:
    if radius is not None:
        return float(radius)
    return math.pi if model.compact else 1.0


def sample_orbit(model: MatrixModel, s_prime: Subalgebra, base: Point, budget: int, radius: float) -> OrbitSample:
    """Deterministic low-discrepancy sample of S'.base; the first sample is base."""
    if budget < 1 or not radius > 0:
        raise ValueError("budget must be >= 1 and radius > 0")
    u = _halton(s_prime.dim, budget)
    params = radius * (2.0 * u - 1.0)
    params[0] = 0.0
    mats = np.ascontiguousarray(s_prime.float_basis)
    pts = kernels.orbit_points(model.kind, params, mats, base.column())
    if model.kind != kernels.KIND_SPD:
        pts = pts.reshape(budget, -1)
    return OrbitSample(base, s_prime, params, pts)


def _col(model: MatrixModel, x: np.ndarray) -> np.ndarray:
    return x if model.kind == kernels.KIND_SPD else x.reshape(-1, 1)


def _search(model, chart: OrbitChart, target_col, base_col, opts: SearchOptions, first: np.ndarray | None):
    k = chart.sub.dim
    scale = model.metric_scale
    if k == 0:
        v = float(kernels.distance(model.kind, base_col, target_col, scale))
        return OrbitDistance(v, True, np.zeros(0), 1)
    rng = np.random.default_rng(opts.seed)
    starts = []
    if first is not None:
        starts.append(first)
    starts.append(np.zeros(k))
    starts.extend(opts.spread * rng.uniform(-1.0, 1.0, size=(opts.multistart, k)))
    best = None
    nfev = 0
    for x0 in starts:
        x, f, ne, conv = kernels.nelder_mead(
            np.ascontiguousarray(x0, dtype=float), opts.step, model.kind, chart.mats, base_col, target_col,
            scale, opts.ftarget, opts.xtol, opts.ftol, opts.maxfev,
        )
        nfev += ne
        if best is None or f < best.value:
            best = OrbitDistance(float(f), bool(conv), x, nfev)
        if f <= opts.ftarget:
            break
    return OrbitDistance(best.value, best.converged, best.theta, nfev)


def distance_to_orbit(
    model: MatrixModel,
    x: Point,
    s_prime: Subalgebra,
    base: Point,
    opts: SearchOptions | None = None,
    chart: OrbitChart | None = None,
) -> OrbitDistance:
    """Upper bound on dist(x, S'.base) from derivative-free multistart search."""
    opts = opts or SearchOptions()
    chart = chart or make_chart(model, s_prime)
    return _batch_distances(model, chart, np.array([x.coords]), base, opts)[0]


def _batch_distances(model, chart: OrbitChart, targets: np.ndarray, base: Point, opts: SearchOptions) -> list[OrbitDistance]:
    base_col = base.column()
    cols = np.ascontiguousarray(np.array([_col(model, t) for t in targets]))
    out: list[OrbitDistance | None] = [None] * len(cols)
    guesses = None
    if chart.guess and chart.sub.dim:
        vals, thetas = kernels.batch_guess_distances(
            model.kind, cols, base_col, model.metric_scale, *chart.guess_args()
        )
        guesses = thetas
        for i, v in enumerate(vals):
            if v <= opts.ftarget:
                out[i] = OrbitDistance(float(v), True, thetas[i], 1)
    for i in range(len(cols)):
        if out[i] is None:
            first = None if guesses is None or not np.all(np.isfinite(guesses[i])) else guesses[i]
            out[i] = _search(model, chart, cols[i], base_col, opts, first)
    return out


def circumference(model: MatrixModel, points: np.ndarray, base: Point) -> float:
    """Closed-polygon length, in geodesic distance, of circle-orbit samples sorted by phase."""
    m = base.coords.shape[0] // 2
    b = base.coords[:m] + 1j * base.coords[m:]
    z = points[:, :m] + 1j * points[:, m:]
    phase = np.angle(z @ b.conj())
    order = np.argsort(phase)
    pts = points[order]
    total = 0.0
    for i in range(len(pts)):
        total += kernels.distance(model.kind, pts[i].reshape(-1, 1), pts[(i + 1) % len(pts)].reshape(-1, 1), model.metric_scale)
    return float(total)


def _certified(certificate: IdealCheck | None, s_prime: Subalgebra) -> None:
    if certificate is None or not isinstance(certificate, IdealCheck):
        raise PreconditionError("verify_congruence needs an ideal certificate from is_ideal")
    if not certificate.holds:
        raise PreconditionError(f"{s_prime.tag} is not certified as an ideal of {certificate.ambient.tag}")
    if certificate.sub is not s_prime and not certificate.sub.same_span(s_prime):
        raise PreconditionError("certificate was issued for a different subalgebra")


def verify_congruence(
    model: MatrixModel,
    s_prime: Subalgebra,
    p: Point,
    q: Point,
    config: CongruenceConfig | None = None,
    *,
    certificate: IdealCheck,
    chart: OrbitChart | None = None,
) -> CongruenceReport:
    """Certify that the conjugator g with g.q = p maps S'.q onto S'.p."""
    _certified(certificate, s_prime)
    config = config or CongruenceConfig()
    if chart is None:
        chart = make_chart(model, s_prime, certificate.ambient)
    p = make_point(model, p.coords)
    q = make_point(model, q.coords)

    g = transitive_conjugator(model, p, q)
    check_group(model, g)
    res = conjugator_residual(model, g, p, q)
    gap = ad_normality(model, g, s_prime)

    passes = [(g, q, p)]
    if config.bidirectional:
        passes.append((np.linalg.inv(g), p, q))
    worst = 0.0
    unconverged = 0
    used = 0
    circ_err = None
    for h, src, dst in passes:
        sample = sample_orbit(model, s_prime, src, config.budget, default_radius(model, config.radius))
        images = np.array([kernels.act(model.kind, h, _col(model, x)) for x in sample.points])
        if model.kind != kernels.KIND_SPD:
            images = images.reshape(len(images), -1)
        results = _batch_distances(model, chart, images, dst, config.search)
        used += len(results)
        for r in results:
            worst = max(worst, r.value)
            if not r.converged:
                unconverged += 1
        if model.compact and chart.guess:
            for pts, centre in ((sample.points, src), (images, dst)):
                err = abs(circumference(model, pts, centre) - 2.0 * math.pi)
                circ_err = err if circ_err is None else max(circ_err, err)

    ok = (
        res <= config.tol_conjugator
        and gap <= config.tol_normality
        and worst <= config.tol_orbit
        and unconverged == 0
        and (circ_err is None or circ_err <= config.tol_orbit)
    )
    return CongruenceReport(
        model=model.descriptor(),
        subalgebra=s_prime.tag,
        p=np.asarray(p.coords).tolist(),
        q=np.asarray(q.coords).tolist(),
        conjugator=g.tolist(),
        conjugator_residual=res,
        normality_residual=gap,
        max_distance_to_orbit=worst,
        samples_used=used,
        unconverged=unconverged,
        verdict="pass" if ok else "fail",
        tolerances={
            "conjugator": config.tol_conjugator,
            "normality": config.tol_normality,
            "orbit": config.tol_orbit,
        },
        seed=config.search.seed,
        circumference_error=circ_err,
    )
