"""Extrinsic and intrinsic geometry of orbits of subgroups of the solvable group S.

Because S acts simply transitively on M, an orbit S'.o is the subgroup S'
itself carrying a left-invariant metric.  Everything below is computed from two
inputs: the Gram matrix of the induced metric on a basis and the structure
constants in that basis.  The exact layer ends at the Gram matrix; the
orthonormalisation and curvature are double precision.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import exact, kernels
from .errors import ArgumentError, InternalError, UnsupportedModelError
from .models import MatrixModel, inner, p_projection
from .subalgebra import Subalgebra

FLAT_TOL = 1e-10


def induced_metric(model: MatrixModel, s_sub: Subalgebra, ambient: Subalgebra | None = None) -> list:
    """Exact Gram matrix <P_p b_i, P_p b_j> of the orbit metric at o."""
    if ambient is not None and not ambient.contains_span(s_sub):
        raise ArgumentError(f"{s_sub.tag} is not contained in {ambient.tag}")
    if model.compact:
        raise UnsupportedModelError("the orbit map at o is not injective on u(n+1)")
    proj = [p_projection(model, X) for X in s_sub.basis]
    return [[inner(model, A, B) for B in proj] for A in proj]


def float_gram(gram) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in gram], dtype=float)


def float_constants(C) -> np.ndarray:
    d = len(C)
    return np.array([[[float(C[i][j][k]) for k in range(d)] for j in range(d)] for i in range(d)], dtype=float).reshape(d, d, d)


def levi_civita(gram, brackets) -> np.ndarray:
    """Gamma[i, j, m] with nabla_{e_i} e_j = sum_m Gamma[i, j, m] e_m.

    Koszul formula for left-invariant fields:
    2 <nabla_i e_j, e_l> = <[e_i, e_j], e_l> - <[e_j, e_l], e_i> + <[e_l, e_i], e_j>.
    """
    G = np.asarray(gram, dtype=float)
    C = np.asarray(brackets, dtype=float)
    d = G.shape[0]
    if d == 0:
        return np.zeros((0, 0, 0))
    c = np.einsum("ijk,kl->ijl", C, G)  # c[i,j,l] = <[e_i, e_j], e_l>
    K = 0.5 * (c - np.transpose(c, (2, 0, 1)) + np.transpose(c, (1, 2, 0)))
    try:
        Ginv = np.linalg.inv(G)
    except np.linalg.LinAlgError as exc:
        raise InternalError("singular Gram matrix") from exc
    return np.einsum("ijl,lm->ijm", K, Ginv)


def torsion_residual(Gamma: np.ndarray, C: np.ndarray) -> float:
    if Gamma.size == 0:
        return 0.0
    return float(np.max(np.abs(Gamma - np.transpose(Gamma, (1, 0, 2)) - C)))


def compatibility_residual(Gamma: np.ndarray, G: np.ndarray) -> float:
    if Gamma.size == 0:
        return 0.0
    low = np.einsum("ijm,ml->ijl", Gamma, G)
    return float(np.max(np.abs(low + np.transpose(low, (0, 2, 1)))))


def curvature(Gamma: np.ndarray, C: np.ndarray) -> np.ndarray:
    """R[i, j] as the matrix of R(e_i, e_j) acting on frame coefficients."""
    d = Gamma.shape[0]
    A = np.transpose(Gamma, (0, 2, 1))  # A[i][m, k] = Gamma[i, k, m]
    R = np.zeros((d, d, d, d))
    for i in range(d):
        for j in range(d):
            R[i, j] = A[i] @ A[j] - A[j] @ A[i] - np.einsum("m,mab->ab", C[i, j], A)
    return R


def ricci(R: np.ndarray) -> np.ndarray:
    # Ric(e_j, e_k) = trace of X -> R(X, e_j) e_k
    return np.einsum("ijik->jk", R) if R.size else np.zeros((0, 0))


def antisymmetry_residual(R: np.ndarray) -> float:
    if R.size == 0:
        return 0.0
    return float(np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3)))))


def bianchi_residual(R: np.ndarray) -> float:
    """max |R(X,Y)Z + R(Y,Z)X + R(Z,X)Y| over frame triples."""
    if R.size == 0:
        return 0.0
    # R[i, j][:, k] is R(e_i, e_j) e_k
    S = (
        np.einsum("ijmk->ijkm", R)
        + np.einsum("jkmi->ijkm", R)
        + np.einsum("kimj->ijkm", R)
    )
    return float(np.max(np.abs(S)))


def orthonormal_frame(G: np.ndarray) -> np.ndarray:
    """Columns form a G-orthonormal basis (inverse transpose Cholesky factor)."""
    L = np.linalg.cholesky(G)
    return np.linalg.inv(L).T


@dataclass(frozen=True)
class EinsteinFit:
    ricci_matrix: np.ndarray
    constant: float
    residual: float
    flat: bool


def einstein_fit(Ric: np.ndarray, G: np.ndarray) -> EinsteinFit:
    """Least-squares Ric = c g in an orthonormal frame.

    The residual is relative to |Ric|; when |Ric| <= FLAT_TOL the constant is
    reported as 0 with the flat flag and the residual is the absolute |Ric|.
    """
    if Ric.size == 0:
        return EinsteinFit(Ric, 0.0, 0.0, True)
    E = orthonormal_frame(G)
    Ron = E.T @ Ric @ E
    Ron = 0.5 * (Ron + Ron.T)
    norm = float(np.linalg.norm(Ron))
    if norm <= FLAT_TOL:
        return EinsteinFit(Ron, 0.0, norm, True)
    c = float(np.trace(Ron)) / Ron.shape[0]
    res = float(np.linalg.norm(Ron - c * np.eye(Ron.shape[0]))) / norm
    return EinsteinFit(Ron, c, min(res, 1.0), False)


def ricci_induced(model: MatrixModel, s_sub: Subalgebra) -> EinsteinFit:
    """Intrinsic Ricci tensor of the orbit, from s_sub's own brackets."""
    G = float_gram(induced_metric(model, s_sub))
    C = float_constants(s_sub.structure_constants())
    Gamma = levi_civita(G, C)
    return einstein_fit(ricci(curvature(Gamma, C)), G)


def mean_curvature(model: MatrixModel, s_phi: Subalgebra, ambient: Subalgebra) -> tuple[np.ndarray, float]:
    """Mean curvature vector of S'.o in M, in ambient-basis coordinates, and its norm."""
    if not ambient.contains_span(s_phi):
        raise ArgumentError(f"{s_phi.tag} is not contained in {ambient.tag}")
    G = float_gram(induced_metric(model, ambient))
    C = float_constants(ambient.structure_constants())
    Gamma = levi_civita(G, C)
    U = np.array([[float(x) for x in ambient.coords(X)] for X in s_phi.basis]).reshape(s_phi.dim, ambient.dim)
    if s_phi.dim == 0:
        return np.zeros(ambient.dim), 0.0
    Gs = U @ G @ U.T
    frame = (U.T @ orthonormal_frame(Gs)).T  # rows: orthonormal tangent vectors in ambient coords
    H = np.zeros(ambient.dim)
    for u in frame:
        H += np.einsum("i,j,ijm->m", u, u, Gamma)
    # remove the tangential part: P = F^T F G with F the orthonormal rows
    H = H - frame.T @ (frame @ G @ H)
    norm = float(np.sqrt(max(H @ G @ H, 0.0)))
    return H, norm


@dataclass
class GeometryReport:
    model: dict
    subalgebra: str
    phi: list
    induced_gram: list
    mean_curvature_norm: float
    ricci_matrix: list
    einstein_constant: float
    einstein_residual: float
    flat: bool
    verdict: str
    tolerances: dict

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


def geometry_report(
    model: MatrixModel,
    s_phi: Subalgebra,
    ambient: Subalgebra,
    tol_mean: float = 1e-9,
    tol_einstein: float = 1e-7,
) -> GeometryReport:
    gram = induced_metric(model, s_phi, ambient)
    _, hn = mean_curvature(model, s_phi, ambient)
    fit = ricci_induced(model, s_phi)
    ok = hn <= tol_mean and (fit.flat or fit.residual <= tol_einstein)
    return GeometryReport(
        model=model.descriptor(),
        subalgebra=s_phi.tag,
        phi=list(s_phi.params.get("phi", ())),
        induced_gram=[[exact.fmt(x) for x in row] for row in gram],
        mean_curvature_norm=hn,
        ricci_matrix=fit.ricci_matrix.tolist(),
        einstein_constant=fit.constant,
        einstein_residual=fit.residual,
        flat=fit.flat,
        verdict="pass" if ok else "fail",
        tolerances={"mean_curvature": tol_mean, "einstein": tol_einstein},
    )


# -- finite-difference validation of the connection ------------------------------

def _sym_sqrt(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, V = np.linalg.eigh(x)
    return (V * np.sqrt(w)) @ V.T, (V / np.sqrt(w)) @ V.T


def model_geodesic(model: MatrixModel, x: np.ndarray, v: np.ndarray):
    """Closed-form geodesic t -> gamma(t) of M through x with velocity v."""
    if model.kind == kernels.KIND_SPD:
        r, ri = _sym_sqrt(x)
        w, V = np.linalg.eigh(ri @ v @ ri)

        def gamma(t: float) -> np.ndarray:
            return r @ ((V * np.exp(t * w)) @ V.T) @ r

        return gamma
    if model.kind == kernels.KIND_HYPERBOLOID:
        x = x.reshape(-1)
        J = np.ones(len(x))
        J[0] = -1.0
        v = v.reshape(-1) + (x * J) @ v.reshape(-1) * x  # J-orthogonal to x
        speed = np.sqrt(v * J @ v)

        def gamma(t: float) -> np.ndarray:
            return (np.cosh(speed * t) * x + np.sinh(speed * t) * v / speed).reshape(-1, 1)

        return gamma
    raise UnsupportedModelError("geodesic check needs a noncompact model")


def geodesic_residual(
    model: MatrixModel,
    s: Subalgebra,
    x: np.ndarray,
    v: np.ndarray,
    t: float = 0.3,
    h: float = 1e-4,
    Gamma: np.ndarray | None = None,
) -> float:
    """Residual of xi' + Gamma(xi, xi) = 0 along a closed-form geodesic.

    The geodesic is pulled back to S through the section, xi = s^{-1} s' is
    its left-invariant velocity, and both derivatives are central differences.
    ``Gamma`` defaults to the Levi-Civita connection of the induced metric on s.
    """
    gamma = model_geodesic(model, x, v)
    B = s.float_basis.reshape(s.dim, -1).T
    if Gamma is None:
        G = float_gram(induced_metric(model, s))
        Gamma = levi_civita(G, float_constants(s.structure_constants()))

    def sec(u: float) -> np.ndarray:
        return kernels.section(model.kind, np.ascontiguousarray(gamma(u)))

    def xi(u: float) -> np.ndarray:
        ds = (sec(u + h) - sec(u - h)) / (2 * h)
        Y = np.linalg.solve(sec(u), ds)
        return np.linalg.lstsq(B, Y.ravel(), rcond=None)[0]

    x0 = xi(t)
    dxi = (xi(t + h) - xi(t - h)) / (2 * h)
    r = dxi + np.einsum("i,j,ijm->m", x0, x0, Gamma)
    return float(np.max(np.abs(r)) / max(1.0, float(np.max(np.abs(x0))) ** 2))
