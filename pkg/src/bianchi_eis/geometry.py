"""Geometry over Q(i): the octahedron face B0, 1-form pullbacks, Hodge star,
face quadrature, and assembly of cycle coefficients.

The face B0 is the piece of the unit hemisphere |z|^2 + t^2 = 1 lying over
the planar triangle with vertices 0, (1+i)/2, i/2; its hemisphere vertices
are P2 = ((1+i)/2, sqrt(2)/2) and P3 = (i/2, sqrt(3)/2).  The differential
form machinery works on component triples in the frame

    beta = (-dz/t, dt/t, dzbar/t),

and the pullback under [[a,b],[c,d]] multiplies component rows by

    J = (1/(|r|^2+|s|^2)) [[r^2, -2rs, s^2],
                           [r sbar, r rbar - s sbar, -rbar s],
                           [sbar^2, 2 rbar sbar, rbar^2]],

with r = conj(cz+d), s = conj(c) t.  (Derived from the closed form of the
quaternion action; the representation property J(AB) = J(B)J(A)-ordered is
exercised by tests together with the invariance of the potential form.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cocycles import h_series
from .errors import QuadratureNotConverged
from .fields import Field, OElt
from .hyperbolic import Point3, mobius
from .lattices import DEFAULT_PREC, Lattice, Precision, lattice_of_field

# planar triangle under B0 (exact coordinates)
B0_TRIANGLE = (
    (Fraction(0), Fraction(0)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(0), Fraction(1, 2)),
)


def b0_vertices() -> list[tuple[Fraction, Fraction, Fraction]]:
    """(x, y, t^2) of the three B0 vertices; all satisfy x^2+y^2+t^2 = 1."""
    out = []
    for (x, y) in B0_TRIANGLE:
        out.append((x, y, 1 - x * x - y * y))
    return out


def slash_matrix(M, z: complex, t: float) -> np.ndarray:
    """The 3x3 pullback matrix J(M; (z,t)) acting on beta-component rows."""
    a, b, c, d = (complex(x) for x in M)
    r = (c * z + d).conjugate()
    s = c.conjugate() * t
    rb, sb = r.conjugate(), s.conjugate()
    den = (r * rb + s * sb).real
    return (
        np.array(
            [
                [r * r, -2 * r * s, s * s],
                [r * sb, r * rb - s * sb, -rb * s],
                [sb * sb, 2 * rb * sb, rb * rb],
            ]
        )
        / den
    )


def slash_components(F: np.ndarray, M, z: complex, t: float) -> np.ndarray:
    """(F|M)(z,t) = F(M(z,t)) J(M; (z,t)) for a component row F at M(z,t)."""
    return F @ slash_matrix(M, z, t)


def hodge_star(F: Sequence[complex]) -> tuple[complex, complex, complex]:
    """Coefficients of *(F.beta) on (beta0^beta2, beta1^beta2, beta0^beta1)."""
    f0, f1, f2 = F
    return (
        -0.5j * np.conj(f1),
        1j * np.conj(f0),
        1j * np.conj(f2),
    )


def omega_eval(
    points: Sequence[Point3],
    fld: Field,
    prec: Precision = DEFAULT_PREC,
) -> np.ndarray:
    """Components of the potential 1-form on the beta frame at each point.

    The form is the differential of the harmonic potential, so the
    components are (-t Hz, t Ht, t Hzbar).
    """
    zs = np.array([p.z for p in points], dtype=complex)
    ts = np.array([p.t for p in points], dtype=float)
    _, hz, ht, hzb = h_series(zs, ts, lattice_of_field(fld), prec, gradient=True)
    out = np.empty((len(points), 3), dtype=complex)
    out[:, 0] = -ts * hz
    out[:, 1] = ts * ht
    out[:, 2] = ts * hzb
    return out


# -- 2-form evaluation on the hemisphere --------------------------------------


def _two_form_on_tangents(star_coeffs, z: complex, t: float, tx: float, ty: float):
    """Value of the starred 2-form on the tangent pair of the graph map
    (x, y) -> (x, y, t(x,y))."""
    s02, s12, s01 = star_coeffs
    # covector values on the two tangents X = (1, 0, tx), Y = (0, 1, ty)
    b0x, b0y = -1.0 / t, -1j / t
    b2x, b2y = 1.0 / t, -1j / t
    b1x, b1y = tx / t, ty / t
    w02 = b0x * b2y - b0y * b2x
    w12 = b1x * b2y - b1y * b2x
    w01 = b0x * b1y - b0y * b1x
    return s02 * w02 + s12 * w12 + s01 * w01


# 7-point degree-5 triangle rule (barycentric points, weights sum to 1)
_TRI_W = np.array(
    [0.225]
    + [0.13239415278850618] * 3
    + [0.12593918054482715] * 3
)
_a1, _b1 = 0.05971587178976982, 0.47014206410511505
_a2, _b2 = 0.7974269853530873, 0.10128650732345633
_TRI_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_a1, _b1, _b1],
        [_b1, _a1, _b1],
        [_b1, _b1, _a1],
        [_a2, _b2, _b2],
        [_b2, _a2, _b2],
        [_b2, _b2, _a2],
    ]
)


def _rule_nodes(tris: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes (n_tri*7, 2) and weights for an array of triangles
    given as (n_tri, 3, 2) vertex coordinates."""
    nodes = np.einsum("qb,tbx->tqx", _TRI_BARY, tris)
    v0 = tris[:, 1] - tris[:, 0]
    v1 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * np.abs(v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0])
    weights = np.einsum("t,q->tq", areas, _TRI_W)
    return nodes.reshape(-1, 2), weights.reshape(-1)


def _split4(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.concatenate(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ]
    )


def _adaptive(chunk_value, tris, vals, tol, max_tris, depth=0):
    """Refine the working set until the summed split-vs-parent estimate is
    below tol; accept converged parents, recurse on the rest."""
    children = _split4(tris)
    cvals = chunk_value(children)
    n = len(tris)
    sums = cvals.reshape(4, n).sum(axis=0)
    est = np.abs(sums - vals)
    total_est = float(est.sum())
    if total_est < tol:
        return complex(sums.sum())
    if depth >= 9 or len(children) > max_tris:
        raise QuadratureNotConverged(
            f"face quadrature spread {total_est:.2e} above tolerance {tol:.2e}"
        )
    share = tol / (2 * n)
    keep = est > share
    if not np.any(keep):
        return complex(sums.sum())
    accepted = complex(sums[~keep].sum())
    child_tris = children.reshape(4, n, 3, 2)[:, keep].transpose(1, 0, 2, 3).reshape(-1, 3, 2)
    child_vals = cvals.reshape(4, n)[:, keep].T.reshape(-1)
    tol_left = max(tol - float(est[~keep].sum()), 0.25 * tol)
    return accepted + _adaptive(chunk_value, child_tris, child_vals, tol_left, max_tris, depth + 1)


def integrate_b0(
    form_components: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: float = 1e-8,
    t_floor: float = 0.05,
    max_tris: int = 16384,
) -> complex:
    """Adaptive 7-point quadrature of the starred form over B0.

    `form_components` maps arrays (z, t) on the face to (n, 3) component
    rows of the 1-form being starred and integrated.  Points with
    t < t_floor are excluded; the face itself stays above sqrt(2)/2, so
    the floor only matters for the truncation-extrapolation harness.
    """

    def chunk_value(tris: np.ndarray) -> np.ndarray:
        nodes, weights = _rule_nodes(tris)
        x, y = nodes[:, 0], nodes[:, 1]
        tsq = 1.0 - x * x - y * y
        t = np.sqrt(np.maximum(tsq, 1e-300))
        alive = t >= t_floor
        z = x + 1j * y
        vals = np.zeros(len(nodes), dtype=complex)
        if np.any(alive):
            F = form_components(z[alive], t[alive])
            stars = hodge_star((F[:, 0], F[:, 1], F[:, 2]))
            tx = -x[alive] / t[alive]
            ty = -y[alive] / t[alive]
            vals[alive] = _two_form_on_tangents(stars, z[alive], t[alive], tx, ty)
        return (vals * weights).reshape(-1, 7).sum(axis=1)

    tri0 = np.array([[[float(x), float(y)] for (x, y) in B0_TRIANGLE]])
    tris = _split4(tri0)
    vals = chunk_value(tris)
    return _adaptive(chunk_value, tris, vals, tol, max_tris)


@dataclass(frozen=True)
class FaceIntegral:
    """A face integral with its truncation-extrapolation error estimate."""

    value: complex
    spread: float
    truncated_values: tuple[complex, ...]


def face_integral(
    form_components,
    tol: float = 1e-8,
    t_floors: tuple[float, float, float] = (0.05, 0.025, 0.0125),
) -> FaceIntegral:
    """Quadrature at three truncation heights, Richardson-extrapolated."""
    vals = [integrate_b0(form_components, tol, tf) for tf in t_floors]
    v01 = 2 * vals[1] - vals[0]
    v12 = 2 * vals[2] - vals[1]
    spread = max(abs(v12 - v01), abs(vals[2] - vals[1]))
    return FaceIntegral(value=v12, spread=spread, truncated_values=tuple(vals))


# -- pulled-back potential form and cycle coefficients -------------------------


def mobius_arrays(M, z: np.ndarray, t: np.ndarray):
    a, b, c, d = (complex(x) for x in M)
    r = c * z + d
    denom = np.abs(r) ** 2 + abs(c) ** 2 * t * t
    z2 = ((a * z + b) * np.conj(r) + a * np.conjugate(c) * t * t) / denom
    return z2, t / denom


def pulled_potential_form(fld: Field, M, prec: Precision = DEFAULT_PREC):
    """Component rows of the potential form pulled back by the matrix M."""
    me = tuple(fld.embed(x) for x in M)
    a, b, c, d = me
    lat = lattice_of_field(fld)

    def fc(z: np.ndarray, t: np.ndarray) -> np.ndarray:
        z2, t2 = mobius_arrays(me, z, t)
        _, hz, ht, hzb = h_series(z2, t2, lat, prec, gradient=True)
        F = np.stack([-t2 * hz, t2 * ht, t2 * hzb], axis=1)
        r = np.conj(c * z + d)
        s = np.conj(c) * t
        rb, sb = np.conj(r), np.conj(s)
        den = (r * rb + s * sb).real
        out = np.empty_like(F)
        out[:, 0] = (F[:, 0] * r * r + F[:, 1] * r * sb + F[:, 2] * sb * sb) / den
        out[:, 1] = (
            F[:, 0] * (-2 * r * s) + F[:, 1] * (r * rb - s * sb) + F[:, 2] * (2 * rb * sb)
        ) / den
        out[:, 2] = (F[:, 0] * s * s + F[:, 1] * (-rb * s) + F[:, 2] * rb * rb) / den
        return out

    return fc


def cusp_label(fld: Field, num: OElt, den: OElt) -> str:
    if den == OElt(0, 0):
        return "oo"
    return f"({num})/({den})"


@dataclass(frozen=True)
class CycleCoefficient:
    coset_index: int
    matrix: tuple
    eta: tuple[str, str]
    value: complex
    spread: float


@dataclass(frozen=True)
class CycleCoeffs:
    field_d: int
    level: int
    cusp_index: int
    scaling: tuple
    entries: tuple[CycleCoefficient, ...]


def eisenstein_cycle(
    fld: Field,
    N: int,
    cusp_index: int = 0,
    prec: Precision = DEFAULT_PREC,
    tol: float = 1e-7,
    t_floors: tuple[float, float, float] = (0.05, 0.025, 0.0125),
    threads: int = 1,
) -> CycleCoeffs:
    """Cycle coefficients: the face integral of the starred potential form
    pulled back by (lift of g) * (scaling matrix of the chosen cusp), for
    g over the Gamma1(N) coset representatives.

    Only the translated potential differential is exposed; cycles are
    labelled by the translating coset (the level-one form is fully
    invariant, so the labels, not the values, distinguish translates).
    """
    from concurrent.futures import ThreadPoolExecutor

    from . import cusps as cusps_mod

    if fld.d != 1:
        raise ValueError("cycle assembly is pinned to Q(i)")
    reps = cusps_mod.gamma1_coset_reps(fld, N)
    classes = cusps_mod.cusp_classes(fld, N)
    xi = classes[cusp_index]
    scaling = cusps_mod.sl2_lift(fld, N, xi.representative)

    def work(idx: int) -> CycleCoefficient:
        g = reps[idx]
        M = _mat_mul_o(fld, g, scaling)
        fi = face_integral(pulled_potential_form(fld, M, prec), tol, t_floors)
        a, b, c, d = g
        eta = (cusp_label(fld, b, d), cusp_label(fld, a, c))
        return CycleCoefficient(
            coset_index=idx,
            matrix=g,
            eta=eta,
            value=fi.value,
            spread=fi.spread,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            entries = tuple(ex.map(work, range(len(reps))))
    else:
        entries = tuple(work(i) for i in range(len(reps)))
    return CycleCoeffs(
        field_d=fld.d,
        level=N,
        cusp_index=cusp_index,
        scaling=scaling,
        entries=entries,
    )


def _mat_mul_o(fld: Field, A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (
        fld.add(fld.mul(a, e), fld.mul(b, g)),
        fld.add(fld.mul(a, f), fld.mul(b, h)),
        fld.add(fld.mul(c, e), fld.mul(d, g)),
        fld.add(fld.mul(c, f), fld.mul(d, h)),
    )
