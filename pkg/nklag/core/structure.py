"""The nearly Kähler structure of S³×S³ in body-frame coordinates.

A tangent vector Z = (pα, qβ) at (p, q) is stored as the pair (α|β) of
imaginary quaternions. In this form g, J, P, Q and G do not depend on the base
point; only `embed` and `pullback` see it.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .quat import embed_im, im_part, imcross, imdot, qconj, qmul
from .types import NKPoint, NKTangent

SQRT3 = np.sqrt(3.0)
G_SCALE = 2.0 / (3.0 * SQRT3)


def g_metric(z: NKTangent, w: NKTangent) -> np.ndarray:
    return (4.0 / 3.0) * (imdot(z.a, w.a) + imdot(z.b, w.b)) - (2.0 / 3.0) * (
        imdot(z.a, w.b) + imdot(w.a, z.b)
    )


def g_norm(z: NKTangent) -> np.ndarray:
    return np.sqrt(g_metric(z, z))


def j_apply(z: NKTangent) -> NKTangent:
    return NKTangent((2.0 * z.b - z.a) / SQRT3, (z.b - 2.0 * z.a) / SQRT3)


def p_apply(z: NKTangent) -> NKTangent:
    return NKTangent(z.b, z.a)


def q_apply(z: NKTangent) -> NKTangent:
    return NKTangent(-z.a, z.b)


def g_tensor(x: NKTangent, y: NKTangent) -> NKTangent:
    """G = ∇̃J for X = (α|β), Y = (γ|δ)."""
    alpha, beta, gamma, delta = x.a, x.b, y.a, y.b
    bg = imcross(beta, gamma)
    ad = imcross(alpha, delta)
    ag = imcross(alpha, gamma)
    bd = imcross(beta, delta)
    return NKTangent(G_SCALE * (bg + ad + ag - 2.0 * bd), G_SCALE * (-ad - bg + 2.0 * ag - bd))


def euclid_correction(x: NKTangent, y: NKTangent) -> NKTangent:
    """∇ᴱ_X Y − ∇̃_X Y = ½(JG(X,PY) + JG(Y,PX))."""
    return 0.5 * (j_apply(g_tensor(x, p_apply(y))) + j_apply(g_tensor(y, p_apply(x))))


def omega_form(x: NKTangent, y: NKTangent) -> np.ndarray:
    """The fundamental 2-form g(JX, Y); it vanishes on Lagrangian tangent spaces."""
    return g_metric(j_apply(x), y)


def embed(at: NKPoint, z: NKTangent, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Ambient pair (U, V) = (pα, qβ)."""
    at.check_unit(tol)
    return qmul(at.p, embed_im(z.a)), qmul(at.q, embed_im(z.b))


def pullback(at: NKPoint, u, v, tol: float | None = None) -> tuple[NKTangent, np.ndarray]:
    """Body-frame tangent of the ambient pair (U, V) and its tangency defect.

    The real parts of p⁻¹U and q⁻¹V are the radial components; they are
    dropped and their magnitude is returned alongside. With `tol` the base
    point must be unit to within it.
    """
    if tol is not None:
        at.check_unit(tol)
    left = qmul(qconj(at.p), u)
    right = qmul(qconj(at.q), v)
    defect = np.maximum(np.abs(left[..., 0]), np.abs(right[..., 0]))
    return NKTangent(im_part(left), im_part(right)), defect


def frame_fields() -> tuple[list[NKTangent], list[NKTangent]]:
    """Body forms of Ẽ₁, Ẽ₂, Ẽ₃ = (pi,0), (pj,0), −(pk,0) and F̃₁, F̃₂, F̃₃."""
    units = np.eye(3) * np.array([1.0, 1.0, -1.0])[:, None]
    zero = np.zeros(3)
    return (
        [NKTangent(row, zero) for row in units],
        [NKTangent(zero, row) for row in units],
    )


def nabla_j_table(kind: str, i: int, j: int) -> NKTangent:
    """(∇̃_X J)Y for frame fields X, Y as tabulated, kind in {EE, EF, FE, FF}."""
    e, f = frame_fields()
    if i == j:
        return NKTangent.zero()
    k = 3 - i - j
    sign = _levi_civita(i, j, k)
    c = -sign * G_SCALE
    match kind:
        case "EE":
            return c * (e[k] + 2.0 * f[k])
        case "EF" | "FE":
            return c * (e[k] - f[k])
        case "FF":
            return c * (2.0 * e[k] + f[k])
    raise DomainError(f"unknown frame pair kind {kind!r}")


def _levi_civita(i: int, j: int, k: int) -> int:
    return int(round(np.linalg.det(np.eye(3)[[i, j, k]])))


def _sup(z: NKTangent | np.ndarray) -> float:
    values = z.as_array() if isinstance(z, NKTangent) else z
    return float(np.max(np.abs(values)))


def identity_residuals(samples: int, seed: int) -> dict[str, float]:
    """Sup residual of each structure identity over seeded random tangents."""
    rng = np.random.default_rng(seed)
    x, y, z = (NKTangent(rng.normal(size=(samples, 3)), rng.normal(size=(samples, 3))) for _ in range(3))
    gxy = g_metric(x, y)
    return {
        "J^2 = -Id": _sup(j_apply(j_apply(x)) + x),
        "g(JX,JY) = g(X,Y)": _sup(g_metric(j_apply(x), j_apply(y)) - gxy),
        "P^2 = Id": _sup(p_apply(p_apply(x)) - x),
        "PJ = -JP": _sup(p_apply(j_apply(x)) + j_apply(p_apply(x))),
        "g(PX,PY) = g(X,Y)": _sup(g_metric(p_apply(x), p_apply(y)) - gxy),
        "g(PX,Y) = g(X,PY)": _sup(g_metric(p_apply(x), y) - g_metric(x, p_apply(y))),
        "Q = (2PJ - J)/sqrt3": _sup(q_apply(x) - (p_apply(j_apply(x)) * 2.0 - j_apply(x)) * (1.0 / SQRT3)),
        "G(X,Y) = -G(Y,X)": _sup(g_tensor(x, y) + g_tensor(y, x)),
        "G(X,JY) = -JG(X,Y)": _sup(g_tensor(x, j_apply(y)) + j_apply(g_tensor(x, y))),
        "g(G(X,Y),Z) = -g(G(X,Z),Y)": _sup(g_metric(g_tensor(x, y), z) + g_metric(g_tensor(x, z), y)),
    }
