"""Dense complex kernels: scaled-Taylor matrix exponential, cyclic Jacobi
eigensolver and an eigendecomposition-based exponential used as its oracle."""

from __future__ import annotations

import numpy as np

OFFDIAG_RTOL = 1e-13
MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-12
_FLOOR = 1e-250


class ConvergenceError(ArithmeticError):
    pass


def _square(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def expm_ptsim(a, M: int = 20, taylor_order: int = 4) -> np.ndarray:
    """``exp(a)`` by the precise time-step integration method.

    ``a`` is scaled by ``2**-M``; the increment ``T = exp(a / 2**M) - I`` is
    approximated by its truncated Taylor series and then squared up ``M``
    times through ``T <- 2T + T @ T``. The identity is only added at the end,
    so the small increment is never swamped by the unit diagonal.
    """
    a = _square(a)
    if M < 0:
        raise ValueError("M must be non-negative")
    if taylor_order < 1:
        raise ValueError("taylor_order must be at least 1")
    a = np.asarray(a, dtype=complex)
    scaled = a * 2.0 ** (-M)

    t = scaled.copy()
    term = scaled
    for j in range(2, taylor_order + 1):
        term = term @ scaled / j
        t += term
    for _ in range(M):
        t = 2.0 * t + t @ t
    return np.eye(a.shape[-1], dtype=complex) + t


def hermitian_defect(h) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))), initial=0.0))


def _check_hermitian(h: np.ndarray, tol: float) -> None:
    # tolerance is relative to the matrix scale (entries can be ~1e9)
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    defect = hermitian_defect(h)
    if defect > tol * scale:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")


def eigvals_hermitian(
    h,
    vectors: bool = False,
    rtol: float = OFFDIAG_RTOL,
    max_sweeps: int = MAX_SWEEPS,
):
    """Eigenvalues of Hermitian matrices by cyclic complex Jacobi rotations.

    Accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``; the stack
    is rotated in lockstep. Sweeps stop once every off-diagonal element is
    below ``rtol`` times the Frobenius norm of its matrix.

    Returns
    -------
    w : ndarray
        Ascending real eigenvalues, shape ``(..., n)``.
    v : ndarray, optional
        Unitary eigenvector matrix (columns), returned when ``vectors``.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    h = _square(h)
    _check_hermitian(h, HERMITIAN_TOL)
    a = np.array(h, dtype=complex)
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    n = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, n, n))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if vectors else None

    limit = np.maximum(rtol * np.linalg.norm(a, axis=(-2, -1)), _FLOOR)
    # elements this far under the stopping limit are not worth rotating
    skip = 1e-3 * limit
    offdiag = ~np.eye(n, dtype=bool)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]

    def converged() -> bool:
        return n < 2 or bool(np.all(np.max(np.abs(a[:, offdiag]), axis=-1) <= limit))

    for _ in range(max_sweeps):
        if converged():
            break
        for p, q in pairs:
            apq = a[:, p, q]
            mag = np.abs(apq)
            active = mag > skip
            if not active.any():
                continue
            safe = np.where(active, mag, 1.0)
            phase = np.where(active, apq / safe, 1.0)
            app = a[:, p, p].real
            aqq = a[:, q, q].real
            with np.errstate(over="ignore"):
                tau = (aqq - app) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # J = diag-phase * real rotation; columns p, q then rows p, q.
            jpp = c
            jpq = s
            jqp = -s * np.conj(phase)
            jqq = c * np.conj(phase)

            cp = a[:, :, p].copy()
            cq = a[:, :, q]
            a[:, :, p] = cp * jpp[:, None] + cq * jqp[:, None]
            a[:, :, q] = cp * jpq[:, None] + cq * jqq[:, None]
            rp = a[:, p, :].copy()
            rq = a[:, q, :]
            a[:, p, :] = rp * jpp[:, None] + rq * np.conj(jqp)[:, None]
            a[:, q, :] = rp * jpq[:, None] + rq * np.conj(jqq)[:, None]
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            a[:, p, p] = a[:, p, p].real
            a[:, q, q] = a[:, q, q].real
            if vectors:
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = vp * jpp[:, None] + vq * jqp[:, None]
                v[:, :, q] = vp * jpq[:, None] + vq * jqq[:, None]
    else:
        if not converged():
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps"
            )

    w = np.diagonal(a, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(batch + (n,))
    if not vectors:
        return w
    v = np.take_along_axis(v, order[:, None, :], axis=-1).reshape(batch + (n, n))
    return w, v


def expm_oracle(h, scale: complex) -> np.ndarray:
    """``exp(scale * h)`` for Hermitian ``h`` via its eigendecomposition."""
    h = _square(h)
    w, v = eigvals_hermitian(h, vectors=True)
    return (v * np.exp(scale * w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def unitarity_defect(u) -> float:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.linalg.norm(np.conj(u.T) @ u - eye))
