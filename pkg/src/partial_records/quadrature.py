"""Adaptive Simpson integration for smooth scalar integrands on an interval."""

from .errors import QuadratureFailure


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=48):
    """Integrate f over [a, b] to absolute tolerance tol.

    Standard interval-halving Simpson with Richardson correction.  Raises
    QuadratureFailure if the refinement depth is exhausted before the local
    error estimate drops below the (subdivided) tolerance.
    """
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, b - a)
    return _refine(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _refine(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth <= 0:
        raise QuadratureFailure(
            f"no convergence on [{a}, {b}]: residual {abs(err) / 15.0:.3e} > {tol:.3e}"
        )
    return (
        _refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + _refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    )
