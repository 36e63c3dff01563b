"""Densities on [0, M]: built-in families, tabulated input, and sampling.

Every density carries vectorized pdf/cdf/inverse_cdf callables plus, when the
family is rational, exact Fraction-valued pdf/cdf hooks used by the discrete
approximation layer.  The smoothness bound C >= max(sup|f|, sup|f'|) drives
the O(1/m) discretization error guarantee; estimated bounds (tabulated input,
finite differences) are flagged as such.

Support always starts at 0.  pdf evaluates to 0 outside [0, M] and cdf clips
to [0, 1], so grid scans may safely step slightly past the support.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import BadParams, InversionFailure, UnknownFamily
from .quadrature import adaptive_simpson

TOL_ENDPOINT = 1e-10
TOL_NORMALIZATION = 1e-8
TOL_ROUNDTRIP = 1e-8

BUILTIN_FAMILIES = (
    "uniform01",
    "power(k)",
    "smoothstep",
    "triangular",
    "truncated_ramp(cap)",
)


@dataclass(frozen=True)
class DensitySpec:
    """A continuous density on [0, support_upper] (inf for unbounded tails).

    pdf/cdf/inverse_cdf accept floats or numpy arrays.  pdf_fraction and
    cdf_fraction, when present, map a Fraction in [0, M] to an exact Fraction
    value; the discrete layer uses them to stay in rational arithmetic.
    """

    name: str
    support_upper: float
    pdf: Callable
    cdf: Callable
    inverse_cdf: Callable
    smoothness_bound: float | None = None
    smoothness_is_estimate: bool = False
    pdf_fraction: Callable | None = None
    cdf_fraction: Callable | None = None
    # interior points where the pdf loses smoothness; quadrature splits here
    breakpoints: tuple = ()

    @property
    def bounded(self):
        return math.isfinite(self.support_upper)

    def __repr__(self):
        return f"DensitySpec({self.name!r})"


def _masked(upper, inside):
    """Wrap an inside-the-support formula: 0 outside [0, upper]."""

    def pdf(x):
        x = np.asarray(x, dtype=float)
        ok = (x >= 0.0) & (x <= upper)
        safe = np.where(ok, x, 0.0)
        return np.where(ok, inside(safe), 0.0)

    return pdf


def _clipped_cdf(upper, inside):
    def cdf(x):
        x = np.asarray(x, dtype=float)
        clipped = np.clip(x, 0.0, upper)
        return np.clip(inside(clipped), 0.0, 1.0)

    return cdf


def uniform01():
    return DensitySpec(
        name="uniform01",
        support_upper=1.0,
        pdf=_masked(1.0, lambda x: np.ones_like(x)),
        cdf=_clipped_cdf(1.0, lambda x: x),
        inverse_cdf=lambda u: np.clip(np.asarray(u, dtype=float), 0.0, 1.0),
        smoothness_bound=1.0,
        pdf_fraction=lambda x: Fraction(1),
        cdf_fraction=lambda x: Fraction(x),
    )


def power_density(k):
    """f(x) = k x^(k-1) on [0, 1], F(x) = x^k.  Needs k >= 1."""
    k_frac = Fraction(k)
    if k_frac < 1:
        raise BadParams(f"power needs k >= 1, got {k}")
    kf = float(k_frac)
    if k_frac == 1:
        return uniform01()

    # sup|f| = k at x=1; f' = k(k-1)x^(k-2) is bounded only for k >= 2
    if k_frac >= 2:
        bound = max(kf, kf * (kf - 1.0))
    else:
        bound = None

    exact_pdf = exact_cdf = None
    if k_frac.denominator == 1:
        ki = k_frac.numerator
        exact_pdf = lambda x: ki * Fraction(x) ** (ki - 1)
        exact_cdf = lambda x: Fraction(x) ** ki

    return DensitySpec(
        name=f"power({k_frac.numerator})" if k_frac.denominator == 1 else f"power({kf})",
        support_upper=1.0,
        pdf=_masked(1.0, lambda x: kf * np.power(x, kf - 1.0)),
        cdf=_clipped_cdf(1.0, lambda x: np.power(x, kf)),
        inverse_cdf=lambda u: np.power(np.clip(np.asarray(u, dtype=float), 0.0, 1.0), 1.0 / kf),
        smoothness_bound=bound,
        pdf_fraction=exact_pdf,
        cdf_fraction=exact_cdf,
    )


def smoothstep_density():
    """f(x) = 6x(1-x) on [0, 1], F(x) = 3x^2 - 2x^3."""

    def inverse(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        # F(x) = u  <=>  x = 1/2 - sin(arcsin(1 - 2u)/3)
        return 0.5 - np.sin(np.arcsin(1.0 - 2.0 * u) / 3.0)

    return DensitySpec(
        name="smoothstep",
        support_upper=1.0,
        pdf=_masked(1.0, lambda x: 6.0 * x * (1.0 - x)),
        cdf=_clipped_cdf(1.0, lambda x: x * x * (3.0 - 2.0 * x)),
        inverse_cdf=inverse,
        smoothness_bound=6.0,
        pdf_fraction=lambda x: 6 * Fraction(x) * (1 - Fraction(x)),
        cdf_fraction=lambda x: Fraction(x) ** 2 * (3 - 2 * Fraction(x)),
    )


def triangular_density():
    """Symmetric triangle on [0, 1] peaking at 1/2."""

    def pdf_inside(x):
        return np.where(x <= 0.5, 4.0 * x, 4.0 * (1.0 - x))

    def cdf_inside(x):
        return np.where(x <= 0.5, 2.0 * x * x, 1.0 - 2.0 * (1.0 - x) ** 2)

    def inverse(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        lo = np.sqrt(np.maximum(u, 0.0) / 2.0)
        hi = 1.0 - np.sqrt(np.maximum(1.0 - u, 0.0) / 2.0)
        return np.where(u <= 0.5, lo, hi)

    half = Fraction(1, 2)

    def exact_pdf(x):
        x = Fraction(x)
        return 4 * x if x <= half else 4 * (1 - x)

    def exact_cdf(x):
        x = Fraction(x)
        return 2 * x * x if x <= half else 1 - 2 * (1 - x) ** 2

    return DensitySpec(
        name="triangular",
        support_upper=1.0,
        pdf=_masked(1.0, pdf_inside),
        cdf=_clipped_cdf(1.0, cdf_inside),
        inverse_cdf=inverse,
        smoothness_bound=4.0,
        pdf_fraction=exact_pdf,
        cdf_fraction=exact_cdf,
        breakpoints=(0.5,),
    )


def truncated_ramp_density(cap=Fraction(1, 2)):
    """f(x) proportional to min(x, cap) on [0, 1].  Needs 0 < cap <= 1.

    Normalizer Z = cap - cap^2/2.  Continuous but with a kink at x = cap, so
    the derivative bound uses the one-sided slopes.
    """
    cap_frac = Fraction(cap)
    if not 0 < cap_frac <= 1:
        raise BadParams(f"truncated_ramp needs 0 < cap <= 1, got {cap}")
    z_frac = cap_frac - cap_frac * cap_frac / 2
    capf, zf = float(cap_frac), float(z_frac)
    u_knee = float(cap_frac * cap_frac / 2 / z_frac)

    def pdf_inside(x):
        return np.minimum(x, capf) / zf

    def cdf_inside(x):
        ramp = x * x / 2.0
        flat = capf * capf / 2.0 + capf * (x - capf)
        return np.where(x <= capf, ramp, flat) / zf

    def inverse(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        lo = np.sqrt(np.maximum(2.0 * zf * u, 0.0))
        hi = capf / 2.0 + zf * u / capf
        return np.where(u <= u_knee, lo, hi)

    def exact_pdf(x):
        x = Fraction(x)
        return min(x, cap_frac) / z_frac

    def exact_cdf(x):
        x = Fraction(x)
        if x <= cap_frac:
            return x * x / 2 / z_frac
        return (cap_frac * cap_frac / 2 + cap_frac * (x - cap_frac)) / z_frac

    return DensitySpec(
        name=f"truncated_ramp({cap_frac.numerator}/{cap_frac.denominator})"
        if cap_frac.denominator > 1
        else f"truncated_ramp({cap_frac.numerator})",
        support_upper=1.0,
        pdf=_masked(1.0, pdf_inside),
        cdf=_clipped_cdf(1.0, cdf_inside),
        inverse_cdf=inverse,
        smoothness_bound=max(1.0 / zf, capf / zf),
        pdf_fraction=exact_pdf,
        cdf_fraction=exact_cdf,
        breakpoints=(capf,) if capf < 1.0 else (),
    )


_NAME_RE = re.compile(r"^([a-z][a-z0-9_]*)(?:\((.*)\))?$")


def builtin(name):
    """Resolve a built-in density by name, e.g. 'uniform01' or 'power(2)'."""
    match = _NAME_RE.match(name.strip())
    if match is None:
        raise UnknownFamily(f"cannot parse density name {name!r}")
    family, argstr = match.group(1), match.group(2)
    args = []
    if argstr is not None and argstr.strip():
        for piece in argstr.split(","):
            try:
                args.append(Fraction(piece.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise BadParams(f"bad parameter {piece.strip()!r} in {name!r}") from exc

    if family == "uniform01":
        if args:
            raise BadParams("uniform01 takes no parameters")
        return uniform01()
    if family == "power":
        if len(args) != 1:
            raise BadParams("power takes exactly one parameter k")
        return power_density(args[0])
    if family == "smoothstep":
        if args:
            raise BadParams("smoothstep takes no parameters")
        return smoothstep_density()
    if family == "triangular":
        if args:
            raise BadParams("triangular takes no parameters")
        return triangular_density()
    if family == "truncated_ramp":
        if len(args) > 1:
            raise BadParams("truncated_ramp takes at most one parameter cap")
        return truncated_ramp_density(args[0]) if args else truncated_ramp_density()
    raise UnknownFamily(
        f"unknown density family {family!r}; built-ins: {', '.join(BUILTIN_FAMILIES)}"
    )


def sample(spec, rng, count):
    """Draw count i.i.d. values by inverse transform from rng.random()."""
    count = int(count)
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    if count == 0:
        return np.empty(0, dtype=float)
    u = rng.random(count)
    return np.asarray(spec.inverse_cdf(u), dtype=float)


def _bisect_inverse(cdf, upper):
    def inverse(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        lo = np.zeros_like(u)
        hi = np.full_like(u, upper)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = np.asarray(cdf(mid)) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        x = 0.5 * (lo + hi)
        gap = np.max(np.abs(np.asarray(cdf(x)) - u))
        if gap > 1e-9:
            raise InversionFailure(f"bisection residual {gap:.3e} exceeds 1e-9")
        return x[0] if scalar else x

    return inverse


def tabulated_density(xs, fs, name="tabulated"):
    """Build a density from samples (x_i, f(x_i)) by monotone cubic interpolation.

    Grid must start at 0 and increase strictly; values must be nonnegative
    with positive total mass.  The interpolant is renormalized so its exact
    integral is 1, the cdf is its antiderivative, and the inverse is solved
    by bisection.  The smoothness bound is a finite-difference estimate and
    is flagged as such.
    """
    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 3:
        raise BadParams("need matching 1-d arrays with at least 3 points")
    if xs[0] != 0.0:
        raise BadParams(f"grid must start at 0, got {xs[0]}")
    if np.any(np.diff(xs) <= 0):
        raise BadParams("grid must be strictly increasing")
    if np.any(fs < 0):
        raise BadParams("density values must be nonnegative")
    upper = float(xs[-1])

    shape = PchipInterpolator(xs, fs, extrapolate=False)
    anti = shape.antiderivative()
    total = float(anti(upper))
    if total <= 0:
        raise BadParams("tabulated density has zero total mass")

    def pdf(x):
        x = np.asarray(x, dtype=float)
        ok = (x >= 0.0) & (x <= upper)
        safe = np.where(ok, x, 0.0)
        vals = np.asarray(shape(safe)) / total
        return np.where(ok, np.maximum(vals, 0.0), 0.0)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        clipped = np.clip(x, 0.0, upper)
        return np.clip(np.asarray(anti(clipped)) / total, 0.0, 1.0)

    fine = np.linspace(0.0, upper, 4001)
    fvals = pdf(fine)
    deriv = np.asarray(shape.derivative()(fine)) / total
    bound = float(max(np.max(np.abs(fvals)), np.max(np.abs(deriv))))

    spec = DensitySpec(
        name=name,
        support_upper=upper,
        pdf=pdf,
        cdf=cdf,
        inverse_cdf=_bisect_inverse(cdf, upper),
        smoothness_bound=bound,
        smoothness_is_estimate=True,
        breakpoints=tuple(float(v) for v in xs[1:-1]),
    )
    verify_density(spec)
    return spec


def tabulated_from_csv(path, name=None):
    """Load x,f(x) rows (optional header) into a tabulated density."""
    import csv

    xs, fs = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            try:
                x, f = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not xs:
                    continue  # header row
                raise ValueError(f"{path}: bad row {row!r}")
            xs.append(x)
            fs.append(f)
    if not xs:
        raise ValueError(f"{path}: no data rows")
    return tabulated_density(xs, fs, name=name or f"tabulated:{path}")


def verify_density(spec, grid_points=1001):
    """Check the contract a DensitySpec must satisfy; raise ValueError if broken.

    Bounded support: F(0)=0, F(M)=1, F nondecreasing on a grid, pdf integrates
    to 1 within 1e-8, and cdf(inverse_cdf(u)) returns u within 1e-8.
    """
    problems = []
    if abs(float(spec.cdf(0.0))) > TOL_ENDPOINT:
        problems.append(f"cdf(0) = {float(spec.cdf(0.0)):.3e} != 0")
    if spec.bounded:
        upper = spec.support_upper
        top = float(spec.cdf(upper))
        if abs(top - 1.0) > TOL_ENDPOINT:
            problems.append(f"cdf({upper}) = {top} != 1")
        grid = np.linspace(0.0, upper, grid_points)
        vals = np.asarray(spec.cdf(grid))
        if np.any(np.diff(vals) < -TOL_ENDPOINT):
            problems.append("cdf is not nondecreasing")
        if np.any(np.asarray(spec.pdf(grid)) < 0):
            problems.append("pdf takes negative values")
        cuts = [0.0, *(b for b in spec.breakpoints if 0.0 < b < upper), upper]
        try:
            mass = math.fsum(
                adaptive_simpson(
                    lambda x: float(spec.pdf(x)), a, b, tol=1e-10 / len(cuts)
                )
                for a, b in zip(cuts, cuts[1:])
            )
        except Exception as exc:  # noqa: BLE001 - surfaced in the report
            problems.append(f"pdf quadrature failed: {exc}")
        else:
            if abs(mass - 1.0) > TOL_NORMALIZATION:
                problems.append(f"pdf integrates to {mass!r}, not 1")
        us = np.linspace(0.001, 0.999, 101)
        xs = np.asarray(spec.inverse_cdf(us))
        gap = float(np.max(np.abs(np.asarray(spec.cdf(xs)) - us)))
        if gap > TOL_ROUNDTRIP:
            problems.append(f"cdf(inverse_cdf(u)) off by {gap:.3e}")
    if problems:
        raise ValueError(f"density {spec.name!r} violates its contract: " + "; ".join(problems))
