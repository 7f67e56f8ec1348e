"""Frequency-conversion ramps for retunable trapped-ion modes.

A frequency conversion of a single mode from omega_i to omega_f is designed
through a dimensionless scaling function b(t) obeying the Ermakov equation

    b'' + omega^2(t) b = omega_i^2 / b^3 .

Instead of solving for b given omega(t), the ramp is designed the other way
round: b(t) is an error-function step between 1 and sqrt(omega_i/omega_f),
and the drive frequency is read off as

    omega(t) = sqrt((omega_i^2 / b^3 - b'') / b) .

Flat b at both ends (b' = b'' ~ 0) makes the conversion a pure phase gate in
the Fock basis regardless of how fast the ramp is, as long as omega(t) stays
real.  All frequencies in this module are angular (rad/s).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import DegenerateRampError, DomainError, UnrealizablePulseError

SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class RampShape:
    """Error-function ramp parameters.

    g is the dimensionless amplitude, sigma the width of the erf argument,
    duration the ramp time in seconds.  direction "up" lowers b towards
    1 - g (conversion to a higher frequency), "down" raises it to 1 + g.
    """

    g: float
    sigma: float
    duration: float
    direction: str

    def __post_init__(self):
        if self.duration <= 0:
            raise DomainError("ramp duration must be positive")
        if self.sigma <= 0:
            raise DomainError("ramp sigma must be positive")
        if not 0 <= self.g < 2:
            raise DomainError("ramp amplitude g must satisfy 0 <= g < 2 so b stays positive")
        if self.direction not in ("up", "down"):
            raise DomainError(f"unknown ramp direction {self.direction!r}")


def eval_ramp(shape, t, deriv=0):
    """Evaluate the erf ramp b(t) or one of its first two time derivatives.

    Parameters
    ----------
    shape : RampShape
    t : float or array_like
        Time in [0, duration].
    deriv : int
        0 for b, 1 for db/dt, 2 for d2b/dt2.  The derivatives are closed
        forms (Gaussian and its first moment), not finite differences.
    """
    t = np.asarray(t, dtype=float)
    tol = 1e-9 * shape.duration
    if np.any(t < -tol) or np.any(t > shape.duration + tol):
        raise DomainError("ramp evaluated outside [0, duration]")
    sign = -1.0 if shape.direction == "up" else 1.0
    u = (t / shape.duration - 0.5) * shape.sigma
    if deriv == 0:
        out = 1.0 + sign * (shape.g / 2.0) * (1.0 + erf(u))
    elif deriv == 1:
        out = sign * (shape.g * shape.sigma / (SQRT_PI * shape.duration)) * np.exp(-(u**2))
    elif deriv == 2:
        out = -sign * (2.0 * shape.g * shape.sigma**2 / (SQRT_PI * shape.duration**2)) * u * np.exp(-(u**2))
    else:
        raise DomainError("deriv must be 0, 1 or 2")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BProfile:
    """A designed scaling function b(t) and the drive omega(t) it induces.

    Evaluators are closed-form and vectorised over t.  The profile converts
    a mode from omega_i to omega_f over shape.duration seconds.
    """

    shape: RampShape
    omega_i: float
    omega_f: float

    @property
    def duration(self):
        return self.shape.duration

    @property
    def b_final(self):
        """Design endpoint sqrt(omega_i/omega_f)."""
        return np.sqrt(self.omega_i / self.omega_f)

    def b(self, t):
        return eval_ramp(self.shape, t)

    def bdot(self, t):
        return eval_ramp(self.shape, t, deriv=1)

    def bddot(self, t):
        return eval_ramp(self.shape, t, deriv=2)

    def omega_sq(self, t):
        """Induced squared drive frequency (omega_i^2/b^3 - b'')/b."""
        b = self.b(t)
        return (self.omega_i**2 / b**3 - self.bddot(t)) / b

    def omega(self, t):
        w2 = self.omega_sq(t)
        bad = np.atleast_1d(w2) < 0
        if np.any(bad):
            t_bad = float(np.atleast_1d(t)[bad][0]) if np.ndim(t) else float(t)
            raise UnrealizablePulseError(
                f"induced omega^2 is negative at t={t_bad:.3e} s; ramp too fast for this shape",
                t=t_bad,
            )
        return np.sqrt(w2)

    def reverse(self):
        """The inverse conversion omega_f -> omega_i with the same sigma and duration."""
        return make_b_profile(self.omega_f, self.omega_i, self.duration, self.shape.sigma)


def make_b_profile(omega_i, omega_f, duration, sigma):
    """Build the erf b-profile converting omega_i to omega_f.

    The ramp amplitude is fixed by the endpoint condition
    b(duration) = sqrt(omega_i/omega_f): g = 1 - sqrt(omega_i/omega_f) for an
    up conversion (omega_i < omega_f) and sqrt(omega_i/omega_f) - 1 for a
    down conversion.
    """
    if omega_i <= 0 or omega_f <= 0:
        raise DomainError("frequencies must be positive")
    if omega_i == omega_f:
        raise DegenerateRampError("omega_i == omega_f; use a hold segment, not a ramp")
    ratio = np.sqrt(omega_i / omega_f)
    if omega_i < omega_f:
        shape = RampShape(g=1.0 - ratio, sigma=sigma, duration=duration, direction="up")
    else:
        shape = RampShape(g=ratio - 1.0, sigma=sigma, duration=duration, direction="down")
    return BProfile(shape=shape, omega_i=omega_i, omega_f=omega_f)


@dataclass
class ProfileReport:
    """Boundary residuals and realizability of one profile."""

    b_start_residual: float
    bdot_start_residual: float      # |b'(0)| * duration, dimensionless
    b_end_residual: float
    bdot_end_residual: float
    min_omega_sq: float
    boundary_tol: float
    passed: bool


def validate_profile(profile, boundary_tol=1e-3, samples=1000):
    """Check the smooth-boundary conditions and omega^2 >= 0 on a sample grid.

    The erf tails do not vanish exactly; for sigma = 6 the residuals are of
    order g * erfc(3), well below the default tolerance of 1e-3.
    """
    T = profile.duration
    ts = np.linspace(0.0, T, samples)
    r = ProfileReport(
        b_start_residual=abs(profile.b(0.0) - 1.0),
        bdot_start_residual=abs(profile.bdot(0.0)) * T,
        b_end_residual=abs(profile.b(T) - profile.b_final),
        bdot_end_residual=abs(profile.bdot(T)) * T,
        min_omega_sq=float(np.min(profile.omega_sq(ts))),
        boundary_tol=boundary_tol,
        passed=False,
    )
    r.passed = (
        max(r.b_start_residual, r.bdot_start_residual, r.b_end_residual, r.bdot_end_residual)
        <= boundary_tol
        and r.min_omega_sq >= 0.0
    )
    return r


def adiabaticity_metric(profile, n):
    """Adiabaticity figure n |omega'(T/2)| / (8 omega^2(T/2)) at the ramp midpoint.

    The midpoint is where |omega'| peaks for the erf ramps; b'' vanishes
    there, so omega = omega_i / b^2 and omega' = -2 omega_i b' / b^3 in
    closed form.  Values much below 1 mean level-n populations follow the
    sweep adiabatically.
    """
    if n < 0:
        raise DomainError("Fock index must be non-negative")
    tm = profile.duration / 2.0
    b = profile.b(tm)
    omega_mid = profile.omega_i / b**2
    omega_dot = -2.0 * profile.omega_i * profile.bdot(tm) / b**3
    return n * abs(omega_dot) / (8.0 * omega_mid**2)


def adiabaticity_small_g_bound(profile, n):
    """Small-amplitude approximation |g| sigma / (4 sqrt(pi) omega(T/2) T) * n."""
    tm = profile.duration / 2.0
    omega_mid = profile.omega_i / profile.b(tm) ** 2
    return abs(profile.shape.g) * profile.shape.sigma / (4.0 * SQRT_PI * omega_mid * profile.duration) * n


def oscillation_cycles(profile):
    """Number of oscillation periods within the ramp, omega(T/2) T / (2 pi)."""
    tm = profile.duration / 2.0
    return profile.omega_i / profile.b(tm) ** 2 * profile.duration / (2.0 * np.pi)


def write_profile_csv(profile, path, samples=1000):
    """Export t[s], b, bdot, bddot, omega[rad/s] for plotting."""
    ts = np.linspace(0.0, profile.duration, samples)
    cols = np.column_stack([ts, profile.b(ts), profile.bdot(ts), profile.bddot(ts), profile.omega(ts)])
    with open(path, "w") as fh:
        fh.write("t[s],b,bdot,bddot,omega[rad/s]\n")
        for row in cols:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
