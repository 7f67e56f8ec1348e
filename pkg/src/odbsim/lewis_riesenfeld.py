"""Analytics of a single time-dependent harmonic oscillator.

Given a designed b(t), the exact propagator of the retuned oscillator is a
Fock-diagonal phase e^{i Theta (n + 1/2)} between the initial and final
frequency bases, with

    Theta(t_f) = -int_0^{t_f} omega_i / b^2(t) dt .

At intermediate times the instantaneous lowering operator mixes with the
raising operator through the Bogoliubov pair

    eta  = 1/2 sqrt(omega_i/omega_f) (1/b + (omega_f/omega_i) b - i b'/omega_i)
    zeta = 1/2 sqrt(omega_i/omega_f) (1/b - (omega_f/omega_i) b - i b'/omega_i)

which satisfy |eta|^2 - |zeta|^2 = 1 identically.  A fixed-step RK4 solver
for the Ermakov equation is included as an independent oracle for the
closed-form profiles.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError


@dataclass(frozen=True)
class BogoliubovPair:
    eta: complex
    zeta: complex

    @property
    def constraint_defect(self):
        """|eta|^2 - |zeta|^2 - 1; zero up to rounding for any b, b'."""
        return abs(self.eta) ** 2 - abs(self.zeta) ** 2 - 1.0


def theta_phase(profile, t=None, epsabs=1e-10):
    """Dynamical phase Theta(t) = -int omega_i / b^2 dt' in radians.

    Always negative.  Adaptive quadrature; raises ConvergenceError if the
    error estimate exceeds 1e-9 rad.
    """
    upper = profile.duration if t is None else t
    omega_i = profile.omega_i
    val, abserr = quad(
        lambda tt: omega_i / profile.b(tt) ** 2,
        0.0,
        upper,
        epsabs=epsabs,
        epsrel=1e-13,
        limit=200,
        points=[upper / 2.0],
    )
    if abserr > 1e-9:
        raise ConvergenceError(f"Theta quadrature error estimate {abserr:.2e} rad > 1e-9 rad")
    return -val


def bogoliubov_at(profile, t):
    """Bogoliubov pair (eta, zeta) at time t along the profile."""
    b = profile.b(t)
    bdot = profile.bdot(t)
    wi, wf = profile.omega_i, profile.omega_f
    pref = 0.5 * np.sqrt(wi / wf)
    common = -1j * bdot / wi
    eta = pref * (1.0 / b + (wf / wi) * b + common)
    zeta = pref * (1.0 / b - (wf / wi) * b + common)
    return BogoliubovPair(eta=complex(eta), zeta=complex(zeta))


def fc_matrix(profile):
    """2x2 transform of (a, a^dagger) across the full conversion.

    With the smooth-boundary conditions met, eta -> 1 and zeta -> 0 and the
    matrix reduces to diag(e^{i Theta}, e^{-i Theta}).
    """
    theta = theta_phase(profile)
    pair = bogoliubov_at(profile, profile.duration)
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    return np.array(
        [
            [np.conj(pair.eta) * e_p, -pair.zeta * e_m],
            [-np.conj(pair.zeta) * e_p, pair.eta * e_m],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class SqueezeParams:
    r: float
    cosh_r: float
    sinh_r: float


def squeeze_params(omega_i, omega_f):
    """Squeeze strength r = log sqrt(omega_f/omega_i) of the basis change."""
    r = 0.5 * np.log(omega_f / omega_i)
    return SqueezeParams(r=r, cosh_r=np.cosh(r), sinh_r=np.sinh(r))


@dataclass
class ErmakovSolution:
    t: np.ndarray
    b: np.ndarray
    bdot: np.ndarray
    halving_defect: float


def ermakov_forward_solve(
    omega_fn, omega_i, duration, dt=None, check_halving=True, halving_tol=1e-7, ic=(1.0, 0.0)
):
    """Integrate b'' = omega_i^2/b^3 - omega^2(t) b from b(0), b'(0) = ic.

    Classical fixed-step RK4; independent of the closed-form ramps, so it
    serves as an oracle for them.  The default step resolves the fastest
    frequency with 200 points per period.  A halving check compares the
    endpoint against a dt/2 rerun and raises ConvergenceError if they
    disagree beyond halving_tol.
    """
    if dt is None:
        w_max = max(float(np.max(omega_fn(np.linspace(0.0, duration, 257)))), omega_i)
        dt = (2.0 * np.pi / w_max) / 200.0

    def run(step):
        n = max(int(round(duration / step)), 2)
        h = duration / n
        ts = np.empty(n + 1)
        bs = np.empty(n + 1)
        vs = np.empty(n + 1)
        b, v = ic
        ts[0], bs[0], vs[0] = 0.0, b, v

        def acc(tt, bb):
            w = omega_fn(tt)
            return omega_i**2 / bb**3 - w * w * bb

        for k in range(n):
            t0 = k * h
            k1b, k1v = v, acc(t0, b)
            k2b, k2v = v + 0.5 * h * k1v, acc(t0 + 0.5 * h, b + 0.5 * h * k1b)
            k3b, k3v = v + 0.5 * h * k2v, acc(t0 + 0.5 * h, b + 0.5 * h * k2b)
            k4b, k4v = v + h * k3v, acc(t0 + h, b + h * k3b)
            b += h * (k1b + 2 * k2b + 2 * k3b + k4b) / 6.0
            v += h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
            ts[k + 1], bs[k + 1], vs[k + 1] = t0 + h, b, v
        return ts, bs, vs

    ts, bs, vs = run(dt)
    defect = 0.0
    if check_halving:
        _, bs2, vs2 = run(dt / 2.0)
        defect = max(abs(bs2[-1] - bs[-1]), abs(vs2[-1] - vs[-1]) * duration)
        if defect > halving_tol:
            raise ConvergenceError(
                f"Ermakov step size too large: halving changes endpoint by {defect:.2e} > {halving_tol:.0e}"
            )
    return ErmakovSolution(t=ts, b=bs, bdot=vs, halving_defect=defect)
