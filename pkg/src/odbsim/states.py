"""Position-grid states for one and two modes.

Each mode lives on a uniform dimensionless grid x in [-L, L), scaled by the
zero-point length of a reference frequency: x = X / sqrt(hbar / (m omega)).
States are stored as complex amplitudes with the flat-weight quadrature
norm**2 = dx * sum |psi|^2 (identical to the trapezoid rule for states that
vanish at the edges).  All constructors return unit-norm states.
"""

from dataclasses import dataclass
import struct

import numpy as np
import scipy.fft as sfft

from .errors import DomainError, GridMismatchError, ResolutionError

SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class Grid1D:
    """Uniform dimensionless grid with its scaling frequency (rad/s)."""

    n_points: int
    span: float
    scale_frequency: float

    def __post_init__(self):
        if self.n_points < 2 or self.n_points & (self.n_points - 1):
            raise DomainError("n_points must be a power of two for the spectral transforms")
        if self.span <= 0:
            raise DomainError("grid span must be positive")
        if self.scale_frequency <= 0:
            raise DomainError("scale frequency must be positive")

    @property
    def dx(self):
        return 2.0 * self.span / self.n_points

    @property
    def x(self):
        return -self.span + self.dx * np.arange(self.n_points)

    @property
    def momenta(self):
        """FFT-ordered conjugate momenta."""
        return 2.0 * np.pi * sfft.fftfreq(self.n_points, d=self.dx)


@dataclass
class Wavefunction1D:
    grid: Grid1D
    values: np.ndarray

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dx))

    def inner(self, other):
        if other.grid != self.grid:
            raise GridMismatchError("inner product between different grids")
        return complex(np.sum(np.conj(self.values) * other.values) * self.grid.dx)

    def normalized(self):
        return Wavefunction1D(self.grid, self.values / self.norm())

    def density(self):
        return np.abs(self.values) ** 2


@dataclass
class Wavefunction2D:
    """Two-mode state psi[i0, i1]; axis 0 is mode 0."""

    grid0: Grid1D
    grid1: Grid1D
    values: np.ndarray

    @property
    def _dv(self):
        return self.grid0.dx * self.grid1.dx

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self._dv))

    def inner(self, other):
        if other.grid0 != self.grid0 or other.grid1 != self.grid1:
            raise GridMismatchError("inner product between different grids")
        return complex(np.sum(np.conj(self.values) * other.values) * self._dv)

    def normalized(self):
        return Wavefunction2D(self.grid0, self.grid1, self.values / self.norm())


def product_state(psi0, psi1):
    """Tensor product of two single-mode states (mode 0 first)."""
    return Wavefunction2D(psi0.grid, psi1.grid, np.outer(psi0.values, psi1.values))


def hermite_functions(n_max, x):
    """Normalised oscillator eigenfunctions phi_0..phi_n_max on points x.

    Stable three-term recurrence; rows are phi_n(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1, x.size))
    out[0] = np.pi**-0.25 * np.exp(-(x**2) / 2.0)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def fock_vector(n, grid, frequency=None):
    """Raw amplitudes of |n> at a reference frequency, expressed on grid."""
    freq = grid.scale_frequency if frequency is None else frequency
    lam = np.sqrt(freq / grid.scale_frequency)
    vals = np.sqrt(lam) * hermite_functions(n, lam * grid.x)[n]
    norm2 = np.sum(vals**2) * grid.dx
    if abs(norm2 - 1.0) > 1e-8:
        raise ResolutionError(
            f"Fock state n={n} at {freq:.4g} rad/s is not resolved on this grid "
            f"(discrete norm^2 = {norm2:.10f})"
        )
    return vals / np.sqrt(norm2)


def fock_state(n, grid, frequency=None):
    """Unit-norm n-th oscillator eigenstate of (p^2 + x^2)/2.

    With `frequency` given, the eigenfunction belongs to that reference
    frequency but is expressed on the (possibly differently scaled) grid.
    """
    if n < 0:
        raise DomainError("Fock index must be non-negative")
    return Wavefunction1D(grid, fock_vector(n, grid, frequency).astype(complex))


@dataclass(frozen=True)
class GkpParams:
    """Finite-energy grid-code state parameters.

    delta is the width of each position-space peak, 1/epsilon the width of
    the overall envelope, s_max the truncation of the peak sum, logical the
    encoded qubit value (peaks at even or odd multiples of sqrt(pi)).
    """

    delta: float
    epsilon: float
    s_max: int
    logical: int

    def __post_init__(self):
        if self.delta <= 0 or self.epsilon <= 0:
            raise DomainError("delta and epsilon must be positive")
        if self.s_max < 1:
            raise DomainError("s_max must be at least 1")
        if self.logical not in (0, 1):
            raise DomainError("logical index must be 0 or 1")


def _gkp_comb(params, x):
    out = np.zeros_like(x)
    for s in range(-params.s_max, params.s_max + 1):
        mu = (2 * s + params.logical) * SQRT_PI
        out += np.exp(-0.5 * params.epsilon**2 * mu**2) * np.exp(-((x - mu) ** 2) / (2.0 * params.delta**2))
    return out


def gkp_state(params, grid, truncation_tol=1e-4):
    """Finite-energy grid-code state, normalised numerically on the grid.

    Raises ResolutionError when the envelope leaves more than
    truncation_tol of probability outside the grid window.  The default
    admits the reference parameters (delta = epsilon = 0.3, s_max = 6 on a
    span-10 grid), whose outermost comb peaks sit just outside the window
    with ~5e-5 of the mass; the construction is then the windowed comb,
    renormalised on the grid.
    """
    peak_extent = (2 * params.s_max + params.logical) * SQRT_PI + 6.0 * params.delta
    if peak_extent > grid.span:
        # measure what actually falls outside the window on an extended grid
        n_ext = int(np.ceil(peak_extent / grid.dx))
        x_ext = grid.dx * np.arange(-n_ext, n_ext)
        f_ext = _gkp_comb(params, x_ext)
        total = np.sum(f_ext**2)
        outside = np.sum(f_ext[np.abs(x_ext) >= grid.span] ** 2)
        if total > 0 and outside / total > truncation_tol:
            raise ResolutionError(
                f"grid span {grid.span} truncates {outside / total:.2e} of the state mass"
            )
    vals = _gkp_comb(params, grid.x)
    vals = vals / np.sqrt(np.sum(vals**2) * grid.dx)
    return Wavefunction1D(grid, vals.astype(complex))


def rescale_reference(psi, new_frequency, resolution_tol=1e-8):
    """Re-express a state on the dimensionless grid of a new reference frequency.

    The physical state is unchanged; coordinates are stretched by
    sqrt(new/old) and the amplitudes are band-limited (trigonometric)
    interpolants of the old samples, then renormalised.
    """
    grid = psi.grid
    if new_frequency == grid.scale_frequency:
        return Wavefunction1D(
            Grid1D(grid.n_points, grid.span, new_frequency), psi.values.copy()
        )
    lam = np.sqrt(new_frequency / grid.scale_frequency)
    xq = grid.x / lam  # old-coordinate positions of the new sample points
    coeff = sfft.fft(psi.values)
    phases = np.exp(1j * np.outer(xq - grid.x[0], grid.momenta))
    vals = phases @ coeff / grid.n_points
    vals = np.where(np.abs(xq) <= grid.span, vals, 0.0) / np.sqrt(lam)
    norm = np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dx)
    if abs(norm - 1.0) > resolution_tol:
        raise ResolutionError(
            f"rescaling to {new_frequency:.4g} rad/s loses {abs(norm - 1.0):.2e} of the norm"
        )
    new_grid = Grid1D(grid.n_points, grid.span, new_frequency)
    return Wavefunction1D(new_grid, vals / norm)


def fock_populations(psi, reference_frequency, n_max):
    """|<n; omega_ref | psi>|^2 for n = 0..n_max via grid inner products."""
    grid = psi.grid
    lam = np.sqrt(reference_frequency / grid.scale_frequency)
    basis = np.sqrt(lam) * hermite_functions(n_max, lam * grid.x)
    amps = basis @ psi.values * grid.dx
    return np.abs(amps) ** 2


def joint_fock_population(psi, frequencies, pair):
    """Population of the product Fock state |n0; f0>|n1; f1> in a two-mode state."""
    f0, f1 = frequencies
    n0, n1 = pair
    v0 = fock_vector(n0, psi.grid0, f0)
    v1 = fock_vector(n1, psi.grid1, f1)
    amp = v0 @ psi.values @ v1 * psi.grid0.dx * psi.grid1.dx
    return float(np.abs(amp) ** 2)


def _fock_phase_1d(values, grid, phi, frequency, n_cut, residual_tol):
    lam = np.sqrt(frequency / grid.scale_frequency)
    basis = np.sqrt(lam) * hermite_functions(n_cut, lam * grid.x)
    coeff = basis @ values * grid.dx  # (n_cut+1,) or (n_cut+1, n1)
    captured = np.sum(np.abs(coeff) ** 2)
    total = np.sum(np.abs(values) ** 2) * grid.dx
    residual = abs(total - captured)
    if residual > residual_tol:
        raise ResolutionError(
            f"Fock truncation at n_cut={n_cut} leaves residual mass {residual:.2e} > {residual_tol:.0e}"
        )
    ns = np.arange(n_cut + 1)
    phased = coeff * np.exp(-1j * phi * (ns + 0.5))[(...,) + (None,) * (coeff.ndim - 1)]
    return basis.T @ phased


def _rotation_factors(delta, x, p):
    """Diagonal factors of one exact oscillator-rotation substep of angle delta."""
    c = np.tan(delta / 2.0)
    a = np.sin(delta)
    return np.exp(-0.5j * c * x**2), np.exp(-0.5j * a * p**2)


def _evolution_phase_1d(values, grid, phi, n_sub_max_angle=0.5):
    """Apply e^{-i phi (n + 1/2)} by exact harmonic rotation substeps.

    Works for any grid-resolved state (no Fock truncation).  Each substep is
    a half-kick/drift/half-kick whose classical map is the exact rotation;
    the leftover state-independent phase per substep is measured on the
    vacuum and divided out, restoring the absolute phase convention.
    """
    if phi == 0.0:
        return values.copy()
    n_sub = max(1, int(np.ceil(abs(phi) / n_sub_max_angle)))
    delta = phi / n_sub
    ev, et = _rotation_factors(delta, grid.x, grid.momenta)

    def substep(arr):
        arr = arr * (ev if arr.ndim == 1 else ev[:, None])
        arr = sfft.ifft(sfft.fft(arr, axis=0) * (et if arr.ndim == 1 else et[:, None]), axis=0)
        return arr * (ev if arr.ndim == 1 else ev[:, None])

    vac = fock_vector(0, grid).astype(complex)
    probe = substep(vac)
    alpha = np.angle(np.sum(np.conj(vac) * probe) * grid.dx) + delta / 2.0

    out = values.copy()
    for _ in range(n_sub):
        out = substep(out)
    return out * np.exp(-1j * n_sub * alpha)


def apply_fock_phase(psi, phi, n_cut=48, residual_tol=1e-10, method="spectral"):
    """Multiply each Fock component |n> by e^{-i phi (n + 1/2)}.

    For a two-mode state phi is a pair (phi0, phi1) acting on the Fock
    ladders of the respective grid scale frequencies.

    method "spectral" expands in the oscillator basis up to n_cut (raising
    ResolutionError if the truncated mass exceeds residual_tol) and resums;
    method "evolution" applies exact harmonic rotations and has no
    truncation, which matters for grid-code states whose Fock tail extends
    past what the grid can hold orthonormally.
    """
    if isinstance(psi, Wavefunction1D):
        if method == "spectral":
            vals = _fock_phase_1d(psi.values, psi.grid, phi, psi.grid.scale_frequency, n_cut, residual_tol)
        elif method == "evolution":
            vals = _evolution_phase_1d(psi.values, psi.grid, phi)
        else:
            raise DomainError(f"unknown method {method!r}")
        return Wavefunction1D(psi.grid, vals)

    phi0, phi1 = phi
    if method == "spectral":
        vals = _fock_phase_1d(psi.values, psi.grid0, phi0, psi.grid0.scale_frequency, n_cut, residual_tol)
        vals = _fock_phase_1d(vals.T, psi.grid1, phi1, psi.grid1.scale_frequency, n_cut, residual_tol).T
    elif method == "evolution":
        vals = _evolution_phase_1d(psi.values, psi.grid0, phi0)
        vals = _evolution_phase_1d(vals.T, psi.grid1, phi1).T
    else:
        raise DomainError(f"unknown method {method!r}")
    return Wavefunction2D(psi.grid0, psi.grid1, vals)


@dataclass(frozen=True)
class Fidelity:
    """Both overlap conventions: probability |<t|psi>|^2 and amplitude |<t|psi>|."""

    probability: float
    amplitude: float


def fidelity(psi, target):
    """Overlap of a state with a target on the same grids."""
    amp = abs(target.inner(psi))
    return Fidelity(probability=amp**2, amplitude=amp)


def marginal(psi, mode):
    """Position density of one mode, integrated over the other; sums(dx) to 1."""
    if mode == 0:
        return np.sum(np.abs(psi.values) ** 2, axis=1) * psi.grid1.dx
    if mode == 1:
        return np.sum(np.abs(psi.values) ** 2, axis=0) * psi.grid0.dx
    raise DomainError("mode must be 0 or 1")


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def save_state(psi, path):
    """Binary dump: little-endian f64 header + interleaved re/im amplitudes.

    Header is (n_points, span, scale_frequency) per mode; 2D data is
    row-major with mode 0 as the slow axis.
    """
    with open(path, "wb") as fh:
        if isinstance(psi, Wavefunction1D):
            fh.write(struct.pack("<3d", psi.grid.n_points, psi.grid.span, psi.grid.scale_frequency))
            data = psi.values
        else:
            fh.write(
                struct.pack(
                    "<6d",
                    psi.grid0.n_points,
                    psi.grid1.n_points,
                    psi.grid0.span,
                    psi.grid1.span,
                    psi.grid0.scale_frequency,
                    psi.grid1.scale_frequency,
                )
            )
            data = psi.values
        inter = np.empty(data.size * 2)
        inter[0::2] = np.real(data).ravel()
        inter[1::2] = np.imag(data).ravel()
        inter.astype("<f8").tofile(fh)


def load_state_2d(path):
    with open(path, "rb") as fh:
        n0, n1, s0, s1, f0, f1 = struct.unpack("<6d", fh.read(48))
        raw = np.fromfile(fh, dtype="<f8")
    n0, n1 = int(n0), int(n1)
    vals = (raw[0::2] + 1j * raw[1::2]).reshape(n0, n1)
    return Wavefunction2D(Grid1D(n0, s0, f0), Grid1D(n1, s1, f1), vals)


def load_state_1d(path):
    with open(path, "rb") as fh:
        n, s, f = struct.unpack("<3d", fh.read(24))
        raw = np.fromfile(fh, dtype="<f8")
    vals = raw[0::2] + 1j * raw[1::2]
    return Wavefunction1D(Grid1D(int(n), s, f), vals)


def write_marginal_csv(psi, mode, path):
    """CSV export (x, density) of one mode's marginal."""
    grid = psi.grid0 if mode == 0 else psi.grid1
    dens = marginal(psi, mode)
    with open(path, "w") as fh:
        fh.write("x,density\n")
        for xv, dv in zip(grid.x, dens):
            fh.write(f"{xv:.17g},{dv:.17g}\n")
