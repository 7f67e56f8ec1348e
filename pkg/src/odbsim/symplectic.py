"""Two-mode transformation algebra in the Heisenberg picture.

Transformations act on the operator vector (a0, a0^dag, a1, a1^dag) and
preserve the commutation metric diag(+1, -1, +1, -1).  The gate sequence
conversion / resonant hopping / inverse conversion factorises into

    P(-Theta_mh + omega_m T_B - omega_h T3, -Theta_ml + omega_m T_B - omega_l T3)
        . B(theta) . P(-Theta_hm, -Theta_lm)

with B the beamsplitter block and P a two-mode phase shift; the symmetric
erf ramps give Theta_mh = Theta_hm and Theta_ml = Theta_lm.  The module
also carries the chain-layout planner and the Coulomb hopping-rate formula.
"""

from dataclasses import dataclass
import json

import numpy as np
from scipy.constants import atomic_mass, elementary_charge, epsilon_0
from scipy.linalg import expm

from .errors import DomainError

#: commutation metric of (a, a^dag) pairs
COMMUTATION_METRIC = np.diag([1.0, -1.0, 1.0, -1.0])

CHAIN_LABELS = ("omega_h", "omega_l", "omega_prime")


def reduce_phase(phi):
    """Reduce an angle to (-pi, pi]."""
    out = np.mod(phi, 2.0 * np.pi)
    out = np.where(out > np.pi, out - 2.0 * np.pi, out)
    return float(out) if np.ndim(phi) == 0 else out


def bs_matrix(theta):
    """Beamsplitter block of angle theta on (a0, a0^dag, a1, a1^dag)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [c, 0, -1j * s, 0],
            [0, c, 0, 1j * s],
            [-1j * s, 0, c, 0],
            [0, 1j * s, 0, c],
        ],
        dtype=complex,
    )


def ps_matrix(phi0, phi1):
    """Two-mode phase shift diag(e^{-i phi0}, e^{i phi0}, e^{-i phi1}, e^{i phi1})."""
    return np.diag(
        [np.exp(-1j * phi0), np.exp(1j * phi0), np.exp(-1j * phi1), np.exp(1j * phi1)]
    ).astype(complex)


def fc_block(s0, s1):
    """Block-diagonal embedding of two single-mode transforms."""
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = s0
    out[2:, 2:] = s1
    return out


def commutation_defect(m):
    """Max deviation of M diag M^dag from the commutation metric."""
    return float(np.max(np.abs(m @ COMMUTATION_METRIC @ m.conj().T - COMMUTATION_METRIC)))


def odb_matrix(theta, theta_hm, theta_lm, omega_m, omega_h, omega_l, t_b, t3):
    """Full gate matrix in the interaction frame of the memory frequencies.

    Parameters theta_hm, theta_lm are the conversion phases of the two
    modes (the symmetric ramps make forward and backward phases equal).
    """
    pre = ps_matrix(-theta_hm, -theta_lm)
    post = ps_matrix(
        -theta_hm + omega_m * t_b - omega_h * t3,
        -theta_lm + omega_m * t_b - omega_l * t3,
    )
    return post @ bs_matrix(theta) @ pre


def hom_target_phases(theta_hm, theta_lm, omega_m, omega_h, omega_l, t_b, t3, reduce=True):
    """Phases (phi_20, phi_02) of the two-photon output components.

    phi_20 belongs to both quanta ending in mode 1, phi_02 to both ending in
    mode 0, in the interaction frame of the memory frequencies.
    """
    common = -3.0 * omega_m * t_b + 1.5 * (theta_hm + theta_lm)
    phi_20 = (0.5 * theta_hm + 2.5 * theta_lm) + (0.5 * omega_h + 2.5 * omega_l) * t3 + common
    phi_02 = (2.5 * theta_hm + 0.5 * theta_lm) + (2.5 * omega_h + 0.5 * omega_l) * t3 + common
    if reduce:
        return reduce_phase(phi_20), reduce_phase(phi_02)
    return phi_20, phi_02


def swap_phases(theta_hm, theta_lm, omega_m, omega_h, omega_l, t_b, t3, reduce=True):
    """Residual per-mode phase-gate angles (phi0, phi1) after a theta = pi/2 gate.

    Applying the phase gate with angles (-phi0, -phi1) afterwards completes
    an exact SWAP up to a global phase.
    """
    base = -(theta_hm + theta_lm) + omega_m * t_b + np.pi / 2.0
    phi0 = base - omega_h * t3
    phi1 = base - omega_l * t3
    if reduce:
        return reduce_phase(phi0), reduce_phase(phi1)
    return phi0, phi1


def kappa_from_geometry(d, mass, omega):
    """Coulomb phonon-hopping rate e^2 / (4 pi eps0 d^3 m omega) in rad/s.

    d is the ion-ion distance in metres, mass the ion mass in kg, omega the
    angular frequency defining the mode's zero-point length.
    """
    if d <= 0 or mass <= 0 or omega <= 0:
        raise DomainError("distance, mass and frequency must be positive")
    return elementary_charge**2 / (4.0 * np.pi * epsilon_0 * d**3 * mass * omega)


def ion_mass(mass_u):
    """Ion mass in kg from unified atomic mass units."""
    return mass_u * atomic_mass


@dataclass
class ChainLayout:
    """Frequency labels per mode and residual resonant-pair hopping rates."""

    labels: list
    resonant_pairs: list  # (j, k, rate rad/s) for same-label pairs, j < k
    kappa_nn: float


def plan_chain(m, scheme, kappa_nn):
    """Assign storage frequencies along a chain and list residual resonant pairs.

    scheme "two-frequency" alternates omega_h / omega_l so neighbours are
    detuned; same-label pairs at distance |j-k| keep a residual rate
    kappa_nn |j-k|^-3.  scheme "three-frequency" adds a third frequency so
    all pairs with |j-k| <= 2 are detuned.
    """
    if m < 2:
        raise DomainError("need at least two modes")
    if scheme == "two-frequency":
        labels = [CHAIN_LABELS[j % 2] for j in range(m)]
    elif scheme == "three-frequency":
        labels = [CHAIN_LABELS[j % 3] for j in range(m)]
    else:
        raise DomainError(f"unknown chain scheme {scheme!r}")
    pairs = []
    for j in range(m):
        for k in range(j + 1, m):
            if labels[j] == labels[k]:
                pairs.append((j, k, kappa_nn / abs(j - k) ** 3))
    return ChainLayout(labels=labels, resonant_pairs=pairs, kappa_nn=kappa_nn)


def matrix_to_json(m):
    """Row-major nested list of [re, im] pairs."""
    return [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in np.asarray(m)]


def save_matrix_json(m, path):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(m), fh)


# ---------------------------------------------------------------------------
# Exact kick-drift-kick coefficients for static quadratic Hamiltonians.
#
# For H/hbar = p^T A p / 2 + x^T B x / 2 the classical one-step map over h is
# exp(h J H).  A half-kick / drift / half-kick product with modified
# symmetric coefficient matrices reproduces that map exactly, so the grid
# split step for such a segment is exact up to a state-independent global
# phase per step.
# ---------------------------------------------------------------------------


def quadratic_symplectic_map(a_mat, b_mat, h):
    """exp(h J H) for H = p^T A p/2 + x^T B x/2, phase-space order (x..., p...)."""
    a_mat = np.atleast_2d(a_mat)
    b_mat = np.atleast_2d(b_mat)
    n = a_mat.shape[0]
    z = np.zeros((n, n))
    eye = np.eye(n)
    jmat = np.block([[z, eye], [-eye, z]])
    hmat = np.block([[b_mat, z], [z, a_mat]])
    return expm(h * jmat @ hmat)


def kick_drift_kick_coefficients(a_mat, b_mat, h):
    """Modified (A~, B~) making V(h/2) T(h) V(h/2) equal exp(h J H) exactly.

    Returns (a_tilde, b_tilde, map_residual).  The drift solve uses the
    blocks of the exact map: a~ h = M12 (symmetric), b~ h/2 = M12^{-1}(1 - M11),
    which is symmetric by symplecticity.  map_residual is the max-abs defect
    of the reassembled composite against the exact map and should be at
    rounding level whenever |omega| h is well below pi.
    """
    m = quadratic_symplectic_map(a_mat, b_mat, h)
    n = np.atleast_2d(a_mat).shape[0]
    m11, m12 = m[:n, :n], m[:n, n:]
    a = (m12 + m12.T) / 2.0
    c = np.linalg.solve(a, np.eye(n) - m11)
    c = (c + c.T) / 2.0
    a_tilde = a / h
    b_tilde = 2.0 * c / h
    # reassemble and measure the defect
    z = np.zeros((n, n))
    eye = np.eye(n)
    kick = np.block([[eye, z], [-c, eye]])
    drift = np.block([[eye, a], [z, eye]])
    residual = float(np.max(np.abs(kick @ drift @ kick - m)))
    return a_tilde, b_tilde, residual
