"""End-to-end reproductions of the switchable-beamsplitter protocol.

The gate sequence on two neighbouring modes stored at omega_h and omega_l:

1. convert both modes to the common gate frequency omega_m (duration T_FC),
2. let resonant phonon hopping run for T_B (beamsplitter angle
   theta = kappa_tilde T_B / 2),
3. convert back (T_FC), total T3 = 2 T_FC + T_B.

`run_hom` drives a single phonon per mode through a 50:50 gate and scores
the two-photon interference against the analytic target; `run_swap_gkp`
swaps two grid-code states with theta = pi/2 plus a compensating phase
gate.  Auxiliary runs check detuning suppression and the adiabaticity of
the ramps.  All outputs (report.json and CSV streams) are deterministic
functions of the configuration.
"""

from dataclasses import dataclass, asdict, replace
import json
import math
import os
import time

import numpy as np

from . import __version__
from .errors import ConfigError
from .lewis_riesenfeld import theta_phase
from .pulses import (
    adiabaticity_metric,
    adiabaticity_small_g_bound,
    make_b_profile,
    oscillation_cycles,
    validate_profile,
    write_profile_csv,
)
from .states import (
    Grid1D,
    GkpParams,
    Wavefunction2D,
    apply_fock_phase,
    fidelity,
    fock_state,
    gkp_state,
    joint_fock_population,
    marginal,
    product_state,
    write_marginal_csv,
)
from .symplectic import (
    hom_target_phases,
    ion_mass,
    kappa_from_geometry,
    reduce_phase,
    swap_phases,
)
from .tdse import HamiltonianSpec, Hold, Ramp, Schedule, Segment, propagate, write_populations_csv

TWO_PI = 2.0 * np.pi


@dataclass
class ExperimentConfig:
    """Flat experiment configuration; frequencies cyclic in the unit of the key name."""

    ion_mass_u: float = 40.0
    distance_um: float = 43.8
    omega_h_mhz: float = 2.64
    omega_l_mhz: float = 2.20
    omega_m_mhz: float = 2.42
    t_fc_us: float = 4.0
    sigma: float = 6.0
    theta_rad: float = math.pi / 4.0
    t_b_us: float = -1.0          # < 0: derive from theta and kappa
    kappa_khz: float = -1.0       # < 0: derive from the trap geometry
    grid_points: int = 128
    grid_span: float = 10.0
    dt_ns: float = 2.0            # ramp-segment step
    hold_dt_ns: float = 20.0      # static-segment step (exact stepper)
    snapshot_stride: int = 100
    propagator_order: int = 4
    hopping_during_fc: bool = True
    physical_phase_gate: bool = False
    include_baseline: bool = True
    gkp_delta: float = 0.3
    gkp_epsilon: float = 0.3
    gkp_s_max: int = 6
    n_cut: int = 48
    boundary_tol: float = 1e-3

    def validate(self):
        if not (self.omega_l_mhz < self.omega_m_mhz < self.omega_h_mhz):
            raise ConfigError("frequencies must satisfy omega_l < omega_m < omega_h")
        if self.theta_rad < 0:
            raise ConfigError("theta must be non-negative")
        if self.t_fc_us <= 0 or self.sigma <= 0:
            raise ConfigError("t_fc_us and sigma must be positive")
        return self


# Reference presets: hold times were derived from the rounded hopping rate
# of 0.432 kHz, so the presets pin that rate; the geometric rate agrees with
# it to 0.2% and is checked independently by the calibration tests.
HOM_PRESET = ExperimentConfig(t_b_us=579.0, kappa_khz=0.432)
SWAP_PRESET = ExperimentConfig(theta_rad=math.pi / 2.0, t_b_us=1158.0, kappa_khz=0.432)


def parse_config(path, base=None):
    """Read `key = value` lines onto a preset; unknown keys are errors."""
    cfg = replace(base) if base is not None else ExperimentConfig()
    fields = {f: type(getattr(cfg, f)) for f in cfg.__dataclass_fields__}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in fields:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            typ = fields[key]
            if typ is bool:
                if value.lower() not in ("true", "false"):
                    raise ConfigError(f"{path}:{lineno}: boolean key {key!r} must be true/false")
                setattr(cfg, key, value.lower() == "true")
            else:
                setattr(cfg, key, typ(value))
    return cfg.validate()


@dataclass
class DerivedParameters:
    omega_h: float
    omega_l: float
    omega_m: float
    t_fc: float
    t_b: float
    t3: float
    mass: float
    distance: float
    kappa_tilde: float   # hopping rate at the gate frequency scaling
    kappa_sim: float     # hopping coefficient in the memory-frequency scalings
    theta_target: float
    theta_actual: float


def derive_parameters(cfg):
    wh = TWO_PI * cfg.omega_h_mhz * 1e6
    wl = TWO_PI * cfg.omega_l_mhz * 1e6
    wm = TWO_PI * cfg.omega_m_mhz * 1e6
    mass = ion_mass(cfg.ion_mass_u)
    d = cfg.distance_um * 1e-6
    if cfg.kappa_khz > 0:
        kappa_tilde = TWO_PI * cfg.kappa_khz * 1e3
    else:
        kappa_tilde = kappa_from_geometry(d, mass, wm)
    # The hopping coefficient referred to the memory-frequency scalings differs
    # from the gate-frequency rate by 0.4%, below the quoting precision of the
    # reference rate.  Using the gate rate as the simulation coefficient makes
    # the effective hold beamsplitter rate equal kappa_tilde to 1e-5 relative
    # (the kinetic and potential scaling corrections cancel), so theta =
    # kappa_tilde T_B / 2 times the hold exactly.
    kappa_sim = kappa_tilde
    t_fc = cfg.t_fc_us * 1e-6
    if cfg.theta_rad == 0.0:
        t_b = 0.0
    elif cfg.t_b_us >= 0:
        t_b = cfg.t_b_us * 1e-6
    else:
        t_b = 2.0 * cfg.theta_rad / kappa_tilde
    return DerivedParameters(
        omega_h=wh,
        omega_l=wl,
        omega_m=wm,
        t_fc=t_fc,
        t_b=t_b,
        t3=2.0 * t_fc + t_b,
        mass=mass,
        distance=d,
        kappa_tilde=kappa_tilde,
        kappa_sim=kappa_sim,
        theta_target=cfg.theta_rad,
        theta_actual=kappa_tilde * t_b / 2.0,
    )


@dataclass
class OdbProfiles:
    hm: object
    lm: object
    mh: object
    ml: object
    theta_hm: float
    theta_lm: float


def make_odb_profiles(cfg, par):
    """The four conversion ramps and their quadrature phases."""
    hm = make_b_profile(par.omega_h, par.omega_m, par.t_fc, cfg.sigma)
    lm = make_b_profile(par.omega_l, par.omega_m, par.t_fc, cfg.sigma)
    for prof in (hm, lm):
        report = validate_profile(prof, boundary_tol=cfg.boundary_tol)
        if not report.passed:
            raise ConfigError(f"conversion ramp fails its boundary conditions: {report}")
    return OdbProfiles(
        hm=hm,
        lm=lm,
        mh=hm.reverse(),
        ml=lm.reverse(),
        theta_hm=theta_phase(hm),
        theta_lm=theta_phase(lm),
    )


def build_odb_schedule(cfg, par, profiles, hopping_during_fc=None):
    """Ramps / hold / inverse ramps; the hold is dropped for theta = 0."""
    hop_fc = cfg.hopping_during_fc if hopping_during_fc is None else hopping_during_fc
    n_fc = max(100, int(round(par.t_fc / (cfg.dt_ns * 1e-9))))
    segments = [
        Segment(par.t_fc, n_fc, Ramp(profiles.hm), Ramp(profiles.lm), hopping=hop_fc)
    ]
    if par.t_b > 0:
        n_b = max(1, int(round(par.t_b / (cfg.hold_dt_ns * 1e-9))))
        segments.append(
            Segment(par.t_b, n_b, Hold(par.omega_m), Hold(par.omega_m), hopping=True)
        )
    segments.append(
        Segment(par.t_fc, n_fc, Ramp(profiles.mh), Ramp(profiles.ml), hopping=hop_fc)
    )
    return Schedule(segments)


def hamiltonian_spec(par):
    return HamiltonianSpec(omega0=par.omega_h, omega1=par.omega_l, kappa=par.kappa_sim)


def make_grids(cfg, par):
    return (
        Grid1D(cfg.grid_points, cfg.grid_span, par.omega_h),
        Grid1D(cfg.grid_points, cfg.grid_span, par.omega_l),
    )


def fock_odb_amplitudes(theta, profiles, par):
    """Lab-frame amplitudes of the gate acting on one phonon per mode.

    Independent Fock-space model used to cross-check the grid propagation:
    conversion phases, beamsplitter mixing on the (1,1) manifold, and the
    hold-frame phase.  Keys are (n0, n1).
    """
    th, tl = profiles.theta_hm, profiles.theta_lm
    pre = np.exp(1.5j * (th + tl))        # conversion phases of the (1,1) input
    frame = np.exp(-3j * par.omega_m * par.t_b)
    c2, s2 = np.cos(2.0 * theta), np.sin(2.0 * theta)
    return {
        (1, 1): pre * frame * c2 * np.exp(1j * (1.5 * tl + 1.5 * th)),
        (0, 2): pre * frame * (-1j * s2 / np.sqrt(2.0)) * np.exp(1j * (2.5 * tl + 0.5 * th)),
        (2, 0): pre * frame * (-1j * s2 / np.sqrt(2.0)) * np.exp(1j * (0.5 * tl + 2.5 * th)),
    }


def hom_lab_phases(profiles, par):
    """Lab-frame phases of the ideal two-photon output components.

    The interaction-frame values carry extra omega (n + 1/2) T3 terms that
    the lab-frame propagation does not; both framings give identical
    fidelity magnitudes as long as target and simulation agree.
    """
    phi20_if, phi02_if = hom_target_phases(
        profiles.theta_hm,
        profiles.theta_lm,
        par.omega_m,
        par.omega_h,
        par.omega_l,
        par.t_b,
        par.t3,
        reduce=False,
    )
    phi20_lab = reduce_phase(phi20_if - (0.5 * par.omega_h + 2.5 * par.omega_l) * par.t3)
    phi02_lab = reduce_phase(phi02_if - (2.5 * par.omega_h + 0.5 * par.omega_l) * par.t3)
    return phi20_lab, phi02_lab


def hom_target_state(grids, profiles, par):
    """Ideal 50:50 output (-i/sqrt2)(e^{i phi20}|0,2> + e^{i phi02}|2,0>) in the lab frame."""
    phi20, phi02 = hom_lab_phases(profiles, par)
    g0, g1 = grids
    f0 = {n: fock_state(n, g0) for n in (0, 2)}
    f1 = {n: fock_state(n, g1) for n in (0, 2)}
    vals = (-1j / np.sqrt(2.0)) * (
        np.exp(1j * phi20) * np.outer(f0[0].values, f1[2].values)
        + np.exp(1j * phi02) * np.outer(f0[2].values, f1[0].values)
    )
    return Wavefunction2D(g0, g1, vals)


def _run_odb(cfg, par, profiles, psi0, hopping_during_fc=None):
    schedule = build_odb_schedule(cfg, par, profiles, hopping_during_fc)
    spec = hamiltonian_spec(par)
    bases = {"mem": (par.omega_h, par.omega_l), "gate": (par.omega_m, par.omega_m)}
    return propagate(
        psi0,
        schedule,
        spec,
        order=cfg.propagator_order,
        snapshot_stride=cfg.snapshot_stride,
        track_pairs=((1, 1), (2, 0), (0, 2)),
        track_bases=bases,
        capture_segment_ends=True,
    ), schedule


def _schedule_echo(schedule):
    return [
        {
            "duration_s": seg.duration,
            "n_steps": seg.n_steps,
            "dt_s": seg.dt,
            "static": seg.is_static,
            "hopping": seg.hopping,
            "omega_start": [seg.program0.omega_start, seg.program1.omega_start],
            "omega_end": [seg.program0.omega_end, seg.program1.omega_end],
        }
        for seg in schedule.segments
    ]


def _base_report(cfg, par, profiles):
    return {
        "package_version": __version__,
        "config": asdict(cfg),
        "derived": {
            "omega_h_rad_s": par.omega_h,
            "omega_l_rad_s": par.omega_l,
            "omega_m_rad_s": par.omega_m,
            "kappa_tilde_rad_s": par.kappa_tilde,
            "kappa_tilde_cyclic_khz": par.kappa_tilde / TWO_PI / 1e3,
            "kappa_sim_rad_s": par.kappa_sim,
            "t_fc_s": par.t_fc,
            "t_b_s": par.t_b,
            "t3_s": par.t3,
            "theta_target_rad": par.theta_target,
            "theta_actual_rad": par.theta_actual,
            "theta_hm_rad": profiles.theta_hm,
            "theta_lm_rad": profiles.theta_lm,
        },
    }


def run_hom(cfg, out_dir=None):
    """Two-photon interference through the 50:50 gate; returns the report dict."""
    cfg.validate()
    t_start = time.perf_counter()
    par = derive_parameters(cfg)
    profiles = make_odb_profiles(cfg, par)
    grids = make_grids(cfg, par)
    psi0 = product_state(fock_state(1, grids[0]), fock_state(1, grids[1]))

    result, schedule = _run_odb(cfg, par, profiles, psi0)
    target = hom_target_state(grids, profiles, par)
    fid = fidelity(result.psi, target)

    mem = (par.omega_h, par.omega_l)
    gate = (par.omega_m, par.omega_m)
    state_t1 = result.segment_end_states[0]
    final_pops = {
        f"mem_{n0}_{n1}": joint_fock_population(result.psi, mem, (n0, n1))
        for (n0, n1) in ((1, 1), (2, 0), (0, 2))
    }
    gate_end_hold = (
        {
            f"gate_{n0}_{n1}": joint_fock_population(result.segment_end_states[1], gate, (n0, n1))
            for (n0, n1) in ((1, 1), (2, 0), (0, 2))
        }
        if len(result.segment_end_states) == 3
        else {}
    )

    report = _base_report(cfg, par, profiles)
    phi20_if, phi02_if = hom_target_phases(
        profiles.theta_hm, profiles.theta_lm, par.omega_m, par.omega_h, par.omega_l, par.t_b, par.t3
    )
    phi20_lab, phi02_lab = hom_lab_phases(profiles, par)
    report.update(
        {
            "experiment": "hom",
            "schedule": _schedule_echo(schedule),
            "target_phases": {
                "phi_20_if_rad": phi20_if,
                "phi_02_if_rad": phi02_if,
                "phi_20_lab_rad": phi20_lab,
                "phi_02_lab_rad": phi02_lab,
            },
            "infidelity_probability": 1.0 - fid.probability,
            "infidelity_amplitude": 1.0 - fid.amplitude,
            "final_populations": final_pops,
            "gate_basis_populations_end_of_hold": gate_end_hold,
            "mid_gate": {
                "gate_1_1_at_t0": result.snapshots[0].populations[("gate", (1, 1))],
                "mem_1_1_at_t_fc": joint_fock_population(state_t1, mem, (1, 1)),
                "gate_1_1_at_t_fc": joint_fock_population(state_t1, gate, (1, 1)),
            },
            "max_norm_drift": result.max_norm_drift,
        }
    )

    if cfg.include_baseline and cfg.hopping_during_fc:
        base_result, _ = _run_odb(cfg, par, profiles, psi0, hopping_during_fc=False)
        base_fid = fidelity(base_result.psi, target)
        model = fock_odb_amplitudes(par.theta_actual, profiles, par)
        overlap = 0.0j
        for (n0, n1), amp in model.items():
            v0 = fock_state(n0, grids[0]).values
            v1 = fock_state(n1, grids[1]).values
            num = np.conj(amp) * (v0 @ base_result.psi.values @ v1 * grids[0].dx * grids[1].dx)
            overlap += num
        report["baseline_no_hopping_during_fc"] = {
            "infidelity_probability": 1.0 - base_fid.probability,
            "infidelity_delta": (1.0 - fid.probability) - (1.0 - base_fid.probability),
            "analytic_model_infidelity": 1.0 - abs(overlap) ** 2,
        }

    report["wall_clock_s"] = time.perf_counter() - t_start
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_populations_csv(
            result.snapshots,
            ((1, 1), (2, 0), (0, 2)),
            ("mem", "gate"),
            os.path.join(out_dir, "populations.csv"),
        )
        write_profile_csv(profiles.hm, os.path.join(out_dir, "pulse_fc0_down.csv"))
        write_profile_csv(profiles.lm, os.path.join(out_dir, "pulse_fc1_up.csv"))
        for mode in (0, 1):
            write_marginal_csv(result.psi, mode, os.path.join(out_dir, f"marginals_final_mode{mode}.csv"))
        _write_report(report, os.path.join(out_dir, "report.json"))
    return report


def _marginal_l1(psi, mode, reference_density):
    grid = psi.grid0 if mode == 0 else psi.grid1
    return float(np.sum(np.abs(marginal(psi, mode) - reference_density)) * grid.dx)


def _solve_physical_gate_holds(c0, c1, profiles, par):
    """Hold durations so sequential per-mode conversion pairs realise U_P(c0, c1).

    Mode 0 runs ramp/hold(tau0)/ramp while mode 1 idles, then vice versa;
    idle modes keep accruing their memory-frequency phases, which couples
    the two hold times.  Solved as a small lattice search over 2 pi windows.
    """
    wm, wh, wl = par.omega_m, par.omega_h, par.omega_l
    t_fc = par.t_fc
    a0 = c0 + 2.0 * profiles.theta_hm - wh * 2.0 * t_fc
    a1 = c1 + 2.0 * profiles.theta_lm - wl * 2.0 * t_fc
    mat = np.array([[wm, wh], [wl, wm]])
    # positive hold times need the 2 pi branches near -a / 2 pi; search a
    # generous window around that centre for the shortest total hold
    k0_mid = int(round(-a0 / TWO_PI))
    k1_mid = int(round(-a1 / TWO_PI))
    best = None
    for k0 in range(k0_mid - 60, k0_mid + 61):
        for k1 in range(k1_mid - 60, k1_mid + 61):
            tau = np.linalg.solve(mat, [a0 + TWO_PI * k0, a1 + TWO_PI * k1])
            if tau[0] >= 0 and tau[1] >= 0 and (best is None or tau.sum() < best.sum()):
                best = tau
    if best is None:
        raise ConfigError("no feasible hold durations for the physical phase gate")
    return float(best[0]), float(best[1])


def _physical_phase_gate_schedule(cfg, par, profiles, tau0, tau1):
    n_fc = max(100, int(round(par.t_fc / (cfg.dt_ns * 1e-9))))

    def hold_steps(tau):
        return max(1, int(round(tau / (cfg.dt_ns * 1e-9))))

    segments = [
        Segment(par.t_fc, n_fc, Ramp(profiles.hm), Hold(par.omega_l), hopping=True),
    ]
    if tau0 > 0:
        segments.append(Segment(tau0, hold_steps(tau0), Hold(par.omega_m), Hold(par.omega_l), hopping=True))
    segments.append(Segment(par.t_fc, n_fc, Ramp(profiles.mh), Hold(par.omega_l), hopping=True))
    segments.append(Segment(par.t_fc, n_fc, Hold(par.omega_h), Ramp(profiles.lm), hopping=True))
    if tau1 > 0:
        segments.append(Segment(tau1, hold_steps(tau1), Hold(par.omega_h), Hold(par.omega_m), hopping=True))
    segments.append(Segment(par.t_fc, n_fc, Hold(par.omega_h), Ramp(profiles.ml), hopping=True))
    return Schedule(segments)


def run_swap_gkp(cfg, out_dir=None):
    """SWAP of two grid-code states through a theta = pi/2 gate plus compensation."""
    cfg.validate()
    t_start = time.perf_counter()
    par = derive_parameters(cfg)
    profiles = make_odb_profiles(cfg, par)
    grids = make_grids(cfg, par)

    gkp0 = GkpParams(cfg.gkp_delta, cfg.gkp_epsilon, cfg.gkp_s_max, logical=0)
    gkp1 = GkpParams(cfg.gkp_delta, cfg.gkp_epsilon, cfg.gkp_s_max, logical=1)
    psi0 = product_state(gkp_state(gkp0, grids[0]), gkp_state(gkp1, grids[1]))
    target = product_state(gkp_state(gkp1, grids[0]), gkp_state(gkp0, grids[1]))

    result, schedule = _run_odb(cfg, par, profiles, psi0)

    phi0_if, phi1_if = swap_phases(
        profiles.theta_hm, profiles.theta_lm, par.omega_m, par.omega_h, par.omega_l,
        par.t_b, par.t3, reduce=False,
    )
    comp0 = reduce_phase(-(phi0_if + par.omega_h * par.t3))
    comp1 = reduce_phase(-(phi1_if + par.omega_l * par.t3))

    if cfg.physical_phase_gate:
        tau0, tau1 = _solve_physical_gate_holds(comp0, comp1, profiles, par)
        gate_schedule = _physical_phase_gate_schedule(cfg, par, profiles, tau0, tau1)
        comp_result = propagate(
            result.psi,
            gate_schedule,
            hamiltonian_spec(par),
            order=cfg.propagator_order,
            snapshot_stride=max(cfg.snapshot_stride, 10**9),
            track_pairs=((0, 0),),
            track_bases={"mem": (par.omega_h, par.omega_l)},
            t0=par.t3,
        )
        psi_comp = comp_result.psi
        phase_gate_info = {"method": "physical", "tau0_s": tau0, "tau1_s": tau1}
    else:
        psi_comp = apply_fock_phase(result.psi, (comp0, comp1), method="evolution")
        phase_gate_info = {"method": "exact"}

    fid_raw = fidelity(result.psi, target)
    fid = fidelity(psi_comp, target)

    target_m0 = marginal(target, 0)
    target_m1 = marginal(target, 1)
    l1 = {
        "compensated_mode0": _marginal_l1(psi_comp, 0, target_m0),
        "compensated_mode1": _marginal_l1(psi_comp, 1, target_m1),
        "uncompensated_mode0": _marginal_l1(result.psi, 0, target_m0),
        "uncompensated_mode1": _marginal_l1(result.psi, 1, target_m1),
    }

    report = _base_report(cfg, par, profiles)
    report.update(
        {
            "experiment": "swap_gkp",
            "schedule": _schedule_echo(schedule),
            "swap_phases": {
                "phi0_if_rad": reduce_phase(phi0_if),
                "phi1_if_rad": reduce_phase(phi1_if),
                "compensation_mode0_rad": comp0,
                "compensation_mode1_rad": comp1,
            },
            "phase_gate": phase_gate_info,
            "infidelity_amplitude": 1.0 - fid.amplitude,
            "infidelity_probability": 1.0 - fid.probability,
            "infidelity_amplitude_uncompensated": 1.0 - fid_raw.amplitude,
            "marginal_l1": l1,
            "max_norm_drift": result.max_norm_drift,
        }
    )
    report["wall_clock_s"] = time.perf_counter() - t_start

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_populations_csv(
            result.snapshots,
            ((1, 1), (2, 0), (0, 2)),
            ("mem", "gate"),
            os.path.join(out_dir, "populations.csv"),
        )
        write_profile_csv(profiles.hm, os.path.join(out_dir, "pulse_fc0_down.csv"))
        write_profile_csv(profiles.lm, os.path.join(out_dir, "pulse_fc1_up.csv"))
        stage_states = {
            "fc_in": psi0,
            "fc_out": result.segment_end_states[0],
            "ifc_in": result.segment_end_states[-2] if len(result.segment_end_states) >= 2 else result.segment_end_states[0],
            "ifc_out": result.psi,
            "compensated": psi_comp,
            "target": target,
        }
        for label, state in stage_states.items():
            for mode in (0, 1):
                write_marginal_csv(state, mode, os.path.join(out_dir, f"marginals_{label}_mode{mode}.csv"))
        _write_report(report, os.path.join(out_dir, "report.json"))
    return report


def run_detuning_check(cfg, out_dir=None, with_resonant=True):
    """Static-chain hopping leakage between detuned pairs vs the two-level bound."""
    cfg.validate()
    t_start = time.perf_counter()
    par = derive_parameters(cfg)
    coulomb = par.kappa_tilde * par.mass * par.omega_m  # e^2/(4 pi eps0 d^3)
    freq = {"h": par.omega_h, "l": par.omega_l, "m": par.omega_m}
    duration = par.t_b if par.t_b > 0 else 579e-6

    pairs = [("h", "l"), ("h", "m"), ("m", "l")]
    results = {}
    for name_a, name_b in pairs:
        wa, wb = freq[name_a], freq[name_b]
        kappa_pair = coulomb / (par.mass * np.sqrt(wa * wb))
        spec = HamiltonianSpec(omega0=wa, omega1=wb, kappa=kappa_pair)
        grids = (Grid1D(cfg.grid_points, cfg.grid_span, wa), Grid1D(cfg.grid_points, cfg.grid_span, wb))
        psi0 = product_state(fock_state(0, grids[0]), fock_state(1, grids[1]))
        n_steps = max(1, int(round(duration / (cfg.hold_dt_ns * 1e-9))))
        schedule = Schedule([Segment(duration, n_steps, Hold(wa), Hold(wb), hopping=True)])
        stride = max(1, int(round(0.2e-6 / (cfg.hold_dt_ns * 1e-9))))
        res = propagate(
            psi0, schedule, spec,
            order=cfg.propagator_order,
            snapshot_stride=stride,
            track_pairs=((0, 1), (1, 0)),
            track_bases={"mem": (wa, wb)},
        )
        transfer = max(s.populations[("mem", (1, 0))] for s in res.snapshots)
        delta = abs(wa - wb)
        bound = kappa_pair**2 / (kappa_pair**2 + delta**2)
        results[f"{name_a}_{name_b}"] = {
            "kappa_pair_rad_s": kappa_pair,
            "detuning_rad_s": delta,
            "max_transfer": transfer,
            "rabi_bound": bound,
            "ratio_to_bound": transfer / bound if bound > 0 else float("inf"),
        }

    if with_resonant:
        wm = par.omega_m
        kappa_res = coulomb / (par.mass * wm)
        spec = HamiltonianSpec(omega0=wm, omega1=wm, kappa=kappa_res)
        grids = (Grid1D(cfg.grid_points, cfg.grid_span, wm), Grid1D(cfg.grid_points, cfg.grid_span, wm))
        psi0 = product_state(fock_state(0, grids[0]), fock_state(1, grids[1]))
        dur = np.pi / kappa_res
        n_steps = max(1, int(round(dur / (cfg.hold_dt_ns * 1e-9))))
        schedule = Schedule([Segment(dur, n_steps, Hold(wm), Hold(wm), hopping=True)])
        res = propagate(
            psi0, schedule, spec,
            order=cfg.propagator_order,
            snapshot_stride=10**9,
            track_pairs=((0, 1), (1, 0)),
            track_bases={"mem": (wm, wm)},
        )
        results["resonant_m_m"] = {
            "kappa_pair_rad_s": kappa_res,
            "duration_s": dur,
            "transfer_at_pi_over_kappa": res.snapshots[-1].populations[("mem", (1, 0))],
        }

    report = {
        "package_version": __version__,
        "experiment": "detune_check",
        "config": asdict(cfg),
        "hold_duration_s": duration,
        "pairs": results,
        "wall_clock_s": time.perf_counter() - t_start,
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_report(report, os.path.join(out_dir, "report.json"))
    return report


def run_adiabaticity_table(cfg, out_dir=None):
    """Midpoint adiabaticity metric, its small-amplitude bound, and cycle counts."""
    cfg.validate()
    par = derive_parameters(cfg)
    profiles = make_odb_profiles(cfg, par)
    rows = {}
    for label, prof in (("fc_h_to_m_down", profiles.hm), ("fc_l_to_m_up", profiles.lm)):
        rows[label] = {
            "metric_n": {str(n): adiabaticity_metric(prof, n) for n in (1, 10, 100)},
            "small_g_bound_n1": adiabaticity_small_g_bound(prof, 1),
            "oscillation_cycles": oscillation_cycles(prof),
        }
    report = {
        "package_version": __version__,
        "experiment": "adiabaticity",
        "config": asdict(cfg),
        "ramps": rows,
        "fc_rate": fc_rate(cfg),
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_report(report, os.path.join(out_dir, "report.json"))
    return report


def fc_rate(cfg):
    """Conversion rate (omega_h - omega_m)/T_FC in cyclic kHz per microsecond."""
    rate = (cfg.omega_h_mhz - cfg.omega_m_mhz) * 1e3 / cfg.t_fc_us
    return {"rate_khz_per_us": rate, "reference_khz_per_us": 57.0}


def export_pulses(cfg, out_dir, samples=1000):
    """Write the two conversion ramps as CSV files."""
    cfg.validate()
    par = derive_parameters(cfg)
    profiles = make_odb_profiles(cfg, par)
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for label, prof in (("pulse_fc0_down", profiles.hm), ("pulse_fc1_up", profiles.lm)):
        path = os.path.join(out_dir, f"{label}.csv")
        write_profile_csv(prof, path, samples=samples)
        paths[label] = path
    return paths


def run_convergence(cfg, which="hom", out_dir=None, base_report=None):
    """Rerun an experiment at half step and doubled grid; report infidelity shifts."""
    runner = run_hom if which == "hom" else run_swap_gkp
    metric = "infidelity_probability" if which == "hom" else "infidelity_amplitude"
    base_cfg = replace(cfg, include_baseline=False)
    base = base_report if base_report is not None else runner(base_cfg)
    half = runner(replace(base_cfg, dt_ns=cfg.dt_ns / 2.0, hold_dt_ns=cfg.hold_dt_ns / 2.0))
    fine = runner(replace(base_cfg, grid_points=cfg.grid_points * 2))
    report = {
        "package_version": __version__,
        "experiment": f"convergence_{which}",
        "metric": metric,
        "base": base[metric],
        "half_dt": half[metric],
        "double_grid": fine[metric],
        "delta_half_dt": abs(half[metric] - base[metric]),
        "delta_double_grid": abs(fine[metric] - base[metric]),
        "wall_clock_s": half["wall_clock_s"] + fine["wall_clock_s"],
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_report(report, os.path.join(out_dir, "report.json"))
    return report


# acceptance-style gates used by the CLI --assert flag
def gate_checks(report):
    """(name, passed, value, threshold) rows for the experiment's headline numbers."""
    checks = []
    exp = report.get("experiment")
    if exp == "hom":
        pops = report["final_populations"]
        checks.append(("pop_2_0", abs(pops["mem_2_0"] - 0.5) <= 0.01, pops["mem_2_0"], "0.5 +- 0.01"))
        checks.append(("pop_0_2", abs(pops["mem_0_2"] - 0.5) <= 0.01, pops["mem_0_2"], "0.5 +- 0.01"))
        checks.append(("pop_1_1", pops["mem_1_1"] <= 0.01, pops["mem_1_1"], "<= 0.01"))
        inf = report["infidelity_probability"]
        checks.append(("hom_infidelity", inf <= 5e-4, inf, "<= 5e-4"))
        mid = report["mid_gate"]["mem_1_1_at_t_fc"]
        checks.append(("mid_gate_overlap", abs(mid - 0.99379) <= 0.002, mid, "0.99379 +- 0.002"))
    elif exp == "swap_gkp":
        inf = report["infidelity_amplitude"]
        checks.append(("swap_infidelity", inf <= 1e-2, inf, "<= 1e-2"))
        for mode in (0, 1):
            l1 = report["marginal_l1"][f"compensated_mode{mode}"]
            checks.append((f"marginal_l1_mode{mode}", l1 <= 0.05, l1, "<= 0.05"))
    elif exp == "detune_check":
        hl = report["pairs"]["h_l"]
        checks.append(("hl_transfer", hl["max_transfer"] <= 1e-5, hl["max_transfer"], "<= 1e-5"))
        checks.append(
            ("hl_vs_bound", 0.5 <= hl["ratio_to_bound"] <= 2.0, hl["ratio_to_bound"], "in [0.5, 2]")
        )
    elif exp == "adiabaticity":
        down = report["ramps"]["fc_h_to_m_down"]["metric_n"]["1"]
        up = report["ramps"]["fc_l_to_m_up"]["metric_n"]["1"]
        cyc = report["ramps"]["fc_l_to_m_up"]["oscillation_cycles"]
        checks.append(("metric_down", abs(down / 6e-4 - 1) <= 0.1, down, "6e-4 +- 10%"))
        checks.append(("metric_up", abs(up / 7e-4 - 1) <= 0.1, up, "7e-4 +- 10%"))
        checks.append(("cycles", abs(cyc / 9.0 - 1) <= 0.05, cyc, "9 +- 5%"))
    elif exp and exp.startswith("convergence"):
        tol = 5e-4 if exp.endswith("hom") else 1e-2
        checks.append(
            ("delta_half_dt", report["delta_half_dt"] <= 0.1 * tol, report["delta_half_dt"], f"<= {0.1 * tol:g}")
        )
        checks.append(
            (
                "delta_double_grid",
                report["delta_double_grid"] <= 0.1 * tol,
                report["delta_double_grid"],
                f"<= {0.1 * tol:g}",
            )
        )
    return checks


def _write_report(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
