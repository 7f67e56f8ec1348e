"""Headline acceptance runs: the two experiment reproductions at reference
parameters, calibration identities, detuning suppression, adiabaticity, the
fast property suite, and the convergence gates.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  The full module takes ~15 minutes (dominated by the doubled-grid
convergence reruns).
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from odbsim.experiments import (
    HOM_PRESET,
    SWAP_PRESET,
    derive_parameters,
    make_odb_profiles,
    run_convergence,
    run_detuning_check,
    run_hom,
    run_swap_gkp,
)
from odbsim.symplectic import ion_mass, kappa_from_geometry

TWO_PI = 2.0 * np.pi


def _line(name, passed, detail):
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return passed


@pytest.fixture(scope="session")
def hom_report():
    return run_hom(dataclasses.replace(HOM_PRESET))


@pytest.fixture(scope="session")
def swap_report():
    return run_swap_gkp(dataclasses.replace(SWAP_PRESET))


@pytest.fixture(scope="session")
def detune_report():
    return run_detuning_check(dataclasses.replace(HOM_PRESET))


@pytest.fixture(scope="session")
def hom_convergence(hom_report):
    return run_convergence(dataclasses.replace(HOM_PRESET), which="hom", base_report=hom_report)


@pytest.fixture(scope="session")
def swap_convergence(swap_report):
    return run_convergence(dataclasses.replace(SWAP_PRESET), which="swap", base_report=swap_report)


@pytest.mark.slow
def test_hom_populations(hom_report):
    pops = hom_report["final_populations"]
    ok = (
        abs(pops["mem_2_0"] - 0.5) <= 0.01
        and abs(pops["mem_0_2"] - 0.5) <= 0.01
        and pops["mem_1_1"] <= 0.01
    )
    assert _line(
        "HOM populations",
        ok,
        f"P(2,0)={pops['mem_2_0']:.5f} P(0,2)={pops['mem_0_2']:.5f} "
        f"P(1,1)={pops['mem_1_1']:.2e} (want 0.5 +- 0.01, <= 0.01)",
    )


@pytest.mark.slow
def test_hom_runtime(hom_report):
    wall = hom_report["wall_clock_s"]
    assert _line("HOM runtime", wall <= 900.0, f"{wall:.0f} s (want <= 900 s)")


@pytest.mark.slow
def test_hom_infidelity(hom_report):
    inf = hom_report["infidelity_probability"]
    assert _line("HOM infidelity vs analytic target", inf <= 5e-4, f"{inf:.3e} (want <= 5e-4)")


@pytest.mark.slow
def test_mid_gate_overlap(hom_report):
    # the conversion is population-preserving, so the memory-basis (1,1)
    # population right after the ramp equals the closed-form basis overlap
    # 0.99379 (which also fixes the gate-basis population at t = 0)
    mid = hom_report["mid_gate"]
    oracle = 0.99379
    ok = (
        abs(mid["mem_1_1_at_t_fc"] - oracle) <= 0.002
        and abs(mid["gate_1_1_at_t0"] - oracle) <= 0.002
        and mid["gate_1_1_at_t_fc"] >= 0.998
    )
    assert _line(
        "mid-gate overlap",
        ok,
        f"mem(1,1)@T_FC={mid['mem_1_1_at_t_fc']:.5f} gate(1,1)@0={mid['gate_1_1_at_t0']:.5f} "
        f"(want {oracle} +- 0.002)",
    )


@pytest.mark.slow
def test_hom_analytic_numeric_cross_validation(hom_report):
    # hopping disabled during the ramps: grid propagation must agree with
    # the Fock-space transform model
    inf = hom_report["baseline_no_hopping_during_fc"]["analytic_model_infidelity"]
    assert _line("analytic vs numeric cross-check", inf <= 1e-4, f"{inf:.3e} (want <= 1e-4)")


@pytest.mark.slow
def test_swap_gkp_infidelity(swap_report):
    inf = swap_report["infidelity_amplitude"]
    assert _line("GKP SWAP infidelity", inf <= 1e-2, f"{inf:.3e} (want <= 1e-2)")


@pytest.mark.slow
def test_swap_gkp_marginals(swap_report):
    l1 = swap_report["marginal_l1"]
    ok = l1["compensated_mode0"] <= 0.05 and l1["compensated_mode1"] <= 0.05
    better = (
        l1["uncompensated_mode0"] > l1["compensated_mode0"]
        and l1["uncompensated_mode1"] > l1["compensated_mode1"]
    )
    assert _line(
        "GKP SWAP marginals",
        ok and better,
        f"L1 comp=({l1['compensated_mode0']:.3f}, {l1['compensated_mode1']:.3f}) "
        f"uncomp=({l1['uncompensated_mode0']:.3f}, {l1['uncompensated_mode1']:.3f}) (want <= 0.05, uncomp larger)",
    )


def test_calibration_identity():
    kappa = kappa_from_geometry(43.8e-6, ion_mass(40.0), TWO_PI * 2.42e6)
    ref = TWO_PI * 432.0
    theta = kappa * 579e-6 / 2.0
    ok = abs(kappa / ref - 1.0) <= 0.005 and abs(theta / (math.pi / 4) - 1.0) <= 0.005
    assert _line(
        "calibration identity",
        ok,
        f"kappa={kappa / TWO_PI:.2f} Hz (want 432 +- 0.5%), kappa*T_B/2={theta:.5f} (want pi/4 +- 0.5%)",
    )


def test_adiabaticity_table():
    par = derive_parameters(HOM_PRESET)
    profiles = make_odb_profiles(HOM_PRESET, par)
    from odbsim.pulses import adiabaticity_metric, oscillation_cycles

    down = adiabaticity_metric(profiles.hm, 1)
    up = adiabaticity_metric(profiles.lm, 1)
    cycles = oscillation_cycles(profiles.lm)
    ok = (
        abs(down / 6e-4 - 1.0) <= 0.1
        and abs(up / 7e-4 - 1.0) <= 0.1
        and abs(cycles / 9.0 - 1.0) <= 0.05
    )
    assert _line(
        "adiabaticity table",
        ok,
        f"down={down:.2e} (6e-4 +- 10%), up={up:.2e} (7e-4 +- 10%), cycles={cycles:.2f} (9 +- 5%)",
    )


@pytest.mark.slow
def test_detuning_suppression(detune_report):
    hl = detune_report["pairs"]["h_l"]
    ok = hl["max_transfer"] <= 1e-5 and 0.5 <= hl["ratio_to_bound"] <= 2.0
    assert _line(
        "detuning suppression",
        ok,
        f"max transfer={hl['max_transfer']:.2e} (want <= 1e-5), "
        f"ratio to Rabi bound={hl['ratio_to_bound']:.3f} (want in [0.5, 2])",
    )
    res = detune_report["pairs"]["resonant_m_m"]["transfer_at_pi_over_kappa"]
    assert res >= 0.999


def test_property_suite_under_one_minute():
    """Compressed invariant sweep; all pieces must finish within a minute."""
    from odbsim.lewis_riesenfeld import bogoliubov_at, ermakov_forward_solve, fc_matrix, theta_phase
    from odbsim.pulses import BProfile, RampShape, make_b_profile
    from odbsim.states import Grid1D, fock_state, product_state
    from odbsim.symplectic import bs_matrix, commutation_defect, ps_matrix
    from odbsim.tdse import HamiltonianSpec, Hold, Ramp, Schedule, Segment, propagate

    t0 = time.perf_counter()
    w_h, w_l, w_m = TWO_PI * 2.64e6, TWO_PI * 2.20e6, TWO_PI * 2.42e6
    t_fc = 4e-6
    rng = np.random.default_rng(42)

    # Bogoliubov constraint: 20 random profiles x 1000 times
    for _ in range(20):
        g = rng.uniform(0.0, 0.5)
        sigma = rng.uniform(2.0, 10.0)
        direction = rng.choice(["up", "down"])
        wi = rng.uniform(1e6, 3e7)
        ratio = (1.0 - g) if direction == "up" else (1.0 + g)
        prof = BProfile(RampShape(g=g, sigma=sigma, duration=t_fc, direction=direction), wi, wi / ratio**2)
        ts = np.linspace(0.0, t_fc, 1000)
        b = prof.b(ts)
        bdot = prof.bdot(ts)
        pref = 0.5 * np.sqrt(prof.omega_i / prof.omega_f)
        eta = pref * (1.0 / b + (prof.omega_f / prof.omega_i) * b - 1j * bdot / prof.omega_i)
        zeta = pref * (1.0 / b - (prof.omega_f / prof.omega_i) * b - 1j * bdot / prof.omega_i)
        assert np.max(np.abs(np.abs(eta) ** 2 - np.abs(zeta) ** 2 - 1.0)) <= 1e-12
        # Ermakov residual of the designed pulse
        resid = prof.bddot(ts) + prof.omega_sq(ts) * b - prof.omega_i**2 / b**3
        assert np.max(np.abs(resid)) <= 1e-8 * prof.omega_i**2

    # conversion-phase symmetry and pure-phase composition
    hm = make_b_profile(w_h, w_m, t_fc, 6.0)
    lm = make_b_profile(w_l, w_m, t_fc, 6.0)
    assert abs(theta_phase(hm) - theta_phase(hm.reverse())) <= 1e-9
    assert abs(theta_phase(lm) - theta_phase(lm.reverse())) <= 1e-9
    for prof in (hm, lm):
        comp = fc_matrix(prof.reverse()) @ fc_matrix(prof)
        boundary = abs(bogoliubov_at(prof, t_fc).zeta)
        assert max(abs(comp[0, 1]), abs(comp[1, 0])) <= 2 * boundary + 1e-12

    # commutation metric over random transforms
    for _ in range(100):
        m = (
            ps_matrix(*rng.uniform(-np.pi, np.pi, 2))
            @ bs_matrix(rng.uniform(0, np.pi))
            @ ps_matrix(*rng.uniform(-np.pi, np.pi, 2))
        )
        assert commutation_defect(m) <= 1e-12

    # propagator norm drift and hopping-off conversion population transfer
    g0, g1 = Grid1D(128, 10.0, w_h), Grid1D(128, 10.0, w_l)
    spec = HamiltonianSpec(w_h, w_l, kappa=2714.336)
    from odbsim.states import joint_fock_population

    for n in (1, 5):
        psi0 = product_state(fock_state(n, g0), fock_state(n, g1))
        sched = Schedule([Segment(t_fc, 2000, Ramp(hm), Ramp(lm), hopping=False)])
        res = propagate(psi0, sched, spec, track_bases={})
        assert res.max_norm_drift <= 1e-8
        assert joint_fock_population(res.psi, (w_m, w_m), (n, n)) >= 0.999

    # resonant two-mode hopping matches the Rabi oracle up to 2 T_B
    gm0, gm1 = Grid1D(128, 10.0, w_m), Grid1D(128, 10.0, w_m)
    spec_m = HamiltonianSpec(w_m, w_m, kappa=2714.336)
    dur = 2 * 579e-6
    sched = Schedule([Segment(dur, 57900, Hold(w_m), Hold(w_m), hopping=True)])
    psi0 = product_state(fock_state(0, gm0), fock_state(1, gm1))
    res = propagate(
        psi0, sched, spec_m, snapshot_stride=2000,
        track_pairs=((0, 1), (1, 0)), track_bases={"mem": (w_m, w_m)},
    )
    for snap in res.snapshots:
        assert snap.populations[("mem", (1, 0))] == pytest.approx(
            np.sin(2714.336 * snap.t / 2) ** 2, abs=1e-4
        )

    elapsed = time.perf_counter() - t0
    assert _line("property suite", elapsed < 60.0, f"{elapsed:.1f} s (want < 60 s)")


@pytest.mark.slow
def test_convergence_gate_hom(hom_convergence):
    tol = 5e-4
    d1, d2 = hom_convergence["delta_half_dt"], hom_convergence["delta_double_grid"]
    ok = d1 <= 0.1 * tol and d2 <= 0.1 * tol
    assert _line(
        "HOM convergence gate",
        ok,
        f"half-dt delta={d1:.2e}, double-grid delta={d2:.2e} (want <= {0.1 * tol:.1e})",
    )


@pytest.mark.slow
def test_convergence_gate_swap(swap_convergence):
    tol = 1e-2
    d1, d2 = swap_convergence["delta_half_dt"], swap_convergence["delta_double_grid"]
    ok = d1 <= 0.1 * tol and d2 <= 0.1 * tol
    assert _line(
        "SWAP convergence gate",
        ok,
        f"half-dt delta={d1:.2e}, double-grid delta={d2:.2e} (want <= {0.1 * tol:.1e})",
    )
