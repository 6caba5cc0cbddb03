mod common;

use common::{relative_deviation, rk4_moments, total_energy};
use qbm::{diagonalize, evolve, hamiltonian_position_block, build_couplings, initial_state, propagator_at, DrivePulse, ModelSpec};

fn two_mode() -> ModelSpec {
    ModelSpec {
        n_modes: 2,
        omega_max: 2.0,
        cutoff: 2.0,
        gamma: 0.5,
        temperature: 1.0,
        drive: DrivePulse::with_duration(1.5, 1.2, 2.5, 0.2),
        ..ModelSpec::default()
    }
}

#[test]
fn closed_form_matches_ode_integration() {
    let spec = two_mode();
    let basis = diagonalize(&hamiltonian_position_block(&spec, &build_couplings(&spec))).unwrap();
    let s0 = initial_state(&spec);
    let reference = rk4_moments(&spec, &[3.0], 1e-3);
    let st = evolve(&s0, &propagator_at(&basis, &spec.drive, 3.0)).unwrap();
    let dev = relative_deviation(st.means(), st.cov(), &reference[0]);
    assert!(dev < 1e-6, "relative deviation {dev:e}");
}

#[test]
fn undriven_energy_is_conserved() {
    let spec = ModelSpec { n_modes: 30, omega_max: 6.0, cutoff: 6.0, gamma: 0.8, temperature: 2.0, ..ModelSpec::default() };
    let basis = diagonalize(&hamiltonian_position_block(&spec, &build_couplings(&spec))).unwrap();
    let s0 = initial_state(&spec);
    let e0 = total_energy(&spec, s0.means(), s0.cov());
    for &t in &[1.0, 7.5, 20.0, 31.0] {
        let st = evolve(&s0, &propagator_at(&basis, &DrivePulse::off(), t)).unwrap();
        let e = total_energy(&spec, st.means(), st.cov());
        assert!(((e - e0) / e0).abs() < 1e-8, "t={t}: {e} vs {e0}");
    }
}

#[test]
fn drive_shift_is_state_independent() {
    let spec = two_mode();
    let basis = diagonalize(&hamiltonian_position_block(&spec, &build_couplings(&spec))).unwrap();
    let p = propagator_at(&basis, &spec.drive, 1.7);
    let free = propagator_at(&basis, &DrivePulse::off(), 1.7);
    let hot = initial_state(&ModelSpec { temperature: 4.0, ..spec.clone() });
    for s0 in [initial_state(&spec), hot] {
        let shift = evolve(&s0, &p).unwrap().means() - evolve(&s0, &free).unwrap().means();
        assert!((shift.rows(0, 3) - &p.i).amax() < 1e-14);
        assert!((shift.rows(3, 3) - &p.idot).amax() < 1e-14);
    }
}
