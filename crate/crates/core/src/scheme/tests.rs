use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diagnostics::total_energy;
use crate::grid::{cross_b, div_face_to_cell, face_inner, CellField, FaceField, GridSpec};
use crate::physics::{MobilityCase, PhysParams};

fn stepper(g: &GridSpec, p: &PhysParams, dt: f64, settings: StepperSettings) -> Stepper {
    Stepper::new(*g, p.clone(), dt, settings).unwrap()
}

fn frozen_flow() -> StepperSettings {
    StepperSettings {
        freeze_velocity: true,
        ..Default::default()
    }
}

fn l2_diff(g: &GridSpec, a: &CellField, b: &CellField) -> f64 {
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum();
    (s * g.cell_volume()).sqrt()
}

#[test]
fn pure_phases_are_fixed_points() {
    let g = GridSpec::unit_square(16).unwrap();
    for b in [0.0, 1.0, 3.0] {
        for phase in [1.0, -1.0] {
            let p = PhysParams { b, ..Default::default() };
            let s = stepper(&g, &p, 0.01, StepperSettings::default());
            let st = State::at_rest(&g, &p, CellField::constant(&g, phase)).unwrap();
            let (next, d) = s.advance(&st).unwrap();
            assert!(next.phase.values.iter().all(|v| (v - phase).abs() <= 1e-12));
            assert!(next.chem.max_abs() <= 1e-12);
            assert!(next.vel.max_abs() <= 1e-12);
            assert!(next.current.max_abs() <= 1e-12);
            assert!(next.pressure.max_abs() <= 1e-12);
            assert_eq!(d.energy_after.total, 0.0);
        }
    }
}

#[test]
fn stripe_phase_mass_is_conserved() {
    let g = GridSpec::new(128, 4, 1.0, 4.0 / 128.0).unwrap();
    let p = PhysParams {
        eps: 0.05,
        ..Default::default()
    };
    let s = stepper(&g, &p, 0.01, frozen_flow());
    let mut st = State::at_rest(&g, &p, init_stripe(&g, 0.08, 0.3, 0.7).unwrap()).unwrap();
    let m0 = st.phase.integral(&g);
    for _ in 0..10 {
        let (phase, chem, _) = s.ch_step(&st).unwrap();
        assert!((phase.integral(&g) - st.phase.integral(&g)).abs() <= 1e-10);
        st.phase = phase;
        st.chem = chem;
    }
    assert!((st.phase.integral(&g) - m0).abs() <= 1e-10);
}

#[test]
fn cahn_hilliard_step_halving_is_second_order_locally() {
    let g = GridSpec::unit_square(16).unwrap();
    let p = PhysParams {
        eps: 0.1,
        ..Default::default()
    };
    let phase = init_circle(&g, 0.12, (0.45, 0.55), 0.25, 1.0).unwrap();
    let st = State::at_rest(&g, &p, phase).unwrap();
    // dt well below 1 / (gamma eps M |lambda_max|^2) ~ 2e-5 on this grid
    let settings = StepperSettings {
        tol_ch: 1e-14,
        ..frozen_flow()
    };
    let mut gaps = Vec::new();
    for dt in [1e-6, 5e-7, 2.5e-7] {
        let full = stepper(&g, &p, dt, settings.clone()).advance(&st).unwrap().0;
        let half = stepper(&g, &p, 0.5 * dt, settings.clone());
        let two = half.advance(&half.advance(&st).unwrap().0).unwrap().0;
        gaps.push(l2_diff(&g, &full.phase, &two.phase));
    }
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "{gaps:?}");
    }
}

#[test]
fn current_vanishes_without_sources() {
    let g = GridSpec::unit_square(16).unwrap();
    let p = PhysParams::default();
    let s = stepper(&g, &p, 0.01, StepperSettings::default());
    let phase = CellField::constant(&g, 1.0);
    let chem = CellField::zeros(&g);
    let (j, e, _) = s.current_step(&phase, &phase, &chem, &FaceField::zeros(&g)).unwrap();
    assert_eq!(j.max_abs(), 0.0);
    assert_eq!(e.max_abs(), 0.0);
}

fn rotation(g: &GridSpec) -> FaceField {
    FaceField::from_fn(g, |x, y| (-(y - 0.5), x - 0.5))
}

#[test]
fn rigid_rotation_current_is_projected_ohm_law() {
    let g = GridSpec::unit_square(32).unwrap();
    let p = PhysParams::default();
    let dt = 0.01;
    let s = stepper(&g, &p, dt, StepperSettings::default());
    let phase = CellField::constant(&g, 1.0);
    let chem = CellField::zeros(&g);
    let u = rotation(&g);
    let (j, e, _) = s.current_step(&phase, &phase, &chem, &u).unwrap();
    assert!(div_face_to_cell(&g, &j).unwrap().max_abs() <= 1e-10);
    assert_eq!(j.boundary_max_abs(), 0.0);
    assert!(e.mean().abs() <= 1e-12);
    // uniform coefficient 1 + dt b^2: J is the projection of u x B, scaled
    let mut expect = s.project(&cross_b(&g, &u, 1.0).unwrap()).unwrap();
    expect.scale(1.0 / (1.0 + dt));
    let mut diff = j.clone();
    diff.axpy(-1.0, &expect);
    assert!(diff.max_abs() <= 1e-9 * expect.max_abs(), "{}", diff.max_abs());
    assert!(j.max_abs() > 0.1);
}

#[test]
fn doubling_conductivity_doubles_current() {
    let g = GridSpec::unit_square(24).unwrap();
    let phase = init_circle(&g, 0.05, (0.5, 0.5), 0.25, 1.0).unwrap();
    let u = rotation(&g);
    let run = |sigma: f64| {
        let p = PhysParams {
            sigma1: sigma,
            sigma2: sigma,
            ..Default::default()
        };
        let s = stepper(&g, &p, 1e-8, StepperSettings::default());
        let chem = chemical_potential(&g, &p, &phase).unwrap();
        s.current_step(&phase, &phase, &chem, &u).unwrap()
    };
    let (j1, e1, _) = run(1.0);
    let (j2, e2, _) = run(2.0);
    let mut dj = j2.clone();
    dj.axpy(-2.0, &j1);
    assert!(dj.max_abs() <= 1e-6 * j2.max_abs());
    let mut de = e2.clone();
    de.axpy(-1.0, &e1);
    assert!(de.max_abs() <= 1e-6 * e1.max_abs());
    assert!(e1.max_abs() > 1e-3);
}

#[test]
fn navier_stokes_at_rest_stays_at_rest() {
    let g = GridSpec::unit_square(16).unwrap();
    let p = PhysParams::default();
    let s = stepper(&g, &p, 0.01, StepperSettings::default());
    let phase = CellField::constant(&g, -1.0);
    let st = State::at_rest(&g, &p, phase.clone()).unwrap();
    let (u, pr, _) = s
        .ns_step(&st, &phase, &CellField::zeros(&g), &FaceField::zeros(&g))
        .unwrap();
    assert!(u.max_abs() <= 1e-14);
    assert!(pr.max_abs() <= 1e-14);
}

#[test]
fn stokes_vortex_kinetic_energy_decays() {
    let g = GridSpec::unit_square(32).unwrap();
    let p = PhysParams {
        b: 0.0,
        ..Default::default()
    };
    let settings = StepperSettings {
        freeze_phase: true,
        ..Default::default()
    };
    let s = stepper(&g, &p, 0.01, settings);
    let mut st = State::at_rest(&g, &p, CellField::constant(&g, 1.0)).unwrap();
    st.vel = init_vortex(&g).unwrap();
    let mut ke = 0.5 * face_inner(&g, &st.vel, &st.vel);
    for _ in 0..10 {
        let (next, d) = s.advance(&st).unwrap();
        let k = d.energy_after.kinetic;
        assert!(k < ke, "{k} !< {ke}");
        assert!(d.div_u_residual <= 1e-10);
        ke = k;
        st = next;
    }
}

#[test]
fn rounded_square_step_is_stable_and_charge_free() {
    let g = GridSpec::unit_square(64).unwrap();
    let p = PhysParams::default();
    let s = stepper(&g, &p, 0.01, StepperSettings::default());
    let mut st = State::at_rest(&g, &p, init_rounded_square(&g, p.eps).unwrap()).unwrap();
    st.vel = init_vortex(&g).unwrap();
    for _ in 0..3 {
        let (next, d) = s.advance(&st).unwrap();
        assert!(d.energy_after.total <= d.energy_before.total);
        assert!(d.charge_residual <= 1e-10);
        assert!(d.div_u_residual <= 1e-9);
        assert!(d.dissipation_dt >= 0.0);
        st = next;
    }
    assert!(st.current.max_abs() > 0.0);
}

#[test]
fn vortex_samples_formula() {
    let g = GridSpec::unit_square(32).unwrap();
    let raw = FaceField::from_fn(&g, vortex_velocity);
    assert_eq!(raw.boundary_max_abs(), 0.0);
    // x^2 (1-x)^2 = 0.0625 and y (1-y) (1-2y) = 0.25 * 0.75 * 0.5
    let expect = 0.0625 * 0.25 * 0.75 * 0.5;
    let (ux, _) = vortex_velocity(0.5, 0.25);
    assert!((ux - expect).abs() <= 1e-18);
    // (0.5, 0.25) lies on no face of a 32 grid exactly; check one that does
    let (x, y) = g.xface_center(16, 7);
    assert!((raw.xs[g.xface(16, 7)] - vortex_velocity(x, y).0).abs() == 0.0);

    let u = init_vortex(&g).unwrap();
    assert_eq!(u.boundary_max_abs(), 0.0);
    assert!(div_face_to_cell(&g, &u).unwrap().max_abs() <= 1e-12);
    let mut d = u.clone();
    d.axpy(-1.0, &raw);
    assert!(d.max_abs() <= 1e-3 * raw.max_abs());
    assert!(init_vortex(&GridSpec::new(16, 16, 2.0, 1.0).unwrap()).is_err());
}

#[test]
fn rounded_square_samples() {
    let g = GridSpec::unit_square(64).unwrap();
    let phi = init_rounded_square(&g, 0.0125).unwrap();
    assert!(phi.at(31, 31) < -0.999);
    assert!(phi.at(0, 0) > 0.999);
    // an even grid has no cell at (0.8, 0.5); use a 10-cell grid
    let g10 = GridSpec::unit_square(10).unwrap();
    let phi = init_rounded_square(&g10, 0.05).unwrap();
    let (x, y) = g10.cell_center(8, 4);
    assert!((x - 0.85).abs() < 1e-15 && (y - 0.45).abs() < 1e-15);
    let d = (0.35f64.powi(4) + 0.05f64.powi(4)).powf(0.25);
    assert!((phi.at(8, 4) - ((d - 0.3) / (2f64.sqrt() * 0.05)).tanh()).abs() < 1e-15);
    assert!(init_rounded_square(&g, 0.0).is_err());
}

#[test]
fn two_bubble_samples() {
    let g = GridSpec::unit_square(100).unwrap();
    let phi = init_two_bubbles(&g, 0.005).unwrap();
    assert!((phi.at(5, 95) + 1.0).abs() < 1e-12);
    let c1 = g.cell(29, 49);
    assert!(phi.values[c1] > 0.99);
    let c2 = g.cell(69, 49);
    assert!(phi.values[c2] > 0.99);
    assert!(init_two_bubbles(&g, -1.0).is_err());
}

#[test]
fn stepper_rejects_bad_time_step() {
    let g = GridSpec::unit_square(8).unwrap();
    let p = PhysParams::default();
    assert!(Stepper::new(g, p.clone(), 0.0, StepperSettings::default()).is_err());
    assert!(Stepper::new(g, p, f64::NAN, StepperSettings::default()).is_err());
}

fn random_state(g: &GridSpec, p: &PhysParams, s: &Stepper, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = CellField::from_fn(g, |_, _| rng.gen_range(-1.0..1.0));
    let mut st = State::at_rest(g, p, phase).unwrap();
    let raw = FaceField::from_fn(g, |_, _| (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
    st.vel = s.project(&raw).unwrap();
    st
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn energy_never_increases(
        seed in 0u64..1000,
        case in 0usize..3,
        dt in 1e-3f64..0.2,
        b in 0.0f64..3.0,
    ) {
        let g = GridSpec::unit_square(16).unwrap();
        let mobility = [MobilityCase::CaseI, MobilityCase::CaseII, MobilityCase::CaseIII][case];
        let p = PhysParams { eps: 0.1, mobility, b, ..Default::default() };
        let s = stepper(&g, &p, dt, StepperSettings::default());
        let st = random_state(&g, &p, &s, seed);
        let m0 = st.phase.integral(&g);
        let e0 = total_energy(&g, &p, &st).unwrap().total;
        let (next, d) = s.advance(&st).unwrap();
        prop_assert!(d.energy_after.total <= e0 + 1e-9 * e0);
        prop_assert!((next.phase.integral(&g) - m0).abs() <= 1e-12);
        prop_assert!(d.charge_residual <= 1e-10);
        prop_assert!(d.div_u_residual <= 1e-9);
        prop_assert!(next.pressure.mean().abs() <= 1e-12);
        prop_assert!(next.epot.mean().abs() <= 1e-12);
    }
}
