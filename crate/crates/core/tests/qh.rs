mod common;

use common::*;
use proptest::prelude::*;
use rossby_core::primitive::data::make_qh_initial_data;
use rossby_core::primitive::DataSpec;
use rossby_core::qh::*;
use rossby_core::spectral::*;
use rossby_core::{Error, SolverParams, TimeStep};

fn params() -> SolverParams {
    SolverParams::default()
}

fn fixed(dt: f64) -> SolverParams {
    SolverParams { time_step: TimeStep::Fixed(dt), ..params() }
}

fn qh(r: ScalarField, u: VectorField) -> QhState {
    let pi = ScalarField::zeros(r.grid);
    QhState { t: 0.0, r, u, pi }
}

fn velocity(g: GridSpec, seed: u64, amp: f64) -> VectorField {
    let u = perp_gradient(&smooth_field(g, seed, 3)).unwrap();
    dealias_vector(&u.scale(amp / u.l2_norm())).unwrap()
}

#[test]
fn pressure_examples() {
    let g = grid(32);
    let shear = VectorField::from_fn(g, |_, y| (-y.sin(), 0.0));
    assert!(qh_pressure(&ScalarField::zeros(g), &shear).unwrap().linf_norm() < 1e-15);
    let r = smooth_field(g, 1, 2);
    assert_eq!(qh_pressure(&r, &VectorField::zeros(g)).unwrap().linf_norm(), 0.0);
}

#[test]
fn pressure_residual() {
    let g = grid(64);
    let r = dealias(&smooth_field(g, 2, 3)).unwrap().scale(0.1);
    let u = velocity(g, 3, 0.5);
    let pi = qh_pressure(&r, &u).unwrap();
    let gu = advect_vector(&u, &u).unwrap();
    let f = VectorField { x: gu.x.add(&dealiased_product(&r, &perp(&u).x).unwrap()), y: gu.y.add(&dealiased_product(&r, &perp(&u).y).unwrap()) };
    let div_g = divergence(&f).unwrap();
    let res = laplacian(&pi).unwrap().add(&div_g).l2_norm();
    assert!(res <= 1e-10 * div_g.l2_norm());
    assert!(pi.mean().abs() < 1e-15);
}

#[test]
fn rhs_with_constant_fluctuation_matches_euler() {
    let g = grid(64);
    let u = velocity(g, 4, 0.5);
    let (dr0, du0) = qh_rhs(&qh(ScalarField::zeros(g), u.clone())).unwrap();
    let (dr, du) = qh_rhs(&qh(ScalarField::constant(g, 0.7), u.clone())).unwrap();
    assert!(dr.linf_norm() < 1e-15 && dr0.linf_norm() == 0.0);
    assert!(max_abs_diff(&du.x, &du0.x) < 1e-13 && max_abs_diff(&du.y, &du0.y) < 1e-13);
    let w_rate = curl2(&du0).unwrap();
    let w = curl2(&u).unwrap();
    let expect = advect(&u, &w).unwrap().scale(-1.0);
    assert!(max_abs_diff(&w_rate, &expect) < 1e-12);
    assert!(divergence(&du0).unwrap().linf_norm() < 1e-9);
}

#[test]
fn reduction_to_homogeneous_euler() {
    let g = grid(64);
    let u = velocity(g, 5, 1.0);
    let dt = 0.01;
    let mut s = qh(ScalarField::zeros(g), u.clone());
    let mut w = curl2(&u).unwrap();
    for _ in 0..100 {
        s = step_qh(&s, &fixed(dt)).unwrap().state;
        w = euler_vorticity_step(&w, dt);
    }
    let reference = velocity_of(&w);
    assert!(s.u.sub(&reference).l2_norm() < 1e-8, "{}", s.u.sub(&reference).l2_norm());
}

#[test]
fn shear_is_stationary_and_reversible() {
    let g = grid(32);
    let shear = VectorField::from_fn(g, |_, y| (-y.sin(), 0.0));
    let mut s = qh(ScalarField::zeros(g), shear.clone());
    for _ in 0..100 {
        s = step_qh(&s, &fixed(0.05)).unwrap().state;
    }
    assert!(max_abs_diff(&s.u.x, &shear.x) < 1e-12);
    let s0 = qh(dealias(&smooth_field(g, 6, 3)).unwrap().scale(0.1), velocity(g, 7, 0.5));
    let dev = |dt: f64| {
        let f = step_qh_dt(&s0, &params(), dt).unwrap().state;
        let b = step_qh_dt(&f, &params(), -dt).unwrap().state;
        b.r.sub(&s0.r).l2_norm() + b.u.sub(&s0.u).l2_norm()
    };
    let (e1, e2) = (dev(0.04), dev(0.02));
    assert!(e1 < 1e-5 && e1 / e2 > 6.0, "{e1} {e2}");
}

#[test]
fn step_is_consistent_with_rhs() {
    let g = grid(32);
    let s = qh(dealias(&smooth_field(g, 8, 3)).unwrap().scale(0.2), velocity(g, 9, 0.5));
    let (dr, du) = qh_rhs(&s).unwrap();
    let err = |dt: f64| {
        let n = step_qh_dt(&s, &params(), dt).unwrap().state;
        let mut r = s.r.clone();
        r.axpy(dt, &dr);
        let mut u = s.u.clone();
        u.axpy(dt, &du);
        n.r.sub(&r).l2_norm() + n.u.sub(&u).l2_norm()
    };
    let order = (err(0.02) / err(0.01)).log2();
    assert!((1.7..2.3).contains(&order), "{order}");
}

#[test]
fn conservation_over_unit_time() {
    let g = grid(128);
    let s0 = make_qh_initial_data(g, &DataSpec::default()).unwrap();
    let tr = integrate_qh(&s0, &params(), &[0.5, 1.0]).unwrap();
    let e0 = s0.u.l2_norm();
    let r0 = sup_norm(&s0.r);
    for s in tr.states() {
        assert!((s.u.l2_norm() / e0 - 1.0).abs() < 1e-6);
        assert!(sup_norm(&s.r) <= r0 * (1.0 + 1e-8));
        assert!(divergence(&s.u).unwrap().linf_norm() < 1e-9);
        assert!(s.pi.mean().abs() < 1e-15);
    }
}

#[test]
fn forcing_is_orthogonal_to_velocity() {
    let g = grid(32);
    let u = velocity(g, 10, 1.0);
    let r = smooth_field(g, 11, 3);
    let work = r.mul(&perp(&u).dot(&u));
    assert!(work.linf_norm() < 1e-14 * r.linf_norm() * u.linf_norm().powi(2).max(1.0));
}

#[test]
fn vorticity_residual() {
    let g = grid(64);
    let shear = VectorField::from_fn(g, |_, y| (-y.sin(), 0.0));
    let frames: Vec<QhState> = integrate_qh(&qh(ScalarField::zeros(g), shear), &params(), &[0.1, 0.2, 0.3])
        .unwrap()
        .states()
        .cloned()
        .collect();
    assert!(qh_vorticity_residual(&frames).unwrap() < 1e-12);
    assert!(matches!(qh_vorticity_residual(&frames[..2]), Err(Error::InvalidArgument(_))));
    let s0 = qh(dealias(&smooth_field(g, 12, 3)).unwrap().scale(0.2), velocity(g, 13, 0.5));
    let res = |h: f64| {
        let times: Vec<f64> = (1..=4).map(|i| i as f64 * h).collect();
        let frames: Vec<QhState> = integrate_qh(&s0, &fixed(h / 4.0), &times).unwrap().states().cloned().collect();
        qh_vorticity_residual(&frames).unwrap()
    };
    let (e1, e2) = (res(0.02), res(0.01));
    assert!(e1 / e2 > 3.0 && e1 / e2 < 5.0, "{e1} {e2}");
}

#[test]
fn energy_examples() {
    let g = grid(64);
    let zero = qh_energy(&qh(ScalarField::zeros(g), VectorField::zeros(g))).unwrap();
    assert_eq!(zero.e_total, 0.0);
    let mode = VectorField::from_fn(g, |x, y| ((3.0 * y).sin(), (2.0 * x).cos()));
    let e = qh_energy(&qh(ScalarField::zeros(g), mode.clone())).unwrap();
    let ratio = e.u_besov / e.e_total;
    assert!((0.125..=8.0).contains(&ratio), "{ratio}");
    let e3 = qh_energy(&qh(ScalarField::zeros(g), mode.scale(3.0))).unwrap();
    assert!((e3.e_total - 3.0 * e.e_total).abs() < 1e-12 * e3.e_total);
    assert!((e3.u_besov - 3.0 * e.u_besov).abs() < 1e-12 * e3.u_besov);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_norms_are_equivalent(seed in any::<u64>(), kmax in 1i32..8) {
        let g = grid(64);
        let u = dealias_vector(&perp_gradient(&smooth_field(g, seed, kmax)).unwrap()).unwrap();
        let e = qh_energy(&qh(ScalarField::zeros(g), u)).unwrap();
        let ratio = e.u_besov / e.e_total;
        prop_assert!((0.125..=8.0).contains(&ratio), "{}", ratio);
    }

    #[test]
    fn rhs_is_divergence_free(seed in any::<u64>()) {
        let g = grid(32);
        let s = qh(dealias(&smooth_field(g, seed, 3)).unwrap().scale(0.1), velocity(g, seed ^ 5, 1.0));
        let (_, du) = qh_rhs(&s).unwrap();
        prop_assert!(divergence(&du).unwrap().linf_norm() < 1e-9);
        prop_assert!(du.mean()[0].abs() < 1e-15 && du.mean()[1].abs() < 1e-15);
    }
}
