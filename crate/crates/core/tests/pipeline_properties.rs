mod common;

use std::f64::consts::PI;

use common::{disk, lens, lens_area};
use ellipse_bound::baseline::ywcc16;
use ellipse_bound::exec::Execution;
use ellipse_bound::linalg::{Mat2, Vec2};
use ellipse_bound::mvee::DEFAULT_EPS;
use ellipse_bound::pipeline::{bound_intersection, bound_until_converged, RefineOptions};
use ellipse_bound::sampling::sample_region;
use ellipse_bound::scenario::gen_scenario;
use proptest::prelude::*;

fn opts(m0: usize) -> RefineOptions {
    RefineOptions { m0, exec: Execution::Sequential, ..RefineOptions::default() }
}

#[test]
fn single_ellipse_has_one_trace_entry() {
    let r = bound_until_converged(&[disk(0.0, 0.0, 1.0)], &opts(8)).unwrap();
    assert_eq!(r.area_trace.len(), 1);
    assert!((r.area() - PI).abs() < 1e-12);
}

#[test]
fn lens_bound_lies_between_lens_and_disk() {
    let r = bound_intersection(&lens(), 16, DEFAULT_EPS).unwrap();
    assert!(r.area() >= lens_area() && r.area() < PI);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bound_contains_region_samples(m in 1usize..8, seed in any::<u64>()) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let r = bound_until_converged(&e, &opts(8)).unwrap();
        let tol = (1.0 + DEFAULT_EPS).sqrt() - 1.0;
        for x in sample_region(&e, 10_000, seed, Execution::Parallel).unwrap() {
            prop_assert!(r.ellipse.contains(&x, tol));
        }
        if let Some(p) = &r.polygon {
            for v in &p.vertices {
                prop_assert!(r.ellipse.contains(v, tol));
            }
        }
    }

    #[test]
    fn area_trace_never_increases(m in 2usize..8, seed in any::<u64>()) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let o = RefineOptions { area_tol: 0.0, k_max: 4, ..opts(8) };
        let r = bound_until_converged(&e, &o).unwrap();
        prop_assert_eq!(r.area_trace.len(), if r.polygon.is_some() { 4 } else { 1 });
        for w in r.area_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9));
        }
    }

    #[test]
    fn rigid_motion_moves_the_bound(
        m in 2usize..6,
        seed in any::<u64>(),
        angle in 0.0..(2.0 * PI),
        shift in (-20.0..20.0f64, -20.0..20.0f64),
    ) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let (s, c) = angle.sin_cos();
        let rot = Mat2::new(c, -s, s, c);
        let shift = Vec2::new(shift.0, shift.1);
        let moved: Vec<_> = e.iter().map(|k| k.transformed(&rot, &shift).unwrap()).collect();
        let a = bound_until_converged(&e, &opts(8)).unwrap();
        let b = bound_until_converged(&moved, &opts(8)).unwrap();
        prop_assert!((a.area() - b.area()).abs() <= 1e-6 * a.area());
        let want = rot * a.ellipse.center() + shift;
        prop_assert!((b.ellipse.center() - want).norm() <= 1e-4 * a.ellipse.scale());
    }

    #[test]
    fn baseline_contains_its_kept_points(m in 2usize..6, seed in any::<u64>(), samples in 8usize..64) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let r = ywcc16(&e, samples, DEFAULT_EPS).unwrap();
        if let Some(ell) = r.ellipse() {
            let tol = (1.0 + DEFAULT_EPS).sqrt() - 1.0;
            for x in &r.kept {
                prop_assert!(ell.contains(x, tol));
            }
        }
    }

    #[test]
    fn baseline_shrinks_between_m_and_eight_m(m in 2usize..6, seed in any::<u64>()) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let coarse = ywcc16(&e, 16, DEFAULT_EPS).unwrap();
        let fine = ywcc16(&e, 128, DEFAULT_EPS).unwrap();
        if let (Some(c), Some(f)) = (coarse.ellipse(), fine.ellipse()) {
            prop_assert!(f.area() <= c.area());
        }
    }

    #[test]
    fn proposed_never_degenerates(m in 1usize..10, seed in any::<u64>(), m0 in 3usize..40) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        prop_assert!(bound_intersection(&e, m0, DEFAULT_EPS).is_ok());
    }
}
