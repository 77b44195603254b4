use ellipse_bound::arc::{arc_points_subdivided, walk_arcs, ArcWalk};
use ellipse_bound::conic::{EllipseAffine, TOL_ON};
use ellipse_bound::exec::Execution;
use ellipse_bound::intersect::{pair_intersections, reduce_and_collect, TOL_PAIR_RESIDUAL};
use ellipse_bound::linalg::Vec2;
use ellipse_bound::polygon::{build_polygon, intersect_half_planes, BoundingPolygon, TOL_VERIFY};
use ellipse_bound::sampling::{half_widths, sample_region};
use ellipse_bound::scenario::gen_scenario;
use proptest::prelude::*;

/// `None` when a single ellipse bounds the region.
fn setup(m: usize, seed: u64) -> Option<(Vec<EllipseAffine>, ArcWalk)> {
    let e = gen_scenario("p", m, seed).affine().unwrap();
    let r = reduce_and_collect(&e).unwrap();
    if r.active.len() < 2 {
        return None;
    }
    let w = walk_arcs(&e, &r, 8).unwrap();
    Some((e, w))
}

fn polygon_at(e: &[EllipseAffine], w: &ArcWalk, subdivisions: usize) -> (BoundingPolygon, Vec<Vec<Vec2>>) {
    let pts: Vec<Vec<Vec2>> = w
        .arcs
        .iter()
        .map(|a| arc_points_subdivided(a, &e[a.owner], subdivisions))
        .collect();
    (build_polygon(e, &w.arcs, &pts).unwrap(), pts)
}

fn in_region(e: &[EllipseAffine], x: &Vec2, tol: f64) -> bool {
    e.iter().all(|k| k.contains(x, tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_points_lie_on_both_boundaries(seed in any::<u64>()) {
        let e = gen_scenario("p", 2, seed).affine().unwrap();
        for z in pair_intersections(&e[0], &e[1]).unwrap() {
            prop_assert!(e[0].boundary_residual(&z) <= TOL_PAIR_RESIDUAL);
            prop_assert!(e[1].boundary_residual(&z) <= TOL_PAIR_RESIDUAL);
        }
    }

    #[test]
    fn corner_count_is_bounded(m in 2usize..8, seed in any::<u64>()) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let r = reduce_and_collect(&e).unwrap();
        prop_assert!(r.points.len() <= 2 * m * (m - 1));
        prop_assert_eq!(reduce_and_collect(&e).unwrap(), r);
    }

    #[test]
    fn arcs_tile_the_boundary(m in 2usize..7, seed in any::<u64>()) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let r = reduce_and_collect(&e).unwrap();
        prop_assume!(r.active.len() > 1);
        let w = walk_arcs(&e, &r, 8).unwrap();
        let n = w.arcs.len();
        prop_assert_eq!(n, w.points.len());
        for i in 0..n {
            prop_assert_eq!(&w.arcs[i].end, &w.arcs[(i + 1) % n].start);
        }
        for p in &w.points {
            let starts = w.arcs.iter().filter(|a| &a.start == p).count();
            let ends = w.arcs.iter().filter(|a| &a.end == p).count();
            prop_assert_eq!((starts, ends), (1, 1));
        }
    }

    #[test]
    fn arc_samples_stay_in_region(m in 2usize..7, seed in any::<u64>()) {
        let e = gen_scenario("p", m, seed).affine().unwrap();
        let r = reduce_and_collect(&e).unwrap();
        prop_assume!(r.active.len() > 1);
        let w = walk_arcs(&e, &r, 8).unwrap();
        for a in &w.arcs {
            let owner = &e[a.owner];
            for k in 0..50 {
                let x = owner.point_at_angle(a.theta1 + a.span() * (k as f64 + 0.5) / 50.0);
                prop_assert!(in_region(&e, &x, 1e-6));
            }
            for x in arc_points_subdivided(a, owner, 9) {
                prop_assert!(in_region(&e, &x, TOL_ON));
            }
        }
    }

    #[test]
    fn polygon_invariants(m in 2usize..6, seed in any::<u64>()) {
        let setup = setup(m, seed);
        prop_assume!(setup.is_some());
        let (e, w) = setup.unwrap();
        let (poly, pts) = polygon_at(&e, &w, 8);
        let tol = TOL_VERIFY * poly.scale();
        prop_assert!(poly.is_convex());
        prop_assert!(poly.area() > 0.0);
        let generated = pts.iter().map(|p| p.len()).sum::<usize>();
        prop_assert_eq!(poly.len(), generated + 2 * w.arcs.len());
        for x in pts.iter().flatten().chain(w.points.iter().map(|p| &p.z)) {
            prop_assert!(poly.contains(x, tol));
        }
        for x in sample_region(&e, 10_000, seed, Execution::Sequential).unwrap() {
            prop_assert!(poly.contains(&x, tol));
        }
    }

    #[test]
    fn polygon_shrinks_as_arcs_are_refined(m in 2usize..6, seed in any::<u64>()) {
        let setup = setup(m, seed);
        prop_assume!(setup.is_some());
        let (e, w) = setup.unwrap();
        let mut prev = f64::INFINITY;
        for s in [4usize, 8, 16, 32, 64] {
            let (poly, _) = polygon_at(&e, &w, s);
            prop_assert!(poly.area() <= prev * (1.0 + 1e-12));
            prev = poly.area();
        }
    }

    #[test]
    fn tangent_polygon_matches_generic_half_plane_intersection(m in 2usize..6, seed in any::<u64>()) {
        let setup = setup(m, seed);
        prop_assume!(setup.is_some());
        let (e, w) = setup.unwrap();
        let (poly, pts) = polygon_at(&e, &w, 6);
        let hps: Vec<_> = w
            .arcs
            .iter()
            .zip(&pts)
            .flat_map(|(a, p)| {
                let owner = &e[a.owner];
                std::iter::once(a.start.z)
                    .chain(p.iter().copied())
                    .chain(std::iter::once(a.end.z))
                    .map(move |z| owner.tangent_half_plane(&z).unwrap())
            })
            .collect();
        let generic = intersect_half_planes(&hps).unwrap();
        let tol = TOL_VERIFY * poly.scale();
        let near = |v: &Vec2, set: &[Vec2]| set.iter().any(|u| (u - v).norm() <= tol);
        for v in &poly.vertices {
            prop_assert!(near(v, &generic.vertices), "{v:?} missing from generic polygon");
        }
        for v in &generic.vertices {
            prop_assert!(near(v, &poly.vertices), "{v:?} missing from tangent polygon");
        }
    }
}

/// Rasterizes the region on a 2000 × 2000 grid and checks every corner point
/// is within one cell of a rasterized boundary cell.
#[test]
fn corners_lie_on_rasterized_boundary() {
    const N: usize = 2000;
    for (m, seed) in [(2usize, 1u64), (3, 2), (4, 3), (5, 4)] {
        let e = gen_scenario("r", m, seed).affine().unwrap();
        let r = reduce_and_collect(&e).unwrap();
        let mut lo = Vec2::repeat(f64::INFINITY);
        let mut hi = Vec2::repeat(f64::NEG_INFINITY);
        for k in &e {
            lo = lo.inf(&(k.center() - half_widths(k)));
            hi = hi.sup(&(k.center() + half_widths(k)));
        }
        let cell = (hi - lo) / N as f64;
        let at = |i: usize, j: usize| lo + Vec2::new((i as f64 + 0.5) * cell[0], (j as f64 + 0.5) * cell[1]);
        let inside: Vec<bool> = (0..N * N).map(|k| in_region(&e, &at(k / N, k % N), 0.0)).collect();
        let is_in = |i: usize, j: usize| inside[i * N + j];
        let mut boundary = Vec::new();
        for i in 1..N - 1 {
            for j in 1..N - 1 {
                if is_in(i, j) && !(is_in(i - 1, j) && is_in(i + 1, j) && is_in(i, j - 1) && is_in(i, j + 1)) {
                    boundary.push(at(i, j));
                }
            }
        }
        let reach = 1.5 * cell.norm();
        for p in &r.points {
            let d = boundary.iter().map(|b| (b - p.z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= reach, "m={m} seed={seed}: corner {:?} is {d} from the raster boundary", p.z);
        }
    }
}
