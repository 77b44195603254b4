#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use ellipse_bound::conic::EllipseAffine;
use ellipse_bound::linalg::{Mat2, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn disk(x: f64, y: f64, r: f64) -> EllipseAffine {
    EllipseAffine::disk(Vec2::new(x, y), r).unwrap()
}

pub fn ell(x: f64, y: f64, a: f64, b: f64, angle: f64) -> EllipseAffine {
    EllipseAffine::from_axes(Vec2::new(x, y), a, b, angle).unwrap()
}

/// x²/4 + y² ≤ 1 and x² + y²/4 ≤ 1.
pub fn cross() -> Vec<EllipseAffine> {
    vec![ell(0.0, 0.0, 2.0, 1.0, 0.0), ell(0.0, 0.0, 1.0, 2.0, 0.0)]
}

/// Unit disks centered at (±0.5, 0).
pub fn lens() -> Vec<EllipseAffine> {
    vec![disk(-0.5, 0.0, 1.0), disk(0.5, 0.0, 1.0)]
}

pub fn lens_area() -> f64 {
    2.0 * PI / 3.0 - 3f64.sqrt() / 2.0
}

/// Three ellipses with a curved-triangle intersection.
pub fn three_ellipses() -> Vec<EllipseAffine> {
    vec![
        ell(0.0, 0.0, 2.0, 1.0, 0.2),
        ell(0.8, 0.5, 1.6, 1.1, 1.2),
        ell(0.3, -0.6, 1.8, 0.9, 2.4),
    ]
}

/// Configurations where a few uniform samples per ellipse miss most of the
/// intersection: thin lenses, shaved disks and small corner regions.
pub fn adversarial() -> Vec<(&'static str, Vec<EllipseAffine>)> {
    vec![
        ("lens", lens()),
        ("thin-lens", vec![disk(-0.9, 0.0, 1.0), disk(0.9, 0.0, 1.0)]),
        ("clustered-tangents", vec![disk(0.0, 0.0, 1.0), ell(0.0, 0.2, 1.2, 0.6, 0.3)]),
        ("shaved-disk", vec![disk(0.0, 0.0, 1.0), disk(-9.5, 0.0, 10.0)]),
        ("thin-cross", vec![ell(0.0, 0.0, 3.0, 0.3, 0.0), ell(0.0, 0.0, 3.0, 0.3, FRAC_PI_2)]),
        ("diagonal-lens", vec![disk(-0.45, -0.45, 1.0), disk(0.45, 0.45, 1.0)]),
        ("unequal-lens", vec![disk(0.0, 0.0, 2.0), disk(2.2, 0.0, 0.5)]),
        (
            "triangle",
            vec![disk(0.0, 0.0, 1.0), disk(1.0, 0.0, 1.0), disk(0.5, 3f64.sqrt() / 2.0, 1.0)],
        ),
        (
            "needle-pair",
            vec![ell(0.0, 0.0, 2.0, 0.5, 0.1), ell(0.3, 0.2, 2.0, 0.5, -0.2)],
        ),
        (
            "four-way",
            vec![
                disk(-0.7, 0.0, 1.0),
                disk(0.7, 0.0, 1.0),
                disk(0.0, -0.7, 1.0),
                disk(0.0, 0.7, 1.0),
            ],
        ),
    ]
}

/// Random points squeezed by a random linear map so sets are anisotropic.
pub fn random_point_set(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec2> {
    let angle: f64 = rng.random_range(0.0..PI);
    let (s, c) = angle.sin_cos();
    let rot = Mat2::new(c, -s, s, c);
    let stretch = Mat2::from_diagonal(&Vec2::new(rng.random_range(0.3..3.0), rng.random_range(0.3..3.0)));
    let shift = Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    (0..n)
        .map(|_| {
            let p = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            rot * stretch * p + shift
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smallest enclosing-ellipse area found by a coarse-to-fine grid search
/// over center, log aspect ratio and orientation. For each candidate shape
/// the scale is set by the outermost point, so every candidate is feasible
/// and the result is an upper bound on the true minimum.
pub fn grid_oracle_area(pts: &[Vec2]) -> f64 {
    let area = |p: &[f64; 4]| -> f64 {
        let c = Vec2::new(p[0], p[1]);
        let (s, co) = p[3].sin_cos();
        let r = Mat2::new(co, -s, s, co);
        let q = r * Mat2::from_diagonal(&Vec2::new((-p[2]).exp(), p[2].exp())) * r.transpose();
        PI * pts.iter().map(|x| (x - c).dot(&(q * (x - c)))).fold(0.0, f64::max)
    };
    let lo = pts.iter().fold(Vec2::repeat(f64::INFINITY), |a, p| a.inf(p));
    let hi = pts.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut best = [mid[0], mid[1], 0.0, FRAC_PI_2];
    let mut width = [half[0], half[1], 4.0, FRAC_PI_2];
    let mut f_best = area(&best);
    for level in 0..60 {
        let k: i32 = if level == 0 { 12 } else { 4 };
        let centre = best;
        for i0 in -k..=k {
            for i1 in -k..=k {
                for i2 in -k..=k {
                    for i3 in -k..=k {
                        let p = [
                            centre[0] + width[0] * i0 as f64 / k as f64,
                            centre[1] + width[1] * i1 as f64 / k as f64,
                            centre[2] + width[2] * i2 as f64 / k as f64,
                            centre[3] + width[3] * i3 as f64 / k as f64,
                        ];
                        let v = area(&p);
                        if v < f_best {
                            f_best = v;
                            best = p;
                        }
                    }
                }
            }
        }
        let shrink = if level == 0 { 2.0 / k as f64 } else { 0.6 };
        for w in width.iter_mut() {
            *w *= shrink;
        }
    }
    f_best
}

/// Drops the trailing `ms` column of a CSV report.
pub fn strip_ms(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}
