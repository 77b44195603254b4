//! Seeded rejection sampling of the feasible region.
//!
//! Candidates are drawn uniformly from the bounding box of the smallest input
//! ellipse. Work is split into fixed chunks, each with its own ChaCha stream,
//! so the output is the same for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conic::EllipseAffine;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::Vec2;

const CHUNK: usize = 1024;
/// Candidates tried per accepted point before giving up on a chunk.
const MAX_TRIES_PER_POINT: usize = 100_000;

/// Axis-aligned half-widths of an ellipse: `√(P Pᵀ)ᵢᵢ`.
pub fn half_widths(e: &EllipseAffine) -> Vec2 {
    let pp = e.shape() * e.shape().transpose();
    Vec2::new(pp[(0, 0)].sqrt(), pp[(1, 1)].sqrt())
}

fn sampling_box(ellipses: &[EllipseAffine]) -> Result<(Vec2, Vec2)> {
    let smallest = ellipses
        .iter()
        .min_by(|a, b| a.area().total_cmp(&b.area()))
        .ok_or_else(|| Error::InvalidInput("no ellipses".into()))?;
    let h = half_widths(smallest);
    Ok((smallest.center() - h, smallest.center() + h))
}

fn inside_all(ellipses: &[EllipseAffine], x: &Vec2) -> bool {
    ellipses.iter().all(|e| e.contains(x, 0.0))
}

/// `n` points drawn uniformly from the intersection of `ellipses`.
pub fn sample_region(ellipses: &[EllipseAffine], n: usize, seed: u64, exec: Execution) -> Result<Vec<Vec2>> {
    let (lo, hi) = sampling_box(ellipses)?;
    let chunks = n.div_ceil(CHUNK);
    let parts = exec.map_range(chunks, |c| {
        let want = CHUNK.min(n - c * CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let mut out = Vec::with_capacity(want);
        let mut tries = 0;
        while out.len() < want {
            tries += 1;
            if tries > MAX_TRIES_PER_POINT * want {
                return Err(Error::EmptyIntersection);
            }
            let x = Vec2::new(rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1]));
            if inside_all(ellipses, &x) {
                out.push(x);
            }
        }
        Ok(out)
    });
    let mut all = Vec::with_capacity(n);
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// Monte Carlo estimate of the area of the intersection from `n` candidates.
pub fn estimate_area(ellipses: &[EllipseAffine], n: usize, seed: u64, exec: Execution) -> Result<f64> {
    let (lo, hi) = sampling_box(ellipses)?;
    let chunks = n.div_ceil(CHUNK);
    let hits: usize = exec
        .map_range(chunks, |c| {
            let count = CHUNK.min(n - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            (0..count)
                .filter(|_| {
                    let x = Vec2::new(rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1]));
                    inside_all(ellipses, &x)
                })
                .count()
        })
        .into_iter()
        .sum();
    let d = hi - lo;
    Ok(d[0] * d[1] * hits as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lens() -> Vec<EllipseAffine> {
        vec![
            EllipseAffine::disk(Vec2::new(-0.5, 0.0), 1.0).unwrap(),
            EllipseAffine::disk(Vec2::new(0.5, 0.0), 1.0).unwrap(),
        ]
    }

    #[test]
    fn samples_lie_in_region_and_are_reproducible() {
        let a = sample_region(&lens(), 3000, 11, Execution::Parallel).unwrap();
        let b = sample_region(&lens(), 3000, 11, Execution::Sequential).unwrap();
        assert_eq!(a.len(), 3000);
        assert_eq!(a, b);
        assert!(a.iter().all(|x| inside_all(&lens(), x)));
        let c = sample_region(&lens(), 3000, 12, Execution::Parallel).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn area_estimate_matches_lens_formula() {
        let want = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        let got = estimate_area(&lens(), 400_000, 5, Execution::Parallel).unwrap();
        assert!((got - want).abs() / want < 0.01, "{got} vs {want}");
    }

    #[test]
    fn rotated_box_is_tight() {
        let e = EllipseAffine::from_axes(Vec2::new(1.0, 2.0), 3.0, 1.0, PI / 2.0).unwrap();
        let h = half_widths(&e);
        assert!((h[0] - 1.0).abs() < 1e-12 && (h[1] - 3.0).abs() < 1e-12);
    }
}
