//! Random test scenarios with a guaranteed common point.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conic::{EllipseAffine, EllipseRecord};
use crate::error::{Error, Result};
use crate::linalg::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub ellipses: Vec<EllipseRecord>,
    pub seed: u64,
    /// A point inside every ellipse.
    pub guarantee_point: [f64; 2],
}

impl Scenario {
    pub fn affine(&self) -> Result<Vec<EllipseAffine>> {
        self.ellipses.iter().map(EllipseRecord::to_affine).collect()
    }

    pub fn from_ellipses(id: impl Into<String>, ellipses: &[EllipseAffine], guarantee_point: Vec2) -> Self {
        Self {
            id: id.into(),
            ellipses: ellipses.iter().map(EllipseRecord::from).collect(),
            seed: 0,
            guarantee_point: [guarantee_point[0], guarantee_point[1]],
        }
    }
}

fn random_ellipse(rng: &mut ChaCha8Rng, g: &Vec2) -> EllipseAffine {
    loop {
        let r = rng.random_range(0.2..=1.2);
        let phi = rng.random_range(0.0..TAU);
        let center = g + r * Vec2::new(phi.cos(), phi.sin());
        let a = rng.random_range(0.8..=2.5);
        let b = rng.random_range(0.8..=2.5);
        let angle = rng.random_range(0.0..PI);
        let e = EllipseAffine::from_axes(center, a, b, angle).expect("valid axes");
        // Check the form that will be written out and read back.
        let stored = EllipseRecord::from(&e).to_affine().expect("valid record");
        if e.contains(g, 0.0) && stored.contains(g, 0.0) {
            return stored;
        }
    }
}

/// One scenario of `m` ellipses, fully determined by `seed`.
pub fn gen_scenario(id: impl Into<String>, m: usize, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Vec2::new(rng.random::<f64>(), rng.random::<f64>());
    let ellipses: Vec<EllipseAffine> = (0..m).map(|_| random_ellipse(&mut rng, &g)).collect();
    let mut s = Scenario::from_ellipses(id, &ellipses, g);
    s.seed = seed;
    s
}

pub fn gen_scenarios(m: usize, n: usize, seed: u64) -> Vec<Scenario> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| gen_scenario(format!("m{m}-s{seed}-{i:04}"), m, master.random()))
        .collect()
}

pub fn to_json(scenarios: &[Scenario]) -> String {
    serde_json::to_string_pretty(scenarios).expect("scenarios serialize")
}

pub fn from_json(text: &str) -> Result<Vec<Scenario>> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario file: {e}")))
}

pub fn save(scenarios: &[Scenario], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_json(scenarios) + "\n")
}

/// Reads a scenario file. I/O failures and parse failures are kept apart so
/// callers can report them differently.
pub fn load(path: &Path) -> std::io::Result<Result<Vec<Scenario>>> {
    Ok(from_json(&std::fs::read_to_string(path)?))
}
