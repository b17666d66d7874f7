#![allow(dead_code)]

use bethe_circuit::{ChainSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_c(rng: &mut ChaCha8Rng, re: f64, im: (f64, f64)) -> C64 {
    c(rng.random_range(-re..re), rng.random_range(im.0..im.1))
}

/// Anisotropy and parameters drawn from boxes that stay clear of the poles
/// of `f` and `g` and keep the Bethe families well conditioned.
pub fn random_spec(rng: &mut ChaCha8Rng, n: usize, m: usize, homogeneous: bool) -> ChainSpec {
    let gamma = c(rng.random_range(0.6..1.2), rng.random_range(-0.15..0.15));
    let v = (0..n)
        .map(|_| if homogeneous { c(0.0, 0.0) } else { random_c(rng, 0.4, (-0.15, 0.15)) })
        .collect();
    let u = (0..m).map(|_| random_c(rng, 0.6, (0.05, 0.45))).collect();
    ChainSpec::new(gamma, v, u).expect("random spec")
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
