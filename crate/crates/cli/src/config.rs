//! Run configuration: a TOML file with explicit `[re, im]` pairs.

use std::path::Path;

use bethe_circuit::{ChainSpec, Tolerances, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 7;
pub const DEMO_SITES: usize = 6;
pub const DEMO_MAGNONS: usize = 2;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    gamma: Option<[f64; 2]>,
    inhomogeneities: Option<Vec<[f64; 2]>>,
    rapidities: Option<Vec<[f64; 2]>>,
    seed: Option<u64>,
    tolerances: Option<ToleranceFile>,
    random: Option<RandomFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceFile {
    pole: Option<f64>,
    separation: Option<f64>,
    check: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomFile {
    sites: usize,
    magnons: usize,
    #[serde(default)]
    homogeneous: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ChainSpec,
    pub seed: u64,
    /// Overrides every residual tolerance of `verify` when set.
    pub check_tol: Option<f64>,
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub check_tol: Option<f64>,
    pub homogeneous: bool,
}

fn pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// Parameters drawn from boxes that keep the weights away from their poles.
pub fn random_parameters(rng: &mut ChaCha8Rng, n: usize, m: usize, homogeneous: bool) -> (Vec<C64>, Vec<C64>) {
    let v = (0..n)
        .map(|_| {
            if homogeneous {
                C64::new(0.0, 0.0)
            } else {
                C64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.15..0.15))
            }
        })
        .collect();
    let u = (0..m).map(|_| C64::new(rng.random_range(-0.6..0.6), rng.random_range(0.05..0.45))).collect();
    (v, u)
}

pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, String> {
    let file: ConfigFile = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", p.display()))?
        }
        None => ConfigFile {
            random: Some(RandomFile { sites: DEMO_SITES, magnons: DEMO_MAGNONS, homogeneous: false }),
            ..ConfigFile::default()
        },
    };
    let seed = overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = match file.gamma {
        Some(g) => pair(g),
        None if file.random.is_some() => C64::new(rng.random_range(0.6..1.2), rng.random_range(-0.15..0.15)),
        None => return Err("missing `gamma`".into()),
    };
    let (mut v, u) = match (&file.random, file.inhomogeneities, file.rapidities) {
        (Some(r), None, None) => random_parameters(&mut rng, r.sites, r.magnons, r.homogeneous),
        (Some(_), _, _) => return Err("`[random]` cannot be combined with explicit parameters".into()),
        (None, Some(v), Some(u)) => (v.into_iter().map(pair).collect(), u.into_iter().map(pair).collect()),
        (None, _, _) => return Err("`inhomogeneities` and `rapidities` are required without `[random]`".into()),
    };
    if overrides.homogeneous {
        v.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
    }
    let t = file.tolerances.unwrap_or_default();
    let defaults = Tolerances::default();
    let tol = Tolerances {
        pole: t.pole.unwrap_or(defaults.pole),
        separation: t.separation.unwrap_or(defaults.separation),
    };
    let check_tol = overrides.check_tol.or(t.check);
    if let Some(c) = check_tol {
        if !(c > 0.0 && c.is_finite()) {
            return Err(format!("check tolerance must be positive, got {c}"));
        }
    }
    let spec = ChainSpec::with_tolerances(gamma, v, u, tol).map_err(|e| e.to_string())?;
    Ok(RunConfig { spec, seed, check_tol })
}
