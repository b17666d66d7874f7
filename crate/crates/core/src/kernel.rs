//! Scalar weights of the trigonometric R-matrix and the chain specification.
//!
//! Labels follow the physics convention: sites `j` run over `1..=N` and
//! magnons `a` over `1..=M`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_POLE_TOL: f64 = 1e-10;
pub const DEFAULT_SEPARATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Lower bound on `|sinh|` denominators.
    pub pole: f64,
    /// Lower bound on `|sinh(u_a - u_b)|` for distinct rapidities.
    pub separation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { pole: DEFAULT_POLE_TOL, separation: DEFAULT_SEPARATION_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub f_value: C64,
    pub g_value: C64,
}

/// Anisotropy together with the pole tolerance used by every weight evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    gamma: C64,
    pole_tol: f64,
}

impl Model {
    pub fn new(gamma: C64) -> Self {
        Model { gamma, pole_tol: DEFAULT_POLE_TOL }
    }

    pub fn with_pole_tol(gamma: C64, pole_tol: f64) -> Self {
        Model { gamma, pole_tol }
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    pub fn pole_tol(&self) -> f64 {
        self.pole_tol
    }

    pub fn delta(&self) -> C64 {
        self.gamma.cos()
    }

    fn denominator(&self, u: C64) -> Result<C64> {
        let d = (u + C64::i() * self.gamma).sinh();
        let modulus = d.norm();
        if modulus.is_nan() || modulus < self.pole_tol {
            return Err(Error::Pole { arg: u, modulus, tol: self.pole_tol });
        }
        Ok(d)
    }

    pub fn f(&self, u: C64) -> Result<C64> {
        Ok(u.sinh() / self.denominator(u)?)
    }

    pub fn g(&self, u: C64) -> Result<C64> {
        Ok((C64::i() * self.gamma).sinh() / self.denominator(u)?)
    }

    pub fn weights(&self, u: C64) -> Result<Weights> {
        let d = self.denominator(u)?;
        Ok(Weights { f_value: u.sinh() / d, g_value: (C64::i() * self.gamma).sinh() / d })
    }
}

/// `f(u) = sinh u / sinh(u + iγ)`.
pub fn weight_f(u: C64, gamma: C64) -> Result<C64> {
    Model::new(gamma).f(u)
}

/// `g(u) = sinh(iγ) / sinh(u + iγ)`.
pub fn weight_g(u: C64, gamma: C64) -> Result<C64> {
    Model::new(gamma).g(u)
}

/// Problem instance: anisotropy, inhomogeneities `v_j` and rapidities `u_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    gamma: C64,
    inhomogeneities: Vec<C64>,
    rapidities: Vec<C64>,
    tol: Tolerances,
}

impl ChainSpec {
    pub fn new(gamma: C64, inhomogeneities: Vec<C64>, rapidities: Vec<C64>) -> Result<Self> {
        Self::with_tolerances(gamma, inhomogeneities, rapidities, Tolerances::default())
    }

    pub fn with_tolerances(
        gamma: C64,
        inhomogeneities: Vec<C64>,
        rapidities: Vec<C64>,
        tol: Tolerances,
    ) -> Result<Self> {
        let spec = ChainSpec { gamma, inhomogeneities, rapidities, tol };
        spec.validate()?;
        Ok(spec)
    }

    /// Chain with all `v_j = 0`.
    pub fn homogeneous(n_sites: usize, gamma: C64, rapidities: Vec<C64>) -> Result<Self> {
        Self::new(gamma, vec![C64::new(0.0, 0.0); n_sites], rapidities)
    }

    fn validate(&self) -> Result<()> {
        let n = self.inhomogeneities.len();
        let m = self.rapidities.len();
        if n == 0 {
            return Err(Error::InvalidSpec("the chain needs at least one site".into()));
        }
        if m > n {
            return Err(Error::InvalidSpec(format!("{m} magnons do not fit on {n} sites")));
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !finite(&self.gamma)
            || !self.inhomogeneities.iter().all(finite)
            || !self.rapidities.iter().all(finite)
        {
            return Err(Error::InvalidSpec("all parameters must be finite".into()));
        }
        if [self.tol.pole, self.tol.separation].iter().any(|t| t.is_nan() || *t <= 0.0) {
            return Err(Error::InvalidSpec("tolerances must be positive".into()));
        }
        let sg = (C64::i() * self.gamma).sinh().norm();
        if sg < self.tol.pole {
            return Err(Error::InvalidSpec(format!(
                "|sinh(i*gamma)| = {sg:.3e} vanishes; the R-matrix degenerates"
            )));
        }
        let model = self.model();
        for &u in &self.rapidities {
            for &v in &self.inhomogeneities {
                model.f(u - v)?;
            }
        }
        for a in 0..m {
            for b in (a + 1)..m {
                let d = self.rapidities[a] - self.rapidities[b];
                let modulus = d.sinh().norm();
                if modulus < self.tol.separation {
                    return Err(Error::CoincidentRapidities {
                        a: a + 1,
                        b: b + 1,
                        modulus,
                        tol: self.tol.separation,
                    });
                }
                model.f(d)?;
                model.f(-d)?;
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.inhomogeneities.len()
    }

    pub fn n_magnons(&self) -> usize {
        self.rapidities.len()
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    pub fn delta(&self) -> C64 {
        self.gamma.cos()
    }

    pub fn inhomogeneities(&self) -> &[C64] {
        &self.inhomogeneities
    }

    pub fn rapidities(&self) -> &[C64] {
        &self.rapidities
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn model(&self) -> Model {
        Model::with_pole_tol(self.gamma, self.tol.pole)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.inhomogeneities.iter().all(|v| *v == self.inhomogeneities[0])
    }

    /// Same chain with the rapidities replaced.
    pub fn with_rapidities(&self, rapidities: Vec<C64>) -> Result<Self> {
        Self::with_tolerances(self.gamma, self.inhomogeneities.clone(), rapidities, self.tol)
    }

    fn check_magnon(&self, a: usize) -> Result<()> {
        if a == 0 || a > self.n_magnons() {
            return Err(Error::Index(format!("magnon {a} outside 1..={}", self.n_magnons())));
        }
        Ok(())
    }

    fn check_site(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n_sites() {
            return Err(Error::Index(format!("site {j} outside 1..={}", self.n_sites())));
        }
        Ok(())
    }
}

/// `x_{a,j} = f(u_a - v_j)`.
pub fn quasi_momentum(a: usize, j: usize, spec: &ChainSpec) -> Result<C64> {
    spec.check_magnon(a)?;
    spec.check_site(j)?;
    spec.model().f(spec.rapidities[a - 1] - spec.inhomogeneities[j - 1])
}

/// `s_{ab} = f(u_a - u_b)`.
pub fn scattering_amplitude(a: usize, b: usize, spec: &ChainSpec) -> Result<C64> {
    spec.check_magnon(a)?;
    spec.check_magnon(b)?;
    let d = spec.rapidities[a - 1] - spec.rapidities[b - 1];
    let modulus = d.sinh().norm();
    if a == b || modulus < spec.tol.separation {
        return Err(Error::CoincidentRapidities { a, b, modulus, tol: spec.tol.separation });
    }
    spec.model().f(d)
}

/// Two-body S-matrix `S_{ab} = s_{ba} / s_{ab}`.
pub fn s_matrix(a: usize, b: usize, spec: &ChainSpec) -> Result<C64> {
    Ok(scattering_amplitude(b, a, spec)? / scattering_amplitude(a, b, spec)?)
}

/// Tabulated plane-wave data: quasi-momenta `x[a][j]`, scattering amplitudes
/// `s[a][b]` and weights `g[a][j] = g(u_a - v_j)`, stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaves {
    pub n_sites: usize,
    pub x: Vec<Vec<C64>>,
    pub s: Vec<Vec<C64>>,
    pub g: Vec<Vec<C64>>,
}

impl PlaneWaves {
    pub fn from_spec(spec: &ChainSpec) -> Result<Self> {
        let model = spec.model();
        let u = spec.rapidities();
        let v = spec.inhomogeneities();
        let mut x = Vec::with_capacity(u.len());
        let mut g = Vec::with_capacity(u.len());
        for &ua in u {
            let mut xr = Vec::with_capacity(v.len());
            let mut gr = Vec::with_capacity(v.len());
            for &vj in v {
                let w = model.weights(ua - vj)?;
                xr.push(w.f_value);
                gr.push(w.g_value);
            }
            x.push(xr);
            g.push(gr);
        }
        let mut s = vec![vec![C64::new(0.0, 0.0); u.len()]; u.len()];
        for a in 0..u.len() {
            for b in 0..u.len() {
                if a != b {
                    s[a][b] = model.f(u[a] - u[b])?;
                }
            }
        }
        Ok(PlaneWaves { n_sites: v.len(), x, s, g })
    }

    pub fn n_magnons(&self) -> usize {
        self.x.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `x_{a,j}`, 1-based.
    pub fn x(&self, a: usize, j: usize) -> C64 {
        self.x[a - 1][j - 1]
    }

    /// `s_{ab}`, 1-based.
    pub fn s(&self, a: usize, b: usize) -> C64 {
        self.s[a - 1][b - 1]
    }

    /// `g(u_a - v_j)`, 1-based.
    pub fn g(&self, a: usize, j: usize) -> C64 {
        self.g[a - 1][j - 1]
    }

    /// Restriction to the magnons listed in `magnons` (1-based), in that order.
    pub fn select(&self, magnons: &[usize]) -> PlaneWaves {
        PlaneWaves {
            n_sites: self.n_sites,
            x: magnons.iter().map(|&a| self.x[a - 1].clone()).collect(),
            g: magnons.iter().map(|&a| self.g[a - 1].clone()).collect(),
            s: magnons
                .iter()
                .map(|&a| magnons.iter().map(|&b| self.s[a - 1][b - 1]).collect())
                .collect(),
        }
    }
}
