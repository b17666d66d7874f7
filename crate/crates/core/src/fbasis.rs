//! F-matrices, dual monodromy matrices and the F-basis.
//!
//! Dual monodromy matrices act on one spin (wire 0) and `M` ancillae
//! (wires `1..=M`); F-matrices act on the ancillae alone.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernel::{ChainSpec, Model};
use crate::operator::{
    ancilla_blocks, monodromy_on, ordered_product, permutation_r, CMatrix, DenseOperator, QubitPermutation,
};

const MAX_ANCILLAE: usize = 8;

fn projector(bit: usize) -> CMatrix {
    let mut p = CMatrix::zeros(2, 2);
    p[(bit, bit)] = C64::new(1.0, 0.0);
    p
}

impl Model {
    /// Two-site F-matrix `[[1,0,0,0],[0,1,0,0],[0,g,f,0],[0,0,0,1]]`.
    pub fn f_matrix2(&self, u: C64) -> Result<DenseOperator> {
        let w = self.weights(u)?;
        let mut m = CMatrix::identity(4, 4);
        m[(2, 1)] = w.g_value;
        m[(2, 2)] = w.f_value;
        DenseOperator::new(2, m)
    }
}

pub fn build_f2(u: C64, gamma: C64) -> Result<DenseOperator> {
    Model::new(gamma).f_matrix2(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    rapidities: Vec<C64>,
    op: DenseOperator,
}

impl FMatrix {
    pub fn n_ancillae(&self) -> usize {
        self.rapidities.len()
    }

    pub fn rapidities(&self) -> &[C64] {
        &self.rapidities
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }
}

/// `F_{1..M} = Φ_{M-1} ... Φ_1` with
/// `Φ_a = |0⟩⟨0|_a + |1⟩⟨1|_a R_{aM}(u_a - u_M) ... R_{a,a+1}(u_a - u_{a+1})`.
pub fn build_fm(rapidities: &[C64], model: &Model) -> Result<FMatrix> {
    let m = rapidities.len();
    if m > MAX_ANCILLAE {
        return Err(Error::SizeGuard { what: "ancillae", value: m, limit: MAX_ANCILLAE });
    }
    let mut f = DenseOperator::identity(m);
    for a in 0..m.saturating_sub(1) {
        let string = ((a + 1)..m)
            .map(|b| Ok((model.r_matrix(rapidities[a] - rapidities[b])?.into_matrix(), vec![a, b])))
            .collect::<Result<Vec<_>>>()?;
        let string = ordered_product(&string, m)?;
        let p0 = DenseOperator::new(1, projector(0))?.embed(&[a], m)?;
        let p1 = DenseOperator::new(1, projector(1))?.embed(&[a], m)?;
        let factor = p0.matrix() + p1.matrix() * string.matrix();
        f = DenseOperator::new(m, factor * f.matrix())?;
    }
    for a in 0..m {
        for b in (a + 1)..m {
            let d = rapidities[a] - rapidities[b];
            let modulus = model.f(d)?.norm();
            if modulus < model.pole_tol() {
                return Err(Error::CoincidentRapidities { a: a + 1, b: b + 1, modulus, tol: model.pole_tol() });
            }
        }
    }
    Ok(FMatrix { rapidities: rapidities.to_vec(), op: f })
}

/// `F_{σ_1..σ_M}`: the F-matrix of the permuted rapidities, with its `p`-th
/// ancilla placed on wire `σ_p - 1`.
pub fn permuted_f(sigma: &QubitPermutation, rapidities: &[C64], model: &Model) -> Result<DenseOperator> {
    let permuted: Vec<C64> = sigma.images().iter().map(|&s| rapidities[s - 1]).collect();
    let wires: Vec<usize> = sigma.images().iter().map(|&s| s - 1).collect();
    build_fm(&permuted, model)?.op.embed(&wires, rapidities.len())
}

/// Max-norm of `F_σ^{-1} F - R^σ`.
pub fn factorization_residual(sigma: &QubitPermutation, rapidities: &[C64], model: &Model) -> Result<f64> {
    let f = build_fm(rapidities, model)?;
    let fs = permuted_f(sigma, rapidities, model)?;
    let lhs = &fs.inverse()? * f.operator();
    Ok(lhs.max_abs_diff(&permutation_r(sigma, rapidities, model)?))
}

/// Max-norm of `F_{21}^{-1}(-u) F_{12}(u) - R(u)`.
pub fn two_site_factorization_residual(u: C64, model: &Model) -> Result<f64> {
    let f12 = model.f_matrix2(u)?;
    let f21 = model.f_matrix2(-u)?.embed(&[1, 0], 2)?;
    Ok((&f21.inverse()? * &f12).max_abs_diff(&model.r_matrix(u)?))
}

/// Max-norm of `F T_1..T_M F^{-1} - F_σ T_{σ_1}..T_{σ_M} F_σ^{-1}` with the
/// ancillae on wires `0..M` and the spins after them.
pub fn twist_consistency_residual(
    rapidities: &[C64],
    sigma: &QubitPermutation,
    spec: &ChainSpec,
) -> Result<f64> {
    let m = rapidities.len();
    let n = spec.n_sites();
    if m > 3 || n > 2 {
        return Err(Error::SizeGuard { what: "ancillae + sites", value: m + n, limit: 5 });
    }
    if sigma.len() != m {
        return Err(Error::Dimension { expected: m, found: sigma.len() });
    }
    let model = spec.model();
    let total = m + n;
    let spins: Vec<usize> = (m..total).collect();
    let t = (0..m)
        .map(|a| monodromy_on(&model, rapidities[a], a, &spins, spec.inhomogeneities(), total))
        .collect::<Result<Vec<_>>>()?;
    let chain = |order: &[usize]| {
        order.iter().fold(DenseOperator::identity(total), |acc, &a| &acc * &t[a - 1])
    };
    let dress = |f: DenseOperator| f.kron(&DenseOperator::identity(n));
    let f = dress(build_fm(rapidities, &model)?.op);
    let fs = dress(permuted_f(sigma, rapidities, &model)?);
    let identity: Vec<usize> = (1..=m).collect();
    let lhs = &(&f * &chain(&identity)) * &f.inverse()?;
    let rhs = &(&fs * &chain(sigma.images())) * &fs.inverse()?;
    Ok(lhs.max_abs_diff(&rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualMonodromy {
    pub site: usize,
    pub spectral: C64,
    pub rapidities: Vec<C64>,
    op: DenseOperator,
}

impl DualMonodromy {
    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    /// Spin blocks `[A, B, C, D]`, each an operator on the ancillae.
    pub fn blocks(&self) -> [DenseOperator; 4] {
        ancilla_blocks(&self.op)
    }
}

/// `R_{1j}(u_1 - v) R_{2j}(u_2 - v) ... R_{Mj}(u_M - v)`.
pub fn dual_monodromy_at(v: C64, rapidities: &[C64], model: &Model) -> Result<DenseOperator> {
    let m = rapidities.len();
    if m > MAX_ANCILLAE {
        return Err(Error::SizeGuard { what: "ancillae", value: m, limit: MAX_ANCILLAE });
    }
    let factors = (0..m)
        .rev()
        .map(|a| Ok((model.r_matrix(rapidities[a] - v)?.into_matrix(), vec![a + 1, 0])))
        .collect::<Result<Vec<_>>>()?;
    ordered_product(&factors, m + 1)
}

pub fn dual_monodromy(j: usize, spec: &ChainSpec) -> Result<DualMonodromy> {
    if j == 0 || j > spec.n_sites() {
        return Err(Error::Index(format!("site {j} outside 1..={}", spec.n_sites())));
    }
    let v = spec.inhomogeneities()[j - 1];
    let op = dual_monodromy_at(v, spec.rapidities(), &spec.model())?;
    Ok(DualMonodromy { site: j, spectral: v, rapidities: spec.rapidities().to_vec(), op })
}

/// Max-norm of `𝒯_1(v1) 𝒯_2(v2) R_{12}(v1 - v2) - R_{12}(v1 - v2) 𝒯_2(v2) 𝒯_1(v1)`
/// with the spins on wires 0 and 1. When `f` is given both dual monodromies
/// are dressed by it.
pub fn dual_rtt_residual(
    v1: C64,
    v2: C64,
    rapidities: &[C64],
    model: &Model,
    f: Option<&FMatrix>,
) -> Result<f64> {
    let m = rapidities.len();
    let total = m + 2;
    let dual_on = |v: C64, spin: usize| {
        let factors = (0..m)
            .rev()
            .map(|a| Ok((model.r_matrix(rapidities[a] - v)?.into_matrix(), vec![a + 2, spin])))
            .collect::<Result<Vec<_>>>()?;
        ordered_product(&factors, total)
    };
    let mut t1 = dual_on(v1, 0)?;
    let mut t2 = dual_on(v2, 1)?;
    if let Some(f) = f {
        let fd = DenseOperator::identity(2).kron(f.operator());
        let fi = fd.inverse()?;
        t1 = &(&fd * &t1) * &fi;
        t2 = &(&fd * &t2) * &fi;
    }
    let r = model.r_matrix(v1 - v2)?.embed(&[0, 1], total)?;
    let lhs = &(&t1 * &t2) * &r;
    let rhs = &(&r * &t2) * &t1;
    Ok(lhs.max_abs_diff(&rhs))
}

/// `𝒯̃ = F 𝒯 F^{-1}` with `F` acting on the ancillae.
pub fn dress_dual(t: &DualMonodromy, f: &FMatrix) -> Result<DualMonodromy> {
    if t.rapidities.len() != f.n_ancillae() {
        return Err(Error::Dimension { expected: t.rapidities.len(), found: f.n_ancillae() });
    }
    let fd = DenseOperator::identity(1).kron(f.operator());
    let op = &(&fd * &t.op) * &fd.inverse()?;
    Ok(DualMonodromy { site: t.site, spectral: t.spectral, rapidities: t.rapidities.clone(), op })
}

/// Dressed dual monodromy at spectral parameter `v`.
pub fn dressed_dual_at(v: C64, rapidities: &[C64], model: &Model) -> Result<DenseOperator> {
    let f = build_fm(rapidities, model)?;
    let fd = DenseOperator::identity(1).kron(f.operator());
    let t = dual_monodromy_at(v, rapidities, model)?;
    Ok(&(&fd * &t) * &fd.inverse()?)
}

/// Max-norm of `Q 𝒯̃(v; u_{σ_1}, .., u_{σ_M}) Q^{-1} - 𝒯̃(v; u_1, .., u_M)`, where
/// `Q` moves ancilla slot `p` to ancilla `σ_p`.
pub fn exchange_residual(v: C64, rapidities: &[C64], sigma: &QubitPermutation, model: &Model) -> Result<f64> {
    let permuted: Vec<C64> = sigma.images().iter().map(|&s| rapidities[s - 1]).collect();
    let reference = dressed_dual_at(v, rapidities, model)?;
    let moved = dressed_dual_at(v, &permuted, model)?;
    let wires: Vec<usize> = std::iter::once(0).chain(sigma.images().iter().copied()).collect();
    Ok(moved.embed(&wires, rapidities.len() + 1)?.max_abs_diff(&reference))
}

fn diag2(a: C64, b: C64) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = a;
    m[(1, 1)] = b;
    m
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// Closed forms of the F-basis operators `(Ã, B̃, C̃)` at spectral parameter `v`.
pub fn fbasis_operators_at(
    v: C64,
    rapidities: &[C64],
    model: &Model,
) -> Result<(DenseOperator, DenseOperator, DenseOperator)> {
    let m = rapidities.len();
    if m > MAX_ANCILLAE {
        return Err(Error::SizeGuard { what: "ancillae", value: m, limit: MAX_ANCILLAE });
    }
    let one = C64::new(1.0, 0.0);
    let fv = rapidities.iter().map(|&u| model.f(u - v)).collect::<Result<Vec<_>>>()?;
    let gv = rapidities.iter().map(|&u| model.g(u - v)).collect::<Result<Vec<_>>>()?;
    let a_op = kron_all(&fv.iter().map(|&f| diag2(one, f)).collect::<Vec<_>>());
    let dim = 1 << m;
    let mut b_op = CMatrix::zeros(dim, dim);
    let mut c_op = CMatrix::zeros(dim, dim);
    for a in 0..m {
        let mut bf = Vec::with_capacity(m);
        let mut cf = Vec::with_capacity(m);
        for b in 0..m {
            if b == a {
                let mut lower = CMatrix::zeros(2, 2);
                lower[(1, 0)] = gv[a];
                let mut upper = CMatrix::zeros(2, 2);
                upper[(0, 1)] = gv[a];
                bf.push(lower);
                cf.push(upper);
            } else {
                let fba = model.f(rapidities[b] - rapidities[a])?;
                let fab = model.f(rapidities[a] - rapidities[b])?;
                bf.push(diag2(one, fv[b] / fba));
                cf.push(diag2(one / fab, fv[b]));
            }
        }
        b_op += kron_all(&bf);
        c_op += kron_all(&cf);
    }
    Ok((DenseOperator::new(m, a_op)?, DenseOperator::new(m, b_op)?, DenseOperator::new(m, c_op)?))
}

pub fn fbasis_operators(j: usize, spec: &ChainSpec) -> Result<(DenseOperator, DenseOperator, DenseOperator)> {
    if j == 0 || j > spec.n_sites() {
        return Err(Error::Index(format!("site {j} outside 1..={}", spec.n_sites())));
    }
    fbasis_operators_at(spec.inhomogeneities()[j - 1], spec.rapidities(), &spec.model())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    const GAMMA: C64 = C64::new(0.61, -0.17);

    fn us() -> Vec<C64> {
        vec![c(0.31, 0.12), c(-0.42, 0.27), c(0.15, -0.33), c(-0.05, 0.51)]
    }

    #[test]
    fn f2_determinant_is_f() {
        let model = Model::new(GAMMA);
        let u = c(0.2, -0.4);
        let det = model.f_matrix2(u).unwrap().matrix().clone().determinant();
        assert!((det - model.f(u).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn f2_fixes_uniform_states() {
        let f = build_f2(c(0.2, -0.4), GAMMA).unwrap();
        for idx in [0, 3] {
            for r in 0..4 {
                let expected = if r == idx { 1.0 } else { 0.0 };
                assert_eq!(f.entry(r, idx), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn single_ancilla_f_is_identity() {
        let f = build_fm(&[c(0.3, 0.1)], &Model::new(GAMMA)).unwrap();
        assert_eq!(f.operator(), &DenseOperator::identity(1));
    }

    #[test]
    fn two_ancilla_f_matches_two_site_formula() {
        let model = Model::new(GAMMA);
        let u = us();
        let f = build_fm(&u[..2], &model).unwrap();
        let f2 = model.f_matrix2(u[0] - u[1]).unwrap();
        assert!(f.operator().max_abs_diff(&f2) < 1e-14);
    }

    #[test]
    fn f_fixes_uniform_states() {
        let f = build_fm(&us(), &Model::new(GAMMA)).unwrap();
        let d = 16;
        for idx in [0, d - 1] {
            for r in 0..d {
                let expected = if r == idx { 1.0 } else { 0.0 };
                assert!((f.operator().entry(r, idx) - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn factorization_holds_for_all_permutations() {
        let model = Model::new(GAMMA);
        for m in [2, 3, 4] {
            for sigma in QubitPermutation::all(m) {
                let res = factorization_residual(&sigma, &us()[..m], &model).unwrap();
                assert!(res < 1e-10, "m = {m}, sigma = {:?}: {res:e}", sigma.images());
            }
        }
    }

    #[test]
    fn twist_identity_for_trivial_permutation() {
        let spec = ChainSpec::new(GAMMA, vec![c(0.1, 0.0), c(-0.2, 0.3)], vec![]).unwrap();
        let res = twist_consistency_residual(&us()[..2], &QubitPermutation::identity(2), &spec).unwrap();
        assert!(res < 1e-13);
    }

    #[test]
    fn single_ancilla_dual_is_r() {
        let model = Model::new(GAMMA);
        let v = c(0.2, -0.1);
        let t = dual_monodromy_at(v, &[c(0.4, 0.3)], &model).unwrap();
        let r = model.r_matrix(c(0.4, 0.3) - v).unwrap().embed(&[1, 0], 2).unwrap();
        assert!(t.max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn duals_regroup_into_monodromy_product() {
        let v = vec![c(0.1, 0.2), c(-0.3, 0.05)];
        let u = us()[..2].to_vec();
        let spec = ChainSpec::new(GAMMA, v.clone(), u.clone()).unwrap();
        let model = spec.model();
        // Ancillae on wires 0, 1 and spins on wires 2, 3.
        let spins = [2, 3];
        let t1 = monodromy_on(&model, u[0], 0, &spins, &v, 4).unwrap();
        let t2 = monodromy_on(&model, u[1], 1, &spins, &v, 4).unwrap();
        let rows = &t1 * &t2;
        let mut cols = DenseOperator::identity(4);
        for (j, &spin) in spins.iter().enumerate() {
            let dual = dual_monodromy(j + 1, &spec).unwrap();
            cols = &dual.operator().embed(&[spin, 0, 1], 4).unwrap() * &cols;
        }
        assert!(rows.max_abs_diff(&cols) < 1e-14);
    }

    #[test]
    fn dual_rtt_holds() {
        let model = Model::new(GAMMA);
        let res = dual_rtt_residual(c(0.3, -0.2), c(-0.1, 0.4), &us()[..2], &model, None).unwrap();
        assert!(res < 1e-12);
    }

    #[test]
    fn dressed_dual_rtt_holds() {
        let model = Model::new(GAMMA);
        let f = build_fm(&us()[..3], &model).unwrap();
        let res = dual_rtt_residual(c(0.3, -0.2), c(-0.1, 0.4), &us()[..3], &model, Some(&f)).unwrap();
        assert!(res < 1e-10);
    }

    #[test]
    fn single_ancilla_dressing_is_trivial() {
        let spec = ChainSpec::new(GAMMA, vec![c(0.1, 0.2)], vec![c(0.4, 0.3)]).unwrap();
        let t = dual_monodromy(1, &spec).unwrap();
        let f = build_fm(spec.rapidities(), &spec.model()).unwrap();
        assert_eq!(dress_dual(&t, &f).unwrap().operator(), t.operator());
    }

    #[test]
    fn closed_forms_match_dressed_blocks() {
        let model = Model::new(GAMMA);
        let v = c(0.27, -0.13);
        for m in 1..=3 {
            let u = &us()[..m];
            let dressed = DualMonodromy {
                site: 1,
                spectral: v,
                rapidities: u.to_vec(),
                op: dressed_dual_at(v, u, &model).unwrap(),
            };
            let [a, b, cc, _] = dressed.blocks();
            let (ca, cb, ccc) = fbasis_operators_at(v, u, &model).unwrap();
            assert!(a.max_abs_diff(&ca) < 1e-12);
            assert!(b.max_abs_diff(&cb) < 1e-12);
            assert!(cc.max_abs_diff(&ccc) < 1e-12);
        }
    }

    #[test]
    fn single_ancilla_c_operator() {
        let model = Model::new(GAMMA);
        let v = c(0.27, -0.13);
        let u = [c(0.4, 0.3)];
        let (_, _, cop) = fbasis_operators_at(v, &u, &model).unwrap();
        let mut expected = CMatrix::zeros(2, 2);
        expected[(0, 1)] = model.g(u[0] - v).unwrap();
        assert!(max_abs_diff(cop.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn exchange_symmetry_small() {
        let model = Model::new(GAMMA);
        for sigma in QubitPermutation::all(3) {
            let res = exchange_residual(c(0.27, -0.13), &us()[..3], &sigma, &model).unwrap();
            assert!(res < 1e-10);
        }
    }
}
