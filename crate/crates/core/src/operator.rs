//! Dense operators on qubit registers, the R-matrix, monodromy and transfer
//! matrices, and permutation operators built from R-matrices.
//!
//! Qubit 0 is the most significant bit of a basis index: wire `w` of an
//! `n`-qubit register carries the bit `(index >> (n - 1 - w)) & 1`.

use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernel::{ChainSpec, Model};

pub type CMatrix = DMatrix<C64>;

pub const MAX_DENSE_QUBITS: usize = 13;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension { expected: dim, found: matrix.nrows().max(matrix.ncols()) });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSpec("operator entries must be finite".into()));
        }
        Ok(DenseOperator { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        DenseOperator { n_qubits, matrix: CMatrix::identity(dim, dim) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { n_qubits: self.n_qubits, matrix: self.matrix.adjoint() }
    }

    pub fn kron(&self, other: &DenseOperator) -> Self {
        DenseOperator {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let matrix = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("{}-qubit operator", self.n_qubits)))?;
        Ok(DenseOperator { n_qubits: self.n_qubits, matrix })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// This operator acting on the wires `positions` of a `total`-qubit register.
    pub fn embed(&self, positions: &[usize], total: usize) -> Result<DenseOperator> {
        embed(self, positions, total)
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "operator sizes differ");
        DenseOperator { n_qubits: self.n_qubits, matrix: &self.matrix * &rhs.matrix }
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "matrix shapes differ");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_positions(positions: &[usize], total: usize) -> Result<()> {
    for (i, &p) in positions.iter().enumerate() {
        if p >= total {
            return Err(Error::Index(format!("wire {p} outside a {total}-qubit register")));
        }
        if positions[..i].contains(&p) {
            return Err(Error::Index(format!("wire {p} listed twice")));
        }
    }
    Ok(())
}

/// Basis-index offsets of every local configuration on `positions`.
fn local_offsets(positions: &[usize], total: usize) -> Vec<usize> {
    let m = positions.len();
    (0..1usize << m)
        .map(|c| {
            positions
                .iter()
                .enumerate()
                .filter(|&(t, _)| c >> (m - 1 - t) & 1 == 1)
                .map(|(_, &p)| 1usize << (total - 1 - p))
                .sum()
        })
        .collect()
}

/// Embed `op` on the given wires; the `t`-th local qubit of `op` lands on wire
/// `positions[t]`.
pub fn embed(op: &DenseOperator, positions: &[usize], total: usize) -> Result<DenseOperator> {
    if positions.len() != op.n_qubits {
        return Err(Error::Dimension { expected: op.n_qubits, found: positions.len() });
    }
    check_positions(positions, total)?;
    if total > MAX_DENSE_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: total, limit: MAX_DENSE_QUBITS });
    }
    let offsets = local_offsets(positions, total);
    let mask: usize = offsets.iter().fold(0, |acc, o| acc | o);
    let dim = 1usize << total;
    let mut out = CMatrix::zeros(dim, dim);
    for rest in (0..dim).filter(|i| i & mask == 0) {
        for (r, &ro) in offsets.iter().enumerate() {
            for (c, &co) in offsets.iter().enumerate() {
                out[(rest | ro, rest | co)] = op.matrix[(r, c)];
            }
        }
    }
    Ok(DenseOperator { n_qubits: total, matrix: out })
}

/// In-place application of a local matrix to wires `positions` of `state`.
pub fn apply_local(matrix: &CMatrix, positions: &[usize], total: usize, state: &mut [C64]) -> Result<()> {
    let m = positions.len();
    if matrix.nrows() != 1 << m || matrix.ncols() != 1 << m {
        return Err(Error::Dimension { expected: 1 << m, found: matrix.nrows() });
    }
    if state.len() != 1 << total {
        return Err(Error::Dimension { expected: 1 << total, found: state.len() });
    }
    check_positions(positions, total)?;
    let offsets = local_offsets(positions, total);
    let mask: usize = offsets.iter().fold(0, |acc, o| acc | o);
    let mut buf = vec![ZERO; offsets.len()];
    for rest in (0..state.len()).filter(|i| i & mask == 0) {
        for (b, &o) in buf.iter_mut().zip(&offsets) {
            *b = state[rest | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, b) in buf.iter().enumerate() {
                acc += matrix[(r, c)] * b;
            }
            state[rest | o] = acc;
        }
    }
    Ok(())
}

/// Product of local factors on a `total`-qubit register; the first factor in
/// the list acts first.
pub fn ordered_product(factors: &[(CMatrix, Vec<usize>)], total: usize) -> Result<DenseOperator> {
    if total > MAX_DENSE_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: total, limit: MAX_DENSE_QUBITS });
    }
    let dim = 1usize << total;
    let mut out = CMatrix::identity(dim, dim);
    for col in out.as_mut_slice().chunks_mut(dim) {
        for (matrix, positions) in factors {
            apply_local(matrix, positions, total, col)?;
        }
    }
    Ok(DenseOperator { n_qubits: total, matrix: out })
}

/// Two-qubit swap `Π`.
pub fn swap() -> DenseOperator {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    DenseOperator { n_qubits: 2, matrix: m }
}

impl Model {
    /// `R(u)` with `diag(1, f, f, 1)` and `g` on the inner anti-diagonal.
    pub fn r_matrix(&self, u: C64) -> Result<DenseOperator> {
        let w = self.weights(u)?;
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 1)] = w.f_value;
        m[(1, 2)] = w.g_value;
        m[(2, 1)] = w.g_value;
        m[(2, 2)] = w.f_value;
        m[(3, 3)] = ONE;
        Ok(DenseOperator { n_qubits: 2, matrix: m })
    }
}

pub fn build_r(u: C64, gamma: C64) -> Result<DenseOperator> {
    Model::new(gamma).r_matrix(u)
}

/// Max-norm of `R12(u1-u2) R13(u1-u3) R23(u2-u3) - R23(u2-u3) R13(u1-u3) R12(u1-u2)`.
pub fn ybe_residual(u1: C64, u2: C64, u3: C64, gamma: C64) -> Result<f64> {
    let model = Model::new(gamma);
    let r12 = model.r_matrix(u1 - u2)?.embed(&[0, 1], 3)?;
    let r13 = model.r_matrix(u1 - u3)?.embed(&[0, 2], 3)?;
    let r23 = model.r_matrix(u2 - u3)?.embed(&[1, 2], 3)?;
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Max-norm of `R12(u) R21(-u) - 1`.
pub fn pseudo_unitarity_residual(u: C64, gamma: C64) -> Result<f64> {
    let model = Model::new(gamma);
    let r12 = model.r_matrix(u)?;
    let r21 = model.r_matrix(-u)?.embed(&[1, 0], 2)?;
    Ok((&r12 * &r21).max_abs_diff(&DenseOperator::identity(2)))
}

/// Monodromy matrix on ancilla `ancilla` and spin wires `spins[j]` carrying
/// `v[j]`, inside a `total`-qubit register; the factor of `spins[0]` acts first.
pub fn monodromy_on(
    model: &Model,
    u: C64,
    ancilla: usize,
    spins: &[usize],
    v: &[C64],
    total: usize,
) -> Result<DenseOperator> {
    let factors = spins
        .iter()
        .zip(v)
        .map(|(&w, &vj)| Ok((model.r_matrix(u - vj)?.into_matrix(), vec![ancilla, w])))
        .collect::<Result<Vec<_>>>()?;
    ordered_product(&factors, total)
}

fn guard_chain(n: usize) -> Result<()> {
    if n + 1 > MAX_DENSE_QUBITS {
        return Err(Error::SizeGuard { what: "sites", value: n, limit: MAX_DENSE_QUBITS - 1 });
    }
    Ok(())
}

/// `T(u) = R_{0N}(u - v_N) ... R_{01}(u - v_1)` with the ancilla on wire 0 and
/// site `j` on wire `j`.
pub fn build_monodromy(u: C64, spec: &ChainSpec) -> Result<DenseOperator> {
    let n = spec.n_sites();
    guard_chain(n)?;
    let spins: Vec<usize> = (1..=n).collect();
    monodromy_on(&spec.model(), u, 0, &spins, spec.inhomogeneities(), n + 1)
}

/// The four `2^N x 2^N` ancilla blocks `[A, B, C, D]` of an operator whose
/// wire 0 is the ancilla.
pub fn ancilla_blocks(op: &DenseOperator) -> [DenseOperator; 4] {
    let half = op.dim() / 2;
    let n = op.n_qubits - 1;
    let block = |r: usize, c: usize| DenseOperator {
        n_qubits: n,
        matrix: op.matrix.view((r * half, c * half), (half, half)).into_owned(),
    };
    [block(0, 0), block(0, 1), block(1, 0), block(1, 1)]
}

/// `t(u) = A(u) + D(u)`.
pub fn transfer_matrix(u: C64, spec: &ChainSpec) -> Result<DenseOperator> {
    let [a, _, _, d] = ancilla_blocks(&build_monodromy(u, spec)?);
    Ok(DenseOperator { n_qubits: a.n_qubits, matrix: a.matrix + d.matrix })
}

/// Max-norm of `R_{12}(u-v) T_1(u) T_2(v) - T_2(v) T_1(u) R_{12}(u-v)` with two
/// ancillae on wires 0 and 1.
pub fn rtt_residual(u: C64, v: C64, spec: &ChainSpec) -> Result<f64> {
    let n = spec.n_sites();
    guard_chain(n + 1)?;
    let model = spec.model();
    let total = n + 2;
    let spins: Vec<usize> = (2..total).collect();
    let t1 = monodromy_on(&model, u, 0, &spins, spec.inhomogeneities(), total)?;
    let t2 = monodromy_on(&model, v, 1, &spins, spec.inhomogeneities(), total)?;
    let r = model.r_matrix(u - v)?.embed(&[0, 1], total)?;
    let lhs = &(&r * &t1) * &t2;
    let rhs = &(&t2 * &t1) * &r;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Permutation of `{1..M}`, stored as the images `σ_1 .. σ_M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitPermutation {
    images: Vec<usize>,
}

impl QubitPermutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &i in &images {
            if i == 0 || i > m || seen[i - 1] {
                return Err(Error::Index(format!("{images:?} is not a permutation of 1..={m}")));
            }
            seen[i - 1] = true;
        }
        Ok(QubitPermutation { images })
    }

    pub fn identity(m: usize) -> Self {
        QubitPermutation { images: (1..=m).collect() }
    }

    /// The transposition of `a` and `b` in `S_m`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=m).collect();
        if a == 0 || b == 0 || a > m || b > m {
            return Err(Error::Index(format!("transposition ({a} {b}) outside S_{m}")));
        }
        images.swap(a - 1, b - 1);
        Ok(QubitPermutation { images })
    }

    /// Every element of `S_m` in lexicographic order of images.
    pub fn all(m: usize) -> Vec<QubitPermutation> {
        use itertools::Itertools;
        (1..=m).permutations(m).map(|images| QubitPermutation { images }).collect()
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ_i`, 1-based.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &QubitPermutation) -> QubitPermutation {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        QubitPermutation { images: other.images.iter().map(|&i| self.images[i - 1]).collect() }
    }

    pub fn inverse(&self) -> QubitPermutation {
        let mut images = vec![0; self.len()];
        for (i, &s) in self.images.iter().enumerate() {
            images[s - 1] = i + 1;
        }
        QubitPermutation { images }
    }

    /// Reduced word taking the arrangement `1..M` to `σ_1..σ_M`: each entry
    /// `p` swaps the labels in slots `p` and `p + 1` (1-based). Labels are
    /// bubbled into place from the left.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut arrangement: Vec<usize> = (1..=self.len()).collect();
        let mut word = Vec::new();
        for target in 0..self.len() {
            let mut at = arrangement.iter().position(|&x| x == self.images[target]).unwrap();
            while at > target {
                arrangement.swap(at - 1, at);
                word.push(at);
                at -= 1;
            }
        }
        word
    }

    /// A second reduced word for the same permutation, filling slots from the
    /// right.
    pub fn reduced_word_from_right(&self) -> Vec<usize> {
        let m = self.len();
        let mut arrangement: Vec<usize> = (1..=m).collect();
        let mut word = Vec::new();
        for target in (0..m).rev() {
            let mut at = arrangement.iter().position(|&x| x == self.images[target]).unwrap();
            while at < target {
                arrangement.swap(at, at + 1);
                word.push(at + 1);
                at += 1;
            }
        }
        word
    }
}

/// Apply a word of adjacent swaps to `arrangement`, returning the product of
/// R-matrices it generates. Swapping neighbouring labels `(a, b)` multiplies
/// from the left by `R_{ab}(u_a - u_b)` on wires `a - 1` and `b - 1`.
pub fn word_r(
    model: &Model,
    arrangement: &mut [usize],
    word: &[usize],
    rapidities: &[C64],
) -> Result<DenseOperator> {
    let m = arrangement.len();
    let mut factors = Vec::with_capacity(word.len());
    for &p in word {
        if p == 0 || p >= m {
            return Err(Error::Index(format!("adjacent swap at slot {p} outside 1..{m}")));
        }
        let (a, b) = (arrangement[p - 1], arrangement[p]);
        factors.push((model.r_matrix(rapidities[a - 1] - rapidities[b - 1])?.into_matrix(), vec![a - 1, b - 1]));
        arrangement.swap(p - 1, p);
    }
    ordered_product(&factors, m)
}

/// `R^σ` on `M` qubits, defined by `R^σ T_1 ... T_M = T_{σ_1} ... T_{σ_M} R^σ`.
pub fn permutation_r(sigma: &QubitPermutation, rapidities: &[C64], model: &Model) -> Result<DenseOperator> {
    permutation_r_from_word(sigma, &sigma.reduced_word(), rapidities, model)
}

/// `R^σ` from an explicit word; the word must realize `σ`.
pub fn permutation_r_from_word(
    sigma: &QubitPermutation,
    word: &[usize],
    rapidities: &[C64],
    model: &Model,
) -> Result<DenseOperator> {
    let m = sigma.len();
    if rapidities.len() != m {
        return Err(Error::Dimension { expected: m, found: rapidities.len() });
    }
    if m > 8 {
        return Err(Error::SizeGuard { what: "ancillae", value: m, limit: 8 });
    }
    let mut arrangement: Vec<usize> = (1..=m).collect();
    let r = word_r(model, &mut arrangement, word, rapidities)?;
    if arrangement != sigma.images {
        return Err(Error::Index(format!("word {word:?} does not realize {:?}", sigma.images)));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    const GAMMA: C64 = C64::new(0.83, 0.21);

    #[test]
    fn r_at_zero_is_swap() {
        let r = build_r(c(0.0, 0.0), GAMMA).unwrap();
        assert!(r.max_abs_diff(&swap()) < 1e-15);
    }

    #[test]
    fn r_corner_entries_are_one() {
        let r = build_r(c(0.4, -0.7), GAMMA).unwrap();
        assert_eq!(r.entry(0, 0), ONE);
        assert_eq!(r.entry(3, 3), ONE);
    }

    #[test]
    fn embed_identity_is_identity() {
        let e = DenseOperator::identity(2).embed(&[3, 1], 4).unwrap();
        assert_eq!(e, DenseOperator::identity(4));
    }

    #[test]
    fn embed_in_place_is_unchanged() {
        let r = build_r(c(0.3, 0.2), GAMMA).unwrap();
        assert_eq!(r.embed(&[0, 1], 2).unwrap(), r);
    }

    #[test]
    fn reversed_embed_conjugates_by_swap() {
        let r = build_r(c(0.3, 0.2), GAMMA).unwrap();
        let p = swap();
        let expected = &(&p * &r) * &p;
        assert!(r.embed(&[1, 0], 2).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn embed_rejects_bad_wires() {
        let r = build_r(c(0.3, 0.2), GAMMA).unwrap();
        assert!(r.embed(&[0, 0], 3).is_err());
        assert!(r.embed(&[0, 3], 3).is_err());
        assert!(r.embed(&[0], 3).is_err());
    }

    #[test]
    fn ybe_trivial_points() {
        let u = c(0.2, 0.5);
        assert!(ybe_residual(u, u, c(-0.3, 0.1), GAMMA).unwrap() < 1e-15);
        assert!(ybe_residual(u, u, u, GAMMA).unwrap() < 1e-15);
    }

    #[test]
    fn apply_local_matches_embedded_matrix() {
        let r = build_r(c(0.3, -0.2), GAMMA).unwrap();
        let total = 4;
        let state: Vec<C64> = (0..16).map(|i| c(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let mut fast = state.clone();
        apply_local(r.matrix(), &[3, 1], total, &mut fast).unwrap();
        let dense = r.embed(&[3, 1], total).unwrap();
        let slow = dense.matrix() * nalgebra::DVector::from_vec(state);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn single_site_monodromy_is_r() {
        let spec = ChainSpec::new(GAMMA, vec![c(0.1, 0.3)], vec![]).unwrap();
        let u = c(-0.4, 0.2);
        let t = build_monodromy(u, &spec).unwrap();
        let r = build_r(u - c(0.1, 0.3), GAMMA).unwrap();
        assert!(t.max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn single_site_transfer_matrix() {
        let v = c(0.1, 0.3);
        let spec = ChainSpec::new(GAMMA, vec![v], vec![]).unwrap();
        let u = c(-0.4, 0.2);
        let t = transfer_matrix(u, &spec).unwrap();
        let f = Model::new(GAMMA).f(u - v).unwrap();
        let expected = CMatrix::from_diagonal_element(2, 2, ONE + f);
        assert!(max_abs_diff(t.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn reversal_on_three_gives_canonical_product() {
        let model = Model::new(GAMMA);
        let u = [c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.3)];
        let sigma = QubitPermutation::new(vec![3, 2, 1]).unwrap();
        let r = permutation_r(&sigma, &u, &model).unwrap();
        let r12 = model.r_matrix(u[0] - u[1]).unwrap().embed(&[0, 1], 3).unwrap();
        let r13 = model.r_matrix(u[0] - u[2]).unwrap().embed(&[0, 2], 3).unwrap();
        let r23 = model.r_matrix(u[1] - u[2]).unwrap().embed(&[1, 2], 3).unwrap();
        let expected = &(&r12 * &r13) * &r23;
        assert!(r.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn identity_permutation_gives_identity() {
        let u = [c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.3)];
        let r = permutation_r(&QubitPermutation::identity(3), &u, &Model::new(GAMMA)).unwrap();
        assert_eq!(r, DenseOperator::identity(3));
    }

    #[test]
    fn permutation_algebra() {
        let s = QubitPermutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(s.compose(&s.inverse()), QubitPermutation::identity(3));
        assert!(QubitPermutation::new(vec![1, 1, 2]).is_err());
        assert_eq!(QubitPermutation::all(4).len(), 24);
        for p in QubitPermutation::all(4) {
            assert_eq!(p.reduced_word().len(), p.reduced_word_from_right().len());
        }
    }

    #[test]
    fn wrong_word_is_rejected() {
        let u = [c(0.3, 0.1), c(-0.2, 0.4)];
        let sigma = QubitPermutation::new(vec![2, 1]).unwrap();
        assert!(permutation_r_from_word(&sigma, &[], &u, &Model::new(GAMMA)).is_err());
    }
}
