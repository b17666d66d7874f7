//! Circuit synthesis: Gram matrices of Bethe families, their triangular
//! orthonormalization, and the long and short unitaries of the staircase.
//!
//! A gate at site `j` (1-based) acts on a contiguous window of wires starting
//! at wire `j - 1`. Long gates take an `M`-qubit register followed by a fresh
//! spin and return the spin followed by the register. Short gates take a
//! `k`-qubit register and return the spin followed by a `(k-1)`-qubit register.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::cba::{family_matrix, BetheState, LambdaTensor};
use crate::error::{Error, Result};
use crate::index::{binomial, binomial_signed, extract_sector, sector_chis, MagnonString};
use crate::kernel::{ChainSpec, PlaneWaves};
use crate::operator::{apply_local, max_abs, max_abs_diff, CMatrix};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Pivots `L_ii^2 / C_ii` below this abort the factorization.
pub const GRAM_DEGENERACY_TOL: f64 = 1e-13;
/// Allowed deviation of the fixed columns of a long gate from an isometry.
pub const ISOMETRY_TOL: f64 = 1e-8;
/// Largest sector dimension handled by the synthesis.
pub const MAX_SECTOR_DIM: usize = 1 << 12;

/// Number of rapidities in the Bethe family supported on `k` spins.
pub fn family_pool(k: usize, n_magnons: usize) -> usize {
    k.min(n_magnons)
}

fn table_for_pool(spec: &ChainSpec, pool: usize) -> Result<PlaneWaves> {
    let all = PlaneWaves::from_spec(spec)?;
    Ok(all.select(&(1..=pool).collect::<Vec<_>>()))
}

fn check_family(k: usize, r: usize, spec: &ChainSpec) -> Result<()> {
    let n = spec.n_sites();
    if k > n {
        return Err(Error::Index(format!("support of {k} sites on a chain of {n}")));
    }
    let pool = family_pool(k, spec.n_magnons());
    if r > pool {
        return Err(Error::Index(format!("{r} magnons exceed the family pool {pool} at k = {k}")));
    }
    let dim = binomial(k, r);
    if dim > MAX_SECTOR_DIM {
        return Err(Error::SizeGuard { what: "sector dimension", value: dim, limit: MAX_SECTOR_DIM });
    }
    Ok(())
}

/// Amplitudes of the Bethe family on the last `k` sites with `r` magnons
/// chosen among the first `pool` rapidities; column `α` is the state of the
/// `α`-th selection.
pub fn family_with_pool(k: usize, r: usize, pool: usize, spec: &ChainSpec) -> Result<CMatrix> {
    let pw = table_for_pool(spec, pool)?;
    Ok(family_matrix(&pw, spec.n_sites() + 1 - k, r))
}

/// Family used by the circuit at support `k`: pool `min(k, M)`.
pub fn family(k: usize, r: usize, spec: &ChainSpec) -> Result<CMatrix> {
    check_family(k, r, spec)?;
    family_with_pool(k, r, family_pool(k, spec.n_magnons()), spec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub k: usize,
    pub r: usize,
    pub entries: CMatrix,
}

/// `C_{αβ} = ⟨Ψ_α|Ψ_β⟩` over the circuit family at support `k`.
pub fn gram_matrix(k: usize, r: usize, spec: &ChainSpec) -> Result<GramMatrix> {
    let b = family(k, r, spec)?;
    Ok(GramMatrix { k, r, entries: b.adjoint() * b })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthFactor {
    pub k: usize,
    pub r: usize,
    /// Upper triangular with `X^† C X = 1`.
    pub x: CMatrix,
    /// Upper triangular with `X^{-1†} X^{-1} = C`.
    pub x_inv: CMatrix,
}

/// Cholesky factor `C = U^† U` with `X^{-1} = U` and `X = U^{-1}`.
pub fn orth_factor_from_gram(gram: &GramMatrix) -> Result<OrthFactor> {
    let c = &gram.entries;
    let n = c.nrows();
    let chol = nalgebra::Cholesky::new(c.clone()).ok_or(Error::DegenerateGram {
        k: gram.k,
        r: gram.r,
        minor: n,
        value: 0.0,
    })?;
    let l = chol.l();
    for i in 0..n {
        let pivot = l[(i, i)].norm_sqr() / c[(i, i)].re.abs().max(f64::MIN_POSITIVE);
        if pivot.is_nan() || pivot <= GRAM_DEGENERACY_TOL {
            return Err(Error::DegenerateGram { k: gram.k, r: gram.r, minor: i + 1, value: pivot });
        }
    }
    let u = l.adjoint();
    let x = u
        .solve_upper_triangular(&CMatrix::identity(n, n))
        .ok_or_else(|| Error::Singular("triangular Gram factor".into()))?;
    Ok(OrthFactor { k: gram.k, r: gram.r, x, x_inv: u })
}

pub fn orth_factor(k: usize, r: usize, spec: &ChainSpec) -> Result<OrthFactor> {
    orth_factor_from_gram(&gram_matrix(k, r, spec)?)
}

/// Leading principal minors `det_0 = 1, det_1, .., det_n`.
pub fn leading_minors(c: &CMatrix) -> Vec<C64> {
    (0..=c.nrows()).map(|a| minor_det(&c.view((0, 0), (a, a)).into_owned())).collect()
}

fn minor_det(m: &CMatrix) -> C64 {
    if m.nrows() == 0 {
        ONE
    } else {
        m.clone().lu().determinant()
    }
}

/// Leading `size x size` minor of `c` with column `from` replaced by column
/// `to` (0-based).
fn replaced_minor(c: &CMatrix, size: usize, from: usize, to: usize) -> C64 {
    let mut m = c.view((0, 0), (size, size)).into_owned();
    for row in 0..size {
        m[(row, from)] = c[(row, to)];
    }
    minor_det(&m)
}

/// `X` and `X^{-1}` from determinant ratios of the Gram matrix:
/// `X_αα = sqrt(det_{α-1}/det_α)`,
/// `X_αβ = -det_{β-1} C_{α→β} / sqrt(det_{β-1} det_β)` for `α < β`, and
/// `X^{-1}_αβ = det_α C_{α→β} / sqrt(det_{α-1} det_α)` for `α <= β`, where
/// `C_{α→β}` has column `α` replaced by column `β`.
pub fn determinant_orth_factor(gram: &GramMatrix) -> Result<(CMatrix, CMatrix)> {
    let c = &gram.entries;
    let n = c.nrows();
    let dets: Vec<f64> = leading_minors(c).iter().map(|d| d.re).collect();
    if let Some(a) = (1..=n).find(|&a| dets[a].is_nan() || dets[a] <= 0.0) {
        return Err(Error::DegenerateGram { k: gram.k, r: gram.r, minor: a, value: dets[a] });
    }
    let mut x = CMatrix::zeros(n, n);
    let mut x_inv = CMatrix::zeros(n, n);
    for b in 0..n {
        let beta = b + 1;
        for a in 0..=b {
            let alpha = a + 1;
            x_inv[(a, b)] = replaced_minor(c, alpha, a, b) / (dets[alpha - 1] * dets[alpha]).sqrt();
            x[(a, b)] = if a == b {
                C64::new((dets[alpha - 1] / dets[alpha]).sqrt(), 0.0)
            } else {
                -replaced_minor(c, beta - 1, a, b) / (dets[beta - 1] * dets[beta]).sqrt()
            };
        }
    }
    Ok((x, x_inv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Long,
    Short,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitUnitary {
    /// Contiguous 0-based wires, most significant first.
    pub window: Vec<usize>,
    pub matrix: CMatrix,
    pub kind: GateKind,
}

impl CircuitUnitary {
    /// Max-norm of `U^† U - 1`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.matrix.ncols();
        max_abs_diff(&(self.matrix.adjoint() * &self.matrix), &CMatrix::identity(n, n))
    }

    /// Largest entry coupling different total-spin sectors of the window.
    pub fn sector_leakage(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.matrix.row_iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if i.count_ones() != j.count_ones() {
                    worst = worst.max(z.norm());
                }
            }
        }
        worst
    }
}

/// Sector blocks `P^{[i,r]}` of a gate, indexed `[i][r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateBlocks {
    pub blocks: [Vec<CMatrix>; 2],
}

fn check_long_site(j: usize, spec: &ChainSpec) -> Result<()> {
    let n = spec.n_sites();
    let m = spec.n_magnons();
    if j == 0 || j + m > n {
        return Err(Error::Index(format!("long gates sit at 1..={}, got {j}", n - m)));
    }
    Ok(())
}

/// `P_j^{[i,r]} = X_{j+1}^{-1[r-i]} Λ_j^{[i,r]} X_j^{[r]}` for `1 <= j <= N - M`.
pub fn long_blocks(j: usize, spec: &ChainSpec) -> Result<GateBlocks> {
    check_long_site(j, spec)?;
    let m = spec.n_magnons();
    let k = spec.n_sites() + 1 - j;
    let lam = LambdaTensor::from_table(&PlaneWaves::from_spec(spec)?, j);
    let here = (0..=m).map(|r| orth_factor(k, r, spec)).collect::<Result<Vec<_>>>()?;
    let next = (0..=m).map(|r| orth_factor(k - 1, r, spec)).collect::<Result<Vec<_>>>()?;
    let mut b0 = Vec::with_capacity(m + 1);
    let mut b1 = Vec::with_capacity(m + 1);
    for r in 0..=m {
        b0.push(&next[r].x_inv * lam.block(0, r) * &here[r].x);
        b1.push(if r == 0 {
            CMatrix::zeros(0, 1)
        } else {
            &next[r - 1].x_inv * lam.block(1, r) * &here[r].x
        });
    }
    Ok(GateBlocks { blocks: [b0, b1] })
}

/// Place the blocks of a gate that maps a `width`-qubit register into a spin
/// followed by a `(width - 1)`-qubit register. `input_index(χ)` gives the gate
/// column of register state `χ`.
fn place_blocks(
    blocks: &GateBlocks,
    width: usize,
    out_qubits: usize,
    input_index: impl Fn(usize) -> usize,
) -> (CMatrix, Vec<bool>) {
    let dim = 1 << (out_qubits + 1);
    let mut u = CMatrix::zeros(dim, dim);
    let mut fixed = vec![false; dim];
    for r in 0..=width {
        let cols = sector_chis(width, r);
        for i in 0..2 {
            if r < i {
                continue;
            }
            let rows = sector_chis(out_qubits, r - i);
            let b = &blocks.blocks[i][r];
            for (ci, &chi) in cols.iter().enumerate() {
                let col = input_index(chi);
                fixed[col] = true;
                for (ri, &rchi) in rows.iter().enumerate() {
                    u[(i * (1 << out_qubits) + rchi, col)] = b[(ri, ci)];
                }
            }
        }
    }
    (u, fixed)
}

/// Fill the free columns of `u` sector by sector with an orthonormal
/// completion. Candidates are the canonical basis vectors of the sector; at
/// each step the candidate with the largest residual after projecting out the
/// accepted columns wins, ties going to the smallest bitstring.
fn complete_unitary(u: &mut CMatrix, fixed: &[bool], n_qubits: usize) -> Result<()> {
    for w in 0..=n_qubits {
        let chis = sector_chis(n_qubits, w);
        let d = chis.len();
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(d);
        let mut free = Vec::new();
        for &col in &chis {
            if fixed[col] {
                basis.push(chis.iter().map(|&row| u[(row, col)]).collect());
            } else {
                free.push(col);
            }
        }
        for (a, va) in basis.iter().enumerate() {
            for (b, vb) in basis.iter().enumerate() {
                let ip: C64 = va.iter().zip(vb).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { ONE } else { ZERO };
                if (ip - target).norm() > ISOMETRY_TOL {
                    return Err(Error::Completion(format!(
                        "fixed columns of sector {w} deviate from an isometry by {:.3e}",
                        (ip - target).norm()
                    )));
                }
            }
        }
        let mut accepted = Vec::with_capacity(free.len());
        while basis.len() < d {
            let mut best: Option<(f64, Vec<C64>)> = None;
            for e in 0..d {
                let mut v = vec![ZERO; d];
                v[e] = ONE;
                for _ in 0..2 {
                    for q in &basis {
                        let ip: C64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                        for (vi, qi) in v.iter_mut().zip(q) {
                            *vi -= ip * qi;
                        }
                    }
                }
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                    best = Some((norm, v));
                }
            }
            let (norm, v) = best.expect("non-empty sector");
            if norm < 1e-6 {
                return Err(Error::Completion(format!("no independent direction left in sector {w}")));
            }
            let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
            basis.push(v.clone());
            accepted.push(v);
        }
        for (col, v) in free.into_iter().zip(accepted) {
            for (&row, z) in chis.iter().zip(v) {
                u[(row, col)] = z;
            }
        }
    }
    Ok(())
}

/// Long gate at site `j` on wires `j-1 ..= j+M-1`.
pub fn long_unitary(j: usize, spec: &ChainSpec) -> Result<CircuitUnitary> {
    let m = spec.n_magnons();
    let blocks = long_blocks(j, spec)?;
    let (mut u, fixed) = place_blocks(&blocks, m, m, |chi| chi << 1);
    complete_unitary(&mut u, &fixed, m + 1)?;
    Ok(CircuitUnitary { window: ((j - 1)..(j + m)).collect(), matrix: u, kind: GateKind::Long })
}

/// Sector blocks `Ω^{[i,r]}` of the tensor at site `j_k` with `k = N - j_k + 1`;
/// `Ω^{[i,r]}` has shape `C(k-1, r-i) x C(k, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortTensor {
    pub site: usize,
    pub k: usize,
    blocks: [Vec<CMatrix>; 2],
}

impl ShortTensor {
    pub fn block(&self, i: usize, r: usize) -> &CMatrix {
        &self.blocks[i][r]
    }

    /// The tensor as a `2^k x 2^k` matrix: columns are register states, rows
    /// are the spin followed by the smaller register.
    pub fn dense(&self) -> CMatrix {
        place_blocks(&GateBlocks { blocks: self.blocks.clone() }, self.k, self.k - 1, |chi| chi).0
    }
}

fn check_short_site(j_k: usize, spec: &ChainSpec) -> Result<usize> {
    let n = spec.n_sites();
    let m = spec.n_magnons();
    if j_k + m <= n || j_k > n {
        return Err(Error::Index(format!("short tensors sit at {}..={n}, got {j_k}", n - m + 1)));
    }
    Ok(n + 1 - j_k)
}

/// Families entering the short tensor at support `k`: the `k`-rapidity family
/// on `k` spins and the `(k-1)`-rapidity family on `k-1` spins, per `r`.
fn short_families(k: usize, spec: &ChainSpec) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let big = (0..=k).map(|r| family_with_pool(k, r, k, spec)).collect::<Result<Vec<_>>>()?;
    let small = (0..k).map(|r| family_with_pool(k - 1, r, k - 1, spec)).collect::<Result<Vec<_>>>()?;
    Ok((big, small))
}

fn hadamard_ratio(a: &CMatrix, det: C64) -> f64 {
    let bound: f64 = a.column_iter().map(|c| c.norm()).product();
    if bound == 0.0 {
        0.0
    } else {
        det.norm() / bound
    }
}

/// Rows `offset .. offset + C(k-1, r-i)` of the `k`-spin family, divided by
/// the `(k-1)`-spin family of `r - i` magnons; `solve` computes `A^{-1} R`.
fn short_tensor_with(
    j_k: usize,
    spec: &ChainSpec,
    solve: impl Fn(&CMatrix, &CMatrix) -> Result<CMatrix>,
) -> Result<ShortTensor> {
    let k = check_short_site(j_k, spec)?;
    let (big, small) = short_families(k, spec)?;
    let mut blocks: [Vec<CMatrix>; 2] = [Vec::with_capacity(k + 1), Vec::with_capacity(k + 1)];
    for r in 0..=k {
        for i in 0..2 {
            let rows = binomial_signed(k - 1, r as isize - i as isize);
            let cols = binomial(k, r);
            if rows == 0 {
                blocks[i].push(CMatrix::zeros(0, cols));
                continue;
            }
            let offset = if i == 0 { 0 } else { binomial(k - 1, r) };
            let rhs = big[r].view((offset, 0), (rows, cols)).into_owned();
            blocks[i].push(solve(&small[r - i], &rhs)?);
        }
    }
    Ok(ShortTensor { site: j_k, k, blocks })
}

/// `Ω_{j_k}` by Cramer's rule: each entry is a ratio of determinants of the
/// `(k-1)`-spin family with one column replaced by a column of the `k`-spin
/// family.
pub fn short_tensor(j_k: usize, spec: &ChainSpec) -> Result<ShortTensor> {
    short_tensor_with(j_k, spec, |a, rhs| {
        let det = minor_det(a);
        if hadamard_ratio(a, det) < 1e-12 {
            return Err(Error::Singular(format!("Bethe family of {} states is linearly dependent", a.ncols())));
        }
        let mut out = CMatrix::zeros(a.ncols(), rhs.ncols());
        for beta in 0..rhs.ncols() {
            for alpha in 0..a.ncols() {
                let mut replaced = a.clone();
                replaced.set_column(alpha, &rhs.column(beta));
                out[(alpha, beta)] = minor_det(&replaced) / det;
            }
        }
        Ok(out)
    })
}

/// `Ω_{j_k}` by LU solves, for cross-checking [`short_tensor`].
pub fn short_tensor_lu(j_k: usize, spec: &ChainSpec) -> Result<ShortTensor> {
    short_tensor_with(j_k, spec, |a, rhs| {
        a.clone().lu().solve(rhs).ok_or_else(|| Error::Singular("Bethe family".into()))
    })
}

/// Bethe state on the last `k <= M` sites built by contracting the short
/// tensors `Ω_{j_k}, .., Ω_N` against the register state of `selection`,
/// whose momenta must lie in `1..=k`.
pub fn short_mps_state(k: usize, selection: &MagnonString, spec: &ChainSpec) -> Result<BetheState> {
    let n = spec.n_sites();
    if k == 0 || k > spec.n_magnons() || k > n {
        return Err(Error::Index(format!("short tensors need 1 <= k <= min(M, N), got {k}")));
    }
    if selection.k() != spec.n_magnons() || selection.positions().iter().any(|&m| m > k) {
        return Err(Error::Index(format!("selection {:?} outside momenta 1..={k}", selection.positions())));
    }
    let register = MagnonString::new(k, selection.positions().to_vec())?;
    let mut state = vec![ZERO; 1 << k];
    state[register.chi()] = ONE;
    for (offset, site) in ((n + 1 - k)..=n).enumerate() {
        let omega = short_tensor(site, spec)?;
        let wires: Vec<usize> = (offset..k).collect();
        apply_local(&omega.dense(), &wires, k, &mut state)?;
    }
    let amplitudes = extract_sector(&state, k, selection.r())?;
    Ok(BetheState { k, r: selection.r(), selection: selection.clone(), amplitudes })
}

/// `P^{[i,r]} = X_{j+1}^{-1[r-i]} Ω^{[i,r]} X_j^{[r]}` with `X` over the
/// `k`- and `(k-1)`-rapidity families.
pub fn short_blocks(j_k: usize, spec: &ChainSpec) -> Result<GateBlocks> {
    let omega = short_tensor(j_k, spec)?;
    let k = omega.k;
    let here = (0..=k).map(|r| orth_factor(k, r, spec)).collect::<Result<Vec<_>>>()?;
    let next = (0..k).map(|r| orth_factor(k - 1, r, spec)).collect::<Result<Vec<_>>>()?;
    let mut b: [Vec<CMatrix>; 2] = [Vec::new(), Vec::new()];
    for r in 0..=k {
        for i in 0..2 {
            let block = omega.block(i, r);
            b[i].push(if block.nrows() == 0 {
                block.clone()
            } else {
                &next[r - i].x_inv * block * &here[r].x
            });
        }
    }
    Ok(GateBlocks { blocks: b })
}

/// Short gate at site `j_k` on wires `j_k - 1 ..= N - 1`.
pub fn short_unitary(j_k: usize, spec: &ChainSpec) -> Result<CircuitUnitary> {
    let k = check_short_site(j_k, spec)?;
    let blocks = short_blocks(j_k, spec)?;
    let (u, _) = place_blocks(&blocks, k, k - 1, |chi| chi);
    Ok(CircuitUnitary { window: ((j_k - 1)..spec.n_sites()).collect(), matrix: u, kind: GateKind::Short })
}

/// Max-norm of `Ω^{[i,r]} - L^{[r-i]} Λ^{[i,r]}` at site `j_k`, where
/// `L = C^{-1} G`, `C` is the Gram matrix of the `(k-1)`-rapidity family on
/// `k-1` spins, `G` its overlaps with the `k`-rapidity family on the same
/// spins, and `Λ` the `k`-ancilla tensor.
pub fn ruiz_equivalence_check(j_k: usize, spec: &ChainSpec) -> Result<f64> {
    let k = check_short_site(j_k, spec)?;
    let omega = short_tensor(j_k, spec)?;
    let lam = LambdaTensor::from_table(&table_for_pool(spec, k)?, j_k);
    let mut worst: f64 = 0.0;
    for r in 0..=k {
        for i in 0..2 {
            if omega.block(i, r).nrows() == 0 {
                continue;
            }
            let w = r - i;
            let small = family_with_pool(k - 1, w, k - 1, spec)?;
            let wide = family_with_pool(k - 1, w, k, spec)?;
            let c = small.adjoint() * &small;
            let g = small.adjoint() * &wide;
            let l = c.lu().solve(&g).ok_or_else(|| Error::Singular("Gram matrix".into()))?;
            let predicted = l * lam.block(i, r);
            let scale = max_abs(omega.block(i, r)).max(1.0);
            worst = worst.max(max_abs_diff(omega.block(i, r), &predicted) / scale);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionResidual {
    pub k: usize,
    pub r: usize,
    pub kind: GateKind,
    /// Max-norm residual relative to the largest Gram entry.
    pub residual: f64,
}

fn recursion_residual(
    c_k: &CMatrix,
    c_prev: &CMatrix,
    c_prev_low: Option<&CMatrix>,
    t0: &CMatrix,
    t1: &CMatrix,
) -> f64 {
    let mut rhs = t0.adjoint() * c_prev * t0;
    if let Some(low) = c_prev_low {
        rhs += t1.adjoint() * low * t1;
    }
    max_abs_diff(c_k, &rhs) / max_abs(c_k).max(f64::MIN_POSITIVE)
}

/// Residuals of `C_k^{[r]} = T^{[0,r]†} C_{k-1}^{[r]} T^{[0,r]} + T^{[1,r]†} C_{k-1}^{[r-1]} T^{[1,r]}`
/// with `T = Λ` for long gates and `T = Ω` for short ones, at every `(k, r)`.
pub fn unitarity_recursions(spec: &ChainSpec) -> Result<Vec<RecursionResidual>> {
    let n = spec.n_sites();
    let m = spec.n_magnons();
    let pw = PlaneWaves::from_spec(spec)?;
    let mut out = Vec::new();
    for k in (m + 1)..=n {
        let j = n + 1 - k;
        let lam = LambdaTensor::from_table(&pw, j);
        let grams = (0..=m).map(|r| Ok(gram_matrix(k, r, spec)?.entries)).collect::<Result<Vec<_>>>()?;
        let prev = (0..=m).map(|r| Ok(gram_matrix(k - 1, r, spec)?.entries)).collect::<Result<Vec<_>>>()?;
        for r in 0..=m {
            let low = if r > 0 { Some(&prev[r - 1]) } else { None };
            let residual = recursion_residual(&grams[r], &prev[r], low, lam.block(0, r), lam.block(1, r));
            out.push(RecursionResidual { k, r, kind: GateKind::Long, residual });
        }
    }
    for k in 1..=m.min(n) {
        let j_k = n + 1 - k;
        let omega = short_tensor(j_k, spec)?;
        for r in 0..=k {
            let big = family_with_pool(k, r, k, spec)?;
            let c_k = big.adjoint() * &big;
            let gram_small = |w: usize| -> Result<CMatrix> {
                let s = family_with_pool(k - 1, w, k - 1, spec)?;
                Ok(s.adjoint() * s)
            };
            let c_prev = if r < k { gram_small(r)? } else { CMatrix::zeros(0, 0) };
            let c_low = if r > 0 { Some(gram_small(r - 1)?) } else { None };
            let residual = recursion_residual(&c_k, &c_prev, c_low.as_ref(), omega.block(0, r), omega.block(1, r));
            out.push(RecursionResidual { k, r, kind: GateKind::Short, residual });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    /// Initial bitstring `|1⟩^M |0⟩^{N-M}`, one entry per wire.
    pub initial: Vec<u8>,
    pub gates: Vec<CircuitUnitary>,
}

/// The staircase `P_{N-1} .. P_1` acting on `|1⟩^M |0⟩^{N-M}`: long gates at
/// `j = 1 ..= N-M`, then short gates at `j = N-M+1 ..= N-1`.
pub fn synthesize_circuit(spec: &ChainSpec) -> Result<Circuit> {
    let n = spec.n_sites();
    let m = spec.n_magnons();
    let mut gates = Vec::with_capacity(n.saturating_sub(1));
    for j in 1..n {
        gates.push(if j + m <= n { long_unitary(j, spec)? } else { short_unitary(j, spec)? });
    }
    let initial = (0..n).map(|w| u8::from(w < m)).collect();
    Ok(Circuit { n_qubits: n, initial, gates })
}

/// Dense `DMatrix` from row-major entries, used by importers.
pub fn matrix_from_rows(dim: usize, entries: &[C64]) -> Result<CMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::Dimension { expected: dim * dim, found: entries.len() });
    }
    Ok(DMatrix::from_row_slice(dim, dim, entries))
}
