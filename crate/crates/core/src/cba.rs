//! Coordinate Bethe states as matrix-product states in the F-basis.
//!
//! The plane-wave sum [`plane_wave_sum`] is the reference against which the
//! tensor contraction, the algebraic construction and the alternative
//! wavefunctions are checked.

use itertools::Itertools;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fbasis::dressed_dual_at;
use crate::index::{binomial, binomial_signed, decode, embed_sector, encode, sector_basis, MagnonString};
use crate::kernel::{ChainSpec, Model, PlaneWaves};
use crate::operator::{ancilla_blocks, apply_local, CMatrix, DenseOperator};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub const MAX_PERMUTATION_TERMS: usize = 10_000_000;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn check_site(j: usize, n: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::Index(format!("site {j} outside 1..={n}")));
    }
    Ok(())
}

/// `V_j = ⊗_a diag(g_{aj}, Π_{b≠a} f_{ab})`.
pub fn gauge_v(j: usize, spec: &ChainSpec) -> Result<DenseOperator> {
    check_site(j, spec.n_sites())?;
    let pw = PlaneWaves::from_spec(spec)?;
    let m = spec.n_magnons();
    let mut diag = CMatrix::identity(1, 1);
    for a in 1..=m {
        let g = pw.g(a, j);
        if g.norm() < spec.tolerances().pole {
            return Err(Error::Singular(format!("gauge weight g_{{{a},{j}}} vanishes")));
        }
        let prod: C64 = (1..=m).filter(|&b| b != a).map(|b| pw.s(a, b)).product();
        let mut local = CMatrix::zeros(2, 2);
        local[(0, 0)] = g;
        local[(1, 1)] = prod;
        diag = diag.kronecker(&local);
    }
    DenseOperator::new(m, diag)
}

/// Sector blocks `Λ^{[i,r]}` of the site tensor. `Λ^{[i,r]}` maps sector
/// `(M, r)` of the register into sector `(M, r - i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTensor {
    pub site: usize,
    n_ancillae: usize,
    blocks: [Vec<CMatrix>; 2],
}

impl LambdaTensor {
    /// Tensor at site `j` (1-based) for every magnon of `pw`, in order.
    pub fn from_table(pw: &PlaneWaves, j: usize) -> Self {
        let m = pw.n_magnons();
        let mut b0 = Vec::with_capacity(m + 1);
        let mut b1 = Vec::with_capacity(m + 1);
        for r in 0..=m {
            let basis = sector_basis(m, r);
            let mut d = CMatrix::zeros(basis.len(), basis.len());
            let mut l = CMatrix::zeros(binomial_signed(m, r as isize - 1), basis.len());
            for (col, n) in basis.iter().enumerate() {
                let pos = n.positions();
                d[(col, col)] = pos.iter().map(|&q| pw.x(q, j)).product();
                for &np in pos {
                    let value: C64 = pos.iter().filter(|&&q| q != np).map(|&q| pw.s(np, q) * pw.x(q, j)).product();
                    l[(encode(&n.without(np)) - 1, col)] += value;
                }
            }
            b0.push(d);
            b1.push(l);
        }
        LambdaTensor { site: j, n_ancillae: m, blocks: [b0, b1] }
    }

    pub fn n_ancillae(&self) -> usize {
        self.n_ancillae
    }

    pub fn block(&self, i: usize, r: usize) -> &CMatrix {
        &self.blocks[i][r]
    }

    /// `Λ^i` as an operator on the full register.
    pub fn component(&self, i: usize) -> DenseOperator {
        let m = self.n_ancillae;
        let dim = 1 << m;
        let mut out = CMatrix::zeros(dim, dim);
        for r in i..=m {
            let rows = sector_basis(m, r - i);
            let cols = sector_basis(m, r);
            let b = &self.blocks[i][r];
            for (ri, rs) in rows.iter().enumerate() {
                for (ci, cs) in cols.iter().enumerate() {
                    out[(rs.chi(), cs.chi())] = b[(ri, ci)];
                }
            }
        }
        DenseOperator::new(m, out).expect("square block assembly")
    }
}

pub fn lambda_tensor(j: usize, spec: &ChainSpec) -> Result<LambdaTensor> {
    check_site(j, spec.n_sites())?;
    Ok(LambdaTensor::from_table(&PlaneWaves::from_spec(spec)?, j))
}

/// `[V_j^{-1} 𝒯̃_j^0 V_{j-1}, V_j^{-1} 𝒯̃_j^1 V_{j-1}]` with `V_0 := V_N`, where
/// `𝒯̃_j^i` is the spin matrix element `⟨i|𝒯̃_j|0⟩`.
pub fn gauged_dual_tensor(j: usize, spec: &ChainSpec) -> Result<[DenseOperator; 2]> {
    check_site(j, spec.n_sites())?;
    let n = spec.n_sites();
    let dressed = dressed_dual_at(spec.inhomogeneities()[j - 1], spec.rapidities(), &spec.model())?;
    let [a, _, c, _] = ancilla_blocks(&dressed);
    let vj_inv = gauge_v(j, spec)?.inverse()?;
    let vprev = gauge_v(if j == 1 { n } else { j - 1 }, spec)?;
    Ok([&(&vj_inv * &a) * &vprev, &(&vj_inv * &c) * &vprev])
}

/// `⊗_b diag(g_{b,j-1} / g_{b,j}, 1)` with `g_{b,0} := g_{b,N}`; the identity on
/// homogeneous chains.
pub fn gauge_mismatch(j: usize, spec: &ChainSpec) -> Result<DenseOperator> {
    check_site(j, spec.n_sites())?;
    let pw = PlaneWaves::from_spec(spec)?;
    let prev = if j == 1 { spec.n_sites() } else { j - 1 };
    let mut diag = CMatrix::identity(1, 1);
    for b in 1..=spec.n_magnons() {
        let mut local = CMatrix::identity(2, 2);
        local[(0, 0)] = pw.g(b, prev) / pw.g(b, j);
        diag = diag.kronecker(&local);
    }
    DenseOperator::new(spec.n_magnons(), diag)
}

/// Max-norm of `V_j^{-1} 𝒯̃_j^i V_{j-1} - Λ_j^i D_j` over `i`, where `D_j` is
/// [`gauge_mismatch`].
pub fn lambda_gauge_residual(j: usize, spec: &ChainSpec) -> Result<f64> {
    let gauged = gauged_dual_tensor(j, spec)?;
    let lambda = lambda_tensor(j, spec)?;
    let d = gauge_mismatch(j, spec)?;
    Ok((0..2).map(|i| gauged[i].max_abs_diff(&(&lambda.component(i) * &d))).fold(0.0, f64::max))
}

/// An `r`-magnon Bethe state on the last `k` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheState {
    pub k: usize,
    pub r: usize,
    /// Momenta `m_1 < .. < m_r` drawn from `1..=M`.
    pub selection: MagnonString,
    /// Amplitudes over sector `(k, r)` in ascending bitstring order.
    pub amplitudes: Vec<C64>,
}

impl BetheState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_statevector(&self) -> Vec<C64> {
        embed_sector(&self.amplitudes, self.k, self.r).expect("sector length")
    }
}

fn check_selection(k: usize, selection: &MagnonString, spec: &ChainSpec) -> Result<()> {
    if selection.k() != spec.n_magnons() {
        return Err(Error::Index(format!(
            "selection is over {} momenta, the chain has {}",
            selection.k(),
            spec.n_magnons()
        )));
    }
    if k > spec.n_sites() || selection.r() > k {
        return Err(Error::Index(format!("{} magnons on {k} of {} sites", selection.r(), spec.n_sites())));
    }
    Ok(())
}

/// Plane-wave sum over sector `(k, r)` for the sites `first_site ..
/// first_site + k - 1`. The amplitude of `|n_1 .. n_r⟩` is
/// `Σ_a Π_{q<p} s[a_q][a_p] Π_p Π_{first_site <= l < site(n_p)} x[a_p][l]`, with the
/// magnons `a_p` running over `magnons` (1-based). With `signed` each term
/// also carries the sign of the permutation.
pub fn plane_wave_sum(
    x: &[Vec<C64>],
    s: &[Vec<C64>],
    first_site: usize,
    k: usize,
    magnons: &[usize],
    signed: bool,
) -> Result<Vec<C64>> {
    let r = magnons.len();
    let terms = factorial(r).saturating_mul(binomial(k, r));
    if terms > MAX_PERMUTATION_TERMS {
        return Err(Error::SizeGuard { what: "permutation terms", value: terms, limit: MAX_PERMUTATION_TERMS });
    }
    let perms: Vec<(Vec<usize>, bool)> = (0..r)
        .permutations(r)
        .map(|p| {
            let inversions = (0..r).flat_map(|i| ((i + 1)..r).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p.into_iter().map(|i| magnons[i] - 1).collect(), inversions % 2 == 1)
        })
        .collect();
    let mut out = Vec::with_capacity(binomial(k, r));
    for string in sector_basis(k, r) {
        let sites: Vec<usize> = string.positions().iter().map(|&n| first_site + n - 2).collect();
        let mut amp = ZERO;
        for (a, odd) in &perms {
            let mut term = ONE;
            for p in 0..r {
                for q in 0..p {
                    term *= s[a[q]][a[p]];
                }
                term *= x[a[p]][(first_site - 1)..sites[p]].iter().product::<C64>();
            }
            amp += if signed && *odd { -term } else { term };
        }
        out.push(amp);
    }
    Ok(out)
}

/// Reference Bethe state on the last `k` sites by explicit summation over
/// permutations.
pub fn bethe_state_explicit(k: usize, selection: &MagnonString, spec: &ChainSpec) -> Result<BetheState> {
    check_selection(k, selection, spec)?;
    let pw = PlaneWaves::from_spec(spec)?;
    let first = spec.n_sites() - k + 1;
    let amplitudes = plane_wave_sum(&pw.x, &pw.s, first, k, selection.positions(), false)?;
    Ok(BetheState { k, r: selection.r(), selection: selection.clone(), amplitudes })
}

/// Contraction of the tensors of `first_site ..= N` (last site leftmost):
/// the matrix with entries `⟨0| Λ_N^{i_N} .. Λ_{first}^{i_first} |β⟩` for
/// rows `i` in sector `(k, r)` and columns `β` in sector `(M', r)`, where `M'`
/// is the number of magnons in `pw`.
pub fn family_matrix(pw: &PlaneWaves, first_site: usize, r: usize) -> CMatrix {
    let n = pw.n_sites();
    let m = pw.n_magnons();
    let k = n + 1 - first_site;
    if r > m || r > k {
        return CMatrix::zeros(binomial(k, r), binomial(m, r));
    }
    let tensors: Vec<LambdaTensor> = (first_site..=n).map(|j| LambdaTensor::from_table(pw, j)).collect();
    contract_suffix(&tensors, r)
}

/// Sweep of site tensors from the last to the first; `tensors[0]` is the
/// leftmost site of the support.
pub(crate) fn contract_suffix(tensors: &[LambdaTensor], r: usize) -> CMatrix {
    let m = tensors.first().map_or(0, |t| t.n_ancillae());
    let mut rows: Vec<CMatrix> = (0..=r).map(|w| CMatrix::zeros(usize::from(w == 0), binomial(m, w))).collect();
    rows[0][(0, 0)] = ONE;
    for (t, tensor) in tensors.iter().rev().enumerate() {
        let len = t + 1;
        let mut next = Vec::with_capacity(r + 1);
        for w in 0..=r {
            let cols = binomial(m, w);
            let mut out = CMatrix::zeros(binomial(len, w), cols);
            if w <= m {
                let top = &rows[w] * tensor.block(0, w);
                out.view_mut((0, 0), (top.nrows(), cols)).copy_from(&top);
                if w >= 1 {
                    let bottom = &rows[w - 1] * tensor.block(1, w);
                    out.view_mut((top.nrows(), 0), (bottom.nrows(), cols)).copy_from(&bottom);
                }
            }
            next.push(out);
        }
        rows = next;
    }
    rows.swap_remove(r)
}

/// Bethe state from the contraction of the full `M`-ancilla register.
pub fn bethe_state_mps(k: usize, selection: &MagnonString, spec: &ChainSpec) -> Result<BetheState> {
    check_selection(k, selection, spec)?;
    let pw = PlaneWaves::from_spec(spec)?;
    let family = family_matrix(&pw, spec.n_sites() - k + 1, selection.r());
    let col = encode(selection) - 1;
    Ok(BetheState {
        k,
        r: selection.r(),
        selection: selection.clone(),
        amplitudes: family.column(col).iter().copied().collect(),
    })
}

/// Bethe state from the contraction of an `r`-ancilla register carrying only
/// the selected rapidities, initialized to `|1..1⟩`.
pub fn bethe_state_mps_reduced(k: usize, selection: &MagnonString, spec: &ChainSpec) -> Result<BetheState> {
    check_selection(k, selection, spec)?;
    let pw = PlaneWaves::from_spec(spec)?.select(selection.positions());
    let family = family_matrix(&pw, spec.n_sites() - k + 1, selection.r());
    Ok(BetheState {
        k,
        r: selection.r(),
        selection: selection.clone(),
        amplitudes: family.column(0).iter().copied().collect(),
    })
}

/// All Bethe states of sector `(k, r)`, one per selection in ascending order.
pub fn bethe_family(k: usize, r: usize, spec: &ChainSpec) -> Result<Vec<BetheState>> {
    let m = spec.n_magnons();
    if r > m || r > k || k > spec.n_sites() {
        return Err(Error::Index(format!("no family for k = {k}, r = {r}, M = {m}")));
    }
    (1..=binomial(m, r)).map(|alpha| bethe_state_explicit(k, &decode(alpha, m, r)?, spec)).collect()
}

/// `B(u_1) .. B(u_M) |0..0⟩` from the monodromy matrix, with
/// `B(u) = ⟨0|T(u)|1⟩` on the ancilla.
pub fn aba_reference_state(spec: &ChainSpec) -> Result<Vec<C64>> {
    let n = spec.n_sites();
    let m = spec.n_magnons();
    if n > 10 {
        return Err(Error::SizeGuard { what: "sites", value: n, limit: 10 });
    }
    if m > 3 {
        return Err(Error::SizeGuard { what: "magnons", value: m, limit: 3 });
    }
    let model = spec.model();
    let half = 1usize << n;
    let mut psi = vec![ZERO; half];
    psi[0] = ONE;
    for &u in spec.rapidities().iter().rev() {
        let mut ext = vec![ZERO; 2 * half];
        ext[half..].copy_from_slice(&psi);
        for (j, &v) in spec.inhomogeneities().iter().enumerate() {
            apply_local(model.r_matrix(u - v)?.matrix(), &[0, j + 1], n + 1, &mut ext)?;
        }
        ext.truncate(half);
        psi = ext;
    }
    Ok(psi)
}

/// Best scalar `c` with `reference ≈ c * candidate` and the relative residual
/// `‖reference - c candidate‖ / ‖reference‖`.
pub fn ray_comparison(reference: &[C64], candidate: &[C64]) -> Result<(C64, f64)> {
    if reference.len() != candidate.len() {
        return Err(Error::Dimension { expected: reference.len(), found: candidate.len() });
    }
    let cc: f64 = candidate.iter().map(|z| z.norm_sqr()).sum();
    let rr: f64 = reference.iter().map(|z| z.norm_sqr()).sum();
    if cc == 0.0 || rr == 0.0 {
        return Err(Error::ZeroVector);
    }
    let overlap: C64 = candidate.iter().zip(reference).map(|(c, r)| c.conj() * r).sum();
    let scale = overlap / cc;
    let res: f64 = reference.iter().zip(candidate).map(|(r, c)| (r - scale * c).norm_sqr()).sum();
    Ok((scale, (res / rr).sqrt()))
}

/// Plane-wave sum on the whole chain with quasi-momenta
/// `x̃_{a,j} = x_{a,j} g_{a,j+1} / g_{a,j}`, which absorbs the site dependence of
/// the creation-operator weights; `x̃_{a,N} = x_{a,N}` never enters.
pub fn dressed_plane_waves(spec: &ChainSpec) -> Result<Vec<C64>> {
    let pw = PlaneWaves::from_spec(spec)?;
    let n = spec.n_sites();
    let x: Vec<Vec<C64>> = (0..spec.n_magnons())
        .map(|a| (0..n).map(|j| if j + 1 < n { pw.x[a][j] * pw.g[a][j + 1] / pw.g[a][j] } else { pw.x[a][j] }).collect())
        .collect();
    let magnons: Vec<usize> = (1..=spec.n_magnons()).collect();
    let sector = plane_wave_sum(&x, &pw.s, 1, n, &magnons, false)?;
    embed_sector(&sector, n, spec.n_magnons())
}

/// `K = Π_{a<b} s_{ab} s_{ba}`.
pub fn scattering_product(pw: &PlaneWaves) -> C64 {
    let m = pw.n_magnons();
    (1..=m).flat_map(|a| ((a + 1)..=m).map(move |b| (a, b))).map(|(a, b)| pw.s(a, b) * pw.s(b, a)).product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarReport {
    /// Relative collinearity residual.
    pub residual: f64,
    /// Observed `c` in `reference = c * candidate`.
    pub observed: C64,
    /// Closed-form prediction for `c`.
    pub predicted: C64,
}

/// Compares the monodromy-built state with the plane-wave sum on the whole
/// chain. The reference is the plane-wave sum with the dressed quasi-momenta
/// of [`dressed_plane_waves`]; the prediction is `K / Π_a g_{a,1}`. On
/// homogeneous chains the dressed and plain sums coincide.
pub fn aba_comparison(spec: &ChainSpec) -> Result<ScalarReport> {
    let aba = aba_reference_state(spec)?;
    let reference = dressed_plane_waves(spec)?;
    let (observed, residual) = ray_comparison(&reference, &aba)?;
    let pw = PlaneWaves::from_spec(spec)?;
    let g1: C64 = (1..=spec.n_magnons()).map(|a| pw.g(a, 1)).product();
    Ok(ScalarReport { residual, observed, predicted: scattering_product(&pw) / g1 })
}

/// Where the trailing quasi-momentum product of the alternative wavefunction
/// runs relative to the magnon position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRange {
    /// `Π_{j < n_p} x_{a_p, j}`.
    BeforeMagnon,
    /// `Π_{j > n_p} x_{a_p, j}`.
    AfterMagnon,
}

/// Wavefunction with inverse scattering weights and a `g` factor at each
/// magnon: `Σ_a Π_{q<p} 1/s_{a_p a_q} Π_p g_{a_p, n_p} Π_{tail} x_{a_p, j}`,
/// over sector `(N, M)`.
pub fn ovchinnikov_state(spec: &ChainSpec, tail: TailRange) -> Result<Vec<C64>> {
    let n = spec.n_sites();
    let m = spec.n_magnons();
    let terms = factorial(m).saturating_mul(binomial(n, m));
    if terms > MAX_PERMUTATION_TERMS {
        return Err(Error::SizeGuard { what: "permutation terms", value: terms, limit: MAX_PERMUTATION_TERMS });
    }
    let pw = PlaneWaves::from_spec(spec)?;
    for a in 0..m {
        for b in 0..m {
            if a != b && pw.s[a][b].norm() < spec.tolerances().pole {
                return Err(Error::Singular(format!("scattering amplitude s_{{{},{}}} vanishes", a + 1, b + 1)));
            }
        }
    }
    let mut out = Vec::with_capacity(binomial(n, m));
    for string in sector_basis(n, m) {
        let sites = string.positions();
        let mut amp = ZERO;
        for a in (0..m).permutations(m) {
            let mut term = ONE;
            for p in 0..m {
                for q in 0..p {
                    term /= pw.s[a[p]][a[q]];
                }
                term *= pw.g[a[p]][sites[p] - 1];
                let range = match tail {
                    TailRange::BeforeMagnon => 0..(sites[p] - 1),
                    TailRange::AfterMagnon => sites[p]..n,
                };
                for l in range {
                    term *= pw.x[a[p]][l];
                }
            }
            amp += term;
        }
        out.push(amp);
    }
    Ok(out)
}

/// The normalization that takes the alternative wavefunction to the
/// plane-wave sum, `Π_a f_{a,1} / (g_{a,1} f_{a,N}) Π_{b<a} s_{ab} s_{ba}`.
pub fn ovchinnikov_prefactor(spec: &ChainSpec) -> Result<C64> {
    let pw = PlaneWaves::from_spec(spec)?;
    let n = spec.n_sites();
    let m = spec.n_magnons();
    let mut out = scattering_product(&pw);
    for a in 1..=m {
        out *= pw.x(a, 1) / (pw.g(a, 1) * pw.x(a, n));
    }
    Ok(out)
}

/// Compares [`ovchinnikov_state`] with the plane-wave sum on the whole chain.
pub fn ovchinnikov_comparison(spec: &ChainSpec, tail: TailRange) -> Result<ScalarReport> {
    let all = MagnonString::new(spec.n_magnons(), (1..=spec.n_magnons()).collect())?;
    let oracle = bethe_state_explicit(spec.n_sites(), &all, spec)?;
    let alt = ovchinnikov_state(spec, tail)?;
    let (observed, residual) = ray_comparison(&oracle.amplitudes, &alt)?;
    Ok(ScalarReport { residual, observed, predicted: ovchinnikov_prefactor(spec)? })
}

/// Substituted scattering weight
/// `ŝ_{ab} = sinh(u_a + iγ) sinh(u_b + iγ) / (sinh(iγ) sinh(u_a - u_b + iγ))`.
pub fn substituted_scattering(ua: C64, ub: C64, model: &Model) -> Result<C64> {
    let ig = C64::i() * model.gamma();
    let den = ig.sinh() * (ua - ub + ig).sinh();
    if den.norm() < model.pole_tol() {
        return Err(Error::Pole { arg: ua - ub, modulus: den.norm(), tol: model.pole_tol() });
    }
    Ok((ua + ig).sinh() * (ub + ig).sinh() / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeMapReport {
    /// Collinearity residual of the sign-weighted substituted sum.
    pub residual: f64,
    /// Collinearity residual of the substituted sum without permutation signs.
    pub unsigned_residual: f64,
    /// Observed `c` in `Π_{b<a} 1/(s_{ba} s_{ab}) * plain sum = c * substituted sum`.
    pub observed: C64,
    /// `Π_{b<a} sinh(iγ) sinh(u_a-u_b+iγ) sinh(u_b-u_a+iγ) / (sinh(u_a+iγ) sinh(u_b+iγ) sinh(u_a-u_b))`.
    pub predicted: C64,
}

/// Plane-wave sum with `s_{ab}` replaced by [`substituted_scattering`],
/// compared with the plain sum rescaled by `Π_{b<a} 1/(s_{ba} s_{ab})` on a
/// homogeneous chain. The substituted weights differ from `s_{ab}` by a factor
/// odd under `a <-> b`, so collinearity requires the permutation sign.
pub fn ruiz_amplitude_map(spec: &ChainSpec) -> Result<AmplitudeMapReport> {
    if !spec.is_homogeneous() {
        return Err(Error::InvalidSpec("the amplitude map applies to homogeneous chains".into()));
    }
    let n = spec.n_sites();
    let m = spec.n_magnons();
    let model = spec.model();
    let u = spec.rapidities();
    let pw = PlaneWaves::from_spec(spec)?;
    let mut s_hat = vec![vec![ZERO; m]; m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                s_hat[a][b] = substituted_scattering(u[a], u[b], &model)?;
            }
        }
    }
    let magnons: Vec<usize> = (1..=m).collect();
    let renorm = ONE / scattering_product(&pw);
    let oracle: Vec<C64> = plane_wave_sum(&pw.x, &pw.s, 1, n, &magnons, false)?.into_iter().map(|z| z * renorm).collect();
    let signed = plane_wave_sum(&pw.x, &s_hat, 1, n, &magnons, true)?;
    let unsigned = plane_wave_sum(&pw.x, &s_hat, 1, n, &magnons, false)?;
    let (observed, residual) = ray_comparison(&oracle, &signed)?;
    let (_, unsigned_residual) = ray_comparison(&oracle, &unsigned)?;
    let ig = C64::i() * spec.gamma();
    let mut predicted = ONE;
    for a in 0..m {
        for b in 0..a {
            predicted *= ig.sinh() * (u[a] - u[b] + ig).sinh() * (u[b] - u[a] + ig).sinh()
                / ((u[a] + ig).sinh() * (u[b] + ig).sinh() * (u[a] - u[b]).sinh());
        }
    }
    Ok(AmplitudeMapReport { residual, unsigned_residual, observed, predicted })
}
