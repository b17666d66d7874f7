//! Dense statevector simulation of synthesized circuits.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernel::ChainSpec;
use crate::operator::apply_local;
use crate::synth::{Circuit, CircuitUnitary};

pub const MAX_SIM_QUBITS: usize = 12;
pub const MAX_HAMILTONIAN_SITES: usize = 10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Amplitudes over `2^n` basis states, wire 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_qubits > MAX_SIM_QUBITS {
            return Err(Error::SizeGuard { what: "qubits", value: n_qubits, limit: MAX_SIM_QUBITS });
        }
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Dimension { expected: 1 << n_qubits, found: amplitudes.len() });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational basis state; `bits[w]` is the value of wire `w`.
    pub fn basis(bits: &[u8]) -> Result<Self> {
        let n = bits.len();
        let index = bits.iter().try_fold(0usize, |acc, &b| match b {
            0 | 1 => Ok((acc << 1) | b as usize),
            _ => Err(Error::InvalidSpec(format!("bit value {b}"))),
        })?;
        if n > MAX_SIM_QUBITS {
            return Err(Error::SizeGuard { what: "qubits", value: n, limit: MAX_SIM_QUBITS });
        }
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = ONE;
        Self::new(n, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Apply `gate` on its window, leaving the other wires untouched.
pub fn apply_gate(mut state: StateVector, gate: &CircuitUnitary) -> Result<StateVector> {
    apply_gate_in_place(&mut state, gate)?;
    Ok(state)
}

pub fn apply_gate_in_place(state: &mut StateVector, gate: &CircuitUnitary) -> Result<()> {
    if gate.window.iter().any(|&w| w >= state.n_qubits) {
        return Err(Error::Index(format!(
            "window {:?} outside a register of {} qubits",
            gate.window, state.n_qubits
        )));
    }
    apply_local(&gate.matrix, &gate.window, state.n_qubits, &mut state.amplitudes)
}

/// Gates applied in order to the initial bitstring.
pub fn run_circuit(circuit: &Circuit) -> Result<StateVector> {
    if circuit.n_qubits > MAX_SIM_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: circuit.n_qubits, limit: MAX_SIM_QUBITS });
    }
    if circuit.initial.len() != circuit.n_qubits {
        return Err(Error::Dimension { expected: circuit.n_qubits, found: circuit.initial.len() });
    }
    let mut state = StateVector::basis(&circuit.initial)?;
    for gate in &circuit.gates {
        apply_gate_in_place(&mut state, gate)?;
    }
    Ok(state)
}

/// `|⟨a|b⟩| / (‖a‖ ‖b‖)`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ip = a.inner(b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((ip.norm() / (na * nb)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
    pub energy: C64,
    /// `‖H|ψ⟩ - ⟨H⟩|ψ⟩‖ / ‖ψ‖`.
    pub residual: f64,
}

/// `H|ψ⟩` for `H = Σ_j (X_j X_{j+1} + Y_j Y_{j+1} + Δ Z_j Z_{j+1})` with
/// periodic boundary.
pub fn apply_hamiltonian(amplitudes: &[C64], n: usize, delta: C64) -> Vec<C64> {
    let mut out = vec![ZERO; amplitudes.len()];
    if n < 2 {
        return out;
    }
    let bonds: Vec<(usize, usize)> = if n == 2 { vec![(0, 1), (1, 0)] } else { (0..n).map(|j| (j, (j + 1) % n)).collect() };
    for (idx, &amp) in amplitudes.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        for &(a, b) in &bonds {
            let (ma, mb) = (1 << (n - 1 - a), 1 << (n - 1 - b));
            let parallel = (idx & ma == 0) == (idx & mb == 0);
            if parallel {
                out[idx] += delta * amp;
            } else {
                out[idx] -= delta * amp;
                out[idx ^ ma ^ mb] += 2.0 * amp;
            }
        }
    }
    out
}

/// Eigenstate diagnostic of the periodic chain Hamiltonian with the
/// anisotropy of a homogeneous `spec`.
pub fn hamiltonian_residual(state: &StateVector, spec: &ChainSpec) -> Result<EnergyReport> {
    if !spec.is_homogeneous() {
        return Err(Error::InvalidSpec("the Hamiltonian diagnostic needs a homogeneous chain".into()));
    }
    let n = spec.n_sites();
    if n > MAX_HAMILTONIAN_SITES {
        return Err(Error::SizeGuard { what: "Hamiltonian sites", value: n, limit: MAX_HAMILTONIAN_SITES });
    }
    if state.n_qubits != n {
        return Err(Error::Dimension { expected: n, found: state.n_qubits });
    }
    let norm_sq = state.norm().powi(2);
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    let h = apply_hamiltonian(&state.amplitudes, n, spec.delta());
    let energy: C64 = state.amplitudes.iter().zip(&h).map(|(a, b)| a.conj() * b).sum::<C64>() / norm_sq;
    let residual = h
        .iter()
        .zip(&state.amplitudes)
        .map(|(hv, v)| (hv - energy * v).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm_sq.sqrt();
    Ok(EnergyReport { energy, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cba::bethe_state_explicit;
    use crate::index::MagnonString;
    use crate::operator::{embed, swap, DenseOperator};
    use crate::synth::{synthesize_circuit, GateKind};
    use crate::CMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let amps = (0..1 << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        StateVector::new(n, amps).unwrap()
    }

    fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let m = CMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        m.qr().q()
    }

    fn gate(window: Vec<usize>, matrix: CMatrix) -> CircuitUnitary {
        CircuitUnitary { window, matrix, kind: GateKind::Long }
    }

    #[test]
    fn identity_gate_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(4, &mut rng);
        let out = apply_gate(s.clone(), &gate(vec![1, 2], CMatrix::identity(4, 4))).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn norm_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = random_state(6, &mut rng);
        let n0 = s.norm();
        for _ in 0..100 {
            let w = rng.random_range(1..=3);
            let start = rng.random_range(0..=6 - w);
            let g = gate((start..start + w).collect(), random_unitary(1 << w, &mut rng));
            s = apply_gate(s, &g).unwrap();
        }
        assert!((s.norm() - n0).abs() < 1e-12 * n0);
    }

    #[test]
    fn swap_window_reindexes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(4, &mut rng);
        let out = apply_gate(s.clone(), &gate(vec![1, 2], swap().into_matrix())).unwrap();
        for idx in 0..16usize {
            let (b1, b2) = ((idx >> 2) & 1, (idx >> 1) & 1);
            let swapped = (idx & !0b0110) | (b1 << 1) | (b2 << 2);
            assert_eq!(out.amplitudes()[swapped], s.amplitudes()[idx]);
        }
    }

    #[test]
    fn windowed_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=6 {
            let s = random_state(n, &mut rng);
            let w = 2.min(n);
            let start = rng.random_range(0..=n - w);
            let u = random_unitary(1 << w, &mut rng);
            let window: Vec<usize> = (start..start + w).collect();
            let full = embed(&DenseOperator::new(w, u.clone()).unwrap(), &window, n).unwrap();
            let expected = full.matrix() * nalgebra::DVector::from_column_slice(s.amplitudes());
            let out = apply_gate(s, &gate(window, u)).unwrap();
            for (a, b) in out.amplitudes().iter().zip(expected.iter()) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn window_out_of_range() {
        let s = StateVector::basis(&[0, 0]).unwrap();
        assert!(apply_gate(s, &gate(vec![1, 2], CMatrix::identity(4, 4))).is_err());
    }

    #[test]
    fn fidelity_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(3, &mut rng);
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-15);
        let phase = c(0.6, 0.8);
        let rotated = StateVector::new(3, s.amplitudes().iter().map(|z| z * phase).collect()).unwrap();
        assert!((fidelity(&s, &rotated).unwrap() - 1.0).abs() < 1e-14);
        let a = StateVector::basis(&[0, 1, 0]).unwrap();
        let b = StateVector::basis(&[1, 0, 0]).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let zero = StateVector::new(3, vec![ZERO; 8]).unwrap();
        assert!(matches!(fidelity(&zero, &a), Err(Error::ZeroVector)));
    }

    fn spec(n: usize, m: usize) -> ChainSpec {
        let v = (0..n).map(|j| c(0.11 * j as f64 - 0.2, 0.07 * j as f64)).collect();
        let u = (0..m).map(|a| c(0.35 - 0.29 * a as f64, 0.2 + 0.13 * a as f64)).collect();
        ChainSpec::new(c(0.87, 0.1), v, u).unwrap()
    }

    #[test]
    fn no_magnons_gives_vacuum() {
        let out = run_circuit(&synthesize_circuit(&spec(5, 0)).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(&[0; 5]).unwrap());
    }

    #[test]
    fn circuit_prepares_bethe_state() {
        for (n, m) in [(6, 2), (4, 4), (5, 1)] {
            let s = spec(n, m);
            let out = run_circuit(&synthesize_circuit(&s).unwrap()).unwrap();
            let all = MagnonString::new(m, (1..=m).collect()).unwrap();
            let oracle = bethe_state_explicit(n, &all, &s).unwrap().to_statevector();
            let oracle = StateVector::new(n, oracle).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-10);
            assert!(fidelity(&out, &oracle).unwrap() > 1.0 - 1e-8, "N={n} M={m}");
        }
    }

    #[test]
    fn vacuum_energy() {
        let s = ChainSpec::homogeneous(6, c(0.7, 0.0), vec![]).unwrap();
        let rep = hamiltonian_residual(&StateVector::basis(&[0; 6]).unwrap(), &s).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!((rep.energy - 6.0 * s.delta()).norm() < 1e-14);
    }

    #[test]
    fn random_state_is_not_an_eigenstate() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = ChainSpec::homogeneous(5, c(0.7, 0.0), vec![]).unwrap();
        assert!(hamiltonian_residual(&random_state(5, &mut rng), &s).unwrap().residual > 1e-3);
    }

    #[test]
    fn periodic_one_magnon_is_an_eigenstate() {
        let n = 6;
        let gamma = c(0.8, 0.0);
        let q = (C64::i() * gamma).exp();
        for p in 0..n {
            let x = (C64::i() * (2.0 * std::f64::consts::PI * p as f64 / n as f64)).exp();
            let u = ((ONE - x / q) / (ONE - x * q)).ln() / 2.0;
            let s = ChainSpec::homogeneous(n, gamma, vec![u]).unwrap();
            let one = MagnonString::new(1, vec![1]).unwrap();
            let state = bethe_state_explicit(n, &one, &s).unwrap().to_statevector();
            let rep = hamiltonian_residual(&StateVector::new(n, state).unwrap(), &s).unwrap();
            assert!(rep.residual < 1e-8, "p={p} residual {}", rep.residual);
        }
    }

    #[test]
    fn inhomogeneous_chain_rejected() {
        let s = spec(4, 1);
        assert!(hamiltonian_residual(&StateVector::basis(&[0; 4]).unwrap(), &s).is_err());
    }
}
