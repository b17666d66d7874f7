//! Collective indices of fixed-weight computational basis states.
//!
//! A string `1 <= m_1 < ... < m_r <= k` marks the qubits in state `|1⟩`; its
//! bitstring value is `χ = Σ_p 2^(k - m_p)` with qubit 1 as the most
//! significant bit, and `α` is the 1-based rank of `χ` within the sector.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: usize = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(n, r)` for a possibly negative `r`.
pub fn binomial_signed(n: usize, r: isize) -> usize {
    if r < 0 {
        0
    } else {
        binomial(n, r as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MagnonString {
    k: usize,
    positions: Vec<usize>,
}

impl MagnonString {
    pub fn new(k: usize, positions: Vec<usize>) -> Result<Self> {
        if positions.len() > k {
            return Err(Error::Index(format!("{} positions on {k} qubits", positions.len())));
        }
        for w in positions.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Index(format!("positions {positions:?} not strictly increasing")));
            }
        }
        if let Some(&p) = positions.first() {
            if p == 0 {
                return Err(Error::Index("positions are 1-based".into()));
            }
        }
        if let Some(&p) = positions.last() {
            if p > k {
                return Err(Error::Index(format!("position {p} exceeds k = {k}")));
            }
        }
        Ok(MagnonString { k, positions })
    }

    pub fn from_chi(k: usize, chi: usize) -> Result<Self> {
        if k >= usize::BITS as usize || chi >> k != 0 {
            return Err(Error::Index(format!("bitstring {chi} does not fit in {k} qubits")));
        }
        let positions = (1..=k).filter(|&m| chi >> (k - m) & 1 == 1).collect();
        Ok(MagnonString { k, positions })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn chi(&self) -> usize {
        self.positions.iter().map(|&m| 1usize << (self.k - m)).sum()
    }

    pub fn contains(&self, m: usize) -> bool {
        self.positions.binary_search(&m).is_ok()
    }

    /// The string with position `m` removed.
    pub fn without(&self, m: usize) -> MagnonString {
        MagnonString { k: self.k, positions: self.positions.iter().copied().filter(|&p| p != m).collect() }
    }

    /// Bitstring in reading order, qubit 1 first.
    pub fn bits(&self) -> String {
        let chi = self.chi();
        (1..=self.k).map(|m| if chi >> (self.k - m) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

/// Fixed-weight subspace of `k` qubits with `r` of them in `|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    pub k: usize,
    pub r: usize,
}

impl Sector {
    pub fn new(k: usize, r: usize) -> Self {
        Sector { k, r }
    }

    pub fn dimension(&self) -> usize {
        binomial(self.k, self.r)
    }
}

/// 1-based rank of the string among its sector in ascending `χ`.
pub fn encode(s: &MagnonString) -> usize {
    encode_chi(s.chi(), s.k)
}

/// 1-based rank of a bitstring within its weight sector.
pub fn encode_chi(chi: usize, k: usize) -> usize {
    let mut remaining = chi.count_ones() as usize;
    let mut alpha = 1;
    for j in 1..=k {
        if chi >> (k - j) & 1 == 1 {
            alpha += binomial(k - j, remaining);
            remaining -= 1;
        }
    }
    alpha
}

pub fn decode(alpha: usize, k: usize, r: usize) -> Result<MagnonString> {
    let dim = binomial(k, r);
    if alpha == 0 || alpha > dim {
        return Err(Error::Index(format!("alpha = {alpha} outside 1..={dim} for k = {k}, r = {r}")));
    }
    let mut rest = alpha - 1;
    let mut remaining = r;
    let mut positions = Vec::with_capacity(r);
    for j in 1..=k {
        if remaining == 0 {
            break;
        }
        let zeros_first = binomial(k - j, remaining);
        if rest >= zeros_first {
            rest -= zeros_first;
            positions.push(j);
            remaining -= 1;
        }
    }
    Ok(MagnonString { k, positions })
}

/// Sector strings in ascending `χ`.
pub fn sector_basis(k: usize, r: usize) -> Vec<MagnonString> {
    sector_chis(k, r).into_iter().map(|chi| MagnonString::from_chi(k, chi).unwrap()).collect()
}

/// Sector bitstring values in ascending order.
pub fn sector_chis(k: usize, r: usize) -> Vec<usize> {
    if r > k {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(k, r));
    if r == 0 {
        out.push(0);
        return out;
    }
    // Next larger integer with the same popcount.
    let mut v: usize = (1 << r) - 1;
    let limit = 1usize << k;
    while v < limit {
        out.push(v);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Place sector amplitudes at their computational-basis slots.
pub fn embed_sector(vec: &[C64], k: usize, r: usize) -> Result<Vec<C64>> {
    let chis = sector_chis(k, r);
    if vec.len() != chis.len() {
        return Err(Error::Dimension { expected: chis.len(), found: vec.len() });
    }
    let mut out = vec![C64::new(0.0, 0.0); 1 << k];
    for (amp, chi) in vec.iter().zip(chis) {
        out[chi] = *amp;
    }
    Ok(out)
}

/// Sector amplitudes of a full `2^k` statevector.
pub fn extract_sector(state: &[C64], k: usize, r: usize) -> Result<Vec<C64>> {
    if state.len() != 1 << k {
        return Err(Error::Dimension { expected: 1 << k, found: state.len() });
    }
    Ok(sector_chis(k, r).into_iter().map(|chi| state[chi]).collect())
}
