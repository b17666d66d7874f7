//! Versioned text format for synthesized circuits: a header line followed by
//! a JSON body. Floats are written in shortest round-trip form.

use bethe_circuit::synth::{matrix_from_rows, Circuit, CircuitUnitary, GateKind};
use bethe_circuit::{ChainSpec, C64};
use serde::{Deserialize, Serialize};

pub const HEADER: &str = "ABC-CIRCUIT 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub n_sites: usize,
    pub n_magnons: usize,
    pub gamma: [f64; 2],
    pub inhomogeneities: Vec<[f64; 2]>,
    pub rapidities: Vec<[f64; 2]>,
    pub tool_version: String,
    pub wire_order: String,
    pub matrix_layout: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub window: Vec<usize>,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitExport {
    pub metadata: Metadata,
    pub initial: Vec<u8>,
    pub gates: Vec<GateRecord>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl CircuitExport {
    pub fn new(spec: &ChainSpec, circuit: &Circuit) -> Self {
        let metadata = Metadata {
            n_sites: spec.n_sites(),
            n_magnons: spec.n_magnons(),
            gamma: pair(spec.gamma()),
            inhomogeneities: spec.inhomogeneities().iter().copied().map(pair).collect(),
            rapidities: spec.rapidities().iter().copied().map(pair).collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wire_order: "wire 0 is the most significant bit".to_string(),
            matrix_layout: "row-major; columns are inputs on the window".to_string(),
        };
        let gates = circuit
            .gates
            .iter()
            .map(|g| GateRecord {
                kind: match g.kind {
                    GateKind::Long => "long",
                    GateKind::Short => "short",
                }
                .to_string(),
                window: g.window.clone(),
                entries: g.matrix.transpose().iter().copied().map(pair).collect(),
            })
            .collect();
        CircuitExport { metadata, initial: circuit.initial.clone(), gates }
    }

    pub fn to_text(&self) -> String {
        let body = serde_json::to_string_pretty(self).expect("serializable export");
        format!("{HEADER}\n{body}\n")
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let (header, body) = text.split_once('\n').ok_or("missing header line")?;
        if header.trim_end() != HEADER {
            return Err(format!("unsupported header `{header}`"));
        }
        serde_json::from_str(body).map_err(|e| format!("malformed circuit body: {e}"))
    }

    pub fn to_circuit(&self) -> Result<Circuit, String> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let kind = match g.kind.as_str() {
                    "long" => GateKind::Long,
                    "short" => GateKind::Short,
                    other => return Err(format!("unknown gate kind `{other}`")),
                };
                let entries: Vec<C64> = g.entries.iter().map(|p| C64::new(p[0], p[1])).collect();
                let matrix = matrix_from_rows(1 << g.window.len(), &entries).map_err(|e| e.to_string())?;
                Ok(CircuitUnitary { window: g.window.clone(), matrix, kind })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Circuit { n_qubits: self.metadata.n_sites, initial: self.initial.clone(), gates })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bethe_circuit::synth::synthesize_circuit;

    fn spec() -> ChainSpec {
        ChainSpec::new(
            C64::new(0.91, 0.07),
            vec![C64::new(0.1, -0.05), C64::new(-0.2, 0.03), C64::new(0.0, 0.1), C64::new(0.3, 0.0)],
            vec![C64::new(0.25, 0.3), C64::new(-0.4, 0.15)],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = spec();
        let circuit = synthesize_circuit(&s).unwrap();
        let text = CircuitExport::new(&s, &circuit).to_text();
        let back = CircuitExport::from_text(&text).unwrap().to_circuit().unwrap();
        assert_eq!(back.initial, circuit.initial);
        assert_eq!(back.gates.len(), circuit.gates.len());
        for (a, b) in circuit.gates.iter().zip(&back.gates) {
            assert_eq!(a.window, b.window);
            assert_eq!(a.kind, b.kind);
            for (x, y) in a.matrix.iter().zip(b.matrix.iter()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(CircuitExport::from_text("ABC-CIRCUIT 2\n{}").is_err());
        assert!(CircuitExport::from_text("").is_err());
    }
}
