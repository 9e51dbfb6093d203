//! Layered circuits over the discrete matchgate gate set.

use crate::error::{Error, Result};
use crate::somat::{eval_product, GeneratorId, TransferMatrix};

/// Ordered layers of generators; gates within a layer have disjoint qubit
/// support and therefore commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub n: usize,
    pub layers: Vec<Vec<GeneratorId>>,
    pub provenance: String,
}

impl Circuit {
    pub fn empty(n: usize) -> Self {
        Circuit { n, layers: Vec::new(), provenance: String::new() }
    }

    /// Place a time-ordered gate list into layers as early as possible.
    pub fn from_gates(n: usize, gates: &[GeneratorId]) -> Self {
        let mut layers: Vec<Vec<GeneratorId>> = Vec::new();
        // ready[q] = first layer index where qubit q is free
        let mut ready = vec![0usize; n + 2];
        for &g in gates {
            let (a, b) = g.qubits();
            let mut at = ready[a];
            if let Some(b) = b {
                at = at.max(ready[b]);
            }
            if at == layers.len() {
                layers.push(Vec::new());
            }
            layers[at].push(g);
            ready[a] = at + 1;
            if let Some(b) = b {
                ready[b] = at + 1;
            }
        }
        Circuit { n, layers, provenance: String::new() }
    }

    pub fn with_provenance(mut self, tag: &str) -> Self {
        self.provenance = tag.to_string();
        self
    }

    pub fn gates(&self) -> Vec<GeneratorId> {
        self.layers.iter().flatten().copied().collect()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn t_count(&self) -> usize {
        self.layers.iter().flatten().filter(|g| g.is_t()).count()
    }

    pub fn clifford_count(&self) -> usize {
        self.gate_count() - self.t_count()
    }

    /// Number of layers containing at least one T-kind gate.
    pub fn t_depth(&self) -> usize {
        self.layers.iter().filter(|l| l.iter().any(|g| g.is_t())).count()
    }

    /// Sites in range and no qubit used twice in a layer.
    pub fn validate(&self) -> Result<()> {
        for (i, layer) in self.layers.iter().enumerate() {
            for (a, &g) in layer.iter().enumerate() {
                g.check(self.n)?;
                if layer[..a].iter().any(|&h| h.overlaps(g)) {
                    return Err(Error::Domain(format!("layer {} reuses a qubit at {g}", i + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self) -> Result<TransferMatrix> {
        eval_product(self.n, &self.gates())
    }

    /// Exact check that the circuit implements `target`.
    pub fn implements(&self, target: &TransferMatrix) -> Result<bool> {
        if target.n() != self.n {
            return Ok(false);
        }
        Ok(self.eval()? == *target)
    }

    /// Time-reversed inverse circuit.
    pub fn inverse(&self) -> Circuit {
        let layers = self.layers.iter().rev().map(|l| l.iter().map(|g| g.inverse()).collect()).collect();
        Circuit { n: self.n, layers, provenance: self.provenance.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::somat::GateKind::*;

    #[test]
    fn asap_layering() {
        let gates = [
            GeneratorId::new(Ttil, 1),
            GeneratorId::new(Ttil, 3),
            GeneratorId::new(Rtil, 1),
            GeneratorId::new(Stil, 3),
            GeneratorId::new(Rtil, 2),
        ];
        let c = Circuit::from_gates(3, &gates);
        assert_eq!(c.depth(), 3);
        assert_eq!(c.layers[0], vec![gates[0], gates[1]]);
        assert_eq!(c.layers[1], vec![gates[2], gates[3]]);
        assert_eq!(c.t_count(), 2);
        assert_eq!(c.t_depth(), 1);
        c.validate().unwrap();
        assert_eq!(c.eval().unwrap(), eval_product(3, &gates).unwrap());
    }

    #[test]
    fn overlap_rejected() {
        let c = Circuit {
            n: 2,
            layers: vec![vec![GeneratorId::new(Ttil, 1), GeneratorId::new(Rtil, 1)]],
            provenance: String::new(),
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn inverse_undoes() {
        let c = Circuit::from_gates(2, &[GeneratorId::new(Ttil, 1), GeneratorId::new(Rtil, 1), GeneratorId::new(Stil, 2)]);
        let both = c.eval().unwrap().matmul(&c.inverse().eval().unwrap()).unwrap();
        assert!(both.is_identity());
    }
}
