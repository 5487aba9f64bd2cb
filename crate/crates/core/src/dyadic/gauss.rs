use gauss_quad::legendre::GaussLegendre;

use crate::error::{LabError, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Result<Self> {
        match order {
            0 => Err(LabError::InvalidParameter(
                "quadrature order must be positive".into(),
            )),
            1 => Ok(GaussRule {
                nodes: vec![0.0],
                weights: vec![2.0],
            }),
            n => {
                let rule = GaussLegendre::new(n).map_err(|e| {
                    LabError::InvalidParameter(format!("Gauss-Legendre order {n}: {e}"))
                })?;
                let mut pairs = rule.as_node_weight_pairs().to_vec();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                Ok(GaussRule {
                    nodes: pairs.iter().map(|p| p.0).collect(),
                    weights: pairs.iter().map(|p| p.1).collect(),
                })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (m + h * x, h * w))
    }

    /// Values of the Lagrange basis on the rule's nodes at `x` in `[-1, 1]`.
    pub fn lagrange(&self, x: f64, out: &mut [f64]) {
        let n = self.nodes.len();
        for a in 0..n {
            let mut p = 1.0;
            for b in 0..n {
                if a != b {
                    p *= (x - self.nodes[b]) / (self.nodes[a] - self.nodes[b]);
                }
            }
            out[a] = p;
        }
    }
}
