use num_complex::Complex64;

use crate::dyadic::interval::{cell_count, turn_of, DyadicInterval, GridId};
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::weights::Weight;

/// One value per top-half cell of level at most `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFunction {
    pub grid: GridId,
    pub depth: u32,
    pub values: Vec<f64>,
}

/// Values at the nodes of a particular mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeFunction {
    pub grid: GridId,
    pub depth: u32,
    pub values: Vec<f64>,
}

/// Anything that can be sampled at mesh nodes.
pub trait Sampled {
    fn node_values(&self, mesh: &DiskMesh) -> Result<Vec<f64>>;
}

impl Sampled for Weight {
    fn node_values(&self, mesh: &DiskMesh) -> Result<Vec<f64>> {
        mesh.sample(|z| self.eval(z))
    }
}

impl Sampled for CellFunction {
    fn node_values(&self, mesh: &DiskMesh) -> Result<Vec<f64>> {
        if mesh.grid() == self.grid && mesh.depth() <= self.depth {
            return Ok(mesh.nodes().iter().map(|n| self.values[n.cell]).collect());
        }
        Ok(mesh
            .nodes()
            .iter()
            .map(|n| self.values[DiskMesh::locate(self.grid, self.depth, n.r, n.t)])
            .collect())
    }
}

impl Sampled for NodeFunction {
    fn node_values(&self, mesh: &DiskMesh) -> Result<Vec<f64>> {
        if mesh.grid() != self.grid || mesh.depth() != self.depth || mesh.nodes().len() != self.values.len() {
            return Err(LabError::GridMismatch {
                expected: format!("{}:{}", self.grid, self.depth),
                found: format!("{}:{}", mesh.grid(), mesh.depth()),
            });
        }
        Ok(self.values.clone())
    }
}

/// A pointwise function wrapped for sampling.
pub struct FnSample<F>(pub F);

impl<F: Fn(Complex64) -> f64> Sampled for FnSample<F> {
    fn node_values(&self, mesh: &DiskMesh) -> Result<Vec<f64>> {
        mesh.sample(&self.0)
    }
}

impl CellFunction {
    pub fn new(grid: GridId, depth: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != cell_count(depth) {
            return Err(LabError::InvalidParameter(format!(
                "expected {} cell values, got {}",
                cell_count(depth),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::InvalidParameter(format!("cell value {k} is not finite")));
        }
        Ok(CellFunction { grid, depth, values })
    }

    pub fn constant(grid: GridId, depth: u32, c: f64) -> Self {
        CellFunction {
            grid,
            depth,
            values: vec![c; cell_count(depth)],
        }
    }

    /// Indicator of the cells of `Q_J` (descendants of `J`).
    pub fn indicator(j: &DyadicInterval, depth: u32) -> Self {
        let mut values = vec![0.0; cell_count(depth)];
        for m in j.level..=depth {
            for c in j.descendant_range(m) {
                values[c] = 1.0;
            }
        }
        CellFunction {
            grid: j.grid,
            depth,
            values,
        }
    }

    /// Cell averages of a pointwise function against area.
    pub fn average_of(mesh: &DiskMesh, f: impl Fn(Complex64) -> f64) -> Result<Self> {
        let vals = mesh.sample(f)?;
        let num = mesh.cell_integrals(&vals);
        let den = mesh.cell_integrals(&vec![1.0; vals.len()]);
        CellFunction::new(mesh.grid(), mesh.depth(), num.iter().zip(&den).map(|(a, b)| a / b).collect())
    }

    pub fn value_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let t = if r == 0.0 { 0.0 } else { turn_of(z) };
        self.values[DiskMesh::locate(self.grid, self.depth, r, t)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        CellFunction {
            grid: self.grid,
            depth: self.depth,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip(&self, other: &CellFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid || self.depth != other.depth {
            return Err(LabError::GridMismatch {
                expected: format!("{}:{}", self.grid, self.depth),
                found: format!("{}:{}", other.grid, other.depth),
            });
        }
        Ok(CellFunction {
            grid: self.grid,
            depth: self.depth,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::mesh::QuadOrder;

    #[test]
    fn indicator_counts() {
        let j = DyadicInterval::new(GridId::G1, 2, 1).unwrap();
        let f = CellFunction::indicator(&j, 4);
        assert_eq!(f.values.iter().sum::<f64>(), 7.0);
    }

    #[test]
    fn sampling_other_grid_uses_lookup() {
        let mesh = DiskMesh::new(GridId::G2, 4, QuadOrder::default()).unwrap();
        let f = CellFunction::constant(GridId::G1, 3, 2.0);
        assert!(f.node_values(&mesh).unwrap().iter().all(|v| *v == 2.0));
    }
}
