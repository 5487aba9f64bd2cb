use serde::{Deserialize, Serialize};

use super::cellfn::CellFunction;
use crate::dyadic::interval::DyadicInterval;
use crate::dyadic::mesh::{box_sums, DiskMesh};
use crate::error::{LabError, Result};
use crate::weights::{apr_and_doubling_with, Weight, DOUBLING_BOUND};

/// Maximal boxes on which the running average exceeds a threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct StoppingFamily {
    pub lambda: f64,
    pub boxes: Vec<DyadicInterval>,
    /// Dyadic parent of each box; `None` for the root.
    pub parents: Vec<Option<DyadicInterval>>,
    /// Set when the root itself was selected (threshold below the global average).
    pub root_selected: bool,
}

/// Invariants verified on the quadrature values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzChecks {
    pub disjoint: bool,
    /// Every selected box average exceeds `lambda`.
    pub maximal: bool,
    /// Every parent average is at most `lambda`.
    pub parent_bound: bool,
    pub c_w: f64,
    /// `max_I <g_1 w^{-1}>_{w,T_I} / (c_w lambda)`.
    pub good1: f64,
    /// `max_k <g_2 w^{-1}>_{w,Q_k} / (c_w lambda)`.
    pub good2: f64,
}

impl CzChecks {
    pub fn all_hold(&self) -> bool {
        self.disjoint && self.maximal && self.parent_bound && self.good1 <= 1.0 && self.good2 <= 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CzSplit {
    pub family: StoppingFamily,
    pub g1: CellFunction,
    pub g2: CellFunction,
    /// Cells covered by the family.
    pub in_set: Vec<bool>,
    pub checks: CzChecks,
}

/// Decompose `g >= 0` at height `lambda` for the averages `int_Q g / int_Q w`,
/// i.e. the `w`-averages of `g w^{-1}`.
pub fn cz_decompose(g: &CellFunction, w: &Weight, lambda: f64, mesh: &DiskMesh) -> Result<CzSplit> {
    if !(lambda > 0.0) {
        return Err(LabError::Constraint(format!("threshold must be positive, got {lambda}")));
    }
    if g.grid != mesh.grid() || g.depth != mesh.depth() {
        return Err(LabError::GridMismatch {
            expected: format!("{}:{}", mesh.grid(), mesh.depth()),
            found: format!("{}:{}", g.grid, g.depth),
        });
    }
    if let Some(k) = g.values.iter().position(|x| *x < 0.0) {
        return Err(LabError::Constraint(format!("datum must be nonnegative, cell {k} is {}", g.values[k])));
    }
    let d = mesh.depth();
    let n = mesh.cell_count();
    let area = mesh.cell_integrals(&vec![1.0; mesh.nodes().len()]);
    let g_cell: Vec<f64> = g.values.iter().zip(&area).map(|(a, b)| a * b).collect();
    let w_cell = mesh.cell_integrals(&w.sample(mesh)?);
    let g_box = box_sums(&g_cell, d);
    let w_box = box_sums(&w_cell, d);
    let avg: Vec<f64> = g_box.iter().zip(&w_box).map(|(a, b)| a / b).collect();

    // top-down: a cell is selected when its average exceeds lambda and no
    // ancestor was selected
    let mut in_set = vec![false; n];
    let mut boxes = Vec::new();
    for c in 0..n {
        let covered = c > 0 && in_set[(c - 1) / 2];
        if covered {
            in_set[c] = true;
        } else if avg[c] > lambda {
            in_set[c] = true;
            boxes.push(c);
        }
    }
    let ivs: Vec<DyadicInterval> = boxes.iter().map(|&c| DyadicInterval::from_flat(mesh.grid(), c)).collect();
    let parents: Vec<Option<DyadicInterval>> = ivs.iter().map(|i| i.parent().ok()).collect();
    let root_selected = boxes.first() == Some(&0);

    let disjoint = ivs
        .iter()
        .enumerate()
        .all(|(a, i)| ivs[a + 1..].iter().all(|j| !i.contains(j) && !j.contains(i)));
    let maximal = boxes.iter().all(|&c| avg[c] > lambda);
    let parent_bound = boxes.iter().all(|&c| c == 0 || avg[(c - 1) / 2] <= lambda);

    let g1v: Vec<f64> = (0..n).map(|c| if in_set[c] { 0.0 } else { g.values[c] }).collect();
    let g2v: Vec<f64> = (0..n).map(|c| if in_set[c] { g.values[c] } else { 0.0 }).collect();
    let c_w = apr_and_doubling_with(w, &Weight::one(), mesh, d, DOUBLING_BOUND)?.c_u();
    let scale = c_w * lambda;
    let good1 = (0..n)
        .map(|c| g1v[c] * area[c] / w_cell[c] / scale)
        .fold(0.0, f64::max);
    let g2_box = box_sums(&g2v.iter().zip(&area).map(|(a, b)| a * b).collect::<Vec<_>>(), d);
    let good2 = boxes
        .iter()
        .map(|&c| g2_box[c] / w_box[c] / scale)
        .fold(0.0, f64::max);

    Ok(CzSplit {
        family: StoppingFamily {
            lambda,
            boxes: ivs,
            parents,
            root_selected,
        },
        g1: CellFunction::new(mesh.grid(), d, g1v)?,
        g2: CellFunction::new(mesh.grid(), d, g2v)?,
        in_set,
        checks: CzChecks {
            disjoint,
            maximal,
            parent_bound,
            c_w,
            good1,
            good2,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::interval::GridId;
    use crate::dyadic::mesh::QuadOrder;

    fn setup() -> (DiskMesh, DyadicInterval, CellFunction) {
        let mesh = DiskMesh::new(GridId::G1, 6, QuadOrder::default()).unwrap();
        let j = DyadicInterval::new(GridId::G1, 2, 1).unwrap();
        let g = CellFunction::indicator(&j, 6);
        (mesh, j, g)
    }

    #[test]
    fn indicator_selects_its_box() {
        let (mesh, j, g) = setup();
        let s = cz_decompose(&g, &Weight::one(), 0.9, &mesh).unwrap();
        assert_eq!(s.family.boxes, vec![j]);
        assert!(s.checks.all_hold());
        assert!(s.g1.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn low_threshold_climbs() {
        let (mesh, j, g) = setup();
        let s = cz_decompose(&g, &Weight::one(), 0.05, &mesh).unwrap();
        // |Q_J| / |Q_I| > 0.05 already at the root for a level-2 box
        assert_eq!(s.family.boxes, vec![j.ancestor(0)]);
        assert!(s.family.root_selected);
        assert!(s.checks.all_hold());
    }
}
