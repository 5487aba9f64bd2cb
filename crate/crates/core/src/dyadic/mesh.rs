use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauss::GaussRule;
use super::interval::{cell_count, wrap, DyadicInterval, GridId, MAX_DEPTH};
use crate::error::{LabError, Result};

/// Tensor Gauss-Legendre order per panel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadOrder {
    pub radial: usize,
    pub angular: usize,
}

impl Default for QuadOrder {
    fn default() -> Self {
        QuadOrder {
            radial: 4,
            angular: 4,
        }
    }
}

/// Widest angular panel, in normalized arclength. Coarse cells are split so
/// that every panel is at most this wide.
pub const MAX_PANEL_TURN: f64 = 1.0 / 32.0;

/// A polar rectangle `[r0, r1] x [t0, t1]` (angles normalized, unwrapped).
#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub cell: usize,
    pub r0: f64,
    pub r1: f64,
    pub t0: f64,
    pub t1: f64,
    pub nodes: Range<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub z: Complex64,
    pub r: f64,
    pub t: f64,
    pub weight: f64,
    pub cell: usize,
}

/// Quadrature nodes of one panel, weights against normalized area `2 r dr dt`.
pub fn panel_nodes(
    rr: &GaussRule,
    rt: &GaussRule,
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    mut push: impl FnMut(f64, f64, f64),
) {
    for (r, wr) in rr.on(r0, r1) {
        for (t, wt) in rt.on(t0, t1) {
            push(r, t, 2.0 * r * wr * wt);
        }
    }
}

/// Radial band `[r0, r1]` of the top-half cell at `level`.
pub fn cell_band(level: u32) -> (f64, f64) {
    let l = (-(level as f64)).exp2();
    if level == 0 {
        (0.0, 0.5)
    } else {
        (1.0 - l, 1.0 - l / 2.0)
    }
}

/// Number of angular panels used for a cell of the given width.
pub fn angular_split(width: f64) -> usize {
    ((width / MAX_PANEL_TURN) - 1e-9).ceil().max(1.0) as usize
}

/// Depth-truncated partition of the disk into top-half cells of one grid.
#[derive(Clone, Debug)]
pub struct DiskMesh {
    grid: GridId,
    depth: u32,
    order: QuadOrder,
    panels: Vec<Panel>,
    nodes: Vec<Node>,
    cell_nodes: Vec<Range<usize>>,
    cell_panels: Vec<Range<usize>>,
}

impl DiskMesh {
    pub fn new(grid: GridId, depth: u32, order: QuadOrder) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(LabError::DepthTooLarge {
                depth,
                max: MAX_DEPTH,
            });
        }
        let rr = GaussRule::new(order.radial)?;
        let rt = GaussRule::new(order.angular)?;
        let n = cell_count(depth);
        let mut panels = Vec::new();
        let mut nodes = Vec::new();
        let mut cell_nodes = Vec::with_capacity(n);
        let mut cell_panels = Vec::with_capacity(n);
        for flat in 0..n {
            let iv = DyadicInterval::from_flat(grid, flat);
            let (r0, r1) = cell_band(iv.level);
            let width = iv.length();
            let start = grid.offset() + iv.index as f64 * width;
            let split = angular_split(width);
            let node_lo = nodes.len();
            let panel_lo = panels.len();
            for s in 0..split {
                let t0 = start + width * s as f64 / split as f64;
                let t1 = start + width * (s + 1) as f64 / split as f64;
                let lo = nodes.len();
                panel_nodes(&rr, &rt, r0, r1, t0, t1, |r, t, w| {
                    let t = wrap(t);
                    nodes.push(Node {
                        z: Complex64::from_polar(r, std::f64::consts::TAU * t),
                        r,
                        t,
                        weight: w,
                        cell: flat,
                    })
                });
                panels.push(Panel {
                    cell: flat,
                    r0,
                    r1,
                    t0,
                    t1,
                    nodes: lo..nodes.len(),
                });
            }
            cell_nodes.push(node_lo..nodes.len());
            cell_panels.push(panel_lo..panels.len());
        }
        Ok(DiskMesh {
            grid,
            depth,
            order,
            panels,
            nodes,
            cell_nodes,
            cell_panels,
        })
    }

    pub fn grid(&self) -> GridId {
        self.grid
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn order(&self) -> QuadOrder {
        self.order
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn cell_count(&self) -> usize {
        self.cell_nodes.len()
    }

    pub fn cell_nodes(&self, cell: usize) -> &[Node] {
        &self.nodes[self.cell_nodes[cell].clone()]
    }

    pub fn cell_node_range(&self, cell: usize) -> Range<usize> {
        self.cell_nodes[cell].clone()
    }

    pub fn cell_panels(&self, cell: usize) -> &[Panel] {
        &self.panels[self.cell_panels[cell].clone()]
    }

    /// Collar width `2^{-d-1}` left out at truncation depth `d`.
    pub fn collar(depth: u32) -> f64 {
        (-(depth as f64) - 1.0).exp2()
    }

    /// Area covered by cells of level at most `depth`.
    pub fn truncated_area(depth: u32) -> f64 {
        let a = 1.0 - Self::collar(depth);
        a * a
    }

    pub fn check_depth(&self, depth: u32) -> Result<()> {
        if depth > self.depth {
            return Err(LabError::BeyondMesh {
                level: depth,
                depth: self.depth,
            });
        }
        Ok(())
    }

    pub fn check_interval(&self, i: &DyadicInterval) -> Result<()> {
        if i.grid != self.grid {
            return Err(LabError::GridMismatch {
                expected: self.grid.to_string(),
                found: i.grid.to_string(),
            });
        }
        self.check_depth(i.level)
    }

    /// Node values of `f`, rejecting non-finite results.
    pub fn sample(&self, f: impl Fn(Complex64) -> f64) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let v = f(n.z);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(LabError::NonFiniteIntegrand {
                        node: k,
                        z: n.z,
                        value: v,
                    })
                }
            })
            .collect()
    }

    /// Per-cell quadrature sums of node values.
    pub fn cell_integrals(&self, vals: &[f64]) -> Vec<f64> {
        self.cell_nodes
            .iter()
            .map(|r| {
                self.nodes[r.clone()]
                    .iter()
                    .zip(&vals[r.clone()])
                    .map(|(n, v)| n.weight * v)
                    .sum()
            })
            .collect()
    }

    pub fn cell_max(&self, vals: &[f64]) -> Vec<f64> {
        self.cell_nodes
            .iter()
            .map(|r| vals[r.clone()].iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    pub fn cell_min(&self, vals: &[f64]) -> Vec<f64> {
        self.cell_nodes
            .iter()
            .map(|r| vals[r.clone()].iter().copied().fold(f64::INFINITY, f64::min))
            .collect()
    }

    /// Integral of `f` over one top-half cell.
    pub fn integrate_top(&self, i: &DyadicInterval, f: impl Fn(Complex64) -> f64) -> Result<f64> {
        self.check_interval(i)?;
        self.integrate_cells(std::iter::once(i.flat_index()), &f)
    }

    /// Integral of `f` over a depth-truncated Carleson box, summed level by level.
    pub fn integrate_box(
        &self,
        i: &DyadicInterval,
        depth: u32,
        f: impl Fn(Complex64) -> f64,
    ) -> Result<f64> {
        self.check_interval(i)?;
        self.check_depth(depth)?;
        let cells = (i.level..=depth).flat_map(|m| i.descendant_range(m));
        self.integrate_cells(cells, &f)
    }

    fn integrate_cells(
        &self,
        cells: impl Iterator<Item = usize>,
        f: &impl Fn(Complex64) -> f64,
    ) -> Result<f64> {
        let mut total = 0.0;
        for c in cells {
            let mut s = 0.0;
            for k in self.cell_nodes[c].clone() {
                let n = &self.nodes[k];
                let v = f(n.z);
                if !v.is_finite() {
                    return Err(LabError::NonFiniteIntegrand {
                        node: k,
                        z: n.z,
                        value: v,
                    });
                }
                s += n.weight * v;
            }
            total += s;
        }
        Ok(total)
    }

    /// Flat index of the cell at level at most `depth` containing `(r, t)`;
    /// points in the collar go to the deepest cell at that angle.
    pub fn locate(grid: GridId, depth: u32, r: f64, t: f64) -> usize {
        let h = (1.0 - r).max(f64::MIN_POSITIVE);
        let k = ((1.0 / h).log2().floor().max(0.0) as u32).min(depth);
        DyadicInterval::containing(grid, k, t).flat_index()
    }
}

/// Box sums over truncated Carleson boxes: entry `c` is the sum of `cell[c']`
/// over all descendants `c'` of `c` with level at most `depth`.
pub fn box_sums(cell: &[f64], depth: u32) -> Vec<f64> {
    let n = cell_count(depth);
    let mut out = cell[..n].to_vec();
    for level in (0..depth).rev() {
        let lo = (1usize << level) - 1;
        for c in lo..2 * lo + 1 {
            let ch = 2 * c + 1;
            out[c] += out[ch] + out[ch + 1];
        }
    }
    out
}

/// Like [`box_sums`] with `max` in place of `+`.
pub fn box_max(cell: &[f64], depth: u32) -> Vec<f64> {
    let n = cell_count(depth);
    let mut out = cell[..n].to_vec();
    for level in (0..depth).rev() {
        let lo = (1usize << level) - 1;
        for c in lo..2 * lo + 1 {
            let ch = 2 * c + 1;
            out[c] = out[c].max(out[ch]).max(out[ch + 1]);
        }
    }
    out
}

/// A mesh for each grid, at common depth and order.
#[derive(Clone, Debug)]
pub struct MeshSet {
    pub g1: DiskMesh,
    pub g2: DiskMesh,
}

impl MeshSet {
    pub fn new(depth: u32, order: QuadOrder) -> Result<Self> {
        Ok(MeshSet {
            g1: DiskMesh::new(GridId::G1, depth, order)?,
            g2: DiskMesh::new(GridId::G2, depth, order)?,
        })
    }

    pub fn get(&self, grid: GridId) -> &DiskMesh {
        match grid {
            GridId::G1 => &self.g1,
            GridId::G2 => &self.g2,
        }
    }

    pub fn depth(&self) -> u32 {
        self.g1.depth()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DiskMesh> {
        [&self.g1, &self.g2].into_iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::region::{top_area, truncated_box_area};

    #[test]
    fn weights_sum_to_truncated_area() {
        for d in 0..=8 {
            let m = DiskMesh::new(GridId::G1, d, QuadOrder::default()).unwrap();
            assert_eq!(m.cell_count(), (1 << (d + 1)) - 1);
            let s: f64 = m.nodes().iter().map(|n| n.weight).sum();
            let a = 1.0 - DiskMesh::collar(d);
            assert!((s - a * a).abs() < 1e-13, "depth {d}: {s}");
        }
    }

    #[test]
    fn half_box_values() {
        let m = DiskMesh::new(GridId::G1, 6, QuadOrder::default()).unwrap();
        let i = DyadicInterval::new(GridId::G1, 1, 1).unwrap();
        let t = m.integrate_top(&i, |_| 1.0).unwrap();
        assert!((t - 5.0 / 32.0).abs() < 1e-15);
        assert!((top_area(0.5) - t).abs() < 1e-15);
        let q = m.integrate_box(&i, 6, |_| 1.0).unwrap();
        assert!((q - truncated_box_area(0.5, DiskMesh::collar(6))).abs() < 1e-14);
    }

    #[test]
    fn locate_matches_node_cells() {
        let m = DiskMesh::new(GridId::G2, 7, QuadOrder::default()).unwrap();
        for n in m.nodes() {
            assert_eq!(DiskMesh::locate(GridId::G2, 7, n.r, n.t), n.cell);
        }
        let deep = DiskMesh::locate(GridId::G2, 7, 0.9999, 0.5);
        assert_eq!(DyadicInterval::from_flat(GridId::G2, deep).level, 7);
    }

    #[test]
    fn bottom_up_sums_match_direct() {
        let m = DiskMesh::new(GridId::G1, 5, QuadOrder::default()).unwrap();
        let vals = m.sample(|z| 1.0 + z.re * z.re).unwrap();
        let cells = m.cell_integrals(&vals);
        let sums = box_sums(&cells, 4);
        let i = DyadicInterval::new(GridId::G1, 2, 3).unwrap();
        let direct = m.integrate_box(&i, 4, |z| 1.0 + z.re * z.re).unwrap();
        assert!((sums[i.flat_index()] - direct).abs() < 1e-15);
    }

    #[test]
    fn nonfinite_is_reported() {
        let m = DiskMesh::new(GridId::G1, 2, QuadOrder::default()).unwrap();
        let root = DyadicInterval::root(GridId::G1);
        let e = m.integrate_box(&root, 2, |z| if z.norm() > 0.8 { f64::NAN } else { 1.0 });
        assert!(matches!(e, Err(LabError::NonFiniteIntegrand { .. })));
    }
}
