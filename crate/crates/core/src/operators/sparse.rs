use serde::{Deserialize, Serialize};

use super::cellfn::{CellFunction, Sampled};
use super::maximal::{ancestor_sum, box_means};
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::weights::{apr_and_doubling_with, bp_on, Weight, DOUBLING_BOUND};

/// `sum_I <f>_{v,Q_I} chi_{Q_I}` over the truncated grid of the mesh.
pub fn sparse_apply(f: &impl Sampled, v: &Weight, mesh: &DiskMesh) -> Result<CellFunction> {
    let ff = f.node_values(mesh)?;
    let means = box_means(&ff, v, mesh)?;
    CellFunction::new(mesh.grid(), mesh.depth(), ancestor_sum(&means, mesh.depth()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseNormRow {
    pub p: f64,
    /// `||A f||_{L^p(wv)} / ||f||_{L^p(wv)}`.
    pub ratio: f64,
    pub bound: f64,
    pub c_v: f64,
    pub w_bp: f64,
}

impl SparseNormRow {
    pub fn holds(&self) -> bool {
        self.ratio <= self.bound
    }
}

/// `p p' c_v [w]^{max(1, 1/(p-1))}`.
pub fn sparse_bound(p: f64, c_v: f64, w_bp: f64) -> f64 {
    let pc = p / (p - 1.0);
    p * pc * c_v * w_bp.powf(1f64.max(1.0 / (p - 1.0)))
}

/// Weighted `L^p` norm at mesh nodes.
pub fn lp_norm(vals: &[f64], weight: &[f64], mesh: &DiskMesh, p: f64) -> f64 {
    mesh.nodes()
        .iter()
        .zip(vals.iter().zip(weight))
        .map(|(n, (f, w))| n.weight * f.abs().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Measure the `L^p(wv)` norm ratio of the sparse operator on `f` against its bound.
pub fn sparse_norm_check(f: &impl Sampled, w: &Weight, v: &Weight, p: f64, mesh: &DiskMesh) -> Result<SparseNormRow> {
    if !(p > 1.0) {
        return Err(LabError::Constraint(format!("sparse bound needs p > 1, got {p}")));
    }
    let d = mesh.depth();
    let af = sparse_apply(f, v, mesh)?.node_values(mesh)?;
    let ff = f.node_values(mesh)?;
    let ww = w.sample(mesh)?;
    let vv = v.sample(mesh)?;
    let wv: Vec<f64> = ww.iter().zip(&vv).map(|(a, b)| a * b).collect();
    let ratio = lp_norm(&af, &wv, mesh, p) / lp_norm(&ff, &wv, mesh, p);
    let c_v = apr_and_doubling_with(v, &Weight::one(), mesh, d, DOUBLING_BOUND)?.c_u();
    let w_bp = bp_on(w, v, p, &[mesh], d..=d)?.last();
    Ok(SparseNormRow {
        p,
        ratio,
        bound: sparse_bound(p, c_v, w_bp),
        c_v,
        w_bp,
    })
}
