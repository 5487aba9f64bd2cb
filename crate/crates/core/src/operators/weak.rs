use serde::{Deserialize, Serialize};

use super::cellfn::{CellFunction, Sampled};
use super::sparse::sparse_apply;
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::weights::{apr_and_doubling_with, bp_on, Weight, DOUBLING_BOUND};

/// Absolute constant collected along the stopping-time argument:
/// `4 * 16 * 4 * 4` for the good part, `4 * 16` for the bad part off the
/// exceptional set and `1` for the exceptional set itself.
pub const WEAK_ABSOLUTE: f64 = 1024.0 + 64.0 + 1.0;

/// Characteristics entering the weak-type constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakConstant {
    pub c_w: f64,
    pub w_b1: f64,
    /// `[uw]_{B_1(w)}`.
    pub uw_b1w: f64,
    /// `[uw]_{B_1}`.
    pub uw_b1: f64,
    /// `(c_w [w]_{B_1})^3 [uw]_{B_1(w)}^2 [uw]_{B_1}`.
    pub shape: f64,
    pub value: f64,
}

impl WeakConstant {
    pub fn measure(u: &Weight, w: &Weight, mesh: &DiskMesh) -> Result<Self> {
        let d = mesh.depth();
        let one = Weight::one();
        let uw = u.clone().times(w.clone());
        let c_w = apr_and_doubling_with(w, &one, mesh, d, DOUBLING_BOUND)?.c_u();
        let w_b1 = bp_on(w, &one, 1.0, &[mesh], d..=d)?.last();
        let uw_b1w = bp_on(&uw, w, 1.0, &[mesh], d..=d)?.last();
        let uw_b1 = bp_on(&uw, &one, 1.0, &[mesh], d..=d)?.last();
        let shape = (c_w * w_b1).powi(3) * uw_b1w.powi(2) * uw_b1;
        Ok(WeakConstant {
            c_w,
            w_b1,
            uw_b1w,
            uw_b1,
            shape,
            value: WEAK_ABSOLUTE * shape,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeRow {
    pub lambda: f64,
    /// `lambda (uv)({A g / w > lambda}) / int g u w`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub rows: Vec<WeakTypeRow>,
    pub sup_ratio: f64,
    pub constant: WeakConstant,
}

impl WeakTypeReport {
    pub fn holds(&self) -> bool {
        self.sup_ratio <= self.constant.value
    }
}

/// Logarithmic grid over `[1e-3, 1e3] * scale` with `per_decade` points per decade.
pub fn lambda_grid(scale: f64, per_decade: usize) -> Vec<f64> {
    let n = 6 * per_decade;
    (0..=n)
        .map(|k| scale * 10f64.powf(-3.0 + 6.0 * k as f64 / n as f64))
        .collect()
}

/// Check `v = w^2` at every node, to relative precision `1e-12`.
pub fn check_v_is_w_squared(v: &Weight, w: &Weight, mesh: &DiskMesh) -> Result<()> {
    let vv = v.sample(mesh)?;
    let ww = w.sample(mesh)?;
    for (k, (a, b)) in vv.iter().zip(&ww).enumerate() {
        if (a - b * b).abs() > 1e-12 * a.abs().max(b * b) {
            return Err(LabError::Constraint(format!(
                "v must equal w^2; node {k} has v = {a}, w^2 = {}",
                b * b
            )));
        }
    }
    Ok(())
}

/// Weak-type ratios of the unweighted sparse operator against `u v` and `u w`.
pub fn weak_type_sweep(
    g: &CellFunction,
    u: &Weight,
    v: &Weight,
    w: &Weight,
    mesh: &DiskMesh,
    lambdas: &[f64],
) -> Result<WeakTypeReport> {
    check_v_is_w_squared(v, w, mesh)?;
    let ag = sparse_apply(g, &Weight::one(), mesh)?.node_values(mesh)?;
    let gg = g.node_values(mesh)?;
    let uu = u.sample(mesh)?;
    let ww = w.sample(mesh)?;
    let vv = v.sample(mesh)?;
    let norm: f64 = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, n)| n.weight * gg[k].abs() * uu[k] * ww[k])
        .sum();
    let rows: Vec<WeakTypeRow> = lambdas
        .iter()
        .map(|&lambda| {
            let level: f64 = mesh
                .nodes()
                .iter()
                .enumerate()
                .filter(|(k, _)| ag[*k].abs() / ww[*k] > lambda)
                .map(|(k, n)| n.weight * uu[k] * vv[k])
                .sum();
            WeakTypeRow {
                lambda,
                ratio: lambda * level / norm,
            }
        })
        .collect();
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(WeakTypeReport {
        rows,
        sup_ratio,
        constant: WeakConstant::measure(u, w, mesh)?,
    })
}

/// Both sides of `max{[uw]_{B_1(w)}, [uw]_{B_1}} <= [v]_{B_1} [u]_{B_1(v)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductEstimate {
    pub uw_b1w: f64,
    pub uw_b1: f64,
    pub v_b1: f64,
    pub u_b1v: f64,
}

impl ProductEstimate {
    pub fn holds(&self) -> bool {
        self.uw_b1w.max(self.uw_b1) <= self.v_b1 * self.u_b1v * (1.0 + 1e-12)
    }
}

pub fn product_estimate(u: &Weight, v: &Weight, w: &Weight, mesh: &DiskMesh) -> Result<ProductEstimate> {
    check_v_is_w_squared(v, w, mesh)?;
    let d = mesh.depth();
    let one = Weight::one();
    let uw = u.clone().times(w.clone());
    Ok(ProductEstimate {
        uw_b1w: bp_on(&uw, w, 1.0, &[mesh], d..=d)?.last(),
        uw_b1: bp_on(&uw, &one, 1.0, &[mesh], d..=d)?.last(),
        v_b1: bp_on(v, &one, 1.0, &[mesh], d..=d)?.last(),
        u_b1v: bp_on(u, v, 1.0, &[mesh], d..=d)?.last(),
    })
}
