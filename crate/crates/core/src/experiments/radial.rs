//! Rotation-invariant reductions for power weights `(1 - |z|)^alpha`.
//!
//! For `f = z^n phi(|z|)` the projection is `c z^n` with
//! `c = int r^{2n} phi dA / int r^{2n} dA`, so tests of this shape reduce to
//! one-dimensional moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::gauss::GaussRule;
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::operators::BergmanProjector;

/// `B(m, b)` for integer `m >= 1`.
pub fn beta_int(m: u32, b: f64) -> f64 {
    let mut acc = 1.0 / b;
    for k in 1..m {
        acc *= k as f64 / (k as f64 + b);
    }
    acc
}

/// `int_D |z|^{2n} (1 - |z|)^beta dA = 2 B(2n + 2, beta + 1)`.
pub fn power_moment(n: u32, beta: f64) -> f64 {
    2.0 * beta_int(2 * n + 2, beta + 1.0)
}

/// `<sigma>_D <sigma^{-1}>_D` for `sigma = (1 - |z|)^alpha`, the root-box value
/// of the untruncated `B_2` characteristic.
pub fn power_b2(alpha: f64) -> f64 {
    4.0 / ((1.0 - alpha * alpha) * (4.0 - alpha * alpha))
}

/// `||Pi f_n||_sigma / ||f_n||_sigma` for `f_n = z^n sigma^{-1}`, `p = 2`.
pub fn rotation_lower_bound(n: u32, alpha: f64) -> f64 {
    (n as f64 + 1.0) * (power_moment(n, alpha) * power_moment(n, -alpha)).sqrt()
}

/// Limit of [`rotation_lower_bound`] as `n -> inf`: `(Gamma(1+a) Gamma(1-a))^{1/2}`.
pub fn rotation_limit(alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        let x = std::f64::consts::PI * alpha;
        (x / x.sin()).sqrt()
    }
}

/// `int_a^b r^{2n+1} (1 - r)^beta 2 dr`, composite Gauss on bands
/// accumulating towards `r = 1`; requires `b < 1`.
pub fn truncated_moment(n: u32, beta: f64, a: f64, b: f64) -> f64 {
    let rule = GaussRule::new(12).expect("positive order");
    let mut cuts = vec![a];
    let mut h = 0.5;
    while 1.0 - h < b {
        if 1.0 - h > a {
            cuts.push(1.0 - h);
        }
        h *= 0.5;
    }
    cuts.push(b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        // split once more so that r^{2n} is resolved for large n
        let pieces = 1 + (n as usize) / 16;
        let step = (w[1] - w[0]) / pieces as f64;
        for k in 0..pieces {
            let lo = w[0] + step * k as f64;
            for (r, wt) in rule.on(lo, lo + step) {
                total += wt * 2.0 * r.powi(2 * n as i32 + 1) * (1.0 - r).powf(beta);
            }
        }
    }
    total
}

/// Radial prediction of the mesh estimate: `f_n` vanishes on the deepest
/// cells, norms are taken over the truncated disk.
pub fn truncated_rotation_bound(n: u32, alpha: f64, depth: u32) -> f64 {
    let delta = DiskMesh::collar(depth);
    let a = truncated_moment(n, -alpha, 0.0, 1.0 - 2.0 * delta);
    let b = truncated_moment(n, alpha, 0.0, 1.0 - delta);
    (n as f64 + 1.0) * (a * b).sqrt()
}

/// Lower estimates from the discrete projector for one `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRotationRow {
    pub alpha: f64,
    pub n: u32,
    pub mesh: f64,
    pub radial: f64,
}

impl MeshRotationRow {
    pub fn rel_diff(&self) -> f64 {
        (self.mesh - self.radial).abs() / self.radial
    }
}

/// `||Pi f_n||_sigma / ||f_n||_sigma` through the discrete projector for the
/// test functions `f_n = z^n (1 - |z|)^{-alpha}` cut off on the deepest cells.
pub fn mesh_rotation_estimates(
    alpha: f64,
    ns: &[u32],
    mesh: &DiskMesh,
    projector: &BergmanProjector,
) -> Result<Vec<MeshRotationRow>> {
    if mesh.grid() != projector.grid() || mesh.depth() != projector.depth() {
        return Err(LabError::GridMismatch {
            expected: format!("{}:{}", mesh.grid(), mesh.depth()),
            found: format!("{}:{}", projector.grid(), projector.depth()),
        });
    }
    let d = mesh.depth();
    let deepest = crate::dyadic::interval::cell_count(d.saturating_sub(1));
    let nodes = mesh.nodes();
    let sigma: Vec<f64> = nodes.iter().map(|n| (1.0 - n.r).powf(alpha)).collect();
    let batch: Vec<Vec<Complex64>> = ns
        .iter()
        .map(|&n| {
            nodes
                .iter()
                .zip(&sigma)
                .map(|(node, s)| {
                    if d > 0 && node.cell >= deepest {
                        Complex64::new(0.0, 0.0)
                    } else {
                        node.z.powu(n) / s
                    }
                })
                .collect()
        })
        .collect();
    let images = projector.apply_batch_at(&batch, projector.nodes())?;
    Ok(ns
        .iter()
        .zip(batch.iter().zip(&images))
        .map(|(&n, (f, pf))| {
            let mut num = 0.0;
            let mut den = 0.0;
            for k in 0..nodes.len() {
                num += nodes[k].weight * sigma[k] * pf[k].norm_sqr();
                den += nodes[k].weight * sigma[k] * f[k].norm_sqr();
            }
            MeshRotationRow {
                alpha,
                n,
                mesh: (num / den).sqrt(),
                radial: truncated_rotation_bound(n, alpha, d),
            }
        })
        .collect())
}
