use serde::{Deserialize, Serialize};

use super::image::image_measure;
use super::DomainSpec;
use crate::dyadic::interval::DyadicInterval;
use crate::dyadic::mesh::{box_max, box_sums, DiskMesh};
use crate::error::{LabError, Result};
use crate::operators::{CellFunction, Sampled};
use crate::weights::Weight;

/// `M_psi f` per cell for `f` given by its pullback `g = f o psi`: the largest
/// `<f>_{psi(Q_I)}` over truncated boxes containing the cell. Image measures
/// are integrated box by box, independently of the bottom-up sums used by
/// the weighted maximal operator.
pub fn m_psi_apply(g: &impl Sampled, domain: &DomainSpec, mesh: &DiskMesh) -> Result<CellFunction> {
    let gg = g.node_values(mesh)?;
    let vv = domain.check(mesh)?;
    let one = Weight::one();
    let d = mesh.depth();
    let n = mesh.cell_count();
    let mut avg = vec![0.0; n];
    for (c, a) in avg.iter_mut().enumerate() {
        let i = DyadicInterval::from_flat(mesh.grid(), c);
        let mut num = 0.0;
        for m in i.level..=d {
            for cell in i.descendant_range(m) {
                for k in mesh.cell_node_range(cell) {
                    num += mesh.nodes()[k].weight * gg[k].abs() * vv[k];
                }
            }
        }
        *a = num / image_measure(domain, &i, &one, mesh)?;
    }
    for c in 1..n {
        avg[c] = avg[c].max(avg[(c - 1) / 2]);
    }
    CellFunction::new(mesh.grid(), d, avg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MPsiWeak {
    /// `(lambda, lambda |{M_psi f > lambda}| / ||f||_{L^1(Omega)})`.
    pub rows: Vec<(f64, f64)>,
    pub sup_ratio: f64,
    /// Covering constant the ratios are compared with.
    pub bound: f64,
}

impl MPsiWeak {
    pub fn holds(&self) -> bool {
        self.sup_ratio <= self.bound * (1.0 + 1e-12)
    }
}

pub fn m_psi_weak(
    g: &impl Sampled,
    domain: &DomainSpec,
    mesh: &DiskMesh,
    lambdas: &[f64],
    bound: f64,
) -> Result<MPsiWeak> {
    let m = m_psi_apply(g, domain, mesh)?;
    let gg = g.node_values(mesh)?;
    let vv = domain.check(mesh)?;
    let norm: f64 = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, n)| n.weight * gg[k].abs() * vv[k])
        .sum();
    let rows: Vec<(f64, f64)> = lambdas
        .iter()
        .map(|&lambda| {
            let level: f64 = mesh
                .nodes()
                .iter()
                .enumerate()
                .filter(|(_, n)| m.values[n.cell] > lambda)
                .map(|(k, n)| n.weight * vv[k])
                .sum();
            (lambda, lambda * level / norm)
        })
        .collect();
    let sup_ratio = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(MPsiWeak { rows, sup_ratio, bound })
}

/// Truncated `[(M_psi f)^q]_{B_1(Omega)}`, pulled back to `[U]_{B_1(D, v)}`.
pub fn m_psi_b1(g: &impl Sampled, q: f64, domain: &DomainSpec, mesh: &DiskMesh) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(LabError::Constraint(format!("need 0 < q < 1, got {q}")));
    }
    let m = m_psi_apply(g, domain, mesh)?.map(|x| x.powf(q));
    let vv = domain.check(mesh)?;
    let d = mesh.depth();
    let vcell = mesh.cell_integrals(&vv);
    let ucell: Vec<f64> = vcell.iter().zip(&m.values).map(|(a, b)| a * b).collect();
    let inv: Vec<f64> = m.values.iter().map(|x| 1.0 / x).collect();
    let vb = box_sums(&vcell, d);
    let ub = box_sums(&ucell, d);
    let ib = box_max(&inv, d);
    Ok((0..mesh.cell_count()).map(|c| ub[c] / vb[c] * ib[c]).fold(0.0, f64::max))
}
