use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundaryDisk, DomainSpec};
use crate::dyadic::interval::{cell_count, DyadicInterval};
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::weights::{CharClass, CharacteristicReport, DepthValue, Weight};

/// Disks with fewer masked nodes than this are treated as under-resolved.
pub const MIN_DISK_NODES: usize = 16;

/// Sampled boundary disks for one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskPlan {
    pub depth: u32,
    /// Center angles in radians, `2^depth + 1` of them.
    pub angles: Vec<f64>,
    /// `diam * 2^{-k}`, `k = 0..=depth`.
    pub radii: Vec<f64>,
}

impl DiskPlan {
    pub fn new(domain: &DomainSpec, depth: u32) -> Self {
        let n = 1usize << depth;
        let diam = domain.diameter(depth);
        DiskPlan {
            depth,
            angles: (0..=n).map(|k| TAU * k as f64 / n as f64).collect(),
            radii: (0..=depth).map(|k| diam * (-(k as f64)).exp2()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len() * self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskReport {
    pub report: CharacteristicReport,
    /// Per depth: disks skipped for lack of resolution.
    pub skipped: Vec<usize>,
    /// Per depth: disks evaluated.
    pub tested: Vec<usize>,
}

struct Masked {
    count: usize,
    value: f64,
    angle: f64,
    level: u32,
}

#[allow(clippy::too_many_arguments)]
fn disk_sup(
    u: &Weight,
    domain: &DomainSpec,
    mesh: &DiskMesh,
    depths: RangeInclusive<u32>,
    class: CharClass,
    exponent: f64,
    dual: impl Fn(f64) -> f64 + Sync,
    dual_max: bool,
    value: impl Fn(f64, f64, f64) -> f64 + Sync,
) -> Result<DiskReport> {
    mesh.check_depth(*depths.end())?;
    let uu = u.sample(mesh)?;
    let vv = domain.check(mesh)?;
    let images: Vec<Complex64> = mesh.nodes().iter().map(|n| domain.map.map(n.z)).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut tested = Vec::new();
    for d in depths {
        let plan = DiskPlan::new(domain, d);
        let ncell = cell_count(d);
        let live: Vec<usize> = (0..mesh.nodes().len()).filter(|&k| mesh.nodes()[k].cell < ncell).collect();
        let disks: Vec<(f64, u32, BoundaryDisk)> = plan
            .angles
            .iter()
            .flat_map(|&a| {
                plan.radii.iter().enumerate().map(move |(k, &r)| (a, k as u32, r))
            })
            .map(|(a, k, r)| {
                BoundaryDisk::new(domain.map.boundary_trace(a, d), r).map(|disk| (a, k, disk))
            })
            .collect::<Result<_>>()?;
        let results: Vec<Option<Masked>> = disks
            .par_iter()
            .map(|(a, k, disk)| {
                let (mut m0, mut m1, mut m2, mut count) = (0.0, 0.0, 0.0, 0usize);
                for &j in &live {
                    if disk.contains_image(images[j]) {
                        let wv = mesh.nodes()[j].weight * vv[j];
                        m0 += wv;
                        m1 += wv * uu[j];
                        let du = dual(uu[j]);
                        if dual_max {
                            m2 = f64::max(m2, du);
                        } else {
                            m2 += wv * du;
                        }
                        count += 1;
                    }
                }
                (count >= MIN_DISK_NODES).then(|| Masked {
                    count,
                    value: value(m0, m1, m2),
                    angle: *a,
                    level: *k,
                })
            })
            .collect();
        let mut best: Option<&Masked> = None;
        for m in results.iter().flatten() {
            if best.is_none_or(|b| m.value > b.value) {
                best = Some(m);
            }
        }
        let n_ok = results.iter().flatten().count();
        skipped.push(results.len() - n_ok);
        tested.push(n_ok);
        let best = best.ok_or_else(|| LabError::Constraint(format!("no resolved boundary disk at depth {d}")))?;
        rows.push(DepthValue {
            depth: d,
            value: crate::weights::characteristic::finite_or_inf(best.value),
            extremal: DyadicInterval::containing(mesh.grid(), best.level.min(d), best.angle / TAU),
            nodes: best.count,
        });
    }
    Ok(DiskReport {
        report: CharacteristicReport {
            class,
            exponent,
            omega_side: true,
            rows,
        },
        skipped,
        tested,
    })
}

/// `sup_D <sigma>_{D cap Omega} <sigma^{-1/(p-1)}>_{D cap Omega}^{p-1}` over the disk plan.
pub fn dp_characteristic(
    u: &Weight,
    domain: &DomainSpec,
    p: f64,
    mesh: &DiskMesh,
    depths: RangeInclusive<u32>,
) -> Result<DiskReport> {
    if !(p >= 1.0) {
        return Err(LabError::Constraint(format!("D_p needs p >= 1, got {p}")));
    }
    if p == 1.0 {
        disk_sup(u, domain, mesh, depths, CharClass::Dp, p, |x| 1.0 / x, true, |m0, m1, m2| m1 / m0 * m2)
    } else {
        disk_sup(
            u,
            domain,
            mesh,
            depths,
            CharClass::Dp,
            p,
            |x| x.powf(-1.0 / (p - 1.0)),
            false,
            |m0, m1, m2| m1 / m0 * (m2 / m0).powf(p - 1.0),
        )
    }
}

/// `sup_D <sigma>_{s, D cap Omega} / <sigma>_{D cap Omega}` over the disk plan.
pub fn rhd_characteristic(
    u: &Weight,
    domain: &DomainSpec,
    s: f64,
    mesh: &DiskMesh,
    depths: RangeInclusive<u32>,
) -> Result<DiskReport> {
    if !(s > 1.0) {
        return Err(LabError::Constraint(format!("RHD_s needs s > 1, got {s}")));
    }
    disk_sup(
        u,
        domain,
        mesh,
        depths,
        CharClass::Rhd,
        s,
        |x| x.powf(s),
        false,
        |m0, m1, m2| (m2 / m0).powf(1.0 / s) / (m1 / m0),
    )
}
