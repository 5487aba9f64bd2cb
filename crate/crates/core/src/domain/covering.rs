use serde::{Deserialize, Serialize};

use super::image::PolarBox;
use super::DomainSpec;
use crate::dyadic::interval::{wrap, Arc};
use crate::dyadic::mesh::{DiskMesh, QuadOrder};
use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VitaliReport {
    /// Indices into the input, in selection order.
    pub selected: Vec<usize>,
    /// `|psi(Q_I)|` for every input arc.
    pub sizes: Vec<f64>,
    /// `|union psi(Q_I)|`.
    pub union: f64,
    /// `sum_k |psi(Q_{I_k})| / |union|`.
    pub ratio: f64,
    pub disjoint: bool,
}

/// Greedy selection by decreasing image size: take the largest remaining
/// arc, discard everything meeting it, repeat.
pub fn vitali_select(arcs: &[Arc], domain: &DomainSpec, depth: u32, order: QuadOrder) -> Result<VitaliReport> {
    if arcs.is_empty() {
        return Err(LabError::InvalidParameter("empty arc family".into()));
    }
    let sizes: Vec<f64> = arcs
        .iter()
        .map(|a| PolarBox::carleson(*a, depth).image_area(domain, order))
        .collect::<Result<_>>()?;
    let mut by_size: Vec<usize> = (0..arcs.len()).collect();
    by_size.sort_by(|&a, &b| sizes[b].total_cmp(&sizes[a]).then(a.cmp(&b)));
    let mut selected: Vec<usize> = Vec::new();
    for i in by_size {
        if selected.iter().all(|&j| !arcs[i].overlaps(&arcs[j])) {
            selected.push(i);
        }
    }
    let disjoint = selected
        .iter()
        .enumerate()
        .all(|(a, &i)| selected[a + 1..].iter().all(|&j| !arcs[i].overlaps(&arcs[j])));
    let union = union_area(arcs, domain, depth, order)?;
    let ratio = selected.iter().map(|&i| sizes[i]).sum::<f64>() / union;
    Ok(VitaliReport {
        selected,
        sizes,
        union,
        ratio,
        disjoint,
    })
}

/// Image area of a union of Carleson boxes: below the upper envelope
/// `L(t) = max{length(I) : t in I}`, integrated piece by piece.
pub fn union_area(arcs: &[Arc], domain: &DomainSpec, depth: u32, order: QuadOrder) -> Result<f64> {
    let mut cuts: Vec<f64> = arcs.iter().flat_map(|a| [a.start, a.end()]).map(wrap).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut total = 0.0;
    for k in 0..cuts.len() {
        let a = cuts[k];
        let len = if cuts.len() == 1 {
            1.0
        } else {
            wrap(cuts[(k + 1) % cuts.len()] - a)
        };
        if len <= 1e-14 {
            continue;
        }
        let mid = wrap(a + len / 2.0);
        let envelope = arcs
            .iter()
            .filter(|i| i.contains_point_half_open(mid))
            .map(|i| i.length)
            .fold(0.0, f64::max);
        if envelope > 0.0 {
            let piece = PolarBox {
                arc: Arc::new(a, len)?,
                h_lo: DiskMesh::collar(depth),
                h_hi: envelope,
            };
            total += piece.image_area(domain, order)?;
        }
    }
    Ok(total)
}

/// `|psi(Q_{I_1 cup I_2})| / (|psi(Q_{I_1})| + |psi(Q_{I_2})|)` for adjacent arcs.
pub fn neighbor_check(i1: &Arc, i2: &Arc, domain: &DomainSpec, depth: u32, order: QuadOrder) -> Result<f64> {
    let joint = i1.union_if_adjacent(i2)?;
    let area = |a: Arc| PolarBox::carleson(a, depth).image_area(domain, order);
    Ok(area(joint)? / (area(*i1)? + area(*i2)?))
}
