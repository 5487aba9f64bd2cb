use serde::{Deserialize, Serialize};

use super::cellfn::{CellFunction, NodeFunction, Sampled};
use crate::dyadic::approx::approximating_pair;
use crate::dyadic::interval::{cell_count, Arc, DyadicInterval};
use crate::dyadic::mesh::{box_sums, DiskMesh, MeshSet};
use crate::dyadic::region::CarlesonBox;
use crate::error::Result;
use crate::weights::Weight;

/// `<|f|>_{v,Q_I}` for every truncated box of the mesh, in flat order.
pub fn box_averages(f: &impl Sampled, v: &Weight, mesh: &DiskMesh) -> Result<Vec<f64>> {
    let ff: Vec<f64> = f.node_values(mesh)?.iter().map(|x| x.abs()).collect();
    box_means(&ff, v, mesh)
}

/// Signed `<f>_{v,Q_I}` from node values.
pub fn box_means(ff: &[f64], v: &Weight, mesh: &DiskMesh) -> Result<Vec<f64>> {
    let vv = v.sample(mesh)?;
    let fv: Vec<f64> = ff.iter().zip(&vv).map(|(a, b)| a * b).collect();
    let d = mesh.depth();
    let num = box_sums(&mesh.cell_integrals(&fv), d);
    let den = box_sums(&mesh.cell_integrals(&vv), d);
    Ok(num.iter().zip(&den).map(|(a, b)| a / b).collect())
}

/// Running maximum of box values along every root-to-cell path.
pub fn ancestor_max(vals: &[f64], depth: u32) -> Vec<f64> {
    let mut out = vals[..cell_count(depth)].to_vec();
    for c in 1..out.len() {
        let p = (c - 1) / 2;
        out[c] = out[c].max(out[p]);
    }
    out
}

/// Running sum of box values along every root-to-cell path.
pub fn ancestor_sum(vals: &[f64], depth: u32) -> Vec<f64> {
    let mut out = vals[..cell_count(depth)].to_vec();
    for c in 1..out.len() {
        let p = (c - 1) / 2;
        out[c] += out[p];
    }
    out
}

/// Weighted dyadic maximal function on the mesh's grid, one value per cell.
pub fn maximal_dyadic(f: &impl Sampled, v: &Weight, mesh: &DiskMesh) -> Result<CellFunction> {
    let avg = box_averages(f, v, mesh)?;
    CellFunction::new(mesh.grid(), mesh.depth(), ancestor_max(&avg, mesh.depth()))
}

/// Sum of the two single-grid maximal functions at the nodes of the first mesh.
pub fn maximal_two_grid(f: &impl Sampled, v: &Weight, meshes: &MeshSet) -> Result<NodeFunction> {
    let m1 = maximal_dyadic(f, v, &meshes.g1)?;
    let m2 = maximal_dyadic(f, v, &meshes.g2)?;
    let a = m1.node_values(&meshes.g1)?;
    let b = m2.node_values(&meshes.g1)?;
    Ok(NodeFunction {
        grid: meshes.g1.grid(),
        depth: meshes.depth(),
        values: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
    })
}

/// Maximal function over an explicit family of arcs, at the nodes of `mesh`,
/// with box averages computed by node masking.
pub fn arc_maximal(f: &impl Sampled, v: &Weight, mesh: &DiskMesh, arcs: &[Arc]) -> Result<Vec<f64>> {
    let ff = f.node_values(mesh)?;
    let vv = v.sample(mesh)?;
    let mut out = vec![0.0f64; ff.len()];
    for a in arcs {
        let b = CarlesonBox { arc: *a };
        let inside: Vec<usize> = mesh
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, n)| b.contains_polar(n.r, n.t))
            .map(|(k, _)| k)
            .collect();
        let (mut num, mut den) = (0.0, 0.0);
        for &k in &inside {
            let w = mesh.nodes()[k].weight * vv[k];
            num += ff[k].abs() * w;
            den += w;
        }
        if den > 0.0 {
            let avg = num / den;
            for &k in &inside {
                out[k] = out[k].max(avg);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    /// `max M_arcs f / (M_1 f + M_2 f)` over nodes.
    pub measured: f64,
    /// `max v(Q_outer) / v(Q_arc)` over the arc family, which bounds `measured`.
    pub certified: f64,
    pub slack: f64,
}

/// Compare the two-grid maximal function with the maximal function over `arcs`.
pub fn two_grid_domination(f: &impl Sampled, v: &Weight, meshes: &MeshSet, arcs: &[Arc]) -> Result<DominationReport> {
    let two = maximal_two_grid(f, v, meshes)?;
    let all = arc_maximal(f, v, &meshes.g1, arcs)?;
    let measured = all
        .iter()
        .zip(&two.values)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a / b)
        .fold(0.0, f64::max);
    let vv = v.sample(&meshes.g1)?;
    let mass = |b: &CarlesonBox| -> f64 {
        meshes
            .g1
            .nodes()
            .iter()
            .zip(&vv)
            .filter(|(n, _)| b.contains_polar(n.r, n.t))
            .map(|(n, w)| n.weight * w)
            .sum()
    };
    let mut certified: f64 = 1.0;
    for a in arcs {
        let pair = approximating_pair(a);
        let outer = clamp_level(pair.outer, meshes.depth());
        let m_outer = meshes
            .get(outer.grid)
            .integrate_box(&outer, meshes.depth(), |z| v.eval(z))?;
        let m_arc = mass(&CarlesonBox { arc: *a });
        if m_arc > 0.0 {
            certified = certified.max(m_outer / m_arc);
        }
    }
    Ok(DominationReport {
        measured,
        certified,
        slack: certified / measured.max(f64::MIN_POSITIVE),
    })
}

fn clamp_level(i: DyadicInterval, depth: u32) -> DyadicInterval {
    if i.level <= depth {
        i
    } else {
        i.ancestor(depth)
    }
}

/// One row of a weighted weak-type sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRow {
    pub lambda: f64,
    /// `lambda * (uv)({M f > lambda})`.
    pub lhs: f64,
    /// `C * int |f| uv` with the constant of the inequality.
    pub rhs: f64,
}

impl WeakRow {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// `sup <uw>_{w,Q} * max_Q (uw)^{-1}` on one grid (node maxima).
pub fn b1_weighted(a: &Weight, w: &Weight, mesh: &DiskMesh) -> Result<f64> {
    let r = crate::weights::bp_on(a, w, 1.0, &[mesh], mesh.depth()..=mesh.depth())?;
    Ok(r.last())
}

/// Check `uv({M_w f > lambda}) <= [uw]_{B_1(w)} / lambda * int |f| uv`.
pub fn maximal_weak_check(
    f: &impl Sampled,
    u: &Weight,
    w: &Weight,
    mesh: &DiskMesh,
    lambdas: &[f64],
) -> Result<Vec<WeakRow>> {
    let mf = maximal_dyadic(f, w, mesh)?;
    let ff = f.node_values(mesh)?;
    let uu = u.sample(mesh)?;
    let ww = w.sample(mesh)?;
    let uw = u.clone().times(w.clone());
    let c = b1_weighted(&uw, w, mesh)?;
    let uv: Vec<f64> = uu.iter().zip(&ww).map(|(a, b)| a * b * b).collect();
    let norm: f64 = mesh
        .nodes()
        .iter()
        .zip(ff.iter().zip(&uv))
        .map(|(n, (f, m))| n.weight * f.abs() * m)
        .sum();
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let level: f64 = mesh
                .nodes()
                .iter()
                .zip(&uv)
                .filter(|(n, _)| mf.values[n.cell] > lambda)
                .map(|(n, m)| n.weight * m)
                .sum();
            WeakRow {
                lambda,
                lhs: lambda * level,
                rhs: c * norm,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::interval::GridId;
    use crate::dyadic::mesh::{MeshSet, QuadOrder};
    use crate::dyadic::region::truncated_box_area;

    #[test]
    fn constant_function() {
        let ms = MeshSet::new(4, QuadOrder::default()).unwrap();
        let f = CellFunction::constant(GridId::G1, 4, 1.0);
        let m = maximal_dyadic(&f, &Weight::Power(0.3), &ms.g1).unwrap();
        assert!(m.values.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let two = maximal_two_grid(&f, &Weight::one(), &ms).unwrap();
        assert!(two.values.iter().all(|x| (x - 2.0).abs() < 1e-14));
    }

    #[test]
    fn indicator_telescopes() {
        let d = 5;
        let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).unwrap();
        let j = DyadicInterval::new(GridId::G1, 3, 2).unwrap();
        let f = CellFunction::indicator(&j, d);
        let m = maximal_dyadic(&f, &Weight::one(), &mesh).unwrap();
        let delta = DiskMesh::collar(d);
        let area = |i: &DyadicInterval| truncated_box_area(i.length(), delta);
        for flat in 0..mesh.cell_count() {
            let c = DyadicInterval::from_flat(GridId::G1, flat);
            let expect = if j.contains(&c) {
                1.0
            } else {
                (0..=c.level.min(j.level))
                    .map(|k| c.ancestor(k))
                    .filter(|a| a.contains(&j))
                    .map(|a| area(&j) / area(&a))
                    .fold(0.0, f64::max)
            };
            assert!((m.values[flat] - expect).abs() < 1e-12, "{c}");
        }
    }
}
