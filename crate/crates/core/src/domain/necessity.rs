use std::ops::RangeInclusive;

use crate::dyadic::interval::{cell_count, DyadicInterval};
use crate::dyadic::mesh::{box_sums, DiskMesh};
use crate::error::{LabError, Result};
use crate::weights::characteristic::finite_or_inf;
use crate::weights::{CharClass, CharacteristicReport, DepthValue, Weight};

/// Per box, `<M_v(chi_Q v^{-p/(p-1)})>_{1/p,Q} <v>_Q / <v^{-1/(p-1)}>_Q`;
/// the supremum over truncated boxes is reported per depth.
pub fn necessity_probe(v: &Weight, p: f64, mesh: &DiskMesh, depths: RangeInclusive<u32>) -> Result<CharacteristicReport> {
    if !(p > 1.0) {
        return Err(LabError::Constraint(format!("need p > 1, got {p}")));
    }
    mesh.check_depth(*depths.end())?;
    let vv = v.sample(mesh)?;
    let dual: Vec<f64> = vv.iter().map(|x| x.powf(-1.0 / (p - 1.0))).collect();
    let area_c = mesh.cell_integrals(&vec![1.0; vv.len()]);
    let v_c = mesh.cell_integrals(&vv);
    let dual_c = mesh.cell_integrals(&dual);
    let mut rows = Vec::new();
    for d in depths {
        let n = cell_count(d);
        let area = box_sums(&area_c, d);
        let vb = box_sums(&v_c, d);
        let db = box_sums(&dual_c, d);
        // <g>_{v,Q_J} with g v = v^{-1/(p-1)}
        let avg: Vec<f64> = (0..n).map(|c| db[c] / vb[c]).collect();
        let mut run = vec![0.0; n];
        let mut best = DepthValue {
            depth: d,
            value: f64::NEG_INFINITY,
            extremal: DyadicInterval::root(mesh.grid()),
            nodes: 0,
        };
        for i in 0..n {
            let iv = DyadicInterval::from_flat(mesh.grid(), i);
            let mut mass = 0.0;
            let mut count = 0;
            for m in iv.level..=d {
                for c in iv.descendant_range(m) {
                    run[c] = if c == i { avg[c] } else { avg[c].max(run[(c - 1) / 2]) };
                    mass += area_c[c] * run[c].powf(1.0 / p);
                    count += mesh.cell_node_range(c).len();
                }
            }
            let lhs = (mass / area[i]).powf(p) * (vb[i] / area[i]);
            let value = finite_or_inf(lhs / (db[i] / area[i]));
            if value > best.value {
                best = DepthValue {
                    depth: d,
                    value,
                    extremal: iv,
                    nodes: count,
                };
            }
        }
        rows.push(best);
    }
    Ok(CharacteristicReport {
        class: CharClass::Necessity,
        exponent: p,
        omega_side: false,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::interval::GridId;
    use crate::dyadic::mesh::QuadOrder;

    #[test]
    fn constant_weight_gives_one() {
        let mesh = DiskMesh::new(GridId::G1, 5, QuadOrder::default()).unwrap();
        let r = necessity_probe(&Weight::Constant(3.0), 2.0, &mesh, 2..=5).unwrap();
        assert!(r.values().iter().all(|x| (x - 1.0).abs() < 1e-12), "{:?}", r.values());
    }
}
