use serde::{Deserialize, Serialize};

use super::characteristic::{
    apr_and_doubling_with, binfty_characteristic, bp_characteristic, localized_maximal_ratio,
    rh_characteristic, rh_on, finite_or_inf, DOUBLING_BOUND,
};
use super::exponents::r_min;
use super::catalog::Weight;
use crate::dyadic::interval::cell_count;
use crate::dyadic::mesh::{box_sums, DiskMesh, MeshSet};
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RScanRow {
    pub r: f64,
    /// Truncated `[v]_{B_r}` at the scan depth.
    pub v_br: f64,
    /// Smallest constant making the inequality hold on every truncated box.
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegChainReport {
    pub q: f64,
    pub theta: f64,
    pub depth: u32,
    pub rows: Vec<RScanRow>,
    pub best: RScanRow,
}

/// Scan grid `r_min (1 + 2^{-m})`, `m = 0..=6`, largest first.
pub fn r_scan(q: f64, theta: f64) -> Vec<f64> {
    let base = r_min(q, theta);
    (0..=6).map(|m| base * (1.0 + (-(m as f64)).exp2())).collect()
}

/// Measure the constant `C` in
/// `<u v^theta>_Q <= C [v]_{B_r}^{1/r} <u>_{q,v,Q} <v^{-1}>_{1/(r-1),Q}^{-theta}`
/// over the scan grid of `r`; `theta = 0` is the unweighted-average form.
pub fn reg_chain_check(
    u: &Weight,
    v: &Weight,
    q: f64,
    theta: f64,
    meshes: &MeshSet,
    depth: u32,
) -> Result<RegChainReport> {
    if q < 1.0 || theta >= 0.5 {
        return Err(LabError::Constraint(format!(
            "need q >= 1 and theta < 1/2, got q = {q}, theta = {theta}"
        )));
    }
    let qc = if q == 1.0 { f64::INFINITY } else { q / (q - 1.0) };
    if (1.0 - theta) * qc < 1.0 {
        return Err(LabError::Constraint(format!(
            "need (1 - theta) q' >= 1, got {}",
            (1.0 - theta) * qc
        )));
    }
    let one = Weight::one();
    let mut rows = Vec::new();
    for r in r_scan(q, theta) {
        let v_br = bp_characteristic(v, &one, r, meshes, depth..=depth)?.last();
        let mut worst: f64 = 0.0;
        for m in meshes.iter() {
            let uu = u.sample(m)?;
            let vv = v.sample(m)?;
            let lhs: Vec<f64> = uu.iter().zip(&vv).map(|(a, b)| a * b.powf(theta)).collect();
            let uq: Vec<f64> = uu.iter().zip(&vv).map(|(a, b)| a.powf(q) * b).collect();
            let vinv: Vec<f64> = vv.iter().map(|b| b.powf(-1.0 / (r - 1.0))).collect();
            let area = box_sums(&m.cell_integrals(&vec![1.0; vv.len()]), depth);
            let vmass = box_sums(&m.cell_integrals(&vv), depth);
            let l = box_sums(&m.cell_integrals(&lhs), depth);
            let a = box_sums(&m.cell_integrals(&uq), depth);
            let b = box_sums(&m.cell_integrals(&vinv), depth);
            for c in 0..cell_count(depth) {
                let left = l[c] / area[c];
                let uqv = (a[c] / vmass[c]).powf(1.0 / q);
                let vfac = if theta == 0.0 {
                    1.0
                } else {
                    (b[c] / area[c]).powf(r - 1.0).powf(-theta)
                };
                let right = v_br.powf(1.0 / r) * uqv * vfac;
                worst = worst.max(finite_or_inf(left / right));
            }
        }
        rows.push(RScanRow {
            r,
            v_br,
            constant: worst,
        });
    }
    let best = *rows
        .iter()
        .min_by(|a, b| a.constant.total_cmp(&b.constant))
        .expect("nonempty scan");
    Ok(RegChainReport {
        q,
        theta,
        depth,
        rows,
        best,
    })
}

/// Quantities around the reverse Hoelder gain of an APR weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverseHolderGain {
    pub apr: f64,
    pub c_v: f64,
    pub binfty: f64,
    pub tau: f64,
    /// Truncated `[w]_{RH_tau(v)}` on the grid.
    pub rh_tau: f64,
    /// `sup <M(w chi_Q)>_{tau,v,Q} / <w>_{v,Q}`.
    pub localized: f64,
}

/// `tau = 2 c_v B / (2 c_v B - 1)` with `B = [w]_{B_inf(v)}`, and the reverse
/// Hoelder constants measured at that exponent.
pub fn reverse_holder_gain(w: &Weight, v: &Weight, mesh: &DiskMesh, depth: u32) -> Result<ReverseHolderGain> {
    let apr = apr_and_doubling_with(w, &Weight::one(), mesh, depth, DOUBLING_BOUND)?.apr;
    let c_v = apr_and_doubling_with(v, &Weight::one(), mesh, depth, DOUBLING_BOUND)?.c_u();
    let binfty = binfty_characteristic(w, v, mesh, depth..=depth)?.last();
    let k = 2.0 * c_v * binfty;
    let tau = k / (k - 1.0);
    let rh_tau = rh_on(w, v, tau, &[mesh], depth..=depth)?.last();
    let localized = localized_maximal_ratio(w, v, tau, mesh, depth..=depth)?.last();
    Ok(ReverseHolderGain {
        apr,
        c_v,
        binfty,
        tau,
        rh_tau,
        localized,
    })
}

/// Both lines of the final chain for `u` and `u^{-1}` at exponent `q_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UupReport {
    pub q0: f64,
    pub r_star: f64,
    pub v_br: f64,
    /// `sup <u>_Q <u^{-1}>_Q`.
    pub lhs: f64,
    /// Constant of the first line: `sup <u><u^{-1}> / ([v]^{2/r*} <u>_{q0,v} <u^{-1}>_{q0,v})`.
    pub first_constant: f64,
    /// `sup <u>_{q0,v,Q} <u^{-1}>_{q0,v,Q}`.
    pub middle: f64,
    /// Characteristic product on the right of the second line.
    pub right: f64,
}

impl UupReport {
    pub fn second_line_holds(&self) -> bool {
        self.middle <= self.right * (1.0 + 1e-12)
    }
}

pub fn uup_chain(u: &Weight, v: &Weight, q0: f64, meshes: &MeshSet, depth: u32) -> Result<UupReport> {
    let uinv = u.clone().pow(-1.0);
    let r1 = reg_chain_check(u, v, q0, 0.0, meshes, depth)?.best.r;
    let r2 = reg_chain_check(&uinv, v, q0, 0.0, meshes, depth)?.best.r;
    let r_star = r1.min(r2);
    let one = Weight::one();
    let v_br = bp_characteristic(v, &one, r_star, meshes, depth..=depth)?.last();
    let mut lhs: f64 = 0.0;
    let mut first: f64 = 0.0;
    let mut middle: f64 = 0.0;
    for m in meshes.iter() {
        let uu = u.sample(m)?;
        let vv = v.sample(m)?;
        let inv: Vec<f64> = uu.iter().map(|x| 1.0 / x).collect();
        let uq: Vec<f64> = uu.iter().zip(&vv).map(|(a, b)| a.powf(q0) * b).collect();
        let iq: Vec<f64> = inv.iter().zip(&vv).map(|(a, b)| a.powf(q0) * b).collect();
        let area = box_sums(&m.cell_integrals(&vec![1.0; vv.len()]), depth);
        let vm = box_sums(&m.cell_integrals(&vv), depth);
        let ua = box_sums(&m.cell_integrals(&uu), depth);
        let ia = box_sums(&m.cell_integrals(&inv), depth);
        let uqa = box_sums(&m.cell_integrals(&uq), depth);
        let iqa = box_sums(&m.cell_integrals(&iq), depth);
        for c in 0..cell_count(depth) {
            let l = (ua[c] / area[c]) * (ia[c] / area[c]);
            let mid = (uqa[c] / vm[c]).powf(1.0 / q0) * (iqa[c] / vm[c]).powf(1.0 / q0);
            lhs = lhs.max(l);
            middle = middle.max(mid);
            first = first.max(l / (v_br.powf(2.0 / r_star) * mid));
        }
    }
    let right = if q0 == 1.0 {
        bp_characteristic(u, v, 2.0, meshes, depth..=depth)?.last()
    } else {
        rh_characteristic(u, v, q0, meshes, depth..=depth)?.last()
            * bp_characteristic(u, v, (q0 + 1.0) / q0, meshes, depth..=depth)?.last()
    };
    Ok(UupReport {
        q0,
        r_star,
        v_br,
        lhs,
        first_constant: first,
        middle,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ConformalMap;
    use crate::dyadic::mesh::QuadOrder;
    use num_complex::Complex64;

    #[test]
    fn scan_grid_starts_at_twice_q() {
        let g = r_scan(2.0, 0.0);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 4.0);
        assert!((g[6] - 2.0 * (1.0 + 1.0 / 64.0)).abs() < 1e-15);
    }

    #[test]
    fn chain_for_smooth_map() {
        let m = MeshSet::new(5, QuadOrder::default()).unwrap();
        let v = Weight::derivsq(ConformalMap::Quadratic(Complex64::new(0.25, 0.0)));
        let r = reg_chain_check(&Weight::Power(0.5), &v, 1.0, 0.0, &m, 5).unwrap();
        assert!(r.best.constant.is_finite() && r.best.constant > 0.0);
        let u = uup_chain(&Weight::Power(0.3), &v, 1.0, &m, 5).unwrap();
        assert!(u.second_line_holds());
    }

    #[test]
    fn gain_exceeds_one() {
        let mesh = DiskMesh::new(crate::dyadic::interval::GridId::G1, 6, QuadOrder::default()).unwrap();
        let w = Weight::Power(0.5).regularized(&Weight::one(), mesh.grid(), 6, QuadOrder::default()).unwrap();
        let g = reverse_holder_gain(&w, &Weight::one(), &mesh, 6).unwrap();
        assert!(g.tau > 1.0 && g.rh_tau.is_finite());
    }
}
