use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::catalog::Weight;
use crate::dyadic::interval::{cell_count, DyadicInterval};
use crate::dyadic::mesh::{box_max, box_sums, DiskMesh, MeshSet};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharClass {
    Bp,
    RH,
    WeakRH,
    BInfinity,
    Dp,
    Rhd,
    Necessity,
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CharClass::Bp => "B_p",
            CharClass::RH => "RH_s",
            CharClass::WeakRH => "weakRH_s",
            CharClass::BInfinity => "B_inf",
            CharClass::Dp => "D_p",
            CharClass::Rhd => "RHD_s",
            CharClass::Necessity => "necessity",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthValue {
    pub depth: u32,
    pub value: f64,
    pub extremal: DyadicInterval,
    /// Quadrature nodes inside the extremal box.
    pub nodes: usize,
}

/// Truncated characteristic per depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    pub class: CharClass,
    pub exponent: f64,
    pub omega_side: bool,
    pub rows: Vec<DepthValue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A sequence fails membership when it grows by more than `factor` per depth
/// over at least `run` consecutive steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRule {
    pub factor: f64,
    pub run: usize,
}

impl Default for GrowthRule {
    fn default() -> Self {
        GrowthRule {
            factor: 1.05,
            run: 3,
        }
    }
}

impl GrowthRule {
    pub fn classify(&self, values: &[f64]) -> Verdict {
        if values.iter().any(|v| v.is_infinite() || v.is_nan()) {
            return Verdict::Growing;
        }
        let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
        let mut streak = 0;
        for r in &ratios {
            if *r > self.factor {
                streak += 1;
                if streak >= self.run {
                    return Verdict::Growing;
                }
            } else {
                streak = 0;
            }
        }
        let tail = self.run.min(ratios.len());
        if tail > 0 && ratios[ratios.len() - tail..].iter().all(|r| *r <= self.factor) {
            Verdict::Bounded
        } else {
            Verdict::Inconclusive
        }
    }
}

impl CharacteristicReport {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn last(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.value)
    }

    pub fn at(&self, depth: u32) -> Option<f64> {
        self.rows.iter().find(|r| r.depth == depth).map(|r| r.value)
    }

    pub fn verdict(&self, rule: &GrowthRule) -> Verdict {
        rule.classify(&self.values())
    }

    pub fn max(&self) -> f64 {
        self.rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// How a per-cell field is aggregated over a truncated box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agg {
    Sum,
    Max,
}

pub(crate) fn finite_or_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Supremum of `value(fields at box)` over truncated boxes of the given meshes.
///
/// `fields` maps a mesh to per-cell field values; each field is aggregated by
/// the matching entry of `aggs`. Ties keep the first box in grid, level, index
/// order.
pub fn sup_over_boxes(
    meshes: &[&DiskMesh],
    depths: RangeInclusive<u32>,
    class: CharClass,
    exponent: f64,
    aggs: &[Agg],
    fields: impl Fn(&DiskMesh) -> Result<Vec<Vec<f64>>>,
    value: impl Fn(&[f64]) -> f64,
) -> Result<CharacteristicReport> {
    let mut per_mesh = Vec::with_capacity(meshes.len());
    for m in meshes {
        m.check_depth(*depths.end())?;
        let counts: Vec<f64> = (0..m.cell_count())
            .map(|c| m.cell_node_range(c).len() as f64)
            .collect();
        per_mesh.push((fields(m)?, counts));
    }
    let mut rows = Vec::new();
    let mut buf = vec![0.0; aggs.len()];
    for d in depths {
        let mut best = DepthValue {
            depth: d,
            value: f64::NEG_INFINITY,
            extremal: DyadicInterval::root(meshes[0].grid()),
            nodes: 0,
        };
        for (m, (cells, counts)) in meshes.iter().zip(&per_mesh) {
            let boxes: Vec<Vec<f64>> = cells
                .iter()
                .zip(aggs)
                .map(|(c, a)| match a {
                    Agg::Sum => box_sums(c, d),
                    Agg::Max => box_max(c, d),
                })
                .collect();
            let nb = box_sums(counts, d);
            for flat in 0..cell_count(d) {
                for (b, f) in buf.iter_mut().zip(&boxes) {
                    *b = f[flat];
                }
                let v = finite_or_inf(value(&buf));
                if v > best.value {
                    best.value = v;
                    best.extremal = DyadicInterval::from_flat(m.grid(), flat);
                    best.nodes = nb[flat] as usize;
                }
            }
        }
        rows.push(best);
    }
    Ok(CharacteristicReport {
        class,
        exponent,
        omega_side: false,
        rows,
    })
}

fn cell_weighted(mesh: &DiskMesh, f: &[f64], v: &[f64]) -> Vec<f64> {
    let prod: Vec<f64> = f.iter().zip(v).map(|(a, b)| a * b).collect();
    mesh.cell_integrals(&prod)
}

/// `sup <u>_{v,Q} <u^{-1/(p-1)}>_{v,Q}^{p-1}`, with a node maximum of `u^{-1}`
/// at `p = 1`.
pub fn bp_characteristic(
    u: &Weight,
    v: &Weight,
    p: f64,
    meshes: &MeshSet,
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    bp_on(u, v, p, &[&meshes.g1, &meshes.g2], depths)
}

/// As [`bp_characteristic`] over an explicit list of meshes.
pub fn bp_on(
    u: &Weight,
    v: &Weight,
    p: f64,
    meshes: &[&DiskMesh],
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    if !(p >= 1.0) {
        return Err(crate::LabError::Constraint(format!("B_p needs p >= 1, got {p}")));
    }
    let agg = if p == 1.0 { Agg::Max } else { Agg::Sum };
    sup_over_boxes(
        meshes,
        depths,
        CharClass::Bp,
        p,
        &[Agg::Sum, Agg::Sum, agg],
        |m| {
            let uu = u.sample(m)?;
            let vv = v.sample(m)?;
            let ones = vec![1.0; vv.len()];
            let third = if p == 1.0 {
                let inv: Vec<f64> = uu.iter().map(|x| 1.0 / x).collect();
                m.cell_max(&inv)
            } else {
                let dual: Vec<f64> = uu.iter().map(|x| x.powf(-1.0 / (p - 1.0))).collect();
                cell_weighted(m, &dual, &vv)
            };
            Ok(vec![cell_weighted(m, &ones, &vv), cell_weighted(m, &uu, &vv), third])
        },
        |b| {
            let avg = b[1] / b[0];
            if p == 1.0 {
                avg * b[2]
            } else {
                avg * (b[2] / b[0]).powf(p - 1.0)
            }
        },
    )
}

/// `sup <u>_{s,v,Q} / <u>_{v,Q}` for `s > 1`.
pub fn rh_characteristic(
    u: &Weight,
    v: &Weight,
    s: f64,
    meshes: &MeshSet,
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    rh_on(u, v, s, &[&meshes.g1, &meshes.g2], depths)
}

/// As [`rh_characteristic`] over an explicit list of meshes.
pub fn rh_on(
    u: &Weight,
    v: &Weight,
    s: f64,
    meshes: &[&DiskMesh],
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    if !(s > 1.0) {
        return Err(crate::LabError::Constraint(format!("RH_s needs s > 1, got {s}")));
    }
    power_ratio(u, v, s, meshes, depths, CharClass::RH)
}

/// `sup <u>_{v,Q} / <u>_{s,v,Q}` for `0 < s < 1`.
pub fn weak_rh_check(
    u: &Weight,
    v: &Weight,
    s: f64,
    meshes: &MeshSet,
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(crate::LabError::Constraint(format!(
            "weak reverse Hoelder needs 0 < s < 1, got {s}"
        )));
    }
    power_ratio(u, v, s, &[&meshes.g1, &meshes.g2], depths, CharClass::WeakRH)
}

fn power_ratio(
    u: &Weight,
    v: &Weight,
    s: f64,
    meshes: &[&DiskMesh],
    depths: RangeInclusive<u32>,
    class: CharClass,
) -> Result<CharacteristicReport> {
    sup_over_boxes(
        meshes,
        depths,
        class,
        s,
        &[Agg::Sum, Agg::Sum, Agg::Sum],
        |m| {
            let uu = u.sample(m)?;
            let vv = v.sample(m)?;
            let us: Vec<f64> = uu.iter().map(|x| x.powf(s)).collect();
            let ones = vec![1.0; vv.len()];
            Ok(vec![cell_weighted(m, &ones, &vv), cell_weighted(m, &uu, &vv), cell_weighted(m, &us, &vv)])
        },
        |b| {
            let mean = b[1] / b[0];
            let smean = (b[2] / b[0]).powf(1.0 / s);
            if class == CharClass::RH {
                smean / mean
            } else {
                mean / smean
            }
        },
    )
}

/// `sup <M(u chi_Q)>_{v,Q} / <u>_{v,Q}` on one grid, where `M` is the
/// `v`-weighted dyadic maximal function over sub-boxes.
pub fn binfty_characteristic(
    u: &Weight,
    v: &Weight,
    mesh: &DiskMesh,
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    localized_maximal_ratio(u, v, 1.0, mesh, depths)
}

/// `sup <M(u chi_Q)>_{tau,v,Q} / <u>_{v,Q}` on one grid; `tau = 1` gives the
/// `B_inf` characteristic.
pub fn localized_maximal_ratio(
    u: &Weight,
    v: &Weight,
    tau: f64,
    mesh: &DiskMesh,
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    mesh.check_depth(*depths.end())?;
    let uu = u.sample(mesh)?;
    let vv = v.sample(mesh)?;
    let ones = vec![1.0; vv.len()];
    let vc = cell_weighted(mesh, &ones, &vv);
    let uc = cell_weighted(mesh, &uu, &vv);
    let counts: Vec<f64> = (0..mesh.cell_count())
        .map(|c| mesh.cell_node_range(c).len() as f64)
        .collect();
    let mut rows = Vec::new();
    let mut stack = Vec::new();
    for d in depths {
        let vb = box_sums(&vc, d);
        let ub = box_sums(&uc, d);
        let nb = box_sums(&counts, d);
        let avg: Vec<f64> = ub.iter().zip(&vb).map(|(a, b)| a / b).collect();
        let first_deep = (1usize << d) - 1;
        let mut best = DepthValue {
            depth: d,
            value: f64::NEG_INFINITY,
            extremal: DyadicInterval::root(mesh.grid()),
            nodes: 0,
        };
        for flat in 0..cell_count(d) {
            let mut acc = 0.0;
            stack.clear();
            stack.push((flat, avg[flat]));
            while let Some((c, run)) = stack.pop() {
                let m: f64 = run.max(avg[c]);
                acc += if tau == 1.0 { m } else { m.powf(tau) } * vc[c];
                if c < first_deep {
                    stack.push((2 * c + 1, m));
                    stack.push((2 * c + 2, m));
                }
            }
            let mean = acc / vb[flat];
            let v = finite_or_inf(if tau == 1.0 { mean } else { mean.powf(1.0 / tau) } / avg[flat]);
            if v > best.value {
                best = DepthValue {
                    depth: d,
                    value: v,
                    extremal: DyadicInterval::from_flat(mesh.grid(), flat),
                    nodes: nb[flat] as usize,
                };
            }
        }
        rows.push(best);
    }
    Ok(CharacteristicReport {
        class: CharClass::BInfinity,
        exponent: tau,
        omega_side: false,
        rows,
    })
}

/// Oscillation and doubling constants of a weight on one grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprDoubling {
    pub apr: f64,
    pub apr_cell: DyadicInterval,
    /// Smallest `c` with `int_{Q_parent} u <= c int_{Q_child} u`.
    pub parent_child: f64,
    /// Smallest `c` with `int_{Q_I} u <= c int_{T_I} u`.
    pub box_top: f64,
    pub weakly_doubling: bool,
}

impl AprDoubling {
    pub fn c_u(&self) -> f64 {
        self.parent_child.max(self.box_top)
    }
}

/// Default bound used for the weakly-doubling flag.
pub const DOUBLING_BOUND: f64 = 64.0;

pub fn apr_and_doubling(u: &Weight, mesh: &DiskMesh, depth: u32) -> Result<AprDoubling> {
    apr_and_doubling_with(u, &Weight::one(), mesh, depth, DOUBLING_BOUND)
}

/// As [`apr_and_doubling`] for the measure `u v dA` with an explicit flag bound.
pub fn apr_and_doubling_with(
    u: &Weight,
    v: &Weight,
    mesh: &DiskMesh,
    depth: u32,
    bound: f64,
) -> Result<AprDoubling> {
    mesh.check_depth(depth)?;
    let uu = u.sample(mesh)?;
    let vv = v.sample(mesh)?;
    let hi = mesh.cell_max(&uu);
    let lo = mesh.cell_min(&uu);
    let n = cell_count(depth);
    let (mut apr, mut apr_cell) = (f64::NEG_INFINITY, 0);
    for c in 0..n {
        let r = hi[c] / lo[c];
        if r > apr {
            apr = r;
            apr_cell = c;
        }
    }
    let cells = cell_weighted(mesh, &uu, &vv);
    let boxes = box_sums(&cells, depth);
    let mut pc: f64 = 1.0;
    let mut bt: f64 = 1.0;
    for c in 0..n {
        bt = bt.max(boxes[c] / cells[c]);
        if c > 0 {
            pc = pc.max(boxes[(c - 1) / 2] / boxes[c]);
        }
    }
    Ok(AprDoubling {
        apr,
        apr_cell: DyadicInterval::from_flat(mesh.grid(), apr_cell),
        parent_child: finite_or_inf(pc),
        box_top: finite_or_inf(bt),
        weakly_doubling: pc <= bound && bt > bound,
    })
}

/// Doubling constant `c_u` of a weight on one grid at the given depth.
pub fn doubling_constant(u: &Weight, mesh: &DiskMesh, depth: u32) -> Result<f64> {
    Ok(apr_and_doubling(u, mesh, depth)?.c_u())
}
