//! Discretized Bergman projection of the disk.
//!
//! Source data live at the nodes of a truncated mesh. The collar
//! `1 - delta < |w| < 1` is closed by extending each deepest panel's outer
//! trace radially, so holomorphic data are reproduced up to an error that
//! shrinks with the depth instead of stalling at the truncated mass.

use std::f64::consts::TAU;
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cellfn::{CellFunction, Sampled};
use super::sparse::sparse_apply;
use crate::dyadic::gauss::GaussRule;
use crate::dyadic::interval::{DyadicInterval, GridId};
use crate::dyadic::mesh::{cell_band, panel_nodes, DiskMesh, MeshSet};
use crate::error::{LabError, Result};
use crate::weights::Weight;

/// Deepest mesh for which a dense cell matrix is assembled.
pub const DENSE_MAX_DEPTH: u32 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorOptions {
    /// A source panel is near when its circumradius exceeds this multiple of
    /// the distance from its center to the kernel pole `1 / conj(z)`.
    pub near_ratio: f64,
    /// Maximum number of 2x2 subdivisions in the near field.
    pub max_split: u32,
    /// Gauss order on near-field sub-panels.
    pub sub_order: usize,
}

impl Default for ProjectorOptions {
    fn default() -> Self {
        ProjectorOptions {
            near_ratio: 0.3,
            max_split: 20,
            sub_order: 6,
        }
    }
}

#[derive(Clone, Debug)]
struct Source {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    center: Complex64,
    radius: f64,
    nodes: Range<usize>,
}

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, TAU * t)
}

fn geometry(r0: f64, r1: f64, t0: f64, t1: f64) -> (Complex64, f64) {
    let (rm, tm) = (0.5 * (r0 + r1), 0.5 * (t0 + t1));
    let c = polar(rm, tm);
    let radius = [(r0, t0), (r0, t1), (r1, t0), (r1, t1), (r1, tm), (r0, tm)]
        .iter()
        .map(|&(r, t)| (polar(r, t) - c).norm())
        .fold(0.0, f64::max);
    (c, radius)
}

#[inline]
fn kernel(z: Complex64, wc: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - z * wc;
    (d * d).inv()
}

struct Scratch {
    lr: Vec<f64>,
    lt: Vec<f64>,
    out: Vec<Complex64>,
}

/// Matrix-free projector on the nodes of one mesh.
#[derive(Clone, Debug)]
pub struct BergmanProjector {
    grid: GridId,
    depth: u32,
    rr: GaussRule,
    rt: GaussRule,
    sub: GaussRule,
    sources: Vec<Source>,
    ext_wc: Vec<Complex64>,
    ext_w: Vec<f64>,
    /// First mesh node of the deepest panel feeding each collar panel.
    collar_from: Vec<usize>,
    trace: Vec<f64>,
    n_mesh: usize,
    node_z: Vec<Complex64>,
    node_w: Vec<f64>,
    node_cell: Vec<usize>,
    opts: ProjectorOptions,
}

impl BergmanProjector {
    pub fn new(mesh: &DiskMesh, opts: ProjectorOptions) -> Result<Self> {
        if !(opts.near_ratio > 0.0) || opts.sub_order == 0 {
            return Err(LabError::InvalidParameter(format!("bad projector options {opts:?}")));
        }
        let order = mesh.order();
        let rr = GaussRule::new(order.radial)?;
        let rt = GaussRule::new(order.angular)?;
        let sub = GaussRule::new(opts.sub_order)?;
        let mut sources = Vec::with_capacity(mesh.panels().len() * 2);
        let mut ext_wc: Vec<Complex64> = mesh.nodes().iter().map(|n| n.z.conj()).collect();
        let mut ext_w: Vec<f64> = mesh.nodes().iter().map(|n| n.weight).collect();
        for p in mesh.panels() {
            let (center, radius) = geometry(p.r0, p.r1, p.t0, p.t1);
            sources.push(Source {
                r0: p.r0,
                r1: p.r1,
                t0: p.t0,
                t1: p.t1,
                center,
                radius,
                nodes: p.nodes.clone(),
            });
        }
        let depth = mesh.depth();
        let (_, r_outer) = cell_band(depth);
        let mut collar_from = Vec::new();
        let lo = (1usize << depth) - 1;
        for cell in lo..mesh.cell_count() {
            for p in mesh.cell_panels(cell) {
                let start = ext_w.len();
                panel_nodes(&rr, &rt, r_outer, 1.0, p.t0, p.t1, |r, t, w| {
                    ext_wc.push(polar(r, t).conj());
                    ext_w.push(w);
                });
                let (center, radius) = geometry(r_outer, 1.0, p.t0, p.t1);
                sources.push(Source {
                    r0: r_outer,
                    r1: 1.0,
                    t0: p.t0,
                    t1: p.t1,
                    center,
                    radius,
                    nodes: start..ext_w.len(),
                });
                collar_from.push(p.nodes.start);
            }
        }
        let mut trace = vec![0.0; rr.len()];
        rr.lagrange(1.0, &mut trace);
        Ok(BergmanProjector {
            grid: mesh.grid(),
            depth,
            rr,
            rt,
            sub,
            sources,
            ext_wc,
            ext_w,
            collar_from,
            trace,
            n_mesh: mesh.nodes().len(),
            node_z: mesh.nodes().iter().map(|n| n.z).collect(),
            node_w: mesh.nodes().iter().map(|n| n.weight).collect(),
            node_cell: mesh.nodes().iter().map(|n| n.cell).collect(),
            opts,
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn grid(&self) -> GridId {
        self.grid
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.node_z
    }

    /// Mesh node values followed by the collar values.
    pub fn extend(&self, vals: &[Complex64]) -> Result<Vec<Complex64>> {
        if vals.len() != self.n_mesh {
            return Err(LabError::GridMismatch {
                expected: format!("{} node values", self.n_mesh),
                found: format!("{}", vals.len()),
            });
        }
        let (nr, nt) = (self.rr.len(), self.rt.len());
        let mut ext = Vec::with_capacity(self.ext_w.len());
        ext.extend_from_slice(vals);
        for &from in &self.collar_from {
            let tr: Vec<Complex64> = (0..nt)
                .map(|b| (0..nr).map(|a| vals[from + a * nt + b] * self.trace[a]).sum())
                .collect();
            for _ in 0..nr {
                ext.extend_from_slice(&tr);
            }
        }
        Ok(ext)
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            lr: vec![0.0; self.rr.len()],
            lt: vec![0.0; self.rt.len()],
            out: vec![Complex64::new(0.0, 0.0); self.rr.len() * self.rt.len()],
        }
    }

    /// Feed `(extended node index, coefficient)` pairs of the row at `z`.
    fn accumulate(&self, z: Complex64, s: &mut Scratch, mut sink: impl FnMut(usize, Complex64)) {
        let pole = if z.norm() > 1e-12 { Some(z.conj().inv()) } else { None };
        for src in &self.sources {
            let near = pole.is_some_and(|p| src.radius > self.opts.near_ratio * (p - src.center).norm());
            if near {
                s.out.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                self.near_weights(z, pole.unwrap_or_default(), src, [-1.0, 1.0, -1.0, 1.0], 0, s);
                for (k, c) in s.out.iter().enumerate() {
                    sink(src.nodes.start + k, *c);
                }
            } else {
                for j in src.nodes.clone() {
                    sink(j, kernel(z, self.ext_wc[j]) * self.ext_w[j]);
                }
            }
        }
    }

    /// Product integration of the kernel against the panel's Lagrange basis
    /// with adaptive 2x2 subdivision toward the pole.
    fn near_weights(&self, z: Complex64, pole: Complex64, src: &Source, b: [f64; 4], level: u32, s: &mut Scratch) {
        let [x0, x1, y0, y1] = b;
        let rmap = |x: f64| src.r0 + 0.5 * (x + 1.0) * (src.r1 - src.r0);
        let tmap = |y: f64| src.t0 + 0.5 * (y + 1.0) * (src.t1 - src.t0);
        let (c, radius) = geometry(rmap(x0), rmap(x1), tmap(y0), tmap(y1));
        if level < self.opts.max_split && radius > self.opts.near_ratio * (pole - c).norm() {
            let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            for q in [[x0, xm, y0, ym], [xm, x1, y0, ym], [x0, xm, ym, y1], [xm, x1, ym, y1]] {
                self.near_weights(z, pole, src, q, level + 1, s);
            }
            return;
        }
        let jr = 0.5 * (src.r1 - src.r0);
        let jt = 0.5 * (src.t1 - src.t0);
        let nt = self.rt.len();
        for (xs, wx) in self.sub.on(x0, x1) {
            let r = rmap(xs);
            self.rr.lagrange(xs, &mut s.lr);
            for (ys, wy) in self.sub.on(y0, y1) {
                let t = tmap(ys);
                self.rt.lagrange(ys, &mut s.lt);
                let kw = kernel(z, polar(r, t).conj()) * (2.0 * r * wx * jr * wy * jt);
                for (a, la) in s.lr.iter().enumerate() {
                    let ka = kw * *la;
                    for (bb, lb) in s.lt.iter().enumerate() {
                        s.out[a * nt + bb] += ka * *lb;
                    }
                }
            }
        }
    }

    /// `Pi f` at arbitrary interior points, for several data vectors at once.
    pub fn apply_batch_at(&self, batch: &[Vec<Complex64>], points: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let ext: Vec<Vec<Complex64>> = batch.iter().map(|v| self.extend(v)).collect::<Result<_>>()?;
        let rows: Vec<Vec<Complex64>> = points
            .par_iter()
            .map_init(
                || self.scratch(),
                |s, &z| {
                    let mut acc = vec![Complex64::new(0.0, 0.0); ext.len()];
                    self.accumulate(z, s, |j, c| {
                        for (a, e) in acc.iter_mut().zip(&ext) {
                            *a += c * e[j];
                        }
                    });
                    acc
                },
            )
            .collect();
        let mut out = vec![Vec::with_capacity(points.len()); batch.len()];
        for row in rows {
            for (o, v) in out.iter_mut().zip(row) {
                o.push(v);
            }
        }
        for (k, o) in out.iter().enumerate() {
            if let Some(i) = o.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(LabError::Overflow(format!(
                    "projection of data vector {k} is not finite at {}",
                    points[i]
                )));
            }
        }
        Ok(out)
    }

    /// `Pi f` at the mesh nodes.
    pub fn apply(&self, vals: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.apply_batch_at(&[vals.to_vec()], &self.node_z)?.remove(0))
    }

    pub fn sample(&self, f: impl Fn(Complex64) -> Complex64) -> Vec<Complex64> {
        self.node_z.iter().map(|z| f(*z)).collect()
    }

    /// Node-weighted `L^2` norm of `a - b`.
    pub fn l2_dist(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.node_w)
            .map(|((x, y), w)| w * (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_norm(&self, a: &[Complex64]) -> f64 {
        a.iter().zip(&self.node_w).map(|(x, w)| w * x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Relative errors `||Pi z^n - z^n|| / ||z^n||` for `n = 0..=n_max`, and
    /// `||Pi conj(z)|| / ||conj(z)||`.
    pub fn reproduction(&self, n_max: u32) -> Result<ReproductionReport> {
        let mut batch: Vec<Vec<Complex64>> = (0..=n_max).map(|n| self.sample(|z| z.powu(n))).collect();
        batch.push(self.sample(|z| z.conj()));
        let out = self.apply_batch_at(&batch, &self.node_z)?;
        let mut monomials = Vec::new();
        for n in 0..=n_max as usize {
            monomials.push(self.l2_dist(&out[n], &batch[n]) / self.l2_norm(&batch[n]));
        }
        let k = batch.len() - 1;
        let conj = self.l2_norm(&out[k]) / self.l2_norm(&batch[k]);
        Ok(ReproductionReport {
            depth: self.depth,
            certified: monomials.iter().cloned().fold(0.0, f64::max),
            monomials,
            conj,
        })
    }

    /// Representative point of every cell: the polar center of its top half.
    pub fn cell_points(&self) -> Vec<Complex64> {
        (0..crate::dyadic::interval::cell_count(self.depth))
            .map(|c| {
                let iv = DyadicInterval::from_flat(self.grid, c);
                let (r0, r1) = cell_band(iv.level);
                polar(0.5 * (r0 + r1), iv.center())
            })
            .collect()
    }

    /// Dense cell-to-cell matrix, rows at [`Self::cell_points`].
    pub fn matrix(&self) -> Result<ProjectionMatrix> {
        if self.depth > DENSE_MAX_DEPTH {
            return Err(LabError::DepthTooLarge {
                depth: self.depth,
                max: DENSE_MAX_DEPTH,
            });
        }
        let cols = crate::dyadic::interval::cell_count(self.depth);
        let points = self.cell_points();
        let (nr, nt) = (self.rr.len(), self.rt.len());
        let n_mesh = self.n_mesh;
        let rows: Vec<Vec<Complex64>> = points
            .par_iter()
            .map_init(
                || self.scratch(),
                |s, &z| {
                    let mut row = vec![Complex64::new(0.0, 0.0); cols];
                    self.accumulate(z, s, |j, c| {
                        if j < n_mesh {
                            row[self.node_cell[j]] += c;
                        } else {
                            // collar nodes read the trace of a deepest cell
                            let k = (j - n_mesh) / (nr * nt);
                            row[self.node_cell[self.collar_from[k]]] += c;
                        }
                    });
                    row
                },
            )
            .collect();
        Ok(ProjectionMatrix {
            grid: self.grid,
            depth: self.depth,
            cols,
            points,
            data: rows.concat(),
        })
    }
}

/// Dense kernel integrals: entry `(i, c)` is `int_{cell c} K(z_i, w) dA(w)`,
/// with the collar credited to the deepest cells.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    pub grid: GridId,
    pub depth: u32,
    pub cols: usize,
    pub points: Vec<Complex64>,
    pub data: Vec<Complex64>,
}

impl ProjectionMatrix {
    pub fn apply(&self, f: &CellFunction) -> Result<Vec<Complex64>> {
        if f.grid != self.grid || f.depth != self.depth {
            return Err(LabError::GridMismatch {
                expected: format!("{}:{}", self.grid, self.depth),
                found: format!("{}:{}", f.grid, f.depth),
            });
        }
        Ok(self
            .data
            .par_chunks(self.cols)
            .map(|row| row.iter().zip(&f.values).map(|(a, b)| a * b).sum())
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub depth: u32,
    /// Relative error for `z^n`, `n = 0, 1, ...`.
    pub monomials: Vec<f64>,
    /// Relative size of the projection of `conj(z)`.
    pub conj: f64,
    /// Largest monomial error.
    pub certified: f64,
}

/// Pointwise comparison of `|Pi f|` with the sum of the two sparse operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseDomination {
    /// `max |Pi f| / (A_1 f + A_2 f)` over nodes.
    pub constant: f64,
    pub worst_node: Complex64,
}

pub fn sparse_domination_check(
    f: &impl Sampled,
    meshes: &MeshSet,
    projector: &BergmanProjector,
) -> Result<SparseDomination> {
    let mesh = &meshes.g1;
    if projector.grid != mesh.grid() || projector.depth != mesh.depth() {
        return Err(LabError::GridMismatch {
            expected: format!("{}:{}", mesh.grid(), mesh.depth()),
            found: format!("{}:{}", projector.grid, projector.depth),
        });
    }
    let ff = f.node_values(mesh)?;
    if let Some(k) = ff.iter().position(|x| *x < 0.0) {
        return Err(LabError::Constraint(format!("datum must be nonnegative, node {k} is {}", ff[k])));
    }
    let one = Weight::one();
    let a1 = sparse_apply(f, &one, &meshes.g1)?.node_values(mesh)?;
    let a2 = sparse_apply(f, &one, &meshes.g2)?.node_values(mesh)?;
    let pf = projector.apply(&ff.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>())?;
    let mut best = SparseDomination {
        constant: 0.0,
        worst_node: Complex64::new(0.0, 0.0),
    };
    for (k, z) in projector.node_z.iter().enumerate() {
        let c = pf[k].norm() / (a1[k] + a2[k]);
        if c > best.constant {
            best = SparseDomination {
                constant: c,
                worst_node: *z,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::mesh::QuadOrder;

    fn projector(d: u32) -> BergmanProjector {
        let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).unwrap();
        BergmanProjector::new(&mesh, ProjectorOptions::default()).unwrap()
    }

    #[test]
    fn constants_and_conjugates() {
        let p = projector(4);
        let r = p.reproduction(2).unwrap();
        assert!(r.monomials[0] < 1e-6, "{r:?}");
        assert!(r.conj < 1e-2, "{r:?}");
    }

    #[test]
    fn matrix_matches_matrix_free_on_cells() {
        let d = 3;
        let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).unwrap();
        let p = BergmanProjector::new(&mesh, ProjectorOptions::default()).unwrap();
        let m = p.matrix().unwrap();
        let j = DyadicInterval::new(GridId::G1, 1, 1).unwrap();
        let f = CellFunction::indicator(&j, d);
        let dense = m.apply(&f).unwrap();
        let vals: Vec<Complex64> = f.node_values(&mesh).unwrap().iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let free = p.apply_batch_at(&[vals], &m.points).unwrap().remove(0);
        for (a, b) in dense.iter().zip(&free) {
            assert!((a - b).norm() < 1e-12);
        }
        let ones = m.apply(&CellFunction::constant(GridId::G1, d, 1.0)).unwrap();
        assert!(ones.iter().all(|v| (v - 1.0).norm() < 1e-6));
    }
}
