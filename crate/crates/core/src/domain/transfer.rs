use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DomainSpec;
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::operators::BergmanProjector;
use crate::weights::Weight;

/// Residual of `Pi_D((f o psi) psi') = (f o psi) psi'` for holomorphic `f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferResidual {
    /// `max |Pi g - g| / max |g|` over nodes.
    pub max_rel: f64,
    pub l2_rel: f64,
}

fn check_pair(mesh: &DiskMesh, projector: &BergmanProjector) -> Result<()> {
    if mesh.grid() != projector.grid() || mesh.depth() != projector.depth() {
        return Err(LabError::GridMismatch {
            expected: format!("{}:{}", mesh.grid(), mesh.depth()),
            found: format!("{}:{}", projector.grid(), projector.depth()),
        });
    }
    Ok(())
}

/// `g = (f o psi) psi'` at the projector nodes, for the polynomial
/// `f(w) = sum_k c_k w^k`.
pub fn pulled_polynomial(coeffs: &[Complex64], domain: &DomainSpec, projector: &BergmanProjector) -> Vec<Complex64> {
    projector
        .nodes()
        .iter()
        .map(|z| {
            let (w, dw) = domain.map.eval(*z);
            let f = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c);
            f * dw
        })
        .collect()
}

pub fn transfer_identity_check(
    coeffs: &[Complex64],
    domain: &DomainSpec,
    projector: &BergmanProjector,
) -> Result<TransferResidual> {
    if coeffs.is_empty() || coeffs.len() > 6 {
        return Err(LabError::InvalidParameter(format!(
            "test polynomial needs 1..=6 coefficients, got {}",
            coeffs.len()
        )));
    }
    let g = pulled_polynomial(coeffs, domain, projector);
    let pg = projector.apply(&g)?;
    let gmax = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let dmax = g.iter().zip(&pg).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(TransferResidual {
        max_rel: dmax / gmax,
        l2_rel: projector.l2_dist(&pg, &g) / projector.l2_norm(&g),
    })
}

/// Lower estimates of the two operator norms from one test family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongNorms {
    /// `max_f ||Pi_Omega f||_{L^p(sigma)} / ||f||_{L^p(sigma)}`.
    pub omega: f64,
    /// `max_g ||Pi_D g||_{L^p(u |psi'|^{2-p})} / ||g||_{L^p(u |psi'|^{2-p})}`.
    pub disk: f64,
    pub per_test: Vec<(f64, f64)>,
}

impl StrongNorms {
    pub fn agreement(&self) -> f64 {
        (self.omega - self.disk).abs() / self.omega.abs().max(self.disk.abs())
    }
}

/// Both sides of the strong-type transfer law on test functions `f` given by
/// their pullbacks `f o psi` at the mesh nodes.
pub fn transfer_strong_norms(
    u: &Weight,
    p: f64,
    domain: &DomainSpec,
    mesh: &DiskMesh,
    projector: &BergmanProjector,
    tests: &[Vec<Complex64>],
) -> Result<StrongNorms> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::Constraint(format!("need 1 < p < inf, got {p}")));
    }
    check_pair(mesh, projector)?;
    let uu = u.sample(mesh)?;
    let vv = domain.check(mesh)?;
    let dw: Vec<Complex64> = mesh.nodes().iter().map(|n| domain.map.deriv(n.z)).collect();
    let batch: Vec<Vec<Complex64>> = tests
        .iter()
        .map(|f| f.iter().zip(&dw).map(|(a, b)| a * b).collect())
        .collect();
    let images = projector.apply_batch_at(&batch, projector.nodes())?;

    // disk side weight, coded as a weight expression
    let weight = u.clone().times(domain.w().pow(2.0 - p)).sample(mesh)?;
    let nodes = mesh.nodes();
    let mut per_test = Vec::with_capacity(tests.len());
    for ((f, g), pg) in tests.iter().zip(&batch).zip(&images) {
        let (mut num_o, mut den_o, mut num_d, mut den_d) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..nodes.len() {
            let s = nodes[k].weight * uu[k] * vv[k];
            num_o += s * (pg[k] / dw[k]).norm().powf(p);
            den_o += s * f[k].norm().powf(p);
            let t = nodes[k].weight * weight[k];
            num_d += t * pg[k].norm().powf(p);
            den_d += t * g[k].norm().powf(p);
        }
        per_test.push(((num_o / den_o).powf(1.0 / p), (num_d / den_d).powf(1.0 / p)));
    }
    Ok(StrongNorms {
        omega: per_test.iter().map(|r| r.0).fold(0.0, f64::max),
        disk: per_test.iter().map(|r| r.1).fold(0.0, f64::max),
        per_test,
    })
}

/// `sigma({|Pi_Omega f| > lambda})` and `uv({|Pi_D g| / w > lambda})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakMeasures {
    pub lambda: f64,
    pub omega: f64,
    pub disk: f64,
}

pub fn transfer_weak_check(
    f: &[Complex64],
    lambdas: &[f64],
    domain: &DomainSpec,
    u: &Weight,
    mesh: &DiskMesh,
    projector: &BergmanProjector,
) -> Result<Vec<WeakMeasures>> {
    check_pair(mesh, projector)?;
    let dw: Vec<Complex64> = mesh.nodes().iter().map(|n| domain.map.deriv(n.z)).collect();
    let g: Vec<Complex64> = f.iter().zip(&dw).map(|(a, b)| a * b).collect();
    let pg = projector.apply(&g)?;
    let uu = u.sample(mesh)?;
    // Omega side: Pi_Omega f o psi = Pi_D g / psi', measured by sigma dA = u |psi'|^2
    let pf: Vec<Complex64> = pg.iter().zip(&dw).map(|(a, b)| a / b).collect();
    // disk side: w and v = w^2 from the weight expressions
    let ww = domain.w().sample(mesh)?;
    let vv = domain.v().sample(mesh)?;
    let nodes = mesh.nodes();
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let mut omega = 0.0;
            let mut disk = 0.0;
            for k in 0..nodes.len() {
                if pf[k].norm() > lambda {
                    omega += nodes[k].weight * uu[k] * dw[k].norm_sqr();
                }
                if pg[k].norm() / ww[k] > lambda {
                    disk += nodes[k].weight * uu[k] * vv[k];
                }
            }
            WeakMeasures { lambda, omega, disk }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ConformalMap;
    use crate::dyadic::interval::GridId;
    use crate::dyadic::mesh::QuadOrder;
    use crate::operators::ProjectorOptions;

    fn setup(map: ConformalMap, d: u32) -> (DomainSpec, DiskMesh, BergmanProjector) {
        let dom = DomainSpec::new(map).unwrap();
        let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).unwrap();
        let p = BergmanProjector::new(&mesh, ProjectorOptions::default()).unwrap();
        (dom, mesh, p)
    }

    #[test]
    fn identity_reduces_to_reproduction() {
        let (dom, _, p) = setup(ConformalMap::Identity, 4);
        let r = transfer_identity_check(&[Complex64::new(1.0, 0.0)], &dom, &p).unwrap();
        let rep = p.reproduction(0).unwrap();
        assert!((r.l2_rel - rep.monomials[0]).abs() < 1e-12);
    }

    #[test]
    fn strong_and_weak_sides_agree() {
        let (dom, mesh, p) = setup(ConformalMap::Quadratic(Complex64::new(0.25, 0.0)), 4);
        let test: Vec<Complex64> = mesh
            .nodes()
            .iter()
            .map(|n| Complex64::new(if n.cell == 5 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let s = transfer_strong_norms(&Weight::one(), 2.0, &dom, &mesh, &p, std::slice::from_ref(&test)).unwrap();
        assert!(s.agreement() < 1e-8, "{s:?}");
        let w = transfer_weak_check(&test, &[0.01, 0.1, 1e6], &dom, &Weight::Power(0.5), &mesh, &p).unwrap();
        for m in &w {
            assert!((m.omega - m.disk).abs() <= 1e-8 * m.omega.max(1e-300));
        }
        assert_eq!(w[2].omega, 0.0);
    }
}
