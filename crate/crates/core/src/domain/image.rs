use std::ops::RangeInclusive;

use num_complex::Complex64;

use super::DomainSpec;
use crate::dyadic::gauss::GaussRule;
use crate::dyadic::interval::{Arc, DyadicInterval};
use crate::dyadic::mesh::{panel_nodes, DiskMesh, MeshSet, QuadOrder, MAX_PANEL_TURN};
use crate::error::{LabError, Result};
use crate::weights::{bp_characteristic, CharacteristicReport, Weight};

/// `sigma(psi(Q_I)) = int_{Q_I} u v dA` on the truncated mesh.
pub fn image_measure(domain: &DomainSpec, i: &DyadicInterval, u: &Weight, mesh: &DiskMesh) -> Result<f64> {
    mesh.check_interval(i)?;
    let v = domain.v();
    mesh.integrate_box(i, mesh.depth(), |z| u.eval(z) * v.eval(z))
}

/// `[sigma]_{B_p(Omega)}` through the pullback `[u]_{B_p(D, v)}`.
pub fn bp_omega(
    u: &Weight,
    domain: &DomainSpec,
    p: f64,
    meshes: &MeshSet,
    depths: RangeInclusive<u32>,
) -> Result<CharacteristicReport> {
    let mut r = bp_characteristic(u, &domain.v(), p, meshes, depths)?;
    r.omega_side = true;
    Ok(r)
}

/// The polar region `{1 - h_hi <= r <= 1 - h_lo, angle in arc}` over an
/// arbitrary arc, integrated on hyperbolically graded panels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarBox {
    pub arc: Arc,
    pub h_lo: f64,
    pub h_hi: f64,
}

impl PolarBox {
    /// Carleson box over `arc`, truncated at the collar of `depth`.
    pub fn carleson(arc: Arc, depth: u32) -> Self {
        PolarBox {
            arc,
            h_lo: DiskMesh::collar(depth),
            h_hi: arc.length,
        }
    }

    pub fn integrate(&self, order: QuadOrder, f: impl Fn(Complex64) -> f64) -> Result<f64> {
        let rr = GaussRule::new(order.radial)?;
        let rt = GaussRule::new(order.angular)?;
        let hi = self.h_hi.min(1.0);
        if hi <= self.h_lo {
            return Ok(0.0);
        }
        let mut total = 0.0;
        let mut top = hi;
        let mut bad = None;
        while top > self.h_lo {
            let bottom = (0.5 * top).max(self.h_lo);
            let width = MAX_PANEL_TURN.min(top);
            let split = ((self.arc.length / width) - 1e-9).ceil().max(1.0) as usize;
            for s in 0..split {
                let t0 = self.arc.start + self.arc.length * s as f64 / split as f64;
                let t1 = self.arc.start + self.arc.length * (s + 1) as f64 / split as f64;
                panel_nodes(&rr, &rt, 1.0 - top, 1.0 - bottom, t0, t1, |r, t, w| {
                    let z = Complex64::from_polar(r, std::f64::consts::TAU * t);
                    let v = f(z);
                    if !v.is_finite() && bad.is_none() {
                        bad = Some((z, v));
                    }
                    total += w * v;
                });
            }
            top = bottom;
        }
        if let Some((z, value)) = bad {
            return Err(LabError::NonFiniteIntegrand { node: 0, z, value });
        }
        Ok(total)
    }

    /// `|psi(box)|` for a domain.
    pub fn image_area(&self, domain: &DomainSpec, order: QuadOrder) -> Result<f64> {
        let v = domain.v();
        self.integrate(order, |z| v.eval(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ConformalMap;
    use crate::dyadic::interval::GridId;
    use crate::dyadic::region::truncated_box_area;

    #[test]
    fn identity_area_is_closed_form() {
        let d = 6;
        let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).unwrap();
        let dom = DomainSpec::new(ConformalMap::Identity).unwrap();
        let i = DyadicInterval::new(GridId::G1, 1, 0).unwrap();
        let a = image_measure(&dom, &i, &Weight::one(), &mesh).unwrap();
        assert!((a - truncated_box_area(0.5, DiskMesh::collar(d))).abs() < 1e-12);
        let b = PolarBox::carleson(i.arc(), d).integrate(QuadOrder::default(), |_| 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn arbitrary_arc_area() {
        let arc = Arc::new(0.3, 0.37).unwrap();
        let b = PolarBox { arc, h_lo: 0.01, h_hi: 0.37 };
        let a = b.integrate(QuadOrder::default(), |_| 1.0).unwrap();
        let exact = 0.37 * (0.99f64.powi(2) - 0.63f64.powi(2));
        assert!((a - exact).abs() < 1e-13);
    }
}
