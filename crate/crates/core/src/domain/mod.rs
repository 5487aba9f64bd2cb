//! The image domain `Omega = psi(D)`: image boxes, disk characteristics, the
//! maximal operator along images of boxes, Vitali covering and transfer laws.

pub mod covering;
pub mod disks;
pub mod image;
pub mod mpsi;
pub mod necessity;
pub mod transfer;

use num_complex::Complex64;

use crate::conformal::ConformalMap;
use crate::dyadic::mesh::DiskMesh;
use crate::error::{LabError, Result};
use crate::weights::Weight;

pub use covering::{neighbor_check, vitali_select, VitaliReport};
pub use disks::{dp_characteristic, rhd_characteristic, DiskPlan, DiskReport};
pub use image::{bp_omega, image_measure, PolarBox};
pub use mpsi::{m_psi_apply, m_psi_b1, m_psi_weak, MPsiWeak};
pub use necessity::necessity_probe;
pub use transfer::{
    transfer_identity_check, transfer_strong_norms, transfer_weak_check, StrongNorms, TransferResidual, WeakMeasures,
};

/// A domain given by its Riemann map from the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub map: ConformalMap,
}

impl DomainSpec {
    pub fn new(map: ConformalMap) -> Result<Self> {
        map.validate()?;
        Ok(DomainSpec { map })
    }

    /// Pullback of area, `|psi'|^2`.
    pub fn v(&self) -> Weight {
        Weight::derivsq(self.map.clone())
    }

    /// `|psi'|`.
    pub fn w(&self) -> Weight {
        Weight::ConformalDeriv {
            map: self.map.clone(),
            exponent: 1.0,
        }
    }

    /// Ensure `v > 0` at every node of the mesh.
    pub fn check(&self, mesh: &DiskMesh) -> Result<Vec<f64>> {
        self.v().sample(mesh)
    }

    /// Boundary samples `psi(rho e^{i theta})` at `n` equally spaced angles.
    pub fn boundary(&self, n: usize, depth: u32) -> Vec<Complex64> {
        (0..n)
            .map(|k| self.map.boundary_trace(std::f64::consts::TAU * k as f64 / n as f64, depth))
            .collect()
    }

    /// Diameter of the sampled boundary trace.
    pub fn diameter(&self, depth: u32) -> f64 {
        let pts = self.boundary(256, depth);
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }
}

/// Euclidean disk centered on the boundary of the image domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl BoundaryDisk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(LabError::InvalidParameter(format!("disk radius must be positive, got {radius}")));
        }
        Ok(BoundaryDisk { center, radius })
    }

    /// `|psi(zeta) - center| < radius`, given the image point.
    pub fn contains_image(&self, image: Complex64) -> bool {
        (image - self.center).norm() < self.radius
    }
}
