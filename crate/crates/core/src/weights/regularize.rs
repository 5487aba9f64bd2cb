use std::sync::Arc;

use super::catalog::{Regularized, Weight};
use crate::dyadic::interval::GridId;
use crate::dyadic::mesh::{DiskMesh, QuadOrder};
use crate::error::Result;

/// Piecewise-constant weight equal on each top-half cell to `<u>_{v,T}`.
pub fn regularize(
    u: &Weight,
    v: &Weight,
    grid: GridId,
    depth: u32,
    order: QuadOrder,
) -> Result<Weight> {
    let mesh = DiskMesh::new(grid, depth, order)?;
    regularize_on(u, v, &mesh)
}

/// As [`regularize`] on an existing mesh (its grid and depth are used).
pub fn regularize_on(u: &Weight, v: &Weight, mesh: &DiskMesh) -> Result<Weight> {
    let uu = u.sample(mesh)?;
    let vv = v.sample(mesh)?;
    let uv: Vec<f64> = uu.iter().zip(&vv).map(|(a, b)| a * b).collect();
    let num = mesh.cell_integrals(&uv);
    let den = mesh.cell_integrals(&vv);
    let values = num.iter().zip(&den).map(|(a, b)| a / b).collect();
    Ok(Weight::Regularized(Arc::new(Regularized {
        source: u.clone(),
        reference: v.clone(),
        grid: mesh.grid(),
        depth: mesh.depth(),
        values,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::interval::DyadicInterval;

    #[test]
    fn constants_are_fixed() {
        let w = regularize(&Weight::Constant(3.5), &Weight::Power(0.4), GridId::G2, 4, QuadOrder::default()).unwrap();
        let Weight::Regularized(r) = &w else { panic!() };
        assert!(r.values.iter().all(|x| (x - 3.5).abs() < 1e-14));
    }

    #[test]
    fn averages_are_preserved() {
        let mesh = DiskMesh::new(GridId::G1, 5, QuadOrder::default()).unwrap();
        let u = Weight::Power(-0.5);
        let v = Weight::Power(0.3);
        let reg = regularize_on(&u, &v, &mesh).unwrap();
        for flat in 0..mesh.cell_count() {
            let i = DyadicInterval::from_flat(GridId::G1, flat);
            let a = mesh.integrate_box(&i, 5, |z| u.eval(z) * v.eval(z)).unwrap();
            let b = mesh.integrate_box(&i, 5, |z| reg.eval(z) * v.eval(z)).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }
}
