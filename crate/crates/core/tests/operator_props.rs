use bergman_core::dyadic::{cell_count, DiskMesh, GridId, QuadOrder};
use bergman_core::operators::{maximal_dyadic, sparse_apply, CellFunction};
use bergman_core::weights::Weight;
use proptest::prelude::*;
use std::sync::OnceLock;

const DEPTH: u32 = 4;

fn mesh() -> &'static DiskMesh {
    static M: OnceLock<DiskMesh> = OnceLock::new();
    M.get_or_init(|| DiskMesh::new(GridId::G1, DEPTH, QuadOrder::default()).unwrap())
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, cell_count(DEPTH))
}

fn cf(v: Vec<f64>) -> CellFunction {
    CellFunction::new(GridId::G1, DEPTH, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sparse_operator_is_linear(a in values(), b in values(), s in 0.0f64..5.0) {
        let v = Weight::Power(0.3);
        let (fa, fb) = (cf(a), cf(b));
        let comb = fa.zip(&fb, |x, y| s * x + y).unwrap();
        let lhs = sparse_apply(&comb, &v, mesh()).unwrap();
        let ra = sparse_apply(&fa, &v, mesh()).unwrap();
        let rb = sparse_apply(&fb, &v, mesh()).unwrap();
        for k in 0..lhs.values.len() {
            let rhs = s * ra.values[k] + rb.values[k];
            prop_assert!((lhs.values[k] - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn maximal_operator_is_monotone(a in values(), b in values()) {
        let v = Weight::one();
        let lo = cf(a.clone());
        let hi = cf(a.iter().zip(&b).map(|(x, y)| x + y).collect());
        let ml = maximal_dyadic(&lo, &v, mesh()).unwrap();
        let mh = maximal_dyadic(&hi, &v, mesh()).unwrap();
        for (x, y) in ml.values.iter().zip(&mh.values) {
            prop_assert!(*x <= *y + 1e-12);
        }
    }
}

#[test]
fn constants_are_fixed_by_the_maximal_operator() {
    let m = maximal_dyadic(&CellFunction::constant(GridId::G1, DEPTH, 2.5), &Weight::Power(-0.3), mesh()).unwrap();
    assert!(m.values.iter().all(|x| (x - 2.5).abs() < 1e-12));
}
