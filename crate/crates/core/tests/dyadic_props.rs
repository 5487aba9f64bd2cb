use bergman_core::dyadic::{build_grid, cell_count, DyadicInterval, GridId, MAX_DEPTH};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = GridId> {
    prop_oneof![Just(GridId::G1), Just(GridId::G2)]
}

proptest! {
    #[test]
    fn flat_index_round_trips(g in grid(), level in 0u32..20, frac in 0.0f64..1.0) {
        let index = (frac * (1u64 << level) as f64) as u64;
        let i = DyadicInterval::new(g, level, index).unwrap();
        prop_assert_eq!(DyadicInterval::from_flat(g, i.flat_index()), i);
    }

    #[test]
    fn ancestors_nest(g in grid(), level in 1u32..20, frac in 0.0f64..1.0, k in 0u32..20) {
        let i = DyadicInterval::new(g, level, (frac * (1u64 << level) as f64) as u64).unwrap();
        let k = k.min(level);
        let a = i.ancestor(k);
        prop_assert!(a.contains(&i));
        prop_assert!(a.arc().contains_arc(&i.arc()));
        prop_assert!(i.parent().unwrap().children().contains(&i));
    }

    #[test]
    fn containing_contains_point(g in grid(), level in 0u32..20, t in 0.0f64..1.0) {
        let i = DyadicInterval::containing(g, level, t);
        prop_assert_eq!(i.level, level);
        prop_assert!(i.arc().contains_point(t));
    }

    #[test]
    fn generations_partition(g in grid(), level in 0u32..6, m in 0u32..5) {
        let i = DyadicInterval::new(g, level, 0).unwrap();
        let gen = i.generation(m);
        prop_assert_eq!(gen.len(), 1usize << m);
        let total: f64 = gen.iter().map(|c| c.length()).sum();
        prop_assert!((total - i.length()).abs() < 1e-15);
    }
}

#[test]
fn grids_have_expected_sizes() {
    for g in GridId::BOTH {
        for d in 0..=12 {
            assert_eq!(build_grid(g, d).unwrap().len(), cell_count(d));
        }
    }
    assert!(build_grid(GridId::G1, MAX_DEPTH + 1).is_err());
}

#[test]
fn second_grid_is_shifted_by_a_third() {
    let a = DyadicInterval::new(GridId::G1, 3, 2).unwrap();
    let b = DyadicInterval::new(GridId::G2, 3, 2).unwrap();
    assert!((b.start() - a.start() - 1.0 / 3.0).abs() < 1e-15);
}
