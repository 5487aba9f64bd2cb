use super::interval::{Arc, DyadicInterval, GridId, MAX_DEPTH};
use super::region::box_area;

/// Dyadic intervals squeezing an arbitrary arc, with the area factor achieved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproximatingPair {
    pub inner: DyadicInterval,
    pub outer: DyadicInterval,
    /// `max(|Q_outer| / |Q_arc|, |Q_arc| / |Q_inner|)`.
    pub factor: f64,
}

/// Smallest interval of either grid containing `arc`, ties broken toward `G1`.
pub fn outer_interval(arc: &Arc, max_level: u32) -> DyadicInterval {
    let mut best = DyadicInterval::root(GridId::G1);
    for grid in GridId::BOTH {
        for level in (0..=max_level).rev() {
            if (-(level as f64)).exp2() < arc.length - 1e-13 {
                continue;
            }
            let cand = DyadicInterval::containing(grid, level, arc.start + 1e-13);
            if cand.arc().contains_arc(arc) {
                if cand.level > best.level {
                    best = cand;
                }
                break;
            }
        }
    }
    best
}

/// Largest interval of either grid contained in `arc`, ties broken toward `G1`.
pub fn inner_interval(arc: &Arc, max_level: u32) -> Option<DyadicInterval> {
    let mut best: Option<DyadicInterval> = None;
    for grid in GridId::BOTH {
        for level in 0..=max_level {
            let l = (-(level as f64)).exp2();
            if l > arc.length + 1e-13 {
                continue;
            }
            let first = DyadicInterval::containing(grid, level, arc.start - 1e-13);
            let n = 1u64 << level;
            let found = (0..3u64)
                .map(|s| DyadicInterval {
                    grid,
                    level,
                    index: (first.index + s) % n,
                })
                .find(|c| arc.contains_arc(&c.arc()));
            if let Some(c) = found {
                if best.map_or(true, |b| c.level < b.level) {
                    best = Some(c);
                }
                break;
            }
        }
    }
    best
}

pub fn approximating_pair(arc: &Arc) -> ApproximatingPair {
    let outer = outer_interval(arc, MAX_DEPTH);
    let inner = inner_interval(arc, MAX_DEPTH).unwrap_or(outer);
    let a = box_area(arc.length);
    let factor = (box_area(outer.length()) / a).max(a / box_area(inner.length()));
    ApproximatingPair {
        inner,
        outer,
        factor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_on_dyadic_arcs() {
        for level in 0..6 {
            for index in 0..1u64 << level {
                let i = DyadicInterval::new(GridId::G1, level, index).unwrap();
                let p = approximating_pair(&i.arc());
                assert_eq!(p.inner, i);
                assert_eq!(p.outer, i);
                assert_eq!(p.factor, 1.0);
            }
        }
    }

    #[test]
    fn whole_circle() {
        let p = approximating_pair(&Arc::whole());
        assert_eq!(p.outer, DyadicInterval::root(GridId::G1));
    }
}
