use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, LabError, Result};

/// Largest depth accepted by grid constructors.
pub const MAX_DEPTH: u32 = 24;

/// Wrap a normalized angle into `[0, 1)`.
pub fn wrap(t: f64) -> f64 {
    let w = t.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Distance on the normalized circle.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

/// Normalized angle of a nonzero complex number, in `[0, 1)`.
pub fn turn_of(z: num_complex::Complex64) -> f64 {
    wrap(z.im.atan2(z.re) / std::f64::consts::TAU)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GridId {
    G1,
    G2,
}

impl GridId {
    pub const BOTH: [GridId; 2] = [GridId::G1, GridId::G2];

    /// Rotation of the grid in normalized arclength.
    pub fn offset(self) -> f64 {
        match self {
            GridId::G1 => 0.0,
            GridId::G2 => 1.0 / 3.0,
        }
    }

    pub fn other(self) -> GridId {
        match self {
            GridId::G1 => GridId::G2,
            GridId::G2 => GridId::G1,
        }
    }
}

impl fmt::Display for GridId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridId::G1 => write!(f, "G1"),
            GridId::G2 => write!(f, "G2"),
        }
    }
}

impl std::str::FromStr for GridId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "G1" | "g1" | "1" => Ok(GridId::G1),
            "G2" | "g2" | "2" => Ok(GridId::G2),
            _ => Err(parse_err("grid id", s)),
        }
    }
}

/// An arc of the circle in normalized arclength: `[start, start + length)` mod 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) || !start.is_finite() {
            return Err(LabError::InvalidParameter(format!(
                "arc length must lie in (0, 1], got {length}"
            )));
        }
        Ok(Arc {
            start: wrap(start),
            length,
        })
    }

    pub fn whole() -> Self {
        Arc {
            start: 0.0,
            length: 1.0,
        }
    }

    pub fn centered(center: f64, length: f64) -> Result<Self> {
        Arc::new(center - length / 2.0, length)
    }

    pub fn center(&self) -> f64 {
        wrap(self.start + self.length / 2.0)
    }

    pub fn end(&self) -> f64 {
        wrap(self.start + self.length)
    }

    /// Closed membership with a small slack: `|t - center| <= length/2`.
    pub fn contains_point(&self, t: f64) -> bool {
        self.length >= 1.0 || circle_dist(t, self.center()) <= self.length / 2.0 + 1e-13
    }

    /// Half-open membership, used where arcs must tile.
    pub fn contains_point_half_open(&self, t: f64) -> bool {
        self.length >= 1.0 || wrap(t - self.start) < self.length
    }

    pub fn contains_arc(&self, other: &Arc) -> bool {
        if self.length >= 1.0 {
            return true;
        }
        if other.length > self.length + 1e-13 {
            return false;
        }
        let mut off = wrap(other.start - self.start);
        if off > 1.0 - 1e-13 {
            off = 0.0;
        }
        off + other.length <= self.length + 1e-13
    }

    /// True when the arcs overlap in a set of positive length.
    pub fn overlaps(&self, other: &Arc) -> bool {
        if self.length >= 1.0 || other.length >= 1.0 {
            return true;
        }
        let a = wrap(other.start - self.start);
        let b = wrap(self.start - other.start);
        a < self.length - 1e-13 || b < other.length - 1e-13
    }

    /// If the two arcs share an endpoint and do not overlap, their union.
    pub fn union_if_adjacent(&self, other: &Arc) -> Result<Arc> {
        let tol = 1e-12;
        if self.length + other.length > 1.0 + tol {
            return Err(LabError::NotAdjacent);
        }
        let len = (self.length + other.length).min(1.0);
        if circle_dist(self.end(), other.start) < tol {
            return Arc::new(self.start, len);
        }
        if circle_dist(other.end(), self.start) < tol {
            return Arc::new(other.start, len);
        }
        Err(LabError::NotAdjacent)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6}, +{:.6})", self.start, self.length)
    }
}

/// Interval `j` of level `k` in grid `grid`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub grid: GridId,
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn new(grid: GridId, level: u32, index: u64) -> Result<Self> {
        if level > MAX_DEPTH {
            return Err(LabError::DepthTooLarge {
                depth: level,
                max: MAX_DEPTH,
            });
        }
        if index >= 1u64 << level {
            return Err(LabError::IndexOutOfRange { level, index });
        }
        Ok(DyadicInterval { grid, level, index })
    }

    pub fn root(grid: GridId) -> Self {
        DyadicInterval {
            grid,
            level: 0,
            index: 0,
        }
    }

    pub fn length(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn start(&self) -> f64 {
        wrap(self.grid.offset() + self.index as f64 * self.length())
    }

    pub fn center(&self) -> f64 {
        wrap(self.grid.offset() + (self.index as f64 + 0.5) * self.length())
    }

    pub fn arc(&self) -> Arc {
        Arc {
            start: self.start(),
            length: self.length(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.level == 0
    }

    pub fn parent(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(LabError::RootHasNoParent);
        }
        Ok(DyadicInterval {
            grid: self.grid,
            level: self.level - 1,
            index: self.index >> 1,
        })
    }

    pub fn children(&self) -> [Self; 2] {
        let c = |b: u64| DyadicInterval {
            grid: self.grid,
            level: self.level + 1,
            index: 2 * self.index + b,
        };
        [c(0), c(1)]
    }

    /// The `k`-th generation below this interval, in index order.
    pub fn generation(&self, k: u32) -> Vec<Self> {
        let first = self.index << k;
        (0..1u64 << k)
            .map(|i| DyadicInterval {
                grid: self.grid,
                level: self.level + k,
                index: first + i,
            })
            .collect()
    }

    /// The ancestor at level `k <= self.level`.
    pub fn ancestor(&self, k: u32) -> Self {
        debug_assert!(k <= self.level);
        DyadicInterval {
            grid: self.grid,
            level: k,
            index: self.index >> (self.level - k),
        }
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.grid == other.grid
            && other.level >= self.level
            && other.index >> (other.level - self.level) == self.index
    }

    /// Position in the level-major enumeration `2^k - 1 + j`.
    pub fn flat_index(&self) -> usize {
        ((1usize << self.level) - 1) + self.index as usize
    }

    pub fn from_flat(grid: GridId, flat: usize) -> Self {
        let level = usize::BITS - 1 - (flat + 1).leading_zeros();
        DyadicInterval {
            grid,
            level,
            index: (flat + 1 - (1usize << level)) as u64,
        }
    }

    /// Range of flat indices of the descendants at level `m >= self.level`.
    pub fn descendant_range(&self, m: u32) -> std::ops::Range<usize> {
        let s = m - self.level;
        let base = (1usize << m) - 1;
        let lo = base + ((self.index as usize) << s);
        lo..lo + (1usize << s)
    }

    /// Interval of this grid and level containing the normalized angle `t`.
    pub fn containing(grid: GridId, level: u32, t: f64) -> Self {
        let n = 1u64 << level;
        let x = wrap(t - grid.offset()) * n as f64;
        let index = (x.floor() as u64).min(n - 1);
        DyadicInterval { grid, level, index }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.grid, self.level, self.index)
    }
}

/// Number of intervals with level at most `depth` in one grid.
pub fn cell_count(depth: u32) -> usize {
    (1usize << (depth + 1)) - 1
}

/// All intervals of one grid with level at most `depth`, level-major.
pub fn build_grid(grid: GridId, depth: u32) -> Result<Vec<DyadicInterval>> {
    if depth > MAX_DEPTH {
        return Err(LabError::DepthTooLarge {
            depth,
            max: MAX_DEPTH,
        });
    }
    Ok((0..cell_count(depth))
        .map(|f| DyadicInterval::from_flat(grid, f))
        .collect())
}
