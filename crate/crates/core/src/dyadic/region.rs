use num_complex::Complex64;

use super::interval::{circle_dist, turn_of, Arc, DyadicInterval};

const SLACK: f64 = 1e-13;

/// Carleson box over an arc: points with `1 - r <= length` and angle in the arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarlesonBox {
    pub arc: Arc,
}

/// Outer radial half of a Carleson box: `length/2 <= 1 - r <= length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopHalf {
    pub arc: Arc,
}

pub fn polar(z: Complex64) -> (f64, f64) {
    let r = z.norm();
    let t = if r == 0.0 { 0.0 } else { turn_of(z) };
    (r, t)
}

fn angular(arc: &Arc, t: f64) -> bool {
    arc.length >= 1.0 || circle_dist(t, arc.center()) <= arc.length / 2.0 + SLACK
}

impl CarlesonBox {
    pub fn of(i: &DyadicInterval) -> Self {
        CarlesonBox { arc: i.arc() }
    }

    pub fn contains_polar(&self, r: f64, t: f64) -> bool {
        1.0 - r <= self.arc.length + SLACK && angular(&self.arc, t)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let (r, t) = polar(z);
        self.contains_polar(r, t)
    }

    pub fn area(&self) -> f64 {
        box_area(self.arc.length)
    }
}

impl TopHalf {
    pub fn of(i: &DyadicInterval) -> Self {
        TopHalf { arc: i.arc() }
    }

    pub fn contains_polar(&self, r: f64, t: f64) -> bool {
        let h = 1.0 - r;
        let l = self.arc.length;
        h <= l + SLACK && h >= l / 2.0 - SLACK && angular(&self.arc, t)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let (r, t) = polar(z);
        self.contains_polar(r, t)
    }

    pub fn area(&self) -> f64 {
        top_area(self.arc.length)
    }
}

pub fn box_contains(i: &DyadicInterval, z: Complex64) -> bool {
    CarlesonBox::of(i).contains(z)
}

pub fn top_contains(i: &DyadicInterval, z: Complex64) -> bool {
    TopHalf::of(i).contains(z)
}

/// Normalized area of a Carleson box of arclength `l`.
pub fn box_area(l: f64) -> f64 {
    l * l * (2.0 - l)
}

/// Normalized area of a top half of arclength `l`.
pub fn top_area(l: f64) -> f64 {
    l * l * (1.0 - 0.75 * l)
}

/// Area of a box of arclength `l` after removing the collar `1 - r < delta`.
pub fn truncated_box_area(l: f64, delta: f64) -> f64 {
    let outer = 1.0 - delta;
    let inner = (1.0 - l).max(0.0);
    l * (outer * outer - inner * inner)
}
