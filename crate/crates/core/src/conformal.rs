//! Conformal maps of the disk with closed-form derivatives.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dyadic::interval::{turn_of, wrap, Arc, DyadicInterval};
use crate::dyadic::mesh::DiskMesh;
use crate::dyadic::region::CarlesonBox;
use crate::error::{parse_err, LabError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ConformalMap {
    Identity,
    /// `z -> e^{i angle} z`, angle in radians.
    Rotation(f64),
    /// `z -> (a - z) / (1 - conj(a) z)`.
    Moebius(Complex64),
    /// `z -> z + c z^2`, univalent for `|c| < 1/2`.
    Quadratic(Complex64),
    /// `z -> f((z + 1) / 4)` with `f(w) = w / log w`.
    LogExample,
    Compose(Box<ConformalMap>, Box<ConformalMap>),
}

impl ConformalMap {
    pub fn compose(outer: ConformalMap, inner: ConformalMap) -> Self {
        ConformalMap::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConformalMap::Moebius(a) if a.norm() >= 1.0 => Err(LabError::InvalidParameter(
                format!("moebius parameter must lie in the disk, got {a}"),
            )),
            ConformalMap::Quadratic(c) if c.norm() >= 0.5 => Err(LabError::InvalidParameter(
                format!("quadratic coefficient must satisfy |c| < 1/2, got {c}"),
            )),
            ConformalMap::Compose(o, i) => {
                o.validate()?;
                i.validate()
            }
            _ => Ok(()),
        }
    }

    /// Map value and derivative at `z`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match self {
            ConformalMap::Identity => (z, one),
            ConformalMap::Rotation(th) => {
                let e = Complex64::from_polar(1.0, *th);
                (e * z, e)
            }
            ConformalMap::Moebius(a) => {
                let d = one - a.conj() * z;
                ((a - z) / d, (a.norm_sqr() - 1.0) / (d * d))
            }
            ConformalMap::Quadratic(c) => (z + c * z * z, one + 2.0 * c * z),
            ConformalMap::LogExample => {
                let w = (z + 1.0) / 4.0;
                let l = w.ln();
                (w / l, (l - 1.0) / (l * l) / 4.0)
            }
            ConformalMap::Compose(o, i) => {
                let (w, di) = i.eval(z);
                let (v, dout) = o.eval(w);
                (v, dout * di)
            }
        }
    }

    pub fn map(&self, z: Complex64) -> Complex64 {
        self.eval(z).0
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.eval(z).1
    }

    /// Radial approach point for depth `d`: `rho = 1 - 2^{-d-2}`.
    pub fn trace_radius(depth: u32) -> f64 {
        1.0 - (-(depth as f64) - 2.0).exp2()
    }

    /// Image of `rho e^{i theta}` with `rho` tied to `depth`.
    pub fn boundary_trace(&self, theta: f64, depth: u32) -> Complex64 {
        self.map(Complex64::from_polar(Self::trace_radius(depth), theta))
    }

    /// Largest ratio of `|psi'|` over one top-half cell, maximized over cells.
    pub fn koebe_ratio(&self, mesh: &DiskMesh) -> f64 {
        (0..mesh.cell_count())
            .map(|c| {
                let (lo, hi) = mesh
                    .cell_nodes(c)
                    .iter()
                    .map(|n| self.deriv(n.z).norm())
                    .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
                hi / lo
            })
            .fold(1.0, f64::max)
    }
}

impl fmt::Display for ConformalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalMap::Identity => write!(f, "identity"),
            ConformalMap::Rotation(t) => write!(f, "rotation:{t}"),
            ConformalMap::Moebius(a) => write!(f, "moebius:{}", fmt_complex(*a)),
            ConformalMap::Quadratic(c) => write!(f, "quadratic:{}", fmt_complex(*c)),
            ConformalMap::LogExample => write!(f, "log_example"),
            ConformalMap::Compose(o, i) => write!(f, "compose({o},{i})"),
        }
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parse `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || parse_err("complex number", &s);
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| err());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| err())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| err())?, im))
}

impl FromStr for ConformalMap {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("compose(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0i32;
            let mut cut = None;
            for (k, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        cut = Some(k);
                        break;
                    }
                    _ => {}
                }
            }
            let k = cut.ok_or_else(|| parse_err("composition", s))?;
            return Ok(ConformalMap::compose(inner[..k].parse()?, inner[k + 1..].parse()?));
        }
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let map = match (head, arg) {
            ("identity", None) => ConformalMap::Identity,
            ("log_example", None) => ConformalMap::LogExample,
            ("rotation", Some(a)) => {
                ConformalMap::Rotation(a.trim().parse().map_err(|_| parse_err("angle", a))?)
            }
            ("moebius", Some(a)) => ConformalMap::Moebius(parse_complex(a)?),
            ("quadratic", Some(a)) => ConformalMap::Quadratic(parse_complex(a)?),
            _ => return Err(parse_err("conformal map", s)),
        };
        map.validate()?;
        Ok(map)
    }
}

/// Arcs `K`, `J` with `Q_K` inside and `Q_J` around the image of `Q_I` under
/// the disk automorphism `z -> (a - z) / (1 - conj(a) z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub inner: Arc,
    pub outer: Arc,
    pub ratio: f64,
}

fn box_boundary(arc: &Arc, per_side: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(4 * per_side + 4);
    let l = arc.length;
    let r_in = (1.0 - l).max(0.0);
    for k in 0..=per_side {
        let s = k as f64 / per_side as f64;
        let t = arc.start + s * l;
        pts.push(Complex64::from_polar(1.0, TAU * t));
        pts.push(Complex64::from_polar(r_in, TAU * t));
        let r = r_in + s * (1.0 - r_in);
        pts.push(Complex64::from_polar(r, TAU * arc.start));
        pts.push(Complex64::from_polar(r, TAU * (arc.start + l)));
    }
    pts
}

/// Smallest arc containing all the given angles (largest-gap complement).
fn angular_hull(ts: &mut [f64]) -> Arc {
    ts.sort_by(f64::total_cmp);
    let n = ts.len();
    let mut gap = 1.0 - ts[n - 1] + ts[0];
    let mut start = ts[0];
    for k in 1..n {
        let g = ts[k] - ts[k - 1];
        if g > gap {
            gap = g;
            start = ts[k];
        }
    }
    Arc {
        start: wrap(start),
        length: (1.0 - gap).max(1e-300),
    }
}

pub fn automorphism_sandwich(i: &DyadicInterval, a: Complex64) -> Result<Sandwich> {
    if a.norm() >= 1.0 {
        return Err(LabError::InvalidParameter(format!(
            "automorphism parameter must lie in the disk, got {a}"
        )));
    }
    let tau = ConformalMap::Moebius(a);
    let arc = i.arc();
    let per_side = 200;
    let img: Vec<Complex64> = box_boundary(&arc, per_side)
        .into_iter()
        .map(|z| tau.map(z))
        .collect();
    let depth = img.iter().map(|w| 1.0 - w.norm()).fold(0.0, f64::max);
    let mut ts: Vec<f64> = img
        .iter()
        .filter(|w| w.norm() > 1e-12)
        .map(|w| turn_of(*w))
        .collect();
    let hull = angular_hull(&mut ts);
    let outer = if depth >= 1.0 - 1e-12 || hull.length >= 1.0 - 1e-9 {
        Arc::whole()
    } else {
        let len = hull.length.max(depth).min(1.0);
        Arc::centered(hull.center(), len)?
    };

    let q = CarlesonBox::of(i);
    let inside = |k: &Arc| {
        box_boundary(k, 64).into_iter().all(|z| {
            let w = tau.map(z);
            let r = w.norm();
            let t = if r == 0.0 { 0.0 } else { turn_of(w) };
            q.contains_polar(r, t)
        })
    };
    let mut image_arc: Vec<f64> = (0..=per_side)
        .map(|k| turn_of(tau.map(Complex64::from_polar(1.0, TAU * (arc.start + arc.length * k as f64 / per_side as f64)))))
        .collect();
    let top = angular_hull(&mut image_arc);
    let centers = [
        turn_of(tau.map(Complex64::from_polar(1.0, TAU * arc.center()))),
        top.center(),
    ];
    let mut inner = Arc {
        start: centers[0],
        length: 0.0,
    };
    for &c in &centers {
        let hi_len = if arc.length >= 1.0 { 1.0 } else { top.length.min(1.0) };
        let make = |l: f64| Arc {
            start: wrap(c - l / 2.0),
            length: l,
        };
        let found = if inside(&make(hi_len)) {
            hi_len
        } else {
            let (mut lo, mut hi) = (0.0, hi_len);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if inside(&make(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if found > inner.length {
            inner = make(found);
        }
    }
    Ok(Sandwich {
        inner,
        outer,
        ratio: inner.length / outer.length,
    })
}

/// Smallest `|psi(a) - psi(b)| / |a - b|` over pairs of points; zero signals a fold.
pub fn min_image_separation(map: &ConformalMap, pts: &[Complex64]) -> f64 {
    let imgs: Vec<Complex64> = pts.iter().map(|z| map.map(*z)).collect();
    let mut best = f64::INFINITY;
    for a in 0..imgs.len() {
        for b in a + 1..imgs.len() {
            let dz = (pts[a] - pts[b]).norm();
            if dz > 0.0 {
                best = best.min((imgs[a] - imgs[b]).norm() / dz);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::interval::GridId;

    #[test]
    fn closed_forms() {
        let z = Complex64::new(0.3, 0.1);
        assert_eq!(ConformalMap::Identity.eval(z), (z, Complex64::new(1.0, 0.0)));
        let (w, d) = ConformalMap::Moebius(Complex64::new(0.0, 0.0)).eval(z);
        assert!((w + z).norm() < 1e-15 && (d + 1.0).norm() < 1e-15);
        let q = ConformalMap::Quadratic(Complex64::new(0.25, 0.0));
        assert_eq!(q.deriv(Complex64::new(0.0, 0.0)).norm_sqr(), 1.0);
    }

    #[test]
    fn log_example_degenerates_at_minus_one() {
        let m = ConformalMap::LogExample;
        let mut prev = f64::INFINITY;
        for k in 2..12 {
            let z = Complex64::new(-1.0 + (-(k as f64)).exp2(), 0.0);
            let d = m.deriv(z).norm();
            assert!(d < prev);
            prev = d;
        }
        assert!(m.boundary_trace(std::f64::consts::PI, 20).norm() < 1e-6);
    }

    #[test]
    fn names_round_trip() {
        for s in [
            "identity",
            "rotation:0.5",
            "moebius:0.5",
            "moebius:0.25-0.5i",
            "quadratic:0.25",
            "log_example",
            "compose(moebius:0.5+0.1i,quadratic:0.2)",
        ] {
            let m: ConformalMap = s.parse().unwrap();
            assert_eq!(m.to_string().parse::<ConformalMap>().unwrap(), m);
        }
        assert!("quadratic:0.6".parse::<ConformalMap>().is_err());
        assert_eq!(parse_complex("0.5+0i").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("1e-3-1e-2i").unwrap(), Complex64::new(1e-3, -1e-2));
    }

    #[test]
    fn sandwich_for_rigid_automorphism() {
        let i = DyadicInterval::new(GridId::G1, 2, 1).unwrap();
        let s = automorphism_sandwich(&i, Complex64::new(0.0, 0.0)).unwrap();
        assert!((s.ratio - 1.0).abs() < 1e-9, "{s:?}");
        let w = automorphism_sandwich(&DyadicInterval::root(GridId::G1), Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(w.outer.length, 1.0);
    }
}
