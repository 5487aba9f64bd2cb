use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::conformal::ConformalMap;
use crate::dyadic::interval::{turn_of, GridId};
use crate::dyadic::mesh::{DiskMesh, QuadOrder};
use crate::error::{parse_err, LabError, Result};

/// Cell values of a regularized weight on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Regularized {
    pub source: Weight,
    pub reference: Weight,
    pub grid: GridId,
    pub depth: u32,
    pub values: Vec<f64>,
}

impl Regularized {
    pub fn value_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let t = if r == 0.0 { 0.0 } else { turn_of(z) };
        self.values[DiskMesh::locate(self.grid, self.depth, r, t)]
    }
}

/// A positive weight on the disk, evaluable at interior points.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Constant(f64),
    /// `(1 - |z|)^alpha`.
    Power(f64),
    /// `|psi'(z)|^exponent`.
    ConformalDeriv { map: ConformalMap, exponent: f64 },
    Regularized(Arc<Regularized>),
    Product(Vec<Weight>),
    PowerOf(Box<Weight>, f64),
}

impl Weight {
    pub fn one() -> Self {
        Weight::Constant(1.0)
    }

    pub fn derivsq(map: ConformalMap) -> Self {
        Weight::ConformalDeriv { map, exponent: 2.0 }
    }

    pub fn pow(self, e: f64) -> Self {
        if e == 1.0 {
            return self;
        }
        match self {
            Weight::Constant(c) => Weight::Constant(c.powf(e)),
            Weight::Power(a) => Weight::Power(a * e),
            Weight::ConformalDeriv { map, exponent } => Weight::ConformalDeriv {
                map,
                exponent: exponent * e,
            },
            Weight::PowerOf(w, f) => Weight::PowerOf(w, f * e),
            w => Weight::PowerOf(Box::new(w), e),
        }
    }

    pub fn times(self, other: Weight) -> Self {
        match (self, other) {
            (Weight::Constant(a), w) | (w, Weight::Constant(a)) if a == 1.0 => w,
            (Weight::Product(mut a), Weight::Product(b)) => {
                a.extend(b);
                Weight::Product(a)
            }
            (Weight::Product(mut a), w) => {
                a.push(w);
                Weight::Product(a)
            }
            (w, Weight::Product(mut b)) => {
                b.insert(0, w);
                Weight::Product(b)
            }
            (a, b) => Weight::Product(vec![a, b]),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Weight::Constant(_) => true,
            Weight::Power(a) => *a == 0.0,
            Weight::ConformalDeriv { map, exponent } => {
                *exponent == 0.0
                    || matches!(map, ConformalMap::Identity | ConformalMap::Rotation(_))
            }
            Weight::Regularized(r) => r.values.windows(2).all(|w| w[0] == w[1]),
            Weight::Product(ws) => ws.iter().all(Weight::is_constant),
            Weight::PowerOf(w, _) => w.is_constant(),
        }
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::Power(a) => (1.0 - z.norm()).powf(*a),
            Weight::ConformalDeriv { map, exponent } => {
                let d = map.deriv(z).norm();
                if *exponent == 2.0 {
                    d * d
                } else {
                    d.powf(*exponent)
                }
            }
            Weight::Regularized(r) => r.value_at(z),
            Weight::Product(ws) => ws.iter().map(|w| w.eval(z)).product(),
            Weight::PowerOf(w, e) => w.eval(z).powf(*e),
        }
    }

    /// Node values on a mesh; every value must be positive and finite.
    pub fn sample(&self, mesh: &DiskMesh) -> Result<Vec<f64>> {
        let vals = mesh.sample(|z| self.eval(z))?;
        if let Some((k, v)) = vals.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(LabError::Constraint(format!(
                "weight {self} is not positive at node {k} (value {v})"
            )));
        }
        Ok(vals)
    }

    /// Regularize against `reference` on `grid` at `depth`.
    pub fn regularized(&self, reference: &Weight, grid: GridId, depth: u32, order: QuadOrder) -> Result<Weight> {
        super::regularize::regularize(self, reference, grid, depth, order)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Constant(c) => write!(f, "const:{c}"),
            Weight::Power(a) => write!(f, "power:{a}"),
            Weight::ConformalDeriv { map, exponent } if *exponent == 2.0 => {
                write!(f, "derivsq:{map}")
            }
            Weight::ConformalDeriv { map, exponent } => write!(f, "deriv:{exponent}:{map}"),
            Weight::Regularized(r) => {
                if r.reference == Weight::one() {
                    write!(f, "reg:{}@{}:{}", r.source, r.grid, r.depth)
                } else {
                    write!(f, "reg:{}|{}@{}:{}", r.source, r.reference, r.grid, r.depth)
                }
            }
            Weight::Product(ws) => {
                write!(f, "prod(")?;
                for (k, w) in ws.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, ")")
            }
            Weight::PowerOf(w, e) => write!(f, "pow({w},{e})"),
        }
    }
}

/// Split on commas at parenthesis depth zero.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[last..k]);
                last = k + 1;
            }
            _ => {}
        }
    }
    out.push(&s[last..]);
    out
}

fn num(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| parse_err("number", s))
}

impl FromStr for Weight {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("prod(").and_then(|b| b.strip_suffix(')')) {
            let parts = split_top(body);
            return parts
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<Weight>>>()
                .map(Weight::Product);
        }
        if let Some(body) = s.strip_prefix("pow(").and_then(|b| b.strip_suffix(')')) {
            let parts = split_top(body);
            if parts.len() != 2 {
                return Err(parse_err("weight power", s));
            }
            return Ok(Weight::PowerOf(Box::new(parts[0].parse()?), num(parts[1])?));
        }
        if let Some(body) = s.strip_prefix("reg:") {
            let (inner, tail) = body.rsplit_once('@').ok_or_else(|| parse_err("regularized weight", s))?;
            let (g, d) = tail.split_once(':').ok_or_else(|| parse_err("regularized weight", s))?;
            let grid: GridId = g.parse()?;
            let depth: u32 = d.trim().parse().map_err(|_| parse_err("depth", d))?;
            let (u, v) = match inner.split_once('|') {
                Some((u, v)) => (u.parse::<Weight>()?, v.parse::<Weight>()?),
                None => (inner.parse::<Weight>()?, Weight::one()),
            };
            return u.regularized(&v, grid, depth, QuadOrder::default());
        }
        let (head, arg) = s.split_once(':').ok_or_else(|| parse_err("weight", s))?;
        match head {
            "const" => {
                let c = num(arg)?;
                if c <= 0.0 {
                    return Err(LabError::InvalidParameter(format!("constant weight must be positive, got {c}")));
                }
                Ok(Weight::Constant(c))
            }
            "power" => Ok(Weight::Power(num(arg)?)),
            "derivsq" => Ok(Weight::derivsq(arg.parse()?)),
            "deriv" => {
                let (e, m) = arg.split_once(':').ok_or_else(|| parse_err("derivative weight", s))?;
                Ok(Weight::ConformalDeriv {
                    map: m.parse()?,
                    exponent: num(e)?,
                })
            }
            _ => Err(parse_err("weight", s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names_round_trip() {
        for s in [
            "const:2",
            "power:0.5",
            "power:-0.25",
            "derivsq:log_example",
            "deriv:1:quadratic:0.25",
            "prod(power:0.5,derivsq:moebius:0.5)",
            "pow(derivsq:quadratic:0.2,-0.5)",
        ] {
            let w: Weight = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
    }

    #[test]
    fn derivative_weights_of_rigid_maps_are_one() {
        let z = Complex64::new(0.4, -0.3);
        assert_eq!(Weight::derivsq(ConformalMap::Identity).eval(z), 1.0);
        let r = Weight::derivsq(ConformalMap::Rotation(0.7)).eval(z);
        assert!((r - 1.0).abs() < 1e-15);
        let q = Weight::derivsq(ConformalMap::Quadratic(Complex64::new(0.25, 0.0)));
        assert_eq!(q.eval(Complex64::new(0.0, 0.0)), 1.0);
    }

    #[test]
    fn regularized_name_parses() {
        let w: Weight = "reg:power:0.5@G1:4".parse().unwrap();
        assert_eq!(w.to_string(), "reg:power:0.5@G1:4");
        assert!(matches!(w, Weight::Regularized(_)));
    }
}
