//! Exact exponent bookkeeping over the extended rationals.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{LabError, Result};

/// A nonnegative rational or `+infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ext {
    Fin(Rational64),
    Inf,
}

impl Ext {
    pub fn int(n: i64) -> Self {
        Ext::Fin(Rational64::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Ext::Fin(Rational64::new(n, d))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Fin(r) => *r.numer() as f64 / *r.denom() as f64,
            Ext::Inf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<Rational64> {
        match self {
            Ext::Fin(r) => Some(r),
            Ext::Inf => None,
        }
    }

    /// Hoelder conjugate `p / (p - 1)`, with `1' = inf` and `inf' = 1`.
    pub fn conj(self) -> Result<Self> {
        match self {
            Ext::Inf => Ok(Ext::int(1)),
            Ext::Fin(p) if p == Rational64::one() => Ok(Ext::Inf),
            Ext::Fin(p) if p > Rational64::one() => Ok(Ext::Fin(p / (p - Rational64::one()))),
            Ext::Fin(p) => Err(LabError::Constraint(format!(
                "conjugate exponent needs p >= 1, got {p}"
            ))),
        }
    }

    /// Multiply by a positive rational.
    pub fn scale(self, c: Rational64) -> Result<Self> {
        if c <= Rational64::zero() {
            return Err(LabError::Constraint(format!("scale factor must be positive, got {c}")));
        }
        Ok(match self {
            Ext::Fin(p) => Ext::Fin(p * c),
            Ext::Inf => Ext::Inf,
        })
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(r) => write!(f, "{r}"),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// `q_0 = p_0 / (2 - p_0)` for `1 <= p_0 < 2`.
pub fn q0(p0: Rational64) -> Result<Rational64> {
    if p0 < r(1) || p0 >= r(2) {
        return Err(LabError::Constraint(format!("p0 must lie in [1, 2), got {p0}")));
    }
    Ok(p0 / (r(2) - p0))
}

/// Exponents attached to a pair `(p_0, p)` with `p_0 < p < p_0'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bookkeeping {
    pub p0: Rational64,
    pub p: Rational64,
    pub q0: Rational64,
    pub q1: Rational64,
    pub q2: Rational64,
    pub theta1: Rational64,
    pub theta2: Rational64,
    /// `((1 - theta_j) q_j')'` for `j = 1, 2`.
    pub recovered: [Ext; 2],
}

impl Bookkeeping {
    pub fn new(p0: Rational64, p: Rational64) -> Result<Self> {
        let q0 = q0(p0)?;
        let p0c = Ext::Fin(p0).conj()?;
        if p <= p0 {
            return Err(LabError::Constraint(format!("need p > p0 = {p0}, got {p}")));
        }
        let q1 = match p0c {
            Ext::Inf => r(1),
            Ext::Fin(c) => {
                if p >= c {
                    return Err(LabError::Constraint(format!(
                        "need p < p0' = {c}, got {p}"
                    )));
                }
                c / (c - p)
            }
        };
        let q2 = (p - r(1)) / (p / p0 - r(1));
        let theta1 = r(1) - p / r(2);
        let theta2 = -(r(1) - p / r(2)) / (p - r(1));
        let rec = |q: Rational64, th: Rational64| -> Result<Ext> {
            Ext::Fin(q).conj()?.scale(r(1) - th)?.conj()
        };
        Ok(Bookkeeping {
            p0,
            p,
            q0,
            q1,
            q2,
            theta1,
            theta2,
            recovered: [rec(q1, theta1)?, rec(q2, theta2)?],
        })
    }

    /// True when both recovered exponents equal `q_0` exactly.
    pub fn consistent(&self) -> bool {
        self.recovered.iter().all(|e| *e == Ext::Fin(self.q0))
    }

    /// Both thetas stay below one half.
    pub fn thetas_admissible(&self) -> bool {
        let half = Rational64::new(1, 2);
        self.theta1 < half && self.theta2 < half
    }
}

/// Smallest `r` admissible for a given `(q, theta)`: `((1 - theta) q')'`.
pub fn r_min(q: f64, theta: f64) -> f64 {
    let qc = if q == 1.0 { f64::INFINITY } else { q / (q - 1.0) };
    let e = (1.0 - theta) * qc;
    if e.is_infinite() {
        1.0
    } else {
        e / (e - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let b = Bookkeeping::new(Rational64::new(3, 2), r(2)).unwrap();
        assert_eq!(b.q0, r(3));
        assert_eq!(b.q1, r(3));
        assert_eq!(b.q2, r(3));
        assert_eq!(b.theta1, r(0));
        assert!(b.consistent());
    }

    #[test]
    fn endpoint_p0_one() {
        let b = Bookkeeping::new(r(1), Rational64::new(7, 3)).unwrap();
        assert_eq!(b.q0, r(1));
        assert_eq!(b.q1, r(1));
        assert_eq!(b.recovered[0], Ext::int(1));
        assert!(b.consistent());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Bookkeeping::new(Rational64::new(3, 2), r(3)).is_err());
        assert!(Bookkeeping::new(Rational64::new(3, 2), Rational64::new(5, 4)).is_err());
        assert!(q0(r(2)).is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(Ext::int(1).conj().unwrap(), Ext::Inf);
        assert_eq!(Ext::Inf.conj().unwrap(), Ext::int(1));
        assert_eq!(Ext::int(3).conj().unwrap(), Ext::ratio(3, 2));
        assert!((r_min(3.0, 0.0) - 3.0).abs() < 1e-12);
    }
}
