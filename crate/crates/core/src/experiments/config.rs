use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::dyadic::interval::MAX_DEPTH;
use crate::dyadic::mesh::QuadOrder;
use crate::error::{parse_err, LabError, Result};
use crate::weights::{GrowthRule, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    B1ImpliesBp,
    RegularizationChain,
    CounterexamplePsi1,
    LowerBoundTrend,
    UniformDomainEquivalence,
    WeakType,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::B1ImpliesBp,
        Experiment::RegularizationChain,
        Experiment::CounterexamplePsi1,
        Experiment::LowerBoundTrend,
        Experiment::UniformDomainEquivalence,
        Experiment::WeakType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::B1ImpliesBp => "b1-implies-bp",
            Experiment::RegularizationChain => "regularization-chain",
            Experiment::CounterexamplePsi1 => "counterexample-psi1",
            Experiment::LowerBoundTrend => "lower-bound-trend",
            Experiment::UniformDomainEquivalence => "uniform-domain-equivalence",
            Experiment::WeakType => "weak-type",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::B1ImpliesBp => "B_1 reference weight turns B_p(v) into unweighted B_p",
            Experiment::RegularizationChain => "regularization, reverse Hoelder gain and the final chain",
            Experiment::CounterexamplePsi1 => "B_1 and B_2 profiles of |psi_1'|^2 for z/log z",
            Experiment::LowerBoundTrend => "norm lower estimates against [sigma]_{B_2}^{1/4} on power weights",
            Experiment::UniformDomainEquivalence => "disk characteristic D_p against B_p(Omega)",
            Experiment::WeakType => "mixed weak-type pipeline for the sparse operator",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| parse_err("experiment", s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSpec {
    /// Grid is `[1e-3, 1e3] * scale`.
    pub scale: f64,
    pub per_decade: usize,
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec {
            scale: 1.0,
            per_decade: 4,
        }
    }
}

/// One experiment run. Functions on the image domain are always given by their
/// pullback `sigma o psi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Map catalog name, e.g. `quadratic:0.25`.
    #[serde(default = "default_map")]
    pub map: String,
    /// Weight catalog name for `u = sigma o psi`.
    #[serde(default = "default_weight")]
    pub weight: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub p0: Option<f64>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Power-weight exponents for the lower-bound trend.
    #[serde(default)]
    pub alphas: Vec<f64>,
    pub depth_min: u32,
    pub depth_max: u32,
    /// Mesh depth for the discrete projector cross-check, when one is run.
    #[serde(default)]
    pub projector_depth: Option<u32>,
    #[serde(default)]
    pub order: QuadOrder,
    #[serde(default)]
    pub lambdas: LambdaSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub growth: GrowthRule,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_map() -> String {
    "identity".into()
}

fn default_weight() -> String {
    "const:1".into()
}

impl ExperimentConfig {
    /// Defaults sized for a laptop.
    pub fn preset(experiment: Experiment) -> Self {
        let mut c = ExperimentConfig {
            experiment,
            map: default_map(),
            weight: default_weight(),
            p: None,
            p0: None,
            s: None,
            q: None,
            theta: None,
            alphas: Vec::new(),
            depth_min: 4,
            depth_max: 8,
            projector_depth: None,
            order: QuadOrder::default(),
            lambdas: LambdaSpec::default(),
            seed: 0,
            growth: GrowthRule::default(),
            out: None,
        };
        match experiment {
            Experiment::B1ImpliesBp => {
                c.map = "quadratic:0.25".into();
                c.weight = "power:0.5".into();
                c.p = Some(2.0);
            }
            Experiment::RegularizationChain => {
                c.map = "quadratic:0.25".into();
                c.weight = "power:0.3".into();
                c.p0 = Some(1.5);
                c.theta = Some(0.25);
                c.depth_max = 7;
            }
            Experiment::CounterexamplePsi1 => {
                c.map = "log_example".into();
                c.depth_max = 10;
            }
            Experiment::LowerBoundTrend => {
                c.weight = "power:0.5".into();
                c.p = Some(2.0);
                c.alphas = vec![0.5, 0.8, 0.9, 0.95];
                c.depth_min = 0;
                c.depth_max = 16;
                c.projector_depth = Some(6);
            }
            Experiment::UniformDomainEquivalence => {
                c.map = "quadratic:0.25".into();
                c.weight = "power:0.5".into();
                c.p = Some(2.0);
                c.s = Some(2.0);
                c.depth_min = 5;
                c.depth_max = 8;
            }
            Experiment::WeakType => {
                c.map = "quadratic:0.25".into();
                c.weight = "power:0.25".into();
                c.depth_max = 7;
            }
        }
        c
    }

    pub fn parsed_map(&self) -> Result<ConformalMap> {
        let m: ConformalMap = self.map.parse()?;
        m.validate()?;
        Ok(m)
    }

    pub fn parsed_weight(&self) -> Result<Weight> {
        self.weight.parse()
    }

    /// `p` when the experiment needs it.
    pub fn p(&self) -> Result<f64> {
        self.p
            .ok_or_else(|| LabError::Constraint(format!("{} needs p", self.experiment)))
    }

    /// `q_0 = p_0 / (2 - p_0)` if `p0` is set, else `q`.
    pub fn q0(&self) -> Result<f64> {
        match (self.p0, self.q) {
            (Some(p0), _) => Ok(p0 / (2.0 - p0)),
            (None, Some(q)) => Ok(q),
            (None, None) => Err(LabError::Constraint(format!("{} needs p0 or q", self.experiment))),
        }
    }

    /// Check exponent and depth constraints, naming the one violated.
    pub fn validate(&self) -> Result<()> {
        if self.depth_min > self.depth_max {
            return Err(LabError::Constraint(format!(
                "depth_min {} exceeds depth_max {}",
                self.depth_min, self.depth_max
            )));
        }
        if self.depth_max > MAX_DEPTH {
            return Err(LabError::DepthTooLarge {
                depth: self.depth_max,
                max: MAX_DEPTH,
            });
        }
        if let Some(p) = self.p {
            if !(p > 1.0 && p.is_finite()) {
                return Err(LabError::Constraint(format!("p must satisfy 1 < p < inf, got {p}")));
            }
        }
        if let Some(p0) = self.p0 {
            if !(1.0..2.0).contains(&p0) {
                return Err(LabError::Constraint(format!("p0 must lie in [1, 2), got {p0}")));
            }
        }
        if let Some(theta) = self.theta {
            if !(theta >= 0.0 && theta < 0.5) {
                return Err(LabError::Constraint(format!("theta must satisfy 0 <= theta < 1/2, got {theta}")));
            }
        }
        if let Some(s) = self.s {
            if !(s > 1.0) {
                return Err(LabError::Constraint(format!("s must exceed 1, got {s}")));
            }
        }
        if let Some(q) = self.q {
            if !(q >= 1.0) {
                return Err(LabError::Constraint(format!("q must be at least 1, got {q}")));
            }
        }
        if !(self.lambdas.scale > 0.0) || self.lambdas.per_decade == 0 {
            return Err(LabError::Constraint("lambda grid needs a positive scale and per_decade".into()));
        }
        self.parsed_map()?;
        self.parsed_weight()?;
        match self.experiment {
            Experiment::B1ImpliesBp | Experiment::UniformDomainEquivalence => {
                self.p()?;
            }
            Experiment::RegularizationChain => {
                self.q0()?;
            }
            Experiment::LowerBoundTrend => {
                if self.p()? != 2.0 {
                    return Err(LabError::Constraint("lower-bound-trend is implemented for p = 2".into()));
                }
                if self.alphas.is_empty() {
                    return Err(LabError::Constraint("lower-bound-trend needs alphas".into()));
                }
                if let Some(a) = self.alphas.iter().find(|a| !(**a > -1.0 && **a < 1.0)) {
                    return Err(LabError::Constraint(format!("alpha must lie in (-1, 1) = (-1, p - 1), got {a}")));
                }
                if self.depth_max > 30 {
                    return Err(LabError::Constraint("lower-bound-trend uses n = 2^depth; depth_max <= 30".into()));
                }
            }
            Experiment::CounterexamplePsi1 | Experiment::WeakType => {}
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for e in Experiment::ALL {
            let c = ExperimentConfig::preset(e);
            c.validate().unwrap();
            let back: ExperimentConfig = serde_json::from_str(&c.to_json().unwrap()).unwrap();
            assert_eq!(back, c);
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }

    #[test]
    fn violations_are_named() {
        let mut c = ExperimentConfig::preset(Experiment::RegularizationChain);
        c.theta = Some(0.5);
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("theta"), "{msg}");
        let mut c = ExperimentConfig::preset(Experiment::RegularizationChain);
        c.p0 = Some(2.0);
        assert!(c.validate().unwrap_err().to_string().contains("p0"));
        let mut c = ExperimentConfig::preset(Experiment::B1ImpliesBp);
        c.p = Some(1.0);
        assert!(c.validate().unwrap_err().to_string().contains("1 < p"));
    }

    #[test]
    fn minimal_json_takes_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "weak-type", "depth_min": 3, "depth_max": 5}"#).unwrap();
        assert_eq!(c.map, "identity");
        assert_eq!(c.order, QuadOrder::default());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment": "weak-type", "depth_min": 3, "depth_max": 5, "bogus": 1}"#).is_err());
    }
}
