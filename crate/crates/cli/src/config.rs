//! Run configuration: a TOML document with one section per pipeline stage.
//!
//! ```toml
//! [scenario]
//! class = "transport"
//! id = "transport_global"
//! k = 0.5
//! lambda = { kind = "constant", value = 1.0 }
//! assumption = { kind = "bounded", lambda0 = 1.0 }
//! d = 0.0
//! rho0 = { kind = "bump", center = 0.4, radius = 0.3, height = 1.0 }
//!
//! [grid]
//! n = 200
//!
//! [solver]
//! t_end = 3.0
//! cfl_sigma = 0.8
//! ```
//!
//! Sections `glf`, `certify` and `output` are optional. Space-time fields
//! accept a bare number (a constant) or `{ profile = …, signal = … }`; time
//! signals accept a number, one piece table or an array of pieces.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// A configuration problem, anchored to a source line when one is known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(line), Some(key)) => write!(f, "line {line} ({key}): {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(key)) => write!(f, "{key}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: Some(key.into()),
            message: message.into(),
        }
    }

    /// Fill in the line of `key` (a dotted path such as `scenario.k`) in `source`.
    pub fn anchored(mut self, source: &str) -> Self {
        if self.line.is_none() {
            if let Some(key) = &self.key {
                self.line = locate(source, key);
            }
        }
        self
    }
}

/// 1-based line of `section.key = …` in a TOML source, falling back to the
/// section header.
pub fn locate(source: &str, path: &str) -> Option<usize> {
    let (section, key) = path.split_once('.').unwrap_or((path, ""));
    let key = key.split('.').next().unwrap_or("");
    let mut in_section = false;
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            let name = line.trim_matches(|c| c == '[' || c == ']').trim();
            in_section = name == section || name.starts_with(&format!("{section}."));
            if name == section {
                header = Some(i + 1);
            }
            continue;
        }
        if in_section && !key.is_empty() {
            if let Some((lhs, _)) = line.split_once('=') {
                if lhs.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub grid: GridSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub glf: GlfSection,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    /// Parse TOML text. Syntax and type errors carry the line of the offending item.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        toml::from_str(source).map_err(|e| {
            let mut line = e
                .span()
                .map(|s| source[..s.start.min(source.len())].lines().count().max(1));
            // Tagged sections lose inner spans; find the offending key below the reported line.
            if let Some(name) = unknown_field(e.message()) {
                let from = line.unwrap_or(1);
                if let Some(i) = source.lines().skip(from - 1).position(|l| {
                    l.trim_start()
                        .strip_prefix(name)
                        .is_some_and(|rest| rest.trim_start().starts_with('='))
                }) {
                    line = Some(from + i);
                }
            }
            ConfigError {
                line,
                key: None,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn from_path(path: &Path) -> Result<(Self, String), ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            key: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Ok((Self::parse(&source)?, source))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    pub fn id(&self) -> &str {
        match &self.scenario {
            ScenarioSpec::Parabolic(s) => &s.id,
            ScenarioSpec::Transport(s) => &s.id,
            ScenarioSpec::Wave(s) => &s.id,
        }
    }
}

fn unknown_field(message: &str) -> Option<&str> {
    let rest = message.split_once("unknown field `")?.1;
    Some(rest.split_once('`')?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum ScenarioSpec {
    Parabolic(ParabolicSpec),
    Transport(TransportSpec),
    Wave(WaveSpec),
}

fn one() -> FieldSpec {
    FieldSpec::Value(1.0)
}

fn zero_field() -> FieldSpec {
    FieldSpec::Value(0.0)
}

fn identity() -> MonoSpec {
    MonoSpec::Identity
}

fn default_ends() -> [EdgeName; 2] {
    [EdgeName::Dirichlet, EdgeName::Robin]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default = "one")]
    pub a: FieldSpec,
    #[serde(default = "one")]
    pub c: FieldSpec,
    pub a0: f64,
    pub c0: f64,
    #[serde(default = "identity")]
    pub phi: MonoSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<HSpec>,
    #[serde(default = "identity")]
    pub varphi: MonoSpec,
    #[serde(default = "zero_field")]
    pub f: FieldSpec,
    #[serde(default = "zero_field")]
    pub d1: FieldSpec,
    #[serde(default = "zero_field")]
    pub d2: FieldSpec,
    pub w0: ProfileSpec,
    /// Labels of `y = 0` and `y = 1` on the interval.
    #[serde(default = "default_ends")]
    pub ends: [EdgeName; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub lambda: SpeedSpec,
    pub assumption: AssumptionSpec,
    pub k: f64,
    #[serde(default = "zero_signal")]
    pub d: SignalSpec,
    pub rho0: ProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Wave speed; the damping gain is `1/c`.
    pub c: f64,
    #[serde(default = "zero_field")]
    pub f: FieldSpec,
    #[serde(default = "zero_signal")]
    pub d: SignalSpec,
    #[serde(default = "zero_profile")]
    pub w0: ProfileSpec,
    pub phi0: ProfileSpec,
}

fn zero_signal() -> SignalSpec {
    SignalSpec::Value(0.0)
}

fn zero_profile() -> ProfileSpec {
    ProfileSpec::Zero
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeName {
    Dirichlet,
    Robin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Zero,
    Constant {
        value: f64,
    },
    Linear {
        slope: f64,
        intercept: f64,
    },
    Sine {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        offset: f64,
    },
    Bump {
        center: f64,
        radius: f64,
        height: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PieceSpec {
    Constant {
        #[serde(default)]
        start: f64,
        value: f64,
    },
    Sinusoid {
        #[serde(default)]
        start: f64,
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    ExpDecay {
        #[serde(default)]
        start: f64,
        amplitude: f64,
        rate: f64,
    },
    Polynomial {
        #[serde(default)]
        start: f64,
        coeffs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignalSpec {
    Value(f64),
    Piece(PieceSpec),
    Pieces(Vec<PieceSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Value(f64),
    Separable {
        #[serde(default = "unit_profile")]
        profile: ProfileSpec,
        #[serde(default = "unit_signal")]
        signal: SignalSpec,
    },
}

fn unit_profile() -> ProfileSpec {
    ProfileSpec::Constant { value: 1.0 }
}

fn unit_signal() -> SignalSpec {
    SignalSpec::Value(1.0)
}

/// Odd increasing nonlinearities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MonoSpec {
    Identity,
    /// `slope · v`.
    Linear {
        slope: f64,
    },
    /// `v + coef · v³`.
    Cubic {
        coef: f64,
    },
    /// `v + coef · sign(v) |v|^exponent`.
    OddPower {
        coef: f64,
        exponent: f64,
    },
}

/// Absorbing term `h(y, t, w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HSpec {
    /// `coef · w`.
    Linear { coef: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpeedSpec {
    Constant {
        value: f64,
    },
    /// `1 / (1 + scale·|s|)`.
    Reciprocal {
        scale: f64,
    },
    /// `floor + amplitude / (1 + s²)`.
    Floored {
        floor: f64,
        amplitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssumptionSpec {
    Bounded {
        lambda0: f64,
    },
    /// Decreasing speed map; `r0` is the radius of the local estimate.
    Decreasing {
        r0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutName {
    Node,
    Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgesSpec {
    pub left: EdgeName,
    pub right: EdgeName,
    pub bottom: EdgeName,
    pub top: EdgeName,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<EdgesSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_stride: Option<usize>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlfSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Rate parameter of the `m`-form wave estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Fill unset parameters with class defaults.
    #[serde(default = "yes")]
    pub auto: bool,
}

impl Default for GlfSection {
    fn default() -> Self {
        Self {
            p: None,
            r: None,
            eps: None,
            m: None,
            auto: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    ParabolicQ,
    HeatClm,
    TransportP,
    TransportQ,
    TransportLiss,
    WaveREps,
    WaveM,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    /// Norm exponents; `inf` selects the max norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Young split of the quadratic heat estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat_eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Trajectory,
    Glf,
    Check,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.as_ref().is_none_or(|v| v.contains(&f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
class = "wave"
id = "w"
c = 2.0
phi0 = { kind = "bump", center = 0.5, radius = 0.2, height = 1.0 }

[grid]
n = 64

[solver]
t_end = 1.0
"#;

    #[test]
    fn minimal_wave_parses_with_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        let ScenarioSpec::Wave(w) = &cfg.scenario else {
            panic!("expected a wave scenario")
        };
        assert_eq!(w.d, SignalSpec::Value(0.0));
        assert_eq!(w.w0, ProfileSpec::Zero);
        assert!(cfg.glf.auto);
        assert_eq!(cfg.id(), "w");
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = RunConfig::parse(MINIMAL).unwrap();
        cfg.certify.q = Some(vec![2.0, f64::INFINITY]);
        if let ScenarioSpec::Wave(w) = &mut cfg.scenario {
            w.d = SignalSpec::Pieces(vec![
                PieceSpec::Constant { start: 0.0, value: 0.1 },
                PieceSpec::Sinusoid {
                    start: 1.0,
                    offset: 0.0,
                    amplitude: 0.2,
                    frequency: 1.0,
                    phase: 0.0,
                },
            ]);
            w.f = FieldSpec::Separable {
                profile: ProfileSpec::Sine {
                    amplitude: 1.0,
                    wavenumber: 2.0,
                    offset: 0.0,
                },
                signal: SignalSpec::Value(0.5),
            };
        }
        let text = cfg.to_toml();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn type_errors_are_line_anchored() {
        let bad = MINIMAL.replace("n = 64", "n = \"many\"");
        let err = RunConfig::parse(&bad).unwrap_err();
        assert_eq!(err.line, Some(9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("c = 2.0", "c = 2.0\nspeed = 3.0");
        let err = RunConfig::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("speed"), "{err}");
        assert_eq!(err.line, Some(6));
    }

    #[test]
    fn locate_finds_keys_and_headers() {
        assert_eq!(locate(MINIMAL, "scenario.c"), Some(5));
        assert_eq!(locate(MINIMAL, "solver.t_end"), Some(12));
        assert_eq!(locate(MINIMAL, "solver.dt"), Some(11));
        assert_eq!(locate(MINIMAL, "glf.p"), None);
    }
}
