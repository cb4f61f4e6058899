use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::PotentialMode;
use crate::geometry::Point3;
use crate::imaging::{IndicatorParams, Method, DEFAULT_EXCLUSION_RADIUS};
use crate::model::{ForwardKind, MediumSpec, PatchSpec, SamplingMesh, ScenarioId, TimeGrid};
use crate::postprocess::DEFAULT_ORDER;

/// Which of the three comparison media surrounds the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediumCase {
    Homogeneous,
    CaseIi,
    CaseIii,
}

impl MediumCase {
    pub const ALL: [MediumCase; 3] = [MediumCase::Homogeneous, MediumCase::CaseIi, MediumCase::CaseIii];

    pub fn as_str(self) -> &'static str {
        match self {
            MediumCase::Homogeneous => "homogeneous",
            MediumCase::CaseIi => "case-ii",
            MediumCase::CaseIii => "case-iii",
        }
    }

    pub fn spec(self, c0: f64, inclusion_speed: f64) -> Result<MediumSpec> {
        let body = Point3::new(2.0, 10.0, 10.0);
        match self {
            MediumCase::Homogeneous => MediumSpec::homogeneous(c0),
            MediumCase::CaseIi => MediumSpec::with_inclusion(c0, Point3::new(-2.0, 0.0, 0.0), body, inclusion_speed),
            MediumCase::CaseIii => MediumSpec::with_inclusion(c0, Point3::new(2.0, 0.0, 0.0), body, inclusion_speed),
        }
    }
}

impl FromStr for MediumCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "homogeneous" | "case-i" | "i" => Ok(MediumCase::Homogeneous),
            "case-ii" | "ii" => Ok(MediumCase::CaseIi),
            "case-iii" | "iii" => Ok(MediumCase::CaseIii),
            _ => Err(Error::invalid(format!("unknown medium {s:?} (expected homogeneous, case-ii or case-iii)"))),
        }
    }
}

/// Named starting points for a config.
pub const PRESETS: [(&str, &str); 7] = [
    ("paper-default", "letter-C, homogeneous medium, 5% noise, global search"),
    ("paper-default-C", "letter-C in the case-ii medium (body inclusion at 1500 m/s)"),
    ("paper-3", "digit 3, sequential tuning"),
    ("paper-8", "digit 8, parallel tuning"),
    ("paper-cyl-spiral", "cylindrical spiral, T = 20 s, order 1"),
    ("paper-cone-spiral", "conical spiral, T = 20 s, order 5"),
    ("paper-hello", "HELLO, T = 8 s, 30% noise, segmented smoothing"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioId,
    pub medium: MediumCase,
    /// Wave speed inside the inclusion, m/s.
    pub inclusion_speed: f64,
    pub omega0: f64,
    pub c0: f64,
    pub patch: PatchSpec,
    pub receivers: usize,
    pub terminal: f64,
    pub steps: usize,
    /// Sampling points per axis over `[-domain, domain]³`.
    pub mesh: usize,
    pub domain: f64,
    pub noise: f64,
    pub seed: u64,
    pub method: Method,
    /// Speed bound for the tuned searches; the trajectory's own bound if unset.
    pub vmax: Option<f64>,
    pub order: usize,
    pub segmented: bool,
    /// Homogeneous forward model; inhomogeneous media always use the
    /// frequency-reduced scattering solver.
    pub forward: ForwardKind,
    pub mode: PotentialMode,
    pub voxels: usize,
    pub exclusion: f64,
}

pub const CONFIG_KEYS: [&str; 25] = [
    "scenario",
    "medium",
    "inclusion_speed",
    "omega0",
    "c0",
    "radius",
    "polar_min",
    "polar_max",
    "azimuth_min",
    "azimuth_max",
    "receivers",
    "terminal",
    "steps",
    "mesh",
    "domain",
    "noise",
    "seed",
    "method",
    "vmax",
    "order",
    "segmented",
    "forward",
    "mode",
    "voxels",
    "exclusion",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::paper_default()
    }
}

fn forward_name(f: ForwardKind) -> &'static str {
    match f {
        ForwardKind::RetardedPotential => "retarded-potential",
        ForwardKind::ApproxField => "approx-field",
        ForwardKind::FrequencyReduction => "frequency-reduction",
    }
}

fn mode_name(m: PotentialMode) -> &'static str {
    match m {
        PotentialMode::NormalizedDirection => "normalized-direction",
        PotentialMode::PaperLiteral => "paper-literal",
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    /// r = 10 m, θ ∈ (π/4, 3π/4), φ ∈ (−π/4, π/4), N_m = 200, Δt = 0.1 s,
    /// ω0 = 1, c0 = 330, D = [−8, 8]³ with a 50³ mesh.
    pub fn paper_default() -> Self {
        let mut c = Self {
            scenario: ScenarioId::LetterC,
            medium: MediumCase::Homogeneous,
            inclusion_speed: 1500.0,
            omega0: 1.0,
            c0: 330.0,
            patch: PatchSpec::paper_default(),
            receivers: 200,
            terminal: 0.0,
            steps: 0,
            mesh: 50,
            domain: 8.0,
            noise: 0.05,
            seed: 1,
            method: Method::Global,
            vmax: None,
            order: DEFAULT_ORDER,
            segmented: false,
            forward: ForwardKind::RetardedPotential,
            mode: PotentialMode::NormalizedDirection,
            voxels: crate::scatter::DEFAULT_VOXELS[0],
            exclusion: DEFAULT_EXCLUSION_RADIUS,
        };
        c.set_scenario(ScenarioId::LetterC);
        c
    }

    pub fn preset(name: &str) -> Result<Self> {
        let mut c = Self::paper_default();
        match name {
            "paper-default" => {}
            "paper-default-C" => c.medium = MediumCase::CaseIi,
            "paper-3" => {
                c.set_scenario(ScenarioId::Digit3);
                c.method = Method::Sequential;
            }
            "paper-8" => {
                c.set_scenario(ScenarioId::Digit8);
                c.method = Method::Parallel;
            }
            "paper-cyl-spiral" => c.set_scenario(ScenarioId::CylSpiral),
            "paper-cone-spiral" => c.set_scenario(ScenarioId::ConeSpiral),
            "paper-hello" => {
                c.set_scenario(ScenarioId::Hello);
                c.noise = 0.30;
            }
            _ => {
                let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
                return Err(Error::invalid(format!("unknown preset {name:?} (known: {})", known.join(", "))));
            }
        }
        Ok(c)
    }

    /// Switches scenario together with its time span (Δt = 0.1 s), default
    /// order and segmentation.
    pub fn set_scenario(&mut self, id: ScenarioId) {
        self.scenario = id;
        self.terminal = id.terminal_time();
        self.steps = (self.terminal / 0.1).round() as usize;
        self.order = id.default_order();
        self.segmented = id.default_segmented();
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "preset" => *self = Self::preset(v)?,
            "scenario" => self.set_scenario(v.parse()?),
            "medium" => self.medium = v.parse()?,
            "inclusion_speed" => self.inclusion_speed = parse_num(key, v)?,
            "omega0" => self.omega0 = parse_num(key, v)?,
            "c0" => self.c0 = parse_num(key, v)?,
            "radius" => self.patch.radius = parse_num(key, v)?,
            "polar_min" => self.patch.polar.0 = parse_num(key, v)?,
            "polar_max" => self.patch.polar.1 = parse_num(key, v)?,
            "azimuth_min" => self.patch.azimuth.0 = parse_num(key, v)?,
            "azimuth_max" => self.patch.azimuth.1 = parse_num(key, v)?,
            "receivers" => self.receivers = parse_num(key, v)?,
            "terminal" => self.terminal = parse_num(key, v)?,
            "steps" => self.steps = parse_num(key, v)?,
            "mesh" => self.mesh = parse_num(key, v)?,
            "domain" => self.domain = parse_num(key, v)?,
            "noise" => self.noise = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "method" => self.method = v.parse()?,
            "vmax" => self.vmax = if v == "auto" { None } else { Some(parse_num(key, v)?) },
            "order" => self.order = parse_num(key, v)?,
            "segmented" => self.segmented = parse_num(key, v)?,
            "forward" => {
                self.forward = match v {
                    "retarded-potential" => ForwardKind::RetardedPotential,
                    "approx-field" => ForwardKind::ApproxField,
                    "frequency-reduction" => ForwardKind::FrequencyReduction,
                    _ => return Err(Error::invalid(format!("unknown forward model {v:?}"))),
                }
            }
            "mode" => self.mode = v.parse()?,
            "voxels" => self.voxels = parse_num(key, v)?,
            "exclusion" => self.exclusion = parse_num(key, v)?,
            _ => return Err(Error::invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. A `preset` line and
    /// then a `scenario` line are applied before the other keys, whatever
    /// their position.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let rank = |k: &str| match k {
            "preset" => 0,
            "scenario" => 1,
            _ => 2,
        };
        pairs.sort_by_key(|(k, _)| rank(k));
        let mut c = Self::paper_default();
        for (k, v) in &pairs {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    /// Canonical `key = value` rendering; `from_kv` of it gives back `self`.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let p = &self.patch;
        let vmax = self.vmax.map_or("auto".to_string(), |v| v.to_string());
        let values: [String; 25] = [
            self.scenario.as_str().into(),
            self.medium.as_str().into(),
            self.inclusion_speed.to_string(),
            self.omega0.to_string(),
            self.c0.to_string(),
            p.radius.to_string(),
            p.polar.0.to_string(),
            p.polar.1.to_string(),
            p.azimuth.0.to_string(),
            p.azimuth.1.to_string(),
            self.receivers.to_string(),
            self.terminal.to_string(),
            self.steps.to_string(),
            self.mesh.to_string(),
            self.domain.to_string(),
            self.noise.to_string(),
            self.seed.to_string(),
            self.method.as_str().into(),
            vmax,
            self.order.to_string(),
            self.segmented.to_string(),
            forward_name(self.forward).into(),
            mode_name(self.mode).into(),
            self.voxels.to_string(),
            self.exclusion.to_string(),
        ];
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of the canonical rendering.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_kv().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if !(self.omega0 > 0.0) || !(self.c0 > 0.0) {
            return bad("omega0 and c0 must be positive".into());
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise must be non-negative, got {}", self.noise));
        }
        if self.receivers == 0 || self.steps == 0 {
            return bad("receivers and steps must be at least 1".into());
        }
        if !(self.terminal > 0.0) || self.terminal > self.scenario.terminal_time() + 1e-12 {
            return bad(format!(
                "terminal time must lie in (0, {}] for {}",
                self.scenario.terminal_time(),
                self.scenario
            ));
        }
        if self.mesh < 2 {
            return bad(format!("mesh resolution must be at least 2, got {}", self.mesh));
        }
        if !(self.domain > 0.0) {
            return bad("domain half-width must be positive".into());
        }
        if let Some(v) = self.vmax {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("vmax must be positive, got {v}"));
            }
        }
        if self.voxels == 0 {
            return bad("voxels must be at least 1".into());
        }
        if self.medium != MediumCase::Homogeneous && !(self.inclusion_speed > 0.0) {
            return bad("inclusion speed must be positive".into());
        }
        if !(self.exclusion >= 0.0) {
            return bad("exclusion radius must be non-negative".into());
        }
        let p = self.patch;
        if !(p.radius > 0.0) || !(0.0 <= p.polar.0 && p.polar.0 < p.polar.1 && p.polar.1 <= PI) || !(p.azimuth.0 < p.azimuth.1) {
            return bad("receiver patch is degenerate".into());
        }
        self.medium.spec(self.c0, self.inclusion_speed)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.terminal, self.steps)
    }

    pub fn sampling_mesh(&self) -> Result<SamplingMesh> {
        SamplingMesh::cube(self.domain, self.mesh)
    }

    pub fn indicator_params(&self) -> IndicatorParams {
        IndicatorParams {
            omega0: self.omega0,
            exclusion_radius: self.exclusion,
        }
    }

    pub fn medium_spec(&self) -> Result<MediumSpec> {
        self.medium.spec(self.c0, self.inclusion_speed)
    }
}
