use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{add_noise, noise_factor, synthesize_column, synthesize_record, PotentialMode, SourceSignal};
use crate::geometry::Point3;
use crate::imaging::search::{ball_argmax, check_v_max, global_points, lattice_slack};
use crate::imaging::{reconstruct_global, reconstruct_sequential, Correlator, IndicatorParams, Method, ReconPoint, ReconResult, DEFAULT_EXCLUSION_RADIUS};
use crate::model::{
    make_receiver_array, ForwardKind, MediumSpec, PatchSpec, ReceiverArray, RecordMeta, SamplingMesh, TimeGrid, Trajectory, WaveRecord,
};
use crate::postprocess::{fill_skipped, smooth, SegmentSet, DEFAULT_ORDER};

/// Settings of one interactive session. Missing JSON fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub omega0: f64,
    pub c0: f64,
    pub noise: f64,
    pub seed: u64,
    pub receivers: usize,
    pub patch: PatchSpec,
    /// Lattice points per axis of the search mesh.
    pub mesh: usize,
    /// Half-width of the cubic search domain, m.
    pub domain: f64,
    /// Sampling step of the stroke, s. Stroke point `k` belongs at `k * step`.
    pub step: f64,
    /// Speed bound used for the ball radius, m/s.
    pub v_max: f64,
    pub method: Method,
    pub order: usize,
    /// Side of the square the unit canvas maps to, m.
    pub scale: f64,
    pub exclusion: f64,
    pub mode: PotentialMode,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            c0: 330.0,
            noise: 0.05,
            seed: 1,
            receivers: 200,
            patch: PatchSpec::paper_default(),
            mesh: 25,
            domain: 8.0,
            step: 0.1,
            v_max: 20.0,
            method: Method::Sequential,
            order: DEFAULT_ORDER,
            scale: 16.0,
            exclusion: DEFAULT_EXCLUSION_RADIUS,
            mode: PotentialMode::default(),
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega0", self.omega0),
            ("c0", self.c0),
            ("domain", self.domain),
            ("step", self.step),
            ("scale", self.scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::invalid(format!("noise must be non-negative, got {}", self.noise)));
        }
        if self.mesh < 2 {
            return Err(Error::invalid("mesh needs at least 2 points per axis"));
        }
        if self.receivers == 0 {
            return Err(Error::invalid("at least one receiver is needed"));
        }
        if self.scale > 2.0 * self.domain {
            return Err(Error::invalid(format!(
                "canvas of side {} m does not fit the search domain [-{d}, {d}]^2",
                self.scale,
                d = self.domain
            )));
        }
        if self.method == Method::Parallel {
            return Err(Error::invalid("parallel tuning needs the whole record; use sequential or global"));
        }
        check_v_max(self.v_max)
    }

    /// Canvas point to the plane `x1 = 0`: `(0, s (u − 1/2), s (1/2 − v))`.
    pub fn canvas_to_plane(&self, u: f64, v: f64) -> Result<Point3> {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("canvas point ({u}, {v}) outside [0, 1]^2")));
        }
        Ok(Point3::new(0.0, self.scale * (u - 0.5), self.scale * (0.5 - v)))
    }

    pub fn indicator_params(&self) -> IndicatorParams {
        IndicatorParams {
            omega0: self.omega0,
            exclusion_radius: self.exclusion,
        }
    }

    fn signal(&self) -> Result<SourceSignal> {
        SourceSignal::new(self.omega0, f64::INFINITY)
    }

    fn meta(&self, id: &str) -> RecordMeta {
        RecordMeta {
            omega0: self.omega0,
            c0: self.c0,
            noise: self.noise,
            seed: self.seed,
            trajectory_id: id.into(),
            forward: ForwardKind::RetardedPotential,
            mode: self.mode,
            medium: None,
        }
    }
}

/// Stroke step of a client timestamp: the nearest multiple of the step.
fn step_index(t: f64, step: f64) -> Result<usize> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("stroke time must be positive, got {t}")));
    }
    let k = (t / step).round();
    if k < 1.0 {
        return Err(Error::invalid(format!("stroke time {t} is before the first step {step}")));
    }
    Ok(k as usize)
}

/// Live reconstruction of one stroke. Every sample is synthesized, perturbed
/// and localized as it arrives, with the same arithmetic as the batch
/// pipeline in [`replay_offline`].
#[derive(Debug)]
pub struct Session {
    config: SessionConfig,
    receivers: ReceiverArray,
    mesh: SamplingMesh,
    knots: Vec<(f64, Point3)>,
    points: Vec<ReconPoint>,
    skipped: Vec<usize>,
    latencies: Vec<Duration>,
}

/// What one stroke point produced.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Point(ReconPoint),
    Skipped { j: usize, t: f64, reason: String },
}

pub fn create_session(config: SessionConfig) -> Result<Session> {
    config.validate()?;
    let receivers = make_receiver_array(config.patch, config.receivers)?;
    let mesh = SamplingMesh::cube(config.domain, config.mesh)?;
    Ok(Session {
        config,
        receivers,
        mesh,
        knots: Vec::new(),
        points: Vec::new(),
        skipped: Vec::new(),
        latencies: Vec::new(),
    })
}

impl Session {
    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn points(&self) -> &[ReconPoint] {
        &self.points
    }

    pub fn skipped(&self) -> &[usize] {
        &self.skipped
    }

    /// Emitter path so far, at the canonical stroke times.
    pub fn knots(&self) -> &[(f64, Point3)] {
        &self.knots
    }

    /// Wall time spent on each ingested point.
    pub fn latencies(&self) -> &[Duration] {
        &self.latencies
    }

    /// Accepts stroke point `k = round(t / step)`, which must be the next
    /// step of the stroke, and localizes the emitter at `k * step`.
    pub fn ingest_stroke_point(&mut self, t: f64, u: f64, v: f64) -> Result<StepOutcome> {
        let started = Instant::now();
        let z = self.config.canvas_to_plane(u, v)?;
        let k = step_index(t, self.config.step)?;
        let expected = self.knots.len() + 1;
        if k < expected {
            return Err(Error::invalid(format!("out-of-order stroke point: step {k} after step {}", expected - 1)));
        }
        if k > expected {
            return Err(Error::invalid(format!("stroke skips from step {} to step {k}", expected - 1)));
        }
        let t_k = k as f64 * self.config.step;
        let mut knots = self.knots.clone();
        knots.push((t_k, z));
        let traj = Trajectory::sampled("stroke", knots.clone())?;
        let mut column = synthesize_column(&traj, &self.receivers, t_k, self.config.c0, self.config.signal()?, self.config.mode)?;
        if self.config.noise > 0.0 {
            for (m, u) in column.iter_mut().enumerate() {
                *u *= noise_factor(self.config.noise, self.config.seed, m, k);
            }
        }
        // One-step record: its only instant is t_k itself.
        let grid = TimeGrid::with_step(t_k, t_k)?;
        let record = WaveRecord::new(column, self.receivers.clone(), grid, self.config.meta("stroke"))?;
        let corr = Correlator::new(&record, self.config.indicator_params())?;
        self.knots = knots;
        let outcome = if !corr.is_active(1) {
            self.skipped.push(k);
            StepOutcome::Skipped {
                j: k,
                t: t_k,
                reason: "no usable signal at this instant".into(),
            }
        } else {
            let prev = match self.config.method {
                Method::Sequential => self.points.last(),
                _ => None,
            };
            let mut point = match prev {
                None => global_points(&corr, &self.mesh, &[1])?.remove(0),
                Some(prev) => {
                    let radius = self.config.v_max * (t_k - prev.t) + lattice_slack(&self.mesh);
                    ball_argmax(&corr, &self.mesh, 1, prev.z, radius)?
                }
            };
            point.j = k;
            self.points.push(point);
            StepOutcome::Point(point)
        };
        self.latencies.push(started.elapsed());
        Ok(outcome)
    }

    /// Gap segmentation and per-segment Fourier smoothing of the stroke.
    pub fn finalize_session(&self) -> Result<(Vec<(f64, Point3)>, SegmentSet)> {
        if self.points.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 reconstructed points to smooth, have {}",
                self.points.len()
            )));
        }
        let n = self.knots.len();
        let grid = TimeGrid::with_step(n as f64 * self.config.step, self.config.step)?;
        let indexed: Vec<(usize, Point3)> = self.points.iter().map(|p| (p.j, p.z)).collect();
        let filled = fill_skipped(&indexed, grid)?;
        let segments = smooth(&filled, grid.terminal(), self.config.order, true)?;
        Ok((filled, segments))
    }
}

/// Batch pipeline over a whole stroke: full record, noise, then the
/// configured search. Matches the live session point for point.
pub fn replay_offline(config: &SessionConfig, stroke: &[(f64, f64, f64)]) -> Result<(WaveRecord, ReconResult)> {
    config.validate()?;
    if stroke.is_empty() {
        return Err(Error::invalid("empty stroke"));
    }
    let mut knots = Vec::with_capacity(stroke.len());
    for (i, &(t, u, v)) in stroke.iter().enumerate() {
        let k = step_index(t, config.step)?;
        if k != i + 1 {
            return Err(Error::invalid(format!("stroke point {} is at step {k}", i + 1)));
        }
        knots.push((k as f64 * config.step, config.canvas_to_plane(u, v)?));
    }
    let traj = Trajectory::sampled("stroke", knots)?;
    let receivers = make_receiver_array(config.patch, config.receivers)?;
    let grid = TimeGrid::with_step(traj.terminal(), config.step)?;
    let medium = MediumSpec::homogeneous(config.c0)?;
    let clean = synthesize_record(&traj, &receivers, grid, &medium, config.signal()?, config.mode)?;
    let record = add_noise(&clean, config.noise, config.seed)?;
    let mesh = SamplingMesh::cube(config.domain, config.mesh)?;
    let params = config.indicator_params();
    let recon = match config.method {
        Method::Global => reconstruct_global(&record, &mesh, &params)?,
        _ => reconstruct_sequential(&record, &mesh, config.v_max, &params)?,
    };
    Ok((record, recon))
}
