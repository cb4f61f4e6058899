use serde::{Deserialize, Serialize};

use super::{MediumSpec, ReceiverArray, TimeGrid};
use crate::error::{Error, Result};
use crate::forward::PotentialMode;

/// How the samples of a record were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForwardKind {
    /// Moving-source retarded potential in the homogeneous background.
    RetardedPotential,
    /// Static-kernel leading term `sin(ω0 t) / (4π |x − z0(t)|)`.
    ApproxField,
    /// Frequency-reduction ansatz `sin(ω0 t) Re û` with a volume-integral
    /// solve per time step.
    FrequencyReduction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub omega0: f64,
    pub c0: f64,
    pub noise: f64,
    pub seed: u64,
    pub trajectory_id: String,
    pub forward: ForwardKind,
    pub mode: PotentialMode,
    pub medium: Option<MediumSpec>,
}

/// Receiver-by-time samples `u(x_m, t_j)`, stored row-major by receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveRecord {
    values: Vec<f64>,
    pub receivers: ReceiverArray,
    pub grid: TimeGrid,
    pub meta: RecordMeta,
}

impl WaveRecord {
    pub fn new(values: Vec<f64>, receivers: ReceiverArray, grid: TimeGrid, meta: RecordMeta) -> Result<Self> {
        let expected = receivers.len() * grid.n_steps();
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "record has {} samples, expected {} receivers x {} steps",
                values.len(),
                receivers.len(),
                grid.n_steps()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("record sample {i} is not finite")));
        }
        Ok(Self {
            values,
            receivers,
            grid,
            meta,
        })
    }

    pub fn n_receivers(&self) -> usize {
        self.receivers.len()
    }

    pub fn n_steps(&self) -> usize {
        self.grid.n_steps()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sample at receiver `m` (0-based) and step `j` (1-based).
    pub fn get(&self, m: usize, j: usize) -> f64 {
        self.values[m * self.n_steps() + (j - 1)]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        let n = self.n_steps();
        &self.values[m * n..(m + 1) * n]
    }

    /// All receivers at step `j` (1-based).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_receivers()).map(|m| self.get(m, j)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Same metadata, every sample multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|v| v * alpha).collect(),
            self.receivers.clone(),
            self.grid,
            self.meta.clone(),
        )
    }

    /// Columns in reverse time order (same grid).
    pub fn time_reversed(&self) -> Self {
        let n = self.n_steps();
        let mut values = self.values.clone();
        for m in 0..self.n_receivers() {
            values[m * n..(m + 1) * n].reverse();
        }
        Self {
            values,
            receivers: self.receivers.clone(),
            grid: self.grid,
            meta: self.meta.clone(),
        }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
