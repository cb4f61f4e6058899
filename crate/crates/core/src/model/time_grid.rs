use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform recording instants `t_j = j Δt`, `j = 1..=N_t`, with `t_{N_t} = T`
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    terminal: f64,
    n_steps: usize,
    step: f64,
}

impl TimeGrid {
    pub fn new(terminal: f64, n_steps: usize) -> Result<Self> {
        if !(terminal > 0.0 && terminal.is_finite()) {
            return Err(Error::invalid(format!("terminal time must be positive, got {terminal}")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("time grid needs at least one step"));
        }
        Ok(Self {
            terminal,
            n_steps,
            step: terminal / n_steps as f64,
        })
    }

    /// Grid with step `dt` kept verbatim, so that `t_j = j dt` bit for bit;
    /// `terminal / dt` must be (close to) an integer.
    pub fn with_step(terminal: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        let n = (terminal / dt).round();
        if n < 1.0 || ((n * dt - terminal) / terminal).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "terminal time {terminal} is not a multiple of the step {dt}"
            )));
        }
        Self::from_parts(terminal, n as usize, dt)
    }

    /// Reassembles a grid from its stored fields.
    pub fn from_parts(terminal: f64, n_steps: usize, step: f64) -> Result<Self> {
        let mut g = Self::new(terminal, n_steps)?;
        if !(step > 0.0) || ((step - g.step) / g.step).abs() > 1e-9 {
            return Err(Error::invalid(format!("step {step} does not match {terminal} / {n_steps}")));
        }
        g.step = step;
        Ok(g)
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.step
    }

    /// Time of step `j` (1-based).
    pub fn time(&self, j: usize) -> f64 {
        debug_assert!(j >= 1 && j <= self.n_steps);
        if j == self.n_steps {
            self.terminal
        } else {
            j as f64 * self.step
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (1..=self.n_steps).map(|j| self.time(j)).collect()
    }

    /// The grid with twice as many steps over the same horizon.
    pub fn refined(&self) -> Self {
        Self {
            terminal: self.terminal,
            n_steps: 2 * self.n_steps,
            step: self.terminal / (2 * self.n_steps) as f64,
        }
    }
}
