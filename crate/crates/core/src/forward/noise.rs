use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::WaveRecord;

/// Uniform draw on `[-1, 1)` for receiver `m` (0-based) and step `j`
/// (1-based). Each cell has its own ChaCha stream, so the value does not
/// depend on the order in which cells are generated.
pub fn cell_uniform(seed: u64, m: usize, j: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | (j as u64 & 0xffff_ffff));
    rng.gen_range(-1.0..1.0)
}

/// Multiplicative factor `1 + ε r` applied to cell `(m, j)`.
pub fn noise_factor(noise: f64, seed: u64, m: usize, j: usize) -> f64 {
    1.0 + noise * cell_uniform(seed, m, j)
}

/// Replaces each sample `u` by `u (1 + ε r)`, `r ~ U(-1, 1)`.
pub fn add_noise(record: &WaveRecord, noise: f64, seed: u64) -> Result<WaveRecord> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid(format!("noise level must be non-negative, got {noise}")));
    }
    let mut out = record.clone();
    out.meta.noise = noise;
    out.meta.seed = seed;
    if noise == 0.0 {
        return Ok(out);
    }
    let n_steps = record.n_steps();
    for (cell, v) in out.values_mut().iter_mut().enumerate() {
        let (m, j) = (cell / n_steps, cell % n_steps + 1);
        *v *= noise_factor(noise, seed, m, j);
    }
    Ok(out)
}
