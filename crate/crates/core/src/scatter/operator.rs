use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::kernel::{ball_self_integral, helmholtz_fundamental, kernel_at};
use super::voxel::VoxelGrid;
use crate::error::{Error, Result};
use crate::geometry::Point3;

const MAX_NEUMANN_TERMS: usize = 200;

/// Total field at the voxel centres for one source position.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzSolution {
    pub k0: f64,
    pub source: Point3,
    pub incident: Vec<Complex64>,
    pub total: Vec<Complex64>,
    /// Relative update norm of each Neumann term.
    pub residuals: Vec<f64>,
}

/// The discrete volume operator
/// `(K u)_p = Σ_{q≠p} γ_q u_q Φ(y_p, y_q) ΔV + γ_p u_p S`,
/// with `S` the integral of Φ over the ball of one voxel volume.
///
/// On the regular voxel lattice the off-diagonal part is a Toeplitz
/// convolution and is applied through a zero-padded 3-D FFT.
pub struct LsOperator {
    grid: VoxelGrid,
    k0: f64,
    padded: [usize; 3],
    kernel_hat: Vec<Complex64>,
    ffts: [Arc<dyn Fft<f64>>; 3],
    iffts: [Arc<dyn Fft<f64>>; 3],
    self_term: Complex64,
}

impl LsOperator {
    pub fn new(grid: &VoxelGrid, k0: f64) -> Self {
        let n = grid.dims;
        let padded = [2 * n[0], 2 * n[1], 2 * n[2]];
        let mut planner = FftPlanner::new();
        let ffts = [0, 1, 2].map(|a| planner.plan_fft_forward(padded[a]));
        let iffts = [0, 1, 2].map(|a| planner.plan_fft_inverse(padded[a]));
        let self_term = ball_self_integral(k0, grid.equivalent_radius());
        let h = grid.spacing;
        let offset = |i: usize, a: usize| -> Option<f64> {
            // wrapped lattice offset; the Nyquist slot is never reached
            if i < n[a] {
                Some(i as f64 * h[a])
            } else if i > n[a] {
                Some((i as f64 - padded[a] as f64) * h[a])
            } else {
                None
            }
        };
        let mut kernel = vec![Complex64::new(0.0, 0.0); padded.iter().product()];
        for i in 0..padded[0] {
            for j in 0..padded[1] {
                for k in 0..padded[2] {
                    let idx = (i * padded[1] + j) * padded[2] + k;
                    if let (Some(dx), Some(dy), Some(dz)) = (offset(i, 0), offset(j, 1), offset(k, 2)) {
                        kernel[idx] = if i == 0 && j == 0 && k == 0 {
                            self_term
                        } else {
                            kernel_at((dx * dx + dy * dy + dz * dz).sqrt(), k0) * grid.volume
                        };
                    }
                }
            }
        }
        let mut op = Self {
            grid: grid.clone(),
            k0,
            padded,
            kernel_hat: Vec::new(),
            ffts,
            iffts,
            self_term,
        };
        op.fft3(&mut kernel, false);
        op.kernel_hat = kernel;
        op
    }

    pub fn grid(&self) -> &VoxelGrid {
        &self.grid
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    fn fft3(&self, data: &mut [Complex64], inverse: bool) {
        let [a, b, c] = self.padded;
        let plans = if inverse { &self.iffts } else { &self.ffts };
        plans[2].process(data);
        let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
        // axis 1: lines ordered [i][k][j]
        for i in 0..a {
            for k in 0..c {
                for j in 0..b {
                    scratch[(i * c + k) * b + j] = data[(i * b + j) * c + k];
                }
            }
        }
        plans[1].process(&mut scratch);
        for i in 0..a {
            for k in 0..c {
                for j in 0..b {
                    data[(i * b + j) * c + k] = scratch[(i * c + k) * b + j];
                }
            }
        }
        // axis 0: lines ordered [j][k][i]
        for j in 0..b {
            for k in 0..c {
                for i in 0..a {
                    scratch[(j * c + k) * a + i] = data[(i * b + j) * c + k];
                }
            }
        }
        plans[0].process(&mut scratch);
        for j in 0..b {
            for k in 0..c {
                for i in 0..a {
                    data[(i * b + j) * c + k] = scratch[(j * c + k) * a + i];
                }
            }
        }
    }

    /// `K u` via FFT convolution.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.dims;
        let [_, pb, pc] = self.padded;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded.iter().product()];
        for i in 0..n[0] {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    let q = (i * n[1] + j) * n[2] + k;
                    buf[(i * pb + j) * pc + k] = u[q] * self.grid.contrast[q];
                }
            }
        }
        self.fft3(&mut buf, false);
        for (v, g) in buf.iter_mut().zip(&self.kernel_hat) {
            *v *= g;
        }
        self.fft3(&mut buf, true);
        let scale = 1.0 / buf.len() as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        for i in 0..n[0] {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    out[(i * n[1] + j) * n[2] + k] = buf[(i * pb + j) * pc + k] * scale;
                }
            }
        }
        out
    }

    /// `K u` by direct summation over voxel pairs.
    #[allow(clippy::needless_range_loop)]
    pub fn apply_dense(&self, u: &[Complex64]) -> Vec<Complex64> {
        let g = &self.grid;
        (0..g.len())
            .into_par_iter()
            .map(|p| {
                let mut acc = g.contrast[p] * u[p] * self.self_term;
                for q in 0..g.len() {
                    if q != p {
                        acc += kernel_at(g.centers[p].distance(g.centers[q]), self.k0) * (g.contrast[q] * u[q] * g.volume);
                    }
                }
                acc
            })
            .collect()
    }

    /// Neumann series `û = Σ_k K^k Φ(·, z0)`, stopped when the relative
    /// update norm drops below `tol`.
    pub fn solve(&self, z0: Point3, tol: f64) -> Result<HelmholtzSolution> {
        let g = &self.grid;
        let half = Point3::new(g.spacing[0], g.spacing[1], g.spacing[2]) * 0.5;
        let (lo, hi) = (g.centers[0] - half, g.centers[g.len() - 1] + half);
        let inside = (lo.x1..=hi.x1).contains(&z0.x1) && (lo.x2..=hi.x2).contains(&z0.x2) && (lo.x3..=hi.x3).contains(&z0.x3);
        if inside {
            return Err(Error::invalid(format!("source {z0} lies inside the inclusion")));
        }
        let incident: Vec<Complex64> = g
            .centers
            .iter()
            .map(|&y| helmholtz_fundamental(y, z0, self.k0))
            .collect::<Result<_>>()?;
        let mut total = incident.clone();
        let mut residuals = Vec::new();
        for iteration in 1..=MAX_NEUMANN_TERMS {
            let ku = self.apply(&total);
            let next: Vec<Complex64> = incident.iter().zip(&ku).map(|(a, b)| a + b).collect();
            let diff = l2(next.iter().zip(&total).map(|(a, b)| a - b));
            let scale = l2(next.iter().copied());
            let update = if scale > 0.0 { diff / scale } else { 0.0 };
            if !update.is_finite() || residuals.last().is_some_and(|&prev| update > prev && iteration > 2) {
                return Err(Error::NeumannDiverged { iteration, update });
            }
            residuals.push(update);
            total = next;
            if update < tol {
                return Ok(HelmholtzSolution {
                    k0: self.k0,
                    source: z0,
                    incident,
                    total,
                    residuals,
                });
            }
        }
        Err(Error::NeumannDiverged {
            iteration: MAX_NEUMANN_TERMS,
            update: residuals.last().copied().unwrap_or(f64::NAN),
        })
    }
}

fn l2(values: impl Iterator<Item = Complex64>) -> f64 {
    values.map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// One-shot solve that builds the operator for `grid` and `k0`.
pub fn solve_lippmann_schwinger(z0: Point3, grid: &VoxelGrid, k0: f64, tol: f64) -> Result<HelmholtzSolution> {
    LsOperator::new(grid, k0).solve(z0, tol)
}

/// `Φ(x, z0) + Σ_q γ_q û_q Φ(x, y_q) ΔV` at a point outside the inclusion.
pub fn eval_total_field(sol: &HelmholtzSolution, grid: &VoxelGrid, z0: Point3, x: Point3) -> Result<Complex64> {
    let mut acc = helmholtz_fundamental(x, z0, sol.k0)?;
    for q in 0..grid.len() {
        if grid.contrast[q] != 0.0 {
            acc += helmholtz_fundamental(x, grid.centers[q], sol.k0)? * (grid.contrast[q] * grid.volume) * sol.total[q];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MediumSpec;

    fn grid(speed: f64, omega0: f64, n: usize) -> VoxelGrid {
        VoxelGrid::new(&MediumSpec::case_ii(330.0, speed), omega0, [n, n, n]).unwrap()
    }

    #[test]
    fn fft_matches_dense_application() {
        let g = VoxelGrid::new(&MediumSpec::case_ii(330.0, 100.0), 3.0, [5, 7, 6]).unwrap();
        let op = LsOperator::new(&g, 3.0 / 330.0);
        let u: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let fast = op.apply(&u);
        let dense = op.apply_dense(&u);
        let scale = dense.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn zero_contrast_returns_incident_field() {
        let g = grid(330.0, 1.0, 6);
        let z0 = Point3::new(0.0, 1.0, 2.0);
        let sol = solve_lippmann_schwinger(z0, &g, 1.0 / 330.0, 1e-8).unwrap();
        assert_eq!(sol.total, sol.incident);
        assert_eq!(sol.residuals, vec![0.0]);
        let x = Point3::new(10.0, 0.0, 0.0);
        let u = eval_total_field(&sol, &g, z0, x).unwrap();
        assert_eq!(u, helmholtz_fundamental(x, z0, 1.0 / 330.0).unwrap());
    }

    #[test]
    fn reciprocity_without_contrast() {
        let g = grid(330.0, 1.0, 4);
        let (a, b) = (Point3::new(0.0, 1.0, 2.0), Point3::new(9.0, -3.0, 1.0));
        let sa = solve_lippmann_schwinger(a, &g, 0.5, 1e-8).unwrap();
        let sb = solve_lippmann_schwinger(b, &g, 0.5, 1e-8).unwrap();
        assert_eq!(eval_total_field(&sa, &g, a, b).unwrap(), eval_total_field(&sb, &g, b, a).unwrap());
    }

    #[test]
    fn body_inclusion_perturbation_is_tiny() {
        let g = grid(1500.0, 1.0, 20);
        let op = LsOperator::new(&g, 1.0 / 330.0);
        for z0 in [Point3::new(0.0, 2.1, 2.1), Point3::new(0.0, -3.0, 0.5)] {
            let sol = op.solve(z0, 1e-8).unwrap();
            let phi_max = sol.incident.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let dev = sol.total.iter().zip(&sol.incident).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(dev <= 1e-4 * phi_max, "{dev} vs {phi_max}");
            assert!(dev > 0.0);
        }
    }

    #[test]
    fn geometric_decay_and_self_consistency() {
        // strong contrast so that several terms are needed
        let g = VoxelGrid::new(&MediumSpec::case_ii(330.0, 200.0), 40.0, [8, 8, 8]).unwrap();
        let op = LsOperator::new(&g, 40.0 / 330.0);
        let tol = 1e-8;
        let sol = op.solve(Point3::new(0.0, 0.0, 1.0), tol).unwrap();
        assert!(sol.residuals.len() >= 3, "{:?}", sol.residuals);
        let ratios: Vec<f64> = sol.residuals.windows(2).map(|w| w[1] / w[0]).collect();
        let q = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(q < 1.0, "{ratios:?}");
        let ku = op.apply(&sol.total);
        let res: f64 = sol
            .total
            .iter()
            .zip(&ku)
            .zip(&sol.incident)
            .map(|((u, k), f)| (u - k - f).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm = l2(sol.total.iter().copied());
        assert!(res / norm <= 2.0 * tol);
    }

    #[test]
    fn divergence_detected() {
        let g = VoxelGrid::new(&MediumSpec::case_ii(330.0, 20.0), 60.0, [6, 6, 6]).unwrap();
        let res = solve_lippmann_schwinger(Point3::new(0.0, 0.0, 1.0), &g, 60.0 / 330.0, 1e-8);
        assert!(matches!(res, Err(Error::NeumannDiverged { .. })), "{res:?}");
    }

    #[test]
    fn halving_frequency_quarters_deviation() {
        let z0 = Point3::new(0.0, 2.0, 1.0);
        let rel = |omega0: f64| {
            let g = grid(1500.0, omega0, 20);
            let sol = solve_lippmann_schwinger(z0, &g, omega0 / 330.0, 1e-10).unwrap();
            let phi_max = sol.incident.iter().map(|v| v.norm()).fold(0.0, f64::max);
            sol.total.iter().zip(&sol.incident).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / phi_max
        };
        let ratio = rel(1.0) / rel(0.5);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn source_inside_rejected() {
        let g = grid(1500.0, 1.0, 4);
        assert!(solve_lippmann_schwinger(Point3::new(-2.0, 0.0, 0.0), &g, 1.0 / 330.0, 1e-8).is_err());
    }
}
