use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// `z(t) = a0 + Σ_{n=1..P} (a_n cos(n s) + b_n sin(n s))` with `s = t − shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCurve {
    pub a0: Point3,
    pub a: Vec<Point3>,
    pub b: Vec<Point3>,
    /// Length of the fitted parameter interval `(0, span]`.
    pub span: f64,
    /// Offset subtracted from physical time before evaluation.
    pub shift: f64,
    /// Order asked for, which may exceed `order()` after reduction on short input.
    pub requested_order: usize,
}

impl FourierCurve {
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.order() < self.requested_order
    }

    pub fn eval(&self, t: f64) -> Point3 {
        let s = t - self.shift;
        let mut z = self.a0;
        for (n, (an, bn)) in self.a.iter().zip(&self.b).enumerate() {
            let (sin, cos) = ((n + 1) as f64 * s).sin_cos();
            z += *an * cos + *bn * sin;
        }
        z
    }

    /// Physical time interval `(shift, shift + span]` the curve represents.
    pub fn domain(&self) -> (f64, f64) {
        (self.shift, self.shift + self.span)
    }

    /// `Σ_j |z(t_j) − z_j|²` over the given points.
    pub fn residual(&self, points: &[(f64, Point3)]) -> f64 {
        points
            .iter()
            .map(|&(t, z)| {
                let d = self.eval(t) - z;
                d.dot(d)
            })
            .sum()
    }
}

/// Fourier coefficients by the Riemann sums
/// `a0 = (1/T) Σ z_j Δt`, `a_n = (2/T) Σ z_j cos(n t_j) Δt`,
/// `b_n = (2/T) Σ z_j sin(n t_j) Δt` with `Δt = T / N`.
pub fn fourier_fit(points: &[(f64, Point3)], span: f64, order: usize) -> Result<FourierCurve> {
    if points.is_empty() {
        return Err(Error::invalid("Fourier fit needs at least one point"));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::invalid(format!("fit interval length must be positive, got {span}")));
    }
    // With Δt = T/N the sums reduce to plain averages. Averaging offsets
    // from the first point keeps a0 of a constant sequence exact.
    let n = points.len() as f64;
    let first = points[0].1;
    let a0 = first + points.iter().fold(Point3::ORIGIN, |acc, &(_, z)| acc + (z - first)) / n;
    let mut a = Vec::with_capacity(order);
    let mut b = Vec::with_capacity(order);
    for k in 1..=order {
        let k = k as f64;
        let (mut ca, mut cb) = (Point3::ORIGIN, Point3::ORIGIN);
        for &(t, z) in points {
            let (sin, cos) = (k * t).sin_cos();
            ca += z * cos;
            cb += z * sin;
        }
        a.push(ca * (2.0 / n));
        b.push(cb * (2.0 / n));
    }
    Ok(FourierCurve {
        a0,
        a,
        b,
        span,
        shift: 0.0,
        requested_order: order,
    })
}
