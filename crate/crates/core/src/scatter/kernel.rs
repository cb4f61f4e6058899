use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::MediumSpec;

/// Outgoing Helmholtz fundamental solution `e^{i k0 r} / (4π r)`.
pub fn helmholtz_fundamental(x: Point3, y: Point3, k0: f64) -> Result<Complex64> {
    let r = x.distance(y);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(kernel_at(r, k0))
}

#[inline]
pub(crate) fn kernel_at(r: f64, k0: f64) -> Complex64 {
    let (s, c) = (k0 * r).sin_cos();
    Complex64::new(c, s) / (4.0 * PI * r)
}

/// `∫_{|y| < a} e^{i k |y|} / (4π |y|) dy = ((1 − i k a) e^{i k a} − 1) / k²`.
///
/// For small `k a` the closed form cancels catastrophically, so the power
/// series `Σ (i k)^n a^{n+2} / (n! (n + 2))` is summed instead.
pub fn ball_self_integral(k: f64, a: f64) -> Complex64 {
    let x = k * a;
    if x.abs() < 0.5 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(a * a, 0.0); // (ik)^n a^{n+2} / n!
        for n in 0..40 {
            let contribution = term / (n as f64 + 2.0);
            sum += contribution;
            if contribution.norm() < 1e-18 * sum.norm() {
                break;
            }
            term *= Complex64::new(0.0, x) / (n as f64 + 1.0);
        }
        sum
    } else {
        let e = Complex64::new(x.cos(), x.sin());
        ((Complex64::new(1.0, -x)) * e - 1.0) / (k * k)
    }
}

/// Smallness parameter `ω0² |c0⁻² − c⁻²|` of the inclusion (0 without one).
pub fn check_smallness(medium: &MediumSpec, omega0: f64) -> f64 {
    match &medium.inclusion {
        None => 0.0,
        Some(inc) => omega0 * omega0 * (medium.c0.powi(-2) - inc.speed.powi(-2)).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_and_laplace_limit() {
        let x = Point3::new(1.0, 2.0, 3.0);
        let y = Point3::new(-1.0, 0.5, 0.0);
        let r = x.distance(y);
        for k in [0.0, 0.003, 1.0, 7.5] {
            let phi = helmholtz_fundamental(x, y, k).unwrap();
            assert!((phi.norm() - 1.0 / (4.0 * PI * r)).abs() < 1e-16);
        }
        let laplace = helmholtz_fundamental(x, y, 0.0).unwrap();
        assert_eq!(laplace.im, 0.0);
        assert!(matches!(helmholtz_fundamental(x, x, 1.0), Err(Error::CoincidentPoints)));
    }

    #[test]
    fn acquisition_scale_value() {
        let phi = helmholtz_fundamental(Point3::ORIGIN, Point3::new(10.0, 0.0, 0.0), 1.0 / 330.0).unwrap();
        // cos(1/33) / (40π), sin(1/33) / (40π)
        assert!((phi.re - 7.954_093_739_432e-3).abs() < 1e-15);
        assert!((phi.im - 2.411_069_488_565e-4).abs() < 1e-15);
        assert!((phi.re - 7.9542e-3).abs() < 2e-7 && (phi.im - 2.411e-4).abs() < 1e-7);
    }

    #[test]
    fn self_integral_against_quadrature() {
        // radial midpoint rule on ∫_0^a r e^{ikr} dr
        for (k, a) in [(1.0 / 330.0, 0.18), (2.0, 0.3), (0.9, 1.0), (5.0, 0.2)] {
            let n = 200_000;
            let h = a / n as f64;
            let mut q = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let r = (i as f64 + 0.5) * h;
                q += Complex64::new((k * r).cos(), (k * r).sin()) * r * h;
            }
            let s = ball_self_integral(k, a);
            assert!((s - q).norm() < 1e-9 * q.norm(), "k={k} a={a}: {s} vs {q}");
        }
        let s0 = ball_self_integral(0.0, 0.5);
        assert!((s0.re - 0.125).abs() < 1e-16 && s0.im == 0.0);
    }

    #[test]
    fn smallness_values() {
        assert_eq!(check_smallness(&MediumSpec::homogeneous(330.0).unwrap(), 1.0), 0.0);
        let m = MediumSpec::case_ii(330.0, 1500.0);
        let eps = check_smallness(&m, 1.0);
        assert!((eps - 8.738e-6).abs() < 1e-9);
        assert!((check_smallness(&m, 2.0) / eps - 4.0).abs() < 1e-12);
    }
}
