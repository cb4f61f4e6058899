use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Uniform lattice over a box, inclusive of both faces on every axis.
///
/// Points are enumerated lexicographically in (x1, x2, x3), so a flat
/// index order is also the lexicographic order of the points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingMesh {
    low: Point3,
    high: Point3,
    res: [usize; 3],
}

impl SamplingMesh {
    /// A resolution of 1 is only allowed on an axis of zero extent.
    pub fn new(low: Point3, high: Point3, res: [usize; 3]) -> Result<Self> {
        let (lo, hi) = (low.to_array(), high.to_array());
        for a in 0..3 {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] <= hi[a]) {
                return Err(Error::invalid("mesh box must be finite with low <= high"));
            }
            let ok = res[a] >= 2 || (res[a] == 1 && lo[a] == hi[a]);
            if !ok {
                return Err(Error::invalid(format!(
                    "mesh resolution must be at least 2 per axis, got {:?}",
                    res
                )));
            }
        }
        Ok(Self { low, high, res })
    }

    /// `n³` lattice over `[-half, half]³`.
    pub fn cube(half: f64, n: usize) -> Result<Self> {
        if !(half > 0.0) {
            return Err(Error::invalid("cube half-width must be positive"));
        }
        Self::new(Point3::new(-half, -half, -half), Point3::new(half, half, half), [n, n, n])
    }

    pub fn single(p: Point3) -> Self {
        Self {
            low: p,
            high: p,
            res: [1, 1, 1],
        }
    }

    pub fn low(&self) -> Point3 {
        self.low
    }

    pub fn high(&self) -> Point3 {
        self.high
    }

    pub fn resolution(&self) -> [usize; 3] {
        self.res
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 3] {
        let (lo, hi) = (self.low.to_array(), self.high.to_array());
        let mut h = [0.0; 3];
        for a in 0..3 {
            if self.res[a] > 1 {
                h[a] = (hi[a] - lo[a]) / (self.res[a] - 1) as f64;
            }
        }
        h
    }

    /// Largest lattice spacing ("one cell").
    pub fn cell_size(&self) -> f64 {
        self.spacing().into_iter().fold(0.0, f64::max)
    }

    pub fn cell_diagonal(&self) -> f64 {
        let h = self.spacing();
        (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt()
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = (self.low.to_array()[axis], self.high.to_array()[axis]);
        let n = self.res[axis];
        if n == 1 {
            lo
        } else if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * (i as f64 / (n - 1) as f64)
        }
    }

    pub fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.res[1] + idx[1]) * self.res[2] + idx[2]
    }

    pub fn unflat(&self, flat: usize) -> [usize; 3] {
        let i3 = flat % self.res[2];
        let rest = flat / self.res[2];
        [rest / self.res[1], rest % self.res[1], i3]
    }

    pub fn point(&self, flat: usize) -> Point3 {
        let [i, j, k] = self.unflat(flat);
        Point3::new(self.coord(0, i), self.coord(1, j), self.coord(2, k))
    }

    pub fn contains(&self, p: Point3) -> bool {
        let (lo, hi, q) = (self.low.to_array(), self.high.to_array(), p.to_array());
        (0..3).all(|a| lo[a] <= q[a] && q[a] <= hi[a])
    }

    /// Flat index of the lattice point nearest to `p` (clamped to the box).
    pub fn nearest(&self, p: Point3) -> usize {
        let h = self.spacing();
        let (lo, q) = (self.low.to_array(), p.to_array());
        let mut idx = [0usize; 3];
        for a in 0..3 {
            if self.res[a] > 1 {
                let f = ((q[a] - lo[a]) / h[a]).round();
                idx[a] = f.clamp(0.0, (self.res[a] - 1) as f64) as usize;
            }
        }
        self.flat(idx)
    }

    /// Flat indices of lattice points strictly inside the open ball, in
    /// lexicographic order.
    pub fn ball(&self, center: Point3, radius: f64) -> Vec<usize> {
        let h = self.spacing();
        let (lo, c) = (self.low.to_array(), center.to_array());
        let mut range = [(0usize, 0usize); 3];
        for a in 0..3 {
            let n = self.res[a];
            if n == 1 {
                range[a] = (0, 0);
                continue;
            }
            let from = ((c[a] - radius - lo[a]) / h[a]).floor().max(0.0);
            let to = ((c[a] + radius - lo[a]) / h[a]).ceil().min((n - 1) as f64);
            if from > to {
                return Vec::new();
            }
            range[a] = (from as usize, to as usize);
        }
        let mut out = Vec::new();
        for i in range[0].0..=range[0].1 {
            for j in range[1].0..=range[1].1 {
                for k in range[2].0..=range[2].1 {
                    let flat = self.flat([i, j, k]);
                    if self.point(flat).distance(center) < radius {
                        out.push(flat);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_covers_box_inclusively() {
        let m = SamplingMesh::cube(8.0, 50).unwrap();
        assert_eq!(m.len(), 125_000);
        assert_eq!(m.point(0), Point3::new(-8.0, -8.0, -8.0));
        assert_eq!(m.point(m.len() - 1), Point3::new(8.0, 8.0, 8.0));
        assert!((m.cell_size() - 16.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn flat_order_is_lexicographic() {
        let m = SamplingMesh::cube(1.0, 4).unwrap();
        for f in 1..m.len() {
            assert_eq!(m.point(f - 1).lex_cmp(&m.point(f)), std::cmp::Ordering::Less);
            assert_eq!(m.flat(m.unflat(f)), f);
        }
    }

    #[test]
    fn ball_matches_brute_force() {
        let m = SamplingMesh::cube(2.0, 9).unwrap();
        let c = Point3::new(0.3, -1.1, 0.7);
        for r in [0.1, 0.5, 0.77, 1.9, 10.0] {
            let brute: Vec<usize> = (0..m.len()).filter(|&f| m.point(f).distance(c) < r).collect();
            assert_eq!(m.ball(c, r), brute, "radius {r}");
        }
    }

    #[test]
    fn resolution_checks() {
        assert!(SamplingMesh::cube(8.0, 1).is_err());
        let s = SamplingMesh::single(Point3::new(1.0, 2.0, 3.0));
        assert_eq!(s.len(), 1);
        assert_eq!(s.point(0), Point3::new(1.0, 2.0, 3.0));
        assert_eq!(s.ball(Point3::new(1.0, 2.0, 3.0), 0.1), vec![0]);
    }

    #[test]
    fn nearest_rounds_to_lattice() {
        let m = SamplingMesh::cube(8.0, 50).unwrap();
        let p = Point3::new(0.1, 2.0, -3.3);
        let q = m.point(m.nearest(p));
        assert!(q.distance(p) <= m.cell_diagonal() / 2.0 + 1e-12);
    }
}
