use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub level: usize,
    pub slot: usize,
    /// 1-based time index.
    pub j: usize,
    /// Radius of the ball centred at this entry's reconstruction, searched
    /// by its children, m.
    pub radius: f64,
    /// Entry whose ball this one is searched in.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningSchedule {
    pub n_steps: usize,
    pub entries: Vec<ScheduleEntry>,
    /// Time indices no entry visits, ascending.
    pub unvisited: Vec<usize>,
}

impl TuningSchedule {
    pub fn levels(&self) -> usize {
        self.entries.last().map_or(0, |e| e.level + 1)
    }

    pub fn level(&self, i: usize) -> impl Iterator<Item = (usize, &ScheduleEntry)> {
        self.entries.iter().enumerate().filter(move |(_, e)| e.level == i)
    }

    /// Visit order of time indices, level by level.
    pub fn visit_order(&self) -> Vec<Vec<usize>> {
        (0..self.levels()).map(|i| self.level(i).map(|(_, e)| e.j).collect()).collect()
    }

    pub fn covers_all(&self) -> bool {
        self.unvisited.is_empty()
    }
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// Dichotomy visiting order: `N_t` first, then for each level `i` the slots
/// `n = 1..2^{i-1}` at time index `⌊(2n−1)N_t/2^i⌋`. The ball around an
/// entry of level `i` has radius `v_max ⌈N_t/2^{i+1}⌉ T/N_t`.
pub fn parallel_schedule(n_steps: usize, v_max: f64, terminal: f64) -> Result<TuningSchedule> {
    if n_steps == 0 {
        return Err(Error::invalid("schedule needs at least one time step"));
    }
    if !(v_max >= 0.0) || !(terminal > 0.0) {
        return Err(Error::invalid("schedule needs v_max >= 0 and T > 0"));
    }
    let dt = terminal / n_steps as f64;
    let radius = |level: usize| v_max * n_steps.div_ceil(1 << (level + 1)) as f64 * dt;
    let mut entries = vec![ScheduleEntry {
        level: 0,
        slot: 1,
        j: n_steps,
        radius: radius(0),
        parent: None,
    }];
    let mut seen = vec![false; n_steps + 1];
    seen[n_steps] = true;
    // Entry index of each slot of the previous level; dropped slots point at
    // the entry that already visited the same step.
    let mut prev_level: Vec<usize> = vec![0];
    for level in 1..=floor_log2(n_steps) {
        let mut this_level = Vec::with_capacity(1 << (level - 1));
        for slot in 1..=(1usize << (level - 1)) {
            let j = ((2 * slot - 1) * n_steps) >> level;
            let parent = prev_level[slot.div_ceil(2) - 1];
            if j == 0 || seen[j] {
                let existing = entries.iter().position(|e| e.j == j).unwrap_or(parent);
                this_level.push(existing);
                continue;
            }
            seen[j] = true;
            this_level.push(entries.len());
            entries.push(ScheduleEntry {
                level,
                slot,
                j,
                radius: radius(level),
                parent: Some(parent),
            });
        }
        prev_level = this_level;
    }
    let unvisited = (1..=n_steps).filter(|&j| !seen[j]).collect();
    Ok(TuningSchedule {
        n_steps,
        entries,
        unvisited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_steps() {
        let s = parallel_schedule(8, 1.0, 0.8).unwrap();
        assert_eq!(s.visit_order(), vec![vec![8], vec![4], vec![2, 6], vec![1, 3, 5, 7]]);
        assert!(s.covers_all());
        let radii: Vec<f64> = s.entries.iter().map(|e| e.radius).collect();
        let expect = [0.4, 0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1];
        for (r, e) in radii.iter().zip(expect) {
            assert!((r - e).abs() < 1e-12);
        }
        let parents: Vec<Option<usize>> = s.entries.iter().map(|e| e.parent).collect();
        assert_eq!(parents, vec![None, Some(0), Some(1), Some(1), Some(2), Some(2), Some(3), Some(3)]);
    }

    #[test]
    fn ten_steps_leaves_gaps() {
        let s = parallel_schedule(10, 1.0, 1.0).unwrap();
        assert_eq!(s.visit_order(), vec![vec![10], vec![5], vec![2, 7], vec![1, 3, 6, 8]]);
        assert_eq!(s.unvisited, vec![4, 9]);
    }

    #[test]
    fn single_step() {
        let s = parallel_schedule(1, 2.0, 1.0).unwrap();
        assert_eq!(s.visit_order(), vec![vec![1]]);
        assert!(parallel_schedule(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn full_coverage_iff_power_of_two() {
        for n in 1..=128usize {
            let s = parallel_schedule(n, 1.0, 1.0).unwrap();
            assert_eq!(s.covers_all(), n.is_power_of_two(), "N_t = {n}");
            assert_eq!(s.levels(), floor_log2(n) + 1);
            let mut js: Vec<usize> = s.entries.iter().map(|e| e.j).collect();
            let total = js.len();
            js.sort_unstable();
            js.dedup();
            assert_eq!(js.len(), total);
            assert_eq!(total + s.unvisited.len(), n);
            for e in &s.entries {
                if let Some(p) = e.parent {
                    assert_eq!(s.entries[p].level + 1, e.level);
                    let reach = (s.entries[p].j as isize - e.j as isize).unsigned_abs() as f64 / n as f64;
                    assert!(reach <= s.entries[p].radius + 1e-12, "N_t = {n}");
                }
            }
        }
    }

    #[test]
    fn level_count_for_hundred() {
        assert_eq!(parallel_schedule(100, 1.0, 10.0).unwrap().levels(), 7);
    }
}
