use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::geometry::Point3;

/// Curves for external plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub truth: Vec<(f64, Point3)>,
    pub raw: Vec<(f64, Point3)>,
    /// `(segment, t, z)` samples; `None` when nothing was smoothed.
    pub smoothed: Option<Vec<(usize, f64, Point3)>>,
}

fn table(rows: impl Iterator<Item = (Option<usize>, f64, Point3)>, projected: bool) -> String {
    let mut rows = rows.peekable();
    let segmented = rows.peek().is_some_and(|r| r.0.is_some());
    let mut out = String::new();
    if segmented {
        out.push_str("segment,");
    }
    out.push_str(if projected { "t,x2,x3\n" } else { "t,x1,x2,x3\n" });
    for (s, t, z) in rows {
        if let Some(s) = s {
            let _ = write!(out, "{s},");
        }
        if projected {
            let _ = writeln!(out, "{t},{},{}", z.x2, z.x3);
        } else {
            let _ = writeln!(out, "{t},{},{},{}", z.x1, z.x2, z.x3);
        }
    }
    out
}

/// Writes `truth.csv`, `raw.csv`, `smoothed.csv` and their `*_x2x3.csv`
/// projections onto the x2-x3 plane. Returns the file names written.
pub fn export_plot_data(data: &PlotData, dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let plain = |v: &[(f64, Point3)]| v.iter().map(|&(t, z)| (None, t, z)).collect::<Vec<_>>();
    let mut sets = vec![("truth", plain(&data.truth)), ("raw", plain(&data.raw))];
    if let Some(s) = &data.smoothed {
        sets.push(("smoothed", s.iter().map(|&(k, t, z)| (Some(k), t, z)).collect()));
    }
    for (name, rows) in sets {
        for projected in [false, true] {
            let file = if projected { format!("{name}_x2x3.csv") } else { format!("{name}.csv") };
            fs::write(dir.join(&file), table(rows.iter().copied(), projected))?;
            written.push(file);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_and_projection() {
        let dir = tempfile::tempdir().unwrap();
        let p = |a: f64| Point3::new(a, a + 1.0, a + 2.0);
        let mut data = PlotData {
            truth: vec![(0.1, p(0.0)), (0.2, p(1.0))],
            raw: vec![(0.1, p(0.5))],
            smoothed: None,
        };
        let files = export_plot_data(&data, dir.path()).unwrap();
        assert_eq!(files, ["truth.csv", "truth_x2x3.csv", "raw.csv", "raw_x2x3.csv"]);
        let proj = fs::read_to_string(dir.path().join("truth_x2x3.csv")).unwrap();
        assert_eq!(proj, "t,x2,x3\n0.1,1,2\n0.2,2,3\n");
        data.smoothed = Some(vec![(0, 0.1, p(0.25))]);
        let files = export_plot_data(&data, dir.path()).unwrap();
        assert_eq!(files.len(), 6);
        let s = fs::read_to_string(dir.path().join("smoothed.csv")).unwrap();
        assert_eq!(s, "segment,t,x1,x2,x3\n0,0.1,0.25,1.25,2.25\n");
    }
}
