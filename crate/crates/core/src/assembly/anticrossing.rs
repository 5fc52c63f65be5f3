use serde::{Deserialize, Serialize};

use super::scan::SpectrumScan;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anticrossing {
    /// Refined location of the gap minimum.
    pub parameter: f64,
    pub gap: f64,
    pub lower: usize,
    pub upper: usize,
    /// Grid point nearest the minimum.
    pub grid_index: usize,
    /// Minimum sits on the first or last grid point; location unresolved.
    pub boundary: bool,
    /// False when the crossing is narrower than the grid: `gap` is then the
    /// smallest sampled gap (an upper bound) and `parameter` the interval midpoint.
    pub resolved: bool,
}

/// Vertex of the parabola through three points, if it opens upwards.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let denom = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    let a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / denom;
    let b =
        (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2]))
            / denom;
    if !(a > 0.0) {
        return None;
    }
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    // Lagrange form avoids the cancellation in c − b²/4a
    let l =
        |i: usize, j: usize, k: usize| (xv - x[j]) * (xv - x[k]) / ((x[i] - x[j]) * (x[i] - x[k]));
    let yv = y[0] * l(0, 1, 2) + y[1] * l(1, 0, 2) + y[2] * l(2, 0, 1);
    Some((xv, yv))
}

/// Local minima of adjacent-level gaps below `gap_max`.  The squared gap of
/// a two-level avoided crossing is exactly quadratic in the parameter, so
/// the refinement fits a parabola to g².
pub fn find_in_levels(grid: &[f64], energies: &[Vec<f64>], gap_max: f64) -> Vec<Anticrossing> {
    let np = grid.len();
    let k = energies.first().map_or(0, |e| e.len());
    let mut out = Vec::new();
    if np < 2 {
        return out;
    }
    for l in 0..k.saturating_sub(1) {
        let g: Vec<f64> = energies.iter().map(|e| e[l + 1] - e[l]).collect();
        for p in 0..np {
            let left = if p > 0 { Some(g[p - 1]) } else { None };
            let right = if p + 1 < np { Some(g[p + 1]) } else { None };
            let is_min = match (left, right) {
                (Some(a), Some(b)) => g[p] < a && g[p] <= b,
                (None, Some(b)) => g[p] < b,
                (Some(a), None) => g[p] < a,
                (None, None) => false,
            };
            if !is_min || g[p] >= gap_max {
                continue;
            }
            let boundary = left.is_none() || right.is_none();
            let (parameter, gap) = if boundary {
                (grid[p], g[p])
            } else {
                let x = [grid[p - 1], grid[p], grid[p + 1]];
                let y = [g[p - 1].powi(2), g[p].powi(2), g[p + 1].powi(2)];
                match parabola_vertex(x, y) {
                    Some((xv, yv)) => (xv, yv.max(0.0).sqrt().min(g[p])),
                    None => (grid[p], g[p]),
                }
            };
            out.push(Anticrossing {
                parameter,
                gap,
                lower: l,
                upper: l + 1,
                grid_index: p,
                boundary,
                resolved: true,
            });
        }
    }
    out.sort_by(|a, b| {
        a.parameter
            .total_cmp(&b.parameter)
            .then(a.lower.cmp(&b.lower))
    });
    out
}

pub fn find_anticrossings(scan: &SpectrumScan, gap_max: f64) -> Result<Vec<Anticrossing>> {
    if scan.levels() < 2 {
        return Err(Error::invalid(
            "levels",
            "anticrossing search needs at least two levels",
        ));
    }
    Ok(find_in_levels(&scan.grid, &scan.energies, gap_max))
}

/// Anticrossings of the tracked trap state, one per change of its level
/// index between neighbouring grid points.  A gap minimum of the same pair
/// within two points locates the event; otherwise it is reported unresolved.
pub fn trap_anticrossings(scan: &SpectrumScan, gap_max: f64) -> Result<Vec<Anticrossing>> {
    let minima: Vec<Anticrossing> = find_anticrossings(scan, f64::INFINITY)?
        .into_iter()
        .filter(|a| !a.boundary)
        .collect();
    let ti = &scan.trap_index;
    let mut out: Vec<Anticrossing> = Vec::new();
    for p in 0..scan.grid.len().saturating_sub(1) {
        if ti[p] == ti[p + 1] {
            continue;
        }
        let (lower, upper) = (ti[p].min(ti[p + 1]), ti[p].max(ti[p + 1]));
        if out
            .last()
            .is_some_and(|o| o.lower == lower && o.upper == upper && p.abs_diff(o.grid_index) <= 2)
        {
            continue;
        }
        let refined = minima
            .iter()
            .filter(|a| {
                a.lower == lower
                    && a.upper == upper
                    && a.grid_index + 1 >= p
                    && a.grid_index <= p + 2
            })
            .min_by(|a, b| a.gap.total_cmp(&b.gap))
            .cloned();
        let event = refined.unwrap_or_else(|| {
            let gap = |q: usize| scan.energies[q][upper] - scan.energies[q][lower];
            Anticrossing {
                parameter: 0.5 * (scan.grid[p] + scan.grid[p + 1]),
                gap: gap(p).min(gap(p + 1)),
                lower,
                upper,
                grid_index: p,
                boundary: false,
                resolved: false,
            }
        });
        if event.gap <= gap_max {
            out.push(event);
        }
    }
    Ok(out)
}

/// Boundary minima of gaps that touch the trap state, reported separately
/// because their location is not resolved by the grid.
pub fn trap_boundary_warnings(scan: &SpectrumScan, gap_max: f64) -> Result<Vec<Anticrossing>> {
    let all = find_anticrossings(scan, gap_max)?;
    Ok(all
        .into_iter()
        .filter(|ac| {
            ac.boundary
                && (scan.trap_index[ac.grid_index] == ac.lower
                    || scan.trap_index[ac.grid_index] == ac.upper)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(g: f64, grid: &[f64]) -> Vec<Vec<f64>> {
        grid.iter()
            .map(|&x| {
                let r = ((0.7 * (x - 0.313)).powi(2) + g * g).sqrt();
                vec![-r, r]
            })
            .collect()
    }

    #[test]
    fn two_level_gap() {
        let grid: Vec<f64> = (0..41).map(|i| -1.0 + 0.05 * i as f64).collect();
        for g in [0.2, 0.01, 1e-4] {
            let ac = find_in_levels(&grid, &two_level(g, &grid), 1.0);
            assert_eq!(ac.len(), 1);
            assert!(
                (ac[0].gap / (2.0 * g) - 1.0).abs() < 0.01,
                "{g} {:?}",
                ac[0]
            );
            assert!((ac[0].parameter - 0.313).abs() < 1e-6);
            assert!(!ac[0].boundary);
        }
    }

    #[test]
    fn monotone_and_boundary() {
        let grid: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let e: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x, x + 1.0]).collect();
        assert!(find_in_levels(&grid, &e, 100.0).is_empty());
        let e: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x, 2.0 * x + 1.0]).collect();
        assert!(find_in_levels(&grid, &e, 0.5).is_empty());
        let e: Vec<Vec<f64>> = grid.iter().map(|&x| vec![0.0, 0.1 + 0.01 * x]).collect();
        let ac = find_in_levels(&grid, &e, 1.0);
        assert_eq!(ac.len(), 1);
        assert!(ac[0].boundary && ac[0].grid_index == 0);
    }

    fn synthetic(grid: &[f64], g: f64) -> SpectrumScan {
        // flat trap level at 0 crossed by a steep level 10(x − 0.55)
        let mut energies = Vec::new();
        let mut trap_index = Vec::new();
        for &x in grid {
            let d = 5.0 * (x - 0.55);
            let r = (d * d + g * g).sqrt();
            energies.push(vec![-r, r]);
            trap_index.push(if x < 0.55 { 1 } else { 0 });
        }
        SpectrumScan {
            parameter: crate::assembly::ScanParameter::Separation,
            grid: grid.to_vec(),
            fixed: 0.0,
            characters: vec![vec![crate::assembly::StateCharacter::Trap; 2]; grid.len()],
            trap_overlap: vec![1.0; grid.len()],
            branches: Vec::new(),
            params: crate::params::nacs_default(),
            m_total: 1,
            j_max: 1,
            n_max: 0,
            rotational_offset: 0.0,
            energies,
            trap_index,
        }
    }

    #[test]
    fn trap_events_follow_index_changes() {
        let grid: Vec<f64> = (0..11).map(|i| 0.1 * i as f64).collect();
        let wide = trap_anticrossings(&synthetic(&grid, 0.6), 2.0).unwrap();
        assert_eq!(wide.len(), 1);
        assert!(wide[0].resolved);
        assert!((wide[0].gap - 1.2).abs() < 0.05, "{:?}", wide[0]);

        // no gap minimum between the samples: reported unresolved
        let mut sharp = synthetic(&grid, 1e-3);
        for (i, e) in sharp.energies.iter_mut().enumerate() {
            *e = vec![0.0, 1.0 - 0.05 * i as f64];
        }
        let narrow = trap_anticrossings(&sharp, 2.0).unwrap();
        assert_eq!(narrow.len(), 1);
        assert!(!narrow[0].resolved);
        assert!((narrow[0].parameter - 0.55).abs() < 1e-12);
        assert!((narrow[0].gap - 0.7).abs() < 1e-12);
        assert!(trap_anticrossings(&sharp, 0.5).unwrap().is_empty());
    }
}
