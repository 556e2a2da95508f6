use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cross_validate, CvPlan};
use crate::error::{Error, Result};
use crate::learner::{Matrix, SvmParams};

pub const DEFAULT_C_GRID: [f64; 8] = [0.1, 1.0, 5.0, 10.0, 1e2, 1e3, 1e4, 1e5];
pub const DEFAULT_GAMMA_GRID: [f64; 4] = [0.01, 0.1, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub c: f64,
    pub gamma: f64,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: GridCell,
    /// Every evaluated cell, C-major in grid order.
    pub cells: Vec<GridCell>,
}

/// `true` when `a` should be preferred over `b`: higher F1, then smaller C,
/// then smaller gamma.
fn better(a: &GridCell, b: &GridCell) -> bool {
    if a.mean_f1 != b.mean_f1 {
        return a.mean_f1 > b.mean_f1;
    }
    if a.c != b.c {
        return a.c < b.c;
    }
    a.gamma < b.gamma
}

/// Exhaustive cross-validated search. `base` supplies tolerance and cache
/// settings; its C and gamma are ignored.
pub fn grid_search(
    x: &Matrix,
    y: &[bool],
    c_grid: &[f64],
    gamma_grid: &[f64],
    base: &SvmParams,
    plan: &CvPlan,
) -> Result<GridResult> {
    if c_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::InvalidParameter("empty hyperparameter grid".into()));
    }
    let pairs: Vec<(f64, f64)> = c_grid
        .iter()
        .flat_map(|&c| gamma_grid.iter().map(move |&g| (c, g)))
        .collect();
    let cells = pairs
        .par_iter()
        .map(|&(c, gamma)| {
            let params = SvmParams { c, gamma, ..*base };
            cross_validate(x, y, &params, plan).map(|cv| GridCell {
                c,
                gamma,
                mean_f1: cv.mean_f1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = cells[0];
    for cell in &cells[1..] {
        if better(cell, &best) {
            best = *cell;
        }
    }
    Ok(GridResult { best, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelsel::kfold;

    fn blobs() -> (Matrix, Vec<bool>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..30 {
            let t = (i % 6) as f64 * 0.05;
            let positive = i % 2 == 1;
            let centre = if positive { 2.0 } else { -2.0 };
            rows.push([centre + t, centre - t]);
            y.push(positive);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn default_grid_has_32_cells() {
        let (x, y) = blobs();
        let plan = kfold(&y, 5, 0).unwrap();
        let r = grid_search(&x, &y, &DEFAULT_C_GRID, &DEFAULT_GAMMA_GRID, &SvmParams::default(), &plan)
            .unwrap();
        assert_eq!(r.cells.len(), 32);
        assert_eq!(r.best.mean_f1, 1.0);
        assert_eq!((r.best.c, r.best.gamma), (0.1, 0.01));
    }

    #[test]
    fn order_invariant() {
        let (x, y) = blobs();
        let plan = kfold(&y, 3, 4).unwrap();
        let p = SvmParams::default();
        let a = grid_search(&x, &y, &[5.0, 0.1, 1.0], &[1.0, 0.01], &p, &plan).unwrap();
        let b = grid_search(&x, &y, &[1.0, 5.0, 0.1], &[0.01, 1.0], &p, &plan).unwrap();
        assert_eq!(a.best, b.best);
    }

    #[test]
    fn tie_break() {
        let cell = |c, gamma| GridCell { c, gamma, mean_f1: 0.5 };
        assert!(better(&cell(0.1, 1.0), &cell(1.0, 0.01)));
        assert!(better(&cell(1.0, 0.01), &cell(1.0, 0.1)));
        assert!(!better(&cell(1.0, 0.1), &cell(1.0, 0.1)));
        let (x, y) = blobs();
        let plan = kfold(&y, 3, 4).unwrap();
        assert!(grid_search(&x, &y, &[], &[1.0], &SvmParams::default(), &plan).is_err());
    }
}
