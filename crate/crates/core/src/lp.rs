//! Small dense linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule. The
//! problems solved here have a handful of variables and at most a few dozen
//! rows, so there is no need for sparsity or factorization updates.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const MAX_ITERATIONS: usize = 50_000;

/// Outcome of `maximize c.x subject to A x <= b, x >= 0`.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Unbounded,
    Infeasible,
}

struct Tableau {
    // rows[i] has layout: [structural | slack | artificial | rhs]
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    n_struct: usize,
    n_slack: usize,
    n_art: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n_struct + self.n_slack + self.n_art
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= scale;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row && r[col].abs() > 0.0 {
                let factor = r[col];
                for (v, &p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                r[col] = 0.0;
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for (v, &p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Run the simplex loop on the current objective row. Returns false if
    /// the objective is unbounded. Bland's rule: entering column is the
    /// lowest-index improving column, leaving row breaks ratio ties by the
    /// lowest basis index.
    fn optimize(&mut self, allowed_cols: usize) -> Result<bool> {
        for _ in 0..MAX_ITERATIONS {
            let Some(col) = (0..allowed_cols).find(|&j| self.obj[j] > COST_EPS) else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            let rhs_idx = self.width();
            for i in 0..self.rows.len() {
                let coeff = self.rows[i][col];
                if coeff > PIVOT_EPS {
                    let ratio = self.rows[i][rhs_idx] / coeff;
                    let better = match leaving {
                        None => true,
                        Some((best_row, best_ratio)) => {
                            ratio < best_ratio - PIVOT_EPS
                                || (ratio < best_ratio + PIVOT_EPS
                                    && self.basis[i] < self.basis[best_row])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return Ok(false),
            }
        }
        Err(Error::InternalInconsistency(
            "simplex iteration limit exceeded".into(),
        ))
    }
}

/// Maximize `c.x` subject to `rows[i].x <= b[i]` and `x >= 0`. Right-hand
/// sides may be negative; feasibility is established by a phase-one pass
/// with artificial variables.
pub fn solve_max(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let n = c.len();
    let m = rows.len();
    assert_eq!(b.len(), m);

    let n_art = b.iter().filter(|&&bi| bi < 0.0).count();
    let width = n + m + n_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        obj: vec![0.0; width + 1],
        basis: vec![0; m],
        n_struct: n,
        n_slack: m,
        n_art,
    };

    let mut art = 0;
    for i in 0..m {
        assert_eq!(rows[i].len(), n);
        let mut row = vec![0.0; width + 1];
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = flip * rows[i][j];
        }
        row[n + i] = flip; // slack
        row[width] = flip * b[i];
        if b[i] < 0.0 {
            row[n + m + art] = 1.0;
            tab.basis[i] = n + m + art;
            art += 1;
        } else {
            tab.basis[i] = n + i;
        }
        tab.rows.push(row);
    }

    if n_art > 0 {
        // Phase one: maximize minus the sum of artificials, i.e. price the
        // artificial basics into the objective row.
        for i in 0..m {
            if tab.basis[i] >= n + m {
                for j in 0..=width {
                    tab.obj[j] += tab.rows[i][j];
                }
            }
        }
        for j in n + m..width {
            tab.obj[j] -= 1.0;
        }
        tab.optimize(n + m)?;
        if tab.obj[width] > 1e-7 {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot any artificial still in the basis out on a structural or
        // slack column; a row with no such column is redundant.
        for i in 0..m {
            if tab.basis[i] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| tab.rows[i][j].abs() > PIVOT_EPS) {
                    tab.pivot(i, col);
                }
            }
        }
    }

    tab.obj = vec![0.0; width + 1];
    tab.obj[..n].copy_from_slice(c);
    for i in 0..m {
        let var = tab.basis[i];
        if var < n && c[var] != 0.0 {
            let factor = c[var];
            for j in 0..=width {
                tab.obj[j] -= factor * tab.rows[i][j];
            }
        }
    }
    if !tab.optimize(n + m)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rows[i][width];
        }
    }
    Ok(LpOutcome::Optimal {
        objective: -tab.obj[width],
        x,
    })
}
