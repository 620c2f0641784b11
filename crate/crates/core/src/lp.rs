//! Dense two-phase simplex with Bland's rule, for the small LPs built by the
//! constraint-qualification and multiplier checks.
//!
//! Problems are stated as
//!
//! ```text
//! maximize c·x  subject to  A_eq x = b_eq,  A_ge x >= b_ge,  lo <= x <= hi
//! ```
//!
//! with infinite bounds allowed.

use thiserror::Error;

/// Largest accepted number of variables.
pub const MAX_VARS: usize = 64;
/// Largest accepted number of equality plus inequality rows.
pub const MAX_ROWS: usize = 256;
/// Entries smaller than this are treated as zero when pivoting.
pub const PIVOT_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    /// Rows `a·x >= b`.
    pub inequalities: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// `maximize objective·x` over free variables.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let k = objective.len();
        LinearProgram {
            objective,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower: vec![f64::NEG_INFINITY; k],
            upper: vec![f64::INFINITY; k],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, a: Vec<f64>, b: f64) -> &mut Self {
        self.equalities.push((a, b));
        self
    }

    pub fn add_ge(&mut self, a: Vec<f64>, b: f64) -> &mut Self {
        self.inequalities.push((a, b));
        self
    }

    pub fn add_le(&mut self, a: Vec<f64>, b: f64) -> &mut Self {
        self.inequalities.push((a.into_iter().map(|v| -v).collect(), -b));
        self
    }

    pub fn bounds(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.lower[var] = lo;
        self.upper[var] = hi;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, *value)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("LP too large: {vars} variables, {rows} rows (limits {MAX_VARS}, {MAX_ROWS})")]
    TooLarge { vars: usize, rows: usize },
    #[error("row {row} has {found} coefficients, expected {expected}")]
    Dimension {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("variable {var} has bounds [{lo}, {hi}]")]
    InvalidBounds { var: usize, lo: f64, hi: f64 },
    #[error("numerically singular basis: final residual {residual:e}")]
    Singular { residual: f64 },
    #[error("simplex did not terminate within {MAX_ITERATIONS} pivots")]
    IterationLimit,
}

#[derive(Debug, Clone, Copy)]
enum Column {
    /// x = lo + y
    Shift { col: usize, lo: f64 },
    /// x = hi - y
    Flip { col: usize, hi: f64 },
    /// x = y+ - y-
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, PartialEq)]
enum Sense {
    Eq,
    Ge,
    Le,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j` for a maximization.
    reduced: Vec<f64>,
    value: f64,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c];
            if factor != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                self.rows[i][c] = 0.0;
                self.rhs[i] -= factor * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-12 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let factor = self.reduced[c];
        if factor != 0.0 {
            for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.reduced[c] = 0.0;
            self.value += factor * pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over the allowed columns. `Ok(false)` means
    /// unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool, LpError> {
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..allowed).find(|&j| self.reduced[j] > PIVOT_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                        if ratio < best_ratio && !tie
                            || tie && self.basis[i] < self.basis[best]
                        {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            match leaving {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(LpError::IterationLimit)
    }
}

fn validate(lp: &LinearProgram) -> Result<(), LpError> {
    let k = lp.num_vars();
    let rows = lp.equalities.len() + lp.inequalities.len();
    if k > MAX_VARS || rows > MAX_ROWS {
        return Err(LpError::TooLarge { vars: k, rows });
    }
    for (row, (a, _)) in lp.equalities.iter().chain(&lp.inequalities).enumerate() {
        if a.len() != k {
            return Err(LpError::Dimension {
                row,
                expected: k,
                found: a.len(),
            });
        }
    }
    if lp.lower.len() != k || lp.upper.len() != k {
        return Err(LpError::Dimension {
            row: usize::MAX,
            expected: k,
            found: lp.lower.len().min(lp.upper.len()),
        });
    }
    for var in 0..k {
        let (lo, hi) = (lp.lower[var], lp.upper[var]);
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(LpError::InvalidBounds { var, lo, hi });
        }
    }
    Ok(())
}

/// Solves the LP. Degenerate problems are the common case; Bland's rule
/// guarantees termination.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    validate(lp)?;
    let k = lp.num_vars();

    let mut columns = Vec::with_capacity(k);
    let mut ncols = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for var in 0..k {
        let (lo, hi) = (lp.lower[var], lp.upper[var]);
        let column = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            Column::Shift { col: ncols, lo }
        } else if hi.is_finite() {
            Column::Flip { col: ncols, hi }
        } else {
            ncols += 1;
            Column::Split {
                pos: ncols - 1,
                neg: ncols,
            }
        };
        ncols += 1;
        columns.push(column);
    }

    let substitute = |a: &[f64], b: f64| -> (Vec<f64>, f64) {
        let mut row = vec![0.0; ncols];
        let mut rhs = b;
        for (coef, column) in a.iter().zip(&columns) {
            match *column {
                Column::Shift { col, lo } => {
                    row[col] += coef;
                    rhs -= coef * lo;
                }
                Column::Flip { col, hi } => {
                    row[col] -= coef;
                    rhs -= coef * hi;
                }
                Column::Split { pos, neg } => {
                    row[pos] += coef;
                    row[neg] -= coef;
                }
            }
        }
        (row, rhs)
    };

    let mut rows: Vec<(Vec<f64>, f64, Sense)> = Vec::new();
    for (a, b) in &lp.equalities {
        let (r, rhs) = substitute(a, *b);
        rows.push((r, rhs, Sense::Eq));
    }
    for (a, b) in &lp.inequalities {
        let (r, rhs) = substitute(a, *b);
        rows.push((r, rhs, Sense::Ge));
    }
    for (col, width) in &bound_rows {
        let mut r = vec![0.0; ncols];
        r[*col] = 1.0;
        rows.push((r, *width, Sense::Le));
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.2 != Sense::Eq).count();
    let first_slack = ncols;
    let first_art = ncols + slack_count;
    let total = first_art + m;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        reduced: vec![0.0; total],
        value: 0.0,
    };
    let mut slack = first_slack;
    for (i, (coefs, rhs, sense)) in rows.into_iter().enumerate() {
        let mut row = vec![0.0; total];
        row[..ncols].copy_from_slice(&coefs);
        match sense {
            Sense::Ge => {
                row[slack] = -1.0;
                slack += 1;
            }
            Sense::Le => {
                row[slack] = 1.0;
                slack += 1;
            }
            Sense::Eq => {}
        }
        let mut rhs = rhs;
        if rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            rhs = -rhs;
        }
        row[first_art + i] = 1.0;
        tab.rows.push(row);
        tab.rhs.push(rhs);
        tab.basis.push(first_art + i);
    }

    // phase I: maximize -sum(artificials)
    for i in 0..m {
        for j in 0..first_art {
            tab.reduced[j] += tab.rows[i][j];
        }
        tab.value -= tab.rhs[i];
    }
    tab.optimize(first_art)?;
    let rhs_scale = tab.rhs.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    if tab.value < -RESIDUAL_TOL * rhs_scale {
        return Ok(LpOutcome::Infeasible);
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= first_art {
            let replacement = (0..first_art).find(|&j| tab.rows[r][j].abs() > PIVOT_TOL);
            match replacement {
                Some(c) => tab.pivot(r, c),
                None => {
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // phase II
    let mut cost = vec![0.0; total];
    for (coef, column) in lp.objective.iter().zip(&columns) {
        match *column {
            Column::Shift { col, .. } => cost[col] += coef,
            Column::Flip { col, .. } => cost[col] -= coef,
            Column::Split { pos, neg } => {
                cost[pos] += coef;
                cost[neg] -= coef;
            }
        }
    }
    tab.reduced = cost.clone();
    tab.value = 0.0;
    for i in 0..tab.rows.len() {
        let cb = cost[tab.basis[i]];
        if cb != 0.0 {
            for j in 0..total {
                tab.reduced[j] -= cb * tab.rows[i][j];
            }
            tab.value += cb * tab.rhs[i];
        }
    }
    for j in first_art..total {
        tab.reduced[j] = 0.0;
    }
    if !tab.optimize(first_art)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![0.0; total];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rhs[i].max(0.0);
    }
    let x: Vec<f64> = columns
        .iter()
        .map(|column| match *column {
            Column::Shift { col, lo } => lo + y[col],
            Column::Flip { col, hi } => hi - y[col],
            Column::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let residual = max_violation(lp, &x);
    if residual > RESIDUAL_TOL {
        return Err(LpError::Singular { residual });
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
    Ok(LpOutcome::Optimal { x, value })
}

/// Largest constraint or bound violation of `x`, each row scaled by
/// `1 + |b| + sum |a_i x_i|`.
pub fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    let scaled = |a: &[f64], b: f64| {
        let lhs: f64 = a.iter().zip(x).map(|(u, v)| u * v).sum();
        let scale = 1.0 + b.abs() + a.iter().zip(x).map(|(u, v)| (u * v).abs()).sum::<f64>();
        (lhs - b, scale)
    };
    for (a, b) in &lp.equalities {
        let (gap, scale) = scaled(a, *b);
        worst = worst.max(gap.abs() / scale);
    }
    for (a, b) in &lp.inequalities {
        let (gap, scale) = scaled(a, *b);
        worst = worst.max((-gap).max(0.0) / scale);
    }
    for (i, v) in x.iter().enumerate() {
        worst = worst.max((lp.lower[i] - v).max(0.0) / (1.0 + v.abs()));
        worst = worst.max((v - lp.upper[i]).max(0.0) / (1.0 + v.abs()));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.bounds(0, 0.0, 3.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out, LpOutcome::Optimal { x: vec![3.0], value: 3.0 });
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::maximize(vec![0.0]);
        lp.add_ge(vec![1.0], 1.0).add_le(vec![1.0], 0.0);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn box_maximum() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.bounds(0, -1.0, 1.0).bounds(1, -1.0, 1.0);
        let (x, v) = solve(&lp).unwrap().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(x, vec![1.0, 1.0]);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.add_ge(vec![1.0, -1.0], 0.0);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_and_flipped_variables() {
        // min x + y  with x >= -2 (free var), y <= 5 and y >= x + 1
        let mut lp = LinearProgram::maximize(vec![-1.0, -1.0]);
        lp.add_ge(vec![1.0, 0.0], -2.0)
            .add_ge(vec![-1.0, 1.0], 1.0)
            .bounds(1, f64::NEG_INFINITY, 5.0);
        let (x, v) = solve(&lp).unwrap().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((v - 3.0).abs() < 1e-12, "{v}");
        assert!((x[0] + 2.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.add_eq(vec![1.0, 1.0], 1.0)
            .add_eq(vec![2.0, 2.0], 2.0)
            .bounds(0, 0.0, f64::INFINITY)
            .bounds(1, 0.0, f64::INFINITY);
        let (x, v) = solve(&lp).unwrap().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(x, vec![0.0, 1.0]);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // classic cycling example (Beale) under the largest-coefficient rule
        let mut lp = LinearProgram::maximize(vec![0.75, -20.0, 0.5, -6.0]);
        lp.add_le(vec![0.25, -8.0, -1.0, 9.0], 0.0)
            .add_le(vec![0.5, -12.0, -0.5, 3.0], 0.0)
            .add_le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        for v in 0..4 {
            lp.bounds(v, 0.0, f64::INFINITY);
        }
        let (_, v) = solve(&lp).unwrap().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((v - 1.25).abs() < 1e-12, "{v}");
    }

    #[test]
    fn size_limits() {
        let lp = LinearProgram::maximize(vec![0.0; MAX_VARS + 1]);
        assert!(matches!(solve(&lp), Err(LpError::TooLarge { .. })));
    }

    #[test]
    fn rejects_bad_bounds_and_rows() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.bounds(0, 1.0, 0.0);
        assert!(matches!(solve(&lp), Err(LpError::InvalidBounds { .. })));
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_ge(vec![1.0, 2.0], 0.0);
        assert!(matches!(solve(&lp), Err(LpError::Dimension { .. })));
    }
}
