use super::{LinearProgram, LpError, LpSolution, LpStatus, Sense};

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-11;
const PHASE_ONE_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 20_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

/// Dense tableau. Row `i` holds `B^-1 A` for constraint `i` followed by the
/// basic solution value in the last column.
struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Reduced costs `c - c_B B^-1 A`, last entry is `-(objective value)`.
    reduced: Vec<f64>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let mut kinds = vec![ColumnKind::Structural; n];
        // Normalize to nonnegative right-hand sides first so that the
        // starting basis is primal feasible.
        let normalized: Vec<(Vec<f64>, Sense, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.sense {
                        Sense::Le => Sense::Ge,
                        Sense::Ge => Sense::Le,
                        Sense::Eq => Sense::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.sense, c.rhs)
                }
            })
            .collect();

        let slack_count = normalized
            .iter()
            .filter(|(_, s, _)| *s != Sense::Eq)
            .count();
        let artificial_count = normalized
            .iter()
            .filter(|(_, s, _)| *s != Sense::Le)
            .count();
        kinds.extend(std::iter::repeat(ColumnKind::Slack).take(slack_count));
        kinds.extend(std::iter::repeat(ColumnKind::Artificial).take(artificial_count));
        let width = kinds.len();

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let mut next_slack = n;
        let mut next_artificial = n + slack_count;
        for (coeffs, sense, rhs) in normalized {
            let mut row = vec![0.0; width + 1];
            row[..n].copy_from_slice(&coeffs);
            row[width] = rhs;
            match sense {
                Sense::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
                Sense::Eq => {
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }

        Self {
            rows,
            basis,
            kinds,
            reduced: vec![0.0; width + 1],
        }
    }

    fn price(&mut self, costs: &[f64]) {
        let width = self.width();
        let mut reduced = vec![0.0; width + 1];
        reduced[..width].copy_from_slice(costs);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = costs[b];
            if cb != 0.0 {
                for (r, a) in reduced.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
        self.reduced = reduced;
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.rows[r][q];
        for a in self.rows[r].iter_mut() {
            *a /= p;
        }
        self.rows[r][q] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (a, pa) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * pa;
                }
                row[q] = 0.0;
            }
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for (a, pa) in self.reduced.iter_mut().zip(&pivot_row) {
                *a -= f * pa;
            }
            self.reduced[q] = 0.0;
        }
        self.basis[r] = q;
    }

    /// Runs Bland-rule iterations until optimality. Returns `false` on an
    /// unbounded ray.
    fn optimize(&mut self, allowed: impl Fn(ColumnKind) -> bool, cost_scale: f64, pivots: &mut usize) -> Result<bool, LpError> {
        let width = self.width();
        let tol = REDUCED_COST_TOL * cost_scale.max(f64::MIN_POSITIVE);
        loop {
            let entering = (0..width).find(|&j| allowed(self.kinds[j]) && self.reduced[j] > tol);
            let Some(q) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[q];
                if a > PIVOT_TOL {
                    let ratio = row[width].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * lr.abs().max(1.0);
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, q);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
        }
    }

    /// Pivots zero-level artificials out of the basis, dropping rows that
    /// turn out to be linearly dependent.
    fn expel_artificials(&mut self) {
        let width = self.width();
        let mut i = 0;
        while i < self.rows.len() {
            if self.kinds[self.basis[i]] == ColumnKind::Artificial {
                let candidate = (0..width)
                    .filter(|&j| self.kinds[j] != ColumnKind::Artificial)
                    .find(|&j| self.rows[i][j].abs() > 1e-9);
                match candidate {
                    Some(q) => self.pivot(i, q),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}

/// Maximizes `lp.objective` over the feasible polytope.
///
/// Deterministic for a fixed input: the entering column is the lowest-index
/// improving column and ties in the ratio test go to the lowest basic index.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars;
    let mut tab = Tableau::build(lp);
    let width = tab.width();
    let mut pivots = 0;

    let has_artificials = tab.kinds.contains(&ColumnKind::Artificial);
    if has_artificials {
        let costs: Vec<f64> = tab
            .kinds
            .iter()
            .map(|k| if *k == ColumnKind::Artificial { -1.0 } else { 0.0 })
            .collect();
        tab.price(&costs);
        tab.optimize(|_| true, 1.0, &mut pivots)?;
        let rhs_scale = lp
            .constraints
            .iter()
            .map(|c| c.rhs.abs())
            .fold(1.0, f64::max);
        let infeasibility = tab.reduced[width];
        if infeasibility > PHASE_ONE_TOL * rhs_scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                point: vec![0.0; n],
            });
        }
        tab.expel_artificials();
    }

    let mut costs = vec![0.0; width];
    costs[..n].copy_from_slice(&lp.objective);
    tab.price(&costs);
    let scale = lp.objective.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let bounded = tab.optimize(|k| k != ColumnKind::Artificial, scale, &mut pivots)?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::INFINITY,
            point: vec![0.0; n],
        });
    }

    let mut point = vec![0.0; n];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        if b < n {
            point[b] = row[width];
        }
    }
    for x in point.iter_mut() {
        if *x < 0.0 && *x > -1e-9 {
            *x = 0.0;
        }
    }
    let value = lp.objective_value(&point);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
    })
}
