//! Dense two-phase tableau simplex for small linear programs.
//!
//! Minimizes `c . x` subject to sparse rows `a . x (<=|>=|=) b` and
//! `x >= lower`. Pricing is Dantzig's rule with a two-pass ratio test; after
//! a run of degenerate pivots the solver switches to Bland's rule until the
//! objective moves again, which rules out cycling.

use thiserror::Error;

pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

const PIVOT_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-13;
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn with_vars(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            lower: vec![0.0; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    /// CPLEX LP text. `names[j]` names variable `j`.
    pub fn to_lp_format(&self, names: &[String]) -> String {
        use std::fmt::Write;
        assert_eq!(names.len(), self.num_vars());
        let term_list = |coeffs: &mut dyn Iterator<Item = (usize, f64)>| {
            let mut s = String::new();
            for (j, a) in coeffs {
                let sign = if a < 0.0 { '-' } else { '+' };
                if s.is_empty() && sign == '+' {
                    write!(s, "{} {}", a.abs(), names[j]).unwrap();
                } else {
                    write!(s, " {} {} {}", sign, a.abs(), names[j]).unwrap();
                }
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        };
        let mut out = String::from("Minimize\n obj: ");
        let mut obj = self
            .objective
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| c != 0.0);
        out += &term_list(&mut obj);
        out += "\nSubject To\n";
        for (i, con) in self.constraints.iter().enumerate() {
            let op = match con.cmp {
                Cmp::Le => "<=",
                Cmp::Ge => ">=",
                Cmp::Eq => "=",
            };
            let mut it = con.coeffs.iter().copied();
            writeln!(out, " c{}: {} {} {}", i, term_list(&mut it), op, con.rhs).unwrap();
        }
        out += "Bounds\n";
        for (j, &lb) in self.lower.iter().enumerate() {
            writeln!(out, " {} >= {}", names[j], lb).unwrap();
        }
        out += "End\n";
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Optimality and feasibility tolerance.
    pub tolerance: f64,
    /// Scale of the rhs perturbation; 0 disables it.
    pub perturbation: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: 1e-9,
            perturbation: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint: `c_j - sum_i duals[i] * a_ij` is the
    /// reduced cost of variable `j`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("linear program is infeasible (phase one residual {0:e})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("no convergence after {0} iterations")]
    IterationLimit(usize),
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
    tol: f64,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn obj_row(&self) -> usize {
        self.rows
    }

    fn count_iteration(&mut self) -> Result<(), SimplexError> {
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(SimplexError::IterationLimit(self.max_iterations));
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(r, c);
        let mut nz = Vec::new();
        for j in 0..w {
            let v = &mut self.data[r * w + j];
            if *v != 0.0 {
                *v *= inv;
                if v.abs() < ZERO_TOL {
                    *v = 0.0;
                } else {
                    nz.push(j);
                }
            }
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let update = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for &j in &nz {
                    let v = &mut row[j];
                    *v -= f * prow[j];
                    if v.abs() < ZERO_TOL {
                        *v = 0.0;
                    }
                }
                row[c] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(update);
        after.chunks_mut(w).for_each(update);
        self.basis[r] = c;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let obj = self.obj_row() * self.width;
        let rc = &self.data[obj..obj + self.width - 1];
        if bland {
            (0..rc.len()).find(|&j| self.allowed[j] && rc[j] < -self.tol)
        } else {
            let mut best = None;
            let mut best_val = -self.tol;
            for (j, &v) in rc.iter().enumerate() {
                if self.allowed[j] && v < best_val {
                    best_val = v;
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Textbook minimum-ratio row, ties to the lowest basic index.
    fn leaving_bland(&self, c: usize) -> Option<usize> {
        let rhs = self.rhs_col();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_TOL {
                let ratio = self.at(i, rhs).max(0.0) / a;
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        best.map(|b| b.0)
    }

    /// Two-pass (Harris) ratio test: among rows whose ratio is within the
    /// feasibility tolerance of the minimum, take the largest pivot.
    fn leaving_harris(&self, c: usize) -> Option<usize> {
        let rhs = self.rhs_col();
        let mut bound = f64::INFINITY;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_TOL {
                bound = bound.min((self.at(i, rhs).max(0.0) + self.tol) / a);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_TOL && self.at(i, rhs).max(0.0) / a <= bound && best.map_or(true, |(_, ba)| a > ba) {
                best = Some((i, a));
            }
        }
        best.map(|b| b.0)
    }

    fn clamp_rhs(&mut self) {
        let rhs = self.rhs_col();
        for i in 0..self.rows {
            let v = &mut self.data[i * self.width + rhs];
            if *v < 0.0 && *v > -self.tol {
                *v = 0.0;
            }
        }
    }

    /// Primal simplex on the current objective row.
    fn run(&mut self) -> Result<(), SimplexError> {
        let mut streak = 0;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let Some(c) = self.entering(bland) else {
                return Ok(());
            };
            let leaving = if bland {
                self.leaving_bland(c)
            } else {
                self.leaving_harris(c)
            };
            let Some(r) = leaving else {
                return Err(SimplexError::Unbounded);
            };
            self.count_iteration()?;
            if self.at(r, self.rhs_col()).max(0.0) / self.at(r, c) <= self.tol {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, c);
            self.clamp_rhs();
        }
    }

    /// Dual simplex from a dual-feasible basis until every basic value is
    /// nonnegative.
    fn run_dual(&mut self) -> Result<(), SimplexError> {
        let rhs = self.rhs_col();
        let obj = self.obj_row();
        loop {
            let mut row = None;
            let mut worst = -self.tol;
            for i in 0..self.rows {
                if self.at(i, rhs) < worst {
                    worst = self.at(i, rhs);
                    row = Some(i);
                }
            }
            let Some(r) = row else {
                self.clamp_rhs();
                return Ok(());
            };
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..rhs {
                let a = self.at(r, j);
                if self.allowed[j] && a < -PIVOT_TOL {
                    let ratio = self.at(obj, j).max(0.0) / -a;
                    let better = match best {
                        None => true,
                        Some((_, br, ba)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && -a > ba),
                    };
                    if better {
                        best = Some((j, ratio, -a));
                    }
                }
            }
            let Some((c, _, _)) = best else {
                return Err(SimplexError::Infeasible(-worst));
            };
            self.count_iteration()?;
            self.pivot(r, c);
        }
    }

    /// Loads `cost` into the objective row and prices out the basis.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        let obj = self.obj_row() * w;
        self.data[obj..obj + w].fill(0.0);
        self.data[obj..obj + cost.len()].copy_from_slice(cost);
        for r in 0..self.rows {
            let cb = cost.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    let v = self.data[r * w + j];
                    if v != 0.0 {
                        self.data[obj + j] -= cb * v;
                    }
                }
            }
        }
    }

    /// Replaces the rhs column by `B^-1 b`, reading `B^-1` off the columns
    /// that formed the initial identity basis.
    fn reset_rhs(&mut self, b: &[f64], initial: &[usize]) {
        let rhs = self.rhs_col();
        for r in 0..=self.rows {
            let v: f64 = initial.iter().zip(b).map(|(&col, &bi)| self.at(r, col) * bi).sum();
            self.data[r * self.width + rhs] = v;
        }
    }
}

/// Deterministic rhs perturbation for row `i`, in `[1, 2) * scale`.
fn perturbation(i: usize, scale: f64) -> f64 {
    let h = (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11;
    scale * (1.0 + h as f64 / (1u64 << 53) as f64)
}

/// Solves `lp` to optimality.
///
/// Right-hand sides are first perturbed by `opts.perturbation` to break
/// degeneracy; at the optimum the true right-hand sides are restored through
/// the basis inverse and any resulting infeasibility is removed with dual
/// simplex pivots. If the perturbed problem is infeasible the solve is
/// repeated without perturbation.
pub fn solve(lp: &LinearProgram, opts: SimplexOptions) -> Result<SimplexSolution, SimplexError> {
    match solve_with(lp, opts, opts.perturbation) {
        Err(SimplexError::Infeasible(_)) if opts.perturbation > 0.0 => solve_with(lp, opts, 0.0),
        other => other,
    }
}

fn solve_with(lp: &LinearProgram, opts: SimplexOptions, perturb: f64) -> Result<SimplexSolution, SimplexError> {
    let n = lp.num_vars();
    assert_eq!(lp.lower.len(), n);
    let m = lp.constraints.len();

    // Shift x = lower + y and make every rhs nonnegative.
    let mut rows: Vec<(Vec<(usize, f64)>, Cmp, f64)> = Vec::with_capacity(m);
    let mut flipped = vec![false; m];
    for (i, con) in lp.constraints.iter().enumerate() {
        let shift: f64 = con.coeffs.iter().map(|&(j, a)| a * lp.lower[j]).sum();
        let mut rhs = con.rhs - shift;
        let mut coeffs = con.coeffs.clone();
        let mut cmp = con.cmp;
        if rhs < 0.0 {
            flipped[i] = true;
            rhs = -rhs;
            coeffs.iter_mut().for_each(|(_, a)| *a = -*a);
            cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        rows.push((coeffs, cmp, rhs));
    }

    let slacks = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Cmp::Le).count();
    let cols = n + slacks + artificials;
    let width = cols + 1;
    let mut t = Tableau {
        rows: m,
        width,
        data: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
        allowed: vec![true; cols],
        iterations: 0,
        max_iterations: opts.max_iterations,
        tol: opts.tolerance,
    };
    let mut next_slack = n;
    let mut next_art = n + slacks;
    let mut b = Vec::with_capacity(m);
    for (i, (coeffs, cmp, rhs)) in rows.iter().enumerate() {
        let row = i * width;
        for &(j, a) in coeffs {
            t.data[row + j] += a;
        }
        b.push(*rhs);
        t.data[row + cols] = if perturb > 0.0 { rhs + perturbation(i, perturb) } else { *rhs };
        match cmp {
            Cmp::Le => {
                t.data[row + next_slack] = 1.0;
                t.basis[i] = next_slack;
                next_slack += 1;
            }
            Cmp::Ge => {
                t.data[row + next_slack] = -1.0;
                next_slack += 1;
                t.data[row + next_art] = 1.0;
                t.basis[i] = next_art;
                next_art += 1;
            }
            Cmp::Eq => {
                t.data[row + next_art] = 1.0;
                t.basis[i] = next_art;
                next_art += 1;
            }
        }
    }
    let initial = t.basis.clone();

    let first_art = n + slacks;
    if artificials > 0 {
        let mut phase_one = vec![0.0; cols];
        phase_one[first_art..].fill(1.0);
        t.set_objective(&phase_one);
        t.run()?;
        let residual = -t.at(t.obj_row(), cols);
        if residual > opts.tolerance * (1.0 + m as f64) {
            return Err(SimplexError::Infeasible(residual));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] >= first_art {
                let best = (0..first_art)
                    .filter(|&j| t.at(r, j).abs() > PIVOT_TOL)
                    .max_by(|&a, &b| t.at(r, a).abs().total_cmp(&t.at(r, b).abs()));
                if let Some(c) = best {
                    t.pivot(r, c);
                }
            }
        }
        t.allowed[first_art..].fill(false);
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    t.set_objective(&cost);
    t.run()?;
    if perturb > 0.0 {
        t.reset_rhs(&b, &initial);
        t.run_dual()?;
        // Dual pivots keep optimality only up to rounding; finish with primal.
        t.run()?;
    }

    let mut values = lp.lower.clone();
    for r in 0..m {
        let j = t.basis[r];
        if j < n {
            values[j] += t.at(r, cols).max(0.0);
        }
    }
    let objective = values.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    // The initial basis columns carry zero cost, so their reduced costs are
    // the negated multipliers of the normalized rows.
    let duals = (0..m)
        .map(|i| {
            let y = -t.at(t.obj_row(), initial[i]);
            if flipped[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(SimplexSolution {
        values,
        objective,
        duals,
        iterations: t.iterations,
    })
}
