//! Two-phase dense simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as maximization over variables with per-variable
//! bounds and row relations; everything is canonicalized internally to
//! standard form with slack/artificial variables and split free variables.

use crate::error::NumericsError;

/// Absolute feasibility tolerance on scaled rows.
pub const FEAS_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// A maximization LP: max c'x s.t. A x (rel) b, lower <= x <= upper.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// LP with all variables nonnegative and no constraints yet.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.objective.len(), "row length mismatch");
        self.rows.push(coeffs);
        self.relations.push(rel);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<(), NumericsError> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(NumericsError::Dimension("bound length mismatch".into()));
        }
        if self.rows.len() != self.rhs.len() || self.rows.len() != self.relations.len() {
            return Err(NumericsError::Dimension("row/rhs/relation count mismatch".into()));
        }
        if self.rows.iter().any(|r| r.len() != n) {
            return Err(NumericsError::Dimension("constraint row length mismatch".into()));
        }
        Ok(())
    }

    /// Max violation of constraints and bounds at `x`, with each row scaled
    /// by its largest coefficient magnitude.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (row, (rel, &b)) in self.rows.iter().zip(self.relations.iter().zip(&self.rhs)) {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let scale = row.iter().fold(b.abs(), |acc, a| acc.max(a.abs())).max(1.0);
            let v = match rel {
                Relation::Le => (lhs - b) / scale,
                Relation::Ge => (b - lhs) / scale,
                Relation::Eq => (lhs - b).abs() / scale,
            };
            worst = worst.max(v);
        }
        for ((&l, &u), &v) in self.lower.iter().zip(&self.upper).zip(x) {
            if l.is_finite() {
                worst = worst.max(l - v);
            }
            if u.is_finite() {
                worst = worst.max(v - u);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub solution: Option<Vec<f64>>,
    pub objective: Option<f64>,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// One canonical variable: contributes `sign * y` to original variable `orig`.
#[derive(Clone, Copy)]
struct CanVar {
    orig: usize,
    sign: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>, // m x (ncols + 1), last entry is rhs
    basis: Vec<usize>,
    ncols: usize,
    banned: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximize `obj` with Bland's rule. Returns Some(()) on optimality,
    /// None when unbounded.
    fn simplex(&mut self, obj: &[f64], cap: usize) -> Result<Option<()>, NumericsError> {
        let m = self.rows.len();
        let mut objrow = vec![0.0; self.ncols + 1];
        objrow[..self.ncols].copy_from_slice(obj);
        for (i, &b) in self.basis.iter().enumerate() {
            let c = obj[b];
            if c != 0.0 {
                let row = self.rows[i].clone();
                for (v, rv) in objrow.iter_mut().zip(&row) {
                    *v -= c * rv;
                }
            }
        }
        for iter in 0.. {
            if iter > cap {
                return Err(NumericsError::Numerical(format!(
                    "simplex exceeded iteration cap {cap}"
                )));
            }
            // Bland: entering variable is the lowest admissible index.
            let entering = (0..self.ncols)
                .find(|&j| !self.banned[j] && objrow[j] > COST_TOL);
            let Some(col) = entering else {
                return Ok(Some(()));
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rows[i][self.ncols] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((bi, br)) => {
                            // Ties broken by lowest basic-variable index (Bland).
                            if ratio < br - 1e-12
                                || (ratio < br + 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Ok(None);
            };
            self.pivot(row, col);
            let f = objrow[col];
            if f != 0.0 {
                for (v, rv) in objrow.iter_mut().zip(&self.rows[row]) {
                    *v -= f * rv;
                }
            }
        }
        unreachable!()
    }
}

/// Solve with the two-phase simplex method.
pub fn lp_solve(p: &LinearProgram) -> Result<LpOutcome, NumericsError> {
    p.validate()?;
    let n = p.objective.len();

    // Canonical variables: shift/negate/split so every variable is >= 0.
    let mut can_vars: Vec<CanVar> = Vec::new();
    let mut base = vec![0.0; n];
    let mut extra_bound_rows: Vec<(usize, f64)> = Vec::new(); // (canonical var, ub)
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        if l.is_finite() && u.is_finite() && u < l {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                solution: None,
                objective: None,
            });
        }
        if l.is_finite() {
            base[j] = l;
            let idx = can_vars.len();
            can_vars.push(CanVar { orig: j, sign: 1.0 });
            if u.is_finite() {
                extra_bound_rows.push((idx, u - l));
            }
        } else if u.is_finite() {
            base[j] = u;
            can_vars.push(CanVar { orig: j, sign: -1.0 });
        } else {
            can_vars.push(CanVar { orig: j, sign: 1.0 });
            can_vars.push(CanVar { orig: j, sign: -1.0 });
        }
    }
    let ncan = can_vars.len();

    // Canonical rows over canonical variables.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for (row, (&rel, &b)) in p.rows.iter().zip(p.relations.iter().zip(&p.rhs)) {
        let mut coeffs = vec![0.0; ncan];
        let mut rhs = b;
        for (cv, c) in can_vars.iter().zip(coeffs.iter_mut()) {
            *c = row[cv.orig] * cv.sign;
        }
        for (j, &a) in row.iter().enumerate() {
            rhs -= a * base[j];
        }
        rows.push((coeffs, rel, rhs));
    }
    for &(idx, ub) in &extra_bound_rows {
        let mut coeffs = vec![0.0; ncan];
        coeffs[idx] = 1.0;
        rows.push((coeffs, Relation::Le, ub));
    }

    // Row equilibration: scale each row to unit max coefficient so mixed
    // magnitudes do not defeat the absolute pivot/cost tolerances.
    for (coeffs, _, rhs) in &mut rows {
        let scale = coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        if scale > 0.0 {
            for c in coeffs.iter_mut() {
                *c /= scale;
            }
            *rhs /= scale;
        }
    }

    // Standard form: rhs >= 0, slack/surplus/artificial columns.
    let m = rows.len();
    let mut nslack = 0;
    let mut nart = 0;
    for (coeffs, rel, rhs) in &mut rows {
        if *rhs < 0.0 {
            for v in coeffs.iter_mut() {
                *v = -*v;
            }
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        match rel {
            Relation::Le => nslack += 1,
            Relation::Ge => {
                nslack += 1;
                nart += 1;
            }
            Relation::Eq => nart += 1,
        }
    }
    let ncols = ncan + nslack + nart;
    let mut tableau = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
        banned: vec![false; ncols],
    };
    let mut slack_at = ncan;
    let mut art_at = ncan + nslack;
    let art_start = ncan + nslack;
    for (coeffs, rel, rhs) in &rows {
        let mut trow = vec![0.0; ncols + 1];
        trow[..ncan].copy_from_slice(coeffs);
        trow[ncols] = *rhs;
        match rel {
            Relation::Le => {
                trow[slack_at] = 1.0;
                tableau.basis.push(slack_at);
                slack_at += 1;
            }
            Relation::Ge => {
                trow[slack_at] = -1.0;
                slack_at += 1;
                trow[art_at] = 1.0;
                tableau.basis.push(art_at);
                art_at += 1;
            }
            Relation::Eq => {
                trow[art_at] = 1.0;
                tableau.basis.push(art_at);
                art_at += 1;
            }
        }
        tableau.rows.push(trow);
    }

    let cap = 10_000 * (m + ncols);

    // Phase 1: drive the artificials to zero.
    if nart > 0 {
        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(art_start) {
            *c = -1.0;
        }
        if tableau.simplex(&phase1, cap)?.is_none() {
            return Err(NumericsError::Numerical(
                "phase-1 objective unbounded".into(),
            ));
        }
        let art_sum: f64 = tableau
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_start)
            .map(|(i, _)| tableau.rows[i][tableau.ncols])
            .sum();
        let scale = rows
            .iter()
            .fold(1.0f64, |acc, (_, _, rhs)| acc.max(rhs.abs()));
        if art_sum > 1e-7 * scale {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                solution: None,
                objective: None,
            });
        }
        // Pivot out artificials still basic at level zero; drop redundant rows.
        let mut drop_rows = Vec::new();
        for i in 0..tableau.rows.len() {
            if tableau.basis[i] < art_start {
                continue;
            }
            let col = (0..art_start).find(|&j| tableau.rows[i][j].abs() > PIVOT_TOL);
            match col {
                Some(j) => tableau.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            tableau.rows.remove(i);
            tableau.basis.remove(i);
        }
        for b in tableau.banned.iter_mut().skip(art_start) {
            *b = true;
        }
    }

    // Phase 2: the real objective.
    let mut phase2 = vec![0.0; ncols];
    for (cv, c) in can_vars.iter().zip(phase2.iter_mut()) {
        *c = p.objective[cv.orig] * cv.sign;
    }
    if tableau.simplex(&phase2, cap)?.is_none() {
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            solution: None,
            objective: None,
        });
    }

    // Recover the original variables.
    let mut can_values = vec![0.0; ncan];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < ncan {
            can_values[b] = tableau.rows[i][tableau.ncols];
        }
    }
    let mut x = base;
    for (cv, &v) in can_vars.iter().zip(&can_values) {
        x[cv.orig] += cv.sign * v;
    }
    // Guard against numerically corrupted bases: a claimed optimum must
    // actually satisfy the original constraints.
    if p.violation(&x) > 1e-6 {
        return Err(NumericsError::Numerical(
            "simplex solution failed the feasibility check".into(),
        ));
    }
    let objective: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        solution: Some(x),
        objective: Some(objective),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(obj: Vec<f64>) -> LinearProgram {
        LinearProgram::maximize(obj)
    }

    #[test]
    fn bounded_single_variable() {
        let mut p = simple(vec![1.0]);
        p.constrain(vec![1.0], Relation::Le, 1.0);
        let out = lp_solve(&p).unwrap();
        assert!(out.is_optimal());
        assert!((out.objective.unwrap() - 1.0).abs() < FEAS_TOL);
        assert!((out.solution.unwrap()[0] - 1.0).abs() < FEAS_TOL);
    }

    #[test]
    fn infeasible_single_variable() {
        let mut p = simple(vec![1.0]);
        p.constrain(vec![1.0], Relation::Le, -1.0);
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let p = simple(vec![1.0]);
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // max x + y s.t. x + y = 2, x - y = 0, both free.
        let mut p = simple(vec![1.0, 1.0]);
        p.lower = vec![f64::NEG_INFINITY; 2];
        p.constrain(vec![1.0, 1.0], Relation::Eq, 2.0);
        p.constrain(vec![1.0, -1.0], Relation::Eq, 0.0);
        let out = lp_solve(&p).unwrap();
        assert!(out.is_optimal());
        let x = out.solution.unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9);
        assert!((x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn completely_s_lp_for_identity() {
        // max eps s.t. I u >= eps e, u >= e, eps <= 1 -> eps = 1.
        let mut p = simple(vec![0.0, 0.0, 1.0]);
        p.lower = vec![1.0, 1.0, f64::NEG_INFINITY];
        p.upper = vec![f64::INFINITY, f64::INFINITY, 1.0];
        p.constrain(vec![1.0, 0.0, -1.0], Relation::Ge, 0.0);
        p.constrain(vec![0.0, 1.0, -1.0], Relation::Ge, 0.0);
        let out = lp_solve(&p).unwrap();
        assert!(out.is_optimal());
        assert!((out.objective.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn optimal_solutions_respect_constraints() {
        let mut p = simple(vec![3.0, 2.0]);
        p.constrain(vec![2.0, 1.0], Relation::Le, 18.0);
        p.constrain(vec![2.0, 3.0], Relation::Le, 42.0);
        p.constrain(vec![3.0, 1.0], Relation::Le, 24.0);
        let out = lp_solve(&p).unwrap();
        assert!(out.is_optimal());
        let x = out.solution.unwrap();
        assert!(p.violation(&x) <= FEAS_TOL);
        assert!((out.objective.unwrap() - 33.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_lp_terminates() {
        // Many tight constraints at the optimum; Bland's rule must not cycle.
        let mut p = simple(vec![1.0, 1.0, 1.0]);
        for i in 0..3 {
            let mut row = vec![1.0; 3];
            row[i] = 2.0;
            p.constrain(row, Relation::Le, 0.0);
        }
        let out = lp_solve(&p).unwrap();
        assert!(out.is_optimal());
        assert!(out.objective.unwrap().abs() < 1e-12);
    }
}
