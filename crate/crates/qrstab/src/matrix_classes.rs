//! LP-backed membership tests for the S, completely-S, Schur-S and
//! Chen-S matrix classes, each returning a witness or a concrete
//! failure certificate.

use serde::Serialize;

use crate::error::NumericsError;
use crate::numerics::{lp_solve, LinearProgram, LpStatus, Matrix, Relation};

/// Strict-positivity threshold separating a degenerate zero optimum from
/// genuine slack.
pub const POSITIVITY_TOL: f64 = 1e-7;

const VACUOUS_TOL: f64 = 1e-10;
const SUFFICIENT_LP_CAP: f64 = 1e6;

/// Verdict for the S / completely-S / Schur-S tests.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub holds: bool,
    /// u (S-matrix) or h (Schur-S) witness when the property holds.
    pub witness: Option<Vec<f64>>,
    /// First failing principal-index set (0-based) when it does not.
    pub failing_subset: Option<Vec<usize>>,
}

/// Which method decided a Chen-S verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChenMethod {
    Exact,
    SufficientLP,
}

/// Verdict for the Chen-S test on a pair (R, theta).
#[derive(Debug, Clone, Serialize)]
pub struct ChenReport {
    pub holds: bool,
    pub h_witness: Option<Vec<f64>>,
    pub epsilon_star: f64,
    /// Partition (a, b) exhibiting the failure, 0-based, when `holds` is
    /// false and a concrete partition is implicated.
    pub failing_partition: Option<(Vec<usize>, Vec<usize>)>,
    pub method: ChenMethod,
    /// Partitions whose u-set {v >= 0 : theta_b + R_b v = 0} is empty.
    pub vacuous_partitions: Vec<(Vec<usize>, Vec<usize>)>,
    /// True when a negative SufficientLP outcome is merely inconclusive.
    pub inconclusive: bool,
}

/// Nonempty subsets of {0..n}, ordered by size then lexicographically.
fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
    all
}

fn complement(n: usize, a: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !a.contains(i)).collect()
}

fn pick(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Is `a` an S-matrix: does a positive u with Au > 0 exist?
///
/// Solved as max eps s.t. Au >= eps e, u >= e, eps <= 1; membership holds
/// iff the optimum exceeds the positivity threshold.
pub fn is_s_matrix(a: &Matrix) -> Result<ClassReport, NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::Dimension("matrix must be square".into()));
    }
    // Variables: u_1..u_n, eps.
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut p = LinearProgram::maximize(obj);
    p.lower = vec![1.0; n + 1];
    p.lower[n] = f64::NEG_INFINITY;
    p.upper = vec![f64::INFINITY; n + 1];
    p.upper[n] = 1.0;
    for i in 0..n {
        let mut row = a.row(i).to_vec();
        row.push(-1.0);
        p.constrain(row, Relation::Ge, 0.0);
    }
    let out = lp_solve(&p)?;
    if out.status != LpStatus::Optimal {
        return Err(NumericsError::Numerical(format!(
            "S-matrix LP did not reach an optimum: {:?}",
            out.status
        )));
    }
    let eps = out.objective.unwrap();
    let holds = eps > POSITIVITY_TOL;
    Ok(ClassReport {
        holds,
        witness: if holds {
            out.solution.map(|x| x[..n].to_vec())
        } else {
            None
        },
        failing_subset: None,
    })
}

/// Is `a` completely-S: every principal submatrix an S-matrix?
pub fn is_completely_s(a: &Matrix) -> Result<ClassReport, NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::Dimension("matrix must be square".into()));
    }
    let mut full_witness = None;
    for subset in subsets_by_size(n) {
        let sub = a.principal_submatrix(&subset)?;
        let report = is_s_matrix(&sub)?;
        if !report.holds {
            return Ok(ClassReport {
                holds: false,
                witness: None,
                failing_subset: Some(subset),
            });
        }
        if subset.len() == n {
            full_witness = report.witness;
        }
    }
    Ok(ClassReport {
        holds: true,
        witness: full_witness,
        failing_subset: None,
    })
}

/// Is `a` Schur-S: all principal submatrices nonsingular and a single
/// positive h making every partition's Schur complement h-positive.
pub fn is_schur_s(a: &Matrix) -> Result<ClassReport, NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::Dimension("matrix must be square".into()));
    }
    for subset in subsets_by_size(n) {
        let sub = a.principal_submatrix(&subset)?;
        if sub.invert().is_err() {
            return Ok(ClassReport {
                holds: false,
                witness: None,
                failing_subset: Some(subset),
            });
        }
    }
    // Joint LP over h and eps: for every partition (a_set, b_set) with
    // a_set nonempty, h_a' (R_a - R_ab R_b^-1 R_ba) >= eps e' columnwise.
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut p = LinearProgram::maximize(obj);
    p.lower = vec![1.0; n + 1];
    p.lower[n] = f64::NEG_INFINITY;
    p.upper = vec![f64::INFINITY; n + 1];
    p.upper[n] = 1.0;
    for a_set in subsets_by_size(n) {
        let b_set = complement(n, &a_set);
        let schur = schur_complement(a, &a_set, &b_set)?;
        for (c, _) in a_set.iter().enumerate() {
            let mut row = vec![0.0; n + 1];
            for (r, &i) in a_set.iter().enumerate() {
                row[i] = schur[(r, c)];
            }
            row[n] = -1.0;
            p.constrain(row, Relation::Ge, 0.0);
        }
    }
    let out = lp_solve(&p)?;
    if out.status != LpStatus::Optimal {
        return Err(NumericsError::Numerical(format!(
            "Schur-S LP did not reach an optimum: {:?}",
            out.status
        )));
    }
    let holds = out.objective.unwrap() > POSITIVITY_TOL;
    Ok(ClassReport {
        holds,
        witness: if holds {
            out.solution.map(|x| x[..n].to_vec())
        } else {
            None
        },
        failing_subset: None,
    })
}

/// R_a - R_ab R_b^-1 R_ba; R_a itself when b is empty.
fn schur_complement(
    a: &Matrix,
    a_set: &[usize],
    b_set: &[usize],
) -> Result<Matrix, NumericsError> {
    let r_a = a.principal_submatrix(a_set)?;
    if b_set.is_empty() {
        return Ok(r_a);
    }
    let r_ab = a.submatrix(a_set, b_set)?;
    let r_ba = a.submatrix(b_set, a_set)?;
    let r_b_inv = a.principal_submatrix(b_set)?.invert()?;
    let correction = r_ab.matmul(&r_b_inv)?.matmul(&r_ba)?;
    r_a.add(&correction.scale(-1.0))
}

/// Is (r, theta) Chen-S?
///
/// Requires completely-S, then runs the exact per-partition test (a joint
/// LP over the partition constraints) when every proper principal
/// submatrix is nonsingular, falling back to a sufficient LP otherwise.
pub fn is_chen_s(r: &Matrix, theta: &[f64]) -> Result<ChenReport, NumericsError> {
    let n = r.rows();
    if r.cols() != n {
        return Err(NumericsError::Dimension("matrix must be square".into()));
    }
    if theta.len() != n {
        return Err(NumericsError::Dimension(format!(
            "theta length {} does not match dimension {}",
            theta.len(),
            n
        )));
    }
    let cs = is_completely_s(r)?;
    if !cs.holds {
        let a_set = cs.failing_subset.unwrap();
        let b_set = complement(n, &a_set);
        return Ok(ChenReport {
            holds: false,
            h_witness: None,
            epsilon_star: 0.0,
            failing_partition: Some((a_set, b_set)),
            method: ChenMethod::Exact,
            vacuous_partitions: Vec::new(),
            inconclusive: false,
        });
    }
    let proper_nonsingular = subsets_by_size(n)
        .into_iter()
        .filter(|s| s.len() < n)
        .all(|s| {
            r.principal_submatrix(&s)
                .and_then(|sub| sub.invert())
                .is_ok()
        });
    if proper_nonsingular {
        chen_exact(r, theta)
    } else {
        chen_sufficient_lp(r, theta)
    }
}

fn chen_exact(r: &Matrix, theta: &[f64]) -> Result<ChenReport, NumericsError> {
    let n = r.rows();
    // Variables: h_1..h_n, eps; one constraint per non-vacuous partition.
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut p = LinearProgram::maximize(obj);
    p.lower = vec![1.0; n + 1];
    p.lower[n] = f64::NEG_INFINITY;
    p.upper = vec![f64::INFINITY; n + 1];
    p.upper[n] = 1.0;
    let mut vacuous = Vec::new();
    // Per-constraint drift weights, kept for failure attribution.
    let mut partition_rows: Vec<(Vec<usize>, Vec<usize>, Vec<f64>)> = Vec::new();
    for a_set in subsets_by_size(n) {
        let b_set = complement(n, &a_set);
        let weights = if b_set.is_empty() {
            pick(theta, &a_set)
        } else {
            let r_b_inv = r.principal_submatrix(&b_set)?.invert()?;
            let theta_b = pick(theta, &b_set);
            let u_b: Vec<f64> = r_b_inv
                .matvec(&theta_b)?
                .into_iter()
                .map(|v| -v)
                .collect();
            if u_b.iter().any(|&v| v < -VACUOUS_TOL) {
                vacuous.push((a_set, b_set));
                continue;
            }
            let r_ab = r.submatrix(&a_set, &b_set)?;
            let shift = r_ab.matvec(&u_b)?;
            pick(theta, &a_set)
                .iter()
                .zip(&shift)
                .map(|(t, s)| t + s)
                .collect()
        };
        // sum_{i in a} h_i w_i <= -eps
        let mut row = vec![0.0; n + 1];
        for (&i, &w) in a_set.iter().zip(&weights) {
            row[i] = w;
        }
        row[n] = 1.0;
        p.constrain(row, Relation::Le, 0.0);
        partition_rows.push((a_set, b_set, weights));
    }
    let out = lp_solve(&p)?;
    if out.status != LpStatus::Optimal {
        return Err(NumericsError::Numerical(format!(
            "Chen-S LP did not reach an optimum: {:?}",
            out.status
        )));
    }
    let eps = out.objective.unwrap();
    let holds = eps > POSITIVITY_TOL;
    let solution = out.solution.unwrap();
    let h = solution[..n].to_vec();
    let failing_partition = if holds {
        None
    } else {
        // The binding partition: largest h-weighted drift at the optimum.
        partition_rows
            .iter()
            .max_by(|x, y| {
                let vx: f64 = x.0.iter().zip(&x.2).map(|(&i, w)| h[i] * w).sum();
                let vy: f64 = y.0.iter().zip(&y.2).map(|(&i, w)| h[i] * w).sum();
                vx.partial_cmp(&vy).unwrap()
            })
            .map(|(a, b, _)| (a.clone(), b.clone()))
    };
    Ok(ChenReport {
        holds,
        h_witness: if holds { Some(h) } else { None },
        epsilon_star: eps,
        failing_partition,
        method: ChenMethod::Exact,
        vacuous_partitions: vacuous,
        inconclusive: false,
    })
}

/// Sufficient LP used when some proper principal submatrix is singular.
/// A nonpositive optimum here is inconclusive, never a disproof.
fn chen_sufficient_lp(r: &Matrix, theta: &[f64]) -> Result<ChenReport, NumericsError> {
    let n = r.rows();
    let scale = theta.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
    let theta: Vec<f64> = if scale > 0.0 {
        theta.iter().map(|t| t / scale).collect()
    } else {
        theta.to_vec()
    };
    // Variable layout: h (n), eps (1), then per partition with nonempty b
    // an alpha^b block (|b|, >= 0) and an eta^b block (|b|, >= 1).
    let partitions = subsets_by_size(n);
    let mut block_start = Vec::new();
    let mut nvars = n + 1;
    for a_set in &partitions {
        let b_len = n - a_set.len();
        block_start.push(nvars);
        nvars += 2 * b_len;
    }
    let mut obj = vec![0.0; nvars];
    obj[n] = 1.0;
    let mut p = LinearProgram::maximize(obj);
    p.lower = vec![0.0; nvars];
    p.upper = vec![f64::INFINITY; nvars];
    for l in p.lower.iter_mut().take(n) {
        *l = 1.0;
    }
    p.lower[n] = f64::NEG_INFINITY;
    p.upper[n] = SUFFICIENT_LP_CAP;
    for (a_set, &start) in partitions.iter().zip(&block_start) {
        let b_set = complement(n, a_set);
        let b_len = b_set.len();
        let eta_start = start + b_len;
        for l in p.lower.iter_mut().skip(eta_start).take(b_len) {
            *l = 1.0;
        }
        // h_a' theta_a - alpha^b' theta_b <= -eps
        let mut row = vec![0.0; nvars];
        for &i in a_set {
            row[i] = theta[i];
        }
        for (bi, &i) in b_set.iter().enumerate() {
            row[start + bi] = -theta[i];
        }
        row[n] = 1.0;
        p.constrain(row, Relation::Le, 0.0);
        // h_a' R_ab <= alpha^b' R_b, one constraint per column of b
        for (c, _) in b_set.iter().enumerate() {
            let mut row = vec![0.0; nvars];
            for &i in a_set {
                row[i] = r[(i, b_set[c])];
            }
            for (bi, &i) in b_set.iter().enumerate() {
                row[start + bi] -= r[(i, b_set[c])];
            }
            p.constrain(row, Relation::Le, 0.0);
        }
        // eps e <= R_b eta^b
        for rr in 0..b_len {
            let mut row = vec![0.0; nvars];
            for (cc, &jcol) in b_set.iter().enumerate() {
                row[eta_start + cc] = r[(b_set[rr], jcol)];
            }
            row[n] = -1.0;
            p.constrain(row, Relation::Ge, 0.0);
        }
    }
    let out = lp_solve(&p)?;
    if out.status != LpStatus::Optimal {
        return Err(NumericsError::Numerical(format!(
            "sufficient Chen-S LP did not reach an optimum: {:?}",
            out.status
        )));
    }
    let eps = out.objective.unwrap();
    let holds = eps > POSITIVITY_TOL;
    Ok(ChenReport {
        holds,
        h_witness: if holds {
            out.solution.map(|x| x[..n].to_vec())
        } else {
            None
        },
        epsilon_star: eps,
        failing_partition: None,
        method: ChenMethod::SufficientLP,
        vacuous_partitions: Vec::new(),
        inconclusive: !holds,
    })
}
