//! State-space-collapse linear-attraction feasibility: inequality-system
//! generators for the three benchmark networks and the strictly-positive
//! test-vector feasibility LP.

use serde::Serialize;

use crate::error::NumericsError;
use crate::numerics::{lp_solve, LinearProgram, LpStatus, Relation};

/// Feasibility acceptance threshold: the LP optimum is 0 or 1 by scaling,
/// so anything at least 1 - FEASIBLE_TOL counts as 1.
pub const FEASIBLE_TOL: f64 = 1e-7;

/// One homogeneous strict inequality c'h < 0 over the test vector h.
#[derive(Debug, Clone, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub label: String,
}

/// A parameter-side condition reported alongside the LP (informational;
/// feasibility itself is decided by the LP).
#[derive(Debug, Clone, Serialize)]
pub struct ParameterCondition {
    pub name: String,
    pub holds: bool,
    pub description: String,
}

/// A linear-attraction inequality system: strict homogeneous inequalities
/// in h (positivity of h is represented separately by the LP), plus the
/// network family's parameter conditions and arrival-rate threshold.
#[derive(Debug, Clone, Serialize)]
pub struct InequalitySystem {
    pub class_count: usize,
    pub inequalities: Vec<Inequality>,
    pub parameter_conditions: Vec<ParameterCondition>,
    /// Lower threshold on the class-1 arrival rate; 0 when absent.
    pub alpha_threshold: f64,
    pub alpha1: f64,
}

/// Outcome of the feasibility LP.
#[derive(Debug, Clone, Serialize)]
pub struct SSCReport {
    pub feasible: bool,
    /// Test vector scaled so min h_k = 1, when feasible.
    pub h_witness: Option<Vec<f64>>,
    pub p_star: f64,
    pub alpha_threshold: f64,
    pub alpha_ok: bool,
    pub violated_conditions: Vec<String>,
    pub conditions: Vec<ParameterCondition>,
}

fn ineq(coeffs: Vec<f64>, label: &str) -> Inequality {
    Inequality {
        coeffs,
        label: label.to_string(),
    }
}

/// Linear-attraction system for the six-class, three-station reentrant
/// network (classes 1-6 visiting stations 1,2,3,1,2,3 in order).
pub fn dhv_system(m: &[f64; 6], alpha1: f64) -> InequalitySystem {
    let mu: Vec<f64> = m.iter().map(|v| 1.0 / v).collect();
    let a = alpha1;
    let mut sys = Vec::new();
    let mut c = |entries: &[(usize, f64)], label: &str| {
        let mut coeffs = vec![0.0; 6];
        for &(k, v) in entries {
            coeffs[k] += v;
        }
        sys.push(ineq(coeffs, label));
    };
    c(&[(1, mu[0] - mu[1]), (5, -mu[5])], "dhv-01");
    c(&[(3, mu[2] - mu[3]), (1, -mu[1])], "dhv-02");
    c(&[(5, mu[4] - mu[5]), (3, -mu[3])], "dhv-03");
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1]), (2, mu[1] - mu[2])], "dhv-04");
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1])], "dhv-05");
    c(&[(0, a - mu[0]), (2, mu[0] - mu[2])], "dhv-06");
    c(&[(1, a - mu[1]), (2, mu[1] - mu[2])], "dhv-07");
    c(&[(2, mu[1] - mu[2]), (3, mu[2] - mu[3]), (1, -mu[1])], "dhv-08");
    c(
        &[(1, mu[0] * (1.0 - mu[2] / mu[3]) - mu[1]), (2, mu[1] - mu[2])],
        "dhv-09",
    );
    c(&[(3, mu[1] - mu[3]), (1, -mu[1])], "dhv-10");
    c(&[(3, mu[2] - mu[3]), (2, -mu[2])], "dhv-11");
    c(&[(3, mu[2] - mu[3]), (4, mu[3] - mu[4]), (2, -mu[2])], "dhv-12");
    c(
        &[(2, mu[1] * (1.0 - mu[3] / mu[4]) - mu[2]), (3, mu[2] - mu[3])],
        "dhv-13",
    );
    c(&[(4, mu[2] - mu[4]), (2, -mu[2])], "dhv-14");
    c(&[(4, mu[3] - mu[4]), (3, -mu[3])], "dhv-15");
    c(&[(4, mu[3] - mu[4]), (5, mu[4] - mu[5]), (3, -mu[3])], "dhv-16");
    c(
        &[(3, mu[2] * (1.0 - mu[4] / mu[5]) - mu[3]), (4, mu[3] - mu[4])],
        "dhv-17",
    );
    c(&[(5, mu[3] - mu[5]), (3, -mu[3])], "dhv-18");
    c(&[(5, mu[4] - mu[5]), (4, -mu[4])], "dhv-19");
    c(&[(0, a - mu[0]), (5, mu[4] - mu[5]), (4, -mu[4])], "dhv-20");
    c(
        &[(4, mu[3] * (1.0 - a / mu[0]) - mu[4]), (5, mu[4] - mu[5])],
        "dhv-21",
    );
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1]), (5, -mu[5])], "dhv-22");
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1])], "dhv-23");
    c(&[(0, a - mu[0]), (2, mu[1] - mu[2])], "dhv-24");
    let threshold = [
        (m[5] - m[4]) / (m[1] * m[5]),
        (m[4] - m[3]) / (m[0] * m[4]),
        (m[5] - m[3]) / (m[0] * m[5]),
        0.0,
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    InequalitySystem {
        class_count: 6,
        inequalities: sys,
        parameter_conditions: vec![ParameterCondition {
            name: "m2+m4+m6<2".into(),
            holds: m[1] + m[3] + m[5] < 2.0,
            description: format!(
                "sum of every-other-class service means is {}",
                m[1] + m[3] + m[5]
            ),
        }],
        alpha_threshold: threshold,
        alpha1,
    }
}

/// Linear-attraction system for the five-class, two-station push-started
/// network (stations 1,2,1,1,2). The generated inequalities assume the
/// documented tie-break order 1 > 3 > 4 at station 1; the last inequality
/// is emitted only when mu_1 <= mu_2.
pub fn pslk_system(m: &[f64; 5], alpha1: f64) -> InequalitySystem {
    let mu: Vec<f64> = m.iter().map(|v| 1.0 / v).collect();
    let a = alpha1;
    let mut sys = Vec::new();
    let mut c = |entries: &[(usize, f64)], label: &str| {
        let mut coeffs = vec![0.0; 5];
        for &(k, v) in entries {
            coeffs[k] += v;
        }
        sys.push(ineq(coeffs, label));
    };
    c(&[(4, mu[3] - mu[4]), (3, -mu[3])], "pslk-01");
    c(&[(2, mu[1] - mu[2]), (3, mu[2])], "pslk-02");
    c(&[(1, -mu[1]), (2, mu[1] - mu[2]), (3, mu[2])], "pslk-03");
    c(&[(2, -mu[2]), (3, mu[2])], "pslk-04");
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1])], "pslk-05");
    c(&[(0, a - mu[0]), (2, mu[1])], "pslk-06");
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1]), (2, mu[1])], "pslk-07");
    if mu[0] <= mu[1] {
        c(&[(0, a - mu[0]), (2, mu[0])], "pslk-08");
    }
    let threshold = [
        (m[0] - m[1]) / (m[0] * m[4]),
        (m[4] - m[3]) / (m[0] * m[4]),
        0.0,
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    InequalitySystem {
        class_count: 5,
        inequalities: sys,
        parameter_conditions: vec![ParameterCondition {
            name: "m2m4>m3m5".into(),
            holds: m[1] * m[3] > m[2] * m[4],
            description: format!("m2*m4 = {} vs m3*m5 = {}", m[1] * m[3], m[2] * m[4]),
        }],
        alpha_threshold: threshold,
        alpha1,
    }
}

/// Linear-attraction system for the four-class, two-station network with
/// stations 1,2,2,1.
pub fn lk_system(m: &[f64; 4], alpha1: f64) -> InequalitySystem {
    let mu: Vec<f64> = m.iter().map(|v| 1.0 / v).collect();
    let a = alpha1;
    let mut sys = Vec::new();
    let mut c = |entries: &[(usize, f64)], label: &str| {
        let mut coeffs = vec![0.0; 4];
        for &(k, v) in entries {
            coeffs[k] += v;
        }
        sys.push(ineq(coeffs, label));
    };
    c(&[(0, a - mu[0]), (1, mu[0] - mu[1])], "lk-01");
    c(&[(1, mu[0] - mu[1])], "lk-02");
    c(&[(3, mu[2] - mu[3])], "lk-03");
    c(&[(2, -mu[2]), (3, mu[2] - mu[3])], "lk-04");
    InequalitySystem {
        class_count: 4,
        inequalities: sys,
        parameter_conditions: vec![ParameterCondition {
            name: "m2+m4<1".into(),
            holds: m[1] + m[3] < 1.0,
            description: format!("m2+m4 = {}", m[1] + m[3]),
        }],
        alpha_threshold: 0.0,
        alpha1,
    }
}

/// Solve the feasibility LP: max p subject to h_k >= p for every class,
/// c'h <= -p for every inequality, p <= 1. The optimum is 0 or 1 up to
/// scaling; feasibility means it reaches 1.
pub fn feasible(sys: &InequalitySystem, tol: f64) -> Result<SSCReport, NumericsError> {
    let k = sys.class_count;
    // Variables: h_1..h_K, p.
    let mut obj = vec![0.0; k + 1];
    obj[k] = 1.0;
    let mut p = LinearProgram::maximize(obj);
    p.lower[k] = f64::NEG_INFINITY;
    p.upper[k] = 1.0;
    for i in 0..k {
        let mut row = vec![0.0; k + 1];
        row[i] = 1.0;
        row[k] = -1.0;
        p.constrain(row, Relation::Ge, 0.0);
    }
    for iq in &sys.inequalities {
        if iq.coeffs.len() != k {
            return Err(NumericsError::Dimension(format!(
                "inequality {} has {} coefficients, expected {}",
                iq.label,
                iq.coeffs.len(),
                k
            )));
        }
        // Each inequality is homogeneous, so normalizing its row to unit
        // max coefficient changes nothing mathematically and keeps the LP
        // well scaled against the p-column.
        let scale = iq
            .coeffs
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()))
            .max(1.0);
        let mut row: Vec<f64> = iq.coeffs.iter().map(|c| c / scale).collect();
        row.push(1.0);
        p.constrain(row, Relation::Le, 0.0);
    }
    let out = lp_solve(&p)?;
    if out.status != LpStatus::Optimal {
        return Err(NumericsError::Numerical(format!(
            "feasibility LP did not reach an optimum: {:?}",
            out.status
        )));
    }
    let p_star = out.objective.unwrap();
    let is_feasible = p_star >= 1.0 - tol;
    let h_witness = if is_feasible {
        out.solution.map(|x| {
            let h = &x[..k];
            let min = h.iter().cloned().fold(f64::INFINITY, f64::min);
            h.iter().map(|v| v / min).collect()
        })
    } else {
        None
    };
    let violated: Vec<String> = sys
        .parameter_conditions
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.name.clone())
        .collect();
    Ok(SSCReport {
        feasible: is_feasible,
        h_witness,
        p_star,
        alpha_threshold: sys.alpha_threshold,
        alpha_ok: sys.alpha1 > sys.alpha_threshold,
        violated_conditions: violated,
        conditions: sys.parameter_conditions.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn replay(sys: &InequalitySystem, h: &[f64], p_star: f64) {
        for iq in &sys.inequalities {
            let v: f64 = iq.coeffs.iter().zip(h).map(|(c, h)| c * h).sum();
            assert!(
                v <= -p_star * (1.0 - 1e-6) / h.len() as f64 || v < 0.0,
                "inequality {} not strictly satisfied: {v}",
                iq.label
            );
        }
    }

    #[test]
    fn dhv_balanced_half_feasible() {
        let sys = dhv_system(&[0.5; 6], 0.95);
        assert_eq!(sys.inequalities.len(), 24);
        assert_eq!(sys.alpha_threshold, 0.0);
        let report = feasible(&sys, FEASIBLE_TOL).unwrap();
        assert!(report.feasible);
        assert!((report.p_star - 1.0).abs() < 1e-9);
        assert!(report.alpha_ok);
        assert!(report.violated_conditions.is_empty());
        let h = report.h_witness.unwrap();
        assert!((h.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0).abs() < 1e-9);
        replay(&sys, &h, report.p_star);
    }

    #[test]
    fn dhv_unbalanced_infeasible_by_cycle() {
        // mu = 10 for odd classes, 10/9 for even ones: the three high-246
        // inequalities force h6 > 8 h2 > 64 h4 > 512 h6, a contradiction.
        let sys = dhv_system(&[0.1, 0.9, 0.1, 0.9, 0.1, 0.9], 0.99);
        let report = feasible(&sys, FEASIBLE_TOL).unwrap();
        assert!(!report.feasible);
        assert!(report.p_star.abs() < 1e-9);
        assert_eq!(report.violated_conditions, vec!["m2+m4+m6<2".to_string()]);
    }

    #[test]
    fn dhv_alpha_threshold_values() {
        let sys = dhv_system(&[0.1, 0.9, 0.1, 0.9, 0.1, 0.9], 0.99);
        assert!((sys.alpha_threshold - 0.8 / 0.81).abs() < 1e-12);
        assert!(sys.alpha1 > sys.alpha_threshold);
    }

    #[test]
    fn dhv_balanced_family_boundary() {
        // Balanced family m = (1-a, a, 1-a, a, 1-a, a): the LP flips
        // feasibility exactly where 3a crosses 2.
        for a in [0.3, 0.5, 0.6] {
            let sys = dhv_system(&[1.0 - a, a, 1.0 - a, a, 1.0 - a, a], 0.99);
            assert!(feasible(&sys, FEASIBLE_TOL).unwrap().feasible, "a = {a}");
        }
        for a in [0.7, 0.8, 0.9] {
            let sys = dhv_system(&[1.0 - a, a, 1.0 - a, a, 1.0 - a, a], 0.99);
            assert!(!feasible(&sys, FEASIBLE_TOL).unwrap().feasible, "a = {a}");
        }
    }

    #[test]
    fn pslk_conditions_and_emission() {
        let fig6 = pslk_system(&[0.3, 0.6, 0.2, 0.5, 0.4], 0.8);
        assert!(fig6.parameter_conditions[0].holds); // 0.30 > 0.08
        // m1 = 0.3 < m2 = 0.6 means mu1 > mu2: the conditional inequality
        // is dropped.
        assert_eq!(fig6.inequalities.len(), 7);

        let fig7 = pslk_system(&[0.41, 0.18, 0.24, 0.35, 0.82], 0.8);
        assert!(!fig7.parameter_conditions[0].holds); // 0.063 < 0.1968
        // m1 = 0.41 > m2 = 0.18 means mu1 < mu2: last emitted
        assert_eq!(fig7.inequalities.len(), 8);
    }

    #[test]
    fn pslk_fig6_feasible_fig7_infeasible() {
        let fig6 = pslk_system(&[0.3, 0.6, 0.2, 0.5, 0.4], 0.8);
        let report = feasible(&fig6, FEASIBLE_TOL).unwrap();
        assert!(report.feasible);
        replay(&fig6, &report.h_witness.unwrap(), report.p_star);
        let fig7 = pslk_system(&[0.41, 0.18, 0.24, 0.35, 0.82], 0.8);
        assert!(!feasible(&fig7, FEASIBLE_TOL).unwrap().feasible);
    }

    #[test]
    fn lk_feasibility_flips_with_m2_plus_m4() {
        // Balanced instances m = (1-b, b, 1-b, b): feasible iff 2b < 1.
        for i in 0..9 {
            let total = 0.6 + 0.1 * i as f64; // m2 + m4 in {0.6, ..., 1.4}
            let b = total / 2.0;
            let sys = lk_system(&[1.0 - b, b, 1.0 - b, b], 0.9);
            let report = feasible(&sys, FEASIBLE_TOL).unwrap();
            assert_eq!(report.feasible, total < 1.0, "m2+m4 = {total}");
            assert_eq!(sys.parameter_conditions[0].holds, total < 1.0);
        }
    }

    #[test]
    fn lk_sign_cases() {
        // mu1 < mu2 and mu3 < mu4: h = e already satisfies everything.
        let sys = lk_system(&[0.6, 0.4, 0.6, 0.4], 0.9);
        let report = feasible(&sys, FEASIBLE_TOL).unwrap();
        assert!(report.feasible);
        // mu1 > mu2 makes h2(mu1 - mu2) < 0 impossible for positive h2.
        let sys = lk_system(&[0.4, 0.7, 0.3, 0.6], 0.9);
        assert!(!feasible(&sys, FEASIBLE_TOL).unwrap().feasible);
    }

    #[test]
    fn empty_system_feasible() {
        let sys = InequalitySystem {
            class_count: 3,
            inequalities: Vec::new(),
            parameter_conditions: Vec::new(),
            alpha_threshold: 0.0,
            alpha1: 0.5,
        };
        let report = feasible(&sys, FEASIBLE_TOL).unwrap();
        assert!(report.feasible);
        assert!((report.p_star - 1.0).abs() < 1e-9);
        assert_eq!(report.h_witness.unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn scale_invariance() {
        for scale in [1e-3, 1.0, 1e3] {
            let mut sys = dhv_system(&[0.5; 6], 0.95);
            for iq in &mut sys.inequalities {
                for c in &mut iq.coeffs {
                    *c *= scale;
                }
            }
            assert!(feasible(&sys, FEASIBLE_TOL).unwrap().feasible);
            let mut sys = dhv_system(&[0.1, 0.9, 0.1, 0.9, 0.1, 0.9], 0.99);
            for iq in &mut sys.inequalities {
                for c in &mut iq.coeffs {
                    *c *= scale;
                }
            }
            assert!(!feasible(&sys, FEASIBLE_TOL).unwrap().feasible);
        }
    }
}
