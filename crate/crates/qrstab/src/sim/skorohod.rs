//! Time-stepped linear Skorohod paths W(t) = W(0) + theta t + R Y(t)
//! with an active-set boundary solve per step.

use crate::error::SimError;
use crate::numerics::Matrix;

/// The data of a linear Skorohod problem.
#[derive(Debug, Clone)]
pub struct SkorohodProblem {
    pub r: Matrix,
    pub theta: Vec<f64>,
    pub w0: Vec<f64>,
}

/// Sampled Skorohod path: workload W and cumulative pushing Y.
#[derive(Debug, Clone)]
pub struct SkorohodTrajectory {
    pub times: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
}

impl SkorohodTrajectory {
    pub fn to_csv(&self) -> String {
        let j = self.w[0].len();
        let mut header = vec!["time".to_string()];
        header.extend((1..=j).map(|i| format!("W_{i}")));
        header.extend((1..=j).map(|i| format!("Y_{i}")));
        let mut out = header.join(",");
        out.push_str("\r\n");
        for (i, &t) in self.times.iter().enumerate() {
            let mut cells = vec![crate::format_significant(t)];
            cells.extend(self.w[i].iter().map(|v| crate::format_significant(*v)));
            cells.extend(self.y[i].iter().map(|v| crate::format_significant(*v)));
            out.push_str(&cells.join(","));
            out.push_str("\r\n");
        }
        out
    }

    /// First time the total workload drops below `tol`, if any.
    pub fn emptying_time(&self, tol: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.w)
            .find(|(_, w)| w.iter().sum::<f64>() < tol)
            .map(|(&t, _)| t)
    }
}

/// Subsets of `b` ordered by size then lexicographically (the smallest
/// feasible active set wins ties deterministically).
fn subsets_ordered(b: &[usize]) -> Vec<Vec<usize>> {
    let n = b.len();
    let mut all: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| {
            (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| b[i])
                .collect()
        })
        .collect();
    all.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
    all
}

/// Integrate the Skorohod dynamics. Per step the boundary set
/// B = {j : W_j <= band} is found and a pushing rate y >= 0 supported on
/// an active subset of B is solved so the drift is nonnegative on B with
/// complementary slackness; the smallest feasible subset is used.
pub fn simulate_skorohod(
    sp: &SkorohodProblem,
    dt: f64,
    t_end: f64,
) -> Result<SkorohodTrajectory, SimError> {
    let j_count = sp.r.rows();
    if sp.r.cols() != j_count || sp.theta.len() != j_count || sp.w0.len() != j_count {
        return Err(SimError::Config("dimension mismatch".into()));
    }
    if sp.w0.iter().any(|&w| !(w >= 0.0)) {
        return Err(SimError::Config("W0 must be nonnegative".into()));
    }
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(SimError::Config("dt and T must be positive".into()));
    }
    let theta_scale = sp.theta.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
    let band = 2.0 * dt * theta_scale;
    let steps = (t_end / dt).ceil() as usize;
    let slack_tol = 1e-9 * theta_scale.max(1.0);

    let mut w = sp.w0.clone();
    let mut y_cum = vec![0.0; j_count];
    let mut traj = SkorohodTrajectory {
        times: Vec::with_capacity(steps + 1),
        w: Vec::with_capacity(steps + 1),
        y: Vec::with_capacity(steps + 1),
    };
    for step in 0..=steps {
        traj.times.push(step as f64 * dt);
        traj.w.push(w.clone());
        traj.y.push(y_cum.clone());
        if step == steps {
            break;
        }
        let boundary: Vec<usize> = (0..j_count).filter(|&j| w[j] <= band).collect();
        let y_rate = solve_boundary(&sp.r, &sp.theta, &boundary, slack_tol)?;
        for j in 0..j_count {
            let drift = sp.theta[j]
                + (0..j_count)
                    .map(|l| sp.r[(j, l)] * y_rate[l])
                    .sum::<f64>();
            w[j] = (w[j] + dt * drift).max(0.0);
            y_cum[j] += dt * y_rate[j];
        }
    }
    Ok(traj)
}

/// Find y >= 0 supported on a subset of `boundary` with
/// (theta + R y)_j >= 0 for every boundary j and y_j (theta + R y)_j = 0.
fn solve_boundary(
    r: &Matrix,
    theta: &[f64],
    boundary: &[usize],
    slack_tol: f64,
) -> Result<Vec<f64>, SimError> {
    let j_count = r.rows();
    'subset: for active in subsets_ordered(boundary) {
        let mut y = vec![0.0; j_count];
        if !active.is_empty() {
            let r_aa = r.principal_submatrix(&active).map_err(SimError::from)?;
            let rhs: Vec<f64> = active.iter().map(|&j| -theta[j]).collect();
            let Ok(sol) = r_aa.solve(&rhs) else {
                continue 'subset;
            };
            if sol.iter().any(|&v| v < -slack_tol) {
                continue 'subset;
            }
            for (&j, &v) in active.iter().zip(&sol) {
                y[j] = v.max(0.0);
            }
        }
        // Drift must be nonnegative on the whole boundary.
        for &j in boundary {
            let drift = theta[j]
                + (0..j_count)
                    .map(|l| r[(j, l)] * y[l])
                    .sum::<f64>();
            if drift < -slack_tol {
                continue 'subset;
            }
        }
        return Ok(y);
    }
    Err(SimError::NoReflection)
}
