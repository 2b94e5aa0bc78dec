//! Explicit-Euler integration of the fluid queue-ratio dynamics with a
//! chattering band around the collapse manifold.

use crate::error::SimError;
use crate::network::NetworkPrimitives;
use crate::ratio::RatioVector;

/// Tie-break among classes above their ratio target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    LowestIndex,
    MaxImbalance,
}

/// Sampled fluid path: levels Z, workloads W = CMZ, imbalances
/// eps = Z - delta W, and per-class allocation rates in [0, 1].
#[derive(Debug, Clone)]
pub struct FluidTrajectory {
    pub times: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub eps: Vec<Vec<f64>>,
    pub allocations: Vec<Vec<f64>>,
    /// Width of the chattering band used by the integrator.
    pub band: f64,
}

impl FluidTrajectory {
    /// CSV with header time, Z_1..Z_K, W_1..W_J, eps_1..eps_K.
    pub fn to_csv(&self) -> String {
        let k = self.z[0].len();
        let j = self.w[0].len();
        let mut header = vec!["time".to_string()];
        header.extend((1..=k).map(|i| format!("Z_{i}")));
        header.extend((1..=j).map(|i| format!("W_{i}")));
        header.extend((1..=k).map(|i| format!("eps_{i}")));
        let mut out = header.join(",");
        out.push_str("\r\n");
        for (i, &t) in self.times.iter().enumerate() {
            let mut cells = vec![crate::format_significant(t)];
            cells.extend(self.z[i].iter().map(|v| crate::format_significant(*v)));
            cells.extend(self.w[i].iter().map(|v| crate::format_significant(*v)));
            cells.extend(self.eps[i].iter().map(|v| crate::format_significant(*v)));
            out.push_str(&cells.join(","));
            out.push_str("\r\n");
        }
        out
    }
}

/// Integrate the fluid dynamics under the queue-ratio service rule.
///
/// Per station and step: a class whose imbalance exceeds the band gets
/// the station's full rate (tie-break among those); otherwise, while
/// workload remains, every class is served at rate fraction
/// delta_k m_k (which sums to one per station); an empty station idles.
pub fn simulate_fluid(
    net: &NetworkPrimitives,
    delta: &RatioVector,
    z0: &[f64],
    dt: f64,
    t_end: f64,
    tiebreak: TieBreak,
) -> Result<FluidTrajectory, SimError> {
    let k_count = net.class_count();
    if z0.len() != k_count {
        return Err(SimError::Config("Z0 length mismatch".into()));
    }
    if z0.iter().any(|&z| !(z >= 0.0)) {
        return Err(SimError::Config("Z0 must be nonnegative".into()));
    }
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(SimError::Config("dt and T must be positive".into()));
    }
    let min_m = net
        .mean_service()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if dt > min_m / 4.0 {
        return Err(SimError::Step(format!(
            "dt = {dt} exceeds the stability guard min m / 4 = {}",
            min_m / 4.0
        )));
    }
    let max_mu = net
        .mean_service()
        .iter()
        .map(|m| 1.0 / m)
        .fold(0.0f64, f64::max);
    let band = 10.0 * dt * max_mu;
    let d = delta.delta();
    let m = net.mean_service();
    let steps = (t_end / dt).ceil() as usize;

    let mut z = z0.to_vec();
    let mut traj = FluidTrajectory {
        times: Vec::with_capacity(steps + 1),
        z: Vec::with_capacity(steps + 1),
        w: Vec::with_capacity(steps + 1),
        eps: Vec::with_capacity(steps + 1),
        allocations: Vec::with_capacity(steps + 1),
        band,
    };
    for step in 0..=steps {
        let t = step as f64 * dt;
        let w = net.workload(&z);
        let eps: Vec<f64> = (0..k_count)
            .map(|k| z[k] - d[k] * w[net.station_of(k)])
            .collect();
        // Service allocation per station.
        let mut u = vec![0.0; k_count];
        for j in 0..net.station_count() {
            let classes = net.classes_at(j);
            let over: Vec<usize> = classes
                .iter()
                .cloned()
                .filter(|&k| eps[k] > band)
                .collect();
            if !over.is_empty() {
                let winner = match tiebreak {
                    TieBreak::LowestIndex => over[0],
                    TieBreak::MaxImbalance => over
                        .iter()
                        .cloned()
                        .max_by(|&a, &b| eps[a].partial_cmp(&eps[b]).unwrap())
                        .unwrap(),
                };
                u[winner] = 1.0;
            } else if w[j] > band {
                for &k in &classes {
                    u[k] = d[k] * m[k];
                }
            }
        }
        traj.times.push(t);
        traj.z.push(z.clone());
        traj.w.push(w);
        traj.eps.push(eps);
        traj.allocations.push(u.clone());
        if step == steps {
            break;
        }
        // Z' = alpha + P' M^-1 u - M^-1 u, clamped at zero.
        for k in 0..k_count {
            let inflow: f64 = net.arrival()[k]
                + (0..k_count)
                    .map(|l| net.routing()[(l, k)] * u[l] / m[l])
                    .sum::<f64>();
            z[k] = (z[k] + dt * (inflow - u[k] / m[k])).max(0.0);
        }
    }
    Ok(traj)
}
