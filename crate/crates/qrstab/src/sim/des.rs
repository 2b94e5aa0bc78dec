//! Event-driven stochastic simulation with preemptive-resume service
//! under queue-ratio or static-priority policies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::SimError;
use crate::network::NetworkPrimitives;
use crate::sim::fluid::TieBreak;

/// PRNG identifier recorded in trajectory output for reproducibility.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Primitive distribution family (rates/means come from the network).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    Exponential,
    Deterministic,
}

/// Scheduling policy applied by every server at each decision epoch.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Serve the head of a class whose queue exceeds its workload share.
    QR { delta: Vec<f64>, tiebreak: TieBreak },
    /// Fixed order per station, highest priority first (0-based classes).
    StaticPriority { order: Vec<Vec<usize>> },
}

#[derive(Debug, Clone)]
pub struct DESConfig {
    pub seed: u64,
    pub horizon: f64,
    pub interarrival: Dist,
    pub service: Dist,
    pub policy: Policy,
    pub sample_dt: f64,
}

/// Sampled queue lengths and total job count.
#[derive(Debug, Clone)]
pub struct DESTrajectory {
    pub times: Vec<f64>,
    pub z: Vec<Vec<u64>>,
    pub total: Vec<u64>,
    pub seed: u64,
}

impl DESTrajectory {
    /// CSV with a reproducibility comment line, then
    /// time, Z_1..Z_K, total.
    pub fn to_csv(&self) -> String {
        let k = self.z[0].len();
        let mut out = format!("# rng={RNG_ALGORITHM} seed={}\r\n", self.seed);
        let mut header = vec!["time".to_string()];
        header.extend((1..=k).map(|i| format!("Z_{i}")));
        header.push("total".to_string());
        out.push_str(&header.join(","));
        out.push_str("\r\n");
        for (i, &t) in self.times.iter().enumerate() {
            let mut cells = vec![crate::format_significant(t)];
            cells.extend(self.z[i].iter().map(|v| v.to_string()));
            cells.push(self.total[i].to_string());
            out.push_str(&cells.join(","));
            out.push_str("\r\n");
        }
        out
    }
}

fn draw(rng: &mut ChaCha12Rng, dist: Dist, mean: f64) -> f64 {
    match dist {
        Dist::Deterministic => mean,
        Dist::Exponential => {
            let u: f64 = rng.gen::<f64>();
            -mean * (1.0 - u).ln()
        }
    }
}

/// Pick the class a station serves, or None to idle.
fn choose_class(
    net: &NetworkPrimitives,
    policy: &Policy,
    station: usize,
    z: &[u64],
) -> Option<usize> {
    let classes = net.classes_at(station);
    let nonempty: Vec<usize> = classes.iter().cloned().filter(|&k| z[k] > 0).collect();
    if nonempty.is_empty() {
        return None;
    }
    match policy {
        Policy::StaticPriority { order } => order[station]
            .iter()
            .cloned()
            .find(|&k| z[k] > 0)
            .or(Some(nonempty[0])),
        Policy::QR { delta, tiebreak } => {
            let w: f64 = classes
                .iter()
                .map(|&k| net.mean_service()[k] * z[k] as f64)
                .sum();
            let over: Vec<usize> = nonempty
                .iter()
                .cloned()
                .filter(|&k| z[k] as f64 - delta[k] * w > 0.0)
                .collect();
            if over.is_empty() {
                return Some(nonempty[0]);
            }
            Some(match tiebreak {
                TieBreak::LowestIndex => over[0],
                TieBreak::MaxImbalance => over
                    .iter()
                    .cloned()
                    .max_by(|&a, &b| {
                        let ia = z[a] as f64 - delta[a] * w;
                        let ib = z[b] as f64 - delta[b] * w;
                        ia.partial_cmp(&ib).unwrap()
                    })
                    .unwrap(),
            })
        }
    }
}

/// Run the discrete-event simulation. Deterministic given the seed.
pub fn simulate_des(
    net: &NetworkPrimitives,
    config: &DESConfig,
) -> Result<DESTrajectory, SimError> {
    let k_count = net.class_count();
    if !(config.horizon > 0.0) || !(config.sample_dt > 0.0) {
        return Err(SimError::Config(
            "horizon and sample_dt must be positive".into(),
        ));
    }
    match &config.policy {
        Policy::QR { delta, .. } => {
            if delta.len() != k_count {
                return Err(SimError::Config("delta length mismatch".into()));
            }
            if delta.iter().any(|&d| !(d >= 0.0)) {
                return Err(SimError::Config("delta must be nonnegative".into()));
            }
        }
        Policy::StaticPriority { order } => {
            if order.len() != net.station_count() {
                return Err(SimError::Config("one priority order per station".into()));
            }
            for (j, ord) in order.iter().enumerate() {
                let mut classes = net.classes_at(j);
                let mut sorted = ord.clone();
                sorted.sort_unstable();
                classes.sort_unstable();
                if sorted != classes {
                    return Err(SimError::Config(format!(
                        "priority order for station {} must list exactly its classes",
                        j + 1
                    )));
                }
            }
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut z = vec![0u64; k_count];
    // Remaining work of the partially served head job per class.
    let mut rem: Vec<Option<f64>> = vec![None; k_count];
    let mut next_arrival: Vec<f64> = (0..k_count)
        .map(|k| {
            let a = net.arrival()[k];
            if a > 0.0 {
                draw(&mut rng, config.interarrival, 1.0 / a)
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let mut t = 0.0f64;
    let mut next_sample = 0.0f64;
    let mut traj = DESTrajectory {
        times: Vec::new(),
        z: Vec::new(),
        total: Vec::new(),
        seed: config.seed,
    };

    loop {
        // Decide service at every station; start heads that need a draw.
        let serving: Vec<Option<usize>> = (0..net.station_count())
            .map(|j| choose_class(net, &config.policy, j, &z))
            .collect();
        for &s in serving.iter().flatten() {
            if rem[s].is_none() {
                rem[s] = Some(draw(&mut rng, config.service, net.mean_service()[s]));
            }
        }
        // Next event time.
        let mut t_next = f64::INFINITY;
        for &ta in &next_arrival {
            t_next = t_next.min(ta);
        }
        for &s in serving.iter().flatten() {
            t_next = t_next.min(t + rem[s].unwrap());
        }
        let t_event = t_next.min(config.horizon);
        // Emit samples up to the event.
        while next_sample <= t_event + 1e-12 {
            traj.times.push(next_sample);
            traj.z.push(z.clone());
            traj.total.push(z.iter().sum());
            next_sample += config.sample_dt;
            if next_sample > config.horizon + 1e-12 {
                break;
            }
        }
        if t_next > config.horizon {
            break;
        }
        // Deplete served work.
        let elapsed = t_next - t;
        for &s in serving.iter().flatten() {
            if let Some(r) = rem[s].as_mut() {
                *r -= elapsed;
            }
        }
        t = t_next;
        // Completions first (remaining work hit zero), then arrivals.
        for &s in serving.iter().flatten() {
            if rem[s].map_or(false, |r| r <= 1e-9) {
                rem[s] = None;
                z[s] -= 1;
                // Route to the next class or exit.
                let row = net.routing().row(s);
                let u: f64 = rng.gen::<f64>();
                let mut acc = 0.0;
                for (k, &pr) in row.iter().enumerate() {
                    acc += pr;
                    if u < acc {
                        z[k] += 1;
                        break;
                    }
                }
            }
        }
        for k in 0..k_count {
            if (next_arrival[k] - t).abs() < 1e-12 || next_arrival[k] <= t {
                z[k] += 1;
                next_arrival[k] =
                    t + draw(&mut rng, config.interarrival, 1.0 / net.arrival()[k]);
            }
        }
    }
    Ok(traj)
}
