//! Multiclass queueing-network primitives (C, M, P, alpha) and derived
//! quantities (Q, lambda, rho), plus the three benchmark network builders.
//!
//! Classes and stations are 0-based inside the library; JSON files and
//! reports use 1-based indices.

use serde::{Deserialize, Serialize};

use crate::error::{NetworkError, NumericsError};
use crate::numerics::Matrix;

/// Network primitives: station map, mean service times, Bernoulli routing
/// and exogenous arrival rates.
#[derive(Debug, Clone)]
pub struct NetworkPrimitives {
    station_count: usize,
    station_of: Vec<usize>,
    mean_service: Vec<f64>,
    routing: Matrix,
    arrival: Vec<f64>,
}

/// Q = (I - P')^{-1}, effective arrivals lambda = Q alpha, traffic
/// intensities rho = C M lambda.
#[derive(Debug, Clone)]
pub struct DerivedQuantities {
    pub q: Matrix,
    pub lambda: Vec<f64>,
    pub rho: Vec<f64>,
}

/// Report-style validation outcome: hard violations plus warnings
/// (nominal-load failures are warnings, not errors).
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl NetworkPrimitives {
    pub fn new(
        station_count: usize,
        station_of: Vec<usize>,
        mean_service: Vec<f64>,
        routing: Matrix,
        arrival: Vec<f64>,
    ) -> Result<Self, NetworkError> {
        let net = Self {
            station_count,
            station_of,
            mean_service,
            routing,
            arrival,
        };
        let report = net.validate();
        if !report.is_valid() {
            return Err(NetworkError::Invalid(report.violations.join("; ")));
        }
        Ok(net)
    }

    pub fn station_count(&self) -> usize {
        self.station_count
    }

    pub fn class_count(&self) -> usize {
        self.station_of.len()
    }

    /// Station serving class `k` (0-based).
    pub fn station_of(&self, class: usize) -> usize {
        self.station_of[class]
    }

    pub fn mean_service(&self) -> &[f64] {
        &self.mean_service
    }

    pub fn service_rate(&self, class: usize) -> f64 {
        1.0 / self.mean_service[class]
    }

    pub fn routing(&self) -> &Matrix {
        &self.routing
    }

    pub fn arrival(&self) -> &[f64] {
        &self.arrival
    }

    /// Classes served by station `j`, in ascending class order.
    pub fn classes_at(&self, station: usize) -> Vec<usize> {
        (0..self.class_count())
            .filter(|&k| self.station_of[k] == station)
            .collect()
    }

    /// J x K constituency matrix.
    pub fn constituency(&self) -> Matrix {
        let mut c = Matrix::zeros(self.station_count, self.class_count());
        for (k, &j) in self.station_of.iter().enumerate() {
            c[(j, k)] = 1.0;
        }
        c
    }

    /// Station workload W_j = sum_{k in C(j)} m_k z_k.
    pub fn workload(&self, z: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.station_count];
        for (k, &j) in self.station_of.iter().enumerate() {
            w[j] += self.mean_service[k] * z[k];
        }
        w
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let j_count = self.station_count;
        let k_count = self.station_of.len();
        if j_count == 0 {
            report.violations.push("station count must be >= 1".into());
        }
        if k_count == 0 {
            report.violations.push("class count must be >= 1".into());
        }
        if let Some(&bad) = self.station_of.iter().find(|&&j| j >= j_count) {
            report
                .violations
                .push(format!("station_of refers to station {} out of range", bad + 1));
        }
        for j in 0..j_count {
            if !self.station_of.contains(&j) {
                report
                    .violations
                    .push(format!("station {} serves no class", j + 1));
            }
        }
        if self.mean_service.len() != k_count {
            report.violations.push("mean_service length mismatch".into());
        } else if self.mean_service.iter().any(|&m| !(m > 0.0)) {
            report.violations.push("mean_service must be positive".into());
        }
        if self.arrival.len() != k_count {
            report.violations.push("arrival_rates length mismatch".into());
        } else if self.arrival.iter().any(|&a| !(a >= 0.0)) {
            report.violations.push("arrival_rates must be nonnegative".into());
        }
        if self.routing.rows() != k_count || self.routing.cols() != k_count {
            report.violations.push("routing matrix must be KxK".into());
        } else {
            for k in 0..k_count {
                let row = self.routing.row(k);
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    report
                        .violations
                        .push(format!("routing row {} has entries outside [0,1]", k + 1));
                } else if row.iter().sum::<f64>() > 1.0 + 1e-12 {
                    report
                        .violations
                        .push(format!("routing row {} sums above 1", k + 1));
                }
            }
        }
        if !report.violations.is_empty() {
            return report;
        }
        match self.derive() {
            Ok(derived) => {
                for (j, &rho) in derived.rho.iter().enumerate() {
                    if rho >= 1.0 {
                        report
                            .warnings
                            .push(format!("rho_{} = {rho} >= 1 (nominal load violated)", j + 1));
                    }
                }
            }
            Err(NetworkError::OpenNetwork) => {
                report
                    .violations
                    .push("openness: (I - P') is singular (closed network)".into());
            }
            Err(e) => report.violations.push(e.to_string()),
        }
        report
    }

    /// Compute Q = (I - P')^{-1}, lambda = Q alpha, rho = C M lambda.
    pub fn derive(&self) -> Result<DerivedQuantities, NetworkError> {
        let k = self.class_count();
        let pt = self.routing.transpose();
        let mut i_minus_pt = Matrix::identity(k);
        for r in 0..k {
            for c in 0..k {
                i_minus_pt[(r, c)] -= pt[(r, c)];
            }
        }
        let q = match i_minus_pt.invert() {
            Ok(q) => q,
            Err(NumericsError::Singular) => return Err(NetworkError::OpenNetwork),
            Err(e) => return Err(e.into()),
        };
        let lambda = q.matvec(&self.arrival)?;
        let mut rho = vec![0.0; self.station_count];
        for (cls, &j) in self.station_of.iter().enumerate() {
            rho[j] += self.mean_service[cls] * lambda[cls];
        }
        Ok(DerivedQuantities { q, lambda, rho })
    }

    /// True iff the spread of station traffic intensities is within `tol`.
    pub fn is_balanced(&self, tol: f64) -> Result<bool, NetworkError> {
        let rho = self.derive()?.rho;
        let max = rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = rho.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(max - min <= tol)
    }
}

/// Deterministic chain routing 0 -> 1 -> ... -> K-1 -> exit.
fn chain_routing(k: usize) -> Matrix {
    let mut p = Matrix::zeros(k, k);
    for i in 0..k - 1 {
        p[(i, i + 1)] = 1.0;
    }
    p
}

fn chain_network(
    station_count: usize,
    station_of: Vec<usize>,
    m: &[f64],
    alpha1: f64,
) -> Result<NetworkPrimitives, NetworkError> {
    let k = station_of.len();
    let mut arrival = vec![0.0; k];
    arrival[0] = alpha1;
    NetworkPrimitives::new(
        station_count,
        station_of,
        m.to_vec(),
        chain_routing(k),
        arrival,
    )
}

/// DHV network: 3 stations, 6 classes, route 1->2->3->4->5->6->exit,
/// stations (1,2,3,1,2,3).
pub fn build_dhv(m: &[f64; 6], alpha1: f64) -> Result<NetworkPrimitives, NetworkError> {
    chain_network(3, vec![0, 1, 2, 0, 1, 2], m, alpha1)
}

/// Push-started Lu-Kumar network: 2 stations, 5 classes, stations
/// (1,2,1,1,2), chain routing.
pub fn build_push_started_lu_kumar(
    m: &[f64; 5],
    alpha1: f64,
) -> Result<NetworkPrimitives, NetworkError> {
    chain_network(2, vec![0, 1, 0, 0, 1], m, alpha1)
}

/// Lu-Kumar network: 2 stations, 4 classes, stations (1,2,2,1), chain routing.
pub fn build_lu_kumar(m: &[f64; 4], alpha1: f64) -> Result<NetworkPrimitives, NetworkError> {
    chain_network(2, vec![0, 1, 1, 0], m, alpha1)
}

/// On-disk network description; indices are 1-based.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub stations: usize,
    pub classes: usize,
    pub station_of: Vec<usize>,
    pub mean_service: Vec<f64>,
    pub routing: Vec<Vec<f64>>,
    pub arrival_rates: Vec<f64>,
}

impl NetworkFile {
    pub fn to_network(&self) -> Result<NetworkPrimitives, NetworkError> {
        if self.station_of.len() != self.classes {
            return Err(NetworkError::Invalid(
                "station_of length must equal the class count".into(),
            ));
        }
        if self.station_of.iter().any(|&j| j == 0 || j > self.stations) {
            return Err(NetworkError::Invalid(
                "station_of entries must be 1-based station indices".into(),
            ));
        }
        let routing = Matrix::from_rows(&self.routing)
            .map_err(|e| NetworkError::Invalid(format!("routing: {e}")))?;
        NetworkPrimitives::new(
            self.stations,
            self.station_of.iter().map(|&j| j - 1).collect(),
            self.mean_service.clone(),
            routing,
            self.arrival_rates.clone(),
        )
    }

    pub fn from_network(net: &NetworkPrimitives) -> Self {
        Self {
            stations: net.station_count(),
            classes: net.class_count(),
            station_of: (0..net.class_count()).map(|k| net.station_of(k) + 1).collect(),
            mean_service: net.mean_service().to_vec(),
            routing: (0..net.class_count())
                .map(|k| net.routing().row(k).to_vec())
                .collect(),
            arrival_rates: net.arrival().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dhv_balanced_derivation() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let d = net.derive().unwrap();
        for &l in &d.lambda {
            assert!((l - 0.811).abs() < 1e-12);
        }
        for &r in &d.rho {
            assert!((r - 0.811).abs() < 1e-12);
        }
        assert_eq!(
            (0..6).map(|k| net.station_of(k)).collect::<Vec<_>>(),
            vec![0, 1, 2, 0, 1, 2]
        );
    }

    #[test]
    fn dhv_fig3_rho() {
        let net = build_dhv(&[0.1, 0.8, 0.1, 0.65, 0.1, 0.4], 0.811).unwrap();
        let rho = net.derive().unwrap().rho;
        assert!((rho[0] - 0.60825).abs() < 1e-12);
        assert!((rho[1] - 0.7299).abs() < 1e-12);
        assert!((rho[2] - 0.4055).abs() < 1e-12);
    }

    #[test]
    fn single_class_network() {
        let net = NetworkPrimitives::new(
            1,
            vec![0],
            vec![0.25],
            Matrix::zeros(1, 1),
            vec![2.0],
        )
        .unwrap();
        let d = net.derive().unwrap();
        assert!((d.lambda[0] - 2.0).abs() < 1e-12);
        assert!((d.rho[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_network_rejected() {
        // 2-class cycle: row sums are 1, so (I - P') is singular.
        let routing = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let err = NetworkPrimitives::new(1, vec![0, 0], vec![0.5, 0.5], routing, vec![0.1, 0.0]);
        assert!(err.is_err());
    }

    #[test]
    fn validation_flags_nonpositive_service() {
        let mut net = build_dhv(&[0.5; 6], 0.5).unwrap();
        net.mean_service[1] = 0.0;
        let report = net.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("mean_service must be positive")));
    }

    #[test]
    fn validation_warns_on_overload() {
        let net = build_dhv(&[0.5; 6], 1.2).unwrap();
        let report = net.validate();
        assert!(report.is_valid());
        assert!(report.warnings.iter().any(|w| w.contains("rho_1 = 1.2")));
    }

    #[test]
    fn pslk_fig6_and_fig7_rho() {
        let net = build_push_started_lu_kumar(&[0.3, 0.6, 0.2, 0.5, 0.4], 0.8).unwrap();
        let rho = net.derive().unwrap().rho;
        assert!((rho[0] - 0.8).abs() < 1e-12);
        assert!((rho[1] - 0.8).abs() < 1e-12);
        let net = build_push_started_lu_kumar(&[0.41, 0.18, 0.24, 0.35, 0.82], 0.8).unwrap();
        let rho = net.derive().unwrap().rho;
        assert!((rho[0] - 0.8).abs() < 1e-12);
        assert!((rho[1] - 0.8).abs() < 1e-12);
        assert_eq!(
            (0..5).map(|k| net.station_of(k)).collect::<Vec<_>>(),
            vec![0, 1, 0, 0, 1]
        );
    }

    #[test]
    fn lu_kumar_rho_and_stations() {
        let net = build_lu_kumar(&[0.6, 0.4, 0.6, 0.4], 0.9).unwrap();
        let rho = net.derive().unwrap().rho;
        assert!((rho[0] - 0.9).abs() < 1e-12);
        assert!((rho[1] - 0.9).abs() < 1e-12);
        assert_eq!(
            (0..4).map(|k| net.station_of(k)).collect::<Vec<_>>(),
            vec![0, 1, 1, 0]
        );
    }

    #[test]
    fn balance_check() {
        assert!(build_dhv(&[0.5; 6], 0.811).unwrap().is_balanced(1e-12).unwrap());
        assert!(!build_dhv(&[0.1, 0.8, 0.1, 0.65, 0.1, 0.4], 0.811)
            .unwrap()
            .is_balanced(1e-12)
            .unwrap());
    }

    #[test]
    fn q_inverts_i_minus_pt() {
        let net = build_push_started_lu_kumar(&[0.3, 0.6, 0.2, 0.5, 0.4], 0.8).unwrap();
        let d = net.derive().unwrap();
        let k = net.class_count();
        let pt = net.routing().transpose();
        let mut i_minus_pt = Matrix::identity(k);
        for r in 0..k {
            for c in 0..k {
                i_minus_pt[(r, c)] -= pt[(r, c)];
            }
        }
        let prod = d.q.matmul(&i_minus_pt).unwrap();
        for r in 0..k {
            for c in 0..k {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((prod[(r, c)] - expect).abs() < 1e-10);
                assert!(d.q[(r, c)] >= -1e-12);
            }
        }
    }

    #[test]
    fn network_file_round_trip() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let file = NetworkFile::from_network(&net);
        let json = serde_json::to_string(&file).unwrap();
        let parsed: NetworkFile = serde_json::from_str(&json).unwrap();
        let back = parsed.to_network().unwrap();
        assert_eq!(back.station_of(3), 0);
        assert_eq!(back.mean_service(), net.mean_service());
    }

    #[test]
    fn network_file_rejects_unknown_keys() {
        let json = r#"{"stations":1,"classes":1,"station_of":[1],"mean_service":[0.5],
                       "routing":[[0.0]],"arrival_rates":[0.1],"extra":1}"#;
        assert!(serde_json::from_str::<NetworkFile>(json).is_err());
    }
}
