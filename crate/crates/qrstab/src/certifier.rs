//! Robust certificates over the whole ratio polytope: corner enumeration
//! with same-sign determinant checks, combination with the
//! linear-attraction feasibility report, and polytope region scans.

use serde::Serialize;

use crate::error::{NetworkError, RatioError};
use crate::matrix_classes::{is_chen_s, is_completely_s, ChenReport};
use crate::network::NetworkPrimitives;
use crate::ratio::{corners, free_classes, from_free_coords, CornerSpec};
use crate::reflection::{reflection, DetSign};
use crate::ssc::{dhv_system, feasible, lk_system, pslk_system, SSCReport, FEASIBLE_TOL};

const NOMINAL_LOAD_MARGIN: f64 = 1e-12;

/// Certificate verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    NotCertified,
    Unknown,
}

/// Benchmark family whose linear-attraction system is hand-derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SscFamily {
    Dhv,
    PushStartedLuKumar,
    LuKumar,
}

/// Everything measured at one static-priority corner.
#[derive(Debug, Clone, Serialize)]
pub struct CornerReport {
    pub spec: CornerSpec,
    /// 1-based lowest-priority classes, station order.
    pub label: String,
    /// 1-based high-priority classes when every station has two classes.
    pub label_high: Option<String>,
    pub det_rinv: f64,
    /// det(R) = 1 / det(R^{-1}); absent when not invertible.
    pub det_r: Option<f64>,
    pub det_sign: String,
    pub invertible: bool,
    pub completely_s: bool,
    pub chen_s: ChenReport,
}

impl CornerReport {
    pub fn passes(&self) -> bool {
        self.invertible && self.completely_s && self.chen_s.holds
    }
}

/// Corner-enumeration certificate for robust stability of the workload
/// dynamics under every static-priority policy (and, by convexity, every
/// ratio matrix).
#[derive(Debug, Clone, Serialize)]
pub struct RobustSPCertificate {
    pub corner_reports: Vec<CornerReport>,
    pub all_invertible: bool,
    pub all_chen_s: bool,
    pub same_sign: bool,
    pub verdict: Verdict,
    pub culprit: Option<CornerSpec>,
    pub reason: Option<String>,
}

/// Full robust queue-ratio certificate: corner certificate plus the
/// family's state-space-collapse feasibility report.
#[derive(Debug, Clone, Serialize)]
pub struct RobustQRCertificate {
    pub sp: RobustSPCertificate,
    pub ssc: Option<SSCReport>,
    pub verdict: Verdict,
}

/// Which membership tests a region scan runs per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    ChenS,
    CompletelyS,
    Both,
}

/// One grid point of a region scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    pub coords: Vec<f64>,
    pub in_polytope: bool,
    pub invertible: Option<bool>,
    pub det_sign: Option<String>,
    pub completely_s: Option<bool>,
    pub chen_s: Option<bool>,
}

fn corner_report(
    net: &NetworkPrimitives,
    spec: CornerSpec,
    rv: &crate::ratio::RatioVector,
) -> Result<CornerReport, NetworkError> {
    let data = reflection(net, rv).map_err(|e| NetworkError::Invalid(e.to_string()))?;
    let label = spec.label_lowest();
    let label_high = spec.label_high(net);
    if !data.invertible {
        return Ok(CornerReport {
            spec,
            label,
            label_high,
            det_rinv: data.det_rinv,
            det_r: None,
            det_sign: DetSign::Zero.as_str().to_string(),
            invertible: false,
            completely_s: false,
            chen_s: ChenReport {
                holds: false,
                h_witness: None,
                epsilon_star: 0.0,
                failing_partition: None,
                method: crate::matrix_classes::ChenMethod::Exact,
                vacuous_partitions: Vec::new(),
                inconclusive: false,
            },
        });
    }
    let r = data.r.as_ref().unwrap();
    let theta = data.theta.as_ref().unwrap();
    let completely_s = is_completely_s(r)?.holds;
    let chen = is_chen_s(r, theta)?;
    Ok(CornerReport {
        det_sign: data.det_sign().as_str().to_string(),
        det_r: data.det_r,
        det_rinv: data.det_rinv,
        invertible: true,
        completely_s,
        chen_s: chen,
        label,
        label_high,
        spec,
    })
}

/// Certify robust stability of the reflected workload dynamics by corner
/// enumeration. `fast` short-circuits on the first failing corner.
pub fn certify_sp(net: &NetworkPrimitives, fast: bool) -> Result<RobustSPCertificate, NetworkError> {
    let derived = net.derive()?;
    if let Some((j, &rho)) = derived
        .rho
        .iter()
        .enumerate()
        .find(|(_, &rho)| rho >= 1.0 - NOMINAL_LOAD_MARGIN)
    {
        return Ok(RobustSPCertificate {
            corner_reports: Vec::new(),
            all_invertible: false,
            all_chen_s: false,
            same_sign: false,
            verdict: Verdict::NotCertified,
            culprit: None,
            reason: Some(format!(
                "nominal load violated: rho_{} = {rho} >= 1",
                j + 1
            )),
        });
    }
    let mut reports = Vec::new();
    for (spec, rv) in corners(net) {
        let report = corner_report(net, spec, &rv)?;
        let failed = !report.passes();
        reports.push(report);
        if fast && failed {
            break;
        }
    }
    let all_invertible = reports.iter().all(|r| r.invertible);
    let all_chen_s = reports.iter().all(|r| r.chen_s.holds);
    let first_sign = reports.first().map(|r| r.det_sign.clone());
    let same_sign = all_invertible
        && reports
            .iter()
            .all(|r| Some(&r.det_sign) == first_sign.as_ref());
    let culprit = reports
        .iter()
        .find(|r| !r.passes())
        .map(|r| r.spec.clone())
        .or_else(|| {
            if same_sign {
                None
            } else {
                reports
                    .iter()
                    .find(|r| Some(&r.det_sign) != first_sign.as_ref())
                    .map(|r| r.spec.clone())
            }
        });
    let verdict = if all_invertible && all_chen_s && same_sign {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    };
    let reason = match verdict {
        Verdict::Certified => None,
        _ => Some(if !all_invertible {
            "a corner reflection matrix is singular".to_string()
        } else if !all_chen_s {
            "a corner fails the drift test".to_string()
        } else {
            "corner determinants change sign".to_string()
        }),
    };
    Ok(RobustSPCertificate {
        corner_reports: reports,
        all_invertible,
        all_chen_s,
        same_sign,
        verdict,
        culprit,
        reason,
    })
}

fn family_ssc(net: &NetworkPrimitives, family: SscFamily) -> Result<SSCReport, NetworkError> {
    let m = net.mean_service();
    let alpha1 = net.arrival()[0];
    let sys = match family {
        SscFamily::Dhv => {
            let m: [f64; 6] = m
                .try_into()
                .map_err(|_| NetworkError::Invalid("family expects 6 classes".into()))?;
            dhv_system(&m, alpha1)
        }
        SscFamily::PushStartedLuKumar => {
            let m: [f64; 5] = m
                .try_into()
                .map_err(|_| NetworkError::Invalid("family expects 5 classes".into()))?;
            pslk_system(&m, alpha1)
        }
        SscFamily::LuKumar => {
            let m: [f64; 4] = m
                .try_into()
                .map_err(|_| NetworkError::Invalid("family expects 4 classes".into()))?;
            lk_system(&m, alpha1)
        }
    };
    feasible(&sys, FEASIBLE_TOL).map_err(NetworkError::from)
}

/// Full robust queue-ratio certificate: corner certificate combined with
/// the family's linear-attraction feasibility. With no family the
/// state-space-collapse side cannot be automated and the verdict is
/// Unknown (unless the corner certificate already fails).
pub fn certify_full(
    net: &NetworkPrimitives,
    family: Option<SscFamily>,
) -> Result<RobustQRCertificate, NetworkError> {
    let sp = certify_sp(net, false)?;
    let Some(family) = family else {
        let verdict = if sp.verdict == Verdict::Certified {
            Verdict::Unknown
        } else {
            Verdict::NotCertified
        };
        return Ok(RobustQRCertificate {
            sp,
            ssc: None,
            verdict,
        });
    };
    let ssc = family_ssc(net, family)?;
    let ssc_ok = ssc.feasible && ssc.alpha_ok && ssc.violated_conditions.is_empty();
    let verdict = if sp.verdict == Verdict::Certified && ssc_ok {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    };
    Ok(RobustQRCertificate {
        sp,
        ssc: Some(ssc),
        verdict,
    })
}

/// Evaluate a grid over the free ratio coordinates. Each axis is sampled
/// at `n` evenly spaced points from 0 to the free class's 1/m (inclusive,
/// so corners are grid points); points whose pinned coordinate would go
/// negative are recorded as outside the polytope and skipped.
pub fn scan_region(
    net: &NetworkPrimitives,
    n: usize,
    mode: ScanMode,
) -> Result<Vec<ScanRecord>, NetworkError> {
    if n < 2 {
        return Err(NetworkError::Invalid("scan resolution must be >= 2".into()));
    }
    let free = free_classes(net);
    let axes: Vec<Vec<f64>> = free
        .iter()
        .map(|&k| {
            let ub = 1.0 / net.mean_service()[k];
            (0..n).map(|i| ub * i as f64 / (n - 1) as f64).collect()
        })
        .collect();
    let mut records = Vec::new();
    let mut index = vec![0usize; axes.len()];
    loop {
        let coords: Vec<f64> = index.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
        records.push(scan_point(net, &coords, mode)?);
        // next grid index, last axis fastest
        let mut d = axes.len();
        loop {
            if d == 0 {
                return Ok(records);
            }
            d -= 1;
            index[d] += 1;
            if index[d] < n {
                break;
            }
            index[d] = 0;
            if d == 0 {
                return Ok(records);
            }
        }
    }
}

fn scan_point(
    net: &NetworkPrimitives,
    coords: &[f64],
    mode: ScanMode,
) -> Result<ScanRecord, NetworkError> {
    let rv = match from_free_coords(net, coords) {
        Ok(rv) => rv,
        Err(RatioError::OutOfPolytope { .. }) => {
            return Ok(ScanRecord {
                coords: coords.to_vec(),
                in_polytope: false,
                invertible: None,
                det_sign: None,
                completely_s: None,
                chen_s: None,
            });
        }
        Err(e) => return Err(NetworkError::Invalid(e.to_string())),
    };
    let data = reflection(net, &rv).map_err(|e| NetworkError::Invalid(e.to_string()))?;
    let mut record = ScanRecord {
        coords: coords.to_vec(),
        in_polytope: true,
        invertible: Some(data.invertible),
        det_sign: Some(data.det_sign().as_str().to_string()),
        completely_s: None,
        chen_s: None,
    };
    if !data.invertible {
        if matches!(mode, ScanMode::CompletelyS | ScanMode::Both) {
            record.completely_s = Some(false);
        }
        if matches!(mode, ScanMode::ChenS | ScanMode::Both) {
            record.chen_s = Some(false);
        }
        return Ok(record);
    }
    let r = data.r.as_ref().unwrap();
    if matches!(mode, ScanMode::CompletelyS | ScanMode::Both) {
        record.completely_s = Some(is_completely_s(r)?.holds);
    }
    if matches!(mode, ScanMode::ChenS | ScanMode::Both) {
        let theta = data.theta.as_ref().unwrap();
        record.chen_s = Some(is_chen_s(r, theta)?.holds);
    }
    Ok(record)
}

/// RFC-4180 CSV for a scan: free coordinate names, then the record flags.
pub fn scan_to_csv(net: &NetworkPrimitives, records: &[ScanRecord]) -> String {
    let free = free_classes(net);
    let mut header: Vec<String> = free.iter().map(|&k| format!("delta_{}", k + 1)).collect();
    header.extend(
        ["in_polytope", "invertible", "det_sign", "completely_s", "chen_s"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut out = header.join(",");
    out.push_str("\r\n");
    for rec in records {
        let mut cells: Vec<String> = rec
            .coords
            .iter()
            .map(|v| crate::format_significant(*v))
            .collect();
        cells.push(rec.in_polytope.to_string());
        cells.push(opt_str(&rec.invertible.map(|b| b.to_string())));
        cells.push(opt_str(&rec.det_sign));
        cells.push(opt_str(&rec.completely_s.map(|b| b.to_string())));
        cells.push(opt_str(&rec.chen_s.map(|b| b.to_string())));
        out.push_str(&cells.join(","));
        out.push_str("\r\n");
    }
    out
}

fn opt_str(v: &Option<String>) -> String {
    v.clone().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_dhv, build_lu_kumar, build_push_started_lu_kumar};

    #[test]
    fn balanced_dhv_certified_with_positive_dets() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let cert = certify_sp(&net, false).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.corner_reports.len(), 8);
        for r in &cert.corner_reports {
            assert!(r.det_rinv > 0.0);
            assert!(r.chen_s.holds);
        }
    }

    #[test]
    fn pslk_fig7_not_certified_culprit_lowest_42() {
        let net = build_push_started_lu_kumar(&[0.41, 0.18, 0.24, 0.35, 0.82], 0.8).unwrap();
        let cert = certify_sp(&net, false).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert_eq!(cert.culprit.unwrap().label_lowest(), "4,2");
    }

    #[test]
    fn lk_fig8_right_not_certified_culprit_high_42() {
        let net = build_lu_kumar(&[0.4, 0.7, 0.3, 0.6], 0.9).unwrap();
        let cert = certify_sp(&net, false).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        let culprit = cert.culprit.unwrap();
        // high {4,2} at stations (1,2) means lowest {1,3}
        assert_eq!(culprit.label_lowest(), "1,3");
        assert_eq!(culprit.label_high(&net).unwrap(), "4,2");
    }

    #[test]
    fn overloaded_net_rejected_by_nominal_load() {
        let net = build_dhv(&[0.5; 6], 1.2).unwrap();
        let cert = certify_sp(&net, false).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(cert.reason.unwrap().contains("nominal load"));
        assert!(cert.corner_reports.is_empty());
    }

    #[test]
    fn fast_mode_short_circuits() {
        let net = build_push_started_lu_kumar(&[0.41, 0.18, 0.24, 0.35, 0.82], 0.8).unwrap();
        let fast = certify_sp(&net, true).unwrap();
        let full = certify_sp(&net, false).unwrap();
        assert_eq!(fast.verdict, Verdict::NotCertified);
        assert!(fast.corner_reports.len() <= full.corner_reports.len());
    }

    #[test]
    fn full_certificate_dhv() {
        let net = build_dhv(&[0.5; 6], 0.95).unwrap();
        let cert = certify_full(&net, Some(SscFamily::Dhv)).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert!(cert.ssc.unwrap().feasible);

        let net = build_dhv(&[0.1, 0.9, 0.1, 0.9, 0.1, 0.9], 0.99).unwrap();
        let cert = certify_full(&net, Some(SscFamily::Dhv)).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(!cert.ssc.unwrap().feasible);
    }

    #[test]
    fn no_family_is_unknown() {
        let net = build_dhv(&[0.5; 6], 0.95).unwrap();
        let cert = certify_full(&net, None).unwrap();
        assert_eq!(cert.verdict, Verdict::Unknown);
        assert!(cert.ssc.is_none());
    }

    #[test]
    fn scan_n2_visits_corners() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let records = scan_region(&net, 2, ScanMode::ChenS).unwrap();
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| r.in_polytope));
        assert!(records.iter().all(|r| r.chen_s == Some(true)));
    }

    #[test]
    fn scan_marks_out_of_polytope_points() {
        // Station 1 of the push-started network has three classes; large
        // free coordinates push the pinned delta negative.
        let net = build_push_started_lu_kumar(&[0.3, 0.6, 0.2, 0.5, 0.4], 0.8).unwrap();
        let records = scan_region(&net, 3, ScanMode::CompletelyS).unwrap();
        assert!(records.iter().any(|r| !r.in_polytope));
        assert!(records.iter().any(|r| r.in_polytope));
        for r in records.iter().filter(|r| !r.in_polytope) {
            assert!(r.chen_s.is_none() && r.completely_s.is_none());
        }
    }

    #[test]
    fn scan_csv_deterministic_and_crlf() {
        let net = build_lu_kumar(&[0.6, 0.4, 0.6, 0.4], 0.9).unwrap();
        let r1 = scan_region(&net, 3, ScanMode::Both).unwrap();
        let r2 = scan_region(&net, 3, ScanMode::Both).unwrap();
        let c1 = scan_to_csv(&net, &r1);
        let c2 = scan_to_csv(&net, &r2);
        assert_eq!(c1, c2);
        assert!(c1.starts_with("delta_4,delta_3,in_polytope"));
        assert!(c1.contains("\r\n"));
    }

    #[test]
    fn certificate_serializes_to_json() {
        let net = build_lu_kumar(&[0.6, 0.4, 0.6, 0.4], 0.9).unwrap();
        let cert = certify_full(&net, Some(SscFamily::LuKumar)).unwrap();
        let json = serde_json::to_string_pretty(&cert).unwrap();
        assert!(json.contains("\"verdict\""));
        assert!(json.contains("\"corner_reports\""));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["verdict"], "Certified");
    }
}
