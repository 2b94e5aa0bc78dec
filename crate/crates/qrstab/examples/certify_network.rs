//! Produce full robustness certificates: one network that certifies and
//! one that fails with a culprit corner.

use qrstab::certifier::{certify_full, SscFamily, Verdict};
use qrstab::network::{build_dhv, build_push_started_lu_kumar};

fn main() {
    // A balanced six-class reentrant line, including the state-space
    // collapse side of the certificate.
    let net = build_dhv(&[0.5; 6], 0.95).expect("valid network");
    let cert = certify_full(&net, Some(SscFamily::Dhv)).expect("certification");
    println!("balanced six-class line: {:?}", cert.verdict);
    println!("  corners checked: {}", cert.sp.corner_reports.len());
    println!("  all Chen-S: {}", cert.sp.all_chen_s);
    if let Some(ssc) = &cert.ssc {
        println!(
            "  collapse inequalities feasible: {} (p* = {:.3})",
            ssc.feasible, ssc.p_star
        );
    }
    assert_eq!(cert.verdict, Verdict::Certified);

    // A five-class network whose lowest-{4,2} corner breaks the test.
    let net = build_push_started_lu_kumar(&[0.41, 0.18, 0.24, 0.35, 0.82], 0.8)
        .expect("valid network");
    let cert = certify_full(&net, None).expect("certification");
    println!("\nfive-class push-started line: {:?}", cert.verdict);
    if let Some(culprit) = &cert.sp.culprit {
        println!("  culprit corner: lowest {{{}}}", culprit.label_lowest());
    }
    if let Some(reason) = &cert.sp.reason {
        println!("  reason: {reason}");
    }
    assert_eq!(cert.verdict, Verdict::NotCertified);
}
