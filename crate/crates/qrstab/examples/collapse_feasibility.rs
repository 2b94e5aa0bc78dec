//! Feasibility of the state-space collapse inequality systems: a feasible
//! balanced case, an infeasible unbalanced case, and a parameter sweep
//! locating the feasibility boundary for the four-class family.

use qrstab::ssc::{dhv_system, feasible, lk_system, FEASIBLE_TOL};

fn main() {
    let sys = dhv_system(&[0.5; 6], 0.95);
    let report = feasible(&sys, FEASIBLE_TOL).expect("lp");
    println!(
        "balanced six-class system: feasible = {}, p* = {:.4}",
        report.feasible, report.p_star
    );
    if let Some(h) = &report.h_witness {
        println!(
            "  witness h = [{}]",
            h.iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }

    let sys = dhv_system(&[0.1, 0.9, 0.1, 0.9, 0.1, 0.9], 0.99);
    let report = feasible(&sys, FEASIBLE_TOL).expect("lp");
    println!(
        "unbalanced six-class system: feasible = {}, p* = {:.4}",
        report.feasible, report.p_star
    );

    // Four-class family m = (1-b, b, 1-b, b): feasibility flips when
    // m2 + m4 = 2b crosses 1.
    println!("\nfour-class sweep:");
    for i in 0..9 {
        let s = 0.6 + 0.1 * i as f64;
        let b = s / 2.0;
        let sys = lk_system(&[1.0 - b, b, 1.0 - b, b], 0.9);
        let report = feasible(&sys, FEASIBLE_TOL).expect("lp");
        println!("  m2 + m4 = {s:.1}: feasible = {}", report.feasible);
        assert_eq!(report.feasible, s < 1.0);
    }
}
