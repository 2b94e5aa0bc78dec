//! Enumerate the static-priority corners of a six-class reentrant line,
//! printing the reflection determinant and matrix-class verdicts for each.

use qrstab::format_significant;
use qrstab::matrix_classes::{is_chen_s, is_completely_s};
use qrstab::network::build_dhv;
use qrstab::ratio::corners;
use qrstab::reflection::reflection;

fn main() {
    let net = build_dhv(&[0.2, 0.6, 0.3, 0.8, 0.4, 0.7], 0.9).expect("valid network");
    let derived = net.derive().expect("derivable");
    println!(
        "utilizations: [{}]\n",
        derived
            .rho
            .iter()
            .map(|r| format_significant(*r))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "{:<10} {:<10} {:>18} {:>14} {:>8}",
        "lowest", "high", "det(R)", "completely-S", "Chen-S"
    );
    for (spec, rv) in corners(&net) {
        let data = reflection(&net, &rv).expect("reflection");
        if !data.invertible {
            println!("{:<10} singular", spec.label_lowest());
            continue;
        }
        let r = data.r.as_ref().unwrap();
        let theta = data.theta.as_ref().unwrap();
        let cs = is_completely_s(r).expect("lp").holds;
        let chen = is_chen_s(r, theta).expect("lp").holds;
        println!(
            "{:<10} {:<10} {:>18} {:>14} {:>8}",
            spec.label_lowest(),
            spec.label_high(&net).unwrap_or_default(),
            format_significant(data.det_r.unwrap()),
            if cs { "yes" } else { "no" },
            if chen { "yes" } else { "no" },
        );
    }
}
