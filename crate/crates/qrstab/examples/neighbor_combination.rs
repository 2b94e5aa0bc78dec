//! Reflection matrices along an edge of the ratio polytope: the matrix at
//! an interior point is an explicit convex combination of the two
//! endpoint matrices.

use qrstab::network::build_dhv;
use qrstab::ratio::{convex_combine, static_priority, CornerSpec};
use qrstab::reflection::{combination_coefficient, reflection};

fn main() {
    let net = build_dhv(&[0.2, 0.6, 0.3, 0.8, 0.4, 0.7], 0.9).expect("valid network");
    // Two corners that differ only at station 1.
    let d1 = static_priority(&net, &CornerSpec { lowest: vec![0, 4, 5] }).expect("corner");
    let d2 = static_priority(&net, &CornerSpec { lowest: vec![3, 4, 5] }).expect("corner");

    println!("{:>6} {:>10} {:>22}", "lambda", "beta", "max combination error");
    for i in 1..10 {
        let lambda = i as f64 / 10.0;
        let (beta, combined) =
            combination_coefficient(&net, &d1, &d2, lambda).expect("combination");
        let d3 = convex_combine(&net, &d1, &d2, lambda).expect("combine");
        let r3 = reflection(&net, &d3).expect("reflection").r.expect("invertible");
        let mut err = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                err = err.max((combined[(a, b)] - r3[(a, b)]).abs());
            }
        }
        println!("{lambda:>6.1} {beta:>10.5} {err:>22.3e}");
        assert!(err < 1e-7 * r3.max_abs().max(1.0));
    }
    println!("\ninterior reflection matrices are convex combinations of the endpoints");
}
