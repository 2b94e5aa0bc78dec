//! Reflected workload paths W(t) = W(0) + theta t + R Y(t): a scalar
//! example with a known emptying time, and the three-station path of a
//! certified corner policy.

use qrstab::network::build_dhv;
use qrstab::numerics::Matrix;
use qrstab::ratio::{static_priority, CornerSpec};
use qrstab::reflection::reflection;
use qrstab::sim::{simulate_skorohod, SkorohodProblem};

fn main() {
    // W' = -1/2 with reflection at zero: empties at t = 2 exactly.
    let sp = SkorohodProblem {
        r: Matrix::from_rows(&[vec![1.0]]).expect("matrix"),
        theta: vec![-0.5],
        w0: vec![1.0],
    };
    let dt = 0.001;
    let traj = simulate_skorohod(&sp, dt, 4.0).expect("simulate");
    let t0 = traj.emptying_time(dt).expect("emptying");
    println!("scalar path empties at t = {t0:.3} (exact: 2)");

    // Corner policy of a balanced six-class line: (R, theta) come from
    // the network and the workload empties from (1, 1, 1).
    let net = build_dhv(&[0.5; 6], 0.811).expect("valid network");
    let rv = static_priority(&net, &CornerSpec { lowest: vec![0, 4, 2] }).expect("corner");
    let data = reflection(&net, &rv).expect("reflection");
    let sp = SkorohodProblem {
        r: data.r.expect("invertible"),
        theta: data.theta.expect("drift"),
        w0: vec![1.0, 1.0, 1.0],
    };
    let traj = simulate_skorohod(&sp, 0.01, 200.0).expect("simulate");
    let t0 = traj.emptying_time(0.05).expect("emptying");
    println!("three-station corner path empties by t = {t0:.2}");
    let last_w = traj.w.last().unwrap();
    println!(
        "final workload: [{}]",
        last_w
            .iter()
            .map(|v| format!("{v:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
}
