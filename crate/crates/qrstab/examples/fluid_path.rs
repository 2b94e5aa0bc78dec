//! Integrate the fluid dynamics of a six-class line under a queue-ratio
//! rule: the workload drains and the queue vector collapses onto the
//! ratio manifold.

use qrstab::network::build_dhv;
use qrstab::ratio::RatioVector;
use qrstab::sim::{simulate_fluid, TieBreak};

fn main() {
    let net = build_dhv(&[0.5; 6], 0.811).expect("valid network");
    // Equal ratios: each class targets half its station's workload.
    let rv = RatioVector::new(&net, vec![1.0; 6]).expect("valid ratios");
    let traj = simulate_fluid(&net, &rv, &[10.0; 6], 0.001, 300.0, TieBreak::LowestIndex)
        .expect("simulate");

    println!("chattering band: {:.4}", traj.band);
    println!("{:>8} {:>12} {:>12}", "t", "total W", "max |eps|");
    let stride = traj.times.len() / 10;
    for i in (0..traj.times.len()).step_by(stride.max(1)) {
        let total_w: f64 = traj.w[i].iter().sum();
        let max_eps = traj.eps[i]
            .iter()
            .fold(0.0f64, |acc, e| acc.max(e.abs()));
        println!(
            "{:>8.1} {:>12.5} {:>12.5}",
            traj.times[i], total_w, max_eps
        );
    }
    let final_w: f64 = traj.w.last().unwrap().iter().sum();
    assert!(final_w < 0.1, "fluid should have drained");
    println!("\nfinal total workload: {final_w:.5}");
}
