//! Property suites: reflection-matrix combination identities along
//! polytope edges, convexity of the drift test, matrix-class
//! implications, witness replays and determinism checks.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use qrstab::certifier::{certify_sp, scan_region, scan_to_csv, ScanMode, Verdict};
use qrstab::matrix_classes::{is_chen_s, is_completely_s, is_schur_s};
use qrstab::network::{build_dhv, NetworkPrimitives};
use qrstab::numerics::Matrix;
use qrstab::ratio::{convex_combine, free_classes, from_free_coords, RatioVector};
use qrstab::reflection::{combination_coefficient, reflection, DetSign};
use qrstab::ssc::{dhv_system, feasible, FEASIBLE_TOL};

/// A random six-class network with every station utilization below one.
fn random_network(rng: &mut ChaCha12Rng) -> NetworkPrimitives {
    let m: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.1..0.9));
    let max_pair = (0..3)
        .map(|j| m[j] + m[j + 3])
        .fold(0.0f64, f64::max);
    let alpha = rng.gen_range(0.5..0.95) / max_pair;
    build_dhv(&m, alpha).expect("valid network")
}

/// A random in-polytope ratio vector via its free coordinates.
fn random_ratio(rng: &mut ChaCha12Rng, net: &NetworkPrimitives) -> RatioVector {
    let free = free_classes(net);
    let coords: Vec<f64> = free
        .iter()
        .map(|&k| rng.gen_range(0.0..1.0) / net.mean_service()[k])
        .collect();
    from_free_coords(net, &coords).expect("in polytope")
}

/// Perturb one free coordinate, producing a neighbor of `rv`.
fn random_neighbor(
    rng: &mut ChaCha12Rng,
    net: &NetworkPrimitives,
    rv: &RatioVector,
) -> (usize, RatioVector) {
    let free = free_classes(net);
    let mut coords = qrstab::ratio::to_free_coords(net, rv);
    let idx = rng.gen_range(0..free.len());
    coords[idx] = rng.gen_range(0.0..1.0) / net.mean_service()[free[idx]];
    let station = net.station_of(free[idx]);
    (station, from_free_coords(net, &coords).expect("in polytope"))
}

#[test]
fn interior_reflection_is_convex_combination_of_neighbors() {
    let mut rng = ChaCha12Rng::seed_from_u64(61);
    for trial in 0..500 {
        let net = random_network(&mut rng);
        let d1 = random_ratio(&mut rng, &net);
        let (station, d2) = random_neighbor(&mut rng, &net, &d1);
        let lambda = rng.gen_range(0.05..0.95);

        let Ok((_, combined)) = combination_coefficient(&net, &d1, &d2, lambda) else {
            continue; // singular endpoint; not covered by the identity
        };
        let d3 = convex_combine(&net, &d1, &d2, lambda).unwrap();
        let data3 = reflection(&net, &d3).unwrap();
        let r3 = data3.r.expect("interior point invertible");

        let mut err = Matrix::zeros(3, 3);
        for a in 0..3 {
            for b in 0..3 {
                err[(a, b)] = combined[(a, b)] - r3[(a, b)];
            }
        }
        assert!(
            err.max_abs() <= 1e-7 * r3.max_abs(),
            "trial {trial}: combination error {} vs scale {}",
            err.max_abs(),
            r3.max_abs()
        );

        // The two endpoint matrices have proportional rows at the station
        // whose ratios differ: cross products vanish.
        let r1 = reflection(&net, &d1).unwrap().r.unwrap();
        let r2 = reflection(&net, &d2).unwrap().r.unwrap();
        let scale = r1.max_abs().max(r2.max_abs()).max(1.0);
        for a in 0..3 {
            for b in (a + 1)..3 {
                let cross =
                    r1[(station, a)] * r2[(station, b)] - r1[(station, b)] * r2[(station, a)];
                assert!(
                    cross.abs() <= 1e-8 * scale * scale,
                    "trial {trial}: rows at station {station} not proportional ({cross})"
                );
            }
        }
    }
}

#[test]
fn drift_test_convex_along_same_sign_edges() {
    let mut rng = ChaCha12Rng::seed_from_u64(62);
    let mut checked = 0;
    while checked < 200 {
        let net = random_network(&mut rng);
        let d1 = random_ratio(&mut rng, &net);
        let (_, d2) = random_neighbor(&mut rng, &net, &d1);
        let data1 = reflection(&net, &d1).unwrap();
        let data2 = reflection(&net, &d2).unwrap();
        if !data1.invertible || !data2.invertible {
            continue;
        }
        if data1.det_sign() != data2.det_sign() || data1.det_sign() == DetSign::Zero {
            continue;
        }
        let chen1 = is_chen_s(data1.r.as_ref().unwrap(), data1.theta.as_ref().unwrap()).unwrap();
        let chen2 = is_chen_s(data2.r.as_ref().unwrap(), data2.theta.as_ref().unwrap()).unwrap();
        if !chen1.holds || !chen2.holds {
            continue;
        }
        for i in 1..=11 {
            let lambda = i as f64 / 12.0;
            let d3 = convex_combine(&net, &d1, &d2, lambda).unwrap();
            let data3 = reflection(&net, &d3).unwrap();
            assert!(data3.invertible, "interior point singular at lambda {lambda}");
            let chen3 =
                is_chen_s(data3.r.as_ref().unwrap(), data3.theta.as_ref().unwrap()).unwrap();
            assert!(
                chen3.holds,
                "drift test failed at lambda {lambda} between Chen-S endpoints"
            );
        }
        checked += 1;
    }
}

#[test]
fn completely_s_and_schur_s_imply_chen_s_under_light_load() {
    let mut rng = ChaCha12Rng::seed_from_u64(63);
    let mut checked = 0;
    while checked < 500 {
        let net = random_network(&mut rng);
        let rv = random_ratio(&mut rng, &net);
        let data = reflection(&net, &rv).unwrap();
        if !data.invertible {
            continue;
        }
        let r = data.r.as_ref().unwrap();
        let theta = data.theta.as_ref().unwrap();
        if !is_completely_s(r).unwrap().holds || !is_schur_s(r).unwrap().holds {
            continue;
        }
        let chen = is_chen_s(r, theta).unwrap();
        assert!(
            chen.holds,
            "completely-S + Schur-S with negative drift should pass the drift test"
        );
        checked += 1;
    }
}

#[test]
fn certified_network_holds_at_random_interior_points() {
    let net = build_dhv(&[0.5; 6], 0.95).unwrap();
    let cert = certify_sp(&net, false).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified);
    let mut rng = ChaCha12Rng::seed_from_u64(64);
    for _ in 0..100 {
        let rv = random_ratio(&mut rng, &net);
        let data = reflection(&net, &rv).unwrap();
        assert!(data.invertible);
        let chen = is_chen_s(data.r.as_ref().unwrap(), data.theta.as_ref().unwrap()).unwrap();
        assert!(chen.holds, "certified network failed at an interior point");
    }
}

#[test]
fn feasibility_witness_replays_against_every_inequality() {
    let sys = dhv_system(&[0.5; 6], 0.95);
    let report = feasible(&sys, FEASIBLE_TOL).unwrap();
    assert!(report.feasible);
    let h = report.h_witness.expect("witness");
    let min_h = h.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((min_h - 1.0).abs() < 1e-9, "witness scaled so min h = 1");
    for ineq in &sys.inequalities {
        let lhs: f64 = ineq.coeffs.iter().zip(&h).map(|(c, v)| c * v).sum();
        assert!(lhs < 0.0, "{}: lhs = {lhs} not strictly negative", ineq.label);
    }
}

#[test]
fn region_scan_is_deterministic() {
    let net = build_dhv(&[0.1, 0.8, 0.1, 0.65, 0.1, 0.4], 0.811).unwrap();
    let a = scan_region(&net, 5, ScanMode::Both).unwrap();
    let b = scan_region(&net, 5, ScanMode::Both).unwrap();
    assert_eq!(scan_to_csv(&net, &a), scan_to_csv(&net, &b));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_round_trips(rows in proptest::collection::vec(
        proptest::collection::vec(-10.0f64..10.0, 4), 4)
    ) {
        let a = Matrix::from_rows(&rows).unwrap();
        let det = a.determinant().unwrap();
        prop_assume!(det.abs() > 1e-6 * a.max_abs().max(1.0));
        let inv = a.invert().unwrap();
        let prod = a.matmul(&inv).unwrap();
        let id = Matrix::identity(4);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((prod[(i, j)] - id[(i, j)]).abs() < 1e-6 * a.max_abs().max(1.0));
            }
        }
        // det(A^-1) = 1/det(A)
        let det_inv = inv.determinant().unwrap();
        prop_assert!((det * det_inv - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solve_agrees_with_invert(rows in proptest::collection::vec(
        proptest::collection::vec(-5.0f64..5.0, 3), 3),
        rhs in proptest::collection::vec(-5.0f64..5.0, 3)
    ) {
        let a = Matrix::from_rows(&rows).unwrap();
        prop_assume!(a.determinant().unwrap().abs() > 1e-6 * a.max_abs().max(1.0));
        let x = a.solve(&rhs).unwrap();
        let back = a.matvec(&x).unwrap();
        for (b, r) in back.iter().zip(&rhs) {
            prop_assert!((b - r).abs() < 1e-6 * a.max_abs().max(1.0));
        }
    }
}
