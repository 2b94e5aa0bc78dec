//! Grid-scan the ratio polytope of a six-class network and summarize how
//! much of it passes the Chen-S test, writing the full grid as CSV.

use qrstab::certifier::{scan_region, scan_to_csv, ScanMode};
use qrstab::network::build_dhv;
use qrstab::ratio::free_classes;

fn main() {
    // Unbalanced service means: part of the polytope fails.
    let net = build_dhv(&[0.1, 0.8, 0.1, 0.65, 0.1, 0.4], 0.811).expect("valid network");
    let free = free_classes(&net);
    println!(
        "free coordinates: classes {:?} (1-based)",
        free.iter().map(|k| k + 1).collect::<Vec<_>>()
    );
    let records = scan_region(&net, 11, ScanMode::ChenS).expect("scan");
    let in_poly = records.iter().filter(|r| r.in_polytope).count();
    let chen = records
        .iter()
        .filter(|r| r.chen_s == Some(true))
        .count();
    println!(
        "{} grid points, {in_poly} inside the polytope, {chen} Chen-S",
        records.len()
    );

    let csv = scan_to_csv(&net, &records);
    let path = std::env::temp_dir().join("region_scan.csv");
    std::fs::write(&path, &csv).expect("write csv");
    println!("grid written to {}", path.display());
    // Show the header and a few rows.
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
}
