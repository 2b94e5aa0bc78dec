//! Certification of robust queue-ratio stability for multiclass
//! queueing networks: network primitives, ratio polytopes, reflection
//! matrices, matrix-class tests, corner certification, state-space
//! collapse inequality systems and three simulators.

pub mod certifier;
pub mod cli;
pub mod error;
pub mod matrix_classes;
pub mod network;
pub mod numerics;
pub mod ratio;
pub mod reflection;
pub mod sim;
pub mod ssc;

/// Render a number with 12 significant digits, trimming trailing zeros.
pub fn format_significant(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let s = format!("{v:.*e}", 11);
    // Normalize "1.50000000000e2" style back to plain decimal when short.
    let parsed: f64 = s.parse().unwrap_or(v);
    let plain = format!("{parsed}");
    if plain.len() <= 13 && plain.parse::<f64>() == Ok(parsed) {
        plain
    } else {
        s
    }
}
