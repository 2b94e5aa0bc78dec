//! Command-line surface: validation, corner tables, certification,
//! region scans, collapse-feasibility checks and simulations.
//!
//! Exit codes: 0 success (or Certified), 2 valid input with a negative
//! verdict, 1 input or usage errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certifier::{certify_full, scan_region, scan_to_csv, ScanMode, SscFamily, Verdict};
use crate::format_significant;
use crate::matrix_classes::{is_chen_s, is_completely_s};
use crate::network::{build_dhv, build_lu_kumar, build_push_started_lu_kumar, NetworkFile, NetworkPrimitives};
use crate::ratio::{corners, static_priority, CornerSpec, RatioFile, RatioVector};
use crate::reflection::reflection;
use crate::sim::{
    simulate_des, simulate_fluid, simulate_skorohod, DESConfig, Dist, Policy, SkorohodProblem,
    TieBreak,
};
use crate::ssc::{dhv_system, feasible, lk_system, pslk_system, FEASIBLE_TOL};

#[derive(Parser)]
#[command(name = "qrstab", about = "Certify robust queue-ratio stability of multiclass queueing networks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleKind {
    /// Six classes over three stations, reentrant line.
    Dhv,
    /// Five classes over two stations, push-started variant.
    Pslk,
    /// Four classes over two stations.
    Lk,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Dhv,
    Pslk,
    Lk,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeKind {
    Chen,
    Completely,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyKind {
    Qr,
    Priority,
}

/// Network source: a JSON file, or a built-in example with parameters.
#[derive(Args)]
struct NetArgs {
    /// Network JSON file.
    net: Option<PathBuf>,
    /// Build a benchmark network instead of reading a file.
    #[arg(long, value_enum)]
    example: Option<ExampleKind>,
    /// Mean service times for --example (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m: Vec<f64>,
    /// Class-1 arrival rate for --example.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a network description.
    Validate {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Print the static-priority corner table.
    Corners {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Produce a robust stability certificate over the whole ratio polytope.
    Certify {
        #[command(flatten)]
        net: NetArgs,
        /// Include the family's collapse-feasibility side.
        #[arg(long, value_enum)]
        ssc: Option<FamilyKind>,
        /// Write the certificate JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop at the first failing corner.
        #[arg(long)]
        fast: bool,
    },
    /// Report on a single ratio vector.
    Check {
        #[command(flatten)]
        net: NetArgs,
        /// Ratio vector JSON file.
        #[arg(long)]
        delta: PathBuf,
    },
    /// Grid-scan the ratio polytope.
    Scan {
        #[command(flatten)]
        net: NetArgs,
        /// Points per free axis (>= 2).
        #[arg(long)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "chen")]
        mode: ModeKind,
        /// Write the scan CSV here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse-feasibility report for a benchmark family.
    Ssc {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, value_enum)]
        family: FamilyKind,
    },
    /// Run a simulator and write a trajectory CSV.
    Simulate {
        #[command(flatten)]
        net: NetArgs,
        /// Fluid dynamics under a ratio vector.
        #[arg(long, conflicts_with_all = ["skorohod", "des"])]
        fluid: bool,
        /// Reflected workload path for a ratio vector's (R, theta).
        #[arg(long, conflicts_with = "des")]
        skorohod: bool,
        /// Stochastic discrete-event simulation.
        #[arg(long)]
        des: bool,
        /// Ratio vector JSON (fluid/skorohod, and des with --policy qr).
        #[arg(long)]
        delta: Option<PathBuf>,
        /// Policy for --des.
        #[arg(long, value_enum, default_value = "qr")]
        policy: PolicyKind,
        /// Lowest-priority class per station, 1-based, for --des with
        /// --policy priority (comma separated).
        #[arg(long, value_delimiter = ',')]
        lowest: Vec<usize>,
        /// Time horizon.
        #[arg(long)]
        t: f64,
        /// Step (fluid/skorohod) or sample interval (des).
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trajectory CSV here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_network(args: &NetArgs) -> Result<NetworkPrimitives, String> {
    if let Some(example) = args.example {
        let alpha = args.alpha.ok_or("--example requires --alpha")?;
        let m = &args.m;
        let wrong = |n: usize| format!("--example expects {n} service means, got {}", m.len());
        return match example {
            ExampleKind::Dhv => {
                let m: [f64; 6] = m.as_slice().try_into().map_err(|_| wrong(6))?;
                build_dhv(&m, alpha).map_err(|e| e.to_string())
            }
            ExampleKind::Pslk => {
                let m: [f64; 5] = m.as_slice().try_into().map_err(|_| wrong(5))?;
                build_push_started_lu_kumar(&m, alpha).map_err(|e| e.to_string())
            }
            ExampleKind::Lk => {
                let m: [f64; 4] = m.as_slice().try_into().map_err(|_| wrong(4))?;
                build_lu_kumar(&m, alpha).map_err(|e| e.to_string())
            }
        };
    }
    let path = args
        .net
        .as_ref()
        .ok_or("provide a network JSON file or --example")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let file: NetworkFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    file.to_network().map_err(|e| e.to_string())
}

fn load_delta(net: &NetworkPrimitives, path: &PathBuf) -> Result<RatioVector, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let file: RatioFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    RatioVector::new(net, file.delta).map_err(|e| e.to_string())
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn family_of(kind: FamilyKind) -> SscFamily {
    match kind {
        FamilyKind::Dhv => SscFamily::Dhv,
        FamilyKind::Pslk => SscFamily::PushStartedLuKumar,
        FamilyKind::Lk => SscFamily::LuKumar,
    }
}

/// Run the CLI on the given arguments (excluding or including the program
/// name; clap expects it first). Returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Validate { net } => {
            let report = match load_network(&net) {
                Ok(n) => n.validate(),
                Err(msg) => {
                    eprintln!("invalid: {msg}");
                    return Ok(1);
                }
            };
            for v in &report.violations {
                println!("violation: {v}");
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            if report.is_valid() {
                println!("valid");
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Corners { net } => {
            let net = load_network(&net)?;
            println!(
                "{:<12} {:<12} {:>16} {:>14} {:>8}",
                "lowest", "high", "det(R)", "completely-S", "Chen-S"
            );
            for (spec, rv) in corners(&net) {
                let data = reflection(&net, &rv).map_err(|e| e.to_string())?;
                let (det, cs, chen) = if data.invertible {
                    let r = data.r.as_ref().unwrap();
                    let theta = data.theta.as_ref().unwrap();
                    (
                        format_significant(data.det_r.unwrap()),
                        yes_no(is_completely_s(r).map_err(|e| e.to_string())?.holds),
                        yes_no(is_chen_s(r, theta).map_err(|e| e.to_string())?.holds),
                    )
                } else {
                    ("singular".to_string(), "no".to_string(), "no".to_string())
                };
                println!(
                    "{:<12} {:<12} {:>16} {:>14} {:>8}",
                    spec.label_lowest(),
                    spec.label_high(&net).unwrap_or_else(|| "-".to_string()),
                    det,
                    cs,
                    chen
                );
            }
            Ok(0)
        }
        Command::Certify { net, ssc, out, fast } => {
            let net = load_network(&net)?;
            let cert = if fast && ssc.is_none() {
                let sp = crate::certifier::certify_sp(&net, true).map_err(|e| e.to_string())?;
                crate::certifier::RobustQRCertificate {
                    verdict: if sp.verdict == Verdict::Certified {
                        Verdict::Unknown
                    } else {
                        Verdict::NotCertified
                    },
                    sp,
                    ssc: None,
                }
            } else {
                certify_full(&net, ssc.map(family_of)).map_err(|e| e.to_string())?
            };
            let json = serde_json::to_string_pretty(&cert).map_err(|e| e.to_string())?;
            if out.is_some() {
                write_or_print(&out, &json)?;
            }
            println!("verdict: {:?}", cert.verdict);
            if let Some(culprit) = &cert.sp.culprit {
                println!("culprit: lowest {{{}}}", culprit.label_lowest());
            }
            if let Some(reason) = &cert.sp.reason {
                println!("reason: {reason}");
            }
            Ok(if cert.verdict == Verdict::NotCertified { 2 } else { 0 })
        }
        Command::Check { net, delta } => {
            let net = load_network(&net)?;
            let rv = load_delta(&net, &delta)?;
            let data = reflection(&net, &rv).map_err(|e| e.to_string())?;
            println!("invertible: {}", data.invertible);
            println!("det_rinv: {}", format_significant(data.det_rinv));
            if !data.invertible {
                return Ok(2);
            }
            let r = data.r.as_ref().unwrap();
            let theta = data.theta.as_ref().unwrap();
            println!("det_r: {}", format_significant(data.det_r.unwrap()));
            println!(
                "theta: [{}]",
                theta
                    .iter()
                    .map(|v| format_significant(*v))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            let cs = is_completely_s(r).map_err(|e| e.to_string())?;
            let chen = is_chen_s(r, theta).map_err(|e| e.to_string())?;
            println!("completely_s: {}", cs.holds);
            println!("chen_s: {}", chen.holds);
            if let Some(h) = &chen.h_witness {
                println!(
                    "h: [{}]",
                    h.iter()
                        .map(|v| format_significant(*v))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            Ok(if chen.holds { 0 } else { 2 })
        }
        Command::Scan { net, resolution, mode, out } => {
            let net = load_network(&net)?;
            let mode = match mode {
                ModeKind::Chen => ScanMode::ChenS,
                ModeKind::Completely => ScanMode::CompletelyS,
                ModeKind::Both => ScanMode::Both,
            };
            let records = scan_region(&net, resolution, mode).map_err(|e| e.to_string())?;
            write_or_print(&out, &scan_to_csv(&net, &records))?;
            Ok(0)
        }
        Command::Ssc { net, family } => {
            let net = load_network(&net)?;
            let alpha1 = net.arrival()[0];
            let m = net.mean_service();
            let sys = match family {
                FamilyKind::Dhv => dhv_system(
                    m.try_into().map_err(|_| "family expects 6 classes")?,
                    alpha1,
                ),
                FamilyKind::Pslk => pslk_system(
                    m.try_into().map_err(|_| "family expects 5 classes")?,
                    alpha1,
                ),
                FamilyKind::Lk => lk_system(
                    m.try_into().map_err(|_| "family expects 4 classes")?,
                    alpha1,
                ),
            };
            let report = feasible(&sys, FEASIBLE_TOL).map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
            );
            Ok(if report.feasible { 0 } else { 2 })
        }
        Command::Simulate {
            net,
            fluid,
            skorohod,
            des,
            delta,
            policy,
            lowest,
            t,
            dt,
            seed,
            out,
        } => {
            let net = load_network(&net)?;
            if !(fluid || skorohod || des) {
                return Err("choose one of --fluid, --skorohod, --des".into());
            }
            if fluid {
                let delta = delta.ok_or("--fluid requires --delta")?;
                let rv = load_delta(&net, &delta)?;
                let z0 = vec![0.0; net.class_count()];
                let traj = simulate_fluid(&net, &rv, &z0, dt, t, TieBreak::LowestIndex)
                    .map_err(|e| e.to_string())?;
                write_or_print(&out, &traj.to_csv())?;
            } else if skorohod {
                let delta = delta.ok_or("--skorohod requires --delta")?;
                let rv = load_delta(&net, &delta)?;
                let data = reflection(&net, &rv).map_err(|e| e.to_string())?;
                if !data.invertible {
                    return Err("reflection matrix is singular for this ratio vector".into());
                }
                let sp = SkorohodProblem {
                    r: data.r.unwrap(),
                    theta: data.theta.unwrap(),
                    w0: vec![1.0; net.station_count()],
                };
                let traj = simulate_skorohod(&sp, dt, t).map_err(|e| e.to_string())?;
                write_or_print(&out, &traj.to_csv())?;
            } else {
                let policy = match policy {
                    PolicyKind::Qr => {
                        let delta = delta.ok_or("--policy qr requires --delta")?;
                        let rv = load_delta(&net, &delta)?;
                        Policy::QR {
                            delta: rv.delta().to_vec(),
                            tiebreak: TieBreak::LowestIndex,
                        }
                    }
                    PolicyKind::Priority => {
                        if lowest.len() != net.station_count() {
                            return Err(
                                "--lowest must list one class per station (1-based)".into()
                            );
                        }
                        let mut order = Vec::new();
                        for (j, &low1) in lowest.iter().enumerate() {
                            if low1 == 0 {
                                return Err("--lowest classes are 1-based".into());
                            }
                            let low = low1 - 1;
                            let mut classes = net.classes_at(j);
                            if !classes.contains(&low) {
                                return Err(format!(
                                    "class {low1} is not served at station {}",
                                    j + 1
                                ));
                            }
                            classes.retain(|&k| k != low);
                            classes.push(low);
                            order.push(classes);
                        }
                        Policy::StaticPriority { order }
                    }
                };
                let config = DESConfig {
                    seed,
                    horizon: t,
                    interarrival: Dist::Exponential,
                    service: Dist::Exponential,
                    policy,
                    sample_dt: dt,
                };
                let traj = simulate_des(&net, &config).map_err(|e| e.to_string())?;
                write_or_print(&out, &traj.to_csv())?;
            }
            Ok(0)
        }
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// Build a static-priority ratio vector from 1-based lowest classes, for
/// callers driving the library the way the CLI does.
pub fn lowest_to_ratio(
    net: &NetworkPrimitives,
    lowest_1based: &[usize],
) -> Result<RatioVector, String> {
    let lowest: Vec<usize> = lowest_1based
        .iter()
        .map(|&k| k.checked_sub(1).ok_or("classes are 1-based"))
        .collect::<Result<_, _>>()?;
    static_priority(net, &CornerSpec { lowest }).map_err(|e| e.to_string())
}
