//! Command-line harness: code registry listing, algebraic certification,
//! delay-tolerance certification and Monte Carlo BER/CER sweeps.
//!
//! Exit codes: 0 on success, 1 when a certification run found a violation
//! (so CI can gate on it), 2 on usage errors.

use clap::{Parser, Subcommand};
use stc_core::constellation::{difference_alphabet, ConstellationKind};
use stc_core::linalg::cx;
use stc_core::{
    certify_delay_tolerance, certify_profiles, default_receive_antennas, min_product_distance,
    nvd_sweep, results_to_csv, run_simulation, Code, Cx, DelayProfile, SimConfig, SimResult,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Space-time code toolkit: construction, certification, simulation.
#[derive(Parser)]
#[command(name = "stc", version, disable_help_subcommand = true)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// RNG seed; falls back to the STC_SEED environment variable, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report/CSV to this path (overwritten) instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every registered code.
    List,
    /// Check that minimum determinants stay bounded away from zero as the
    /// constellation grows.
    CertifyNvd {
        /// Comma-separated code names.
        #[arg(long, value_delimiter = ',', required = true)]
        code: Vec<String>,
        /// Constellation sizes to sweep, ascending.
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 16])]
        sizes: Vec<usize>,
        /// Sample budget when the space is too large to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Check full rank of every shifted difference codeword.
    CertifyDelay {
        /// Comma-separated code names.
        #[arg(long, value_delimiter = ',', required = true)]
        code: Vec<String>,
        /// Certify every profile with delays up to this bound.
        #[arg(long, conflicts_with = "delay")]
        dmax: Option<usize>,
        /// Certify one specific profile, e.g. 1,0.
        #[arg(long, value_delimiter = ',')]
        delay: Option<Vec<usize>>,
        /// Constellation size whose differences drive the sweep.
        #[arg(long, default_value_t = 4)]
        q: usize,
        /// Sample budget when the space is too large to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Minimum product distance of a tensor-product lattice.
    Prodist {
        /// One code name from the gamma/alt2 family.
        #[arg(long)]
        code: String,
        /// Use the difference alphabet of this constellation size instead of
        /// unit differences.
        #[arg(long)]
        q: Option<usize>,
        /// Sample budget when the space is too large to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Monte Carlo BER/CER sweep over an Eb/N0 grid.
    Simulate {
        /// Comma-separated code names (same dimension).
        #[arg(long, value_delimiter = ',', required = true)]
        code: Vec<String>,
        /// Eb/N0 grid in dB: start:stop:step or a single value.
        #[arg(long)]
        snr: String,
        /// Delay profile, e.g. 1,0 (default synchronous).
        #[arg(long, value_delimiter = ',')]
        delay: Option<Vec<usize>>,
        /// Constellation size (4 or 16).
        #[arg(long, default_value_t = 4)]
        q: usize,
        /// Receive antennas (default: 2 for 2x2 codes, M otherwise).
        #[arg(long)]
        nr: Option<usize>,
        /// Stop an SNR point after this many codeword errors.
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        /// Hard cap on codewords per SNR point.
        #[arg(long, default_value_t = 1_000_000)]
        max_codewords: u64,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| std::env::var("STC_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn parse_snr_grid(spec: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single.parse().ok().map(|v| vec![v]),
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) =
                (start.parse().ok()?, stop.parse().ok()?, step.parse().ok()?);
            if step <= 0.0 || stop < start {
                return None;
            }
            let mut grid = Vec::new();
            let mut v = start;
            while v <= stop + 1e-9 {
                grid.push(v);
                v += step;
            }
            Some(grid)
        }
        _ => None,
    }
}

/// Unit difference scalars of the symbol ring: {0, +-1, +-i} for Gaussian,
/// the nine centered Eisenstein differences for HEX.
fn unit_differences(kind: ConstellationKind) -> Vec<Cx> {
    match kind {
        ConstellationKind::Qam => vec![
            cx(0.0, 0.0),
            cx(1.0, 0.0),
            cx(-1.0, 0.0),
            cx(0.0, 1.0),
            cx(0.0, -1.0),
        ],
        ConstellationKind::Hex => {
            difference_alphabet(ConstellationKind::Hex, 4).expect("supported size")
        }
    }
}

fn lookup_codes(names: &[String]) -> Result<Vec<Code>, String> {
    names
        .iter()
        .map(|n| Code::by_name(n).map_err(|e| e.to_string()))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            return usage_error("thread pool already initialized");
        }
    }
    let seed = resolve_seed(cli.seed);
    let output = cli.output.clone();

    let result = match &cli.command {
        Command::List => cmd_list(output.as_ref()),
        Command::CertifyNvd {
            code,
            sizes,
            budget,
        } => cmd_certify_nvd(output.as_ref(), code, sizes, *budget, seed),
        Command::CertifyDelay {
            code,
            dmax,
            delay,
            q,
            budget,
        } => cmd_certify_delay(
            output.as_ref(),
            code,
            *dmax,
            delay.as_deref(),
            *q,
            *budget,
            seed,
        ),
        Command::Prodist { code, q, budget } => {
            cmd_prodist(output.as_ref(), code, *q, *budget, seed)
        }
        Command::Simulate {
            code,
            snr,
            delay,
            q,
            nr,
            min_errors,
            max_codewords,
        } => cmd_simulate(
            output.as_ref(),
            code,
            snr,
            delay.as_deref(),
            *q,
            *nr,
            *min_errors,
            *max_codewords,
            seed,
        ),
    };
    match result {
        Ok(true) => ExitCode::from(1),
        Ok(false) => ExitCode::SUCCESS,
        Err(msg) => usage_error(&msg),
    }
}

fn cmd_list(output: Option<&PathBuf>) -> Result<bool, String> {
    let mut s = String::from("name antennas channel_uses symbols constellation\n");
    for code in Code::registry() {
        s.push_str(&format!(
            "{} {} {} {} {}\n",
            code.name(),
            code.antennas(),
            code.channel_uses(),
            code.symbols_per_codeword(),
            code.constellation_kind()
        ));
    }
    emit(output, &s)?;
    Ok(false)
}

fn cmd_certify_nvd(
    output: Option<&PathBuf>,
    names: &[String],
    sizes: &[usize],
    budget: u64,
    seed: u64,
) -> Result<bool, String> {
    let codes = lookup_codes(names)?;
    let mut s = String::new();
    let mut violation = false;
    for code in &codes {
        let reports = nvd_sweep(code, sizes, budget, seed).map_err(|e| e.to_string())?;
        let mut floor = f64::INFINITY;
        for (q, rep) in &reports {
            s.push_str(&format!("q={} {}\n", q, rep.render()));
            floor = floor.min(rep.value);
        }
        let ok = floor.is_finite() && floor > 1e-9;
        s.push_str(&format!(
            "code={} nvd_floor={:.12e} result={}\n",
            code.name(),
            floor,
            if ok { "PASS" } else { "FAIL" }
        ));
        violation |= !ok;
    }
    emit(output, &s)?;
    Ok(violation)
}

fn cmd_certify_delay(
    output: Option<&PathBuf>,
    names: &[String],
    dmax: Option<usize>,
    delay: Option<&[usize]>,
    q: usize,
    budget: u64,
    seed: u64,
) -> Result<bool, String> {
    let codes = lookup_codes(names)?;
    let mut s = String::new();
    let mut violation = false;
    for code in &codes {
        let diffs = difference_alphabet(code.constellation_kind(), q).map_err(|e| e.to_string())?;
        let report = match (dmax, delay) {
            (Some(bound), None) => certify_delay_tolerance(code, &diffs, bound, budget, seed),
            (None, Some(raw)) => {
                let profile = DelayProfile::new(raw.to_vec()).map_err(|e| e.to_string())?;
                if profile.relays() != code.antennas() {
                    return Err(format!(
                        "profile {profile} does not match code {} with {} relays",
                        code.name(),
                        code.antennas()
                    ));
                }
                certify_profiles(code, &diffs, &[profile], budget, seed)
            }
            (None, None) => return Err("pass either --dmax or --delay".to_string()),
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        };
        violation |= !report.passed();
        s.push_str(&report.render());
    }
    emit(output, &s)?;
    Ok(violation)
}

fn cmd_prodist(
    output: Option<&PathBuf>,
    name: &str,
    q: Option<usize>,
    budget: u64,
    seed: u64,
) -> Result<bool, String> {
    let code = Code::by_name(name).map_err(|e| e.to_string())?;
    let gens = code.generators().ok_or_else(|| {
        format!(
            "code {} has no tensor-product generator set; pick one of gamma2, gamma3, gamma4, alt2",
            code.name()
        )
    })?;
    let diffs = match q {
        Some(q) => difference_alphabet(code.constellation_kind(), q).map_err(|e| e.to_string())?,
        None => unit_differences(code.constellation_kind()),
    };
    let report = min_product_distance(gens, &diffs, budget, seed).map_err(|e| e.to_string())?;
    emit(output, &format!("{}\n", report.render()))?;
    Ok(false)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    output: Option<&PathBuf>,
    names: &[String],
    snr: &str,
    delay: Option<&[usize]>,
    q: usize,
    nr: Option<usize>,
    min_errors: u64,
    max_codewords: u64,
    seed: u64,
) -> Result<bool, String> {
    let codes = lookup_codes(names)?;
    let grid = parse_snr_grid(snr).ok_or_else(|| format!("bad snr grid `{snr}`"))?;
    let mut results: Vec<SimResult> = Vec::new();
    for code in &codes {
        let profile = match delay {
            Some(raw) => DelayProfile::new(raw.to_vec()).map_err(|e| e.to_string())?,
            None => DelayProfile::sync(code.antennas()),
        };
        let cfg = SimConfig {
            code: code.name().to_string(),
            nr: nr.unwrap_or_else(|| default_receive_antennas(code.antennas())),
            kind: code.constellation_kind(),
            q,
            delay: profile,
            snr_db: grid.clone(),
            min_errors,
            max_codewords,
            seed,
        };
        results.push(run_simulation(&cfg).map_err(|e| e.to_string())?);
    }
    emit(output, &results_to_csv(&results))?;
    Ok(false)
}
