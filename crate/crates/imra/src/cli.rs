//! `imra` subcommands. Exit codes: 0 success, 1 validation failure, 2 I/O
//! failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use imra_core::besov::{coeff_norm, holder_estimate, wavelet_norm, BesovParams, NormReport};
use imra_core::filters::FilterBank;
use imra_core::ordering::{cube_ordering_iter, verify_ordering, MAX_VERIFY_POINTS};
use imra_core::scaling::refine_scaling;
use imra_core::transform::{decompose, reconstruct, threshold, threshold_error_bound};

use crate::io::{read_grid, write_grid};
use crate::pyramid::{read_pyramid, write_pyramid};
use crate::suite::{self, SuiteConfig, DEFAULT_SEED};
use crate::{ImraError, Result};

#[derive(Debug, Parser)]
#[command(name = "imra", version, about = "Interpolating wavelet transforms, Besov norms and cube orderings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Deslauriers-Dubuc filter bank of order L.
    GenFilters {
        #[arg(long)]
        order: u32,
    },
    /// Tabulate φ at spacing 2^-r: `x<TAB>decimal<TAB>φ(x)`.
    EvalPhi {
        #[arg(long)]
        order: u32,
        #[arg(long)]
        resolution: u32,
    },
    /// Decompose a grid file into a pyramid directory.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        /// `ddL` or a filter text file.
        #[arg(long, default_value = "dd2")]
        filter: String,
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        output: PathBuf,
    },
    /// Rebuild the finest grid from a pyramid directory.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Zero every detail with |d| <= tau.
    Threshold {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Besov norm of a pyramid as JSON.
    BesovNorm(BesovArgs),
    /// Hölder exponent estimate from the decay of detail maxima.
    HolderEst {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        levels: u32,
        #[arg(long, default_value = "dd2")]
        filter: String,
    },
    /// Print or verify the cube ordering of Z^n.
    Ordering {
        #[arg(long)]
        dim: usize,
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        count: Option<u64>,
        #[arg(long)]
        verify: Option<u64>,
    },
    /// Run the identity suite.
    Verify {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct BesovArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    sigma: f64,
    /// A number in [1, inf]; `inf` selects the max.
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    /// Use the wavelet norm instead of the coefficient norm.
    #[arg(long)]
    wavelet: bool,
    /// Extra quadrature levels for --wavelet.
    #[arg(long, default_value_t = 0)]
    refine: u32,
}

fn stdout_err(e: std::io::Error) -> ImraError {
    ImraError::io("<stdout>", e)
}

/// `ddL` or a path to a filter text file.
pub fn load_bank(spec: &str) -> Result<FilterBank> {
    if let Some(l) = spec.strip_prefix("dd").and_then(|s| s.parse::<u32>().ok()) {
        return Ok(FilterBank::deslauriers_dubuc(l)?);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| ImraError::io(path, e))?;
    Ok(FilterBank::from_text(&text)?)
}

fn num_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// Level terms as a JSON object keyed by level, in numeric order.
struct LevelTerms<'a>(&'a [(i32, f64)]);

impl Serialize for LevelTerms<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (j, v) in self.0 {
            m.serialize_entry(&j.to_string(), v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct NormJson<'a> {
    norm: &'static str,
    #[serde(serialize_with = "num_or_inf")]
    sigma: f64,
    #[serde(serialize_with = "num_or_inf")]
    p: f64,
    #[serde(serialize_with = "num_or_inf")]
    q: f64,
    j0: i32,
    coarse_term: f64,
    levels: LevelTerms<'a>,
    aggregate: f64,
    total: f64,
    tail_estimate: Option<f64>,
    outside_regime: bool,
    truncated: bool,
}

pub fn norm_json(r: &NormReport, params: &BesovParams, wavelet: bool) -> String {
    let j = NormJson {
        norm: if wavelet { "wavelet" } else { "coefficient" },
        sigma: params.sigma,
        p: params.p,
        q: params.q,
        j0: params.j0,
        coarse_term: r.coarse_term,
        levels: LevelTerms(&r.level_terms),
        aggregate: r.aggregate,
        total: r.total,
        tail_estimate: r.tail_estimate,
        outside_regime: r.flags.outside_regime,
        truncated: r.flags.truncated,
    };
    serde_json::to_string_pretty(&j).expect("norm report serializes")
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::GenFilters { order } => {
            let bank = FilterBank::deslauriers_dubuc(order)?;
            write!(out, "{}", bank.to_text()).map_err(stdout_err)?;
        }
        Command::EvalPhi { order, resolution } => {
            let bank = FilterBank::deslauriers_dubuc(order)?;
            let t = refine_scaling(&bank, resolution)?;
            for (x, v) in t.points() {
                writeln!(out, "{x}\t{}\t{v:?}", x.to_f64()).map_err(stdout_err)?;
            }
        }
        Command::Decompose { input, filter, levels, output } => {
            let bank = load_bank(&filter)?;
            let g = read_grid(&input)?;
            if levels == 0 {
                return Err(ImraError::Validation("--levels must be at least 1".into()));
            }
            let pyr = decompose(&bank, &g, g.level() - levels as i32)?;
            write_pyramid(&output, &pyr, &bank)?;
        }
        Command::Reconstruct { input, output } => {
            let (pyr, bank) = read_pyramid(&input)?;
            write_grid(&output, &reconstruct(&bank, &pyr)?)?;
        }
        Command::Threshold { input, tau, output } => {
            let (pyr, bank) = read_pyramid(&input)?;
            let t = threshold(&pyr, tau)?;
            write_pyramid(&output, &t.pyramid, &bank)?;
            writeln!(out, "kept\t{}\ndropped\t{}\ndropped_mass\t{:?}\nerror_bound\t{:?}", t.kept, t.dropped, t.dropped_mass, threshold_error_bound(&bank, &t))
                .map_err(stdout_err)?;
        }
        Command::BesovNorm(a) => {
            let (pyr, bank) = read_pyramid(&a.input)?;
            let params = BesovParams::new(a.sigma, a.p, a.q, pyr.j0)?;
            let r = if a.wavelet { wavelet_norm(&bank, &pyr, &params, a.refine)? } else { coeff_norm(&pyr, &params)? };
            writeln!(out, "{}", norm_json(&r, &params, a.wavelet)).map_err(stdout_err)?;
        }
        Command::HolderEst { input, levels, filter } => {
            let bank = load_bank(&filter)?;
            let g = read_grid(&input)?;
            let est = holder_estimate(&bank, &g, g.level() - levels as i32)?;
            match est.exponent {
                Some(a) => writeln!(out, "sigma_hat\t{a:?}"),
                None => writeln!(out, "sigma_hat\tinf"),
            }
            .map_err(stdout_err)?;
            writeln!(out, "j\tneg_log2_max_detail").map_err(stdout_err)?;
            for (j, y) in &est.points {
                writeln!(out, "{j}\t{y:?}").map_err(stdout_err)?;
            }
        }
        Command::Ordering { dim, count, verify } => {
            if let Some(k) = verify {
                let r = verify_ordering(dim, k)?;
                let na = |o: Option<bool>| o.map_or("n/a".to_string(), |b| b.to_string());
                writeln!(
                    out,
                    "dim\t{}\nshells\t{}\npoints\t{}\nbijection\t{}\nneighbours\t{}\nshell_monotone\t{}\nshell_ends\t{}",
                    r.dim,
                    r.shells,
                    r.points,
                    r.bijection,
                    na(r.neighbours),
                    r.shell_monotone,
                    na(r.shell_ends)
                )
                .map_err(stdout_err)?;
                if let Some(v) = &r.first_violation {
                    writeln!(out, "violation\t{:?} at index {} point {:?}", v.kind, v.index, v.point).map_err(stdout_err)?;
                }
                writeln!(out, "result\t{}", if r.passed() { "PASS" } else { "FAIL" }).map_err(stdout_err)?;
                return Ok(if r.passed() { 0 } else { 1 });
            }
            let m = count.unwrap_or(0);
            if m > MAX_VERIFY_POINTS {
                return Err(ImraError::Validation(format!("--count above {MAX_VERIFY_POINTS}")));
            }
            for (k, p) in cube_ordering_iter(dim)?.take(m as usize).enumerate() {
                let coords: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{k}\t{}", coords.join(",")).map_err(stdout_err)?;
            }
        }
        Command::Verify { dim, order, seed } => {
            let results = suite::run(&SuiteConfig::new(dim, order, seed));
            let failed = results.iter().filter(|r| !r.pass).count();
            for r in &results {
                writeln!(out, "{r}").map_err(stdout_err)?;
            }
            writeln!(out, "{} checks, {failed} failed", results.len()).map_err(stdout_err)?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the
/// exit code; diagnostics go to `err` as one line.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{e}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        1
                    } else {
                        0
                    }
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Sizes the global rayon pool from `IMRA_THREADS` (unset or 0 = automatic).
pub fn init_threads() -> std::result::Result<(), String> {
    let n = match std::env::var("IMRA_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| format!("IMRA_THREADS={v:?} is not a thread count"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
