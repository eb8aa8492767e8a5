// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padic_torsion::heuristics::{aut_order_abelian_p_group, DEFAULT_TOL};
use padic_torsion::survey::{run_survey, Signature, SurveyConfig, SurveyError};
use padic_torsion::{
    adjusted_average_p3, cl_average, make_field, ray_class_p_part, torsion_structure, Error, PGroupShape,
    SplittingProfile, DEFAULT_N_MAX,
};

const THREADS_VAR: &str = "PADIC_TORSION_THREADS";

#[derive(Parser)]
#[command(name = "padic-torsion", version, about = "Z_p-torsion of quadratic fields from ray class groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stabilization report for one field, as JSON.
    Torsion {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: u32,
        /// Include every computed level in the output.
        #[arg(long)]
        trace: bool,
    },
    /// Invariant factors of the ray class group modulo p^n and of its p-part.
    Raycl {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Cohen-Lenstra u-average of the indicator of a nontrivial p-part.
    Average(AverageArgs),
    /// Frequency of nontrivial torsion over a range of fields.
    Survey(SurveyArgs),
    /// Automorphism group order of a finite abelian p-group and its weight 1/#Aut.
    Waut {
        /// `p:l1,l2,...` for the group Z/p^l1 x Z/p^l2 x ...
        #[arg(long)]
        shape: String,
    },
}

#[derive(Args)]
struct AverageArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    u: u32,
    /// Residue degrees of the places above p, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    f: Vec<u32>,
    /// Number of places; repeats a single residue degree.
    #[arg(long)]
    g: Option<usize>,
    /// Report M * 7/8 + 1/8 instead.
    #[arg(long)]
    adjusted_p3: bool,
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, allow_hyphen_values = true)]
    min: i64,
    #[arg(long, allow_hyphen_values = true)]
    max: i64,
    #[arg(long)]
    imaginary: bool,
    #[arg(long)]
    exclude_6_mod_9: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: u32,
    #[arg(long, default_value_t = 2000)]
    checkpoint_every: usize,
}

/// Exit status with a message for stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoStabilization { .. } => 3,
            Error::Internal(_) | Error::NonDivisible { .. } | Error::InfiniteGroup | Error::DimensionMismatch { .. } => 4,
            _ => 2,
        };
        Failure(code, e.to_string())
    }
}

impl From<SurveyError> for Failure {
    fn from(e: SurveyError) -> Self {
        Failure(2, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(Failure(code, msg)) = configure_threads().and_then(|_| run(cli.command)) {
        eprintln!("error: {msg}");
        return ExitCode::from(code);
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| invalid(format!("{THREADS_VAR}={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure(4, e.to_string()))
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Torsion { d, p, n_max, trace } => {
            let k = make_field(d)?;
            let report = match torsion_structure(&k, p, n_max) {
                Err(Error::NoStabilization { n_max, trace }) => {
                    // the levels computed so far are still worth having
                    println!("{}", serde_json::to_string_pretty(&trace).expect("levels serialize"));
                    return Err(Error::NoStabilization { n_max, trace }.into());
                }
                other => other?,
            };
            let mut value = serde_json::to_value(&report).map_err(|e| Failure(4, e.to_string()))?;
            if !trace {
                value.as_object_mut().expect("report is an object").remove("trace");
            }
            println!("{}", serde_json::to_string_pretty(&value).expect("valid JSON value"));
        }
        Command::Raycl { d, p, n } => {
            let level = ray_class_p_part(&make_field(d)?, p, n)?;
            println!("full: {}", level.full_invariants);
            println!("p-part: {}", level.p_invariants);
        }
        Command::Average(a) => {
            if !padic_torsion::arith::is_prime(a.p) {
                return Err(invalid(format!("{} is not prime", a.p)));
            }
            let profile = match a.g {
                Some(g) if a.f.len() == 1 && g >= 1 && a.f[0] >= 1 => Some(SplittingProfile::uniform(g, a.f[0])),
                Some(g) if g == a.f.len() => SplittingProfile::new(a.f.clone()),
                Some(g) => return Err(invalid(format!("--g {g} does not match {} residue degrees", a.f.len()))),
                None => SplittingProfile::new(a.f.clone()),
            }
            .ok_or_else(|| invalid("residue degrees must be positive"))?;
            let mut m = cl_average(a.p, &profile, a.u, DEFAULT_TOL);
            if a.adjusted_p3 {
                m = adjusted_average_p3(m);
            }
            println!("{m:.5}");
        }
        Command::Survey(s) => {
            let sign = if s.imaginary { Signature::Imaginary } else { Signature::Real };
            let mut cfg = SurveyConfig::new(s.p, s.min, s.max, sign, s.out);
            cfg.exclude_6_mod_9 = s.exclude_6_mod_9;
            cfg.n_max = s.n_max;
            cfg.checkpoint_every = s.checkpoint_every;
            let out = run_survey(&cfg)?;
            let r = &out.row;
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
            println!(
                "p={} N={} fields={} nontrivial={} failed={} M={:.5} f_exp={} delta={}",
                r.p, r.n, r.count_total, r.count_nontrivial, r.count_failed, r.m, opt(r.f_exp), opt(r.delta)
            );
        }
        Command::Waut { shape } => {
            let shape = parse_shape(&shape)?;
            let aut = aut_order_abelian_p_group(&shape);
            println!("aut: {aut}");
            println!("w: 1/{aut}");
        }
    }
    Ok(())
}

fn parse_shape(s: &str) -> Result<PGroupShape, Failure> {
    let bad = || invalid(format!("shape {s:?} is not of the form p:l1,l2,..."));
    let (p, parts) = s.split_once(':').ok_or_else(bad)?;
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    if !padic_torsion::arith::is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    let exps = parts.split(',').map(|x| x.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
    PGroupShape::new(p, exps).ok_or_else(bad)
}
