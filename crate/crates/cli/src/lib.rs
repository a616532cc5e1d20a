//! `gridcache` command-line tool.
//!
//! Artifacts go to `--out` when given, otherwise to a file with a
//! parameter-derived name inside `$GRIDCACHE_OUT_DIR` (default: the current
//! directory). Exit codes: 0 on success, 1 when a check fails or the
//! parameters are infeasible, 2 on malformed arguments.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use gridcache::io::{partition_to_json, pda_to_json, scheme_file_name, tradeoff_table, write_tradeoff_csv, AnyScheme};
use gridcache::macc1d::{assemble_1d_scheme, cwlzc_scheme};
use gridcache::macc2d::{baseline_scheme, grouping_scheme, hybrid_scheme, SchemeFamily};
use gridcache::pda::{construct_mn_pda, construct_partition_pda, verify_pda, PdaArray, VerifyOptions};
use gridcache::sim::{DeliveryOptions, DemandVector, FileLibrary, SimReport, Simulator, DEFAULT_PACKET_SIZE};
use gridcache::{Rational, SharedLinkScheme};

pub const OUT_DIR_VAR: &str = "GRIDCACHE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "gridcache", version, about = "Build, verify and simulate coded caching schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Mn,
    Partition,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Baseline,
    Grouping,
    Hybrid,
    Cwlzc,
    SharedLink,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an MN or Partition PDA as JSON.
    ConstructPda {
        #[arg(long, value_enum)]
        family: Family,
        /// Users (MN).
        #[arg(long)]
        k: Option<usize>,
        /// Caching parameter (MN).
        #[arg(long)]
        t: Option<usize>,
        /// Columns per sub-array (Partition).
        #[arg(long)]
        q: Option<usize>,
        /// Star run length (Partition).
        #[arg(long)]
        z: Option<usize>,
        /// Number of sub-arrays (Partition).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check C1-C3, and C4/C5 when --t/--l are given; prints the report.
    VerifyPda {
        file: PathBuf,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
    },
    /// Build a scheme and write it as JSON.
    ///
    /// Parameters: `K1 K2 L t N` for baseline, grouping and hybrid (t may be
    /// a fraction such as 3/2 for the baseline); `K L t N` for cwlzc;
    /// `K t` for shared-link. With --pda, cwlzc takes `L t N` and
    /// shared-link takes nothing.
    BuildScheme {
        #[arg(long, value_enum)]
        kind: Kind,
        params: Vec<String>,
        /// Outer PDA for the hybrid scheme (default: MN).
        #[arg(long)]
        outer: Option<PathBuf>,
        /// Source PDA for cwlzc and shared-link.
        #[arg(long)]
        pda: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Place, deliver and decode one demand; writes a JSON report.
    Simulate {
        scheme: PathBuf,
        /// `all-distinct` or `seed:<k>`.
        #[arg(long, default_value = "all-distinct")]
        demand: String,
        #[arg(long, default_value_t = DEFAULT_PACKET_SIZE)]
        packet_size: usize,
        /// Seed of the generated file library.
        #[arg(long, default_value_t = 0)]
        library_seed: u64,
        #[arg(long)]
        eliminate_redundant: bool,
        /// Include label, beneficiaries and payload hash of every message.
        #[arg(long)]
        transcript: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write corner points and their lower convex envelope as CSV.
    Tradeoff {
        k1: usize,
        k2: usize,
        l: usize,
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "baseline,grouping,hybrid")]
        kinds: Vec<String>,
        /// Add decimal columns.
        #[arg(long)]
        float: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure that should exit with status 1 without an error message prefix.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Run the tool on `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            if let Some(CheckFailed(msg)) = e.downcast_ref::<CheckFailed>() {
                eprintln!("{msg}");
                return 1;
            }
            eprintln!("error: {e:#}");
            match e.downcast_ref::<gridcache::Error>() {
                Some(gridcache::Error::Usage(_)) => 2,
                _ => 1,
            }
        }
    }
}

fn output_path(out: Option<PathBuf>, default_name: &str) -> anyhow::Result<PathBuf> {
    if let Some(p) = out {
        return Ok(p);
    }
    let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(default_name))
}

fn write_json(path: &Path, v: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_pda(path: &Path) -> anyhow::Result<PdaArray> {
    Ok(gridcache::io::pda_from_json(read_json(path)?)
        .with_context(|| format!("reading PDA from {}", path.display()))?)
}

fn need(v: Option<usize>, flag: &str, family: &str) -> anyhow::Result<usize> {
    v.ok_or_else(|| gridcache::Error::Usage(format!("--{flag} is required for --family {family}")).into())
}

fn parse_params(kind: &str, params: &[String], expected: usize) -> anyhow::Result<Vec<String>> {
    if params.len() != expected {
        return Err(gridcache::Error::Usage(format!(
            "{kind} takes {expected} positional parameters, got {}",
            params.len()
        ))
        .into());
    }
    Ok(params.to_vec())
}

fn int(s: &str, name: &str) -> anyhow::Result<usize> {
    s.parse()
        .map_err(|_| gridcache::Error::Usage(format!("{name} must be a non-negative integer, got {s:?}")).into())
}

fn dispatch(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::ConstructPda { family, k, t, q, z, m, out } => {
            let (value, name) = match family {
                Family::Mn => {
                    let (k, t) = (need(k, "k", "mn")?, need(t, "t", "mn")?);
                    (pda_to_json(&construct_mn_pda(k, t)?), format!("pda_mn_{k}_{t}.json"))
                }
                Family::Partition => {
                    let (q, z, m) = (need(q, "q", "partition")?, need(z, "z", "partition")?, need(m, "m", "partition")?);
                    (
                        partition_to_json(&construct_partition_pda(q, z, m)?),
                        format!("pda_partition_{q}_{z}_{m}.json"),
                    )
                }
            };
            write_json(&output_path(out, &name)?, &value)
        }
        Command::VerifyPda { file, t, l } => {
            let p = read_pda(&file)?;
            let report = verify_pda(&p, VerifyOptions { t, l })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.all_ok() {
                Ok(())
            } else {
                Err(CheckFailed(format!("{}: PDA check failed", file.display())).into())
            }
        }
        Command::BuildScheme { kind, params, outer, pda, out } => {
            let scheme = build_scheme(kind, &params, outer.as_deref(), pda.as_deref())?;
            let name = scheme_file_name(&scheme);
            write_json(&output_path(out, &name)?, &scheme.to_json())
        }
        Command::Simulate {
            scheme,
            demand,
            packet_size,
            library_seed,
            eliminate_redundant,
            transcript,
            out,
        } => simulate(&scheme, &demand, packet_size, library_seed, eliminate_redundant, transcript, out),
        Command::Tradeoff { k1, k2, l, n, kinds, float, out } => {
            let kinds: Vec<SchemeFamily> = kinds
                .iter()
                .map(|k| k.trim().parse())
                .collect::<Result<_, gridcache::Error>>()?;
            let (corners, envelope) = tradeoff_table(k1, k2, l, n, &kinds);
            if corners.is_empty() {
                bail!(gridcache::Error::Infeasible(format!(
                    "no requested scheme is feasible for K1={k1}, K2={k2}, L={l}"
                )));
            }
            let path = output_path(out, &format!("tradeoff_{k1}_{k2}_{l}_{n}.csv"))?;
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_tradeoff_csv(file, &corners, &envelope, float)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn build_scheme(kind: Kind, params: &[String], outer: Option<&Path>, pda: Option<&Path>) -> anyhow::Result<AnyScheme> {
    Ok(match kind {
        Kind::Baseline | Kind::Grouping | Kind::Hybrid => {
            let p = parse_params("this kind", params, 5)?;
            let (k1, k2, l, n) = (int(&p[0], "K1")?, int(&p[1], "K2")?, int(&p[2], "L")?, int(&p[4], "N")?);
            match kind {
                Kind::Baseline => {
                    let t: Rational = p[3]
                        .parse()
                        .map_err(|_| gridcache::Error::Usage(format!("t must be an integer or fraction, got {:?}", p[3])))?;
                    AnyScheme::Grid(baseline_scheme(k1, k2, l, t, n)?)
                }
                Kind::Grouping => AnyScheme::Grid(grouping_scheme(k1, k2, l, int(&p[3], "t")?, n)?),
                _ => {
                    let outer = outer.map(read_pda).transpose()?;
                    AnyScheme::Grid(hybrid_scheme(k1, k2, l, int(&p[3], "t")?, n, outer)?)
                }
            }
        }
        Kind::Cwlzc => match pda {
            Some(path) => {
                let p = parse_params("cwlzc with --pda", params, 3)?;
                AnyScheme::Line(assemble_1d_scheme(read_pda(path)?, int(&p[0], "L")?, int(&p[1], "t")?, int(&p[2], "N")?)?)
            }
            None => {
                let p = parse_params("cwlzc", params, 4)?;
                AnyScheme::Line(cwlzc_scheme(int(&p[0], "K")?, int(&p[1], "L")?, int(&p[2], "t")?, int(&p[3], "N")?)?)
            }
        },
        Kind::SharedLink => match pda {
            Some(path) => {
                parse_params("shared-link with --pda", params, 0)?;
                AnyScheme::SharedLink(SharedLinkScheme::new(read_pda(path)?))
            }
            None => {
                let p = parse_params("shared-link", params, 2)?;
                AnyScheme::SharedLink(SharedLinkScheme::new(construct_mn_pda(int(&p[0], "K")?, int(&p[1], "t")?)?))
            }
        },
    })
}

fn parse_demand(spec: &str, users: usize, n: usize) -> anyhow::Result<DemandVector> {
    if spec == "all-distinct" {
        return Ok(DemandVector::all_distinct(users, n)?);
    }
    if let Some(seed) = spec.strip_prefix("seed:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| gridcache::Error::Usage(format!("bad demand seed {seed:?}")))?;
        return Ok(DemandVector::seeded(users, n, seed));
    }
    Err(gridcache::Error::Usage(format!("--demand must be all-distinct or seed:<k>, got {spec:?}")).into())
}

fn simulate(
    path: &Path,
    demand: &str,
    packet_size: usize,
    library_seed: u64,
    eliminate_redundant: bool,
    transcript: bool,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    if packet_size == 0 {
        bail!(gridcache::Error::Usage("--packet-size must be positive".into()));
    }
    let scheme = AnyScheme::from_json(&read_json(path)?).with_context(|| format!("loading {}", path.display()))?;
    let s = scheme.as_dyn();
    let users = s.topology().users();
    let n = scheme.n();
    let d = parse_demand(demand, users, n)?;
    let library = FileLibrary::for_scheme(s, n, packet_size, library_seed);
    let sim = Simulator::new(s, &library)?;
    let (log, verdicts) = sim.run(&d, DeliveryOptions { eliminate_redundant })?;
    let report = SimReport::new(&sim, scheme.params_json(), d, &log, verdicts, transcript);

    let stem = scheme_file_name(&scheme);
    let stem = stem.trim_start_matches("scheme_").trim_end_matches(".json");
    let tag = demand.replace(':', "");
    let target = output_path(out, &format!("report_{stem}_{tag}.json"))?;
    write_json(&target, &serde_json::to_value(&report)?)?;
    let decoded = report.decode.iter().filter(|v| v.ok).count();
    println!(
        "{} messages, load {} (closed form {}), {decoded}/{users} users decoded",
        report.total_messages,
        log.load(),
        s.closed_form_load()
    );
    if !report.all_decoded {
        return Err(CheckFailed(format!("{} users failed to decode", users - decoded)).into());
    }
    Ok(())
}
