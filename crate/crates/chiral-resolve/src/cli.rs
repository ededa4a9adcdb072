//! Command-line driver: verification suites, character tables and the
//! individual checks, with table / JSON-lines / CSV rendering.
//!
//! Exit codes: 0 when every executed check passes, 1 when a check fails,
//! 2 on usage errors, 3 on internal failures.

use crate::characters::{closed_form, SpaceKind};
use crate::fock::Sector;
use crate::homology::{derham_cohomology_dims, koszul_exactness_check, resolution_check};
use crate::report::VerificationReport;
use crate::suites::{run_tasks, suite_tasks, SuiteConfig, SuiteName};
use crate::symplectic::{fundamental_dim, w_filtration_compare};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SectorArg {
    Even,
    Odd,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Sector {
        match s {
            SectorArg::Even => Sector::R,
            SectorArg::Odd => Sector::NS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    #[value(alias = "A")]
    A,
    #[value(alias = "W")]
    W,
    #[value(alias = "Htilde")]
    Htilde,
    #[value(alias = "Hcoh")]
    Hcoh,
}

impl From<SpaceArg> for SpaceKind {
    fn from(s: SpaceArg) -> SpaceKind {
        match s {
            SpaceArg::A => SpaceKind::A,
            SpaceArg::W => SpaceKind::W,
            SpaceArg::Htilde => SpaceKind::Htilde,
            SpaceArg::Hcoh => SpaceKind::Hcoh,
        }
    }
}

#[derive(Debug, Args)]
struct OutputOpts {
    /// Output format for stdout.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the reports as JSON lines to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Bound on the worker pool; 1 runs serially.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

fn default_jobs() -> usize {
    std::env::var("CHIRAL_RESOLVE_JOBS").ok().and_then(|v| v.parse().ok()).unwrap_or(1)
}

#[derive(Debug, Parser)]
#[command(name = "chiral-resolve", version, about = "degreewise exact verification of graded fermionic module structure")]
struct Cli {
    /// Omit the timestamp field from reports (for byte-identical reruns).
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite: car, sl2, koszul, resolution, derham,
    /// odd-free, characters, sp, bf-correspondence, or all.
    Verify {
        suite: String,
        /// Energy cutoff for the homological checks.
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
        /// Largest charge parameter.
        #[arg(long = "m-max", default_value_t = 2)]
        m_max: i64,
        /// Largest form drop in the de Rham tables.
        #[arg(long = "p-max", default_value_t = 2)]
        p_max: i64,
        /// Largest symplectic rank.
        #[arg(long = "N", default_value_t = 5)]
        n_max: u32,
        /// Resolution terms built explicitly.
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Print a closed-form character table.
    Char {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long, value_enum, default_value_t = SectorArg::Even)]
        sector: SectorArg,
        #[arg(long, default_value_t = 0)]
        m: i64,
        /// Form drop for the cohomology characters.
        #[arg(long = "p-index", default_value_t = 0)]
        p_index: i64,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Verify the free resolution for one charge parameter.
    Resolution {
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Compute semi-infinite de Rham cohomology dimensions.
    Derham {
        #[arg(long, value_enum, default_value_t = SectorArg::Even)]
        sector: SectorArg,
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long = "p-max", default_value_t = 2)]
        p_max: i64,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Verify Koszul exactness for one fixed annihilator sector.
    Koszul {
        /// Comma-separated non-positive annihilator labels, e.g. "-1,0".
        #[arg(long = "s-indices", default_value = "")]
        s_indices: String,
        #[arg(long = "m-max", default_value_t = 2)]
        m_max: i64,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Symplectic wedge quotients: dimension of one fundamental quotient,
    /// or the filtration comparison when -k is omitted.
    Sp {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = SectorArg::Even)]
        sector: SectorArg,
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Verify the fermion-boson correspondence and the integral oracle.
    BfCheck {
        #[arg(long, default_value_t = 8)]
        cutoff: i64,
        #[command(flatten)]
        out: OutputOpts,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match std::panic::catch_unwind(|| execute(&cli)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".to_string());
            eprintln!("internal failure: {msg}");
            3
        }
    }
}

fn timestamp(cli_no_timestamp: bool) -> Option<u64> {
    if cli_no_timestamp {
        None
    } else {
        Some(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs()))
    }
}

fn execute(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Verify { suite, cutoff, m_max, p_max, n_max, terms, out } => {
            let Some(name) = SuiteName::parse(suite) else {
                eprintln!("unknown suite: {suite}");
                return 2;
            };
            let cfg = SuiteConfig {
                cutoff: *cutoff,
                m_max: *m_max,
                p_max: *p_max,
                n_max: *n_max,
                terms: *terms,
                bf_cutoff: (*cutoff).min(8),
                mode_cutoff: 10,
            };
            let reports = run_tasks(suite_tasks(name, &cfg), out.jobs.max(1));
            emit_reports(reports, out, cli.no_timestamp)
        }
        Command::Char { space, sector, m, p_index, cutoff, format } => {
            let series = match closed_form((*space).into(), (*sector).into(), *m, *p_index, *cutoff as usize) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            let coeffs: Vec<String> = series.coeffs().iter().map(|c| c.to_string()).collect();
            match format {
                Format::Csv => println!("{}", coeffs.join(",")),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "space": format!("{space:?}"),
                        "sector": format!("{}", Sector::from(*sector)),
                        "m": m,
                        "p_index": p_index,
                        "coefficients": series.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    })
                ),
                Format::Table => {
                    for (e, c) in coeffs.iter().enumerate() {
                        println!("p^{e}: {c}");
                    }
                }
            }
            0
        }
        Command::Resolution { m, terms, cutoff, out } => {
            emit_reports(vec![resolution_check(*m, *terms, *cutoff)], out, cli.no_timestamp)
        }
        Command::Derham { sector, m, p_max, cutoff, out } => {
            let (_, report) = derham_cohomology_dims((*sector).into(), *m, *p_max, *cutoff);
            emit_reports(vec![report], out, cli.no_timestamp)
        }
        Command::Koszul { s_indices, m_max, cutoff, out } => {
            let parsed: Result<Vec<i64>, _> = s_indices
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<i64>())
                .collect();
            let mut s = match parsed {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("bad --s-indices: {e}");
                    return 2;
                }
            };
            s.sort_unstable();
            emit_reports(vec![koszul_exactness_check(&s, *m_max, *cutoff)], out, cli.no_timestamp)
        }
        Command::Sp { n, k, sector, m, cutoff, out } => match k {
            Some(k) => {
                println!("dim={}", fundamental_dim(*n, *k));
                0
            }
            None => emit_reports(
                vec![w_filtration_compare((*sector).into(), *m, *n, *cutoff)],
                out,
                cli.no_timestamp,
            ),
        },
        Command::BfCheck { cutoff, out } => {
            let cfg = SuiteConfig { bf_cutoff: *cutoff, ..SuiteConfig::default() };
            let reports = run_tasks(suite_tasks(SuiteName::BfCorrespondence, &cfg), out.jobs.max(1));
            emit_reports(reports, out, cli.no_timestamp)
        }
    }
}

fn emit_reports(mut reports: Vec<VerificationReport>, out: &OutputOpts, no_timestamp: bool) -> i32 {
    let stamp = timestamp(no_timestamp);
    for r in &mut reports {
        r.timestamp = stamp;
    }
    let mut stdout = std::io::stdout().lock();
    match out.format {
        Format::Table => {
            for r in &reports {
                let _ = stdout.write_all(r.render_table().as_bytes());
            }
            let passed = reports.iter().filter(|r| r.passed()).count();
            let _ = writeln!(stdout, "{passed}/{} checks passed", reports.len());
        }
        Format::Json => {
            for r in &reports {
                let _ = writeln!(stdout, "{}", r.to_json_line());
            }
        }
        Format::Csv => {
            let _ = writeln!(stdout, "check,parameters,status,first_mismatch");
            for r in &reports {
                let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(
                    stdout,
                    "{},{},{},{}",
                    r.check_name,
                    params.join(";"),
                    if r.passed() { "pass" } else { "fail" },
                    r.first_mismatch.as_ref().map_or(String::new(), |c| c.key.clone()),
                );
            }
        }
    }
    if let Some(path) = &out.report {
        let mut lines = String::new();
        for r in &reports {
            lines.push_str(&r.to_json_line());
            lines.push('\n');
        }
        if let Err(e) = std::fs::write(path, lines) {
            eprintln!("cannot write report file {}: {e}", path.display());
            return 3;
        }
    }
    if reports.iter().all(|r| r.passed()) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sector_and_space_args_map() {
        assert_eq!(Sector::from(SectorArg::Even), Sector::R);
        assert_eq!(Sector::from(SectorArg::Odd), Sector::NS);
        assert_eq!(SpaceKind::from(SpaceArg::Hcoh), SpaceKind::Hcoh);
    }
}
