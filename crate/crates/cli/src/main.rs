//! `qseries`: expansions, eta-quotient invariants, congruence verification
//! and search from the command line.
//!
//! Reports go to standard output, diagnostics to standard error. The exit
//! status is 0 when every check verified, 1 when some check failed and 2 on
//! invalid input.

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qseries::eta::EtaQuotient;
use qseries::number_theory::sturm_bound;
use qseries::partitions::{CphiTable, Flavor};
use qseries::series::Modulus;
use qseries::verification::{
    self, find_counterexample, search_congruences, CongruenceClaim, ReportBundle, Tier, VerificationReport,
};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "qseries", version, about = "q-series and eta-quotient congruence toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Worker threads (defaults to one per core).
    #[arg(long, env = "QSERIES_THREADS", global = true)]
    threads: Option<usize>,

    /// Report elapsed_ms as 0 so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TierArg {
    Smoke,
    Full,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Smoke => Tier::Smoke,
            TierArg::Full => Tier::Full,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the q-expansion of an eta-quotient, e.g. "N=225; 1:47, 3:-1, 5:-10, 9:3, 75:1; scalar=9".
    Expand {
        quotient: String,
        /// Number of coefficients.
        #[arg(long, default_value_t = 20)]
        terms: usize,
        /// Coefficient ring: an integer 2..=2^31 or "exact".
        #[arg(long, default_value = "exact")]
        modulus: Modulus,
    },
    /// Weight, admissibility, character, cusp orders and leading exponent.
    Etainfo { quotient: String },
    /// Run a verification script.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Scan progressions T n + gamma for congruences (bounded evidence only).
    Search {
        #[arg(long, default_value = "cphi3")]
        flavor: Flavor,
        /// Comma-separated steps T.
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<u64>,
        #[arg(long)]
        modulus: u64,
        /// Largest n checked in each progression.
        #[arg(long, default_value_t = 500)]
        limit: u64,
    },
    /// Sturm bound 1 + ceil(k [SL2(Z) : Gamma_0(N)] / 12).
    Sturm {
        #[arg(long)]
        weight: u64,
        #[arg(long)]
        level: u64,
    },
    /// Table of cphi3, cphibar3 or a(n).
    Cphi {
        #[arg(long, default_value = "cphi3")]
        flavor: Flavor,
        #[arg(long, default_value_t = 20)]
        terms: usize,
        #[arg(long, default_value = "exact")]
        modulus: Modulus,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    /// a(n) mod 625 on 45n + {13, 22, 31, 40} through the level-135 form.
    Thm31 {
        #[arg(long, value_enum, default_value_t = TierArg::Smoke)]
        tier: TierArg,
    },
    /// cphi3(75n+22), cphibar3(75n+72) mod 25 through the level-225 form.
    Thm12 {
        #[arg(long, value_enum, default_value_t = TierArg::Smoke)]
        tier: TierArg,
    },
    /// cphi3(45n+23), cphi3(45n+41) mod 625 from the generating function.
    Thm11 {
        #[arg(long, default_value_t = 2000)]
        bound: u64,
    },
    /// The five congruences modulo 5, 7, 11 and 19.
    Base {
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
    /// eta^{l^s}(z) / eta^{l^{s-1}}(l z) = 1 mod l^s.
    Prop25 {
        #[arg(long, default_value_t = 5)]
        l: u64,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 10000)]
        terms: usize,
    },
    /// A single claim "flavor:T:gamma:M:bound", e.g. cphi3:63:50:49:2000.
    Claim { claim: String },
    /// Constants, identities and every script at the chosen tier.
    All {
        #[arg(long, value_enum, default_value_t = TierArg::Smoke)]
        tier: TierArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("qseries: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qseries: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check verified.
fn run(cli: &Cli) -> Result<bool> {
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Expand {
            quotient,
            terms,
            modulus,
        } => {
            let q: EtaQuotient = quotient.parse()?;
            let series = q.expand_series(*terms, *modulus)?;
            match cli.format {
                Format::Json => writeln!(out, "{}", series.to_json_string())?,
                Format::Csv => series.write_csv(&mut out)?,
                Format::Human => {
                    writeln!(out, "{q} (modulus {modulus})")?;
                    for n in 0..series.truncation() {
                        writeln!(out, "{n:>8}  {}", series.coeff(n))?;
                    }
                }
            }
            Ok(true)
        }
        Command::Etainfo { quotient } => {
            let q: EtaQuotient = quotient.parse()?;
            let info = eta_info(&q);
            match cli.format {
                Format::Json => writeln!(out, "{info}")?,
                Format::Csv => bail!("etainfo has no CSV form; use --format json or human"),
                Format::Human => print_eta_info(&mut out, &q)?,
            }
            Ok(true)
        }
        Command::Sturm { weight, level } => {
            if *weight == 0 || *level == 0 {
                bail!("weight and level must be positive");
            }
            let b = sturm_bound(*weight, *level);
            match cli.format {
                Format::Json => writeln!(out, "{}", json!({"weight": weight, "level": level, "sturm_bound": b}))?,
                _ => writeln!(out, "{b}")?,
            }
            Ok(true)
        }
        Command::Cphi {
            flavor,
            terms,
            modulus,
        } => {
            let table = CphiTable::build(*flavor, *terms, *modulus)?;
            match cli.format {
                Format::Json => writeln!(out, "{}", table.to_json_value())?,
                Format::Csv => table.write_csv(&mut out)?,
                Format::Human => {
                    writeln!(out, "{} mod {}", table.flavor, table.modulus())?;
                    for n in 0..table.truncation() {
                        writeln!(out, "{n:>8}  {}", table.values.coeff(n))?;
                    }
                }
            }
            Ok(true)
        }
        Command::Search {
            flavor,
            steps,
            modulus,
            limit,
        } => {
            if *modulus == 0 {
                bail!("search needs a modulus >= 1");
            }
            let len = steps.iter().map(|t| t * (limit + 1)).max().unwrap_or(0) as usize;
            let ring = if *modulus == 1 {
                Modulus::EXACT
            } else {
                Modulus::new(*modulus).context("search modulus")?
            };
            let table = CphiTable::build(*flavor, len, ring)?;
            let found = search_congruences(&table, steps, *modulus, *limit)?;
            match cli.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&found)?)?,
                Format::Csv => {
                    writeln!(out, "flavor,step,offset,modulus,bound,status")?;
                    for c in &found {
                        let k = &c.claim;
                        writeln!(out, "{},{},{},{},{},unproven", k.flavor, k.step, k.offset, k.modulus, k.bound)?;
                    }
                }
                Format::Human => {
                    writeln!(out, "{} candidates (unproven, checked for n <= {limit}):", found.len())?;
                    for c in &found {
                        writeln!(out, "  {}", c.claim)?;
                    }
                }
            }
            Ok(true)
        }
        Command::Verify { target } => {
            let bundles = run_verify(target)?;
            let bundles: Vec<ReportBundle> = if cli.no_timing {
                bundles.into_iter().map(ReportBundle::without_timing).collect()
            } else {
                bundles
            };
            let passed = bundles.iter().all(ReportBundle::passed);
            match cli.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&bundle_json(&bundles))?)?,
                Format::Csv => write_reports_csv(&mut out, &bundles)?,
                Format::Human => {
                    for b in &bundles {
                        write!(out, "{b}")?;
                    }
                    writeln!(out, "{}", if passed { "all checks passed" } else { "SOME CHECKS FAILED" })?;
                }
            }
            Ok(passed)
        }
    }
}

fn run_verify(target: &VerifyTarget) -> Result<Vec<ReportBundle>> {
    Ok(match target {
        VerifyTarget::Thm31 { tier } => vec![verification::verify_thm31((*tier).into())?],
        VerifyTarget::Thm12 { tier } => vec![verification::verify_thm12((*tier).into())?],
        VerifyTarget::Thm11 { bound } => vec![verification::verify_thm11(*bound)?],
        VerifyTarget::Base { bound } => vec![verification::verify_base_congruences(*bound)?],
        VerifyTarget::Prop25 { l, s, terms } => {
            vec![single("eta quotient congruent to 1", verification::verify_prop25(*l, *s, *terms)?)]
        }
        VerifyTarget::Claim { claim } => {
            let claim: CongruenceClaim = claim.parse()?;
            if claim.flavor == Flavor::Expansion {
                bail!("claims on raw expansions need a series; use cphi3, cphibar3 or a_series");
            }
            let ring = match claim.modulus {
                0 | 1 => Modulus::EXACT,
                m => Modulus::new(m)?,
            };
            let table = CphiTable::build(claim.flavor, claim.required_truncation(), ring)?;
            let report = find_counterexample(&table, claim.step, claim.offset, claim.modulus, claim.bound)?;
            vec![single(&claim.to_string(), report)]
        }
        VerifyTarget::All { tier } => verification::reproduce_all((*tier).into())?,
    })
}

fn single(name: &str, report: VerificationReport) -> ReportBundle {
    ReportBundle {
        name: name.to_string(),
        checks: Vec::new(),
        reports: vec![report],
    }
}

fn bundle_json(bundles: &[ReportBundle]) -> Value {
    json!({
        "passed": bundles.iter().all(ReportBundle::passed),
        "bundles": bundles,
    })
}

fn write_reports_csv(out: &mut impl Write, bundles: &[ReportBundle]) -> Result<()> {
    writeln!(
        out,
        "bundle,flavor,step,offset,modulus,bound,status,witness_n,witness_index,witness_value,checked_count,truncation,elapsed_ms"
    )?;
    for b in bundles {
        for r in &b.reports {
            let c = &r.claim;
            let (wn, wi, wv) = r.witness.as_ref().map_or((String::new(), String::new(), String::new()), |w| {
                (w.n.to_string(), w.index.to_string(), w.value.to_string())
            });
            let status = if r.verified() { "verified-to-bound" } else { "counterexample" };
            writeln!(
                out,
                "\"{}\",{},{},{},{},{},{status},{wn},{wi},{wv},{},{},{}",
                b.name.replace('"', "'"),
                c.flavor,
                c.step,
                c.offset,
                c.modulus,
                c.bound,
                r.checked_count,
                r.truncation,
                r.elapsed_ms
            )?;
        }
    }
    Ok(())
}

fn eta_info(q: &EtaQuotient) -> Value {
    let cusps: Vec<Value> = q
        .cusp_orders()
        .orders
        .iter()
        .map(|(d, o)| json!({"d": d, "order": o.to_string()}))
        .collect();
    json!({
        "quotient": q.to_string(),
        "level": q.level(),
        "weight": q.weight().to_string(),
        "conditions": q.check_conditions(),
        "character": q.character().ok().map(|c| json!({
            "spec": c,
            "trivial": c.is_trivial_on_units(),
        })),
        "cusp_orders": cusps,
        "cusp_form": q.cusp_orders().is_cusp_form(),
        "leading_exponent": q.leading_exponent().ok(),
    })
}

fn print_eta_info(out: &mut impl Write, q: &EtaQuotient) -> Result<()> {
    let cond = q.check_conditions();
    writeln!(out, "quotient          {q}")?;
    writeln!(out, "level             {}", q.level())?;
    writeln!(out, "weight            {}", q.weight())?;
    writeln!(
        out,
        "conditions        sum r = {}, sum delta r = {} ({}), sum (N/delta) r = {} ({})",
        cond.sum_r,
        cond.sum_delta_r,
        if cond.sum_delta_r_ok { "0 mod 24" } else { "not 0 mod 24" },
        cond.sum_level_over_delta_r,
        if cond.sum_level_over_delta_r_ok { "0 mod 24" } else { "not 0 mod 24" },
    )?;
    match q.character() {
        Ok(c) if c.is_trivial_on_units() => writeln!(out, "character         trivial ({c})")?,
        Ok(c) => writeln!(out, "character         {c}")?,
        Err(e) => writeln!(out, "character         undefined: {e}")?,
    }
    match q.leading_exponent() {
        Ok(l) => writeln!(out, "leading exponent  {l}")?,
        Err(e) => writeln!(out, "leading exponent  {e}")?,
    }
    let report = q.cusp_orders();
    writeln!(out, "cusp form         {}", report.is_cusp_form())?;
    writeln!(out, "cusp orders")?;
    for (d, o) in &report.orders {
        writeln!(out, "  1/{d:<6} {o}")?;
    }
    Ok(())
}
