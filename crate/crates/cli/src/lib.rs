//! Command-line front end for `posknot`.
//!
//! [`run`] parses arguments and executes one command, writing data to `out`
//! and diagnostics to `err`. It returns the process exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | input error (arguments, braid word, template file) |
//! | 3 | split closure: some generator never occurs |
//! | 4 | internal invariant failure |
//! | 5 | prime factor count above the template bound |
//! | 6 | `--expect-max-f` violated |

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};

use clap::{Parser, Subcommand, ValueEnum};
use posknot::factor::FactorError;
use posknot::orbit::OrbitError;
use posknot::verify::Check;
use posknot::{
    census, factorize_nonsplit, parse_braid, parse_template, verify_census, Census, OrbitRecord,
    Template,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SPLIT: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_BOUND: i32 = 5;
pub const EXIT_EXPECTATION: i32 = 6;

/// Orbits rebuilt from a rotated word during `verify`.
const ROTATION_SAMPLE: usize = 64;

#[derive(Parser, Debug)]
#[command(
    name = "posknot",
    version,
    about = "Prime factors of positive braids and template knots"
)]
struct Cli {
    /// worker threads for census work (default: all cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor a positive braid word into prime braids
    Factor {
        /// letters 1..n-1, e.g. `122112234343344` or `1 2 10 3`
        word: String,
        /// number of strands (default: one more than the largest letter)
        #[arg(long)]
        strands: Option<usize>,
    },
    /// Print the chart counts and prime factor bound of a template
    Bound {
        /// template file, or `preset:lorenz` / `preset:annulus`
        template: String,
    },
    /// Braid and factor every periodic orbit up to a period
    Census {
        template: String,
        #[arg(long)]
        max_period: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the census and every invariant check
    Verify {
        template: String,
        #[arg(long)]
        max_period: usize,
        /// fail with exit 6 if any orbit has more prime factors
        #[arg(long)]
        expect_max_f: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

/// One output row per orbit.
#[derive(Debug, Serialize)]
pub struct CensusRow {
    pub period: usize,
    pub orbit_word: String,
    pub braid: String,
    pub strands: usize,
    pub crossings: usize,
    pub genus: u64,
    pub factor_count: usize,
    pub factors: String,
    pub alexander: String,
}

impl CensusRow {
    pub fn new(t: &Template, r: &OrbitRecord) -> Self {
        Self {
            period: r.orbit.period(),
            orbit_word: r.orbit.label(t),
            braid: r.braid.to_string(),
            strands: r.braid.strands(),
            crossings: r.crossings(),
            genus: r.genus,
            factor_count: r.factor_count(),
            factors: r
                .prime_factors
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            alexander: r.alexander.to_string(),
        }
    }
}

/// A failed command: exit status plus a message for the diagnostic stream.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(1, format!("write failed: {e}"))
    }
}

/// Runs one command line. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let pool = match cli.jobs {
        Some(jobs) => match rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.into())
            .build()
        {
            Ok(pool) => Some(pool),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start thread pool: {e}");
                return 1;
            }
        },
        None => None,
    };
    match execute(cli.command, pool.as_ref(), out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(
    command: Command,
    pool: Option<&rayon::ThreadPool>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    match command {
        Command::Factor { word, strands } => factor(&word, strands, out),
        Command::Bound { template } => bound(&template, out),
        Command::Census {
            template,
            max_period,
            format,
        } => {
            let t = load_template(&template)?;
            let c = checked_census(&t, max_period, 0, pool)?.0;
            write_rows(&t, &c, format, out)?;
            writeln!(err, "{}", summary(&c))?;
            bound_status(&c)
        }
        Command::Verify {
            template,
            max_period,
            expect_max_f,
        } => {
            let t = load_template(&template)?;
            let (c, checks) = checked_census(&t, max_period, ROTATION_SAMPLE, pool)?;
            for check in &checks {
                writeln!(out, "{check}")?;
            }
            writeln!(err, "{}", summary(&c))?;
            bound_status(&c)?;
            match expect_max_f {
                Some(limit) if c.max_factor_count > limit => Err(Failure::new(
                    EXIT_EXPECTATION,
                    format!(
                        "max factor count {} exceeds the expected {limit}",
                        c.max_factor_count
                    ),
                )),
                _ => Ok(()),
            }
        }
    }
}

fn factor(word: &str, strands: Option<usize>, out: &mut dyn Write) -> Result<(), Failure> {
    let b = parse_braid(word, strands).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    let info = b.closure_info();
    let f = factorize_nonsplit(&b).map_err(|e| match e {
        FactorError::MissingGenerator(g) => Failure::new(
            EXIT_SPLIT,
            format!(
                "closure has {} components (split: generator {g} never occurs)",
                info.components
            ),
        ),
        e => Failure::new(EXIT_INVARIANT, e.to_string()),
    })?;
    let factors: Vec<String> = f
        .prime_factors
        .iter()
        .map(|p| format!("[{p}] (B{})", p.strands()))
        .collect();
    match f.factor_count() {
        0 if info.is_knot => writeln!(out, "F = 0 (unknot)")?,
        0 => writeln!(out, "F = 0 (unlink)")?,
        1 => writeln!(out, "F = 1 (prime); factors: {}", factors[0])?,
        n => writeln!(out, "F = {n}; factors: {}", factors.join(", "))?,
    }
    if info.is_knot {
        let genus = b
            .genus_positive()
            .map_err(|e| Failure::new(EXIT_INVARIANT, e.to_string()))?;
        let delta =
            posknot::alexander(&b).map_err(|e| Failure::new(EXIT_INVARIANT, e.to_string()))?;
        writeln!(out, "genus = {genus}")?;
        writeln!(out, "alexander = {delta}")?;
    } else {
        writeln!(out, "components = {}", info.components)?;
    }
    Ok(())
}

fn bound(template: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let t = load_template(template)?;
    let s = t.stats();
    writeln!(out, "template {}", t.name)?;
    writeln!(
        out,
        "J={} B={} b1={} N={}",
        s.joining, s.bands, s.betti1, s.bound
    )?;
    writeln!(out, "S={} V={}", s.splitting, s.branch_lines)?;
    Ok(())
}

fn load_template(source: &str) -> Result<Template, Failure> {
    match source.strip_prefix("preset:") {
        Some("lorenz") => return Ok(Template::lorenz()),
        Some("annulus") => return Ok(Template::annulus()),
        Some(other) => {
            return Err(Failure::new(
                EXIT_INPUT,
                format!("unknown preset {other:?} (lorenz, annulus)"),
            ))
        }
        None => {}
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{source}: {e}")))?;
    parse_template(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{source}: {e}")))
}

/// Census plus invariant checks. Invariant failures other than the bound
/// abort with exit 4; the bound is reported by [`bound_status`].
fn checked_census(
    t: &Template,
    max_period: usize,
    rotation_sample: usize,
    pool: Option<&rayon::ThreadPool>,
) -> Result<(Census, Vec<Check>), Failure> {
    if max_period == 0 {
        return Err(Failure::new(EXIT_INPUT, "--max-period must be at least 1"));
    }
    let run = || census(t, max_period);
    let c = match pool {
        Some(pool) => pool.install(run),
        None => run(),
    }
    .map_err(|e: OrbitError| Failure::new(EXIT_INVARIANT, e.to_string()))?;
    let report = verify_census(t, &c, rotation_sample);
    if let Some(failed) = report
        .checks
        .iter()
        .find(|ch| !ch.passed() && ch.name != "prime factor bound")
    {
        return Err(Failure::new(
            EXIT_INVARIANT,
            format!("invariant failed: {failed}"),
        ));
    }
    Ok((c, report.checks))
}

fn bound_status(c: &Census) -> Result<(), Failure> {
    if c.within_bound() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_BOUND,
            format!(
                "max factor count {} exceeds N = {}",
                c.max_factor_count, c.bound
            ),
        ))
    }
}

fn summary(c: &Census) -> String {
    let status = if c.within_bound() { "PASS" } else { "FAIL" };
    format!(
        "orbits={} maxF={} N={} {status}",
        c.records.len(),
        c.max_factor_count,
        c.bound
    )
}

fn write_rows(
    t: &Template,
    c: &Census,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let rows = c.records.iter().map(|r| CensusRow::new(t, r));
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)
                    .map_err(|e| Failure::new(1, format!("write failed: {e}")))?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for row in rows {
                serde_json::to_writer(&mut *out, &row)
                    .map_err(|e| Failure::new(1, format!("write failed: {e}")))?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}
