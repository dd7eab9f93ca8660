//! Command-line frontend: wires spec/window JSON and flags to the library
//! and emits CSV (or exact-fraction text for the finite subcommand).
//!
//! Every payload starts with a single `#`-prefixed JSON comment carrying
//! the full provenance (spec, window, flags), so output files are
//! self-describing and byte-identical across identical invocations.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};

use hartmanlab::density::{banach_density, fixtures, SeqFn, ZSequence};
use hartmanlab::finite::{decompose, invariant_mean_simplex, value_interval, FiniteSystem, Q};
use hartmanlab::sequence::hartman_bits;
use hartmanlab::{cantor, complexity, Alpha, CompactificationSpec, Window};

#[derive(Parser)]
#[command(
    name = "hartmanlab",
    version,
    about = "Coding sequences from compactifications of the integers",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the payload to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the 0-1 coding sequence of a window along the embedding.
    Generate {
        /// Compactification spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Window JSON file.
        #[arg(long)]
        window: PathBuf,
        #[arg(long, default_value_t = 0)]
        start: i64,
        #[arg(long)]
        len: usize,
    },
    /// Estimate lower/upper Banach density by sliding-window extrema.
    Density {
        #[command(flatten)]
        source: Source,
        /// Single window length N.
        #[arg(long, conflicts_with = "schedule")]
        window: Option<usize>,
        /// Increasing window lengths N1,N2,...
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        /// Scan window starts over [-K, K].
        #[arg(long, default_value_t = 1 << 16)]
        scan: i64,
    },
    /// Cycles, basins and exact invariant means of a finite self-map.
    Finite {
        /// The map as comma-separated images of 0,1,...,n-1.
        #[arg(long, value_delimiter = ',', required = true)]
        map: Vec<usize>,
        /// Optional integer observable; prints its exact value interval.
        #[arg(long = "f", value_delimiter = ',')]
        f: Option<Vec<i64>>,
    },
    /// Subword complexity profile of a generated bit sequence.
    Complexity {
        #[command(flatten)]
        source: Source,
        /// Largest block length to count.
        #[arg(long)]
        nmax: usize,
        /// Sample length to generate.
        #[arg(long, default_value_t = 100_000)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        start: i64,
    },
    /// Values and period mean of the truncated Cantor product f_n.
    Cantor {
        /// Truncation depth.
        #[arg(long)]
        n: u32,
        /// Emit f_n(k) for k in [0, kmax).
        #[arg(long)]
        kmax: i64,
    },
}

/// Where a sequence comes from; exactly one selector must be given.
#[derive(Args)]
struct Source {
    /// Compactification spec JSON file (needs --set).
    #[arg(long, requires = "set")]
    spec: Option<PathBuf>,
    /// Window JSON file accompanying --spec.
    #[arg(long, requires = "spec")]
    set: Option<PathBuf>,
    /// Sturmian rotation number, a float or an exact p/q.
    #[arg(long, conflicts_with_all = ["spec", "lacunary", "fixture"])]
    sturmian: Option<String>,
    /// Explicit lacunary set t1,t2,... (strictly increasing positive).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["spec", "sturmian", "fixture"])]
    lacunary: Option<Vec<i64>>,
    /// Named indicator fixture.
    #[arg(long, value_enum, conflicts_with_all = ["spec", "sturmian", "lacunary"])]
    fixture: Option<Fixture>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fixture {
    /// Indicator of the even integers.
    Parity,
    /// Indicator of the powers of two.
    Pow2,
    /// Dyadic alternating-block set B.
    Blocks,
    /// Even part of B (the product indicator that is not almost convergent).
    BlocksEven,
}

/// A sequence over all of Z, built from the source flags.
struct BuiltSource {
    eval: Box<dyn Fn(i64) -> f64 + Sync>,
    provenance: Value,
}

impl BuiltSource {
    fn seq(&self) -> SeqFn<&(dyn Fn(i64) -> f64 + Sync)> {
        SeqFn(self.eval.as_ref())
    }
}

fn parse_alpha(text: &str) -> Result<Alpha> {
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().context("rational alpha numerator")?;
        let q: i64 = q.trim().parse().context("rational alpha denominator")?;
        return Ok(Alpha::Rational { p, q });
    }
    let a: f64 = text
        .trim()
        .parse()
        .context("alpha must be a number or p/q")?;
    Ok(Alpha::Value(a))
}

fn build_source(source: &Source) -> Result<BuiltSource> {
    if let Some(spec_path) = &source.spec {
        let set_path = source
            .set
            .as_ref()
            .expect("clap enforces --set with --spec");
        let spec_text = fs::read_to_string(spec_path)
            .with_context(|| format!("cannot read spec file {}", spec_path.display()))?;
        let spec = CompactificationSpec::from_json(&spec_text)?;
        let window_text = fs::read_to_string(set_path)
            .with_context(|| format!("cannot read window file {}", set_path.display()))?;
        let window = Window::from_json(&spec, &window_text)?;
        let provenance = json!({
            "spec": serde_json::to_value(&spec)?,
            "window": window.to_json_value(),
        });
        let eval = Box::new(move |k: i64| {
            if window
                .contains(&spec.iota(k))
                .expect("window validated against spec")
            {
                1.0
            } else {
                0.0
            }
        });
        return Ok(BuiltSource { eval, provenance });
    }
    if let Some(text) = &source.sturmian {
        let alpha = parse_alpha(text)?;
        let a = alpha.value();
        if !(a > 0.0 && a < 1.0) {
            bail!("sturmian alpha {a} outside (0, 1)");
        }
        let spec = CompactificationSpec::torus(vec![alpha]);
        let window = Window::arc(a, 1.0)?;
        let provenance = json!({ "sturmian": serde_json::to_value(alpha)? });
        let eval = Box::new(move |k: i64| {
            if window
                .contains(&spec.iota(k))
                .expect("arc window matches torus spec")
            {
                1.0
            } else {
                0.0
            }
        });
        return Ok(BuiltSource { eval, provenance });
    }
    if let Some(ts) = &source.lacunary {
        for pair in ts.windows(2) {
            if pair[0] >= pair[1] {
                bail!(
                    "lacunary set not strictly increasing at {} >= {}",
                    pair[0],
                    pair[1]
                );
            }
        }
        if ts.first().is_some_and(|t| *t < 1) {
            bail!("lacunary set must contain positive integers");
        }
        let ts = ts.clone();
        let provenance = json!({ "lacunary": ts });
        let eval = Box::new(move |k: i64| {
            if ts.binary_search(&k).is_ok() {
                1.0
            } else {
                0.0
            }
        });
        return Ok(BuiltSource { eval, provenance });
    }
    if let Some(fixture) = source.fixture {
        let name = match fixture {
            Fixture::Parity => "parity",
            Fixture::Pow2 => "pow2",
            Fixture::Blocks => "blocks",
            Fixture::BlocksEven => "blocks-even",
        };
        let provenance = json!({ "fixture": name });
        let eval: Box<dyn Fn(i64) -> f64 + Sync> = match fixture {
            Fixture::Parity => Box::new(fixtures::parity),
            Fixture::Pow2 => Box::new(fixtures::pow2_indicator),
            Fixture::Blocks => Box::new(fixtures::alternating_blocks),
            Fixture::BlocksEven => Box::new(fixtures::alternating_blocks_even_part),
        };
        return Ok(BuiltSource { eval, provenance });
    }
    bail!("no sequence source: pass --spec/--set, --sturmian, --lacunary or --fixture");
}

fn configure_threads() -> Result<()> {
    match std::env::var("HARTMANLAB_THREADS") {
        Ok(v) => {
            let threads: usize = v.parse().ok().filter(|t| *t >= 1).ok_or_else(|| {
                anyhow!("HARTMANLAB_THREADS must be a positive integer, got '{v}'")
            })?;
            // a second in-process invocation keeps the existing pool
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Generate {
            spec,
            window,
            start,
            len,
        } => {
            let spec_text = fs::read_to_string(spec)
                .with_context(|| format!("cannot read spec file {}", spec.display()))?;
            let parsed = CompactificationSpec::from_json(&spec_text)?;
            let window_text = fs::read_to_string(window)
                .with_context(|| format!("cannot read window file {}", window.display()))?;
            let parsed_window = Window::from_json(&parsed, &window_text)?;
            let slice = hartman_bits(&parsed, &parsed_window, *start, *len)?;
            slice.write_csv(out)?;
        }
        Command::Density {
            source,
            window,
            schedule,
            scan,
        } => {
            let built = build_source(source)?;
            let schedule: Vec<usize> = if schedule.is_empty() {
                vec![window.ok_or_else(|| anyhow!("pass --window N or --schedule N1,N2,..."))?]
            } else {
                schedule.clone()
            };
            let provenance = json!({
                "subcommand": "density",
                "source": built.provenance,
                "schedule": schedule,
                "scan": scan,
            });
            let report = banach_density(&built.seq(), &schedule, *scan)?;
            writeln!(out, "# {provenance}")?;
            writeln!(out, "N,inf,sup")?;
            for (n, inf, sup) in &report.per_window_extrema {
                writeln!(out, "{n},{inf},{sup}")?;
            }
        }
        Command::Finite { map, f } => {
            let sys = FiniteSystem::new(map.clone())?;
            let provenance = json!({
                "subcommand": "finite",
                "map": map,
                "f": f,
            });
            writeln!(out, "# {provenance}")?;
            let decomposition = decompose(&sys);
            let means = invariant_mean_simplex(&sys);
            for (c, cycle) in decomposition.cycles.iter().enumerate() {
                writeln!(out, "cycle {c}: {}", format_states(cycle))?;
            }
            writeln!(out, "basins: {}", format_states(&decomposition.basin_of))?;
            for (c, weights) in means.cycle_means.iter().enumerate() {
                writeln!(out, "mean {c}: {}", format_fractions(weights))?;
            }
            if let Some(values) = f {
                let f: Vec<Q> = values.iter().map(|v| Ratio::from_integer(*v)).collect();
                let (a, b) = value_interval(&sys, &f)?;
                writeln!(out, "interval: [{a}, {b}]")?;
            }
        }
        Command::Complexity {
            source,
            nmax,
            len,
            start,
        } => {
            let built = build_source(source)?;
            let provenance = json!({
                "subcommand": "complexity",
                "source": built.provenance,
                "nmax": nmax,
                "len": len,
                "start": start,
            });
            let seq = built.seq();
            let values: Vec<f64> = (0..*len as i64).map(|i| seq.value(start + i)).collect();
            let slice = hartmanlab::SequenceSlice::new(*start, values, built.provenance.clone())?;
            let profile = complexity::subword_complexity(&slice, *nmax)?;
            let entropy = complexity::entropy_profile(&profile);
            writeln!(out, "# {provenance}")?;
            writeln!(out, "n,p,entropy")?;
            for ((n, p), e) in profile
                .n_values
                .iter()
                .zip(profile.counts.iter())
                .zip(entropy.iter())
            {
                writeln!(out, "{n},{p},{e}")?;
            }
        }
        Command::Cantor { n, kmax } => {
            if *kmax < 1 {
                bail!("kmax must be >= 1");
            }
            let provenance = json!({
                "subcommand": "cantor",
                "n": n,
                "kmax": kmax,
            });
            writeln!(out, "# {provenance}")?;
            writeln!(out, "k,f_n")?;
            for k in 0..*kmax {
                writeln!(out, "{k},{}", cantor::f_n(*n, k))?;
            }
            let mean = cantor::period_mean(*n);
            let expected = 0.5f64.powi(*n as i32);
            writeln!(out, "# summary: n,period_mean,expected,abs_err")?;
            writeln!(out, "{n},{mean},{expected},{:e}", (mean - expected).abs())?;
        }
    }
    Ok(())
}

fn format_states(states: &[usize]) -> String {
    let inner: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

fn format_fractions(weights: &[Q]) -> String {
    let inner: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

/// Parses `args` and runs the requested subcommand, writing the payload to
/// `out` (or to `--output`). Returns the process exit status: 0 on success,
/// 2 on configuration errors, with a one-line diagnostic on standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("{}", first_line(&e.to_string()));
            return 2;
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return 0;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    let result = match &cli.output {
        Some(path) => {
            let mut buf = Vec::new();
            execute(&cli.command, &mut buf).and_then(|()| fs::write(path, buf).map_err(Into::into))
        }
        None => execute(&cli.command, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let broken_pipe = e.chain().any(|cause| {
                cause
                    .downcast_ref::<std::io::Error>()
                    .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            });
            if broken_pipe {
                return 0;
            }
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("invalid arguments").to_string()
}
