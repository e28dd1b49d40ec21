//! thermoshift: numerical experiments on beta-shift thermodynamics.
//!
//! Exit codes: 0 success, 1 invalid input, 2 budget exhausted, 3 verify
//! tolerance failure.

mod report;
mod verify;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use thermoshift_core::beta_lang::{word_from_string, word_to_string, Language};
use thermoshift_core::conformal::{conformality_residual, Involution};
use thermoshift_core::gibbs::{kernel_row, weak_dependence_probe, ProbeOutcome};
use thermoshift_core::shift_space::{FinitePoint, Window};
use thermoshift_core::thermo::{cesaro_equilibrium, margin_check, prefix_decay, pressure_estimate};
use thermoshift_core::{parse_beta, parse_potential, Error, Potential64};

#[derive(Parser)]
#[command(name = "thermoshift", version, about)]
struct Cli {
    /// key=value config file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// beta spec: rational:p/q | decimal:d | poly:c0,...@[lo,hi]
    #[arg(long, global = true)]
    beta: Option<String>,
    /// potential spec: zero | coord:j | table:p=r:w=v,... | decay:geom:a,l
    #[arg(long, global = true)]
    f: Option<String>,
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    tail_depth: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// write the JSON report here in addition to stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV export for sequence-valued results (pressure, decay)
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// report cache directory (env THERMOSHIFT_CACHE is the fallback)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digit expansions and language combinatorics
    Lang {
        #[command(subcommand)]
        action: LangAction,
    },
    /// One row of the finite-volume kernel at a point
    Kernel {
        #[arg(long)]
        window: Option<String>,
        /// point as {"window":[k,l],"letters":[...]}
        #[arg(long)]
        point: Option<String>,
    },
    /// Search for the weak-dependence (topological Markov) window
    ProbeMarkov {
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Conformality residual of the Cesaro approximant under a swap
    ConformalCheck {
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        /// tree depth
        #[arg(short, long)]
        n: Option<usize>,
        /// Cesaro volume half-width m (must be >= n)
        #[arg(short = 'm', long)]
        volume: Option<usize>,
    },
    /// Finite-volume pressure sequence P_{[-n,n]}(f)
    Pressure {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Cesaro equilibrium approximant on a target window
    Equilibrium {
        #[arg(short, long)]
        n: Option<usize>,
        #[arg(long)]
        window: Option<String>,
    },
    /// Decay rate of digit-prefix cylinder masses
    Decay {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Pressure-minus-orbit-average margin at depth n
    Margin {
        #[arg(short, long)]
        n: Option<usize>,
    },
    /// Run the bundled check suite; exit 3 on tolerance failure
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
}

#[derive(Subcommand)]
enum LangAction {
    /// Print the first n digits of the expansion of 1
    Digits {
        #[arg(short, long)]
        n: Option<usize>,
    },
    /// Print |L^beta_n|
    Count {
        #[arg(short, long)]
        n: Option<usize>,
    },
    /// Print all admissible words of length n
    Enumerate {
        #[arg(short, long)]
        n: Option<usize>,
    },
}

struct Ctx {
    file: BTreeMap<String, String>,
    echo: BTreeMap<String, String>,
}

impl Ctx {
    fn load(path: Option<&PathBuf>) -> Result<Self, Error> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidSpec(format!("config {}: {e}", path.display())))?;
            for line in raw.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidSpec(format!("bad config line '{line}'")))?;
                file.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Ctx {
            file,
            echo: BTreeMap::new(),
        })
    }

    fn resolve<T: Clone + ToString>(
        &mut self,
        key: &str,
        flag: Option<T>,
        parse: impl Fn(&str) -> Result<T, Error>,
        default: Option<T>,
    ) -> Result<T, Error> {
        let value = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(raw) => parse(raw)?,
                None => default
                    .ok_or_else(|| Error::InvalidSpec(format!("missing required option '{key}'")))?,
            },
        };
        self.echo.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    fn string(&mut self, key: &str, flag: Option<String>, default: Option<&str>) -> Result<String, Error> {
        self.resolve(key, flag, |s| Ok(s.to_string()), default.map(str::to_string))
    }

    fn count(&mut self, key: &str, flag: Option<usize>, default: Option<usize>) -> Result<usize, Error> {
        let v = self.resolve(
            key,
            flag,
            |s| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidSpec(format!("bad count for '{key}'")))
            },
            default,
        )?;
        if v == 0 {
            return Err(Error::InvalidSpec(format!("'{key}' must be positive")));
        }
        Ok(v)
    }
}

fn parse_window(s: &str) -> Result<Window, Error> {
    let (k, l) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidSpec(format!("bad window '{s}', expected k,l")))?;
    let k = k.trim().parse().map_err(|_| Error::InvalidSpec(format!("bad window '{s}'")))?;
    let l = l.trim().parse().map_err(|_| Error::InvalidSpec(format!("bad window '{s}'")))?;
    Window::new(k, l)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints --help/--version through here with exit 0
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let mut ctx = Ctx::load(cli.config.as_ref())?;
    let beta_spec = ctx.string("beta", cli.beta.clone(), None)?;
    let beta = parse_beta(&beta_spec)?;
    let lang = Language::new(beta)?;
    let budget = ctx.count("budget", cli.budget, Some(10_000_000))?;
    let tail_depth = ctx.count("tail_depth", cli.tail_depth, Some(60))?;
    let seed = ctx.resolve(
        "seed",
        cli.seed,
        |s| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidSpec("bad seed".into()))
        },
        Some(0),
    )?;

    let mut csv_rows: Option<(String, Vec<(String, String)>)> = None;
    let (name, result, plain): (&str, Value, Option<String>) = match &cli.command {
        Command::Lang { action } => {
            let (res, plain) = run_lang(&mut ctx, &lang, action, budget)?;
            ("lang", res, Some(plain))
        }
        Command::Kernel { window, point } => {
            let f: Potential64 = parse_potential(&ctx.string("f", cli.f.clone(), None)?)?;
            let window = parse_window(&ctx.string("window", window.clone(), None)?)?;
            let raw = ctx.string("point", point.clone(), None)?;
            let v: Value = serde_json::from_str(&raw)
                .map_err(|e| Error::InvalidSpec(format!("bad point JSON: {e}")))?;
            let x = FinitePoint::from_json(&v)?;
            let row = kernel_row(&f, &lang, &x, window, tail_depth, budget)?;
            let b = lang.alphabet_size();
            let support: Vec<Value> = row.support.iter().map(|y| y.to_json()).collect();
            (
                "kernel",
                json!({
                    "window": [window.k, window.l],
                    "support": support,
                    "weights": row.weights,
                    "slack": row.slack,
                    "alphabet": b,
                }),
                None,
            )
        }
        Command::ProbeMarkov {
            window,
            radius,
            depth,
        } => {
            let window = parse_window(&ctx.string("window", window.clone(), None)?)?;
            let radius = ctx.count("radius", *radius, Some(2))?;
            let depth = ctx.count("depth", *depth, Some(3))?;
            let outcome = weak_dependence_probe(&lang, window, radius, depth, budget)?;
            let verdict = match outcome {
                ProbeOutcome::Witness { bar, depth } => json!({
                    "verdict": "witness",
                    "bar": [bar.k, bar.l],
                    "tested_depth": depth,
                }),
                ProbeOutcome::Violation { x, x2, v } => json!({
                    "verdict": "violation",
                    "x": x.to_json(),
                    "x2": x2.to_json(),
                    "v": word_to_string(&v, lang.alphabet_size()),
                }),
            };
            ("probe-markov", verdict, None)
        }
        Command::ConformalCheck {
            window,
            u,
            v,
            n,
            volume,
        } => {
            let f: Potential64 = parse_potential(&ctx.string("f", cli.f.clone(), None)?)?;
            let window = parse_window(&ctx.string("window", window.clone(), None)?)?;
            let b = lang.alphabet_size();
            let u = word_from_string(&ctx.string("u", u.clone(), None)?, b)?;
            let v = word_from_string(&ctx.string("v", v.clone(), None)?, b)?;
            let n = ctx.count("n", *n, Some(4))?;
            let m = ctx.count("volume", *volume, Some(n.max(8)))?;
            if m < n {
                return Err(Error::InvalidSpec("volume must be at least the depth n".into()));
            }
            let invol = Involution::new(&lang, window, u, v)?;
            let target = window.extend(n as i64);
            let nu = cesaro_equilibrium(&f, &lang, m, target, budget)?;
            let res = conformality_residual(&f, &lang, &nu, &invol, n, tail_depth, budget)?;
            (
                "conformal-check",
                json!({
                    "residual": res.value,
                    "slack": res.slack,
                    "a2_count": res.a2_count,
                    "b2_count": res.b2_count,
                    "b2_mass": res.b2_mass,
                    "transported_mass": res.transported_mass,
                }),
                None,
            )
        }
        Command::Pressure { n_max } => {
            let f: Potential64 = parse_potential(&ctx.string("f", cli.f.clone(), None)?)?;
            let n_max = ctx.count("n_max", *n_max, Some(10))?;
            let ps = pressure_estimate(&f, &lang, n_max, budget)?;
            csv_rows = Some((
                "n,pressure".into(),
                ps.iter()
                    .enumerate()
                    .map(|(i, p)| ((i + 1).to_string(), p.to_string()))
                    .collect(),
            ));
            ("pressure", json!({ "pressures": ps }), None)
        }
        Command::Equilibrium { n, window } => {
            let f: Potential64 = parse_potential(&ctx.string("f", cli.f.clone(), None)?)?;
            let n = ctx.count("n", *n, Some(8))?;
            let window = parse_window(&ctx.string("window", window.clone(), None)?)?;
            let nu = cesaro_equilibrium(&f, &lang, n, window, budget)?;
            let res = nu.to_json(lang.beta().spec_string(), &f.spec_string(), lang.alphabet_size());
            ("equilibrium", res, None)
        }
        Command::Decay { n_max } => {
            let f: Potential64 = parse_potential(&ctx.string("f", cli.f.clone(), None)?)?;
            let n_max = ctx.count("n_max", *n_max, Some(12))?;
            let rep = prefix_decay(&f, &lang, n_max, budget)?;
            csv_rows = Some((
                "j,neg_log_mass".into(),
                rep.points
                    .iter()
                    .map(|(j, y)| (j.to_string(), y.to_string()))
                    .collect(),
            ));
            (
                "decay",
                json!({
                    "kappa": rep.kappa,
                    "fit_residual": rep.fit_residual,
                    "margin": rep.margin,
                    "points": rep.points,
                }),
                None,
            )
        }
        Command::Margin { n } => {
            let f: Potential64 = parse_potential(&ctx.string("f", cli.f.clone(), None)?)?;
            let n = ctx.count("n", *n, Some(10))?;
            let m = margin_check(&f, &lang, n, budget)?;
            ("margin", json!({ "n": n, "margin": m }), None)
        }
        Command::Verify { suite } => {
            let suite = ctx.string("suite", suite.clone(), Some("core"))?;
            if suite != "core" {
                return Err(Error::InvalidSpec(format!("unknown suite '{suite}'")));
            }
            let f_spec = ctx.string("f", cli.f.clone(), Some("coord:0"))?;
            let f: Potential64 = parse_potential(&f_spec)?;
            let (res, ok) = verify::run_core_suite(&lang, &f, seed, budget, tail_depth)?;
            let report = report::build("verify", &ctx.echo, Some(lang.beta()), seed, res);
            emit(&report, &cli)?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) });
        }
    };

    let cache = if cli.no_cache {
        None
    } else {
        report::cache_dir(cli.cache_dir.clone())
    };
    let key = report::cache_key(name, &ctx.echo);
    let report = if let Some(hit) = cache.as_deref().and_then(|d| report::cache_load(d, &key)) {
        let mut hit = hit;
        hit["cache"] = json!("hit");
        hit
    } else {
        let rep = report::build(name, &ctx.echo, Some(lang.beta()), seed, result);
        if let Some(dir) = cache.as_deref() {
            report::cache_store(dir, &key, &rep);
        }
        rep
    };
    if let (Some(path), Some((header, rows))) = (&cli.csv, &csv_rows) {
        report::write_csv(path, header, rows)
            .map_err(|e| Error::InvalidSpec(format!("csv write: {e}")))?;
    }
    if let Some(p) = plain {
        println!("{p}");
        if let Some(out) = &cli.out {
            std::fs::write(out, serde_json::to_string_pretty(&report).unwrap())
                .map_err(|e| Error::InvalidSpec(format!("report write: {e}")))?;
        }
    } else {
        emit(&report, &cli)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(report: &Value, cli: &Cli) -> Result<(), Error> {
    let pretty = serde_json::to_string_pretty(report).unwrap();
    println!("{pretty}");
    if let Some(out) = &cli.out {
        std::fs::write(out, &pretty)
            .map_err(|e| Error::InvalidSpec(format!("report write: {e}")))?;
    }
    Ok(())
}

fn run_lang(
    ctx: &mut Ctx,
    lang: &Language,
    action: &LangAction,
    budget: usize,
) -> Result<(Value, String), Error> {
    let b = lang.alphabet_size();
    match action {
        LangAction::Digits { n } => {
            let n = ctx.count("n", *n, Some(20))?;
            let d = lang.expand(n)?;
            let s = word_to_string(&d, b);
            Ok((json!({ "digits": s }), s))
        }
        LangAction::Count { n } => {
            let n = ctx.count("n", *n, Some(10))?;
            let c = lang.count(n)?;
            Ok((json!({ "count": c.to_string() }), c.to_string()))
        }
        LangAction::Enumerate { n } => {
            let n = ctx.count("n", *n, Some(5))?;
            let words: Vec<String> = lang
                .enumerate(n, budget)?
                .iter()
                .map(|w| word_to_string(w, b))
                .collect();
            let plain = words.join("\n");
            Ok((json!({ "words": words }), plain))
        }
    }
}
