//! Command-line front end.
//!
//! Every command writes one JSON document (sorted keys, two-space indent) to
//! stdout or to `--out`. Exit status is 0 on success, 1 on a domain or input
//! error, 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::a_model::{self, default_samples};
use crate::atlas::{self, chamber_structure};
use crate::cover::{self, orbit_ball, overlap_audit};
use crate::descriptor::{self, chart_to_json, CoverConfig};
use crate::git_model::{self, OrbitProbe, DEFAULT_SEED};
use crate::lattice::{q_coordinates, ComplexifiedClass, DivisorClass};
use crate::qalg::QSeries;
use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "bircone", version, about = "Chambers, flops and three-point functions of Calabi-Yau threefolds")]
struct Cli {
    /// Worker threads for parallel sweeps (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Chamber structure and movable cone of an atlas directory.
    Chambers {
        /// Directory of chart descriptors plus an optional adjacency.json.
        #[arg(long)]
        atlas: PathBuf,
    },
    /// Flop a chart across one of its walls and print the new descriptor.
    Flop(WallArgs),
    /// Truncated three-point series and its closed form.
    Threepoint {
        #[arg(long)]
        chart: PathBuf,
        #[command(flatten)]
        classes: Classes,
        /// Truncation order (total degree in framing exponents).
        #[arg(long, default_value_t = 10)]
        order: u64,
    },
    /// Check that the wall term compensates the cubic jump across a flop.
    VerifyLemma {
        #[command(flatten)]
        wall: WallArgs,
        #[command(flatten)]
        classes: Classes,
        /// Extra sample values of u, comma separated (e.g. "5/7,-3").
        #[arg(long, allow_hyphen_values = true)]
        samples: Option<String>,
    },
    /// Reflect a divisor class across a divisorial wall.
    Reflect {
        #[command(flatten)]
        wall: WallArgs,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: String,
    },
    /// The local C^4 // C* flop model at moment level r.
    GitToy {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        /// Sampled points for the stability agreement check.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Grid size for the area quadrature.
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Write `r,area` rows for the given levels (default: r only).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Levels for the CSV, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
    },
    /// Spot-check covering of a target cone by group translates.
    Cover {
        #[arg(long)]
        config: PathBuf,
        /// Override the word-ball depth of the config.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// q-coordinates of a complexified Kähler class B + iJ.
    QCoords {
        #[arg(long)]
        chart: PathBuf,
        /// B as comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// J as comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        j: String,
    },
}

#[derive(Args, Debug)]
struct WallArgs {
    #[arg(long)]
    chart: PathBuf,
    /// Index into the chart's wall list.
    #[arg(long)]
    wall: usize,
}

#[derive(Args, Debug)]
struct Classes {
    #[arg(long = "A", allow_hyphen_values = true)]
    a: String,
    #[arg(long = "B", allow_hyphen_values = true)]
    b: String,
    #[arg(long = "C", allow_hyphen_values = true)]
    c: String,
}

/// Errors in flag values are usage errors (exit 2).
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_ints(flag: &str, s: &str) -> CliResult<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Failure::Usage(format!("--{flag}: expected comma-separated integers, got {s:?}")))
        })
        .collect()
}

fn parse_rationals(flag: &str, s: &str) -> CliResult<Vec<Rational>> {
    s.split(',')
        .map(|t| rational::parse(t).map_err(|e| Failure::Usage(format!("--{flag}: {e}"))))
        .collect()
}

fn parse_floats(flag: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("--{flag}: expected comma-separated numbers, got {s:?}")))
        })
        .collect()
}

fn divisor(flag: &str, s: &str) -> CliResult<DivisorClass> {
    parse_ints(flag, s).map(DivisorClass::new)
}

fn rat(x: &Rational) -> Value {
    Value::String(rational::format(x))
}

fn series_json(s: &QSeries) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(m, c)| json!({ "c": rat(c), "q": m.exponents() }))
        .collect();
    json!({ "order": s.order(), "terms": terms, "text": s.render() })
}

fn complex_json(z: &Complex64) -> Value {
    json!({ "re": z.re, "im": z.im, "abs": z.norm(), "arg": z.arg() })
}

fn load_chart(path: &Path) -> CliResult<atlas::ModelChart> {
    Ok(descriptor::load_descriptor(path)?)
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn execute(command: Command, warn: &mut Vec<String>) -> CliResult<Value> {
    match command {
        Command::Chambers { atlas } => {
            let atlas = descriptor::load_atlas(&atlas)?;
            let report = chamber_structure(&atlas)?;
            Ok(serde_json::to_value(report).expect("report serializes"))
        }
        Command::Flop(w) => {
            let chart = load_chart(&w.chart)?;
            let flopped = atlas::flop(&chart, w.wall)?;
            for note in atlas::flop_notes(&chart, w.wall)? {
                warn.push(note);
            }
            Ok(chart_to_json(&flopped))
        }
        Command::Threepoint { chart, classes, order } => {
            let (a, b, c) = (
                divisor("A", &classes.a)?,
                divisor("B", &classes.b)?,
                divisor("C", &classes.c)?,
            );
            let chart = load_chart(&chart)?;
            let series = a_model::three_point_series(&chart, &a, &b, &c, order)?;
            let closed = a_model::three_point_closed(&chart, &a, &b, &c)?;
            Ok(json!({
                "chart": chart.id,
                "classical": chart.cubic.eval(&a, &b, &c)?,
                "series": series_json(&series),
                "closed": {
                    "constant": rat(&closed.constant_term()),
                    "primitives": serde_json::to_value(closed.primitives()).expect("terms serialize"),
                },
            }))
        }
        Command::VerifyLemma { wall, classes, samples } => {
            let (a, b, c) = (
                divisor("A", &classes.a)?,
                divisor("B", &classes.b)?,
                divisor("C", &classes.c)?,
            );
            let mut points = default_samples();
            if let Some(extra) = samples {
                points.extend(parse_rationals("samples", &extra)?);
            }
            let chart = load_chart(&wall.chart)?;
            let report = a_model::verify_flop_lemma(&chart, wall.wall, &a, &b, &c, &points)?;
            Ok(serde_json::to_value(report).expect("report serializes"))
        }
        Command::Reflect { wall, h } => {
            let h = divisor("H", &h)?;
            let chart = load_chart(&wall.chart)?;
            let w = chart.wall(wall.wall)?;
            let image = atlas::reflect_divisorial(&h, w)?;
            Ok(json!({ "wall": w, "h": h, "image": image }))
        }
        Command::GitToy {
            r,
            samples,
            seed,
            grid,
            csv,
            sweep,
        } => {
            if !r.is_finite() {
                return Err(Failure::Usage("--r must be finite".into()));
            }
            let levels = match &sweep {
                Some(s) => parse_floats("sweep", s)?,
                None => vec![r],
            };
            let q = git_model::classify_quotient(r);
            let area = if r == 0.0 {
                Value::Null
            } else {
                json!(git_model::exceptional_area(r, grid)?)
            };
            let agreement = git_model::sample_agreement(r, samples, seed, &OrbitProbe::default())?;
            if let Some(path) = csv {
                let mut rows = Vec::new();
                for level in levels {
                    let a = if level == 0.0 {
                        0.0
                    } else {
                        git_model::exceptional_area(level, grid)?
                    };
                    rows.push(format!("{level},{a}"));
                }
                write_csv(&path, "r,area", &rows)?;
            }
            Ok(json!({
                "r": r,
                "unstable_locus": q.unstable_locus.as_str(),
                "quotient_label": q.label.as_str(),
                "area": area,
                "area_slope": git_model::AREA_SLOPE,
                "samples": samples,
                "seed": seed,
                "agreement": agreement,
            }))
        }
        Command::Cover { config, depth } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Error::Io(format!("{}: {e}", config.display())))?;
            let cfg = CoverConfig::parse(&text)?;
            let setup = cfg.setup()?;
            let depth = depth.unwrap_or(cfg.depth);
            let ball = orbit_ball(&setup.generators, depth)?;
            let report = cover::covers(&setup.candidate, &ball, &setup.target, &setup.rays, depth)?;
            warn.extend(report.warnings.iter().cloned());
            let mut out = json!({ "report": report, "ball_size": ball.len() });
            if let Some(audit_depth) = cfg.audit_depth {
                let audit_ball = orbit_ball(&setup.generators, audit_depth)?;
                let pairs: Vec<Value> = overlap_audit(&setup.candidate, &audit_ball)?
                    .into_iter()
                    .map(|(i, j)| json!([audit_ball[i].word_string(), audit_ball[j].word_string()]))
                    .collect();
                out["audit"] = json!({ "depth": audit_depth, "overlaps": pairs });
            }
            Ok(out)
        }
        Command::QCoords { chart, b, j } => {
            let (b, j) = (parse_rationals("b", &b)?, parse_rationals("j", &j)?);
            let chart = load_chart(&chart)?;
            let z = ComplexifiedClass::new(b, j)?;
            let framing = chart.effective_framing();
            let q = q_coordinates(&z, &framing)?;
            let basis: Vec<&[i64]> = framing.basis().iter().map(|e| e.coords()).collect();
            Ok(json!({
                "framing": basis,
                "q": q.iter().map(complex_json).collect::<Vec<_>>(),
            }))
        }
    }
}

/// Runs the command line `args` (including the program name), writing the
/// report to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut warnings = Vec::new();
    let result = match cli.jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli.command, &mut warnings)),
            Err(e) => Err(Failure::Domain(Error::Io(e.to_string()))),
        },
        None => execute(cli.command, &mut warnings),
    };
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match result {
        Ok(value) => {
            let mut text = serde_json::to_string_pretty(&value).expect("json");
            text.push('\n');
            let written = match &cli.out {
                Some(path) => fs::write(path, &text)
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    1
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
