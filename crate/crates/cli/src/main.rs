use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use vqaut::bs_embed::{britton_report, bs_generators};
use vqaut::dynamics::{
    conjugate_power_check, fixed_points, periodic_orbit_lengths, slope_spectrum, stabilizing_power,
    torsion_test,
};
use vqaut::embeddings::{phi, theta};
use vqaut::format::{
    qaut_from_json, qaut_to_json, v_from_json, v_from_str, v_from_text, v_to_json, v_to_text,
};
use vqaut::selfcheck::{self, Config};
use vqaut::{Error, QAutElement, VElement, Word};

/// Exact arithmetic in Thompson's group V and in QAut(T_2,c).
///
/// Element arguments are file paths (`-` reads stdin). V elements use the
/// text format (`a -> b` per line, `^` for the empty word) or JSON
/// `{"pairs": [...]}`; QAut elements use JSON `{"level", "v_part", "bijection"}`.
#[derive(Parser)]
#[command(name = "vqaut", version)]
struct Cli {
    /// Print V elements as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply A, then B.
    Compose {
        a: PathBuf,
        b: PathBuf,
    },
    Inverse {
        a: PathBuf,
    },
    Power {
        a: PathBuf,
        #[arg(allow_hyphen_values = true)]
        k: i64,
    },
    /// Validate a possibly unreduced V table and print its reduced form.
    Reduce {
        a: PathBuf,
    },
    /// Print `true` or `false`.
    Eq {
        a: PathBuf,
        b: PathBuf,
    },
    /// Image of a word (`^` for the empty word).
    Apply {
        a: PathBuf,
        word: String,
    },
    /// theta: V -> QAut.
    Theta {
        a: PathBuf,
    },
    /// phi: QAut -> V.
    Phi {
        t: PathBuf,
    },
    /// Minimal decomposition (v_min, b, p) of a QAut element.
    Decompose {
        t: PathBuf,
    },
    /// Cutoff level with the violation set and the support-based set Z.
    Cutoff {
        t: PathBuf,
    },
    /// Dynamics of a V element.
    Dyn {
        #[command(subcommand)]
        command: DynCommand,
    },
    /// Baumslag-Solitar generators inside V.
    Bs {
        #[command(subcommand)]
        command: BsCommand,
    },
    /// Run the seeded acceptance suites.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every per-check sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Only run these criteria (1-8); repeatable.
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum DynCommand {
    /// Attracting and repelling fixed points with slope exponents.
    Fixed { a: PathBuf },
    /// Exact periods of periodic points.
    Periods { a: PathBuf },
    Torsion {
        a: PathBuf,
        #[arg(long, default_value_t = vqaut::dynamics::DEFAULT_TORSION_BOUND)]
        bound: usize,
    },
    /// Stabilizing power m and the slope spectrum S_1 of v^m.
    Spectrum { a: PathBuf },
    /// Decide w^-1 v^r w = v^s.
    ConjCheck {
        v: PathBuf,
        w: PathBuf,
        #[arg(allow_hyphen_values = true)]
        r: i64,
        #[arg(allow_hyphen_values = true)]
        s: i64,
    },
}

#[derive(Subcommand)]
enum BsCommand {
    /// Generators A, B of BS(m, e*m).
    Gen {
        m: i64,
        #[arg(allow_hyphen_values = true)]
        e: i64,
    },
    /// Check the relation, the ping-pong certificates and Britton-reduced words.
    Verify {
        m: i64,
        #[arg(allow_hyphen_values = true)]
        e: i64,
        #[arg(long, default_value_t = 6)]
        britton: usize,
    },
}

enum Element {
    V(VElement),
    Q(QAutElement),
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn with_path<T>(path: &Path, r: vqaut::Result<T>) -> Result<T> {
    r.with_context(|| format!("in {}", path.display()))
}

fn read_v(path: &Path) -> Result<VElement> {
    with_path(path, v_from_str(&read_input(path)?))
}

fn read_q(path: &Path) -> Result<QAutElement> {
    with_path(path, qaut_from_json(&read_input(path)?))
}

/// A QAut element if the JSON object has a `level` field, otherwise a V element.
fn read_any(path: &Path) -> Result<Element> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        let is_qaut = serde_json::from_str::<Value>(&text)
            .map(|v| v.get("level").is_some())
            .unwrap_or(false);
        if is_qaut {
            return Ok(Element::Q(with_path(path, qaut_from_json(&text))?));
        }
        return Ok(Element::V(with_path(path, v_from_json(&text))?));
    }
    Ok(Element::V(with_path(path, v_from_text(&text))?))
}

fn print_v(v: &VElement, json: bool) {
    if json {
        println!("{}", v_to_json(v));
    } else {
        print!("{}", v_to_text(v));
    }
}

fn print_element(e: &Element, json: bool) {
    match e {
        Element::V(v) => print_v(v, json),
        Element::Q(q) => println!("{}", qaut_to_json(q)),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn pairs_json(pairs: &[(Word, Word)]) -> Value {
    json!(pairs)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.command {
        Command::Compose { a, b } => match (read_any(&a)?, read_any(&b)?) {
            (Element::V(x), Element::V(y)) => print_v(&x.compose(&y), json),
            (Element::Q(x), Element::Q(y)) => println!("{}", qaut_to_json(&x.compose(&y))),
            _ => bail!("cannot compose a V element with a QAut element"),
        },
        Command::Inverse { a } => match read_any(&a)? {
            Element::V(x) => print_v(&x.inverse(), json),
            Element::Q(x) => println!("{}", qaut_to_json(&x.inverse())),
        },
        Command::Power { a, k } => match read_any(&a)? {
            Element::V(x) => print_v(&x.power(k), json),
            Element::Q(x) => println!("{}", qaut_to_json(&x.power(k))),
        },
        Command::Reduce { a } => print_element(&read_any(&a)?, json),
        Command::Eq { a, b } => {
            let same = match (read_any(&a)?, read_any(&b)?) {
                (Element::V(x), Element::V(y)) => x.equals(&y),
                (Element::Q(x), Element::Q(y)) => x.equals(&y),
                _ => bail!("cannot compare a V element with a QAut element"),
            };
            println!("{same}");
        }
        Command::Apply { a, word } => {
            let w: Word = word.parse().with_context(|| format!("word {word:?}"))?;
            match read_any(&a)? {
                Element::V(x) => println!("{}", x.apply(&w)?),
                Element::Q(x) => println!("{}", x.apply(&w)),
            }
        }
        Command::Theta { a } => println!("{}", qaut_to_json(&theta(&read_v(&a)?))),
        Command::Phi { t } => print_v(&phi(&read_q(&t)?), json),
        Command::Decompose { t } => {
            let t = read_q(&t)?;
            let d = t.minimal_decomposition();
            print_json(&json!({
                "v_min": d.v_min,
                "b": pairs_json(&d.b),
                "p": pairs_json(&d.p),
                "suffix_pairs": pairs_json(&t.suffix_pairs()),
                "essential_suffix_pairs": pairs_json(&t.essential_suffix_pairs()),
            }))?;
        }
        Command::Cutoff { t } => print_json(&read_q(&t)?.cutoff_report())?,
        Command::Dyn { command } => return run_dyn(command),
        Command::Bs { command } => return run_bs(command),
        Command::Selfcheck {
            seed,
            samples,
            criteria,
        } => {
            if let Some(bad) = criteria.iter().find(|&&c| !(1..=8).contains(&c)) {
                bail!("criterion {bad} does not exist (expected 1-8)");
            }
            let report = selfcheck::run(&Config { seed, samples }, &criteria);
            if json {
                print_json(&report)?;
            } else {
                print!("{report}");
            }
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_dyn(command: DynCommand) -> Result<ExitCode> {
    match command {
        DynCommand::Fixed { a } => print_json(&fixed_points(&read_v(&a)?))?,
        DynCommand::Periods { a } => print_json(&periodic_orbit_lengths(&read_v(&a)?)?)?,
        DynCommand::Torsion { a, bound } => print_json(&torsion_test(&read_v(&a)?, bound)?)?,
        DynCommand::Spectrum { a } => {
            let v = read_v(&a)?;
            let (m, alpha) = stabilizing_power(&v)?;
            let s = slope_spectrum(&alpha)?;
            print_json(
                &json!({ "stabilizing_power": m, "spectrum": s.values, "max_abs": s.max_abs() }),
            )?;
        }
        DynCommand::ConjCheck { v, w, r, s } => {
            match conjugate_power_check(&read_v(&v)?, &read_v(&w)?, r, s) {
                Ok(report) => print_json(&report)?,
                Err(Error::Falsified(msg)) => {
                    eprintln!("invariant falsified: {msg}");
                    return Ok(ExitCode::from(2));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bs(command: BsCommand) -> Result<ExitCode> {
    match command {
        BsCommand::Gen { m, e } => {
            let w = bs_generators(m, e)?;
            println!("# A");
            print!("{}", v_to_text(&w.a));
            println!("# B");
            print!("{}", v_to_text(&w.b));
            print_json(&json!({
                "m": w.m,
                "e": w.e,
                "relation_holds": w.relation_holds,
                "a_power_m_nontrivial": w.a_power_m_nontrivial,
                "ping_pong": w.ping_pong,
                "a_certificate": w.a_certificate,
            }))?;
        }
        BsCommand::Verify { m, e, britton } => {
            let w = bs_generators(m, e)?;
            let report = britton_report(&w, britton);
            let ok = w.all_checks_pass() && report.counterexample.is_none();
            print_json(&json!({
                "m": w.m,
                "e": w.e,
                "relation_holds": w.relation_holds,
                "ping_pong_certified": w.ping_pong.iter().all(|c| c.holds),
                "a_non_torsion": w.a_certificate.is_some(),
                "britton": report,
                "passed": ok,
            }))?;
            if !ok {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
