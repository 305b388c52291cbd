use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pbw_core::certify::{self, check_poisson, check_quadratic_condition, CertifyError, D2Choice};
use pbw_core::io::{self, Source};
use pbw_core::rewrite::{self, DegreeVerdict, Membership, RewriteError, TorsionOutcome};
use pbw_core::{validate, HPoly, Mode, Presentation, Rational};
use serde_json::{json, Value};

mod selftest;
mod text;

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const NEGATIVE: u8 = 1;
    pub const UNDECIDED: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const INTERNAL: u8 = 4;
}

#[derive(Parser)]
#[command(name = "pbw-workbench", version, about = "Exact PBW certificates and Hilbert-function checks for hbar-deformed quadratic algebras")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum D2Arg {
    /// Pick from the input shape.
    Auto,
    Default,
    Lie,
    Quadratic,
    Custom,
}

#[derive(Args)]
struct InputArg {
    /// Presentation document (JSON).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct D2Args {
    #[arg(long, value_enum, default_value_t = D2Arg::Auto)]
    d2: D2Arg,
    /// JSON file with the custom d2 values (with `--d2 custom`).
    #[arg(long)]
    d2_file: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    /// Specialization point, an exact rational such as `1`, `-2` or `1/2`.
    #[arg(long, conflicts_with = "generic")]
    at: Option<String>,
    /// Work over Q(h) instead of at a point.
    #[arg(long)]
    generic: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check antisymmetry, filtration bound and certificate applicability.
    Validate(InputArg),
    /// Evaluate d1∘d2 on every triple.
    Certify {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        d2: D2Args,
    },
    /// Lowest-order hbar coefficients of the failing residues.
    Obstruction {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        d2: D2Args,
    },
    /// Cyclic derivatives of a potential.
    Derive {
        #[command(flatten)]
        input: InputArg,
        /// Generator index; all generators when omitted.
        #[arg(long)]
        var: Option<usize>,
    },
    /// Presentation with phi_ij = d_k Phi for a potential in three variables.
    FromPotential(InputArg),
    /// Normal-word counts against dim S^k.
    #[command(alias = "hilbert")]
    Pbw {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Ideal membership of a polynomial.
    Member {
        #[command(flatten)]
        input: InputArg,
        /// Polynomial document (JSON).
        #[arg(long)]
        poly: PathBuf,
        /// Completion bound; must exceed the degree of the polynomial.
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Search for a witness that factor*T lies in the ideal while T does not.
    Torsion {
        #[command(flatten)]
        input: InputArg,
        /// Polynomial document (JSON) for T.
        #[arg(long)]
        element: PathBuf,
        /// Polynomial in h, e.g. `1-h`.
        #[arg(long)]
        factor: String,
        #[arg(long)]
        degree: usize,
    },
    /// Randomized consistency checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// An error that maps to exit code 3.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(InputError(e.into()))
}

pub struct Report {
    pub code: u8,
    pub command: &'static str,
    pub provenance: Value,
    pub presentation: Option<Presentation>,
    pub result: Value,
    /// Body of the `--format text` rendering.
    pub text: String,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input_err)
}

fn load(path: &Path) -> anyhow::Result<(Presentation, Source)> {
    let text = read(path)?;
    io::parse_presentation(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(input_err)
}

fn source_name(s: &Source) -> &'static str {
    match s {
        Source::Explicit => "explicit",
        Source::Lie(_) => "lie",
        Source::Quadratic(_) => "quadratic",
        Source::Potential(_) => "potential",
    }
}

fn parse_point(p: &PointArgs) -> anyhow::Result<Mode> {
    match (&p.at, p.generic) {
        (Some(a), false) => {
            let v: Rational = a.parse().map_err(|e| input_err(anyhow!("--at {a}: {e}")))?;
            Ok(Mode::At(v))
        }
        (None, true) => Ok(Mode::Generic),
        _ => Err(input_err(anyhow!("give exactly one of --at <a> or --generic"))),
    }
}

fn mode_json(m: &Mode) -> Value {
    match m {
        Mode::At(a) => json!({"at": a.to_string()}),
        Mode::Generic => json!("generic"),
    }
}

fn choose_d2(p: &Presentation, args: &D2Args) -> anyhow::Result<D2Choice> {
    Ok(match args.d2 {
        D2Arg::Auto => certify::suggested_choice(p),
        D2Arg::Default => D2Choice::Default,
        D2Arg::Lie => D2Choice::Lie,
        D2Arg::Quadratic => D2Choice::Quadratic,
        D2Arg::Custom => {
            let path = args.d2_file.as_ref().ok_or_else(|| input_err(anyhow!("--d2 custom needs --d2-file")))?;
            let map = io::parse_custom_d2(&read(path)?, p.n())
                .with_context(|| format!("{}", path.display()))
                .map_err(input_err)?;
            D2Choice::Custom(map)
        }
    })
}

fn certify_err(e: CertifyError) -> anyhow::Error {
    input_err(e)
}

fn rewrite_err(e: RewriteError) -> anyhow::Error {
    input_err(e)
}

fn bounds(pairs: &[(&str, Value)]) -> Value {
    Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.cmd {
        Cmd::Validate(a) => {
            let (p, src) = load(&a.input)?;
            let r = validate(&p);
            let issues: Vec<String> = r.issues.iter().map(|i| format!("{i:?}")).collect();
            let paths: Vec<String> = r.paths.iter().map(|c| c.to_string()).collect();
            let text = text::fields(&[
                ("source", source_name(&src).to_string()),
                ("valid", r.valid.to_string()),
                ("filtration ok", r.filtration_ok.to_string()),
                ("linear", p.is_linear().to_string()),
                ("d2 paths", paths.join(", ")),
                ("issues", if issues.is_empty() { "none".into() } else { issues.join("; ") }),
            ]);
            let result = json!({
                "source": source_name(&src),
                "valid": r.valid,
                "filtration_ok": r.filtration_ok,
                "linear": p.is_linear(),
                "paths": paths,
                "issues": issues,
            });
            Ok(Report {
                code: if r.valid { exit::OK } else { exit::NEGATIVE },
                command: "validate",
                provenance: json!({"input": a.input.display().to_string()}),
                presentation: Some(p),
                result,
                text,
            })
        }
        Cmd::Certify { input, d2 } => {
            let (p, src) = load(&input.input)?;
            let choice = choose_d2(&p, d2)?;
            let rep = certify::certify(&p, &choice).map_err(certify_err)?;
            let mut result = io::certificate_json(&rep);
            let mut rows = vec![
                ("d2", rep.d2.clone()),
                ("verdict", rep.verdict.to_string()),
                ("conclusion", rep.conclusion.to_string()),
            ];
            for t in rep.failing_triples() {
                rows.push(("residue", format!("{t:?}: {}", rep.residues[&t])));
            }
            if let Source::Quadratic(q) = &src {
                let qc = check_quadratic_condition(q);
                let pc = check_poisson(q);
                rows.push(("quadratic condition", text::tensor(&qc)));
                rows.push(("poisson condition", text::tensor(&pc)));
                result["quadratic_condition"] = io::tensor_check_json(&qc);
                result["poisson_condition"] = io::tensor_check_json(&pc);
            }
            Ok(Report {
                code: if rep.passed() { exit::OK } else { exit::NEGATIVE },
                command: "certify",
                provenance: json!({"input": input.input.display().to_string(), "d2": rep.d2}),
                presentation: Some(p),
                result,
                text: text::fields(&rows),
            })
        }
        Cmd::Obstruction { input, d2 } => {
            let (p, _) = load(&input.input)?;
            let choice = choose_d2(&p, d2)?;
            let rep = certify::certify(&p, &choice).map_err(certify_err)?;
            let (code, result, text) = match certify::obstruction_from(&rep) {
                Ok(ob) => {
                    let mut rows = vec![("hbar order", ob.hbar_order.to_string())];
                    for g in &ob.generators {
                        rows.push(("generator", format!("{:?}: {}", g.triple, g.poly)));
                    }
                    (exit::OK, io::obstruction_json(&ob), text::fields(&rows))
                }
                Err(CertifyError::NoObstruction) => (
                    exit::NEGATIVE,
                    json!({"hbar_order": null, "generators": []}),
                    text::fields(&[("obstruction", "none (certificate passes)".into())]),
                ),
                Err(e) => return Err(certify_err(e)),
            };
            Ok(Report {
                code,
                command: "obstruction",
                provenance: json!({"input": input.input.display().to_string(), "d2": rep.d2}),
                presentation: Some(p),
                result,
                text,
            })
        }
        Cmd::Derive { input, var } => {
            let pot = io::parse_potential(&read(&input.input)?)
                .with_context(|| format!("{}", input.input.display()))
                .map_err(input_err)?;
            let vars: Vec<usize> = match var {
                Some(v) => vec![*v],
                None => (1..=pot.n()).collect(),
            };
            let mut out = Vec::new();
            let mut rows = vec![("potential", pot.to_string())];
            for v in vars {
                let d = pot.derivative(v).map_err(input_err)?;
                rows.push(("derivative", format!("d/dx{v} = {d}")));
                out.push(json!({"var": v, "derivative": io::poly_json(&d), "display": d.to_string()}));
            }
            Ok(Report {
                code: exit::OK,
                command: "derive",
                provenance: json!({"input": input.input.display().to_string()}),
                presentation: None,
                result: json!({"potential": io::potential_json(&pot)["potential"], "derivatives": out}),
                text: text::fields(&rows),
            })
        }
        Cmd::FromPotential(a) => {
            let pot = io::parse_potential(&read(&a.input)?)
                .with_context(|| format!("{}", a.input.display()))
                .map_err(input_err)?;
            let p = pot.to_presentation().map_err(input_err)?;
            let text = text::fields(&[
                ("potential", pot.to_string()),
                ("hbar-divisible", pot.is_deformation().to_string()),
            ]);
            Ok(Report {
                code: exit::OK,
                command: "from-potential",
                provenance: json!({"input": a.input.display().to_string()}),
                presentation: Some(p),
                result: json!({"potential": io::potential_json(&pot)["potential"], "is_deformation": pot.is_deformation()}),
                text,
            })
        }
        Cmd::Pbw { input, degree, point } => {
            let (p, _) = load(&input.input)?;
            let mode = parse_point(point)?;
            let rep = pbw_core::hilbert(&p, &mode, *degree).map_err(rewrite_err)?;
            let code = match rep.overall() {
                DegreeVerdict::Match => exit::OK,
                DegreeVerdict::Defect(_) => exit::NEGATIVE,
                DegreeVerdict::Unknown => exit::UNDECIDED,
            };
            Ok(Report {
                code,
                command: "pbw",
                provenance: json!({
                    "input": input.input.display().to_string(),
                    "bounds": bounds(&[("K", json!(degree)), ("D", json!(degree + 1))]),
                    "mode": mode_json(&mode),
                }),
                presentation: Some(p),
                result: io::hilbert_json(&rep),
                text: text::hilbert(&rep),
            })
        }
        Cmd::Member { input, poly, degree, point } => {
            let (p, _) = load(&input.input)?;
            let mode = parse_point(point)?;
            let f = io::parse_poly(&read(poly)?, p.n())
                .with_context(|| format!("{}", poly.display()))
                .map_err(input_err)?;
            let outcome = match &mode {
                Mode::At(a) => {
                    let mut sys = rewrite::build_rules_at(&p, a).map_err(rewrite_err)?;
                    sys.complete(*degree).map_err(rewrite_err)?;
                    sys.member(&f.specialize(a))
                }
                Mode::Generic => {
                    let mut sys = rewrite::build_rules_generic(&p).map_err(rewrite_err)?;
                    sys.complete(*degree).map_err(rewrite_err)?;
                    sys.member(&sys.embed(&f))
                }
            };
            let (code, verdict, line) = match outcome {
                Ok(Membership::Yes) => (exit::OK, json!("yes"), "yes".to_string()),
                Ok(Membership::No) => (exit::NEGATIVE, json!("no"), "no".to_string()),
                Err(RewriteError::OutOfRange { degree, complete_through }) => (
                    exit::UNDECIDED,
                    json!({"out_of_range": {"degree": degree, "complete_through": complete_through}}),
                    format!("undecided: degree {degree} exceeds the certified range {complete_through:?}"),
                ),
                Err(e) => return Err(rewrite_err(e)),
            };
            let text = text::fields(&[("element", f.to_string()), ("mode", mode.to_string()), ("member", line)]);
            Ok(Report {
                code,
                command: "member",
                provenance: json!({
                    "input": input.input.display().to_string(),
                    "poly": poly.display().to_string(),
                    "bounds": bounds(&[("D", json!(degree))]),
                    "mode": mode_json(&mode),
                }),
                presentation: Some(p),
                result: json!({"element": io::poly_json(&f), "member": verdict}),
                text,
            })
        }
        Cmd::Torsion { input, element, factor, degree } => {
            let (p, _) = load(&input.input)?;
            let t = io::parse_poly(&read(element)?, p.n())
                .with_context(|| format!("{}", element.display()))
                .map_err(input_err)?;
            let fac: HPoly = factor.parse().map_err(|e| input_err(anyhow!("--factor {factor}: {e}")))?;
            let out = match rewrite::torsion_check(&p, &t, &fac, *degree) {
                Ok(o) => o,
                Err(RewriteError::OutOfRange { degree: dt, .. }) => TorsionOutcome::Unknown(format!(
                    "bound {degree} is too small for an element of degree {dt}; use at least {}",
                    (dt + 1).max(2)
                )),
                Err(e) => return Err(rewrite_err(e)),
            };
            let (code, rows) = match &out {
                TorsionOutcome::Witness(w) => (
                    exit::OK,
                    vec![
                        ("outcome", "witness".to_string()),
                        ("element", w.element.to_string()),
                        ("factor", w.factor.to_string()),
                        ("separating point", format!("h = {}", w.nonmember_at)),
                        ("span size", w.span_size.to_string()),
                    ],
                ),
                TorsionOutcome::Refuted(why) => (exit::NEGATIVE, vec![("outcome", "refuted".into()), ("reason", why.clone())]),
                TorsionOutcome::Unknown(why) => (exit::UNDECIDED, vec![("outcome", "unknown".into()), ("reason", why.clone())]),
            };
            Ok(Report {
                code,
                command: "torsion",
                provenance: json!({
                    "input": input.input.display().to_string(),
                    "element": element.display().to_string(),
                    "bounds": bounds(&[("D", json!(degree))]),
                }),
                presentation: Some(p),
                result: io::torsion_json(&out),
                text: text::fields(&rows),
            })
        }
        Cmd::Selftest { seed, samples } => {
            if *samples == 0 {
                bail!(input_err(anyhow!("--samples must be positive")));
            }
            let res = selftest::run(*seed, *samples);
            let ok = res.iter().all(|c| c.passed);
            let rows: Vec<(&str, String)> = res.iter().map(|c| (c.name, c.summary())).collect();
            Ok(Report {
                code: if ok { exit::OK } else { exit::NEGATIVE },
                command: "selftest",
                provenance: json!({"seed": seed, "samples": samples}),
                presentation: None,
                result: json!({"checks": res.iter().map(selftest::Check::to_json).collect::<Vec<_>>()}),
                text: text::fields(&rows),
            })
        }
    }
}

fn envelope(r: &Report) -> Value {
    let mut v = json!({
        "tool": {"name": "pbw-workbench", "version": env!("CARGO_PKG_VERSION")},
        "command": r.command,
        "provenance": r.provenance,
        "exit_code": r.code,
        "result": r.result,
    });
    if let Some(p) = &r.presentation {
        v["presentation"] = io::presentation_json(p);
    }
    v
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| run(&cli)));
    match outcome {
        Ok(Ok(report)) => {
            match cli.format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&envelope(&report)).expect("json"));
                }
                Format::Text => print!("{}", text::render(&report, env!("CARGO_PKG_VERSION"))),
            }
            ExitCode::from(report.code)
        }
        Ok(Err(e)) => {
            let code = if e.downcast_ref::<InputError>().is_some() { exit::INPUT } else { exit::INTERNAL };
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
        Err(_) => ExitCode::from(exit::INTERNAL),
    }
}
