//! `quadrings`: command-line access to forms, pairs, ideals and the verifier.
//!
//! Every JSON document written carries `"schema": 1`. Usage errors exit with
//! status 2, domain errors with 1, and a failed verification with 3; errors
//! are reported as JSON on stderr.

use std::io::Read;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use quadrings::correspondence::{
    form_to_pair, form_to_quadratic_map, is_invertible_module, pair_to_form,
    pair_to_form_global, pair_to_form_normalized, quadratic_map_to_form, BaseChange,
    CorrespondencePair, QuadraticMap,
};
use quadrings::forms::{reduce_posdef, Gl2Mode};
use quadrings::ideal::{class_group, compose_forms, realize_as_ideal};
use quadrings::rings::{element_to_json, make_context};
use quadrings::verifier::{verify_bijection, VerifierConfig};
use quadrings::{BQForm, Flavor, Gl2, Mat2, Ring};

#[derive(Parser)]
#[command(name = "quadrings", version, about = "Binary quadratic forms and quadratic rings")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Worker threads for verify and classgroup.
    #[arg(long, env = "QUADRINGS_JOBS", global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Plain,
    Twisted,
    Linear,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Plain => Flavor::Plain,
            FlavorArg::Twisted => Flavor::Twisted,
            FlavorArg::Linear => Flavor::Linear,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Plain,
    Twisted,
}

#[derive(Args)]
struct FormArgs {
    /// Base ring: `Z` or `zmod:N`.
    #[arg(long, default_value = "Z")]
    ring: String,
    /// Coefficients `a,b,c`.
    #[arg(short = 'f', long = "form", allow_hyphen_values = true)]
    form: String,
    #[arg(long, value_enum, default_value_t = FlavorArg::Plain)]
    flavor: FlavorArg,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant b^2 - 4ac.
    Disc(FormArgs),
    /// Apply a matrix `k,l,m,n` (and for linear forms a unit) to a form.
    Act {
        #[command(flatten)]
        form: FormArgs,
        /// Matrix entries `k,l,m,n`, acting by `(x, y) -> (kx + ly, mx + ny)`.
        #[arg(short = 'g', long = "matrix", allow_hyphen_values = true)]
        matrix: String,
        /// Substitution only, or divided by the determinant. Defaults to the flavor's action.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Unit scaling, for linear forms.
        #[arg(long, allow_hyphen_values = true)]
        unit: Option<String>,
    },
    /// Reduce a positive definite integral form.
    Reduce {
        #[arg(short = 'f', long = "form", allow_hyphen_values = true)]
        form: String,
    },
    /// Algebra and module of a form.
    ToPair(FormArgs),
    /// Form of a pair given as JSON (argument, file, or stdin).
    ToForm {
        /// Pair JSON; `-` or absent reads stdin, `@path` reads a file.
        #[arg(long)]
        pair: Option<String>,
        /// Use the exterior-product construction instead of normalization.
        #[arg(long)]
        global: bool,
    },
    /// Compose two primitive forms of one discriminant through ideals.
    Compose {
        /// First form `a,b,c`.
        #[arg(short = 'f', allow_hyphen_values = true)]
        first: String,
        /// Second form `a,b,c`.
        #[arg(short = 'g', allow_hyphen_values = true)]
        second: String,
    },
    /// Class group of a negative discriminant.
    Classgroup {
        #[arg(short = 'D', long = "disc", allow_hyphen_values = true)]
        disc: String,
    },
    /// Realize the module of an integral form as an ideal.
    RealizeIdeal {
        #[arg(short = 'f', long = "form", allow_hyphen_values = true)]
        form: String,
    },
    /// Quadratic map values (q(m1), q(m2), q(m1+m2)) of a form, or back.
    #[command(group(ArgGroup::new("input").required(true).args(["form", "map"])))]
    Kneser {
        /// Base ring: `Z` or `zmod:N`.
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(short = 'f', long = "form", allow_hyphen_values = true)]
        form: Option<String>,
        /// Values `q1,q2,q12`.
        #[arg(long, allow_hyphen_values = true)]
        map: Option<String>,
    },
    /// Reduce an integral form and its pair modulo n.
    BaseChange {
        #[arg(short = 'f', long = "form", allow_hyphen_values = true)]
        form: String,
        #[arg(long, value_enum, default_value_t = FlavorArg::Plain)]
        flavor: FlavorArg,
        /// Target ring `zmod:N`.
        #[arg(long)]
        to: String,
    },
    /// Exhaustively check the correspondence over a small ring.
    Verify {
        /// Finite ring `zmod:N`.
        #[arg(long)]
        ring: String,
        #[arg(long, value_enum, default_value_t = FlavorArg::Linear)]
        flavor: FlavorArg,
        /// Largest ring size accepted.
        #[arg(long, default_value_t = VerifierConfig::default().max_cardinality)]
        max_size: u64,
        /// Include the elapsed time in the report.
        #[arg(long)]
        timing: bool,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn domain(kind: &'static str, e: impl std::fmt::Display) -> Failure {
        Failure {
            code: 1,
            kind,
            message: e.to_string(),
        }
    }
}

/// Output of a subcommand: the JSON document and its text rendering.
struct Output {
    json: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Output {
        Output { json, text, code: 0 }
    }
}

fn parse_ring(s: &str) -> Result<Ring, Failure> {
    make_context(s).map_err(|e| Failure::domain("ring", e))
}

fn parse_list(ring: Ring, s: &str, len: usize, what: &str) -> Result<Vec<quadrings::RingElement>, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != len {
        return Err(Failure::domain("parse", format!("{what} needs {len} comma-separated values, got {s:?}")));
    }
    parts
        .iter()
        .map(|p| ring.parse_element(p).map_err(|e| Failure::domain("parse", e)))
        .collect()
}

fn parse_form(ring: Ring, s: &str, flavor: Flavor) -> Result<BQForm, Failure> {
    let c = parse_list(ring, s, 3, "a form")?;
    BQForm::new(c[0].clone(), c[1].clone(), c[2].clone(), flavor).map_err(|e| Failure::domain("form", e))
}

fn form_args(args: &FormArgs) -> Result<BQForm, Failure> {
    parse_form(parse_ring(&args.ring)?, &args.form, args.flavor.into())
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(1));
    }
    v
}

fn read_input(arg: Option<&str>) -> Result<String, Failure> {
    match arg {
        Some(path) if path.starts_with('@') => {
            std::fs::read_to_string(&path[1..]).map_err(|e| Failure::domain("io", e))
        }
        Some(s) if s != "-" => Ok(s.to_string()),
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::domain("io", e))?;
            Ok(buf)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Disc(args) => {
            let f = form_args(args)?;
            let d = f.discriminant();
            Ok(Output::ok(
                json!({"form": f.to_json(), "discriminant": element_to_json(&d)}),
                format!("{d}\n"),
            ))
        }
        Command::Act { form, matrix, mode, unit } => {
            let f = form_args(form)?;
            let ring = f.ring();
            let e = parse_list(ring, matrix, 4, "a matrix")?;
            let m = Mat2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone())
                .map_err(|e| Failure::domain("matrix", e))?;
            let g = Gl2::new(m).map_err(|e| Failure::domain("matrix", e))?;
            let mode = match mode {
                Some(ModeArg::Plain) => Gl2Mode::Plain,
                Some(ModeArg::Twisted) => Gl2Mode::Twisted,
                None if f.flavor == Flavor::Plain => Gl2Mode::Plain,
                None => Gl2Mode::Twisted,
            };
            let mut out = f.apply_gl2(&g, mode).map_err(|e| Failure::domain("form", e))?;
            if let Some(u) = unit {
                let u = ring.parse_element(u).map_err(|e| Failure::domain("parse", e))?;
                out = out.apply_gl1(&u).map_err(|e| Failure::domain("form", e))?;
            }
            Ok(Output::ok(json!({"form": out.to_json()}), format!("{out}\n")))
        }
        Command::Reduce { form } => {
            let f = parse_form(Ring::Integers, form, Flavor::Plain)?;
            let (r, w) = reduce_posdef(&f).map_err(|e| Failure::domain("form", e))?;
            Ok(Output::ok(
                json!({"form": f.to_json(), "reduced": r.to_json(), "witness": w.matrix().to_json()}),
                format!("{r}\nwitness {w}\n"),
            ))
        }
        Command::ToPair(args) => {
            let f = form_args(args)?;
            let p = form_to_pair(&f);
            Ok(Output::ok(p.to_json(), format!("{}\nT = {}\n", p.algebra(), p.t())))
        }
        Command::ToForm { pair, global } => {
            let text = read_input(pair.as_deref())?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::domain("parse", e))?;
            let p = CorrespondencePair::from_json(&v).map_err(|e| Failure::domain("pair", e))?;
            if *global {
                let f = pair_to_form_global(&p).map_err(|e| Failure::domain("pair", e))?;
                return Ok(Output::ok(json!({"form": f.to_json()}), format!("{f}\n")));
            }
            let (f, record) = pair_to_form_normalized(&p).map_err(|e| Failure::domain("pair", e))?;
            Ok(Output::ok(
                json!({
                    "form": f.to_json(),
                    "shift": element_to_json(&record.shift.s),
                    "flipped": record.flipped,
                }),
                format!("{f}\n"),
            ))
        }
        Command::Compose { first, second } => {
            let f = parse_form(Ring::Integers, first, Flavor::Twisted)?;
            let g = parse_form(Ring::Integers, second, Flavor::Twisted)?;
            let h = compose_forms(&f, &g).map_err(|e| Failure::domain("ideal", e))?;
            Ok(Output::ok(json!({"form": h.to_json()}), format!("{h}\n")))
        }
        Command::Classgroup { disc } => {
            let d: BigInt = disc
                .trim()
                .parse()
                .map_err(|_| Failure::domain("parse", format!("bad discriminant {disc:?}")))?;
            let g = class_group(&d).map_err(|e| Failure::domain("ideal", e))?;
            Ok(Output::ok(g.to_json(), g.to_text()))
        }
        Command::RealizeIdeal { form } => {
            let f = parse_form(Ring::Integers, form, Flavor::Twisted)?;
            let r = realize_as_ideal(&form_to_pair(&f)).map_err(|e| Failure::domain("ideal", e))?;
            Ok(Output::ok(
                json!({"ideal": r.ideal.to_json(), "iso": r.iso.to_json()}),
                format!("{}\niso {}\n", r.ideal, r.iso),
            ))
        }
        Command::Kneser { ring, form, map } => {
            let ring = parse_ring(ring)?;
            let (f, qm) = match (form, map) {
                (Some(f), None) => {
                    let f = parse_form(ring, f, Flavor::Plain)?;
                    let qm = form_to_quadratic_map(&f);
                    (f, qm)
                }
                (None, Some(m)) => {
                    let v = parse_list(ring, m, 3, "a quadratic map")?;
                    let qm = QuadraticMap {
                        q1: v[0].clone(),
                        q2: v[1].clone(),
                        q12: v[2].clone(),
                    };
                    (quadratic_map_to_form(&qm, Flavor::Plain), qm)
                }
                _ => unreachable!("clap enforces exactly one input"),
            };
            Ok(Output::ok(
                json!({
                    "form": f.to_json(),
                    "map": {
                        "q1": element_to_json(&qm.q1),
                        "q2": element_to_json(&qm.q2),
                        "q12": element_to_json(&qm.q12),
                    },
                    "primitive": qm.is_primitive(),
                }),
                format!("{f} <-> q(m1) = {}, q(m2) = {}, q(m1 + m2) = {}\n", qm.q1, qm.q2, qm.q12),
            ))
        }
        Command::BaseChange { form, flavor, to } => {
            let f = parse_form(Ring::Integers, form, (*flavor).into())?;
            let target = parse_ring(to)?;
            let fr = f.base_change(target).map_err(|e| Failure::domain("base-change", e))?;
            let pr = form_to_pair(&f).base_change(target).map_err(|e| Failure::domain("base-change", e))?;
            let commutes = pr == form_to_pair(&fr)
                && pair_to_form(&pr).map_err(|e| Failure::domain("pair", e))? == fr;
            let invertible = is_invertible_module(&pr).map_err(|e| Failure::domain("pair", e))?;
            Ok(Output::ok(
                json!({"form": fr.to_json(), "pair": pr.to_json(), "commutes": commutes, "invertible": invertible}),
                format!("{fr}\n{}\nT = {}\ncommutes: {commutes}\n", pr.algebra(), pr.t()),
            ))
        }
        Command::Verify { ring, flavor, max_size, timing } => {
            let ring = parse_ring(ring)?;
            let config = VerifierConfig { max_cardinality: *max_size };
            let report = verify_bijection(ring, (*flavor).into(), config).map_err(|e| Failure::domain("verify", e))?;
            let mut text = report.to_text();
            if *timing {
                text.push_str(&format!("elapsed {:?}\n", report.elapsed));
            }
            Ok(Output {
                json: report.to_json(*timing),
                text,
                code: if report.passed() { 0 } else { 3 },
            })
        }
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    let err = json!({"schema": 1, "error": {"kind": f.kind, "message": f.message}});
    eprintln!("{err}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return report_failure(&Failure {
                code: 2,
                kind: "usage",
                message: e.to_string(),
            })
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return report_failure(&Failure::domain("jobs", e));
        }
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", with_schema(out.json)),
                Format::Text => print!("{}", out.text),
            }
            ExitCode::from(out.code)
        }
        Err(f) => report_failure(&f),
    }
}
