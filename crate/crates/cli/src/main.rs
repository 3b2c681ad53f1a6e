use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use triplekit_core::analysis::{invariants, triple_isomorphic, SpectralMode, DEFAULT_FLOAT_TOL};
use triplekit_core::classification::Decision;
use triplekit_core::geometry::{center_of_transvection_group, metric_at};
use triplekit_core::json::{document_from_json, document_to_json, matrix_to_strings};
use triplekit_core::linalg::{fmt_rational, parse_list, Vector};
use triplekit_core::normal_forms::{sample_params, Family, FamilyParams};
use triplekit_core::oracle::{enumerate_max_center, GridSpec, Tensor};
use triplekit_core::triple::SymmetricTriple;
use triplekit_core::TripleError;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "triplekit", version, about = "Solvable pseudo-Riemannian symmetric triples in exact arithmetic")]
struct Cli {
    /// Exact rational spectral computations (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating-point spectral path with tolerance (default from TRIPLEKIT_FLOAT_TOL, else 1e-9).
    #[arg(long, global = true, value_name = "TOL", num_args = 0..=1, default_missing_value = "env")]
    float: Option<String>,
    /// Write the result to a file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms of a triple; `-` or no file reads stdin.
    Verify { file: Option<PathBuf> },
    /// Iterated adapted decomposition of m.
    Decompose { file: Option<PathBuf> },
    /// Signature, center, decomposition dims, decomposability and F_ij spectra.
    Invariants { file: Option<PathBuf> },
    /// Build a normal form.
    NormalForm(NormalFormArgs),
    /// Decide isomorphism: exit 0 isomorphic, 1 not isomorphic, 2 unknown.
    Isomorphic { a: PathBuf, b: PathBuf },
    /// Nonzero entries of the Ricci form on m.
    Ricci { file: Option<PathBuf> },
    /// Gram matrix of the Lorentzian metric at a point (w.., z, z*).
    MetricEval {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Center of the transvection group of the Lorentzian space with parameter f.
    Center {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Grid census of maximal-center coefficient sets.
    Enumerate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Comma separated subset of a,b,f.
        #[arg(long, default_value = "b")]
        tensors: String,
    },
}

#[derive(Args, Debug)]
struct NormalFormArgs {
    /// lorentz, least-nilpotent, ia, ib, iia, iib, nil22, nil23, nil24, iii, iv
    family: String,
    /// Parameters as a JSON object, or a path to a file holding one.
    #[arg(long)]
    params: Option<String>,
    /// Shorthand for the `f` parameter list.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
}

impl From<TripleError> for Failure {
    fn from(e: TripleError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

struct Ctx {
    mode: SpectralMode,
    output: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: &str) -> Res<()> {
        let mut s = text.to_string();
        if !s.ends_with('\n') {
            s.push('\n');
        }
        match &self.output {
            Some(p) => std::fs::write(p, s).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                // a closed pipe is not an error for us
                let _ = out.write_all(s.as_bytes());
                Ok(())
            }
        }
    }

    fn emit_json(&self, v: &Value) -> Res<()> {
        self.emit(&serde_json::to_string_pretty(v).expect("serializable"))
    }
}

fn read_input(file: Option<&PathBuf>) -> Res<(String, String)> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            let s = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok((s, p.display().to_string()))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok((s, "<stdin>".into()))
        }
    }
}

fn load(file: Option<&PathBuf>) -> Res<(SymmetricTriple, Option<FamilyParams>)> {
    let (s, name) = read_input(file)?;
    document_from_json(&s).map_err(|e| Failure::Input(format!("{name}: {e}")))
}

fn list(name: &str, s: &str) -> Res<Vector> {
    parse_list(s).map_err(|e| Failure::Input(format!("--{name}: {e}")))
}

fn spectral_mode(exact: bool, float: Option<&str>) -> Res<SpectralMode> {
    let Some(v) = float else { return Ok(SpectralMode::Exact) };
    debug_assert!(!exact);
    let raw = if v == "env" { std::env::var("TRIPLEKIT_FLOAT_TOL").ok() } else { Some(v.to_string()) };
    let tol = match raw {
        None => DEFAULT_FLOAT_TOL,
        Some(r) => r.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad tolerance {r:?}")))?,
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(SpectralMode::Float(tol))
}

fn normal_form(ctx: &Ctx, a: &NormalFormArgs) -> Res<u8> {
    let fam = Family::parse(&a.family)?;
    let mut params: Value = match &a.params {
        None => {
            if a.f.is_none() {
                sample_params(fam).to_json()
            } else {
                json!({})
            }
        }
        Some(s) => {
            let text = if s.trim_start().starts_with('{') { s.clone() } else { std::fs::read_to_string(s)? };
            serde_json::from_str(&text).map_err(|e| {
                Failure::Input(format!("--params: {e}"))
            })?
        }
    };
    if let Some(f) = &a.f {
        let v = list("f", f)?;
        params["f"] = Value::Array(v.iter().map(|x| Value::String(fmt_rational(x))).collect());
    }
    let p = FamilyParams::from_json(fam, &params)?;
    let t = p.build()?;
    ctx.emit(&document_to_json(&t, Some(&p)))?;
    Ok(0)
}

fn isomorphic(ctx: &Ctx, a: &PathBuf, b: &PathBuf) -> Res<u8> {
    let (t1, p1) = load(Some(a))?;
    let (t2, p2) = load(Some(b))?;
    let d = triple_isomorphic(&t1, p1.as_ref(), &t2, p2.as_ref(), ctx.mode)?;
    match &d {
        Decision::Isomorphic { .. } => {
            ctx.emit_json(&serde_json::to_value(&d).expect("serializable"))?;
            Ok(0)
        }
        Decision::NotIsomorphic { reason } => {
            ctx.emit(&format!("not isomorphic: {reason}"))?;
            Ok(EXIT_NEGATIVE)
        }
        Decision::Unknown { reason } => {
            ctx.emit(&format!("unknown: {reason}"))?;
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn ricci(ctx: &Ctx, file: Option<&PathBuf>) -> Res<u8> {
    let (t, _) = load(file)?;
    let g = t.ricci().gram().clone();
    let labels = t.m_labels();
    let mut lines = Vec::new();
    for i in 0..labels.len() {
        for j in i..labels.len() {
            if !num_traits::Zero::is_zero(&g[(i, j)]) {
                lines.push(format!("Ric({},{}) = {}", labels[i], labels[j], fmt_rational(&g[(i, j)])));
            }
        }
    }
    if lines.is_empty() {
        lines.push("Ric = 0".into());
    }
    ctx.emit(&lines.join("\n"))?;
    Ok(0)
}

fn tensors(s: &str) -> Res<Vec<Tensor>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| match x.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Tensor::A),
            "b" => Ok(Tensor::B),
            "f" => Ok(Tensor::F),
            o => Err(Failure::Input(format!("--tensors: unknown tensor {o:?}"))),
        })
        .collect()
}

fn dispatch(cli: &Cli) -> Res<u8> {
    let ctx = Ctx { mode: spectral_mode(cli.exact, cli.float.as_deref())?, output: cli.output.clone() };
    match &cli.command {
        Command::Verify { file } => {
            let (t, _) = load(file.as_ref())?;
            let rep = t.verify();
            ctx.emit_json(&serde_json::to_value(&rep).expect("serializable"))?;
            Ok(if rep.all_pass() { 0 } else { EXIT_NEGATIVE })
        }
        Command::Decompose { file } => {
            let (t, _) = load(file.as_ref())?;
            let it = triplekit_core::witt::iterate_decompose(&t)?;
            let mut v = serde_json::to_value(&it).expect("serializable");
            v["m_labels"] = json!(t.m_labels());
            ctx.emit_json(&v)?;
            Ok(0)
        }
        Command::Invariants { file } => {
            let (t, _) = load(file.as_ref())?;
            ctx.emit_json(&serde_json::to_value(invariants(&t, ctx.mode)?).expect("serializable"))?;
            Ok(0)
        }
        Command::NormalForm(a) => normal_form(&ctx, a),
        Command::Isomorphic { a, b } => isomorphic(&ctx, a, b),
        Command::Ricci { file } => ricci(&ctx, file.as_ref()),
        Command::MetricEval { f, point } => {
            let g = metric_at(&list("point", point)?, &list("f", f)?)?;
            ctx.emit_json(&json!(matrix_to_strings(g.gram())))?;
            Ok(0)
        }
        Command::Center { f } => {
            let c = center_of_transvection_group(&list("f", f)?)?;
            ctx.emit_json(&serde_json::to_value(c).expect("serializable"))?;
            Ok(0)
        }
        Command::Enumerate { p, q, values, tensors: ts } => {
            let spec = GridSpec { p: *p, q: *q, value_set: list("values", values)?, which_tensors: tensors(ts)? };
            let census = enumerate_max_center(&spec)?;
            ctx.emit_json(&serde_json::to_value(census).expect("serializable"))?;
            Ok(0)
        }
    }
}

/// `--float` without a numeric value becomes `--float=env`, so a following verb
/// is not taken as the tolerance.
fn normalize_float_flag(argv: Vec<OsString>) -> Vec<OsString> {
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter().peekable();
    while let Some(a) = it.next() {
        if a == "--float" {
            let numeric = it.peek().and_then(|n| n.to_str()).is_some_and(|n| n.parse::<f64>().is_ok());
            if !numeric {
                out.push(OsString::from("--float=env"));
                continue;
            }
        }
        out.push(a);
    }
    out
}

fn run<I: IntoIterator<Item = OsString>>(argv: I) -> u8 {
    let cli = match Cli::try_parse_from(normalize_float_flag(argv.into_iter().collect())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            EXIT_INPUT
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
