//! Command-line front end: `table`, `poly`, `leading`, `bound`, `verify`,
//! `variety`.
//!
//! [`run`] does all the work in-process and returns the exit code together
//! with what should go to standard output and standard error. Exit codes:
//! 0 success, 1 input or validation error, 2 verification failure or
//! unstable-regime refusal, 3 resource limit.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::counting::{
    eligible_leading_term, hom_count_poly_limited, CountingError, ProfileAnalysis,
    DEFAULT_MAX_TUPLES,
};
use crate::exactpoly::IntPolynomial;
use crate::minimizer::IntTuple;
use crate::oracle::{
    builtin_presentation, hom_count_bruteforce, parse_presentation, OracleCaps, OracleError,
    Presentation, DEFAULT_MAX_GL,
};
use crate::profiles::{splitting_field_check, DegreeProfile, GroupSpec};

#[derive(Debug, Parser)]
#[command(
    name = "homcount",
    version,
    about = "Exact counts of homomorphisms from a finite group into GL_n(q)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal tuples, S_r, m_r and eps_r for every residue, plus b and N
    Table(CommonArgs),
    /// The polynomial f_n(q) = |Hom(A, GL_n(q))|, optionally evaluated
    Poly(CommonArgs),
    /// Leading term m_r * q^(n^2(1 - 1/a) - eps_r) of f_n
    Leading(CommonArgs),
    /// Stability bound b and N = b*a
    Bound(CommonArgs),
    /// Compare f_n(q) with a brute-force count over GL_n(q)
    Verify(CommonArgs),
    /// Dimension and number of top-dimensional components of Hom(A, GL_n)
    Variety(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Group spec, e.g. sym:4, cyclic:3, abelian:2x2, dihedral:5,
    /// custom:order=6,degrees=1,1,2
    #[arg(long)]
    group: String,
    /// Dimension n
    #[arg(short = 'n')]
    n: Option<u64>,
    /// Field size q
    #[arg(short = 'q')]
    q: Option<u64>,
    /// Comma-separated evaluation points for `poly`
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eval: Vec<i64>,
    /// Emit one JSON document instead of text
    #[arg(long)]
    json: bool,
    /// Cap on eligible tuples (orbits) when building f_n
    #[arg(long, default_value_t = DEFAULT_MAX_TUPLES)]
    max_tuples: u128,
    /// Cap on candidate matrices and candidate generator tuples in `verify`
    #[arg(long, default_value_t = DEFAULT_MAX_GL)]
    max_gl: u128,
    /// Presentation for `verify`, e.g. "gens=1; rel=x1^2" (overrides the
    /// built-in one)
    #[arg(long)]
    presentation: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Table,
    Poly,
    Leading,
    Bound,
    Verify,
    Variety,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_tuples: u128,
    pub max_gl: u128,
}

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub group: GroupSpec,
    pub n: Option<u64>,
    pub q: Option<u64>,
    pub output: OutputFormat,
    pub caps: Caps,
    pub eval_points: Vec<i64>,
    pub presentation: Option<Presentation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Refused(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Refused(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Refused(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::ResourceLimit(_) => Failure::Resource(e.to_string()),
            CountingError::UnstableRegime { .. } => Failure::Refused(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::ResourceLimit(_) => Failure::Resource(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Report {
    code: i32,
    text: String,
    json: Value,
    warnings: Vec<String>,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Self {
            code: 0,
            text,
            json,
            warnings: Vec::new(),
        }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    match config_from(cli).and_then(|cfg| execute(&cfg).map(|r| (cfg.output, r))) {
        Ok((format, report)) => {
            let mut stdout = match format {
                OutputFormat::Text => report.text,
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&report.json).expect("serializable")
                }
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            let stderr = report
                .warnings
                .iter()
                .map(|w| format!("warning: {w}\n"))
                .collect();
            Outcome {
                code: report.code,
                stdout,
                stderr,
            }
        }
        Err(f) => Outcome {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        },
    }
}

fn config_from(cli: Cli) -> Result<RunConfig, Failure> {
    let (command, args) = match cli.command {
        Command::Table(a) => (CommandKind::Table, a),
        Command::Poly(a) => (CommandKind::Poly, a),
        Command::Leading(a) => (CommandKind::Leading, a),
        Command::Bound(a) => (CommandKind::Bound, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Variety(a) => (CommandKind::Variety, a),
    };
    let group = GroupSpec::parse(&args.group).map_err(|e| Failure::Input(e.to_string()))?;
    let needs_n = matches!(
        command,
        CommandKind::Poly | CommandKind::Leading | CommandKind::Verify | CommandKind::Variety
    );
    if needs_n && args.n.is_none() {
        return Err(Failure::Input("this command requires -n <int>".into()));
    }
    if command == CommandKind::Verify && args.q.is_none() {
        return Err(Failure::Input("verify requires -q <prime>".into()));
    }
    let presentation = args
        .presentation
        .as_deref()
        .map(parse_presentation)
        .transpose()
        .map_err(|e| Failure::Input(e.to_string()))?;
    Ok(RunConfig {
        command,
        group,
        n: args.n,
        q: args.q,
        output: if args.json {
            OutputFormat::Json
        } else {
            OutputFormat::Text
        },
        caps: Caps {
            max_tuples: args.max_tuples,
            max_gl: args.max_gl,
        },
        eval_points: args.eval,
        presentation,
    })
}

fn execute(cfg: &RunConfig) -> Result<Report, Failure> {
    let profile = cfg
        .group
        .profile()
        .map_err(|e| Failure::Input(e.to_string()))?;
    let n = cfg.n.unwrap_or(0);
    match cfg.command {
        CommandKind::Table => Ok(cmd_table(&cfg.group, &profile)),
        CommandKind::Poly => cmd_poly(&cfg.group, &profile, n, &cfg.eval_points, cfg.caps),
        CommandKind::Leading => Ok(cmd_leading(&cfg.group, &profile, n)),
        CommandKind::Bound => Ok(cmd_bound(&cfg.group, &profile)),
        CommandKind::Variety => cmd_variety(&cfg.group, &profile, n),
        CommandKind::Verify => cmd_verify(cfg, &profile, n, cfg.q.unwrap_or(0)),
    }
}

fn tuple_json(t: &IntTuple) -> Value {
    json!(t.entries())
}

fn header(group: &GroupSpec, profile: &DegreeProfile) -> Value {
    json!({
        "group": group.to_string(),
        "order": profile.order(),
        "degrees": profile.degrees(),
    })
}

fn with_header(group: &GroupSpec, profile: &DegreeProfile, command: &str, body: Value) -> Value {
    let mut doc = json!({ "command": command });
    let map = doc.as_object_mut().expect("object");
    for src in [header(group, profile), body] {
        if let Value::Object(m) = src {
            map.extend(m);
        }
    }
    doc
}

fn cmd_table(group: &GroupSpec, profile: &DegreeProfile) -> Report {
    let analysis = ProfileAnalysis::new(profile);
    let a = profile.order();
    let bound = analysis.bound();

    let rows: Vec<[String; 5]> = analysis
        .table()
        .iter()
        .map(|rep| {
            [
                rep.r.to_string(),
                rep.m_r().to_string(),
                rep.tuples[0].to_string(),
                rep.s_r.to_string(),
                rep.eps_r.to_string(),
            ]
        })
        .collect();
    let titles = ["r", "m_r", "sample tuple", "S_r", "eps_r"];
    let widths: Vec<usize> = (0..5)
        .map(|c| {
            rows.iter()
                .map(|row| row[c].len())
                .chain([titles[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: [&str; 5]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        parts.join("  ").trim_end().to_string()
    };

    let mut text = String::new();
    writeln!(
        text,
        "group {}: a={}, degrees {:?}",
        group,
        a,
        profile.degrees()
    )
    .unwrap();
    writeln!(text, "{}", line(titles)).unwrap();
    for row in &rows {
        writeln!(
            text,
            "{}",
            line([&row[0], &row[1], &row[2], &row[3], &row[4]])
        )
        .unwrap();
    }
    writeln!(text, "b = {}", bound.b).unwrap();
    writeln!(text, "N = {}", bound.n_threshold).unwrap();

    let json_rows: Vec<Value> = analysis
        .table()
        .iter()
        .map(|rep| {
            json!({
                "r": rep.r,
                "m_r": rep.m_r(),
                "sample_tuple": tuple_json(&rep.tuples[0]),
                "s_r": rep.s_r,
                "eps_r": rep.eps_r.to_string(),
                "tuples": rep.tuples.iter().map(tuple_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = with_header(
        group,
        profile,
        "table",
        json!({ "rows": json_rows, "b": bound.b, "n_threshold": bound.n_threshold }),
    );
    Report::ok(text, doc)
}

fn cmd_poly(
    group: &GroupSpec,
    profile: &DegreeProfile,
    n: u64,
    eval_points: &[i64],
    caps: Caps,
) -> Result<Report, Failure> {
    let f = hom_count_poly_limited(profile, n, caps.max_tuples)?;
    let mut text = format!("{f}\n");
    let mut evals = Vec::new();
    for &x in eval_points {
        let value = f.eval_at(&BigInt::from(x));
        let check = (x >= 2).then(|| splitting_field_check(group, x as u64));
        let splits = check.as_ref().is_some_and(|c| c.splits);
        if splits {
            writeln!(text, "f({x}) = {value} = |Hom(A, GL_{n}({x}))|").unwrap();
        } else {
            let why = check.map_or_else(|| "not a field size".to_string(), |c| c.reason);
            writeln!(
                text,
                "f({x}) = {value} (F_{x} not a splitting field: {why})"
            )
            .unwrap();
        }
        evals.push(json!({
            "q": x.to_string(),
            "value": value.to_string(),
            "splitting_field": splits,
        }));
    }
    let doc = with_header(
        group,
        profile,
        "poly",
        json!({
            "n": n,
            "degree": f.degree(),
            "polynomial": f.to_json(),
            "text": f.to_string(),
            "evaluations": evals,
        }),
    );
    Ok(Report::ok(text, doc))
}

fn cmd_leading(group: &GroupSpec, profile: &DegreeProfile, n: u64) -> Report {
    let analysis = ProfileAnalysis::new(profile);
    let lt = analysis.leading_term(n);
    let term = format!("{} * q^{}", lt.coefficient, lt.exponent);
    let mut text = String::new();
    let mut warnings = Vec::new();
    let mut actual_json = Value::Null;
    if lt.stable {
        writeln!(text, "{term} (stable)").unwrap();
    } else {
        writeln!(text, "{term} (unstable: n < N = {})", lt.threshold).unwrap();
        warnings.push(format!(
            "n = {n} is below the stability threshold N = {}; the formula value may differ \
             from the leading term of f_n",
            lt.threshold
        ));
        let actual = eligible_leading_term(profile, n);
        writeln!(
            text,
            "actual leading term of f_n: {} * q^{}",
            actual.coefficient, actual.exponent
        )
        .unwrap();
        actual_json = json!({
            "coefficient": actual.coefficient,
            "exponent": actual.exponent as u64,
        });
    }
    writeln!(
        text,
        "n = {}, r = {}, m_r = {}, S_r = {}, eps_r = {}, N = {}",
        lt.n, lt.r, lt.coefficient, lt.s_r, lt.eps_r, lt.threshold
    )
    .unwrap();
    let doc = with_header(
        group,
        profile,
        "leading",
        json!({
            "n": lt.n,
            "r": lt.r,
            "coefficient": lt.coefficient,
            "exponent": lt.exponent as u64,
            "s_r": lt.s_r,
            "eps_r": lt.eps_r.to_string(),
            "stable": lt.stable,
            "n_threshold": lt.threshold,
            "actual": actual_json,
        }),
    );
    Report {
        code: 0,
        text,
        json: doc,
        warnings,
    }
}

fn cmd_bound(group: &GroupSpec, profile: &DegreeProfile) -> Report {
    let bound = ProfileAnalysis::new(profile).bound();
    let a = profile.order() as u128;
    let ceiling = a * (a - 1);
    let text = format!(
        "b={}, N={} (<= a(a-1)={ceiling})\n",
        bound.b, bound.n_threshold
    );
    let doc = with_header(
        group,
        profile,
        "bound",
        json!({ "b": bound.b, "n_threshold": bound.n_threshold, "ceiling": ceiling as u64 }),
    );
    Report::ok(text, doc)
}

fn cmd_variety(group: &GroupSpec, profile: &DegreeProfile, n: u64) -> Result<Report, Failure> {
    let v = ProfileAnalysis::new(profile).variety_report(n)?;
    let text = format!(
        "dimension={}, top_components={}\n",
        v.dimension, v.top_components
    );
    let doc = with_header(
        group,
        profile,
        "variety",
        json!({
            "n": n,
            "dimension": v.dimension as u64,
            "top_components": v.top_components,
        }),
    );
    Ok(Report::ok(text, doc))
}

fn cmd_verify(cfg: &RunConfig, profile: &DegreeProfile, n: u64, q: u64) -> Result<Report, Failure> {
    let group = &cfg.group;
    let presentation = match &cfg.presentation {
        Some(p) => p.clone(),
        None => builtin_presentation(group).ok_or_else(|| {
            Failure::Input(format!(
                "no built-in presentation for {group}; pass --presentation"
            ))
        })?,
    };
    let check = splitting_field_check(group, q);
    if !check.splits {
        return Err(Failure::Input(format!(
            "F_{q} is not a splitting field for {group}: {}",
            check.reason
        )));
    }
    let f = hom_count_poly_limited(profile, n, cfg.caps.max_tuples)?;
    let poly_value = f.eval_at(&BigInt::from(q));
    let brute = hom_count_bruteforce(
        &presentation,
        n as usize,
        q,
        OracleCaps {
            max_gl: cfg.caps.max_gl,
        },
    )?;
    let pass = poly_value == BigInt::from(brute);
    let verdict = if pass { "PASS" } else { "FAIL" };
    let text = format!(
        "group {group}, n={n}, q={q}\npresentation: {presentation}\npolynomial: {poly_value}\n\
         brute force: {brute}\n{verdict}\n"
    );
    let doc = with_header(
        group,
        profile,
        "verify",
        json!({
            "n": n,
            "q": q,
            "presentation": presentation.to_string(),
            "polynomial_value": poly_value.to_string(),
            "bruteforce_value": brute.to_string(),
            "pass": pass,
        }),
    );
    Ok(Report {
        code: if pass { 0 } else { 2 },
        text,
        json: doc,
        warnings: Vec::new(),
    })
}

/// Polynomial from a `poly --json` document.
pub fn polynomial_from_json(doc: &Value) -> Option<IntPolynomial> {
    IntPolynomial::from_json(doc.get("polynomial")?)
}
