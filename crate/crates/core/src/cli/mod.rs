//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails (a failed
//! identity, a non-flat connection), 2 on usage or parse errors.

pub mod checks;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::Value;

use crate::axschanuel::{self, AxsError};
use crate::bounds::{self, BoundReport, BoundsError, FamilyParams, TwistVariant};
use crate::filtered::WeightConvention;
use crate::liedims::{self, CurveType, LieDimsError};
use crate::padic::{self, OneForm, PadicError, PadicScalar, RationalRing, TruncSeries};
use crate::transport::{self, ConnectionForm, TransportError};

pub use output::{render, OutputFormat, Record, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "chabauty", version, about = "Bounds, graded dimensions, transport and first-integral computations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Decimal digits for enclosures.
    #[arg(long, global = true, default_value_t = 50)]
    pub digits: u32,
    /// Truncation order for power series.
    #[arg(long, global = true, default_value_t = 16)]
    pub cap: u32,
    #[arg(long, global = true, default_value_t = 5)]
    pub p: u64,
    /// p-adic precision.
    #[arg(long = "N", id = "precision", global = true, default_value_t = 8)]
    pub n: u32,
    #[arg(long, global = true, default_value = "weighted")]
    pub convention: String,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Statement,
    Expanded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryArg {
    Transport,
    Flatness,
    Evaluate,
    Betti,
    Coleman,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graded dimensions e_n, envelopes and conjugation characters.
    Dims {
        /// `p1` or `genus:g`.
        curve: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Report the minimal depth for this rank instead of the table.
        #[arg(long)]
        rank: Option<u64>,
    },
    /// Bound rows for one result.
    Bounds {
        /// thm1-smooth, thm1-stable, mg, stoll-zp, padic-zp, sunit, twist, bad-reduction, gonality, classical
        theorem: String,
        #[arg(long)]
        g: Option<i64>,
        #[arg(long)]
        s: Option<i64>,
        #[arg(long)]
        r: Option<i64>,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        dim_v: Option<i64>,
        #[arg(long)]
        gamma: Option<i64>,
        /// Product of the local constants c_v, as `a` or `a/b`.
        #[arg(long, default_value = "1")]
        cv: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Statement)]
        variant: VariantArg,
    },
    /// Run every identity and oracle sweep.
    PaperCheck {
        #[arg(long, hide = true)]
        tamper_mg: bool,
    },
    /// Parallel transport, flatness, evaluation and disk integrals.
    Transport {
        input: Option<PathBuf>,
        /// betti-square, flat-pair, non-flat, two-step, log
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, value_enum)]
        query: Option<QueryArg>,
        /// Start point, comma-separated integers.
        #[arg(long)]
        x1: Option<String>,
        /// End point, comma-separated integers.
        #[arg(long)]
        x2: Option<String>,
    },
    /// Rank, kernel and first integrals of a form restricted to a chart.
    Axs {
        input: Option<PathBuf>,
        /// parabola, disk, constant, full-rank
        #[arg(long)]
        demo: Option<String>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
}

/// A failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    /// Rows printed before failing, e.g. a residual report.
    pub records: Vec<Record>,
}

impl CliError {
    fn usage(m: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: m.into(),
            records: Vec::new(),
        }
    }

    fn math(m: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: m.into(),
            records: Vec::new(),
        }
    }
}

impl From<LieDimsError> for CliError {
    fn from(e: LieDimsError) -> Self {
        match e {
            LieDimsError::Consistency(_) => CliError::math(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Consistency(_) => CliError::math(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        match e {
            PadicError::Parse(_) | PadicError::Shape(_) | PadicError::Domain(_) => CliError::usage(e.to_string()),
            _ => CliError::math(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Padic(p) => p.into(),
            TransportError::Shape(_) | TransportError::Domain(_) => CliError::usage(e.to_string()),
            _ => CliError::math(e.to_string()),
        }
    }
}

impl From<AxsError> for CliError {
    fn from(e: AxsError) -> Self {
        match e {
            AxsError::Series(p) => p.into(),
            AxsError::Transport(t) => t.into(),
            AxsError::DegenerateChart(_) => CliError::math(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

type CliResult = std::result::Result<Vec<Record>, CliError>;

fn config_of(g: &GlobalOpts) -> RunConfig {
    RunConfig {
        digits: g.digits,
        cap: g.cap,
        p: g.p,
        n: g.n,
        convention: g.convention.clone(),
        seed: g.seed,
    }
}

/// Parse `args` (including the program name), run, and write to `out`/`err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let cfg = config_of(&cli.global);
    if let Err(e) = cfg.convention.parse::<WeightConvention>() {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    if !crate::exactnum::is_prime(cfg.p) || cfg.n == 0 {
        let _ = writeln!(err, "error: --p must be prime and --N positive");
        return 2;
    }
    let result = match &cli.command {
        Command::Dims { curve, depth, rank } => cmd_dims(curve, *depth, *rank, &cfg),
        Command::Bounds { .. } => cmd_bounds(&cli.command, &cfg),
        Command::PaperCheck { tamper_mg } => cmd_paper_check(*tamper_mg, &cfg, err),
        Command::Transport {
            input,
            demo,
            query,
            x1,
            x2,
        } => cmd_transport(input.as_ref(), demo.as_deref(), *query, x1.as_deref(), x2.as_deref(), &cfg),
        Command::Axs { input, demo, max_iter } => cmd_axs(input.as_ref(), demo.as_deref(), *max_iter, &cfg),
    };
    match result {
        Ok(records) => {
            let _ = write!(out, "{}", render(&records, cli.global.format, &cfg));
            0
        }
        Err(e) => {
            if !e.records.is_empty() {
                let _ = write!(out, "{}", render(&e.records, cli.global.format, &cfg));
            }
            let _ = writeln!(err, "error: {}", e.message);
            if e.code == 2 {
                let _ = writeln!(err, "usage: chabauty <dims|bounds|paper-check|transport|axs> [options]; see --help");
            }
            e.code
        }
    }
}

fn cmd_dims(curve: &str, depth: usize, rank: Option<u64>, cfg: &RunConfig) -> CliResult {
    let curve: CurveType = curve.parse()?;
    curve.validate()?;
    let anchor = match curve {
        CurveType::PuncturedLine => "Witt formula",
        CurveType::ProjectiveGenus(_) => "Labute product",
    };
    if let Some(r) = rank {
        let m = liedims::min_depth(curve, r, cfg.digits)?;
        return Ok(vec![Record::new()
            .with("curve", curve.label())
            .with("rank", r)
            .with("exact_min", m.exact_min)
            .with("paper_bound", m.paper_bound)
            .with("threshold", &m.threshold)
            .with("anchor", "defect depth")]);
    }
    let dims = liedims::graded_dims(curve, depth)?;
    let chi = match curve {
        CurveType::ProjectiveGenus(g) => Some(liedims::filip_chi(g, depth)?),
        CurveType::PuncturedLine => None,
    };
    let mut rows = Vec::new();
    for n in 1..=depth {
        let mut rec = Record::new().with("n", n).with("e", dims.get(n));
        let env = match curve {
            CurveType::ProjectiveGenus(_) if n < 2 => None,
            _ => Some(liedims::dim_envelope(curve, n, cfg.digits)?),
        };
        match env {
            Some((lo, hi)) => rec = rec.with("envelope_lower", lo).with("envelope_upper", hi),
            None => rec = rec.with("envelope_lower", "").with("envelope_upper", ""),
        }
        if let Some(ch) = &chi {
            rec = rec.with("chi_c", &ch.chi_c[n - 1]).with("dim_V_c", &ch.v_fixed[n - 1]);
        }
        rows.push(rec.with("anchor", anchor));
    }
    Ok(rows)
}

fn report_record(r: &BoundReport) -> Record {
    Record::new()
        .with("name", &r.name)
        .with("anchor", &r.anchor)
        .with("threshold", &r.threshold)
        .with("min_n", &r.min_n)
        .with("valid", r.valid)
        .with("notes", &r.notes)
}

fn invalid_row(name: &str, anchor: &str, message: String) -> Record {
    Record::new()
        .with("name", name)
        .with("anchor", anchor)
        .with("threshold", "")
        .with("min_n", "")
        .with("valid", false)
        .with("notes", message)
}

/// Rows for a rational formula; outside its window the row is kept with `valid = false`.
fn windowed(name: &str, anchor: &str, r: bounds::Result<BoundReport>) -> CliResult {
    match r {
        Ok(rep) => Ok(vec![report_record(&rep)]),
        Err(BoundsError::Validity(m)) => Ok(vec![invalid_row(name, anchor, m)]),
        Err(e) => Err(e.into()),
    }
}

fn need(v: Option<i64>, name: &str) -> std::result::Result<i64, CliError> {
    v.ok_or_else(|| CliError::usage(format!("missing --{name}")))
}

fn cmd_bounds(cmd: &Command, cfg: &RunConfig) -> CliResult {
    let Command::Bounds {
        theorem,
        g,
        s,
        r,
        d,
        n,
        dim_v,
        gamma,
        cv,
        variant,
    } = cmd
    else {
        unreachable!()
    };
    let (g, s, r, d) = (*g, *s, *r, *d);
    match theorem.as_str() {
        "thm1-smooth" => {
            let p = FamilyParams::new(need(g, "g")?, s.unwrap_or(0), need(r, "r")?, d.unwrap_or(0));
            windowed("thm1_smooth", "smooth family", bounds::thm1_smooth(&p))
        }
        "thm1-stable" => {
            let p = FamilyParams::new(need(g, "g")?, s.unwrap_or(0), need(r, "r")?, d.unwrap_or(0));
            windowed("thm1_stable", "stable family", bounds::thm1_stable(&p))
        }
        "mg" => windowed("mg_bound", "moduli of curves", bounds::mg_bound(need(g, "g")?, need(r, "r")?)),
        "stoll-zp" => windowed(
            "stoll_zp",
            "Zilber-Pink comparison",
            bounds::stoll_zp(need(g, "g")?, s.unwrap_or(0), need(r, "r")?),
        ),
        "padic-zp" => {
            let (g, n, r, dv) = (need(g, "g")?, need(*n, "n")?, need(r, "r")?, need(*dim_v, "dim-v")?);
            let holds = bounds::padic_zp_check(g, n, r, dv)?;
            Ok(vec![Record::new()
                .with("name", "padic_zp")
                .with("anchor", "p-adic Zilber-Pink")
                .with("g", g)
                .with("n", n)
                .with("r", r)
                .with("dim_v", dv)
                .with("holds", holds)])
        }
        "sunit" => Ok(vec![report_record(&bounds::sunit_bound(need(s, "s")?, cfg.digits)?)]),
        "twist" => {
            let cv: BigRational = padic::parse_rational(cv)?;
            let variant = match variant {
                VariantArg::Statement => TwistVariant::Statement,
                VariantArg::Expanded => TwistVariant::Expanded,
            };
            let rep = bounds::twist_bound(need(g, "g")?, need(r, "r")?, &cv, variant, cfg.digits)?;
            Ok(vec![report_record(&rep)])
        }
        "bad-reduction" => {
            let (g, r) = (need(g, "g")?, need(r, "r")?);
            match bounds::bad_reduction_rows(g, s.unwrap_or(0), r, d.unwrap_or(0)) {
                Ok(rows) => Ok(rows.iter().map(report_record).collect()),
                Err(BoundsError::Validity(m)) => Ok(vec![invalid_row("bad_reduction", "stable graph assembly", m)]),
                Err(e) => Err(e.into()),
            }
        }
        "gonality" => {
            let (g, r, d, gamma) = (need(g, "g")?, need(r, "r")?, d.unwrap_or(0), need(*gamma, "gamma")?);
            match bounds::gonality_check(g, r, d, gamma) {
                Ok((holds, bound)) => Ok(vec![Record::new()
                    .with("name", "gonality")
                    .with("anchor", "low gonality")
                    .with("threshold", bound)
                    .with("gamma", gamma)
                    .with("valid", true)
                    .with("holds", holds)]),
                Err(BoundsError::Validity(m)) => Ok(vec![invalid_row("gonality", "low gonality", m)]),
                Err(e) => Err(e.into()),
            }
        }
        "classical" => {
            let rows = bounds::classical_rows(s.unwrap_or(6), r, g, cfg.digits)?;
            Ok(rows.iter().map(report_record).collect())
        }
        other => Err(CliError::usage(format!("unknown theorem id `{other}`"))),
    }
}

fn cmd_paper_check(tamper_mg: bool, cfg: &RunConfig, err: &mut dyn Write) -> CliResult {
    let tamper = checks::Tamper {
        mg_offset: i64::from(tamper_mg),
    };
    let results = checks::run_all(cfg, tamper);
    let records: Vec<Record> = results.iter().map(|r| r.record()).collect();
    for r in &results {
        match r.status {
            checks::Status::Skip => {
                let _ = writeln!(err, "warning: {} skipped: {}", r.name, r.detail);
            }
            checks::Status::KnownDeviation => {
                let _ = writeln!(err, "note: {}: {}", r.name, r.detail);
            }
            _ => {}
        }
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| r.status == checks::Status::Fail)
        .map(|r| r.anchor)
        .collect();
    if failed.is_empty() {
        Ok(records)
    } else {
        Err(CliError {
            code: 1,
            message: format!("failed: {}", failed.join(", ")),
            records,
        })
    }
}

fn read_json(path: &PathBuf) -> std::result::Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn parse_point(v: &Value, cfg: &RunConfig) -> std::result::Result<Vec<PadicScalar>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| CliError::usage("points must be arrays of coordinates"))?;
    Ok(arr
        .iter()
        .map(|x| padic::parse_scalar(x, cfg.p, cfg.n))
        .collect::<std::result::Result<Vec<_>, _>>()?)
}

fn point_arg(s: &str, cfg: &RunConfig) -> std::result::Result<Vec<PadicScalar>, CliError> {
    let vals: Vec<Value> = s
        .split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::String(x.to_string()))
        })
        .collect();
    parse_point(&Value::Array(vals), cfg)
}

fn parse_form(v: &Value, cap: u32) -> std::result::Result<OneForm<RationalRing>, CliError> {
    let vars: Vec<String> = v["vars"]
        .as_array()
        .ok_or_else(|| CliError::usage("form needs `vars`"))?
        .iter()
        .map(|x| x.as_str().map(String::from).ok_or_else(|| CliError::usage("variable names must be strings")))
        .collect::<std::result::Result<_, _>>()?;
    let cap = v["cap"].as_u64().map_or(cap, |c| c as u32);
    let dt = v["dt"]
        .as_array()
        .ok_or_else(|| CliError::usage("form needs `dt`"))?
        .iter()
        .map(|e| transport::parse_entry(e, &vars, cap))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let dlog = match v.get("dlog") {
        Some(Value::Array(a)) => Some(
            a.iter()
                .map(|x| match x {
                    Value::String(s) => padic::parse_rational(s),
                    other => padic::parse_rational(&other.to_string()),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?,
        ),
        _ => None,
    };
    Ok(OneForm::new(dt, dlog)?)
}

fn series_rows(h: &transport::SeriesMatrix) -> Vec<Record> {
    let mut rows = Vec::new();
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            rows.push(
                Record::new()
                    .with("i", i)
                    .with("j", j)
                    .with("entry", h.get(i, j).to_poly_string())
                    .with("anchor", "horizontal section"),
            );
        }
    }
    rows
}

fn flatness_rows(conn: &ConnectionForm) -> std::result::Result<(bool, Vec<Record>), CliError> {
    let rep = transport::flatness_check(conn)?;
    let mut rows: Vec<Record> = rep
        .residuals
        .iter()
        .map(|(k, l, d)| {
            Record::new()
                .with("k", k)
                .with("l", l)
                .with("residual_degree", d)
                .with("anchor", "flatness")
        })
        .collect();
    for p in &rep.residue_problems {
        rows.push(Record::new().with("problem", p).with("anchor", "flatness"));
    }
    rows.push(
        Record::new()
            .with("flat", rep.flat)
            .with(
                "max_residual_degree",
                rep.max_residual_degree.map_or("none".to_string(), |d| d.to_string()),
            )
            .with("anchor", "flatness"),
    );
    Ok((rep.flat, rows))
}

fn geometric_form(cap: u32) -> OneForm<RationalRing> {
    let text: Vec<String> = (0..=cap).map(|k| format!("{}*t^{k}", if k % 2 == 0 { 1 } else { -1 })).collect();
    let s = padic::parse_poly(RationalRing, &["t".to_string()], cap, &text.join(" + ")).expect("valid");
    OneForm::new(vec![s], None).expect("valid")
}

enum TransportInput {
    Connection(ConnectionForm),
    Forms(Vec<OneForm<RationalRing>>),
}

fn cmd_transport(
    input: Option<&PathBuf>,
    demo: Option<&str>,
    query: Option<QueryArg>,
    x1: Option<&str>,
    x2: Option<&str>,
    cfg: &RunConfig,
) -> CliResult {
    let cap = cfg.cap;
    let (data, default_query, mut p1, mut p2) = match (input, demo) {
        (Some(_), Some(_)) => return Err(CliError::usage("give an input file or --demo, not both")),
        (None, None) => return Err(CliError::usage("give an input file or --demo")),
        (None, Some(name)) => {
            let origin = transport::padic_point(&[0], cfg.p, cfg.n)?;
            let at_p = transport::padic_point(&[cfg.p as i64], cfg.p, cfg.n)?;
            match name {
                "betti-square" => (TransportInput::Connection(transport::demo_family(cap)), QueryArg::Betti, None, None),
                "flat-pair" => (TransportInput::Connection(transport::demo_family(cap)), QueryArg::Transport, None, None),
                "non-flat" => {
                    let vars = vec!["x".to_string(), "s".to_string()];
                    let a = transport::SeriesMatrix::from_json(&serde_json::json!([["0", "0"], ["1 + s", "0"]]), &vars, cap)?;
                    let b = transport::SeriesMatrix::from_json(&serde_json::json!([["0", "0"], ["x^2", "0"]]), &vars, cap)?;
                    (
                        TransportInput::Connection(ConnectionForm::new(vec![a, b], Vec::new())?),
                        QueryArg::Transport,
                        None,
                        None,
                    )
                }
                "two-step" => {
                    let t = vec!["t".to_string()];
                    let one = TruncSeries::constant(RationalRing, t, cap, BigRational::from_integer(1.into()));
                    let conn = ConnectionForm::two_step(&OneForm::new(vec![one], None)?)?;
                    (TransportInput::Connection(conn), QueryArg::Evaluate, Some(origin), Some(at_p))
                }
                "log" => (
                    TransportInput::Forms(vec![geometric_form(cap.min(16))]),
                    QueryArg::Coleman,
                    Some(origin),
                    Some(at_p),
                ),
                other => return Err(CliError::usage(format!("unknown demo `{other}`"))),
            }
        }
        (Some(path), None) => {
            let v = read_json(path)?;
            let q = match v.get("query").and_then(|q| q.as_str()) {
                None => None,
                Some(s) => Some(
                    QueryArg::from_str(s, true).map_err(|_| CliError::usage(format!("unknown query `{s}`")))?,
                ),
            };
            let p1 = v.get("x1").map(|x| parse_point(x, cfg)).transpose()?;
            let p2 = v.get("x2").map(|x| parse_point(x, cfg)).transpose()?;
            if let Some(forms) = v.get("forms") {
                let forms = forms
                    .as_array()
                    .ok_or_else(|| CliError::usage("`forms` must be an array"))?
                    .iter()
                    .map(|f| parse_form(f, cap))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                (TransportInput::Forms(forms), q.unwrap_or(QueryArg::Coleman), p1, p2)
            } else if let Some(c) = v.get("connection") {
                (
                    TransportInput::Connection(ConnectionForm::from_json(c)?),
                    q.unwrap_or(QueryArg::Transport),
                    p1,
                    p2,
                )
            } else if v.get("components").is_some() {
                (
                    TransportInput::Connection(ConnectionForm::from_json(&v)?),
                    q.unwrap_or(QueryArg::Transport),
                    p1,
                    p2,
                )
            } else {
                return Err(CliError::usage("input needs `connection` or `forms`"));
            }
        }
    };
    if let Some(s) = x1 {
        p1 = Some(point_arg(s, cfg)?);
    }
    if let Some(s) = x2 {
        p2 = Some(point_arg(s, cfg)?);
    }
    let query = query.unwrap_or(default_query);
    let points = || -> std::result::Result<(Vec<PadicScalar>, Vec<PadicScalar>), CliError> {
        match (&p1, &p2) {
            (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
            _ => Err(CliError::usage("this query needs --x1 and --x2")),
        }
    };
    match (data, query) {
        (TransportInput::Forms(forms), QueryArg::Coleman) => {
            let (a, b) = points()?;
            let vals = transport::coleman_disk_integral(&forms, &a, &b)?;
            Ok(vals
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    Record::new()
                        .with("form", i)
                        .with("integral", v)
                        .with("residue", v.value())
                        .with("anchor", "disk integral")
                })
                .collect())
        }
        (TransportInput::Forms(_), _) => Err(CliError::usage("forms only support the coleman query")),
        (TransportInput::Connection(_), QueryArg::Coleman) => {
            Err(CliError::usage("the coleman query takes `forms`, not a connection"))
        }
        (TransportInput::Connection(conn), q) => {
            let (flat, frows) = flatness_rows(&conn)?;
            if q == QueryArg::Flatness {
                return Ok(frows);
            }
            if !flat {
                return Err(CliError {
                    code: 1,
                    message: "connection is not flat".into(),
                    records: frows,
                });
            }
            match q {
                QueryArg::Transport => {
                    let res = transport::parallel_transport(&conn, None)?;
                    Ok(series_rows(&res.h))
                }
                QueryArg::Evaluate => {
                    let (a, b) = points()?;
                    let res = transport::parallel_transport(&conn, None)?;
                    let g = transport::transport_evaluate(&res, &a, &b)?;
                    let mut rows = Vec::new();
                    for i in 0..g.rows() {
                        for j in 0..g.cols() {
                            rows.push(
                                Record::new()
                                    .with("i", i)
                                    .with("j", j)
                                    .with("value", g.get(i, j))
                                    .with("anchor", "transport between points"),
                            );
                        }
                    }
                    Ok(rows)
                }
                QueryArg::Betti => {
                    let b = transport::betti_square_check(&conn, None)?;
                    let rec = Record::new()
                        .with("consistent", b.consistent)
                        .with("residual", if b.consistent { "0".to_string() } else { "nonzero".to_string() })
                        .with(
                            "residual_degree",
                            b.residual_degree.map_or("none".to_string(), |d| d.to_string()),
                        )
                        .with("leaf_block", b.leaf_block.get(0, 0).to_poly_string())
                        .with("fibre_block", b.fibre_block.get(0, 0).to_poly_string())
                        .with("anchor", "Betti square");
                    if b.consistent {
                        Ok(vec![rec])
                    } else {
                        Err(CliError {
                            code: 1,
                            message: "Betti square does not commute".into(),
                            records: vec![rec],
                        })
                    }
                }
                QueryArg::Flatness | QueryArg::Coleman => unreachable!(),
            }
        }
    }
}

fn cmd_axs(input: Option<&PathBuf>, demo: Option<&str>, max_iter: Option<usize>, cfg: &RunConfig) -> CliResult {
    let (form, chart, iters) = match (input, demo) {
        (Some(_), Some(_)) => return Err(CliError::usage("give an input file or --demo, not both")),
        (None, None) => return Err(CliError::usage("give an input file or --demo")),
        (None, Some(name)) => {
            let (f, c) = axschanuel::demo(name, cfg.cap).ok_or_else(|| {
                CliError::usage(format!("unknown demo `{name}`; known: {}", axschanuel::DEMOS.join(", ")))
            })?;
            (f, c, 4)
        }
        (Some(path), None) => axschanuel::parse_input(&read_json(path)?, cfg.cap)?,
    };
    let iters = max_iter.unwrap_or(iters);
    let pb = axschanuel::pull_back(&form.truncate(chart.cap()), &chart)?;
    let ka = axschanuel::kernel_analysis(&pb)?;
    let locus = axschanuel::effective_locus(&form, &chart, iters)?;
    let mut rows = vec![Record::new()
        .with("kind", "verdict")
        .with("rank", ka.rank.rank)
        .with("verdict", ka.verdict.label())
        .with("detail", ka.verdict.to_json())
        .with("anchor", "first integral")];
    for (i, r) in locus.rounds.iter().enumerate() {
        rows.push(
            Record::new()
                .with("kind", "round")
                .with("round", i + 1)
                .with("rank", r.rank)
                .with("verdict", &r.verdict)
                .with("detail", format!("{} parameters, {} coordinates", r.params, r.dim))
                .with("anchor", "effective locus"),
        );
    }
    for g in &locus.vanishing {
        rows.push(
            Record::new()
                .with("kind", "vanishing")
                .with("verdict", g.to_poly_string())
                .with("anchor", "effective locus"),
        );
    }
    rows.push(
        Record::new()
            .with("kind", "summary")
            .with("verdict", if locus.complete { "complete" } else { "incomplete" })
            .with("detail", locus.notes.join("; "))
            .with("anchor", "effective locus"),
    );
    Ok(rows)
}
