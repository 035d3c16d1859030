//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 admissibility refusal,
//! 4 precision or certification failure, 1 anything else.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::enclosure::{Enclosure, Sign};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::poly::{parse_rational, rational_enclosure, rational_from_f64};
use crate::radial::potential::RadialPotential;
use crate::radial::search::{find_first_resonance_with, GeneralSolver, SearchConfig, SearchOutcome};
use crate::radial::volterra::VolterraConfig;
use crate::report::{Method, ResonanceReport};
use crate::variational::{classify_state, comparison_bound, dominated_by, variational_report, StateHypotheses};
use crate::wronskian::{bracket_first_zero, Truncation, YukawaWronskian};
use crate::yukawa_exterior::{omega, u_ext_value};
use crate::yukawa_interior::{build_alpha_table, u_int_value, AlphaValues};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "resonance",
    version,
    about = "Zero-energy resonance couplings of radial potentials"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the generation time so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified bracket for the Yukawa potential e^{-r}/r in three dimensions.
    YukawaBracket(BracketArgs),
    /// First resonance coupling of a potential.
    Resonance(ResonanceArgs),
    /// Lower bound for a potential dominated by C0 times the Yukawa potential.
    Compare(CompareArgs),
    /// Tabulate a quantity for external plotting.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    #[arg(long, default_value_t = 0.012, allow_negative_numbers = true)]
    pub tol: f64,
    /// Exact decimal or p/q.
    #[arg(long, default_value = "1.67626")]
    pub lo: String,
    #[arg(long, default_value = "1.68742")]
    pub hi: String,
    #[arg(long, default_value_t = 3)]
    pub dim: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Volterra,
    Variational,
    Both,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    /// Preset (yukawa, exponential, hardy, truncated_hardy[:eps]) or a path
    /// to a two-column `r V(r)` table.
    #[arg(long, default_value = "yukawa")]
    pub potential: String,
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 3)]
    pub dim: u32,
    #[arg(long, value_enum, default_value_t = MethodArg::Volterra)]
    pub method: MethodArg,
    /// Bracket width for the bisection.
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 20.0)]
    pub search_hi: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub picard_tol: f64,
    /// Volterra nodes per unit of ln r.
    #[arg(long, default_value_t = 1024)]
    pub density: usize,
    /// Cells of the coarsest variational grid.
    #[arg(long, default_value_t = 1024)]
    pub cells: usize,
    /// Nested variational grids.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c0: f64,
    /// Reference enclosure of the Yukawa coupling; computed when omitted.
    #[arg(long)]
    pub reference_lo: Option<String>,
    #[arg(long)]
    pub reference_hi: Option<String>,
    /// Potential to spot-check against `C0 e^{-r}/r`.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotTarget {
    Wronskian,
    UInt,
    UExt,
    AlphaK,
    OmegaK,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub what: PlotTarget,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Radius for omega-k.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Input(_) => 2,
        Error::Admissibility(_) => 3,
        Error::Precision(_) | Error::Certification(_) | Error::Convergence(_) => 4,
        Error::Numeric(_) | Error::Io(_) => 1,
    }
}

/// Parses `args` (including the program name), runs and writes the result.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cfg).and_then(|text| match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<String> {
    let doc = match &cfg.command {
        Command::YukawaBracket(a) => Output::Report(cmd_yukawa_bracket(a)?),
        Command::Resonance(a) => Output::Report(cmd_resonance(a)?),
        Command::Compare(a) => Output::Report(cmd_compare(a)?),
        Command::PlotData(a) => Output::Table(cmd_plot_data(a)?),
    };
    let stamp = (!cfg.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    Ok(match doc {
        Output::Report(r) => render_report(&r, cfg.format, stamp),
        Output::Table(t) => render_table(&t, cfg.format, stamp),
    })
}

enum Output {
    Report(Map<String, Value>),
    Table(Table),
}

/// Rows of a plot file; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub what: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => csv_field(s),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn enclosure_json(e: &Enclosure) -> Value {
    json!({"lo": e.lo(), "hi": e.hi()})
}

fn report_map(r: &ResonanceReport, command: &str, method: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("n".into(), json!(r.n));
    m.insert("potential".into(), json!(r.potential));
    m.insert("method".into(), json!(method));
    m.insert("kappa_star".into(), enclosure_json(&r.kappa_star));
    m.insert("classification".into(), json!(r.classification.classification.as_str()));
    m.insert("classification_rule".into(), json!(r.classification.rule));
    m.insert("diagnostics".into(), Value::Object(r.diagnostics.clone()));
    m
}

fn render_report(m: &Map<String, Value>, format: Format, stamp: Option<u64>) -> String {
    match format {
        Format::Json => {
            let mut m = m.clone();
            if let Some(t) = stamp {
                m.insert("generated_unix_s".into(), json!(t));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let field = |k: &str| -> String {
                match m.get(k) {
                    Some(Value::String(s)) => csv_field(s),
                    Some(Value::Null) | None => String::new(),
                    Some(v) => csv_field(&v.to_string()),
                }
            };
            let ks = m.get("kappa_star").cloned().unwrap_or(Value::Null);
            let num = |v: &Value| if v.is_null() { String::new() } else { v.to_string() };
            format!(
                "command,n,potential,method,lo,hi,classification\n{},{},{},{},{},{},{}\n",
                field("command"),
                field("n"),
                field("potential"),
                field("method"),
                num(&ks["lo"]),
                num(&ks["hi"]),
                field("classification"),
            )
        }
        Format::Human => {
            let mut out = String::new();
            for key in [
                "command",
                "potential",
                "n",
                "method",
                "classification",
                "classification_rule",
            ] {
                if let Some(v) = m.get(key) {
                    let text = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                    out.push_str(&format!("{key:<22}{text}\n"));
                }
            }
            if let Some(ks) = m.get("kappa_star") {
                let hi = if ks["hi"].is_null() {
                    "inf".to_string()
                } else {
                    ks["hi"].to_string()
                };
                out.push_str(&format!("{:<22}[{}, {}]\n", "kappa_star", ks["lo"], hi));
            }
            if let Some(Value::Object(d)) = m.get("diagnostics") {
                for (k, v) in d {
                    out.push_str(&format!("  {k:<20}{v}\n"));
                }
            }
            if let Some(t) = stamp {
                out.push_str(&format!("{:<22}{t}\n", "generated_unix_s"));
            }
            out
        }
    }
}

fn render_table(t: &Table, format: Format, stamp: Option<u64>) -> String {
    match format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("schema".into(), json!(SCHEMA));
            m.insert("command".into(), json!("plot-data"));
            m.insert("what".into(), json!(t.what));
            m.insert("columns".into(), json!(t.columns));
            m.insert(
                "rows".into(),
                Value::Array(
                    t.rows
                        .iter()
                        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                        .collect(),
                ),
            );
            if let Some(s) = stamp {
                m.insert("generated_unix_s".into(), json!(s));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv | Format::Human => {
            let mut s = t.columns.join(",");
            s.push('\n');
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
    }
}

fn load_potential(spec: &str, scale: Option<f64>) -> Result<RadialPotential> {
    let path = Path::new(spec);
    let base = if path.is_file() {
        RadialPotential::from_file(path)?
    } else {
        RadialPotential::preset(spec)?
    };
    match scale {
        Some(c) => RadialPotential::scaled(c, base),
        None => Ok(base),
    }
}

fn q(text: &str) -> Result<BigRational> {
    parse_rational(text).map_err(|_| Error::Input(format!("not an exact number: '{text}'")))
}

fn truncation_json(t: Truncation) -> Value {
    json!({
        "interior_partial_sums": [2 * t.interior - 1, 2 * t.interior],
        "exterior_orders": [t.exterior, t.exterior + 1],
        "description": t.to_string(),
    })
}

fn series_report(lo: &BigRational, hi: &BigRational, tol: f64) -> Result<ResonanceReport> {
    let b = bracket_first_zero(lo, hi, tol)?;
    let mut d = Map::new();
    d.insert("start_bracket".into(), json!([lo.to_string(), hi.to_string()]));
    d.insert("exact_bracket".into(), json!([b.lo.to_string(), b.hi.to_string()]));
    d.insert("width".into(), json!(b.width()));
    d.insert("converged".into(), json!(b.converged));
    d.insert("truncation".into(), truncation_json(b.truncation));
    d.insert("sign_evaluations".into(), json!(b.evaluations));
    d.insert("bisection_steps".into(), json!(b.history.len() - 1));
    d.insert("certified".into(), json!(true));
    Ok(ResonanceReport {
        n: 3,
        potential: RadialPotential::Yukawa.to_string(),
        kappa_star: b.enclosure,
        method: Method::YukawaSeries,
        classification: classify_state(3, &StateHypotheses::nonnegative())?,
        diagnostics: d,
    })
}

pub fn cmd_yukawa_bracket(a: &BracketArgs) -> Result<Map<String, Value>> {
    if a.dim != 3 {
        return Err(Error::domain(format!(
            "the series path is three-dimensional, got --dim {}",
            a.dim
        )));
    }
    if !(a.tol > 0.0) {
        return Err(Error::domain(format!("--tol must be positive, got {}", a.tol)));
    }
    let r = series_report(&q(&a.lo)?, &q(&a.hi)?, a.tol)?;
    Ok(report_map(&r, "yukawa-bracket", r.method.as_str()))
}

fn volterra_search(v: &RadialPotential, a: &ResonanceArgs) -> Result<ResonanceReport> {
    let cfg = SearchConfig {
        search_hi: a.search_hi,
        tol: a.tol,
        volterra: VolterraConfig {
            picard_tol: a.picard_tol,
            density: a.density,
            ..VolterraConfig::default()
        },
        ..SearchConfig::default()
    };
    match find_first_resonance_with(v, a.dim, &cfg)? {
        SearchOutcome::Found(r) => Ok(r),
        SearchOutcome::NotFound { search_hi, samples } => Err(Error::Convergence(format!(
            "no sign change of the Wronskian on (0, {search_hi}] ({samples} samples); raise --search-hi"
        ))),
    }
}

pub fn cmd_resonance(a: &ResonanceArgs) -> Result<Map<String, Value>> {
    if a.dim < 3 {
        return Err(Error::domain(format!("--dim must be >= 3, got {}", a.dim)));
    }
    if !(a.tol > 0.0) || !(a.picard_tol > 0.0) || !(a.search_hi > 0.0) {
        return Err(Error::domain("tolerances and --search-hi must be positive"));
    }
    let v = load_potential(&a.potential.potential, a.potential.scale)?;
    match a.method {
        MethodArg::Series => {
            if a.dim != 3 || a.potential.potential != "yukawa" {
                return Err(Error::domain(
                    "--method series supports only the yukawa preset in --dim 3",
                ));
            }
            let c = a.potential.scale.unwrap_or(1.0);
            let mut r = series_report(&q("1.67626")?, &q("1.68742")?, a.tol)?;
            // κ*(cV) = κ*(V)/c
            let inv = Enclosure::point(c).recip();
            r.kappa_star = r.kappa_star * inv;
            r.potential = v.to_string();
            r.diagnostics.insert("scale".into(), json!(c));
            Ok(report_map(&r, "resonance", "yukawa_series"))
        }
        MethodArg::Volterra => {
            let r = volterra_search(&v, a)?;
            Ok(report_map(&r, "resonance", "volterra"))
        }
        MethodArg::Variational => {
            let r = variational_report(&v, a.dim, a.cells, a.levels)?;
            Ok(report_map(&r, "resonance", "variational"))
        }
        MethodArg::Both => {
            let vr = volterra_search(&v, a)?;
            let wr = variational_report(&v, a.dim, a.cells, a.levels)?;
            let ev = vr.estimate();
            let ew = wr.diagnostics["estimate"].as_f64().unwrap_or(wr.kappa_star.hi());
            let tolerance = vr.kappa_star.width() + wr.kappa_star.width();
            let difference = (ev - ew).abs();
            let mut d = Map::new();
            d.insert(
                "volterra".into(),
                json!({"kappa_star": enclosure_json(&vr.kappa_star), "estimate": ev, "diagnostics": vr.diagnostics}),
            );
            d.insert(
                "variational".into(),
                json!({"kappa_star": enclosure_json(&wr.kappa_star), "estimate": ew, "diagnostics": wr.diagnostics}),
            );
            d.insert(
                "agreement".into(),
                json!({"difference": difference, "combined_tolerance": tolerance, "agree": difference <= tolerance}),
            );
            let combined = ResonanceReport {
                kappa_star: vr.kappa_star.hull(&wr.kappa_star),
                diagnostics: d,
                ..vr
            };
            Ok(report_map(&combined, "resonance", "both"))
        }
    }
}

pub fn cmd_compare(a: &CompareArgs) -> Result<Map<String, Value>> {
    if !(a.c0 > 0.0) || !a.c0.is_finite() {
        return Err(Error::domain(format!("--c0 must be positive, got {}", a.c0)));
    }
    let (reference, provenance) = match (&a.reference_lo, &a.reference_hi) {
        (Some(lo), Some(hi)) => {
            let e = rational_enclosure(&q(lo)?).hull(&rational_enclosure(&q(hi)?));
            (e, json!({"source": "user", "kappa_star": enclosure_json(&e)}))
        }
        (None, None) => {
            let r = series_report(&q("1.67626")?, &q("1.68742")?, 0.012)?;
            let p = json!({
                "source": "certified yukawa series bracket",
                "kappa_star": enclosure_json(&r.kappa_star),
                "truncation": r.diagnostics["truncation"],
            });
            (r.kappa_star, p)
        }
        _ => {
            return Err(Error::Input(
                "give both --reference-lo and --reference-hi or neither".into(),
            ))
        }
    };
    let bound = comparison_bound(reference, a.c0)?;
    let mut d = Map::new();
    d.insert("c0".into(), json!(a.c0));
    d.insert("reference".into(), provenance);
    d.insert(
        "rule".into(),
        json!("V <= C0 * e^{-r}/r implies kappa*(V) >= lo(kappa*(yukawa)) / C0"),
    );
    let mut potential = format!("any V <= {} * yukawa", a.c0);
    let mut n = 3;
    let mut classification = Value::Null;
    if let Some(spec) = &a.potential {
        let v = load_potential(spec, a.scale)?;
        let ok = dominated_by(&v, &RadialPotential::Yukawa, a.c0, 400);
        d.insert("domination_spot_check".into(), json!({"samples": 400, "passed": ok}));
        if !ok {
            return Err(Error::domain(format!(
                "{v} exceeds {} * yukawa at a sampled radius",
                a.c0
            )));
        }
        potential = v.to_string();
        n = 3;
        classification = json!(classify_state(n, &StateHypotheses::from_potential(&v))?
            .classification
            .as_str());
    }
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!("compare"));
    m.insert("n".into(), json!(n));
    m.insert("potential".into(), json!(potential));
    m.insert("method".into(), json!("comparison"));
    m.insert("kappa_star".into(), json!({"lo": bound, "hi": Value::Null}));
    m.insert("classification".into(), classification);
    m.insert("diagnostics".into(), Value::Object(d));
    Ok(m)
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && to > from) || points < 2 {
        return Err(Error::domain(format!("bad range [{from}, {to}] with {points} points")));
    }
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                to
            } else {
                from + (to - from) * i as f64 / (points - 1) as f64
            }
        })
        .collect())
}

fn enclosure_cells(e: &Enclosure) -> [Cell; 3] {
    [Cell::Num(e.lo()), Cell::Num(e.mid()), Cell::Num(e.hi())]
}

fn sign_text(s: Sign) -> Cell {
    Cell::Text(s.to_string())
}

pub fn cmd_plot_data(a: &PlotArgs) -> Result<Table> {
    match a.what {
        PlotTarget::Wronskian => {
            let xs = grid(a.from.unwrap_or(0.0), a.to.unwrap_or(2.0), a.points)?;
            if xs[0] < 0.0 {
                return Err(Error::domain("wronskian plot needs kappa >= 0"));
            }
            let eval = YukawaWronskian::shared();
            let fallback = GeneralSolver::new(&RadialPotential::Yukawa, 3, VolterraConfig::default())?;
            let rows = Execution::Parallel
                .map(&xs, |&k| -> Result<Vec<Cell>> {
                    let kq = rational_from_f64(k)?;
                    match eval.certify_sign(&kq, Truncation::BASE) {
                        Ok(s) if s.sign != Sign::Indeterminate => {
                            let [lo, mid, hi] = enclosure_cells(&s.enclosure);
                            Ok(vec![Cell::Num(k), lo, mid, hi, sign_text(s.sign), Cell::Int(0)])
                        }
                        _ => {
                            let w = fallback.wronskian(k)?.value;
                            let s = if w > 0.0 { Sign::Positive } else { Sign::Negative };
                            Ok(vec![
                                Cell::Num(k),
                                Cell::Empty,
                                Cell::Num(w),
                                Cell::Empty,
                                sign_text(s),
                                Cell::Int(1),
                            ])
                        }
                    }
                })
                .into_iter()
                .collect::<Result<_>>()?;
            Ok(Table {
                what: "wronskian",
                columns: vec!["kappa", "lo", "mid", "hi", "sign", "uncertified"],
                rows,
            })
        }
        PlotTarget::UInt => {
            let xs = grid(a.from.unwrap_or(0.0), a.to.unwrap_or(1.0), a.points)?;
            let kq = nonnegative_kappa(a.kappa)?;
            let alphas = AlphaValues::by_recurrence(&kq, 64);
            let raw: Vec<f64> = alphas.values().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let rows = xs
                .iter()
                .map(|&r| -> Result<Vec<Cell>> {
                    let certified = if (0.0..=1.0).contains(&r) {
                        let rq = rational_from_f64(r)?;
                        [4, 8, 16, 32].iter().find_map(|&k| u_int_value(&alphas, &rq, k).ok())
                    } else {
                        None
                    };
                    Ok(match certified {
                        Some(e) => {
                            let [lo, mid, hi] = enclosure_cells(&e);
                            vec![Cell::Num(r), lo, mid, hi, Cell::Int(0)]
                        }
                        None => {
                            let s: f64 = raw.iter().enumerate().map(|(k, a)| a * (-r).powi(k as i32)).sum();
                            vec![Cell::Num(r), Cell::Empty, Cell::Num(s), Cell::Empty, Cell::Int(1)]
                        }
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Table {
                what: "u_int",
                columns: vec!["r", "lo", "mid", "hi", "uncertified"],
                rows,
            })
        }
        PlotTarget::UExt => {
            let xs = grid(a.from.unwrap_or(1.0), a.to.unwrap_or(10.0), a.points)?;
            let kappa = rational_enclosure(&nonnegative_kappa(a.kappa)?);
            let rows = Execution::Parallel.map(&xs, |&r| {
                let certified = (1..=6).find_map(|order| u_ext_value(kappa, r, order).ok());
                match certified {
                    Some(e) => {
                        let [lo, mid, hi] = enclosure_cells(&e);
                        vec![Cell::Num(r), lo, mid, hi, Cell::Int(0)]
                    }
                    None => vec![Cell::Num(r), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Int(1)],
                }
            });
            Ok(Table {
                what: "u_ext",
                columns: vec!["r", "lo", "mid", "hi", "uncertified"],
                rows,
            })
        }
        PlotTarget::AlphaK => {
            let kq = nonnegative_kappa(a.kappa)?;
            let table = build_alpha_table(a.k_max.max(1))?;
            let rows = table
                .evaluate(&kq)
                .values()
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let [lo, mid, hi] = enclosure_cells(&rational_enclosure(v));
                    vec![
                        Cell::Int(k as i64),
                        lo,
                        mid,
                        hi,
                        Cell::Text(v.to_string()),
                        Cell::Int(0),
                    ]
                })
                .collect();
            Ok(Table {
                what: "alpha_k",
                columns: vec!["k", "lo", "mid", "hi", "exact", "uncertified"],
                rows,
            })
        }
        PlotTarget::OmegaK => {
            let ks: Vec<u32> = (1..=a.k_max.max(1) as u32).collect();
            let rows = Execution::Parallel.map(&ks, |&k| match omega(k, a.r) {
                Ok(w) => {
                    let [lo, mid, hi] = enclosure_cells(&w.value);
                    let [dlo, dmid, dhi] = enclosure_cells(&w.derivative);
                    vec![Cell::Int(k as i64), lo, mid, hi, dlo, dmid, dhi, Cell::Int(0)]
                }
                Err(_) => {
                    let mut row = vec![Cell::Int(k as i64)];
                    row.extend(std::iter::repeat_n(Cell::Empty, 6));
                    row.push(Cell::Int(1));
                    row
                }
            });
            Ok(Table {
                what: "omega_k",
                columns: vec![
                    "k",
                    "lo",
                    "mid",
                    "hi",
                    "deriv_lo",
                    "deriv_mid",
                    "deriv_hi",
                    "uncertified",
                ],
                rows,
            })
        }
    }
}

fn nonnegative_kappa(k: f64) -> Result<BigRational> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("--kappa must be >= 0, got {k}")));
    }
    rational_from_f64(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("resonance").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bracket_json() {
        let (code, out, _) = run_args(&["yukawa-bracket", "--format", "json", "--no-timestamp"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["classification"], "resonance_not_L2");
        let lo = v["kappa_star"]["lo"].as_f64().unwrap();
        let hi = v["kappa_star"]["hi"].as_f64().unwrap();
        assert!(lo >= 1.676 && hi <= 1.688);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["yukawa-bracket", "--tol", "0"]).0, 2);
        assert_eq!(run_args(&["yukawa-bracket", "--tol", "-1"]).0, 2);
        assert_eq!(run_args(&["yukawa-bracket", "--dim", "4"]).0, 2);
        assert_eq!(run_args(&["no-such-command"]).0, 2);
        assert_eq!(run_args(&["compare", "--c0", "0"]).0, 2);
        assert_eq!(run_args(&["resonance", "--dim", "2"]).0, 2);
    }

    #[test]
    fn admissibility_refusal() {
        let (code, _, err) = run_args(&["resonance", "--potential", "hardy"]);
        assert_eq!(code, 3);
        assert!(err.contains("not admissible"));
    }

    #[test]
    fn compare_halves() {
        let (code, out, _) = run_args(&[
            "compare",
            "--c0",
            "2",
            "--reference-lo",
            "1.67626",
            "--reference-hi",
            "1.68742",
            "--format",
            "json",
            "--no-timestamp",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        // the decimal reference is rounded outward before dividing
        let lo = v["kappa_star"]["lo"].as_f64().unwrap();
        assert!(lo <= 0.83813 && lo > 0.83813 - 1e-15);
    }

    #[test]
    fn alpha_plot_decreasing() {
        let (code, out, _) = run_args(&["plot-data", "--what", "alpha-k", "--kappa", "1", "--format", "csv"]);
        assert_eq!(code, 0);
        let mids: Vec<f64> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(mids.len(), 11);
        for w in mids[3..].windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn u_ext_at_zero_coupling() {
        let (code, out, _) = run_args(&[
            "plot-data",
            "--what",
            "u-ext",
            "--kappa",
            "0",
            "--points",
            "11",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        for line in out.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let r: f64 = f[0].parse().unwrap();
            let mid: f64 = f[2].parse().unwrap();
            assert!((mid - 1.0 / r).abs() < 1e-15);
        }
    }
}
