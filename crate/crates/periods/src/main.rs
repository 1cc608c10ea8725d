use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use periods::config::{Config, Format};
use periods::epstein::{epstein_zeta, outer_period_from_epstein};
use periods::error::Error;
use periods::numeric_period::{AxisPoles, NumericValue};
use periods::numerics::{l_chi_minus3, l_chi_minus4, zeta};
use periods::period::{combination, compute_period, compute_periods, form_triple, ExactJson, Mode, PeriodResult};
use periods::verify::{self, Suite, SuiteReport};
use periods_core::error::CoreError;
use periods_core::exceptional::is_on_exceptional_set;
use periods_core::field::ExactNumber;
use periods_core::kz::combination_polynomial;
use periods_core::point::ExactPoint;
use periods_core::quadform::{enumerate_classes, QuadForm};
use periods_core::rational::Rational;
use rayon::prelude::*;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "periods", version, about = "Periods of meromorphic modular forms f_{k,P} and the locally harmonic forms behind them")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// JSON file with configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Print all digits instead of five decimals.
    #[arg(long, global = true)]
    full: bool,
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    matrix_bound: Option<i64>,
    #[arg(long, global = true)]
    series_terms: Option<usize>,
    #[arg(long, global = true)]
    orbit_bound: Option<i64>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Poles of f on the imaginary axis: reject, or integrate in the principal-value sense.
    #[arg(long, global = true, value_enum)]
    axis_poles: Option<AxisPolesArg>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pretty,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisPolesArg {
    Reject,
    PrincipalValue,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
    Both,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
            ModeArg::Both => Mode::Both,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Periods r_n(f_{k,P}) for every class P of discriminant d, and their sum f_{k,d}.
    Table {
        /// A weight index or an inclusive range such as 2..7.
        #[arg(long, default_value = "2..7")]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, value_enum, default_value = "numeric")]
        mode: ModeArg,
    },
    /// One period, or all of them when --n is omitted.
    Period {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
    },
    /// sum a_n r_n(f_{k,P}) for a relation sum a_n R_n = 0.
    Combo {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        /// Comma-separated n:a_n pairs with rational a_n.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Epstein zeta value zeta_P(s) and the outer period it determines.
    Epstein {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        s: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

fn build_config(o: &Opts) -> anyhow::Result<Config> {
    let mut cfg = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).map_err(Error::from)?
        }
        None => Config::default(),
    };
    if let Some(v) = o.precision {
        cfg.precision = v;
    }
    if let Some(v) = o.quad_tol {
        cfg.quad_tol = v;
    }
    if let Some(v) = o.matrix_bound {
        cfg.matrix_bound = v;
    }
    if let Some(v) = o.series_terms {
        cfg.series_terms = v;
    }
    if o.orbit_bound.is_some() {
        cfg.orbit_bound = o.orbit_bound;
    }
    if o.cache_dir.is_some() {
        cfg.cache_dir = o.cache_dir.clone();
    }
    if let Some(f) = o.format {
        cfg.format = match f {
            FormatArg::Pretty => Format::Pretty,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if o.json {
        cfg.format = Format::Json;
    }
    if let Some(a) = o.axis_poles {
        cfg.axis_poles = match a {
            AxisPolesArg::Reject => AxisPoles::Reject,
            AxisPolesArg::PrincipalValue => AxisPoles::PrincipalValue,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Exit status of a command that ran to completion.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Core(CoreError::NotInKernel(_))) => 1,
                Some(err) => err.exit_code(),
                None => 2,
            };
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = build_config(&cli.opts)?;
    if let Some(t) = cli.opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    let out = Printer { format: cfg.format, full: cli.opts.full };
    match &cli.cmd {
        Cmd::Table { k, disc, mode } => table(&out, &cfg, parse_k_range(k)?, *disc, (*mode).into()),
        Cmd::Period { k, n, form, mode } => period(&out, &cfg, *k, *n, &parse_form(form)?, (*mode).into()),
        Cmd::Combo { k, form, coeffs } => combo(&out, &cfg, *k, &parse_form(form)?, &parse_coeffs(coeffs)?),
        Cmd::Epstein { form, s } => epstein(&out, &cfg, &parse_form(form)?, *s),
        Cmd::Verify { suite } => verify_cmd(&out, &cfg, *suite),
    }
}

fn parse_form(s: &str) -> anyhow::Result<QuadForm> {
    Ok(s.parse::<QuadForm>().map_err(Error::from)?)
}

fn parse_k_range(s: &str) -> anyhow::Result<Vec<u32>> {
    let bad = || Error::Invalid(format!("cannot parse weight range {s:?}; expected k or a..b"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.trim_start_matches('=');
            (a.trim().parse::<u32>().map_err(|_| bad())?, b.trim().parse::<u32>().map_err(|_| bad())?)
        }
        None => {
            let k = s.trim().parse::<u32>().map_err(|_| bad())?;
            (k, k)
        }
    };
    if lo < 2 || hi < lo {
        return Err(bad().into());
    }
    Ok((lo..=hi).collect())
}

fn parse_coeffs(s: &str) -> anyhow::Result<BTreeMap<u32, Rational>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let bad = || Error::Invalid(format!("cannot parse coefficient {part:?}; expected n:a"));
        let (n, a) = part.split_once(':').ok_or_else(bad)?;
        let n = n.trim().parse::<u32>().map_err(|_| bad())?;
        let a = a.trim().parse::<Rational>().map_err(|_| bad())?;
        if out.insert(n, a).is_some() {
            return Err(Error::Invalid(format!("index {n} given twice")).into());
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid("no coefficients".into()).into());
    }
    Ok(out)
}

struct Printer {
    format: Format,
    full: bool,
}

impl Printer {
    fn num(&self, x: f64) -> String {
        if self.full {
            format!("{x:e}")
        } else {
            let s = format!("{x:.5}");
            if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                "0.00000".into()
            } else {
                s
            }
        }
    }

    fn complex(&self, v: &NumericValue) -> String {
        if v.im.abs() <= v.err.max(5e-6) && !self.full {
            self.num(v.re)
        } else {
            let sign = if v.im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", self.num(v.re), self.num(v.im.abs()))
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> anyhow::Result<()> {
        let mut stdout = std::io::stdout().lock();
        serde_json::to_writer_pretty(&mut stdout, value)?;
        writeln!(stdout)?;
        Ok(())
    }

    fn csv_header(&self) -> &'static str {
        "k,n,form,exact,numeric_re,numeric_im,err,config"
    }

    fn csv_row(&self, k: u32, n: u32, form: &str, exact: Option<&ExactJson>, numeric: Option<&NumericValue>, hash: &str) -> String {
        let exact = exact.map(exact_string).unwrap_or_default();
        let (re, im, err) = match numeric {
            Some(v) => (self.num(v.re), self.num(v.im), format!("{:.1e}", v.err)),
            None => Default::default(),
        };
        format!("{k},{n},\"{form}\",{exact},{re},{im},{err},{hash}")
    }
}

fn exact_string(e: &ExactJson) -> String {
    match e.kind.as_str() {
        "i-rational" => format!("{}i", e.value),
        _ => e.value.clone(),
    }
}

fn point_string(tau: &ExactPoint) -> String {
    let im = match (tau.v_coef.is_one(), tau.radicand()) {
        (true, 1) => "i".to_string(),
        (true, m) => format!("i sqrt({m})"),
        (false, 1) => format!("{} i", tau.v_coef),
        (false, m) => format!("{} i sqrt({m})", tau.v_coef),
    };
    if tau.u.is_zero() {
        im
    } else {
        format!("{} + {im}", tau.u)
    }
}

fn form_string(f: &[i64; 3]) -> String {
    format!("{},{},{}", f[0], f[1], f[2])
}

#[derive(Serialize)]
struct SumCell {
    k: u32,
    n: u32,
    exact: Option<ExactJson>,
    numeric: Option<NumericValue>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    disc: i64,
    classes: Vec<[i64; 3]>,
    cells: &'a [PeriodResult],
    /// Periods of f_{k,d}; present when there is more than one class.
    sum: &'a [SumCell],
    /// Cells where exact and numeric values disagree beyond the error bound.
    flagged: Vec<(u32, u32, [i64; 3])>,
    config_hash: String,
}

fn table(out: &Printer, cfg: &Config, ks: Vec<u32>, d: i64, mode: Mode) -> anyhow::Result<Outcome> {
    let classes = enumerate_classes(d).map_err(Error::from)?;
    for p in &classes {
        let tau = p.cm_point().map_err(Error::from)?;
        let exact_needed = mode != Mode::Numeric;
        if is_on_exceptional_set(&tau) && (exact_needed || cfg.axis_poles == AxisPoles::Reject || tau == QuadForm::new(1, 0, 1).cm_point().map_err(Error::from)?) {
            return Err(Error::CpvExcluded(format!("tau_P = {} of {p} lies on E1", point_string(&tau))).into());
        }
    }
    let jobs: Vec<(usize, u32)> = (0..classes.len()).flat_map(|c| ks.iter().map(move |&k| (c, k))).collect();
    let blocks: Vec<Vec<PeriodResult>> = jobs
        .par_iter()
        .map(|&(c, k)| compute_periods(&classes[c], k, mode, cfg))
        .collect::<Result<_, _>>()?;
    let cells: Vec<PeriodResult> = blocks.into_iter().flatten().collect();
    let flagged: Vec<_> = cells.iter().filter(|r| !r.consistent()).map(|r| (r.k, r.n, r.form)).collect();

    let mut sum = Vec::new();
    if classes.len() > 1 {
        for &k in &ks {
            for n in 0..=2 * k - 2 {
                let parts: Vec<&PeriodResult> = cells.iter().filter(|r| r.k == k && r.n == n).collect();
                let exact = parts
                    .iter()
                    .map(|r| r.exact_value.clone())
                    .collect::<Option<Vec<ExactNumber>>>()
                    .map(|xs| xs.iter().fold(ExactNumber::zero(), |acc, x| &acc + x));
                let numeric = parts.iter().map(|r| r.numeric).collect::<Option<Vec<_>>>().map(|vs| {
                    vs.iter().fold(NumericValue { re: 0.0, im: 0.0, err: 0.0 }, |a, v| NumericValue {
                        re: a.re + v.re,
                        im: a.im + v.im,
                        err: a.err + v.err,
                    })
                });
                sum.push(SumCell { k, n, exact: exact.as_ref().map(ExactJson::from_exact), numeric });
            }
        }
    }

    let hash = cfg.hash();
    match out.format {
        Format::Json => out.json(&TableJson {
            disc: d,
            classes: classes.iter().map(form_triple).collect::<Result<_, _>>()?,
            cells: &cells,
            sum: &sum,
            flagged: flagged.clone(),
            config_hash: hash,
        })?,
        Format::Csv => {
            println!("{}", out.csv_header());
            for r in &cells {
                println!("{}", out.csv_row(r.k, r.n, &form_string(&r.form), r.exact.as_ref(), r.numeric.as_ref(), &hash));
            }
            for s in &sum {
                println!("{}", out.csv_row(s.k, s.n, &format!("d={d}"), s.exact.as_ref(), s.numeric.as_ref(), &hash));
            }
        }
        Format::Pretty => {
            let top = ks.iter().map(|k| 2 * k - 2).max().unwrap_or(0);
            let mut blocks: Vec<(String, Vec<(u32, u32, Option<ExactJson>, Option<NumericValue>)>)> = classes
                .iter()
                .map(|p| {
                    let f = form_triple(p).expect("checked");
                    let rows = cells.iter().filter(|r| r.form == f).map(|r| (r.k, r.n, r.exact.clone(), r.numeric)).collect();
                    (format!("f_{{k,[{}]}}", form_string(&f)), rows)
                })
                .collect();
            if !sum.is_empty() {
                blocks.push((format!("f_{{k,{d}}}"), sum.iter().map(|s| (s.k, s.n, s.exact.clone(), s.numeric)).collect()));
            }
            for (title, rows) in blocks {
                println!("r_n({title})");
                let mut line = format!("{:>4}", "k");
                for n in 0..=top {
                    line += &format!(" {:>14}", format!("n={n}"));
                }
                println!("{line}");
                for &k in &ks {
                    let mut line = format!("{k:>4}");
                    for n in 0..=top {
                        let cell = rows.iter().find(|r| r.0 == k && r.1 == n).map(|(_, _, exact, numeric)| match (exact, numeric) {
                            (Some(e), _) => exact_string(e),
                            (None, Some(v)) => out.complex(v),
                            (None, None) => "?".into(),
                        });
                        line += &format!(" {:>14}", cell.unwrap_or_else(|| "-".into()));
                    }
                    println!("{line}");
                }
                println!();
            }
            println!("config {hash}");
        }
    }
    for (k, n, f) in &flagged {
        eprintln!("warning: exact and numeric r_{n}(f_{{{k},[{}]}}) differ beyond the error bound", form_string(f));
    }
    Ok(if flagged.is_empty() { Outcome::Ok } else { Outcome::Failed })
}

fn period(out: &Printer, cfg: &Config, k: u32, n: Option<u32>, p: &QuadForm, mode: Mode) -> anyhow::Result<Outcome> {
    let results = match n {
        Some(n) => vec![compute_period(p, k, n, mode, cfg)?],
        None => compute_periods(p, k, mode, cfg)?,
    };
    let hash = cfg.hash();
    match out.format {
        Format::Json if results.len() == 1 => out.json(&results[0])?,
        Format::Json => out.json(&results)?,
        Format::Csv => {
            println!("{}", out.csv_header());
            for r in &results {
                println!("{}", out.csv_row(r.k, r.n, &form_string(&r.form), r.exact.as_ref(), r.numeric.as_ref(), &hash));
            }
        }
        Format::Pretty => {
            for r in &results {
                let prefix = if results.len() > 1 { format!("r_{}: ", r.n) } else { String::new() };
                match (&r.exact, &r.numeric) {
                    (Some(e), Some(v)) => println!("{prefix}{}  (numeric {} +- {:.1e})", exact_string(e), out.complex(v), v.err),
                    (Some(e), None) => println!("{prefix}{}", exact_string(e)),
                    (None, Some(v)) => println!("{prefix}{} +- {:.1e}", out.complex(v), v.err),
                    (None, None) => unreachable!("every mode yields a value"),
                }
            }
        }
    }
    let bad: Vec<_> = results.iter().filter(|r| !r.consistent()).collect();
    for r in &bad {
        eprintln!("warning: exact and numeric r_{} differ beyond the error bound", r.n);
    }
    Ok(if bad.is_empty() { Outcome::Ok } else { Outcome::Failed })
}

#[derive(Serialize)]
struct ComboJson {
    k: u32,
    form: [i64; 3],
    coeffs: BTreeMap<u32, String>,
    exact: ExactJson,
    numeric: NumericValue,
    config: Config,
}

fn combo(out: &Printer, cfg: &Config, k: u32, p: &QuadForm, coeffs: &BTreeMap<u32, Rational>) -> anyhow::Result<Outcome> {
    let residual = combination_polynomial(k, coeffs).map_err(Error::from)?;
    if !residual.is_zero() {
        eprintln!("coefficients are not a relation among the R_n; residual period polynomial {residual}");
        return Ok(Outcome::Failed);
    }
    let (exact, numeric) = combination(p, k, coeffs, cfg)?;
    let exact = ExactJson::from_exact(&exact);
    match out.format {
        Format::Json => out.json(&ComboJson {
            k,
            form: form_triple(p)?,
            coeffs: coeffs.iter().map(|(n, a)| (*n, a.to_string())).collect(),
            exact,
            numeric,
            config: cfg.clone(),
        })?,
        Format::Csv => {
            println!("exact,numeric_re,numeric_im,err,config");
            println!("{},{},{},{:.1e},{}", exact_string(&exact), out.num(numeric.re), out.num(numeric.im), numeric.err, cfg.hash());
        }
        Format::Pretty => println!("{}  (numeric {} +- {:.1e})", exact_string(&exact), out.complex(&numeric), numeric.err),
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct EpsteinJson {
    form: [i64; 3],
    s: u32,
    value: f64,
    err: f64,
    /// `w zeta(s) L(s, chi_d)` for the principal form of discriminant -3 or -4.
    closed_form: Option<ClosedForm>,
    /// `r_0(f^+_{s,P})` determined by the value.
    outer_period: Option<f64>,
    config_hash: String,
}

#[derive(Serialize)]
struct ClosedForm {
    expression: String,
    value: f64,
    difference: f64,
}

fn epstein(out: &Printer, cfg: &Config, p: &QuadForm, s: u32) -> anyhow::Result<Outcome> {
    let shells = cfg.matrix_bound.max(400);
    let z = epstein_zeta(p, s, shells)?;
    let reduced = p.reduced().map_err(Error::from)?;
    let sf = s as f64;
    let closed = if reduced == QuadForm::new(1, 1, 1) {
        Some((format!("6 zeta({s}) L({s}, chi_-3)"), 6.0 * zeta(sf) * l_chi_minus3(sf)))
    } else if reduced == QuadForm::new(1, 0, 1) {
        Some((format!("4 zeta({s}) L({s}, chi_-4)"), 4.0 * zeta(sf) * l_chi_minus4(sf)))
    } else {
        None
    }
    .map(|(expression, value)| ClosedForm { expression, value, difference: z.value - value });
    let outer = outer_period_from_epstein(p, s, shells)?.value;
    match out.format {
        Format::Json => out.json(&EpsteinJson {
            form: form_triple(p)?,
            s,
            value: z.value,
            err: z.err,
            closed_form: closed,
            outer_period: Some(outer),
            config_hash: cfg.hash(),
        })?,
        Format::Csv => {
            println!("form,s,value,err,closed_form,outer_period,config");
            let c = closed.as_ref().map(|c| out.num(c.value)).unwrap_or_default();
            println!("\"{p}\",{s},{},{:.1e},{c},{},{}", out.num(z.value), z.err, out.num(outer), cfg.hash());
        }
        Format::Pretty => {
            println!("zeta_{p}({s}) = {} +- {:.1e}", out.num(z.value), z.err);
            if let Some(c) = &closed {
                println!("{} = {}  (difference {:.1e})", c.expression, out.num(c.value), c.difference);
            }
            println!("r_0(f^+_{{{s},{p}}}) = {}", out.num(outer));
        }
    }
    Ok(Outcome::Ok)
}

fn verify_cmd(out: &Printer, cfg: &Config, suite: Suite) -> anyhow::Result<Outcome> {
    let reports: Vec<SuiteReport> = verify::run(suite, cfg)?;
    let passed = reports.iter().all(|r| r.passed);
    match out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct All<'a> {
                passed: bool,
                suites: &'a [SuiteReport],
                config: &'a Config,
            }
            out.json(&All { passed, suites: &reports, config: cfg })?;
        }
        Format::Csv => {
            println!("suite,check,passed,residual,tolerance");
            for r in &reports {
                for c in &r.checks {
                    println!("{},\"{}\",{},{:e},{:e}", r.suite, c.name.replace('"', "'"), c.passed, c.residual, c.tolerance);
                }
            }
        }
        Format::Pretty => {
            for r in &reports {
                println!("{:<16} {}  ({} checks)", r.suite, if r.passed { "PASS" } else { "FAIL" }, r.checks.len());
                for c in r.checks.iter().filter(|c| !c.passed) {
                    println!("    failed: {}  residual {:.3e} > {:.1e}  {}", c.name, c.residual, c.tolerance, c.detail);
                }
            }
        }
    }
    Ok(if passed { Outcome::Ok } else { Outcome::Failed })
}
