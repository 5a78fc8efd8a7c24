//! Command implementations behind the `hubtile` binary.
//!
//! Every command renders into a string first and writes it in one go, so
//! identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hubbard_tiles::exec::Execution;
use hubbard_tiles::gatecount::{step_cost_fragment, step_cost_ppp, StepCost};
use hubbard_tiles::lattice::{rhombus_fragment_cells, trapezoid_fragment_cells, LatticeGraph, LatticeKind};
use hubbard_tiles::oracle::{self, Level, Report};
use hubbard_tiles::qpe::{self, EpsRule, SweepConfig};
use hubbard_tiles::qubitization::{walk_costs, LedgerRow};
use hubbard_tiles::reference::{self, round_half_away, AlphaRule, SITES, SIZES};
use hubbard_tiles::tiling::{cover_hex_fragment, cover_periodic_hex, validate_cover, SectionCover};
use hubbard_tiles::trotterbounds::{periodic_sweep, w_tile, Model, ModelParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hubtile", version, about = "Resource estimates and exact checks for tiled Trotter simulation of Hubbard models")]
pub struct Cli {
    #[command(flatten)]
    pub shared: Shared,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyLevel {
    Fast,
    Full,
}

/// Options shared by all subcommands. Any of them may also come from the
/// `--config` file; flags win.
#[derive(Clone, Debug, Default, Args)]
pub struct Shared {
    /// Key-value config file (`key = value`, `#` comments).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// periodic, hexagon, rhombus, trapezoid, ring:N, square:WxH or a lattice JSON file.
    #[arg(long, global = true)]
    pub lattice: Option<String>,
    /// Linear size, or a comma-separated list for sweeps.
    #[arg(long = "L", global = true)]
    pub l: Option<String>,
    /// hubbard, extended or ppp.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long = "U", global = true)]
    pub u: Option<f64>,
    #[arg(long = "V", global = true)]
    pub v: Option<f64>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Comma-separated accuracies; `0.05` is fixed, `0.005N` scales with N.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// Comma-separated phasing rules: 0, N/4-1, N/2-1, N-1.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub theta: Option<u64>,
    #[arg(long, global = true)]
    pub gamma: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error norms and gate counts on the periodic honeycomb next to the reference table.
    Table2,
    /// Total T counts of phase estimation for tile Trotter and qubitization.
    Qpe {
        /// Fixed rotation-synthesis fraction instead of the optimum.
        #[arg(long)]
        x: Option<f64>,
    },
    /// Trotter error breakdown for one lattice.
    Bounds,
    /// Per-step gate counts, or the walk-operator ledger with --walk.
    Gates {
        #[arg(long)]
        walk: bool,
    },
    /// Lattice JSON.
    Lattice,
    /// Section cover JSON, or validation of a given cover with --check.
    Cover {
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Exact oracle suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: VerifyLevel,
        /// Multiplies every error bound; values below 1 inject failures.
        #[arg(long, default_value_t = 1.0)]
        bound_scale: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Lib(hubbard_tiles::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<hubbard_tiles::Error> for CliError {
    fn from(e: hubbard_tiles::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return config_err(format!("line {}: expected `key = value`", no + 1));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().or_else(|_| config_err(format!("bad value `{v}` for `{key}`")))
}

impl Shared {
    /// Fills unset options from a config map; unknown keys are rejected.
    pub fn merge(&mut self, cfg: &BTreeMap<String, String>) -> CliResult<()> {
        for (k, v) in cfg {
            match k.as_str() {
                "lattice" => self.lattice = self.lattice.take().or(Some(v.clone())),
                "L" => self.l = self.l.take().or(Some(v.clone())),
                "model" => self.model = self.model.take().or(Some(v.clone())),
                "U" => self.u = self.u.or(Some(parse_value(k, v)?)),
                "V" => self.v = self.v.or(Some(parse_value(k, v)?)),
                "tau" => self.tau = self.tau.or(Some(parse_value(k, v)?)),
                "eps" => self.eps = self.eps.take().or(Some(v.clone())),
                "alpha" => self.alpha = self.alpha.take().or(Some(v.clone())),
                "theta" => self.theta = self.theta.or(Some(parse_value(k, v)?)),
                "gamma" => self.gamma = self.gamma.or(Some(parse_value(k, v)?)),
                "out" => self.out = self.out.take().or(Some(PathBuf::from(v))),
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(
                            Format::from_str(v, true).or_else(|_| config_err(format!("bad format `{v}`")))?,
                        );
                    }
                }
                other => return config_err(format!("unknown config key `{other}`")),
            }
        }
        Ok(())
    }

    fn model(&self) -> CliResult<Model> {
        self.model.as_deref().unwrap_or("hubbard").parse().map_err(CliError::from)
    }

    fn params(&self) -> CliResult<ModelParams> {
        let tau = self.tau.unwrap_or(1.0);
        let u = self.u.unwrap_or(4.0);
        let p = match self.model()? {
            Model::Hubbard => ModelParams::hubbard(tau, u),
            Model::ExtendedHubbard => ModelParams::extended(tau, u, self.v.unwrap_or(2.0)),
            Model::Ppp => ModelParams::ppp(tau, u, Vec::new()),
        };
        p.validate()?;
        Ok(p)
    }

    fn sizes(&self) -> CliResult<Option<Vec<usize>>> {
        let Some(s) = self.l.as_deref() else { return Ok(None) };
        let s = s.trim();
        if s.is_empty() || s == "none" {
            return Ok(Some(Vec::new()));
        }
        s.split(',').map(|x| parse_value("L", x.trim())).collect::<CliResult<Vec<_>>>().map(Some)
    }

    fn single_size(&self) -> CliResult<usize> {
        match self.sizes()?.as_deref() {
            None => Ok(4),
            Some([l]) => Ok(*l),
            Some(_) => config_err("this command takes a single --L"),
        }
    }

    fn alphas(&self) -> CliResult<Option<Vec<AlphaRule>>> {
        let Some(s) = self.alpha.as_deref() else { return Ok(None) };
        if s.trim().is_empty() {
            return Ok(Some(Vec::new()));
        }
        s.split(',').map(|a| a.parse::<AlphaRule>().map_err(CliError::from)).collect::<CliResult<_>>().map(Some)
    }

    fn eps_rules(&self) -> CliResult<Vec<EpsRule>> {
        let Some(s) = self.eps.as_deref() else {
            return Ok(vec![EpsRule::PerSite(0.005), EpsRule::Fixed(0.05)]);
        };
        s.split(',').map(|e| parse_eps(e.trim())).collect()
    }

    fn lattice(&self) -> CliResult<LatticeGraph> {
        let spec = self.lattice.as_deref().unwrap_or("periodic");
        let g = match spec {
            "periodic" => {
                let l = self.single_size()?;
                LatticeGraph::periodic_hex(l, l)?
            }
            "hexagon" => LatticeGraph::hex_fragment(&[(0, 0)])?,
            "rhombus" => LatticeGraph::hex_fragment(&rhombus_fragment_cells())?,
            "trapezoid" => LatticeGraph::hex_fragment(&trapezoid_fragment_cells())?,
            s if s.starts_with("ring:") => LatticeGraph::ring(parse_value("lattice", &s[5..])?)?,
            s if s.starts_with("square:") => {
                let Some((w, h)) = s[7..].split_once('x') else {
                    return config_err(format!("bad square lattice `{s}`, expected square:WxH"));
                };
                LatticeGraph::square_fragment(parse_value("lattice", w)?, parse_value("lattice", h)?)?
            }
            path => {
                let text = fs::read_to_string(path)
                    .or_else(|e| config_err(format!("cannot read lattice `{path}`: {e}")))?;
                LatticeGraph::from_json(&text)?
            }
        };
        Ok(g)
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// `0.05` is a fixed accuracy, `0.005N` one proportional to the site count.
pub fn parse_eps(s: &str) -> CliResult<EpsRule> {
    let (num, per_site) = match s.strip_suffix('N') {
        Some(head) => (head.trim_end_matches('*'), true),
        None => (s, false),
    };
    let v: f64 = parse_value("eps", num)?;
    if !(v.is_finite() && v > 0.0) {
        return config_err(format!("eps must be positive, got `{s}`"));
    }
    Ok(if per_site { EpsRule::PerSite(v) } else { EpsRule::Fixed(v) })
}

fn default_cover(lattice: &LatticeGraph) -> CliResult<SectionCover> {
    Ok(match lattice.kind() {
        LatticeKind::PeriodicHex => cover_periodic_hex(lattice)?,
        _ => cover_hex_fragment(lattice)?,
    })
}

/// One row of the side-by-side reference table.
#[derive(Clone, Debug, Serialize)]
pub struct Table2Row {
    pub model: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "L")]
    pub l: usize,
    pub alpha_rule: String,
    pub alpha: u64,
    pub w_tile: f64,
    pub w_tile_rounded: i64,
    pub w_tile_ref: i64,
    pub w_tile_diff: i64,
    pub n_q: u64,
    pub n_q_ref: u64,
    pub n_q_diff: i64,
    pub n_r: u64,
    pub n_r_ref: u64,
    pub n_r_diff: i64,
    pub n_t: u64,
    pub n_t_ref: u64,
    pub n_t_diff: i64,
}

pub fn table2_rows(exec: Execution) -> CliResult<Vec<Table2Row>> {
    let mut rows = Vec::new();
    for params in [ModelParams::hubbard(1.0, 4.0), ModelParams::extended(1.0, 4.0, 2.0)] {
        let model = params.model;
        let sweep = periodic_sweep(&SIZES, &params, exec)?;
        let w_ref = reference::w_tile(model).expect("reference table covers both models");
        for rule in AlphaRule::ALL {
            let res = reference::resources(model, rule).expect("reference table covers every rule");
            for (k, (l, b)) in sweep.iter().enumerate() {
                let n = SITES[k];
                let step = qpe::periodic_step_cost(model, n, rule)?;
                let (q, r, t) = res[k];
                let w = round_half_away(b.w_tile);
                rows.push(Table2Row {
                    model: model.to_string(),
                    n,
                    l: *l,
                    alpha_rule: rule.label().to_string(),
                    alpha: rule.alpha(n),
                    w_tile: b.w_tile,
                    w_tile_rounded: w,
                    w_tile_ref: w_ref[k],
                    w_tile_diff: w - w_ref[k],
                    n_q: step.n_qubits,
                    n_q_ref: q,
                    n_q_diff: step.n_qubits as i64 - q as i64,
                    n_r: step.n_rot,
                    n_r_ref: r,
                    n_r_diff: step.n_rot as i64 - r as i64,
                    n_t: step.n_t,
                    n_t_ref: t,
                    n_t_diff: step.n_t as i64 - t as i64,
                });
            }
        }
    }
    Ok(rows)
}

fn to_csv<T: Serialize>(rows: &[T], header_if_empty: &[&str]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header_if_empty).map_err(hubbard_tiles::Error::from)?;
    }
    for r in rows {
        w.serialize(r).map_err(hubbard_tiles::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Lib(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json<T: Serialize + ?Sized>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn key_value_csv(pairs: &[(String, String)]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).map_err(hubbard_tiles::Error::from)?;
    for (k, v) in pairs {
        w.write_record([k, v]).map_err(hubbard_tiles::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Lib(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn ledger_csv(rows: &[LedgerRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = hubbard_tiles::Error::from;
    w.write_record(["block", "element", "toffoli", "t", "ancilla", "warning"]).map_err(err)?;
    for r in rows {
        let block = serde_json::to_value(r.block)?;
        w.write_record([
            block.as_str().unwrap_or_default().to_string(),
            r.element.clone(),
            r.toffoli.to_string(),
            r.t.to_string(),
            r.ancilla.to_string(),
            r.warning.clone().unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Lib(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Output text and whether every check in it passed.
pub struct Rendered {
    pub text: String,
    pub ok: bool,
    /// Names of failed checks, for stderr.
    pub failures: Vec<String>,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Self { text, ok: true, failures: Vec::new() }
    }
}

pub fn render(cli: &Cli, exec: Execution) -> CliResult<Rendered> {
    let s = &cli.shared;
    match &cli.command {
        Command::Table2 => {
            let rows = table2_rows(exec)?;
            Ok(Rendered::ok(match s.format_or(Format::Csv) {
                Format::Csv => to_csv(&rows, &[])?,
                Format::Json => json(&rows)?,
            }))
        }
        Command::Qpe { x } => {
            let model = s.model()?;
            let params = s.params()?;
            let mut rows = Vec::new();
            for rule in s.eps_rules()? {
                let mut cfg = SweepConfig::new(model, rule);
                cfg.tau = params.tau;
                cfg.u = params.u;
                cfg.v = params.v;
                if let Some(sizes) = s.sizes()? {
                    cfg.sizes = sizes;
                }
                if let Some(a) = s.alphas()? {
                    cfg.alphas = a;
                }
                cfg.theta = s.theta.unwrap_or(cfg.theta);
                cfg.gamma = s.gamma.unwrap_or(cfg.gamma);
                cfg.x = *x;
                rows.extend(qpe::crossover_sweep(&cfg, exec)?);
            }
            Ok(Rendered::ok(match s.format_or(Format::Csv) {
                Format::Csv => {
                    let mut buf = Vec::new();
                    qpe::write_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                Format::Json => json(&rows)?,
            }))
        }
        Command::Bounds => {
            let lattice = s.lattice()?;
            let cover = default_cover(&lattice)?;
            let b = w_tile(&lattice, &cover, &s.params()?, exec)?;
            Ok(Rendered::ok(match s.format_or(Format::Json) {
                Format::Json => json(&b)?,
                Format::Csv => {
                    let mut pairs = vec![
                        ("w_so2".to_string(), b.w_so2.to_string()),
                        ("w_h".to_string(), b.w_h.to_string()),
                        ("w_tile".to_string(), b.w_tile.to_string()),
                    ];
                    pairs.extend(b.components.iter().map(|(k, v)| (k.clone(), v.to_string())));
                    key_value_csv(&pairs)?
                }
            }))
        }
        Command::Gates { walk } => {
            if *walk {
                let l = s.single_size()? as u64;
                let p = s.params()?;
                let w = walk_costs(
                    l,
                    p.tau,
                    p.u,
                    s.theta.unwrap_or(hubbard_tiles::qubitization::DEFAULT_THETA),
                    s.gamma.unwrap_or(hubbard_tiles::qubitization::DEFAULT_GAMMA),
                )?;
                eprintln!(
                    "walk: select {} T, prepare {} T, reflection {} T, lambda {}, qubits {}",
                    w.c_select, w.c_prepare, w.c_reflect, w.lambda, w.n_qubits_walk
                );
                for d in &w.discrepancies {
                    eprintln!("note: {d}");
                }
                return Ok(Rendered::ok(match s.format_or(Format::Json) {
                    Format::Json => w.ledger_json()? + "\n",
                    Format::Csv => ledger_csv(&w.element_ledger)?,
                }));
            }
            let cost = gate_cost(s)?;
            Ok(Rendered::ok(match s.format_or(Format::Json) {
                Format::Json => json(&cost)?,
                Format::Csv => to_csv(&[cost], &[])?,
            }))
        }
        Command::Lattice => Ok(Rendered::ok(s.lattice()?.to_json()? + "\n")),
        Command::Cover { check } => {
            let lattice = s.lattice()?;
            match check {
                None => Ok(Rendered::ok(default_cover(&lattice)?.to_json()? + "\n")),
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .or_else(|e| config_err(format!("cannot read cover `{}`: {e}", path.display())))?;
                    let report = validate_cover(&lattice, &SectionCover::from_json(&text)?);
                    let failures = report.violations.iter().map(|v| v.to_string()).collect();
                    Ok(Rendered { text: json(&report)?, ok: report.valid, failures })
                }
            }
        }
        Command::Verify { level, bound_scale } => {
            if !(bound_scale.is_finite() && *bound_scale >= 0.0) {
                return config_err("bound scale must be finite and nonnegative");
            }
            let level = match level {
                VerifyLevel::Fast => Level::Fast,
                VerifyLevel::Full => Level::Full,
            };
            let reports = oracle::run_suite(level, *bound_scale, exec)?;
            let failures: Vec<String> =
                reports.iter().filter(|r| !r.pass).map(|r| format!("{} [{}]", r.check, r.instance)).collect();
            let text = match s.format_or(Format::Json) {
                Format::Json => json(&reports)?,
                Format::Csv => to_csv::<Report>(&reports, &[])?,
            };
            Ok(Rendered { text, ok: failures.is_empty(), failures })
        }
    }
}

fn gate_cost(s: &Shared) -> CliResult<StepCost> {
    let model = s.model()?;
    let lattice = s.lattice()?;
    let n = lattice.n_sites() as u64;
    let rule = match s.alphas()?.as_deref() {
        None | Some([]) => AlphaRule::Off,
        Some([r]) => *r,
        Some(_) => return config_err("gates takes a single --alpha"),
    };
    if lattice.kind() == LatticeKind::PeriodicHex {
        return Ok(match model {
            Model::Ppp => step_cost_ppp(n, rule != AlphaRule::Off),
            m => qpe::periodic_step_cost(m, n, rule)?,
        });
    }
    if model != Model::Hubbard || rule != AlphaRule::Off {
        return config_err("fragment gate counts are available for the Hubbard model without phasing");
    }
    Ok(step_cost_fragment(&lattice, &default_cover(&lattice)?)?)
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(mut cli: Cli) -> i32 {
    if let Some(path) = cli.shared.config.clone() {
        let merged = fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read config `{}`: {e}", path.display())))
            .and_then(|t| parse_config(&t))
            .and_then(|m| cli.shared.merge(&m));
        if let Err(e) = merged {
            eprintln!("hubtile: {e}");
            return EXIT_CONFIG;
        }
    }
    let rendered = match render(&cli, Execution::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hubtile: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = write_output(cli.shared.out.as_deref(), &rendered.text) {
        eprintln!("hubtile: cannot write output: {e}");
        return EXIT_CONFIG;
    }
    for f in &rendered.failures {
        eprintln!("FAIL {f}");
    }
    if rendered.ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
