//! Phase-estimation budgets: Trotterized (adaptive single-ancilla scheme
//! with repeat-until-success rotation synthesis) and qubitized.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gatecount::{step_cost_periodic_extended, step_cost_periodic_hubbard, StepCost};
use crate::qubitization::{ceil_log2, walk_costs, WalkCosts, DEFAULT_GAMMA, DEFAULT_THETA};
use crate::reference::AlphaRule;
use crate::trotterbounds::{w_tile_periodic, Model, ModelParams};

/// Prefactor of the phase-estimation step count.
pub const PE_CONSTANT: f64 = 6.203;
/// Repeat-until-success synthesis: `1.15 log₂(1/δ) + 9.2` T per rotation.
pub const RUS_SLOPE: f64 = 1.15;
pub const RUS_OFFSET: f64 = 9.2;

/// Synthesis-error fraction search range and grid size.
pub const X_MIN: f64 = 1e-4;
pub const X_MAX: f64 = 0.5;
pub const X_GRID: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Trotter,
    Qubitized,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Trotter => "trotter",
            Method::Qubitized => "qubitized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QpeEstimate {
    pub method: Method,
    pub n: u64,
    pub l: u64,
    pub eps: f64,
    /// Synthesis-error fraction; Trotter only.
    pub x: Option<f64>,
    /// Phasing ancillas (Trotter) or phase-register ancillas (qubitized).
    pub alpha: u64,
    pub total_t: f64,
    pub total_rot: f64,
    pub n_qubits: u64,
    /// `N_PE` (Trotter, continuous) or `N_W` (qubitized).
    pub repetitions: f64,
    /// `W` (Trotter) or `λ` (qubitized).
    pub scale: f64,
    /// T gates per rotation after synthesis; Trotter only.
    pub t_per_rotation: Option<f64>,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Number of Trotter steps, `6.203√W / ((1−x)^{3/2} ε^{3/2})`.
pub fn n_pe(w: f64, eps: f64, x: f64) -> f64 {
    PE_CONSTANT * w.sqrt() / ((1.0 - x).powf(1.5) * eps.powf(1.5))
}

/// Synthesis T gates for the `N_R` rotations of one step.
pub fn n_rt(n_r: f64, w: f64, eps: f64, x: f64) -> f64 {
    if n_r == 0.0 {
        return 0.0;
    }
    let arg = n_r * (3.0 * w).sqrt() / (x * (1.0 - x).sqrt() * eps.powf(1.5));
    n_r * (RUS_SLOPE * arg.log2() + RUS_OFFSET)
}

/// Total T gates for a fixed `x`.
pub fn trotter_total_t(step: &StepCost, w: f64, eps: f64, x: f64) -> f64 {
    n_pe(w, eps, x) * (n_rt(step.n_rot as f64, w, eps, x) + step.n_t as f64)
}

/// Geometric grid over `[X_MIN, X_MAX]`.
pub fn x_grid() -> Vec<f64> {
    let ratio = (X_MAX / X_MIN).ln() / (X_GRID - 1) as f64;
    (0..X_GRID).map(|k| X_MIN * (ratio * k as f64).exp()).collect()
}

/// Grid search followed by a golden-section refinement inside the bracket
/// around the best grid point.
pub fn optimize_x(step: &StepCost, w: f64, eps: f64) -> f64 {
    let grid = x_grid();
    let f = |x: f64| trotter_total_t(step, w, eps, x);
    let best = (0..grid.len()).min_by(|&a, &b| f(grid[a]).total_cmp(&f(grid[b]))).unwrap_or(0);
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let refined = 0.5 * (lo + hi);
    if f(refined) <= f(grid[best]) {
        refined
    } else {
        grid[best]
    }
}

/// Trotterized QPE budget for one step cost and error norm `W`. With
/// `x = None` the synthesis fraction is optimized.
pub fn trotter_qpe(step: &StepCost, w: f64, eps: f64, x: Option<f64>) -> Result<QpeEstimate> {
    check_eps(eps)?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidParameter(format!("W must be positive, got {w}")));
    }
    let x = match x {
        Some(x) if x > 0.0 && x < 1.0 => x,
        Some(x) => return Err(Error::InvalidParameter(format!("x must lie in (0, 1), got {x}"))),
        None => optimize_x(step, w, eps),
    };
    let steps = n_pe(w, eps, x);
    let rt = n_rt(step.n_rot as f64, w, eps, x);
    Ok(QpeEstimate {
        method: Method::Trotter,
        n: 0,
        l: 0,
        eps,
        x: Some(x),
        alpha: step.alpha,
        total_t: steps * (rt + step.n_t as f64),
        total_rot: steps * step.n_rot as f64,
        // one ancilla for phase estimation, one for synthesis
        n_qubits: step.n_qubits + 2,
        repetitions: steps,
        scale: w,
        t_per_rotation: if step.n_rot > 0 { Some(rt / step.n_rot as f64) } else { None },
    })
}

/// Walk repetitions `⌈πλ / 2ε⌉`.
pub fn n_walk(lambda: f64, eps: f64) -> u64 {
    (std::f64::consts::PI * lambda / (2.0 * eps)).ceil() as u64
}

/// Phase-register ancillas `2⌈log₂(N_W + 1)⌉ − 1`.
pub fn alpha_pe(n_w: u64) -> u64 {
    2 * ceil_log2(n_w + 1) - 1
}

pub fn qubitized_qpe(walk: &WalkCosts, eps: f64) -> Result<QpeEstimate> {
    check_eps(eps)?;
    let nw = n_walk(walk.lambda, eps).max(1);
    let a = alpha_pe(nw);
    // the unary iterator over the phase register adds 4N_W − 4
    let total = nw * walk.per_walk_t() + 4 * nw - 4;
    Ok(QpeEstimate {
        method: Method::Qubitized,
        n: walk.n,
        l: walk.l,
        eps,
        x: None,
        alpha: a,
        total_t: total as f64,
        total_rot: 0.0,
        n_qubits: walk.n_qubits_walk + a,
        repetitions: nw as f64,
        scale: walk.lambda,
        t_per_rotation: None,
    })
}

/// Energy accuracy as a function of system size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum EpsRule {
    Fixed(f64),
    /// `ε = c·N`
    PerSite(f64),
}

impl EpsRule {
    pub fn eps(self, n: u64) -> f64 {
        match self {
            EpsRule::Fixed(e) => e,
            EpsRule::PerSite(c) => c * n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub tau: f64,
    pub u: f64,
    pub v: f64,
    pub sizes: Vec<usize>,
    pub eps_rule: EpsRule,
    pub alphas: Vec<AlphaRule>,
    /// Also emit qubitized rows (Hubbard only).
    pub qubitized: bool,
    pub theta: u64,
    pub gamma: u64,
    /// Fixed synthesis fraction; optimized when absent.
    pub x: Option<f64>,
}

impl SweepConfig {
    pub fn new(model: Model, eps_rule: EpsRule) -> Self {
        Self {
            model,
            tau: 1.0,
            u: 4.0,
            v: 2.0,
            sizes: crate::reference::SIZES.to_vec(),
            eps_rule,
            alphas: AlphaRule::ALL.to_vec(),
            qubitized: model == Model::Hubbard,
            theta: DEFAULT_THETA,
            gamma: DEFAULT_GAMMA,
            x: None,
        }
    }

    fn params(&self) -> ModelParams {
        match self.model {
            Model::Hubbard => ModelParams::hubbard(self.tau, self.u),
            Model::ExtendedHubbard => ModelParams::extended(self.tau, self.u, self.v),
            Model::Ppp => ModelParams::ppp(self.tau, self.u, Vec::new()),
        }
    }
}

/// Step cost on the periodic honeycomb for a model and phasing rule.
pub fn periodic_step_cost(model: Model, n: u64, rule: AlphaRule) -> Result<StepCost> {
    let m = rule.group_size(n);
    match model {
        Model::Hubbard => step_cost_periodic_hubbard(n, m),
        Model::ExtendedHubbard => step_cost_periodic_extended(n, m),
        Model::Ppp => Err(Error::UnsupportedBound("the ppp model".into())),
    }
}

/// Rows for every size: one Trotter row per phasing rule, then the
/// qubitized row. Sizes run in parallel; output order is fixed.
pub fn crossover_sweep(cfg: &SweepConfig, exec: Execution) -> Result<Vec<QpeEstimate>> {
    let params = cfg.params();
    params.validate()?;
    let per_size = exec.try_map(&cfg.sizes, |&l| -> Result<Vec<QpeEstimate>> {
        let n = 2 * (l * l) as u64;
        let eps = cfg.eps_rule.eps(n);
        let mut rows = Vec::new();
        if !cfg.alphas.is_empty() {
            let w = w_tile_periodic(l, &params, Execution::Sequential)?.w_tile;
            for &rule in &cfg.alphas {
                let step = periodic_step_cost(cfg.model, n, rule)?;
                let mut e = trotter_qpe(&step, w, eps, cfg.x)?;
                e.n = n;
                e.l = l as u64;
                rows.push(e);
            }
        }
        if cfg.qubitized && cfg.model == Model::Hubbard {
            let walk = walk_costs(l as u64, cfg.tau, cfg.u, cfg.theta, cfg.gamma)?;
            rows.push(qubitized_qpe(&walk, eps)?);
        }
        Ok(rows)
    })?;
    Ok(per_size.into_iter().flatten().collect())
}

pub const CSV_HEADER: [&str; 11] =
    ["method", "N", "L", "eps", "x", "alpha", "total_t", "total_rot", "n_qubits", "N_PE|N_W", "W|lambda"];

/// Writes the fixed-column CSV. Floats use Rust's shortest round-trip
/// formatting, which is locale-free and deterministic.
pub fn write_csv<W: Write>(rows: &[QpeEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.n.to_string(),
            r.l.to_string(),
            r.eps.to_string(),
            r.x.map(|x| x.to_string()).unwrap_or_default(),
            r.alpha.to_string(),
            r.total_t.to_string(),
            r.total_rot.to_string(),
            r.n_qubits.to_string(),
            r.repetitions.to_string(),
            r.scale.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_repetitions_at_32() {
        assert_eq!(n_walk(128.0, 0.05), 4022);
        let w = walk_costs(4, 1.0, 4.0, 10, 40).unwrap();
        assert_eq!(w.per_walk_t(), 1233);
        let q = qubitized_qpe(&w, 0.05).unwrap();
        assert_eq!(q.total_t, (4022 * 1233 + 4 * 4022 - 4) as f64);
        assert_eq!(q.alpha, 2 * 12 - 1);
    }

    #[test]
    fn grid_is_geometric() {
        let g = x_grid();
        assert_eq!(g.len(), X_GRID);
        assert!((g[0] - X_MIN).abs() < 1e-18 && (g[X_GRID - 1] - X_MAX).abs() < 1e-12);
    }

    #[test]
    fn optimum_beats_every_grid_point() {
        let step = step_cost_periodic_hubbard(32, 1).unwrap();
        let x = optimize_x(&step, 215.0, 0.05);
        let best = trotter_total_t(&step, 215.0, 0.05, x);
        assert!(x_grid().iter().all(|&g| trotter_total_t(&step, 215.0, 0.05, g) >= best));
    }

    #[test]
    fn rejects_bad_inputs() {
        let step = step_cost_periodic_hubbard(32, 1).unwrap();
        assert!(trotter_qpe(&step, 215.0, 0.0, None).is_err());
        assert!(trotter_qpe(&step, 215.0, 0.05, Some(1.0)).is_err());
    }

    #[test]
    fn empty_sweep_gives_header_only() {
        let mut cfg = SweepConfig::new(Model::Hubbard, EpsRule::Fixed(0.05));
        cfg.sizes.clear();
        let rows = crossover_sweep(&cfg, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER.join(","));
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.7)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.7).abs() < 1e-12);
    }
}
