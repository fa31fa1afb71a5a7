//! Curve families for the standard figures, with their default scenarios.

use std::fmt;
use std::str::FromStr;

use fblec::compensate::{
    graceful_theta, joint_sweep, loss_factors, optimize_joint, others_sinr_after_boost,
};
use fblec::effcap::ec;
use fblec::{
    delay_outage_probability, max_delay_for_outage, EcMaximizer, Link, NetworkConfig,
    Priorities, PsiModel, UrConstraint,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::sweep::push_base;
use crate::table::Table;

/// Reliability target used for the operational curves when none is given.
pub const DEFAULT_FIG3_TARGET: f64 = 1e-3;
/// Operating points sampled across `[ρ_s, ρ_i]` for the blocklength comparison.
pub const FIG8_POINTS: usize = 41;
const OUTAGE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Figure::Fig2 => "EC vs error probability for 1, 5 and 10 colliding nodes",
            Figure::Fig3 => "maximum and reliability-constrained EC vs number of nodes",
            Figure::Fig4 => "EC vs error probability before and after power control",
            Figure::Fig5 => "compensation loss and gain factors vs number of nodes",
            Figure::Fig6 => "collision and total loss factors vs number of nodes",
            Figure::Fig7 => "delay outage vs delay bound before and after relaxing theta",
            Figure::Fig8 => "joint operating points for two blocklengths",
            Figure::Fig9 => "joint objective vs SINR left to the other nodes",
            Figure::Fig10 => "EC of the other nodes under collision, joint and full power control",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|f| f.id() == s).ok_or_else(|| {
            CliError::Usage(format!("unknown figure `{s}` (expected fig2 through fig10)"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub model: PsiModel,
    /// Overrides the reliability target of the constrained curves.
    pub target_eps: Option<f64>,
    pub priorities: Option<Priorities>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            model: PsiModel::Exact,
            target_eps: None,
            priorities: None,
        }
    }
}

pub fn render(fig: Figure, opts: &FigureOptions) -> Result<Table> {
    let mut t = match fig {
        Figure::Fig2 => fig2(opts),
        Figure::Fig3 => fig3(opts),
        Figure::Fig4 => fig4(opts),
        Figure::Fig5 => loss_curves(opts, &["alpha_c", "gamma_c"]),
        Figure::Fig6 => loss_curves(opts, &["alpha", "alpha_t"]),
        Figure::Fig7 => fig7(opts),
        Figure::Fig8 => fig8(opts),
        Figure::Fig9 => fig9(opts),
        Figure::Fig10 => fig10(opts),
    }?;
    t.metadata.insert(0, ("figure".into(), format!("{} ({})", fig, fig.description())));
    t.metadata.insert(1, ("model".into(), opts.model.name().into()));
    Ok(t)
}

fn cfg(n: u32, snr: f64, t: u32, theta: f64) -> Result<NetworkConfig> {
    Ok(NetworkConfig::new(n, snr, t, theta)?)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| if k + 1 == n { hi } else { (a + (b - a) * k as f64 / (n - 1) as f64).exp() })
        .collect()
}

/// Evaluates `row` at every `x` in parallel and pushes the successful rows
/// in order.
fn fill<F>(table: &mut Table, xs: &[f64], row: F)
where
    F: Fn(f64) -> fblec::Result<Vec<f64>> + Sync,
{
    let rows: Vec<_> = xs.par_iter().map(|&x| row(x)).collect();
    let mut dropped = 0;
    for (x, r) in xs.iter().zip(rows) {
        match r {
            Ok(r) => table.push(r),
            Err(e) => {
                dropped += 1;
                log::warn!("{} = {x}: dropped ({e})", table.header[0]);
            }
        }
    }
    if dropped > 0 {
        table.meta("dropped_points", dropped);
    }
}

fn eps_grid() -> Vec<f64> {
    log_grid(1e-4, 0.5, 120)
}

fn fig2(opts: &FigureOptions) -> Result<Table> {
    let nodes = [1u32, 5, 10];
    let mut t = Table::new(["eps", "ec_n1", "ec_n5", "ec_n10"]);
    let base = cfg(1, 2.0, 1000, 0.01)?;
    push_base(&mut t, &base);
    t.meta("n_nodes", "1,5,10");
    let solver = EcMaximizer::new(opts.model);
    let links = nodes
        .iter()
        .map(|&n| Link::under_collision(&base.with_nodes(n)))
        .collect::<fblec::Result<Vec<_>>>()?;
    for (n, l) in nodes.iter().zip(&links) {
        let best = solver.max_ec(l)?;
        t.meta(format!("optimum_n{n}"), format!("eps* = {}, ec = {}", best.eps_star, best.ec_value));
    }
    fill(&mut t, &eps_grid(), |e| {
        let mut row = vec![e];
        for l in &links {
            row.push(ec(opts.model, l, e)?);
        }
        Ok(row)
    });
    Ok(t)
}

fn fig3(opts: &FigureOptions) -> Result<Table> {
    let thetas = [0.001, 0.01];
    let target = opts.target_eps.unwrap_or(DEFAULT_FIG3_TARGET);
    let constraint = UrConstraint::new(target)
        .map_err(|_| CliError::config("--eps-target", format!("must lie in (0, 1), got {target}")))?;
    let mut t = Table::new([
        "n_nodes",
        "ec_max_theta0.001",
        "ec_op_theta0.001",
        "ec_max_theta0.01",
        "ec_op_theta0.01",
    ]);
    let base = cfg(1, 10.0, 1000, 0.01)?;
    push_base(&mut t, &base);
    t.meta("n_nodes", "1..30").meta("theta", "0.001,0.01").meta("snr_db", 10).meta("target_eps", target);
    let free = EcMaximizer::new(opts.model);
    let held = free.with_constraint(Some(constraint));
    let xs: Vec<f64> = (1..=30).map(f64::from).collect();
    fill(&mut t, &xs, |n| {
        let mut row = vec![n];
        for &th in &thetas {
            let l = Link::under_collision(&base.with_nodes(n as u32).with_delay_exponent(th))?;
            row.push(free.ec_max(&l)?);
            row.push(held.ec_max(&l)?);
        }
        Ok(row)
    });
    Ok(t)
}

fn fig4(opts: &FigureOptions) -> Result<Table> {
    let c = cfg(5, 1.0, 1000, 0.1)?;
    let mut t = Table::new(["eps", "ec_collision", "ec_others_after_boost", "ec_compensating"]);
    push_base(&mut t, &c);
    let collided = Link::under_collision(&c)?;
    let others = collided.with_sinr(others_sinr_after_boost(&c)?)?;
    // full power control hands the boosted node its interference-free SINR
    let boosted = collided.with_sinr(c.snr)?;
    t.meta("sinr_others_after_boost", others.sinr);
    fill(&mut t, &eps_grid(), |e| {
        Ok(vec![
            e,
            ec(opts.model, &collided, e)?,
            ec(opts.model, &others, e)?,
            ec(opts.model, &boosted, e)?,
        ])
    });
    Ok(t)
}

fn loss_curves(opts: &FigureOptions, factors: &[&str]) -> Result<Table> {
    let thetas = [0.1, 0.001];
    let mut header = vec!["n_nodes".to_string()];
    for th in thetas {
        for f in factors {
            header.push(format!("{f}_theta{th}"));
        }
    }
    let mut t = Table::new(header);
    let base = cfg(2, 1.0, 1000, 0.1)?;
    push_base(&mut t, &base);
    t.meta("n_nodes", "2..30").meta("theta", "0.1,0.001");
    let solver = EcMaximizer::new(opts.model);
    let xs: Vec<f64> = (2..=30).map(f64::from).collect();
    fill(&mut t, &xs, |n| {
        let mut row = vec![n];
        for th in thetas {
            let r = loss_factors(&base.with_nodes(n as u32).with_delay_exponent(th), &solver)?;
            for f in factors {
                row.push(match *f {
                    "alpha" => r.alpha,
                    "alpha_c" => r.alpha_c,
                    "gamma_c" => r.gamma_c,
                    _ => r.alpha_t,
                });
            }
        }
        Ok(row)
    });
    Ok(t)
}

fn fig7(opts: &FigureOptions) -> Result<Table> {
    let c = cfg(5, 1.0, 1000, 0.05)?;
    let solver = EcMaximizer::new(opts.model);
    let pre = solver.ec_max(&Link::under_collision(&c)?)?;
    let relaxed = graceful_theta(&c, &solver)?;
    let mut t = Table::new(["d_max", "outage_before", "outage_after"]);
    push_base(&mut t, &c);
    t.meta("ec_before", pre)
        .meta("theta_relaxed", relaxed.theta)
        .meta("ec_after", relaxed.ec_achieved)
        .meta("d_max_at_1e-3", format!(
            "{} before, {} after",
            max_delay_for_outage(pre, c.delay_exponent, OUTAGE)?,
            max_delay_for_outage(relaxed.ec_achieved, relaxed.theta, OUTAGE)?
        ));
    let xs: Vec<f64> = (1..=160).map(|k| 50.0 * k as f64).collect();
    fill(&mut t, &xs, |d| {
        Ok(vec![
            d,
            delay_outage_probability(pre, c.delay_exponent, d)?,
            delay_outage_probability(relaxed.ec_achieved, relaxed.theta, d)?,
        ])
    });
    Ok(t)
}

fn fig8(opts: &FigureOptions) -> Result<Table> {
    let blocklengths = [700u32, 1000];
    let mut header = vec!["rho_s_op".to_string()];
    for tf in blocklengths {
        header.extend([
            format!("alpha_c_op_t{tf}"),
            format!("theta2_t{tf}"),
            format!("d_max_t{tf}"),
        ]);
    }
    let mut t = Table::new(header);
    let base = cfg(5, 1.0, 1000, 0.1)?;
    push_base(&mut t, &base);
    t.meta("blocklength", "700,1000")
        .meta("outage", OUTAGE)
        .meta("sampling", format!("{FIG8_POINTS} evenly spaced points over [rho_s, rho_i]"));
    let solver = EcMaximizer::new(opts.model);
    let prio = opts.priorities.unwrap_or(Priorities { eta_alpha: 1.0, eta_theta: 1.0 });
    let mut curves = Vec::new();
    for tf in blocklengths {
        let c = cfg(5, 1.0, tf, 0.1)?;
        let ec_free = solver.ec_max(&Link::new(c.snr, c.delay_exponent, tf)?)?;
        curves.push((joint_sweep(&c, prio, &solver, FIG8_POINTS)?, ec_free));
    }
    for k in 0..FIG8_POINTS {
        let mut row = Vec::new();
        for (sweep, ec_free) in &curves {
            match &sweep[k] {
                Ok(p) => {
                    if row.is_empty() {
                        row.push(p.rho_s_op);
                    }
                    row.extend([
                        p.alpha_c_op,
                        p.theta2,
                        max_delay_for_outage(*ec_free, p.theta2, OUTAGE)?,
                    ]);
                }
                Err(e) => {
                    log::warn!("fig8 point {k}: dropped ({e})");
                    row.clear();
                    break;
                }
            }
        }
        if !row.is_empty() {
            t.push(row);
        }
    }
    Ok(t)
}

fn joint_defaults(opts: &FigureOptions) -> Result<(NetworkConfig, Priorities)> {
    let prio = opts.priorities.unwrap_or(Priorities { eta_alpha: 1.0, eta_theta: 4.0 });
    Ok((cfg(15, 2.0, 1000, 0.1)?, prio))
}

fn fig9(opts: &FigureOptions) -> Result<Table> {
    let (c, prio) = joint_defaults(opts)?;
    let solver = EcMaximizer::new(opts.model);
    let mut t = Table::new(["rho_s_op", "eta", "alpha_c_op", "theta2", "rho_c_op"]);
    push_base(&mut t, &c);
    t.meta("priorities", format!("{},{}", prio.eta_alpha, prio.eta_theta));
    let best = optimize_joint(&c, prio, &solver)?;
    t.meta("optimum", format!(
        "rho_s_op = {}, eta = {}, alpha_c_op = {}, theta2 = {}, rho_c_op = {}",
        best.rho_s_op, best.eta, best.alpha_c_op, best.theta2, best.rho_c_op
    ));
    for (k, p) in joint_sweep(&c, prio, &solver, fblec::compensate::JOINT_GRID)?
        .into_iter()
        .enumerate()
    {
        match p {
            Ok(p) => t.push(vec![p.rho_s_op, p.eta, p.alpha_c_op, p.theta2, p.rho_c_op]),
            Err(e) => log::warn!("fig9 point {k}: dropped ({e})"),
        }
    }
    Ok(t)
}

fn fig10(opts: &FigureOptions) -> Result<Table> {
    let (c, prio) = joint_defaults(opts)?;
    let solver = EcMaximizer::new(opts.model);
    let best = optimize_joint(&c, prio, &solver)?;
    let collided = Link::under_collision(&c)?;
    let joint = collided.with_sinr(best.rho_s_op)?;
    let power = collided.with_sinr(others_sinr_after_boost(&c)?)?;
    let mut t = Table::new(["eps", "ec_collision", "ec_others_joint", "ec_others_power_control"]);
    push_base(&mut t, &c);
    t.meta("priorities", format!("{},{}", prio.eta_alpha, prio.eta_theta))
        .meta("rho_s_op", best.rho_s_op)
        .meta("alpha_c_op", best.alpha_c_op);
    fill(&mut t, &eps_grid(), |e| {
        Ok(vec![
            e,
            ec(opts.model, &collided, e)?,
            ec(opts.model, &joint, e)?,
            ec(opts.model, &power, e)?,
        ])
    });
    Ok(t)
}
