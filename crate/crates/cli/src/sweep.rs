//! One-dimensional parameter sweeps around a base scenario.

use std::fmt;
use std::str::FromStr;

use fblec::compensate::{graceful_theta, joint_plan, joint_range, loss_factors};
use fblec::effcap::{ec, ec_infinite_blocklength, psi};
use fblec::{
    delay_outage_probability, EcMaximizer, Link, NetworkConfig, Priorities, PsiModel,
    UrConstraint,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Eps,
    NNodes,
    Theta,
    Snr,
    RhoSOp,
    DMax,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::Eps,
        SweepAxis::NNodes,
        SweepAxis::Theta,
        SweepAxis::Snr,
        SweepAxis::RhoSOp,
        SweepAxis::DMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Eps => "eps",
            SweepAxis::NNodes => "n_nodes",
            SweepAxis::Theta => "theta",
            SweepAxis::Snr => "snr",
            SweepAxis::RhoSOp => "rho_s_op",
            SweepAxis::DMax => "d_max",
        }
    }

    fn logarithmic(self) -> bool {
        matches!(self, SweepAxis::Eps | SweepAxis::Theta | SweepAxis::Snr)
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            SweepAxis::Eps => &["eps", "psi", "ec"],
            SweepAxis::NNodes => &[
                "n_nodes", "sinr", "eps_star", "ec_max", "alpha", "alpha_c", "gamma_c", "alpha_t",
            ],
            SweepAxis::Theta => &["theta", "eps_star", "ec_max", "ec_infinite_blocklength"],
            SweepAxis::Snr => &["snr", "sinr", "eps_star", "ec_max"],
            SweepAxis::RhoSOp => &["rho_s_op", "rho_c_op", "alpha_c_op", "theta2", "eta"],
            SweepAxis::DMax => &["d_max", "outage_collision", "outage_relaxed"],
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|a| a.name()).collect();
                CliError::Usage(format!("unknown sweep axis `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub base: NetworkConfig,
    pub constraint: Option<UrConstraint>,
    pub priorities: Option<Priorities>,
    pub model: PsiModel,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.steps < 2 {
            return usage(format!("steps must be at least 2, got {}", self.steps));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return usage(format!("need start < stop, got {} .. {}", self.start, self.stop));
        }
        match self.axis {
            SweepAxis::Eps if !(self.start > 0.0 && self.stop < 1.0) => {
                usage("eps range must lie inside (0, 1)".into())
            }
            SweepAxis::Theta | SweepAxis::Snr | SweepAxis::DMax if !(self.start > 0.0) => {
                usage(format!("{} range must be positive", self.axis))
            }
            SweepAxis::NNodes => {
                if self.start < 1.0 || self.start.fract() != 0.0 || self.stop.fract() != 0.0 {
                    return usage("n_nodes range must be whole numbers starting at 1 or more".into());
                }
                if self.steps as f64 > self.stop - self.start + 1.0 {
                    return usage(format!(
                        "{} steps do not fit between {} and {} nodes",
                        self.steps, self.start, self.stop
                    ));
                }
                Ok(())
            }
            SweepAxis::RhoSOp => {
                let (lo, hi) = joint_range(&self.base)?;
                let slack = 1e-12 * hi;
                if self.start < lo - slack || self.stop > hi + slack {
                    return usage(format!("rho_s_op range must lie inside [{lo}, {hi}]"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Axis values in grid order.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == 0 {
                    return self.start;
                }
                if k + 1 == self.steps {
                    return self.stop;
                }
                let t = k as f64 / last;
                let x = if self.axis.logarithmic() {
                    let (a, b) = (self.start.ln(), self.stop.ln());
                    (a + (b - a) * t).exp()
                } else {
                    self.start + (self.stop - self.start) * t
                };
                if self.axis == SweepAxis::NNodes {
                    x.round()
                } else {
                    x
                }
            })
            .collect()
    }

    fn solver(&self) -> EcMaximizer {
        EcMaximizer::new(self.model).with_constraint(self.constraint)
    }

    fn priorities(&self) -> Priorities {
        self.priorities.unwrap_or(Priorities {
            eta_alpha: 1.0,
            eta_theta: 1.0,
        })
    }

    /// Evaluates every grid point (in parallel) and assembles the rows in grid
    /// order. Points that fail are logged and left out.
    pub fn run(&self) -> Result<Table> {
        self.validate()?;
        let eval = Evaluator::new(self)?;
        let values = self.values();
        let results: Vec<fblec::Result<Vec<f64>>> =
            values.par_iter().map(|&x| eval.row(x)).collect();

        let mut table = Table::new(self.axis.columns().iter().copied());
        table
            .meta("sweep", self.axis)
            .meta("range", format!("{}..{} in {} steps", self.start, self.stop, self.steps))
            .meta("spacing", if self.axis.logarithmic() { "log" } else { "linear" })
            .meta("model", self.model.name());
        push_base(&mut table, &self.base);
        if let Some(c) = self.constraint {
            table.meta("target_eps", c.target_eps);
        }
        if self.axis == SweepAxis::RhoSOp {
            let p = self.priorities();
            table.meta("priorities", format!("{},{}", p.eta_alpha, p.eta_theta));
        }
        let mut failed = 0;
        for (x, r) in values.iter().zip(results) {
            match r {
                Ok(row) => table.push(row),
                Err(e) => {
                    failed += 1;
                    log::warn!("{} = {x}: dropped ({e})", self.axis);
                }
            }
        }
        if table.rows.is_empty() {
            return Err(CliError::Numeric(fblec::Error::Infeasible(format!(
                "all {} sweep points failed",
                self.steps
            ))));
        }
        if failed > 0 {
            table.meta("dropped_points", failed);
        }
        Ok(table)
    }
}

pub(crate) fn push_base(table: &mut Table, cfg: &NetworkConfig) {
    table
        .meta("n_nodes", cfg.n_nodes)
        .meta("snr_linear", cfg.snr)
        .meta("blocklength", cfg.blocklength)
        .meta("theta", cfg.delay_exponent);
}

/// Per-sweep quantities computed once.
struct Evaluator<'a> {
    spec: &'a SweepSpec,
    solver: EcMaximizer,
    collided: Link,
    outage: Option<(f64, f64, f64)>,
}

impl<'a> Evaluator<'a> {
    fn new(spec: &'a SweepSpec) -> Result<Self> {
        let solver = spec.solver();
        let collided = Link::under_collision(&spec.base)?;
        let outage = if spec.axis == SweepAxis::DMax {
            let pre = solver.ec_max(&collided)?;
            let relaxed = graceful_theta(&spec.base, &solver)?;
            Some((pre, relaxed.ec_achieved, relaxed.theta))
        } else {
            None
        };
        Ok(Self {
            spec,
            solver,
            collided,
            outage,
        })
    }

    fn row(&self, x: f64) -> fblec::Result<Vec<f64>> {
        let base = &self.spec.base;
        let model = self.spec.model;
        Ok(match self.spec.axis {
            SweepAxis::Eps => {
                vec![x, psi(model, &self.collided, x)?.value, ec(model, &self.collided, x)?]
            }
            SweepAxis::NNodes => {
                let cfg = base.with_nodes(x as u32);
                let link = Link::under_collision(&cfg)?;
                let best = self.solver.max_ec(&link)?;
                let r = loss_factors(&cfg, &self.solver)?;
                vec![
                    x, link.sinr, best.eps_star, best.ec_value, r.alpha, r.alpha_c, r.gamma_c,
                    r.alpha_t,
                ]
            }
            SweepAxis::Theta => {
                let link = self.collided.with_theta(x)?;
                let best = self.solver.max_ec(&link)?;
                vec![x, best.eps_star, best.ec_value, ec_infinite_blocklength(&link)?]
            }
            SweepAxis::Snr => {
                let cfg = NetworkConfig::new(base.n_nodes, x, base.blocklength, base.delay_exponent)?;
                let link = Link::under_collision(&cfg)?;
                let best = self.solver.max_ec(&link)?;
                vec![x, link.sinr, best.eps_star, best.ec_value]
            }
            SweepAxis::RhoSOp => {
                let p = joint_plan(base, x, self.spec.priorities(), &self.solver)?;
                vec![x, p.rho_c_op, p.alpha_c_op, p.theta2, p.eta]
            }
            SweepAxis::DMax => {
                let (pre, post, theta_i) = self.outage.expect("outage set up for d_max sweeps");
                vec![
                    x,
                    delay_outage_probability(pre, base.delay_exponent, x)?,
                    delay_outage_probability(post, theta_i, x)?,
                ]
            }
        })
    }
}
