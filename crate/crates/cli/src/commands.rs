//! Single-scenario reports: `ec` and `compensate`.

use std::fmt;

use fblec::compensate::{graceful_theta, loss_factors, optimize_joint};
use fblec::optimize::{constrained_optimal_eps, optimal_eps};
use fblec::{max_delay_for_outage, EcMaximizer, Link, Priorities, PsiModel, UrConstraint};

use crate::config::Scenario;
use crate::error::{CliError, Result};

const OUTAGE: f64 = 1e-3;

/// Ordered `key = value` lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    fn add(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn scenario(scenario: &Scenario, model: PsiModel) -> Self {
        let mut r = Report::default();
        for (k, v) in scenario.describe() {
            r.entries.push((k, v));
        }
        r.add("model", model.name());
        r
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.entries {
            writeln!(f, "{k:<width$} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Power,
    Delay,
    Joint,
}

impl std::str::FromStr for Scheme {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Scheme::Power),
            "delay" => Ok(Scheme::Delay),
            "joint" => Ok(Scheme::Joint),
            _ => Err(CliError::Usage(format!(
                "unknown compensation scheme `{s}` (expected power, delay or joint)"
            ))),
        }
    }
}

/// SINR under collision, the optimal ε and the maximum EC, plus the
/// constrained operating point when a target is set.
pub fn ec_report(scenario: &Scenario, model: PsiModel) -> Result<Report> {
    let mut r = Report::scenario(scenario, model);
    let link = Link::under_collision(&scenario.network)?;
    let best = optimal_eps(model, &link)?;
    r.add("sinr", link.sinr);
    r.add("eps_star", best.eps_star);
    r.add("ec_max", best.ec_value);
    r.add("search", format!("{:?}", best.flag));
    if let Some(c) = scenario.constraint {
        let op = constrained_optimal_eps(model, &link, &c)?;
        r.add("constraint_active", op.constrained);
        r.add("eps_operational", op.eps_star);
        r.add("ec_operational", op.ec_value);
        r.add("ec_ratio", op.ec_value / best.ec_value);
    }
    if !scenario.network.in_validated_regime() {
        log::warn!(
            "blocklength {} is beyond the range where the dispersion approximation was checked",
            scenario.network.blocklength
        );
    }
    Ok(r)
}

pub fn compensate_report(
    scenario: &Scenario,
    scheme: Scheme,
    model: PsiModel,
    priorities: Option<Priorities>,
) -> Result<Report> {
    let cfg = &scenario.network;
    let solver = EcMaximizer::new(model).with_constraint(scenario.constraint);
    let mut r = Report::scenario(scenario, model);
    match scheme {
        Scheme::Power => {
            let f = loss_factors(cfg, &solver)?;
            r.add("rho_c", f.rho_c);
            r.add("rho_s", f.rho_s);
            r.add("ec_free", f.ec_free);
            r.add("ec_collision", f.ec_collision);
            r.add("ec_others", f.ec_others);
            r.add("alpha", f.alpha);
            r.add("alpha_c", f.alpha_c);
            r.add("gamma_c", f.gamma_c);
            r.add("alpha_t", f.alpha_t);
        }
        Scheme::Delay => {
            let pre = solver.ec_max(&Link::under_collision(cfg)?)?;
            let d = graceful_theta(cfg, &solver)?;
            r.add("theta_relaxed", d.theta);
            r.add("ec_target", d.ec_target);
            r.add("ec_achieved", d.ec_achieved);
            r.add("eps_star", d.eps_star);
            r.add("ec_before", pre);
            r.add("d_max_before", max_delay_for_outage(pre, cfg.delay_exponent, OUTAGE)?);
            r.add("d_max_after", max_delay_for_outage(d.ec_achieved, d.theta, OUTAGE)?);
            r.add("outage", OUTAGE);
        }
        Scheme::Joint => {
            let prio = priorities
                .or(scenario.priorities)
                .ok_or_else(|| CliError::Usage("joint compensation needs --priorities or a priorities key".into()))?;
            let p = optimize_joint(cfg, prio, &solver)?;
            r.add("priorities", format!("{},{}", prio.eta_alpha, prio.eta_theta));
            r.add("rho_s_op", p.rho_s_op);
            r.add("rho_c_op", p.rho_c_op);
            r.add("alpha_c_op", p.alpha_c_op);
            r.add("theta2", p.theta2);
            r.add("eta", p.eta);
        }
    }
    Ok(r)
}

/// Applies a command-line target over the one in the scenario file.
pub fn override_target(scenario: &mut Scenario, target: Option<UrConstraint>) {
    if target.is_some() {
        scenario.constraint = target;
    }
}
