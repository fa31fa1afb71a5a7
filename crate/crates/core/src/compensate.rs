//! Interference compensation for one node of a colliding group: power
//! control, graceful relaxation of its delay exponent, and a joint scheme
//! that splits the work between the two.

use rayon::prelude::*;

use crate::channel::{sinr_collision, NetworkConfig};
use crate::effcap::Link;
use crate::error::{domain, Error, Result};
use crate::optimize::EcMaximizer;
use crate::scalar::Real;

/// Lower end of the bracket searched for a relaxed delay exponent.
pub const THETA_MIN: f64 = 1e-6;
/// Minimum number of grid points for the joint objective.
pub const JOINT_GRID: usize = 201;

const ROOT_EC_TOL: f64 = 1e-8;
const ROOT_REL_WIDTH: f64 = 1e-11;
const ROOT_MAX_ITER: usize = 200;

/// SNR the compensating node needs so that its SINR under collision equals
/// the interference-free SNR: `ρ (1 + ρ(N−1))`.
pub fn power_control_snr<T: Real>(cfg: &NetworkConfig<T>) -> T {
    let others = T::of_u32(cfg.n_nodes.saturating_sub(1));
    cfg.snr * (T::one() + cfg.snr * others)
}

/// SINR left to the other `N − 1` nodes once one of them transmits at
/// [`power_control_snr`]: `ρ / (1 + ρ(ρ+1)(N−1))`.
pub fn others_sinr_after_boost<T: Real>(cfg: &NetworkConfig<T>) -> Result<T> {
    if cfg.n_nodes < 2 {
        return Err(domain("n_nodes (no other nodes to affect)", cfg.n_nodes as f64));
    }
    let others = T::of_u32(cfg.n_nodes - 1);
    Ok(cfg.snr / (T::one() + cfg.snr * (cfg.snr + T::one()) * others))
}

/// Same quantity written through the boosted SNR: `ρ / (1 + ρ_c + ρ(N−2))`.
pub fn others_sinr_after_boost_via_rho_c<T: Real>(cfg: &NetworkConfig<T>) -> Result<T> {
    if cfg.n_nodes < 2 {
        return Err(domain("n_nodes (no other nodes to affect)", cfg.n_nodes as f64));
    }
    let rest = T::of_u32(cfg.n_nodes - 2);
    Ok(cfg.snr / (T::one() + power_control_snr(cfg) + cfg.snr * rest))
}

/// Loss and gain factors of full power-control compensation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensationReport<T = f64> {
    pub rho_c: T,
    pub rho_s: T,
    /// Collision loss `EC*(ρ_i) / EC*(ρ)`.
    pub alpha: T,
    /// Loss the other nodes take from the boost, `EC*(ρ_s) / EC*(ρ_i)`.
    pub alpha_c: T,
    /// Gain of the compensated node, `1/α`.
    pub gamma_c: T,
    /// `α · α_c`.
    pub alpha_t: T,
    pub ec_free: T,
    pub ec_collision: T,
    pub ec_others: T,
}

/// Computes every factor with its own optimal ε (or the constrained ε when
/// the maximizer carries a reliability constraint). With a single node there
/// is neither collision nor anyone to hurt, and all factors are one.
pub fn loss_factors<T: Real>(
    cfg: &NetworkConfig<T>,
    solver: &EcMaximizer<T>,
) -> Result<CompensationReport<T>> {
    cfg.validate()?;
    let free = Link::new(cfg.snr, cfg.delay_exponent, cfg.blocklength)?;
    let ec_free = solver.ec_max(&free)?;
    if cfg.n_nodes == 1 {
        return Ok(CompensationReport {
            rho_c: cfg.snr,
            rho_s: cfg.snr,
            alpha: T::one(),
            alpha_c: T::one(),
            gamma_c: T::one(),
            alpha_t: T::one(),
            ec_free,
            ec_collision: ec_free,
            ec_others: ec_free,
        });
    }
    let rho_s = others_sinr_after_boost(cfg)?;
    let ec_collision = solver.ec_max(&free.with_sinr(sinr_collision(cfg))?)?;
    let ec_others = solver.ec_max(&free.with_sinr(rho_s)?)?;
    let alpha = ec_collision / ec_free;
    let alpha_c = ec_others / ec_collision;
    Ok(CompensationReport {
        rho_c: power_control_snr(cfg),
        rho_s,
        alpha,
        alpha_c,
        gamma_c: alpha.recip(),
        alpha_t: alpha * alpha_c,
        ec_free,
        ec_collision,
        ec_others,
    })
}

/// Checks that the boosted node's EC under collision equals its
/// interference-free EC to within `1e-12`.
pub fn verify_power_restoration<T: Real>(
    cfg: &NetworkConfig<T>,
    solver: &EcMaximizer<T>,
) -> Result<bool> {
    cfg.validate()?;
    let free = Link::new(cfg.snr, cfg.delay_exponent, cfg.blocklength)?;
    let others = T::of_u32(cfg.n_nodes - 1);
    let boosted_sinr = power_control_snr(cfg) / (T::one() + cfg.snr * others);
    let restored = solver.ec_max(&free.with_sinr(boosted_sinr)?)?;
    let reference = solver.ec_max(&free)?;
    Ok((restored - reference).abs() < T::lit(1e-12))
}

/// Result of relaxing a node's delay exponent until it recovers a target EC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degradation<T = f64> {
    /// Relaxed exponent, in `(0, θ]`.
    pub theta: T,
    /// EC the node had without interference, which it must recover.
    pub ec_target: T,
    /// EC it reaches at the relaxed exponent.
    pub ec_achieved: T,
    /// Optimal ε at the relaxed exponent.
    pub eps_star: T,
}

/// Smallest relaxation `θ' ∈ [1e-6, θ]` with `EC*(sinr, θ') = ec_target`.
///
/// EC* decreases in θ, so the root is bracketed by bisection on `ln θ'`.
pub fn relax_theta<T: Real>(
    link: &Link<T>,
    ec_target: T,
    solver: &EcMaximizer<T>,
) -> Result<Degradation<T>> {
    let theta = link.theta;
    let gap = |th: T| -> Result<(T, T, T)> {
        let r = solver.max_ec(&link.with_theta(th)?)?;
        Ok((r.ec_value - ec_target, r.ec_value, r.eps_star))
    };
    let (g_hi, ec_hi, eps_hi) = gap(theta)?;
    if g_hi >= -ec_target.abs() * T::lit(1e-12) {
        return Ok(Degradation {
            theta,
            ec_target,
            ec_achieved: ec_hi,
            eps_star: eps_hi,
        });
    }
    let theta_min = T::lit(THETA_MIN).min(theta);
    let (g_lo, _, _) = gap(theta_min)?;
    if g_lo < T::zero() {
        return Err(Error::Infeasible(format!(
            "EC at theta = {} is still {} short of the target {} (sinr = {})",
            theta_min, -g_lo, ec_target, link.sinr
        )));
    }
    let (mut lo, mut hi) = (theta_min.ln(), theta.ln());
    let mut best = None;
    for _ in 0..ROOT_MAX_ITER {
        let mid = T::lit(0.5) * (lo + hi);
        let (g, e, eps) = gap(mid.exp())?;
        best = Some((mid.exp(), g, e, eps));
        if g == T::zero() || hi - lo < T::lit(ROOT_REL_WIDTH) {
            break;
        }
        if g > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (th, g, e, eps) = best.expect("at least one bisection step");
    if g.abs() > T::lit(ROOT_EC_TOL) {
        return Err(Error::Convergence {
            what: "delay exponent root",
            iterations: ROOT_MAX_ITER,
            detail: format!("residual {} at theta = {}", g, th),
        });
    }
    Ok(Degradation {
        theta: th,
        ec_target,
        ec_achieved: e,
        eps_star: eps,
    })
}

/// Graceful degradation of the colliding node's delay exponent: the `θ_i`
/// at which its EC under collision equals its interference-free EC at `θ`.
pub fn graceful_theta<T: Real>(
    cfg: &NetworkConfig<T>,
    solver: &EcMaximizer<T>,
) -> Result<Degradation<T>> {
    cfg.validate()?;
    let free = Link::new(cfg.snr, cfg.delay_exponent, cfg.blocklength)?;
    let target = solver.ec_max(&free)?;
    relax_theta(&free.with_sinr(sinr_collision(cfg))?, target, solver)
}

/// Weights of the joint objective `η = η_α α_co + η_θ θ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Priorities<T = f64> {
    pub eta_alpha: T,
    pub eta_theta: T,
}

impl<T: Real> Priorities<T> {
    pub fn new(eta_alpha: T, eta_theta: T) -> Result<Self> {
        for (what, v) in [("eta_alpha", eta_alpha), ("eta_theta", eta_theta)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(domain(what, v.as_f64()));
            }
        }
        Ok(Self {
            eta_alpha,
            eta_theta,
        })
    }
}

/// One operating point of the joint scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPlan<T = f64> {
    /// SINR the other nodes are left with, in `[ρ_s, ρ_i]`.
    pub rho_s_op: T,
    /// SNR of the compensating node.
    pub rho_c_op: T,
    /// Loss the other nodes take, `EC*(ρ_so) / EC*(ρ_i)`.
    pub alpha_c_op: T,
    /// Relaxed delay exponent of the compensating node.
    pub theta2: T,
    pub eta: T,
    pub priorities: Priorities<T>,
}

/// The range `[ρ_s, ρ_i]` of others-SINR the joint scheme can operate in.
pub fn joint_range<T: Real>(cfg: &NetworkConfig<T>) -> Result<(T, T)> {
    Ok((others_sinr_after_boost(cfg)?, sinr_collision(cfg)))
}

/// Evaluates the joint scheme at others-SINR `rho_s_op`: the compensating
/// node boosts to `ρ_co = ρ/ρ_so − 1 − ρ(N−2)` and relaxes its delay exponent
/// to `θ₂` for the remainder.
pub fn joint_plan<T: Real>(
    cfg: &NetworkConfig<T>,
    rho_s_op: T,
    priorities: Priorities<T>,
    solver: &EcMaximizer<T>,
) -> Result<JointPlan<T>> {
    cfg.validate()?;
    let (rho_s, rho_i) = joint_range(cfg)?;
    let slack = T::lit(1e-12) * rho_i;
    if !(rho_s_op >= rho_s - slack && rho_s_op <= rho_i + slack) {
        return Err(domain("rho_s_op outside [rho_s, rho_i]", rho_s_op.as_f64()));
    }
    let ctx = JointContext::new(cfg, solver)?;
    ctx.plan(rho_s_op, priorities)
}

/// Quantities shared by every point of a joint-scheme sweep.
struct JointContext<'a, T> {
    cfg: NetworkConfig<T>,
    solver: &'a EcMaximizer<T>,
    base: Link<T>,
    ec_free: T,
    ec_collision: T,
}

impl<'a, T: Real> JointContext<'a, T> {
    fn new(cfg: &NetworkConfig<T>, solver: &'a EcMaximizer<T>) -> Result<Self> {
        let base = Link::new(cfg.snr, cfg.delay_exponent, cfg.blocklength)?;
        let ec_free = solver.ec_max(&base)?;
        let ec_collision = solver.ec_max(&base.with_sinr(sinr_collision(cfg))?)?;
        Ok(Self {
            cfg: *cfg,
            solver,
            base,
            ec_free,
            ec_collision,
        })
    }

    fn plan(&self, rho_s_op: T, priorities: Priorities<T>) -> Result<JointPlan<T>> {
        let cfg = &self.cfg;
        let rho = cfg.snr;
        let n = T::of_u32(cfg.n_nodes);
        let two = T::lit(2.0);
        let rho_c_op = rho / rho_s_op - T::one() - rho * (n - two);
        let alpha_c_op = self.solver.ec_max(&self.base.with_sinr(rho_s_op)?)? / self.ec_collision;
        let own_sinr = rho_c_op / (T::one() + rho * (n - T::one()));
        let relaxed = relax_theta(&self.base.with_sinr(own_sinr)?, self.ec_free, self.solver)?;
        let theta2 = relaxed.theta;
        Ok(JointPlan {
            rho_s_op,
            rho_c_op,
            alpha_c_op,
            theta2,
            eta: priorities.eta_alpha * alpha_c_op + priorities.eta_theta * theta2,
            priorities,
        })
    }
}

/// Sweeps the joint scheme over `points` evenly spaced others-SINR values
/// in `[ρ_s, ρ_i]`. Points where no relaxation recovers the target are
/// returned as errors in place.
pub fn joint_sweep<T: Real>(
    cfg: &NetworkConfig<T>,
    priorities: Priorities<T>,
    solver: &EcMaximizer<T>,
    points: usize,
) -> Result<Vec<Result<JointPlan<T>>>> {
    cfg.validate()?;
    if points < 2 {
        return Err(Error::Config("joint sweep needs at least two points".into()));
    }
    let (lo, hi) = joint_range(cfg)?;
    let ctx = JointContext::new(cfg, solver)?;
    let last = T::lit((points - 1) as f64);
    Ok((0..points)
        .into_par_iter()
        .map(|k| {
            let x = if k + 1 == points {
                hi
            } else {
                lo + (hi - lo) * T::lit(k as f64) / last
            };
            ctx.plan(x, priorities)
        })
        .collect())
}

/// Maximises `η` over the others-SINR: dense grid, then golden-section
/// refinement between the neighbours of the best grid point.
pub fn optimize_joint<T: Real>(
    cfg: &NetworkConfig<T>,
    priorities: Priorities<T>,
    solver: &EcMaximizer<T>,
) -> Result<JointPlan<T>> {
    optimize_joint_on_grid(cfg, priorities, solver, JOINT_GRID)
}

/// [`optimize_joint`] with an explicit grid size.
pub fn optimize_joint_on_grid<T: Real>(
    cfg: &NetworkConfig<T>,
    priorities: Priorities<T>,
    solver: &EcMaximizer<T>,
    points: usize,
) -> Result<JointPlan<T>> {
    let sweep = joint_sweep(cfg, priorities, solver, points)?;
    let mut best: Option<(usize, JointPlan<T>)> = None;
    let mut first_err = None;
    for (k, p) in sweep.iter().enumerate() {
        match p {
            Ok(p) if best.is_none_or(|(_, b)| p.eta > b.eta) => best = Some((k, *p)),
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert_with(|| e.clone());
            }
        }
    }
    let Some((k, grid_best)) = best else {
        return Err(first_err.unwrap_or_else(|| Error::Infeasible("empty joint grid".into())));
    };
    let lo_k = k.saturating_sub(1);
    let hi_k = (k + 1).min(points - 1);
    let (Ok(lo), Ok(hi)) = (&sweep[lo_k], &sweep[hi_k]) else {
        return Ok(grid_best);
    };
    let ctx = JointContext::new(cfg, solver)?;
    let refined = golden_max(
        |x| ctx.plan(x, priorities),
        lo.rho_s_op,
        hi.rho_s_op,
        (hi.rho_s_op - lo.rho_s_op) * T::lit(1e-6),
    )?;
    Ok(match refined {
        Some(p) if p.eta > grid_best.eta => p,
        _ => grid_best,
    })
}

fn golden_max<T: Real, F>(f: F, mut lo: T, mut hi: T, tol: T) -> Result<Option<JointPlan<T>>>
where
    F: Fn(T) -> Result<JointPlan<T>>,
{
    let inv_phi = T::lit((5.0_f64.sqrt() - 1.0) / 2.0);
    let score = |p: &Result<JointPlan<T>>| p.as_ref().map_or(T::neg_infinity(), |p| p.eta);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut p1 = f(x1);
    let mut p2 = f(x2);
    for _ in 0..100 {
        if hi - lo <= tol {
            break;
        }
        if score(&p1) >= score(&p2) {
            hi = x2;
            x2 = x1;
            p2 = p1;
            x1 = hi - inv_phi * (hi - lo);
            p1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            p1 = p2;
            x2 = lo + inv_phi * (hi - lo);
            p2 = f(x2);
        }
    }
    let best = if score(&p1) >= score(&p2) { p1 } else { p2 };
    Ok(best.ok())
}
