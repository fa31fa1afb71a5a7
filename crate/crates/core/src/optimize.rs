//! Error-probability optimisation: the EC-maximising ε* and its
//! ultra-reliable counterpart under `ε ≤ ε_t`.

use crate::effcap::{ec, psi, psi_derivative, Link, PsiModel};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Search interval for ε, in log₁₀.
const LOG_EPS_MIN: f64 = -12.0;
const EPS_MAX: f64 = 0.5;
const EPS_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;
const FLAT_DERIVATIVE: f64 = 1e-12;

/// Reliability requirement `ε ≤ target_eps`. `active` is filled in by the
/// solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrConstraint<T = f64> {
    pub target_eps: T,
    pub active: bool,
}

impl<T: Real> UrConstraint<T> {
    pub fn new(target_eps: T) -> Result<Self> {
        if !(target_eps > T::zero() && target_eps < T::one()) {
            return Err(domain("target error probability", target_eps.as_f64()));
        }
        Ok(Self {
            target_eps,
            active: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptFlag {
    Interior,
    /// Minimum pinned at the smallest ε searched.
    LowerBoundary,
    /// Minimum pinned at ε = 1/2.
    UpperBoundary,
    /// `∂ψ/∂ε` vanished across the final bracket; the midpoint is returned.
    LowCurvature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult<T = f64> {
    pub eps_star: T,
    pub ec_value: T,
    pub constrained: bool,
    pub iterations: usize,
    pub flag: OptFlag,
}

/// Maximises EC over ε for a link under a ψ model and an optional
/// reliability constraint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EcMaximizer<T = f64> {
    pub model: PsiModel,
    pub constraint: Option<UrConstraint<T>>,
}

impl<T: Real> EcMaximizer<T> {
    pub fn new(model: PsiModel) -> Self {
        Self {
            model,
            constraint: None,
        }
    }

    pub fn with_constraint(self, constraint: Option<UrConstraint<T>>) -> Self {
        Self { constraint, ..self }
    }

    pub fn max_ec(&self, link: &Link<T>) -> Result<OptResult<T>> {
        match &self.constraint {
            Some(c) => constrained_optimal_eps(self.model, link, c),
            None => optimal_eps(self.model, link),
        }
    }

    /// Maximum EC only.
    pub fn ec_max(&self, link: &Link<T>) -> Result<T> {
        Ok(self.max_ec(link)?.ec_value)
    }
}

/// ψ at `eps`, with points where the model leaves its domain mapped to +∞ so
/// the search steps away from them.
fn objective<T: Real>(model: PsiModel, link: &Link<T>, eps: T) -> Result<T> {
    match psi(model, link, eps) {
        Ok(p) => Ok(p.value),
        Err(Error::Range { .. }) => Ok(T::infinity()),
        Err(e) => Err(e),
    }
}

/// ε* = argmin ψ(ε) by golden-section search on `log₁₀ ε ∈ [−12, log₁₀ ½]`.
pub fn optimal_eps<T: Real>(model: PsiModel, link: &Link<T>) -> Result<OptResult<T>> {
    let ten = T::lit(10.0);
    let inv_phi = T::lit((5.0_f64.sqrt() - 1.0) / 2.0);
    let eps_of = |u: T| ten.powf(u);
    let f = |u: T| objective(model, link, eps_of(u));

    let lo_bound = T::lit(LOG_EPS_MIN);
    let hi_bound = T::lit(EPS_MAX).log10();
    let (mut lo, mut hi) = (lo_bound, hi_bound);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while iterations < MAX_ITER && eps_of(hi) - eps_of(lo) > T::lit(EPS_TOL) {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    if !f1.is_finite() && !f2.is_finite() {
        return Err(Error::Range {
            what: "psi",
            detail: format!(
                "{} model undefined across the search interval at sinr = {}, theta = {}, T_f = {}",
                model.name(),
                link.sinr,
                link.theta,
                link.blocklength
            ),
        });
    }
    let mut u = if f1 <= f2 { x1 } else { x2 };
    let step = (hi_bound - lo_bound) * T::lit(1e-9);
    let mut flag = if u - lo_bound <= step {
        u = lo_bound;
        OptFlag::LowerBoundary
    } else if hi_bound - u <= step {
        u = hi_bound;
        OptFlag::UpperBoundary
    } else {
        OptFlag::Interior
    };
    if flag == OptFlag::Interior {
        let flat = T::lit(FLAT_DERIVATIVE);
        let dl = psi_derivative(model, link, eps_of(lo));
        let dh = psi_derivative(model, link, eps_of(hi));
        if let (Ok(dl), Ok(dh)) = (dl, dh) {
            if dl.abs() < flat && dh.abs() < flat {
                u = T::lit(0.5) * (lo + hi);
                flag = OptFlag::LowCurvature;
            }
        }
    }
    let eps_star = if flag == OptFlag::UpperBoundary {
        T::lit(EPS_MAX)
    } else {
        eps_of(u)
    };
    Ok(OptResult {
        eps_star,
        ec_value: ec(model, link, eps_star)?,
        constrained: false,
        iterations,
        flag,
    })
}

/// KKT sign test: if `∂ψ/∂ε` is negative at `ε_t` the constraint binds and
/// ε* = ε_t; otherwise the unconstrained minimiser already satisfies it.
pub fn constrained_optimal_eps<T: Real>(
    model: PsiModel,
    link: &Link<T>,
    constraint: &UrConstraint<T>,
) -> Result<OptResult<T>> {
    let target = constraint.target_eps;
    UrConstraint::new(target)?;
    let slope = psi_derivative(model, link, target)?;
    if slope < T::zero() {
        return Ok(OptResult {
            eps_star: target,
            ec_value: ec(model, link, target)?,
            constrained: true,
            iterations: 0,
            flag: OptFlag::Interior,
        });
    }
    let mut free = optimal_eps(model, link)?;
    if free.eps_star > target {
        // slope ≥ 0 at the target puts the minimiser below it; only rounding
        // lands here
        free.eps_star = target;
        free.ec_value = ec(model, link, target)?;
    }
    Ok(free)
}

/// Whether the constraint binds for this link.
pub fn constraint_binds<T: Real>(
    model: PsiModel,
    link: &Link<T>,
    constraint: &UrConstraint<T>,
) -> Result<UrConstraint<T>> {
    let active = psi_derivative(model, link, constraint.target_eps)? < T::zero();
    Ok(UrConstraint {
        target_eps: constraint.target_eps,
        active,
    })
}

/// Operational EC under the constraint divided by the unconstrained maximum.
pub fn ec_sacrifice_ratio<T: Real>(
    model: PsiModel,
    link: &Link<T>,
    constraint: &UrConstraint<T>,
) -> Result<T> {
    let op = constrained_optimal_eps(model, link, constraint)?;
    if !op.constrained {
        return Ok(T::one());
    }
    let best = optimal_eps(model, link)?;
    Ok(op.ec_value / best.ec_value)
}
