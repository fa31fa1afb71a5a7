//! Finite-blocklength effective capacity of delay-constrained machine-type
//! nodes colliding in quasi-static Rayleigh fading, the reliability-optimal
//! error probability, and three ways of compensating a node for the
//! interference it suffers.
//!
//! The numerics are generic over [`Real`] (`f32`/`f64`); the aliases at the
//! crate root fix the scalar to `f64`, which is what every accuracy target
//! in the documentation refers to.

// `!(x > 0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod channel;
pub mod compensate;
pub mod effcap;
pub mod error;
pub mod optimize;
pub mod quad;
pub mod scalar;
pub mod special;

pub use channel::{
    achievable_rate, channel_dispersion, delay_outage_probability, max_delay_for_outage,
    shannon_capacity, sinr_collision,
};
pub use compensate::{
    graceful_theta, joint_plan, loss_factors, optimize_joint, others_sinr_after_boost,
    power_control_snr, verify_power_restoration,
};
pub use effcap::{
    ec_infinite_blocklength, effective_capacity, psi_closed, psi_deps, psi_exact, psi_taylor,
    PsiModel,
};
pub use error::{Error, Result};
pub use optimize::{constrained_optimal_eps, ec_sacrifice_ratio, optimal_eps, OptFlag};
pub use scalar::Real;
pub use special::{gaussian_q, gaussian_q_inv, q_inv_derivative, rayleigh_moment, upper_inc_gamma};

pub type NetworkConfig = channel::NetworkConfig<f64>;
pub type DelayModel = channel::DelayModel<f64>;
pub type Link = effcap::Link<f64>;
pub type EcParams = effcap::EcParams<f64>;
pub type JTerms = effcap::JTerms<f64>;
pub type Psi = effcap::Psi<f64>;
pub type ScaledMoment = special::ScaledMoment<f64>;
pub type UrConstraint = optimize::UrConstraint<f64>;
pub type OptResult = optimize::OptResult<f64>;
pub type EcMaximizer = optimize::EcMaximizer<f64>;
pub type CompensationReport = compensate::CompensationReport<f64>;
pub type Degradation = compensate::Degradation<f64>;
pub type Priorities = compensate::Priorities<f64>;
pub type JointPlan = compensate::JointPlan<f64>;
