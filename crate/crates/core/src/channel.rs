//! Physical-layer model of a collision slot: SINR, Shannon capacity, channel
//! dispersion, the normal-approximation achievable rate and the
//! delay-outage relation.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::special::gaussian_q_inv;

/// Blocklengths at or beyond this many channel uses sit outside the regime
/// where the dispersion term is considered meaningful.
pub const VALIDATED_BLOCKLENGTH: u32 = 2000;

/// A scenario: `n_nodes` equidistant nodes transmitting in the same slot at
/// linear SNR `snr`, with packets of `blocklength` channel uses and a
/// statistical delay exponent `delay_exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig<T = f64> {
    pub n_nodes: u32,
    pub snr: T,
    pub blocklength: u32,
    pub delay_exponent: T,
}

impl<T: Real> NetworkConfig<T> {
    pub fn new(n_nodes: u32, snr: T, blocklength: u32, delay_exponent: T) -> Result<Self> {
        let cfg = Self {
            n_nodes,
            snr,
            blocklength,
            delay_exponent,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(Error::Config("n_nodes must be at least 1".into()));
        }
        if !(self.snr > T::zero()) || !self.snr.is_finite() {
            return Err(Error::Config(format!("snr must be positive, got {}", self.snr)));
        }
        if self.blocklength == 0 {
            return Err(Error::Config("blocklength must be positive".into()));
        }
        if !(self.delay_exponent > T::zero()) || !self.delay_exponent.is_finite() {
            return Err(Error::Config(format!(
                "delay exponent must be positive, got {}",
                self.delay_exponent
            )));
        }
        Ok(())
    }

    pub fn in_validated_regime(&self) -> bool {
        self.blocklength < VALIDATED_BLOCKLENGTH
    }

    pub fn with_nodes(self, n_nodes: u32) -> Self {
        Self { n_nodes, ..self }
    }

    pub fn with_delay_exponent(self, delay_exponent: T) -> Self {
        Self {
            delay_exponent,
            ..self
        }
    }
}

/// Maximum tolerated delay and the probability of exceeding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayModel<T = f64> {
    pub max_delay: T,
    pub outage_prob: T,
}

impl<T: Real> DelayModel<T> {
    /// Delay bound reached with the given effective capacity and exponent.
    pub fn for_outage(ec: T, theta: T, outage_prob: T) -> Result<Self> {
        Ok(Self {
            max_delay: max_delay_for_outage(ec, theta, outage_prob)?,
            outage_prob,
        })
    }
}

/// SINR of one node when all `N` nodes collide and the interference power is
/// approximated by `N − 1`: `ρ / (1 + ρ(N−1))`.
pub fn sinr_collision<T: Real>(cfg: &NetworkConfig<T>) -> T {
    let others = T::of_u32(cfg.n_nodes.saturating_sub(1));
    cfg.snr / (T::one() + cfg.snr * others)
}

/// `log₂(1 + t)` in bits per channel use.
pub fn shannon_capacity<T: Real>(t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(domain("capacity snr", t.as_f64()));
    }
    Ok(t.ln_1p() * T::LOG2_E())
}

/// `(1 − (1+t)^{−2}) (log₂ e)²`.
pub fn channel_dispersion<T: Real>(t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(domain("dispersion snr", t.as_f64()));
    }
    Ok(dispersion_factor(t) * T::LOG2_E() * T::LOG2_E())
}

/// `1 − (1+t)^{−2}`, written as `t(2+t)/(1+t)²` to keep precision at small `t`.
#[inline]
pub(crate) fn dispersion_factor<T: Real>(t: T) -> T {
    let u = T::one() + t;
    t * (T::lit(2.0) + t) / (u * u)
}

/// Normal-approximation rate `C(ρz) − √(V(ρz)/T_f) Q⁻¹(ε)`.
///
/// Not clipped at zero: for very weak fades the penalty exceeds the capacity.
pub fn achievable_rate<T: Real>(sinr: T, fade: T, blocklength: u32, eps: T) -> Result<T> {
    if !sinr.is_finite() || !fade.is_finite() || sinr < T::zero() || fade < T::zero() {
        return Err(domain("achievable_rate snr·fade", (sinr * fade).as_f64()));
    }
    if blocklength == 0 {
        return Err(domain("achievable_rate blocklength", 0.0));
    }
    let t = sinr * fade;
    let penalty = (channel_dispersion(t)? / T::of_u32(blocklength)).sqrt() * gaussian_q_inv(eps)?;
    Ok(shannon_capacity(t)? - penalty)
}

/// `exp(−θ · EC · D_max)`.
pub fn delay_outage_probability<T: Real>(ec: T, theta: T, d_max: T) -> Result<T> {
    for (what, v) in [("effective capacity", ec), ("theta", theta), ("max delay", d_max)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(domain(what, v.as_f64()));
        }
    }
    Ok((-theta * ec * d_max).exp())
}

/// Inverse of [`delay_outage_probability`] in `D_max`.
pub fn max_delay_for_outage<T: Real>(ec: T, theta: T, p_out: T) -> Result<T> {
    if !(p_out > T::zero() && p_out < T::one()) {
        return Err(domain("outage probability", p_out.as_f64()));
    }
    if !(ec > T::zero()) || !(theta > T::zero()) {
        return Err(domain("theta·EC", (theta * ec).as_f64()));
    }
    Ok(-p_out.ln() / (theta * ec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, snr: f64) -> NetworkConfig<f64> {
        NetworkConfig::new(n, snr, 1000, 0.01).unwrap()
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr_collision(&cfg(1, 2.0)), 2.0);
        assert!((sinr_collision(&cfg(3, 0.5)) - 0.25).abs() < 1e-16);
        assert!((sinr_collision(&cfg(11, 1.0)) - 1.0 / 11.0).abs() < 1e-16);
    }

    #[test]
    fn sinr_monotone() {
        let mut prev = f64::INFINITY;
        for n in 1..40 {
            let s = sinr_collision(&cfg(n, 1.5));
            assert!(s < prev);
            prev = s;
        }
        assert!(sinr_collision(&cfg(4, 2.0)) > sinr_collision(&cfg(4, 1.0)));
    }

    #[test]
    fn capacity_and_dispersion() {
        assert_eq!(shannon_capacity(0.0_f64).unwrap(), 0.0);
        assert!((shannon_capacity(1.0_f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((shannon_capacity(3.0_f64).unwrap() - 2.0).abs() < 1e-15);
        assert!(shannon_capacity(-0.1_f64).is_err());

        let l2e2 = std::f64::consts::LOG2_E.powi(2);
        assert_eq!(channel_dispersion(0.0_f64).unwrap(), 0.0);
        assert!((channel_dispersion(1.0_f64).unwrap() - 0.75 * l2e2).abs() < 1e-15);
        assert!((channel_dispersion(1e9_f64).unwrap() - l2e2).abs() < 1e-9);
        assert!(channel_dispersion(-1.0_f64).is_err());
    }

    #[test]
    fn rate_examples() {
        assert_eq!(achievable_rate(1.0_f64, 0.0, 1000, 1e-3).unwrap(), 0.0);
        let c = shannon_capacity(0.7_f64 * 1.3).unwrap();
        assert_eq!(achievable_rate(0.7_f64, 1.3, 500, 0.5).unwrap(), c);
        // 1 − √(0.75 (log₂e)² / 1000) · Q⁻¹(1e-3)
        let r = achievable_rate(1.0_f64, 1.0, 1000, 1e-3).unwrap();
        assert!((r - 0.877_905_444).abs() < 1e-8, "{r}");
    }

    #[test]
    fn rate_can_go_negative() {
        let r = achievable_rate(1.0_f64, 1e-5, 200, 1e-6).unwrap();
        assert!(r < 0.0);
    }

    #[test]
    fn outage_examples() {
        let p = delay_outage_probability(1.0_f64, 1.0, 1000.0_f64.ln()).unwrap();
        assert!((p - 1e-3).abs() < 1e-15);
        let p = delay_outage_probability(0.066_f64, 0.023, 4600.0).unwrap();
        assert!((p - (-6.98280_f64).exp()).abs() < 1e-8);
        assert!(delay_outage_probability(0.1_f64, 0.1, 1e-12).unwrap() > 1.0 - 1e-12);
        let d = max_delay_for_outage(1.0_f64, 1.0, (-1.0_f64).exp()).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(max_delay_for_outage(1.0_f64, 1.0, 1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(0, 1.0_f64, 100, 0.1).is_err());
        assert!(NetworkConfig::new(2, 0.0_f64, 100, 0.1).is_err());
        assert!(NetworkConfig::new(2, 1.0_f64, 0, 0.1).is_err());
        assert!(NetworkConfig::new(2, 1.0_f64, 100, 0.0).is_err());
        assert!(cfg(1, 1.0).with_nodes(3).in_validated_regime());
        let long = NetworkConfig::new(2, 1.0_f64, 4000, 0.1).unwrap();
        assert!(!long.in_validated_regime());
    }
}
