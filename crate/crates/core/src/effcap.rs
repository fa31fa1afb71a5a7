//! Effective capacity of a single node in quasi-static Rayleigh fading.
//!
//! Everything here is built around the moment generating term
//!
//! ```text
//! ψ(ρ, θ, ε) = E_z[ ε + (1−ε) exp(−θ T_f r(z)) ],    EC = −ln ψ / (θ T_f)
//! ```
//!
//! which is available through three routes: direct quadrature of the
//! expectation ([`psi_exact`]), quadrature of the second-order expanded
//! integrand ([`psi_taylor`]), and the incomplete-gamma closed form of that
//! expansion ([`psi_closed`]). The last two agree to rounding; the first is
//! the ground truth the expansion approximates.

use crate::channel::{dispersion_factor, NetworkConfig};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_fade, Tolerance};
use crate::scalar::Real;
use crate::special::{gaussian_q_inv, q_inv_derivative, rayleigh_moment};

const QUAD_REL_TOL: f64 = 1e-12;

/// A single node's operating point: the SINR it experiences, its delay
/// exponent and the blocklength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link<T = f64> {
    pub sinr: T,
    pub theta: T,
    pub blocklength: u32,
}

impl<T: Real> Link<T> {
    pub fn new(sinr: T, theta: T, blocklength: u32) -> Result<Self> {
        if !(sinr > T::zero()) || !sinr.is_finite() {
            return Err(domain("link sinr", sinr.as_f64()));
        }
        if !(theta > T::zero()) || !theta.is_finite() {
            return Err(domain("link delay exponent", theta.as_f64()));
        }
        if blocklength == 0 {
            return Err(domain("link blocklength", 0.0));
        }
        Ok(Self {
            sinr,
            theta,
            blocklength,
        })
    }

    /// The link seen by any one node when every node of `cfg` collides.
    pub fn under_collision(cfg: &NetworkConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Self::new(
            crate::channel::sinr_collision(cfg),
            cfg.delay_exponent,
            cfg.blocklength,
        )
    }

    pub fn with_sinr(self, sinr: T) -> Result<Self> {
        Self::new(sinr, self.theta, self.blocklength)
    }

    pub fn with_theta(self, theta: T) -> Result<Self> {
        Self::new(self.sinr, theta, self.blocklength)
    }

    /// `θ T_f`.
    pub fn theta_t(&self) -> T {
        self.theta * T::of_u32(self.blocklength)
    }

    /// `d = −θ T_f / ln 2`.
    pub fn d(&self) -> T {
        -self.theta_t() / T::LN_2()
    }

    /// `δ = θ √T_f log₂ e`.
    pub fn delta(&self) -> T {
        self.theta * T::of_u32(self.blocklength).sqrt() * T::LOG2_E()
    }
}

/// Scalars feeding the closed form at a given error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcParams<T = f64> {
    /// `δ · Q⁻¹(ε)`.
    pub c: T,
    pub d: T,
    pub delta: T,
    pub sinr: T,
}

impl<T: Real> EcParams<T> {
    pub fn new(link: &Link<T>, eps: T) -> Result<Self> {
        let delta = link.delta();
        Ok(Self {
            c: delta * gaussian_q_inv(eps)?,
            d: link.d(),
            delta,
            sinr: link.sinr,
        })
    }

    /// `ln` of `exp(−θ T_f r(z))` at fade `z`: `d ln(1+ρz) + c √(1−(1+ρz)^{−2})`.
    #[inline]
    fn log_discount(&self, z: T) -> T {
        let t = self.sinr * z;
        self.d * t.ln_1p() + self.c * dispersion_factor(t).sqrt()
    }

    /// Fade scale below which `(1+ρz)^d` still varies appreciably.
    fn fade_scale(&self) -> T {
        (self.sinr * (self.d.abs() + T::one())).recip()
    }
}

/// How ψ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PsiModel {
    /// Quadrature of the exact expectation.
    #[default]
    Exact,
    /// Quadrature of the second-order expanded integrand.
    Taylor,
    /// Incomplete-gamma closed form of the expansion.
    ClosedForm,
}

impl PsiModel {
    pub fn name(self) -> &'static str {
        match self {
            PsiModel::Exact => "exact",
            PsiModel::Taylor => "taylor",
            PsiModel::ClosedForm => "closed",
        }
    }
}

impl std::str::FromStr for PsiModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(PsiModel::Exact),
            "taylor" => Ok(PsiModel::Taylor),
            "closed" | "closed-form" => Ok(PsiModel::ClosedForm),
            other => Err(Error::Config(format!("unknown psi model '{other}'"))),
        }
    }
}

/// ψ together with `1 − ψ`, each computed without cancellation where the
/// route allows it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi<T = f64> {
    pub value: T,
    pub complement: T,
}

impl<T: Real> Psi<T> {
    fn from_value(value: T) -> Self {
        Self {
            value,
            complement: T::one() - value,
        }
    }

    /// `ln ψ`, via `ln_1p(−(1−ψ))` when ψ is close to one.
    pub fn ln(&self) -> T {
        if self.complement.abs() < T::lit(0.5) {
            (-self.complement).ln_1p()
        } else {
            self.value.ln()
        }
    }
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps < T::one() {
        Ok(())
    } else {
        Err(domain("error probability", eps.as_f64()))
    }
}

fn annotate<T: Real>(err: Error, route: &'static str, link: &Link<T>, eps: T) -> Error {
    match err {
        Error::Convergence {
            what,
            iterations,
            detail,
        } => Error::Convergence {
            what,
            iterations,
            detail: format!(
                "{detail}; {route} psi at sinr = {}, theta = {}, T_f = {}, eps = {}",
                link.sinr, link.theta, link.blocklength, eps
            ),
        },
        other => other,
    }
}

/// ψ by adaptive quadrature of the exact expectation over the Rayleigh fade.
pub fn psi_exact<T: Real>(link: &Link<T>, eps: T) -> Result<T> {
    Ok(psi_exact_parts(link, eps)?.value)
}

/// [`psi_exact`] with `1 − ψ` carried separately.
pub fn psi_exact_parts<T: Real>(link: &Link<T>, eps: T) -> Result<Psi<T>> {
    check_eps(eps)?;
    let p = EcParams::new(link, eps)?;
    let tol = Tolerance::relative(QUAD_REL_TOL);
    let one_minus_eps = T::one() - eps;
    let k = integrate_fade(|z| p.log_discount(z).exp(), p.fade_scale(), tol)
        .map_err(|e| annotate(e, "exact", link, eps))?
        .value;
    if k < T::lit(0.5) {
        return Ok(Psi {
            value: eps + one_minus_eps * k,
            complement: one_minus_eps * (T::one() - k),
        });
    }
    // E[1 − e^{−θT r}] directly, for ψ close to one
    let l = integrate_fade(|z| -p.log_discount(z).exp_m1(), p.fade_scale(), tol)
        .map_err(|e| annotate(e, "exact", link, eps))?
        .value;
    Ok(Psi {
        value: T::one() - one_minus_eps * l,
        complement: one_minus_eps * l,
    })
}

/// ψ by quadrature of the expanded integrand: `e^{cx}` to second order, and
/// `x = √(1−u^{−2})` replaced by `1 − 1/(2u²)` in the linear term
/// (`x² = 1 − u^{−2}` is kept exact), with `u = 1 + ρz`.
pub fn psi_taylor<T: Real>(link: &Link<T>, eps: T) -> Result<T> {
    check_eps(eps)?;
    let p = EcParams::new(link, eps)?;
    let half = T::lit(0.5);
    let linear = p.c;
    let quadratic = half * p.c * p.c;
    let integrand = |z: T| {
        let u = T::one() + p.sinr * z;
        let inv2 = (u * u).recip();
        (p.d * u.ln()).exp() * (T::one() + linear * (T::one() - half * inv2) + quadratic * (T::one() - inv2))
    };
    let j = integrate_fade(integrand, p.fade_scale(), Tolerance::relative(QUAD_REL_TOL))
        .map_err(|e| annotate(e, "taylor", link, eps))?
        .value;
    Ok(eps + (T::one() - eps) * j)
}

/// The three fade integrals of the expanded integrand:
/// `J = J₁ + c J₂ + (c²/2) J₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JTerms<T = f64> {
    /// `∫(1+ρz)^d e^{−z} dz`.
    pub j1: T,
    /// `∫(1+ρz)^d (1 − 1/(2(1+ρz)²)) e^{−z} dz`.
    pub j2: T,
    /// `∫(1+ρz)^d (1 − (1+ρz)^{−2}) e^{−z} dz`.
    pub j3: T,
}

impl<T: Real> JTerms<T> {
    /// Closed form via `∫(1+ρz)^a e^{−z} dz = e^{1/ρ} ρ^a Γ(a+1, 1/ρ)`. The
    /// `(1+ρz)^{d−2}` piece therefore carries `Γ(d−1, 1/ρ)`.
    pub fn new(sinr: T, d: T) -> Result<Self> {
        let m_d = rayleigh_moment(d, sinr)?.value;
        let m_d2 = rayleigh_moment(d - T::lit(2.0), sinr)?.value;
        Ok(Self {
            j1: m_d,
            j2: m_d - T::lit(0.5) * m_d2,
            j3: m_d - m_d2,
        })
    }

    pub fn combine(&self, c: T) -> T {
        self.j1 + c * self.j2 + T::lit(0.5) * c * c * self.j3
    }
}

/// ψ from the incomplete-gamma closed form of the expanded integrand.
pub fn psi_closed<T: Real>(link: &Link<T>, eps: T) -> Result<T> {
    check_eps(eps)?;
    let p = EcParams::new(link, eps)?;
    let j = JTerms::new(p.sinr, p.d)?.combine(p.c);
    let value = eps + (T::one() - eps) * j;
    guard_psi(value, "closed", link, eps)
}

fn guard_psi<T: Real>(value: T, route: &'static str, link: &Link<T>, eps: T) -> Result<T> {
    if value > T::zero() && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range {
            what: "psi",
            detail: format!(
                "{route} psi = {value} outside (0, 1] at sinr = {}, theta = {}, T_f = {}, eps = {}",
                link.sinr, link.theta, link.blocklength, eps
            ),
        })
    }
}

/// ψ and its complement under the chosen model.
pub fn psi<T: Real>(model: PsiModel, link: &Link<T>, eps: T) -> Result<Psi<T>> {
    match model {
        PsiModel::Exact => {
            let parts = psi_exact_parts(link, eps)?;
            guard_psi(parts.value, "exact", link, eps)?;
            Ok(parts)
        }
        PsiModel::Taylor => Ok(Psi::from_value(guard_psi(psi_taylor(link, eps)?, "taylor", link, eps)?)),
        PsiModel::ClosedForm => Ok(Psi::from_value(psi_closed(link, eps)?)),
    }
}

/// `EC = −ln ψ / (T_f θ)`.
pub fn effective_capacity<T: Real>(psi: T, theta: T, blocklength: u32) -> Result<T> {
    let slack = T::one() + T::lit(4.0) * T::epsilon();
    if !(psi > T::zero()) || psi > slack || !psi.is_finite() {
        return Err(domain("psi", psi.as_f64()));
    }
    if !(theta > T::zero()) || blocklength == 0 {
        return Err(domain("theta·T_f", (theta * T::of_u32(blocklength)).as_f64()));
    }
    Ok(-psi.min(T::one()).ln() / (theta * T::of_u32(blocklength)))
}

/// EC of `link` at error probability `eps` under `model`.
pub fn ec<T: Real>(model: PsiModel, link: &Link<T>, eps: T) -> Result<T> {
    let p = psi(model, link, eps)?;
    Ok(-p.ln() / link.theta_t())
}

/// Infinite-blocklength (Shannon-rate) effective capacity,
/// `−ln E[(1+ρz)^d] / (T_f θ)`.
pub fn ec_infinite_blocklength<T: Real>(link: &Link<T>) -> Result<T> {
    let m = rayleigh_moment(link.d(), link.sinr)?.value;
    Ok(-m.ln() / link.theta_t())
}

/// Analytic `∂ψ/∂ε` of the closed form:
/// `1 − J + (1−ε) δ q(ε) (J₂ + δ Q⁻¹(ε) J₃)` with `q = dQ⁻¹/dε`.
pub fn psi_deps<T: Real>(link: &Link<T>, eps: T) -> Result<T> {
    check_eps(eps)?;
    let p = EcParams::new(link, eps)?;
    let j = JTerms::new(p.sinr, p.d)?;
    let q = q_inv_derivative(eps)?;
    Ok(T::one() - j.combine(p.c) + (T::one() - eps) * p.delta * q * (j.j2 + p.c * j.j3))
}

/// `∂ψ/∂ε` of the exact expectation, differentiating under the integral:
/// `1 − K + (1−ε) δ q(ε) E[x e^{−θT_f r}]`.
pub fn psi_exact_deps<T: Real>(link: &Link<T>, eps: T) -> Result<T> {
    let parts = psi_exact_parts(link, eps)?;
    let p = EcParams::new(link, eps)?;
    let q = q_inv_derivative(eps)?;
    let weighted = integrate_fade(
        |z| dispersion_factor(p.sinr * z).sqrt() * p.log_discount(z).exp(),
        p.fade_scale(),
        Tolerance::relative(QUAD_REL_TOL),
    )
    .map_err(|e| annotate(e, "exact derivative", link, eps))?
    .value;
    let one_minus_eps = T::one() - eps;
    // 1 − K = (1 − ψ) / (1 − ε)
    Ok(parts.complement / one_minus_eps + one_minus_eps * p.delta * q * weighted)
}

/// `∂ψ/∂ε` under the chosen model. The expanded and closed routes share one
/// derivative since they differ only by rounding.
pub fn psi_derivative<T: Real>(model: PsiModel, link: &Link<T>, eps: T) -> Result<T> {
    match model {
        PsiModel::Exact => psi_exact_deps(link, eps),
        PsiModel::Taylor | PsiModel::ClosedForm => psi_deps(link, eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(sinr: f64, theta: f64, tf: u32) -> Link<f64> {
        Link::new(sinr, theta, tf).unwrap()
    }

    #[test]
    fn params_identities() {
        let l = link(2.0, 0.01, 1000);
        let p = EcParams::new(&l, 1e-3).unwrap();
        let qinv = gaussian_q_inv(1e-3).unwrap();
        assert_eq!(p.c, p.delta * qinv);
        assert!((p.d + 14.426_950_408_889_634).abs() < 1e-12);
        assert!(p.d < 0.0);
    }

    #[test]
    fn half_eps_reduces_to_moment() {
        let l = link(0.7, 0.02, 500);
        let m = rayleigh_moment(l.d(), l.sinr).unwrap().value;
        let want = 0.5 + 0.5 * m;
        assert!((psi_closed(&l, 0.5).unwrap() - want).abs() < 1e-15);
        assert!((psi_taylor(&l, 0.5).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn psi_limits() {
        let l = link(2.0, 0.01, 1000);
        let near_one = psi_exact(&l, 1.0 - 1e-9).unwrap();
        assert!((near_one - 1.0).abs() < 1e-8);
        let lax = link(2.0, 1e-9, 1000);
        assert!((psi_exact(&lax, 0.01).unwrap() - 1.0).abs() < 1e-5);
        assert!(psi_exact(&l, 0.0).is_err());
        assert!(psi_closed(&l, 1.0).is_err());
    }

    #[test]
    fn ec_transform() {
        assert_eq!(effective_capacity(1.0_f64, 0.1, 100).unwrap(), 0.0);
        let v = effective_capacity((-100.0_f64 * 0.1).exp(), 0.1, 100).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(effective_capacity(0.0_f64, 0.1, 100).is_err());
        assert!(effective_capacity(1.5_f64, 0.1, 100).is_err());
    }

    #[test]
    fn ec_uses_complement_for_lax_delay() {
        // θ T_f = 1e-6: ψ = 1 − O(1e-6), EC stays well resolved
        let l = link(1.0, 1e-9, 1000);
        let e = ec(PsiModel::Exact, &l, 1e-3).unwrap();
        // θ → 0 limit: (1 − ε) E[r]
        let mean_rate = integrate_fade(
            |z| crate::channel::achievable_rate(1.0, z, 1000, 1e-3).unwrap(),
            1.0,
            Tolerance::relative(1e-12),
        )
        .unwrap()
        .value;
        let limit = (1.0 - 1e-3) * mean_rate;
        assert!(((e - limit) / limit).abs() < 1e-5, "{e} vs {limit}");
    }

    #[test]
    fn infinite_blocklength_strict_limit() {
        let l = link(1.0, 10.0, 1000);
        let e = ec_infinite_blocklength(&l).unwrap();
        assert!(e > 0.0 && e < 1e-3, "{e}");
    }

    #[test]
    fn model_parsing() {
        assert_eq!("exact".parse::<PsiModel>().unwrap(), PsiModel::Exact);
        assert_eq!("closed".parse::<PsiModel>().unwrap(), PsiModel::ClosedForm);
        assert!("bogus".parse::<PsiModel>().is_err());
    }
}
