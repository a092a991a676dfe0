//! Binary-input memoryless channels and their single-letter ORBGRAND
//! statistics.
//!
//! For an output `y`, `L = ln(q⁺(y)/q⁻(y))` is the LLR, `Λ = |L|` the
//! reliability with CDF `Ψ`, and `E = 1(sgn(L)·X < 0)` the hard-decision
//! error indicator. Under uniform inputs `Pr[E = 1 | Y = y] = 1/(1 + e^Λ)`,
//! which turns every statistic below into a one-dimensional integral over
//! `y` against `min(q⁺, q⁻)/2` or `(q⁺ + q⁻)/2`.

use std::cell::Cell;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mc::SimRng;
use crate::quadrature::Quadrature;
use crate::saddlepoint;
use crate::scalar::Real;

const SCAN_POINTS: usize = 4096;
const DEGENERATE_TV: f64 = 1e-9;

/// Agreement required between the two evaluations of `I_ORB`.
pub const I_ORB_AGREEMENT: f64 = 1e-8;

/// A binary-input memoryless channel with input alphabet `{+1, −1}`.
///
/// Implementors provide the two output densities, a sampler, and an output
/// interval carrying all but a negligible (`≤ 1e-14`) part of both densities.
/// The statistics `psi` and `a_fn` default to quadrature; channels with
/// closed forms override them.
pub trait BinaryInputChannel: Send + Sync {
    /// Output density given input `+1`.
    fn q_plus(&self, y: f64) -> f64;

    /// Output density given input `−1`.
    fn q_minus(&self, y: f64) -> f64;

    /// Draws an output for input `x ∈ {+1, −1}`.
    fn sample(&self, x: i8, rng: &mut SimRng) -> f64;

    /// Output interval used for every integral.
    fn integration_support(&self) -> (f64, f64);

    /// `ln(q⁺(y)/q⁻(y))` in nats.
    fn llr(&self, y: f64) -> f64 {
        self.q_plus(y).ln() - self.q_minus(y).ln()
    }

    /// Sorted panel boundaries for quadrature over the support: the support
    /// ends, the LLR sign changes, and any point where the integrands are
    /// sharply peaked.
    fn quadrature_breaks(&self) -> Vec<f64> {
        let (lo, hi) = self.integration_support();
        let mut breaks = vec![lo, hi];
        breaks.extend(scan_crossings(|y| self.llr(y), 0.0, lo, hi));
        normalize_breaks(breaks, lo, hi)
    }

    /// `Ψ(t) = Pr[Λ ≤ t]` for `t ≥ 0`.
    fn psi(&self, t: f64) -> Result<f64> {
        check_reliability(t)?;
        if t == f64::INFINITY {
            return Ok(1.0);
        }
        let inside = |y: f64| self.llr(y).abs() <= t;
        let mass = integrate_level_set(self, t, inside, |y| 0.5 * (self.q_plus(y) + self.q_minus(y)))?;
        Ok(mass.clamp(0.0, 1.0))
    }

    /// `a(λ) = Pr[E = 1, Λ ≥ λ] = ½ ∫ 1(Λ(y) ≥ λ) min(q⁺(y), q⁻(y)) dy`.
    fn a_fn(&self, lambda: f64) -> Result<f64> {
        check_reliability(lambda)?;
        if lambda == f64::INFINITY {
            return Ok(0.0);
        }
        let inside = |y: f64| self.llr(y).abs() >= lambda;
        let mass = integrate_level_set(self, lambda, inside, |y| 0.5 * self.q_plus(y).min(self.q_minus(y)))?;
        Ok(mass.clamp(0.0, 0.5))
    }
}

fn check_reliability(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("reliability must be nonnegative, got {t}")));
    }
    Ok(())
}

fn normalize_breaks(mut breaks: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    breaks.retain(|b| b.is_finite() && *b >= lo && *b <= hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Panel boundaries around a Gaussian bump, dense near the mode and
/// widening geometrically so that no panel hides the peak from its nodes.
fn gaussian_breaks(mean: f64, sd: f64) -> Vec<f64> {
    const OFFSETS: [f64; 17] =
        [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0, 15.0, 20.0, 27.0, 38.0];
    OFFSETS.iter().flat_map(|&k| [mean - k * sd, mean + k * sd]).collect()
}

/// Points in `[lo, hi]` where `f(y) − level` changes sign, located on a
/// uniform scan and refined by bisection.
fn scan_crossings(f: impl Fn(f64) -> f64, level: f64, lo: f64, hi: f64) -> Vec<f64> {
    let g = |y: f64| f(y) - level;
    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut out = Vec::new();
    let mut y0 = lo;
    let mut g0 = g(y0);
    for k in 1..=SCAN_POINTS {
        let y1 = if k == SCAN_POINTS { hi } else { lo + step * k as f64 };
        let g1 = g(y1);
        if g0.is_finite() && g1.is_finite() && (g0 < 0.0) != (g1 < 0.0) {
            let (mut a, mut b, ga) = (y0, y1, g0);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if (g(m) < 0.0) == (ga < 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        y0 = y1;
        g0 = g1;
    }
    out
}

/// `∫ 1(inside(y)) density(y) dy` where the indicator switches only where
/// `|llr|` crosses `level`.
fn integrate_level_set<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    level: f64,
    inside: impl Fn(f64) -> bool,
    density: impl Fn(f64) -> f64,
) -> Result<f64> {
    let (lo, hi) = ch.integration_support();
    let mut breaks = ch.quadrature_breaks();
    breaks.extend(scan_crossings(|y| ch.llr(y).abs(), level, lo, hi));
    let breaks = normalize_breaks(breaks, lo, hi);
    let q = Quadrature::<f64>::default();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        if inside(0.5 * (w[0] + w[1])) {
            total += q.integrate(&density, w[0], w[1])?.value;
        }
    }
    Ok(total)
}

/// Runs a quadrature whose integrand may fail, surfacing the first failure.
fn integrate_fallible<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let value = Quadrature::<f64>::default()
        .integrate_panels(
            |y| match f(y) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            },
            &ch.quadrature_breaks(),
        )?
        .value;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

#[inline]
fn min_density<C: BinaryInputChannel + ?Sized>(ch: &C, y: f64) -> f64 {
    ch.q_plus(y).min(ch.q_minus(y))
}

/// Total-variation mass `∫ |q⁺ − q⁻| dy`; zero exactly for degenerate channels.
pub fn total_variation<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<f64> {
    integrate_fallible(ch, |y| Ok((ch.q_plus(y) - ch.q_minus(y)).abs()))
}

fn ensure_nondegenerate<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<()> {
    if total_variation(ch)? < DEGENERATE_TV {
        return Err(Error::DegenerateChannel);
    }
    Ok(())
}

/// `Ψ(t)`, the CDF of the reliability `Λ`.
pub fn psi<C: BinaryInputChannel + ?Sized>(ch: &C, t: f64) -> Result<f64> {
    ch.psi(t)
}

/// `a(λ) = Pr[E = 1, Λ ≥ λ]`.
pub fn compute_a<C: BinaryInputChannel + ?Sized>(ch: &C, lambda: f64) -> Result<f64> {
    ch.a_fn(lambda)
}

/// `μ = E[Ψ(Λ) E] = ½ ∫ Ψ(Λ(y)) min(q⁺(y), q⁻(y)) dy`, the two-region
/// integral over `{q⁺ < q⁻}` and `{q⁺ > q⁻}` written as one.
pub fn compute_mu<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<f64> {
    ensure_nondegenerate(ch)?;
    integrate_fallible(ch, |y| {
        let m = min_density(ch, y);
        if m == 0.0 {
            return Ok(0.0);
        }
        Ok(0.5 * m * ch.psi(ch.llr(y).abs())?)
    })
}

/// `Pr[E = 1] = a(0)`, the hard-decision error probability.
pub fn hard_error_probability<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<f64> {
    ch.a_fn(0.0)
}

/// `σ² = Var(E Ψ(Λ) + a(Λ))` from the `Y`-conditional moments
/// `E[W | y] = πΨ + a` and `E[W² | y] = πΨ² + 2πΨa + a²`, `π = 1/(1 + e^Λ)`.
pub fn compute_sigma_sq<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<f64> {
    let moments = |y: f64| -> Result<(f64, f64)> {
        let p = 0.5 * (ch.q_plus(y) + ch.q_minus(y));
        if p == 0.0 {
            return Ok((0.0, 0.0));
        }
        let lam = ch.llr(y).abs();
        let pi = (-lam).logistic();
        let psi = ch.psi(lam)?;
        let a = ch.a_fn(lam)?;
        let m1 = pi * psi + a;
        let m2 = pi * psi * psi + 2.0 * pi * psi * a + a * a;
        Ok((p * m1, p * m2))
    };
    let first = integrate_fallible(ch, |y| moments(y).map(|m| m.0))?;
    let second = integrate_fallible(ch, |y| moments(y).map(|m| m.1))?;
    Ok((second - first * first).max(0.0))
}

/// Single-letter ORBGRAND characterization of a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityModel {
    /// `μ = E[Ψ(Λ) E]`, in `[0, 1/4)`.
    pub mu: f64,
    /// `Pr[E = 1]`.
    pub hard_error_prob: f64,
    /// `σ² = Var(E Ψ(Λ) + a(Λ))`.
    pub sigma_sq: f64,
    /// Saddlepoint `θ_μ < 0` with `K'(θ_μ) = μ`; `−∞` when `μ` underflows to 0.
    pub theta_mu: f64,
    /// `I_ORB = θ_μ μ − K(θ_μ)` (nats).
    pub i_orb: f64,
    /// `I_ORB` from the explicit infimum over `θ < 0` (nats).
    pub i_orb_inf_form: f64,
    /// `V_ORB = θ_μ² σ²` (nats²).
    pub v_orb: f64,
    /// Set when `μ < D_MIN`: `θ_μ` came from the unguarded solver and the
    /// channel is in the near-noiseless regime where tail expansions at `μ`
    /// are not meaningful.
    pub below_saddlepoint_guard: bool,
}

impl ReliabilityModel {
    pub fn compute<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<Self> {
        let mu = compute_mu(ch)?;
        if !(mu >= 0.0 && mu < 0.25) {
            return Err(Error::Domain(format!("mu = {mu} outside (0, 1/4)")));
        }
        let sigma_sq = compute_sigma_sq(ch)?;
        let hard_error_prob = hard_error_probability(ch)?;
        if mu == 0.0 {
            // Errors below floating resolution: the noiseless limit.
            let ln2 = std::f64::consts::LN_2;
            return Ok(Self {
                mu,
                hard_error_prob,
                sigma_sq,
                theta_mu: f64::NEG_INFINITY,
                i_orb: ln2,
                i_orb_inf_form: ln2,
                v_orb: 0.0,
                below_saddlepoint_guard: true,
            });
        }
        let saddle = saddlepoint::solve_saddlepoint_unguarded(mu)?;
        let i_orb_inf_form = i_orb_inf_form(mu);
        if (saddle.rate - i_orb_inf_form).abs() > I_ORB_AGREEMENT {
            return Err(Error::Inconsistent(format!(
                "I_ORB Legendre form {} vs inf-form {}",
                saddle.rate, i_orb_inf_form
            )));
        }
        Ok(Self {
            mu,
            hard_error_prob,
            sigma_sq,
            theta_mu: saddle.theta_d,
            i_orb: saddle.rate,
            i_orb_inf_form,
            // θ_μ² alone can overflow when μ is subnormal.
            v_orb: (saddle.theta_d * sigma_sq.sqrt()).powi(2),
            below_saddlepoint_guard: mu < saddlepoint::D_MIN,
        })
    }
}

/// `(I_ORB, V_ORB)` for a channel.
pub fn compute_i_orb_v_orb<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<(f64, f64)> {
    ReliabilityModel::compute(ch).map(|m| (m.i_orb, m.v_orb))
}

/// `ln 2 − inf_{θ<0} { ∫₀¹ ln(1 + e^{θt}) dt − θ μ }`, minimized by golden
/// section without reference to the saddlepoint equation.
pub fn i_orb_inf_form(mu: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let objective = |theta: f64| saddlepoint::cgf(theta) + ln2 - theta * mu;
    // The objective is convex with its minimum at some θ < 0; walk left
    // until it starts increasing.
    let mut lo = -1.0;
    while objective(lo) < objective(0.5 * lo) && lo > -1e300 {
        lo *= 2.0;
    }
    let (mut a, mut b) = (lo, 0.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    ln2 - objective(0.5 * (a + b)).min(fc).min(fd)
}

/// BPSK over additive white Gaussian noise: `Y = X + Z`, `Z ~ N(0, σ_z²)`,
/// with unit symbol energy and `SNR(dB) = −10 log₁₀ σ_z²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpskAwgn {
    snr_db: f64,
    noise_var: f64,
    sigma: f64,
}

impl BpskAwgn {
    pub fn new(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() || !(-60.0..=100.0).contains(&snr_db) {
            return Err(Error::Domain(format!("snr_db must lie in [-60, 100], got {snr_db}")));
        }
        let noise_var = 10f64.powf(-snr_db / 10.0);
        Ok(Self { snr_db, noise_var, sigma: noise_var.sqrt() })
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// `σ_z²`.
    pub fn noise_variance(&self) -> f64 {
        self.noise_var
    }

    fn gauss_pdf(&self, z: f64) -> f64 {
        let u = z / self.sigma;
        (-0.5 * u * u).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

impl BinaryInputChannel for BpskAwgn {
    fn q_plus(&self, y: f64) -> f64 {
        self.gauss_pdf(y - 1.0)
    }

    fn q_minus(&self, y: f64) -> f64 {
        self.gauss_pdf(y + 1.0)
    }

    fn sample(&self, x: i8, rng: &mut SimRng) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        f64::from(x) + self.sigma * z
    }

    fn integration_support(&self) -> (f64, f64) {
        let r = 1.0 + 9.0 * self.sigma;
        (-r, r)
    }

    /// `L = 2y / σ_z²`.
    fn llr(&self, y: f64) -> f64 {
        2.0 * y / self.noise_var
    }

    fn quadrature_breaks(&self) -> Vec<f64> {
        let (lo, hi) = self.integration_support();
        let mut b = vec![lo, hi, 0.0];
        b.extend(gaussian_breaks(-1.0, self.sigma));
        b.extend(gaussian_breaks(1.0, self.sigma));
        normalize_breaks(b, lo, hi)
    }

    /// `Pr[|Y| ≤ u | X = +1]` with `u = t σ_z² / 2`.
    fn psi(&self, t: f64) -> Result<f64> {
        check_reliability(t)?;
        if t == f64::INFINITY {
            return Ok(1.0);
        }
        let u = 0.5 * t * self.noise_var;
        let s = self.sigma;
        Ok((normal_cdf((u - 1.0) / s) - normal_cdf((-u - 1.0) / s)).clamp(0.0, 1.0))
    }

    /// `Pr[Y ≥ u | X = −1] = Q((u + 1)/σ_z)` with `u = λ σ_z² / 2`.
    fn a_fn(&self, lambda: f64) -> Result<f64> {
        check_reliability(lambda)?;
        if lambda == f64::INFINITY {
            return Ok(0.0);
        }
        let u = 0.5 * lambda * self.noise_var;
        Ok(normal_cdf(-(u + 1.0) / self.sigma))
    }
}

/// Gaussian outputs with input-dependent mean and spread; asymmetric in
/// general, so every statistic runs through the quadrature defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricGaussian {
    pub mean_plus: f64,
    pub sd_plus: f64,
    pub mean_minus: f64,
    pub sd_minus: f64,
}

impl AsymmetricGaussian {
    pub fn new(mean_plus: f64, sd_plus: f64, mean_minus: f64, sd_minus: f64) -> Result<Self> {
        if !(sd_plus > 0.0 && sd_minus > 0.0) || !mean_plus.is_finite() || !mean_minus.is_finite() {
            return Err(Error::Domain("standard deviations must be positive and means finite".into()));
        }
        Ok(Self { mean_plus, sd_plus, mean_minus, sd_minus })
    }

    fn ln_pdf(y: f64, m: f64, s: f64) -> f64 {
        let u = (y - m) / s;
        -0.5 * u * u - s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }
}

impl BinaryInputChannel for AsymmetricGaussian {
    fn q_plus(&self, y: f64) -> f64 {
        Self::ln_pdf(y, self.mean_plus, self.sd_plus).exp()
    }

    fn q_minus(&self, y: f64) -> f64 {
        Self::ln_pdf(y, self.mean_minus, self.sd_minus).exp()
    }

    fn llr(&self, y: f64) -> f64 {
        Self::ln_pdf(y, self.mean_plus, self.sd_plus) - Self::ln_pdf(y, self.mean_minus, self.sd_minus)
    }

    fn sample(&self, x: i8, rng: &mut SimRng) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        if x > 0 {
            self.mean_plus + self.sd_plus * z
        } else {
            self.mean_minus + self.sd_minus * z
        }
    }

    fn integration_support(&self) -> (f64, f64) {
        let lo = (self.mean_plus - 9.0 * self.sd_plus).min(self.mean_minus - 9.0 * self.sd_minus);
        let hi = (self.mean_plus + 9.0 * self.sd_plus).max(self.mean_minus + 9.0 * self.sd_minus);
        (lo, hi)
    }

    fn quadrature_breaks(&self) -> Vec<f64> {
        let (lo, hi) = self.integration_support();
        let mut b = vec![lo, hi];
        b.extend(scan_crossings(|y| self.llr(y), 0.0, lo, hi));
        b.extend(gaussian_breaks(self.mean_plus, self.sd_plus));
        b.extend(gaussian_breaks(self.mean_minus, self.sd_minus));
        normalize_breaks(b, lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_llr_and_symmetry() {
        let ch = BpskAwgn::new(1.5).unwrap();
        for &y in &[-3.1, -0.4, 0.0, 0.7, 2.2] {
            assert_eq!(ch.llr(y), 2.0 * y / ch.noise_variance());
            assert!((ch.q_plus(y) - ch.q_minus(-y)).abs() < 1e-16);
            let direct = (ch.q_plus(y) / ch.q_minus(y)).ln();
            assert!((direct - ch.llr(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn densities_normalize() {
        let q = Quadrature::<f64>::default();
        for snr in [-10.0, 0.0, 20.0, 60.0] {
            let ch = BpskAwgn::new(snr).unwrap();
            let breaks = ch.quadrature_breaks();
            let p = q.integrate_panels(|y| ch.q_plus(y), &breaks).unwrap().value;
            let m = q.integrate_panels(|y| ch.q_minus(y), &breaks).unwrap().value;
            assert!((p - 1.0).abs() < 1e-10, "snr {snr}: {p}");
            assert!((m - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn psi_limits_and_domain() {
        let ch = BpskAwgn::new(0.0).unwrap();
        assert_eq!(ch.psi(0.0).unwrap(), 0.0);
        assert_eq!(ch.psi(f64::INFINITY).unwrap(), 1.0);
        assert!(matches!(ch.psi(-1e-3), Err(Error::Domain(_))));
        assert!(matches!(ch.a_fn(-1.0), Err(Error::Domain(_))));
        assert_eq!(ch.a_fn(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(BpskAwgn::new(f64::NAN).is_err());
        assert!(AsymmetricGaussian::new(1.0, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_channel_rejected() {
        let ch = AsymmetricGaussian::new(0.3, 1.0, 0.3, 1.0).unwrap();
        assert_eq!(compute_mu(&ch), Err(Error::DegenerateChannel));
        assert!(matches!(ReliabilityModel::compute(&ch), Err(Error::DegenerateChannel)));
    }

    #[test]
    fn scan_finds_quadratic_roots() {
        let roots = scan_crossings(|y| y * y - 2.0, 0.0, -3.0, 3.0);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((roots[1] - 2f64.sqrt()).abs() < 1e-12);
    }
}
