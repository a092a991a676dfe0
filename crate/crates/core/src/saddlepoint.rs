//! Cumulant generating function of the competing-codeword metric and its
//! Legendre transform.
//!
//! With `B_i` i.i.d. fair bits, `H_n = n^{-2} Σ i B_i` has normalized CGF
//!
//! ```text
//! K_n(θ) = (1/n) Σ_{i=1}^{n} ln((1 + e^{θ i/n}) / 2)  →  K(θ) = ∫₀¹ ln((1 + e^{θx}) / 2) dx.
//! ```
//!
//! The left tail `Pr[H_n ≤ d]`, `d ∈ (0, 1/4)`, is governed by the saddlepoint
//! `θ_d < 0` solving `K'(θ_d) = d`, the rate `I(d) = θ_d d − K(θ_d)` and the
//! prefactor `A(d) = sqrt((1 + e^{θ_d}) / (4π K''(θ_d) θ_d²))`.
//!
//! Only the left-tail orientation is implemented. The sign-flipped quantities
//! of the right-tail formulation follow from `θ̃ = −θ`, `K̃(θ̃) = K(−θ̃)` and
//! `Ĩ(−d) = I(d)`.

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::scalar::Real;

/// Smallest target mean accepted by [`solve_saddlepoint`].
pub const D_MIN: f64 = 1e-4;

/// Beyond this magnitude the CGF and its derivatives switch to their
/// asymptotic forms (exact up to terms of order `e^{-|θ|}`).
pub const THETA_CAP: f64 = 700.0;

const PI2_OVER_12: f64 = std::f64::consts::PI * std::f64::consts::PI / 12.0;

fn quad<T: Real>() -> Quadrature<T> {
    Quadrature::with_abs_tol(1e-14)
}

fn panels<T: Real>(theta: T) -> Vec<T> {
    // Resolve the transition layer of the logistic at x ~ 1/|θ|.
    let scale = T::lit(40.0) / theta.abs();
    if scale < T::one() {
        vec![T::zero(), scale, T::one()]
    } else {
        vec![T::zero(), T::one()]
    }
}

fn integrate<T: Real>(theta: T, f: impl FnMut(T) -> T) -> T {
    quad::<T>()
        .integrate_panels(f, &panels(theta))
        .map(|e| e.value)
        .expect("smooth bounded integrand on [0, 1] within budget")
}

/// `K(θ) = ∫₀¹ ln((1 + e^{θx}) / 2) dx`.
pub fn cgf<T: Real>(theta: T) -> T {
    let ln2 = T::LN_2();
    if theta.abs() > T::lit(THETA_CAP) {
        let tail = T::lit(PI2_OVER_12) / theta.abs();
        return if theta > T::zero() { theta / T::lit(2.0) + tail - ln2 } else { tail - ln2 };
    }
    integrate(theta, |x| (theta * x).softplus() - ln2)
}

/// `K'(θ) = ∫₀¹ x e^{θx} / (1 + e^{θx}) dx`, strictly increasing from 0 to 1/2.
pub fn cgf_d1<T: Real>(theta: T) -> T {
    if theta.abs() > T::lit(THETA_CAP) {
        let tail = T::lit(PI2_OVER_12) / (theta * theta);
        return if theta > T::zero() { T::lit(0.5) - tail } else { tail };
    }
    integrate(theta, |x| x * (theta * x).logistic())
}

/// `K''(θ) = ∫₀¹ x² e^{θx} / (1 + e^{θx})² dx > 0`.
pub fn cgf_d2<T: Real>(theta: T) -> T {
    if theta.abs() > T::lit(THETA_CAP) {
        let pi2_6 = T::lit(2.0 * PI2_OVER_12);
        return pi2_6 / theta.abs().powi(3);
    }
    integrate(theta, |x| {
        let u = theta * x;
        x * x * u.logistic() * (-u).logistic()
    })
}

/// Finite-`n` CGF `K_n(θ) = (1/n) Σ_{i=1}^{n} ln((1 + e^{θi/n}) / 2)`.
pub fn finite_n_cgf<T: Real>(theta: T, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    let nf = T::of_usize(n);
    let ln2 = T::LN_2();
    let sum = (1..=n).fold(T::zero(), |acc, i| acc + (theta * T::of_usize(i) / nf).softplus() - ln2);
    Ok(sum / nf)
}

/// First-order trapezoid correction `H(θ) = ½ ln((1 + e^θ) / 2)`, so that
/// `K_n(θ) = K(θ) + H(θ)/n + R_n(θ)` with `|R_n(θ)| ≤ θ² / (48 n²)`.
pub fn trapezoid_correction<T: Real>(theta: T) -> T {
    T::lit(0.5) * (theta.softplus() - T::LN_2())
}

/// Solution bundle of the saddlepoint equation `K'(θ_d) = d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlepointSolution<T> {
    /// Target mean in `(0, 1/4)`.
    pub d: T,
    /// Root of `K'(θ) = d`; negative.
    pub theta_d: T,
    /// `K(θ_d)`.
    pub k: T,
    /// `K''(θ_d)`.
    pub kpp: T,
    /// `I(d) = θ_d d − K(θ_d)`.
    pub rate: T,
    /// `A(d)`.
    pub prefactor: T,
}

impl<T: Real> SaddlepointSolution<T> {
    /// `(I'(d), I''(d)) = (θ_d, 1 / K''(θ_d))`.
    pub fn rate_derivatives(&self) -> (T, T) {
        (self.theta_d, self.kpp.recip())
    }
}

/// Free-function form of [`SaddlepointSolution::rate_derivatives`].
pub fn rate_derivatives<T: Real>(sol: &SaddlepointSolution<T>) -> (T, T) {
    sol.rate_derivatives()
}

/// Solves `K'(θ) = d` for `d ∈ [D_MIN, 1/4)` by a bracketed
/// Illinois/bisection iteration on the strictly increasing `K'`.
pub fn solve_saddlepoint<T: Real>(d: T) -> Result<SaddlepointSolution<T>> {
    if !(d >= T::lit(D_MIN) && d < T::lit(0.25)) {
        return Err(Error::Domain(format!(
            "saddlepoint target d = {:?} outside [{D_MIN}, 1/4)",
            d
        )));
    }
    solve_saddlepoint_unguarded(d)
}

/// [`solve_saddlepoint`] without the `D_MIN` guard, for any `d ∈ (0, 1/4)`.
///
/// Below `K'(−THETA_CAP)` the root is taken from the asymptotic form
/// `K'(θ) = π²/(12θ²)`, which is exact there up to `e^{-|θ|}`. Callers use
/// this only for first-order quantities; tail approximations at such `d`
/// are outside their validity range.
pub fn solve_saddlepoint_unguarded<T: Real>(d: T) -> Result<SaddlepointSolution<T>> {
    let quarter = T::lit(0.25);
    if !(d > T::zero() && d < quarter) {
        return Err(Error::Domain(format!("saddlepoint target d = {:?} outside (0, 1/4)", d)));
    }
    let cap = T::lit(THETA_CAP);
    if d < cgf_d1(-cap) {
        // Split the square root so subnormal `d` does not overflow.
        let theta = -T::lit(PI2_OVER_12).sqrt() / d.sqrt();
        return Ok(bundle(d, theta));
    }
    let tol = T::tol_floor(1e-12);
    let f = |theta: T| cgf_d1(theta) - d;

    // K'(0) = 1/4 > d, so 0 is always a valid upper end.
    let mut hi = T::zero();
    let mut f_hi = quarter - d;
    let mut lo = -T::one();
    let mut f_lo = f(lo);
    let mut expansions = 0;
    while f_lo > T::zero() {
        hi = lo;
        f_hi = f_lo;
        lo = lo * T::lit(2.0);
        f_lo = f(lo);
        expansions += 1;
        if expansions > 60 || !lo.is_finite() {
            return Err(Error::BracketFailure {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let mut theta = hi;
    let mut f_theta = f_hi;
    let mut side = 0i8;
    for _ in 0..400 {
        if f_theta.abs() <= tol && theta < T::zero() {
            break;
        }
        // Illinois-modified false position, falling back to bisection when
        // the secant step degenerates.
        let mut cand = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(cand > lo && cand < hi) {
            cand = T::lit(0.5) * (lo + hi);
        }
        if cand == lo || cand == hi {
            break;
        }
        theta = cand;
        f_theta = f(theta);
        if f_theta > T::zero() {
            hi = theta;
            f_hi = f_theta;
            if side == 1 {
                f_lo = f_lo / T::lit(2.0);
            }
            side = 1;
        } else {
            lo = theta;
            f_lo = f_theta;
            if side == -1 {
                f_hi = f_hi / T::lit(2.0);
            }
            side = -1;
        }
    }
    if !(theta < T::zero()) {
        theta = T::lit(0.5) * (lo + hi);
        f_theta = f(theta);
    }
    if f_theta.abs() > tol {
        return Err(Error::BracketFailure {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }

    Ok(bundle(d, theta))
}

fn bundle<T: Real>(d: T, theta: T) -> SaddlepointSolution<T> {
    let k = cgf(theta);
    let kpp = cgf_d2(theta);
    let rate = legendre_value(theta, d, k);
    let prefactor = ((T::one() + theta.exp())
        / (T::lit(4.0) * T::PI() * kpp * theta * theta))
        .sqrt();
    SaddlepointSolution { d, theta_d: theta, k, kpp, rate, prefactor }
}

/// `θd − K(θ)` evaluated as `∫₀¹ [u σ(u) − ln(1 + e^u) + ln 2]_{u = θx} dx + θ(d − K'(θ))`.
/// The integrand is nonnegative, which keeps the rate from drifting below
/// zero by cancellation when `θ` is small.
fn legendre_value<T: Real>(theta: T, d: T, k: T) -> T {
    if theta.abs() > T::lit(THETA_CAP) {
        return (theta * d - k).max(T::zero());
    }
    let ln2 = T::LN_2();
    let core = integrate(theta, |x| {
        let u = theta * x;
        u * u.logistic() - u.softplus() + ln2
    });
    (core + theta * (d - cgf_d1(theta))).max(T::zero())
}

/// Rate function `I(d)` on `[D_MIN, 1/4]`, with `I(1/4) = 0`.
pub fn rate_function<T: Real>(d: T) -> Result<T> {
    if d == T::lit(0.25) {
        return Ok(T::zero());
    }
    solve_saddlepoint(d).map(|s| s.rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert!(cgf(0.0f64).abs() < 1e-15);
        assert!((cgf_d1(0.0f64) - 0.25).abs() <= 1e-12);
        assert!((cgf_d2(0.0f64) - 1.0 / 12.0).abs() <= 1e-12);
    }

    #[test]
    fn asymptotic_forms_join_quadrature() {
        // Just inside the cap the quadrature matches the asymptotic forms
        // used beyond it, up to O(e^{-|θ|}) and quadrature error.
        for &t in &[-699.9f64, 699.9] {
            let tail = PI2_OVER_12 / t.abs();
            let asym = if t > 0.0 { t / 2.0 + tail } else { tail } - std::f64::consts::LN_2;
            assert!((cgf(t) - asym).abs() < 1e-10 * (1.0 + asym.abs()), "{} {asym}", cgf(t));
        }
        let t = -650.0f64;
        let asym = PI2_OVER_12 / t.abs() - std::f64::consts::LN_2;
        assert!((cgf(t) - asym).abs() < 1e-12);
        assert!((cgf_d1(t) - PI2_OVER_12 / (t * t)).abs() < 1e-14);
        assert!((cgf_d2(t) - 2.0 * PI2_OVER_12 / t.abs().powi(3)).abs() < 1e-15);
    }

    #[test]
    fn finite_n_single_term_and_origin() {
        for &t in &[-3.0f64, 0.5, 2.0] {
            let k1 = finite_n_cgf(t, 1).unwrap();
            assert!((k1 - ((1.0 + t.exp()) / 2.0).ln()).abs() < 1e-15);
        }
        for n in [1usize, 7, 100] {
            assert_eq!(finite_n_cgf(0.0f64, n).unwrap(), 0.0);
        }
        assert!(finite_n_cgf(1.0f64, 0).is_err());
    }

    #[test]
    fn saddlepoint_residual_and_sign() {
        for &d in &[1e-4f64, 0.01, 0.05, 0.1, 0.2, 0.249] {
            let s = solve_saddlepoint(d).unwrap();
            assert!((cgf_d1(s.theta_d) - d).abs() <= 1e-12);
            assert!(s.theta_d < 0.0);
            assert!(s.rate > 0.0);
            assert!(s.kpp > 0.0);
            let a = ((1.0 + s.theta_d.exp()) / (4.0 * std::f64::consts::PI * s.kpp * s.theta_d.powi(2))).sqrt();
            assert!((a - s.prefactor).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn saddlepoint_next_to_quarter() {
        let s = solve_saddlepoint(0.25f64 - 1e-12).unwrap();
        assert!(s.theta_d > -1e-8 && s.theta_d < 0.0, "{}", s.theta_d);
        assert!(s.rate >= 0.0 && s.rate < 1e-20);
        assert_eq!(rate_function(0.25f64).unwrap(), 0.0);
    }

    #[test]
    fn unguarded_solver_below_guard() {
        for &d in &[5e-5f64, 1e-6, 1e-9, 1e-30] {
            let s = solve_saddlepoint_unguarded(d).unwrap();
            assert!(s.theta_d < 0.0);
            assert!((cgf_d1(s.theta_d) - d).abs() <= 1e-12 && ((cgf_d1(s.theta_d) - d) / d).abs() < 1e-7, "{d}");
            assert!(s.rate < std::f64::consts::LN_2 && s.rate > 0.0);
        }
        // Subnormal targets: θ stays finite and I rounds to ln 2.
        let s = solve_saddlepoint_unguarded(1e-310f64).unwrap();
        assert!(s.theta_d.is_finite() && s.theta_d < -1e150);
        assert_eq!(s.rate, std::f64::consts::LN_2);
        assert!(solve_saddlepoint_unguarded(0.0f64).is_err());
        assert!(matches!(solve_saddlepoint(5e-5f64), Err(Error::Domain(_))));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(solve_saddlepoint(0.25f64), Err(Error::Domain(_))));
        assert!(matches!(solve_saddlepoint(5e-5f64), Err(Error::Domain(_))));
        assert!(matches!(solve_saddlepoint(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn single_precision_solution() {
        let s = solve_saddlepoint(0.1f32).unwrap();
        let s64 = solve_saddlepoint(0.1f64).unwrap();
        assert!((s.theta_d as f64 - s64.theta_d).abs() < 1e-3);
        assert!((s.rate as f64 - s64.rate).abs() < 1e-4);
    }

    #[test]
    fn prefactor_diverges_towards_quarter() {
        let a1 = solve_saddlepoint(0.2499f64).unwrap().prefactor;
        let a2 = solve_saddlepoint(0.2f64).unwrap().prefactor;
        assert!(a1 > 100.0 * a2);
    }
}
