//! Finite-blocklength bounds and approximations: the ORB-RCU achievability
//! bound, the ORBGRAND normal approximation, ML benchmarks, and their
//! inversions into rate-versus-`n` and minimal-blocklength figures.
//!
//! Codebook sizes are carried as `ln M`; `M` itself is never materialized
//! beyond what an `f64` holds.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{BinaryInputChannel, ReliabilityModel};
use crate::error::{Error, Result};
use crate::mc::{self, Moments, DEFAULT_SHARDS};
use crate::metric::MetricSampler;
use crate::quadrature::Quadrature;
use crate::tail::TailTable;

/// Search cap for [`BoundContext::min_blocklength`].
pub const MAX_BLOCKLENGTH: usize = 100_000;

/// Resolution in `ln M` of the rate bisection.
pub const LN_M_RESOLUTION: f64 = 1e-6;

/// Bound or estimator that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    /// Monte Carlo ORB-RCU bound with exact tail tables.
    OrbRcuMc,
    /// ORBGRAND normal approximation.
    OrbNa,
    /// Monte Carlo RCU bound for ML decoding, relaxed to `E[min{1, (M−1)e^{−i}}]`.
    MlRcuRelaxMc,
    /// Normal approximation with capacity and dispersion.
    MlNa,
    /// Normal-approximation converse benchmark.
    NaConverse,
    /// Simulated ensemble FER of metric-minimization (ORBGRAND) decoding.
    OrbSimFer,
    /// Simulated FER of ML decoding on the same codebooks.
    MlSimFer,
}

impl Method {
    pub const ALL_BOUNDS: [Method; 5] =
        [Method::OrbRcuMc, Method::OrbNa, Method::MlRcuRelaxMc, Method::MlNa, Method::NaConverse];

    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Method::OrbRcuMc | Method::MlRcuRelaxMc | Method::OrbSimFer | Method::MlSimFer)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::OrbRcuMc => "ORB_RCU_MC",
            Method::OrbNa => "ORB_NA",
            Method::MlRcuRelaxMc => "ML_RCU_RELAX_MC",
            Method::MlNa => "ML_NA",
            Method::NaConverse => "NA_CONVERSE",
            Method::OrbSimFer => "ORB_SIM_FER",
            Method::MlSimFer => "ML_SIM_FER",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Method::OrbRcuMc,
            Method::OrbNa,
            Method::MlRcuRelaxMc,
            Method::MlNa,
            Method::NaConverse,
            Method::OrbSimFer,
            Method::MlSimFer,
        ];
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        all.into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Domain(format!("unknown method {s:?}")))
    }
}

/// Codebook size `M ≥ 1`, held as `ln M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodebookSize {
    ln_m: f64,
    exact: Option<u64>,
}

impl CodebookSize {
    /// Largest `M` kept as an exact integer.
    const EXACT_LIMIT: f64 = 9.0e15;

    pub fn from_m(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("codebook size must be at least 1".into()));
        }
        Ok(Self { ln_m: (m as f64).ln(), exact: Some(m) })
    }

    /// `M` given by `ln M` directly (not rounded to an integer).
    pub fn from_ln_m(ln_m: f64) -> Result<Self> {
        if !(ln_m >= 0.0) || ln_m.is_infinite() {
            return Err(Error::Domain(format!("ln M must be finite and nonnegative, got {ln_m}")));
        }
        Ok(Self { ln_m, exact: None })
    }

    /// `M = ⌈e^{nR}⌉`.
    pub fn from_rate(rate_nats: f64, n: usize) -> Result<Self> {
        if !(rate_nats >= 0.0) || !rate_nats.is_finite() {
            return Err(Error::Domain(format!("rate must be finite and nonnegative, got {rate_nats}")));
        }
        let x = rate_nats * n as f64;
        let m = x.exp().ceil();
        if m <= Self::EXACT_LIMIT {
            Self::from_m(m as u64)
        } else {
            // ln⌈e^x⌉ − x < e^{−x}, below the resolution of x.
            Ok(Self { ln_m: x, exact: None })
        }
    }

    pub fn ln_m(&self) -> f64 {
        self.ln_m
    }

    /// `ln(M − 1)`, `−∞` for `M = 1`.
    pub fn ln_m_minus_1(&self) -> f64 {
        match self.exact {
            Some(m) => ((m - 1) as f64).ln(),
            None => self.ln_m + (-(-self.ln_m).exp()).ln_1p(),
        }
    }

    /// `M` as a float (`+∞` past the `f64` range).
    pub fn m(&self) -> f64 {
        match self.exact {
            Some(m) => m as f64,
            None => self.ln_m.exp(),
        }
    }

    pub fn exact(&self) -> Option<u64> {
        self.exact
    }

    pub fn rate(&self, n: usize) -> f64 {
        self.ln_m / n as f64
    }
}

/// A bound evaluation with its Monte Carlo provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub method: Method,
    pub n: usize,
    pub m: CodebookSize,
    /// Probability (or rate) produced by the method.
    pub value: f64,
    /// 95% confidence half-width; zero for closed forms.
    pub half_width: f64,
    pub samples: u64,
    pub seed: u64,
}

impl BoundEstimate {
    fn closed_form(method: Method, n: usize, m: CodebookSize, value: f64) -> Self {
        Self { method, n, m, value, half_width: 0.0, samples: 0, seed: 0 }
    }

    fn from_moments(method: Method, n: usize, m: CodebookSize, mom: &Moments, seed: u64) -> Self {
        Self { method, n, m, value: mom.mean, half_width: mom.half_width(), samples: mom.count, seed }
    }

    pub fn rate_nats(&self) -> f64 {
        self.m.rate(self.n)
    }

    /// Standard error implied by the half-width.
    pub fn std_err(&self) -> f64 {
        self.half_width / mc::Z95
    }

    /// Upper end of the confidence interval.
    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }

    /// False when a Monte Carlo estimate is within 3 standard errors of zero.
    pub fn is_resolved(&self) -> bool {
        !self.method.is_monte_carlo() || self.value > 3.0 * self.std_err()
    }

    /// JSON object `{method, n, M, rate_nats, value, half_width, samples, seed}`
    /// with sorted keys; `M` is `null` when it exceeds the `f64` range.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.m.m();
        serde_json::json!({
            "method": self.method.name(),
            "n": self.n,
            "M": if m.is_finite() { serde_json::json!(m) } else { serde_json::Value::Null },
            "rate_nats": self.rate_nats(),
            "value": self.value,
            "half_width": self.half_width,
            "samples": self.samples,
            "seed": self.seed,
        })
    }
}

/// A point on a rate or blocklength curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub n: usize,
    pub m: CodebookSize,
    /// `ln M / n` in nats per channel use.
    pub rate: f64,
    pub epsilon: f64,
}

/// Gaussian tail `Q(x) = Pr[N(0,1) > x]`.
pub fn q_func(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_func`] on `(0, 1)`, polished by Newton steps.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("Q⁻¹ argument must lie in (0, 1), got {p}")));
    }
    let mut x = std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p);
    for _ in 0..3 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf == 0.0 {
            break;
        }
        let step = (q_func(x) - p) / pdf;
        if !step.is_finite() {
            break;
        }
        x += step;
    }
    Ok(x)
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    Ok(())
}

/// `Q((n C − ln(M−1) + ½ ln n) / √(n V))`.
fn na_epsilon(c: f64, v: f64, n: usize, m: CodebookSize) -> Result<f64> {
    check_n(n)?;
    if !(v > 0.0) {
        return Err(Error::Domain(format!("dispersion must be positive, got {v}")));
    }
    let nf = n as f64;
    let ln_m1 = m.ln_m_minus_1();
    if ln_m1 == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(q_func((nf * c - ln_m1 + 0.5 * nf.ln()) / (nf * v).sqrt()))
}

/// `C − √(V/n) Q⁻¹(ε) + ln n / (2n)`.
fn na_rate(c: f64, v: f64, n: usize, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_epsilon(eps)?;
    let nf = n as f64;
    Ok(c - (v.max(0.0) / nf).sqrt() * q_inv(eps)? + nf.ln() / (2.0 * nf))
}

/// ORB normal approximation of the error probability.
pub fn orb_na_epsilon(model: &ReliabilityModel, n: usize, m: CodebookSize) -> Result<f64> {
    na_epsilon(model.i_orb, model.v_orb, n, m)
}

/// ORB normal approximation of the rate at error probability `eps`.
pub fn orb_na_rate(model: &ReliabilityModel, n: usize, eps: f64) -> Result<f64> {
    na_rate(model.i_orb, model.v_orb, n, eps)
}

/// `ln(M − 1)` solving `orb_na_epsilon = eps` in closed form.
pub fn orb_na_ln_m_minus_1(model: &ReliabilityModel, n: usize, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_epsilon(eps)?;
    let nf = n as f64;
    Ok(nf * model.i_orb + 0.5 * nf.ln() - (nf * model.v_orb.max(0.0)).sqrt() * q_inv(eps)?)
}

/// Normal-approximation converse benchmark `C − √(V/n) Q⁻¹(ε) + ln n/(2n)`.
pub fn na_converse_rate(capacity: f64, dispersion: f64, n: usize, eps: f64) -> Result<f64> {
    na_rate(capacity, dispersion, n, eps)
}

/// Capacity `C = E[i(X; Y)]` and dispersion `V = Var(i(X; Y))` under
/// uniform inputs, with `i(x; y) = ln(2 q_x(y) / (q⁺(y) + q⁻(y)))`.
pub fn capacity_and_dispersion<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<(f64, f64)> {
    let ln2 = std::f64::consts::LN_2;
    let breaks = ch.quadrature_breaks();
    let q = Quadrature::default();
    let density = |y: f64, k: i32| {
        let l = ch.llr(y);
        let (qp, qm) = (ch.q_plus(y), ch.q_minus(y));
        let ip = ln2 - softplus(-l);
        let im = ln2 - softplus(l);
        let mut acc = 0.0;
        if qp > 0.0 {
            acc += qp * ip.powi(k);
        }
        if qm > 0.0 {
            acc += qm * im.powi(k);
        }
        0.5 * acc
    };
    let c = q.integrate_panels(|y| density(y, 1), &breaks)?.value;
    let second = q.integrate_panels(|y| density(y, 2), &breaks)?.value;
    Ok((c, (second - c * c).max(0.0)))
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Monte Carlo configuration shared by the simulated bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub shards: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, shards: DEFAULT_SHARDS }
    }
}

/// Pre-drawn Monte Carlo sample of a bound's integrand for one blocklength.
///
/// Each sample stores `t` such that the bound's summand for codebook size
/// `M` is `min{1, exp(ln(M−1) + t)}`; evaluating many `M` values then costs
/// one pass over the stored values.
#[derive(Debug, Clone)]
pub struct RcuSampler {
    method: Method,
    n: usize,
    config: McConfig,
    shards: Vec<Vec<f64>>,
}

impl RcuSampler {
    /// Samples `ln F_{ζ_n}(S)` for the transmitted-codeword metric `S`.
    pub fn orb<C: BinaryInputChannel + ?Sized>(ch: &C, n: usize, config: McConfig) -> Result<Self> {
        check_n(n)?;
        let table = TailTable::obtain(n)?;
        let shards = mc::map_shards(config.samples, config.shards, config.seed, |rng, count| {
            let mut sampler = MetricSampler::new();
            (0..count).map(|_| table.ln_lookup_unchecked(sampler.sample(ch, n, rng).s)).collect()
        });
        Ok(Self { method: Method::OrbRcuMc, n, config, shards })
    }

    /// Samples `−Σ i(X_j; Y_j)`, the negated information density.
    pub fn ml_relaxed<C: BinaryInputChannel + ?Sized>(ch: &C, n: usize, config: McConfig) -> Result<Self> {
        check_n(n)?;
        let ln2 = std::f64::consts::LN_2;
        let shards = mc::map_shards(config.samples, config.shards, config.seed, |rng, count| {
            (0..count)
                .map(|_| {
                    let mut info = 0.0;
                    for _ in 0..n {
                        let x: i8 = if rand::Rng::random::<bool>(rng) { 1 } else { -1 };
                        let l = ch.llr(ch.sample(x, rng));
                        info += ln2 - softplus(-f64::from(x) * l);
                    }
                    -info
                })
                .collect()
        });
        Ok(Self { method: Method::MlRcuRelaxMc, n, config, shards })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Bound estimate for codebook size `m`.
    pub fn estimate(&self, m: CodebookSize) -> BoundEstimate {
        let ln_m1 = m.ln_m_minus_1();
        let parts: Vec<Moments> = self
            .shards
            .par_iter()
            .map(|ts| ts.iter().map(|&t| (ln_m1 + t).min(0.0).exp()).collect())
            .collect();
        BoundEstimate::from_moments(self.method, self.n, m, &mc::pairwise_merge(&parts), self.config.seed)
    }
}

/// ORB-RCU bound `E[min{1, (M−1) F_{ζ_n}(S)}]` by Monte Carlo.
pub fn orb_rcu<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    n: usize,
    m: CodebookSize,
    config: McConfig,
) -> Result<BoundEstimate> {
    if m.exact() == Some(1) {
        return Ok(BoundEstimate { samples: config.samples, seed: config.seed, ..BoundEstimate::closed_form(Method::OrbRcuMc, n, m, 0.0) });
    }
    Ok(RcuSampler::orb(ch, n, config)?.estimate(m))
}

/// Relaxed ML RCU bound `E[min{1, (M−1) e^{−i(X;Y)}}]` by Monte Carlo.
pub fn ml_rcu_relaxed<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    n: usize,
    m: CodebookSize,
    config: McConfig,
) -> Result<BoundEstimate> {
    if m.exact() == Some(1) {
        return Ok(BoundEstimate { samples: config.samples, seed: config.seed, ..BoundEstimate::closed_form(Method::MlRcuRelaxMc, n, m, 0.0) });
    }
    Ok(RcuSampler::ml_relaxed(ch, n, config)?.estimate(m))
}

/// One probe of a blocklength search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub n: usize,
    pub estimate: BoundEstimate,
    pub passed: bool,
}

/// Result of [`BoundContext::min_blocklength`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinBlocklength {
    pub n: usize,
    pub rate: f64,
    pub probes: Vec<Probe>,
}

/// Channel together with its single-letter quantities, ready for bound
/// evaluation.
pub struct BoundContext<'a, C: BinaryInputChannel + ?Sized> {
    pub channel: &'a C,
    pub model: ReliabilityModel,
    pub capacity: f64,
    pub dispersion: f64,
    pub mc: McConfig,
}

impl<'a, C: BinaryInputChannel + ?Sized> BoundContext<'a, C> {
    pub fn new(channel: &'a C, mc: McConfig) -> Result<Self> {
        let model = ReliabilityModel::compute(channel)?;
        let (capacity, dispersion) = capacity_and_dispersion(channel)?;
        Ok(Self { channel, model, capacity, dispersion, mc })
    }

    /// Error probability of `method` at `(n, M)`.
    pub fn epsilon(&self, method: Method, n: usize, m: CodebookSize) -> Result<BoundEstimate> {
        match method {
            Method::OrbRcuMc => orb_rcu(self.channel, n, m, self.mc),
            Method::MlRcuRelaxMc => ml_rcu_relaxed(self.channel, n, m, self.mc),
            Method::OrbNa => Ok(BoundEstimate::closed_form(method, n, m, orb_na_epsilon(&self.model, n, m)?)),
            Method::MlNa | Method::NaConverse => Ok(BoundEstimate::closed_form(
                method,
                n,
                m,
                na_epsilon(self.capacity, self.dispersion, n, m)?,
            )),
            Method::OrbSimFer | Method::MlSimFer => {
                Err(Error::Domain(format!("{method} is a simulation, not a bound")))
            }
        }
    }

    /// Rate of an NA method at `(n, ε)` in closed form.
    pub fn na_rate(&self, method: Method, n: usize, eps: f64) -> Result<f64> {
        match method {
            Method::OrbNa => orb_na_rate(&self.model, n, eps),
            Method::MlNa | Method::NaConverse => na_converse_rate(self.capacity, self.dispersion, n, eps),
            _ => Err(Error::Domain(format!("{method} has no closed-form rate"))),
        }
    }

    fn sampler(&self, method: Method, n: usize) -> Result<Option<RcuSampler>> {
        Ok(match method {
            Method::OrbRcuMc => Some(RcuSampler::orb(self.channel, n, self.mc)?),
            Method::MlRcuRelaxMc => Some(RcuSampler::ml_relaxed(self.channel, n, self.mc)?),
            _ => None,
        })
    }

    fn probe(&self, method: Method, sampler: Option<&RcuSampler>, n: usize, m: CodebookSize, eps: f64) -> Result<Probe> {
        let estimate = match sampler {
            Some(s) => s.estimate(m),
            None => self.epsilon(method, n, m)?,
        };
        // Monte Carlo decisions use the upper confidence limit.
        Ok(Probe { n, estimate, passed: estimate.upper() <= eps })
    }

    /// Largest `M` (to `ln M` resolution [`LN_M_RESOLUTION`]) whose bound is
    /// at most `eps`, found by bisection over `ln M`.
    pub fn max_rate(&self, n: usize, eps: f64, method: Method) -> Result<OperatingPoint> {
        check_n(n)?;
        check_epsilon(eps)?;
        if matches!(method, Method::NaConverse | Method::OrbSimFer | Method::MlSimFer) {
            return Err(Error::Domain(format!("max_rate does not support {method}")));
        }
        let sampler = self.sampler(method, n)?;
        let sampler = sampler.as_ref();
        let two = CodebookSize::from_m(2)?;
        if !self.probe(method, sampler, n, two, eps)?.passed {
            return Err(Error::Infeasible(format!("{method} at n = {n}, M = 2 already exceeds ε = {eps}")));
        }
        let mut lo = two.ln_m();
        let mut hi = (n as f64) * std::f64::consts::LN_2 + 1.0;
        while self.probe(method, sampler, n, CodebookSize::from_ln_m(hi)?, eps)?.passed {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 * n as f64 {
                return Err(Error::SearchCap(format!("ln M beyond {hi} still meets ε")));
            }
        }
        while hi - lo > LN_M_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if self.probe(method, sampler, n, CodebookSize::from_ln_m(mid)?, eps)?.passed {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let m = CodebookSize::from_ln_m(lo)?;
        Ok(OperatingPoint { n, m, rate: m.rate(n), epsilon: eps })
    }

    /// Smallest `n` with `bound(n, ⌈e^{nR}⌉) ≤ eps` for `R = rate_fraction · C`.
    ///
    /// Closed-form methods are scanned upward from `n = 1`. Monte Carlo
    /// methods start from the matching normal approximation, widen the
    /// bracket by a factor 1.25 until the decision flips, then bisect.
    pub fn min_blocklength(&self, rate_fraction: f64, eps: f64, method: Method) -> Result<MinBlocklength> {
        if !(rate_fraction > 0.0 && rate_fraction < 1.0) {
            return Err(Error::Domain(format!("rate fraction must lie in (0, 1), got {rate_fraction}")));
        }
        check_epsilon(eps)?;
        let rate = rate_fraction * self.capacity;
        let mut probes = Vec::new();
        let mut check = |n: usize| -> Result<bool> {
            let m = CodebookSize::from_rate(rate, n)?;
            let sampler = self.sampler(method, n)?;
            let p = self.probe(method, sampler.as_ref(), n, m, eps)?;
            probes.push(p);
            Ok(p.passed)
        };
        let n = match method {
            Method::OrbNa | Method::MlNa | Method::NaConverse => {
                let found = (1..=MAX_BLOCKLENGTH).find_map(|n| match check(n) {
                    Ok(true) => Some(Ok(n)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                });
                match found {
                    Some(r) => r?,
                    None => return Err(Error::SearchCap(format!("no n ≤ {MAX_BLOCKLENGTH} meets ε = {eps}"))),
                }
            }
            Method::OrbRcuMc | Method::MlRcuRelaxMc => {
                let guide = if method == Method::OrbRcuMc { Method::OrbNa } else { Method::MlNa };
                let start = self.min_blocklength(rate_fraction, eps, guide)?.n.max(2);
                let (mut lo, mut hi);
                if check(start)? {
                    hi = start;
                    lo = ((start as f64) / 1.25).floor() as usize;
                    while lo >= 1 && check(lo)? {
                        hi = lo;
                        lo = ((lo as f64) / 1.25).floor() as usize;
                    }
                } else {
                    lo = start;
                    hi = ((start as f64) * 1.25).ceil() as usize;
                    while !check(hi)? {
                        lo = hi;
                        hi = ((hi as f64) * 1.25).ceil() as usize;
                        if hi > MAX_BLOCKLENGTH {
                            return Err(Error::SearchCap(format!("no n ≤ {MAX_BLOCKLENGTH} meets ε = {eps}")));
                        }
                    }
                }
                // Invariant: check(lo) failed (or lo = 0), check(hi) passed.
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if check(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
            Method::OrbSimFer | Method::MlSimFer => {
                return Err(Error::Domain(format!("min_blocklength does not support {method}")))
            }
        };
        Ok(MinBlocklength { n, rate, probes })
    }
}
