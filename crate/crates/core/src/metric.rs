//! The ORBGRAND decoding metric and its U-statistic diagnostics.
//!
//! For a codeword `x` and channel LLRs `l`, the metric is
//! `D(x, y) = (1/n) Σ (R_i/n) 1(sgn(l_i) x_i < 0)`, where `R_i` is the rank
//! of `|l_i|` (1 = least reliable). The integer `S = n² D = Σ R_i E_i` is
//! carried exactly. `sgn(0) = +1`; equal reliabilities are ranked by
//! ascending position, a convention for a probability-zero event.

use std::cmp::Ordering;

use crate::channel::BinaryInputChannel;
use crate::error::{Error, Result};
use crate::mc::SimRng;
use rand::Rng;

/// One evaluation of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricSample {
    /// `Σ R_i E_i ∈ [0, n(n+1)/2]`.
    pub s: u64,
    /// Blocklength.
    pub n: u32,
}

impl MetricSample {
    /// `d = s / n²`.
    pub fn d(&self) -> f64 {
        self.s as f64 / (f64::from(self.n) * f64::from(self.n))
    }
}

/// Ranks `1..=n` of `reliabilities`, smallest first, ties by ascending index.
pub fn ranks(reliabilities: &[f64]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..reliabilities.len()).collect();
    order.sort_by(|&a, &b| {
        reliabilities[a]
            .partial_cmp(&reliabilities[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut r = vec![0u32; reliabilities.len()];
    for (pos, &i) in order.iter().enumerate() {
        r[i] = pos as u32 + 1;
    }
    r
}

/// Hard decision `sgn(l)` with `sgn(0) = +1`.
#[inline]
pub fn hard_decision(llr: f64) -> i8 {
    if llr >= 0.0 {
        1
    } else {
        -1
    }
}

/// Computes `S = Σ R_i 1(sgn(l_i) x_i < 0)` for a `±1` codeword.
pub fn orb_metric(codeword: &[i8], llrs: &[f64]) -> Result<MetricSample> {
    if codeword.len() != llrs.len() {
        return Err(Error::LengthMismatch { left: codeword.len(), right: llrs.len() });
    }
    let rel: Vec<f64> = llrs.iter().map(|l| l.abs()).collect();
    let r = ranks(&rel);
    Ok(metric_with_ranks(codeword, llrs, &r))
}

/// [`orb_metric`] with precomputed ranks of `|llrs|`.
pub fn metric_with_ranks(codeword: &[i8], llrs: &[f64], ranks: &[u32]) -> MetricSample {
    let s = codeword
        .iter()
        .zip(llrs)
        .zip(ranks)
        .filter(|((&x, &l), _)| hard_decision(l) != x)
        .map(|(_, &r)| u64::from(r))
        .sum();
    MetricSample { s, n: codeword.len() as u32 }
}

/// Reusable buffers for drawing the transmitted-codeword metric.
#[derive(Debug, Default, Clone)]
pub struct MetricSampler {
    keys: Vec<u128>,
}

impl MetricSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Draws `X` uniform on `{±1}ⁿ`, passes it through the channel and
    /// returns the metric of `X` itself.
    pub fn sample<C: BinaryInputChannel + ?Sized>(&mut self, ch: &C, n: usize, rng: &mut SimRng) -> MetricSample {
        self.keys.clear();
        for i in 0..n {
            let x: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let l = ch.llr(ch.sample(x, rng));
            let e = u128::from(hard_decision(l) != x);
            // Λ ≥ 0, so its bit pattern orders like its value; the position
            // breaks ties and the low bit carries E.
            let key = (u128::from(l.abs().to_bits()) << 64) | ((i as u128) << 1) | e;
            self.keys.push(key);
        }
        self.keys.sort_unstable();
        let s = self
            .keys
            .iter()
            .enumerate()
            .filter(|(_, &k)| k & 1 == 1)
            .map(|(r, _)| r as u64 + 1)
            .sum();
        MetricSample { s, n: n as u32 }
    }
}

/// One draw of the transmitted-codeword metric.
pub fn sample_transmitted_metric<C: BinaryInputChannel + ?Sized>(ch: &C, n: usize, rng: &mut SimRng) -> MetricSample {
    MetricSampler::new().sample(ch, n, rng)
}

/// Draws `n` i.i.d. pairs `(Λ_i, E_i)` under uniform inputs.
pub fn sample_reliabilities<C: BinaryInputChannel + ?Sized>(ch: &C, n: usize, rng: &mut SimRng) -> Vec<(f64, bool)> {
    (0..n)
        .map(|_| {
            let x: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let l = ch.llr(ch.sample(x, rng));
            (l.abs(), hard_decision(l) != x)
        })
        .collect()
}

/// Piecewise-linear table of `a(λ)` on `[0, λ_max]`, zero beyond.
#[derive(Debug, Clone)]
pub struct ProjectionTable {
    step: f64,
    values: Vec<f64>,
}

impl ProjectionTable {
    const POINTS: usize = 8192;

    pub fn build<C: BinaryInputChannel + ?Sized>(ch: &C) -> Result<Self> {
        let mut lam_max = 1.0;
        while ch.a_fn(lam_max)? > 1e-16 && lam_max < 1e12 {
            lam_max *= 2.0;
        }
        let step = lam_max / Self::POINTS as f64;
        let values = (0..=Self::POINTS).map(|k| ch.a_fn(k as f64 * step)).collect::<Result<Vec<_>>>()?;
        Ok(Self { step, values })
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let x = lambda / self.step;
        let k = x.floor();
        if k >= (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let k_idx = k as usize;
        let w = x - k;
        self.values[k_idx] * (1.0 - w) + self.values[k_idx + 1] * w
    }
}

/// Samples of the Hoeffding decomposition of the transmitted metric.
///
/// With `Z_i = (Λ_i, E_i)` and the symmetric kernel
/// `ψ(z, z') = ½(e 1(λ' < λ) + e' 1(λ < λ'))`, the U-statistic
/// `M_n = (S − Σ E_i) / (n(n−1))` has mean `ς = μ` and first-order
/// projection `g(z) = ½(e Ψ(λ) + a(λ)) − ς`. The degenerate remainder is
/// `M_{n,2} = M_n − (2/n) Σ g(Z_i) − ς`, and `S/n² = (1 − 1/n) M_n + Σ E_i / n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingDiagnostics {
    /// `g(Z_i)` for every sample of every repetition.
    pub g_values: Vec<f64>,
    /// `K_i = 2 g(Z_i)`.
    pub k_values: Vec<f64>,
    /// `M_n` per repetition.
    pub m_n: Vec<f64>,
    /// `M_{n,2}` per repetition.
    pub m_n2: Vec<f64>,
    /// Kernel mean `ς` used for centring (the quadrature value of `μ`).
    pub varsigma: f64,
}

/// Runs `reps` independent blocks of length `n` and records the Hoeffding
/// projections. `Ψ` is evaluated exactly and `a` from a [`ProjectionTable`].
pub fn hoeffding_diagnostics<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    n: usize,
    reps: usize,
    rng: &mut SimRng,
) -> Result<HoeffdingDiagnostics> {
    if reps == 0 || n < 2 {
        return Err(Error::Domain("need reps ≥ 1 and n ≥ 2".into()));
    }
    let varsigma = crate::channel::compute_mu(ch)?;
    let a_table = ProjectionTable::build(ch)?;
    let mut out = HoeffdingDiagnostics {
        g_values: Vec::with_capacity(n * reps),
        k_values: Vec::with_capacity(n * reps),
        m_n: Vec::with_capacity(reps),
        m_n2: Vec::with_capacity(reps),
        varsigma,
    };
    let nf = n as f64;
    for _ in 0..reps {
        let z = sample_reliabilities(ch, n, rng);
        let rel: Vec<f64> = z.iter().map(|p| p.0).collect();
        let r = ranks(&rel);
        let mut s = 0u64;
        let mut errors = 0u64;
        let mut g_sum = 0.0;
        for (&(lam, e), &rank) in z.iter().zip(&r) {
            if e {
                s += u64::from(rank);
                errors += 1;
            }
            let ef = if e { 1.0 } else { 0.0 };
            let g = 0.5 * (ef * ch.psi(lam)? + a_table.eval(lam)) - varsigma;
            g_sum += g;
            out.g_values.push(g);
            out.k_values.push(2.0 * g);
        }
        let m_n = (s - errors) as f64 / (nf * (nf - 1.0));
        out.m_n.push(m_n);
        out.m_n2.push(m_n - 2.0 * g_sum / nf - varsigma);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_basic_and_ties() {
        assert_eq!(ranks(&[0.5, 0.1, 0.9]), vec![2, 1, 3]);
        assert_eq!(ranks(&[0.3, 0.3]), vec![1, 2]);
        assert_eq!(ranks(&[]), Vec::<u32>::new());
    }

    #[test]
    fn metric_hand_example() {
        let m = orb_metric(&[1, 1, -1, -1], &[-0.1, 2.0, -3.0, 0.5]).unwrap();
        assert_eq!(m.s, 3);
        assert_eq!(m.d(), 3.0 / 16.0);
    }

    #[test]
    fn metric_extremes() {
        let llrs = [0.4, -1.2, 0.0, 3.3, -0.7];
        let hard: Vec<i8> = llrs.iter().map(|&l| hard_decision(l)).collect();
        assert_eq!(orb_metric(&hard, &llrs).unwrap().s, 0);
        let flipped: Vec<i8> = hard.iter().map(|x| -x).collect();
        let m = orb_metric(&flipped, &llrs).unwrap();
        assert_eq!(m.s, 15);
        assert_eq!(m.d(), 6.0 / 10.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(orb_metric(&[1], &[0.1, 0.2]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn projection_table_tracks_closed_form() {
        let ch = crate::channel::BpskAwgn::new(0.0).unwrap();
        let t = ProjectionTable::build(&ch).unwrap();
        for &lam in &[0.0, 0.3, 1.7, 5.0, 11.0, 40.0] {
            assert!((t.eval(lam) - ch.a_fn(lam).unwrap()).abs() < 1e-7);
        }
    }
}
