//! ORBGRAND decoding: error-pattern enumeration, syndrome-checked decoding of
//! binary linear codes, and metric/ML decoding of explicit random codebooks.
//!
//! Words are packed into integers with bit `i` holding position `i`; bit 0
//! maps to symbol `+1` and bit 1 to `−1`.

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{BoundEstimate, CodebookSize, Method};
use crate::channel::BinaryInputChannel;
use crate::error::{Error, Result};
use crate::mc::{self, Moments, SimRng};
use crate::metric::ranks;

/// Largest blocklength of a [`LinearCode`].
pub const MAX_CODE_N: usize = 128;

/// Limits for explicit-codebook simulation.
pub const MAX_CODEBOOK_N: usize = 64;
pub const MAX_CODEBOOK_M: u64 = 1 << 16;

/// Binary linear code in systematic form `G = [I_k | P]`, `H = [Pᵀ | I_{n−k}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: Vec<u128>,
    parity: Vec<u128>,
    column_syndromes: Vec<u128>,
}

impl LinearCode {
    /// Builds the code from its `k × (n−k)` parity part, given row-wise with
    /// bit `j` of row `i` equal to `P[i][j]`.
    pub fn from_parity_part(n: usize, k: usize, p_rows: &[u128]) -> Result<Self> {
        if n == 0 || n > MAX_CODE_N || k > n {
            return Err(Error::SizeGuard(format!("need 0 < k ≤ n ≤ {MAX_CODE_N}, got n = {n}, k = {k}")));
        }
        if p_rows.len() != k {
            return Err(Error::LengthMismatch { left: p_rows.len(), right: k });
        }
        let r = n - k;
        let mask_r = low_mask(r);
        let generator: Vec<u128> = p_rows.iter().enumerate().map(|(i, &p)| (1u128 << i) | ((p & mask_r) << k)).collect();
        let parity: Vec<u128> = (0..r)
            .map(|j| {
                let mut row = 1u128 << (k + j);
                for (i, &p) in p_rows.iter().enumerate() {
                    if (p >> j) & 1 == 1 {
                        row |= 1u128 << i;
                    }
                }
                row
            })
            .collect();
        let column_syndromes = (0..n)
            .map(|pos| {
                parity.iter().enumerate().fold(0u128, |acc, (j, &row)| acc | (((row >> pos) & 1) << j))
            })
            .collect();
        Ok(Self { n, k, generator, parity, column_syndromes })
    }

    /// Systematic code with i.i.d. uniform parity part.
    pub fn random_systematic(n: usize, k: usize, rng: &mut SimRng) -> Result<Self> {
        if k > n {
            return Err(Error::SizeGuard(format!("k = {k} exceeds n = {n}")));
        }
        let mask = low_mask(n - k);
        let p: Vec<u128> = (0..k).map(|_| rng.random::<u128>() & mask).collect();
        Self::from_parity_part(n, k, &p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Generator rows.
    pub fn generator(&self) -> &[u128] {
        &self.generator
    }

    /// Parity-check rows.
    pub fn parity(&self) -> &[u128] {
        &self.parity
    }

    /// Codeword for the `k` message bits in `msg`.
    pub fn encode(&self, msg: u128) -> u128 {
        self.generator
            .iter()
            .enumerate()
            .filter(|(i, _)| (msg >> i) & 1 == 1)
            .fold(0, |acc, (_, &g)| acc ^ g)
    }

    /// `H w`, packed with bit `j` for check `j`.
    pub fn syndrome(&self, word: u128) -> u128 {
        let mut s = 0;
        let mut w = word;
        while w != 0 {
            let pos = w.trailing_zeros() as usize;
            s ^= self.column_syndromes[pos];
            w &= w - 1;
        }
        s
    }

    pub fn is_codeword(&self, word: u128) -> bool {
        self.syndrome(word) == 0
    }
}

fn low_mask(bits: usize) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// Rank of a set of GF(2) row vectors.
pub fn gf2_rank(rows: &[u128]) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// BPSK image of a packed word.
pub fn bpsk(word: u128, n: usize) -> Vec<i8> {
    (0..n).map(|i| if (word >> i) & 1 == 1 { -1 } else { 1 }).collect()
}

/// Set of ranks (1 = least reliable) whose positions are flipped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorPattern {
    pub flip_set: Vec<u32>,
}

impl ErrorPattern {
    /// Logistic weight `Σ flip_set`.
    pub fn weight(&self) -> u64 {
        self.flip_set.iter().map(|&r| u64::from(r)).sum()
    }
}

/// Lazy stream of error patterns in nondecreasing logistic weight; within a
/// weight, fewer flips first, then lexicographic on the sorted ranks.
#[derive(Debug, Clone)]
pub struct EpStream {
    n: u64,
    max_weight: u64,
    weight: u64,
    parts: usize,
    current: Option<Vec<u32>>,
    remaining: u64,
}

/// Error patterns of length `n`, at most `max_queries` of them.
pub fn ep_stream(n: usize, max_queries: u64) -> EpStream {
    let nn = n as u64;
    EpStream {
        n: nn,
        max_weight: nn * (nn + 1) / 2,
        weight: 0,
        parts: 0,
        current: Some(Vec::new()),
        remaining: max_queries,
    }
}

/// Sum of the `count` largest distinct values in `1..=n`.
fn max_sum(n: u64, count: u64) -> u64 {
    if count == 0 {
        0
    } else {
        count * n - count * (count - 1) / 2
    }
}

/// Sum of `count` distinct values all greater than `floor`.
fn min_sum(floor: u64, count: u64) -> u64 {
    count * floor + count * (count + 1) / 2
}

impl EpStream {
    /// Lexicographically smallest completion: `count` distinct parts above
    /// `floor`, at most `n`, summing to `rest`.
    fn fill(&self, out: &mut Vec<u32>, mut floor: u64, mut rest: u64, count: u64) -> bool {
        if rest < min_sum(floor, count) || (count > 0 && rest > max_sum(self.n, count)) {
            return false;
        }
        for left in (1..=count).rev() {
            let x = (floor + 1).max(rest.saturating_sub(max_sum(self.n, left - 1)));
            out.push(x as u32);
            rest -= x;
            floor = x;
        }
        rest == 0
    }

    fn first_with(&self, weight: u64, parts: usize) -> Option<Vec<u32>> {
        let mut v = Vec::with_capacity(parts);
        self.fill(&mut v, 0, weight, parts as u64).then_some(v)
    }

    /// Next pattern of the same weight and size: bump the rightmost part
    /// that admits a feasible smallest completion.
    fn successor(&self, cur: &[u32]) -> Option<Vec<u32>> {
        let k = cur.len();
        let mut head: u64 = 0;
        let heads: Vec<u64> = cur
            .iter()
            .map(|&x| {
                let h = head;
                head += u64::from(x);
                h
            })
            .collect();
        for i in (0..k.saturating_sub(1)).rev() {
            let v = u64::from(cur[i]) + 1;
            if v > self.n || heads[i] + v > self.weight {
                continue;
            }
            let mut next: Vec<u32> = cur[..i].to_vec();
            next.push(v as u32);
            if self.fill(&mut next, v, self.weight - heads[i] - v, (k - i - 1) as u64) {
                return Some(next);
            }
        }
        None
    }

    fn advance(&mut self) {
        let cur = self.current.take().expect("advance on live stream");
        if let Some(next) = self.successor(&cur) {
            self.current = Some(next);
            return;
        }
        let mut parts = self.parts + 1;
        let mut weight = self.weight;
        loop {
            if min_sum(0, parts as u64) > weight || parts as u64 > self.n {
                weight += 1;
                parts = 1;
                if weight > self.max_weight {
                    return;
                }
            }
            if let Some(first) = self.first_with(weight, parts) {
                self.weight = weight;
                self.parts = parts;
                self.current = Some(first);
                return;
            }
            parts += 1;
        }
    }
}

impl Iterator for EpStream {
    type Item = ErrorPattern;

    fn next(&mut self) -> Option<ErrorPattern> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current.clone()?;
        self.remaining -= 1;
        self.advance();
        Some(ErrorPattern { flip_set: out })
    }
}

/// Outcome of [`orbgrand_decode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// First codeword found and the number of queries spent (1-based).
    Codeword { word: u128, queries: u64 },
    /// No codeword within the query budget.
    Failure { queries: u64 },
}

impl DecodeOutcome {
    pub fn queries(&self) -> u64 {
        match *self {
            DecodeOutcome::Codeword { queries, .. } | DecodeOutcome::Failure { queries } => queries,
        }
    }
}

/// Packed hard decisions, `sgn(0) = +1` (bit 0).
pub fn hard_word(llrs: &[f64]) -> u128 {
    llrs.iter().enumerate().fold(0, |acc, (i, &l)| acc | (u128::from(l < 0.0) << i))
}

/// ORBGRAND: flip hard decisions along [`ep_stream`], mapping rank `r` to
/// the position with the `r`-th smallest reliability, until the syndrome
/// vanishes.
pub fn orbgrand_decode(code: &LinearCode, llrs: &[f64], max_queries: u64) -> Result<DecodeOutcome> {
    if llrs.len() != code.n {
        return Err(Error::LengthMismatch { left: llrs.len(), right: code.n });
    }
    let hard = hard_word(llrs);
    let s0 = code.syndrome(hard);
    let rel: Vec<f64> = llrs.iter().map(|l| l.abs()).collect();
    let r = ranks(&rel);
    let mut pos_of_rank = vec![0usize; code.n];
    for (pos, &rank) in r.iter().enumerate() {
        pos_of_rank[rank as usize - 1] = pos;
    }
    let mut queries = 0;
    for ep in ep_stream(code.n, max_queries) {
        queries += 1;
        let mut flip = 0u128;
        let mut s = s0;
        for &rank in &ep.flip_set {
            let pos = pos_of_rank[rank as usize - 1];
            flip |= 1u128 << pos;
            s ^= code.column_syndromes[pos];
        }
        if s == 0 {
            return Ok(DecodeOutcome::Codeword { word: hard ^ flip, queries });
        }
    }
    Ok(DecodeOutcome::Failure { queries })
}

/// Explicit codebook of `M` words of length `n ≤ 64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    words: Vec<u64>,
}

impl Codebook {
    pub fn new(n: usize, words: Vec<u64>) -> Result<Self> {
        check_codebook_size(n, words.len() as u64)?;
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if words.iter().any(|w| w & !mask != 0) {
            return Err(Error::Domain("codeword has bits beyond position n".into()));
        }
        Ok(Self { n, words })
    }

    /// I.i.d. uniform codebook.
    pub fn random(n: usize, m: u64, rng: &mut SimRng) -> Result<Self> {
        check_codebook_size(n, m)?;
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let words = (0..m).map(|_| rng.random::<u64>() & mask).collect();
        Ok(Self { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> u64 {
        self.words[i]
    }

    /// BPSK image of codeword `i`.
    pub fn symbols(&self, i: usize) -> Vec<i8> {
        bpsk(u128::from(self.words[i]), self.n)
    }
}

fn check_codebook_size(n: usize, m: u64) -> Result<()> {
    if n == 0 || n > MAX_CODEBOOK_N || m == 0 || m > MAX_CODEBOOK_M {
        return Err(Error::SizeGuard(format!(
            "explicit codebooks need 1 ≤ n ≤ {MAX_CODEBOOK_N} and 1 ≤ M ≤ {MAX_CODEBOOK_M}, got n = {n}, M = {m}"
        )));
    }
    Ok(())
}

/// Per-position data for scoring every codeword of a frame.
struct FrameScores {
    hard: u64,
    rank: Vec<u64>,
}

impl FrameScores {
    fn new(llrs: &[f64]) -> Self {
        let hard = llrs.iter().enumerate().fold(0u64, |acc, (i, &l)| acc | (u64::from(l < 0.0) << i));
        let rel: Vec<f64> = llrs.iter().map(|l| l.abs()).collect();
        Self { hard, rank: ranks(&rel).into_iter().map(u64::from).collect() }
    }

    /// `S` for a packed codeword.
    #[inline]
    fn metric(&self, word: u64) -> u64 {
        let mut diff = word ^ self.hard;
        let mut s = 0;
        while diff != 0 {
            s += self.rank[diff.trailing_zeros() as usize];
            diff &= diff - 1;
        }
        s
    }
}

/// Metric-minimizing decision over a codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricDecision {
    /// Smallest index attaining the minimum metric.
    pub index: usize,
    /// The minimum `S`.
    pub s: u64,
    /// Number of codewords attaining the minimum.
    pub ties: usize,
}

/// Minimizes the ORB metric over `codebook`, ties to the smallest index.
pub fn metric_decode(codebook: &Codebook, llrs: &[f64]) -> Result<MetricDecision> {
    if llrs.len() != codebook.n {
        return Err(Error::LengthMismatch { left: llrs.len(), right: codebook.n });
    }
    let scores = FrameScores::new(llrs);
    Ok(metric_decide(codebook, &scores))
}

fn metric_decide(codebook: &Codebook, scores: &FrameScores) -> MetricDecision {
    let mut best = MetricDecision { index: 0, s: u64::MAX, ties: 0 };
    for (i, &w) in codebook.words.iter().enumerate() {
        let s = scores.metric(w);
        if s < best.s {
            best = MetricDecision { index: i, s, ties: 1 };
        } else if s == best.s {
            best.ties += 1;
        }
    }
    best
}

/// Maximum-likelihood decision `argmax Σ x_i l_i`, ties to the smallest index.
///
/// For any binary-input memoryless channel `ln q_x(y) = ½ x L(y) + c(y)`, so
/// this correlation equals the log-likelihood up to a codeword-independent
/// constant.
pub fn ml_decode(codebook: &Codebook, llrs: &[f64]) -> Result<usize> {
    if llrs.len() != codebook.n {
        return Err(Error::LengthMismatch { left: llrs.len(), right: codebook.n });
    }
    Ok(ml_decide(codebook, llrs))
}

fn ml_decide(codebook: &Codebook, llrs: &[f64]) -> usize {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &w) in codebook.words.iter().enumerate() {
        let corr: f64 = llrs
            .iter()
            .enumerate()
            .map(|(p, &l)| if (w >> p) & 1 == 1 { -l } else { l })
            .sum();
        if corr > best.1 {
            best = (i, corr);
        }
    }
    best.0
}

fn transmit<C: BinaryInputChannel + ?Sized>(ch: &C, word: u64, n: usize, rng: &mut SimRng, out: &mut Vec<f64>) {
    out.clear();
    for p in 0..n {
        let x: i8 = if (word >> p) & 1 == 1 { -1 } else { 1 };
        out.push(ch.llr(ch.sample(x, rng)));
    }
}

/// Frame error counts of one simulated codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodebookTally {
    pub frames: u64,
    pub errors: u64,
}

impl CodebookTally {
    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.errors as f64 / self.frames as f64
        }
    }

    /// Binomial standard error of [`CodebookTally::fer`].
    pub fn std_err(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        let p = self.fer();
        (p * (1.0 - p) / self.frames as f64).sqrt()
    }
}

/// Ensemble FER simulation result.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFer {
    /// Ensemble-average FER; `samples` counts frames.
    pub estimate: BoundEstimate,
    pub per_codebook: Vec<CodebookTally>,
}

impl EnsembleFer {
    pub fn frames(&self) -> u64 {
        self.per_codebook.iter().map(|t| t.frames).sum()
    }

    pub fn errors(&self) -> u64 {
        self.per_codebook.iter().map(|t| t.errors).sum()
    }
}

fn ensemble_estimate(method: Method, n: usize, m: u64, seed: u64, tallies: &[CodebookTally]) -> Result<BoundEstimate> {
    let frames: u64 = tallies.iter().map(|t| t.frames).sum();
    let errors: u64 = tallies.iter().map(|t| t.errors).sum();
    let value = if frames == 0 { 0.0 } else { errors as f64 / frames as f64 };
    // Codebooks are i.i.d. with equal frame counts, so the spread of their
    // FERs yields the standard error of the ensemble mean.
    let se = if tallies.len() >= 2 {
        let mom: Moments = tallies.iter().map(CodebookTally::fer).collect();
        mom.std_err()
    } else {
        (value * (1.0 - value) / frames.max(1) as f64).sqrt()
    };
    Ok(BoundEstimate {
        method,
        n,
        m: CodebookSize::from_m(m)?,
        value,
        half_width: mc::Z95 * se,
        samples: frames,
        seed,
    })
}

/// Ensemble-average FER of metric-minimization decoding over i.i.d. uniform
/// codebooks. Codebook `c` uses RNG stream `c`; message 0 is sent; a frame
/// is an error when any other codeword has metric `≤` that of the sent one.
pub fn simulate_ensemble_fer<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    n: usize,
    m: u64,
    codebooks: u64,
    frames_per_codebook: u64,
    seed: u64,
) -> Result<EnsembleFer> {
    check_codebook_size(n, m)?;
    let per_codebook: Vec<CodebookTally> = (0..codebooks)
        .into_par_iter()
        .map(|c| {
            let mut rng = mc::substream(seed, c);
            let book = Codebook::random(n, m, &mut rng).expect("size checked");
            let sent = book.word(0);
            let mut llrs = Vec::with_capacity(n);
            let mut errors = 0;
            for _ in 0..frames_per_codebook {
                transmit(ch, sent, n, &mut rng, &mut llrs);
                let scores = FrameScores::new(&llrs);
                let s_sent = scores.metric(sent);
                if book.words[1..].iter().any(|&w| scores.metric(w) <= s_sent) {
                    errors += 1;
                }
            }
            CodebookTally { frames: frames_per_codebook, errors }
        })
        .collect();
    let estimate = ensemble_estimate(Method::OrbSimFer, n, m, seed, &per_codebook)?;
    Ok(EnsembleFer { estimate, per_codebook })
}

/// Paired ORBGRAND-metric and ML FERs on the same codebooks and noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedFer {
    pub orb: EnsembleFer,
    pub ml: EnsembleFer,
}

/// Simulates metric-minimization and ML decoding on shared frames with
/// uniformly drawn messages, both with the smallest-index tie-break. ML
/// minimizes the message-averaged error, so for every codebook its FER
/// cannot exceed that of any other decoder in expectation.
pub fn simulate_paired_fer<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    n: usize,
    m: u64,
    codebooks: u64,
    frames_per_codebook: u64,
    seed: u64,
) -> Result<PairedFer> {
    check_codebook_size(n, m)?;
    let pairs: Vec<(CodebookTally, CodebookTally)> = (0..codebooks)
        .into_par_iter()
        .map(|c| {
            let mut rng = mc::substream(seed, c);
            let book = Codebook::random(n, m, &mut rng).expect("size checked");
            let mut llrs = Vec::with_capacity(n);
            let (mut orb_err, mut ml_err) = (0, 0);
            for _ in 0..frames_per_codebook {
                let msg = rng.random_range(0..m as usize);
                transmit(ch, book.word(msg), n, &mut rng, &mut llrs);
                let scores = FrameScores::new(&llrs);
                if metric_decide(&book, &scores).index != msg {
                    orb_err += 1;
                }
                if ml_decide(&book, &llrs) != msg {
                    ml_err += 1;
                }
            }
            (
                CodebookTally { frames: frames_per_codebook, errors: orb_err },
                CodebookTally { frames: frames_per_codebook, errors: ml_err },
            )
        })
        .collect();
    let (orb_t, ml_t): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(PairedFer {
        orb: EnsembleFer { estimate: ensemble_estimate(Method::OrbSimFer, n, m, seed, &orb_t)?, per_codebook: orb_t },
        ml: EnsembleFer { estimate: ensemble_estimate(Method::MlSimFer, n, m, seed, &ml_t)?, per_codebook: ml_t },
    })
}

/// Result of decoding a linear code with ORBGRAND over a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCodeRun {
    pub frames: u64,
    pub errors: u64,
    pub failures: u64,
    pub total_queries: u64,
}

impl LinearCodeRun {
    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.errors as f64 / self.frames as f64
        }
    }

    pub fn avg_queries(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.total_queries as f64 / self.frames as f64
        }
    }
}

/// Sends uniformly random messages of `code` through `ch` and decodes them
/// with [`orbgrand_decode`]; decoding failures count as frame errors.
pub fn simulate_linear_code<C: BinaryInputChannel + ?Sized>(
    ch: &C,
    code: &LinearCode,
    frames: u64,
    max_queries: u64,
    seed: u64,
    shards: usize,
) -> Result<LinearCodeRun> {
    let parts = mc::map_shards(frames, shards, seed, |rng, count| -> Result<LinearCodeRun> {
        let mut run = LinearCodeRun { frames: 0, errors: 0, failures: 0, total_queries: 0 };
        let mut llrs = Vec::with_capacity(code.n);
        for _ in 0..count {
            let msg = rng.random::<u128>() & low_mask(code.k);
            let word = code.encode(msg);
            llrs.clear();
            for &x in &bpsk(word, code.n) {
                llrs.push(ch.llr(ch.sample(x, rng)));
            }
            let out = orbgrand_decode(code, &llrs, max_queries)?;
            run.frames += 1;
            run.total_queries += out.queries();
            match out {
                DecodeOutcome::Codeword { word: w, .. } if w == word => {}
                DecodeOutcome::Codeword { .. } => run.errors += 1,
                DecodeOutcome::Failure { .. } => {
                    run.errors += 1;
                    run.failures += 1;
                }
            }
        }
        Ok(run)
    });
    parts.into_iter().try_fold(
        LinearCodeRun { frames: 0, errors: 0, failures: 0, total_queries: 0 },
        |acc, p| {
            let p = p?;
            Ok(LinearCodeRun {
                frames: acc.frames + p.frames,
                errors: acc.errors + p.errors,
                failures: acc.failures + p.failures,
                total_queries: acc.total_queries + p.total_queries,
            })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_patterns_for_n3() {
        let got: Vec<Vec<u32>> = ep_stream(3, 5).map(|e| e.flip_set).collect();
        assert_eq!(got, vec![vec![], vec![1], vec![2], vec![3], vec![1, 2]]);
    }

    #[test]
    fn full_stream_counts_all_subsets() {
        for n in 1..=10 {
            assert_eq!(ep_stream(n, u64::MAX).count(), 1 << n);
        }
    }

    #[test]
    fn systematic_code_is_consistent() {
        let mut rng = mc::substream(3, 0);
        let code = LinearCode::random_systematic(20, 9, &mut rng).unwrap();
        assert_eq!(gf2_rank(code.generator()), 9);
        for &g in code.generator() {
            assert_eq!(code.syndrome(g), 0);
            for &h in code.parity() {
                assert_eq!((g & h).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn hard_word_sign_convention() {
        assert_eq!(hard_word(&[0.0, -0.0, -1.0, 2.0]), 0b0100);
    }

    #[test]
    fn single_codeword_and_guards() {
        let book = Codebook::new(4, vec![0b1010]).unwrap();
        assert_eq!(ml_decode(&book, &[1.0, -1.0, 1.0, 1.0]).unwrap(), 0);
        assert!(Codebook::new(65, vec![0]).is_err());
        assert!(Codebook::new(4, vec![0b10000]).is_err());
    }
}
