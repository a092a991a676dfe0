//! Subcommand implementations. Each produces its full output in memory so
//! that the bytes can be digested and compared on replay.

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use orbgrand_fbl::bounds::{self, BoundContext, CodebookSize, McConfig, Method, RcuSampler};
use orbgrand_fbl::channel::BpskAwgn;
use orbgrand_fbl::codes::{self, LinearCode};
use orbgrand_fbl::mc;
use serde_json::json;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Single-letter ORBGRAND quantities, capacity and dispersion per SNR.
    Iorb(IorbArgs),
    /// Error probability versus rate at a fixed blocklength.
    PeCurve(PeCurveArgs),
    /// Maximal rate versus blocklength at a fixed error probability.
    RateCurve(RateCurveArgs),
    /// Minimal blocklength for a fraction of capacity.
    MinN(MinNArgs),
    /// Decoder simulation with comparison against the ORB-RCU bound.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct IorbArgs {
    /// SNR grid in dB: comma-separated values or `start:step:stop`.
    #[arg(long = "snr-db", default_value = "-6:0.5:12", allow_hyphen_values = true)]
    pub snr_db: String,
}

#[derive(Args, Debug, Clone)]
pub struct PeCurveArgs {
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub n: usize,
    /// Rates in nats per channel use (list or `start:step:stop`).
    #[arg(long)]
    pub rates: String,
    #[arg(long, default_value = "ORB_RCU_MC,ORB_NA,ML_RCU_RELAX_MC,ML_NA")]
    pub methods: String,
}

#[derive(Args, Debug, Clone)]
pub struct RateCurveArgs {
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub epsilon: f64,
    /// Blocklengths (list or `start:step:stop`).
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value = "ORB_NA,ML_NA,NA_CONVERSE")]
    pub methods: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Every SNR with every epsilon.
    Cross,
    /// The i-th SNR with the i-th epsilon.
    Zip,
}

#[derive(Args, Debug, Clone)]
pub struct MinNArgs {
    #[arg(long = "snr-db", default_value = "0,1,2,3", allow_hyphen_values = true)]
    pub snr_db: String,
    #[arg(long, default_value = "1e-3,1e-4,1e-5,1e-6")]
    pub epsilon: String,
    #[arg(long = "rate-frac", default_value = "0.8,0.9")]
    pub rate_frac: String,
    #[arg(long, default_value = "ORB_NA")]
    pub methods: String,
    #[arg(long, value_enum, default_value_t = Pairing::Zip)]
    pub pairing: Pairing,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub n: usize,
    /// Size of i.i.d. random codebooks (metric-minimization decoding).
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    pub m: Option<u64>,
    /// Dimension of a random systematic linear code (ORBGRAND decoding).
    #[arg(long)]
    pub k: Option<usize>,
    /// Total frames.
    #[arg(long, default_value_t = 1_000_000)]
    pub frames: u64,
    /// Codebooks drawn for `--m` runs; frames are split evenly.
    #[arg(long, default_value_t = 500)]
    pub codebooks: u64,
    /// Query cap for `--k` runs (default: untruncated).
    #[arg(long = "max-queries")]
    pub max_queries: Option<u64>,
}

/// Global Monte Carlo settings.
#[derive(Debug, Clone, Copy)]
pub struct Globals {
    pub seed: u64,
    pub samples: u64,
    pub shards: usize,
}

impl Globals {
    fn mc(&self) -> McConfig {
        McConfig { samples: self.samples, seed: self.seed, shards: self.shards }
    }
}

/// A finished command output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub bytes: Vec<u8>,
    /// Versioned schema identifier.
    pub schema: &'static str,
}

/// Parses `a,b,c` with items either numbers or `start:step:stop` ranges.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(x.parse::<f64>().with_context(|| format!("bad number {x:?}"))?),
            [a, step, b] => {
                let (a, step, b): (f64, f64, f64) = (a.parse()?, step.parse()?, b.parse()?);
                if !(step > 0.0) || b < a {
                    bail!("range {item:?} needs a positive step and start ≤ stop");
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + step * i as f64));
            }
            _ => bail!("cannot parse grid item {item:?}"),
        }
    }
    if out.is_empty() {
        bail!("empty grid {spec:?}");
    }
    Ok(out)
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    parse_grid(spec)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                bail!("blocklength {x} is not a positive integer")
            }
        })
        .collect()
}

fn parse_methods(spec: &str) -> Result<Vec<Method>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(w.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))?)
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// large magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && x.is_finite() && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn run(cmd: &Command, g: Globals) -> Result<Output> {
    match cmd {
        Command::Iorb(a) => iorb(a),
        Command::PeCurve(a) => pe_curve(a, g),
        Command::RateCurve(a) => rate_curve(a, g),
        Command::MinN(a) => min_n(a, g),
        Command::Simulate(a) => simulate(a, g),
    }
}

fn iorb(a: &IorbArgs) -> Result<Output> {
    let header = [
        "snr_db", "mu", "theta_mu", "sigma_sq", "i_orb_nats", "i_orb_bits", "v_orb", "capacity_nats",
        "capacity_bits", "dispersion", "below_saddlepoint_guard", "error",
    ];
    let mut rows = Vec::new();
    for snr in parse_grid(&a.snr_db)? {
        let row = BpskAwgn::new(snr).and_then(|ch| {
            let ctx = BoundContext::new(&ch, McConfig::new(0, 0))?;
            let m = ctx.model;
            Ok(vec![
                num(snr),
                num(m.mu),
                num(m.theta_mu),
                num(m.sigma_sq),
                num(m.i_orb),
                num(m.i_orb / LN_2),
                num(m.v_orb),
                num(ctx.capacity),
                num(ctx.capacity / LN_2),
                num(ctx.dispersion),
                m.below_saddlepoint_guard.to_string(),
                String::new(),
            ])
        });
        rows.push(row.unwrap_or_else(|e| {
            let mut r = vec![num(snr)];
            r.extend(std::iter::repeat_n(String::new(), 10));
            r.push(e.to_string());
            r
        }));
    }
    Ok(Output { bytes: csv_bytes(&header, rows)?, schema: "orbfbl-iorb/1" })
}

fn pe_curve(a: &PeCurveArgs, g: Globals) -> Result<Output> {
    let ch = BpskAwgn::new(a.snr_db)?;
    let ctx = BoundContext::new(&ch, g.mc())?;
    let rates = parse_grid(&a.rates)?;
    let header = [
        "snr_db", "n", "rate_nats", "rate_bits", "method", "epsilon", "ci_half_width", "samples", "seed", "status",
    ];
    let mut rows = Vec::new();
    for method in parse_methods(&a.methods)? {
        let sampler = match method {
            Method::OrbRcuMc => Some(RcuSampler::orb(&ch, a.n, ctx.mc)),
            Method::MlRcuRelaxMc => Some(RcuSampler::ml_relaxed(&ch, a.n, ctx.mc)),
            _ => None,
        };
        for &rate in &rates {
            let est = CodebookSize::from_rate(rate, a.n).map_err(anyhow::Error::from).and_then(|m| match &sampler {
                Some(Ok(s)) => Ok(s.estimate(m)),
                Some(Err(e)) => Err(anyhow::anyhow!(e.clone())),
                None => Ok(ctx.epsilon(method, a.n, m)?),
            });
            rows.push(match est {
                Ok(e) => vec![
                    num(a.snr_db),
                    a.n.to_string(),
                    num(rate),
                    num(rate / LN_2),
                    method.to_string(),
                    num(e.value),
                    num(e.half_width),
                    e.samples.to_string(),
                    if method.is_monte_carlo() { e.seed.to_string() } else { String::new() },
                    // M = 1 cannot err, so a zero estimate is exact.
                    if e.is_resolved() || e.m.exact() == Some(1) { "ok".into() } else { "unresolved".into() },
                ],
                Err(err) => vec![
                    num(a.snr_db),
                    a.n.to_string(),
                    num(rate),
                    num(rate / LN_2),
                    method.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {err}"),
                ],
            });
        }
    }
    Ok(Output { bytes: csv_bytes(&header, rows)?, schema: "orbfbl-pe-curve/1" })
}

fn rate_curve(a: &RateCurveArgs, g: Globals) -> Result<Output> {
    let ch = BpskAwgn::new(a.snr_db)?;
    let ctx = BoundContext::new(&ch, g.mc())?;
    let header = ["snr_db", "epsilon", "n", "method", "rate_nats", "rate_bits", "status"];
    let mut rows = Vec::new();
    for method in parse_methods(&a.methods)? {
        for n in parse_sizes(&a.n)? {
            let rate = match method {
                Method::OrbNa | Method::MlNa | Method::NaConverse => ctx.na_rate(method, n, a.epsilon),
                _ => ctx.max_rate(n, a.epsilon, method).map(|op| op.rate),
            };
            let base = vec![num(a.snr_db), num(a.epsilon), n.to_string(), method.to_string()];
            rows.push(match rate {
                Ok(r) => [base, vec![num(r), num(r / LN_2), "ok".into()]].concat(),
                Err(e) => [base, vec![String::new(), String::new(), format!("error: {e}")]].concat(),
            });
        }
    }
    Ok(Output { bytes: csv_bytes(&header, rows)?, schema: "orbfbl-rate-curve/1" })
}

/// Below this target the Monte Carlo bounds cannot be resolved with the
/// default sample budget.
const MC_EPSILON_FLOOR: f64 = 1e-4;

fn min_n(a: &MinNArgs, g: Globals) -> Result<Output> {
    let snrs = parse_grid(&a.snr_db)?;
    let epss = parse_grid(&a.epsilon)?;
    let fracs = parse_grid(&a.rate_frac)?;
    let methods = parse_methods(&a.methods)?;
    let pairs: Vec<(f64, f64)> = match a.pairing {
        Pairing::Cross => snrs.iter().flat_map(|&s| epss.iter().map(move |&e| (s, e))).collect(),
        Pairing::Zip => {
            if snrs.len() != epss.len() {
                bail!("--pairing zip needs as many SNRs as epsilons");
            }
            snrs.iter().copied().zip(epss.iter().copied()).collect()
        }
    };
    let header = ["snr_db", "epsilon", "rate_frac", "method", "n", "rate_nats", "rate_bits", "status"];
    let mut rows = Vec::new();
    for (snr, eps) in pairs {
        let ch = BpskAwgn::new(snr)?;
        let ctx = BoundContext::new(&ch, g.mc())?;
        for &frac in &fracs {
            for &method in &methods {
                let base = vec![num(snr), num(eps), num(frac), method.to_string()];
                let found = if method.is_monte_carlo() && eps < MC_EPSILON_FLOOR {
                    Err(anyhow::anyhow!("statistically unresolved: epsilon below {MC_EPSILON_FLOOR}"))
                } else {
                    ctx.min_blocklength(frac, eps, method).map_err(anyhow::Error::from)
                };
                rows.push(match found {
                    Ok(r) => [base, vec![r.n.to_string(), num(r.rate), num(r.rate / LN_2), "ok".into()]].concat(),
                    Err(e) => [base, vec![String::new(), String::new(), String::new(), format!("error: {e}")]].concat(),
                });
            }
        }
    }
    Ok(Output { bytes: csv_bytes(&header, rows)?, schema: "orbfbl-min-n/1" })
}

fn simulate(a: &SimulateArgs, g: Globals) -> Result<Output> {
    let ch = BpskAwgn::new(a.snr_db)?;
    let report = if let Some(m) = a.m {
        if a.codebooks == 0 || a.frames < a.codebooks {
            bail!("need at least one frame per codebook");
        }
        let per = a.frames / a.codebooks;
        let sim = codes::simulate_ensemble_fer(&ch, a.n, m, a.codebooks, per, g.seed)?;
        let size = CodebookSize::from_m(m)?;
        let bound = bounds::orb_rcu(&ch, a.n, size, g.mc())?;
        let combined_se = (sim.estimate.std_err().powi(2) + bound.std_err().powi(2)).sqrt();
        json!({
            "n": a.n,
            "M": m,
            "snr_db": a.snr_db,
            "codebooks": a.codebooks,
            "frames": sim.frames(),
            "errors": sim.errors(),
            "fer": sim.estimate.value,
            "fer_std_err": sim.estimate.std_err(),
            "avg_queries": null,
            "seed": g.seed,
            "orb_rcu": bound.to_json(),
            "fer_within_bound": sim.estimate.value <= bound.value + 3.0 * combined_se,
        })
    } else {
        let k = a.k.expect("clap requires --m or --k");
        let mut rng = mc::substream(g.seed, u64::MAX);
        let code = LinearCode::random_systematic(a.n, k, &mut rng)?;
        let max_q = a.max_queries.unwrap_or(u64::MAX);
        let run = codes::simulate_linear_code(&ch, &code, a.frames, max_q, g.seed, g.shards)?;
        json!({
            "n": a.n,
            "k": k,
            "snr_db": a.snr_db,
            "frames": run.frames,
            "errors": run.errors,
            "failures": run.failures,
            "fer": run.fer(),
            "avg_queries": run.avg_queries(),
            "max_queries": a.max_queries,
            "seed": g.seed,
        })
    };
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    Ok(Output { bytes, schema: "orbfbl-simulate/1" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_grid("-1:0.5:0").unwrap(), vec![-1.0, -0.5, 0.0]);
        assert_eq!(parse_grid("0:0.1:0.3").unwrap().len(), 4);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_sizes("10.5").is_err());
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.5, -3.25e-9, 6.02e23, 1e-310, f64::NEG_INFINITY] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.001), "0.001");
        assert_eq!(num(1e-6), "1e-6");
    }
}
