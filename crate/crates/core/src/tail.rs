//! Distribution of the competing-codeword metric `ζ_n = Σ_{i=1}^{n} i B_i`
//! with i.i.d. fair bits `B_i`.
//!
//! `ζ_n` lives on the integers `0..=T`, `T = n(n+1)/2`, so the CDF is held
//! as an exact table built by dynamic-programming convolution. Tables up to
//! [`LOG_DOMAIN_THRESHOLD`] are kept as probabilities; larger ones as natural
//! logarithms, since the smallest mass `2^{-n}` underflows doubles once `n`
//! approaches 1075.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::saddlepoint::{self, D_MIN};
use crate::scalar::Real;

/// Largest `n` built in the linear domain by [`exact_cdf_table`].
pub const LOG_DOMAIN_THRESHOLD: usize = 900;

/// Largest `n` accepted by the table builder.
pub const MAX_TABLE_N: usize = 5000;

/// Above this mean the large-deviation prefactor is dominated by its `θ_d → 0` pole.
pub const LD_DEGRADED_ABOVE: f64 = 0.2499;

/// Environment variable naming the on-disk table cache directory.
pub const CACHE_DIR_ENV: &str = "ORBFBL_TABLE_CACHE";

const MAGIC: &[u8; 4] = b"ZTAB";
const FORMAT_VERSION: u32 = 1;

/// Storage domain of a [`TailTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableDomain {
    /// Entries are `Pr[ζ_n ≤ s]`.
    Linear,
    /// Entries are `ln Pr[ζ_n ≤ s]`.
    Log,
}

impl TableDomain {
    fn code(self) -> u8 {
        match self {
            TableDomain::Linear => 0,
            TableDomain::Log => 1,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(TableDomain::Linear),
            1 => Some(TableDomain::Log),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            TableDomain::Linear => "linear",
            TableDomain::Log => "log",
        }
    }
}

/// Exact CDF of `ζ_n` over its whole support.
#[derive(Debug, Clone, PartialEq)]
pub struct TailTable<T> {
    n: usize,
    domain: TableDomain,
    values: Vec<T>,
}

/// `n(n+1)/2`, the top of the support of `ζ_n`.
pub fn support_max(n: usize) -> u64 {
    let n = n as u64;
    n * (n + 1) / 2
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_TABLE_N {
        return Err(Error::SizeGuard(format!("tail table requires 1 <= n <= {MAX_TABLE_N}, got {n}")));
    }
    Ok(())
}

/// Probability mass function of `ζ_n`, built by `n` convolution steps
/// `p[s] ← (p[s] + p[s − i]) / 2`.
///
/// The recursion keeps `p` bitwise symmetric (`p[s] = p[T − s]`) because each
/// entry is formed by the same commutative sum as its mirror.
pub fn exact_pmf<T: Real>(n: usize) -> Result<Vec<T>> {
    check_n(n)?;
    let top = support_max(n) as usize;
    let half = T::lit(0.5);
    let mut p = vec![T::zero(); top + 1];
    p[0] = T::one();
    let mut reach = 0usize;
    for i in 1..=n {
        reach += i;
        for s in (0..=reach).rev() {
            let with = if s >= i { p[s - i] } else { T::zero() };
            p[s] = (p[s] + with) * half;
        }
    }
    Ok(p)
}

/// Natural log of the pmf of `ζ_n`, via the log-sum-exp form of [`exact_pmf`].
pub fn exact_log_pmf<T: Real>(n: usize) -> Result<Vec<T>> {
    check_n(n)?;
    let top = support_max(n) as usize;
    let ln2 = T::LN_2();
    let mut lp = vec![T::neg_infinity(); top + 1];
    lp[0] = T::zero();
    let mut reach = 0usize;
    for i in 1..=n {
        reach += i;
        for s in (0..=reach).rev() {
            let with = if s >= i { lp[s - i] } else { T::neg_infinity() };
            lp[s] = lp[s].log_add_exp(with) - ln2;
        }
    }
    Ok(lp)
}

/// Builds the CDF table, in the linear domain for `n ≤ 900` and the log
/// domain above.
pub fn exact_cdf_table<T: Real>(n: usize) -> Result<TailTable<T>> {
    let domain = if n <= LOG_DOMAIN_THRESHOLD { TableDomain::Linear } else { TableDomain::Log };
    TailTable::build(n, domain)
}

/// Strong large-deviation approximation `A(d) e^{−n I(d)} / √n` of
/// `Pr[ζ_n ≤ n² d]`.
pub fn ld_cdf<T: Real>(n: usize, d: T) -> Result<T> {
    ld_log_cdf(n, d).map(T::exp)
}

/// Logarithm of [`ld_cdf`].
pub fn ld_log_cdf<T: Real>(n: usize, d: T) -> Result<T> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    if d > T::lit(LD_DEGRADED_ABOVE) {
        return Err(Error::DomainDegradation(d.to_f64().unwrap_or(f64::NAN)));
    }
    if !(d >= T::lit(D_MIN)) {
        return Err(Error::Domain(format!("ld_cdf requires d >= {D_MIN}")));
    }
    let sol = saddlepoint::solve_saddlepoint(d)?;
    let nf = T::of_usize(n);
    Ok(sol.prefactor.ln() - nf * sol.rate - T::lit(0.5) * nf.ln())
}

impl<T: Real> TailTable<T> {
    /// Builds the table in the requested domain.
    pub fn build(n: usize, domain: TableDomain) -> Result<Self> {
        let values = match domain {
            TableDomain::Linear => {
                let pmf = exact_pmf::<T>(n)?;
                // Neumaier-compensated running sum.
                let mut acc = T::zero();
                let mut comp = T::zero();
                pmf.iter()
                    .map(|&p| {
                        let t = acc + p;
                        if acc.abs() >= p.abs() {
                            comp = comp + ((acc - t) + p);
                        } else {
                            comp = comp + ((p - t) + acc);
                        }
                        acc = t;
                        acc + comp
                    })
                    .collect()
            }
            TableDomain::Log => {
                let lp = exact_log_pmf::<T>(n)?;
                let mut acc = T::neg_infinity();
                lp.iter()
                    .map(|&l| {
                        acc = acc.log_add_exp(l);
                        acc.min(T::zero())
                    })
                    .collect()
            }
        };
        Ok(Self { n, domain, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> TableDomain {
        self.domain
    }

    /// `T = n(n+1)/2`.
    pub fn support_max(&self) -> u64 {
        support_max(self.n)
    }

    /// Raw stored entries (probabilities or log-probabilities).
    pub fn raw(&self) -> &[T] {
        &self.values
    }

    fn index(&self, s: u64) -> Result<usize> {
        let max = self.support_max();
        if s > max {
            return Err(Error::OutOfRange { index: s, max });
        }
        Ok(s as usize)
    }

    /// `Pr[ζ_n ≤ s]`.
    pub fn lookup(&self, s: u64) -> Result<T> {
        let v = self.values[self.index(s)?];
        Ok(match self.domain {
            TableDomain::Linear => v,
            TableDomain::Log => v.exp(),
        })
    }

    /// `ln Pr[ζ_n ≤ s]`.
    pub fn ln_lookup(&self, s: u64) -> Result<T> {
        let v = self.values[self.index(s)?];
        Ok(match self.domain {
            TableDomain::Linear => v.ln(),
            TableDomain::Log => v,
        })
    }

    /// Unchecked `ln Pr[ζ_n ≤ s]` for hot loops; `s` must be within the support.
    #[inline]
    pub(crate) fn ln_lookup_unchecked(&self, s: u64) -> T {
        let v = self.values[s as usize];
        match self.domain {
            TableDomain::Linear => v.ln(),
            TableDomain::Log => v,
        }
    }
}

/// Free-function form of [`TailTable::lookup`].
pub fn lookup<T: Real>(table: &TailTable<T>, s: u64) -> Result<T> {
    table.lookup(s)
}

impl TailTable<f64> {
    /// Serializes the table: little-endian header `"ZTAB"`, version `u32`,
    /// `n` as `u32`, domain `u8` (0 linear, 1 log), then `T + 1` `f64` entries.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(&(self.n as u32).to_le_bytes()).map_err(io)?;
        w.write_all(&[self.domain.code()]).map_err(io)?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf).map_err(io)
    }

    /// Parses a table written by [`TailTable::write_to`].
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let mut header = [0u8; 13];
        r.read_exact(&mut header).map_err(io)?;
        if &header[0..4] != MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
        check_n(n)?;
        let domain = TableDomain::from_code(header[12])
            .ok_or_else(|| Error::Cache(format!("unknown domain code {}", header[12])))?;
        let count = support_max(n) as usize + 1;
        let mut body = Vec::new();
        r.read_to_end(&mut body).map_err(io)?;
        if body.len() != count * 8 {
            return Err(Error::Cache(format!("expected {} payload bytes, found {}", count * 8, body.len())));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(Self { n, domain, values })
    }

    /// Cache file name for `(n, domain)` inside `dir`.
    pub fn cache_path(dir: &Path, n: usize, domain: TableDomain) -> PathBuf {
        dir.join(format!("ztab_n{n}_{}.bin", domain.name()))
    }

    /// Loads the table for `n` from `dir`, building and storing it on a miss.
    /// Unreadable or mismatched cache files are rebuilt.
    pub fn load_or_build(n: usize, dir: &Path) -> Result<Self> {
        let domain = if n <= LOG_DOMAIN_THRESHOLD { TableDomain::Linear } else { TableDomain::Log };
        let path = Self::cache_path(dir, n, domain);
        if let Ok(file) = fs::File::open(&path) {
            if let Ok(t) = Self::read_from(std::io::BufReader::new(file)) {
                if t.n == n && t.domain == domain {
                    return Ok(t);
                }
            }
        }
        let table = Self::build(n, domain)?;
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        {
            let file = fs::File::create(&tmp).map_err(|e| Error::Cache(e.to_string()))?;
            let mut w = std::io::BufWriter::new(file);
            table.write_to(&mut w)?;
            w.flush().map_err(|e| Error::Cache(e.to_string()))?;
        }
        fs::rename(&tmp, &path).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(table)
    }

    /// Uses the cache directory named by `ORBFBL_TABLE_CACHE` when set,
    /// otherwise builds in memory.
    pub fn obtain(n: usize) -> Result<Self> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::load_or_build(n, Path::new(&dir)),
            _ => exact_cdf_table(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_bits_by_hand() {
        // Subset sums of {1,2,3}: 0,1,2,3,3,4,5,6.
        let t = exact_cdf_table::<f64>(3).unwrap();
        assert_eq!(t.lookup(2).unwrap(), 3.0 / 8.0);
        assert_eq!(t.lookup(3).unwrap(), 5.0 / 8.0);
        assert_eq!(t.lookup(0).unwrap(), 1.0 / 8.0);
        assert_eq!(t.lookup(6).unwrap(), 1.0);
        assert!(matches!(t.lookup(7), Err(Error::OutOfRange { index: 7, max: 6 })));
    }

    #[test]
    fn endpoints() {
        for n in [1usize, 5, 17, 64] {
            let t = exact_cdf_table::<f64>(n).unwrap();
            assert!((t.lookup(t.support_max()).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(t.lookup(0).unwrap(), 0.5f64.powi(n as i32));
        }
    }

    #[test]
    fn pmf_bitwise_symmetric() {
        for n in [2usize, 9, 40, 200] {
            let p = exact_pmf::<f64>(n).unwrap();
            let top = p.len() - 1;
            for s in 0..=top {
                assert_eq!(p[s].to_bits(), p[top - s].to_bits(), "n={n} s={s}");
            }
        }
    }

    #[test]
    fn size_guard() {
        assert!(matches!(exact_cdf_table::<f64>(0), Err(Error::SizeGuard(_))));
        assert!(matches!(exact_cdf_table::<f64>(MAX_TABLE_N + 1), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn log_and_linear_agree_small() {
        let lin = TailTable::<f64>::build(60, TableDomain::Linear).unwrap();
        let log = TailTable::<f64>::build(60, TableDomain::Log).unwrap();
        for s in 0..=lin.support_max() {
            let a = lin.lookup(s).unwrap();
            let b = log.lookup(s).unwrap();
            assert!(((a - b) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn ld_domain_checks() {
        assert!(matches!(ld_cdf(100, 0.24995f64), Err(Error::DomainDegradation(_))));
        assert!(matches!(ld_cdf(100, 1e-6f64), Err(Error::Domain(_))));
        assert!(ld_cdf(0, 0.1f64).is_err());
        let v = ld_cdf(100, 0.1f64).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn cache_round_trip_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let built = TailTable::<f64>::load_or_build(25, dir.path()).unwrap();
        let path = TailTable::cache_path(dir.path(), 25, TableDomain::Linear);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"ZTAB");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 25);
        assert_eq!(bytes[12], 0);
        assert_eq!(bytes.len(), 13 + 8 * (support_max(25) as usize + 1));
        let loaded = TailTable::<f64>::load_or_build(25, dir.path()).unwrap();
        assert_eq!(built, loaded);

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(TailTable::<f64>::read_from(&bad[..]).is_err());
        assert!(TailTable::<f64>::read_from(&bytes[..bytes.len() - 1]).is_err());
        // A corrupted cache entry is rebuilt transparently.
        std::fs::write(&path, &bad).unwrap();
        assert_eq!(TailTable::<f64>::load_or_build(25, dir.path()).unwrap(), built);
    }
}
