//! On-disk cache of gain tables.
//!
//! Layout (little-endian): magic `DBCGAIN\0`, format version `u32`, grid size
//! `u64`, source tag `u8`, then grid, cdf and pdf as `f64` arrays.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use super::table::{GainDistribution, TableSource};
use crate::channel::SeedSpec;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"DBCGAIN\0";
const VERSION: u32 = 1;

/// Identity of a cached table.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheKey {
    pub scheme: String,
    pub ps: f64,
    pub pr: f64,
    pub n: usize,
    pub seed: SeedSpec,
}

impl CacheKey {
    fn file_name(&self) -> String {
        // Power values go in by bit pattern so keys never collide through rounding.
        format!(
            "{}-{:016x}-{:016x}-{}-{:016x}-{}.gdt",
            self.scheme,
            self.ps.to_bits(),
            self.pr.to_bits(),
            self.n,
            self.seed.master_seed,
            self.seed.stream_index
        )
    }
}

#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &CacheKey) -> Result<Option<GainDistribution>> {
        let path = self.path(key);
        if !path.exists() {
            return Ok(None);
        }
        decode(&fs::read(&path)?).map(Some)
    }

    /// Writes through a temporary file so concurrent readers never see a torn table.
    pub fn store(&self, key: &CacheKey, table: &GainDistribution) -> Result<()> {
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&encode(table))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Cached table for `key`, building and storing it on a miss.
    pub fn get_or_build<F>(&self, key: &CacheKey, build: F) -> Result<GainDistribution>
    where
        F: FnOnce() -> Result<GainDistribution>,
    {
        if let Some(t) = self.load(key)? {
            return Ok(t);
        }
        let t = build()?;
        self.store(key, &t)?;
        Ok(t)
    }
}

/// Loads from `cache` when given, otherwise just builds.
pub(crate) fn cached<F>(cache: Option<&TableCache>, key: CacheKey, build: F) -> Result<GainDistribution>
where
    F: FnOnce() -> Result<GainDistribution>,
{
    match cache {
        Some(c) => c.get_or_build(&key, build),
        None => build(),
    }
}

fn encode(t: &GainDistribution) -> Vec<u8> {
    let m = t.grid.len();
    let mut out = Vec::with_capacity(21 + 24 * m);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    out.push(match t.source {
        TableSource::Quadrature => 0,
        TableSource::MonteCarlo => 1,
    });
    for arr in [&t.grid, &t.cdf, &t.pdf] {
        for v in arr.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn decode(bytes: &[u8]) -> Result<GainDistribution> {
    let bad = |what: &str| Error::Cache(what.to_string());
    if bytes.len() < 21 || &bytes[..8] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let m = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let source = match bytes[20] {
        0 => TableSource::Quadrature,
        1 => TableSource::MonteCarlo,
        other => return Err(Error::Cache(format!("unknown source tag {other}"))),
    };
    if bytes.len() != 21 + 24 * m {
        return Err(bad("truncated table"));
    }
    let read = |k: usize| -> Vec<f64> {
        let base = 21 + 8 * m * k;
        (0..m).map(|i| f64::from_le_bytes(bytes[base + 8 * i..base + 8 * i + 8].try_into().unwrap())).collect()
    };
    Ok(GainDistribution::from_exact(read(0), read(1), read(2), source))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gains::tabulate_quadrature;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path()).unwrap();
        let key = CacheKey { scheme: "a1".into(), ps: 1.0, pr: 10.0, n: 0, seed: SeedSpec::default() };
        assert!(cache.load(&key).unwrap().is_none());
        let t = tabulate_quadrature(|s| (-s).exp()).unwrap();
        cache.store(&key, &t).unwrap();
        let back = cache.load(&key).unwrap().unwrap();
        assert_eq!(back, t);
        let mut calls = 0;
        let again = cache
            .get_or_build(&key, || {
                calls += 1;
                Ok(t.clone())
            })
            .unwrap();
        assert_eq!(calls, 0);
        assert_eq!(again, t);
    }

    #[test]
    fn corrupt_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path()).unwrap();
        let key = CacheKey { scheme: "x".into(), ps: 1.0, pr: 1.0, n: 1, seed: SeedSpec::default() };
        fs::write(cache.path(&key), b"garbage").unwrap();
        assert!(matches!(cache.load(&key), Err(Error::Cache(_))));
    }
}
