//! On-disk store of Fourier tables.
//!
//! One JSON file per directory. Floats are written as 17-significant-digit
//! decimal strings, records are keyed by (c, policy hash) and kept sorted.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::TableSet;
use crate::error::{Error, Result};
use crate::fourier::{fs0_is_coeff, fs_rs_coeff, FourierTable, TruncationPolicy};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_FILE: &str = "randflight-tables.json";
pub const CACHE_DIR_ENV: &str = "RANDFLIGHT_CACHE_DIR";

/// Float as a 17-significant-digit decimal string.
pub fn encode_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn decode_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Cache(format!("not a number: {s:?}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub c: u32,
    pub policy_hash: String,
    pub h_max: u32,
    pub m_max: u32,
    pub plateau: String,
    pub r_minus2: String,
    pub fs_rs: Vec<String>,
    pub fs_is: Vec<String>,
}

impl CacheRecord {
    pub fn from_table(table: &FourierTable, policy_hash: &str) -> Self {
        CacheRecord {
            c: table.c,
            policy_hash: policy_hash.to_string(),
            h_max: table.h_max,
            m_max: table.m_max,
            plateau: encode_f64(table.plateau),
            r_minus2: encode_f64(table.r_minus2),
            fs_rs: table.fs_rs.iter().map(|&x| encode_f64(x)).collect(),
            fs_is: table.fs_is.iter().map(|&x| encode_f64(x)).collect(),
        }
    }

    pub fn to_table(&self) -> Result<FourierTable> {
        let n = self.h_max as usize + 1;
        if self.fs_rs.len() != n || self.fs_is.len() != n {
            return Err(Error::Cache(format!(
                "record c={} has the wrong number of coefficients",
                self.c
            )));
        }
        let list = |v: &[String]| {
            v.iter()
                .map(|s| decode_f64(s))
                .collect::<Result<Vec<f64>>>()
        };
        Ok(FourierTable {
            c: self.c,
            h_max: self.h_max,
            m_max: self.m_max,
            fs_rs: list(&self.fs_rs)?,
            fs_is: list(&self.fs_is)?,
            plateau: decode_f64(&self.plateau)?,
            r_minus2: decode_f64(&self.r_minus2)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub records: Vec<CacheRecord>,
}

impl Default for CacheFile {
    fn default() -> Self {
        CacheFile {
            version: CACHE_VERSION,
            records: Vec::new(),
        }
    }
}

/// Outcome of re-deriving a few coefficients of one record.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub c: u32,
    pub policy_hash: String,
    pub checked: Vec<u32>,
    pub problem: Option<String>,
}

impl CacheFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cache records always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CacheFile =
            serde_json::from_str(text).map_err(|e| Error::Cache(e.to_string()))?;
        if file.version != CACHE_VERSION {
            return Err(Error::Cache(format!(
                "cache version {} is not {CACHE_VERSION}",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn path_in(dir: &Path) -> PathBuf {
        dir.join(CACHE_FILE)
    }

    /// Loads the cache in `dir`, empty if there is none.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = Self::path_in(dir);
        if !path.exists() {
            return Ok(CacheFile::default());
        }
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let path = Self::path_in(dir);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, self.to_json())?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Adds or replaces the record with the same key.
    pub fn upsert(&mut self, record: CacheRecord) {
        match self.records.binary_search_by(|r| {
            (r.c, r.policy_hash.as_str()).cmp(&(record.c, record.policy_hash.as_str()))
        }) {
            Ok(i) => self.records[i] = record,
            Err(i) => self.records.insert(i, record),
        }
    }

    pub fn find(&self, c: u32, policy_hash: &str) -> Option<&CacheRecord> {
        self.records
            .iter()
            .find(|r| r.c == c && r.policy_hash == policy_hash)
    }

    /// Stores every table of `set` under the policy it was built with.
    pub fn store_set(&mut self, set: &TableSet) {
        for t in set.tables() {
            let hash = TableSet::policy_for(set.policy(), t.c).hash();
            self.upsert(CacheRecord::from_table(t, &hash));
        }
    }

    /// Table set holding the cached tables for c = 1..=c_top under `policy`.
    /// Missing counts are simply absent.
    pub fn table_set(&self, policy: &TruncationPolicy, c_top: u32) -> Result<TableSet> {
        let mut set = TableSet::new(policy.clone());
        for c in 1..=c_top {
            if let Some(r) = self.find(c, &TableSet::policy_for(policy, c).hash()) {
                set.insert(r.to_table()?);
            }
        }
        Ok(set)
    }

    /// Recomputes `per_record` random coefficients of every record and
    /// compares their encoded form with the stored strings.
    pub fn verify(&self, per_record: usize, seed: u64) -> Vec<VerifyReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.records
            .iter()
            .map(|r| {
                let hs: Vec<u32> = (1..=r.h_max).choose_multiple(&mut rng, per_record);
                let problem = verify_record(r, &hs).err().map(|e| e.to_string());
                VerifyReport {
                    c: r.c,
                    policy_hash: r.policy_hash.clone(),
                    checked: hs,
                    problem,
                }
            })
            .collect()
    }
}

fn verify_record(r: &CacheRecord, hs: &[u32]) -> Result<()> {
    let t = r.to_table()?;
    if encode_f64(-4.0 * std::f64::consts::PI * t.plateau) != r.r_minus2 {
        return Err(Error::Cache("r_minus2 does not match the plateau".into()));
    }
    for &h in hs {
        let rs = encode_f64(fs_rs_coeff(r.c, h, r.m_max)?);
        if rs != r.fs_rs[h as usize] {
            return Err(Error::Cache(format!(
                "fs_rs[{h}] is {} but recomputes to {rs}",
                r.fs_rs[h as usize]
            )));
        }
        let is = encode_f64(fs0_is_coeff(r.c, h, r.m_max)? - t.plateau);
        if is != r.fs_is[h as usize] {
            return Err(Error::Cache(format!(
                "fs_Is[{h}] is {} but recomputes to {is}",
                r.fs_is[h as usize]
            )));
        }
    }
    Ok(())
}

/// Cache directory from an explicit flag, the environment, or the default.
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from(".randflight-cache"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_file() -> CacheFile {
        let mut set = TableSet::new(TruncationPolicy::default());
        set.ensure(4).unwrap();
        let mut f = CacheFile::default();
        f.store_set(&set);
        f
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let f = sample_file();
        let text = f.to_json();
        let back = CacheFile::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back, f);
        let t = back.records[2].to_table().unwrap();
        let set = f.table_set(&TruncationPolicy::default(), 4).unwrap();
        assert_eq!(set.get(3).unwrap(), &t);
    }

    #[test]
    fn verify_passes_and_catches_tampering() {
        let mut f = sample_file();
        assert!(f
            .verify(3, 1)
            .iter()
            .all(|r| r.problem.is_none() && r.checked.len() == 3));
        let last = f.records[3].fs_rs.len() - 1;
        for i in 1..=last {
            f.records[3].fs_rs[i] =
                encode_f64(decode_f64(&f.records[3].fs_rs[i]).unwrap() * (1.0 + 1e-9));
        }
        let rep = f.verify(3, 1);
        assert!(rep[3].problem.is_some() && rep[..3].iter().all(|r| r.problem.is_none()));
    }

    #[test]
    fn version_and_keys() {
        let mut f = sample_file();
        f.version = 99;
        assert!(matches!(
            CacheFile::from_json(&f.to_json()),
            Err(Error::Cache(_))
        ));
        let mut g = sample_file();
        let n = g.records.len();
        let again = g.records[0].clone();
        g.upsert(again);
        assert_eq!(g.records.len(), n);
        let mut other = g.records[0].clone();
        other.policy_hash = "0000000000000000".into();
        g.upsert(other);
        assert_eq!(g.records.len(), n + 1);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        assert!(CacheFile::load(dir.path()).unwrap().records.is_empty());
        let f = sample_file();
        f.save(dir.path()).unwrap();
        assert_eq!(CacheFile::load(dir.path()).unwrap(), f);
    }

    proptest! {
        #[test]
        fn float_strings_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = encode_f64(x);
            prop_assert_eq!(decode_f64(&s).unwrap().to_bits(), x.to_bits());
            prop_assert_eq!(encode_f64(decode_f64(&s).unwrap()), s);
        }
    }
}
