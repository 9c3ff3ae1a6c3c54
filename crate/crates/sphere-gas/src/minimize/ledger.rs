//! The best-known-minimum ledger.
//!
//! A JSON document holding, for each n, the smallest energy ever observed
//! together with a digest of the witnessing configuration. The document is an
//! array of entries `{n, energy, digest, source, timestamp}`; the witnessing
//! configurations themselves are stored as CSV files in a sibling directory
//! `<stem>_configs/n<N>.csv`, so bound checks can reload the actual minimizer.
//!
//! Updates are atomic: both the JSON document and the configuration file are
//! written to a temporary path and renamed into place. For a fixed n the
//! stored energy is monotone non-increasing over updates.

use crate::energy::Configuration;
use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// How a ledger configuration was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LedgerSource {
    /// An explicitly constructed configuration (e.g. a known polyhedron).
    Analytic,
    /// Multi-start gradient descent from random starts.
    Optimizer,
    /// Descent warm-started from Coulomb-gas samples.
    McmcRefined,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimumLedgerEntry {
    pub n: usize,
    pub energy: f64,
    #[serde(rename = "digest")]
    pub config_digest: String,
    pub source: LedgerSource,
    /// Seconds since the Unix epoch at commit time.
    pub timestamp: u64,
}

impl MinimumLedgerEntry {
    pub fn new(n: usize, energy: f64, config: &Configuration, source: LedgerSource) -> Self {
        Self {
            n,
            energy,
            config_digest: configuration_digest(config),
            source,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// FNV-1a over the little-endian bit patterns of the coordinates.
pub fn configuration_digest(config: &Configuration) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for p in config.points() {
        for c in p.coords() {
            for byte in c.to_bits().to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    format!("{hash:016x}")
}

/// In-memory view of the ledger, optionally persisted to disk.
#[derive(Debug)]
pub struct Ledger {
    path: Option<PathBuf>,
    entries: BTreeMap<usize, MinimumLedgerEntry>,
    configs: BTreeMap<usize, Configuration>,
}

impl Ledger {
    /// A ledger that lives only in memory. Used by tests and by callers that
    /// manage persistence themselves.
    pub fn in_memory() -> Self {
        Self {
            path: None,
            entries: BTreeMap::new(),
            configs: BTreeMap::new(),
        }
    }

    /// Opens (or creates on first update) the ledger at `path`, loading all
    /// entries and any stored configurations.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut ledger = Self {
            path: Some(path.clone()),
            entries: BTreeMap::new(),
            configs: BTreeMap::new(),
        };
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            let entries: Vec<MinimumLedgerEntry> = serde_json::from_str(&text)?;
            for e in entries {
                let n = e.n;
                ledger.entries.insert(n, e);
                if let Some(config) = ledger.load_config_file(n)? {
                    ledger.verify_digest(n, &config)?;
                    ledger.configs.insert(n, config);
                }
            }
        }
        Ok(ledger)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MinimumLedgerEntry> {
        self.entries.values()
    }

    pub fn entry(&self, n: usize) -> Option<&MinimumLedgerEntry> {
        self.entries.get(&n)
    }

    pub fn energy(&self, n: usize) -> Option<f64> {
        self.entries.get(&n).map(|e| e.energy)
    }

    /// The stored minimizer for `n`, if any.
    pub fn configuration(&self, n: usize) -> Result<Option<Configuration>> {
        Ok(self.configs.get(&n).cloned())
    }

    /// Records `entry` if it improves on the stored energy for its n. Returns
    /// whether the ledger changed. Persisted ledgers rewrite both artifacts
    /// atomically before the in-memory state changes.
    pub fn update(&mut self, entry: MinimumLedgerEntry, config: &Configuration) -> Result<bool> {
        if config.len() != entry.n {
            return Err(Error::InvalidParameter(format!(
                "entry is for n = {} but the configuration has {} points",
                entry.n,
                config.len()
            )));
        }
        let expected = configuration_digest(config);
        if expected != entry.config_digest {
            return Err(Error::LedgerDigestMismatch {
                n: entry.n,
                expected: entry.config_digest,
                found: expected,
            });
        }
        if let Some(existing) = self.entries.get(&entry.n) {
            if entry.energy >= existing.energy {
                return Ok(false);
            }
        }
        let n = entry.n;
        self.entries.insert(n, entry);
        self.configs.insert(n, config.clone());
        if self.path.is_some() {
            self.persist(n)?;
        }
        Ok(true)
    }

    fn configs_dir(&self) -> Option<PathBuf> {
        let path = self.path.as_ref()?;
        let stem = path.file_stem()?.to_string_lossy().into_owned();
        Some(path.with_file_name(format!("{stem}_configs")))
    }

    fn config_file(&self, n: usize) -> Option<PathBuf> {
        self.configs_dir().map(|d| d.join(format!("n{n}.csv")))
    }

    fn persist(&self, updated_n: usize) -> Result<()> {
        let path = self.path.as_ref().expect("persist called on disk ledger");
        let dir = self
            .configs_dir()
            .ok_or_else(|| Error::LedgerStorage("ledger path has no file stem".into()))?;
        fs::create_dir_all(&dir)?;

        let config = &self.configs[&updated_n];
        let config_path = self.config_file(updated_n).unwrap();
        let tmp_config = config_path.with_extension("csv.tmp");
        {
            let mut f = fs::File::create(&tmp_config)?;
            writeln!(f, "# schema_version={}", crate::SCHEMA_VERSION)?;
            writeln!(f, "point_id,x,y,z")?;
            for (i, p) in config.points().iter().enumerate() {
                writeln!(f, "{i},{},{},{}", p.x(), p.y(), p.z())?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp_config, &config_path)?;

        let all: Vec<&MinimumLedgerEntry> = self.entries.values().collect();
        let text = serde_json::to_string_pretty(&all)?;
        let tmp = path.with_extension("json.tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    fn load_config_file(&self, n: usize) -> Result<Option<Configuration>> {
        let Some(path) = self.config_file(n) else {
            return Ok(None);
        };
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("point_id") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::LedgerStorage(format!(
                    "malformed row in {}: {line}",
                    path.display()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::LedgerStorage(format!("bad number {s}: {e}")))
            };
            points.push(SpherePoint::new(
                parse(fields[1])?,
                parse(fields[2])?,
                parse(fields[3])?,
            )?);
        }
        Ok(Some(Configuration::new(points)?))
    }

    fn verify_digest(&self, n: usize, config: &Configuration) -> Result<()> {
        let entry = &self.entries[&n];
        let found = configuration_digest(config);
        if found != entry.config_digest {
            return Err(Error::LedgerDigestMismatch {
                n,
                expected: entry.config_digest.clone(),
                found,
            });
        }
        Ok(())
    }
}
