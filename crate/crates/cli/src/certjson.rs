//! Certificate files: the versioned JSON layout and the determinism hash.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use singular_core::cert::Certificate;
use singular_core::{Enclosure, Rational};

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal places kept when printing term enclosures (rounded outward).
pub const PLACES: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub label: String,
    pub lo: String,
    pub hi: String,
}

/// Field order is the schema order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub schema_version: u32,
    pub stage: String,
    pub inputs: std::collections::BTreeMap<String, String>,
    pub terms: Vec<TermJson>,
    pub total: Bounds,
    pub threshold: String,
    pub verified: bool,
    pub notes: Vec<String>,
    /// Wall-clock sidecar; excluded from the hash.
    pub runtime_ms: u64,
    pub determinism_hash: String,
}

/// Exact `p/q` (or `p` when integral).
pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn bounds(e: &Enclosure) -> Bounds {
    let (lo, hi) = e.to_decimal_strings(PLACES);
    Bounds { lo, hi }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl CertificateJson {
    pub fn from_certificate(cert: &Certificate, runtime_ms: u64) -> Self {
        let mut out = CertificateJson {
            schema_version: SCHEMA_VERSION,
            stage: cert.stage.clone(),
            inputs: cert
                .inputs
                .iter()
                .map(|(k, v)| (k.clone(), rational_string(v)))
                .collect(),
            terms: cert
                .terms
                .iter()
                .map(|t| {
                    let b = bounds(&t.value);
                    TermJson {
                        label: t.label.clone(),
                        lo: b.lo,
                        hi: b.hi,
                    }
                })
                .collect(),
            total: bounds(&cert.total),
            threshold: rational_string(&cert.threshold),
            verified: cert.verified,
            notes: cert.notes.clone(),
            runtime_ms,
            determinism_hash: String::new(),
        };
        out.determinism_hash = out.compute_hash();
        out
    }

    /// SHA-256 of the canonical JSON with `runtime_ms` and the hash zeroed.
    pub fn compute_hash(&self) -> String {
        let mut canon = self.clone();
        canon.runtime_ms = 0;
        canon.determinism_hash = String::new();
        let bytes = serde_json::to_vec(&canon).expect("certificate serializes");
        hex(&Sha256::digest(&bytes))
    }

    pub fn hash_is_valid(&self) -> bool {
        self.compute_hash() == self.determinism_hash
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// The file contents with the runtime sidecar zeroed, for byte comparison.
    pub fn to_pretty_without_runtime(&self) -> String {
        let mut c = self.clone();
        c.runtime_ms = 0;
        c.to_pretty()
    }

    pub fn file_name(&self) -> String {
        format!("{}.cert.json", self.stage)
    }

    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(self.file_name());
        std::fs::write(&path, self.to_pretty())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing certificate {}", path.display()))
    }
}
