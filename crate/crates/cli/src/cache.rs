//! On-disk lattice cache, keyed by group spec and engine version.
//!
//! One JSON file per (spec, version) pair holding the element labels and the
//! subgroup bitsets as hex words, protected by a sha-256 checksum. Any
//! mismatch (format version, engine version, spec, order, labels, checksum)
//! just invalidates the entry; callers rebuild and overwrite.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ingleton_core::lattice::{subgroup_from_words, SubgroupLattice};
use ingleton_core::CayleyGroup;

pub const CACHE_FORMAT_VERSION: u64 = 1;

pub fn engine_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Cache directory: `INGLETON_CACHE_DIR` if set, else `.ingleton-cache`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("INGLETON_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".ingleton-cache"))
}

fn hex_bytes(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_path(spec: &str) -> PathBuf {
    let mut hasher = Sha256::new();
    hasher.update(engine_version().as_bytes());
    hasher.update([0]);
    hasher.update(spec.as_bytes());
    let digest = hasher.finalize();
    cache_dir().join(format!("{}.json", &hex_bytes(&digest)[..16]))
}

fn words_to_hex(words: &[u64]) -> String {
    words.iter().map(|w| format!("{w:016x}")).collect()
}

fn hex_to_words(text: &str) -> Option<Vec<u64>> {
    if text.len() % 16 != 0 {
        return None;
    }
    text.as_bytes()
        .chunks(16)
        .map(|chunk| u64::from_str_radix(std::str::from_utf8(chunk).ok()?, 16).ok())
        .collect()
}

fn checksum(spec: &str, order: usize, labels: &[String], bits: &[String]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(CACHE_FORMAT_VERSION.to_le_bytes());
    hasher.update(engine_version().as_bytes());
    hasher.update([0]);
    hasher.update(spec.as_bytes());
    hasher.update([0]);
    hasher.update((order as u64).to_le_bytes());
    for label in labels {
        hasher.update(label.as_bytes());
        hasher.update([0]);
    }
    for b in bits {
        hasher.update(b.as_bytes());
        hasher.update([0]);
    }
    hex_bytes(&hasher.finalize())
}

/// Loads the lattice for this group, or `None` when absent or invalid.
pub fn load(group: &CayleyGroup) -> Option<SubgroupLattice> {
    let path = cache_path(group.spec());
    let text = fs::read_to_string(&path).ok()?;
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(_) => {
            eprintln!("cache: unreadable entry at {}, rebuilding", path.display());
            return None;
        }
    };

    let format = value.get("format_version").and_then(Value::as_u64);
    let version = value.get("engine_version").and_then(Value::as_str);
    if format != Some(CACHE_FORMAT_VERSION) || version != Some(engine_version()) {
        eprintln!("cache: version mismatch at {}, rebuilding", path.display());
        return None;
    }
    let spec = value.get("spec").and_then(Value::as_str)?;
    let order = value.get("group_order").and_then(Value::as_u64)? as usize;
    if spec != group.spec() || order != group.order() {
        return None;
    }
    let labels: Vec<String> = value
        .get("labels")?
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect::<Option<_>>()?;
    if labels != group.labels() {
        eprintln!("cache: label mismatch at {}, rebuilding", path.display());
        return None;
    }
    let bits: Vec<String> = value
        .get("subgroup_bits_hex")?
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect::<Option<_>>()?;
    let stored = value.get("checksum").and_then(Value::as_str)?;
    if stored != checksum(spec, order, &labels, &bits) {
        eprintln!("cache: checksum mismatch at {}, rebuilding", path.display());
        return None;
    }

    let members = bits
        .iter()
        .map(|hex| {
            let words = hex_to_words(hex)?;
            subgroup_from_words(group, words).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(SubgroupLattice::from_members(group, members))
}

/// Writes the lattice; failures are reported by the caller, never fatal.
pub fn store(group: &CayleyGroup, lattice: &SubgroupLattice) -> std::io::Result<PathBuf> {
    let dir = cache_dir();
    fs::create_dir_all(&dir)?;
    let labels: Vec<String> = group.labels().to_vec();
    let bits: Vec<String> = lattice
        .members()
        .iter()
        .map(|m| words_to_hex(m.bit_words()))
        .collect();
    let payload = json!({
        "format_version": CACHE_FORMAT_VERSION,
        "engine_version": engine_version(),
        "spec": group.spec(),
        "group_order": group.order(),
        "labels": labels,
        "subgroup_bits_hex": bits,
        "checksum": checksum(group.spec(), group.order(), &labels, &bits),
    });
    let path = cache_path(group.spec());
    fs::write(&path, serde_json::to_string(&payload)?)?;
    Ok(path)
}
