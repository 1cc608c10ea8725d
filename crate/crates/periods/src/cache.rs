//! JSON caches keyed by a content hash of their parameters. Entries are write-once; a missing or
//! unreadable entry is recomputed.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::content_hash;
use crate::error::Result;

#[derive(Serialize, serde::Deserialize)]
struct Entry<K, T> {
    kind: String,
    key: K,
    value: T,
}

pub fn cached<K, T>(dir: Option<&Path>, kind: &str, key: &K, compute: impl FnOnce() -> Result<T>) -> Result<T>
where
    K: Serialize + DeserializeOwned + PartialEq,
    T: Serialize + DeserializeOwned,
{
    let Some(dir) = dir else { return compute() };
    let path = dir.join(format!("{kind}-{}.json", content_hash(&(kind, key))));
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(entry) = serde_json::from_str::<Entry<K, T>>(&text) {
            if entry.kind == kind && entry.key == *key {
                return Ok(entry.value);
            }
        }
    }
    let value = compute()?;
    fs::create_dir_all(dir)?;
    let entry = Entry { kind: kind.to_string(), key, value };
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(&entry)?)?;
    fs::rename(&tmp, &path)?;
    Ok(entry.value)
}
