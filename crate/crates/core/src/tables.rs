//! Serialization of tables keyed by index pairs, as `[[a, b, value], ...]`.
use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S, K, V>(m: &BTreeMap<(K, K), V>, s: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    K: serde::Serialize,
    V: serde::Serialize,
{
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for ((a, b), v) in m {
        seq.serialize_element(&(a, b, v))?;
    }
    seq.end()
}

pub fn deserialize<'de, D, K, V>(d: D) -> Result<BTreeMap<(K, K), V>, D::Error>
where
    D: Deserializer<'de>,
    K: Deserialize<'de> + Ord,
    V: Deserialize<'de>,
{
    let v: Vec<(K, K, V)> = Vec::deserialize(d)?;
    Ok(v.into_iter().map(|(a, b, x)| ((a, b), x)).collect())
}
