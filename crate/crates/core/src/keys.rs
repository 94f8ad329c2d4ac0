//! Integer-keyed maps that also accept string keys. Internally tagged enums
//! buffer their content, after which JSON object keys arrive as strings.

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Key(usize);

impl<'de> Deserialize<'de> for Key {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Key;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer key")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Key, E> {
                usize::try_from(v).map(Key).map_err(|_| E::custom("key out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Key, E> {
                v.parse().map(Key).map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn usize_keys<'de, D, T>(d: D) -> Result<BTreeMap<usize, T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    let m: BTreeMap<Key, T> = BTreeMap::deserialize(d)?;
    Ok(m.into_iter().map(|(k, v)| (k.0, v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Deserialize)]
    #[serde(tag = "kind")]
    enum Tagged {
        A {
            #[serde(deserialize_with = "usize_keys")]
            m: BTreeMap<usize, f64>,
        },
    }

    #[test]
    fn string_keys_inside_tagged_enums() {
        let Tagged::A { m } = serde_json::from_str(r#"{"kind": "A", "m": {"3": 1.5}}"#).unwrap();
        assert_eq!(m, BTreeMap::from([(3, 1.5)]));
        assert!(serde_json::from_str::<Tagged>(r#"{"kind": "A", "m": {"x": 1.5}}"#).is_err());
    }
}
