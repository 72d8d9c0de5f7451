//! Canonical JSON hashing.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// SHA-256 of the canonical JSON form (object keys sorted, no whitespace).
pub fn json_digest<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps objects in a BTreeMap, which sorts keys
    let v = serde_json::to_value(value)?;
    let text = serde_json::to_string(&v)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// First 16 hex digits of [`json_digest`].
pub fn short_digest<T: Serialize>(value: &T) -> Result<String> {
    Ok(json_digest(value)?[..16].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_does_not_matter() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b": 1, "a": [1, 2], "c": {"y": 0, "x": 1}}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"c": {"x": 1, "y": 0}, "a": [1, 2], "b": 1}"#).unwrap();
        assert_eq!(json_digest(&a).unwrap(), json_digest(&b).unwrap());
        assert_eq!(json_digest(&a).unwrap().len(), 64);
    }

    #[test]
    fn known_vector() {
        // sha256("{}")
        assert_eq!(
            json_digest(&serde_json::json!({})).unwrap(),
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
    }
}
