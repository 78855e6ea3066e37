use alloc::string::String;
use core::fmt;
use core::num::NonZeroU64;
use core::str::FromStr;
use core::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Registry-local identifier: `AZ` followed by a positive decimal integer
/// without leading zeros. Ordering follows the integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResourceId(NonZeroU64);

impl ResourceId {
    pub const PREFIX: &'static str = "AZ";

    pub fn new(n: u64) -> Option<Self> {
        NonZeroU64::new(n).map(ResourceId)
    }

    pub fn number(self) -> u64 {
        self.0.get()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid resource id {0:?}: expected AZ followed by a positive integer")]
pub struct ParseRidError(pub String);

impl FromStr for ResourceId {
    type Err = ParseRidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRidError(String::from(s));
        let digits = s.strip_prefix(Self::PREFIX).ok_or_else(err)?;
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        digits.parse::<u64>().ok().and_then(Self::new).ok_or_else(err)
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", Self::PREFIX, self.0)
    }
}

impl Serialize for ResourceId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResourceId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RidError {
    #[error("resource id counter exhausted")]
    Exhausted,
}

/// Successor under a persisted counter: the counter holds the last minted
/// integer (0 before the first mint).
pub fn mint_rid(counter: u64) -> Result<(ResourceId, u64), RidError> {
    let next = counter.checked_add(1).ok_or(RidError::Exhausted)?;
    Ok((ResourceId::new(next).ok_or(RidError::Exhausted)?, next))
}

/// Lock-free in-memory counter; ids are never handed out twice.
#[derive(Debug, Default)]
pub struct RidCounter(AtomicU64);

impl RidCounter {
    pub fn new(last_minted: u64) -> Self {
        RidCounter(AtomicU64::new(last_minted))
    }

    pub fn mint(&self) -> Result<ResourceId, RidError> {
        let prev = self
            .0
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |n| n.checked_add(1))
            .map_err(|_| RidError::Exhausted)?;
        mint_rid(prev).map(|(id, _)| id)
    }

    pub fn last_minted(&self) -> u64 {
        self.0.load(Ordering::Acquire)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec::Vec;
    use std::sync::Arc;

    #[test]
    fn successor_ids() {
        assert_eq!(mint_rid(0).unwrap().0.to_string(), "AZ1");
        assert_eq!(mint_rid(41).unwrap(), (ResourceId::new(42).unwrap(), 42));
        assert_eq!(mint_rid(u64::MAX), Err(RidError::Exhausted));
    }

    #[test]
    fn parse_rejects_malformed() {
        assert_eq!("AZ17".parse::<ResourceId>().unwrap().number(), 17);
        for bad in ["AZ0", "AZ017", "AZ", "az5", "AZ-3", "AZ1x", "BZ4"] {
            assert!(bad.parse::<ResourceId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn concurrent_mints_are_distinct_and_gapless() {
        let counter = Arc::new(RidCounter::new(0));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let c = Arc::clone(&counter);
                std::thread::spawn(move || (0..250).map(|_| c.mint().unwrap()).collect::<Vec<_>>())
            })
            .collect();
        let mut ids: Vec<u64> = handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .map(ResourceId::number)
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, (1..=2000).collect::<Vec<_>>());
        assert_eq!(counter.last_minted(), 2000);
    }
}
