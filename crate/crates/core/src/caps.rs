//! Enumeration budgets.
//!
//! Every exhaustive search in the crate is bounded by a [`Caps`] value and
//! fails with a structured error when the bound is hit; nothing is truncated
//! silently.

use crate::error::{Error, Result};

/// Environment variable overriding the default caps, e.g.
/// `CAUSAL_UNFOLD_CAPS=events=30,configs=500000`.
pub const CAPS_ENV: &str = "CAUSAL_UNFOLD_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of events in an input structure.
    pub events: usize,
    /// Maximum number of configurations (or prime extremals, or extremal classes).
    pub configs: usize,
    /// Maximum number of maps produced by an exhaustive map enumeration.
    pub maps: usize,
    /// Maximum number of events on either side of an oracle map enumeration.
    pub oracle_events: usize,
    /// Maximum number of search states explored by a single oracle query.
    pub search: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            events: 24,
            configs: 100_000,
            maps: 100_000,
            oracle_events: 8,
            search: 2_000_000,
        }
    }
}

impl Caps {
    /// Default caps with any overrides from [`CAPS_ENV`] applied.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }

    /// Apply a comma separated list of `name=value` overrides.
    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap override `{item}` is not name=value")))?;
            let value: usize = value.trim().parse().map_err(|_| {
                Error::Parse(format!("cap override `{item}` has a non-numeric value"))
            })?;
            match key.trim() {
                "events" => self.events = value,
                "configs" => self.configs = value,
                "maps" => self.maps = value,
                "oracle_events" | "oracle-events" => self.oracle_events = value,
                "search" => self.search = value,
                other => return Err(Error::Parse(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }

    pub(crate) fn check_events(&self, count: usize) -> Result<()> {
        let max = self.events.min(crate::bitset::MAX_ELEMENTS);
        if count > max {
            Err(Error::TooManyEvents { count, max })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let caps = Caps::default()
            .with_overrides("events=30, configs=7")
            .unwrap();
        assert_eq!(caps.events, 30);
        assert_eq!(caps.configs, 7);
        assert!(Caps::default().with_overrides("bogus=1").is_err());
        assert!(Caps::default().with_overrides("events").is_err());
    }
}
