use std::fmt;

use thiserror::Error;

use crate::label::collapse_whitespace;

/// Whether a strategy label names a capability, its absence, or a manual
/// stand-in for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negated,
    Manual,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negated => "negated",
            Polarity::Manual => "manual",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy label is empty")]
    Empty,
}

/// A transition strategy. The raw label is kept verbatim for display;
/// comparisons go through `normalized` and `polarity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy {
    raw: String,
    normalized: String,
    polarity: Polarity,
}

impl Strategy {
    pub fn new(raw: &str) -> Result<Self, StrategyError> {
        normalize_strategy(raw)
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn normalized(&self) -> &str {
        &self.normalized
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    /// A raw label that normalizes back to this strategy.
    pub fn canonical_raw(&self) -> String {
        match self.polarity {
            Polarity::Negated => format!("not {}", self.normalized),
            _ => self.normalized.clone(),
        }
    }

    /// Same normalized label and polarity.
    pub fn equivalent(&self, other: &Strategy) -> bool {
        self.normalized == other.normalized && self.polarity == other.polarity
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Classifies a raw strategy label.
///
/// A leading `not ` (any case) marks a negated capability and is stripped
/// from the normalized label. A `manual` token in a non-negated label marks
/// a manual strategy.
pub fn normalize_strategy(raw: &str) -> Result<Strategy, StrategyError> {
    let collapsed = collapse_whitespace(&raw.to_lowercase());
    if collapsed.is_empty() {
        return Err(StrategyError::Empty);
    }
    let (normalized, polarity) = match collapsed.strip_prefix("not ") {
        Some(rest) => (rest.to_string(), Polarity::Negated),
        None if collapsed.split(' ').any(|tok| tok == "manual") => (collapsed, Polarity::Manual),
        None => (collapsed, Polarity::Positive),
    };
    Ok(Strategy {
        raw: raw.to_string(),
        normalized,
        polarity,
    })
}
