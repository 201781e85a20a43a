use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_probability, Error, Result};

/// Number of evenly spaced equatorial homodyne phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SettingCount {
    Finite(u32),
    /// The continuum of phases over the half-plane.
    Infinite,
}

impl SettingCount {
    pub fn finite(self) -> Option<u32> {
        match self {
            SettingCount::Finite(n) => Some(n),
            SettingCount::Infinite => None,
        }
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            SettingCount::Finite(0) => Err(Error::Domain {
                name: "n_settings",
                value: 0.0,
                range: "n ≥ 1",
            }),
            other => Ok(other),
        }
    }
}

impl fmt::Display for SettingCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SettingCount::Finite(n) => write!(f, "{n}"),
            SettingCount::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SettingCountRepr {
    Finite(u32),
    Marker(String),
}

impl Serialize for SettingCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            SettingCount::Finite(n) => SettingCountRepr::Finite(n),
            SettingCount::Infinite => SettingCountRepr::Marker("infinite".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SettingCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match SettingCountRepr::deserialize(d)? {
            SettingCountRepr::Finite(0) => Err(serde::de::Error::custom("n_settings must be ≥ 1")),
            SettingCountRepr::Finite(n) => Ok(SettingCount::Finite(n)),
            SettingCountRepr::Marker(m) if m == "infinite" || m == "inf" => Ok(SettingCount::Infinite),
            SettingCountRepr::Marker(m) => Err(serde::de::Error::custom(format!(
                "n_settings must be a positive integer or \"infinite\", got {m:?}"
            ))),
        }
    }
}

/// Experimental parameters of the split-photon setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// Single-photon preparation efficiency η.
    pub eta: f64,
    /// Beam-splitter ratio χ (fraction of the photon sent to Bob).
    pub chi: f64,
    /// Alice's homodyne efficiency η_h.
    pub eta_h: f64,
    /// Alice's photodetection efficiency η_p.
    pub eta_p: f64,
    pub n_settings: SettingCount,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ExperimentParams {
    pub fn new(eta: f64, chi: f64, eta_h: f64, eta_p: f64, n_settings: SettingCount) -> Result<Self> {
        Self {
            eta,
            chi,
            eta_h,
            eta_p,
            n_settings,
            label: None,
        }
        .validated()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn validated(self) -> Result<Self> {
        check_probability("eta", self.eta)?;
        check_probability("chi", self.chi)?;
        check_probability("eta_h", self.eta_h)?;
        check_probability("eta_p", self.eta_p)?;
        self.n_settings.validate()?;
        Ok(self)
    }

    /// χ ∈ {0, 1}: nothing is shared between Alice and Bob.
    pub fn is_unentangled_split(&self) -> bool {
        self.chi == 0.0 || self.chi == 1.0
    }
}
