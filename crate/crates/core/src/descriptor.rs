//! On-disk JSON form of a wavelet with construction metadata.

use serde::{Deserialize, Serialize};

use crate::builder::FrequencyWavelet;
use crate::error::{Error, Result};
use crate::profile::{PhaseProfile, StepProfile};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletDescriptor {
    pub schema: u32,
    pub family: String,
    /// Family parameter as given on construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// `S_n` containing the support, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sn: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
    /// Outcome of the last exact verification stamped into the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    pub mag2: StepProfile,
    pub phase: PhaseProfile,
}

impl WaveletDescriptor {
    pub fn from_wavelet(w: &FrequencyWavelet) -> Self {
        WaveletDescriptor {
            schema: SCHEMA,
            family: w.family.clone(),
            n: w.n,
            sn: w.n,
            p: None,
            seed: None,
            kind: None,
            notes: String::new(),
            verified: None,
            mag2: w.mag2().clone(),
            phase: w.phase().clone(),
        }
    }

    /// Revalidates the profiles.
    pub fn to_wavelet(&self) -> Result<FrequencyWavelet> {
        FrequencyWavelet::new(
            self.sn,
            self.family.clone(),
            self.mag2.clone(),
            self.phase.clone(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serialization is infallible")
    }

    /// Parses and checks the schema version. Syntax errors keep their line
    /// and column.
    pub fn from_json(s: &str) -> Result<Self> {
        let d: WaveletDescriptor = serde_json::from_str(s)?;
        if d.schema != SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema {} (expected {SCHEMA})",
                d.schema
            )));
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_family, Family};

    #[test]
    fn round_trip() {
        for f in Family::ALL {
            let w = build_family(f, 4, Some(2)).unwrap();
            let mut d = WaveletDescriptor::from_wavelet(&w);
            d.p = Some(2);
            d.notes = "note".into();
            let back = WaveletDescriptor::from_json(&d.to_json()).unwrap();
            assert_eq!(back, d);
            assert_eq!(back.to_wavelet().unwrap(), w);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let w = build_family(Family::Shannon, 3, None).unwrap();
        let json = WaveletDescriptor::from_wavelet(&w).to_json();
        assert!(matches!(
            WaveletDescriptor::from_json(&json[..json.len() / 2]),
            Err(Error::Json(_))
        ));
        let v2 = json.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(
            WaveletDescriptor::from_json(&v2),
            Err(Error::Parse(_))
        ));
        assert!(!json.contains('.'), "rationals must not be floats: {json}");
    }
}
