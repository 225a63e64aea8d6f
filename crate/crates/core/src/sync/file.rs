use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::verify::{verify_sync_with, Strategy};
use super::{SyncParams, SyncViolation};
use crate::bitlinalg::BitMatrix;
use crate::error::{Error, Result};
use crate::inner_code::InnerCode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncStatus {
    Unverified,
    Verified,
    Refuted(SyncViolation),
}

/// How a sequence was produced, so it can be regenerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Provenance {
    Sampled { seed: u64, attempt: usize },
    Searched { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncSequence {
    pub params: SyncParams,
    pub mats: Vec<BitMatrix>,
    pub status: SyncStatus,
    pub provenance: Option<Provenance>,
}

#[derive(Serialize)]
struct HashedContent<'a> {
    params: &'a SyncParams,
    matrices: &'a [BitMatrix],
}

/// SHA-256 over the compact JSON of `{"params": …, "matrices": […]}`.
pub fn content_hash(params: &SyncParams, mats: &[BitMatrix]) -> String {
    let bytes = serde_json::to_vec(&HashedContent { params, matrices: mats }).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize, Deserialize)]
struct SyncFile {
    params: SyncParams,
    matrices: Vec<BitMatrix>,
    status: SyncStatus,
    hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl SyncSequence {
    pub fn new(params: SyncParams, mats: Vec<BitMatrix>, status: SyncStatus) -> Result<Self> {
        params.validate()?;
        params.check_shape(&mats)?;
        Ok(SyncSequence { params, mats, status, provenance: None })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn hash(&self) -> String {
        content_hash(&self.params, &self.mats)
    }

    pub fn is_verified(&self) -> bool {
        self.status == SyncStatus::Verified
    }

    /// Re-runs verification and records the outcome in `status`.
    pub fn verify(&mut self, strategy: Strategy, cap: u128) -> Result<()> {
        let verdict = verify_sync_with(&self.params, &self.mats, strategy, cap)?;
        self.status = match verdict.into_result() {
            Ok(()) => SyncStatus::Verified,
            Err(v) => SyncStatus::Refuted(v),
        };
        Ok(())
    }

    pub fn inner_codes(&self) -> Result<Vec<InnerCode>> {
        self.mats
            .iter()
            .enumerate()
            .map(|(i, m)| InnerCode::new(m.clone(), i))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = SyncFile {
            params: self.params,
            matrices: self.mats.clone(),
            status: self.status.clone(),
            hash: self.hash(),
            provenance: self.provenance,
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Parses a sequence file, refusing it when the recorded hash does not match.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SyncFile = serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        let seq = SyncSequence::new(file.params, file.matrices, file.status)?;
        let actual = seq.hash();
        if actual != file.hash {
            return Err(Error::SyncMismatch(format!("content hash {actual} does not match recorded {}", file.hash)));
        }
        Ok(SyncSequence { provenance: file.provenance, ..seq })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn pair() -> SyncSequence {
        let mats = vec![
            BitMatrix::parse_rows(&["1000", "0100"]).unwrap(),
            BitMatrix::parse_rows(&["0010", "0001"]).unwrap(),
        ];
        let params = SyncParams::new(2, 2, 4, Rational::from_integer(0), 1, 1).unwrap();
        SyncSequence::new(params, mats, SyncStatus::Unverified).unwrap()
    }

    #[test]
    fn file_round_trip_and_hash_check() {
        let mut seq = pair();
        seq.verify(Strategy::Fast, 1 << 20).unwrap();
        assert!(seq.is_verified());
        let text = seq.to_json();
        assert_eq!(SyncSequence::from_json(&text).unwrap(), seq);
        let tampered = text.replace("\"8\"", "\"c\"");
        assert!(matches!(SyncSequence::from_json(&tampered), Err(Error::SyncMismatch(_))));
    }

    #[test]
    fn refutation_is_recorded() {
        let mut seq = pair();
        seq.mats[1] = seq.mats[0].clone();
        seq.verify(Strategy::Fast, 1 << 20).unwrap();
        let SyncStatus::Refuted(v) = &seq.status else { panic!("expected refutation") };
        assert_eq!(v.kind(), super::super::ConditionKind::Condition1);
        let back = SyncSequence::from_json(&seq.to_json()).unwrap();
        assert_eq!(back.status, seq.status);
    }
}
