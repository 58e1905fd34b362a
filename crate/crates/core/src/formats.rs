//! JSON instance and trace files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::auctions::{AuctionMode, AuctionTrace, Round, RunCounters};
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, PriceVector};
use crate::valuations::Valuation;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub items: usize,
    pub supply: Vec<u32>,
    pub buyers: Vec<Valuation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand_caps: Option<Vec<u32>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            items: inst.items(),
            supply: inst.supply().to_vec(),
            buyers: inst.raw_valuations().to_vec(),
            demand_caps: inst.demand_caps().map(|c| c.to_vec()),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidInstance(format!("unsupported format version {}", self.version)));
        }
        if self.items != self.supply.len() {
            return Err(Error::LengthMismatch { expected: self.items, got: self.supply.len() });
        }
        match &self.demand_caps {
            Some(caps) => Instance::with_demand_caps(self.supply.clone(), self.buyers.clone(), caps.clone()),
            None => Instance::new(self.supply.clone(), self.buyers.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the compact JSON encoding, in hex.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("instance files always serialize");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalRecord {
    pub prices: PriceVector,
    pub walrasian: bool,
    pub allocation: Allocation,
    pub counters: RunCounters,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub instance_digest: String,
    pub mode: AuctionMode,
    pub start: PriceVector,
    pub rounds: Vec<Round>,
    #[serde(rename = "final")]
    pub final_record: FinalRecord,
}

impl TraceFile {
    pub fn new(file: &InstanceFile, trace: &AuctionTrace) -> Self {
        TraceFile {
            instance_digest: file.digest(),
            mode: trace.mode,
            start: trace.start.clone(),
            rounds: trace.rounds.clone(),
            final_record: FinalRecord {
                prices: trace.final_prices.clone(),
                walrasian: trace.walrasian,
                allocation: trace.allocation.clone(),
                counters: trace.counters,
            },
        }
    }

    pub fn to_trace(&self) -> AuctionTrace {
        AuctionTrace {
            mode: self.mode,
            start: self.start.clone(),
            rounds: self.rounds.clone(),
            final_prices: self.final_record.prices.clone(),
            walrasian: self.final_record.walrasian,
            allocation: self.final_record.allocation.clone(),
            counters: self.final_record.counters,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace files always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auctions::{ascending, AuctionOptions};
    use crate::fixtures;

    #[test]
    fn instance_round_trip() {
        for inst in [fixtures::three_buyers_base(), fixtures::six_items(), fixtures::no_equilibrium()] {
            let file = InstanceFile::from_instance(&inst);
            let back = InstanceFile::from_json(&file.to_json()).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.digest(), file.digest());
            assert_eq!(InstanceFile::from_instance(&back.to_instance().unwrap()), file);
        }
    }

    #[test]
    fn rejects_bad_files() {
        let mut file = InstanceFile::from_instance(&fixtures::three_buyers_base());
        file.version = 2;
        assert!(file.to_instance().is_err());
        file.version = FORMAT_VERSION;
        file.items += 1;
        assert!(matches!(file.to_instance(), Err(Error::LengthMismatch { .. })));
        assert!(InstanceFile::from_json("{\"version\": 1}").is_err());
    }

    #[test]
    fn trace_round_trip() {
        let inst = fixtures::three_buyers_base();
        let (_, trace) = ascending(&inst, PriceVector::zeros(inst.items()), AuctionOptions::default()).unwrap();
        let file = TraceFile::new(&InstanceFile::from_instance(&inst), &trace);
        let json = file.to_json();
        assert!(json.contains("\"final\""));
        let back = TraceFile::from_json(&json).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_trace(), trace);
    }
}
