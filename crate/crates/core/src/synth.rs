//! Seeded synthetic traffic: sparse benign chatter between a pool of hosts
//! plus one scanner fanning out to fresh destinations, interleaved in time.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{Connection, ConnectionDataset, Timestamp, BENIGN};

pub const SCANNER: &str = "172.16.0.1";
pub const SCAN_LABEL: &str = "PortScan";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScannerCorpus {
    pub benign: usize,
    pub malicious: usize,
    /// Size of the benign host pool.
    pub hosts: usize,
    pub seed: u64,
}

impl Default for ScannerCorpus {
    fn default() -> Self {
        ScannerCorpus {
            benign: 2000,
            malicious: 200,
            hosts: 400,
            seed: 2017,
        }
    }
}

fn host(i: usize) -> String {
    format!("10.0.{}.{}", i / 250, i % 250 + 1)
}

fn target(i: usize) -> String {
    format!("192.168.{}.{}", i / 250, i % 250 + 1)
}

impl ScannerCorpus {
    /// One connection per second from 2017-07-03 00:00 UTC.
    pub fn generate(&self) -> ConnectionDataset {
        assert!(self.hosts >= 2, "need at least two benign hosts");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut order: Vec<bool> = (0..self.benign + self.malicious)
            .map(|i| i < self.malicious)
            .collect();
        order.shuffle(&mut rng);
        let t0 = 1_499_040_000_000_000i64;
        let mut scanned = 0;
        let records = order
            .into_iter()
            .enumerate()
            .map(|(i, attack)| {
                let (src, dst, label) = if attack {
                    scanned += 1;
                    (SCANNER.to_string(), target(scanned - 1), SCAN_LABEL)
                } else {
                    let a = rng.random_range(0..self.hosts);
                    let mut b = rng.random_range(0..self.hosts - 1);
                    if b >= a {
                        b += 1;
                    }
                    (host(a), host(b), BENIGN)
                };
                Connection {
                    src,
                    dst,
                    ts: Timestamp::from_micros(t0 + i as i64 * 1_000_000),
                    label: label.into(),
                    classic: Vec::new(),
                }
            })
            .collect();
        ConnectionDataset::from_records(records)
    }
}

/// Timestamp splitting `d` into halves by record count.
pub fn midpoint(d: &ConnectionDataset) -> Timestamp {
    d.records()[d.len() / 2].ts
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn shape() {
        let d = ScannerCorpus::default().generate();
        assert_eq!(d.len(), 2200);
        assert_eq!(d.malicious_count(), 200);
        let targets: HashSet<&str> = d
            .records()
            .iter()
            .filter(|c| c.is_malicious())
            .map(|c| c.dst.as_str())
            .collect();
        assert_eq!(targets.len(), 200);
        assert!(d.records().iter().all(|c| c.src != c.dst));
        assert!(d.records().iter().all(|c| c.is_malicious() == (c.src == SCANNER)));
        assert_eq!(d, ScannerCorpus::default().generate());
    }
}
