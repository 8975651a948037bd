use std::collections::BTreeMap;

use serde::Serialize;

use crate::{Limits, Result};

use super::FiniteLocalRing;

/// Isomorphism invariants of a finite local ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingFingerprint {
    pub p: u64,
    pub residue_degree: u32,
    /// `p^e` is the characteristic.
    pub characteristic_exponent: u32,
    pub cardinality: u128,
    pub maximal_ideal_size: u128,
    /// `dim_k(m^i / m^{i+1})` for `i = 0, 1, ...` until it vanishes.
    pub hilbert: Vec<u32>,
    /// Number of elements of additive order `p^e`, keyed by `e`.
    pub additive_orders: BTreeMap<u32, u64>,
    /// Number of elements of the maximal ideal with nilpotency index `e`.
    pub nilpotency: BTreeMap<u32, u64>,
}

/// Outcome of comparing two fingerprints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FingerprintComparison {
    /// Some invariant differs, so the rings are not isomorphic.
    NotIsomorphic,
    /// All invariants agree; this does not prove isomorphism.
    Inconclusive,
}

impl FiniteLocalRing {
    pub fn fingerprint(&self, limits: &Limits) -> Result<RingFingerprint> {
        let m = self.maximal_ideal();
        let r = self.spec.r;
        let mut hilbert = Vec::new();
        let mut prev_log = self.log_cardinality();
        let mut power = m.clone();
        loop {
            let log = power.log_cardinality();
            hilbert.push((prev_log - log) / r);
            if power.is_zero() {
                break;
            }
            prev_log = log;
            power = self.ideal_product(&power, &m);
        }
        let mut additive_orders = BTreeMap::new();
        let mut nilpotency = BTreeMap::new();
        for x in self.enumerate_elements(limits)? {
            *additive_orders.entry(self.additive_order_exp(&x.coords)).or_insert(0) += 1;
            if m.contains(&x) {
                let mut e = 1u32;
                let mut pw = x.clone();
                while !self.is_zero(&pw) {
                    pw = self.mul(&pw, &x);
                    e += 1;
                }
                *nilpotency.entry(e).or_insert(0) += 1;
            }
        }
        Ok(RingFingerprint {
            p: self.spec.p,
            residue_degree: r,
            characteristic_exponent: self.characteristic_exponent(),
            cardinality: self.cardinality(),
            maximal_ideal_size: m.cardinality(),
            hilbert,
            additive_orders,
            nilpotency,
        })
    }
}

pub fn compare_fingerprints(a: &RingFingerprint, b: &RingFingerprint) -> FingerprintComparison {
    if a == b {
        FingerprintComparison::Inconclusive
    } else {
        FingerprintComparison::NotIsomorphic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z4_versus_f2_dual_numbers() {
        let z4 = FiniteLocalRing::galois_ring(2, 2, 1).unwrap();
        let f2e = FiniteLocalRing::galois_ring(2, 1, 1).unwrap().dual_numbers().unwrap();
        let a = z4.fingerprint(&Limits::default()).unwrap();
        let b = f2e.fingerprint(&Limits::default()).unwrap();
        assert_eq!((a.characteristic_exponent, a.cardinality, a.maximal_ideal_size), (2, 4, 2));
        assert_eq!(a.hilbert, vec![1, 1]);
        assert_eq!(b.hilbert, a.hilbert);
        assert_eq!(b.characteristic_exponent, 1);
        assert_eq!(compare_fingerprints(&a, &b), FingerprintComparison::NotIsomorphic);
        assert_eq!(compare_fingerprints(&a, &a), FingerprintComparison::Inconclusive);
    }
}
