//! Isomorphism invariants of finite local rings and local homomorphism
//! counts.
//!
//! `cargo run --example ring_fingerprints`

use udr::local_ring::{compare_fingerprints, hom_enumerate, FiniteLocalRing};
use udr::presented::IntegerPolynomialPresentation;
use udr::Limits;

fn main() -> udr::Result<()> {
    let limits = Limits::default();
    let sqrt2 = IntegerPolynomialPresentation::parse(2, &["X"], &["X^2 - 2"])?;
    let rings = [
        FiniteLocalRing::galois_ring(2, 2, 1)?,
        FiniteLocalRing::galois_ring(2, 1, 1)?.dual_numbers()?,
        FiniteLocalRing::galois_ring(2, 2, 1)?.dual_numbers()?,
        FiniteLocalRing::galois_ring(2, 2, 2)?,
        FiniteLocalRing::from_truncated_presentation(&sqrt2, 2, &limits)?,
    ];
    let prints = rings.iter().map(|r| r.fingerprint(&limits)).collect::<udr::Result<Vec<_>>>()?;
    for (r, f) in rings.iter().zip(&prints) {
        println!("{r}: |R| = {}, |m| = {}, Hilbert {:?}", f.cardinality, f.maximal_ideal_size, f.hilbert);
    }
    for i in 0..rings.len() {
        for j in 0..rings.len() {
            let homs = hom_enumerate(&rings[i], &rings[j], &limits)?;
            let cmp = compare_fingerprints(&prints[i], &prints[j]);
            println!("  #{i} -> #{j}: {} homomorphisms, fingerprints {cmp:?}", homs.len());
        }
    }
    Ok(())
}
