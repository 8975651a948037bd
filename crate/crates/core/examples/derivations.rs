//! Homomorphisms into square-zero extensions differ from a fixed one by
//! derivations; the Kähler extension carries the universal derivation.
//!
//! `cargo run --example derivations`

use udr::local_ring::{AdditiveMap, FiniteLocalRing};
use udr::presented::IntegerPolynomialPresentation;
use udr::representation::{hom_vs_derivation, kahler_extension, square_zero_extension};
use udr::Limits;

fn main() -> udr::Result<()> {
    let limits = Limits::default();

    let z4 = FiniteLocalRing::galois_ring(2, 2, 1)?;
    let ext = square_zero_extension(&z4, &[vec![z4.from_int(2)]], &["M"])?;
    println!("{} with |M| = {}", ext.ring, ext.module_cardinality());

    for (p, rel) in [(2u64, "X^2"), (3, "X^2 - 3*X")] {
        let pres = IntegerPolynomialPresentation::parse(p, &["X"], &[rel])?;
        let kx = kahler_extension(&pres, 2, &limits)?;
        let s = &kx.extension.ring;
        println!("{pres} modulo {p}^2: extension {s}, |Omega| = {}", kx.extension.module_cardinality());
        for c in 0..3 {
            let d = AdditiveMap { images: kx.universal.images.iter().map(|x| s.scale(x, c)).collect() };
            let g = kx.extension.inclusion.add(s, &d);
            let (is_hom, is_der) = hom_vs_derivation(&kx.base, s, &kx.extension.inclusion, &g, &kx.extension.module_ideal)?;
            println!("  inclusion + {c} d: homomorphism {is_hom}, derivation {is_der}");
        }
    }
    Ok(())
}
