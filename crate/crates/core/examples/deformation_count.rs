//! Strict equivalence classes of lifts of a residual representation.
//!
//! `cargo run --example deformation_count`

use std::sync::Arc;

use udr::group::FiniteGroup;
use udr::local_ring::FiniteLocalRing;
use udr::representation::{def_set, residual_rep, Matrix, Representation};
use udr::Limits;

fn main() -> udr::Result<()> {
    let limits = Limits::default();
    let f2 = Arc::new(FiniteLocalRing::galois_ring(2, 1, 1)?);
    let c2 = Arc::new(FiniteGroup::cyclic(2)?);
    let s3 = Arc::new(FiniteGroup::symmetric(3)?);
    let two_dim = residual_rep(
        s3.clone(),
        f2.clone(),
        vec![Matrix::from_ints(&f2, 2, &[0, 1, 1, 0])?, Matrix::from_ints(&f2, 2, &[0, 1, 1, 1])?],
    )?;
    let cases = [
        ("C2 trivial", Representation::trivial(c2.clone(), f2.clone(), 1)),
        ("C2 trivial, dimension 2", Representation::trivial(c2, f2.clone(), 2)),
        ("S3 trivial", Representation::trivial(s3, f2, 1)),
        ("S3 two-dimensional", two_dim),
    ];
    for m in 2..=3 {
        let ring = Arc::new(FiniteLocalRing::galois_ring(2, m, 1)?);
        for (name, rho) in &cases {
            let def = def_set(rho, ring.clone(), &limits)?;
            println!(
                "{name} over Z/{}: {} lifts, {} classes, orbit sizes {:?}",
                ring.cardinality(),
                def.lift_count,
                def.class_count,
                def.orbit_sizes
            );
            if let Some(first) = def.representatives.first() {
                println!("  first representative {}", first.rep().to_json());
            }
        }
    }
    Ok(())
}
