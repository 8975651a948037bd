//! Deformations to the dual numbers over the residue field.
//!
//! `cargo run --example tangent_space`

use std::sync::Arc;

use udr::group::FiniteGroup;
use udr::local_ring::FiniteLocalRing;
use udr::representation::{residual_rep, tangent_space, Matrix, Representation};
use udr::Limits;

fn main() -> udr::Result<()> {
    let f2 = Arc::new(FiniteLocalRing::galois_ring(2, 1, 1)?);
    let f3 = Arc::new(FiniteLocalRing::galois_ring(3, 1, 1)?);
    let v4 = Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(2)?, &FiniteGroup::cyclic(2)?)?);
    let q8 = Arc::new(FiniteGroup::quaternion8()?);
    let c3 = Arc::new(FiniteGroup::cyclic(3)?);
    let reps = [
        ("C2xC2 trivial over F2", Representation::trivial(v4, f2.clone(), 1)),
        ("Q8 trivial over F2", Representation::trivial(q8.clone(), f2.clone(), 1)),
        ("Q8 trivial over F3", Representation::trivial(q8, f3.clone(), 1)),
        ("C3 trivial over F3", Representation::trivial(c3.clone(), f3, 1)),
        ("C3 irreducible over F2", residual_rep(c3, f2.clone(), vec![Matrix::from_ints(&f2, 2, &[0, 1, 1, 1])?])?),
    ];
    for (name, rho) in &reps {
        let t = tangent_space(rho, &Limits::default())?;
        println!("{name}: {} classes = {}^{}", t.def.class_count, t.q, t.dimension);
    }
    Ok(())
}
