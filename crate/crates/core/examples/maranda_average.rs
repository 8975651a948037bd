//! Deciding strict equivalence of two lifts through the quotient by
//! `|G| m_R`, with an averaged certificate for a positive answer.
//!
//! `cargo run --example maranda_average`

use std::sync::Arc;

use udr::group::FiniteGroup;
use udr::local_ring::FiniteLocalRing;
use udr::representation::{maranda_decide, working_precision, Matrix, Representation};
use udr::Limits;

fn main() -> udr::Result<()> {
    let group = Arc::new(FiniteGroup::cyclic(2)?);
    let n = working_precision(group.order(), 2);
    let ring = Arc::new(FiniteLocalRing::witt_precision_model(2, n, 1)?);
    let rep = |xs: &[i64]| -> udr::Result<Representation> {
        Representation::from_generator_images(group.clone(), ring.clone(), vec![Matrix::from_ints(&ring, 2, xs)?])
    };
    let pairs = [
        ("diag(1, -1) vs its conjugate by I + 2 E12", rep(&[1, 0, 0, -1])?, rep(&[1, -4, 0, -1])?),
        ("diag(1, -1) vs diag(1, 1)", rep(&[1, 0, 0, -1])?, rep(&[1, 0, 0, 1])?),
        ("swap vs -swap", rep(&[0, 1, 1, 0])?, rep(&[0, -1, -1, 0])?),
    ];
    for (name, rho1, rho2) in &pairs {
        let d = maranda_decide(rho1, rho2, &Limits::default())?;
        println!("{name}: equivalent = {}, quotient of order {}", d.equivalent, d.quotient.cardinality());
        if let Some(cert) = &d.certificate {
            println!("  B0 = {} valid modulo 2^{}, verified {}", cert.b0.render(&ring), cert.precision, cert.verify(rho1, rho2));
        }
    }
    Ok(())
}
