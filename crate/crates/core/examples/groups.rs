//! Finite groups from Cayley tables: abelianizations, p-parts and
//! homomorphisms given on generators.
//!
//! `cargo run --example groups`

use udr::group::{extend_and_verify_hom, FiniteGroup};

fn main() -> udr::Result<()> {
    let groups = [
        FiniteGroup::cyclic(12)?,
        FiniteGroup::dihedral(4)?,
        FiniteGroup::symmetric(4)?,
        FiniteGroup::quaternion8()?,
        FiniteGroup::direct_product(&FiniteGroup::cyclic(2)?, &FiniteGroup::cyclic(6)?)?,
    ];
    for g in &groups {
        let (r, s) = g.p_part(2)?;
        println!("{}: order {} = 2^{r} * {s}, abelianization {:?}", g.name(), g.order(), g.abelianization());
    }

    // The sign of S3 as a map to C2: transposition -> 1, 3-cycle -> 0.
    let s3 = FiniteGroup::symmetric(3)?;
    let c2 = FiniteGroup::cyclic(2)?;
    let sign = extend_and_verify_hom(&s3, &c2, &[1, 0])?;
    let bogus = extend_and_verify_hom(&s3, &c2, &[0, 1])?;
    println!("sign is a homomorphism: {}; 3-cycle -> generator: {}", sign.is_hom(), bogus.is_hom());
    Ok(())
}
