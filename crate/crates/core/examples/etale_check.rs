//! Étale checks of rational fibers and the resulting necessary condition.
//!
//! `cargo run --example etale_check`

use udr::presented::{etale_check, w_membership_check, IntegerPolynomialPresentation};
use udr::udr_checks::necessary_condition;
use udr::Limits;

fn main() -> udr::Result<()> {
    let limits = Limits::default();
    let cases: [(u64, &[&str], &[&str]); 5] = [
        (2, &["X"], &["X^2"]),
        (2, &["X"], &["X^4 - 1"]),
        (2, &["X"], &["X^2 - 4*X"]),
        (3, &["X"], &[]),
        (2, &["X", "Y"], &["X^2 - 2", "Y^2 - X*Y"]),
    ];
    for (p, vars, rels) in cases {
        let pres = IntegerPolynomialPresentation::parse(p, vars, rels)?;
        let etale = etale_check(&pres, &limits)?;
        let verdict = necessary_condition(&pres, &limits)?;
        println!("{pres}");
        println!("  verdict {:?}, dimension {:?}, trace det {:?}", etale.verdict, etale.dim, etale.trace_det);
        println!("  {:?}: {}", verdict.membership, verdict.interpretation);
        if let Some(c) = &verdict.certificate {
            println!("  certificate: {c}");
        }
        if let Some(entry) = &verdict.catalog {
            println!("  catalog: {} ({:?}, {})", entry.family, entry.status, entry.tag);
        }
    }

    let sqrt5 = IntegerPolynomialPresentation::parse(5, &["X"], &["X^2 - 5"])?;
    let w = w_membership_check(&sqrt5, 6, &limits)?;
    println!("{sqrt5}: {} ({})", w.verdict, w.caveat);
    Ok(())
}
