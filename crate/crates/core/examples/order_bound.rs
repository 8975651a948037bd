//! Two distinct maps that agree modulo `p^r m_S` force `p^{r+1}` to divide
//! the group order.
//!
//! `cargo run --example order_bound`

use udr::poly::parse_poly;
use udr::presented::IntegerPolynomialPresentation;
use udr::udr_checks::order_lower_bound;
use udr::Limits;

fn main() -> udr::Result<()> {
    let limits = Limits::default();
    for (p, a) in [(2u64, 2u32), (3, 1), (2, 3)] {
        let pa = p.pow(a);
        let s = IntegerPolynomialPresentation::parse(p, &["X"], &[&format!("X^2 - {pa}*X")])?;
        for (f1, f2) in [("0".to_string(), pa.to_string()), ("0".to_string(), "X".to_string())] {
            let res = order_lower_bound(&s, &s, &[parse_poly(&f1, &s.vars)?], &[parse_poly(&f2, &s.vars)?], &limits)?;
            println!(
                "{s}: X -> {f1} vs X -> {f2}: level {}, {} (checked at precisions {:?} / {:?})",
                res.congruence_level, res.claim, res.congruence_precisions, res.non_congruence_precisions
            );
        }
    }
    Ok(())
}
