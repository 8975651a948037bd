use crate::zmod::{Howell, Zpm};
use crate::{Limits, Result};

use super::{FiniteLocalRing, RingElement};

/// An ideal, stored as the Howell form of its image under the additive
/// embedding `x_i ↦ p^{m-k_i} x_i` into (Z/p^m)^N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    z: Zpm,
    orders: Vec<u32>,
    generators: Vec<RingElement>,
    span: Howell,
}

impl Ideal {
    fn decode(&self, v: &[u64]) -> RingElement {
        let coords = v
            .iter()
            .zip(&self.orders)
            .map(|(&x, &k)| x / self.z.p.pow(self.z.m - k))
            .collect();
        RingElement { coords, prec: self.z.m }
    }

    fn embed(&self, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(&c, &k)| self.z.mul(c % self.z.p.pow(k), self.z.p_pow(self.z.m - k)))
            .collect()
    }

    /// The generators the ideal was built from.
    pub fn generators(&self) -> &[RingElement] {
        &self.generators
    }

    /// Echelon rows of the span, decoded back to ring elements.
    pub fn additive_generators(&self) -> Vec<RingElement> {
        self.span.rows.iter().map(|r| self.decode(&r.v)).collect()
    }

    pub fn contains(&self, x: &RingElement) -> bool {
        self.span.contains(&self.embed(&x.coords))
    }

    pub fn cardinality(&self) -> u128 {
        self.span.cardinality()
    }

    pub fn log_cardinality(&self) -> u32 {
        self.span.log_cardinality()
    }

    pub fn is_zero(&self) -> bool {
        self.span.rows.is_empty()
    }

    /// All elements, sorted by coordinate vector.
    pub fn elements(&self, limits: &Limits) -> Result<Vec<RingElement>> {
        limits.check_elements("ideal elements", self.cardinality())?;
        let mut out: Vec<RingElement> = self.span.elements().iter().map(|v| self.decode(v)).collect();
        out.sort();
        Ok(out)
    }
}

impl FiniteLocalRing {
    /// Smallest ideal containing `gens`.
    pub fn ideal_span(&self, gens: &[RingElement]) -> Ideal {
        let n = self.rank();
        let mut vecs: Vec<Vec<u64>> = gens.iter().map(|g| self.embed(&g.coords)).collect();
        let mut span = Howell::new(self.z, n, &vecs);
        loop {
            let mut grew = false;
            let rows: Vec<Vec<u64>> = span.rows.iter().map(|r| self.decode(&r.v)).collect();
            for row in &rows {
                for i in 0..n {
                    let prod = self.embed(&self.mul_coords(row, &self.unit_vector(i)));
                    if !span.contains(&prod) {
                        vecs.push(prod);
                        span = Howell::new(self.z, n, &vecs);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Ideal { z: self.z, orders: self.orders.clone(), generators: gens.to_vec(), span }
    }

    /// `n · I`.
    pub fn scale_ideal(&self, n: i64, ideal: &Ideal) -> Ideal {
        let gens: Vec<RingElement> = ideal.additive_generators().iter().map(|g| self.scale(g, n)).collect();
        self.ideal_span(&gens)
    }

    /// The kernel of the reduction to the residue field.
    pub fn maximal_ideal(&self) -> Ideal {
        let gens: Vec<RingElement> = self.kernel_generators().into_iter().map(|g| self.full(g)).collect();
        self.ideal_span(&gens)
    }

    /// `I · J`, spanned by products of additive generators.
    pub fn ideal_product(&self, a: &Ideal, b: &Ideal) -> Ideal {
        let ga = a.additive_generators();
        let gb = b.additive_generators();
        let prods: Vec<RingElement> = ga.iter().flat_map(|x| gb.iter().map(move |y| (x, y))).map(|(x, y)| self.mul(x, y)).collect();
        self.ideal_span(&prods)
    }

    pub fn ideal_sum(&self, a: &Ideal, b: &Ideal) -> Ideal {
        let mut gens = a.additive_generators();
        gens.extend(b.additive_generators());
        self.ideal_span(&gens)
    }

    pub fn zero_ideal(&self) -> Ideal {
        self.ideal_span(&[])
    }
}
