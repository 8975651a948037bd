//! Integer polynomial presentations and their rational fibers.
//!
//! A presentation `Z_p[X_1..X_t]/(f_1..f_s)` with integer `f_i` stands in for
//! a complete local ring; every check here factors through the rational
//! algebra `A = Q[X]/(f)` or a finite truncation modulo `p^m`, and both are
//! unchanged by completing, so the polynomial model is faithful for them.

mod etale;
mod groebner;
mod qfiber;

use std::fmt;

use serde::Serialize;

use crate::poly::{parse_poly, IntPoly};
use crate::zmod::is_prime;
use crate::{Error, Result};

pub use etale::{
    etale_check, r_alpha_presentation, verify_presented_hom, w_membership_check, Dimension, EtaleReport, Verdict,
    WMembershipReport,
};
pub use groebner::{groebner_basis, QPoly};
pub use qfiber::{nilpotent_witness, omega_rank, q_fiber, trace_form, NilpotentWitness, QFiber, QFiberAlgebra, QVec, TraceForm};

/// Largest number of variables accepted.
pub const MAX_VARIABLES: usize = 6;

/// `W(k)[X_1..X_t]/(f_1..f_s)` with integer relations, stored canonically:
/// each relation has positive leading coefficient and the list is sorted and
/// free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerPolynomialPresentation {
    pub p: u64,
    /// Residue degree; the coefficient ring is W(F_{p^r}).
    pub r: u32,
    pub vars: Vec<String>,
    pub relations: Vec<IntPoly>,
}

impl IntegerPolynomialPresentation {
    pub fn new(p: u64, vars: Vec<String>, relations: Vec<IntPoly>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if vars.len() > MAX_VARIABLES {
            return Err(Error::InvalidParameter(format!("at most {MAX_VARIABLES} variables are supported")));
        }
        let mut names = vars.clone();
        names.sort();
        names.dedup();
        if names.len() != vars.len() {
            return Err(Error::InvalidParameter("variable names must be distinct".into()));
        }
        let mut rels = Vec::with_capacity(relations.len());
        for f in relations {
            if f.nvars != vars.len() {
                return Err(Error::InvalidParameter("relation has the wrong number of variables".into()));
            }
            if f.is_zero() {
                return Err(Error::InvalidParameter("relations must be nonzero".into()));
            }
            rels.push(f.normalize_sign());
        }
        rels.sort_by(|a, b| {
            let la = a.leading().map(|(m, _)| m.clone());
            let lb = b.leading().map(|(m, _)| m.clone());
            la.cmp(&lb).then_with(|| a.terms.iter().cmp(b.terms.iter()))
        });
        rels.dedup();
        Ok(IntegerPolynomialPresentation { p, r: 1, vars, relations: rels })
    }

    /// Parses relations such as `"X^2 - 5*X"` in the given variables.
    pub fn parse(p: u64, vars: &[&str], relations: &[&str]) -> Result<Self> {
        let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        let rels = relations.iter().map(|s| parse_poly(s, &names)).collect::<Result<Vec<_>>>()?;
        Self::new(p, names, rels)
    }

    pub fn with_residue_degree(mut self, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("residue degree must be at least 1".into()));
        }
        self.r = r;
        Ok(self)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn render_relations(&self) -> Vec<String> {
        self.relations.iter().map(|f| f.render(&self.vars)).collect()
    }

    /// Same ring with the variables listed in another order.
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Self> {
        let t = self.nvars();
        let vars: Vec<String> = perm.iter().map(|&i| self.vars[i].clone()).collect();
        let images: Vec<IntPoly> = (0..t)
            .map(|i| {
                let new_pos = perm.iter().position(|&j| j == i).expect("permutation");
                IntPoly::monomial(crate::poly::Monomial::var(new_pos, t), 1.into())
            })
            .collect();
        let rels = self.relations.iter().map(|f| f.substitute(&images)).collect();
        IntegerPolynomialPresentation::new(self.p, vars, rels)?.with_residue_degree(self.r)
    }
}

impl fmt::Display for IntegerPolynomialPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = if self.r == 1 { format!("Z_{}", self.p) } else { format!("W(F_{}^{})", self.p, self.r) };
        write!(f, "{w}[{}]/({})", self.vars.join(", "), self.render_relations().join(", "))
    }
}

/// Serialized form used in reports.
#[derive(Debug, Clone, Serialize)]
pub struct PresentationSummary {
    pub p: u64,
    pub residue_degree: u32,
    pub variables: Vec<String>,
    pub relations: Vec<String>,
}

impl From<&IntegerPolynomialPresentation> for PresentationSummary {
    fn from(p: &IntegerPolynomialPresentation) -> Self {
        PresentationSummary {
            p: p.p,
            residue_degree: p.r,
            variables: p.vars.clone(),
            relations: p.render_relations(),
        }
    }
}
