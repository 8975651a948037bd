use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::FiniteGroup;
use crate::local_ring::{FiniteLocalRing, GaloisRingSpec};
use crate::poly::{parse_poly, IntPoly};
use crate::presented::IntegerPolynomialPresentation;
use crate::representation::{residual_rep, Matrix, Representation};
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EtaleCheck,
    NecessaryCondition,
    Defcount,
    Tangent,
    MarandaCheck,
    OrderBound,
    HomCount,
    Fingerprint,
    WCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EtaleCheck => "etale-check",
            Command::NecessaryCondition => "necessary-condition",
            Command::Defcount => "defcount",
            Command::Tangent => "tangent",
            Command::MarandaCheck => "maranda-check",
            Command::OrderBound => "order-bound",
            Command::HomCount => "hom-count",
            Command::Fingerprint => "fingerprint",
            Command::WCheck => "w-check",
        }
    }
}

/// A single job. See `JOBS.md` for the grammar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<CapsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PresentationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<MapsSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient_bits: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationSpec {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_degree: Option<u32>,
    pub variables: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RingSpec {
    /// GR(p^m, r); `modulus` lists the coefficients of `h`, lowest first.
    Galois {
        p: u64,
        m: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u64>>,
    },
    /// GR(p^m, r)[ε].
    DualNumbers {
        p: u64,
        m: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<u32>,
    },
    /// A presented ring modulo p^m.
    Presentation {
        p: u64,
        m: u32,
        variables: Vec<String>,
        #[serde(default)]
        relations: Vec<String>,
    },
    /// W(F_{p^r}) at working precision `n`, with precision tracking.
    WittModel {
        p: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<u32>,
    },
}

impl RingSpec {
    pub fn p(&self) -> u64 {
        match self {
            RingSpec::Galois { p, .. }
            | RingSpec::DualNumbers { p, .. }
            | RingSpec::Presentation { p, .. }
            | RingSpec::WittModel { p, .. } => *p,
        }
    }

    /// `default_n` is the working precision used by `witt-model` when `n` is
    /// not given.
    pub fn build(&self, default_n: Option<u32>, limits: &Limits) -> Result<FiniteLocalRing> {
        match self {
            RingSpec::Galois { p, m, r, modulus } => {
                FiniteLocalRing::galois(GaloisRingSpec::new(*p, *m, r.unwrap_or(1), modulus.clone())?)
            }
            RingSpec::DualNumbers { p, m, r } => FiniteLocalRing::galois_ring(*p, *m, r.unwrap_or(1))?.dual_numbers(),
            RingSpec::Presentation { p, m, variables, relations } => {
                let pres = build_presentation(*p, None, variables, relations)?;
                FiniteLocalRing::from_truncated_presentation(&pres, *m, limits)
            }
            RingSpec::WittModel { p, n, r } => {
                let n = n.or(default_n).ok_or_else(|| {
                    Error::InvalidParameter("witt-model ring needs a working precision `n`".into())
                })?;
                FiniteLocalRing::witt_precision_model(*p, n, r.unwrap_or(1))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Symmetric { n: usize },
    Quaternion8,
    Product { factors: Vec<GroupSpec> },
    Table { table: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic { n } => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral { n } => FiniteGroup::dihedral(*n),
            GroupSpec::Symmetric { n } => FiniteGroup::symmetric(*n),
            GroupSpec::Quaternion8 => FiniteGroup::quaternion8(),
            GroupSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidParameter("product needs at least one factor".into()))?;
                let mut g = first.build()?;
                for f in it {
                    g = FiniteGroup::direct_product(&g, &f.build()?)?;
                }
                Ok(g)
            }
            GroupSpec::Table { table } => FiniteGroup::from_cayley_table(table.clone()),
        }
    }
}

/// A matrix entry: an integer, or coordinates in the ring basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Coords(Vec<u64>),
}

/// One matrix per group generator, each given as a list of rows.
pub type MatrixList = Vec<Vec<Vec<Entry>>>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Omitted means the trivial representation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<MatrixList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub first: MatrixList,
    pub second: MatrixList,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapsSpec {
    pub f1: Vec<String>,
    pub f2: Vec<String>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Parses and validates a job. Unknown keys are rejected and every block
/// must name the same prime.
pub fn parse_job(text: &str) -> Result<JobSpec> {
    let job: JobSpec = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse { line, column, message: e.message().to_string() }
    })?;
    job.validate()?;
    Ok(job)
}

impl JobSpec {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("job specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let mut primes: Vec<(&str, u64)> = Vec::new();
        if let Some(b) = &self.presentation {
            primes.push(("presentation", b.p));
        }
        if let Some(b) = &self.source {
            primes.push(("source", b.p));
        }
        if let Some(b) = &self.ring {
            primes.push(("ring", b.p()));
        }
        if let Some(b) = &self.target {
            primes.push(("target", b.p()));
        }
        if let Some(p) = self.representation.as_ref().and_then(|r| r.p) {
            primes.push(("representation", p));
        }
        if let Some(&(first, p)) = primes.first() {
            if let Some(&(other, q)) = primes.iter().find(|(_, q)| *q != p) {
                return Err(Error::InvalidParameter(format!(
                    "inconsistent p across blocks: {first} has p = {p}, {other} has p = {q}"
                )));
            }
        }
        Ok(())
    }

    pub fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(c) = &self.caps {
            if let Some(x) = c.elements {
                l.elements = x as u128;
            }
            if let Some(x) = c.maps {
                l.maps = x as u128;
            }
            if let Some(x) = c.degree {
                l.degree = x;
            }
            if let Some(x) = c.coefficient_bits {
                l.coefficient_bits = x;
            }
        }
        l
    }

    pub(crate) fn require<'a, T>(&self, block: &'a Option<T>, name: &str) -> Result<&'a T> {
        block.as_ref().ok_or_else(|| {
            let cmd = self.command.map_or("this command", Command::name);
            Error::InvalidParameter(format!("{cmd} needs a [{name}] block"))
        })
    }
}

pub(crate) fn build_presentation(
    p: u64,
    residue_degree: Option<u32>,
    variables: &[String],
    relations: &[String],
) -> Result<IntegerPolynomialPresentation> {
    let rels = relations.iter().map(|s| parse_poly(s, variables)).collect::<Result<Vec<_>>>()?;
    IntegerPolynomialPresentation::new(p, variables.to_vec(), rels)?.with_residue_degree(residue_degree.unwrap_or(1))
}

impl PresentationSpec {
    pub fn build(&self) -> Result<IntegerPolynomialPresentation> {
        build_presentation(self.p, self.residue_degree, &self.variables, &self.relations)
    }
}

pub(crate) fn parse_polys(srcs: &[String], vars: &[String]) -> Result<Vec<IntPoly>> {
    srcs.iter().map(|s| parse_poly(s, vars)).collect()
}

pub(crate) fn build_matrices(ring: &FiniteLocalRing, list: &MatrixList) -> Result<Vec<Matrix>> {
    list.iter()
        .map(|rows| {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidParameter("matrices must be square".into()));
            }
            let entries = rows
                .iter()
                .flatten()
                .map(|e| match e {
                    Entry::Int(k) => Ok(ring.from_int(*k)),
                    Entry::Coords(c) => ring.element(c),
                })
                .collect::<Result<Vec<_>>>()?;
            Matrix::from_entries(ring, n, entries)
        })
        .collect()
}

impl RepresentationSpec {
    /// The residual representation over F_{p^r}. `ring`, when given,
    /// supplies the field.
    pub fn build(&self, group: Arc<FiniteGroup>, ring: Option<&FiniteLocalRing>) -> Result<Representation> {
        let field = match ring {
            Some(ring) => {
                let f = ring.residue_field();
                if self.r.is_some_and(|r| r != f.spec().r) {
                    return Err(Error::InvalidParameter(
                        "representation residue degree differs from the ring's".into(),
                    ));
                }
                f
            }
            None => {
                let p = self
                    .p
                    .ok_or_else(|| Error::InvalidParameter("[representation] needs `p` when no ring is given".into()))?;
                FiniteLocalRing::galois_ring(p, 1, self.r.unwrap_or(1))?
            }
        };
        let field = Arc::new(field);
        match &self.generators {
            None => Ok(Representation::trivial(group, field, self.dimension.unwrap_or(1))),
            Some(list) => {
                let images = build_matrices(&field, list)?;
                if let Some(d) = self.dimension {
                    if images.iter().any(|m| m.dim() != d) {
                        return Err(Error::InvalidParameter(format!("generator matrices must be {d} x {d}")));
                    }
                }
                residual_rep(group, field, images)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_etale_job() {
        let job = parse_job("command = \"etale-check\"\n[presentation]\np = 2\nvariables = [\"X\"]\nrelations = [\"X^2\"]\n")
            .unwrap();
        assert_eq!(job.command, Some(Command::EtaleCheck));
        let pres = job.presentation.unwrap().build().unwrap();
        assert_eq!(pres.render_relations(), vec!["X^2"]);
    }

    #[test]
    fn mismatched_primes_rejected() {
        let text = "[ring]\nkind = \"galois\"\np = 2\nm = 2\n[representation]\np = 3\n";
        let err = parse_job(text).unwrap_err();
        assert_eq!(err.code(), "invalid_parameter");
    }

    #[test]
    fn unknown_keys_report_position() {
        let text = "command = \"defcount\"\n\n[group]\nkind = \"cyclic\"\nn = 2\ncolour = 1\n";
        match parse_job(text).unwrap_err() {
            Error::Parse { line, .. } => assert!(line >= 3, "line {line}"),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse_job("precision = \"six\""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_job("bogus = 1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn defcount_job_round_trips() {
        let job = JobSpec {
            command: Some(Command::Defcount),
            ring: Some(RingSpec::Galois { p: 2, m: 2, r: None, modulus: None }),
            group: Some(GroupSpec::Cyclic { n: 2 }),
            representation: Some(RepresentationSpec { dimension: Some(1), ..Default::default() }),
            ..Default::default()
        };
        let text = job.to_toml();
        assert_eq!(parse_job(&text).unwrap(), job);

        let mixed = JobSpec {
            pair: Some(PairSpec {
                first: vec![vec![vec![Entry::Int(1), Entry::Coords(vec![0, 1])], vec![Entry::Int(0), Entry::Int(-1)]]],
                second: vec![vec![vec![Entry::Int(3)]]],
            }),
            group: Some(GroupSpec::Product { factors: vec![GroupSpec::Cyclic { n: 2 }, GroupSpec::Quaternion8] }),
            ..job
        };
        assert_eq!(parse_job(&mixed.to_toml()).unwrap(), mixed);
    }
}
