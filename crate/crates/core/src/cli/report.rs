use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::group::FiniteGroup;
use crate::local_ring::{compare_fingerprints, hom_enumerate, FiniteLocalRing};
use crate::presented::{etale_check, w_membership_check, PresentationSummary};
use crate::representation::{
    def_set, maranda_decide, tangent_space, working_precision, DefSet, Lift, MarandaCertificate, Matrix, Representation,
};
use crate::udr_checks::{necessary_condition, order_lower_bound};
use crate::{Error, Limits, Result};

use super::job::{build_matrices, parse_polys, Command, JobSpec, MatrixList};

pub const TOOL: &str = "udr";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default truncation for `w-check` when no precision is given.
const DEFAULT_W_PRECISION: u32 = 6;

pub fn clause(command: Command) -> &'static str {
    match command {
        Command::EtaleCheck => "rational fiber is finite etale",
        Command::NecessaryCondition => "necessary condition for universal deformation rings",
        Command::Defcount => "strict equivalence classes of lifts",
        Command::Tangent => "deformations to the dual numbers",
        Command::MarandaCheck => "strict equivalence by averaging modulo |G| m",
        Command::OrderBound => "distinct deformations bound the p-part of |G|",
        Command::HomCount => "local homomorphisms between finite local rings",
        Command::Fingerprint => "isomorphism invariants of finite local rings",
        Command::WCheck => "finitely generated free over W(k)",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub precision: Option<u32>,
    pub caps: Limits,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub clause: &'static str,
    pub settings: Settings,
    pub result: Value,
}

impl Report {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// A finished job: the rendered report and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub body: String,
}

pub fn error_body(command: Option<Command>, err: &Error) -> String {
    let v = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command.map(Command::name),
        "error": { "code": err.code(), "message": err.to_string() },
    });
    let mut s = serde_json::to_string_pretty(&v).expect("error reports serialize");
    s.push('\n');
    s
}

/// Exit code carried by a report: 2 for a failed etale verdict, else 0.
pub fn exit_code(command: Command, result: &Value) -> i32 {
    let fail = command == Command::EtaleCheck
        && result["etale"]["verdict"].as_str().is_some_and(|v| v != "PASS");
    if fail {
        2
    } else {
        0
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

fn group_json(g: &FiniteGroup) -> Value {
    json!({ "name": g.name(), "order": g.order() })
}

pub(crate) struct RepContext {
    pub group: Arc<FiniteGroup>,
    pub residual: Representation,
}

pub(crate) fn rep_context(job: &JobSpec, ring: Option<&FiniteLocalRing>) -> Result<RepContext> {
    let group = Arc::new(job.require(&job.group, "group")?.build()?);
    let residual = match &job.representation {
        Some(spec) => spec.build(group.clone(), ring)?,
        None => {
            let spec = super::job::RepresentationSpec::default();
            let ring = ring.ok_or_else(|| Error::InvalidParameter("needs a [representation] block".into()))?;
            spec.build(group.clone(), Some(ring))?
        }
    };
    Ok(RepContext { group, residual })
}

fn def_result(ctx: &RepContext, def: &DefSet) -> Value {
    json!({
        "group": group_json(&ctx.group),
        "residual": ctx.residual.to_json(),
        "def": to_value(&def.report()),
    })
}

/// Runs a validated job. `job.command` must be set.
pub fn run(job: &JobSpec) -> Result<(Report, i32)> {
    let command = job
        .command
        .ok_or_else(|| Error::InvalidParameter("job does not name a command".into()))?;
    job.validate()?;
    let limits = job.limits();
    let mut precision = job.precision;
    let result = match command {
        Command::EtaleCheck => {
            let pres = job.require(&job.presentation, "presentation")?.build()?;
            json!({
                "presentation": to_value(&PresentationSummary::from(&pres)),
                "etale": to_value(&etale_check(&pres, &limits)?),
            })
        }
        Command::NecessaryCondition => {
            let pres = job.require(&job.presentation, "presentation")?.build()?;
            json!({
                "presentation": to_value(&PresentationSummary::from(&pres)),
                "verdict": to_value(&necessary_condition(&pres, &limits)?),
            })
        }
        Command::WCheck => {
            let pres = job.require(&job.presentation, "presentation")?.build()?;
            let n = precision.unwrap_or(DEFAULT_W_PRECISION);
            precision = Some(n);
            json!({
                "presentation": to_value(&PresentationSummary::from(&pres)),
                "membership": to_value(&w_membership_check(&pres, n, &limits)?),
            })
        }
        Command::Defcount => {
            let ring = Arc::new(job.require(&job.ring, "ring")?.build(precision, &limits)?);
            let ctx = rep_context(job, Some(&ring))?;
            let def = def_set(&ctx.residual, ring, &limits)?;
            def_result(&ctx, &def)
        }
        Command::Tangent => {
            let ctx = rep_context(job, None)?;
            let t = tangent_space(&ctx.residual, &limits)?;
            let mut v = def_result(&ctx, &t.def);
            v["q"] = json!(t.q);
            v["dimension"] = json!(t.dimension);
            v
        }
        Command::MarandaCheck => {
            let group = Arc::new(job.require(&job.group, "group")?.build()?);
            let spec = job.require(&job.ring, "ring")?;
            let n = precision.unwrap_or_else(|| working_precision(group.order(), spec.p()));
            let ring = Arc::new(spec.build(Some(n), &limits)?);
            precision = Some(ring.spec().m);
            let pair = job.require(&job.pair, "pair")?;
            let rho1 = lift_from(&group, &ring, &pair.first)?;
            let rho2 = lift_from(&group, &ring, &pair.second)?;
            let decision = maranda_decide(&rho1, &rho2, &limits)?;
            json!({
                "group": group_json(&group),
                "ring": ring.to_string(),
                "first": rho1.to_json(),
                "second": rho2.to_json(),
                "decision": to_value(&decision.report(&ring)),
            })
        }
        Command::OrderBound => {
            let target = job.require(&job.presentation, "presentation")?.build()?;
            let source = match &job.source {
                Some(s) => s.build()?,
                None => target.clone(),
            };
            let maps = job.require(&job.maps, "maps")?;
            let f1 = parse_polys(&maps.f1, &target.vars)?;
            let f2 = parse_polys(&maps.f2, &target.vars)?;
            let res = order_lower_bound(&source, &target, &f1, &f2, &limits)?;
            json!({
                "source": to_value(&PresentationSummary::from(&source)),
                "target": to_value(&PresentationSummary::from(&target)),
                "bound": to_value(&res),
            })
        }
        Command::HomCount => {
            let source = job.require(&job.ring, "ring")?.build(precision, &limits)?;
            let target = match &job.target {
                Some(t) => t.build(precision, &limits)?,
                None => source.clone(),
            };
            let homs = hom_enumerate(&source, &target, &limits)?;
            let images: Vec<Vec<String>> = homs
                .iter()
                .map(|h| h.generator_images.iter().map(|x| target.render(x)).collect())
                .collect();
            json!({
                "source": source.to_string(),
                "target": target.to_string(),
                "generators": source.generator_names(),
                "count": homs.len(),
                "homs": images,
            })
        }
        Command::Fingerprint => {
            let a = job.require(&job.ring, "ring")?.build(precision, &limits)?;
            let fa = a.fingerprint(&limits)?;
            let mut v = json!({ "ring": a.to_string(), "fingerprint": to_value(&fa) });
            if let Some(t) = &job.target {
                let b = t.build(precision, &limits)?;
                let fb = b.fingerprint(&limits)?;
                v["target"] = json!(b.to_string());
                v["target_fingerprint"] = to_value(&fb);
                v["comparison"] = to_value(&compare_fingerprints(&fa, &fb));
            }
            v
        }
    };
    let code = exit_code(command, &result);
    let report = Report {
        tool: TOOL,
        version: VERSION,
        command: command.name(),
        clause: clause(command),
        settings: Settings { precision, caps: limits },
        result,
    };
    Ok((report, code))
}

fn lift_from(group: &Arc<FiniteGroup>, ring: &Arc<FiniteLocalRing>, list: &MatrixList) -> Result<Representation> {
    let images = build_matrices(ring, list)?;
    Representation::from_generator_images(group.clone(), ring.clone(), images)
}

fn matrices_from_json(v: &Value) -> Result<MatrixList> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Internal(format!("cached matrix list: {e}")))
}

/// Checks a cached report without redoing the expensive part of the job.
///
/// Deformation counts are checked by re-verifying every representative as a
/// lift and the orbit bookkeeping; positive averaging decisions by the
/// conjugation identity. The report is then rebuilt from the checked parts
/// and must match byte for byte. Everything else is cheap and is recomputed.
pub fn verify_cached(job: &JobSpec, body: &str) -> Result<bool> {
    let command = job
        .command
        .ok_or_else(|| Error::InvalidParameter("job does not name a command".into()))?;
    let cached: Value = serde_json::from_str(body).map_err(|e| Error::Internal(format!("cached report: {e}")))?;
    if cached["tool"] != TOOL || cached["version"] != VERSION || cached["command"] != command.name() {
        return Ok(false);
    }
    let limits = job.limits();
    let result = &cached["result"];
    match command {
        Command::Defcount | Command::Tangent => {
            let ring = if command == Command::Defcount {
                Arc::new(job.require(&job.ring, "ring")?.build(job.precision, &limits)?)
            } else {
                let ctx = rep_context(job, None)?;
                Arc::new(ctx.residual.ring().dual_numbers()?)
            };
            let ctx = rep_context(job, Some(&ring))?;
            let def = &result["def"];
            let reps = def["representatives"].as_array().cloned().unwrap_or_default();
            let sizes: Vec<u64> = def["orbit_sizes"]
                .as_array()
                .map(|a| a.iter().filter_map(Value::as_u64).collect())
                .unwrap_or_default();
            let kernel = def["kernel_order"].as_u64().unwrap_or(0);
            if sizes.len() != reps.len()
                || def["class_count"].as_u64() != Some(reps.len() as u64)
                || def["lift_count"].as_u64() != Some(sizes.iter().sum())
                || sizes.iter().any(|&s| s == 0 || !kernel.is_multiple_of(s))
            {
                return Ok(false);
            }
            let mut keys: Vec<Vec<Matrix>> = Vec::with_capacity(reps.len());
            let mut rebuilt = Vec::with_capacity(reps.len());
            for r in &reps {
                let images = build_matrices(&ring, &matrices_from_json(r)?)?;
                let rep = Representation::from_generator_images(ctx.group.clone(), ring.clone(), images)?;
                let lift = Lift::new(&ctx.residual, rep)?;
                keys.push(lift.key());
                rebuilt.push(lift.rep().to_json());
            }
            if keys.windows(2).any(|w| w[0] >= w[1]) {
                return Ok(false);
            }
            let mut expected = json!({
                "group": group_json(&ctx.group),
                "residual": ctx.residual.to_json(),
                "def": {
                    "dimension": ctx.residual.dim(),
                    "ring": ring.to_string(),
                    "lift_count": sizes.iter().sum::<u64>(),
                    "class_count": reps.len(),
                    "kernel_order": kernel,
                    "orbit_sizes": sizes,
                    "representatives": rebuilt,
                },
            });
            if command == Command::Tangent {
                let q = ctx.residual.ring().spec().q();
                let (mut count, mut dimension) = (reps.len() as u64, 0u32);
                while count > 1 && count % q == 0 {
                    count /= q;
                    dimension += 1;
                }
                if count != 1 {
                    return Ok(false);
                }
                expected["q"] = json!(q);
                expected["dimension"] = json!(dimension);
            }
            Ok(rendered(command, job.precision, &limits, expected) == body)
        }
        Command::MarandaCheck => {
            let decision = &result["decision"];
            if decision["equivalent"] != Value::Bool(true) {
                return Ok(run(job)?.0.render() == body);
            }
            let group = Arc::new(job.require(&job.group, "group")?.build()?);
            let spec = job.require(&job.ring, "ring")?;
            let n = job.precision.unwrap_or_else(|| working_precision(group.order(), spec.p()));
            let ring = Arc::new(spec.build(Some(n), &limits)?);
            let pair = job.require(&job.pair, "pair")?;
            let rho1 = lift_from(&group, &ring, &pair.first)?;
            let rho2 = lift_from(&group, &ring, &pair.second)?;
            let cert = &decision["certificate"];
            let rows = serde_json::from_value(cert["b0"].clone())
                .map_err(|e| Error::Internal(format!("cached certificate: {e}")))?;
            let b0 = build_matrices(&ring, &vec![rows])?;
            let (p_exponent, _) = group.p_part(ring.p())?;
            let cert = MarandaCertificate {
                b0: b0.into_iter().next().ok_or_else(|| Error::Internal("empty certificate".into()))?,
                precision: cert["precision"].as_u64().unwrap_or(0) as u32,
                p_exponent,
            };
            if cert.precision + p_exponent != ring.spec().m || !cert.verify(&rho1, &rho2) {
                return Ok(false);
            }
            let j = ring.scale_ideal(group.order() as i64, &ring.maximal_ideal());
            let quotient_cardinality = ring.quotient_ring(&j)?.0.cardinality();
            let expected = json!({
                "group": group_json(&group),
                "ring": ring.to_string(),
                "first": rho1.to_json(),
                "second": rho2.to_json(),
                "decision": {
                    "equivalent": true,
                    "quotient_cardinality": quotient_cardinality,
                    "certificate": cert.to_json(&ring),
                },
            });
            Ok(rendered(command, Some(ring.spec().m), &limits, expected) == body)
        }
        _ => Ok(run(job)?.0.render() == body),
    }
}

fn rendered(command: Command, precision: Option<u32>, limits: &Limits, result: Value) -> String {
    Report {
        tool: TOOL,
        version: VERSION,
        command: command.name(),
        clause: clause(command),
        settings: Settings { precision, caps: *limits },
        result,
    }
    .render()
}
