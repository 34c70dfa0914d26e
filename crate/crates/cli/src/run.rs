//! Command dispatch: each command reads its parameters from the request
//! block, runs the pipeline, and produces a human report plus a JSON
//! value. Failures carry one of three exit classes: mathematical
//! negatives (exit 1), input errors (exit 2), and budget or hypothesis
//! failures (exit 3).

use std::collections::BTreeMap;

use serde_json::{json, Value};

use injcog::artinian::{
    decompose, is_injective, is_r_linear, socle_eval, AlgebraDecomposition, FpModule, HomSpace,
    SocleSite,
};
use injcog::field::{Matrix, Poly};
use injcog::graded::{
    artinian_graded_sites, graded_hom_component, graded_pid_hom_component, pid_graded_sites,
    synthesize_graded_artinian, synthesize_graded_pid, GradedError, GradedPidModule,
    GradedPrimeSite,
};
use injcog::oracle::{oracle_cog, oracle_has_injection, oracle_inj, OracleBudget, OracleError};
use injcog::pid::{
    pid_hom_generators, pid_is_injective, pid_socle_eval, PidHom, PidModule, PidPrime,
};
use injcog::synthesis::{
    compute_cog, compute_inj, has_injection, local_capacity, local_cog, synthesize_column,
    synthesize_row, ArtinianInstance, Certificate, ExtNat, PidInstance, RingAdapter,
    SynthesisError, SynthesisResult,
};

use crate::format::{matrix_doc, poly_matrix_doc, Universe, Workspace};

/// How many span elements a homogeneous hom component may have before the
/// local-injection scan refuses to enumerate it.
const GRADED_SPAN_BUDGET: usize = 4096;

#[derive(Debug)]
pub enum CliError {
    /// Exit 1: the mathematics says no.
    Negative(String),
    /// Exit 2: the workspace or request is invalid.
    Input(String),
    /// Exit 3: a budget or a theorem hypothesis is not met.
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Negative(m) | CliError::Input(m) | CliError::Budget(m) => m,
        }
    }
}

#[derive(Clone, Copy, Default)]
pub struct Flags {
    pub seed: u64,
    pub maximal_only: bool,
    pub trace: bool,
}

pub struct Report {
    pub human: String,
    pub json: Value,
}

pub const COMMANDS: &[&str] = &[
    "validate",
    "decompose",
    "ass",
    "socle",
    "hom-basis",
    "inj",
    "cog",
    "has-injection",
    "synthesize-row",
    "synthesize-column",
    "synthesize-graded",
    "check-injective",
    "oracle",
];

pub fn run(command: &str, ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    match command {
        "validate" => validate(ws),
        "decompose" => decompose_cmd(ws, flags),
        "ass" => ass_cmd(ws, flags),
        "socle" => socle_cmd(ws, flags),
        "hom-basis" => hom_basis_cmd(ws),
        "inj" => capacity_cmd(ws, flags, Quantity::Inj),
        "cog" => capacity_cmd(ws, flags, Quantity::Cog),
        "has-injection" => capacity_cmd(ws, flags, Quantity::Has),
        "synthesize-row" => synthesize_cmd(ws, flags, true),
        "synthesize-column" => synthesize_cmd(ws, flags, false),
        "synthesize-graded" => synthesize_graded_cmd(ws, flags),
        "check-injective" => check_injective_cmd(ws, flags),
        "oracle" => oracle_cmd(ws, flags),
        other => Err(CliError::Input(format!(
            "unknown command \"{other}\"; expected one of {}",
            COMMANDS.join(", ")
        ))),
    }
}

// ---------------------------------------------------------------------------
// Request helpers.

fn want<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str, CliError> {
    field
        .as_deref()
        .ok_or_else(|| CliError::Input(format!("request.{name}: required by this command")))
}

fn pick<'a, T>(
    map: &'a BTreeMap<String, T>,
    name: &str,
    kind: &str,
) -> Result<&'a T, CliError> {
    map.get(name)
        .ok_or_else(|| CliError::Input(format!("{kind} \"{name}\": not defined in the workspace")))
}

fn ext_nat_json(v: ExtNat) -> Value {
    match v {
        ExtNat::Finite(n) => json!(n),
        ExtNat::Infinite => json!("infinity"),
    }
}

fn synthesis_negative(e: SynthesisError) -> CliError {
    match e {
        SynthesisError::TargetZero(_)
        | SynthesisError::LocalTargetUnmet { .. }
        | SynthesisError::InvalidLocalData { .. } => CliError::Negative(e.to_string()),
        SynthesisError::SampleInfeasible { .. }
        | SynthesisError::GenPos(_)
        | SynthesisError::CertificateUnmet(_) => CliError::Budget(e.to_string()),
    }
}

fn graded_failure(e: GradedError) -> CliError {
    match e {
        GradedError::NoMultiplier { .. } | GradedError::CardinalityHypothesis { .. } => {
            CliError::Budget(e.to_string())
        }
        GradedError::DegreeViolation(_)
        | GradedError::DegreeMismatch { .. }
        | GradedError::LocalNotInjective { .. } => CliError::Input(e.to_string()),
        GradedError::Structure(_) | GradedError::Pid(_) | GradedError::GenPos(_) => {
            CliError::Budget(e.to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// Per-universe contexts for the pair-based commands.

struct ArtPair<'a> {
    dec: AlgebraDecomposition,
    n: &'a FpModule,
    m: &'a FpModule,
    f_name: String,
    f: Vec<Matrix>,
}

fn art_pair<'a>(
    ws: &'a Workspace,
    flags: &Flags,
) -> Result<Option<ArtPair<'a>>, CliError> {
    let (algebra, modules, homs) = match &ws.universe {
        Universe::Artinian(d) => (&d.algebra, &d.modules, &d.homs),
        _ => return Ok(None),
    };
    let req = &ws.doc.request;
    let n = pick(modules, want(&req.domain, "domain")?, "module")?;
    let m = pick(modules, want(&req.codomain, "codomain")?, "module")?;
    let dec = decompose(algebra, flags.seed);
    let (f_name, f) = match &req.homs {
        Some(name) => {
            let raw = pick(homs, name, "hom set")?;
            for (i, h) in raw.iter().enumerate() {
                if h.rows() != m.dim() || h.cols() != n.dim() {
                    return Err(CliError::Input(format!(
                        "hom set \"{name}\"[{i}]: shape {} x {} does not match Hom({}, {})",
                        h.rows(),
                        h.cols(),
                        req.domain.as_deref().unwrap_or("?"),
                        req.codomain.as_deref().unwrap_or("?"),
                    )));
                }
                if !is_r_linear(h, n, m) {
                    return Err(CliError::Input(format!(
                        "hom set \"{name}\"[{i}]: matrix is not a module map"
                    )));
                }
            }
            (name.clone(), raw.clone())
        }
        None => (
            "(full hom space)".into(),
            HomSpace::new(n, m)
                .map_err(|e| CliError::Input(format!("hom space: {e}")))?
                .basis,
        ),
    };
    Ok(Some(ArtPair { dec, n, m, f_name, f }))
}

struct PidPair<'a> {
    n: &'a PidModule,
    m: &'a PidModule,
    f_name: String,
    f: Vec<PidHom>,
}

fn pid_pair<'a>(ws: &'a Workspace) -> Result<Option<PidPair<'a>>, CliError> {
    let (modules, homs) = match &ws.universe {
        Universe::Pid(d) => (&d.modules, &d.homs),
        _ => return Ok(None),
    };
    let req = &ws.doc.request;
    let n = pick(modules, want(&req.domain, "domain")?, "module")?;
    let m = pick(modules, want(&req.codomain, "codomain")?, "module")?;
    let (f_name, f) = match &req.homs {
        Some(name) => {
            let raw = pick(homs, name, "hom set")?;
            let mut out = vec![];
            for (i, h) in raw.iter().enumerate() {
                out.push(PidHom::new(h.clone(), n, m).map_err(|e| {
                    CliError::Input(format!("hom set \"{name}\"[{i}]: {e}"))
                })?);
            }
            (name.clone(), out)
        }
        None => ("(hom generators)".into(), pid_hom_generators(n, m)),
    };
    Ok(Some(PidPair { n, m, f_name, f }))
}

// ---------------------------------------------------------------------------
// validate / decompose / ass / socle / hom-basis.

fn validate(ws: &Workspace) -> Result<Report, CliError> {
    let mut human = format!("workspace ok: universe {}\n", ws.universe.tag());
    let mut modules = serde_json::Map::new();
    let mut homs = serde_json::Map::new();
    let ring: Value;
    match &ws.universe {
        Universe::Artinian(d) => {
            ring = json!({"p": d.algebra.p(), "dim": d.algebra.dim()});
            for (name, m) in &d.modules {
                human += &format!("  module {name}: dimension {}\n", m.dim());
                modules.insert(name.clone(), json!({"dim": m.dim()}));
            }
            for (name, hs) in &d.homs {
                human += &format!("  hom set {name}: {} matrices\n", hs.len());
                homs.insert(name.clone(), json!(hs.len()));
            }
        }
        Universe::GradedArtinian(d) => {
            ring = json!({"p": d.graded.algebra.p(), "dim": d.graded.algebra.dim(),
                          "degrees": d.graded.degrees});
            for (name, m) in &d.modules {
                human += &format!(
                    "  module {name}: dimension {} in degrees {:?}\n",
                    m.module.dim(),
                    m.occupied_degrees()
                );
                modules.insert(name.clone(), json!({"dim": m.module.dim(), "degrees": m.degrees}));
            }
            for (name, hs) in &d.homs {
                human += &format!("  hom set {name}: {} matrices\n", hs.len());
                homs.insert(name.clone(), json!(hs.len()));
            }
        }
        Universe::Pid(d) => {
            ring = json!({"p": d.p});
            for (name, m) in &d.modules {
                human += &format!(
                    "  module {name}: {} generators, free rank {}\n",
                    m.gens(),
                    m.free_rank()
                );
                modules.insert(
                    name.clone(),
                    json!({"gens": m.gens(), "free_rank": m.free_rank(),
                           "invariant_factors": m.invariant_factors().iter().map(|f| f.to_string()).collect::<Vec<_>>()}),
                );
            }
            for (name, hs) in &d.homs {
                human += &format!("  hom set {name}: {} matrices\n", hs.len());
                homs.insert(name.clone(), json!(hs.len()));
            }
        }
        Universe::GradedPid(d) => {
            ring = json!({"p": d.p});
            for (name, m) in &d.modules {
                human += &format!(
                    "  module {name}: {} parts in degrees {:?}\n",
                    m.degrees.len(),
                    m.degrees
                );
                modules.insert(name.clone(), json!({"parts": m.degrees.len(), "degrees": m.degrees}));
            }
            for (name, hs) in &d.homs {
                human += &format!("  hom set {name}: {} matrices\n", hs.len());
                homs.insert(name.clone(), json!(hs.len()));
            }
        }
    }
    Ok(Report {
        human,
        json: json!({"universe": ws.universe.tag(), "ring": ring,
                     "modules": Value::Object(modules), "homs": Value::Object(homs)}),
    })
}

fn decompose_cmd(ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let algebra = match &ws.universe {
        Universe::Artinian(d) => &d.algebra,
        Universe::GradedArtinian(d) => &d.graded.algebra,
        _ => {
            return Err(CliError::Input(
                "decompose: the polynomial universes have no idempotent decomposition".into(),
            ))
        }
    };
    let dec = decompose(algebra, flags.seed);
    let mut human = format!("{} local components\n", dec.components.len());
    let comps: Vec<Value> = dec
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            human += &format!(
                "  m{i}: dimension {}, residue degree {}\n",
                c.basis.cols(),
                c.residue_degree
            );
            json!({"index": i, "dim": c.basis.cols(), "residue_degree": c.residue_degree,
                   "idempotent": c.idempotent})
        })
        .collect();
    Ok(Report {
        human,
        json: json!({"components": comps}),
    })
}

fn domain_module<'a>(ws: &'a Workspace) -> Result<&'a str, CliError> {
    want(&ws.doc.request.domain, "domain")
}

/// Associated primes with socle dimensions for the requested domain
/// module, uniformly across universes.
fn site_table(ws: &Workspace, flags: &Flags) -> Result<Vec<(String, usize, usize)>, CliError> {
    match &ws.universe {
        Universe::Artinian(d) => {
            let n = pick(&d.modules, domain_module(ws)?, "module")?;
            let dec = decompose(&d.algebra, flags.seed);
            Ok(injcog::artinian::associated_primes(&dec, n)
                .into_iter()
                .map(|c| {
                    let site = SocleSite::new(&dec, c, n);
                    (format!("m{c}"), site.dim, site.residue_degree)
                })
                .collect())
        }
        Universe::GradedArtinian(d) => {
            let n = pick(&d.modules, domain_module(ws)?, "module")?;
            let dec = decompose(&d.graded.algebra, flags.seed);
            Ok(artinian_graded_sites(&dec, n)
                .iter()
                .map(|s| {
                    (
                        s.label.clone(),
                        s.rank,
                        dec.components[s.index].residue_degree,
                    )
                })
                .collect())
        }
        Universe::Pid(d) => {
            let n = pick(&d.modules, domain_module(ws)?, "module")?;
            Ok(injcog::pid::pid_associated_primes(n)
                .iter()
                .map(|q| {
                    let label = match q {
                        PidPrime::Zero => "(0)".to_string(),
                        PidPrime::Irreducible(f) => format!("({f})"),
                    };
                    let deg = match q {
                        PidPrime::Zero => 0,
                        PidPrime::Irreducible(f) => f.degree().unwrap_or(0),
                    };
                    (label, injcog::pid::pid_socle_dim(n, q), deg)
                })
                .collect())
        }
        Universe::GradedPid(d) => {
            let n = pick(&d.modules, domain_module(ws)?, "module")?;
            let (_, sites) = pid_graded_sites(n);
            Ok(sites
                .iter()
                .map(|s: &GradedPrimeSite| (s.label.clone(), s.rank, 0))
                .collect())
        }
    }
}

fn ass_cmd(ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let table = site_table(ws, flags)?;
    let labels: Vec<&String> = table.iter().map(|(l, _, _)| l).collect();
    let human = if labels.is_empty() {
        "no associated primes (zero module)\n".to_string()
    } else {
        format!(
            "associated primes: {}\n",
            labels
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    Ok(Report {
        human,
        json: json!({"associated_primes": labels}),
    })
}

fn socle_cmd(ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let table = site_table(ws, flags)?;
    let mut human = String::new();
    let rows: Vec<Value> = table
        .iter()
        .map(|(label, dim, res_deg)| {
            human += &format!("  {label}: socle dimension {dim}\n");
            json!({"prime": label, "socle_dim": dim, "residue_degree": res_deg})
        })
        .collect();
    if rows.is_empty() {
        human = "no associated primes (zero module)\n".into();
    }
    Ok(Report {
        human,
        json: json!({"socle": rows}),
    })
}

fn hom_basis_cmd(ws: &Workspace) -> Result<Report, CliError> {
    let req = &ws.doc.request;
    match &ws.universe {
        Universe::Artinian(d) => {
            let n = pick(&d.modules, want(&req.domain, "domain")?, "module")?;
            let m = pick(&d.modules, want(&req.codomain, "codomain")?, "module")?;
            let homs = HomSpace::new(n, m).map_err(|e| CliError::Input(e.to_string()))?;
            let mats: Vec<Value> = homs.basis.iter().map(|h| json!(matrix_doc(h))).collect();
            Ok(Report {
                human: format!("hom space dimension {}\n", homs.basis.len()),
                json: json!({"dim": homs.basis.len(), "basis": mats}),
            })
        }
        Universe::GradedArtinian(d) => {
            let n = pick(&d.modules, want(&req.domain, "domain")?, "module")?;
            let m = pick(&d.modules, want(&req.codomain, "codomain")?, "module")?;
            let degree = req
                .degree
                .ok_or_else(|| CliError::Input("request.degree: required for a graded hom basis".into()))?;
            let basis =
                graded_hom_component(n, m, degree).map_err(|e| CliError::Input(e.to_string()))?;
            let mats: Vec<Value> = basis.iter().map(|h| json!(matrix_doc(h))).collect();
            Ok(Report {
                human: format!("degree-{degree} hom component dimension {}\n", basis.len()),
                json: json!({"degree": degree, "dim": basis.len(), "basis": mats}),
            })
        }
        Universe::Pid(d) => {
            let n = pick(&d.modules, want(&req.domain, "domain")?, "module")?;
            let m = pick(&d.modules, want(&req.codomain, "codomain")?, "module")?;
            let gens = pid_hom_generators(n, m);
            let mats: Vec<Value> = gens
                .iter()
                .map(|h| json!(poly_matrix_doc(&h.matrix)))
                .collect();
            Ok(Report {
                human: format!("{} hom generators\n", gens.len()),
                json: json!({"generators": mats}),
            })
        }
        Universe::GradedPid(d) => {
            let n = pick(&d.modules, want(&req.domain, "domain")?, "module")?;
            let m = pick(&d.modules, want(&req.codomain, "codomain")?, "module")?;
            let degree = req
                .degree
                .ok_or_else(|| CliError::Input("request.degree: required for a graded hom basis".into()))?;
            let basis = graded_pid_hom_component(n, m, degree);
            let mats: Vec<Value> = basis
                .iter()
                .map(|h| json!(poly_matrix_doc(&h.matrix)))
                .collect();
            Ok(Report {
                human: format!("degree-{degree} hom component dimension {}\n", basis.len()),
                json: json!({"degree": degree, "dim": basis.len(), "basis": mats}),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// inj / cog / has-injection.

enum Quantity {
    Inj,
    Cog,
    Has,
}

fn capacity_cmd(ws: &Workspace, flags: &Flags, what: Quantity) -> Result<Report, CliError> {
    let (inj, cog, has, f_name) = if let Some(pair) = art_pair(ws, flags)? {
        let inst = ArtinianInstance::new(pair.dec.clone(), pair.n.clone(), pair.m.clone());
        (
            compute_inj(&inst, &pair.f, flags.maximal_only),
            compute_cog(&inst, &pair.f),
            has_injection(&inst, &pair.f),
            pair.f_name,
        )
    } else if let Some(pair) = pid_pair(ws)? {
        let inst = PidInstance::new(pair.n.clone(), pair.m.clone());
        (
            compute_inj(&inst, &pair.f, flags.maximal_only),
            compute_cog(&inst, &pair.f),
            has_injection(&inst, &pair.f),
            pair.f_name,
        )
    } else {
        return Err(CliError::Input(format!(
            "this command works on the ungraded universes; got {} (use synthesize-graded there)",
            ws.universe.tag()
        )));
    };
    match what {
        Quantity::Inj => Ok(Report {
            human: format!("inj = {inj}\n"),
            json: json!({"inj": ext_nat_json(inj), "maximal_only": flags.maximal_only}),
        }),
        Quantity::Cog => Ok(Report {
            human: format!("cog = {cog}\n"),
            json: json!({"cog": ext_nat_json(cog)}),
        }),
        Quantity::Has => {
            if has {
                Ok(Report {
                    human: "an injective map exists in the span\n".into(),
                    json: json!({"has_injection": true}),
                })
            } else {
                Err(CliError::Negative(format!(
                    "no injective map exists in the span of {f_name}"
                )))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// synthesize-row / synthesize-column.

fn synthesis_report<H, F: Fn(&H) -> Value>(
    result: &SynthesisResult<H>,
    targets: &[usize],
    site_labels: &[String],
    to_json: F,
    trace: bool,
) -> Report {
    let homs: Vec<Value> = result.homs.iter().map(&to_json).collect();
    let certs: Vec<Value> = result
        .certificates
        .iter()
        .map(|c: &Certificate| {
            json!({"site": site_labels[c.site], "prefix_len": c.prefix_len,
                   "target_rank": c.target_rank, "achieved_rank": c.achieved_rank})
        })
        .collect();
    let mut human = format!("synthesized {} maps\n", result.homs.len());
    for c in &result.certificates {
        human += &format!(
            "  {}: prefix {} reaches rank {} (target {})\n",
            site_labels[c.site], c.prefix_len, c.achieved_rank, c.target_rank
        );
    }
    let mut body = json!({"homs": homs, "targets": targets, "certificates": certs});
    if trace {
        body["trace"] = json!(result.trace);
        human += &result
            .trace
            .iter()
            .map(|l| format!("  trace: {l}\n"))
            .collect::<String>();
    }
    Report { human, json: body }
}

fn synthesize_cmd(ws: &Workspace, flags: &Flags, row: bool) -> Result<Report, CliError> {
    let req_targets = ws.doc.request.targets.clone();
    if let Some(pair) = art_pair(ws, flags)? {
        let inst = ArtinianInstance::new(pair.dec.clone(), pair.n.clone(), pair.m.clone());
        let labels: Vec<String> = inst.sites().iter().map(|s| s.label.clone()).collect();
        let targets = resolve_targets(&inst, &pair.f, req_targets, row, &labels)?;
        let none = vec![None; labels.len()];
        let result = if row {
            synthesize_row(&inst, &pair.f, &targets, &none)
        } else {
            synthesize_column(&inst, &pair.f, &targets, &none)
        }
        .map_err(synthesis_negative)?;
        Ok(synthesis_report(
            &result,
            &targets,
            &labels,
            |h| json!(matrix_doc(h)),
            flags.trace,
        ))
    } else if let Some(pair) = pid_pair(ws)? {
        let inst = PidInstance::new(pair.n.clone(), pair.m.clone());
        let labels: Vec<String> = inst.sites().iter().map(|s| s.label.clone()).collect();
        let targets = resolve_targets(&inst, &pair.f, req_targets, row, &labels)?;
        let none = vec![None; labels.len()];
        let result = if row {
            synthesize_row(&inst, &pair.f, &targets, &none)
        } else {
            synthesize_column(&inst, &pair.f, &targets, &none)
        }
        .map_err(synthesis_negative)?;
        Ok(synthesis_report(
            &result,
            &targets,
            &labels,
            |h| json!(poly_matrix_doc(&h.matrix)),
            flags.trace,
        ))
    } else {
        Err(CliError::Input(format!(
            "synthesis works on the ungraded universes; got {} (use synthesize-graded there)",
            ws.universe.tag()
        )))
    }
}

/// Targets from the request, or the per-site optimum (capacity for rows,
/// cogenerator number for columns) when absent.
fn resolve_targets<A: RingAdapter>(
    adapter: &A,
    f: &[A::Hom],
    requested: Option<Vec<usize>>,
    row: bool,
    labels: &[String],
) -> Result<Vec<usize>, CliError> {
    if let Some(t) = requested {
        if t.len() != labels.len() {
            return Err(CliError::Input(format!(
                "request.targets: {} entries for {} associated primes ({})",
                t.len(),
                labels.len(),
                labels.join(", ")
            )));
        }
        return Ok(t);
    }
    let mut targets = vec![];
    for site in 0..labels.len() {
        let t = if row {
            match local_capacity(adapter, f, site) {
                0 => None,
                v => Some(v),
            }
        } else {
            local_cog(adapter, f, site)
        };
        match t {
            Some(v) => targets.push(v),
            None => {
                return Err(CliError::Negative(format!(
                    "site {}: no injective local {} of any length exists in the span",
                    labels[site],
                    if row { "row" } else { "column" }
                )))
            }
        }
    }
    Ok(targets)
}

// ---------------------------------------------------------------------------
// synthesize-graded.

/// All nonzero linear combinations of the component basis, or an error
/// when the scan would exceed the budget.
fn fp_span(p: u64, basis: &[Matrix]) -> Result<Vec<Matrix>, CliError> {
    span_budget(p, basis.len())?;
    let mut out = vec![];
    let total = (p as usize).pow(basis.len() as u32);
    for idx in 1..total {
        let mut rem = idx;
        let mut acc: Option<Matrix> = None;
        for b in basis {
            let c = (rem % p as usize) as u64;
            rem /= p as usize;
            if c != 0 {
                let term = b.scale(&injcog::field::El::Fp(c));
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
        }
        if let Some(a) = acc {
            out.push(a);
        }
    }
    Ok(out)
}

fn pid_span(p: u64, basis: &[PidHom]) -> Result<Vec<PidHom>, CliError> {
    span_budget(p, basis.len())?;
    let mut out = vec![];
    let total = (p as usize).pow(basis.len() as u32);
    for idx in 1..total {
        let mut rem = idx;
        let mut acc: Option<PidHom> = None;
        for b in basis {
            let c = (rem % p as usize) as u64;
            rem /= p as usize;
            if c != 0 {
                let term = b.scale(&Poly::constant(p, c));
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
        }
        if let Some(a) = acc {
            out.push(a);
        }
    }
    Ok(out)
}

fn span_budget(p: u64, dim: usize) -> Result<(), CliError> {
    let size = (p as u128).checked_pow(dim as u32);
    match size {
        Some(s) if s as usize <= GRADED_SPAN_BUDGET => Ok(()),
        _ => Err(CliError::Budget(format!(
            "hom component span has p^{dim} elements, over the scan budget {GRADED_SPAN_BUDGET}"
        ))),
    }
}

/// Per-site lists of degrees admitting a homogeneous local injection,
/// then a uniform degree, then the gluing loop.
fn synthesize_graded_cmd(ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let req = &ws.doc.request;
    match &ws.universe {
        Universe::GradedArtinian(d) => {
            let n = pick(&d.modules, want(&req.domain, "domain")?, "module")?;
            let m = pick(&d.modules, want(&req.codomain, "codomain")?, "module")?;
            let dec = decompose(&d.graded.algebra, flags.seed);
            let sites = artinian_graded_sites(&dec, n);
            if sites.is_empty() {
                return Ok(Report {
                    human: "zero domain module: the zero map is the injection\n".into(),
                    json: json!({"degree": req.degree.unwrap_or(0), "hom": matrix_doc(
                        &Matrix::zero(&d.graded.algebra.prime_field(), m.module.dim(), n.module.dim()))}),
                });
            }
            // Candidate degrees: differences of occupied degrees.
            let mut candidates: Vec<i64> = m
                .degrees
                .iter()
                .flat_map(|&dm| n.degrees.iter().map(move |&dn| dm - dn))
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            if let Some(want_deg) = req.degree {
                candidates.retain(|&c| c == want_deg);
            }
            // Scan each candidate degree for per-site local injections.
            let n_sites: Vec<SocleSite> = sites
                .iter()
                .map(|s| SocleSite::new(&dec, s.index, &n.module))
                .collect();
            let m_sites: Vec<SocleSite> = sites
                .iter()
                .map(|s| SocleSite::new(&dec, s.index, &m.module))
                .collect();
            let mut per_site: Vec<Vec<i64>> = vec![vec![]; sites.len()];
            let mut found: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
            for &deg in &candidates {
                let basis = graded_hom_component(n, m, deg)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                if basis.is_empty() {
                    continue;
                }
                let span = fp_span(d.graded.algebra.p(), &basis)?;
                for (k, site) in sites.iter().enumerate() {
                    if let Some(h) = span
                        .iter()
                        .find(|h| socle_eval(h, &n_sites[k], &m_sites[k]).rank() == site.rank)
                    {
                        per_site[k].push(deg);
                        found.insert((k, deg), h.clone());
                    }
                }
            }
            let labels: Vec<String> = sites.iter().map(|s| s.label.clone()).collect();
            let uniform = uniform_degree(&labels, &per_site)?;
            let locals: Vec<Matrix> = (0..sites.len())
                .map(|k| found[&(k, uniform)].clone())
                .collect();
            let h = synthesize_graded_artinian(&dec, n, m, uniform, &locals)
                .map_err(graded_failure)?;
            graded_report(uniform, &labels, &per_site, json!(matrix_doc(&h)), flags)
        }
        Universe::GradedPid(d) => {
            let n = pick(&d.modules, want(&req.domain, "domain")?, "module")?;
            let m = pick(&d.modules, want(&req.codomain, "codomain")?, "module")?;
            let (primes, sites) = pid_graded_sites(n);
            if sites.is_empty() {
                let zero = PidHom::zero(&n.module, &m.module);
                return Ok(Report {
                    human: "zero domain module: the zero map is the injection\n".into(),
                    json: json!({"degree": req.degree.unwrap_or(0),
                                 "hom": poly_matrix_doc(&zero.matrix)}),
                });
            }
            let candidates = pid_candidate_degrees(n, m, req.degree);
            let mut per_site: Vec<Vec<i64>> = vec![vec![]; sites.len()];
            let mut found: BTreeMap<(usize, i64), PidHom> = BTreeMap::new();
            for &deg in &candidates {
                let basis = graded_pid_hom_component(n, m, deg);
                if basis.is_empty() {
                    continue;
                }
                let span = pid_span(d.p, &basis)?;
                for (k, site) in sites.iter().enumerate() {
                    if let Some(h) = span.iter().find(|h| {
                        pid_socle_eval(h, &n.module, &m.module, &primes[k]).rank() == site.rank
                    }) {
                        per_site[k].push(deg);
                        found.insert((k, deg), h.clone());
                    }
                }
            }
            let labels: Vec<String> = sites.iter().map(|s| s.label.clone()).collect();
            let uniform = uniform_degree(&labels, &per_site)?;
            let locals: Vec<PidHom> = (0..sites.len())
                .map(|k| found[&(k, uniform)].clone())
                .collect();
            let h = synthesize_graded_pid(n, m, uniform, &locals).map_err(graded_failure)?;
            graded_report(
                uniform,
                &labels,
                &per_site,
                json!(poly_matrix_doc(&h.matrix)),
                flags,
            )
        }
        _ => Err(CliError::Input(format!(
            "synthesize-graded works on the graded universes; got {}",
            ws.universe.tag()
        ))),
    }
}

/// Degrees worth scanning over graded `F_p[x]`: every generator-degree
/// difference, padded upward by the largest torsion exponent (higher
/// monomial entries cannot add new local injections beyond that).
fn pid_candidate_degrees(n: &GradedPidModule, m: &GradedPidModule, only: Option<i64>) -> Vec<i64> {
    let pad = n
        .exps
        .iter()
        .chain(&m.exps)
        .filter_map(|e| *e)
        .max()
        .unwrap_or(0) as i64;
    let mut out = vec![];
    for &dm in &m.degrees {
        for &dn in &n.degrees {
            for extra in 0..=pad {
                out.push(dm - dn + extra);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    if let Some(deg) = only {
        out.retain(|&c| c == deg);
        if out.is_empty() {
            out.push(deg);
        }
    }
    out
}

/// Smallest degree admitting a local injection at every site; exit 3 when
/// no single degree does (the uniformity hypothesis fails), exit 1 when
/// some site has no local injection in any degree.
fn uniform_degree(labels: &[String], per_site: &[Vec<i64>]) -> Result<i64, CliError> {
    for (k, degs) in per_site.iter().enumerate() {
        if degs.is_empty() {
            return Err(CliError::Negative(format!(
                "site {}: no homogeneous local injection exists in any scanned degree",
                labels[k]
            )));
        }
    }
    let mut uniform: Vec<i64> = per_site[0].clone();
    for degs in &per_site[1..] {
        uniform.retain(|d| degs.contains(d));
    }
    match uniform.first() {
        Some(&d) => Ok(d),
        None => {
            let detail = labels
                .iter()
                .zip(per_site)
                .map(|(l, degs)| format!("{l} only in degrees {degs:?}"))
                .collect::<Vec<_>>()
                .join("; ");
            Err(CliError::Budget(format!(
                "degree uniformity fails: local injections exist at {detail}, \
                 but no single degree serves every site"
            )))
        }
    }
}

fn graded_report(
    degree: i64,
    labels: &[String],
    per_site: &[Vec<i64>],
    hom: Value,
    flags: &Flags,
) -> Result<Report, CliError> {
    let mut human = format!("glued a homogeneous injection of degree {degree}\n");
    let site_degs: Vec<Value> = labels
        .iter()
        .zip(per_site)
        .map(|(l, degs)| {
            if flags.trace {
                human += &format!("  trace: {l} admits local injections in degrees {degs:?}\n");
            }
            json!({"site": l, "degrees": degs})
        })
        .collect();
    let mut body = json!({"degree": degree, "hom": hom});
    if flags.trace {
        body["local_degrees"] = json!(site_degs);
    }
    Ok(Report { human, json: body })
}

// ---------------------------------------------------------------------------
// check-injective / oracle.

fn check_injective_cmd(ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let mut rows: Vec<Value> = vec![];
    let mut bad = vec![];
    let mut human = String::new();
    if let Some(pair) = art_pair(ws, flags)? {
        for (i, h) in pair.f.iter().enumerate() {
            let verdict = is_injective(h, &pair.dec, pair.n, pair.m)
                .map_err(|e| CliError::Input(format!("hom {i}: {e}")))?;
            match verdict {
                None => {
                    human += &format!("  hom {i}: injective\n");
                    rows.push(json!({"index": i, "injective": true}));
                }
                Some(w) => {
                    human += &format!(
                        "  hom {i}: not injective (socle kernel at m{} contains {:?})\n",
                        w.component, w.vector
                    );
                    rows.push(json!({"index": i, "injective": false,
                                     "witness": {"component": w.component, "vector": w.vector}}));
                    bad.push(i);
                }
            }
        }
    } else if let Some(pair) = pid_pair(ws)? {
        for (i, h) in pair.f.iter().enumerate() {
            let verdict = pid_is_injective(h, pair.n, pair.m)
                .map_err(|e| CliError::Input(format!("hom {i}: {e}")))?;
            match verdict {
                None => {
                    human += &format!("  hom {i}: injective\n");
                    rows.push(json!({"index": i, "injective": true}));
                }
                Some(w) => {
                    let prime = match &w.prime {
                        PidPrime::Zero => "(0)".to_string(),
                        PidPrime::Irreducible(f) => format!("({f})"),
                    };
                    let kappa = w.prime.residue_field(pair.n.p());
                    let vector: Vec<String> =
                        w.vector.iter().map(|e| kappa.format_el(e)).collect();
                    human += &format!(
                        "  hom {i}: not injective (socle kernel at {prime} contains {vector:?})\n"
                    );
                    rows.push(json!({"index": i, "injective": false,
                                     "witness": {"prime": prime, "vector": vector}}));
                    bad.push(i);
                }
            }
        }
    } else {
        return Err(CliError::Input(format!(
            "check-injective works on the ungraded universes; got {}",
            ws.universe.tag()
        )));
    }
    if bad.is_empty() {
        Ok(Report {
            human: format!("all maps injective\n{human}"),
            json: json!({"all_injective": true, "maps": rows}),
        })
    } else {
        Err(CliError::Negative(format!(
            "non-injective maps at indices {bad:?}\n{human}"
        )))
    }
}

fn oracle_cmd(ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let pair = art_pair(ws, flags)?.ok_or_else(|| {
        CliError::Input(format!(
            "the brute-force oracle covers the structure-constant universe; got {}",
            ws.universe.tag()
        ))
    })?;
    let budget = OracleBudget::default();
    let map_budget = |e: OracleError| CliError::Budget(e.to_string());
    let o_inj = oracle_inj(pair.n, pair.m, &pair.f, &budget).map_err(map_budget)?;
    let o_cog = oracle_cog(pair.n, pair.m, &pair.f, &budget).map_err(map_budget)?;
    let o_has = oracle_has_injection(pair.n, pair.m, &pair.f, &budget).map_err(map_budget)?;
    let inst = ArtinianInstance::new(pair.dec.clone(), pair.n.clone(), pair.m.clone());
    let inj = compute_inj(&inst, &pair.f, flags.maximal_only);
    let cog = compute_cog(&inst, &pair.f);
    let has = has_injection(&inst, &pair.f);
    let agree = inj == o_inj && cog == o_cog && has == o_has;
    let human = format!(
        "pipeline: inj {inj}, cog {cog}, injection exists {has}\n\
         oracle:   inj {o_inj}, cog {o_cog}, injection exists {o_has}\n\
         {}\n",
        if agree { "agree" } else { "DISAGREE" }
    );
    let body = json!({
        "pipeline": {"inj": ext_nat_json(inj), "cog": ext_nat_json(cog), "has_injection": has},
        "oracle": {"inj": ext_nat_json(o_inj), "cog": ext_nat_json(o_cog), "has_injection": o_has},
        "agree": agree,
    });
    if agree {
        Ok(Report { human, json: body })
    } else {
        Err(CliError::Negative(human))
    }
}

// ---------------------------------------------------------------------------
// Shared with main: the JSON envelope.

pub fn ok_envelope(command: &str, report: &Report) -> Value {
    json!({"format": crate::format::FORMAT_VERSION, "command": command,
           "status": "ok", "result": report.json})
}

pub fn err_envelope(command: &str, err: &CliError) -> Value {
    json!({"format": crate::format::FORMAT_VERSION, "command": command,
           "status": "error", "exit": err.exit_code(), "message": err.message()})
}
