//! The versioned JSON workspace format.
//!
//! A workspace file carries one ring, named modules over it, named sets
//! of homomorphism matrices, and a request block with the parameters the
//! commands read. Matrices over the prime field are arrays of arrays of
//! integers; matrices over `F_p[x]` are arrays of arrays of little-endian
//! coefficient arrays. Parsing validates everything into domain objects
//! and fails with a message naming the offending entity.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use injcog::artinian::{FpModule, StructAlgebra};
use injcog::field::{El, Field, Matrix, Poly};
use injcog::graded::{GradedAlgebra, GradedFpModule, GradedPidModule};
use injcog::pid::{PidModule, PolyMatrix};

pub const FORMAT_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Document types (what the JSON deserializes into).

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceDoc {
    pub format: u32,
    /// `artinian`, `pid`, `graded-artinian`, or `graded-pid`.
    pub universe: String,
    pub ring: RingDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub homs: BTreeMap<String, Vec<HomDoc>>,
    #[serde(default, skip_serializing_if = "RequestDoc::is_empty")]
    pub request: RequestDoc,
}

/// The ring block. The polynomial universes need only `p`; the
/// structure-constant universes need labels, constants, and unity, and the
/// graded one also needs a degree per basis element.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(deny_unknown_fields)]
pub struct RingDoc {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// `constants[i][j]` is the coefficient vector of `b_i * b_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unity: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
}

/// One module block. Structure-constant universes use `action` (one
/// square matrix per ring basis element); the plain polynomial universe
/// uses `presentation`; the graded polynomial universe uses `parts`.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
    /// Rows are generators, columns are relations, entries are coefficient
    /// arrays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<PartDoc>>,
}

/// One summand of a graded `F_p[x]`-module: `R/(x^torsion)` shifted into
/// generator degree `degree`, or a shifted free summand when `torsion` is
/// absent.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(deny_unknown_fields)]
pub struct PartDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<u32>,
    pub degree: i64,
}

/// A hom matrix: integer entries over the prime field, or little-endian
/// coefficient arrays over `F_p[x]`.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(untagged)]
pub enum HomDoc {
    Fp(Vec<Vec<u64>>),
    Poly(Vec<Vec<Vec<u64>>>),
}

/// Parameters the commands read. Everything is optional; each command
/// reports exactly which field it is missing.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct RequestDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RequestDoc {
    pub fn is_empty(&self) -> bool {
        self == &RequestDoc::default()
    }
}

// ---------------------------------------------------------------------------
// Validated domain data.

pub struct ArtinianData {
    pub algebra: Arc<StructAlgebra>,
    pub modules: BTreeMap<String, FpModule>,
    pub homs: BTreeMap<String, Vec<Matrix>>,
}

pub struct PidData {
    pub p: u64,
    pub modules: BTreeMap<String, PidModule>,
    pub homs: BTreeMap<String, Vec<PolyMatrix>>,
}

pub struct GradedArtinianData {
    pub graded: GradedAlgebra,
    pub modules: BTreeMap<String, GradedFpModule>,
    pub homs: BTreeMap<String, Vec<Matrix>>,
}

pub struct GradedPidData {
    pub p: u64,
    pub modules: BTreeMap<String, GradedPidModule>,
    pub homs: BTreeMap<String, Vec<PolyMatrix>>,
}

pub enum Universe {
    Artinian(ArtinianData),
    Pid(PidData),
    GradedArtinian(GradedArtinianData),
    GradedPid(GradedPidData),
}

impl Universe {
    pub fn tag(&self) -> &'static str {
        match self {
            Universe::Artinian(_) => "artinian",
            Universe::Pid(_) => "pid",
            Universe::GradedArtinian(_) => "graded-artinian",
            Universe::GradedPid(_) => "graded-pid",
        }
    }
}

pub struct Workspace {
    pub doc: WorkspaceDoc,
    pub universe: Universe,
}

// ---------------------------------------------------------------------------
// Parsing and validation.

pub fn parse_str(text: &str) -> Result<Workspace, String> {
    let doc: WorkspaceDoc =
        serde_json::from_str(text).map_err(|e| format!("workspace does not parse: {e}"))?;
    let universe = build(&doc)?;
    Ok(Workspace { doc, universe })
}

fn build(doc: &WorkspaceDoc) -> Result<Universe, String> {
    if doc.format != FORMAT_VERSION {
        return Err(format!(
            "format: version {} is not supported (expected {FORMAT_VERSION})",
            doc.format
        ));
    }
    match doc.universe.as_str() {
        "artinian" => build_artinian(doc, false),
        "graded-artinian" => build_artinian(doc, true),
        "pid" => build_pid(doc, false),
        "graded-pid" => build_pid(doc, true),
        other => Err(format!(
            "universe: \"{other}\" is not one of artinian, pid, graded-artinian, graded-pid"
        )),
    }
}

fn fp_matrix(field: &Field, p: u64, rows: &[Vec<u64>], what: &str) -> Result<Matrix, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(format!("{what}: ragged matrix rows"));
    }
    Ok(Matrix::from_fn(field, r, c, |i, j| El::Fp(rows[i][j] % p)))
}

fn poly_matrix(p: u64, rows: &[Vec<Vec<u64>>], what: &str) -> Result<PolyMatrix, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(format!("{what}: ragged matrix rows"));
    }
    let entries = rows
        .iter()
        .flat_map(|row| row.iter().map(|cs| Poly::new(p, cs.clone())))
        .collect();
    Ok(PolyMatrix::from_entries(p, r, c, entries))
}

fn build_artinian(doc: &WorkspaceDoc, graded: bool) -> Result<Universe, String> {
    let ring = &doc.ring;
    let labels = ring
        .labels
        .clone()
        .ok_or("ring.labels: required in the structure-constant universes")?;
    let constants = ring
        .constants
        .as_ref()
        .ok_or("ring.constants: required in the structure-constant universes")?;
    let unity = ring
        .unity
        .clone()
        .ok_or("ring.unity: required in the structure-constant universes")?;
    let d = labels.len();
    if constants.len() != d || constants.iter().any(|row| row.len() != d) {
        return Err(format!("ring.constants: expected a {d} x {d} table of coefficient vectors"));
    }
    let mut flat = vec![0u64; d * d * d];
    for (i, row) in constants.iter().enumerate() {
        for (j, prod) in row.iter().enumerate() {
            if prod.len() != d {
                return Err(format!(
                    "ring.constants[{i}][{j}]: coefficient vector has length {}, expected {d}",
                    prod.len()
                ));
            }
            for (k, &v) in prod.iter().enumerate() {
                flat[(i * d + j) * d + k] = v;
            }
        }
    }
    let algebra = Arc::new(
        StructAlgebra::new(ring.p, labels, flat, unity).map_err(|e| format!("ring: {e}"))?,
    );
    let ga = if graded {
        let degrees = ring
            .degrees
            .clone()
            .ok_or("ring.degrees: required in the graded universe")?;
        Some(GradedAlgebra::new(algebra.clone(), degrees).map_err(|e| format!("ring: {e}"))?)
    } else {
        if ring.degrees.is_some() {
            return Err("ring.degrees: only allowed in the graded universes".into());
        }
        None
    };
    let field = algebra.prime_field();

    let mut modules = BTreeMap::new();
    let mut graded_modules = BTreeMap::new();
    for (name, md) in &doc.modules {
        let action = md
            .action
            .as_ref()
            .ok_or_else(|| format!("module \"{name}\": action is required in this universe"))?;
        if md.presentation.is_some() || md.parts.is_some() {
            return Err(format!(
                "module \"{name}\": presentation/parts belong to the polynomial universes"
            ));
        }
        if action.len() != algebra.dim() {
            return Err(format!(
                "module \"{name}\": {} action matrices for a ring of dimension {}",
                action.len(),
                algebra.dim()
            ));
        }
        let dim = action.first().map_or(0, Vec::len);
        let mut mats = vec![];
        for (i, rows) in action.iter().enumerate() {
            let m = fp_matrix(&field, algebra.p(), rows, &format!("module \"{name}\" action[{i}]"))?;
            if m.rows() != dim || (dim > 0 && m.cols() != dim) {
                return Err(format!(
                    "module \"{name}\" action[{i}]: expected a {dim} x {dim} matrix"
                ));
            }
            mats.push(m);
        }
        let module = FpModule::new(algebra.clone(), dim, mats)
            .map_err(|e| format!("module \"{name}\": {e}"))?;
        if let Some(ga) = &ga {
            let degrees = md
                .degrees
                .clone()
                .ok_or_else(|| format!("module \"{name}\": degrees required in the graded universe"))?;
            let gm = GradedFpModule::new(ga, module, degrees)
                .map_err(|e| format!("module \"{name}\": {e}"))?;
            graded_modules.insert(name.clone(), gm);
        } else {
            if md.degrees.is_some() {
                return Err(format!(
                    "module \"{name}\": degrees only allowed in the graded universes"
                ));
            }
            modules.insert(name.clone(), module);
        }
    }

    let mut homs = BTreeMap::new();
    for (name, list) in &doc.homs {
        let mut mats = vec![];
        for (i, h) in list.iter().enumerate() {
            match h {
                HomDoc::Fp(rows) => {
                    mats.push(fp_matrix(&field, algebra.p(), rows, &format!("hom set \"{name}\"[{i}]"))?)
                }
                HomDoc::Poly(_) => {
                    return Err(format!(
                        "hom set \"{name}\"[{i}]: polynomial entries in a structure-constant universe"
                    ))
                }
            }
        }
        homs.insert(name.clone(), mats);
    }

    Ok(if let Some(ga) = ga {
        Universe::GradedArtinian(GradedArtinianData {
            graded: ga,
            modules: graded_modules,
            homs,
        })
    } else {
        Universe::Artinian(ArtinianData {
            algebra,
            modules,
            homs,
        })
    })
}

fn build_pid(doc: &WorkspaceDoc, graded: bool) -> Result<Universe, String> {
    let ring = &doc.ring;
    if ring.labels.is_some() || ring.constants.is_some() || ring.unity.is_some() || ring.degrees.is_some() {
        return Err("ring: the polynomial universes take only the prime p".into());
    }
    let p = ring.p;

    let mut modules = BTreeMap::new();
    let mut graded_modules = BTreeMap::new();
    for (name, md) in &doc.modules {
        if md.action.is_some() || md.degrees.is_some() {
            return Err(format!(
                "module \"{name}\": action/degrees belong to the structure-constant universes"
            ));
        }
        if graded {
            let parts = md.parts.as_ref().ok_or_else(|| {
                format!("module \"{name}\": parts required in the graded polynomial universe")
            })?;
            if md.presentation.is_some() {
                return Err(format!(
                    "module \"{name}\": give parts, not presentation, in the graded universe"
                ));
            }
            let tuples: Vec<(Option<u32>, i64)> =
                parts.iter().map(|q| (q.torsion, q.degree)).collect();
            let gm = GradedPidModule::new(p, &tuples)
                .map_err(|e| format!("module \"{name}\": {e}"))?;
            graded_modules.insert(name.clone(), gm);
        } else {
            let pres = md.presentation.as_ref().ok_or_else(|| {
                format!("module \"{name}\": presentation required in the polynomial universe")
            })?;
            if md.parts.is_some() {
                return Err(format!(
                    "module \"{name}\": parts belong to the graded universe"
                ));
            }
            let pm = poly_matrix(p, pres, &format!("module \"{name}\" presentation"))?;
            let module =
                PidModule::new(p, pm).map_err(|e| format!("module \"{name}\": {e}"))?;
            modules.insert(name.clone(), module);
        }
    }

    let mut homs = BTreeMap::new();
    for (name, list) in &doc.homs {
        let mut mats = vec![];
        for (i, h) in list.iter().enumerate() {
            let what = format!("hom set \"{name}\"[{i}]");
            match h {
                HomDoc::Poly(rows) => mats.push(poly_matrix(p, rows, &what)?),
                // Integer entries are constants; this also catches empty
                // rows, which the untagged decoder reads as the Fp shape.
                HomDoc::Fp(rows) => {
                    let as_polys: Vec<Vec<Vec<u64>>> = rows
                        .iter()
                        .map(|row| row.iter().map(|&v| vec![v]).collect())
                        .collect();
                    mats.push(poly_matrix(p, &as_polys, &what)?)
                }
            }
        }
        homs.insert(name.clone(), mats);
    }

    Ok(if graded {
        Universe::GradedPid(GradedPidData {
            p,
            modules: graded_modules,
            homs,
        })
    } else {
        Universe::Pid(PidData { p, modules, homs })
    })
}

// ---------------------------------------------------------------------------
// Re-emission (round-trip support).

fn el_int(e: &El) -> u64 {
    match e {
        El::Fp(v) => *v,
        _ => unreachable!("prime-field matrix entry"),
    }
}

pub fn matrix_doc(m: &Matrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| el_int(m.get(r, c))).collect())
        .collect()
}

pub fn poly_matrix_doc(m: &PolyMatrix) -> Vec<Vec<Vec<u64>>> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| m.get(r, c).coeffs().to_vec())
                .collect()
        })
        .collect()
}

fn algebra_ring_doc(alg: &StructAlgebra, degrees: Option<&[i64]>) -> RingDoc {
    let d = alg.dim();
    let constants = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d)
                        .map(|k| alg.constants()[(i * d + j) * d + k])
                        .collect()
                })
                .collect()
        })
        .collect();
    RingDoc {
        p: alg.p(),
        labels: Some(alg.labels().to_vec()),
        constants: Some(constants),
        unity: Some(alg.unity().clone()),
        degrees: degrees.map(<[i64]>::to_vec),
    }
}

fn action_doc(m: &FpModule) -> Vec<Vec<Vec<u64>>> {
    (0..m.algebra().dim())
        .map(|i| matrix_doc(m.action(i)))
        .collect()
}

/// Serialize the validated domain objects back into a document. Together
/// with `parse_str` this is the round-trip contract: emitting a parsed
/// workspace and parsing it again reproduces equal domain objects.
pub fn emit(ws: &Workspace) -> WorkspaceDoc {
    let request = ws.doc.request.clone();
    match &ws.universe {
        Universe::Artinian(data) => WorkspaceDoc {
            format: FORMAT_VERSION,
            universe: "artinian".into(),
            ring: algebra_ring_doc(&data.algebra, None),
            modules: data
                .modules
                .iter()
                .map(|(name, m)| {
                    (
                        name.clone(),
                        ModuleDoc {
                            action: Some(action_doc(m)),
                            degrees: None,
                            presentation: None,
                            parts: None,
                        },
                    )
                })
                .collect(),
            homs: data
                .homs
                .iter()
                .map(|(name, hs)| {
                    (
                        name.clone(),
                        hs.iter().map(|h| HomDoc::Fp(matrix_doc(h))).collect(),
                    )
                })
                .collect(),
            request,
        },
        Universe::GradedArtinian(data) => WorkspaceDoc {
            format: FORMAT_VERSION,
            universe: "graded-artinian".into(),
            ring: algebra_ring_doc(&data.graded.algebra, Some(&data.graded.degrees)),
            modules: data
                .modules
                .iter()
                .map(|(name, m)| {
                    (
                        name.clone(),
                        ModuleDoc {
                            action: Some(action_doc(&m.module)),
                            degrees: Some(m.degrees.clone()),
                            presentation: None,
                            parts: None,
                        },
                    )
                })
                .collect(),
            homs: data
                .homs
                .iter()
                .map(|(name, hs)| {
                    (
                        name.clone(),
                        hs.iter().map(|h| HomDoc::Fp(matrix_doc(h))).collect(),
                    )
                })
                .collect(),
            request,
        },
        Universe::Pid(data) => WorkspaceDoc {
            format: FORMAT_VERSION,
            universe: "pid".into(),
            ring: RingDoc {
                p: data.p,
                labels: None,
                constants: None,
                unity: None,
                degrees: None,
            },
            modules: data
                .modules
                .iter()
                .map(|(name, m)| {
                    (
                        name.clone(),
                        ModuleDoc {
                            action: None,
                            degrees: None,
                            presentation: Some(poly_matrix_doc(m.presentation())),
                            parts: None,
                        },
                    )
                })
                .collect(),
            homs: data
                .homs
                .iter()
                .map(|(name, hs)| {
                    (
                        name.clone(),
                        hs.iter().map(|h| HomDoc::Poly(poly_matrix_doc(h))).collect(),
                    )
                })
                .collect(),
            request,
        },
        Universe::GradedPid(data) => WorkspaceDoc {
            format: FORMAT_VERSION,
            universe: "graded-pid".into(),
            ring: RingDoc {
                p: data.p,
                labels: None,
                constants: None,
                unity: None,
                degrees: None,
            },
            modules: data
                .modules
                .iter()
                .map(|(name, m)| {
                    (
                        name.clone(),
                        ModuleDoc {
                            action: None,
                            degrees: None,
                            presentation: None,
                            parts: Some(
                                m.exps
                                    .iter()
                                    .zip(&m.degrees)
                                    .map(|(&torsion, &degree)| PartDoc { torsion, degree })
                                    .collect(),
                            ),
                        },
                    )
                })
                .collect(),
            homs: data
                .homs
                .iter()
                .map(|(name, hs)| {
                    (
                        name.clone(),
                        hs.iter().map(|h| HomDoc::Poly(poly_matrix_doc(h))).collect(),
                    )
                })
                .collect(),
            request,
        },
    }
}
