//! Exhaustive small-instance sweep infrastructure: a fixed fixture list
//! of twelve structure-constant rings, enumeration of all direct sums of
//! cyclic modules of dimension at most three, seeded random hom sets,
//! and batch evaluation of the main pipeline against the brute-force
//! oracle. The acceptance suite and the benchmarks both drive this.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artinian::{
    decompose, is_injective, AlgebraDecomposition, FpModule, HomSpace, StructAlgebra,
};
use crate::field::{El, Matrix, Poly};
use crate::oracle::{
    enumerate_span, oracle_cog, oracle_has_injection, oracle_inj, OracleBudget,
};
use crate::par;
use crate::synthesis::{compute_cog, compute_inj, has_injection, ArtinianInstance, ExtNat};

// ---------------------------------------------------------------------------
// Ring fixtures.

fn table(p: u64, dim: usize, rule: impl Fn(usize, usize) -> Vec<u64>) -> Vec<u64> {
    let mut c = vec![0u64; dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let prod = rule(i, j);
            for k in 0..dim {
                c[(i * dim + j) * dim + k] = prod[k] % p;
            }
        }
    }
    c
}

/// `F_p[x]/(modulus)` with basis `1, x, ..., x^(d-1)`.
fn poly_quotient(p: u64, modulus: &[u64]) -> Arc<StructAlgebra> {
    let m = Poly::new(p, modulus.to_vec());
    let d = m.degree().expect("nonzero modulus");
    let c = table(p, d, |i, j| {
        let prod = Poly::monomial(p, 1, i).mul(&Poly::monomial(p, 1, j)).rem(&m);
        (0..d).map(|k| prod.coeff(k)).collect()
    });
    let labels = (0..d).map(|k| format!("x^{k}")).collect();
    let mut unity = vec![0; d];
    unity[0] = 1;
    Arc::new(StructAlgebra::new(p, labels, c, unity).unwrap())
}

/// Direct product of two algebras over the same prime.
fn product(a: &Arc<StructAlgebra>, b: &Arc<StructAlgebra>) -> Arc<StructAlgebra> {
    assert_eq!(a.p(), b.p());
    let p = a.p();
    let (da, db) = (a.dim(), b.dim());
    let d = da + db;
    let c = table(p, d, |i, j| {
        let mut v = vec![0; d];
        if i < da && j < da {
            let prod = a.mul(&a.basis_el(i), &a.basis_el(j));
            v[..da].copy_from_slice(&prod);
        } else if i >= da && j >= da {
            let prod = b.mul(&b.basis_el(i - da), &b.basis_el(j - da));
            v[da..].copy_from_slice(&prod);
        }
        v
    });
    let labels = (0..da)
        .map(|k| format!("a{k}"))
        .chain((0..db).map(|k| format!("b{k}")))
        .collect();
    let unity = a
        .unity()
        .iter()
        .copied()
        .chain(b.unity().iter().copied())
        .collect();
    Arc::new(StructAlgebra::new(p, labels, c, unity).unwrap())
}

/// `F_p[x,y]/(x^2, xy, y^2)`: a local ring with a two-dimensional square-
/// zero maximal ideal.
fn square_zero_plane(p: u64) -> Arc<StructAlgebra> {
    let c = table(p, 3, |i, j| {
        let mut v = vec![0, 0, 0];
        if i == 0 {
            v[j] = 1;
        } else if j == 0 {
            v[i] = 1;
        }
        v
    });
    Arc::new(
        StructAlgebra::new(
            p,
            vec!["1".into(), "x".into(), "y".into()],
            c,
            vec![1, 0, 0],
        )
        .unwrap(),
    )
}

/// The fixed fixture list: twelve commutative rings with `dim <= 4` over
/// `p` in `{2, 3}`, covering fields, extensions, local rings, products,
/// and mixed shapes.
pub fn fixture_algebras() -> Vec<(String, Arc<StructAlgebra>)> {
    let f2 = poly_quotient(2, &[0, 1]); // F_2
    let f3 = poly_quotient(3, &[0, 1]); // F_3
    let d2 = poly_quotient(2, &[0, 0, 1]); // F_2[x]/(x^2)
    vec![
        ("F2".into(), f2.clone()),
        ("F3".into(), f3.clone()),
        ("F2[x]/(x^2)".into(), d2.clone()),
        ("F3[x]/(x^2)".into(), poly_quotient(3, &[0, 0, 1])),
        ("F2xF2".into(), product(&f2, &f2)),
        ("F4".into(), poly_quotient(2, &[1, 1, 1])),
        ("F2[x]/(x^3)".into(), poly_quotient(2, &[0, 0, 0, 1])),
        ("F3xF3".into(), product(&f3, &f3)),
        ("F2[x]/(x^2)xF2".into(), product(&d2, &f2)),
        ("F2[x,y]/(x,y)^2".into(), square_zero_plane(2)),
        ("F9".into(), poly_quotient(3, &[1, 0, 1])),
        ("F2[x]/(x^4)".into(), poly_quotient(2, &[0, 0, 0, 0, 1])),
    ]
}

// ---------------------------------------------------------------------------
// Module enumeration.

/// Canonical key of a subspace spanned by the columns: the reduced row
/// echelon form of the transpose, truncated to its nonzero rows.
fn subspace_key(basis: &Matrix) -> Vec<u64> {
    let (echelon, pivots) = basis.transpose().rref();
    let mut key = vec![basis.rows() as u64, pivots.len() as u64];
    for r in 0..pivots.len() {
        for c in 0..echelon.cols() {
            key.push(match echelon.get(r, c) {
                El::Fp(v) => *v,
                _ => unreachable!("prime-field subspace"),
            });
        }
    }
    key
}

/// All ideals of the algebra, as echelon column bases, found by closing
/// the set of principal ideals under pairwise sums.
pub fn enumerate_ideals(alg: &Arc<StructAlgebra>) -> Vec<Matrix> {
    let f = alg.prime_field();
    let d = alg.dim();
    let p = alg.p() as usize;
    let mut seen = std::collections::BTreeMap::new();
    // Principal ideals: column space of the multiplication matrix of each
    // ring element.
    let total = p.pow(d as u32);
    for idx in 0..total {
        let mut el = vec![0u64; d];
        let mut rem = idx;
        for slot in el.iter_mut() {
            *slot = (rem % p) as u64;
            rem /= p;
        }
        let basis = alg.mult_matrix(&el).column_space_basis();
        seen.insert(subspace_key(&basis), basis);
    }
    // Close under sums.
    loop {
        let current: Vec<Matrix> = seen.values().cloned().collect();
        let before = seen.len();
        for i in 0..current.len() {
            for j in (i + 1)..current.len() {
                let sum = current[i].hstack(&current[j]).column_space_basis();
                seen.entry(subspace_key(&sum)).or_insert(sum);
            }
        }
        if seen.len() == before {
            break;
        }
    }
    let _ = f;
    seen.into_values().collect()
}

/// All direct sums of cyclic modules `R/I` with total dimension at most
/// `max_dim`, plus the zero module, deduplicated by their ideal multiset.
pub fn enumerate_modules(alg: &Arc<StructAlgebra>, max_dim: usize) -> Vec<(String, FpModule)> {
    let regular = FpModule::regular(alg);
    let mut cyclics: Vec<(String, usize, FpModule)> = vec![];
    for (k, ideal) in enumerate_ideals(alg).into_iter().enumerate() {
        let dim = alg.dim() - ideal.cols();
        if dim == 0 || dim > max_dim {
            continue;
        }
        let (q, _) = regular.quotient(&ideal).expect("ideal is invariant");
        cyclics.push((format!("C{k}"), dim, q));
    }
    let mut out: Vec<(String, FpModule)> = vec![("0".into(), FpModule::zero(alg))];
    // Multisets: non-decreasing index sequences with dimension budget.
    fn rec(
        alg: &Arc<StructAlgebra>,
        cyclics: &[(String, usize, FpModule)],
        start: usize,
        budget: usize,
        name: &str,
        acc: &FpModule,
        out: &mut Vec<(String, FpModule)>,
    ) {
        for i in start..cyclics.len() {
            let (label, dim, module) = &cyclics[i];
            if *dim > budget {
                continue;
            }
            let next = acc.direct_sum(module);
            let next_name = if name.is_empty() {
                label.clone()
            } else {
                format!("{name}+{label}")
            };
            out.push((next_name.clone(), next.clone()));
            rec(alg, cyclics, i, budget - dim, &next_name, &next, out);
        }
    }
    let zero = FpModule::zero(alg);
    rec(alg, &cyclics, 0, max_dim, "", &zero, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Instances and evaluation.

pub struct SweepInstance {
    pub ring: String,
    pub domain: String,
    pub codomain: String,
    pub seed: u64,
    pub dec: AlgebraDecomposition,
    pub n: FpModule,
    pub m: FpModule,
    pub f_gens: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOutcome {
    pub inj: ExtNat,
    pub inj_maximal_only: ExtNat,
    pub cog: ExtNat,
    pub has: bool,
    pub oracle_inj: ExtNat,
    pub oracle_cog: ExtNat,
    pub oracle_has: bool,
    /// Homs in the span where the socle criterion and the direct kernel
    /// disagree (must stay zero).
    pub criterion_mismatches: usize,
    pub span_size: usize,
}

/// Draw a random hom set whose module span stays within the oracle
/// budget: one or two random combinations of the hom-space basis,
/// falling back to a single generator when the span grows too large.
fn draw_f_gens(
    rng: &mut ChaCha8Rng,
    homs: &HomSpace,
    n: &FpModule,
    m: &FpModule,
    budget: &OracleBudget,
) -> Vec<Matrix> {
    let alg = n.algebra();
    let f = alg.prime_field();
    let p = alg.p();
    if homs.basis.is_empty() {
        return vec![];
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let mut acc = Matrix::zero(&f, m.dim(), n.dim());
        for b in &homs.basis {
            let c = rng.gen_range(0..p);
            if c != 0 {
                acc = acc.add(&b.scale(&El::Fp(c)));
            }
        }
        acc
    };
    let want = if rng.gen_range(0..2u32) == 0 { 1 } else { 2 };
    let mut gens: Vec<Matrix> = (0..want).map(|_| draw(rng)).collect();
    while gens.len() > 1 && enumerate_span(n, m, &gens, budget).is_err() {
        gens.pop();
    }
    gens
}

/// All sweep instances: every ring fixture, every ordered module pair of
/// dimension at most three, `per_pair` seeded random hom sets each.
pub fn build_instances(per_pair: usize) -> Vec<SweepInstance> {
    let budget = OracleBudget::default();
    let mut out = vec![];
    for (ring_idx, (ring, alg)) in fixture_algebras().into_iter().enumerate() {
        let dec = decompose(&alg, 0);
        let modules = enumerate_modules(&alg, 3);
        for (ni, (n_name, n)) in modules.iter().enumerate() {
            for (mi, (m_name, m)) in modules.iter().enumerate() {
                let homs = HomSpace::new(n, m).expect("hom space");
                for k in 0..per_pair {
                    let seed = ((ring_idx as u64) << 48)
                        ^ ((ni as u64) << 32)
                        ^ ((mi as u64) << 16)
                        ^ k as u64;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let f_gens = draw_f_gens(&mut rng, &homs, n, m, &budget);
                    out.push(SweepInstance {
                        ring: ring.clone(),
                        domain: n_name.clone(),
                        codomain: m_name.clone(),
                        seed,
                        dec: dec.clone(),
                        n: n.clone(),
                        m: m.clone(),
                        f_gens,
                    });
                    if homs.basis.is_empty() {
                        break; // every draw is the empty set
                    }
                }
            }
        }
    }
    out
}

/// Run the full pipeline and the oracle on one instance.
pub fn evaluate_instance(inst: &SweepInstance) -> SweepOutcome {
    let budget = OracleBudget::default();
    let adapter = ArtinianInstance::new(inst.dec.clone(), inst.n.clone(), inst.m.clone());
    let span = enumerate_span(&inst.n, &inst.m, &inst.f_gens, &budget).expect("span in budget");
    let mut criterion_mismatches = 0;
    for h in &span {
        let by_socle = is_injective(h, &inst.dec, &inst.n, &inst.m)
            .expect("R-linear by construction")
            .is_none();
        let by_kernel = h.rank() == inst.n.dim();
        if by_socle != by_kernel {
            criterion_mismatches += 1;
        }
    }
    SweepOutcome {
        inj: compute_inj(&adapter, &inst.f_gens, false),
        inj_maximal_only: compute_inj(&adapter, &inst.f_gens, true),
        cog: compute_cog(&adapter, &inst.f_gens),
        has: has_injection(&adapter, &inst.f_gens),
        oracle_inj: oracle_inj(&inst.n, &inst.m, &inst.f_gens, &budget).expect("budget"),
        oracle_cog: oracle_cog(&inst.n, &inst.m, &inst.f_gens, &budget).expect("budget"),
        oracle_has: oracle_has_injection(&inst.n, &inst.m, &inst.f_gens, &budget)
            .expect("budget"),
        criterion_mismatches,
        span_size: span.len(),
    }
}

/// Evaluate a batch on the default (possibly parallel) path.
pub fn evaluate_all(instances: &[SweepInstance]) -> Vec<SweepOutcome> {
    par::map(instances, evaluate_instance)
}

/// Evaluate a batch strictly sequentially (benchmark comparison path).
pub fn evaluate_all_seq(instances: &[SweepInstance]) -> Vec<SweepOutcome> {
    par::map_seq(instances, evaluate_instance)
}
