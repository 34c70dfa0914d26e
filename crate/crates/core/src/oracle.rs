//! Brute-force ground truth for tiny structure-constant instances:
//! exhaustive enumeration of the hom span, direct injectivity by kernel
//! rank over the prime field, exhaustive capacity and cogenerator
//! searches, and associated primes by annihilator enumeration. Everything
//! here is deliberately naive and exists to validate the main pipeline.

use thiserror::Error;

use crate::artinian::{AlgebraDecomposition, FpModule};
use crate::field::{El, Field, Matrix};
use crate::genpos::MultiPoly;
use crate::synthesis::ExtNat;

/// Hard limits on the enumeration; exceeding one is an error, never a
/// silent truncation.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    /// Maximum number of elements of the hom span to enumerate.
    pub max_span: usize,
    /// Maximum `F_p`-dimension of either module.
    pub max_dim: usize,
    /// Maximum characteristic.
    pub max_prime: u64,
}

impl Default for OracleBudget {
    fn default() -> OracleBudget {
        OracleBudget {
            max_span: 1 << 12,
            max_dim: 4,
            max_prime: 3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
}

fn check_dims(n: &FpModule, m: &FpModule, budget: &OracleBudget) -> Result<(), OracleError> {
    let p = n.algebra().p();
    if p > budget.max_prime {
        return Err(OracleError::BudgetExceeded(format!(
            "characteristic {p} exceeds {}",
            budget.max_prime
        )));
    }
    for (what, d) in [("domain", n.dim()), ("codomain", m.dim())] {
        if d > budget.max_dim {
            return Err(OracleError::BudgetExceeded(format!(
                "{what} dimension {d} exceeds {}",
                budget.max_dim
            )));
        }
    }
    Ok(())
}

fn flatten(m: &Matrix) -> Vec<El> {
    let mut v = vec![];
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            v.push(m.get(r, c).clone());
        }
    }
    v
}

/// Every element of the module span of `f_gens` inside `Hom(N, M)`: the
/// `F_p`-span of `rho_M(b) * f` over algebra basis elements `b` and
/// generators `f`, enumerated by lexicographic coefficient tuples.
pub fn enumerate_span(
    n: &FpModule,
    m: &FpModule,
    f_gens: &[Matrix],
    budget: &OracleBudget,
) -> Result<Vec<Matrix>, OracleError> {
    check_dims(n, m, budget)?;
    let alg = n.algebra();
    let f = alg.prime_field();
    let p = alg.p();
    // F_p-spanning set of the module span: each generator multiplied by
    // each algebra basis element.
    let mut spanning: Vec<Vec<El>> = vec![];
    for g in f_gens {
        for i in 0..alg.dim() {
            spanning.push(flatten(&m.action_of(&alg.basis_el(i)).mul(g)));
        }
    }
    let rows = m.dim() * n.dim();
    let basis = Matrix::from_columns(&f, rows, spanning).column_space_basis();
    let k = basis.cols();
    let count = (p as u128).checked_pow(k as u32);
    match count {
        Some(c) if c <= budget.max_span as u128 => {}
        _ => {
            return Err(OracleError::BudgetExceeded(format!(
                "span has {p}^{k} elements, limit {}",
                budget.max_span
            )))
        }
    }
    let total = (p as usize).pow(k as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut acc = vec![f.zero(); rows];
        let mut rem = idx;
        for j in 0..k {
            let c = (rem % p as usize) as u64;
            rem /= p as usize;
            if c != 0 {
                let cf = El::Fp(c);
                for (a, b) in acc.iter_mut().zip(basis.column(j)) {
                    *a = f.add(a, &f.mul(&cf, &b));
                }
            }
        }
        let mut mat = Matrix::zero(&f, m.dim(), n.dim());
        let mut it = acc.into_iter();
        for r in 0..m.dim() {
            for c in 0..n.dim() {
                mat.set(r, c, it.next().unwrap());
            }
        }
        out.push(mat);
    }
    Ok(out)
}

fn row_exists(span: &[Matrix], n_dim: usize, m_dim: usize, field: &Field, t: usize) -> bool {
    // DFS over strictly increasing span indices; any injective row has
    // pairwise distinct entries and injective prefixes, and block order
    // never matters, so this search is complete.
    fn rec(
        span: &[Matrix],
        field: &Field,
        n_dim: usize,
        prefix: &Matrix,
        start: usize,
        left: usize,
    ) -> bool {
        if left == 0 {
            return true;
        }
        for i in start..span.len() {
            let ext = prefix.hstack(&span[i]);
            if ext.rank() == ext.cols() {
                if rec(span, field, n_dim, &ext, i + 1, left - 1) {
                    return true;
                }
            }
        }
        false
    }
    let empty = Matrix::zero(field, m_dim, 0);
    let _ = n_dim;
    rec(span, field, n_dim, &empty, 0, t)
}

/// Largest `t` such that some row `(f_1, ..., f_t)` of span elements is
/// injective as a map `N^t -> M`, by direct kernel computation.
pub fn oracle_inj(
    n: &FpModule,
    m: &FpModule,
    f_gens: &[Matrix],
    budget: &OracleBudget,
) -> Result<ExtNat, OracleError> {
    check_dims(n, m, budget)?;
    if n.dim() == 0 {
        return Ok(ExtNat::Infinite);
    }
    let span = enumerate_span(n, m, f_gens, budget)?;
    let field = n.algebra().prime_field();
    let mut best = 0;
    let mut t = 1;
    while t * n.dim() <= m.dim() {
        if row_exists(&span, n.dim(), m.dim(), &field, t) {
            best = t;
            t += 1;
        } else {
            break;
        }
    }
    Ok(ExtNat::Finite(best))
}

fn column_exists(span: &[Matrix], n_dim: usize, field: &Field, t: usize) -> bool {
    // DFS over strictly increasing indices requiring a strict rank
    // increase at every step: a minimal full-rank stack has that property
    // in any order.
    fn rec(span: &[Matrix], n_dim: usize, prefix: &Matrix, start: usize, left: usize) -> bool {
        let rank = prefix.rank();
        if rank == n_dim {
            return true;
        }
        if left == 0 {
            return false;
        }
        for i in start..span.len() {
            let ext = prefix.vstack(&span[i]);
            if ext.rank() > rank && rec(span, n_dim, &ext, i + 1, left - 1) {
                return true;
            }
        }
        false
    }
    let empty = Matrix::zero(field, 0, n_dim);
    rec(span, n_dim, &empty, 0, t)
}

/// Smallest `t` such that some column `(f_1, ..., f_t)` of span elements
/// is injective as a map `N -> M^t`; `t` copies of the zero map never
/// help, so a witness of minimal length has distinct entries and length
/// at most `dim N`.
pub fn oracle_cog(
    n: &FpModule,
    m: &FpModule,
    f_gens: &[Matrix],
    budget: &OracleBudget,
) -> Result<ExtNat, OracleError> {
    check_dims(n, m, budget)?;
    if n.dim() == 0 {
        return Ok(ExtNat::Finite(0));
    }
    let span = enumerate_span(n, m, f_gens, budget)?;
    let field = n.algebra().prime_field();
    for t in 1..=n.dim() {
        if column_exists(&span, n.dim(), &field, t) {
            return Ok(ExtNat::Finite(t));
        }
    }
    Ok(ExtNat::Infinite)
}

/// Does the span contain a single injective map? Independent third
/// enumeration used for the self-consistency check.
pub fn oracle_has_injection(
    n: &FpModule,
    m: &FpModule,
    f_gens: &[Matrix],
    budget: &OracleBudget,
) -> Result<bool, OracleError> {
    check_dims(n, m, budget)?;
    if n.dim() == 0 {
        return Ok(true);
    }
    let span = enumerate_span(n, m, f_gens, budget)?;
    Ok(span.iter().any(|h| h.rank() == n.dim()))
}

/// Associated primes by annihilator enumeration: a component's maximal
/// ideal is associated iff it equals `Ann(v)` for some module element
/// `v`. Independent of the socle computation; only the maximal-ideal
/// list itself comes from the decomposition.
pub fn oracle_ass(
    dec: &AlgebraDecomposition,
    n: &FpModule,
    budget: &OracleBudget,
) -> Result<Vec<usize>, OracleError> {
    let alg = n.algebra();
    let f = alg.prime_field();
    let p = alg.p();
    if p > budget.max_prime || n.dim() > budget.max_dim {
        return Err(OracleError::BudgetExceeded(
            "module beyond annihilator-enumeration budget".into(),
        ));
    }
    // Each maximal ideal as a subspace of R: the component's nilpotent
    // part plus every other component.
    let max_ideals: Vec<Matrix> = dec
        .components
        .iter()
        .map(|comp| {
            let co_idem = alg.sub(alg.unity(), &comp.idempotent);
            let others = alg.mult_matrix(&co_idem);
            comp.max_ideal.hstack(&others).column_space_basis()
        })
        .collect();

    let total = (p as usize).pow(n.dim() as u32);
    let mut found = vec![false; dec.components.len()];
    for idx in 1..total {
        let mut v = vec![f.zero(); n.dim()];
        let mut rem = idx;
        for slot in v.iter_mut() {
            *slot = El::Fp((rem % p as usize) as u64);
            rem /= p as usize;
        }
        // Ann(v) = kernel of r -> rho(r) v.
        let cols: Vec<Vec<El>> = (0..alg.dim())
            .map(|j| n.action_of(&alg.basis_el(j)).mul_vec(&v))
            .collect();
        let ann = Matrix::from_columns(&f, n.dim(), cols).right_kernel();
        let ann_basis = ann.column_space_basis();
        for (c, mi) in max_ideals.iter().enumerate() {
            if found[c] || ann_basis.cols() != mi.cols() {
                continue;
            }
            if mi.hstack(&ann_basis).rank() == mi.cols() {
                found[c] = true;
            }
        }
    }
    Ok((0..dec.components.len()).filter(|&c| found[c]).collect())
}

/// Independent term-by-term polynomial evaluation, used to re-check
/// points returned by the general-position searches.
pub fn oracle_eval_poly(poly: &MultiPoly, field: &Field, point: &[El]) -> El {
    let mut acc = field.zero();
    for (exps, coeff) in poly.terms() {
        let mut term = coeff.clone();
        for (var, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                term = field.mul(&term, &point[var]);
            }
        }
        acc = field.add(&acc, &term);
    }
    acc
}

#[cfg(test)]
mod tests;
