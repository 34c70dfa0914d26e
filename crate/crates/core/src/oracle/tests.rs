use super::*;
use crate::artinian::{decompose, HomSpace, StructAlgebra};
use crate::genpos::{find_nonvanishing_point, GridProblem};
use crate::synthesis::{compute_cog, compute_inj, has_injection, ArtinianInstance};
use std::sync::Arc;

fn constants_from(p: u64, dim: usize, rule: impl Fn(usize, usize) -> Vec<u64>) -> Vec<u64> {
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

fn base_field(p: u64) -> Arc<StructAlgebra> {
    Arc::new(StructAlgebra::new(p, vec!["1".into()], vec![1], vec![1]).unwrap())
}

fn product_ring() -> Arc<StructAlgebra> {
    let c = constants_from(2, 2, |i, j| {
        if i == j {
            let mut v = vec![0, 0];
            v[i] = 1;
            v
        } else {
            vec![0, 0]
        }
    });
    Arc::new(StructAlgebra::new(2, vec!["e1".into(), "e2".into()], c, vec![1, 1]).unwrap())
}

/// F_p[x]/(x^2).
fn dual_numbers(p: u64) -> Arc<StructAlgebra> {
    let c = constants_from(p, 2, |i, j| {
        let mut v = vec![0, 0];
        if i + j < 2 {
            v[i + j] = 1;
        }
        v
    });
    Arc::new(StructAlgebra::new(p, vec!["1".into(), "x".into()], c, vec![1, 0]).unwrap())
}

fn vector_space(alg: &Arc<StructAlgebra>, d: usize) -> FpModule {
    let f = alg.prime_field();
    FpModule::new(alg.clone(), d, vec![Matrix::identity(&f, d)]).unwrap()
}

#[test]
fn inj_counts_copies_of_the_field() {
    let alg = base_field(2);
    let n = vector_space(&alg, 1);
    let m = vector_space(&alg, 3);
    let homs = HomSpace::new(&n, &m).unwrap();
    let budget = OracleBudget::default();
    assert_eq!(
        oracle_inj(&n, &m, &homs.basis, &budget).unwrap(),
        ExtNat::Finite(3)
    );
    // F = {0}.
    assert_eq!(
        oracle_inj(&n, &m, &[], &budget).unwrap(),
        ExtNat::Finite(0)
    );
    // N = 0: every t works vacuously.
    let zero = FpModule::zero(&alg);
    assert_eq!(
        oracle_inj(&zero, &m, &[], &budget).unwrap(),
        ExtNat::Infinite
    );
}

#[test]
fn cog_counts_needed_functionals() {
    let alg = base_field(2);
    let budget = OracleBudget::default();
    let n1 = vector_space(&alg, 1);
    let homs = HomSpace::new(&n1, &n1).unwrap();
    assert_eq!(
        oracle_cog(&n1, &n1, &homs.basis, &budget).unwrap(),
        ExtNat::Finite(1)
    );
    let n2 = vector_space(&alg, 2);
    let homs = HomSpace::new(&n2, &n1).unwrap();
    assert_eq!(
        oracle_cog(&n2, &n1, &homs.basis, &budget).unwrap(),
        ExtNat::Finite(2)
    );
    // M = 0, N nonzero.
    let zero = FpModule::zero(&alg);
    assert_eq!(
        oracle_cog(&n1, &zero, &[], &budget).unwrap(),
        ExtNat::Infinite
    );
}

#[test]
fn associated_primes_by_annihilators() {
    let budget = OracleBudget::default();
    // Local ring: the unique maximal ideal is associated to the regular
    // module (it is the annihilator of x).
    let alg = dual_numbers(2);
    let dec = decompose(&alg, 0);
    let n = FpModule::regular(&alg);
    assert_eq!(oracle_ass(&dec, &n, &budget).unwrap(), vec![0]);
    // Zero module: no annihilator equals a maximal ideal.
    let zero = FpModule::zero(&alg);
    assert_eq!(oracle_ass(&dec, &zero, &budget).unwrap(), Vec::<usize>::new());
    // Product ring: both maximals are annihilators of the idempotents.
    let alg = product_ring();
    let dec = decompose(&alg, 0);
    let n = FpModule::regular(&alg);
    assert_eq!(oracle_ass(&dec, &n, &budget).unwrap(), vec![0, 1]);
    // Agreement with the socle-based path.
    assert_eq!(
        oracle_ass(&dec, &n, &budget).unwrap(),
        crate::artinian::associated_primes(&dec, &n)
    );
}

#[test]
fn self_consistency_three_enumerations() {
    let budget = OracleBudget::default();
    for (alg, nd, md) in [
        (base_field(2), 1, 2),
        (base_field(3), 2, 2),
        (dual_numbers(2), 2, 2),
        (product_ring(), 2, 2),
    ] {
        let n = if nd == 2 && alg.dim() == 2 {
            FpModule::regular(&alg)
        } else {
            vector_space(&alg, nd)
        };
        let m = if md == 2 && alg.dim() == 2 {
            FpModule::regular(&alg)
        } else {
            vector_space(&alg, md)
        };
        let homs = HomSpace::new(&n, &m).unwrap();
        let inj = oracle_inj(&n, &m, &homs.basis, &budget).unwrap();
        let cog = oracle_cog(&n, &m, &homs.basis, &budget).unwrap();
        let has = oracle_has_injection(&n, &m, &homs.basis, &budget).unwrap();
        assert_eq!(inj.at_least(1), has);
        assert_eq!(
            matches!(cog, ExtNat::Finite(t) if t <= 1),
            has,
            "cog and existence disagree"
        );
    }
}

#[test]
fn matches_the_synthesis_pipeline_on_small_instances() {
    let budget = OracleBudget::default();
    for alg in [base_field(2), dual_numbers(2), product_ring(), base_field(3)] {
        let dec = decompose(&alg, 0);
        let n = FpModule::regular(&alg);
        let m = n.direct_sum(&n);
        let homs = HomSpace::new(&n, &m).unwrap();
        let inst = ArtinianInstance::new(dec, n.clone(), m.clone());
        assert_eq!(
            compute_inj(&inst, &homs.basis, false),
            oracle_inj(&n, &m, &homs.basis, &budget).unwrap()
        );
        assert_eq!(
            compute_cog(&inst, &homs.basis),
            oracle_cog(&n, &m, &homs.basis, &budget).unwrap()
        );
        assert_eq!(
            has_injection(&inst, &homs.basis),
            oracle_has_injection(&n, &m, &homs.basis, &budget).unwrap()
        );
    }
}

#[test]
fn budgets_are_hard_errors() {
    let alg = base_field(5);
    let n = vector_space(&alg, 1);
    let homs = HomSpace::new(&n, &n).unwrap();
    let err = oracle_inj(&n, &n, &homs.basis, &OracleBudget::default()).unwrap_err();
    assert!(matches!(err, OracleError::BudgetExceeded(_)));

    let alg = base_field(2);
    let n = vector_space(&alg, 3);
    let m = vector_space(&alg, 3);
    let homs = HomSpace::new(&n, &m).unwrap();
    // 2^9 span elements exceed a tiny span budget.
    let small = OracleBudget {
        max_span: 16,
        ..OracleBudget::default()
    };
    let err = oracle_inj(&n, &m, &homs.basis, &small).unwrap_err();
    assert!(matches!(err, OracleError::BudgetExceeded(_)));
}

#[test]
fn independent_polynomial_evaluator_rechecks_points() {
    // x*y + 1 over F_3 on a 3x3 grid; the found point must be nonzero
    // under the independent evaluator too, and both evaluators agree on
    // the whole grid.
    let f3 = Field::prime(3).unwrap();
    let values = f3.elements();
    let gp = GridProblem::uniform(f3.clone(), values.clone(), 2).unwrap();
    let poly = crate::genpos::MultiPoly::new(
        0,
        vec![1, 1],
        vec![
            (vec![1, 1], El::Fp(1)),
            (vec![0, 0], El::Fp(1)),
        ],
    )
    .unwrap();
    let point = find_nonvanishing_point(&gp, &[poly.clone()]).unwrap();
    let embedded = gp.embedded(0, &point.indices);
    assert!(!f3.is_zero(&oracle_eval_poly(&poly, &f3, &embedded)));
    for a in 0..3 {
        for b in 0..3 {
            let pt = vec![values[a].clone(), values[b].clone()];
            assert_eq!(poly.eval(&f3, &pt), oracle_eval_poly(&poly, &f3, &pt));
        }
    }
}
