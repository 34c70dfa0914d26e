use super::*;
use crate::field::{El, Matrix};

fn constants_from(
    p: u64,
    dim: usize,
    rule: impl Fn(usize, usize) -> Vec<u64>,
) -> Vec<u64> {
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

/// `F_2 x F_2` with basis the two coordinate idempotents.
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
    Arc::new(
        StructAlgebra::new(2, vec!["e1".into(), "e2".into()], c, vec![1, 1]).unwrap(),
    )
}

/// `F_p[x]/(x^2)` with basis `1, x`.
fn dual_numbers(p: u64) -> Arc<StructAlgebra> {
    let c = constants_from(p, 2, |i, j| match i + j {
        0 => vec![1, 0],
        1 => vec![0, 1],
        _ => vec![0, 0],
    });
    Arc::new(StructAlgebra::new(p, vec!["1".into(), "x".into()], c, vec![1, 0]).unwrap())
}

/// `F_3[x]/(x^2 - 1)`: splits into two copies of `F_3`.
fn split_quadratic() -> Arc<StructAlgebra> {
    let c = constants_from(3, 2, |i, j| match i + j {
        0 => vec![1, 0],
        1 => vec![0, 1],
        _ => vec![1, 0],
    });
    Arc::new(StructAlgebra::new(3, vec!["1".into(), "x".into()], c, vec![1, 0]).unwrap())
}

/// `F_2[t]/(t^2 + t + 1)`: the field with four elements.
fn field_four() -> Arc<StructAlgebra> {
    let c = constants_from(2, 2, |i, j| match i + j {
        0 => vec![1, 0],
        1 => vec![0, 1],
        _ => vec![1, 1],
    });
    Arc::new(StructAlgebra::new(2, vec!["1".into(), "t".into()], c, vec![1, 0]).unwrap())
}

#[test]
fn validation_rejects_bad_tables() {
    // Basis 1, a, b with a*a = b, a*b = 1, b*b = 0 is commutative but not
    // associative: (a*b)*b = b while a*(b*b) = 0.
    let labels = vec!["1".to_string(), "a".to_string(), "b".to_string()];
    let bad = constants_from(2, 3, |i, j| match (i.min(j), i.max(j)) {
        (0, k) => {
            let mut v = vec![0, 0, 0];
            v[k] = 1;
            v
        }
        (1, 1) => vec![0, 0, 1],
        (1, 2) => vec![1, 0, 0],
        _ => vec![0, 0, 0],
    });
    let err = StructAlgebra::new(2, labels, bad, vec![1, 0, 0]);
    assert!(matches!(err, Err(ArtinianError::NonAssociative(..))));

    // Swapping c_ijk for one ordered pair only breaks commutativity.
    let mut c = constants_from(2, 2, |i, j| match i + j {
        0 => vec![1, 0],
        1 => vec![0, 1],
        _ => vec![0, 0],
    });
    c[(0 * 2 + 1) * 2 + 0] = 1; // b0*b1 gains a term b1*b0 lacks
    let err = StructAlgebra::new(2, vec!["1".into(), "x".into()], c.clone(), vec![1, 0]);
    assert!(matches!(err, Err(ArtinianError::NonCommutative(..))));
    c[(0 * 2 + 1) * 2 + 0] = 0;

    let err = StructAlgebra::new(2, vec!["1".into(), "x".into()], c, vec![0, 1]);
    assert!(matches!(err, Err(ArtinianError::BadUnity(_))));

    let err = StructAlgebra::new(4, vec!["a".into()], vec![1], vec![1]);
    assert_eq!(err.unwrap_err(), ArtinianError::NotPrime(4));
}

#[test]
fn nilradical_dimensions() {
    assert_eq!(product_ring().nilradical().cols(), 0);
    assert_eq!(dual_numbers(2).nilradical().cols(), 1);
    assert_eq!(split_quadratic().nilradical().cols(), 0);
    assert_eq!(field_four().nilradical().cols(), 0);
    // The nilradical of F_2[x]/(x^2) is spanned by x.
    let nil = dual_numbers(2).nilradical();
    assert_eq!(StructAlgebra::col_to_el(&nil.column(0)), vec![0, 1]);
}

#[test]
fn decompose_product_ring() {
    let alg = product_ring();
    let dec = decompose(&alg, 7);
    assert_eq!(dec.components.len(), 2);
    let mut sum = alg.zero_el();
    for (i, c) in dec.components.iter().enumerate() {
        assert_eq!(c.residue_degree, 1);
        assert_eq!(alg.mul(&c.idempotent, &c.idempotent), c.idempotent);
        assert_eq!(c.max_ideal.cols(), 0);
        sum = alg.add(&sum, &c.idempotent);
        for other in &dec.components[i + 1..] {
            assert!(alg.is_zero_el(&alg.mul(&c.idempotent, &other.idempotent)));
        }
    }
    assert_eq!(sum, *alg.unity());
    // The selectors are exactly the coordinate idempotents.
    let mut sels = vec![dec.selector(0), dec.selector(1)];
    sels.sort();
    assert_eq!(sels, vec![vec![0, 1], vec![1, 0]]);
}

#[test]
fn decompose_local_ring() {
    let alg = dual_numbers(2);
    let dec = decompose(&alg, 0);
    assert_eq!(dec.components.len(), 1);
    let c = &dec.components[0];
    assert_eq!(c.idempotent, *alg.unity());
    assert_eq!(c.residue_degree, 1);
    assert_eq!(c.max_ideal.cols(), 1);
    // Residue map kills x and fixes 1.
    assert!(dec.algebra.prime_field().is_zero(&dec.residue(0, &vec![0, 1])));
    assert_eq!(dec.residue(0, &vec![1, 1]), El::Ext(vec![1]));
}

#[test]
fn decompose_split_quadratic() {
    let alg = split_quadratic();
    let dec = decompose(&alg, 3);
    assert_eq!(dec.components.len(), 2);
    for c in &dec.components {
        assert_eq!(c.residue_degree, 1);
        assert_eq!(c.max_ideal.cols(), 0);
        assert_eq!(alg.mul(&c.idempotent, &c.idempotent), c.idempotent);
    }
    let sum = alg.add(
        &dec.components[0].idempotent,
        &dec.components[1].idempotent,
    );
    assert_eq!(sum, *alg.unity());
    // x maps to opposite residues at the two components.
    let r0 = dec.residue(0, &vec![0, 1]);
    let r1 = dec.residue(1, &vec![0, 1]);
    assert_ne!(r0, r1);
    let f = &dec.components[0].kappa;
    assert!(f.is_zero(&f.add(&r0, &r1)));
}

#[test]
fn decompose_extension_field() {
    let alg = field_four();
    let dec = decompose(&alg, 11);
    assert_eq!(dec.components.len(), 1);
    let c = &dec.components[0];
    assert_eq!(c.residue_degree, 2);
    assert_eq!(c.kappa.size(), Some(4));
    assert_eq!(c.max_ideal.cols(), 0);
    // The residue map is an isomorphism here: it is injective on the basis.
    let r1 = dec.residue(0, &vec![1, 0]);
    let rt = dec.residue(0, &vec![0, 1]);
    assert_ne!(r1, rt);
    assert!(!c.kappa.is_zero(&rt));
    // Residues multiply like the algebra: residue(t)^2 = residue(t^2).
    let t2 = alg.mul(&vec![0, 1], &vec![0, 1]);
    assert_eq!(c.kappa.mul(&rt, &rt), dec.residue(0, &t2));
}

#[test]
fn decompose_is_seed_deterministic() {
    let alg = split_quadratic();
    let a = decompose(&alg, 5);
    let b = decompose(&alg, 5);
    for (x, y) in a.components.iter().zip(&b.components) {
        assert_eq!(x.idempotent, y.idempotent);
        assert_eq!(x.primitive, y.primitive);
        assert_eq!(x.projection, y.projection);
    }
    // Different seeds still agree on the structural data.
    let c = decompose(&alg, 6);
    assert_eq!(a.components.len(), c.components.len());
    for (x, y) in a.components.iter().zip(&c.components) {
        assert_eq!(x.idempotent, y.idempotent);
        assert_eq!(x.residue_degree, y.residue_degree);
    }
}

#[test]
fn sample_elements_distinct_residues() {
    // One prime with kappa = F_3: two distinct residues exist.
    let alg = dual_numbers(3);
    let dec = decompose(&alg, 0);
    let samples = dec.sample_elements(0, 2).unwrap();
    assert_eq!(samples.len(), 2);
    let r0 = dec.residue(0, &samples[0]);
    let r1 = dec.residue(0, &samples[1]);
    assert_ne!(r0, r1);
    // Requesting more residues than the field holds is infeasible.
    let err = dec.sample_elements(0, 4).unwrap_err();
    assert_eq!(
        err,
        ArtinianError::InsufficientResidues {
            requested: 4,
            field_size: 3
        }
    );
    // kappa = F_2 at each prime of the product ring: three is too many.
    let dec = decompose(&product_ring(), 0);
    assert!(dec.sample_elements(0, 3).is_err());
    // Samples at one prime vanish at the other.
    let samples = dec.sample_elements(0, 2).unwrap();
    for s in &samples {
        assert!(dec.algebra.prime_field().is_zero(&dec.residue(1, s)));
    }
}

#[test]
fn module_validation() {
    let alg = dual_numbers(2);
    let reg = FpModule::regular(&alg);
    assert_eq!(reg.dim(), 2);
    // Rebuilding through the validating constructor succeeds.
    let action: Vec<Matrix> = (0..2).map(|i| reg.action(i).clone()).collect();
    assert!(FpModule::new(alg.clone(), 2, action).is_ok());
    // An action that ignores the relations is rejected.
    let f = alg.prime_field();
    let bad = vec![Matrix::identity(&f, 1), Matrix::identity(&f, 1)];
    let err = FpModule::new(alg.clone(), 1, bad).unwrap_err();
    assert!(matches!(err, ArtinianError::ActionRelation(..)));
}

#[test]
fn quotient_and_submodule() {
    let alg = dual_numbers(2);
    let reg = FpModule::regular(&alg);
    let f = alg.prime_field();
    // Quotient by the ideal (x): the residue field as a module.
    let xspan = Matrix::from_columns(&f, 2, vec![vec![El::Fp(0), El::Fp(1)]]);
    let (q, _) = reg.quotient(&xspan).unwrap();
    assert_eq!(q.dim(), 1);
    // x acts as zero on the quotient.
    assert!(q.action(1).is_zero());
    // The span of 1 is not invariant: x * 1 = x falls outside.
    let onespan = Matrix::from_columns(&f, 2, vec![vec![El::Fp(1), El::Fp(0)]]);
    assert!(reg.quotient(&onespan).is_err());
    // (x) as a submodule is one-dimensional with trivial x-action.
    let sub = reg.submodule(&xspan).unwrap();
    assert_eq!(sub.dim(), 1);
    assert!(sub.action(1).is_zero());
}

#[test]
fn hom_space_dimensions() {
    let alg = dual_numbers(2);
    let reg = FpModule::regular(&alg);
    // Hom(R, R) = R as an F_2-space.
    let hh = HomSpace::new(&reg, &reg).unwrap();
    assert_eq!(hh.dim(), 2);
    // Hom(R/(x), R) = socle of R: one-dimensional.
    let f = alg.prime_field();
    let xspan = Matrix::from_columns(&f, 2, vec![vec![El::Fp(0), El::Fp(1)]]);
    let (residue_mod, _) = reg.quotient(&xspan).unwrap();
    let hr = HomSpace::new(&residue_mod, &reg).unwrap();
    assert_eq!(hr.dim(), 1);
    // Every basis map is R-linear.
    for h in &hr.basis {
        assert!(is_r_linear(h, &residue_mod, &reg));
    }
    // Its image is the socle span {x}.
    let img = hr.element(&[1]);
    assert_eq!(img.column(0), vec![El::Fp(0), El::Fp(1)]);
}

#[test]
fn socle_sites() {
    // Soc of R = F_2[x]/(x^2) over itself: the span of x, kappa-dim 1.
    let alg = dual_numbers(2);
    let dec = decompose(&alg, 0);
    let reg = FpModule::regular(&alg);
    let site = SocleSite::new(&dec, 0, &reg);
    assert_eq!(site.dim, 1);
    assert_eq!(site.residue_degree, 1);
    assert_eq!(site.kappa_basis_vector(0), vec![El::Fp(0), El::Fp(1)]);

    // Soc of F_4 over itself: the whole field, kappa-dim 1 with f = 2.
    let alg = field_four();
    let dec = decompose(&alg, 0);
    let reg = FpModule::regular(&alg);
    let site = SocleSite::new(&dec, 0, &reg);
    assert_eq!(site.dim, 1);
    assert_eq!(site.residue_degree, 2);
    assert_eq!(site.fp_basis.cols(), 2);
    // Residue coordinates round-trip through the socle basis.
    let w = vec![El::Ext(vec![1, 1])];
    let v = site.from_residues(&w);
    assert_eq!(site.residues(&v), Some(w));

    // The direct sum R + R has kappa-dim 2 socle.
    let two = reg.direct_sum(&reg);
    let site2 = SocleSite::new(&dec, 0, &two);
    assert_eq!(site2.dim, 2);
}

#[test]
fn associated_primes_of_modules() {
    let alg = product_ring();
    let dec = decompose(&alg, 0);
    let reg = FpModule::regular(&alg);
    assert_eq!(associated_primes(&dec, &reg), vec![0, 1]);
    // The summand R*e has a single associated prime.
    let f = alg.prime_field();
    let e = dec.selector(0);
    let cols = vec![e.iter().map(|&x| El::Fp(x)).collect()];
    let span = Matrix::from_columns(&f, 2, cols);
    let sub = reg.submodule(&span).unwrap();
    assert_eq!(associated_primes(&dec, &sub).len(), 1);
    assert!(associated_primes(&dec, &FpModule::zero(&alg)).is_empty());
}

#[test]
fn injectivity_by_socle() {
    let alg = dual_numbers(2);
    let dec = decompose(&alg, 0);
    let reg = FpModule::regular(&alg);
    let f = alg.prime_field();
    // The identity is injective.
    let id = Matrix::identity(&f, 2);
    assert_eq!(is_injective(&id, &dec, &reg, &reg).unwrap(), None);
    // Multiplication by x kills the socle.
    let mul_x = alg.mult_matrix(&alg.basis_el(1));
    let w = is_injective(&mul_x, &dec, &reg, &reg).unwrap().unwrap();
    assert_eq!(w.component, 0);
    assert_eq!(w.vector, vec![0, 1]);
    // A non-R-linear matrix is rejected outright.
    let swap = Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]);
    assert_eq!(
        is_injective(&swap, &dec, &reg, &reg).unwrap_err(),
        ArtinianError::NotRLinear
    );
}

#[test]
fn injectivity_checks_every_prime() {
    // Over F_2 x F_2 the projection onto one factor is injective on one
    // socle and zero on the other.
    let alg = product_ring();
    let dec = decompose(&alg, 0);
    let reg = FpModule::regular(&alg);
    let proj = alg.mult_matrix(&dec.selector(0));
    let w = is_injective(&proj, &dec, &reg, &reg).unwrap().unwrap();
    assert_eq!(w.component, 1);
}
