//! The finite-dimensional ring universe: commutative algebras over `F_p`
//! given by structure constants, their decomposition into local components
//! via primitive idempotents, modules given by action matrices, and the
//! socle machinery at each maximal ideal.
//!
//! Localization at a maximal ideal is realized as projection onto the
//! corresponding idempotent component, which is exact for Artinian rings.

mod hom;

pub use hom::{
    associated_primes, is_injective, is_r_linear, socle_eval, HomSpace, InjectivityWitness,
    SocleSite,
};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{addm, invm, is_prime, mulm, subm};
use crate::field::{El, Field, Matrix, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArtinianError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("structure constants are not commutative at basis pair ({0}, {1})")]
    NonCommutative(usize, usize),
    #[error("structure constants are not associative at basis triple ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("designated unity does not act as identity on basis element {0}")]
    BadUnity(usize),
    #[error("structure constant table has the wrong shape")]
    BadShape,
    #[error("module action does not send unity to the identity")]
    ActionUnity,
    #[error("module action violates the structure constants at basis pair ({0}, {1})")]
    ActionRelation(usize, usize),
    #[error("modules belong to different algebras")]
    MixedAlgebras,
    #[error("matrix is not an R-linear map")]
    NotRLinear,
    #[error("component index {0} out of range")]
    BadComponent(usize),
    #[error("cannot produce {requested} distinct residues in a field of size {field_size}")]
    InsufficientResidues { requested: usize, field_size: u128 },
}

/// A commutative `F_p`-algebra of dimension `d` given by structure
/// constants `b_i b_j = sum_k c_ijk b_k`, validated for commutativity,
/// associativity, and a working unity at construction.
#[derive(Clone, Debug)]
pub struct StructAlgebra {
    p: u64,
    dim: usize,
    labels: Vec<String>,
    /// Flattened `[i][j][k]`.
    constants: Vec<u64>,
    unity: Vec<u64>,
}

pub type AlgEl = Vec<u64>;

impl StructAlgebra {
    pub fn new(
        p: u64,
        labels: Vec<String>,
        constants: Vec<u64>,
        unity: Vec<u64>,
    ) -> Result<StructAlgebra, ArtinianError> {
        if !is_prime(p) {
            return Err(ArtinianError::NotPrime(p));
        }
        let dim = labels.len();
        if constants.len() != dim * dim * dim || unity.len() != dim {
            return Err(ArtinianError::BadShape);
        }
        let alg = StructAlgebra {
            p,
            dim,
            labels,
            constants: constants.into_iter().map(|c| c % p).collect(),
            unity: unity.into_iter().map(|c| c % p).collect(),
        };
        // Commutativity on the constants themselves.
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if alg.c(i, j, k) != alg.c(j, i, k) {
                        return Err(ArtinianError::NonCommutative(i, j));
                    }
                }
            }
        }
        // Associativity on all basis triples.
        for i in 0..dim {
            let bi = alg.basis_el(i);
            for j in 0..dim {
                let bj = alg.basis_el(j);
                let ij = alg.mul(&bi, &bj);
                for k in 0..dim {
                    let bk = alg.basis_el(k);
                    let left = alg.mul(&ij, &bk);
                    let right = alg.mul(&bi, &alg.mul(&bj, &bk));
                    if left != right {
                        return Err(ArtinianError::NonAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..dim {
            let bi = alg.basis_el(i);
            if alg.mul(&alg.unity, &bi) != bi {
                return Err(ArtinianError::BadUnity(i));
            }
        }
        Ok(alg)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unity(&self) -> &AlgEl {
        &self.unity
    }

    pub fn constants(&self) -> &[u64] {
        &self.constants
    }

    fn c(&self, i: usize, j: usize, k: usize) -> u64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn zero_el(&self) -> AlgEl {
        vec![0; self.dim]
    }

    pub fn basis_el(&self, i: usize) -> AlgEl {
        let mut e = self.zero_el();
        e[i] = 1;
        e
    }

    pub fn add(&self, a: &AlgEl, b: &AlgEl) -> AlgEl {
        a.iter().zip(b).map(|(&x, &y)| addm(x, y, self.p)).collect()
    }

    pub fn sub(&self, a: &AlgEl, b: &AlgEl) -> AlgEl {
        a.iter().zip(b).map(|(&x, &y)| subm(x, y, self.p)).collect()
    }

    pub fn scale(&self, c: u64, a: &AlgEl) -> AlgEl {
        a.iter().map(|&x| mulm(c, x, self.p)).collect()
    }

    pub fn mul(&self, a: &AlgEl, b: &AlgEl) -> AlgEl {
        let mut out = self.zero_el();
        for i in 0..self.dim {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                if b[j] == 0 {
                    continue;
                }
                let coef = mulm(a[i], b[j], self.p);
                for k in 0..self.dim {
                    let c = self.c(i, j, k);
                    if c != 0 {
                        out[k] = addm(out[k], mulm(coef, c, self.p), self.p);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &AlgEl, mut e: u64) -> AlgEl {
        let mut acc = self.unity.clone();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero_el(&self, a: &AlgEl) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn prime_field(&self) -> Field {
        Field::prime(self.p).expect("validated prime")
    }

    fn el_to_col(&self, a: &AlgEl) -> Vec<El> {
        a.iter().map(|&x| El::Fp(x)).collect()
    }

    pub(crate) fn col_to_el(col: &[El]) -> AlgEl {
        col.iter()
            .map(|e| match e {
                El::Fp(v) => *v,
                _ => panic!("expected prime-field entry"),
            })
            .collect()
    }

    /// Matrix of multiplication by `a` acting on the algebra.
    pub fn mult_matrix(&self, a: &AlgEl) -> Matrix {
        let f = self.prime_field();
        let cols: Vec<Vec<El>> = (0..self.dim)
            .map(|j| self.el_to_col(&self.mul(a, &self.basis_el(j))))
            .collect();
        Matrix::from_columns(&f, self.dim, cols)
    }

    /// Basis of the nilradical: the kernel of the `F_p`-linear map
    /// `r -> r^(p^e)` with `p^e >= d`. Frobenius iterates are additive in
    /// characteristic `p` and fix `F_p`, so one linear solve suffices.
    pub fn nilradical(&self) -> Matrix {
        let f = self.prime_field();
        let mut q: u64 = 1;
        while (q as usize) < self.dim.max(1) {
            q = q.saturating_mul(self.p);
        }
        let cols: Vec<Vec<El>> = (0..self.dim)
            .map(|i| self.el_to_col(&self.pow(&self.basis_el(i), q)))
            .collect();
        Matrix::from_columns(&f, self.dim, cols).right_kernel()
    }
}

/// Deterministic quotient of `F_p^d` by a subspace, with projection and a
/// section through complementary coordinates.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Echelonized spanning rows of the subspace.
    echelon: Matrix,
    pivots: Vec<usize>,
    /// Coordinates giving representatives of the quotient basis.
    complement: Vec<usize>,
    ambient_dim: usize,
}

impl Quotient {
    /// `subspace` holds spanning vectors as columns.
    pub fn new(subspace: &Matrix) -> Quotient {
        let ambient_dim = subspace.rows();
        let (echelon, pivots) = subspace.transpose().rref();
        let complement = (0..ambient_dim)
            .filter(|c| !pivots.contains(c))
            .collect();
        Quotient {
            echelon,
            pivots,
            complement,
            ambient_dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Reduce `v` modulo the subspace and read off quotient coordinates.
    pub fn project(&self, v: &[El]) -> Vec<El> {
        let f = self.echelon.field();
        let mut v = v.to_vec();
        for (row, &pc) in self.pivots.iter().enumerate() {
            if f.is_zero(&v[pc]) {
                continue;
            }
            let factor = v[pc].clone();
            for c in 0..self.ambient_dim {
                v[c] = f.sub(&v[c], &f.mul(&factor, self.echelon.get(row, c)));
            }
        }
        self.complement.iter().map(|&c| v[c].clone()).collect()
    }

    /// A representative of the quotient vector with the given coordinates.
    pub fn lift(&self, coords: &[El]) -> Vec<El> {
        let f = self.echelon.field();
        let mut v = vec![f.zero(); self.ambient_dim];
        for (q, &c) in self.complement.iter().enumerate() {
            v[c] = coords[q].clone();
        }
        v
    }
}

/// One local component of a decomposed algebra.
#[derive(Clone, Debug)]
pub struct Component {
    /// Primitive idempotent, as an algebra element.
    pub idempotent: AlgEl,
    /// Columns: an `F_p`-basis of the component `R e`.
    pub basis: Matrix,
    /// Columns: an `F_p`-basis of the component's maximal ideal (its
    /// nilpotent part), in ambient coordinates.
    pub max_ideal: Matrix,
    /// Residue field, presented as `F_p[t]/(irreducible)`.
    pub kappa: Field,
    /// `[kappa : F_p]`.
    pub residue_degree: usize,
    /// Linear projection `R -> kappa` (rows: kappa coordinates over `F_p`).
    pub projection: Matrix,
    /// An algebra element lying in the component whose residue is the
    /// class of `t`.
    pub primitive: AlgEl,
}

#[derive(Clone, Debug)]
pub struct AlgebraDecomposition {
    pub algebra: Arc<StructAlgebra>,
    pub components: Vec<Component>,
}

impl AlgebraDecomposition {
    pub fn residue(&self, component: usize, r: &AlgEl) -> El {
        let comp = &self.components[component];
        let col: Vec<El> = r.iter().map(|&x| El::Fp(x)).collect();
        let coords = comp.projection.mul_vec(&col);
        El::Ext(StructAlgebra::col_to_el(&coords))
    }

    /// Canonical `s(m)` element: the idempotent of component `m` is a unit
    /// there and lies in every other maximal ideal.
    pub fn selector(&self, component: usize) -> AlgEl {
        self.components[component].idempotent.clone()
    }

    /// An element of the component whose residue equals `w`.
    pub fn lift_residue(&self, component: usize, w: &El) -> AlgEl {
        let alg = &self.algebra;
        let comp = &self.components[component];
        let coeffs = match w {
            El::Ext(cs) => cs.clone(),
            El::Fp(v) => vec![*v],
            _ => panic!("residue must be a finite-field element"),
        };
        let mut acc = alg.zero_el();
        let mut zpow = comp.idempotent.clone();
        for &c in &coeffs {
            acc = alg.add(&acc, &alg.scale(c, &zpow));
            zpow = alg.mul(&zpow, &comp.primitive);
        }
        acc
    }

    /// `count` elements vanishing on every component except `designated`
    /// (hence lying in every other maximal ideal) whose residues at
    /// `designated` are pairwise distinct, in canonical residue order.
    pub fn sample_elements(
        &self,
        designated: usize,
        count: usize,
    ) -> Result<Vec<AlgEl>, ArtinianError> {
        let comp = self
            .components
            .get(designated)
            .ok_or(ArtinianError::BadComponent(designated))?;
        let residues = comp.kappa.first_elements(count).ok_or(
            ArtinianError::InsufficientResidues {
                requested: count,
                field_size: comp.kappa.size().unwrap_or(0),
            },
        )?;
        Ok(residues
            .iter()
            .map(|w| self.lift_residue(designated, w))
            .collect())
    }
}

/// Decompose a validated algebra into its local components. Deterministic
/// for a fixed seed; the seed only steers the primitive-element search in
/// residue-field presentation and tie-breaking among splitting candidates.
pub fn decompose(algebra: &Arc<StructAlgebra>, seed: u64) -> AlgebraDecomposition {
    let alg = algebra.clone();
    let f = alg.prime_field();
    let d = alg.dim();
    if d == 0 {
        return AlgebraDecomposition {
            algebra: alg,
            components: vec![],
        };
    }
    let nil = alg.nilradical();
    let quotient = Quotient::new(&nil);
    let qd = quotient.dim();
    let p = alg.p();

    // Multiplication and projection helpers on the semisimple quotient.
    let qmul = |a: &[El], b: &[El]| -> Vec<El> {
        let la = StructAlgebra::col_to_el(&quotient.lift(a));
        let lb = StructAlgebra::col_to_el(&quotient.lift(b));
        let prod = alg.mul(&la, &lb);
        quotient.project(&prod.iter().map(|&x| El::Fp(x)).collect::<Vec<_>>())
    };
    let q_of = |a: &AlgEl| -> Vec<El> {
        quotient.project(&a.iter().map(|&x| El::Fp(x)).collect::<Vec<_>>())
    };
    let q_unity = q_of(alg.unity());

    // Split the semisimple quotient into fields by repeatedly refining
    // idempotents along eigenvalues of Berlekamp-subalgebra elements.
    let mut blocks: Vec<Vec<El>> = vec![q_unity.clone()];
    let mut finished: Vec<Vec<El>> = vec![];
    while let Some(eps) = blocks.pop() {
        // Basis of the block eps * Q.
        let mult_cols: Vec<Vec<El>> = (0..qd)
            .map(|j| {
                let mut ej = vec![f.zero(); qd];
                ej[j] = f.one();
                qmul(&eps, &ej)
            })
            .collect();
        let block_basis = Matrix::from_columns(&f, qd, mult_cols).column_space_basis();
        let bdim = block_basis.cols();
        // Frobenius on the block, in block coordinates.
        let frob_cols: Vec<Vec<El>> = (0..bdim)
            .map(|j| {
                let v = block_basis.column(j);
                // x -> x^p by repeated multiplication in Q.
                let mut acc = v.clone();
                for _ in 1..p {
                    acc = qmul(&acc, &v);
                }
                block_basis.solve(&Matrix::from_columns(&f, qd, vec![acc]))
                    .expect("Frobenius preserves the block")
                    .column(0)
            })
            .collect();
        let frob = Matrix::from_columns(&f, bdim, frob_cols);
        let fixed = frob
            .sub(&Matrix::identity(&f, bdim))
            .right_kernel();
        if fixed.cols() <= 1 {
            finished.push(eps);
            continue;
        }
        // Pick a fixed vector that is not a scalar multiple of the block
        // identity; its minimal polynomial splits into distinct linear
        // factors and yields orthogonal idempotents by interpolation.
        let eps_coords = block_basis
            .solve(&Matrix::from_columns(&f, qd, vec![eps.clone()]))
            .expect("identity lies in its block")
            .column(0);
        let candidate = (0..fixed.cols())
            .map(|c| fixed.column(c))
            .find(|v| {
                let joint =
                    Matrix::from_columns(&f, bdim, vec![eps_coords.clone(), v.clone()]);
                joint.rank() == 2
            })
            .expect("Berlekamp dimension > 1 provides a non-scalar fixed vector");
        let v_ambient = block_basis.mul(&Matrix::from_columns(&f, bdim, vec![candidate]));
        let v = v_ambient.column(0);
        // Minimal polynomial of v inside the block (powers relative to eps).
        let mut powers: Vec<Vec<El>> = vec![eps.clone()];
        let minpoly = loop {
            let last = powers.last().unwrap().clone();
            let next = qmul(&last, &v);
            let span = Matrix::from_columns(&f, qd, powers.clone());
            let target = Matrix::from_columns(&f, qd, vec![next.clone()]);
            if let Some(sol) = span.solve(&target) {
                if span.rank() == powers.len() {
                    // next = sum sol_i v^i, so minpoly = X^k - sum sol_i X^i.
                    let k = powers.len();
                    let mut coeffs = vec![0u64; k + 1];
                    for (i, slot) in coeffs.iter_mut().enumerate().take(k) {
                        *slot = match sol.get(i, 0) {
                            El::Fp(x) => subm(0, *x, p),
                            _ => unreachable!(),
                        };
                    }
                    coeffs[k] = 1;
                    break Poly::new(p, coeffs);
                }
            }
            powers.push(next);
        };
        let roots = minpoly.roots();
        debug_assert!(roots.len() >= 2, "fixed non-scalar element must split");
        for &a in &roots {
            // Interpolation idempotent: prod_{b != a} (v - b*eps) / (a - b).
            let mut idem = eps.clone();
            for &b in &roots {
                if b == a {
                    continue;
                }
                let shifted: Vec<El> = v
                    .iter()
                    .zip(&eps)
                    .map(|(x, e)| f.sub(x, &f.mul(&El::Fp(b), e)))
                    .collect();
                let scale = El::Fp(invm(subm(a, b, p), p));
                let scaled: Vec<El> = shifted.iter().map(|x| f.mul(x, &scale)).collect();
                idem = qmul(&idem, &scaled);
            }
            blocks.push(idem);
        }
    }
    // Canonical component order: by projected coordinate vector.
    finished.sort_by_key(|eps| {
        eps.iter()
            .map(|e| match e {
                El::Fp(v) => *v,
                _ => 0,
            })
            .collect::<Vec<_>>()
    });

    // Lift idempotents through the nilradical, orthogonalizing as we go.
    let mut lifted: Vec<AlgEl> = vec![];
    let count = finished.len();
    for (idx, eps) in finished.iter().enumerate() {
        if idx + 1 == count {
            let mut rest = alg.unity().clone();
            for e in &lifted {
                rest = alg.sub(&rest, e);
            }
            lifted.push(rest);
            break;
        }
        let mut e = StructAlgebra::col_to_el(&quotient.lift(eps));
        // e <- 3e^2 - 2e^3 converges once e^2 = e modulo a nilpotent error.
        for _ in 0..(usize::BITS - d.leading_zeros() + 2) {
            let e2 = alg.mul(&e, &e);
            if e2 == e {
                break;
            }
            let e3 = alg.mul(&e2, &e);
            e = alg.sub(&alg.scale(3 % p, &e2), &alg.scale(2 % p, &e3));
        }
        debug_assert_eq!(alg.mul(&e, &e), e, "idempotent lifting converged");
        // Orthogonalize against the previously lifted idempotents.
        let mut s = alg.unity().clone();
        for prev in &lifted {
            s = alg.sub(&s, prev);
        }
        e = alg.mul(&s, &e);
        debug_assert_eq!(alg.mul(&e, &e), e);
        lifted.push(e);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let components = lifted
        .into_iter()
        .map(|idem| build_component(&alg, &nil, idem, &mut rng))
        .collect();
    AlgebraDecomposition {
        algebra: alg,
        components,
    }
}

fn build_component(
    alg: &Arc<StructAlgebra>,
    nil: &Matrix,
    idem: AlgEl,
    rng: &mut ChaCha8Rng,
) -> Component {
    let f = alg.prime_field();
    let d = alg.dim();
    let p = alg.p();
    let mult = alg.mult_matrix(&idem);
    let basis = mult.column_space_basis();
    // Radical of the component: e * Nil.
    let max_ideal = if nil.cols() == 0 {
        Matrix::zero(&f, d, 0)
    } else {
        mult.mul(nil).column_space_basis()
    };
    let res_deg = basis.cols() - max_ideal.cols();
    // Quotient of the component by its radical, realized inside the
    // ambient quotient A / (Nil*e + complement); project through the
    // subspace spanned by the radical plus everything outside the
    // component.
    // Everything outside the component: (1 - e) A.
    let one_minus_e = alg.sub(alg.unity(), &idem);
    let outside = alg.mult_matrix(&one_minus_e).column_space_basis();
    let killed = if max_ideal.cols() == 0 {
        outside.clone()
    } else if outside.cols() == 0 {
        max_ideal.clone()
    } else {
        max_ideal.hstack(&outside)
    };
    let quotient = Quotient::new(&killed);
    debug_assert_eq!(quotient.dim(), res_deg);

    // Primitive element search: basis elements of the component first, then
    // seeded random combinations, at most 64 candidates.
    let project = |a: &AlgEl| -> Vec<El> {
        quotient.project(&a.iter().map(|&x| El::Fp(x)).collect::<Vec<_>>())
    };
    let mut candidates: Vec<AlgEl> = (0..basis.cols())
        .map(|c| StructAlgebra::col_to_el(&basis.column(c)))
        .collect();
    while candidates.len() < 64 {
        let combo: AlgEl = (0..basis.cols())
            .map(|_| rng.gen_range(0..p))
            .collect();
        let mut el = alg.zero_el();
        for (c, &coef) in combo.iter().enumerate() {
            el = alg.add(
                &el,
                &alg.scale(coef, &StructAlgebra::col_to_el(&basis.column(c))),
            );
        }
        candidates.push(el);
    }
    let mut found = None;
    for cand in candidates {
        // Minimal polynomial of the residue of cand.
        let mut powers: Vec<Vec<El>> = vec![project(&idem)];
        let mut acc = idem.clone();
        for _ in 0..res_deg {
            acc = alg.mul(&acc, &cand);
            powers.push(project(&acc));
        }
        let span = Matrix::from_columns(&f, res_deg, powers[..res_deg].to_vec());
        if span.rank() < res_deg {
            continue;
        }
        let target = Matrix::from_columns(&f, res_deg, vec![powers[res_deg].clone()]);
        let sol = span.solve(&target).expect("power lies in the span");
        let mut coeffs = vec![0u64; res_deg + 1];
        for i in 0..res_deg {
            coeffs[i] = match sol.get(i, 0) {
                El::Fp(x) => subm(0, *x, p),
                _ => unreachable!(),
            };
        }
        coeffs[res_deg] = 1;
        let minpoly = Poly::new(p, coeffs);
        if res_deg == 1 || minpoly.is_irreducible() {
            found = Some((cand, minpoly, span));
            break;
        }
    }
    let (primitive, minpoly, span) =
        found.expect("a primitive element exists for every finite residue field");
    let kappa = Field::extension(p, minpoly).expect("minimal polynomial is irreducible");

    // Projection R -> kappa: residue of e * b_j expressed in the power
    // basis 1, z, ..., z^(res_deg - 1).
    let span_inv_times = |v: &Vec<El>| -> Vec<El> {
        span.solve(&Matrix::from_columns(&f, res_deg, vec![v.clone()]))
            .expect("residue lies in the power-basis span")
            .column(0)
    };
    let mut proj_cols = vec![];
    for j in 0..d {
        let ebj = alg.mul(&idem, &alg.basis_el(j));
        proj_cols.push(span_inv_times(&project(&ebj)));
    }
    let projection = Matrix::from_columns(&f, res_deg, proj_cols);

    // Keep the primitive element inside the component.
    let primitive = alg.mul(&idem, &primitive);

    Component {
        idempotent: idem,
        basis,
        max_ideal,
        kappa,
        residue_degree: res_deg,
        projection,
        primitive,
    }
}

/// A finite-dimensional module over a structure-constant algebra, given by
/// action matrices for the algebra basis.
#[derive(Clone, Debug)]
pub struct FpModule {
    algebra: Arc<StructAlgebra>,
    dim: usize,
    action: Vec<Matrix>,
}

impl FpModule {
    pub fn new(
        algebra: Arc<StructAlgebra>,
        dim: usize,
        action: Vec<Matrix>,
    ) -> Result<FpModule, ArtinianError> {
        let d = algebra.dim();
        if action.len() != d {
            return Err(ArtinianError::BadShape);
        }
        for m in &action {
            if m.rows() != dim || m.cols() != dim {
                return Err(ArtinianError::BadShape);
            }
        }
        let module = FpModule {
            algebra: algebra.clone(),
            dim,
            action,
        };
        let f = algebra.prime_field();
        if module.action_of(algebra.unity()) != Matrix::identity(&f, dim) {
            return Err(ArtinianError::ActionUnity);
        }
        for i in 0..d {
            for j in 0..d {
                let lhs = module.action[i].mul(&module.action[j]);
                let rhs = module.action_of(&algebra.mul(&algebra.basis_el(i), &algebra.basis_el(j)));
                if lhs != rhs {
                    return Err(ArtinianError::ActionRelation(i, j));
                }
            }
        }
        Ok(module)
    }

    /// The regular module: the algebra acting on itself.
    pub fn regular(algebra: &Arc<StructAlgebra>) -> FpModule {
        let action = (0..algebra.dim())
            .map(|i| algebra.mult_matrix(&algebra.basis_el(i)))
            .collect();
        FpModule {
            algebra: algebra.clone(),
            dim: algebra.dim(),
            action,
        }
    }

    pub fn zero(algebra: &Arc<StructAlgebra>) -> FpModule {
        let f = algebra.prime_field();
        FpModule {
            algebra: algebra.clone(),
            dim: 0,
            action: (0..algebra.dim()).map(|_| Matrix::zero(&f, 0, 0)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &FpModule) -> FpModule {
        assert!(Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra.constants() == other.algebra.constants());
        let f = self.algebra.prime_field();
        let dim = self.dim + other.dim;
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                Matrix::from_fn(&f, dim, dim, |r, c| {
                    if r < self.dim && c < self.dim {
                        a.get(r, c).clone()
                    } else if r >= self.dim && c >= self.dim {
                        b.get(r - self.dim, c - self.dim).clone()
                    } else {
                        f.zero()
                    }
                })
            })
            .collect();
        FpModule {
            algebra: self.algebra.clone(),
            dim,
            action,
        }
    }

    pub fn algebra(&self) -> &Arc<StructAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self, i: usize) -> &Matrix {
        &self.action[i]
    }

    pub fn action_of(&self, r: &AlgEl) -> Matrix {
        let f = self.algebra.prime_field();
        let mut acc = Matrix::zero(&f, self.dim, self.dim);
        for (i, &c) in r.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.action[i].scale(&El::Fp(c)));
            }
        }
        acc
    }

    /// Quotient module by an action-invariant subspace (columns of `sub`).
    pub fn quotient(&self, sub: &Matrix) -> Result<(FpModule, Quotient), ArtinianError> {
        let q = Quotient::new(sub);
        let f = self.algebra.prime_field();
        // Invariance check: action maps the subspace into itself.
        for a in &self.action {
            for c in 0..sub.cols() {
                let img = a.mul_vec(&sub.column(c));
                if q.project(&img).iter().any(|e| !f.is_zero(e)) {
                    return Err(ArtinianError::NotRLinear);
                }
            }
        }
        let dim = q.dim();
        let action = self
            .action
            .iter()
            .map(|a| {
                let cols: Vec<Vec<El>> = (0..dim)
                    .map(|j| {
                        let mut coords = vec![f.zero(); dim];
                        coords[j] = f.one();
                        let rep = q.lift(&coords);
                        q.project(&a.mul_vec(&rep))
                    })
                    .collect();
                Matrix::from_columns(&f, dim, cols)
            })
            .collect();
        Ok((
            FpModule {
                algebra: self.algebra.clone(),
                dim,
                action,
            },
            q,
        ))
    }

    /// Submodule spanned by the columns of `incl`, with the restricted
    /// action expressed in the column basis.
    pub fn submodule(&self, incl: &Matrix) -> Result<FpModule, ArtinianError> {
        let f = self.algebra.prime_field();
        let basis = incl.column_space_basis();
        let dim = basis.cols();
        let mut action = vec![];
        for a in &self.action {
            let img_cols: Vec<Vec<El>> = (0..dim).map(|j| a.mul_vec(&basis.column(j))).collect();
            let img = Matrix::from_columns(&f, self.dim, img_cols);
            let coords = basis.solve(&img).ok_or(ArtinianError::NotRLinear)?;
            action.push(coords);
        }
        FpModule::new(self.algebra.clone(), dim, action)
    }
}

pub(crate) fn pow_matrix(m: &Matrix, e: usize) -> Matrix {
    let mut acc = Matrix::identity(m.field(), m.rows());
    for _ in 0..e {
        acc = acc.mul(m);
    }
    acc
}

#[cfg(test)]
mod tests;
