//! Hom spaces between structure-constant modules, socles at the local
//! components, and the injectivity test that checks a map socle-by-socle.

use super::{pow_matrix, AlgebraDecomposition, ArtinianError, FpModule, StructAlgebra};
use crate::field::{El, Matrix};

/// Basis of `Hom_R(N, M)` as matrices over `F_p`, obtained from the linear
/// system expressing commutation with every ring basis action.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub basis: Vec<Matrix>,
}

impl HomSpace {
    pub fn new(n: &FpModule, m: &FpModule) -> Result<HomSpace, ArtinianError> {
        if n.algebra().constants() != m.algebra().constants()
            || n.algebra().p() != m.algebra().p()
        {
            return Err(ArtinianError::MixedAlgebras);
        }
        let f = n.algebra().prime_field();
        let d = n.algebra().dim();
        let (mr, nc) = (m.dim(), n.dim());
        let unknowns = mr * nc;
        // Row per (ring basis element, matrix position) of the relation
        // rho_M(b) H - H rho_N(b) = 0, unknowns H vectorized row-major.
        let mut rows = vec![];
        for i in 0..d {
            let am = m.action(i);
            let an = n.action(i);
            for r in 0..mr {
                for c in 0..nc {
                    let mut row = vec![f.zero(); unknowns];
                    for k in 0..mr {
                        let coef = am.get(r, k).clone();
                        row[k * nc + c] = f.add(&row[k * nc + c], &coef);
                    }
                    for k in 0..nc {
                        let coef = an.get(k, c).clone();
                        row[r * nc + k] = f.sub(&row[r * nc + k], &coef);
                    }
                    rows.push(row);
                }
            }
        }
        let system = if rows.is_empty() {
            Matrix::zero(&f, 0, unknowns)
        } else {
            Matrix::from_rows(&f, rows)
        };
        let kernel = system.right_kernel();
        let basis = (0..kernel.cols())
            .map(|j| {
                let v = kernel.column(j);
                Matrix::from_fn(&f, mr, nc, |r, c| v[r * nc + c].clone())
            })
            .collect();
        Ok(HomSpace {
            domain_dim: nc,
            codomain_dim: mr,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Linear combination of the basis with `F_p` coefficients.
    pub fn element(&self, coeffs: &[u64]) -> Matrix {
        assert_eq!(coeffs.len(), self.basis.len());
        let f = self.basis.first().map(|b| b.field().clone());
        match f {
            None => panic!("empty hom space has no elements to combine"),
            Some(f) => {
                let mut acc = Matrix::zero(&f, self.codomain_dim, self.domain_dim);
                for (b, &c) in self.basis.iter().zip(coeffs) {
                    if c != 0 {
                        acc = acc.add(&b.scale(&El::Fp(c)));
                    }
                }
                acc
            }
        }
    }
}

/// Checks that `h` commutes with the action on both sides.
pub fn is_r_linear(h: &Matrix, n: &FpModule, m: &FpModule) -> bool {
    (0..n.algebra().dim()).all(|i| m.action(i).mul(h) == h.mul(n.action(i)))
}

/// The socle of a module's localization at one component, with its
/// residue-field structure.
///
/// `fp_basis` holds an `F_p`-basis of the socle as columns, grouped per
/// kappa-basis vector: columns `j*f .. (j+1)*f` are `u_j, z u_j, ...,
/// z^(f-1) u_j` where `z` is the component's primitive element and `f` the
/// residue degree. Solving against these columns converts socle vectors to
/// kappa coordinates.
#[derive(Clone, Debug)]
pub struct SocleSite {
    pub component: usize,
    pub kappa: crate::field::Field,
    pub residue_degree: usize,
    /// Dimension over kappa.
    pub dim: usize,
    pub fp_basis: Matrix,
}

impl SocleSite {
    pub fn new(dec: &AlgebraDecomposition, component: usize, module: &FpModule) -> SocleSite {
        let comp = &dec.components[component];
        let f = dec.algebra.prime_field();
        let res_deg = comp.residue_degree;
        let localized = module
            .action_of(&comp.idempotent)
            .column_space_basis();
        let socle = if localized.cols() == 0 {
            Matrix::zero(&f, module.dim(), 0)
        } else if comp.max_ideal.cols() == 0 {
            localized.clone()
        } else {
            let stacked = Matrix::vstack_all(
                &f,
                &(0..comp.max_ideal.cols())
                    .map(|c| {
                        let x = StructAlgebra::col_to_el(&comp.max_ideal.column(c));
                        module.action_of(&x).mul(&localized)
                    })
                    .collect::<Vec<_>>(),
            );
            localized.mul(&stacked.right_kernel()).column_space_basis()
        };
        // Greedy kappa-basis: each new socle vector outside the current
        // span contributes its full orbit under the primitive element.
        let z = module.action_of(&comp.primitive);
        let z_pows: Vec<Matrix> = (0..res_deg).map(|a| pow_matrix(&z, a)).collect();
        let total = socle.cols();
        let mut groups: Vec<Vec<El>> = vec![];
        let mut span = Matrix::zero(&f, module.dim(), 0);
        for c in 0..total {
            let u = socle.column(c);
            let extended = span.hstack(&Matrix::from_columns(&f, module.dim(), vec![u.clone()]));
            if extended.rank() == span.cols() {
                continue;
            }
            for zp in &z_pows {
                groups.push(zp.mul_vec(&u));
            }
            span = span.hstack(&Matrix::from_columns(
                &f,
                module.dim(),
                groups[groups.len() - res_deg..].to_vec(),
            ));
            debug_assert_eq!(span.rank(), span.cols(), "orbit extends independently");
        }
        debug_assert_eq!(span.cols(), total, "socle is a kappa-space");
        let dim = groups.len() / res_deg.max(1);
        SocleSite {
            component,
            kappa: comp.kappa.clone(),
            residue_degree: res_deg,
            dim,
            fp_basis: Matrix::from_columns(&f, module.dim(), groups),
        }
    }

    /// kappa-coordinates of a socle vector given over `F_p`; `None` when the
    /// vector lies outside the socle.
    pub fn residues(&self, v: &[El]) -> Option<Vec<El>> {
        let f = self.fp_basis.field();
        let target = Matrix::from_columns(f, self.fp_basis.rows(), vec![v.to_vec()]);
        let sol = self.fp_basis.solve(&target)?;
        let lambda = sol.column(0);
        Some(
            lambda
                .chunks(self.residue_degree)
                .map(|chunk| El::Ext(chunk.iter().map(as_fp).collect()))
                .collect(),
        )
    }

    /// The `j`-th kappa-basis vector as an `F_p` module vector.
    pub fn kappa_basis_vector(&self, j: usize) -> Vec<El> {
        self.fp_basis.column(j * self.residue_degree)
    }

    /// Flatten kappa coordinates back to an `F_p` socle vector.
    pub fn from_residues(&self, w: &[El]) -> Vec<El> {
        let f = self.fp_basis.field();
        let mut acc = vec![f.zero(); self.fp_basis.rows()];
        for (j, wj) in w.iter().enumerate() {
            let coeffs = match wj {
                El::Ext(cs) => cs.clone(),
                El::Fp(v) => vec![*v],
                _ => panic!("expected finite-field residue"),
            };
            for (a, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let col = self.fp_basis.column(j * self.residue_degree + a);
                for (slot, x) in acc.iter_mut().zip(&col) {
                    *slot = f.add(slot, &f.mul(&El::Fp(c), x));
                }
            }
        }
        acc
    }
}

fn as_fp(e: &El) -> u64 {
    match e {
        El::Fp(v) => *v,
        _ => panic!("expected prime-field entry"),
    }
}

/// kappa-matrix of the map induced by `h` between the socles at a shared
/// component: column `j` is the image of the `j`-th kappa-basis vector of
/// the domain socle in codomain residues.
pub fn socle_eval(h: &Matrix, domain: &SocleSite, codomain: &SocleSite) -> Matrix {
    assert_eq!(domain.component, codomain.component);
    let kappa = &codomain.kappa;
    let cols: Vec<Vec<El>> = (0..domain.dim)
        .map(|j| {
            let img = h.mul_vec(&domain.kappa_basis_vector(j));
            codomain
                .residues(&img)
                .expect("an R-linear map carries socle into socle")
        })
        .collect();
    Matrix::from_columns(kappa, codomain.dim, cols)
}

/// Components at which the module has nonzero localization; these are the
/// associated primes of a nonzero finite module over an Artinian ring.
pub fn associated_primes(dec: &AlgebraDecomposition, module: &FpModule) -> Vec<usize> {
    (0..dec.components.len())
        .filter(|&i| {
            module
                .action_of(&dec.components[i].idempotent)
                .rank()
                > 0
        })
        .collect()
}

/// A failed injectivity check: the component where the socle map drops rank
/// and a nonzero socle vector of the domain killed by the map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityWitness {
    pub component: usize,
    pub vector: Vec<u64>,
}

/// A module map is injective iff it is injective on the socle at every
/// associated prime. Returns `Ok(None)` when injective, `Ok(Some(w))` with
/// a kernel witness otherwise.
pub fn is_injective(
    h: &Matrix,
    dec: &AlgebraDecomposition,
    n: &FpModule,
    m: &FpModule,
) -> Result<Option<InjectivityWitness>, ArtinianError> {
    if !is_r_linear(h, n, m) {
        return Err(ArtinianError::NotRLinear);
    }
    for component in associated_primes(dec, n) {
        let dom = SocleSite::new(dec, component, n);
        if dom.dim == 0 {
            continue;
        }
        let cod = SocleSite::new(dec, component, m);
        let e = socle_eval(h, &dom, &cod);
        if e.rank() < dom.dim {
            let kernel = e.right_kernel();
            debug_assert!(kernel.cols() > 0);
            let w = kernel.column(0);
            let vector = dom
                .from_residues(&w)
                .iter()
                .map(|x| match x {
                    El::Fp(v) => *v,
                    _ => unreachable!(),
                })
                .collect();
            return Ok(Some(InjectivityWitness { component, vector }));
        }
    }
    Ok(None)
}
