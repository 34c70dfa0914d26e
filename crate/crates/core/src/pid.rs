//! The polynomial-ring universe `F_p[x]`: finitely generated modules given
//! by presentation matrices, normalized through Smith normal form into
//! invariant factors plus free rank. Associated primes here include the
//! zero prime with residue field `F_p(x)`, which is where the non-maximal
//! branch of the synthesis argument gets exercised.

use thiserror::Error;

use crate::field::{invm, is_prime};
use crate::field::{El, Field, Matrix, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PidError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix shape mismatch")]
    Shape,
    #[error("matrix does not define a module map: relations are not preserved")]
    NotAHom,
    #[error("lifting witness does not satisfy its defining equation")]
    BadWitness,
    #[error("the ideal is contained in the prime; no sample has a unit residue")]
    IdealInsidePrime,
    #[error("cannot produce {requested} distinct residues in a field of size {field_size}")]
    InsufficientResidues { requested: usize, field_size: u128 },
}

/// A matrix with entries in `F_p[x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            p,
            rows,
            cols,
            entries: vec![Poly::zero(p); rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, Poly::one(p));
        }
        m
    }

    pub fn from_entries(p: u64, rows: usize, cols: usize, entries: Vec<Poly>) -> PolyMatrix {
        assert_eq!(entries.len(), rows * cols);
        PolyMatrix {
            p,
            rows,
            cols,
            entries,
        }
    }

    /// Rows of integer-coefficient polynomials, coefficients little-endian.
    pub fn from_coeff_rows(p: u64, rows: &[&[&[u64]]]) -> PolyMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|cs| Poly::new(p, cs.to_vec())))
            .collect();
        PolyMatrix::from_entries(p, r, c, entries)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Poly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        PolyMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        PolyMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Poly) -> PolyMatrix {
        PolyMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = PolyMatrix::zero(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).add(&a.mul(b));
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = PolyMatrix::zero(self.p, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = PolyMatrix::zero(self.p, self.rows + other.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
        }
        for r in 0..other.rows {
            for c in 0..self.cols {
                out.set(self.rows + r, c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Poly> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Determinant by Laplace expansion; intended for the small matrices of
    /// change-of-basis checks.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => Poly::one(self.p),
            1 => self.get(0, 0).clone(),
            _ => {
                let mut acc = Poly::zero(self.p);
                for c in 0..n {
                    let e = self.get(0, c);
                    if e.is_zero() {
                        continue;
                    }
                    let minor = self.minor(0, c);
                    let term = e.mul(&minor.det());
                    acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> PolyMatrix {
        let entries = (0..self.rows)
            .filter(|&r| r != skip_r)
            .flat_map(|r| {
                (0..self.cols)
                    .filter(|&c| c != skip_c)
                    .map(move |c| self.get(r, c).clone())
            })
            .collect();
        PolyMatrix::from_entries(self.p, self.rows - 1, self.cols - 1, entries)
    }

    /// True when the determinant is a nonzero constant, i.e. the matrix is
    /// invertible over `F_p[x]`.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.det().degree() == Some(0)
    }

    /// Entrywise image in a field through `f` (e.g. reduction mod an
    /// irreducible, or inclusion into `F_p(x)`).
    pub fn map_to_field(&self, field: &Field) -> Matrix {
        Matrix::from_fn(field, self.rows, self.cols, |r, c| {
            field.from_poly(self.get(r, c))
        })
    }
}

/// `U * P * V = D` with `D` diagonal, diagonal entries monic or zero and
/// forming a divisibility chain. The inverses witness invertibility.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: PolyMatrix,
    pub u_inv: PolyMatrix,
    pub d: PolyMatrix,
    pub v: PolyMatrix,
    pub v_inv: PolyMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<Poly> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

/// Smith normal form over `F_p[x]`. Pivoting picks the nonzero entry of
/// minimal degree (ties: smallest row, then column), which strictly
/// decreases degrees and terminates.
pub fn smith_normal_form(pm: &PolyMatrix) -> Snf {
    let p = pm.p();
    let (rows, cols) = (pm.rows(), pm.cols());
    let mut d = pm.clone();
    let mut u = PolyMatrix::identity(p, rows);
    let mut u_inv = PolyMatrix::identity(p, rows);
    let mut v = PolyMatrix::identity(p, cols);
    let mut v_inv = PolyMatrix::identity(p, cols);

    let swap_rows = |m: &mut PolyMatrix, a: usize, b: usize| {
        for c in 0..m.cols() {
            let x = m.get(a, c).clone();
            let y = m.get(b, c).clone();
            m.set(a, c, y);
            m.set(b, c, x);
        }
    };
    let swap_cols = |m: &mut PolyMatrix, a: usize, b: usize| {
        for r in 0..m.rows() {
            let x = m.get(r, a).clone();
            let y = m.get(r, b).clone();
            m.set(r, a, y);
            m.set(r, b, x);
        }
    };
    // row b += q * row a
    let add_row = |m: &mut PolyMatrix, b: usize, q: &Poly, a: usize| {
        for c in 0..m.cols() {
            let val = m.get(b, c).add(&q.mul(m.get(a, c)));
            m.set(b, c, val);
        }
    };
    // col b += q * col a
    let add_col = |m: &mut PolyMatrix, b: usize, q: &Poly, a: usize| {
        for r in 0..m.rows() {
            let val = m.get(r, b).add(&q.mul(m.get(r, a)));
            m.set(r, b, val);
        }
    };
    let scale_row = |m: &mut PolyMatrix, r: usize, s: u64| {
        for c in 0..m.cols() {
            let val = m.get(r, c).scale(s);
            m.set(r, c, val);
        }
    };
    let scale_col = |m: &mut PolyMatrix, c: usize, s: u64| {
        for r in 0..m.rows() {
            let val = m.get(r, c).scale(s);
            m.set(r, c, val);
        }
    };

    for t in 0..rows.min(cols) {
        'pivot: loop {
            // Minimal-degree nonzero entry in the trailing submatrix.
            let mut best: Option<(usize, usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if let Some(deg) = d.get(r, c).degree() {
                        if best.map_or(true, |(bd, _, _)| deg < bd) {
                            best = Some((deg, r, c));
                        }
                    }
                }
            }
            let Some((_, pr, pc)) = best else { break 'pivot };
            if pr != t {
                swap_rows(&mut d, t, pr);
                swap_rows(&mut u, t, pr);
                swap_cols(&mut u_inv, t, pr);
            }
            if pc != t {
                swap_cols(&mut d, t, pc);
                swap_cols(&mut v, t, pc);
                swap_rows(&mut v_inv, t, pc);
            }
            let pivot = d.get(t, t).clone();
            let mut dirty = false;
            for r in t + 1..rows {
                if d.get(r, t).is_zero() {
                    continue;
                }
                let (q, rem) = d.get(r, t).divmod(&pivot);
                let q = q.neg();
                add_row(&mut d, r, &q, t);
                add_row(&mut u, r, &q, t);
                add_col(&mut u_inv, t, &q.neg(), r);
                if !rem.is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if d.get(t, c).is_zero() {
                    continue;
                }
                let (q, rem) = d.get(t, c).divmod(&pivot);
                let q = q.neg();
                add_col(&mut d, c, &q, t);
                add_col(&mut v, c, &q, t);
                add_row(&mut v_inv, t, &q.neg(), c);
                if !rem.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Fold in any entry the pivot does not divide yet.
            let mut fixed = true;
            'scan: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !d.get(r, c).is_zero() && !pivot.divides(d.get(r, c)) {
                        let one = Poly::one(p);
                        add_row(&mut d, t, &one, r);
                        add_row(&mut u, t, &one, r);
                        add_col(&mut u_inv, r, &one.neg(), t);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if !fixed {
                continue 'pivot;
            }
            // Make the pivot monic.
            let lead = d.get(t, t).leading();
            if lead != 1 && lead != 0 {
                let inv = invm(lead, p);
                scale_row(&mut d, t, inv);
                scale_row(&mut u, t, inv);
                scale_col(&mut u_inv, t, lead);
            }
            break 'pivot;
        }
        if d.get(t, t).is_zero() {
            break;
        }
    }
    debug_assert_eq!(u.mul(pm).mul(&v), d);
    debug_assert!(u.mul(&u_inv) == PolyMatrix::identity(p, rows));
    debug_assert!(v.mul(&v_inv) == PolyMatrix::identity(p, cols));
    Snf {
        u,
        u_inv,
        d,
        v,
        v_inv,
    }
}

/// A prime of `F_p[x]`: either the zero prime with residue field `F_p(x)`
/// or a monic irreducible `f` with residue field `F_p[x]/(f)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PidPrime {
    Irreducible(Poly),
    Zero,
}

impl PidPrime {
    pub fn residue_field(&self, p: u64) -> Field {
        match self {
            PidPrime::Zero => Field::rational_function(p).expect("validated prime"),
            PidPrime::Irreducible(f) => {
                Field::extension(p, f.clone()).expect("monic irreducible modulus")
            }
        }
    }

    /// Residue of a polynomial in the residue field.
    pub fn residue(&self, p: u64, g: &Poly) -> El {
        self.residue_field(p).from_poly(g)
    }
}

/// One summand of the canonical decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand {
    /// `R/(d)` with `d` monic non-unit.
    Torsion(Poly),
    /// A free copy of `R`.
    Free,
}

/// A finitely generated `F_p[x]`-module presented by `R^g / im(P)`, with
/// its Smith normal form and the resulting canonical decomposition.
///
/// "Canonical coordinates" are `U * x` for original coordinates `x`; in
/// them the relations are diagonal, so each coordinate lives in `R/(d_i)`
/// independently and unit `d_i` simply delete their coordinate.
#[derive(Clone, Debug)]
pub struct PidModule {
    p: u64,
    gens: usize,
    presentation: PolyMatrix,
    snf: Snf,
    summands: Vec<Summand>,
    /// Canonical coordinate carried by each summand.
    positions: Vec<usize>,
}

impl PidModule {
    pub fn new(p: u64, presentation: PolyMatrix) -> Result<PidModule, PidError> {
        if !is_prime(p) {
            return Err(PidError::NotPrime(p));
        }
        if presentation.p() != p {
            return Err(PidError::Shape);
        }
        let gens = presentation.rows();
        let snf = smith_normal_form(&presentation);
        let mut summands = vec![];
        let mut positions = vec![];
        let diag = snf.diagonal();
        for (i, d) in diag.iter().enumerate() {
            match d.degree() {
                None => {
                    summands.push(Summand::Free);
                    positions.push(i);
                }
                Some(0) => {} // unit: the generator dies
                Some(_) => {
                    summands.push(Summand::Torsion(d.clone()));
                    positions.push(i);
                }
            }
        }
        for i in diag.len()..gens {
            summands.push(Summand::Free);
            positions.push(i);
        }
        // Torsion first in divisibility order, free after; the diagonal
        // already delivers that order except free slots interleaved.
        let mut order: Vec<usize> = (0..summands.len()).collect();
        order.sort_by_key(|&i| matches!(summands[i], Summand::Free));
        let summands_sorted = order.iter().map(|&i| summands[i].clone()).collect();
        let positions_sorted = order.iter().map(|&i| positions[i]).collect();
        Ok(PidModule {
            p,
            gens,
            presentation,
            snf,
            summands: summands_sorted,
            positions: positions_sorted,
        })
    }

    /// Direct sum of cyclic modules: `R/(f)` per torsion polynomial (must
    /// be non-constant) plus `free` copies of `R`.
    pub fn from_summands(p: u64, torsion: &[Poly], free: usize) -> Result<PidModule, PidError> {
        let g = torsion.len() + free;
        let mut pm = PolyMatrix::zero(p, g, torsion.len());
        for (i, f) in torsion.iter().enumerate() {
            pm.set(i, i, f.clone());
        }
        PidModule::new(p, pm)
    }

    pub fn zero_module(p: u64) -> PidModule {
        PidModule::new(p, PolyMatrix::zero(p, 0, 0)).expect("trivial module")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn presentation(&self) -> &PolyMatrix {
        &self.presentation
    }

    pub fn snf(&self) -> &Snf {
        &self.snf
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn invariant_factors(&self) -> Vec<Poly> {
        self.summands
            .iter()
            .filter_map(|s| match s {
                Summand::Torsion(d) => Some(d.clone()),
                Summand::Free => None,
            })
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.summands
            .iter()
            .filter(|s| matches!(s, Summand::Free))
            .count()
    }

    pub fn is_zero_module(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn direct_sum(&self, other: &PidModule) -> PidModule {
        assert_eq!(self.p, other.p);
        let g = self.gens + other.gens;
        let (r1, r2) = (self.presentation.cols(), other.presentation.cols());
        let mut pm = PolyMatrix::zero(self.p, g, r1 + r2);
        for r in 0..self.gens {
            for c in 0..r1 {
                pm.set(r, c, self.presentation.get(r, c).clone());
            }
        }
        for r in 0..other.gens {
            for c in 0..r2 {
                pm.set(self.gens + r, r1 + c, other.presentation.get(r, c).clone());
            }
        }
        PidModule::new(self.p, pm).expect("block sum of valid presentations")
    }

    /// Is the column vector `b` (in original coordinates) a relation, i.e.
    /// inside the column span of the presentation?
    pub fn contains_in_relations(&self, b: &[Poly]) -> bool {
        let pm = PolyMatrix::from_entries(self.p, self.gens, 1, b.to_vec());
        solve_in_image(self, &pm).is_some()
    }
}

/// Solve `P_N * Y = B` over `F_p[x]` via the stored normal form; `None`
/// when some column of `B` is not in the image.
pub fn solve_in_image(n: &PidModule, b: &PolyMatrix) -> Option<PolyMatrix> {
    assert_eq!(b.rows(), n.gens());
    let p = n.p();
    let snf = n.snf();
    let rels = n.presentation().cols();
    let c = snf.u.mul(b);
    let diag = snf.diagonal();
    let mut z = PolyMatrix::zero(p, rels, b.cols());
    for r in 0..n.gens() {
        for col in 0..b.cols() {
            let rhs = c.get(r, col);
            if r < diag.len() && !diag[r].is_zero() {
                if !diag[r].divides(rhs) {
                    return None;
                }
                z.set(r, col, rhs.div_exact(&diag[r]));
            } else if !rhs.is_zero() {
                return None;
            }
        }
    }
    Some(snf.v.mul(&z))
}

/// An `R`-linear map between presented modules: a matrix on generators
/// together with the witness `H * P_N = P_M * Y` showing relations map to
/// relations.
#[derive(Clone, Debug)]
pub struct PidHom {
    pub matrix: PolyMatrix,
    pub witness: PolyMatrix,
}

impl PidHom {
    pub fn new(matrix: PolyMatrix, n: &PidModule, m: &PidModule) -> Result<PidHom, PidError> {
        if matrix.rows() != m.gens() || matrix.cols() != n.gens() {
            return Err(PidError::Shape);
        }
        let rhs = matrix.mul(n.presentation());
        let witness = solve_in_image(m, &rhs).ok_or(PidError::NotAHom)?;
        Ok(PidHom { matrix, witness })
    }

    pub fn validate(&self, n: &PidModule, m: &PidModule) -> Result<(), PidError> {
        let lhs = self.matrix.mul(n.presentation());
        let rhs = m.presentation().mul(&self.witness);
        if lhs == rhs {
            Ok(())
        } else {
            Err(PidError::BadWitness)
        }
    }

    pub fn add(&self, other: &PidHom) -> PidHom {
        PidHom {
            matrix: self.matrix.add(&other.matrix),
            witness: self.witness.add(&other.witness),
        }
    }

    pub fn scale(&self, s: &Poly) -> PidHom {
        PidHom {
            matrix: self.matrix.scale(s),
            witness: self.witness.scale(s),
        }
    }

    pub fn zero(n: &PidModule, m: &PidModule) -> PidHom {
        PidHom {
            matrix: PolyMatrix::zero(m.p(), m.gens(), n.gens()),
            witness: PolyMatrix::zero(m.p(), m.presentation().cols(), n.presentation().cols()),
        }
    }
}

/// Associated primes: the irreducible divisors of the invariant factors,
/// plus the zero prime exactly when the free rank is positive. Maximal
/// primes first, sorted by (degree, coefficients).
pub fn pid_associated_primes(n: &PidModule) -> Vec<PidPrime> {
    let mut irreducibles: Vec<Poly> = vec![];
    for d in n.invariant_factors() {
        for (f, _) in d.factor() {
            if !irreducibles.contains(&f) {
                irreducibles.push(f);
            }
        }
    }
    irreducibles.sort_by_key(|f| {
        let d = f.deg_or_zero();
        (d, (0..=d).map(|i| f.coeff(i)).collect::<Vec<_>>())
    });
    let mut out: Vec<PidPrime> = irreducibles.into_iter().map(PidPrime::Irreducible).collect();
    if n.free_rank() > 0 {
        out.push(PidPrime::Zero);
    }
    out
}

/// kappa-dimension of the socle of the localization at `q`.
pub fn pid_socle_dim(n: &PidModule, q: &PidPrime) -> usize {
    match q {
        PidPrime::Zero => n.free_rank(),
        PidPrime::Irreducible(f) => n
            .invariant_factors()
            .iter()
            .filter(|d| f.divides(d))
            .count(),
    }
}

/// The hom on canonical summands: entry `(l, j)` is the polynomial through
/// which summand `j` of `N` maps into summand `l` of `M` (well-defined
/// modulo the target's invariant factor).
fn canonical_matrix(h: &PidHom, n: &PidModule, m: &PidModule) -> PolyMatrix {
    let transported = m.snf().u.mul(&h.matrix).mul(&n.snf().u_inv);
    let mut out = PolyMatrix::zero(n.p(), m.summands().len(), n.summands().len());
    for (l, &pm_pos) in m.positions.iter().enumerate() {
        for (j, &pn_pos) in n.positions.iter().enumerate() {
            let mut e = transported.get(pm_pos, pn_pos).clone();
            if let Summand::Torsion(b) = &m.summands()[l] {
                e = e.rem(b);
            }
            out.set(l, j, e);
        }
    }
    out
}

/// The kappa-matrix induced by `h` between the socles of the localizations
/// at `q`. Rows index the socle summands of `M`, columns those of `N`.
pub fn pid_socle_eval(h: &PidHom, n: &PidModule, m: &PidModule, q: &PidPrime) -> Matrix {
    let p = n.p();
    let kappa = q.residue_field(p);
    let hc = canonical_matrix(h, n, m);
    match q {
        PidPrime::Zero => {
            // Free-to-free block, viewed inside F_p(x).
            let dom: Vec<usize> = free_indices(n);
            let cod: Vec<usize> = free_indices(m);
            Matrix::from_fn(&kappa, cod.len(), dom.len(), |r, c| {
                kappa.from_poly(hc.get(cod[r], dom[c]))
            })
        }
        PidPrime::Irreducible(f) => {
            let dom: Vec<(usize, usize)> = torsion_divisible(n, f);
            let cod: Vec<(usize, usize)> = torsion_divisible(m, f);
            // Socle basis of R/(d) localized at f with mult(f, d) = k: the
            // class of f^(k-1) in the local factor R/(f^k). The image of
            // that class under multiplication by h is h*f^(k-1); reducing
            // into the target factor R/(f^m) and dividing by f^(m-1)
            // leaves the kappa-coordinate.
            Matrix::from_fn(&kappa, cod.len(), dom.len(), |r, c| {
                let (l, mult_m) = cod[r];
                let (j, mult_n) = dom[c];
                let t = hc.get(l, j).mul(&f.pow(mult_n as u32 - 1));
                let reduced = t.rem(&f.pow(mult_m as u32));
                if reduced.is_zero() {
                    kappa.zero()
                } else {
                    debug_assert!(
                        f.pow(mult_m as u32 - 1).divides(&reduced),
                        "socle maps into socle for a valid hom"
                    );
                    kappa.from_poly(&reduced.div_exact(&f.pow(mult_m as u32 - 1)))
                }
            })
        }
    }
}

fn free_indices(n: &PidModule) -> Vec<usize> {
    n.summands()
        .iter()
        .enumerate()
        .filter_map(|(i, s)| matches!(s, Summand::Free).then_some(i))
        .collect()
}

/// Indices (and `f`-multiplicities) of torsion summands divisible by `f`.
fn torsion_divisible(n: &PidModule, f: &Poly) -> Vec<(usize, usize)> {
    n.summands()
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            Summand::Torsion(d) => {
                let mut mult = 0usize;
                let mut rest = d.clone();
                while f.divides(&rest) {
                    rest = rest.div_exact(f);
                    mult += 1;
                }
                (mult > 0).then_some((i, mult))
            }
            Summand::Free => None,
        })
        .collect()
}

/// Standard generators of `Hom_R(N, M)` as an `R`-module, built on the
/// canonical decompositions and transported back to the original
/// generators: `Hom(R/(a), R/(b))` is generated by multiplication by
/// `b/gcd(a,b)`, maps out of a free summand by `1`, and there are no
/// nonzero maps from torsion to free.
pub fn pid_hom_generators(n: &PidModule, m: &PidModule) -> Vec<PidHom> {
    let p = n.p();
    let mut out = vec![];
    for (l, sm) in m.summands().iter().enumerate() {
        for (j, sn) in n.summands().iter().enumerate() {
            let gen = match (sn, sm) {
                (Summand::Torsion(a), Summand::Torsion(b)) => Some(b.div_exact(&a.gcd(b))),
                (Summand::Free, _) => Some(Poly::one(p)),
                (Summand::Torsion(_), Summand::Free) => None,
            };
            let Some(g) = gen else { continue };
            let mut hc = PolyMatrix::zero(p, m.gens(), n.gens());
            hc.set(m.positions[l], n.positions[j], g);
            let matrix = m.snf().u_inv.mul(&hc).mul(&n.snf().u);
            out.push(PidHom::new(matrix, n, m).expect("standard generator is a hom"));
        }
    }
    out
}

/// Decide whether `h` lies in the `R`-span of the standard generators; on
/// the canonical decomposition this is entrywise divisibility by the
/// generator polynomial modulo the target invariant factor.
pub fn pid_hom_in_span(h: &PidHom, n: &PidModule, m: &PidModule) -> bool {
    let hc = canonical_matrix(h, n, m);
    for (l, sm) in m.summands().iter().enumerate() {
        for (j, sn) in n.summands().iter().enumerate() {
            let e = hc.get(l, j);
            match (sn, sm) {
                (Summand::Torsion(a), Summand::Torsion(b)) => {
                    let g = b.div_exact(&a.gcd(b));
                    if !g.divides(&e.rem(b)) {
                        return false;
                    }
                }
                (Summand::Torsion(_), Summand::Free) => {
                    if !e.is_zero() {
                        return false;
                    }
                }
                (Summand::Free, _) => {}
            }
        }
    }
    true
}

/// A failed injectivity check in this universe.
#[derive(Clone, Debug)]
pub struct PidWitness {
    pub prime: PidPrime,
    /// Kernel vector of the socle map, in kappa-coordinates of the domain
    /// socle basis.
    pub vector: Vec<El>,
}

/// Injectivity through the socle criterion, cross-checked against an
/// independent kernel computation on presentations: the kernel of `h` is
/// generated by the generator-parts of the syzygies of `[H | P_M]`, and
/// `h` is injective iff all of those lie in the relations of `N`.
pub fn pid_is_injective(
    h: &PidHom,
    n: &PidModule,
    m: &PidModule,
) -> Result<Option<PidWitness>, PidError> {
    h.validate(n, m)?;
    let socle_verdict = socle_path(h, n, m);
    let kernel_verdict = kernel_path(h, n, m);
    assert_eq!(
        socle_verdict.is_none(),
        kernel_verdict,
        "socle criterion and kernel computation must agree"
    );
    Ok(socle_verdict)
}

fn socle_path(h: &PidHom, n: &PidModule, m: &PidModule) -> Option<PidWitness> {
    for q in pid_associated_primes(n) {
        let dom_dim = pid_socle_dim(n, &q);
        if dom_dim == 0 {
            continue;
        }
        let e = pid_socle_eval(h, n, m, &q);
        if e.rank() < dom_dim {
            let kernel = e.right_kernel();
            return Some(PidWitness {
                prime: q,
                vector: kernel.column(0),
            });
        }
    }
    None
}

fn kernel_path(h: &PidHom, n: &PidModule, m: &PidModule) -> bool {
    // Syzygies of [H | P_M]: columns of V paired with zero columns of D.
    let stacked = h.matrix.hstack(m.presentation());
    let snf = smith_normal_form(&stacked);
    let diag = snf.diagonal();
    for c in 0..stacked.cols() {
        let col_dead = c >= diag.len() || diag[c].is_zero();
        if !col_dead {
            continue;
        }
        let col = snf.v.column(c);
        let x_part: Vec<Poly> = col[..n.gens()].to_vec();
        if !n.contains_in_relations(&x_part) {
            return false;
        }
    }
    true
}

/// The submodule of `ambient` generated by the columns of `incl`
/// (expressed on the ambient generators), presented on those columns: its
/// relations are the syzygies of `[incl | P_ambient]` restricted to the
/// generator block.
pub fn pid_submodule_presentation(ambient: &PidModule, incl: &PolyMatrix) -> PidModule {
    assert_eq!(incl.rows(), ambient.gens());
    let p = ambient.p();
    let g = incl.cols();
    let stacked = incl.hstack(ambient.presentation());
    let snf = smith_normal_form(&stacked);
    let diag = snf.diagonal();
    let mut rel_cols: Vec<Vec<Poly>> = vec![];
    for c in 0..stacked.cols() {
        if c < diag.len() && !diag[c].is_zero() {
            continue;
        }
        let col = snf.v.column(c);
        rel_cols.push(col[..g].to_vec());
    }
    let mut pm = PolyMatrix::zero(p, g, rel_cols.len());
    for (c, col) in rel_cols.iter().enumerate() {
        for (r, e) in col.iter().enumerate() {
            pm.set(r, c, e.clone());
        }
    }
    PidModule::new(p, pm).expect("syzygy presentation is well formed")
}

/// The quotient of `ambient` by the submodule generated by the columns of
/// `sub_gens`: same generators, extra relations.
pub fn pid_quotient_presentation(ambient: &PidModule, sub_gens: &PolyMatrix) -> PidModule {
    assert_eq!(sub_gens.rows(), ambient.gens());
    PidModule::new(ambient.p(), ambient.presentation().hstack(sub_gens))
        .expect("quotient presentation is well formed")
}

/// `count` elements of the principal ideal `J = (j_gen)` with pairwise
/// distinct residues in the residue field at `q`, in canonical residue
/// order. Fails when `J` is contained in `q` or when the residue field is
/// too small.
pub fn pid_sample_with_residues(
    p: u64,
    j_gen: &Poly,
    q: &PidPrime,
    count: usize,
) -> Result<Vec<Poly>, PidError> {
    let contained = match q {
        PidPrime::Zero => j_gen.is_zero(),
        PidPrime::Irreducible(f) => j_gen.is_zero() || f.divides(j_gen),
    };
    if contained {
        return Err(PidError::IdealInsidePrime);
    }
    match q {
        PidPrime::Zero => {
            // Distinct polynomials stay distinct in F_p(x).
            Ok((0..count)
                .map(|i| j_gen.mul(&Poly::monomial(p, 1, i)))
                .collect())
        }
        PidPrime::Irreducible(f) => {
            let kappa = q.residue_field(p);
            let residues =
                kappa
                    .first_elements(count)
                    .ok_or(PidError::InsufficientResidues {
                        requested: count,
                        field_size: kappa.size().unwrap_or(0),
                    })?;
            // j_gen is a unit mod f, so j_gen * u sweeps all residues as u
            // does; to hit the chosen residues exactly, multiply by
            // j_gen^{-1} mod f first.
            let (g, inv, _) = j_gen.rem(f).extended_gcd(f);
            debug_assert!(g.is_one());
            Ok(residues
                .iter()
                .map(|r| {
                    let rp = match r {
                        El::Ext(cs) => Poly::new(p, cs.clone()),
                        El::Fp(v) => Poly::constant(p, *v),
                        _ => unreachable!(),
                    };
                    j_gen.mul(&inv.mul(&rp).rem(f))
                })
                .collect())
        }
    }
}
