//! Submodule avoidance: given submodules `A <= C` and `B <= D` and maps
//! `G` generating a Hom-submodule of `Hom(C, D)`, build maps in the span
//! of `G` whose preimage of `B` meets `A` (for a stacked column) or a
//! direct power of `A` (for a side-by-side row) only in zero. This is the
//! synthesis engine applied to the induced maps `A -> D/B`, with each
//! synthesized map carried alongside its lift back in `Hom(C, D)`.

use super::*;
use crate::artinian::ArtinianError;
use crate::pid::{
    pid_is_injective, pid_quotient_presentation, pid_submodule_presentation, PidError, PolyMatrix,
};

#[derive(Debug, Error)]
pub enum AvoidError {
    #[error(transparent)]
    Structure(#[from] ArtinianError),
    #[error(transparent)]
    Pid(#[from] PidError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

/// Output of an avoidance run. `lifts[i]` lives in the span of the
/// supplied generators of `Hom(C, D)` and `induced[i]` is the map
/// `A -> D/B` it induces; the certificates and trace come from the
/// underlying synthesis over the induced maps.
#[derive(Clone, Debug)]
pub struct AvoidOutcome<H> {
    pub lifts: Vec<H>,
    pub induced: Vec<H>,
    pub certificates: Vec<Certificate>,
    pub trace: Vec<String>,
}

/// Runs the synthesis engine on pairs (lift, induced map): the socle data
/// comes from the induced side, while the module operations on homs are
/// applied to both halves so the lift tracks every combination taken.
struct PairAdapter<'a, A, Z, Ad, Sc>
where
    A: RingAdapter,
    Z: Fn() -> A::Hom + Sync,
    Ad: Fn(&A::Hom, &A::Hom) -> A::Hom + Sync,
    Sc: Fn(&A::RingEl, &A::Hom) -> A::Hom + Sync,
{
    inner: &'a A,
    lift_zero: Z,
    lift_add: Ad,
    lift_scale: Sc,
}

impl<'a, A, Z, Ad, Sc> RingAdapter for PairAdapter<'a, A, Z, Ad, Sc>
where
    A: RingAdapter,
    Z: Fn() -> A::Hom + Sync,
    Ad: Fn(&A::Hom, &A::Hom) -> A::Hom + Sync,
    Sc: Fn(&A::RingEl, &A::Hom) -> A::Hom + Sync,
{
    type Hom = (A::Hom, A::Hom);
    type RingEl = A::RingEl;

    fn sites(&self) -> &[SiteMeta] {
        self.inner.sites()
    }

    fn evaluate(&self, site: usize, h: &Self::Hom) -> Matrix {
        self.inner.evaluate(site, &h.1)
    }

    fn hom_zero(&self) -> Self::Hom {
        ((self.lift_zero)(), self.inner.hom_zero())
    }

    fn hom_add(&self, a: &Self::Hom, b: &Self::Hom) -> Self::Hom {
        ((self.lift_add)(&a.0, &b.0), self.inner.hom_add(&a.1, &b.1))
    }

    fn hom_scale(&self, r: &Self::RingEl, h: &Self::Hom) -> Self::Hom {
        ((self.lift_scale)(r, &h.0), self.inner.hom_scale(r, &h.1))
    }

    fn selector(&self, site: usize) -> Self::RingEl {
        self.inner.selector(site)
    }

    fn lift_coefficient(&self, site: usize, w: &El) -> Self::RingEl {
        self.inner.lift_coefficient(site, w)
    }

    fn residue(&self, site: usize, r: &Self::RingEl) -> El {
        self.inner.residue(site, r)
    }

    fn samples(
        &self,
        handled: &[usize],
        at: usize,
        count: usize,
    ) -> Result<Vec<Self::RingEl>, SynthesisError> {
        self.inner.samples(handled, at, count)
    }

    fn strictly_contained(&self, a: usize, b: usize) -> bool {
        self.inner.strictly_contained(a, b)
    }
}

fn unzip_outcome<H>(
    result: SynthesisResult<(H, H)>,
) -> (Vec<H>, Vec<H>, Vec<Certificate>, Vec<String>) {
    let (lifts, induced) = result.homs.into_iter().unzip();
    (lifts, induced, result.certificates, result.trace)
}

// ---------------------------------------------------------------------------
// Structure-constant universe.

fn artinian_avoid(
    dec: &AlgebraDecomposition,
    c_mod: &FpModule,
    a_incl: &Matrix,
    d_mod: &FpModule,
    b_incl: &Matrix,
    g_gens: &[Matrix],
    t: usize,
    orientation: Orientation,
) -> Result<AvoidOutcome<Matrix>, AvoidError> {
    let f = dec.algebra.prime_field();
    let basis = a_incl.column_space_basis();
    let a_sub = c_mod.submodule(a_incl)?;
    let (q_mod, q_proj) = d_mod.quotient(b_incl)?;

    // Induced map A -> D/B of a generator: project each image of an
    // A-basis vector to quotient coordinates.
    let q_dim = q_mod.dim();
    let induce = |g: &Matrix| {
        let cols = (0..basis.cols())
            .map(|j| q_proj.project(&g.mul_vec(&basis.column(j))))
            .collect();
        Matrix::from_columns(&f, q_dim, cols)
    };
    let pair_gens: Vec<(Matrix, Matrix)> =
        g_gens.iter().map(|g| (g.clone(), induce(g))).collect();

    let inst = ArtinianInstance::new(dec.clone(), a_sub, q_mod);
    let adapter = PairAdapter {
        inner: &inst,
        lift_zero: || Matrix::zero(&f, d_mod.dim(), c_mod.dim()),
        lift_add: |a: &Matrix, b: &Matrix| a.add(b),
        lift_scale: |r: &AlgEl, h: &Matrix| d_mod.action_of(r).mul(h),
    };
    let k = inst.sites().len();
    let targets = vec![t; k];
    let local = vec![None; k];
    let result = synthesize(&adapter, &pair_gens, &targets, &local, orientation)?;
    let (lifts, induced, certificates, trace) = unzip_outcome(result);

    // Independent check over the prime field: the combined induced map is
    // injective, i.e. the preimage of B under the combined lift meets the
    // relevant power of A only in zero.
    let combined = match orientation {
        Orientation::Row => Matrix::hstack_all(&f, &induced),
        Orientation::Column => Matrix::vstack_all(&f, &induced),
    };
    let expected = match orientation {
        Orientation::Row => basis.cols() * induced.len(),
        Orientation::Column => basis.cols(),
    };
    assert_eq!(
        combined.rank(),
        expected,
        "combined induced map must be injective"
    );

    Ok(AvoidOutcome {
        lifts,
        induced,
        certificates,
        trace,
    })
}

/// Maps `g_1, ..., g_t` in the span of `g_gens` such that
/// `(a_1, ..., a_t) -> sum g_i(a_i)` sends `A^t` into `D` meeting `B`
/// only in zero.
pub fn artinian_avoid_row(
    dec: &AlgebraDecomposition,
    c_mod: &FpModule,
    a_incl: &Matrix,
    d_mod: &FpModule,
    b_incl: &Matrix,
    g_gens: &[Matrix],
    t: usize,
) -> Result<AvoidOutcome<Matrix>, AvoidError> {
    artinian_avoid(dec, c_mod, a_incl, d_mod, b_incl, g_gens, t, Orientation::Row)
}

/// Maps `g_1, ..., g_t` in the span of `g_gens` such that
/// `a -> (g_1(a), ..., g_t(a))` sends `A` into `D^t` meeting `B^t` only
/// in zero.
pub fn artinian_avoid_column(
    dec: &AlgebraDecomposition,
    c_mod: &FpModule,
    a_incl: &Matrix,
    d_mod: &FpModule,
    b_incl: &Matrix,
    g_gens: &[Matrix],
    t: usize,
) -> Result<AvoidOutcome<Matrix>, AvoidError> {
    artinian_avoid(
        dec,
        c_mod,
        a_incl,
        d_mod,
        b_incl,
        g_gens,
        t,
        Orientation::Column,
    )
}

// ---------------------------------------------------------------------------
// Polynomial universe.

fn pid_avoid(
    c_mod: &PidModule,
    a_incl: &PolyMatrix,
    d_mod: &PidModule,
    b_incl: &PolyMatrix,
    g_gens: &[PidHom],
    t: usize,
    orientation: Orientation,
) -> Result<AvoidOutcome<PidHom>, AvoidError> {
    let a_sub = pid_submodule_presentation(c_mod, a_incl);
    let q_mod = pid_quotient_presentation(d_mod, b_incl);

    // Induced map on presentations: A is generated by the columns of
    // `a_incl`, and D/B keeps the generators of D, so the induced matrix
    // is just the composite on generators.
    let induce = |g: &PidHom| -> Result<PidHom, PidError> {
        PidHom::new(g.matrix.mul(a_incl), &a_sub, &q_mod)
    };

    let inst = PidInstance::new(a_sub.clone(), q_mod.clone());
    let pair_gens: Vec<(PidHom, PidHom)> = g_gens
        .iter()
        .map(|g| Ok((g.clone(), induce(g)?)))
        .collect::<Result<_, PidError>>()?;
    let adapter = PairAdapter {
        inner: &inst,
        lift_zero: || PidHom::zero(c_mod, d_mod),
        lift_add: |a: &PidHom, b: &PidHom| a.add(b),
        lift_scale: |r: &Poly, h: &PidHom| h.scale(r),
    };
    let k = inst.sites().len();
    let targets = vec![t; k];
    let local = vec![None; k];
    let result = synthesize(&adapter, &pair_gens, &targets, &local, orientation)?;
    let (lifts, induced, certificates, trace) = unzip_outcome(result);

    // Independent check at module level: the combined induced map between
    // the appropriate direct sums is injective.
    if !induced.is_empty() {
        let (dom, cod, matrix) = match orientation {
            Orientation::Row => {
                let dom = std::iter::repeat(&a_sub)
                    .take(induced.len())
                    .fold(PidModule::zero_module(c_mod.p()), |acc, m| {
                        acc.direct_sum(m)
                    });
                let matrix = induced
                    .iter()
                    .skip(1)
                    .fold(induced[0].matrix.clone(), |acc, h| acc.hstack(&h.matrix));
                (dom, q_mod.clone(), matrix)
            }
            Orientation::Column => {
                let cod = std::iter::repeat(&q_mod)
                    .take(induced.len())
                    .fold(PidModule::zero_module(c_mod.p()), |acc, m| {
                        acc.direct_sum(m)
                    });
                let matrix = induced
                    .iter()
                    .skip(1)
                    .fold(induced[0].matrix.clone(), |acc, h| acc.vstack(&h.matrix));
                (a_sub.clone(), cod, matrix)
            }
        };
        let combined = PidHom::new(matrix, &dom, &cod)?;
        let verdict = pid_is_injective(&combined, &dom, &cod)?;
        assert!(verdict.is_none(), "combined induced map must be injective");
    }

    Ok(AvoidOutcome {
        lifts,
        induced,
        certificates,
        trace,
    })
}

/// Polynomial-universe version of [`artinian_avoid_row`].
pub fn pid_avoid_row(
    c_mod: &PidModule,
    a_incl: &PolyMatrix,
    d_mod: &PidModule,
    b_incl: &PolyMatrix,
    g_gens: &[PidHom],
    t: usize,
) -> Result<AvoidOutcome<PidHom>, AvoidError> {
    pid_avoid(c_mod, a_incl, d_mod, b_incl, g_gens, t, Orientation::Row)
}

/// Polynomial-universe version of [`artinian_avoid_column`].
pub fn pid_avoid_column(
    c_mod: &PidModule,
    a_incl: &PolyMatrix,
    d_mod: &PidModule,
    b_incl: &PolyMatrix,
    g_gens: &[PidHom],
    t: usize,
) -> Result<AvoidOutcome<PidHom>, AvoidError> {
    pid_avoid(c_mod, a_incl, d_mod, b_incl, g_gens, t, Orientation::Column)
}
