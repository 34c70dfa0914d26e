//! The gluing engine: given a set of module maps generating a
//! Hom-submodule F and per-prime targets, build a single list of maps in F
//! whose prefixes achieve full socle rank at every associated prime —
//! giving global injections of `N^t` into `M` (rows) or of `N` into `M^t`
//! (columns) — and compute the injective capacity and cogenerator number
//! from the local data. Everything runs against a ring-adapter interface
//! implemented by both shipped universes.

use std::fmt::Debug;

use thiserror::Error;

use crate::artinian::{
    associated_primes, socle_eval, AlgEl, AlgebraDecomposition, FpModule, SocleSite,
};
use crate::field::{El, Field, Matrix, Poly};
use crate::genpos::{
    combine_block_rank, GenPosError, GridCoord, GridProblem, RankEntry, RankProblem,
};
use crate::pid::{
    pid_associated_primes, pid_sample_with_residues, pid_socle_dim, pid_socle_eval, PidHom,
    PidModule, PidPrime,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("target for site {0} must be positive")]
    TargetZero(usize),
    #[error("local target unmet at site {site}: no full-rank length-{target} {orientation} exists in the span")]
    LocalTargetUnmet {
        site: usize,
        target: usize,
        orientation: &'static str,
    },
    #[error("supplied local {orientation} at site {site} does not reach rank {target}")]
    InvalidLocalData {
        site: usize,
        target: usize,
        orientation: &'static str,
    },
    #[error("sampling failed at site {site}: {reason}")]
    SampleInfeasible { site: usize, reason: String },
    #[error("general-position search failed: {0}")]
    GenPos(GenPosError),
    #[error("internal certificate check failed at site {0}")]
    CertificateUnmet(usize),
}

impl From<GenPosError> for SynthesisError {
    fn from(e: GenPosError) -> Self {
        SynthesisError::GenPos(e)
    }
}

/// Static data of one associated-prime site.
#[derive(Clone, Debug)]
pub struct SiteMeta {
    pub label: String,
    pub kappa: Field,
    /// kappa-dimension of the socle of the localized domain module.
    pub soc_n: usize,
    /// kappa-dimension of the socle of the localized codomain module.
    pub soc_m: usize,
    pub maximal: bool,
}

/// What the engine needs from a ring universe: the associated-prime sites
/// of the domain module, socle evaluators, the module structure on homs,
/// and the two element samplers from the gluing argument.
pub trait RingAdapter: Sync {
    type Hom: Clone + Send + Sync;
    type RingEl: Clone + Debug + Send + Sync;

    fn sites(&self) -> &[SiteMeta];

    /// kappa-matrix of the socle map induced by `h` at a site.
    fn evaluate(&self, site: usize, h: &Self::Hom) -> Matrix;

    fn hom_zero(&self) -> Self::Hom;
    fn hom_add(&self, a: &Self::Hom, b: &Self::Hom) -> Self::Hom;
    fn hom_scale(&self, r: &Self::RingEl, h: &Self::Hom) -> Self::Hom;

    /// An element that is a unit at the given maximal site and lies in
    /// every other maximal associated prime.
    fn selector(&self, site: usize) -> Self::RingEl;

    /// A ring element whose residue at the site is `w` (for `w` drawn from
    /// the canonical residue ladder of the site's field).
    fn lift_coefficient(&self, site: usize, w: &El) -> Self::RingEl;

    /// Residue of a ring element at a site.
    fn residue(&self, site: usize, r: &Self::RingEl) -> El;

    /// `count` elements of the intersection of the primes of `handled`
    /// whose residues at `at` are pairwise distinct.
    fn samples(
        &self,
        handled: &[usize],
        at: usize,
        count: usize,
    ) -> Result<Vec<Self::RingEl>, SynthesisError>;

    /// Is the prime of site `a` strictly contained in that of site `b`?
    fn strictly_contained(&self, a: usize, b: usize) -> bool;
}

/// Value in the extended natural numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtNat {
    Finite(usize),
    Infinite,
}

impl ExtNat {
    pub fn at_least(&self, v: usize) -> bool {
        match self {
            ExtNat::Finite(x) => *x >= v,
            ExtNat::Infinite => true,
        }
    }
}

impl std::fmt::Display for ExtNat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinite => write!(f, "infinity"),
        }
    }
}

/// Per-site proof that the synthesized prefix meets its target.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub site: usize,
    pub prefix_len: usize,
    pub target_rank: usize,
    pub achieved_rank: usize,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult<H> {
    pub homs: Vec<H>,
    pub certificates: Vec<Certificate>,
    /// Human-readable replay log: selectors, padding, samples, chosen
    /// general-position coefficients.
    pub trace: Vec<String>,
}

// ---------------------------------------------------------------------------
// Local searches over one site.

/// First `needed` elements of the canonical residue ladder, or the whole
/// field if it is smaller. A pool of size `soc_n + 1` per variable is
/// enough for exactness: any maximal minor of the combined socle matrix
/// has degree at most `soc_n` in each coefficient.
fn coefficient_pool(kappa: &Field, needed: usize) -> Vec<El> {
    match kappa.size() {
        Some(s) if s <= needed as u128 => kappa.elements(),
        _ => kappa
            .first_elements(needed)
            .expect("pool within field size"),
    }
}

/// All candidate socle matrices attainable by one hom of the span with
/// coefficients from the pool, each with its coefficient vector.
fn span_candidates(
    kappa: &Field,
    evals: &[Matrix],
    pool: &[El],
    rows: usize,
    cols: usize,
) -> Vec<(Vec<El>, Matrix)> {
    let g = evals.len();
    let mut out = vec![];
    let mut idx = vec![0usize; g];
    loop {
        let coeffs: Vec<El> = idx.iter().map(|&i| pool[i].clone()).collect();
        let mut acc = Matrix::zero(kappa, rows, cols);
        for (e, c) in evals.iter().zip(&coeffs) {
            if !kappa.is_zero(c) {
                acc = acc.add(&e.scale(c));
            }
        }
        out.push((coeffs, acc));
        // Odometer.
        let mut k = 0;
        loop {
            if k == g {
                return out;
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Depth-first search for `t` candidates (strictly increasing indices)
/// whose side-by-side concatenation has full column rank `t * n`. Prefixes
/// of a full-rank row are full rank, so pruning on prefix rank is
/// complete.
fn search_row(
    kappa: &Field,
    candidates: &[(Vec<El>, Matrix)],
    n: usize,
    t: usize,
    rows: usize,
) -> Option<Vec<Vec<El>>> {
    fn go(
        kappa: &Field,
        candidates: &[(Vec<El>, Matrix)],
        n: usize,
        t: usize,
        start: usize,
        acc: &Matrix,
        picked: &mut Vec<usize>,
    ) -> bool {
        if picked.len() == t {
            return true;
        }
        for i in start..candidates.len() {
            let ext = acc.hstack(&candidates[i].1);
            if ext.rank() == (picked.len() + 1) * n {
                picked.push(i);
                if go(kappa, candidates, n, t, i + 1, &ext, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
    let mut picked = vec![];
    let empty = Matrix::zero(kappa, rows, 0);
    go(kappa, candidates, n, t, 0, &empty, &mut picked)
        .then(|| picked.iter().map(|&i| candidates[i].0.clone()).collect())
}

/// Depth-first search for at most `t` candidates whose stack reaches row
/// rank `n`; shorter solutions are padded with zero homs by the caller.
fn search_column(
    kappa: &Field,
    candidates: &[(Vec<El>, Matrix)],
    n: usize,
    t: usize,
    cols: usize,
) -> Option<Vec<Vec<El>>> {
    fn go(
        candidates: &[(Vec<El>, Matrix)],
        n: usize,
        t: usize,
        start: usize,
        acc: &Matrix,
        picked: &mut Vec<usize>,
    ) -> bool {
        if acc.rank() == n {
            return true;
        }
        if picked.len() == t {
            return false;
        }
        for i in start..candidates.len() {
            let ext = acc.vstack(&candidates[i].1);
            if ext.rank() > acc.rank() {
                picked.push(i);
                if go(candidates, n, t, i + 1, &ext, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
    if n == 0 {
        return Some(vec![]);
    }
    let mut picked = vec![];
    let empty = Matrix::zero(kappa, 0, cols);
    go(candidates, n, t, 0, &empty, &mut picked)
        .then(|| picked.iter().map(|&i| candidates[i].0.clone()).collect())
}

struct SiteSearch<'a, A: RingAdapter> {
    adapter: &'a A,
    site: usize,
    candidates: Vec<(Vec<El>, Matrix)>,
}

impl<'a, A: RingAdapter> SiteSearch<'a, A> {
    fn new(adapter: &'a A, f_gens: &[A::Hom], site: usize) -> Self {
        let meta = &adapter.sites()[site];
        let evals: Vec<Matrix> = f_gens.iter().map(|h| adapter.evaluate(site, h)).collect();
        let pool = coefficient_pool(&meta.kappa, meta.soc_n + 1);
        let candidates = span_candidates(&meta.kappa, &evals, &pool, meta.soc_m, meta.soc_n);
        SiteSearch {
            adapter,
            site,
            candidates,
        }
    }

    fn meta(&self) -> &SiteMeta {
        &self.adapter.sites()[self.site]
    }

    /// Realize a coefficient vector as an element of the span.
    fn build_hom(&self, f_gens: &[A::Hom], coeffs: &[El]) -> A::Hom {
        let meta = self.meta();
        let mut acc = self.adapter.hom_zero();
        for (g, c) in f_gens.iter().zip(coeffs) {
            if !meta.kappa.is_zero(c) {
                let r = self.adapter.lift_coefficient(self.site, c);
                acc = self.adapter.hom_add(&acc, &self.adapter.hom_scale(&r, g));
            }
        }
        acc
    }

    fn row(&self, f_gens: &[A::Hom], t: usize) -> Option<Vec<A::Hom>> {
        let meta = self.meta();
        let coeffs = search_row(&meta.kappa, &self.candidates, meta.soc_n, t, meta.soc_m)?;
        Some(coeffs.iter().map(|c| self.build_hom(f_gens, c)).collect())
    }

    fn column(&self, f_gens: &[A::Hom], t: usize) -> Option<Vec<A::Hom>> {
        let meta = self.meta();
        let coeffs = search_column(&meta.kappa, &self.candidates, meta.soc_n, t, meta.soc_n)?;
        let mut homs: Vec<A::Hom> = coeffs.iter().map(|c| self.build_hom(f_gens, c)).collect();
        while homs.len() < t {
            homs.push(self.adapter.hom_zero());
        }
        Some(homs)
    }

    fn capacity(&self) -> usize {
        let meta = self.meta();
        if meta.soc_n == 0 {
            return 0;
        }
        let t_max = meta.soc_m / meta.soc_n;
        let mut best = 0;
        for t in 1..=t_max {
            if search_row(&meta.kappa, &self.candidates, meta.soc_n, t, meta.soc_m).is_some() {
                best = t;
            } else {
                break;
            }
        }
        best
    }

    fn cog(&self) -> Option<usize> {
        let meta = self.meta();
        if meta.soc_n == 0 {
            return Some(0);
        }
        // A column injective at any length admits one of length at most
        // soc_n: keep only components contributing independent rows.
        (1..=meta.soc_n)
            .find(|&t| search_column(&meta.kappa, &self.candidates, meta.soc_n, t, meta.soc_n).is_some())
    }
}

/// Largest `t` such that some `t`-row over the span has full socle rank at
/// the site.
pub fn local_capacity<A: RingAdapter>(adapter: &A, f_gens: &[A::Hom], site: usize) -> usize {
    SiteSearch::new(adapter, f_gens, site).capacity()
}

/// Smallest `t` such that some `t`-column over the span is injective on
/// the socle at the site; `None` when no length works.
pub fn local_cog<A: RingAdapter>(adapter: &A, f_gens: &[A::Hom], site: usize) -> Option<usize> {
    SiteSearch::new(adapter, f_gens, site).cog()
}

pub fn find_local_row<A: RingAdapter>(
    adapter: &A,
    f_gens: &[A::Hom],
    site: usize,
    t: usize,
) -> Option<Vec<A::Hom>> {
    SiteSearch::new(adapter, f_gens, site).row(f_gens, t)
}

pub fn find_local_column<A: RingAdapter>(
    adapter: &A,
    f_gens: &[A::Hom],
    site: usize,
    t: usize,
) -> Option<Vec<A::Hom>> {
    SiteSearch::new(adapter, f_gens, site).column(f_gens, t)
}

// ---------------------------------------------------------------------------
// Global capacities.

/// Sites that are inclusion-maximal members of the associated-prime set.
fn maximal_members<A: RingAdapter>(adapter: &A) -> Vec<usize> {
    let k = adapter.sites().len();
    (0..k)
        .filter(|&a| (0..k).all(|b| !adapter.strictly_contained(a, b)))
        .collect()
}

/// `inf` over associated primes of the local capacities; infinity when the
/// domain module is zero. With `maximal_only`, the infimum runs over the
/// inclusion-maximal members only — localization at a smaller prime
/// factors through, so the value is unchanged.
pub fn compute_inj<A: RingAdapter>(adapter: &A, f_gens: &[A::Hom], maximal_only: bool) -> ExtNat {
    let consider: Vec<usize> = if maximal_only {
        maximal_members(adapter)
    } else {
        (0..adapter.sites().len()).collect()
    };
    if consider.is_empty() {
        return ExtNat::Infinite;
    }
    let caps = crate::par::map(&consider, |&s| local_capacity(adapter, f_gens, s));
    ExtNat::Finite(caps.into_iter().min().unwrap())
}

/// `sup` over associated primes of the local cogenerator numbers; 0 when
/// the domain module is zero, infinity when some site admits no injective
/// column at any length.
pub fn compute_cog<A: RingAdapter>(adapter: &A, f_gens: &[A::Hom]) -> ExtNat {
    let sites: Vec<usize> = (0..adapter.sites().len()).collect();
    if sites.is_empty() {
        return ExtNat::Finite(0);
    }
    let cogs = crate::par::map(&sites, |&s| local_cog(adapter, f_gens, s));
    let mut best = 0;
    for c in cogs {
        match c {
            None => return ExtNat::Infinite,
            Some(v) => best = best.max(v),
        }
    }
    ExtNat::Finite(best)
}

/// Does the span contain a single injective map?
pub fn has_injection<A: RingAdapter>(adapter: &A, f_gens: &[A::Hom]) -> bool {
    compute_inj(adapter, f_gens, false).at_least(1)
}

// ---------------------------------------------------------------------------
// Synthesis.

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Orientation {
    Row,
    Column,
}

impl Orientation {
    fn word(&self) -> &'static str {
        match self {
            Orientation::Row => "row",
            Orientation::Column => "column",
        }
    }
}

/// Socle matrix of a prefix at a site: side-by-side for rows, stacked for
/// columns.
fn prefix_matrix<A: RingAdapter>(
    adapter: &A,
    site: usize,
    homs: &[A::Hom],
    orientation: Orientation,
) -> Matrix {
    let meta = &adapter.sites()[site];
    let mats: Vec<Matrix> = homs.iter().map(|h| adapter.evaluate(site, h)).collect();
    match orientation {
        Orientation::Row => Matrix::hstack_all(&meta.kappa, &mats),
        Orientation::Column => Matrix::vstack_all(&meta.kappa, &mats),
    }
}

fn target_rank(meta: &SiteMeta, t: usize, orientation: Orientation) -> usize {
    match orientation {
        Orientation::Row => t * meta.soc_n,
        Orientation::Column => meta.soc_n,
    }
}

/// Processing order for non-maximal sites: supersets first, so the ideal
/// of already-handled primes is never contained in the next one. Ties
/// break on site index.
fn nonmaximal_order<A: RingAdapter>(adapter: &A) -> Vec<usize> {
    let k = adapter.sites().len();
    let mut order: Vec<usize> = (0..k)
        .filter(|&s| !adapter.sites()[s].maximal)
        .collect();
    order.sort_by_key(|&s| {
        let containing = (0..k)
            .filter(|&b| adapter.strictly_contained(s, b))
            .count();
        (containing, s)
    });
    order
}

fn synthesize<A: RingAdapter>(
    adapter: &A,
    f_gens: &[A::Hom],
    targets: &[usize],
    local: &[Option<Vec<A::Hom>>],
    orientation: Orientation,
) -> Result<SynthesisResult<A::Hom>, SynthesisError> {
    let sites = adapter.sites();
    assert_eq!(targets.len(), sites.len());
    assert_eq!(local.len(), sites.len());
    if sites.is_empty() {
        return Ok(SynthesisResult {
            homs: vec![],
            certificates: vec![],
            trace: vec!["no associated primes; empty synthesis".into()],
        });
    }
    for (s, &t) in targets.iter().enumerate() {
        if t == 0 {
            return Err(SynthesisError::TargetZero(s));
        }
    }
    let mut trace = vec![];

    // Resolve local data: validate supplied rows/columns, search otherwise.
    let mut local_data: Vec<Vec<A::Hom>> = Vec::with_capacity(sites.len());
    for (s, slot) in local.iter().enumerate() {
        let t = targets[s];
        let meta = &sites[s];
        let goal = target_rank(meta, t, orientation);
        match slot {
            Some(homs) => {
                if homs.len() != t
                    || prefix_matrix(adapter, s, homs, orientation).rank() < goal
                {
                    return Err(SynthesisError::InvalidLocalData {
                        site: s,
                        target: goal,
                        orientation: orientation.word(),
                    });
                }
                local_data.push(homs.clone());
            }
            None => {
                let search = SiteSearch::new(adapter, f_gens, s);
                let found = match orientation {
                    Orientation::Row => search.row(f_gens, t),
                    Orientation::Column => search.column(f_gens, t),
                };
                match found {
                    Some(homs) => {
                        trace.push(format!(
                            "site {s} ({}): local {} of length {t} found by search",
                            meta.label,
                            orientation.word()
                        ));
                        local_data.push(homs);
                    }
                    None => {
                        return Err(SynthesisError::LocalTargetUnmet {
                            site: s,
                            target: t,
                            orientation: orientation.word(),
                        })
                    }
                }
            }
        }
    }

    let v = *targets.iter().max().unwrap();
    let maximal_sites: Vec<usize> = (0..sites.len()).filter(|&s| sites[s].maximal).collect();

    // Maximal pass: e = sum over maximal sites of selector * padded local
    // data; the selector is a unit at its own site and vanishes at every
    // other maximal one, so each site sees exactly its own contribution.
    let mut e: Vec<A::Hom> = (0..v).map(|_| adapter.hom_zero()).collect();
    for &s in &maximal_sites {
        let sel = adapter.selector(s);
        trace.push(format!(
            "site {s} ({}): selector {:?}, padding {} -> {}",
            sites[s].label,
            sel,
            targets[s],
            v
        ));
        for (i, slot) in e.iter_mut().enumerate() {
            if i < targets[s] {
                let scaled = adapter.hom_scale(&sel, &local_data[s][i]);
                *slot = adapter.hom_add(slot, &scaled);
            }
        }
    }

    // Non-maximal pass: correct the list one prime at a time with
    // coefficients drawn from the intersection of everything handled so
    // far; those coefficients have residue zero at handled sites, so
    // earlier certificates are untouched.
    let mut handled = maximal_sites.clone();
    for q in nonmaximal_order(adapter) {
        let meta = &sites[q];
        let t = targets[q];
        let goal = target_rank(meta, t, orientation);
        let samples = adapter.samples(&handled, q, goal + 1)?;
        let residues: Vec<El> = samples.iter().map(|r| adapter.residue(q, r)).collect();
        trace.push(format!(
            "site {q} ({}): {} ideal samples {:?}",
            meta.label,
            samples.len(),
            samples
        ));
        let base = prefix_matrix(adapter, q, &e[..t], orientation);
        let block = prefix_matrix(adapter, q, &local_data[q][..t], orientation);
        let labels: Vec<String> = (0..samples.len()).map(|i| format!("{i:04}")).collect();
        let grid = GridProblem::new(
            vec![meta.kappa.clone()],
            vec![GridCoord::new(labels, vec![residues])],
        )?;
        let problem = RankProblem {
            entries: vec![RankEntry {
                base,
                blocks: vec![block],
                target: goal,
            }],
            transposed: orientation == Orientation::Column,
        };
        let combo = combine_block_rank(&problem, &grid)?;
        let chosen = &samples[combo.point.indices[0]];
        trace.push(format!(
            "site {q} ({}): general-position coefficient {:?}",
            meta.label, chosen
        ));
        for (i, slot) in e.iter_mut().enumerate() {
            if i < t {
                let scaled = adapter.hom_scale(chosen, &local_data[q][i]);
                *slot = adapter.hom_add(slot, &scaled);
            }
        }
        handled.push(q);
    }

    // Certificates: every site's prefix must meet its target.
    let mut certificates = vec![];
    for s in 0..sites.len() {
        let t = targets[s];
        let goal = target_rank(&sites[s], t, orientation);
        let achieved = prefix_matrix(adapter, s, &e[..t], orientation).rank();
        if achieved < goal {
            return Err(SynthesisError::CertificateUnmet(s));
        }
        certificates.push(Certificate {
            site: s,
            prefix_len: t,
            target_rank: goal,
            achieved_rank: achieved,
        });
    }
    Ok(SynthesisResult {
        homs: e,
        certificates,
        trace,
    })
}

/// Build `h_1, ..., h_v` in the span of `f_gens` such that for every
/// associated prime the prefix of length `targets[site]` has full socle
/// rank there; the prefix of length `min targets` is then globally
/// injective as a map `N^t -> M`.
pub fn synthesize_row<A: RingAdapter>(
    adapter: &A,
    f_gens: &[A::Hom],
    targets: &[usize],
    local_rows: &[Option<Vec<A::Hom>>],
) -> Result<SynthesisResult<A::Hom>, SynthesisError> {
    synthesize(adapter, f_gens, targets, local_rows, Orientation::Row)
}

/// Dual construction: a column `(h_1, ..., h_v)` injective as a map
/// `N -> M^v`, with every prefix of length `targets[site]` already
/// injective on the socle at its site.
pub fn synthesize_column<A: RingAdapter>(
    adapter: &A,
    f_gens: &[A::Hom],
    targets: &[usize],
    local_columns: &[Option<Vec<A::Hom>>],
) -> Result<SynthesisResult<A::Hom>, SynthesisError> {
    synthesize(adapter, f_gens, targets, local_columns, Orientation::Column)
}

// ---------------------------------------------------------------------------
// Adapters.

/// The structure-constant universe: all associated primes are maximal.
pub struct ArtinianInstance {
    dec: AlgebraDecomposition,
    n: FpModule,
    m: FpModule,
    components: Vec<usize>,
    meta: Vec<SiteMeta>,
    n_sites: Vec<SocleSite>,
    m_sites: Vec<SocleSite>,
}

impl ArtinianInstance {
    pub fn new(dec: AlgebraDecomposition, n: FpModule, m: FpModule) -> ArtinianInstance {
        let components = associated_primes(&dec, &n);
        let mut meta = vec![];
        let mut n_sites = vec![];
        let mut m_sites = vec![];
        for &c in &components {
            let ns = SocleSite::new(&dec, c, &n);
            let ms = SocleSite::new(&dec, c, &m);
            meta.push(SiteMeta {
                label: format!("m{c}"),
                kappa: dec.components[c].kappa.clone(),
                soc_n: ns.dim,
                soc_m: ms.dim,
                maximal: true,
            });
            n_sites.push(ns);
            m_sites.push(ms);
        }
        ArtinianInstance {
            dec,
            n,
            m,
            components,
            meta,
            n_sites,
            m_sites,
        }
    }

    pub fn decomposition(&self) -> &AlgebraDecomposition {
        &self.dec
    }

    pub fn domain(&self) -> &FpModule {
        &self.n
    }

    pub fn codomain(&self) -> &FpModule {
        &self.m
    }
}

impl RingAdapter for ArtinianInstance {
    type Hom = Matrix;
    type RingEl = AlgEl;

    fn sites(&self) -> &[SiteMeta] {
        &self.meta
    }

    fn evaluate(&self, site: usize, h: &Matrix) -> Matrix {
        socle_eval(h, &self.n_sites[site], &self.m_sites[site])
    }

    fn hom_zero(&self) -> Matrix {
        Matrix::zero(&self.dec.algebra.prime_field(), self.m.dim(), self.n.dim())
    }

    fn hom_add(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.add(b)
    }

    fn hom_scale(&self, r: &AlgEl, h: &Matrix) -> Matrix {
        self.m.action_of(r).mul(h)
    }

    fn selector(&self, site: usize) -> AlgEl {
        self.dec.selector(self.components[site])
    }

    fn lift_coefficient(&self, site: usize, w: &El) -> AlgEl {
        self.dec.lift_residue(self.components[site], w)
    }

    fn residue(&self, site: usize, r: &AlgEl) -> El {
        self.dec.residue(self.components[site], r)
    }

    fn samples(
        &self,
        _handled: &[usize],
        at: usize,
        count: usize,
    ) -> Result<Vec<AlgEl>, SynthesisError> {
        // Elements supported on one component vanish at every other
        // maximal ideal, hence lie in any handled intersection.
        self.dec
            .sample_elements(self.components[at], count)
            .map_err(|e| SynthesisError::SampleInfeasible {
                site: at,
                reason: e.to_string(),
            })
    }

    fn strictly_contained(&self, _a: usize, _b: usize) -> bool {
        false
    }
}

/// The `F_p[x]` universe: maximal primes `(f)` plus possibly the zero
/// prime.
pub struct PidInstance {
    n: PidModule,
    m: PidModule,
    primes: Vec<PidPrime>,
    meta: Vec<SiteMeta>,
}

impl PidInstance {
    pub fn new(n: PidModule, m: PidModule) -> PidInstance {
        let primes = pid_associated_primes(&n);
        let p = n.p();
        let meta = primes
            .iter()
            .map(|q| SiteMeta {
                label: match q {
                    PidPrime::Zero => "(0)".to_string(),
                    PidPrime::Irreducible(f) => format!("({f})"),
                },
                kappa: q.residue_field(p),
                soc_n: pid_socle_dim(&n, q),
                soc_m: pid_socle_dim(&m, q),
                maximal: matches!(q, PidPrime::Irreducible(_)),
            })
            .collect();
        PidInstance { n, m, primes, meta }
    }

    pub fn domain(&self) -> &PidModule {
        &self.n
    }

    pub fn codomain(&self) -> &PidModule {
        &self.m
    }

    pub fn primes(&self) -> &[PidPrime] {
        &self.primes
    }
}

impl RingAdapter for PidInstance {
    type Hom = PidHom;
    type RingEl = Poly;

    fn sites(&self) -> &[SiteMeta] {
        &self.meta
    }

    fn evaluate(&self, site: usize, h: &PidHom) -> Matrix {
        pid_socle_eval(h, &self.n, &self.m, &self.primes[site])
    }

    fn hom_zero(&self) -> PidHom {
        PidHom::zero(&self.n, &self.m)
    }

    fn hom_add(&self, a: &PidHom, b: &PidHom) -> PidHom {
        a.add(b)
    }

    fn hom_scale(&self, r: &Poly, h: &PidHom) -> PidHom {
        h.scale(r)
    }

    fn selector(&self, site: usize) -> Poly {
        // Product of the generators of every other maximal associated
        // prime; a unit at this site since the irreducibles are distinct.
        let p = self.n.p();
        let mut acc = Poly::one(p);
        for (s, q) in self.primes.iter().enumerate() {
            if s == site {
                continue;
            }
            if let PidPrime::Irreducible(f) = q {
                acc = acc.mul(f);
            }
        }
        acc
    }

    fn lift_coefficient(&self, _site: usize, w: &El) -> Poly {
        let p = self.n.p();
        match w {
            El::Fp(v) => Poly::constant(p, *v),
            El::Ext(cs) => Poly::new(p, cs.clone()),
            El::Fraction { num, den } => {
                assert!(den.is_one(), "canonical ladder lifts have unit denominator");
                num.clone()
            }
        }
    }

    fn residue(&self, site: usize, r: &Poly) -> El {
        self.primes[site].residue(self.n.p(), r)
    }

    fn samples(&self, handled: &[usize], at: usize, count: usize) -> Result<Vec<Poly>, SynthesisError> {
        let p = self.n.p();
        let mut j_gen = Poly::one(p);
        for &s in handled {
            match &self.primes[s] {
                PidPrime::Irreducible(f) => j_gen = j_gen.mul(f),
                PidPrime::Zero => {
                    unreachable!("the zero prime is processed last and never handled before another")
                }
            }
        }
        pid_sample_with_residues(p, &j_gen, &self.primes[at], count).map_err(|e| {
            SynthesisError::SampleInfeasible {
                site: at,
                reason: e.to_string(),
            }
        })
    }

    fn strictly_contained(&self, a: usize, b: usize) -> bool {
        matches!(self.primes[a], PidPrime::Zero) && matches!(self.primes[b], PidPrime::Irreducible(_))
    }
}

mod avoid;
pub use avoid::{
    artinian_avoid_column, artinian_avoid_row, pid_avoid_column, pid_avoid_row, AvoidError,
    AvoidOutcome,
};

#[cfg(test)]
mod tests;
