//! Univariate polynomials over a prime field `F_p`, including the
//! distinct-degree / equal-degree factorization used for idempotent
//! splitting and for locating associated primes over `F_p[x]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FieldError;

pub(crate) fn addm(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

pub(crate) fn subm(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

pub(crate) fn mulm(a: u64, b: u64, p: u64) -> u64 {
    // p is capped at 251, so this cannot overflow.
    (a * b) % p
}

pub(crate) fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn invm(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "inverse of zero mod {p}");
    powm(a, p - 2, p)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A polynomial over `F_p`, least-significant coefficient first.
///
/// The zero polynomial is the empty coefficient vector; no other trailing
/// zero coefficients are ever stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "x")?,
                1 => write!(f, "{c}x")?,
                _ if c == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        Poly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        Poly::new(p, vec![1])
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Poly::new(p, vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(p: u64, c: u64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c % p;
        Poly::new(p, coeffs)
    }

    pub fn x(p: u64) -> Self {
        Poly::monomial(p, 1, 1)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = 0`, for size bookkeeping.
    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.p, other.p);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| addm(self.coeff(i), other.coeff(i), self.p))
            .collect();
        Poly::new(self.p, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.p, other.p);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| subm(self.coeff(i), other.coeff(i), self.p))
            .collect();
        Poly::new(self.p, coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly::zero(self.p).sub(self)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = (coeffs[i + j] + a * b) % self.p;
            }
        }
        Poly::new(self.p, coeffs)
    }

    pub fn scale(&self, c: u64) -> Poly {
        let coeffs = self.coeffs.iter().map(|&a| mulm(a, c, self.p)).collect();
        Poly::new(self.p, coeffs)
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn divmod(&self, d: &Poly) -> (Poly, Poly) {
        debug_assert_eq!(self.p, d.p);
        assert!(!d.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let dd = d.degree().unwrap();
        let lead_inv = invm(d.leading(), p);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(p), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = mulm(rem[i], lead_inv, p);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] = subm(rem[i - dd + j], mulm(c, dc, p), p);
            }
        }
        (Poly::new(p, quot), Poly::new(p, rem))
    }

    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divmod(d);
        assert!(r.is_zero(), "inexact polynomial division: {self} by {d}");
        q
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divmod(d).1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.rem(self).is_zero()
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(invm(self.leading(), self.p))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `g = s*self + t*other`, `g` monic.
    pub fn extended_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(p), Poly::zero(p));
        let (mut t0, mut t1) = (Poly::zero(p), Poly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let ns = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, ns);
            let nt = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, nt);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lc = invm(r0.leading(), p);
        (r0.scale(lc), s0.scale(lc), t0.scale(lc))
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        self.mul(other).div_exact(&self.gcd(other)).monic()
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = addm(mulm(acc, x, self.p), c, self.p);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.p);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulm(c, (i as u64) % self.p, self.p))
            .collect();
        Poly::new(self.p, coeffs)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.p);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// p-th root of a polynomial whose derivative vanishes, i.e. one of the
    /// form `g(x^p)`; valid because Frobenius fixes `F_p`.
    fn pth_root(&self) -> Poly {
        let p = self.p as usize;
        let coeffs = self.coeffs.iter().step_by(p).copied().collect();
        Poly::new(self.p, coeffs)
    }

    /// All roots in `F_p`, in increasing order.
    pub fn roots(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            Some(_) => {
                let f = self.factor();
                f.len() == 1 && f[0].1 == 1
            }
        }
    }

    /// Factorization into monic irreducibles with multiplicities, sorted by
    /// (degree, coefficient vector). The product of the factors times
    /// `leading()` re-multiplies to `self` exactly.
    ///
    /// Panics on the zero polynomial; use [`Poly::factor_checked`] to get an
    /// error instead.
    pub fn factor(&self) -> Vec<(Poly, u32)> {
        self.factor_checked().expect("cannot factor the zero polynomial")
    }

    pub fn factor_checked(&self) -> Result<Vec<(Poly, u32)>, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroPolynomial);
        }
        let mut out = factor_monic(&self.monic());
        out.sort_by(|a, b| {
            (a.0.coeffs.len(), &a.0.coeffs).cmp(&(b.0.coeffs.len(), &b.0.coeffs))
        });
        Ok(out)
    }
}

fn factor_monic(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.p;
    let mut out: Vec<(Poly, u32)> = vec![];
    let mut f = f.clone();
    loop {
        match f.degree() {
            None | Some(0) => break,
            Some(_) => {}
        }
        let fp = f.derivative();
        if fp.is_zero() {
            // f = g(x^p); every multiplicity in g gets multiplied by p.
            let g = f.pth_root();
            for (q, m) in factor_monic(&g) {
                merge_factor(&mut out, q, m * p as u32);
            }
            break;
        }
        // f / gcd(f, f') is squarefree and contains every irreducible factor
        // of f whose multiplicity is not divisible by p.
        let sf = f.div_exact(&f.gcd(&fp));
        for q in factor_squarefree(&sf) {
            let mut m = 0u32;
            while q.divides(&f) {
                f = f.div_exact(&q);
                m += 1;
            }
            merge_factor(&mut out, q, m);
        }
    }
    out
}

fn merge_factor(out: &mut Vec<(Poly, u32)>, q: Poly, m: u32) {
    if m == 0 {
        return;
    }
    for entry in out.iter_mut() {
        if entry.0 == q {
            entry.1 += m;
            return;
        }
    }
    out.push((q, m));
}

/// Factor a squarefree monic polynomial into monic irreducibles.
fn factor_squarefree(f: &Poly) -> Vec<Poly> {
    let p = f.p;
    match f.degree() {
        None | Some(0) => return vec![],
        Some(1) => return vec![f.clone()],
        Some(2) => {
            // Root search suffices in degree 2.
            let roots = f.roots();
            return if roots.is_empty() {
                vec![f.clone()]
            } else {
                let l1 = Poly::new(p, vec![subm(0, roots[0], p), 1]);
                let l2 = f.div_exact(&l1);
                vec![l1, l2]
            };
        }
        Some(_) => {}
    }
    // Distinct-degree splitting.
    let mut out = vec![];
    let mut rest = f.clone();
    let x = Poly::x(p);
    let mut h = x.clone();
    let mut d = 0usize;
    while let Some(deg) = rest.degree() {
        if deg == 0 {
            break;
        }
        d += 1;
        if 2 * d > deg {
            out.push(rest.clone());
            break;
        }
        h = h.pow_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() > Some(0) {
            out.extend(equal_degree_split(&g, d));
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
        }
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting with a deterministic seeded
/// stream, so factorization output is reproducible.
fn equal_degree_split(f: &Poly, d: usize) -> Vec<Poly> {
    let p = f.p;
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(
        0x5eed_0000 ^ p ^ (n as u64) << 8 ^ (d as u64) << 16,
    );
    loop {
        let a = Poly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().map_or(true, |da| da == 0) {
            continue;
        }
        let b = if p == 2 {
            // Trace map over F_2.
            let mut t = a.clone();
            let mut ai = a.clone();
            for _ in 1..(d as u64) {
                ai = ai.mul(&ai).rem(f);
                t = t.add(&ai);
            }
            t
        } else {
            let e = (powm_u128(p, d as u32) - 1) / 2;
            pow_mod_u128(&a, e, f).sub(&Poly::one(p))
        };
        let g = b.gcd(f);
        if let Some(dg) = g.degree() {
            if dg > 0 && dg < n {
                let mut out = equal_degree_split(&g, d);
                out.extend(equal_degree_split(&f.div_exact(&g), d));
                return out;
            }
        }
    }
}

fn powm_u128(p: u64, d: u32) -> u128 {
    (p as u128).pow(d)
}

fn pow_mod_u128(a: &Poly, mut e: u128, m: &Poly) -> Poly {
    let mut base = a.rem(m);
    let mut acc = Poly::one(a.p).rem(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base).rem(m);
        }
        base = base.mul(&base).rem(m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, coeffs: &[u64]) -> Poly {
        Poly::new(p, coeffs.to_vec())
    }

    #[test]
    fn divmod_roundtrip() {
        let f = poly(5, &[1, 2, 3, 4]);
        let d = poly(5, &[2, 1]);
        let (q, r) = f.divmod(&d);
        assert_eq!(q.mul(&d).add(&r), f);
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn factor_x2_plus_x_over_f2() {
        // Derived by trial division over all degree-1 monics.
        let f = poly(2, &[0, 1, 1]); // x^2 + x
        let factors = f.factor();
        assert_eq!(
            factors,
            vec![(poly(2, &[0, 1]), 1), (poly(2, &[1, 1]), 1)]
        );
    }

    #[test]
    fn factor_irreducible_quadratic_over_f2() {
        // No root in F_2 and degree 2, hence irreducible.
        let f = poly(2, &[1, 1, 1]);
        assert_eq!(f.factor(), vec![(f.clone(), 1)]);
        assert!(f.is_irreducible());
    }

    #[test]
    fn factor_x_over_f3() {
        let f = poly(3, &[0, 1]);
        assert_eq!(f.factor(), vec![(poly(3, &[0, 1]), 1)]);
    }

    #[test]
    fn factor_zero_rejected() {
        assert!(Poly::zero(2).factor_checked().is_err());
    }

    #[test]
    fn factor_with_multiplicities_and_frobenius_part() {
        // (x)^2 (x+1)^3 over F_2: derivative tricks must not lose factors.
        let f = poly(2, &[0, 1]).pow(2).mul(&poly(2, &[1, 1]).pow(3));
        let factors = f.factor();
        assert_eq!(
            factors,
            vec![(poly(2, &[0, 1]), 2), (poly(2, &[1, 1]), 3)]
        );
    }

    /// Brute-force factorization by trial division over all monic
    /// polynomials of increasing degree; the independent oracle for
    /// `factor` on small inputs.
    fn oracle_factor(f: &Poly) -> Vec<(Poly, u32)> {
        let p = f.p;
        let mut f = f.monic();
        let mut out: Vec<(Poly, u32)> = vec![];
        let mut deg = 1usize;
        while f.degree() > Some(0) {
            let trial_count = (p as usize).pow(deg as u32);
            let mut hit = false;
            for code in 0..trial_count {
                let mut coeffs = vec![0u64; deg + 1];
                let mut c = code;
                for slot in coeffs.iter_mut().take(deg) {
                    *slot = (c % p as usize) as u64;
                    c /= p as usize;
                }
                coeffs[deg] = 1;
                let cand = Poly::new(p, coeffs);
                if cand.divides(&f) {
                    let mut m = 0;
                    while cand.divides(&f) {
                        f = f.div_exact(&cand);
                        m += 1;
                    }
                    out.push((cand, m));
                    hit = true;
                    break;
                }
            }
            if !hit {
                deg += 1;
            }
        }
        out.sort_by(|a, b| {
            (a.0.coeffs.len(), &a.0.coeffs).cmp(&(b.0.coeffs.len(), &b.0.coeffs))
        });
        out
    }

    #[test]
    fn factor_matches_trial_division_exhaustively() {
        // All polynomials of degree <= 8 over F_2 and <= 5 over F_3:
        // output re-multiplies to the input and agrees with trial division.
        for (p, max_deg) in [(2u64, 8usize), (3, 5)] {
            for deg in 1..=max_deg {
                let count = (p as usize).pow(deg as u32);
                for code in 0..count {
                    let mut coeffs = vec![0u64; deg + 1];
                    let mut c = code;
                    for slot in coeffs.iter_mut().take(deg) {
                        *slot = (c % p as usize) as u64;
                        c /= p as usize;
                    }
                    coeffs[deg] = 1;
                    let f = Poly::new(p, coeffs);
                    let factors = f.factor();
                    let mut prod = Poly::one(p);
                    for (q, m) in &factors {
                        assert!(q.is_monic());
                        assert!(q.is_irreducible() || q.degree() == Some(1));
                        prod = prod.mul(&q.pow(*m));
                    }
                    assert_eq!(prod, f, "product of factors of {f}");
                    assert_eq!(factors, oracle_factor(&f), "factors of {f}");
                }
            }
        }
    }

    #[test]
    fn extended_gcd_bezout() {
        let f = poly(7, &[3, 0, 1, 2]);
        let g = poly(7, &[1, 5, 2]);
        let (d, s, t) = f.extended_gcd(&g);
        assert_eq!(s.mul(&f).add(&t.mul(&g)), d);
        assert!(d.divides(&f) && d.divides(&g));
    }
}
