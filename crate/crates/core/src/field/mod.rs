//! Exact arithmetic in prime fields `F_p`, extension fields `F_{p^k}`,
//! and the rational function field `F_p(x)`, plus dense matrices over any
//! of them.

mod matrix;
pub mod poly;

pub use matrix::Matrix;
pub use poly::Poly;
pub(crate) use poly::{addm, invm, is_prime, mulm, subm};

use std::sync::Arc;
use thiserror::Error;

/// Primes are capped so that exhaustive oracles stay feasible.
pub const MAX_PRIME: u64 = 251;
/// Extension degrees are capped for the same reason.
pub const MAX_EXT_DEGREE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("extension modulus must be monic")]
    NonMonicModulus,
    #[error("extension modulus {0} is reducible over F_{1}")]
    ReducibleModulus(String, u64),
    #[error("extension degree {0} exceeds the supported bound {MAX_EXT_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, PartialEq, Eq, Hash)]
enum FieldRepr {
    Prime { p: u64 },
    Extension { p: u64, modulus: Poly },
    RationalFunction { p: u64 },
}

/// A handle to one of the supported fields. Cheap to clone; equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Field(Arc<FieldRepr>);

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &*self.0 {
            FieldRepr::Prime { p } => write!(f, "F_{p}"),
            FieldRepr::Extension { p, modulus } => {
                write!(f, "F_{p}[t]/({modulus})")
            }
            FieldRepr::RationalFunction { p } => write!(f, "F_{p}(x)"),
        }
    }
}

/// A field element. Representations are kept normalized, so `==` is
/// mathematical equality:
/// prime-field values lie in `[0, p)`, extension coefficient vectors have
/// length equal to the modulus degree, and fractions are reduced with a
/// monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum El {
    Fp(u64),
    Ext(Vec<u64>),
    Fraction { num: Poly, den: Poly },
}

impl std::fmt::Debug for El {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            El::Fp(v) => write!(f, "{v}"),
            El::Ext(cs) => {
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
            El::Fraction { num, den } => {
                if den.is_one() {
                    write!(f, "{num}")
                } else {
                    write!(f, "({num})/({den})")
                }
            }
        }
    }
}

fn check_prime(p: u64) -> Result<(), FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p > MAX_PRIME {
        return Err(FieldError::PrimeTooLarge(p));
    }
    Ok(())
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        check_prime(p)?;
        Ok(Field(Arc::new(FieldRepr::Prime { p })))
    }

    /// `F_p[t]/(modulus)`; the modulus must be monic irreducible. A degree-1
    /// modulus is accepted and behaves like `F_p` with a one-coefficient
    /// representation.
    pub fn extension(p: u64, modulus: Poly) -> Result<Field, FieldError> {
        check_prime(p)?;
        if !modulus.is_monic() {
            return Err(FieldError::NonMonicModulus);
        }
        let deg = modulus.degree().unwrap_or(0);
        if deg == 0 {
            return Err(FieldError::ReducibleModulus(modulus.to_string(), p));
        }
        if deg > MAX_EXT_DEGREE {
            return Err(FieldError::DegreeTooLarge(deg));
        }
        if !modulus.is_irreducible() {
            return Err(FieldError::ReducibleModulus(modulus.to_string(), p));
        }
        Ok(Field(Arc::new(FieldRepr::Extension { p, modulus })))
    }

    pub fn rational_function(p: u64) -> Result<Field, FieldError> {
        check_prime(p)?;
        Ok(Field(Arc::new(FieldRepr::RationalFunction { p })))
    }

    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            FieldRepr::Prime { p }
            | FieldRepr::Extension { p, .. }
            | FieldRepr::RationalFunction { p } => *p,
        }
    }

    pub fn extension_modulus(&self) -> Option<&Poly> {
        match &*self.0 {
            FieldRepr::Extension { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    pub fn is_rational_function(&self) -> bool {
        matches!(&*self.0, FieldRepr::RationalFunction { .. })
    }

    /// Number of elements; `None` for the infinite rational function field.
    pub fn size(&self) -> Option<u128> {
        match &*self.0 {
            FieldRepr::Prime { p } => Some(*p as u128),
            FieldRepr::Extension { p, modulus } => {
                Some((*p as u128).pow(modulus.degree().unwrap() as u32))
            }
            FieldRepr::RationalFunction { .. } => None,
        }
    }

    pub fn zero(&self) -> El {
        match &*self.0 {
            FieldRepr::Prime { .. } => El::Fp(0),
            FieldRepr::Extension { modulus, .. } => {
                El::Ext(vec![0; modulus.degree().unwrap()])
            }
            FieldRepr::RationalFunction { p } => El::Fraction {
                num: Poly::zero(*p),
                den: Poly::one(*p),
            },
        }
    }

    pub fn one(&self) -> El {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> El {
        let p = self.characteristic();
        let v = v.rem_euclid(p as i64) as u64;
        match &*self.0 {
            FieldRepr::Prime { .. } => El::Fp(v),
            FieldRepr::Extension { modulus, .. } => {
                let mut cs = vec![0; modulus.degree().unwrap()];
                cs[0] = v;
                El::Ext(cs)
            }
            FieldRepr::RationalFunction { p } => El::Fraction {
                num: Poly::constant(*p, v),
                den: Poly::one(*p),
            },
        }
    }

    /// The class of `t` in an extension field, or the element `x` of
    /// `F_p(x)`. Panics on a prime field of degree-1 view; use on
    /// extension/rational-function handles.
    pub fn generator(&self) -> El {
        match &*self.0 {
            FieldRepr::Prime { .. } => panic!("prime field has no generator element"),
            FieldRepr::Extension { p, modulus } => {
                let deg = modulus.degree().unwrap();
                if deg == 1 {
                    // t is congruent to a constant mod a degree-1 modulus.
                    let c = subm(0, modulus.coeff(0), *p);
                    El::Ext(vec![c])
                } else {
                    let mut cs = vec![0; deg];
                    cs[1] = 1;
                    El::Ext(cs)
                }
            }
            FieldRepr::RationalFunction { p } => El::Fraction {
                num: Poly::x(*p),
                den: Poly::one(*p),
            },
        }
    }

    /// Embed a polynomial representative into the field: reduction mod the
    /// modulus (extension), evaluation of the class of x (rational function),
    /// or the constant term rule for a prime field (degree-0 only).
    pub fn from_poly(&self, f: &Poly) -> El {
        match &*self.0 {
            FieldRepr::Prime { .. } => {
                assert!(f.degree().map_or(true, |d| d == 0));
                El::Fp(f.coeff(0))
            }
            FieldRepr::Extension { modulus, .. } => {
                let r = f.rem(modulus);
                let mut cs = vec![0; modulus.degree().unwrap()];
                for (i, slot) in cs.iter_mut().enumerate() {
                    *slot = r.coeff(i);
                }
                El::Ext(cs)
            }
            FieldRepr::RationalFunction { p } => El::Fraction {
                num: f.clone(),
                den: Poly::one(*p),
            },
        }
    }

    pub fn fraction(&self, num: Poly, den: Poly) -> El {
        let p = self.characteristic();
        assert!(self.is_rational_function());
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() || num.is_zero() {
            if num.is_zero() {
                (Poly::zero(p), Poly::one(p))
            } else {
                (num, den)
            }
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let lc = den.leading();
        if lc != 1 && !den.is_zero() {
            let inv = invm(lc, p);
            den = den.scale(inv);
            num = num.scale(inv);
        }
        El::Fraction { num, den }
    }

    pub fn is_zero(&self, a: &El) -> bool {
        match a {
            El::Fp(v) => *v == 0,
            El::Ext(cs) => cs.iter().all(|&c| c == 0),
            El::Fraction { num, .. } => num.is_zero(),
        }
    }

    pub fn add(&self, a: &El, b: &El) -> El {
        let p = self.characteristic();
        match (a, b) {
            (El::Fp(x), El::Fp(y)) => El::Fp(addm(*x, *y, p)),
            (El::Ext(x), El::Ext(y)) => {
                El::Ext(x.iter().zip(y).map(|(&u, &v)| addm(u, v, p)).collect())
            }
            (El::Fraction { num: n1, den: d1 }, El::Fraction { num: n2, den: d2 }) => {
                self.fraction(n1.mul(d2).add(&n2.mul(d1)), d1.mul(d2))
            }
            _ => panic!("mixed element kinds"),
        }
    }

    pub fn neg(&self, a: &El) -> El {
        let p = self.characteristic();
        match a {
            El::Fp(x) => El::Fp(subm(0, *x, p)),
            El::Ext(x) => El::Ext(x.iter().map(|&u| subm(0, u, p)).collect()),
            El::Fraction { num, den } => El::Fraction {
                num: num.neg(),
                den: den.clone(),
            },
        }
    }

    pub fn sub(&self, a: &El, b: &El) -> El {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &El, b: &El) -> El {
        let p = self.characteristic();
        match (a, b) {
            (El::Fp(x), El::Fp(y)) => El::Fp(mulm(*x, *y, p)),
            (El::Ext(x), El::Ext(y)) => {
                let modulus = self.extension_modulus().expect("extension element");
                let prod = Poly::new(p, x.clone()).mul(&Poly::new(p, y.clone()));
                self.from_poly(&prod.rem(modulus))
            }
            (El::Fraction { num: n1, den: d1 }, El::Fraction { num: n2, den: d2 }) => {
                self.fraction(n1.mul(n2), d1.mul(d2))
            }
            _ => panic!("mixed element kinds"),
        }
    }

    pub fn inv(&self, a: &El) -> Result<El, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.characteristic();
        Ok(match a {
            El::Fp(x) => El::Fp(invm(*x, p)),
            El::Ext(x) => {
                let modulus = self.extension_modulus().expect("extension element");
                let (g, s, _) = Poly::new(p, x.clone()).extended_gcd(modulus);
                debug_assert!(g.is_one());
                self.from_poly(&s)
            }
            El::Fraction { num, den } => self.fraction(den.clone(), num.clone()),
        })
    }

    pub fn div(&self, a: &El, b: &El) -> Result<El, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &El, mut e: u128) -> El {
        let mut acc = self.one();
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

    /// All elements of a finite field in a canonical order (coefficient
    /// vectors counted little-endian). Panics on the rational function field.
    pub fn elements(&self) -> Vec<El> {
        let p = self.characteristic();
        match &*self.0 {
            FieldRepr::Prime { .. } => (0..p).map(El::Fp).collect(),
            FieldRepr::Extension { modulus, .. } => {
                let deg = modulus.degree().unwrap();
                let total = (p as usize).pow(deg as u32);
                (0..total)
                    .map(|mut code| {
                        let mut cs = vec![0u64; deg];
                        for slot in cs.iter_mut() {
                            *slot = (code % p as usize) as u64;
                            code /= p as usize;
                        }
                        El::Ext(cs)
                    })
                    .collect()
            }
            FieldRepr::RationalFunction { .. } => {
                panic!("cannot enumerate the rational function field")
            }
        }
    }

    /// First `count` pairwise distinct elements in canonical order. Works
    /// for the rational function field too (powers-of-x ladder: 0, 1, x,
    /// x^2, ...).
    pub fn first_elements(&self, count: usize) -> Option<Vec<El>> {
        match &*self.0 {
            FieldRepr::RationalFunction { p } => {
                let mut out = vec![self.zero()];
                let mut k = 0usize;
                while out.len() < count {
                    out.push(El::Fraction {
                        num: Poly::monomial(*p, 1, k),
                        den: Poly::one(*p),
                    });
                    k += 1;
                }
                out.truncate(count);
                Some(out)
            }
            _ => {
                if (count as u128) > self.size().unwrap() {
                    return None;
                }
                Some(self.elements().into_iter().take(count).collect())
            }
        }
    }

    pub fn format_el(&self, a: &El) -> String {
        format!("{a:?}")
    }
}
