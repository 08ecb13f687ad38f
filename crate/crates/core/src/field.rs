//! Arithmetic in GF(p^m).
//!
//! Elements are encoded as the integer `sum c_i p^i` of their coefficient
//! sequence, so GF(2) is plain bits and GF(p) is plain residues. A
//! [`FieldCtx`] owns the modulus and full addition/multiplication tables
//! (fields are capped at 512 elements), which are filled from the
//! polynomial routines in this module.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u32 = 512;

/// An element of GF(p^m), as its base-p coefficient encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn enc(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    m: u32,
    q: u32,
    modulus: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

/// Field context: characteristic, degree and modulus polynomial.
///
/// Cheap to clone; equality and hashing only look at `(p, m, modulus)`.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<Tables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p())
            .field("m", &self.m())
            .field("modulus", &self.modulus())
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.m() == other.m() && self.modulus() == other.modulus()
    }
}

impl Eq for FieldCtx {}

impl Hash for FieldCtx {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.p(), self.m(), self.modulus()).hash(state);
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q` into `(p, m)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn digits(mut enc: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = enc % p;
        enc /= p;
    }
    out
}

fn undigits(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn degree(coeffs: &[u32]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p)
        .find(|&b| a * b % p == 1)
        .expect("nonzero residue mod prime")
}

/// Remainder of `num` divided by `den` over F_p (coefficients low-first).
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let dd = degree(den).expect("division by zero polynomial");
    let lead_inv = inv_mod(den[dd], p);
    let mut r = num.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < dd {
            break;
        }
        let factor = r[dr] * lead_inv % p;
        let shift = dr - dd;
        for (i, &c) in den[..=dd].iter().enumerate() {
            r[i + shift] = (r[i + shift] + p - factor * c % p) % p;
        }
    }
    r
}

/// Product of two residues reduced modulo the monic degree-`m` modulus.
pub fn poly_mul_mod(a: u32, b: u32, p: u32, m: u32, modulus: u32) -> u32 {
    let m = m as usize;
    let ad = digits(a, p, m);
    let bd = digits(b, p, m);
    let mut prod = vec![0u32; 2 * m];
    for (i, &x) in ad.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in bd.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let md = digits(modulus, p, m + 1);
    let r = poly_rem(&prod, &md, p);
    undigits(&r[..m], p)
}

/// Trial division by every monic polynomial of degree `1..=m/2`.
pub fn is_irreducible(modulus: u32, p: u32, m: u32) -> bool {
    let md = digits(modulus, p, m as usize + 1);
    for d in 1..=(m / 2) {
        let lead = p.pow(d);
        for low in 0..lead {
            let cand = digits(lead + low, p, d as usize + 1);
            if degree(&poly_rem(&md, &cand, p)).is_none() {
                return false;
            }
        }
    }
    true
}

/// Smallest-encoding monic irreducible polynomial of degree `m` over F_p.
pub fn default_modulus(p: u32, m: u32) -> u32 {
    let lead = p.pow(m);
    (lead..2 * lead)
        .find(|&enc| is_irreducible(enc, p, m))
        .expect("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    /// Builds GF(p^m) with the given modulus encoding.
    pub fn new(p: u32, m: u32, modulus: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Field(format!("characteristic {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::Field("extension degree must be >= 1".into()));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| {
                Error::Field(format!("field order {p}^{m} exceeds {MAX_FIELD_ORDER}"))
            })?;
        if modulus < q || modulus >= 2 * q {
            return Err(Error::Field(format!(
                "modulus {modulus} is not a monic polynomial of degree {m} over F_{p}"
            )));
        }
        if !is_irreducible(modulus, p, m) {
            return Err(Error::Field(format!(
                "modulus {modulus} is reducible over F_{p}"
            )));
        }
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for a in 0..q {
            let ad = digits(a, p, m as usize);
            for b in 0..q {
                let bd = digits(b, p, m as usize);
                let sum: Vec<u32> = ad.iter().zip(&bd).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum, p) as u16;
                mul[(a * q + b) as usize] = poly_mul_mod(a, b, p, m, modulus) as u16;
            }
        }
        let mut neg = vec![0u16; qs];
        let mut inv = vec![0u16; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u16;
            if a != 0 {
                inv[a] = (1..qs)
                    .find(|&b| mul[a * qs + b] == 1)
                    .ok_or_else(|| Error::Field(format!("element {a} has no inverse")))?
                    as u16;
            }
        }
        Ok(FieldCtx {
            inner: Arc::new(Tables {
                p,
                m,
                q,
                modulus,
                add,
                mul,
                neg,
                inv,
            }),
        })
    }

    /// GF(q) with the default modulus for `q`.
    pub fn with_order(q: u32) -> Result<Self> {
        let (p, m) =
            prime_power(q).ok_or_else(|| Error::Field(format!("{q} is not a prime power")))?;
        if q > MAX_FIELD_ORDER {
            return Err(Error::Field(format!(
                "field order {q} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        Self::new(p, m, default_modulus(p, m))
    }

    /// GF(q) with an explicit modulus encoding, or the default when `None`.
    pub fn with_order_and_modulus(q: u32, modulus: Option<u32>) -> Result<Self> {
        match modulus {
            None => Self::with_order(q),
            Some(poly) => {
                let (p, m) = prime_power(q)
                    .ok_or_else(|| Error::Field(format!("{q} is not a prime power")))?;
                Self::new(p, m, poly)
            }
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.inner.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.inner.modulus
    }

    /// Checked element constructor.
    pub fn element(&self, enc: u32) -> Result<FieldElement> {
        if enc < self.q() {
            Ok(FieldElement(enc as u16))
        } else {
            Err(Error::Field(format!(
                "element encoding {enc} out of range for GF({})",
                self.q()
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q() as u16).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.inner.add[a.0 as usize * self.q() as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.inner.mul[a.0 as usize * self.q() as usize + b.0 as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(FieldElement(self.inner.inv[a.0 as usize]))
        }
    }
}

/// Product of `a` and `b` in the field described by `ctx`.
pub fn field_mul(a: FieldElement, b: FieldElement, ctx: &FieldCtx) -> FieldElement {
    ctx.mul(a, b)
}

/// Multiplicative inverse; fails on zero.
pub fn field_inv(a: FieldElement, ctx: &FieldCtx) -> Result<FieldElement> {
    ctx.inv(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(x: u16) -> FieldElement {
        FieldElement(x)
    }

    #[test]
    fn small_products() {
        let f2 = FieldCtx::with_order(2).unwrap();
        assert_eq!(field_mul(fe(1), fe(1), &f2), fe(1));
        let f4 = FieldCtx::new(2, 2, 7).unwrap();
        // x * x = x + 1
        assert_eq!(field_mul(fe(2), fe(2), &f4), fe(3));
        for a in f4.elements() {
            assert_eq!(field_mul(a, FieldElement::ZERO, &f4), FieldElement::ZERO);
        }
    }

    #[test]
    fn inverses() {
        let f2 = FieldCtx::with_order(2).unwrap();
        assert_eq!(field_inv(fe(1), &f2).unwrap(), fe(1));
        let f4 = FieldCtx::with_order(4).unwrap();
        assert_eq!(field_inv(fe(2), &f4).unwrap(), fe(3));
        let f5 = FieldCtx::with_order(5).unwrap();
        assert_eq!(field_inv(fe(2), &f5).unwrap(), fe(3));
        assert_eq!(field_inv(FieldElement::ZERO, &f5), Err(Error::ZeroInverse));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldCtx::with_order(4).unwrap().modulus(), 7);
        assert_eq!(FieldCtx::with_order(8).unwrap().modulus(), 11);
        assert_eq!(FieldCtx::with_order(9).unwrap().modulus(), 10);
        assert_eq!(FieldCtx::with_order(2).unwrap().modulus(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldCtx::new(4, 1, 4).is_err());
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(FieldCtx::new(2, 2, 5).is_err());
        // not degree 2
        assert!(FieldCtx::new(2, 2, 3).is_err());
        assert!(FieldCtx::with_order(6).is_err());
        assert!(FieldCtx::with_order(1024).is_err());
        assert!(FieldCtx::with_order(4).unwrap().element(4).is_err());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2, 3, 4, 5, 8] {
            let f = FieldCtx::with_order(q).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)), "q={q}");
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)), "q={q}");
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "q={q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn no_zero_divisors_in_gf9() {
        let f = FieldCtx::with_order(9).unwrap();
        for a in f.elements().skip(1) {
            for b in f.elements().skip(1) {
                assert!(!f.mul(a, b).is_zero());
            }
        }
    }
}
