//! Arithmetic in GF(p^n) with elements encoded as integer codes.
//!
//! An element code in `[0, q)` is read as a polynomial over GF(p): the
//! coefficient of `x^i` is the i-th base-p digit of the code (little-endian).
//! All operation tables are precomputed at construction, so arithmetic is a
//! table lookup and a `Field` can be shared freely between threads.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order for which tables are precomputed.
pub const MAX_ORDER: u32 = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("n must be positive")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("modulus code {0} does not encode a monic polynomial of degree {1}")]
    BadModulusDegree(u32, u32),
    #[error("modulus code {0} encodes a reducible polynomial")]
    ReducibleModulus(u32),
    #[error("cannot parse field designation {0:?}")]
    BadDesignation(String),
}

fn is_prime(m: u32) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomials over GF(p) packed as base-p digit codes.
/// Codes up to `p^(n+1)` fit comfortably in u64 for the supported orders.
fn poly_degree(code: u64, p: u64) -> Option<u32> {
    if code == 0 {
        return None;
    }
    let mut deg = 0;
    let mut c = code;
    while c >= p {
        c /= p;
        deg += 1;
    }
    Some(deg)
}

fn poly_coeff(code: u64, p: u64, i: u32) -> u64 {
    (code / p.pow(i)) % p
}

fn poly_add(a: u64, b: u64, p: u64) -> u64 {
    let deg = poly_degree(a, p).unwrap_or(0).max(poly_degree(b, p).unwrap_or(0));
    let mut out = 0;
    for i in (0..=deg).rev() {
        out = out * p + (poly_coeff(a, p, i) + poly_coeff(b, p, i)) % p;
    }
    out
}

fn poly_mul(a: u64, b: u64, p: u64) -> u64 {
    let (da, db) = match (poly_degree(a, p), poly_degree(b, p)) {
        (Some(da), Some(db)) => (da, db),
        _ => return 0,
    };
    let mut out = 0;
    for i in (0..=(da + db)).rev() {
        let mut c = 0;
        for j in 0..=i.min(da) {
            if i - j <= db {
                c += poly_coeff(a, p, j) * poly_coeff(b, p, i - j);
            }
        }
        out = out * p + c % p;
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: u64, m: u64, p: u64) -> u64 {
    let dm = poly_degree(m, p).expect("modulus is nonzero");
    let mut r = a;
    while let Some(dr) = poly_degree(r, p) {
        if dr < dm {
            break;
        }
        // r -= lead(r) * x^(dr-dm) * m, using that m is monic.
        let lead = poly_coeff(r, p, dr);
        let shift = p.pow(dr - dm);
        let sub = poly_mul(poly_mul(m, shift, p), lead, p);
        // subtraction = addition of (p-1)*sub digitwise
        let neg = poly_mul(sub, 1, p); // copy
        let mut negated = 0;
        let dn = poly_degree(neg, p).unwrap_or(0);
        for i in (0..=dn).rev() {
            negated = negated * p + (p - poly_coeff(neg, p, i)) % p;
        }
        r = poly_add(r, negated, p);
    }
    r
}

fn poly_is_irreducible(m: u64, deg: u32, p: u64) -> bool {
    if poly_degree(m, p) != Some(deg) || poly_coeff(m, p, deg) != 1 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let lo = p.pow(d);
        let hi = 2 * lo;
        for cand in lo..hi {
            if poly_rem(m, cand, p) == 0 {
                return false;
            }
        }
    }
    true
}

/// Smallest-code monic irreducible polynomial of degree `n` over GF(p).
/// Reproduces the conventional small-field moduli: GF(4) uses x^2+x+1,
/// GF(8) uses x^3+x+1 and GF(9) uses x^2+1.
fn default_modulus(p: u64, n: u32) -> u64 {
    let lo = p.pow(n);
    (lo..2 * lo)
        .find(|&m| poly_is_irreducible(m, n, p))
        .expect("an irreducible polynomial of every degree exists")
}

/// A concrete finite field GF(p^n) with fully tabulated arithmetic.
pub struct Field {
    p: u16,
    n: u32,
    q: u16,
    modulus: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(GF({}^{}), poly={})", self.p, self.n, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(p: u32, n: u32, modulus: Option<u32>) -> Result<Arc<Field>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(n).filter(|&q| q <= MAX_ORDER as u64)
            .ok_or(FieldError::OrderTooLarge((p as u64).saturating_pow(n)))?;
        let pp = p as u64;
        let modulus = match modulus {
            _ if n == 1 => pp, // ignored; store x - 0 placeholderless "x" so reduction is mod p
            Some(m) => {
                let m = m as u64;
                if poly_degree(m, pp) != Some(n) || poly_coeff(m, pp, n) != 1 {
                    return Err(FieldError::BadModulusDegree(m as u32, n));
                }
                if !poly_is_irreducible(m, n, pp) {
                    return Err(FieldError::ReducibleModulus(m as u32));
                }
                m
            }
            None => default_modulus(pp, n),
        };

        let q16 = q as u16;
        let mut add = vec![0u16; (q * q) as usize];
        let mut mul = vec![0u16; (q * q) as usize];
        let mut neg = vec![0u16; q as usize];
        let mut inv = vec![0u16; q as usize];
        for a in 0..q {
            for b in 0..q {
                add[(a * q + b) as usize] = poly_add(a, b, pp) as u16;
                mul[(a * q + b) as usize] = poly_rem(poly_mul(a, b, pp), modulus, pp) as u16;
            }
        }
        for a in 0..q {
            for b in 0..q {
                if add[(a * q + b) as usize] == 0 {
                    neg[a as usize] = b as u16;
                }
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u16;
                }
            }
        }
        Ok(Arc::new(Field {
            p: p as u16,
            n,
            q: q16,
            modulus: modulus as u32,
            add,
            mul,
            neg,
            inv,
        }))
    }

    /// Parse a field designation: either `"q"` (default modulus) or
    /// `"p^n/modulusCode"`.
    pub fn parse(spec: &str) -> Result<Arc<Field>, FieldError> {
        let bad = || FieldError::BadDesignation(spec.to_string());
        if let Some((base, modulus)) = spec.split_once('/') {
            let (p, n) = base.split_once('^').ok_or_else(bad)?;
            let p: u32 = p.parse().map_err(|_| bad())?;
            let n: u32 = n.parse().map_err(|_| bad())?;
            let m: u32 = modulus.parse().map_err(|_| bad())?;
            Field::new(p, n, Some(m))
        } else if let Some((p, n)) = spec.split_once('^') {
            let p: u32 = p.parse().map_err(|_| bad())?;
            let n: u32 = n.parse().map_err(|_| bad())?;
            Field::new(p, n, None)
        } else {
            let q: u32 = spec.parse().map_err(|_| bad())?;
            let (p, n) = factor_prime_power(q).ok_or_else(bad)?;
            Field::new(p, n, None)
        }
    }

    pub fn p(&self) -> u16 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn order(&self) -> u16 {
        self.q
    }
    pub fn modulus_code(&self) -> u32 {
        if self.n == 1 {
            0
        } else {
            self.modulus
        }
    }

    /// All element codes in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "zero has no multiplicative inverse");
        self.inv[a as usize]
    }

    pub fn checked_inv(&self, a: u16) -> Option<u16> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn div(&self, a: u16, b: u16) -> u16 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        let mut acc = 1;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Sum of all q elements; zero exactly when q > 2.
    pub fn sum_all_elements(&self) -> u16 {
        self.elements().fold(0, |acc, e| self.add(acc, e))
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u16) -> u32 {
        assert!(a != 0);
        let mut x = a;
        let mut ord = 1;
        while x != 1 {
            x = self.mul(x, a);
            ord += 1;
        }
        ord
    }

    /// The element of smallest code with multiplicative order q - 1.
    pub fn primitive_element(&self) -> u16 {
        (1..self.q)
            .find(|&a| self.element_order(a) == self.q as u32 - 1)
            .expect("every finite field has a primitive element")
    }

    /// Element code from base-p coefficient digits (little-endian).
    pub fn encode(&self, coeffs: &[u16]) -> u16 {
        coeffs
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * self.p as u32 + c as u32) as u16
    }

    /// Base-p coefficient digits of a code, little-endian, length n.
    pub fn decode(&self, code: u16) -> Vec<u16> {
        let mut c = code;
        (0..self.n)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }
}

fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|&d| q % d == 0)?;
    let mut n = 0;
    let mut m = q;
    while m % p == 0 {
        m /= p;
        n += 1;
    }
    (m == 1 && is_prime(p)).then_some((p, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli_match_convention() {
        assert_eq!(Field::new(2, 2, None).unwrap().modulus_code(), 7); // x^2+x+1
        assert_eq!(Field::new(2, 3, None).unwrap().modulus_code(), 11); // x^3+x+1
        assert_eq!(Field::new(3, 2, None).unwrap().modulus_code(), 10); // x^2+1
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 = x * x over GF(2)
        assert_eq!(
            Field::new(2, 2, Some(4)).unwrap_err(),
            FieldError::ReducibleModulus(4)
        );
        assert_eq!(Field::new(4, 1, None).unwrap_err(), FieldError::NotPrime(4));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::new(5, 1, None).unwrap();
        assert_eq!(f.add(3, 4), 2);
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.inv(1), 1);
        assert_eq!(f.inv(2), 3);
    }

    #[test]
    fn gf4_multiplication() {
        // x * x = x + 1 mod x^2+x+1, i.e. 2 * 2 = 3.
        // Oracle: schoolbook polynomial multiply then reduce.
        let f = Field::new(2, 2, None).unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(poly_rem(poly_mul(2, 2, 2), 7, 2), 3);
    }

    #[test]
    fn sum_of_elements() {
        for q in [3u32, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::parse(&q.to_string()).unwrap();
            assert_eq!(f.sum_all_elements(), 0, "q={q}");
        }
        assert_eq!(Field::new(2, 1, None).unwrap().sum_all_elements(), 1);
    }

    #[test]
    fn primitive_elements() {
        // Oracle: brute-force multiplicative order over all nonzero codes.
        let f7 = Field::new(7, 1, None).unwrap();
        for a in 1..7u16 {
            let ord = f7.element_order(a);
            if a < 3 {
                assert_ne!(ord, 6, "3 must be the smallest primitive element");
            }
        }
        assert_eq!(f7.primitive_element(), 3);
        assert_eq!(Field::new(2, 1, None).unwrap().primitive_element(), 1);
        // 2^3-1 = 7 is prime, so x itself (code 2) is primitive in GF(8).
        assert_eq!(Field::new(2, 3, Some(11)).unwrap().primitive_element(), 2);
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::parse(&q.to_string()).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                    assert_eq!(f.pow(a, q as u64 - 1), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.encode(&f.decode(a)), a);
            }
        }
    }

    #[test]
    fn parse_designations() {
        let f = Field::parse("3^2/10").unwrap();
        assert_eq!(f.order(), 9);
        assert_eq!(f.modulus_code(), 10);
        assert_eq!(Field::parse("9").unwrap().order(), 9);
        assert_eq!(Field::parse("11").unwrap().order(), 11);
        assert!(Field::parse("6").is_err());
        assert!(Field::parse("banana").is_err());
    }
}
