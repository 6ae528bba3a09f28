//! Finite fields GF(p^k) in a polynomial basis.
//!
//! Elements are stored as their integer encoding `Σ c_i p^i`, where `c_i` are
//! the coefficients of the representing polynomial of degree `< k` (constant
//! term least significant). The modulus is the monic irreducible polynomial of
//! degree `k` with the smallest such encoding, so the construction is fully
//! deterministic. Multiplication goes through discrete log tables built once
//! per field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element of some [`GaloisField`], stored by encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
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

/// Splits `q = p^k`, returning `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// All prime powers in `[2, q_max]`, ascending.
pub fn prime_powers_up_to(q_max: u64) -> Vec<u64> {
    (2..=q_max).filter(|&q| prime_power(q).is_some()).collect()
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over GF(p), lowest degree first, no trailing zeros.
mod poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (p as i64, a as i64);
        while new_r != 0 {
            let quot = r / new_r;
            (t, new_t) = (new_t, t - quot * new_t);
            (r, new_r) = (new_r, r - quot * new_r);
        }
        t.rem_euclid(p as i64) as u32
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        let p64 = p as u64;
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = (*r.last().unwrap() as u64 * lead_inv) % p64;
            for (i, &mi) in m.iter().enumerate() {
                let sub = (c * mi as u64) % p64;
                let slot = &mut r[shift + i];
                *slot = ((*slot as u64 + p64 - sub) % p64) as u32;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
            }
        }
        rem(&prod.into_iter().map(|c| c as u32).collect::<Vec<_>>(), m, p)
    }

    pub fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        rem(&acc, m, p)
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`p` digits of `index`.
    pub fn monic_from_index(index: u64, deg: usize, p: u32) -> Vec<u32> {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut rest = index;
        for _ in 0..deg {
            coeffs.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        coeffs.push(1);
        coeffs
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d as u32);
            for idx in 0..count {
                let g = monic_from_index(idx, d, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// The finite field GF(p^k).
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a fixed primitive element `g`, doubled to `2(q-1)`
    /// entries so sums of two logs index directly.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    generator: Fe,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Builds GF(p^k). Shorthand for [`GaloisField::new`].
pub fn make_field(p: u64, k: u32) -> Result<GaloisField> {
    GaloisField::new(p, k)
}

impl GaloisField {
    #[allow(clippy::needless_range_loop)]
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || (p as f64).powi(k as i32) > MAX_FIELD_SIZE as f64 {
            return Err(Error::FieldOutOfRange { p, k });
        }
        let q64 = p.pow(k);
        if q64 > MAX_FIELD_SIZE {
            return Err(Error::FieldOutOfRange { p, k });
        }
        let (p32, q) = (p as u32, q64 as u32);
        let modulus = (0..(q64))
            .map(|idx| poly::monic_from_index(idx, k as usize, p32))
            .find(|f| poly::is_irreducible(f, p32))
            .expect("an irreducible polynomial of every degree exists");

        let order = q64 - 1;
        let factors = prime_factors(order);
        let is_primitive = |g: &[u32]| {
            factors
                .iter()
                .all(|&r| poly::pow_mod(g, order / r, &modulus, p32) != [1])
        };
        let digits_of = |enc: u32| -> Vec<u32> {
            let mut rest = enc;
            let mut out = Vec::with_capacity(k as usize);
            for _ in 0..k {
                out.push(rest % p32);
                rest /= p32;
            }
            poly::trim(out)
        };
        let encode = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p32 + d) };

        // X first: multiplying by X is a shift, which keeps table construction
        // linear in q when it happens to be primitive.
        let gen_enc = if q == 2 {
            1
        } else if k > 1 && is_primitive(&digits_of(p32)) {
            p32
        } else {
            (2..q)
                .find(|&e| is_primitive(&digits_of(e)))
                .expect("the multiplicative group is cyclic")
        };
        let g = digits_of(gen_enc);

        let n = order as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![1u32];
        for i in 0..n {
            let e = encode(&cur);
            exp[i] = e;
            log[e as usize] = i as u32;
            cur = poly::mul_mod(&cur, &g, &modulus, p32);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }

        let neg = (0..q)
            .map(|e| {
                let d = digits_of(e);
                let nd: Vec<u32> = d.iter().map(|&c| (p32 - c) % p32).collect();
                encode(&nd)
            })
            .collect();

        Ok(GaloisField {
            p: p32,
            k,
            q,
            modulus,
            exp,
            log,
            neg,
            generator: Fe(gen_enc),
        })
    }

    /// Builds GF(q) from a prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, k)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the monic modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }
    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    pub fn elem(&self, encoding: u64) -> Result<Fe> {
        if encoding >= self.q as u64 {
            return Err(Error::InvalidEncoding { value: encoding, q: self.q });
        }
        Ok(Fe(encoding as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameters(format!(
                "coefficient vector {coeffs:?} is not reduced for GF({}^{})",
                self.p, self.k
            )));
        }
        Ok(Fe(coeffs.iter().rev().fold(0, |acc, &d| acc * self.p + d)))
    }

    /// Length-`k` coefficient vector, constant term first.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut rest = a.0;
        (0..self.k)
            .map(|_| {
                let d = rest % self.p;
                rest /= self.p;
                d
            })
            .collect()
    }

    /// Every element, in ascending encoding.
    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Fe> + ExactSizeIterator {
        (0..self.q).map(Fe)
    }

    pub fn nonzero(&self) -> impl DoubleEndedIterator<Item = Fe> + ExactSizeIterator {
        (1..self.q).map(Fe)
    }

    /// Wraps an element for operator-style arithmetic.
    pub fn wrap(&self, a: Fe) -> FieldElement<'_> {
        FieldElement { field: self, value: a }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        Fe(out)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[s as usize])
    }

    #[inline]
    pub fn sqr(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a.0 as usize];
        let n = self.q - 1;
        Ok(Fe(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply exponentiation; `pow(0, 0) = 1`.
    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut acc = Fe::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.sqr(base);
            e >>= 1;
        }
        acc
    }

    /// Discrete logarithm to the field's generator; `None` for zero.
    pub fn log(&self, a: Fe) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    /// `g^i` for the field's generator `g`.
    pub fn exp(&self, i: u64) -> Fe {
        Fe(self.exp[(i % (self.q as u64 - 1)) as usize])
    }

    /// Quadratic character, with `chi2(0) = 0`.
    pub fn chi2(&self, a: Fe) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        Ok(match self.log(a) {
            None => 0,
            Some(l) if l % 2 == 0 => 1,
            Some(_) => -1,
        })
    }

    pub fn is_square(&self, a: Fe) -> Result<bool> {
        Ok(self.chi2(a)? >= 0)
    }

    /// Both square roots, smaller encoding first, or `None` for a non-residue.
    ///
    /// Roots are read off the log table rather than found by search; the
    /// result is the same pair.
    pub fn sqrt(&self, a: Fe) -> Result<Option<(Fe, Fe)>> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        match self.log(a) {
            None => Ok(Some((Fe::ZERO, Fe::ZERO))),
            Some(l) if l % 2 == 1 => Ok(None),
            Some(l) => {
                let r = Fe(self.exp[(l / 2) as usize]);
                let s = self.neg(r);
                Ok(Some(if r <= s { (r, s) } else { (s, r) }))
            }
        }
    }

    /// Absolute trace `Σ_{i<k} a^(p^i)`, returned as a residue mod p.
    pub fn trace(&self, a: Fe) -> u32 {
        let mut acc = Fe::ZERO;
        let mut conj = a;
        for _ in 0..self.k {
            acc = self.add(acc, conj);
            conj = self.pow(conj, self.p as u64);
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    /// `{x : x^3 = 1}`, ascending.
    pub fn third_roots_of_unity(&self) -> Vec<Fe> {
        let n = self.q - 1;
        if !n.is_multiple_of(3) {
            return vec![Fe::ONE];
        }
        let mut roots: Vec<Fe> = (0..3).map(|i| Fe(self.exp[(i * n / 3) as usize])).collect();
        roots.sort();
        roots
    }

    pub fn cube_classes(&self) -> CubeClasses<'_> {
        CubeClasses { field: self }
    }
}

/// Cosets of the cubes in the multiplicative group.
#[derive(Clone, Copy, Debug)]
pub struct CubeClasses<'f> {
    field: &'f GaloisField,
}

impl<'f> CubeClasses<'f> {
    fn splits(&self) -> bool {
        (self.field.q - 1).is_multiple_of(3)
    }

    pub fn is_cube(&self, a: Fe) -> bool {
        match self.field.log(a) {
            None => true,
            Some(l) => !self.splits() || l % 3 == 0,
        }
    }

    /// All `y` with `y^3 = a`, ascending.
    pub fn cube_roots(&self, a: Fe) -> Vec<Fe> {
        let f = self.field;
        let n = f.q - 1;
        let Some(l) = f.log(a) else {
            return vec![Fe::ZERO];
        };
        if !self.splits() {
            // 3 is invertible mod q-1
            let inv3 = poly::inv_mod(3 % n.max(1), n.max(1)) as u64;
            let r = if n == 1 { 0 } else { (l as u64 * inv3) % n as u64 };
            return vec![f.exp(r)];
        }
        if l % 3 != 0 {
            return Vec::new();
        }
        let mut roots: Vec<Fe> = (0..3).map(|i| f.exp((l / 3 + i * n / 3) as u64)).collect();
        roots.sort();
        roots
    }

    /// Index of the coset of `a ≠ 0` (always 0 when cubing is bijective).
    pub fn coset_index(&self, a: Fe) -> Option<u32> {
        let l = self.field.log(a)?;
        Some(if self.splits() { l % 3 } else { 0 })
    }

    /// Smallest-encoded element of each coset, ordered by encoding.
    pub fn representatives(&self) -> Vec<Fe> {
        if !self.splits() {
            return vec![Fe::ONE];
        }
        let mut seen = [false; 3];
        let mut reps = Vec::with_capacity(3);
        for a in self.field.nonzero() {
            let c = self.coset_index(a).unwrap() as usize;
            if !seen[c] {
                seen[c] = true;
                reps.push(a);
                if reps.len() == 3 {
                    break;
                }
            }
        }
        reps
    }
}

/// An element bundled with its field, for operator arithmetic.
///
/// Binary operators panic when the operands come from different fields; the
/// `try_*` methods report that as [`Error::MixedFields`] instead.
#[derive(Clone, Copy)]
pub struct FieldElement<'f> {
    field: &'f GaloisField,
    value: Fe,
}

impl<'f> FieldElement<'f> {
    pub fn field(&self) -> &'f GaloisField {
        self.field
    }
    pub fn value(&self) -> Fe {
        self.value
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if std::ptr::eq(self.field, other.field) {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.add(self.value, rhs.value)))
    }
    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.sub(self.value, rhs.value)))
    }
    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.mul(self.value, rhs.value)))
    }
    pub fn try_div(self, rhs: Self) -> Result<Self> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.div(self.value, rhs.value)?))
    }
    pub fn inv(self) -> Result<Self> {
        Ok(self.field.wrap(self.field.inv(self.value)?))
    }
    pub fn pow(self, e: u64) -> Self {
        self.field.wrap(self.field.pow(self.value, e))
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.field, other.field) && self.value == other.value
    }
}
impl Eq for FieldElement<'_> {}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in GF({})", self.coeffs(), self.field.q)
    }
}

impl<'f> Add for FieldElement<'f> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("mixed fields")
    }
}
impl<'f> Sub for FieldElement<'f> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).expect("mixed fields")
    }
}
impl<'f> Mul for FieldElement<'f> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("mixed fields")
    }
}
impl<'f> Neg for FieldElement<'f> {
    type Output = Self;
    fn neg(self) -> Self {
        self.field.wrap(self.field.neg(self.value))
    }
}
