//! Curve families, their Weierstrass models and j-invariants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, GaloisField};

/// The one- and two-parameter families whose censuses this crate computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Legendre,
    JacobiQuartic,
    JacobiIntersection,
    Hessian,
    GeneralizedHessian,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Legendre,
        Family::JacobiQuartic,
        Family::JacobiIntersection,
        Family::Hessian,
        Family::GeneralizedHessian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Legendre => "legendre",
            Family::JacobiQuartic => "jacobi-quartic",
            Family::JacobiIntersection => "jacobi-intersection",
            Family::Hessian => "hessian",
            Family::GeneralizedHessian => "generalized-hessian",
        }
    }

    /// Whether the family is defined over fields of characteristic `p`.
    pub fn supports_characteristic(self, p: u32) -> bool {
        match self {
            Family::Legendre | Family::JacobiQuartic | Family::JacobiIntersection => p >= 3,
            Family::Hessian | Family::GeneralizedHessian => true,
        }
    }

    pub fn check_characteristic(self, p: u32) -> Result<()> {
        if self.supports_characteristic(p) {
            Ok(())
        } else {
            Err(Error::IncompatibleFamily { family: self, p })
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family '{s}'"))
    }
}

/// Family-specific parameters of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveParams {
    /// `y^2 = x(x-1)(x-u)`
    Legendre(Fe),
    /// `y^2 = x^4 + 2u x^2 + 1`
    JacobiQuartic(Fe),
    /// `x^2 + y^2 = 1, u x^2 + z^2 = 1`
    JacobiIntersection(Fe),
    /// `x^3 + y^3 + 1 = u x y`
    Hessian(Fe),
    /// `x^3 + y^3 + v = u x y`
    GeneralizedHessian { u: Fe, v: Fe },
    /// `y^2 = x^3 + a x + b`
    ShortWeierstrass { a: Fe, b: Fe },
    /// `[a1, a2, a3, a4, a6]`
    LongWeierstrass([Fe; 5]),
}

impl CurveParams {
    pub fn family(&self) -> Option<Family> {
        match self {
            CurveParams::Legendre(_) => Some(Family::Legendre),
            CurveParams::JacobiQuartic(_) => Some(Family::JacobiQuartic),
            CurveParams::JacobiIntersection(_) => Some(Family::JacobiIntersection),
            CurveParams::Hessian(_) => Some(Family::Hessian),
            CurveParams::GeneralizedHessian { .. } => Some(Family::GeneralizedHessian),
            CurveParams::ShortWeierstrass { .. } | CurveParams::LongWeierstrass(_) => None,
        }
    }
}

/// A validated (nonsingular) curve over a specific field.
#[derive(Clone, Copy, Debug)]
pub struct CurveDescriptor<'f> {
    field: &'f GaloisField,
    params: CurveParams,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameters(msg.into())
}

impl<'f> CurveDescriptor<'f> {
    pub fn new(field: &'f GaloisField, params: CurveParams) -> Result<Self> {
        let f = field;
        let p = f.p();
        if let Some(fam) = params.family() {
            fam.check_characteristic(p)?;
        }
        let k27 = f.int(27);
        match params {
            CurveParams::Legendre(u) | CurveParams::JacobiIntersection(u) => {
                if u.is_zero() || u == Fe::ONE {
                    return Err(invalid("parameter must avoid 0 and 1"));
                }
            }
            CurveParams::JacobiQuartic(u) => {
                if f.sqr(u) == Fe::ONE {
                    return Err(invalid("parameter must avoid +1 and -1"));
                }
            }
            CurveParams::Hessian(u) => {
                if f.pow(u, 3) == k27 {
                    return Err(invalid("u^3 must differ from 27"));
                }
            }
            CurveParams::GeneralizedHessian { u, v } => {
                if v.is_zero() {
                    return Err(invalid("v must be nonzero"));
                }
                if f.pow(u, 3) == f.mul(k27, v) {
                    return Err(invalid("u^3 must differ from 27v"));
                }
            }
            CurveParams::ShortWeierstrass { a, b } => {
                LongWeierstrass::new(f, [Fe::ZERO, Fe::ZERO, Fe::ZERO, a, b])?;
            }
            CurveParams::LongWeierstrass(a) => {
                LongWeierstrass::new(f, a)?;
            }
        }
        Ok(CurveDescriptor { field, params })
    }

    pub fn legendre(field: &'f GaloisField, u: Fe) -> Result<Self> {
        Self::new(field, CurveParams::Legendre(u))
    }
    pub fn jacobi_quartic(field: &'f GaloisField, u: Fe) -> Result<Self> {
        Self::new(field, CurveParams::JacobiQuartic(u))
    }
    pub fn jacobi_intersection(field: &'f GaloisField, u: Fe) -> Result<Self> {
        Self::new(field, CurveParams::JacobiIntersection(u))
    }
    pub fn hessian(field: &'f GaloisField, u: Fe) -> Result<Self> {
        Self::new(field, CurveParams::Hessian(u))
    }
    pub fn generalized_hessian(field: &'f GaloisField, u: Fe, v: Fe) -> Result<Self> {
        Self::new(field, CurveParams::GeneralizedHessian { u, v })
    }
    pub fn short_weierstrass(field: &'f GaloisField, a: Fe, b: Fe) -> Result<Self> {
        Self::new(field, CurveParams::ShortWeierstrass { a, b })
    }

    /// Single-parameter family member, or the generalized Hessian curve with
    /// `aux` as `v`.
    pub fn from_family(field: &'f GaloisField, family: Family, u: Fe, aux: Option<Fe>) -> Result<Self> {
        let params = match family {
            Family::Legendre => CurveParams::Legendre(u),
            Family::JacobiQuartic => CurveParams::JacobiQuartic(u),
            Family::JacobiIntersection => CurveParams::JacobiIntersection(u),
            Family::Hessian => CurveParams::Hessian(u),
            Family::GeneralizedHessian => CurveParams::GeneralizedHessian {
                u,
                v: aux.ok_or_else(|| invalid("generalized Hessian curves need v"))?,
            },
        };
        Self::new(field, params)
    }

    pub fn field(&self) -> &'f GaloisField {
        self.field
    }
    pub fn params(&self) -> CurveParams {
        self.params
    }
    pub fn family(&self) -> Option<Family> {
        self.params.family()
    }

    /// `u` for one-parameter families, `u + q·v` for generalized Hessian
    /// curves. Weierstrass forms have no parameter encoding.
    pub fn parameter_encoding(&self) -> Option<u64> {
        let q = self.field.q() as u64;
        match self.params {
            CurveParams::Legendre(u)
            | CurveParams::JacobiQuartic(u)
            | CurveParams::JacobiIntersection(u)
            | CurveParams::Hessian(u) => Some(u.encoding() as u64),
            CurveParams::GeneralizedHessian { u, v } => Some(u.encoding() as u64 + q * v.encoding() as u64),
            _ => None,
        }
    }
}

/// All valid members of a family over `field`, ascending by parameter
/// encoding.
pub fn valid_parameters(field: &GaloisField, family: Family) -> Result<Vec<CurveDescriptor<'_>>> {
    family.check_characteristic(field.p())?;
    let mut out = Vec::new();
    if family == Family::GeneralizedHessian {
        for v in field.nonzero() {
            for u in field.elements() {
                if let Ok(c) = CurveDescriptor::generalized_hessian(field, u, v) {
                    out.push(c);
                }
            }
        }
    } else {
        for u in field.elements() {
            if let Ok(c) = CurveDescriptor::from_family(field, family, u, None) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with its derived invariants.
#[derive(Clone, Copy)]
pub struct LongWeierstrass<'f> {
    field: &'f GaloisField,
    a: [Fe; 5],
    b2: Fe,
    b4: Fe,
    b6: Fe,
    b8: Fe,
    c4: Fe,
    delta: Fe,
    j: Fe,
}

impl fmt::Debug for LongWeierstrass<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let enc: Vec<u32> = self.a.iter().map(|x| x.encoding()).collect();
        write!(f, "LongWeierstrass(GF({}), a={:?}, j={})", self.field.q(), enc, self.j)
    }
}

impl PartialEq for LongWeierstrass<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.field, other.field) && self.a == other.a
    }
}

impl<'f> LongWeierstrass<'f> {
    /// Builds the model from `[a1, a2, a3, a4, a6]`, rejecting `Δ = 0`.
    pub fn new(field: &'f GaloisField, a: [Fe; 5]) -> Result<Self> {
        let f = field;
        let [a1, a2, a3, a4, a6] = a;
        let c = |n: i64| f.int(n);
        let b2 = f.add(f.sqr(a1), f.mul(c(4), a2));
        let b4 = f.add(f.mul(a1, a3), f.mul(c(2), a4));
        let b6 = f.add(f.sqr(a3), f.mul(c(4), a6));
        let b8 = {
            let t1 = f.mul(f.sqr(a1), a6);
            let t2 = f.mul(f.mul(a1, a3), a4);
            let t3 = f.mul(c(4), f.mul(a2, a6));
            let t4 = f.mul(a2, f.sqr(a3));
            let t5 = f.sqr(a4);
            f.sub(f.add(f.add(f.sub(t1, t2), t3), t4), t5)
        };
        let delta = {
            let t1 = f.neg(f.mul(f.sqr(b2), b8));
            let t2 = f.mul(c(8), f.pow(b4, 3));
            let t3 = f.mul(c(27), f.sqr(b6));
            let t4 = f.mul(c(9), f.mul(f.mul(b2, b4), b6));
            f.add(f.sub(f.sub(t1, t2), t3), t4)
        };
        if delta.is_zero() {
            return Err(Error::Singular);
        }
        let c4 = f.sub(f.sqr(b2), f.mul(c(24), b4));
        let j = f.div(f.pow(c4, 3), delta)?;
        Ok(LongWeierstrass { field, a, b2, b4, b6, b8, c4, delta, j })
    }

    pub fn short(field: &'f GaloisField, a: Fe, b: Fe) -> Result<Self> {
        Self::new(field, [Fe::ZERO, Fe::ZERO, Fe::ZERO, a, b])
    }

    pub fn field(&self) -> &'f GaloisField {
        self.field
    }
    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> [Fe; 5] {
        self.a
    }
    pub fn a1(&self) -> Fe {
        self.a[0]
    }
    pub fn a2(&self) -> Fe {
        self.a[1]
    }
    pub fn a3(&self) -> Fe {
        self.a[2]
    }
    pub fn a4(&self) -> Fe {
        self.a[3]
    }
    pub fn a6(&self) -> Fe {
        self.a[4]
    }
    pub fn b2(&self) -> Fe {
        self.b2
    }
    pub fn b4(&self) -> Fe {
        self.b4
    }
    pub fn b6(&self) -> Fe {
        self.b6
    }
    pub fn b8(&self) -> Fe {
        self.b8
    }
    pub fn c4(&self) -> Fe {
        self.c4
    }
    pub fn discriminant(&self) -> Fe {
        self.delta
    }
    pub fn j(&self) -> Fe {
        self.j
    }

    /// `c6 = -b2^3 + 36 b2 b4 - 216 b6`.
    pub fn c6(&self) -> Fe {
        let f = self.field;
        let t1 = f.neg(f.pow(self.b2, 3));
        let t2 = f.mul(f.int(36), f.mul(self.b2, self.b4));
        let t3 = f.mul(f.int(216), self.b6);
        f.sub(f.add(t1, t2), t3)
    }

    /// Coefficients after `x = α²x' + β`, `y = α³y' + α²γx' + δ`.
    pub fn transformed_coefficients(&self, alpha: Fe, beta: Fe, gamma: Fe, delta: Fe) -> Result<[Fe; 5]> {
        apply_change_of_variables(self.field, self.a, alpha, beta, gamma, delta)
    }
}

/// Standard coefficient transformation law for the admissible change of
/// variables `x = α²x' + β`, `y = α³y' + α²γx' + δ`.
pub fn apply_change_of_variables(
    f: &GaloisField,
    a: [Fe; 5],
    alpha: Fe,
    r: Fe,
    s: Fe,
    t: Fe,
) -> Result<[Fe; 5]> {
    let [a1, a2, a3, a4, a6] = a;
    let ui = f.inv(alpha)?;
    let ui2 = f.sqr(ui);
    let ui3 = f.mul(ui2, ui);
    let ui4 = f.sqr(ui2);
    let ui6 = f.sqr(ui3);
    let c = |n: i64| f.int(n);
    let n1 = f.add(a1, f.mul(c(2), s));
    let n2 = f.sub(f.add(f.sub(a2, f.mul(s, a1)), f.mul(c(3), r)), f.sqr(s));
    let n3 = f.add(f.add(a3, f.mul(r, a1)), f.mul(c(2), t));
    let n4 = {
        let mut acc = f.sub(a4, f.mul(s, a3));
        acc = f.add(acc, f.mul(c(2), f.mul(r, a2)));
        acc = f.sub(acc, f.mul(f.add(t, f.mul(r, s)), a1));
        acc = f.add(acc, f.mul(c(3), f.sqr(r)));
        f.sub(acc, f.mul(c(2), f.mul(s, t)))
    };
    let n6 = {
        let mut acc = f.add(a6, f.mul(r, a4));
        acc = f.add(acc, f.mul(f.sqr(r), a2));
        acc = f.add(acc, f.pow(r, 3));
        acc = f.sub(acc, f.mul(t, a3));
        acc = f.sub(acc, f.sqr(t));
        f.sub(acc, f.mul(f.mul(r, t), a1))
    };
    Ok([
        f.mul(n1, ui),
        f.mul(n2, ui2),
        f.mul(n3, ui3),
        f.mul(n4, ui4),
        f.mul(n6, ui6),
    ])
}

/// j-invariant of a nonsingular model: `(b2² − 24 b4)³ / Δ`.
pub fn j_of_long_weierstrass(w: &LongWeierstrass<'_>) -> Fe {
    w.j()
}

/// The Hessian invariants `A_u = −u(u³+216)/3`, `B_u = (u⁶ − 540u³ − 5832)/27`
/// whose vanishing drives the class-size case split. The Weierstrass model
/// itself is [`hessian_short_model`].
pub fn hessian_short_coefficients(f: &GaloisField, u: Fe) -> Result<(Fe, Fe)> {
    if f.p() == 3 {
        return Err(Error::UnsupportedCharacteristic(3));
    }
    let u3 = f.pow(u, 3);
    let a = f.div(f.neg(f.mul(u, f.add(u3, f.int(216)))), f.int(3))?;
    let num = f.sub(f.sub(f.sqr(u3), f.mul(f.int(540), u3)), f.int(5832));
    let b = f.div(num, f.int(27))?;
    Ok((a, b))
}

/// Short model `y² = x³ + A_u x + 2B_u` of the Hessian curve with parameter
/// `u`, characteristic > 3. The constant term carries a factor 2 relative to
/// `B_u`; without it the model's j differs from `F(u)³`.
pub fn hessian_short_model(f: &GaloisField, u: Fe) -> Result<(Fe, Fe)> {
    if f.p() <= 3 {
        return Err(Error::UnsupportedCharacteristic(f.p()));
    }
    let (a, b) = hessian_short_coefficients(f, u)?;
    Ok((a, f.mul(f.int(2), b)))
}

/// `(a_u, b_u)` with `a_u = −(u²−u+1)/3`, `b_u = −(u+1)(u−2)(2u−1)/27`.
pub fn legendre_short_coefficients(f: &GaloisField, u: Fe) -> Result<(Fe, Fe)> {
    if f.p() <= 3 {
        return Err(Error::UnsupportedCharacteristic(f.p()));
    }
    let c = |n: i64| f.int(n);
    let quad = f.add(f.sub(f.sqr(u), u), Fe::ONE);
    let a = f.div(f.neg(quad), c(3))?;
    let prod = f.mul(
        f.mul(f.add(u, Fe::ONE), f.sub(u, c(2))),
        f.sub(f.mul(c(2), u), Fe::ONE),
    );
    let b = f.div(f.neg(prod), c(27))?;
    Ok((a, b))
}

/// The characteristic-2 model `y² + xy = x³ + a x² + b` of the Hessian curve
/// with parameter `u ≠ 0`: `a = 1/u³`, `b = ((1+u³)/u⁴)³`.
pub fn hessian_binary_model(f: &GaloisField, u: Fe) -> Result<(Fe, Fe)> {
    if f.p() != 2 {
        return Err(Error::UnsupportedCharacteristic(f.p()));
    }
    if u.is_zero() {
        return Err(invalid("the binary Hessian model needs u != 0"));
    }
    let u3 = f.pow(u, 3);
    if u3 == Fe::ONE {
        return Err(invalid("u^3 must differ from 27"));
    }
    let a = f.inv(u3)?;
    let b = f.pow(f.div(f.add(Fe::ONE, u3), f.pow(u, 4))?, 3);
    Ok((a, b))
}

/// A homogeneous cubic in `x, y, z`, one coefficient per monomial of
/// [`TernaryCubic::MONOMIALS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TernaryCubic {
    pub coeffs: [Fe; 10],
}

impl TernaryCubic {
    /// Exponents `(i, j, k)` of `x^i y^j z^k`.
    pub const MONOMIALS: [(u8, u8, u8); 10] = [
        (3, 0, 0),
        (2, 1, 0),
        (2, 0, 1),
        (1, 2, 0),
        (1, 1, 1),
        (1, 0, 2),
        (0, 3, 0),
        (0, 2, 1),
        (0, 1, 2),
        (0, 0, 3),
    ];

    fn index(i: u8, j: u8, k: u8) -> usize {
        Self::MONOMIALS
            .iter()
            .position(|&m| m == (i, j, k))
            .expect("cubic monomial")
    }

    pub fn zero() -> Self {
        TernaryCubic { coeffs: [Fe::ZERO; 10] }
    }

    pub fn coeff(&self, i: u8, j: u8, k: u8) -> Fe {
        self.coeffs[Self::index(i, j, k)]
    }

    pub fn set(&mut self, i: u8, j: u8, k: u8, c: Fe) {
        self.coeffs[Self::index(i, j, k)] = c;
    }

    /// `x³ + y³ + v z³ − u x y z`.
    pub fn hessian(f: &GaloisField, u: Fe, v: Fe) -> Self {
        let mut c = Self::zero();
        c.set(3, 0, 0, Fe::ONE);
        c.set(0, 3, 0, Fe::ONE);
        c.set(0, 0, 3, v);
        c.set(1, 1, 1, f.neg(u));
        c
    }

    pub fn eval(&self, f: &GaloisField, pt: [Fe; 3]) -> Fe {
        Self::MONOMIALS
            .iter()
            .zip(self.coeffs.iter())
            .fold(Fe::ZERO, |acc, (&(i, j, k), &c)| {
                let m = f.mul(
                    f.mul(f.pow(pt[0], i as u64), f.pow(pt[1], j as u64)),
                    f.pow(pt[2], k as u64),
                );
                f.add(acc, f.mul(c, m))
            })
    }

    pub fn gradient(&self, f: &GaloisField, pt: [Fe; 3]) -> [Fe; 3] {
        let mut g = [Fe::ZERO; 3];
        for (&(i, j, k), &c) in Self::MONOMIALS.iter().zip(self.coeffs.iter()) {
            if c.is_zero() {
                continue;
            }
            let e = [i, j, k];
            for var in 0..3 {
                if e[var] == 0 {
                    continue;
                }
                let mut term = f.mul(c, f.int(e[var] as i64));
                for (w, &ew) in e.iter().enumerate() {
                    let pw = if w == var { ew - 1 } else { ew };
                    term = f.mul(term, f.pow(pt[w], pw as u64));
                }
                g[var] = f.add(g[var], term);
            }
        }
        g
    }

    /// `G(x, y, z) = C(M·(x, y, z))`, with `m[row][col]`.
    pub fn compose(&self, f: &GaloisField, m: [[Fe; 3]; 3]) -> Self {
        let mut out = Self::zero();
        for (&(i, j, k), &c) in Self::MONOMIALS.iter().zip(self.coeffs.iter()) {
            if c.is_zero() {
                continue;
            }
            let mut rows = Vec::with_capacity(3);
            rows.extend(std::iter::repeat_n(m[0], i as usize));
            rows.extend(std::iter::repeat_n(m[1], j as usize));
            rows.extend(std::iter::repeat_n(m[2], k as usize));
            for a in 0..3 {
                for b in 0..3 {
                    for d in 0..3 {
                        let coef = f.mul(f.mul(rows[0][a], rows[1][b]), rows[2][d]);
                        if coef.is_zero() {
                            continue;
                        }
                        let mut e = [0u8; 3];
                        e[a] += 1;
                        e[b] += 1;
                        e[d] += 1;
                        let idx = Self::index(e[0], e[1], e[2]);
                        out.coeffs[idx] = f.add(out.coeffs[idx], f.mul(c, coef));
                    }
                }
            }
        }
        out
    }
}

fn independent(f: &GaloisField, a: [Fe; 3], b: [Fe; 3]) -> bool {
    let cross = [
        f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
        f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
        f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
    ];
    cross.iter().any(|c| !c.is_zero())
}

/// Smallest-encoded vector `(x, y, z)` (encoding `x + q y + q² z`) with
/// `l·v = 0` that is independent of `avoid`.
fn smallest_in_plane(f: &GaloisField, l: [Fe; 3], avoid: [Fe; 3]) -> Option<[Fe; 3]> {
    for z in f.elements() {
        for y in f.elements() {
            let rest = f.add(f.mul(l[1], y), f.mul(l[2], z));
            if !l[0].is_zero() {
                let x = f.div(f.neg(rest), l[0]).ok()?;
                let v = [x, y, z];
                if independent(f, v, avoid) {
                    return Some(v);
                }
                // (x, y, 0) rows are all multiples of the y = 1 row
                if z.is_zero() && y == Fe::ONE {
                    break;
                }
            } else if rest.is_zero() {
                if let Some(x) = f.elements().find(|&x| independent(f, [x, y, z], avoid)) {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

/// Smallest-encoded vector with `l·v ≠ 0`.
fn smallest_off_plane(l: [Fe; 3]) -> Option<[Fe; 3]> {
    let e = |i: usize| {
        let mut v = [Fe::ZERO; 3];
        v[i] = Fe::ONE;
        v
    };
    (0..3).find(|&i| !l[i].is_zero()).map(e)
}

/// Weierstrass model of a plane cubic through a rational flex.
///
/// The flex is sent to `(0:1:0)` and its tangent to `z = 0`; the contact
/// conditions are checked on the transformed cubic rather than assumed, and
/// the final scaling uses no division by 2 or 3.
pub fn flex_to_weierstrass<'f>(
    f: &'f GaloisField,
    cubic: &TernaryCubic,
    flex: [Fe; 3],
) -> Result<LongWeierstrass<'f>> {
    if !cubic.eval(f, flex).is_zero() {
        return Err(Error::Internal("flex point is not on the cubic".into()));
    }
    let tangent = cubic.gradient(f, flex);
    if tangent.iter().all(|c| c.is_zero()) {
        return Err(Error::Singular);
    }
    let col1 = smallest_in_plane(f, tangent, flex)
        .ok_or_else(|| Error::Internal("tangent plane has no complementary vector".into()))?;
    let col3 = smallest_off_plane(tangent).expect("tangent is nonzero");
    let m = [
        [col1[0], flex[0], col3[0]],
        [col1[1], flex[1], col3[1]],
        [col1[2], flex[2], col3[2]],
    ];
    let g = cubic.compose(f, m);
    for (i, j, k) in [(0, 3, 0), (1, 2, 0), (2, 1, 0)] {
        if !g.coeff(i, j, k).is_zero() {
            return Err(Error::Internal(format!(
                "transformed cubic has nonzero x^{i}y^{j}z^{k}: point is not a flex"
            )));
        }
    }
    let alpha = g.coeff(0, 2, 1);
    let beta = g.coeff(3, 0, 0);
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::Singular);
    }
    let ab = f.mul(alpha, beta);
    let a = g.coeff(1, 1, 1);
    let b = g.coeff(2, 0, 1);
    let c = g.coeff(0, 1, 2);
    let d = g.coeff(1, 0, 2);
    let e = g.coeff(0, 0, 3);
    // x = −αβ X, y = αβ² Y, then divide by α³β⁴
    let a1 = f.neg(f.div(a, ab)?);
    let a2 = f.neg(f.div(b, f.mul(ab, beta))?);
    let a3 = f.div(c, f.sqr(ab))?;
    let a4 = f.div(d, f.mul(f.sqr(ab), beta))?;
    let a6 = f.neg(f.div(e, f.mul(f.pow(ab, 3), beta))?);
    LongWeierstrass::new(f, [a1, a2, a3, a4, a6])
}

/// Flex-based model of `x³ + y³ + v z³ = u x y z` through `(1 : −1 : 0)`.
pub fn hessian_flex_model<'f>(f: &'f GaloisField, u: Fe, v: Fe) -> Result<LongWeierstrass<'f>> {
    let cubic = TernaryCubic::hessian(f, u, v);
    flex_to_weierstrass(f, &cubic, [Fe::ONE, f.neg(Fe::ONE), Fe::ZERO])
}

/// A Weierstrass model birational to the curve over its own field.
pub fn to_long_weierstrass<'f>(c: &CurveDescriptor<'f>) -> Result<LongWeierstrass<'f>> {
    let f = c.field();
    let z = Fe::ZERO;
    let model = match c.params() {
        CurveParams::Legendre(u) | CurveParams::JacobiIntersection(u) => {
            LongWeierstrass::new(f, [z, f.neg(f.add(u, Fe::ONE)), z, u, z])
        }
        CurveParams::JacobiQuartic(u) => {
            let a2 = f.neg(f.mul(f.int(4), u));
            let a4 = f.mul(f.int(4), f.sub(f.sqr(u), Fe::ONE));
            LongWeierstrass::new(f, [z, a2, z, a4, z])
        }
        CurveParams::Hessian(u) if f.p() > 3 => {
            let (a, b) = hessian_short_model(f, u)?;
            LongWeierstrass::short(f, a, b)
        }
        CurveParams::Hessian(u) if f.p() == 2 && !u.is_zero() => {
            let (a, b) = hessian_binary_model(f, u)?;
            LongWeierstrass::new(f, [Fe::ONE, a, z, z, b])
        }
        CurveParams::Hessian(u) => hessian_flex_model(f, u, Fe::ONE),
        CurveParams::GeneralizedHessian { u, v } => hessian_flex_model(f, u, v),
        CurveParams::ShortWeierstrass { a, b } => LongWeierstrass::short(f, a, b),
        CurveParams::LongWeierstrass(a) => LongWeierstrass::new(f, a),
    };
    model.map_err(|e| match e {
        Error::Singular => Error::Internal(format!("model of valid curve {:?} is singular", c.params())),
        other => other,
    })
}

/// The family's rational map `F` at `u`: the j-invariant itself for the
/// Legendre and Jacobi families, its cube root for Hessian curves, and
/// `F_v` with `j = F_v(u)³ / v` for generalized Hessian curves.
pub fn family_rational_f(f: &GaloisField, family: Family, aux: Option<Fe>, u: Fe) -> Result<Fe> {
    let c = |n: i64| f.int(n);
    let div = |num: Fe, den: Fe| -> Result<Fe> {
        if den.is_zero() {
            Err(Error::Pole)
        } else {
            f.div(num, den)
        }
    };
    match family {
        Family::Legendre | Family::JacobiIntersection => {
            let w = f.sub(f.sqr(u), u);
            let num = f.mul(c(256), f.pow(f.add(w, Fe::ONE), 3));
            div(num, f.sqr(w))
        }
        Family::JacobiQuartic => {
            let num = f.mul(c(64), f.pow(f.add(f.sqr(u), c(3)), 3));
            div(num, f.sqr(f.sub(f.sqr(u), Fe::ONE)))
        }
        Family::Hessian | Family::GeneralizedHessian => {
            let v = if family == Family::Hessian {
                Fe::ONE
            } else {
                aux.ok_or_else(|| invalid("generalized Hessian F needs v"))?
            };
            let u3 = f.pow(u, 3);
            let num = f.mul(u, f.add(u3, f.mul(c(216), v)));
            div(num, f.sub(u3, f.mul(c(27), v)))
        }
    }
}

fn closed_form_j(c: &CurveDescriptor<'_>) -> Option<Result<Fe>> {
    let f = c.field();
    let fam = c.family()?;
    Some(match c.params() {
        CurveParams::Legendre(u) | CurveParams::JacobiQuartic(u) | CurveParams::JacobiIntersection(u) => {
            family_rational_f(f, fam, None, u)
        }
        CurveParams::Hessian(u) => family_rational_f(f, fam, None, u).map(|x| f.pow(x, 3)),
        CurveParams::GeneralizedHessian { u, v } => family_rational_f(f, fam, Some(v), u)
            .and_then(|x| f.div(f.pow(x, 3), v)),
        _ => unreachable!("family curves only"),
    })
}

/// j-invariant of a curve.
///
/// In characteristic > 3 the family's closed form is returned after checking
/// it against the Weierstrass model; in characteristic 2 and 3 the model's
/// j is returned.
pub fn j_invariant(c: &CurveDescriptor<'_>) -> Result<Fe> {
    let model_j = to_long_weierstrass(c)?.j();
    if c.field().p() > 3 {
        if let Some(closed) = closed_form_j(c) {
            let closed = closed?;
            if closed != model_j {
                return Err(Error::Internal(format!(
                    "closed-form j {closed} differs from model j {model_j} for {:?}",
                    c.params()
                )));
            }
        }
    }
    Ok(model_j)
}

/// Checks `(F(u) − F(v))·l(u, v) = g(u, v)` for the Legendre or Hessian
/// factorization of the difference of the family's rational map.
pub fn difference_factorization_check(f: &GaloisField, family: Family, u: Fe, v: Fe) -> Result<bool> {
    if f.p() <= 3 {
        return Err(Error::UnsupportedCharacteristic(f.p()));
    }
    let c = |n: i64| f.int(n);
    let fu = family_rational_f(f, family, None, u)?;
    let fv = family_rational_f(f, family, None, v)?;
    let diff = f.sub(fu, fv);
    let (lhs, rhs) = match family {
        Family::Legendre => {
            let du = f.sqr(f.sub(f.sqr(u), u));
            let dv = f.sqr(f.sub(f.sqr(v), v));
            let uv = f.mul(u, v);
            let factors = [
                f.sub(u, v),
                f.sub(f.add(u, v), Fe::ONE),
                f.sub(uv, Fe::ONE),
                f.add(f.sub(uv, v), Fe::ONE),
                f.add(f.sub(uv, u), Fe::ONE),
                f.sub(f.sub(uv, u), v),
            ];
            let g = factors.iter().fold(c(256), |acc, &x| f.mul(acc, x));
            (f.mul(diff, f.mul(du, dv)), g)
        }
        Family::Hessian => {
            let du = f.sub(f.pow(u, 3), c(27));
            let dv = f.sub(f.pow(v, 3), c(27));
            let uv = f.mul(u, v);
            let lin = f.sub(f.sub(f.sub(uv, f.mul(c(3), u)), f.mul(c(3), v)), c(18));
            let u2 = f.sqr(u);
            let h = {
                let t2 = f.mul(f.add(f.add(u2, f.mul(c(3), u)), c(9)), f.sqr(v));
                let t1 = f.mul(
                    f.mul(c(3), f.sub(f.add(u2, f.mul(c(12), u)), c(18))),
                    v,
                );
                let t0 = f.mul(c(9), f.add(f.sub(u2, f.mul(c(6), u)), c(36)));
                f.add(f.add(t2, t1), t0)
            };
            let g = f.mul(f.mul(f.sub(u, v), lin), h);
            (f.mul(diff, f.mul(du, dv)), g)
        }
        other => {
            return Err(invalid(format!("no difference factorization for {other}")));
        }
    };
    Ok(lhs == rhs)
}

fn poly_mul(f: &GaloisField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

#[allow(clippy::needless_range_loop)]
fn determinant(f: &GaloisField, mut m: Vec<Vec<Fe>>) -> Fe {
    let n = m.len();
    let mut det = Fe::ONE;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Fe::ZERO;
        };
        if piv != col {
            m.swap(piv, col);
            det = f.neg(det);
        }
        let inv = f.inv(m[col][col]).expect("nonzero pivot");
        det = f.mul(det, m[col][col]);
        for r in col + 1..n {
            let factor = f.mul(m[r][col], inv);
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let t = f.mul(factor, m[col][c]);
                m[r][c] = f.sub(m[r][c], t);
            }
        }
    }
    det
}

/// Discriminant of a polynomial given by ascending coefficients with nonzero
/// leading term: `(−1)^(n(n−1)/2) Res(g, g') / lc(g)`.
pub fn polynomial_discriminant(f: &GaloisField, g: &[Fe]) -> Result<Fe> {
    let n = g.len() - 1;
    let lead = g[n];
    if n < 1 || lead.is_zero() {
        return Err(invalid("discriminant needs a nonconstant polynomial with nonzero leading term"));
    }
    let dg: Vec<Fe> = (1..=n).map(|i| f.mul(f.int(i as i64), g[i])).collect();
    let m = n - 1;
    // Sylvester matrix of g (degree n) and g' (formal degree n − 1)
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..m {
        let mut row = vec![Fe::ZERO; size];
        for (i, &c) in g.iter().rev().enumerate() {
            row[shift + i] = c;
        }
        rows.push(row);
    }
    for shift in 0..n {
        let mut row = vec![Fe::ZERO; size];
        for (i, &c) in dg.iter().rev().enumerate() {
            row[shift + i] = c;
        }
        rows.push(row);
    }
    let res = determinant(f, rows);
    let d = f.div(res, lead)?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { f.neg(d) } else { d })
}

/// `g(u, V)` for the Hessian factorization, as ascending coefficients in `V`.
pub fn hessian_g_in_v(f: &GaloisField, u: Fe) -> Vec<Fe> {
    let c = |n: i64| f.int(n);
    let u2 = f.sqr(u);
    let lin1 = [u, f.neg(Fe::ONE)];
    let lin2 = [f.sub(f.neg(f.mul(c(3), u)), c(18)), f.sub(u, c(3))];
    let h = [
        f.mul(c(9), f.add(f.sub(u2, f.mul(c(6), u)), c(36))),
        f.mul(c(3), f.sub(f.add(u2, f.mul(c(12), u)), c(18))),
        f.add(f.add(u2, f.mul(c(3), u)), c(9)),
    ];
    poly_mul(f, &poly_mul(f, &lin1, &lin2), &h)
}

/// Returns `(disc_V g(u, V), −3²¹ B_u⁴)`; the two agree as polynomials in `u`.
pub fn hessian_discriminant_identity(f: &GaloisField, u: Fe) -> Result<(Fe, Fe)> {
    let (_, b) = hessian_short_coefficients(f, u)?;
    if f.pow(u, 3) == f.int(27) {
        return Err(Error::Pole);
    }
    let disc = polynomial_discriminant(f, &hessian_g_in_v(f, u))?;
    let rhs = f.neg(f.mul(f.pow(f.int(3), 21), f.pow(b, 4)));
    Ok((disc, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> GaloisField {
        GaloisField::with_order(q).unwrap()
    }

    #[test]
    fn j_examples() {
        let gf7 = f(7);
        let w = LongWeierstrass::short(&gf7, Fe::ZERO, Fe::ONE).unwrap();
        assert_eq!(j_of_long_weierstrass(&w), Fe::ZERO);
        let w = LongWeierstrass::new(&gf7, [Fe::ZERO, Fe::ZERO, Fe::ZERO, gf7.int(-1), Fe::ZERO]).unwrap();
        assert_eq!(w.j(), gf7.int(1728));
        assert_eq!(w.j(), Fe(6));

        let gf5 = f(5);
        let leg = CurveDescriptor::legendre(&gf5, Fe(2)).unwrap();
        assert_eq!(j_invariant(&leg).unwrap(), Fe(3));
        assert_eq!(to_long_weierstrass(&leg).unwrap().j(), Fe(3));

        assert_eq!(j_invariant(&CurveDescriptor::legendre(&gf7, Fe(3)).unwrap()).unwrap(), Fe::ZERO);
        assert_eq!(j_invariant(&CurveDescriptor::hessian(&gf7, Fe::ZERO).unwrap()).unwrap(), Fe::ZERO);
        for v in gf7.nonzero() {
            let gh = CurveDescriptor::generalized_hessian(&gf7, Fe::ZERO, v).unwrap();
            assert_eq!(j_invariant(&gh).unwrap(), Fe::ZERO);
        }
    }

    #[test]
    fn model_examples() {
        let gf7 = f(7);
        let leg = to_long_weierstrass(&CurveDescriptor::legendre(&gf7, Fe(3)).unwrap()).unwrap();
        assert_eq!(leg.coefficients(), [Fe(0), gf7.int(-4), Fe(0), Fe(3), Fe(0)]);
        let jq = to_long_weierstrass(&CurveDescriptor::jacobi_quartic(&gf7, Fe::ZERO).unwrap()).unwrap();
        assert_eq!(jq.coefficients(), [Fe(0), Fe(0), Fe(0), gf7.int(-4), Fe(0)]);
        let h = to_long_weierstrass(&CurveDescriptor::hessian(&gf7, Fe::ONE).unwrap()).unwrap();
        assert_eq!(h.a4(), Fe::ZERO);
        assert_eq!(h.j(), Fe::ZERO);
        for q in [5u64, 7, 11, 13, 25, 49] {
            let gf = f(q);
            for u in gf.elements() {
                if let Ok(c) = CurveDescriptor::hessian(&gf, u) {
                    j_invariant(&c).unwrap();
                    let flex = hessian_flex_model(&gf, u, Fe::ONE).unwrap();
                    assert_eq!(flex.j(), to_long_weierstrass(&c).unwrap().j());
                }
            }
        }
    }

    #[test]
    fn b8_identity_and_invalid_curves() {
        let gf = f(13);
        let w = LongWeierstrass::new(&gf, [Fe(1), Fe(2), Fe(3), Fe(4), Fe(5)]).unwrap();
        assert_eq!(
            gf.mul(gf.int(4), w.b8()),
            gf.sub(gf.mul(w.b2(), w.b6()), gf.sqr(w.b4()))
        );
        assert_eq!(LongWeierstrass::short(&gf, Fe::ZERO, Fe::ZERO).unwrap_err(), Error::Singular);
        assert!(CurveDescriptor::legendre(&gf, Fe::ONE).is_err());
        assert!(CurveDescriptor::jacobi_quartic(&gf, gf.int(-1)).is_err());
        assert!(CurveDescriptor::hessian(&gf, Fe(3)).is_err());
        assert!(CurveDescriptor::generalized_hessian(&gf, Fe(1), Fe::ZERO).is_err());
        let gf4 = f(4);
        assert!(matches!(
            CurveDescriptor::legendre(&gf4, Fe(2)),
            Err(Error::IncompatibleFamily { .. })
        ));
    }

    #[test]
    fn rational_f_examples() {
        let gf7 = f(7);
        assert_eq!(family_rational_f(&gf7, Family::Hessian, None, Fe::ZERO).unwrap(), Fe::ZERO);
        assert_eq!(family_rational_f(&gf7, Family::Legendre, None, gf7.int(-1)).unwrap(), Fe(6));
        assert_eq!(family_rational_f(&gf7, Family::Legendre, None, Fe::ONE), Err(Error::Pole));
        assert_eq!(family_rational_f(&gf7, Family::Hessian, None, Fe(3)), Err(Error::Pole));
        assert!(family_rational_f(&gf7, Family::GeneralizedHessian, None, Fe(1)).is_err());
    }

    #[test]
    fn factorization_examples() {
        let gf7 = f(7);
        assert!(difference_factorization_check(&gf7, Family::Legendre, Fe(3), Fe(5)).unwrap());
        assert_eq!(family_rational_f(&gf7, Family::Legendre, None, Fe(3)).unwrap(), Fe::ZERO);
        assert_eq!(family_rational_f(&gf7, Family::Legendre, None, Fe(5)).unwrap(), Fe::ZERO);
        assert!(difference_factorization_check(&gf7, Family::Hessian, Fe(2), Fe(2)).unwrap());
        let gf11 = f(11);
        assert!(difference_factorization_check(&gf11, Family::Hessian, Fe(2), Fe(5)).unwrap());
        assert_eq!(
            difference_factorization_check(&f(9), Family::Hessian, Fe(1), Fe(2)),
            Err(Error::UnsupportedCharacteristic(3))
        );
    }

    #[test]
    fn discriminants() {
        let gf = f(7);
        // x^2 + 1: disc −4
        assert_eq!(polynomial_discriminant(&gf, &[Fe(1), Fe(0), Fe(1)]).unwrap(), gf.int(-4));
        // x^3 − x: disc 4
        assert_eq!(
            polynomial_discriminant(&gf, &[Fe(0), gf.int(-1), Fe(0), Fe(1)]).unwrap(),
            gf.int(4)
        );
        for q in [5u64, 7, 11, 13, 25] {
            let gf = f(q);
            for u in gf.elements() {
                if let Ok((l, r)) = hessian_discriminant_identity(&gf, u) {
                    assert_eq!(l, r, "q={q} u={u}");
                }
            }
        }
    }

    #[test]
    fn binary_hessian_model() {
        let gf8 = f(8);
        let u = gf8.generator();
        let (a, b) = hessian_binary_model(&gf8, u).unwrap();
        assert!(!b.is_zero());
        let w = LongWeierstrass::new(&gf8, [Fe::ONE, a, Fe::ZERO, Fe::ZERO, b]).unwrap();
        assert_eq!(w.j(), gf8.inv(b).unwrap());
        for u in gf8.nonzero() {
            if gf8.pow(u, 3) == Fe::ONE {
                continue;
            }
            let v = gf8.div(u, gf8.add(u, Fe::ONE)).unwrap();
            let (au, bu) = hessian_binary_model(&gf8, u).unwrap();
            let (av, bv) = hessian_binary_model(&gf8, v).unwrap();
            assert_eq!(bu, bv);
            assert_eq!(gf8.trace(gf8.add(au, av)), 1);
        }
        assert!(hessian_binary_model(&f(7), Fe(1)).is_err());
        assert!(hessian_binary_model(&gf8, Fe::ZERO).is_err());
    }

    #[test]
    fn flex_model_every_characteristic() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 31] {
            let gf = f(q);
            for v in gf.nonzero() {
                for u in gf.elements() {
                    let Ok(c) = CurveDescriptor::generalized_hessian(&gf, u, v) else {
                        continue;
                    };
                    let w = to_long_weierstrass(&c).unwrap();
                    assert!(!w.discriminant().is_zero());
                    j_invariant(&c).unwrap();
                }
            }
        }
    }
}
