//! Dense univariate polynomials over a field tower.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldTower, Subfield};
use crate::linalg;

/// Coefficients low degree first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Fe) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![Fe::ZERO, Fe::ONE] }
    }

    pub fn monomial(c: Fe, deg: usize) -> Self {
        let mut coeffs = vec![Fe::ZERO; deg + 1];
        coeffs[deg] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the `-1` convention for zero.
    pub fn degree_or_neg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    pub fn add(&self, other: &Poly, tw: &FieldTower) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| tw.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, tw: &FieldTower) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| tw.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, tw: &FieldTower) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| tw.neg(c)).collect())
    }

    pub fn scale(&self, c: Fe, tw: &FieldTower) -> Poly {
        Poly::new(self.coeffs.iter().map(|&x| tw.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Poly, tw: &FieldTower) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = tw.add(out[i + j], tw.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Fe, tw: &FieldTower) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| tw.add(tw.mul(acc, x), c))
    }

    /// `self(inner)` by Horner's rule.
    pub fn compose(&self, inner: &Poly, tw: &FieldTower) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(inner, tw).add(&Poly::constant(c), tw))
    }

    /// `self^(p0^s)`: coefficients go through Frobenius, exponents scale.
    pub fn frobenius(&self, s: u32, tw: &FieldTower) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let p = tw.characteristic().pow(s) as usize;
        let mut out = vec![Fe::ZERO; (self.coeffs.len() - 1) * p + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * p] = tw.frobenius(c, s);
        }
        Poly::new(out)
    }

    /// `self(inner)` when `self` is linearized over `sub`: uses
    /// `inner^(p^i)` by Frobenius instead of repeated multiplication.
    pub fn compose_linearized(&self, inner: &Poly, sub: Subfield, tw: &FieldTower) -> Result<Poly> {
        let lin = linearized_coeffs(self, sub)?;
        let mut acc = Poly::zero();
        let mut power = inner.clone();
        for (i, &c) in lin.iter().enumerate() {
            if i > 0 {
                power = power.frobenius(sub.degree(), tw);
            }
            if !c.is_zero() {
                acc = acc.add(&power.scale(c, tw), tw);
            }
        }
        Ok(acc)
    }

    pub fn div_rem(&self, divisor: &Poly, tw: &FieldTower) -> Result<(Poly, Poly)> {
        let Some(dd) = divisor.degree() else {
            return Err(Error::DivisionByZero);
        };
        let lead_inv = tw.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = tw.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - dd;
            quot[shift] = c;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = tw.sub(rem[shift + i], tw.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Quotient when `divisor` divides `self` exactly.
    pub fn exact_div(&self, divisor: &Poly, tw: &FieldTower) -> Result<Poly> {
        let (q, r) = self.div_rem(divisor, tw)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// Remainder modulo a monic vanishing polynomial.
    pub fn reduce_mod(&self, z: &Poly, tw: &FieldTower) -> Result<Poly> {
        if !z.is_monic() {
            return Err(Error::NotMonic);
        }
        Ok(self.div_rem(z, tw)?.1)
    }

    /// `(self * other) mod z` for monic `z`.
    pub fn mul_mod(&self, other: &Poly, z: &Poly, tw: &FieldTower) -> Result<Poly> {
        self.mul(other, tw).reduce_mod(z, tw)
    }
}

/// `Z_E(x) = prod_{a in E} (x - a)`.
pub fn vanishing_poly(points: &[Fe], tw: &FieldTower) -> Result<Poly> {
    let mut seen = HashSet::with_capacity(points.len());
    for &a in points {
        tw.check(a)?;
        if !seen.insert(a) {
            return Err(Error::RepeatedPoint);
        }
    }
    let mut coeffs = vec![Fe::ONE];
    for &a in points {
        // multiply by (x - a) in place
        let na = tw.neg(a);
        coeffs.push(Fe::ZERO);
        for i in (0..coeffs.len()).rev() {
            let lower = if i > 0 { coeffs[i - 1] } else { Fe::ZERO };
            coeffs[i] = tw.add(lower, tw.mul(coeffs[i], na));
        }
    }
    Ok(Poly::new(coeffs))
}

/// `f mod Z`: the low-degree representative agreeing with `f` on the roots of `Z`.
pub fn reduce_mod_vanishing(f: &Poly, z: &Poly, tw: &FieldTower) -> Result<Poly> {
    f.reduce_mod(z, tw)
}

/// Lagrange interpolation: the unique polynomial of degree `< points.len()`.
pub fn interpolate(points: &[Fe], values: &[Fe], tw: &FieldTower) -> Result<Poly> {
    if points.len() != values.len() {
        return Err(Error::LengthMismatch { expected: points.len(), got: values.len() });
    }
    let z = vanishing_poly(points, tw)?;
    let weights = crate::grs::dual_multipliers(points, tw)?;
    let n = points.len();
    let mut out = vec![Fe::ZERO; n];
    for i in 0..n {
        let c = tw.mul(values[i], weights[i]);
        if c.is_zero() {
            continue;
        }
        // synthetic division of Z by (x - a_i)
        let a = points[i];
        let mut carry = Fe::ZERO;
        for d in (0..n).rev() {
            carry = tw.add(z.coeff(d + 1), tw.mul(carry, a));
            out[d] = tw.add(out[d], tw.mul(c, carry));
        }
    }
    Ok(Poly::new(out))
}

/// An `F_p`-subspace of `F_q` given by a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceChoice {
    pub base: Subfield,
    pub basis: Vec<Fe>,
}

impl SubspaceChoice {
    pub fn new(base: Subfield, basis: Vec<Fe>) -> Self {
        SubspaceChoice { base, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// All `p^ell` elements.
    pub fn elements(&self, tw: &FieldTower) -> Vec<Fe> {
        let scalars = tw.subfield_elements(self.base);
        let mut out = vec![Fe::ZERO];
        for &b in &self.basis {
            out = out
                .iter()
                .flat_map(|&v| scalars.iter().map(move |&c| (v, c)))
                .map(|(v, c)| tw.add(v, tw.mul(c, b)))
                .collect();
        }
        out
    }
}

/// Linearized coefficients `c_i` of `L = sum c_i x^(p^i)` over `sub`.
pub fn linearized_coeffs(l: &Poly, sub: Subfield) -> Result<Vec<Fe>> {
    let p = sub.order() as usize;
    let is_power = |mut i: usize| {
        if i == 0 {
            return false;
        }
        while i.is_multiple_of(p) {
            i /= p;
        }
        i == 1
    };
    if l.coeffs().iter().enumerate().any(|(i, c)| !c.is_zero() && !is_power(i)) {
        return Err(Error::NotLinearized);
    }
    let mut out = Vec::new();
    let mut e = 1usize;
    while e < l.coeffs().len() {
        out.push(l.coeff(e));
        e *= p;
    }
    Ok(out)
}

/// Linearized coefficients of `L_V` by the recursion
/// `L_{V + <v>}(x) = L_V(x)^p - L_V(v)^(p-1) L_V(x)`.
pub fn subspace_linearized_coeffs(v: &SubspaceChoice, tw: &FieldTower) -> Result<Vec<Fe>> {
    let sub = v.base;
    for &b in &v.basis {
        tw.check(b)?;
    }
    let rows: Vec<Vec<Fe>> = v
        .basis
        .iter()
        .map(|&b| tw.traces_of(b, &tw.default_basis(sub)))
        .collect();
    let r = linalg::rank(tw, rows);
    if r < v.basis.len() {
        return Err(Error::NotABasis { rank: r, expected: v.basis.len() });
    }
    let s = sub.degree();
    let p = sub.order() as u64;
    let mut lin = vec![Fe::ONE];
    for &b in &v.basis {
        let lb = apply_linearized(&lin, b, s, tw);
        let factor = tw.neg(tw.pow(lb, p - 1));
        let mut next = vec![Fe::ZERO; lin.len() + 1];
        for (i, &c) in lin.iter().enumerate() {
            next[i + 1] = tw.add(next[i + 1], tw.frobenius(c, s));
            next[i] = tw.add(next[i], tw.mul(factor, c));
        }
        lin = next;
    }
    Ok(lin)
}

/// `sum c_i x^(p^i)` evaluated at `x`.
pub fn apply_linearized(lin: &[Fe], x: Fe, s: u32, tw: &FieldTower) -> Fe {
    let mut acc = Fe::ZERO;
    let mut y = x;
    for (i, &c) in lin.iter().enumerate() {
        if i > 0 {
            y = tw.frobenius(y, s);
        }
        acc = tw.add(acc, tw.mul(c, y));
    }
    acc
}

pub fn linearized_to_dense(lin: &[Fe], sub: Subfield) -> Poly {
    let p = sub.order() as usize;
    let Some(top) = lin.len().checked_sub(1) else {
        return Poly::zero();
    };
    let mut coeffs = vec![Fe::ZERO; p.pow(top as u32) + 1];
    for (i, &c) in lin.iter().enumerate() {
        coeffs[p.pow(i as u32)] = c;
    }
    Poly::new(coeffs)
}

/// `L_V(x) = prod_{b in V} (x - b)`, monic of degree `p^ell`.
pub fn linearized_from_subspace(v: &SubspaceChoice, tw: &FieldTower) -> Result<Poly> {
    Ok(linearized_to_dense(&subspace_linearized_coeffs(v, tw)?, v.base))
}
