//! Finite field towers `F_{p0^T}` with their subfield lattice.
//!
//! An element is stored as the integer `c_0 + c_1 p0 + ... + c_{T-1} p0^{T-1}`
//! of its coefficient vector against the tower's modulus, so equality is exact
//! and `Fe::ZERO`/`Fe::ONE` mean the same thing in every tower. Multiplication
//! goes through exp/log tables over a primitive element; addition in odd
//! characteristic uses a Zech-logarithm table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Largest field order a tower will build tables for.
pub const MAX_ORDER: u64 = 1 << 20;

/// A field element, canonical coefficient vector packed base `p0`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The subfield `F_{p0^degree}` of a tower; `degree` divides the tower degree.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Subfield {
    degree: u32,
    order: u32,
    ext: u32,
}

impl Subfield {
    /// `s`, with `F_p = F_{p0^s}`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `|F_p|`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `t = [F_q : F_p]`.
    pub fn ext_degree(&self) -> usize {
        self.ext as usize
    }
}

/// A basis `eta` of `F_q` over a subfield together with its trace-dual `theta`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceBasis {
    base: Subfield,
    eta: Vec<Fe>,
    theta: Vec<Fe>,
}

impl TraceBasis {
    pub fn base(&self) -> Subfield {
        self.base
    }

    pub fn eta(&self) -> &[Fe] {
        &self.eta
    }

    pub fn theta(&self) -> &[Fe] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}

pub struct FieldTower {
    p0: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    primitive: Fe,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTower({})", self.descriptor())
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.p0 == other.p0 && self.degree == other.degree && self.modulus == other.modulus
    }
}

impl Eq for FieldTower {}

const NO_ZECH: u32 = u32::MAX;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

// Polynomials over the prime field, coefficients low-first, used only for the
// modulus search and table construction.
mod prime_poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let m = trim(m.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        while a.len() > dm {
            let top = a.len() - 1;
            let c = a[top] as u64 * lead_inv % p as u64;
            if c != 0 {
                let shift = top - dm;
                for (i, &mc) in m.iter().enumerate() {
                    let sub = c * mc as u64 % p as u64;
                    a[shift + i] = ((a[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
            a = trim(a);
        }
        a
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        rem(&out.into_iter().map(|c| c as u32).collect::<Vec<_>>(), m, p)
    }

    pub fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        rem(&result, m, p)
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^(p^d) mod m`.
    pub fn x_frobenius(d: u32, m: &[u32], p: u32) -> Vec<u32> {
        let mut h = rem(&[0, 1], m, p);
        for _ in 0..d {
            h = pow_mod(&h, p as u64, m, p);
        }
        h
    }

    /// Monic `m` of degree `deg` is irreducible iff `x^(p^deg) = x mod m`
    /// and `gcd(m, x^(p^d) - x) = 1` for every proper divisor `d` of `deg`.
    pub fn is_irreducible(m: &[u32], deg: u32, p: u32) -> bool {
        if deg == 1 {
            return true;
        }
        let x = rem(&[0, 1], m, p);
        if x_frobenius(deg, m, p) != x {
            return false;
        }
        for d in super::divisors(deg) {
            if d == deg {
                continue;
            }
            let h = sub(&x_frobenius(d, m, p), &[0, 1], p);
            let g = gcd(m, &h, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl FieldTower {
    /// Builds `F_{p0^degree}`. Without a modulus, picks the monic irreducible
    /// whose packed coefficient integer `sum c_i p0^i` is smallest.
    pub fn new(p0: u32, degree: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p0) {
            return Err(Error::NotPrime(p0));
        }
        if degree == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let order = (p0 as u64).checked_pow(degree).filter(|&q| q <= MAX_ORDER).ok_or_else(|| {
            Error::InvalidField(format!("{p0}^{degree} exceeds the supported order {MAX_ORDER}"))
        })? as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != degree as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus must have {} coefficients",
                        degree + 1
                    )));
                }
                if m.iter().any(|&c| c >= p0) {
                    return Err(Error::InvalidField("modulus coefficient out of range".into()));
                }
                if m[degree as usize] != 1 {
                    return Err(Error::InvalidField("modulus must be monic".into()));
                }
                if !prime_poly::is_irreducible(m, degree, p0) {
                    return Err(Error::ReducibleModulus(p0));
                }
                m.to_vec()
            }
            None => Self::default_modulus(p0, degree),
        };
        let mut tower = FieldTower {
            p0,
            degree,
            order,
            modulus,
            primitive: Fe::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
        };
        tower.build_tables();
        Ok(tower)
    }

    fn default_modulus(p0: u32, degree: u32) -> Vec<u32> {
        let count = (p0 as u64).pow(degree);
        for idx in 0..count {
            let mut m = Vec::with_capacity(degree as usize + 1);
            let mut v = idx;
            for _ in 0..degree {
                m.push((v % p0 as u64) as u32);
                v /= p0 as u64;
            }
            m.push(1);
            if prime_poly::is_irreducible(&m, degree, p0) {
                return m;
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    fn pack(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0u32, |acc, &c| acc * self.p0 + c)
    }

    fn unpack(&self, x: u32) -> Vec<u32> {
        let mut v = x;
        (0..self.degree)
            .map(|_| {
                let c = v % self.p0;
                v /= self.p0;
                c
            })
            .collect()
    }

    fn digit_add(&self, a: u32, b: u32) -> u32 {
        if self.p0 == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.degree {
            let c = (a % self.p0 + b % self.p0) % self.p0;
            out += c * place;
            place = place.wrapping_mul(self.p0);
            a /= self.p0;
            b /= self.p0;
        }
        out
    }

    fn build_tables(&mut self) {
        let q = self.order;
        let n = (q - 1) as usize;
        let p0 = self.p0;
        let modulus = self.modulus.clone();
        // Search for the primitive element with the smallest packed index.
        let mut found = None;
        for cand in 1..q {
            let g = prime_poly::trim(self.unpack(cand));
            let mut cur = vec![1u32];
            let mut exp = Vec::with_capacity(n);
            let mut ok = true;
            for i in 0..n {
                let packed = self.pack(&pad(&cur, self.degree as usize));
                if i > 0 && packed == 1 {
                    ok = false;
                    break;
                }
                exp.push(packed);
                cur = prime_poly::mul_mod(&cur, &g, &modulus, p0);
            }
            if ok {
                found = Some((cand, exp));
                break;
            }
        }
        let (prim, exp) = found.expect("multiplicative group is cyclic");
        let mut log = vec![0u32; q as usize];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u32;
        }
        let mut doubled = exp.clone();
        doubled.extend_from_slice(&exp);
        self.primitive = Fe(prim);
        self.exp = doubled;
        self.log = log;
        if p0 != 2 {
            // zech[k] = log(1 + g^k), or NO_ZECH when 1 + g^k = 0.
            let mut zech = vec![NO_ZECH; n];
            for (k, z) in zech.iter_mut().enumerate() {
                let s = self.digit_add(1, self.exp[k]);
                if s != 0 {
                    *z = self.log[s as usize];
                }
            }
            self.zech = zech;
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p0
    }

    /// `T`, the degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The canonical root `xi` of the modulus (the element `x`).
    pub fn generator(&self) -> Fe {
        if self.degree == 1 {
            // F_{p0}[x]/(x + c0): x = -c0.
            Fe((self.p0 - self.modulus[0]) % self.p0)
        } else {
            Fe(self.p0)
        }
    }

    /// The primitive element with smallest index; fixes "generator-power order".
    pub fn primitive(&self) -> Fe {
        self.primitive
    }

    /// `0, g^0, g^1, ..., g^(q-2)` for the primitive element `g`.
    pub fn elements_in_power_order(&self) -> Vec<Fe> {
        let n = (self.order - 1) as usize;
        std::iter::once(Fe::ZERO).chain(self.exp[..n].iter().map(|&e| Fe(e))).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order).map(Fe)
    }

    /// Text form `p0^T/modulus=c0,c1,...,cT`.
    pub fn descriptor(&self) -> String {
        let m: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}/modulus={}", self.p0, self.degree, m.join(","))
    }

    pub fn parse_descriptor(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad field descriptor {text:?}"));
        let (head, modulus) = text.trim().split_once("/modulus=").ok_or_else(bad)?;
        let (p0, t) = head.split_once('^').ok_or_else(bad)?;
        let p0: u32 = p0.trim().parse().map_err(|_| bad())?;
        let t: u32 = t.trim().parse().map_err(|_| bad())?;
        let coeffs = modulus
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        FieldTower::new(p0, t, Some(&coeffs))
    }

    pub fn check(&self, x: Fe) -> Result<Fe> {
        if x.0 < self.order {
            Ok(x)
        } else {
            Err(Error::ElementOutOfRange(x.0))
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.degree as usize {
            return Err(Error::LengthMismatch { expected: self.degree as usize, got: coeffs.len() });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p0) {
            return Err(Error::Parse(format!("residue {c} not below {}", self.p0)));
        }
        Ok(Fe(self.pack(coeffs)))
    }

    /// Coefficients low degree first, length `T`.
    pub fn coeffs(&self, x: Fe) -> Vec<u32> {
        self.unpack(x.0)
    }

    pub fn format_element(&self, x: Fe) -> String {
        let c: Vec<String> = self.coeffs(x).iter().map(|c| c.to_string()).collect();
        c.join(",")
    }

    pub fn parse_element(&self, text: &str) -> Result<Fe> {
        let coeffs = text
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad element {text:?}"))))
            .collect::<Result<Vec<_>>>()?;
        self.from_coeffs(&coeffs)
    }

    /// The prime-field residue `c` as a field element.
    pub fn from_int(&self, c: i64) -> Fe {
        Fe(c.rem_euclid(self.p0 as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p0 == 2 {
            return Fe(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let n = self.order - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[diff as usize];
        if z == NO_ZECH {
            Fe::ZERO
        } else {
            Fe(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p0 == 2 || a.0 == 0 {
            return a;
        }
        let half = (self.order - 1) / 2;
        Fe(self.exp[(self.log[a.0 as usize] + half) as usize])
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
        Fe(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::InverseOfZero);
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize];
        Ok(Fe(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let n = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l as u128 * e as u128) % n as u128) as usize])
    }

    /// `x^(p0^s)`.
    pub fn frobenius(&self, x: Fe, s: u32) -> Fe {
        if x.0 == 0 {
            return x;
        }
        let n = (self.order - 1) as u64;
        let mut l = self.log[x.0 as usize] as u64;
        for _ in 0..s {
            l = l * self.p0 as u64 % n;
        }
        Fe(self.exp[l as usize])
    }

    pub fn subfield(&self, s: u32) -> Result<Subfield> {
        if s == 0 || !self.degree.is_multiple_of(s) {
            return Err(Error::NotASubfield { sub: s, degree: self.degree });
        }
        Ok(Subfield { degree: s, order: self.p0.pow(s), ext: self.degree / s })
    }

    pub fn prime_subfield(&self) -> Subfield {
        self.subfield(1).expect("1 divides every degree")
    }

    pub fn contains(&self, sub: Subfield, x: Fe) -> bool {
        self.frobenius(x, sub.degree) == x
    }

    /// Elements of the subfield sorted by index.
    pub fn subfield_elements(&self, sub: Subfield) -> Vec<Fe> {
        if sub.degree == self.degree {
            return self.elements().collect();
        }
        let step = ((self.order - 1) / (sub.order - 1)) as usize;
        let mut out: Vec<Fe> = std::iter::once(Fe::ZERO)
            .chain((0..(sub.order - 1) as usize).map(|i| Fe(self.exp[i * step])))
            .collect();
        out.sort();
        out
    }

    /// `Tr_{F_q/F_p}(x) = x + x^p + ... + x^(p^(t-1))` with `p = p0^s`.
    pub fn trace_to(&self, x: Fe, sub: Subfield) -> Fe {
        let mut acc = Fe::ZERO;
        let mut y = x;
        for _ in 0..sub.ext {
            acc = self.add(acc, y);
            y = self.frobenius(y, sub.degree);
        }
        acc
    }

    /// Checked variant taking the subfield degree directly.
    pub fn trace(&self, x: Fe, s: u32) -> Result<Fe> {
        let sub = self.subfield(s)?;
        Ok(self.trace_to(self.check(x)?, sub))
    }

    /// `{1, xi, ..., xi^(t-1)}`, an `F_p`-basis of `F_q`.
    pub fn power_basis(&self, sub: Subfield) -> Vec<Fe> {
        let xi = self.generator();
        (0..sub.ext as u64).map(|i| self.pow(xi, i)).collect()
    }

    /// Solves `Tr(eta_i theta_j) = delta_ij` through the trace Gram matrix.
    pub fn dual_basis(&self, sub: Subfield, eta: &[Fe]) -> Result<TraceBasis> {
        let t = sub.ext as usize;
        if eta.len() != t {
            return Err(Error::NotABasis { rank: eta.len().min(t), expected: t });
        }
        for &e in eta {
            self.check(e)?;
        }
        let gram: Vec<Vec<Fe>> = eta
            .iter()
            .map(|&a| eta.iter().map(|&b| self.trace_to(self.mul(a, b), sub)).collect())
            .collect();
        let Some(inv) = linalg::invert(self, &gram) else {
            let reference = self.default_basis(sub);
            let rows = eta.iter().map(|&e| self.traces_of(e, &reference)).collect();
            return Err(Error::NotABasis { rank: linalg::rank(self, rows), expected: t });
        };
        // theta_j = sum_k inv[k][j] eta_k
        let theta = (0..t)
            .map(|j| (0..t).fold(Fe::ZERO, |acc, k| self.add(acc, self.mul(inv[k][j], eta[k]))))
            .collect();
        Ok(TraceBasis { base: sub, eta: eta.to_vec(), theta })
    }

    pub fn default_basis(&self, sub: Subfield) -> TraceBasis {
        self.dual_basis(sub, &self.power_basis(sub)).expect("power basis of the canonical root")
    }

    /// `sum_i traces_i * theta_i`.
    pub fn element_from_traces(&self, traces: &[Fe], basis: &TraceBasis) -> Result<Fe> {
        if traces.len() != basis.len() {
            return Err(Error::LengthMismatch { expected: basis.len(), got: traces.len() });
        }
        let mut acc = Fe::ZERO;
        for (&tr, &th) in traces.iter().zip(&basis.theta) {
            self.check(tr)?;
            if !self.contains(basis.base, tr) {
                return Err(Error::NotInSubfield { order: basis.base.order });
            }
            acc = self.add(acc, self.mul(tr, th));
        }
        Ok(acc)
    }

    /// `(Tr(x eta_i))_i`: coordinates of `x` against `theta`.
    pub fn traces_of(&self, x: Fe, basis: &TraceBasis) -> Vec<Fe> {
        basis.eta.iter().map(|&e| self.trace_to(self.mul(x, e), basis.base)).collect()
    }

    pub fn sum<I: IntoIterator<Item = Fe>>(&self, it: I) -> Fe {
        it.into_iter().fold(Fe::ZERO, |a, b| self.add(a, b))
    }

    pub fn product<I: IntoIterator<Item = Fe>>(&self, it: I) -> Fe {
        it.into_iter().fold(Fe::ONE, |a, b| self.mul(a, b))
    }
}

fn pad(v: &[u32], len: usize) -> Vec<u32> {
    let mut out = v.to_vec();
    out.resize(len, 0);
    out
}

/// Dimension over `sub` of the span of vectors in `F_q^u`, plus the subset of
/// input vectors chosen greedily (first-come) as a basis of that span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanInfo {
    pub dim: usize,
    pub basis: Vec<Vec<Fe>>,
    pub chosen: Vec<usize>,
}

pub fn span_dim_over(tower: &FieldTower, vectors: &[Vec<Fe>], sub: Subfield) -> Result<SpanInfo> {
    let len = vectors.first().map_or(0, |v| v.len());
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::Ragged);
    }
    let mut ech = linalg::SpanEchelon::new(tower, sub);
    let mut chosen = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        for &x in v {
            tower.check(x)?;
        }
        if ech.insert(v).is_none() {
            chosen.push(i);
        }
    }
    Ok(SpanInfo {
        dim: chosen.len(),
        basis: chosen.iter().map(|&i| vectors[i].clone()).collect(),
        chosen,
    })
}
