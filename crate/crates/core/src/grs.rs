//! Generalized Reed-Solomon codes and the interpolation recovery baseline.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldTower};
use crate::poly::{interpolate, Poly};

/// `u_i = prod_{j != i} (a_i - a_j)^{-1}`.
pub fn dual_multipliers(points: &[Fe], tw: &FieldTower) -> Result<Vec<Fe>> {
    let mut out = Vec::with_capacity(points.len());
    for (i, &a) in points.iter().enumerate() {
        let mut prod = Fe::ONE;
        for (j, &b) in points.iter().enumerate() {
            if i != j {
                let diff = tw.sub(a, b);
                if diff.is_zero() {
                    return Err(Error::RepeatedPoint);
                }
                prod = tw.mul(prod, diff);
            }
        }
        out.push(tw.inv(prod)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GrsCode {
    tower: Arc<FieldTower>,
    points: Vec<Fe>,
    multipliers: Vec<Fe>,
    dual: Vec<Fe>,
    k: usize,
}

/// Stored symbols plus an erasure mask (0 is a legal symbol).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub symbols: Vec<Fe>,
    pub erased: BTreeSet<usize>,
}

impl Codeword {
    pub fn new(symbols: Vec<Fe>) -> Self {
        Codeword { symbols, erased: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn erase(&mut self, i: usize) {
        self.erased.insert(i);
    }

    pub fn with_erasures<I: IntoIterator<Item = usize>>(mut self, idx: I) -> Self {
        self.erased.extend(idx);
        self
    }
}

impl GrsCode {
    pub fn new(tower: Arc<FieldTower>, points: Vec<Fe>, multipliers: Vec<Fe>, k: usize) -> Result<Self> {
        let n = points.len();
        if multipliers.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: multipliers.len() });
        }
        if k < 1 || k >= n || n > tower.order() as usize {
            return Err(Error::InvalidCode(format!("need 1 <= k < n <= q, got k={k}, n={n}")));
        }
        for &v in &multipliers {
            if tower.check(v)?.is_zero() {
                return Err(Error::InvalidCode("zero column multiplier".into()));
            }
        }
        let dual = dual_multipliers(&points, &tower)?;
        Ok(GrsCode { tower, points, multipliers, dual, k })
    }

    /// Plain Reed-Solomon code (all multipliers 1).
    pub fn reed_solomon(tower: Arc<FieldTower>, points: Vec<Fe>, k: usize) -> Result<Self> {
        let ones = vec![Fe::ONE; points.len()];
        GrsCode::new(tower, points, ones, k)
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn points(&self) -> &[Fe] {
        &self.points
    }

    pub fn multipliers(&self) -> &[Fe] {
        &self.multipliers
    }

    pub fn dual(&self) -> &[Fe] {
        &self.dual
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn encode(&self, message: &Poly) -> Result<Codeword> {
        if let Some(deg) = message.degree() {
            if deg >= self.k {
                return Err(Error::DegreeTooLarge { degree: deg, max: self.k - 1 });
            }
        }
        let tw = &*self.tower;
        Ok(Codeword::new(
            self.points
                .iter()
                .zip(&self.multipliers)
                .map(|(&a, &v)| tw.mul(v, message.eval(a, tw)))
                .collect(),
        ))
    }

    /// `f(a_i) = c_i / v_i`.
    pub fn unscaled(&self, word: &Codeword) -> Vec<Fe> {
        let tw = &*self.tower;
        word.symbols
            .iter()
            .zip(&self.multipliers)
            .map(|(&c, &v)| tw.div(c, v).expect("multipliers are nonzero"))
            .collect()
    }

    /// Parity checks `sum_i u_i (c_i / v_i) a_i^e = 0` for `e < n - k`, taken
    /// over the non-erased positions (a punctured GRS code of the same `k`).
    pub fn is_codeword(&self, word: &Codeword) -> bool {
        if word.len() != self.n() {
            return false;
        }
        let tw = &*self.tower;
        let vals = self.unscaled(word);
        let keep: Vec<usize> = (0..self.n()).filter(|i| !word.erased.contains(i)).collect();
        if keep.len() <= self.k {
            return true;
        }
        let dual = if keep.len() == self.n() {
            self.dual.clone()
        } else {
            let pts: Vec<Fe> = keep.iter().map(|&i| self.points[i]).collect();
            dual_multipliers(&pts, tw).expect("distinct points")
        };
        let mut terms: Vec<Fe> = keep.iter().zip(&dual).map(|(&i, &u)| tw.mul(vals[i], u)).collect();
        for _ in 0..keep.len() - self.k {
            if !tw.sum(terms.iter().copied()).is_zero() {
                return false;
            }
            for (t, &i) in terms.iter_mut().zip(&keep) {
                *t = tw.mul(*t, self.points[i]);
            }
        }
        true
    }

    /// Interpolates the message from `k` surviving positions.
    pub fn recover_message(&self, word: &Codeword, helpers: &[usize]) -> Result<Poly> {
        if helpers.len() < self.k {
            return Err(Error::InsufficientHelpers { needed: self.k, got: helpers.len() });
        }
        let chosen = &helpers[..self.k];
        for &h in chosen {
            if h >= self.n() || word.erased.contains(&h) {
                return Err(Error::InvalidHelper(h));
            }
        }
        let tw = &*self.tower;
        let pts: Vec<Fe> = chosen.iter().map(|&i| self.points[i]).collect();
        let vals = chosen
            .iter()
            .map(|&i| tw.div(word.symbols[i], self.multipliers[i]))
            .collect::<Result<Vec<_>>>()?;
        interpolate(&pts, &vals, tw)
    }

    /// Naive repair: download `k` whole symbols, interpolate, re-encode.
    pub fn naive_recover(&self, word: &Codeword, helpers: &[usize]) -> Result<Codeword> {
        let f = self.recover_message(word, helpers)?;
        self.encode(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f4() -> Arc<FieldTower> {
        Arc::new(FieldTower::new(2, 2, None).unwrap())
    }

    fn random_poly(rng: &mut ChaCha8Rng, tw: &FieldTower, len: usize) -> Poly {
        Poly::new((0..len).map(|_| Fe(rng.gen_range(0..tw.order()))).collect())
    }

    #[test]
    fn encode_examples() {
        let tw = f4();
        let w = tw.generator();
        let code = GrsCode::reed_solomon(tw.clone(), vec![Fe::ZERO, Fe::ONE, w], 2).unwrap();
        assert_eq!(code.encode(&Poly::zero()).unwrap().symbols, vec![Fe::ZERO; 3]);
        assert_eq!(code.encode(&Poly::constant(Fe::ONE)).unwrap().symbols, vec![Fe::ONE; 3]);
        assert_eq!(code.encode(&Poly::x()).unwrap().symbols, vec![Fe::ZERO, Fe::ONE, w]);
        assert_eq!(
            code.encode(&Poly::monomial(Fe::ONE, 2)),
            Err(Error::DegreeTooLarge { degree: 2, max: 1 })
        );
    }

    #[test]
    fn dual_multiplier_examples() {
        let tw = f4();
        let w = tw.generator();
        let w2 = tw.mul(w, w);
        assert_eq!(dual_multipliers(&[Fe::ZERO, Fe::ONE, w], &tw).unwrap(), vec![w2, w, Fe::ONE]);
        assert_eq!(dual_multipliers(&[Fe::ZERO, Fe::ONE], &tw).unwrap(), vec![Fe::ONE, Fe::ONE]);
        assert_eq!(dual_multipliers(&[Fe::ONE, Fe::ONE], &tw), Err(Error::RepeatedPoint));
        // g = f = 1 instance of the certified identity
        for n in 2..=4usize {
            let pts: Vec<Fe> = tw.elements().take(n).collect();
            let u = dual_multipliers(&pts, &tw).unwrap();
            assert_eq!(tw.sum(u), Fe::ZERO);
        }
    }

    #[test]
    fn codeword_membership() {
        let tw = Arc::new(FieldTower::new(2, 4, None).unwrap());
        let pts: Vec<Fe> = tw.elements().take(8).collect();
        let mults: Vec<Fe> = (1..=8).map(Fe).collect();
        let code = GrsCode::new(tw.clone(), pts, mults, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_poly(&mut rng, &tw, 3);
        let mut word = code.encode(&f).unwrap();
        assert!(code.is_codeword(&word));
        assert!(code.is_codeword(&Codeword::new(vec![Fe::ZERO; 8])));
        word.symbols[4] = tw.add(word.symbols[4], Fe::ONE);
        assert!(!code.is_codeword(&word));
        // erasing the corrupted symbol restores consistency
        assert!(code.is_codeword(&word.clone().with_erasures([4])));
        assert!(!code.is_codeword(&word.clone().with_erasures([5])));
        assert!(code.is_codeword(&word.with_erasures(0..5)));
    }

    #[test]
    fn recovery_from_any_k() {
        let tw = Arc::new(FieldTower::new(2, 4, None).unwrap());
        let pts: Vec<Fe> = tw.elements().skip(3).take(7).collect();
        let code = GrsCode::reed_solomon(tw.clone(), pts, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_poly(&mut rng, &tw, 3);
            let word = code.encode(&f).unwrap();
            let erased = rng.gen_range(0..7);
            let damaged = word.clone().with_erasures([erased]);
            let helpers: Vec<usize> = (0..7).filter(|&i| i != erased).collect();
            assert_eq!(code.naive_recover(&damaged, &helpers).unwrap(), word);
            assert_eq!(code.recover_message(&damaged, &helpers).unwrap(), f);
        }
        let word = code.encode(&Poly::zero()).unwrap().with_erasures([0]);
        assert_eq!(
            code.naive_recover(&word, &[1, 2]),
            Err(Error::InsufficientHelpers { needed: 3, got: 2 })
        );
        assert_eq!(code.naive_recover(&word, &[0, 1, 2]), Err(Error::InvalidHelper(0)));
    }

    #[test]
    fn constant_code_copies_value() {
        let tw = f4();
        let code = GrsCode::reed_solomon(tw.clone(), vec![Fe::ONE, Fe(2)], 1).unwrap();
        let word = code.encode(&Poly::constant(Fe(3))).unwrap();
        let damaged = word.clone().with_erasures([1]);
        assert_eq!(code.naive_recover(&damaged, &[0]).unwrap(), word);
    }
}
