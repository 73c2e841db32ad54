//! Scheme files, codeword files and the polynomial text form.
//!
//! Elements are written as packed integers in JSON and as comma-separated
//! coefficient lists (low degree first) in the text formats. Every document
//! starts from the field descriptor, e.g. `2^4/modulus=1,1,0,0,1`, so it can be
//! read back without other context.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::FamilyParams;
use crate::gf::{Fe, FieldTower};
use crate::grs::Codeword;
use crate::poly::Poly;
use crate::rack::{Host, RackLayout, RepairScheme, ValidationReport};

pub const SCHEME_FORMAT: &str = "rack-repair-scheme/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub format: String,
    pub field: String,
    pub base_degree: u32,
    pub k: usize,
    pub d: usize,
    pub host: Host,
    pub layout: Vec<Vec<Fe>>,
    pub eta: Vec<Fe>,
    /// Coefficients low degree first.
    pub h_polys: Vec<Vec<Fe>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_basis: Option<Vec<Fe>>,
    pub validation: ValidationReport,
}

impl SchemeFile {
    pub fn from_scheme(scheme: &RepairScheme, family: Option<FamilyParams>, subspace_basis: Option<Vec<Fe>>) -> Self {
        SchemeFile {
            format: SCHEME_FORMAT.to_string(),
            field: scheme.tower().descriptor(),
            base_degree: scheme.base().degree(),
            k: scheme.k(),
            d: scheme.d(),
            host: scheme.host(),
            layout: scheme.layout().grid().to_vec(),
            eta: scheme.basis().eta().to_vec(),
            h_polys: scheme.h_polys().iter().map(|h| h.coeffs().to_vec()).collect(),
            family,
            subspace_basis,
            validation: scheme.validate(),
        }
    }

    /// Rebuilds the scheme; the embedded validation report is recomputed, not trusted.
    pub fn to_scheme(&self) -> Result<RepairScheme> {
        if self.format != SCHEME_FORMAT {
            return Err(Error::Parse(format!("unsupported scheme format {:?}", self.format)));
        }
        let tower = Arc::new(FieldTower::parse_descriptor(&self.field)?);
        let base = tower.subfield(self.base_degree)?;
        let basis = tower.dual_basis(base, &self.eta)?;
        let layout = RackLayout::new(self.layout.clone())?;
        let hs = self
            .h_polys
            .iter()
            .map(|c| {
                for &x in c {
                    tower.check(x)?;
                }
                Ok(Poly::new(c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        RepairScheme::new(tower, layout, self.k, self.host, self.d, basis, hs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        SchemeFile::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Field descriptor line, then one symbol per line; `?` marks an erasure.
pub fn format_codeword(tw: &FieldTower, word: &Codeword) -> String {
    let mut out = tw.descriptor();
    out.push('\n');
    for (i, &x) in word.symbols.iter().enumerate() {
        if word.erased.contains(&i) {
            out.push('?');
        } else {
            out.push_str(&tw.format_element(x));
        }
        out.push('\n');
    }
    out
}

pub fn parse_codeword(text: &str) -> Result<(FieldTower, Codeword)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty codeword file".into()))?;
    let tw = FieldTower::parse_descriptor(header)?;
    let mut word = Codeword::new(Vec::new());
    for (i, line) in lines.enumerate() {
        if line == "?" {
            word.symbols.push(Fe::ZERO);
            word.erase(i);
        } else {
            word.symbols.push(tw.parse_element(line)?);
        }
    }
    Ok((tw, word))
}

/// `descriptor` newline `c_0;c_1;...` with each `c_i` a coefficient list.
pub fn format_poly(tw: &FieldTower, f: &Poly) -> String {
    let body: Vec<String> = f.coeffs().iter().map(|&c| tw.format_element(c)).collect();
    format!("{}\n{}\n", tw.descriptor(), body.join(";"))
}

pub fn parse_poly(text: &str) -> Result<(FieldTower, Poly)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty polynomial file".into()))?;
    let tw = FieldTower::parse_descriptor(header)?;
    let body = lines.next().unwrap_or("");
    let coeffs = if body.is_empty() {
        Vec::new()
    } else {
        body.split(';').map(|c| tw.parse_element(c)).collect::<Result<Vec<_>>>()?
    };
    Ok((tw, Poly::new(coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge;

    #[test]
    fn scheme_round_trip() {
        let tower = Arc::new(FieldTower::new(2, 4, None).unwrap());
        let s = forge::gw_scheme(tower, 1, 8, 3).unwrap();
        let file = SchemeFile::from_scheme(&s, None, None);
        let back = SchemeFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        let rebuilt = back.to_scheme().unwrap();
        assert_eq!(rebuilt.h_polys(), s.h_polys());
        assert_eq!(rebuilt.basis(), s.basis());
        assert!(rebuilt.validate().passed());
        let mut bad = file.clone();
        bad.format = "other".into();
        assert!(bad.to_scheme().is_err());
    }

    #[test]
    fn codeword_text() {
        let tw = FieldTower::new(3, 2, None).unwrap();
        let word = Codeword::new(vec![Fe(0), Fe(4), Fe(8)]).with_erasures([1]);
        let text = format_codeword(&tw, &word);
        assert_eq!(text, "3^2/modulus=1,0,1\n0,0\n?\n2,2\n");
        let (tw2, back) = parse_codeword(&text).unwrap();
        assert_eq!(tw2, tw);
        assert_eq!(back.erased, word.erased);
        assert_eq!(back.symbols[2], Fe(8));
        assert!(parse_codeword("3^2/modulus=1,0,1\n3,0\n").is_err());
    }

    #[test]
    fn poly_text() {
        let tw = FieldTower::new(2, 4, None).unwrap();
        let f = Poly::new(vec![Fe(3), Fe::ZERO, Fe(8)]);
        let text = format_poly(&tw, &f);
        assert_eq!(text, "2^4/modulus=1,1,0,0,1\n1,1,0,0;0,0,0,0;0,0,0,1\n");
        assert_eq!(parse_poly(&text).unwrap().1, f);
        assert!(parse_poly(&format_poly(&tw, &Poly::zero())).unwrap().1.is_zero());
    }
}
