//! Polynomial-coefficient polyvector fields: the exterior algebra over the
//! polynomial ring on anticommuting generators `e_0, ..., e_{n-1}`, one per
//! variable, each of cohomological degree -1.
//!
//! The two differentials of the Landau-Ginzburg model act here: the Koszul
//! twist by the gradient of a potential, and the divergence operator. Their
//! failure-to-be-a-derivation bracket is the BV bracket.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::poly::{Poly, Rat};

/// Strictly increasing list of anticommuting-generator indices.
pub type IndexSet = Vec<usize>;

/// An element of the polyvector algebra, stored as a sparse map from
/// generator index sets to polynomial coefficients.
///
/// Invariants: keys strictly increasing, no zero coefficient polynomials.
/// The component at key `J = [j1 < ... < jk]` multiplies `e_{j1} ... e_{jk}`
/// and sits in cohomological degree `-k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVector {
    n_vars: usize,
    components: BTreeMap<IndexSet, Poly>,
}

/// Number of out-of-order pairs between two strictly increasing sequences;
/// its parity is the Koszul sign of merging them.
fn inversions(a: &[usize], b: &[usize]) -> usize {
    let mut count = 0;
    for &x in a {
        count += b.iter().take_while(|&&y| y < x).count();
    }
    count
}

fn merge_disjoint(a: &[usize], b: &[usize]) -> IndexSet {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out
}

impl PolyVector {
    pub fn zero(n_vars: usize) -> Self {
        PolyVector {
            n_vars,
            components: BTreeMap::new(),
        }
    }

    /// Embed a polynomial as the generator-free part.
    pub fn from_poly(p: Poly) -> Self {
        let mut pv = PolyVector::zero(p.n_vars());
        pv.add_component(Vec::new(), p);
        pv
    }

    /// The bare generator `e_i`.
    pub fn generator(n_vars: usize, i: usize) -> Self {
        let mut pv = PolyVector::zero(n_vars);
        pv.add_component(vec![i], Poly::one(n_vars));
        pv
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&IndexSet, &Poly)> {
        self.components.iter()
    }

    pub fn component(&self, key: &[usize]) -> Poly {
        self.components
            .get(key)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.n_vars))
    }

    /// The generator-free part as a polynomial.
    pub fn scalar_part(&self) -> Poly {
        self.component(&[])
    }

    /// Some(p) when the element is purely generator-free.
    pub fn as_poly(&self) -> Option<Poly> {
        if self.components.keys().all(|k| k.is_empty()) {
            Some(self.scalar_part())
        } else {
            None
        }
    }

    pub fn add_component(&mut self, key: IndexSet, p: Poly) {
        debug_assert!(key.windows(2).all(|w| w[0] < w[1]));
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.components.entry(key) {
            Entry::Vacant(e) => {
                e.insert(p);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&p);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &PolyVector) -> PolyVector {
        let mut out = self.clone();
        for (k, p) in &other.components {
            out.add_component(k.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyVector) -> PolyVector {
        let mut out = self.clone();
        for (k, p) in &other.components {
            out.add_component(k.clone(), p.neg());
        }
        out
    }

    pub fn neg(&self) -> PolyVector {
        PolyVector {
            n_vars: self.n_vars,
            components: self
                .components
                .iter()
                .map(|(k, p)| (k.clone(), p.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> PolyVector {
        let mut out = PolyVector::zero(self.n_vars);
        for (k, p) in &self.components {
            out.add_component(k.clone(), p.scale(c));
        }
        out
    }

    pub fn scale_poly(&self, q: &Poly) -> PolyVector {
        let mut out = PolyVector::zero(self.n_vars);
        for (k, p) in &self.components {
            out.add_component(k.clone(), p.mul(q));
        }
        out
    }

    /// Supercommutative product with the Koszul sign convention:
    /// `e_J * e_K = 0` when the index sets meet, otherwise the sign of the
    /// merge permutation times `e_{J ∪ K}`.
    pub fn mul(&self, other: &PolyVector) -> PolyVector {
        let mut out = PolyVector::zero(self.n_vars);
        for (ka, pa) in &self.components {
            for (kb, pb) in &other.components {
                if ka.iter().any(|i| kb.binary_search(i).is_ok()) {
                    continue;
                }
                let sign = if inversions(ka, kb).is_multiple_of(2) {
                    1
                } else {
                    -1
                };
                let mut prod = pa.mul(pb);
                if sign < 0 {
                    prod = prod.neg();
                }
                out.add_component(merge_disjoint(ka, kb), prod);
            }
        }
        out
    }

    /// Left odd derivative with respect to generator `i`: on `e_J` it gives
    /// `(-1)^p e_{J \ {i}}` where `p` is the 0-based position of `i` in `J`,
    /// and 0 when `i` is absent.
    pub fn odd_partial(&self, i: usize) -> PolyVector {
        let mut out = PolyVector::zero(self.n_vars);
        for (k, p) in &self.components {
            if let Ok(pos) = k.binary_search(&i) {
                let mut key = k.clone();
                key.remove(pos);
                let q = if pos % 2 == 0 { p.clone() } else { p.neg() };
                out.add_component(key, q);
            }
        }
        out
    }

    /// Formal partial derivative of every coefficient.
    pub fn partial(&self, i: usize) -> PolyVector {
        let mut out = PolyVector::zero(self.n_vars);
        for (k, p) in &self.components {
            out.add_component(k.clone(), p.partial(i));
        }
        out
    }

    /// Cohomological degree when homogeneous: `-k` with all keys of size `k`.
    /// The zero element reports degree 0.
    pub fn degree(&self) -> Option<i32> {
        let mut sizes = self.components.keys().map(|k| k.len());
        match sizes.next() {
            None => Some(0),
            Some(first) => {
                if sizes.all(|s| s == first) {
                    Some(-(first as i32))
                } else {
                    None
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree().is_some()
    }

    pub fn display<'a>(&'a self, vars: &'a [String]) -> PolyVectorDisplay<'a> {
        PolyVectorDisplay { pv: self, vars }
    }

    pub fn to_string_with(&self, vars: &[String]) -> String {
        format!("{}", self.display(vars))
    }
}

/// Twist differential for the gradient `partials = (dS/dx_i)_i`:
/// `sum_i (dS/dx_i) * odd_partial_i`. An odd derivation of degree +1.
pub fn apply_twist(partials: &[Poly], a: &PolyVector) -> PolyVector {
    let mut out = PolyVector::zero(a.n_vars());
    for (i, dsi) in partials.iter().enumerate() {
        if dsi.is_zero() {
            continue;
        }
        out = out.add(&a.odd_partial(i).scale_poly(dsi));
    }
    out
}

/// Twist differential computed directly from the potential `s`.
pub fn apply_delta_s(s: &Poly, a: &PolyVector) -> PolyVector {
    let partials: Vec<Poly> = (0..s.n_vars()).map(|i| s.partial(i)).collect();
    apply_twist(&partials, a)
}

/// Divergence operator `sum_i d/dx_i . odd_partial_i`; degree +1.
pub fn apply_divergence(a: &PolyVector) -> PolyVector {
    let mut out = PolyVector::zero(a.n_vars());
    for i in 0..a.n_vars() {
        out = out.add(&a.odd_partial(i).partial(i));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyVectorError {
    #[error("BV bracket requires degree-homogeneous arguments")]
    NotHomogeneous,
}

/// BV bracket: the failure of the divergence to be a derivation,
/// `l2(a,b) = div(a*b) - div(a)*b - (-1)^{|a|} a*div(b)`.
///
/// Only stated for degree-homogeneous arguments; extend bilinearly at the
/// call site if needed.
pub fn bv_bracket(a: &PolyVector, b: &PolyVector) -> Result<PolyVector, PolyVectorError> {
    let da = a.degree().ok_or(PolyVectorError::NotHomogeneous)?;
    if !b.is_homogeneous() {
        return Err(PolyVectorError::NotHomogeneous);
    }
    let first = apply_divergence(&a.mul(b));
    let second = apply_divergence(a).mul(b);
    let third = a.mul(&apply_divergence(b));
    let third = if da.rem_euclid(2) == 0 {
        third
    } else {
        third.neg()
    };
    Ok(first.sub(&second).sub(&third))
}

/// Integer charge per variable; generators carry the opposite charge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeSpec {
    charges: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChargeError {
    #[error("charge of zero is not allowed (variable {var})")]
    ZeroCharge { var: usize },
    #[error("element is not charge-homogeneous: found charges {first} and {second}")]
    NotHomogeneous { first: i64, second: i64 },
}

impl ChargeSpec {
    pub fn new(charges: Vec<i64>) -> Result<Self, ChargeError> {
        if let Some(var) = charges.iter().position(|&c| c == 0) {
            return Err(ChargeError::ZeroCharge { var });
        }
        Ok(ChargeSpec { charges })
    }

    pub fn charges(&self) -> &[i64] {
        &self.charges
    }

    pub fn n_vars(&self) -> usize {
        self.charges.len()
    }

    /// Charge of a single term: variable charges weighted by exponents plus
    /// the opposite charges of the generators present.
    pub fn term_charge(&self, exps: &[u32], key: &[usize]) -> i64 {
        let from_vars: i64 = exps
            .iter()
            .zip(&self.charges)
            .map(|(&e, &c)| i64::from(e) * c)
            .sum();
        let from_gens: i64 = key.iter().map(|&i| -self.charges[i]).sum();
        from_vars + from_gens
    }

    /// Common charge of all terms, `None` for the zero element.
    pub fn charge_of(&self, a: &PolyVector) -> Result<Option<i64>, ChargeError> {
        let mut seen: Option<i64> = None;
        for (key, p) in a.components() {
            for (m, _) in p.terms() {
                let c = self.term_charge(&m.0, key);
                match seen {
                    None => seen = Some(c),
                    Some(prev) if prev == c => {}
                    Some(prev) => {
                        return Err(ChargeError::NotHomogeneous {
                            first: prev,
                            second: c,
                        })
                    }
                }
            }
        }
        Ok(seen)
    }

    pub fn poly_charge(&self, p: &Poly) -> Result<Option<i64>, ChargeError> {
        self.charge_of(&PolyVector::from_poly(p.clone()))
    }
}

pub struct PolyVectorDisplay<'a> {
    pv: &'a PolyVector,
    vars: &'a [String],
}

impl fmt::Display for PolyVectorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pv.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<&IndexSet> = self.pv.components.keys().collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut first = true;
        for key in keys {
            let p = &self.pv.components[key];
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if key.is_empty() {
                write!(f, "{}", p.display(self.vars))?;
            } else {
                let list: Vec<String> = key.iter().map(|i| i.to_string()).collect();
                write!(f, "({})*e[{}]", p.display(self.vars), list.join(","))?;
            }
        }
        Ok(())
    }
}

/// Parse the textual polyvector form: a sum of `(<poly>)*e[i,j,...]` terms
/// plus an optional bare polynomial for the generator-free part.
pub fn parse_polyvector(
    text: &str,
    vars: &[String],
) -> Result<PolyVector, crate::parse::ParseError> {
    use crate::parse::{parse_poly, ParseError};

    let n = vars.len();
    let mut out = PolyVector::zero(n);
    let mut scalar_chunks: Vec<String> = Vec::new();

    for (chunk, sign) in split_top_level(text) {
        let trimmed = chunk.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some((poly_src, key_src)) = match_e_term(trimmed) {
            let mut p = parse_poly(poly_src, vars)?;
            if sign < 0 {
                p = p.neg();
            }
            let mut key: IndexSet = Vec::new();
            let key_src = key_src.trim();
            if !key_src.is_empty() {
                for part in key_src.split(',') {
                    let idx: usize = part.trim().parse().map_err(|_| ParseError::Syntax {
                        pos: 0,
                        message: format!("bad generator index `{}`", part.trim()),
                    })?;
                    if idx >= n {
                        return Err(ParseError::Syntax {
                            pos: 0,
                            message: format!("generator index {} out of range", idx),
                        });
                    }
                    key.push(idx);
                }
            }
            let strictly_increasing = key.windows(2).all(|w| w[0] < w[1]);
            if !strictly_increasing {
                return Err(ParseError::Syntax {
                    pos: 0,
                    message: "generator indices must be strictly increasing".into(),
                });
            }
            out.add_component(key, p);
        } else {
            scalar_chunks.push(if sign < 0 {
                format!("-({})", trimmed)
            } else {
                trimmed.to_string()
            });
        }
    }
    if !scalar_chunks.is_empty() {
        let joined = scalar_chunks.join(" + ");
        out.add_component(Vec::new(), parse_poly(&joined, vars)?);
    }
    Ok(out)
}

/// Split on top-level `+`/`-`, returning each summand with its sign.
fn split_top_level(text: &str) -> Vec<(String, i32)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut sign = 1;
    for ch in text.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                current.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                current.push(ch);
            }
            '+' if depth == 0 => {
                if !current.trim().is_empty() {
                    out.push((current.clone(), sign));
                }
                current.clear();
                sign = 1;
            }
            '-' if depth == 0 && current.trim().is_empty() => {
                // Leading minus of the next summand.
                sign = -sign;
            }
            '-' if depth == 0 => {
                out.push((current.clone(), sign));
                current.clear();
                sign = -1;
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push((current, sign));
    }
    out
}

/// Recognize `(<poly>)*e[<list>]`, returning the inner poly source and list.
fn match_e_term(chunk: &str) -> Option<(&str, &str)> {
    let rest = chunk.strip_prefix('(')?;
    let mut depth = 1i32;
    for (i, ch) in rest.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let poly_src = &rest[..i];
                    let tail = rest[i + 1..].trim_start();
                    let tail = tail.strip_prefix('*')?.trim_start();
                    let tail = tail.strip_prefix('e')?.trim_start();
                    let tail = tail.strip_prefix('[')?;
                    let tail = tail.trim_end();
                    let key_src = tail.strip_suffix(']')?;
                    return Some((poly_src, key_src));
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn pv_poly(src: &str, v: &[String]) -> PolyVector {
        PolyVector::from_poly(parse_poly(src, v).unwrap())
    }

    #[test]
    fn generators_anticommute_and_square_to_zero() {
        let e0 = PolyVector::generator(2, 0);
        let e1 = PolyVector::generator(2, 1);
        let e01 = e0.mul(&e1);
        assert_eq!(e01.component(&[0, 1]), Poly::one(2));
        assert_eq!(e1.mul(&e0), e01.neg());
        assert!(e0.mul(&e0).is_zero());
    }

    #[test]
    fn koszul_sign_on_coefficients() {
        // (x0 e1) * (x1 e0) = -x0 x1 e0 e1
        let v = vars(&["x0", "x1"]);
        let a = PolyVector::generator(2, 1).scale_poly(&parse_poly("x0", &v).unwrap());
        let b = PolyVector::generator(2, 0).scale_poly(&parse_poly("x1", &v).unwrap());
        let prod = a.mul(&b);
        let expect_coeff = parse_poly("-x0*x1", &v).unwrap();
        assert_eq!(prod.component(&[0, 1]), expect_coeff);
    }

    #[test]
    fn odd_partial_signs() {
        let e0 = PolyVector::generator(2, 0);
        let e1 = PolyVector::generator(2, 1);
        let e01 = e0.mul(&e1);
        assert_eq!(e01.odd_partial(0), e1);
        assert_eq!(e01.odd_partial(1), e0.neg());
        let v = vars(&["x0", "x1"]);
        assert!(pv_poly("x0^2", &v).odd_partial(0).is_zero());
    }

    #[test]
    fn twist_examples() {
        // S = x^3/3: twist(e) = x^2, twist(1) = 0, twist(x e) = x^3.
        let v = vars(&["x"]);
        let s = parse_poly("1/3*x^3", &v).unwrap();
        let e = PolyVector::generator(1, 0);
        assert_eq!(apply_delta_s(&s, &e), pv_poly("x^2", &v));
        assert!(apply_delta_s(&s, &pv_poly("1", &v)).is_zero());
        let xe = e.scale_poly(&parse_poly("x", &v).unwrap());
        assert_eq!(apply_delta_s(&s, &xe), pv_poly("x^3", &v));
    }

    #[test]
    fn divergence_examples() {
        let v = vars(&["x"]);
        let xe = PolyVector::generator(1, 0).scale_poly(&parse_poly("x", &v).unwrap());
        assert_eq!(apply_divergence(&xe), pv_poly("1", &v));
        assert!(apply_divergence(&pv_poly("x^2", &v)).is_zero());

        let v2 = vars(&["x0", "x1"]);
        let a = PolyVector::generator(2, 0).scale_poly(&parse_poly("x0*x1", &v2).unwrap());
        assert_eq!(apply_divergence(&a), pv_poly("x1", &v2));
    }

    #[test]
    fn bracket_hand_values() {
        // l2(x0, e0) = 1 and l2(x0^2, e0) = 2 x0, expanding the definition:
        // div(x0 * e0) - div(x0)*e0 - x0*div(e0) = 1 - 0 - 0.
        let v = vars(&["x0", "x1"]);
        let x0 = pv_poly("x0", &v);
        let e0 = PolyVector::generator(2, 0);
        assert_eq!(bv_bracket(&x0, &e0).unwrap(), pv_poly("1", &v));
        let x0sq = pv_poly("x0^2", &v);
        assert_eq!(bv_bracket(&x0sq, &e0).unwrap(), pv_poly("2*x0", &v));
    }

    #[test]
    fn bracket_with_unit_vanishes() {
        let v = vars(&["x0", "x1"]);
        let one = pv_poly("1", &v);
        let samples = [
            pv_poly("x0^2 + x1", &v),
            PolyVector::generator(2, 0).scale_poly(&parse_poly("x0*x1", &v).unwrap()),
            PolyVector::generator(2, 0).mul(&PolyVector::generator(2, 1)),
        ];
        for a in &samples {
            assert!(bv_bracket(a, &one).unwrap().is_zero());
            assert!(bv_bracket(&one, a).unwrap().is_zero());
        }
    }

    #[test]
    fn bracket_rejects_inhomogeneous_input() {
        let v = vars(&["x0", "x1"]);
        let mixed = pv_poly("x0", &v).add(&PolyVector::generator(2, 0));
        assert!(bv_bracket(&mixed, &pv_poly("1", &v)).is_err());
    }

    #[test]
    fn charge_examples() {
        // Dwork-cubic charges in vars [y, z0, z1, z2].
        let spec = ChargeSpec::new(vec![-3, 1, 1, 1]).unwrap();
        let v = vars(&["y", "z0", "z1", "z2"]);
        let a = pv_poly("y*z0*z1*z2", &v);
        assert_eq!(spec.charge_of(&a).unwrap(), Some(0));

        // (1/3) y z1^2 z2^2 e_{z0} has charge (-3+4) + (-1) = 0.
        let b = PolyVector::generator(4, 1).scale_poly(&parse_poly("1/3*y*z1^2*z2^2", &v).unwrap());
        assert_eq!(spec.charge_of(&b).unwrap(), Some(0));

        let c = pv_poly("y + z0", &v);
        assert!(matches!(
            spec.charge_of(&c),
            Err(ChargeError::NotHomogeneous { .. })
        ));

        assert!(ChargeSpec::new(vec![1, 0]).is_err());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let v = vars(&["x", "y"]);
        let mut a = PolyVector::from_poly(parse_poly("x^2 - 1", &v).unwrap());
        a.add_component(vec![0], parse_poly("1/3*y", &v).unwrap());
        a.add_component(vec![0, 1], parse_poly("-x*y", &v).unwrap());
        let text = a.to_string_with(&v);
        assert_eq!(text, "x^2 - 1 + (1/3*y)*e[0] + (-x*y)*e[0,1]");
        assert_eq!(parse_polyvector(&text, &v).unwrap(), a);
        assert_eq!(parse_polyvector("0", &v).unwrap(), PolyVector::zero(2));
    }
}
