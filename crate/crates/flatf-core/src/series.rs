//! Truncated formal power series in the deformation parameters, keyed by
//! index multisets.
//!
//! A series `F = sum_M c_M t^M / prod_rho m_rho(M)!` is stored as the map
//! `M -> c_M` of symmetric-tensor coefficients, the same normalization the
//! coefficient tables use. In this normalization the product is a binomial
//! convolution and the t-derivative is an index append, both exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::multi_index::MultiIndex;
use crate::poly::Poly;
use crate::polyvec::PolyVector;

/// Coefficient objects a series can carry.
pub trait SeriesElem: Clone {
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_int(&self, k: &BigInt) -> Self;
    fn is_zero(&self) -> bool;
}

impl SeriesElem for BigRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn scale_int(&self, k: &BigInt) -> Self {
        self * BigRational::from(k.clone())
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl SeriesElem for Poly {
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from(k.clone()))
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl SeriesElem for PolyVector {
    fn add(&self, other: &Self) -> Self {
        PolyVector::add(self, other)
    }
    fn neg(&self) -> Self {
        PolyVector::neg(self)
    }
    fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from(k.clone()))
    }
    fn is_zero(&self) -> bool {
        PolyVector::is_zero(self)
    }
}

/// A series truncated at total order `order`: every stored key satisfies
/// `|M| <= order`, and all coefficients up to that order are determined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TSeries<T> {
    entries: BTreeMap<MultiIndex, T>,
    order: usize,
}

impl<T: SeriesElem> TSeries<T> {
    pub fn zero(order: usize) -> Self {
        TSeries {
            entries: BTreeMap::new(),
            order,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.entries.iter()
    }

    pub fn coefficient(&self, key: &MultiIndex) -> Option<&T> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: MultiIndex, value: T) {
        if key.len() > self.order || value.is_zero() {
            return;
        }
        match self.entries.remove(&key) {
            None => {
                self.entries.insert(key, value);
            }
            Some(old) => {
                let sum = old.add(&value);
                if !sum.is_zero() {
                    self.entries.insert(key, sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&self, order: usize) -> Self {
        TSeries {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| k.len() <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            order: order.min(self.order),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (k, v) in other.entries.iter().filter(|(k, _)| k.len() <= order) {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (k, v) in other.entries.iter().filter(|(k, _)| k.len() <= order) {
            out.insert(k.clone(), v.neg());
        }
        out
    }

    /// Formal derivative with respect to `t^index`: the coefficient at `M`
    /// of the derivative is the coefficient at `M + {index}` of the source.
    /// Truncation drops one order.
    pub fn t_derivative(&self, index: usize) -> Self {
        let mut out = TSeries::zero(self.order.saturating_sub(1));
        for (k, v) in &self.entries {
            if !k.entries().contains(&index) {
                continue;
            }
            let mut reduced: Vec<usize> = Vec::with_capacity(k.len() - 1);
            let mut removed = false;
            for &e in k.entries() {
                if !removed && e == index {
                    removed = true;
                    continue;
                }
                reduced.push(e);
            }
            out.insert(MultiIndex::new(reduced), v.clone());
        }
        out
    }

    /// Apply a linear map to every coefficient.
    pub fn map<U: SeriesElem>(&self, f: impl Fn(&T) -> U) -> TSeries<U> {
        let mut out = TSeries::zero(self.order);
        for (k, v) in &self.entries {
            out.insert(k.clone(), f(v));
        }
        out
    }
}

/// Binomial convolution of two series through `order`:
/// `c_M[FG] = sum_{M1 ⊎ M2 = M} (M choose M1) f_{M1} g_{M2}`, realized by
/// iterating over stored key pairs. `mul` combines the coefficient types.
pub fn convolve<A, B, C>(
    f: &TSeries<A>,
    g: &TSeries<B>,
    order: usize,
    mul: impl Fn(&A, &B) -> C,
) -> TSeries<C>
where
    A: SeriesElem,
    B: SeriesElem,
    C: SeriesElem,
{
    let mut out = TSeries::zero(order);
    for (ka, va) in f.entries() {
        if ka.len() > order {
            continue;
        }
        for (kb, vb) in g.entries() {
            if ka.len() + kb.len() > order {
                continue;
            }
            let merged = ka.merge(kb);
            let mult = choose_multiplicity(&merged, ka);
            out.insert(merged, mul(va, vb).scale_int(&mult));
        }
    }
    out
}

/// Number of ways to pick the sub-multiset `part` inside `whole`.
fn choose_multiplicity(whole: &MultiIndex, part: &MultiIndex) -> BigInt {
    let whole_counts = whole.counts();
    let part_counts = part.counts();
    let mut mult = BigInt::from(1);
    for &(idx, total) in &whole_counts {
        let chosen = part_counts
            .iter()
            .find(|&&(i, _)| i == idx)
            .map(|&(_, c)| c)
            .unwrap_or(0);
        mult *= crate::multi_index::binomial(total, chosen);
    }
    mult
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat_int, Rat};

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn product_of_exponentials_doubles_the_direction() {
        // F with c_M = 1 for all M over a single index is exp(t); F*F has
        // c_M = 2^|M|, the binomial convolution identity.
        let mut f: TSeries<Rat> = TSeries::zero(4);
        for m in 0..=4 {
            f.insert(mi(&vec![0; m]), rat_int(1));
        }
        let sq = convolve(&f, &f, 4, |a, b| a * b);
        for m in 0..=4u32 {
            assert_eq!(
                sq.coefficient(&mi(&vec![0; m as usize])).unwrap(),
                &rat_int(2i64.pow(m))
            );
        }
    }

    #[test]
    fn mixed_direction_product() {
        // F = t0-coefficient a, G = t1-coefficient b: (FG) has c_{01} = ab
        // with multiplicity 1, and the cross term appears once.
        let mut f: TSeries<Rat> = TSeries::zero(2);
        f.insert(mi(&[0]), rat_int(3));
        let mut g: TSeries<Rat> = TSeries::zero(2);
        g.insert(mi(&[1]), rat_int(5));
        let p = convolve(&f, &g, 2, |a, b| a * b);
        assert_eq!(p.coefficient(&mi(&[0, 1])).unwrap(), &rat_int(15));
        assert!(p.coefficient(&mi(&[0, 0])).is_none());
    }

    #[test]
    fn repeated_direction_multiplicity() {
        // F = c_{0} = 1 (i.e. F = t0): F*F must have c_{00} = 2 because
        // (t0)^2 = 2 * t0^2/2!.
        let mut f: TSeries<Rat> = TSeries::zero(2);
        f.insert(mi(&[0]), rat_int(1));
        let sq = convolve(&f, &f, 2, |a, b| a * b);
        assert_eq!(sq.coefficient(&mi(&[0, 0])).unwrap(), &rat_int(2));
    }

    #[test]
    fn derivative_shifts_keys() {
        let mut f: TSeries<Rat> = TSeries::zero(3);
        f.insert(mi(&[0, 0, 1]), rat_int(7));
        f.insert(mi(&[1]), rat_int(2));
        let d0 = f.t_derivative(0);
        assert_eq!(d0.coefficient(&mi(&[0, 1])).unwrap(), &rat_int(7));
        assert!(d0.coefficient(&mi(&[])).is_none());
        let d1 = f.t_derivative(1);
        assert_eq!(d1.coefficient(&mi(&[0, 0])).unwrap(), &rat_int(7));
        assert_eq!(d1.coefficient(&mi(&[])).unwrap(), &rat_int(2));
    }

    #[test]
    fn truncation_drops_high_orders() {
        let mut f: TSeries<Rat> = TSeries::zero(3);
        f.insert(mi(&[0, 0, 0]), rat_int(1));
        f.insert(mi(&[0]), rat_int(1));
        let t = f.truncate(1);
        assert!(t.coefficient(&mi(&[0, 0, 0])).is_none());
        assert!(t.coefficient(&mi(&[0])).is_some());
        // Inserting beyond the order is a no-op.
        let mut g: TSeries<Rat> = TSeries::zero(1);
        g.insert(mi(&[0, 0]), rat_int(9));
        assert!(g.is_zero());
    }
}
