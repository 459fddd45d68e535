//! Monomials over a fixed variable set and the term orders used for division.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// A monomial `x_1^{e_1} ... x_n^{e_n}`, stored as its exponent vector.
///
/// The vector length is the variable count of the ambient ring and is the
/// same for every monomial handled together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    /// The constant monomial `1` in `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The monomial `x_i`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Total degree (sum of exponents).
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree weighted by `weights`, one weight per variable.
    pub fn weighted_degree(&self, weights: &[i64]) -> i64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| i64::from(e) * w)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    /// Whether `self` divides `other` componentwise.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a <= b)
    }

    /// Exact quotient `self / other`, if divisible.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = Vec::with_capacity(self.0.len());
        for (&a, &b) in self.0.iter().zip(&other.0) {
            e.push(a.checked_sub(b)?);
        }
        Some(Monomial(e))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        )
    }

    /// True when the monomial is a pure power `x_i^k`, `k >= 1`, of variable `i`.
    pub fn is_pure_power_of(&self, i: usize) -> bool {
        self.0[i] > 0 && self.0.iter().enumerate().all(|(j, &e)| j == i || e == 0)
    }
}

/// The family of term orders supported by the division engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrderKind {
    Degrevlex,
    Deglex,
    /// Degree-reverse-lexicographic with per-variable positive weights.
    WeightedDegrevlex {
        weights: Vec<i64>,
    },
}

/// A total term order: an [`OrderKind`] plus a variable precedence.
///
/// `precedence` lists variable indices from least to most significant; the
/// default is the input order, so the last listed variable compares largest.
/// All three kinds are multiplicative and well-founded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub precedence: Vec<usize>,
}

impl MonomialOrder {
    pub fn degrevlex(n: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Degrevlex,
            precedence: (0..n).collect(),
        }
    }

    pub fn deglex(n: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Deglex,
            precedence: (0..n).collect(),
        }
    }

    pub fn weighted_degrevlex(weights: Vec<i64>) -> Self {
        let n = weights.len();
        MonomialOrder {
            kind: OrderKind::WeightedDegrevlex { weights },
            precedence: (0..n).collect(),
        }
    }

    /// Replace the variable precedence, least significant first.
    pub fn with_precedence(mut self, precedence: Vec<usize>) -> Self {
        self.precedence = precedence;
        self
    }

    fn graded_part(&self, m: &Monomial) -> i64 {
        match &self.kind {
            OrderKind::Degrevlex | OrderKind::Deglex => i64::from(m.degree()),
            OrderKind::WeightedDegrevlex { weights } => m.weighted_degree(weights),
        }
    }

    /// Compare two monomials under this order.
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let da = self.graded_part(a);
        let db = self.graded_part(b);
        if da != db {
            return da.cmp(&db);
        }
        match &self.kind {
            OrderKind::Deglex => {
                // Lexicographic from the most significant variable down.
                for &v in self.precedence.iter().rev() {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Degrevlex | OrderKind::WeightedDegrevlex { .. } => {
                // Reverse-lex: the first difference from the least significant
                // end decides, with the smaller exponent winning.
                for &v in self.precedence.iter() {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        ord => return ord.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }

    pub fn max<'a>(&self, a: &'a Monomial, b: &'a Monomial) -> &'a Monomial {
        if self.cmp(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    #[test]
    fn degrevlex_orders_like_the_textbooks() {
        // Two variables x < y: x^2 < xy < y^2.
        let ord = MonomialOrder::degrevlex(2);
        assert_eq!(ord.cmp(&m(&[2, 0]), &m(&[1, 1])), Ordering::Less);
        assert_eq!(ord.cmp(&m(&[1, 1]), &m(&[0, 2])), Ordering::Less);
        // Degree dominates.
        assert_eq!(ord.cmp(&m(&[3, 0]), &m(&[0, 2])), Ordering::Greater);
    }

    #[test]
    fn degrevlex_and_deglex_disagree_on_the_classic_pair() {
        // Variables x < y < z. deglex: z*x > y^2; degrevlex: z*x < y^2.
        let drl = MonomialOrder::degrevlex(3);
        let dl = MonomialOrder::deglex(3);
        let zx = m(&[1, 0, 1]);
        let yy = m(&[0, 2, 0]);
        assert_eq!(drl.cmp(&zx, &yy), Ordering::Less);
        assert_eq!(dl.cmp(&zx, &yy), Ordering::Greater);
    }

    #[test]
    fn weighted_order_uses_weights_for_the_graded_part() {
        let ord = MonomialOrder::weighted_degrevlex(vec![3, 1]);
        // x has weight 3, y weight 1: x > y^2 but x < y^4.
        assert_eq!(ord.cmp(&m(&[1, 0]), &m(&[0, 2])), Ordering::Greater);
        assert_eq!(ord.cmp(&m(&[1, 0]), &m(&[0, 4])), Ordering::Less);
    }

    #[test]
    fn precedence_reverses_with_the_permutation() {
        // Make x the most significant variable instead of y.
        let ord = MonomialOrder::degrevlex(2).with_precedence(vec![1, 0]);
        assert_eq!(ord.cmp(&m(&[2, 0]), &m(&[1, 1])), Ordering::Greater);
    }

    #[test]
    fn division_and_lcm() {
        let a = m(&[2, 1]);
        let b = m(&[1, 1]);
        assert!(b.divides(&a));
        assert_eq!(a.try_div(&b), Some(m(&[1, 0])));
        assert_eq!(b.try_div(&a), None);
        assert_eq!(m(&[2, 0]).lcm(&m(&[1, 3])), m(&[2, 3]));
        assert!(m(&[0, 3]).is_pure_power_of(1));
        assert!(!m(&[1, 3]).is_pure_power_of(1));
    }

    #[test]
    fn order_is_multiplicative_on_samples() {
        let ord = MonomialOrder::degrevlex(3);
        let samples = [
            m(&[0, 0, 0]),
            m(&[1, 0, 0]),
            m(&[0, 2, 1]),
            m(&[3, 0, 1]),
            m(&[1, 1, 1]),
        ];
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    let ab = a.mul(c);
                    let bb = b.mul(c);
                    assert_eq!(ord.cmp(a, b), ord.cmp(&ab, &bb));
                }
            }
        }
    }
}
