//! Symmetric multi-indices over a basis index set: canonical multisets used
//! as keys for Taylor coefficients, plus the partition and sub-multiset
//! enumeration the recursion and series arithmetic need.

use std::fmt;

use num_bigint::BigInt;

/// A multiset of basis indices stored in non-decreasing order. One entry per
/// multiset makes index-permutation symmetry structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        MultiIndex(entries)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// The multiset with one more copy of `index`.
    pub fn with(&self, index: usize) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&e| e <= index);
        v.insert(pos, index);
        MultiIndex(v)
    }

    /// Union as multisets.
    pub fn merge(&self, other: &MultiIndex) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        MultiIndex(v)
    }

    /// Multiplicity vector as (index, count) pairs.
    pub fn counts(&self) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        for &e in &self.0 {
            match out.last_mut() {
                Some((idx, c)) if *idx == e => *c += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// All splittings `self = left ⊎ right` together with the number of ways
    /// to choose `left` inside `self`, i.e. the product of binomials over
    /// the multiplicity vectors.
    pub fn splittings(&self) -> Vec<(MultiIndex, MultiIndex, BigInt)> {
        let counts = self.counts();
        let mut out = Vec::new();
        let mut choice = vec![0u32; counts.len()];
        loop {
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut mult = BigInt::from(1);
            for (slot, &(idx, total)) in choice.iter().zip(&counts) {
                for _ in 0..*slot {
                    left.push(idx);
                }
                for _ in 0..(total - *slot) {
                    right.push(idx);
                }
                mult *= binomial(total, *slot);
            }
            out.push((MultiIndex(left), MultiIndex(right), mult));
            // Odometer over choice vectors.
            let mut i = 0;
            while i < counts.len() {
                choice[i] += 1;
                if choice[i] <= counts[i].1 {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == counts.len() {
                return out;
            }
        }
    }

    /// All distinct ways to designate a size-2 sub-multiset: returns
    /// (pair, remaining tail) with the pair in canonical order.
    pub fn pair_designations(&self) -> Vec<(MultiIndex, MultiIndex)> {
        let counts = self.counts();
        let mut out = Vec::new();
        for (i, &(a, ca)) in counts.iter().enumerate() {
            for &(b, cb) in counts.iter().skip(i) {
                if a == b && ca < 2 {
                    continue;
                }
                let _ = cb;
                let pair = MultiIndex(vec![a, b]);
                let mut tail = self.0.clone();
                let pa = tail.iter().position(|&e| e == a).unwrap();
                tail.remove(pa);
                let pb = tail.iter().position(|&e| e == b).unwrap();
                tail.remove(pb);
                out.push((pair, MultiIndex(tail)));
            }
        }
        out
    }

    /// Set partitions of the positions of `self` into exactly `k` nonempty
    /// blocks, each block reported as the multiset of its entries. Position
    /// partitions that induce equal block multisets appear with their
    /// natural multiplicity.
    pub fn partitions_into(&self, k: usize) -> Vec<Vec<MultiIndex>> {
        let m = self.0.len();
        let mut out = Vec::new();
        if k == 0 || k > m {
            return out;
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        fn rec(
            entries: &[usize],
            pos: usize,
            k: usize,
            blocks: &mut Vec<Vec<usize>>,
            out: &mut Vec<Vec<MultiIndex>>,
        ) {
            let m = entries.len();
            if pos == m {
                if blocks.len() == k {
                    out.push(blocks.iter().map(|b| MultiIndex::new(b.clone())).collect());
                }
                return;
            }
            // Remaining positions must still be able to fill k blocks.
            let remaining = m - pos;
            for b in 0..blocks.len() {
                if blocks.len() + remaining > k {
                    blocks[b].push(entries[pos]);
                    rec(entries, pos + 1, k, blocks, out);
                    blocks[b].pop();
                }
            }
            if blocks.len() < k {
                blocks.push(vec![entries[pos]]);
                rec(entries, pos + 1, k, blocks, out);
                blocks.pop();
            }
        }
        rec(&self.0, 0, k, &mut blocks, &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(MultiIndex::empty());
        }
        let entries = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MultiIndex::new(entries))
    }
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// All multisets of size `m` over indices `0..dim`, in lexicographic order.
pub fn multisets(dim: usize, m: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if m == 0 {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, m - 1, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(dim, m, 0, &mut cur, &mut out);
    out
}
