//! Integer partitions, Young-diagram geometry and Gelfand–Tsetlin patterns.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) || !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("{parts:?} is not a partition")));
        }
        Ok(Partition { parts })
    }

    /// Sorts the parts into weakly decreasing order and drops zeros.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The one-row partition (n).
    pub fn row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Partition { parts: vec![n] }
        }
    }

    /// The one-column partition (1^n).
    pub fn column(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    /// The hook (r, 1^s).
    pub fn hook(r: usize, s: usize) -> Self {
        assert!(r >= 1, "hook arm must be positive");
        let mut parts = vec![r];
        parts.extend(std::iter::repeat(1).take(s));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// |λ|
    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// ℓ(λ)
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// λ_1, or 0 for the empty partition.
    pub fn first(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// λ_i with 1-based index, zero past the end.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn dual(&self) -> Partition {
        let first = self.first();
        let parts = (1..=first)
            .map(|i| self.parts.iter().filter(|&&p| p >= i).count())
            .collect();
        Partition { parts }
    }

    pub fn frequencies(&self) -> FrequencyForm {
        let mut multiplicities = BTreeMap::new();
        for &p in &self.parts {
            *multiplicities.entry(p).or_insert(0) += 1;
        }
        FrequencyForm { multiplicities }
    }

    pub fn hooks_and_contents(&self) -> CellStats {
        let dual = self.dual();
        let mut cells = Vec::with_capacity(self.weight());
        for (i0, &row) in self.parts.iter().enumerate() {
            let i = i0 + 1;
            for j in 1..=row {
                let hook = row + dual.part(j) + 1 - i - j;
                cells.push(Cell {
                    row: i,
                    col: j,
                    content: j as i64 - i as i64,
                    hook,
                });
            }
        }
        CellStats { cells }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// λ = ⟨1^{m_1} 2^{m_2} ⋯⟩
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyForm {
    pub multiplicities: BTreeMap<usize, usize>,
}

impl FrequencyForm {
    pub fn to_partition(&self) -> Partition {
        let mut parts = Vec::new();
        for (&size, &count) in self.multiplicities.iter().rev() {
            parts.extend(std::iter::repeat(size).take(count));
        }
        Partition { parts }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    /// c(u) = j − i
    pub content: i64,
    pub hook: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellStats {
    pub cells: Vec<Cell>,
}

impl CellStats {
    pub fn hook(&self, row: usize, col: usize) -> Option<usize> {
        self.cells
            .iter()
            .find(|c| c.row == row && c.col == col)
            .map(|c| c.hook)
    }

    pub fn content(&self, row: usize, col: usize) -> Option<i64> {
        self.cells
            .iter()
            .find(|c| c.row == row && c.col == col)
            .map(|c| c.content)
    }
}

/// All partitions of `n` in reverse-lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn go(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for k in (1..=remaining.min(max)).rev() {
            prefix.push(k);
            go(remaining - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of Gelfand–Tsetlin patterns with top row λ padded to length k.
pub fn gt_pattern_count(lambda: &Partition, k: usize) -> u128 {
    assert!(k >= 1, "GT patterns need k >= 1");
    if lambda.len() > k {
        return 0;
    }
    let top: Vec<usize> = (1..=k).map(|i| lambda.part(i)).collect();
    let mut memo = HashMap::new();
    count_below(&top, &mut memo)
}

// Counts the ways to complete a pattern below `row`.
fn count_below(row: &[usize], memo: &mut HashMap<Vec<usize>, u128>) -> u128 {
    if row.len() <= 1 {
        return 1;
    }
    if let Some(&c) = memo.get(row) {
        return c;
    }
    // next row y has len - 1 entries with row[j] >= y[j] >= row[j + 1]
    let mut total = 0u128;
    let mut next = vec![0usize; row.len() - 1];
    fill_interlacing(row, 0, &mut next, memo, &mut total);
    memo.insert(row.to_vec(), total);
    total
}

fn fill_interlacing(
    row: &[usize],
    j: usize,
    next: &mut Vec<usize>,
    memo: &mut HashMap<Vec<usize>, u128>,
    total: &mut u128,
) {
    if j == next.len() {
        *total += count_below(&next.clone(), memo);
        return;
    }
    for v in row[j + 1]..=row[j] {
        next[j] = v;
        fill_interlacing(row, j + 1, next, memo, total);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    // Independent oracle: count partitions of n with parts <= m.
    fn count_oracle(n: usize, m: usize) -> usize {
        if n == 0 {
            return 1;
        }
        if m == 0 {
            return 0;
        }
        count_oracle(n, m - 1) + if m <= n { count_oracle(n - m, m) } else { 0 }
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(
            enumerate_partitions(3),
            vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]
        );
        assert_eq!(enumerate_partitions(5).len(), 7);
    }

    #[test]
    fn enumeration_counts_match_oracle() {
        for n in 0..=10 {
            let all = enumerate_partitions(n);
            assert_eq!(all.len(), count_oracle(n, n), "n = {n}");
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
            // reverse lexicographic
            assert!(all.windows(2).all(|w| w[0].parts() > w[1].parts()));
        }
    }

    #[test]
    fn dual_examples() {
        assert_eq!(p(&[5, 3, 3, 1]).dual(), p(&[4, 3, 3, 1, 1]));
        assert_eq!(Partition::row(6).dual(), Partition::column(6));
        for n in 0..=10 {
            for lam in enumerate_partitions(n) {
                assert_eq!(lam.dual().dual(), lam);
                assert_eq!(lam.dual().len(), lam.first());
            }
        }
    }

    #[test]
    fn hooks_and_contents_of_21() {
        let stats = p(&[2, 1]).hooks_and_contents();
        assert_eq!(stats.hook(1, 1), Some(3));
        assert_eq!(stats.hook(1, 2), Some(1));
        assert_eq!(stats.hook(2, 1), Some(1));
        assert_eq!(stats.content(1, 1), Some(0));
        assert_eq!(stats.content(1, 2), Some(1));
        assert_eq!(stats.content(2, 1), Some(-1));
    }

    #[test]
    fn single_row_hooks() {
        let stats = Partition::row(5).hooks_and_contents();
        let hooks: Vec<usize> = stats.cells.iter().map(|c| c.hook).collect();
        assert_eq!(hooks, vec![5, 4, 3, 2, 1]);
    }

    #[test]
    fn cell_counts_and_positive_hooks() {
        for n in 1..=10 {
            for lam in enumerate_partitions(n) {
                let stats = lam.hooks_and_contents();
                assert_eq!(stats.cells.len(), n);
                assert!(stats.cells.iter().all(|c| c.hook >= 1));
            }
        }
    }

    #[test]
    fn frequency_round_trip() {
        for n in 0..=8 {
            for lam in enumerate_partitions(n) {
                let freq = lam.frequencies();
                let weight: usize = freq.multiplicities.iter().map(|(i, m)| i * m).sum();
                assert_eq!(weight, n);
                assert_eq!(freq.to_partition(), lam);
            }
        }
    }

    // Brute force: enumerate every triangular array directly.
    fn gt_brute(top: &[usize]) -> u128 {
        if top.len() <= 1 {
            return 1;
        }
        let mut total = 0;
        let m = top.len() - 1;
        let mut idx = vec![0usize; m];
        let ranges: Vec<(usize, usize)> = (0..m).map(|j| (top[j + 1], top[j])).collect();
        for (j, r) in ranges.iter().enumerate() {
            idx[j] = r.0;
        }
        loop {
            total += gt_brute(&idx);
            let mut j = 0;
            loop {
                if j == m {
                    return total;
                }
                if idx[j] < ranges[j].1 {
                    idx[j] += 1;
                    break;
                }
                idx[j] = ranges[j].0;
                j += 1;
            }
        }
    }

    #[test]
    fn gt_examples() {
        assert_eq!(gt_pattern_count(&p(&[1]), 2), 2);
        assert_eq!(gt_pattern_count(&p(&[2, 1]), 2), 2);
        assert_eq!(gt_pattern_count(&p(&[1, 1, 1]), 2), 0);
        for n in 1..=6 {
            for lam in enumerate_partitions(n) {
                for k in lam.len()..=4 {
                    let top: Vec<usize> = (1..=k).map(|i| lam.part(i)).collect();
                    assert_eq!(gt_pattern_count(&lam, k), gt_brute(&top), "{lam} k={k}");
                }
            }
        }
    }

    #[test]
    fn json_form() {
        let lam = p(&[5, 3, 3, 1]);
        assert_eq!(serde_json::to_string(&lam).unwrap(), "[5,3,3,1]");
        assert_eq!(serde_json::to_string(&Partition::empty()).unwrap(), "[]");
        let back: Partition = serde_json::from_str("[5,3,3,1]").unwrap();
        assert_eq!(back, lam);
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }
}
