//! Multi-indices over `{1..d}` and set partitions of `{1..n}`, with
//! membership predicates for the non-crossing and interval families.

use crate::error::{Error, Result};

/// Largest ground-set size accepted by [`enumerate_partitions`].
pub const PARTITION_CAP: usize = 12;

/// A word over the alphabet `{1..d}`, indexing a noncommutative monomial.
/// The empty word indexes the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    d: usize,
    letters: Vec<u8>,
}

impl MultiIndex {
    /// The empty multi-index over alphabet size `d`.
    pub fn empty(d: usize) -> Self {
        MultiIndex { d, letters: Vec::new() }
    }

    /// Builds a multi-index, checking every letter lies in `[1, d]`.
    pub fn new(d: usize, letters: Vec<u8>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Size("alphabet size must be at least 1".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&c| c < 1 || c as usize > d) {
            return Err(Error::Validation(format!(
                "letter {bad} out of range [1, {d}]"
            )));
        }
        Ok(MultiIndex { d, letters })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `(u, v)`.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.d, other.d);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        MultiIndex { d: self.d, letters }
    }

    /// The reversed word `(u)^op`.
    pub fn reversed(&self) -> MultiIndex {
        let mut letters = self.letters.clone();
        letters.reverse();
        MultiIndex { d: self.d, letters }
    }

    /// Contiguous subword `u(start..end)` (0-based, half-open).
    pub fn subword(&self, start: usize, end: usize) -> MultiIndex {
        MultiIndex {
            d: self.d,
            letters: self.letters[start..end].to_vec(),
        }
    }

    /// Comma-separated text form used by the document format; the empty
    /// word renders as the empty string.
    pub fn to_key(&self) -> String {
        self.letters
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the comma-separated text form.
    pub fn from_key(d: usize, key: &str) -> Result<Self> {
        if key.is_empty() {
            return MultiIndex::new(d, Vec::new());
        }
        let mut letters = Vec::new();
        for part in key.split(',') {
            let c: u8 = part
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("bad multi-index key {key:?}")))?;
            letters.push(c);
        }
        MultiIndex::new(d, letters)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic order: by length, then letterwise.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.d, self.letters.len(), &self.letters).cmp(&(
            other.d,
            other.letters.len(),
            &other.letters,
        ))
    }
}

/// A partition of `{1..n}` in canonical form: blocks sorted by minimum
/// element, elements ascending within a block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

/// Which family to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionFamily {
    All,
    NonCrossing,
    Interval,
}

impl SetPartition {
    /// Builds a partition from blocks, validating disjointness and coverage,
    /// and normalizing to canonical form.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::Validation("empty block".into()));
            }
            b.sort_unstable();
            for &x in &b {
                if x < 1 || x > n {
                    return Err(Error::Validation(format!("element {x} out of range")));
                }
                if seen[x] {
                    return Err(Error::Validation(format!("element {x} repeated")));
                }
                seen[x] = true;
            }
            canon.push(b);
        }
        if seen[1..].iter().any(|&s| !s) {
            return Err(Error::Validation("blocks do not cover {1..n}".into()));
        }
        canon.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks: canon })
    }

    /// The one-block partition `1̂`.
    pub fn top(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    /// The all-singletons partition `0̂`.
    pub fn bottom(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block label of each element, i.e. the index of the block containing
    /// `i+1`, as a restricted-growth-like string.
    fn labels(&self) -> Vec<usize> {
        let mut lab = vec![0; self.n];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &x in b {
                lab[x - 1] = bi;
            }
        }
        lab
    }

    /// True iff there is no crossing quadruple `i < j < i' < j'` with
    /// `i ~ i'`, `j ~ j'`, `i ≁ j`.
    pub fn is_noncrossing(&self) -> bool {
        let lab = self.labels();
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                if lab[i] == lab[j] {
                    continue;
                }
                for ip in (j + 1)..n {
                    if lab[ip] != lab[i] {
                        continue;
                    }
                    for jp in (ip + 1)..n {
                        if lab[jp] == lab[j] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// True iff every block is a contiguous integer interval.
    pub fn is_interval(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b[b.len() - 1] - b[0] + 1 == b.len())
    }
}

/// Enumerates the partitions of `{1..n}` in the given family, in canonical
/// order (sorted by block encoding). Enumeration goes through restricted
/// growth strings with a family filter.
pub fn enumerate_partitions(n: usize, family: PartitionFamily) -> Result<Vec<SetPartition>> {
    if n < 1 || n > PARTITION_CAP {
        return Err(Error::Size(format!(
            "n = {n} outside supported range [1, {PARTITION_CAP}]"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let pi = partition_from_rgs(n, &rgs);
        let keep = match family {
            PartitionFamily::All => true,
            PartitionFamily::NonCrossing => pi.is_noncrossing(),
            PartitionFamily::Interval => pi.is_interval(),
        };
        if keep {
            out.push(pi);
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    out.sort();
    Ok(out)
}

fn partition_from_rgs(n: usize, rgs: &[usize]) -> SetPartition {
    let k = rgs.iter().copied().max().unwrap_or(0) + 1;
    let mut blocks = vec![Vec::new(); k];
    for (i, &b) in rgs.iter().enumerate() {
        blocks[b].push(i + 1);
    }
    // Restricted growth strings already list blocks by first occurrence,
    // which is the canonical order.
    SetPartition { n, blocks }
}

/// Advances a restricted growth string in place; false when exhausted.
fn next_rgs(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            for x in rgs[i + 1..].iter_mut() {
                *x = 0;
            }
            return true;
        }
    }
    false
}
