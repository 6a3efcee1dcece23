//! Set partitions of `{0, .., n-1}`, refinement order, Möbius weights from the
//! bottom element, perfect pairings, and the diagonal embedding attached to a
//! partition.
//!
//! Indices are zero-based in the API; `Display` prints them one-based, which is
//! the customary notation (`{{1,2},{3}}`).

use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set accepted by [`enumerate_partitions`] (Bell(12) = 4 213 597).
pub const MAX_PARTITION_N: usize = 12;

/// A decomposition of `{0, .., n-1}` into nonempty disjoint blocks.
///
/// Blocks are kept in canonical order: elements ascending within a block and
/// blocks sorted by their smallest element. Two partitions are equal iff their
/// canonical forms are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from arbitrary blocks, canonicalising the order.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidParameter("empty block".into()));
            }
            for &i in b {
                if i >= n || seen[i] {
                    return Err(Error::InvalidParameter(format!(
                        "element {i} repeated or outside 0..{n}"
                    )));
                }
                seen[i] = true;
            }
        }
        if n == 0 || seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter("blocks do not cover the ground set".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Partition from a restricted-growth string (`rgs[i]` is the block of `i`).
    fn from_rgs(rgs: &[usize]) -> Self {
        let nblocks = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        Self {
            n: rgs.len(),
            blocks,
        }
    }

    /// All-singletons partition (the bottom element).
    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// The one-block partition (the top element).
    pub fn whole(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks ν(F).
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of each element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (j, b) in self.blocks.iter().enumerate() {
            for &i in b {
                out[i] = j;
            }
        }
        out
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, i) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Every set partition of `{0, .., n-1}`, in restricted-growth-string order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if !(1..=MAX_PARTITION_N).contains(&n) {
        return Err(Error::SizeGuard {
            what: "n",
            value: n as u64,
            min: 1,
            max: MAX_PARTITION_N as u64,
        });
    }
    let mut out = Vec::new();
    // rgs[0] = 0; rgs[i] <= 1 + max(rgs[..i]).
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        out.push(SetPartition::from_rgs(&rgs));
        // Find the rightmost position that can be incremented.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= maxes[i - 1] {
                break;
            }
            i -= 1;
        }
        rgs[i] += 1;
        maxes[i] = maxes[i - 1].max(rgs[i]);
        for j in i + 1..n {
            rgs[j] = 0;
            maxes[j] = maxes[i];
        }
    }
}

/// μ(O, F) = ∏ (−1)^{|F_j|−1} (|F_j|−1)!.
pub fn mobius_from_bottom(f: &SetPartition) -> i64 {
    f.blocks
        .iter()
        .map(|b| {
            let k = b.len() as i64 - 1;
            let fact: i64 = (1..=k).product();
            if k % 2 == 0 {
                fact
            } else {
                -fact
            }
        })
        .product()
}

/// `true` iff every block of `g` is a union of blocks of `f` (F ⪯ G).
pub fn refines(f: &SetPartition, g: &SetPartition) -> Result<bool> {
    if f.n != g.n {
        return Err(Error::GroundSetMismatch {
            left: f.n,
            right: g.n,
        });
    }
    // Equivalent: every block of f lies inside a single block of g.
    let gb = g.block_of();
    Ok(f.blocks.iter().all(|b| b.iter().all(|&i| gb[i] == gb[b[0]])))
}

/// A perfect matching of an even index set: pairs `(a, b)` with `a < b`,
/// sorted by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
}

/// All perfect pairings of `set` ((|S|−1)!! of them), or none when |S| is odd.
/// The empty set has exactly one (empty) pairing.
pub fn enumerate_pairings(set: &[usize]) -> Vec<Pairing> {
    let mut items = set.to_vec();
    items.sort_unstable();
    items.dedup();
    if items.len() % 2 == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(items.len() / 2);
    pair_up(&items, &mut current, &mut out);
    out
}

fn pair_up(rest: &[usize], current: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    if rest.is_empty() {
        out.push(Pairing {
            pairs: current.clone(),
        });
        return;
    }
    let a = rest[0];
    for k in 1..rest.len() {
        let b = rest[k];
        let remaining: Vec<usize> = rest[1..]
            .iter()
            .enumerate()
            .filter(|&(j, _)| j + 1 != k)
            .map(|(_, &x)| x)
            .collect();
        current.push((a, b));
        pair_up(&remaining, current, out);
        current.pop();
    }
}

/// The embedding l_F: ℝ^ν → ℝ^n, `y[i] = x[j]` for `i` in block `j`.
pub fn embed<T: Clone>(f: &SetPartition, x: &[T]) -> Result<Vec<T>> {
    if x.len() != f.num_blocks() {
        return Err(Error::LengthMismatch {
            expected: f.num_blocks(),
            got: x.len(),
        });
    }
    Ok(f.block_of().into_iter().map(|j| x[j].clone()).collect())
}

/// Elements of a bitmask, ascending.
pub fn mask_elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// All submasks of `mask` (including 0 and `mask` itself), in increasing order.
pub fn submasks(mask: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut sub = 0u32;
    loop {
        out.push(sub);
        if sub == mask {
            break;
        }
        // next submask in increasing numeric order
        sub = (sub.wrapping_sub(mask)) & mask;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(n, blocks.iter().map(|b| b.iter().map(|i| i - 1).collect()).collect())
            .unwrap()
    }

    #[test]
    fn partitions_of_three_match_listing() {
        let got: Vec<String> = enumerate_partitions(3)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(
            got,
            ["{{1,2,3}}", "{{1,2},{3}}", "{{1,3},{2}}", "{{1},{2,3}}", "{{1},{2},{3}}"]
        );
    }

    #[test]
    fn partitions_of_one_and_guard() {
        assert_eq!(enumerate_partitions(1).unwrap(), vec![SetPartition::whole(1)]);
        assert!(matches!(enumerate_partitions(0), Err(Error::SizeGuard { .. })));
        assert!(matches!(enumerate_partitions(13), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius_from_bottom(&SetPartition::singletons(3)), 1);
        assert_eq!(mobius_from_bottom(&SetPartition::whole(3)), 2);
        assert_eq!(mobius_from_bottom(&part(4, &[&[1, 2], &[3, 4]])), 1);
        assert_eq!(mobius_from_bottom(&SetPartition::whole(4)), -6);
    }

    #[test]
    fn refinement_examples() {
        let o = SetPartition::singletons(3);
        for g in enumerate_partitions(3).unwrap() {
            assert!(refines(&o, &g).unwrap());
        }
        let f = part(3, &[&[1, 2], &[3]]);
        assert!(refines(&f, &SetPartition::whole(3)).unwrap());
        assert!(!refines(&f, &part(3, &[&[1, 3], &[2]])).unwrap());
        assert!(refines(&o, &SetPartition::singletons(4)).is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(enumerate_pairings(&[1, 2]).len(), 1);
        assert_eq!(enumerate_pairings(&[1, 2, 3, 4]).len(), 3);
        assert!(enumerate_pairings(&[1, 2, 3]).is_empty());
        assert_eq!(enumerate_pairings(&[]).len(), 1);
        assert_eq!(enumerate_pairings(&[0, 1, 2, 3, 4, 5]).len(), 15);
    }

    #[test]
    fn embedding_examples() {
        let f = part(3, &[&[1], &[2, 3]]);
        assert_eq!(embed(&f, &["x1", "x2"]).unwrap(), ["x1", "x2", "x2"]);
        let f = part(3, &[&[1, 3], &[2]]);
        assert_eq!(embed(&f, &['a', 'b']).unwrap(), ['a', 'b', 'a']);
        let o = SetPartition::singletons(3);
        assert_eq!(embed(&o, &[1, 2, 3]).unwrap(), [1, 2, 3]);
        assert!(matches!(
            embed(&o, &[1, 2]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(SetPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(SetPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(SetPartition::new(2, vec![vec![0], vec![], vec![1]]).is_err());
        let p = SetPartition::new(3, vec![vec![2], vec![1, 0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn submask_enumeration() {
        assert_eq!(submasks(0b101), vec![0, 1, 4, 5]);
        assert_eq!(submasks(0), vec![0]);
        assert_eq!(mask_elements(0b1010), vec![1, 3]);
    }
}
