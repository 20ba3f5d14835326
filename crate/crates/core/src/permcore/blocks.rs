use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bigcomb::factorial;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A partition of `{0, .., n-1}` into nonempty blocks.
///
/// Kept in canonical form: each block sorted, blocks ordered by their
/// smallest element. Serializes as an array of sorted arrays.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct BlockDecomposition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockDecomposition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidParameter("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= n || seen[x] {
                    return Err(Error::InvalidParameter(format!(
                        "blocks do not partition 0..{n}: element {x}"
                    )));
                }
                seen[x] = true;
            }
        }
        if n == 0 || seen.iter().any(|&s| !s) {
            return Err(Error::InvalidParameter(format!("blocks do not cover 0..{n}")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Groups `0..n` by `label`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Self {
            n: labels.len(),
            blocks,
        }
    }

    pub fn single(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// The `ℓ` cosets of `ℓZ/NZ` (requires `ℓ | n`).
    pub fn cosets(n: usize, ell: usize) -> Result<Self> {
        if ell == 0 || n % ell != 0 {
            return Err(Error::InvalidParameter(format!("{ell} does not divide {n}")));
        }
        Ok(Self::from_labels(&(0..n).map(|i| i % ell).collect::<Vec<_>>()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Every block is closed under `x ↦ x + ℓ mod n`.
    pub fn ell_stable(&self, ell: usize) -> bool {
        let labels = self.labels();
        (0..self.n).all(|i| labels[i] == labels[(i + ell) % self.n])
    }

    /// `π` maps every block onto a block.
    pub fn is_stabilized_by(&self, pi: &Permutation) -> bool {
        if pi.n() != self.n {
            return false;
        }
        let labels = self.labels();
        self.blocks.iter().all(|b| {
            let target = labels[pi.apply(b[0])];
            let size = self.blocks[target].len();
            size == b.len() && b.iter().all(|&x| labels[pi.apply(x)] == target)
        })
    }

    /// Block index of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &x in b {
                labels[x] = k;
            }
        }
        labels
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

impl TryFrom<Vec<Vec<usize>>> for BlockDecomposition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().map(Vec::len).sum();
        Self::new(n, blocks)
    }
}

impl From<BlockDecomposition> for Vec<Vec<usize>> {
    fn from(b: BlockDecomposition) -> Self {
        b.blocks
    }
}

/// Order of the group of permutations of `{0..n-1}` that permute the
/// blocks of `b` among themselves, for an `ℓ`-stable `b` with `ℓ = n/m`.
///
/// With block sizes `m·r_1, .., m·r_j` this is `∏ (m·r_h)!` times
/// `∏_i c_i!`, where `c_i` counts the blocks of size `m·i`.
pub fn stabilizer_order(b: &BlockDecomposition, m: usize) -> Result<BigInt> {
    if m == 0 || b.n() % m != 0 {
        return Err(Error::NotMultiple { m, n: b.n() });
    }
    let ell = b.n() / m;
    if !b.ell_stable(ell) {
        return Err(Error::InvalidParameter(format!(
            "block decomposition is not {ell}-stable"
        )));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order = BigInt::from(1);
    for size in b.block_sizes() {
        *counts.entry(size).or_default() += 1;
        order *= factorial(size);
    }
    for c in counts.into_values() {
        order *= factorial(c);
    }
    Ok(order)
}
