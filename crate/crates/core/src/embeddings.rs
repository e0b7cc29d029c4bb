//! The embeddings `theta: V → QAut` and `phi: QAut → V`.
//!
//! `theta` places the domain and range trees of a tree pair at the vertex
//! `0`, fixes everything below `1`, and matches the leaves of each embedded
//! tree with its interior vertices plus the root. Leaves are read left to
//! right and paired with the interior vertices in in-order (the vertex
//! between consecutive leaves `d_i`, `d_{i+1}` is their longest common
//! prefix); the rightmost leaf goes to the root.
//!
//! `phi` replaces every vertex `w` of a decomposition's trees by a caret at
//! address `c(w)`, where `c` inserts a `0` before each letter. The caret's
//! right leaf `c(w)·1` (p-leaf) carries the vertex map, the left leaf
//! `c(w)·0` of a tree leaf (n-leaf) carries the prefix replacement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prefix_words::{interior_of, Word};
use crate::qaut::QAutElement;
use crate::thompson_v::{expand_table, is_valid_table, Pair, VElement};

/// Caret address of a source vertex: a `0` inserted before every letter.
pub fn caret_address(w: &Word) -> Word {
    let bits: Vec<u8> = w.bits().iter().flat_map(|&b| [0, b]).collect();
    Word::empty().concat_bits(&bits)
}

pub fn n_leaf(w: &Word) -> Word {
    caret_address(w).child(0)
}

pub fn p_leaf(w: &Word) -> Word {
    caret_address(w).child(1)
}

/// The caret-replacement tree of a finite tree given by its leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatTree {
    pub source_leaves: Vec<Word>,
    pub n_leaves: Vec<Word>,
    pub p_leaves: Vec<Word>,
}

impl HatTree {
    pub fn new(source_leaves: &[Word]) -> Self {
        let mut vertices = interior_of(source_leaves);
        vertices.extend(source_leaves.iter().cloned());
        vertices.sort();
        let mut source_leaves = source_leaves.to_vec();
        source_leaves.sort();
        HatTree {
            n_leaves: source_leaves.iter().map(n_leaf).collect(),
            p_leaves: vertices.iter().map(p_leaf).collect(),
            source_leaves,
        }
    }

    /// All leaves of the hat tree.
    pub fn leaves(&self) -> Vec<Word> {
        let mut out = self.n_leaves.clone();
        out.extend(self.p_leaves.iter().cloned());
        out.sort();
        out
    }

    /// One leaf per source vertex plus one per source leaf.
    pub fn leaf_count_matches(&self) -> bool {
        let vertices = interior_of(&self.source_leaves).len() + self.source_leaves.len();
        self.leaves().len() == vertices + self.source_leaves.len()
    }
}

/// Leaf-to-vertex matching of a tree embedded at `0`: leaf `0·d_i` goes to
/// `0·lcp(d_i, d_{i+1})`, the last leaf to the root.
fn omega(leaves_lex: &[Word]) -> Vec<Word> {
    let n = leaves_lex.len();
    (0..n)
        .map(|i| {
            if i + 1 == n {
                Word::empty()
            } else {
                leaves_lex[i]
                    .lcp(&leaves_lex[i + 1])
                    .prepend(&Word::lit("0"))
            }
        })
        .collect()
}

/// `theta` computed from an arbitrary valid (possibly unreduced) table.
pub fn theta_from_table(pairs: &[Pair]) -> Result<QAutElement> {
    if !is_valid_table(pairs) {
        return Err(Error::IncompleteCover);
    }
    let zero = Word::lit("0");
    let mut by_domain = pairs.to_vec();
    by_domain.sort_by(|a, b| a.0.tree_cmp(&b.0));
    let domain: Vec<Word> = by_domain.iter().map(|p| p.0.clone()).collect();
    let mut range: Vec<Word> = pairs.iter().map(|p| p.1.clone()).collect();
    range.sort_by(Word::tree_cmp);
    let omega_d = omega(&domain);
    let omega_r = omega(&range);

    let mut tree: Vec<Pair> = vec![(Word::lit("1"), Word::lit("1"))];
    let mut above = Vec::with_capacity(by_domain.len());
    for (i, (d, r)) in by_domain.iter().enumerate() {
        tree.push((d.prepend(&zero), r.prepend(&zero)));
        let j = range
            .binary_search_by(|x| x.tree_cmp(r))
            .expect("range word is a range leaf");
        above.push((omega_d[i].clone(), omega_r[j].clone()));
    }
    QAutElement::from_generalized(tree, above)
}

pub fn theta(v: &VElement) -> QAutElement {
    theta_from_table(v.pairs()).expect("a reduced table is valid")
}

/// Recomputes `theta` after `expansions` random elementary expansions of the
/// reduced table and compares with `theta(v)`.
pub fn verify_theta_well_defined(v: &VElement, expansions: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = v.pairs().to_vec();
    for _ in 0..expansions {
        let i = rng.gen_range(0..table.len());
        let leaf = table[i].0.clone();
        table = expand_table(&table, &leaf).expect("leaf is in the table");
    }
    theta_from_table(&table)
        .map(|t| t == theta(v))
        .unwrap_or(false)
}

/// `phi` from a generalized decomposition: a tree-map table and the images
/// of the vertices above its domain.
fn phi_from_decomposition(tree: &[Pair], above: &[Pair]) -> VElement {
    let domain: Vec<Word> = tree.iter().map(|p| p.0.clone()).collect();
    let range: Vec<Word> = tree.iter().map(|p| p.1.clone()).collect();
    let (dh, rh) = (HatTree::new(&domain), HatTree::new(&range));
    assert!(
        dh.leaf_count_matches() && rh.leaf_count_matches(),
        "hat tree leaf count"
    );

    let mut table: Vec<Pair> = Vec::with_capacity(2 * tree.len() + above.len());
    for (d, r) in tree {
        table.push((n_leaf(d), n_leaf(r)));
        table.push((p_leaf(d), p_leaf(r)));
    }
    for (x, y) in above {
        table.push((p_leaf(x), p_leaf(y)));
    }
    VElement::from_pairs(table).expect("hat trees of a decomposition give a valid table")
}

pub fn phi(tau: &QAutElement) -> VElement {
    phi_from_decomposition(tau.cover(), tau.finite_part())
}

/// `phi` computed from the disjoint decomposition at full level `depth`.
pub fn phi_at_depth(tau: &QAutElement, depth: usize) -> Result<VElement> {
    let form = tau.disjoint_decomposition(depth)?;
    Ok(phi_from_decomposition(&form.v_part, &form.bijection))
}

pub fn verify_phi_well_defined(tau: &QAutElement, depth: usize) -> Result<bool> {
    Ok(phi_at_depth(tau, depth)? == phi(tau))
}
