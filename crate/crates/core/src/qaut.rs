//! Quasi-automorphisms of the 2-edge-coloured binary tree.
//!
//! A [`QAutElement`] is a bijection of all finite binary words that commutes
//! with appending letters (`τ(w·i) = τ(w)·i`) everywhere except at finitely
//! many vertices. Internally an element is stored as its coarsest *cover*:
//! the unique complete antichain `D` of minimal vertices below which `τ` is a
//! colour-respecting tree map, the images of `D` (a complete antichain), and
//! the images of the finitely many vertices above `D`. The cover is unique per
//! element, so structural equality is group equality.
//!
//! The cutoff disjoint decomposition (full level-`k` table plus a bijection
//! of the `2^k - 1` shorter words) is derived from the cover on demand; see
//! [`QAutElement::cutoff_form`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefix_words::{interior_of, Word};
use crate::thompson_v::{compose_tables, random_tree, validate_table, Pair, VElement};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QAutElement {
    /// Minimal tree-map vertices and their images, sorted lexicographically.
    cover: Vec<Pair>,
    /// Vertices strictly above the cover and their images, sorted lexicographically.
    finite: Vec<Pair>,
}

/// A disjoint decomposition with a full-level domain: the V-part maps every
/// word of length `level`, the bijection maps every shorter word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffForm {
    pub level: usize,
    pub v_part: Vec<Pair>,
    pub bijection: Vec<Pair>,
}

/// Cutoff level together with the two sets it can be read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutoffReport {
    pub level: usize,
    /// Vertices `w` with `τ(w·i) ≠ τ(w)·i` for some letter `i`.
    pub violation_set: Vec<Word>,
    /// `(D \ τ⁻¹R) ∪ τ⁻¹(R \ τD) ∪ τ⁻¹(Supp p)` from the minimal decomposition.
    pub z_set: Vec<Word>,
    /// `1 + max level in z_set` (0 when empty).
    pub level_from_z: usize,
    /// `1 + max level in z_set ∪ D`, where `D` is the interior of the
    /// domain tree of the minimal tree pair.
    pub level_from_z_and_interior: usize,
}

/// The factorization `τ = ṽ·p` (apply `ṽ` first), where `ṽ` acts as the
/// minimal tree pair `v_min` below its domain tree and as `b` on the interior
/// vertices of that tree, and `p` is a finitary permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalDecomposition {
    pub v_min: VElement,
    /// Interior vertices of the domain tree of `v_min` → interior vertices of its range tree.
    pub b: Vec<Pair>,
    /// The moved points of `p` with their images.
    pub p: Vec<Pair>,
}

fn lookup<'a>(sorted_lex: &'a [Pair], w: &Word) -> Option<&'a Word> {
    sorted_lex
        .binary_search_by(|(k, _)| k.tree_cmp(w))
        .ok()
        .map(|i| &sorted_lex[i].1)
}

fn cover_index(sorted_lex: &[Pair], w: &Word) -> Option<usize> {
    let idx = sorted_lex.partition_point(|(d, _)| d.bits() <= w.bits());
    (idx > 0 && sorted_lex[idx - 1].0.is_prefix_of(w)).then(|| idx - 1)
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDecomposition(msg.into())
}

fn sort_lex(mut pairs: Vec<Pair>) -> Vec<Pair> {
    pairs.sort_by(|a, b| a.0.tree_cmp(&b.0));
    pairs
}

fn sort_canonical(mut pairs: Vec<Pair>) -> Vec<Pair> {
    pairs.sort();
    pairs
}

fn max_level_plus_one(words: &[Word]) -> usize {
    words.iter().map(|w| w.len() + 1).max().unwrap_or(0)
}

/// Coarsens a generalized decomposition (tree map below every `tree` domain
/// word, finite bijection above) into the unique cover form.
fn normalize(tree: Vec<Pair>, above: Vec<Pair>) -> QAutElement {
    let image: HashMap<&Word, &Word> = tree
        .iter()
        .chain(above.iter())
        .map(|(a, b)| (a, b))
        .collect();
    let mut in_tree_region: HashSet<&Word> = tree.iter().map(|p| &p.0).collect();

    let mut interior: Vec<&Word> = above.iter().map(|p| &p.0).collect();
    interior.sort_by_key(|w| std::cmp::Reverse(w.len()));
    for w in interior {
        let fw = image[w];
        let (c0, c1) = (w.child(0), w.child(1));
        let ok = in_tree_region.contains(&c0)
            && in_tree_region.contains(&c1)
            && *image[&c0] == fw.child(0)
            && *image[&c1] == fw.child(1);
        if ok {
            in_tree_region.insert(w);
        }
    }

    let mut cover = Vec::new();
    let mut finite = Vec::new();
    for (w, fw) in tree.iter().chain(above.iter()) {
        if in_tree_region.contains(w) {
            let top = match w.parent() {
                None => true,
                Some(p) => !in_tree_region.contains(&p),
            };
            if top {
                cover.push((w.clone(), fw.clone()));
            }
        } else {
            finite.push((w.clone(), fw.clone()));
        }
    }
    QAutElement {
        cover: sort_lex(cover),
        finite: sort_lex(finite),
    }
}

impl QAutElement {
    pub fn identity() -> Self {
        QAutElement {
            cover: vec![(Word::empty(), Word::empty())],
            finite: Vec::new(),
        }
    }

    /// Builds an element from a tree-map table and the images of the vertices
    /// strictly above its domain. The domain need not be a full level.
    pub fn from_generalized(tree: Vec<Pair>, above: Vec<Pair>) -> Result<Self> {
        validate_table(&tree).map_err(|e| malformed(format!("V-part: {e}")))?;
        let domain: Vec<Word> = tree.iter().map(|p| p.0.clone()).collect();
        let range: Vec<Word> = tree.iter().map(|p| p.1.clone()).collect();
        let expected_keys = interior_of(&domain);
        let expected_values = interior_of(&range);
        let mut keys: Vec<Word> = above.iter().map(|p| p.0.clone()).collect();
        let mut values: Vec<Word> = above.iter().map(|p| p.1.clone()).collect();
        keys.sort();
        values.sort();
        if keys.windows(2).any(|w| w[0] == w[1]) || values.windows(2).any(|w| w[0] == w[1]) {
            return Err(malformed("bijection part repeats a word"));
        }
        if keys != expected_keys {
            return Err(malformed(
                "bijection part must be defined exactly on the vertices above the domain antichain",
            ));
        }
        if values != expected_values {
            return Err(malformed(
                "bijection part must map onto the vertices above the range antichain",
            ));
        }
        Ok(normalize(tree, above))
    }

    /// Builds an element from a cutoff-style disjoint decomposition: the table
    /// domain must be the full level `k'` and the bijection must send the
    /// words shorter than `k'` onto the interior of the range tree. The result
    /// is re-cut to the minimal level.
    pub fn from_parts(v_table: Vec<Pair>, bijection: Vec<Pair>) -> Result<Self> {
        let level = v_table.first().map(|p| p.0.len()).unwrap_or(0);
        if v_table.iter().any(|p| p.0.len() != level) || v_table.len() != 1usize << level {
            return Err(malformed("V-part domain is not a full level"));
        }
        if bijection.len() != (1usize << level) - 1 {
            return Err(malformed(format!(
                "bijection part has {} entries, expected {}",
                bijection.len(),
                (1usize << level) - 1
            )));
        }
        Self::from_generalized(v_table, bijection)
    }

    pub fn from_cutoff_form(form: &CutoffForm) -> Result<Self> {
        let level = form.level;
        if form.v_part.iter().any(|p| p.0.len() != level) {
            return Err(malformed(format!(
                "V-part domain words must have length {level}"
            )));
        }
        Self::from_parts(form.v_part.clone(), form.bijection.clone())
    }

    /// Cover entries (minimal tree-map vertices), lexicographic.
    pub fn cover(&self) -> &[Pair] {
        &self.cover
    }

    /// Images of the vertices above the cover, lexicographic.
    pub fn finite_part(&self) -> &[Pair] {
        &self.finite
    }

    pub fn is_identity(&self) -> bool {
        self.finite.is_empty()
            && self.cover.len() == 1
            && self.cover[0].0.is_empty()
            && self.cover[0].1.is_empty()
    }

    /// The image of a vertex. Total on all finite words.
    pub fn apply(&self, w: &Word) -> Word {
        if let Some(i) = cover_index(&self.cover, w) {
            let (d, r) = &self.cover[i];
            return r.concat_bits(&w.bits()[d.len()..]);
        }
        lookup(&self.finite, w)
            .cloned()
            .expect("every vertex above the cover has an image")
    }

    /// Applies `self`, then `other`.
    pub fn compose(&self, other: &QAutElement) -> QAutElement {
        let tree = compose_tables(&self.cover, &other.cover);
        let domain: Vec<Word> = tree.iter().map(|p| p.0.clone()).collect();
        let above = interior_of(&domain)
            .into_iter()
            .map(|u| {
                let img = other.apply(&self.apply(&u));
                (u, img)
            })
            .collect();
        normalize(tree, above)
    }

    pub fn inverse(&self) -> QAutElement {
        let tree = self
            .cover
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        let above = self
            .finite
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        normalize(tree, above)
    }

    pub fn power(&self, k: i64) -> QAutElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(QAutElement::identity(), |acc, _| acc.compose(&base))
    }

    pub fn equals(&self, other: &QAutElement) -> bool {
        self == other
    }

    /// Vertices where the child or colour relation breaks: `τ(w·i) ≠ τ(w)·i`.
    pub fn violation_set(&self) -> Vec<Word> {
        let mut out: Vec<Word> = self
            .finite
            .iter()
            .filter(|(w, fw)| (0..2).any(|i| self.apply(&w.child(i)) != fw.child(i)))
            .map(|(w, _)| w.clone())
            .collect();
        out.sort();
        out
    }

    /// The least level at and below which `τ` is a colour-respecting tree map.
    pub fn cutoff_level(&self) -> usize {
        max_level_plus_one(&self.violation_set())
    }

    /// Disjoint decomposition at full level `depth` (any `depth ≥ cutoff`).
    pub fn disjoint_decomposition(&self, depth: usize) -> Result<CutoffForm> {
        let cutoff = self.cutoff_level();
        if depth < cutoff {
            return Err(Error::InvalidDepth { depth, cutoff });
        }
        let v_part = Word::all_of_length(depth).map(|a| {
            let img = self.apply(&a);
            (a, img)
        });
        let bijection = Word::all_shorter_than(depth).map(|a| {
            let img = self.apply(&a);
            (a, img)
        });
        Ok(CutoffForm {
            level: depth,
            v_part: sort_canonical(v_part.collect()),
            bijection: sort_canonical(bijection.collect()),
        })
    }

    /// The canonical cutoff disjoint decomposition.
    pub fn cutoff_form(&self) -> CutoffForm {
        self.disjoint_decomposition(self.cutoff_level())
            .expect("cutoff level is a valid depth")
    }

    /// The V element `τ` induces on Cantor space (its reduced tree pair).
    pub fn v_part(&self) -> VElement {
        VElement::from_valid_table(self.cover.clone())
    }

    /// Pairs `(x_w, y_w)` left after stripping the largest common suffix of
    /// `w` and `τ(w)`, over all words of length at most `k + 1`.
    pub fn suffix_pairs(&self) -> Vec<Pair> {
        let k = self.cutoff_level();
        let mut out: Vec<Pair> = (0..=k + 1)
            .flat_map(Word::all_of_length)
            .map(|w| strip_common_suffix(&w, &self.apply(&w)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The suffix pairs realized by infinitely many words; every such pair is
    /// already realized at length `k + 1`.
    pub fn essential_suffix_pairs(&self) -> Vec<Pair> {
        let k = self.cutoff_level();
        let mut out: Vec<Pair> = Word::all_of_length(k + 1)
            .map(|w| strip_common_suffix(&w, &self.apply(&w)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn minimal_decomposition(&self) -> MinimalDecomposition {
        let v_min = self.v_part();
        let d_int = v_min.domain().interior_vertices();
        let r_int = v_min.range().interior_vertices();
        let r_set: HashSet<&Word> = r_int.iter().collect();

        let mut b = Vec::with_capacity(d_int.len());
        let mut hit: HashSet<Word> = HashSet::new();
        let mut leftover_domain = Vec::new();
        for w in &d_int {
            let img = self.apply(w);
            if r_set.contains(&img) {
                hit.insert(img.clone());
                b.push((w.clone(), img));
            } else {
                leftover_domain.push(w.clone());
            }
        }
        let leftover_range: Vec<Word> = r_int
            .iter()
            .filter(|y| !hit.contains(*y))
            .cloned()
            .collect();
        // both leftovers are already in canonical order
        b.extend(leftover_domain.into_iter().zip(leftover_range));
        let b = sort_lex(b);

        let tilde = |u: &Word| -> Word {
            match lookup(&b, u) {
                Some(img) => img.clone(),
                None => v_min
                    .apply(u)
                    .expect("outside the interior the tree pair is defined"),
            }
        };
        // τ and ṽ can only differ above the cover.
        let mut candidates: Vec<Word> = self.finite.iter().map(|p| p.0.clone()).collect();
        candidates.extend(d_int.iter().cloned());
        candidates.sort();
        candidates.dedup();
        let p = candidates
            .into_iter()
            .filter_map(|u| {
                let (t, v) = (self.apply(&u), tilde(&u));
                (t != v).then_some((v, t))
            })
            .collect();
        MinimalDecomposition {
            v_min,
            b: sort_canonical(b),
            p: sort_canonical(p),
        }
    }

    pub fn cutoff_report(&self) -> CutoffReport {
        let violation_set = self.violation_set();
        let level = max_level_plus_one(&violation_set);
        let z_set = self.z_set();
        let mut with_interior = self.v_part().domain().interior_vertices();
        with_interior.extend(z_set.iter().cloned());
        CutoffReport {
            level,
            violation_set,
            level_from_z: max_level_plus_one(&z_set),
            level_from_z_and_interior: max_level_plus_one(&with_interior),
            z_set,
        }
    }

    fn z_set(&self) -> Vec<Word> {
        let dec = self.minimal_decomposition();
        let inv = self.inverse();
        let d_int = dec.v_min.domain().interior_vertices();
        let r_int = dec.v_min.range().interior_vertices();
        let r_set: HashSet<&Word> = r_int.iter().collect();
        let d_image: HashSet<Word> = d_int.iter().map(|w| self.apply(w)).collect();

        let mut z: Vec<Word> = d_int
            .iter()
            .filter(|w| !r_set.contains(&self.apply(w)))
            .cloned()
            .collect();
        z.extend(
            r_int
                .iter()
                .filter(|y| !d_image.contains(*y))
                .map(|y| inv.apply(y)),
        );
        z.extend(dec.p.iter().map(|(x, _)| inv.apply(x)));
        z.sort();
        z.dedup();
        z
    }
}

impl MinimalDecomposition {
    pub fn apply_b(&self, w: &Word) -> Option<Word> {
        self.b.iter().find(|(x, _)| x == w).map(|(_, y)| y.clone())
    }

    /// `ṽ(w)`: `b` on the interior of the domain tree, `v_min` elsewhere.
    pub fn apply_tilde(&self, w: &Word) -> Word {
        self.apply_b(w).unwrap_or_else(|| {
            self.v_min
                .apply(w)
                .expect("outside the interior the tree pair is defined")
        })
    }

    pub fn apply_p(&self, x: &Word) -> Word {
        self.p
            .iter()
            .find(|(y, _)| y == x)
            .map(|(_, z)| z.clone())
            .unwrap_or_else(|| x.clone())
    }

    /// `p(ṽ(w))`, which equals `τ(w)`.
    pub fn reconstruct(&self, w: &Word) -> Word {
        self.apply_p(&self.apply_tilde(w))
    }

    /// True iff `p` permutes its moved points.
    pub fn p_is_permutation(&self) -> bool {
        let mut from: Vec<&Word> = self.p.iter().map(|p| &p.0).collect();
        let mut to: Vec<&Word> = self.p.iter().map(|p| &p.1).collect();
        from.sort();
        to.sort();
        from.windows(2).all(|w| w[0] != w[1]) && from == to
    }
}

/// Removes the largest common suffix of two words.
pub fn strip_common_suffix(a: &Word, b: &Word) -> Pair {
    let n = a
        .bits()
        .iter()
        .rev()
        .zip(b.bits().iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    (a.prefix(a.len() - n), b.prefix(b.len() - n))
}

/// A random element presented at full level `k ≤ max_level` (uniform `k`),
/// with a random range tree, random leaf bijection and random vertex bijection.
pub fn random_qaut_with<R: Rng + ?Sized>(rng: &mut R, max_level: usize) -> QAutElement {
    let level = rng.gen_range(0..=max_level);
    let domain: Vec<Word> = Word::all_of_length(level).collect();
    let mut range = random_tree(rng, domain.len() - 1);
    range.shuffle(rng);
    let xs: Vec<Word> = Word::all_shorter_than(level).collect();
    let mut ys = interior_of(&range);
    ys.shuffle(rng);
    let tree = domain.into_iter().zip(range).collect();
    let above = xs.into_iter().zip(ys).collect();
    QAutElement::from_generalized(tree, above).expect("random decomposition is valid")
}

pub fn random_qaut(seed: u64, max_level: usize) -> QAutElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_qaut_with(&mut rng, max_level)
}

/// The vertex transposition exchanging `0` and `1` and fixing everything else.
pub fn vertex_transposition() -> QAutElement {
    let w = Word::lit;
    QAutElement::from_parts(
        vec![
            (w("00"), w("00")),
            (w("01"), w("01")),
            (w("10"), w("10")),
            (w("11"), w("11")),
        ],
        vec![(w("^"), w("^")), (w("0"), w("1")), (w("1"), w("0"))],
    )
    .expect("valid decomposition")
}

impl fmt::Debug for QAutElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QAutElement")
            .field("cover", &self.cover)
            .field("finite", &self.finite)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::lit(s)
    }

    fn pairs(entries: &[(&str, &str)]) -> Vec<Pair> {
        entries.iter().map(|(a, b)| (w(a), w(b))).collect()
    }

    fn words_up_to(len: usize) -> impl Iterator<Item = Word> {
        (0..=len).flat_map(Word::all_of_length)
    }

    #[test]
    fn from_parts_examples() {
        let id = QAutElement::from_parts(pairs(&[("^", "^")]), vec![]).unwrap();
        assert!(id.is_identity());
        assert_eq!(id.cutoff_level(), 0);

        let t = vertex_transposition();
        assert_eq!(t.cutoff_level(), 2);

        // the same transposition presented at level 3
        let v3: Vec<Pair> = Word::all_of_length(3).map(|a| (a.clone(), a)).collect();
        let mut bij: Vec<Pair> = Word::all_shorter_than(3)
            .map(|a| {
                let img = t.apply(&a);
                (a, img)
            })
            .collect();
        bij.sort();
        let t3 = QAutElement::from_parts(v3, bij).unwrap();
        assert_eq!(t3, t);
        assert_eq!(t3.cutoff_form().level, 2);
    }

    #[test]
    fn from_parts_rejects_malformed_input() {
        // domain not a full level
        let e = QAutElement::from_parts(
            pairs(&[("0", "0"), ("10", "10"), ("11", "11")]),
            pairs(&[("^", "^")]),
        );
        assert!(matches!(e, Err(Error::MalformedDecomposition(_))));
        // wrong bijection size
        let e = QAutElement::from_parts(pairs(&[("0", "0"), ("1", "1")]), vec![]);
        assert!(matches!(e, Err(Error::MalformedDecomposition(_))));
        // bijection lands on a range leaf
        let e = QAutElement::from_parts(pairs(&[("0", "0"), ("1", "1")]), pairs(&[("^", "0")]));
        assert!(matches!(e, Err(Error::MalformedDecomposition(_))));
        // bijection not injective
        let e = QAutElement::from_parts(
            pairs(&[("00", "00"), ("01", "01"), ("10", "10"), ("11", "11")]),
            pairs(&[("^", "^"), ("0", "1"), ("1", "1")]),
        );
        assert!(matches!(e, Err(Error::MalformedDecomposition(_))));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(QAutElement::identity().apply(&w("0101")), w("0101"));
        let t = vertex_transposition();
        assert_eq!(t.apply(&w("0")), w("1"));
        assert_eq!(t.apply(&w("00")), w("00"));
        assert_eq!(t.apply(&w("^")), w("^"));
    }

    #[test]
    fn compose_examples() {
        let t = vertex_transposition();
        assert!(t.compose(&t.inverse()).is_identity());
        assert!(t.compose(&t).is_identity());
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(QAutElement::identity().cutoff_level(), 0);
        let t = vertex_transposition();
        let report = t.cutoff_report();
        assert_eq!(report.level, 2);
        // the root's children are exchanged, so the colour relation also breaks at the root
        assert_eq!(report.violation_set, vec![w("^"), w("0"), w("1")]);
        assert_eq!(report.z_set, vec![w("0"), w("1")]);
        assert_eq!(report.level_from_z, 2);
    }

    #[test]
    fn cutoff_form_of_transposition() {
        let f = vertex_transposition().cutoff_form();
        assert_eq!(f.level, 2);
        assert_eq!(
            f.v_part,
            pairs(&[("00", "00"), ("01", "01"), ("10", "10"), ("11", "11")])
        );
        assert_eq!(f.bijection, pairs(&[("^", "^"), ("0", "1"), ("1", "0")]));
        assert!(matches!(
            vertex_transposition().disjoint_decomposition(1),
            Err(Error::InvalidDepth {
                depth: 1,
                cutoff: 2
            })
        ));
    }

    #[test]
    fn minimal_decomposition_examples() {
        let d = QAutElement::identity().minimal_decomposition();
        assert!(d.v_min.is_identity() && d.b.is_empty() && d.p.is_empty());

        let t = vertex_transposition();
        let d = t.minimal_decomposition();
        assert!(d.v_min.is_identity());
        assert!(d.b.is_empty());
        assert_eq!(d.p, pairs(&[("0", "1"), ("1", "0")]));
        assert_eq!(
            t.suffix_pairs(),
            pairs(&[("^", "^"), ("0", "1"), ("1", "0")])
        );
        assert_eq!(t.essential_suffix_pairs(), pairs(&[("^", "^")]));
    }

    #[test]
    fn strip_suffix() {
        assert_eq!(strip_common_suffix(&w("0110"), &w("10")), (w("01"), w("^")));
        assert_eq!(strip_common_suffix(&w("00"), &w("01")), (w("00"), w("01")));
        assert_eq!(strip_common_suffix(&w("1"), &w("1")), (w("^"), w("^")));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_q(max_level: usize) -> impl Strategy<Value = QAutElement> {
            any::<u64>().prop_map(move |s| random_qaut(s, max_level))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(150))]

            #[test]
            fn group_axioms(a in arb_q(3), b in arb_q(3), c in arb_q(3)) {
                prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
                prop_assert!(a.compose(&a.inverse()).is_identity());
                prop_assert!(a.inverse().compose(&a).is_identity());
                prop_assert_eq!(QAutElement::identity().compose(&a), a.clone());
                prop_assert_eq!(a.compose(&QAutElement::identity()), a);
            }

            #[test]
            fn compose_is_pointwise(a in arb_q(3), b in arb_q(3)) {
                let ab = a.compose(&b);
                let depth = a.cutoff_level() + b.cutoff_level() + 1;
                for x in words_up_to(depth) {
                    prop_assert_eq!(ab.apply(&x), b.apply(&a.apply(&x)));
                }
            }

            #[test]
            fn equality_matches_pointwise(a in arb_q(2), b in arb_q(2)) {
                let depth = a.cutoff_level().max(b.cutoff_level()) + 1;
                let same = words_up_to(depth).all(|x| a.apply(&x) == b.apply(&x));
                prop_assert_eq!(a.equals(&b), same);
            }

            #[test]
            fn bijective_on_finite_levels(a in arb_q(4)) {
                let k = a.cutoff_level();
                let inv = a.inverse();
                let mut seen = HashSet::new();
                for x in words_up_to(k + 1) {
                    let y = a.apply(&x);
                    prop_assert!(seen.insert(y.clone()));
                    prop_assert_eq!(inv.apply(&y), x);
                }
            }

            #[test]
            fn cutoff_form_round_trips(a in arb_q(4), extra in 0usize..3) {
                let f = a.cutoff_form();
                prop_assert_eq!(QAutElement::from_cutoff_form(&f).unwrap(), a.clone());
                let deeper = a.disjoint_decomposition(f.level + extra).unwrap();
                prop_assert_eq!(QAutElement::from_cutoff_form(&deeper).unwrap(), a.clone());
                // the deeper table refines the canonical one
                for (x, y) in &deeper.v_part {
                    let (d, r) = f.v_part.iter().find(|(d, _)| d.is_prefix_of(x)).unwrap();
                    prop_assert_eq!(y, &r.concat_bits(&x.bits()[d.len()..]));
                }
            }

            #[test]
            fn cutoff_from_z_and_interior(a in arb_q(4)) {
                let r = a.cutoff_report();
                prop_assert_eq!(r.level_from_z_and_interior, r.level);
                prop_assert!(r.level_from_z <= r.level);
            }

            #[test]
            fn minimal_decomposition_reconstructs(a in arb_q(4)) {
                let d = a.minimal_decomposition();
                prop_assert!(d.p_is_permutation());
                for x in words_up_to(a.cutoff_level() + 2) {
                    prop_assert_eq!(d.reconstruct(&x), a.apply(&x));
                }
            }
        }
    }
}
