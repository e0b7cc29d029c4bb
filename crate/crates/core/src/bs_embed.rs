//! Baumslag–Solitar groups `BS(m, ±m)` inside V.
//!
//! `BS(m, em)` embeds diagonally into `(Z * Z/m) × (Z ⋊ Z)`: the left factor
//! kills `a^m`, the right factor is `Z²` (`e = 1`) or the Klein bottle group
//! (`e = -1`). Both factors are realized in V and combined with
//! [`pair_embed`], which acts on the two halves `[0]` and `[1]` of Cantor
//! space independently.
//!
//! The free product `Z * Z/m` is certified by ping-pong: `c` rotates `m`
//! disjoint cones `B_0, …, B_{m-1}` and `h` is a north–south element whose
//! attracting and repelling cones both lie in `B_0`.

use serde::Serialize;

use crate::dynamics::{torsion_test, FixedPointCertificate, TorsionVerdict, DEFAULT_TORSION_BOUND};
use crate::error::{Error, Result};
use crate::par;
use crate::prefix_words::Word;
use crate::thompson_v::{Pair, VElement};

fn table(entries: &[(&str, &str)]) -> VElement {
    VElement::from_pairs(
        entries
            .iter()
            .map(|(a, b)| (Word::lit(a), Word::lit(b)))
            .collect(),
    )
    .expect("fixed table is valid")
}

/// The element acting as `f` below `0` and as `g` below `1`.
pub fn pair_embed(f: &VElement, g: &VElement) -> VElement {
    let zero = Word::lit("0");
    let one = Word::lit("1");
    let mut pairs: Vec<Pair> = f
        .pairs()
        .iter()
        .map(|(a, b)| (a.prepend(&zero), b.prepend(&zero)))
        .collect();
    pairs.extend(
        g.pairs()
            .iter()
            .map(|(a, b)| (a.prepend(&one), b.prepend(&one))),
    );
    VElement::from_pairs(pairs).expect("halves of valid tables form a valid table")
}

/// The north–south element `t`: `0 → 00, 10 → 01, 11 → 1`.
pub fn line_translation() -> VElement {
    table(&[("0", "00"), ("10", "01"), ("11", "1")])
}

/// Two commuting infinite-order elements with disjoint supports.
pub fn torus_generators() -> (VElement, VElement) {
    let t = line_translation();
    let id = VElement::identity();
    (pair_embed(&t, &id), pair_embed(&id, &t))
}

/// `a = (t, t⁻¹)` and `b: 0w ↦ 1w, 1w ↦ 0·t(w)`, so that `b⁻¹ab = a⁻¹`.
pub fn klein_generators() -> (VElement, VElement) {
    let t = line_translation();
    let a = pair_embed(&t, &t.inverse());
    let zero = Word::lit("0");
    let one = Word::lit("1");
    let mut pairs: Vec<Pair> = vec![(zero.clone(), one.clone())];
    pairs.extend(
        t.pairs()
            .iter()
            .map(|(d, r)| (d.prepend(&one), r.prepend(&zero))),
    );
    let b = VElement::from_pairs(pairs).expect("valid table");
    (a, b)
}

/// The cones `B_0, …, B_{m-1}` rotated by `c`: `[10], [110], …, [1^{m-1}0], [1^m]`.
/// For `m = 1` the single cone is `[1]`.
pub fn rotation_cones(m: usize) -> Vec<Word> {
    let ones = |n: usize| Word::empty().concat_bits(&vec![1; n]);
    (0..m)
        .map(|i| {
            if i + 1 == m {
                ones(m)
            } else {
                ones(i + 1).child(0)
            }
        })
        .collect()
}

/// An exact cone-containment fact `f([u]) ⊆ [target]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeCertificate {
    pub map: String,
    pub cone: Word,
    pub target: Word,
    pub holds: bool,
}

fn cone_into(name: &str, f: &VElement, cone: &Word, target: &Word) -> ConeCertificate {
    ConeCertificate {
        map: name.to_string(),
        cone: cone.clone(),
        target: target.clone(),
        holds: f
            .image_of_cone(cone)
            .iter()
            .all(|img| target.is_prefix_of(img)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeProduct {
    pub m: usize,
    pub h: VElement,
    pub c: VElement,
    /// Attracting cone of `h`.
    pub u_plus: Word,
    /// Repelling cone of `h`.
    pub u_minus: Word,
    pub cones: Vec<Word>,
    pub certificates: Vec<ConeCertificate>,
}

impl FreeProduct {
    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.holds)
    }
}

/// `(h, c)` generating `Z * Z/m`, with ping-pong certificates.
pub fn free_product_generators(m: i64) -> Result<FreeProduct> {
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    let m = m as usize;
    let cones = rotation_cones(m);
    let zero = Word::lit("0");
    let mut pairs: Vec<Pair> = vec![(zero.clone(), zero)];
    pairs.extend((0..m).map(|i| (cones[i].clone(), cones[(i + 1) % m].clone())));
    let c = VElement::from_pairs(pairs).expect("rotation table is valid");

    // t² has attractor cone [00] and repeller cone [11]; g moves them to [100] and [101].
    let g = table(&[("00", "100"), ("01", "0"), ("10", "11"), ("11", "101")]);
    let h = line_translation().power(2).conjugate_by(&g);
    let u_plus = Word::lit("100");
    let u_minus = Word::lit("101");

    let h_inv = h.inverse();
    let mut certificates = Vec::new();
    // S \ U- = U+ ∪ B_1 ∪ … ∪ B_{m-1}, and symmetrically for h⁻¹.
    let rest: Vec<Word> = cones[1..].to_vec();
    for u in std::iter::once(&u_plus).chain(rest.iter()) {
        certificates.push(cone_into("h", &h, u, &u_plus));
    }
    for u in std::iter::once(&u_minus).chain(rest.iter()) {
        certificates.push(cone_into("h^-1", &h_inv, u, &u_minus));
    }
    for (i, cone) in cones.iter().enumerate().skip(1) {
        let ci = c.power(i as i64);
        let name = format!("c^{i}");
        certificates.push(cone_into(&name, &ci, &u_plus, cone));
        certificates.push(cone_into(&name, &ci, &u_minus, cone));
    }
    Ok(FreeProduct {
        m,
        h,
        c,
        u_plus,
        u_minus,
        cones,
        certificates,
    })
}

/// Generators `A`, `B` of `BS(m, em)` with the checks performed on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BSWitness {
    pub m: i64,
    pub e: i64,
    pub a: VElement,
    pub b: VElement,
    pub relation_holds: bool,
    pub a_power_m_nontrivial: bool,
    pub ping_pong: Vec<ConeCertificate>,
    pub a_certificate: Option<FixedPointCertificate>,
}

impl BSWitness {
    pub fn all_checks_pass(&self) -> bool {
        self.relation_holds
            && self.a_power_m_nontrivial
            && self.ping_pong.iter().all(|c| c.holds)
            && self.a_certificate.is_some()
    }
}

pub fn bs_generators(m: i64, e: i64) -> Result<BSWitness> {
    if e != 1 && e != -1 {
        return Err(Error::InvalidSign(e));
    }
    let fp = free_product_generators(m)?;
    let (a_right, b_right) = if e == 1 {
        torus_generators()
    } else {
        klein_generators()
    };
    let a = pair_embed(&fp.c, &a_right);
    let b = pair_embed(&fp.h, &b_right);
    let relation_holds = a.power(m).conjugate_by(&b) == a.power(e * m);
    let a_certificate = match torsion_test(&a, DEFAULT_TORSION_BOUND)? {
        TorsionVerdict::NonTorsion { certificate, .. } => Some(certificate),
        TorsionVerdict::Torsion { .. } => None,
    };
    Ok(BSWitness {
        m,
        e,
        a_power_m_nontrivial: !a.power(m).is_identity(),
        a,
        b,
        relation_holds,
        ping_pong: fp.certificates,
        a_certificate,
    })
}

/// Letters of `BS(m, em)` words: `a`, `a⁻¹`, `b`, `b⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    fn a_exponent(self) -> i64 {
        match self {
            Letter::A => 1,
            Letter::AInv => -1,
            _ => 0,
        }
    }
}

/// True iff the freely reduced word contains no pinch `b⁻¹a^j b` or `b a^j b⁻¹`
/// with `m | j`.
pub fn is_britton_reduced(word: &[Letter], m: i64) -> bool {
    let mut open: Option<(Letter, i64)> = None;
    for &l in word {
        match l {
            Letter::A | Letter::AInv => {
                if let Some((_, j)) = open.as_mut() {
                    *j += l.a_exponent();
                }
            }
            Letter::B | Letter::BInv => {
                if let Some((first, j)) = open {
                    if first == l.inverse() && j % m == 0 {
                        return false;
                    }
                }
                open = Some((l, 0));
            }
        }
    }
    true
}

fn evaluate_letter(w: &BSWitness, l: Letter) -> VElement {
    match l {
        Letter::A => w.a.clone(),
        Letter::AInv => w.a.inverse(),
        Letter::B => w.b.clone(),
        Letter::BInv => w.b.inverse(),
    }
}

/// Number of Britton-reduced words checked and the first one found trivial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrittonReport {
    pub length: usize,
    pub words_checked: usize,
    pub counterexample: Option<String>,
}

pub fn format_word(word: &[Letter]) -> String {
    word.iter()
        .map(|l| match l {
            Letter::A => "a",
            Letter::AInv => "A",
            Letter::B => "b",
            Letter::BInv => "B",
        })
        .collect()
}

fn search(
    gens: &[VElement; 4],
    m: i64,
    max_len: usize,
    word: &mut Vec<Letter>,
    value: &VElement,
    checked: &mut usize,
) -> Option<String> {
    if is_britton_reduced(word, m) {
        *checked += 1;
        if value.is_identity() {
            return Some(format_word(word));
        }
    }
    if word.len() == max_len {
        return None;
    }
    for (i, &l) in Letter::ALL.iter().enumerate() {
        if word.last() == Some(&l.inverse()) {
            continue;
        }
        word.push(l);
        let next = value.compose(&gens[i]);
        let found = search(gens, m, max_len, word, &next, checked);
        word.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Evaluates every nonempty freely and Britton-reduced word of length at
/// most `max_len` and looks for one that maps to the identity.
pub fn britton_report(witness: &BSWitness, max_len: usize) -> BrittonReport {
    if max_len == 0 {
        return BrittonReport {
            length: 0,
            words_checked: 0,
            counterexample: None,
        };
    }
    let gens = Letter::ALL.map(|l| evaluate_letter(witness, l));
    // one subtree per freely reduced two-letter prefix
    let mut roots: Vec<Vec<Letter>> = Letter::ALL.iter().map(|&l| vec![l]).collect();
    if max_len >= 2 {
        roots = roots
            .into_iter()
            .flat_map(|r| {
                let first = r[0];
                Letter::ALL
                    .iter()
                    .filter(move |&&l| l != first.inverse())
                    .map(move |&l| vec![first, l])
            })
            .collect();
    }
    let results = par::map(&roots, |root| {
        let mut word = root.clone();
        let value = root.iter().fold(VElement::identity(), |acc, &l| {
            acc.compose(&gens[Letter::ALL.iter().position(|&x| x == l).unwrap()])
        });
        let mut checked = 0;
        let found = search(&gens, witness.m, max_len, &mut word, &value, &mut checked);
        (checked, found)
    });
    // words of length 1 sit on the path to the two-letter roots; count them once
    let mut words_checked: usize = results.iter().map(|r| r.0).sum();
    let mut counterexample = results.into_iter().find_map(|r| r.1);
    if max_len >= 2 {
        for (i, &l) in Letter::ALL.iter().enumerate() {
            words_checked += 1;
            if counterexample.is_none() && gens[i].is_identity() {
                counterexample = Some(format_word(&[l]));
            }
        }
    }
    BrittonReport {
        length: max_len,
        words_checked,
        counterexample,
    }
}

pub fn britton_nontriviality(witness: &BSWitness, max_len: usize) -> bool {
    britton_report(witness, max_len).counterexample.is_none()
}
