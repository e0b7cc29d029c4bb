//! Dynamics of V elements on Cantor space: fixed points with their slope
//! exponents, periodic orbit lengths, torsion detection, slope spectra and
//! the conjugate-power obstruction `(v^r)^w = v^s ⇒ |r| = |s|`.
//!
//! Periodic orbits are read off a revealing table. Starting from the reduced
//! table, every domain leaf outside the range antichain starts a chain
//! `s → σ(s) → … → e` through leaves common to both antichains, ending at a
//! range leaf outside the domain antichain; the remaining common leaves form
//! `σ`-cycles. The table is revealing when every range leaf that is a proper
//! prefix of domain leaves ends a chain starting below it (a repeller) and
//! every domain leaf that is a proper prefix of range leaves starts a chain
//! ending below it (an attractor). Entries are expanded until that holds.
//! Then the periods are the cycle lengths together with the lengths of the
//! chains whose ends are comparable.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prefix_words::Word;
use crate::thompson_v::{expand_table, Pair, VElement};

/// Default safety bound for [`torsion_test`].
pub const DEFAULT_TORSION_BOUND: usize = 10_000;

/// Expansion budget when searching for a revealing table.
const REVEALING_BUDGET: usize = 20_000;

/// An eventually periodic infinite word `head·cycle^ω`, kept canonical:
/// `cycle` is primitive and `head` is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InfiniteWord {
    pub head: Word,
    pub cycle: Word,
}

impl InfiniteWord {
    pub fn new(head: Word, cycle: Word) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        let c = cycle.bits();
        let n = c.len();
        let p = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| c[i] == c[i % d]))
            .unwrap_or(n);
        let mut cyc: Vec<u8> = c[..p].to_vec();
        let mut head: Vec<u8> = head.bits().to_vec();
        while let (Some(&h), Some(&l)) = (head.last(), cyc.last()) {
            if h != l {
                break;
            }
            head.pop();
            cyc.rotate_right(1);
        }
        InfiniteWord {
            head: Word::from_vec_unchecked(head),
            cycle: Word::from_vec_unchecked(cyc),
        }
    }

    /// The first `len` letters.
    pub fn prefix(&self, len: usize) -> Word {
        let bits: Vec<u8> = self
            .head
            .bits()
            .iter()
            .chain(self.cycle.bits().iter().cycle())
            .take(len)
            .copied()
            .collect();
        Word::from_vec_unchecked(bits)
    }

    pub fn has_prefix(&self, w: &Word) -> bool {
        self.prefix(w.len()) == *w
    }
}

impl fmt::Display for InfiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.head.is_empty() {
            write!(f, "{}", self.head)?;
        }
        write!(f, "({})^w", self.cycle)
    }
}

/// A properly comparable table entry and the fixed point it determines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointCertificate {
    pub entry: Pair,
    pub point: InfiniteWord,
    /// `|a| - |b|`: negative at attractors, positive at repellers.
    pub exponent: i64,
}

impl FixedPointCertificate {
    /// Certificate for an entry `(a, b)`, if `a` and `b` are properly comparable.
    pub fn from_entry(a: &Word, b: &Word) -> Option<Self> {
        let point = if a.is_proper_prefix_of(b) {
            InfiniteWord::new(a.clone(), Word::empty().concat_bits(&b.bits()[a.len()..]))
        } else if b.is_proper_prefix_of(a) {
            InfiniteWord::new(b.clone(), Word::empty().concat_bits(&a.bits()[b.len()..]))
        } else {
            return None;
        };
        Some(FixedPointCertificate {
            entry: (a.clone(), b.clone()),
            point,
            exponent: a.len() as i64 - b.len() as i64,
        })
    }

    pub fn is_attracting(&self) -> bool {
        self.exponent < 0
    }

    /// Applies `v` to finite truncations of the point and checks that each
    /// image is again a truncation of the point.
    pub fn replay(&self, v: &VElement) -> bool {
        let (a, b) = &self.entry;
        let period = self.point.head.len() + self.point.cycle.len();
        (1..=8).all(|t| {
            let len =
                (3 * (self.point.head.len() + self.point.cycle.len() * t)).max(a.len() + period);
            let x = self.point.prefix(len);
            match v.apply(&x) {
                Ok(y) => y == self.point.prefix(len - a.len() + b.len()),
                Err(_) => false,
            }
        })
    }
}

/// Certificates for every properly comparable entry of the reduced table.
pub fn fixed_points(v: &VElement) -> Vec<FixedPointCertificate> {
    let mut out: Vec<_> = v
        .pairs()
        .iter()
        .filter_map(|(a, b)| FixedPointCertificate::from_entry(a, b))
        .collect();
    out.sort_by(|x, y| x.point.cmp(&y.point));
    out
}

/// True iff `x` is a proper prefix of some member of the lex-sorted antichain.
fn is_high(x: &Word, sorted_lex: &[Word]) -> bool {
    let i = sorted_lex.partition_point(|w| w.bits() <= x.bits());
    i < sorted_lex.len() && x.is_proper_prefix_of(&sorted_lex[i])
}

struct Chain {
    start: Word,
    end: Word,
    len: u64,
}

enum Analysis {
    Revealing {
        periods: Vec<u64>,
    },
    /// The domain word of an entry to expand.
    Expand(Word),
}

fn analyse(table: &[Pair]) -> Analysis {
    let sigma: HashMap<&Word, &Word> = table.iter().map(|(a, b)| (a, b)).collect();
    let sigma_inv: HashMap<&Word, &Word> = table.iter().map(|(a, b)| (b, a)).collect();
    let mut dom: Vec<Word> = table.iter().map(|p| p.0.clone()).collect();
    let mut ran: Vec<Word> = table.iter().map(|p| p.1.clone()).collect();
    dom.sort_by(Word::tree_cmp);
    ran.sort_by(Word::tree_cmp);
    let in_dom: HashSet<&Word> = dom.iter().collect();
    let in_ran: HashSet<&Word> = ran.iter().collect();

    let mut chains = Vec::new();
    let mut on_chain: HashSet<&Word> = HashSet::new();
    for s in dom.iter().filter(|s| !in_ran.contains(s)) {
        let mut x = sigma[s];
        let mut len = 1;
        while in_dom.contains(x) {
            on_chain.insert(x);
            x = sigma[x];
            len += 1;
        }
        chains.push(Chain {
            start: s.clone(),
            end: x.clone(),
            len,
        });
    }

    for c in &chains {
        if is_high(&c.end, &dom) && !c.end.is_proper_prefix_of(&c.start) {
            return Analysis::Expand(c.start.clone());
        }
        if is_high(&c.start, &ran) && !c.start.is_proper_prefix_of(&c.end) {
            return Analysis::Expand(sigma_inv[&c.end].clone());
        }
    }

    let mut periods: Vec<u64> = chains
        .iter()
        .filter(|c| c.start.is_prefix_of(&c.end) || c.end.is_prefix_of(&c.start))
        .map(|c| c.len)
        .collect();
    let mut seen: HashSet<&Word> = HashSet::new();
    for x in dom
        .iter()
        .filter(|x| in_ran.contains(x) && !on_chain.contains(x))
    {
        if seen.contains(x) {
            continue;
        }
        let mut y = x;
        let mut len = 0;
        loop {
            seen.insert(y);
            y = sigma[y];
            len += 1;
            if y == x {
                break;
            }
        }
        periods.push(len);
    }
    periods.sort_unstable();
    periods.dedup();
    Analysis::Revealing { periods }
}

/// An unreduced table for `v` that is revealing, with the orbit periods it reveals.
pub fn revealing_table(v: &VElement) -> Result<(Vec<Pair>, Vec<u64>)> {
    let mut table = v.pairs().to_vec();
    for _ in 0..REVEALING_BUDGET {
        match analyse(&table) {
            Analysis::Revealing { periods } => return Ok((table, periods)),
            Analysis::Expand(a) => table = expand_table(&table, &a)?,
        }
    }
    Err(Error::BoundExceeded(REVEALING_BUDGET))
}

/// The exact periods of the periodic points of `v`, ascending.
pub fn periodic_orbit_lengths(v: &VElement) -> Result<Vec<u64>> {
    revealing_table(v).map(|(_, p)| p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TorsionVerdict {
    Torsion {
        order: u64,
    },
    NonTorsion {
        power: u64,
        certificate: FixedPointCertificate,
    },
}

/// Iterates powers of `v` until one is the identity or has a properly
/// comparable entry.
pub fn torsion_test(v: &VElement, bound: usize) -> Result<TorsionVerdict> {
    let mut p = v.clone();
    for k in 1..=bound as u64 {
        if p.is_identity() {
            return Ok(TorsionVerdict::Torsion { order: k });
        }
        if let Some(certificate) = fixed_points(&p).into_iter().next() {
            return Ok(TorsionVerdict::NonTorsion {
                power: k,
                certificate,
            });
        }
        p = p.compose(v);
    }
    Err(Error::BoundExceeded(bound))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn require_non_torsion(v: &VElement) -> Result<()> {
    match torsion_test(v, DEFAULT_TORSION_BOUND)? {
        TorsionVerdict::Torsion { order } => Err(Error::IsTorsion(order)),
        TorsionVerdict::NonTorsion { .. } => Ok(()),
    }
}

/// `m = lcm` of the orbit periods and `α = v^m`; checks that every periodic
/// point of `α` is fixed.
pub fn stabilizing_power(v: &VElement) -> Result<(u64, VElement)> {
    require_non_torsion(v)?;
    let m = periodic_orbit_lengths(v)?.into_iter().fold(1, lcm);
    let alpha = v.power(m as i64);
    let after = periodic_orbit_lengths(&alpha)?;
    if after != [1] {
        return Err(Error::Falsified(format!(
            "v^{m} still has orbit periods {after:?}"
        )));
    }
    Ok((m, alpha))
}

/// The attracting and repelling fixed points of a stabilized non-torsion element.
pub fn important_points(alpha: &VElement) -> Result<Vec<FixedPointCertificate>> {
    require_non_torsion(alpha)?;
    let periods = periodic_orbit_lengths(alpha)?;
    if periods != [1] {
        return Err(Error::HasNontrivialFiniteOrbits(periods));
    }
    Ok(fixed_points(alpha))
}

/// The set `S_1` of slope exponents at the important points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeSpectrum {
    pub values: Vec<i64>,
}

impl SlopeSpectrum {
    pub fn from_certificates(certs: &[FixedPointCertificate]) -> Self {
        let mut values: Vec<i64> = certs.iter().map(|c| c.exponent).collect();
        values.sort_unstable();
        values.dedup();
        SlopeSpectrum { values }
    }

    /// `S_u = u·S_1`.
    pub fn scaled(&self, u: i64) -> Vec<i64> {
        let mut out: Vec<i64> = self.values.iter().map(|s| s * u).collect();
        out.sort_unstable();
        out
    }

    /// `max |s|` over `S_1`.
    pub fn max_abs(&self) -> i64 {
        self.values.iter().map(|s| s.abs()).max().unwrap_or(0)
    }
}

pub fn slope_spectrum(alpha: &VElement) -> Result<SlopeSpectrum> {
    important_points(alpha).map(|c| SlopeSpectrum::from_certificates(&c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugatePowerReport {
    pub holds: bool,
    /// Stabilizing power, `S_1` of `v^m` and `max |S_1|`, when the relation
    /// holds for a non-torsion `v`.
    pub stabilizing_power: Option<u64>,
    pub spectrum: Option<Vec<i64>>,
    pub max_abs: Option<i64>,
}

/// Decides `w⁻¹·v^r·w = v^s` exactly. If it holds for a non-torsion `v`
/// with `|r| ≠ |s|`, the obstruction is falsified and an error is returned.
pub fn conjugate_power_check(
    v: &VElement,
    w: &VElement,
    r: i64,
    s: i64,
) -> Result<ConjugatePowerReport> {
    let holds = v.power(r).conjugate_by(w) == v.power(s);
    let mut report = ConjugatePowerReport {
        holds,
        stabilizing_power: None,
        spectrum: None,
        max_abs: None,
    };
    if !holds {
        return Ok(report);
    }
    let (m, alpha) = match stabilizing_power(v) {
        Ok(x) => x,
        Err(Error::IsTorsion(_)) => return Ok(report),
        Err(e) => return Err(e),
    };
    if r.abs() != s.abs() {
        return Err(Error::Falsified(format!(
            "conjugate powers with |r| = {} and |s| = {} for a non-torsion element",
            r.abs(),
            s.abs()
        )));
    }
    let spec = slope_spectrum(&alpha)?;
    report.stabilizing_power = Some(m);
    report.max_abs = Some(spec.max_abs());
    report.spectrum = Some(spec.values);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thompson_v::{named, random_element};

    fn w(s: &str) -> Word {
        Word::lit(s)
    }

    fn v(entries: &[(&str, &str)]) -> VElement {
        VElement::from_pairs(entries.iter().map(|(a, b)| (w(a), w(b))).collect()).unwrap()
    }

    /// `t` acting inside `[0]` only.
    fn shift_in_left_half() -> VElement {
        v(&[("00", "000"), ("010", "001"), ("011", "01"), ("1", "1")])
    }

    // Brute-force oracle: the exact periods `j ≤ max` read off the fixed-point
    // sets of `v^j`, which are identity cones plus isolated points.
    struct FixSet {
        cones: Vec<Word>,
        points: Vec<InfiniteWord>,
    }

    fn fix_set(u: &VElement) -> FixSet {
        FixSet {
            cones: u
                .pairs()
                .iter()
                .filter(|(a, b)| a == b)
                .map(|p| p.0.clone())
                .collect(),
            points: fixed_points(u).into_iter().map(|c| c.point).collect(),
        }
    }

    fn kraft_covers(root: &Word, cones: &[Word]) -> bool {
        if cones.iter().any(|c| c.is_prefix_of(root)) {
            return true;
        }
        let below: Vec<&Word> = cones
            .iter()
            .filter(|c| root.is_proper_prefix_of(c))
            .collect();
        let minimal: Vec<&&Word> = below
            .iter()
            .filter(|c| !below.iter().any(|d| d.is_proper_prefix_of(c)))
            .collect();
        let mut seen = HashSet::new();
        let sum: f64 = minimal
            .iter()
            .filter(|c| seen.insert((***c).clone()))
            .map(|c| 2f64.powi(-((c.len() - root.len()) as i32)))
            .sum();
        sum == 1.0
    }

    fn oracle_periods(v: &VElement, max: u64) -> Vec<u64> {
        let sets: Vec<FixSet> = (1..=max).map(|j| fix_set(&v.power(j as i64))).collect();
        let mut out = Vec::new();
        for j in 1..=max {
            let here = &sets[(j - 1) as usize];
            let smaller: Vec<&FixSet> = (1..j)
                .filter(|q| j % q == 0)
                .map(|q| &sets[(q - 1) as usize])
                .collect();
            let small_cones: Vec<Word> = smaller
                .iter()
                .flat_map(|s| s.cones.iter().cloned())
                .collect();
            let new_cone = here.cones.iter().any(|c| !kraft_covers(c, &small_cones));
            let new_point = here.points.iter().any(|p| {
                !small_cones.iter().any(|c| p.has_prefix(c))
                    && !smaller.iter().any(|s| s.points.contains(p))
            });
            if new_cone || new_point {
                out.push(j);
            }
        }
        out
    }

    #[test]
    fn infinite_words_are_canonical() {
        assert_eq!(
            InfiniteWord::new(w("0"), w("00")),
            InfiniteWord::new(w("^"), w("0"))
        );
        assert_eq!(
            InfiniteWord::new(w("1"), w("01")),
            InfiniteWord::new(w("^"), w("10"))
        );
        assert_eq!(InfiniteWord::new(w("1"), w("1")).to_string(), "(1)^w");
        assert_eq!(InfiniteWord::new(w("10"), w("1")).prefix(5), w("10111"));
    }

    #[test]
    fn fixed_points_examples() {
        assert!(fixed_points(&VElement::identity()).is_empty());
        assert!(fixed_points(&named::swap()).is_empty());
        let t = named::shift();
        let fp = fixed_points(&t);
        assert_eq!(fp.len(), 2);
        assert_eq!(fp[0].point, InfiniteWord::new(w("^"), w("0")));
        assert_eq!(fp[0].exponent, -1);
        assert!(fp[0].is_attracting());
        assert_eq!(fp[1].point, InfiniteWord::new(w("^"), w("1")));
        assert_eq!(fp[1].exponent, 1);
        for c in &fp {
            assert!(c.replay(&t));
            assert_eq!(
                t.apply(&c.point.prefix(12)).unwrap(),
                c.point.prefix((12 - c.exponent) as usize)
            );
        }
    }

    #[test]
    fn periods_examples() {
        assert_eq!(
            periodic_orbit_lengths(&VElement::identity()).unwrap(),
            vec![1]
        );
        assert_eq!(periodic_orbit_lengths(&named::swap()).unwrap(), vec![2]);
        assert_eq!(periodic_orbit_lengths(&named::shift()).unwrap(), vec![1]);
    }

    #[test]
    fn periods_need_expansion() {
        // an order-4 element whose reduced table has no neutral cycle
        let x = v(&[("0", "1"), ("10", "01"), ("11", "00")]);
        assert!(x.power(4).is_identity());
        assert_eq!(periodic_orbit_lengths(&x).unwrap(), vec![4]);
        assert_eq!(oracle_periods(&x, 8), vec![4]);
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(
            torsion_test(&named::swap(), DEFAULT_TORSION_BOUND).unwrap(),
            TorsionVerdict::Torsion { order: 2 }
        );
        assert_eq!(
            torsion_test(&VElement::identity(), DEFAULT_TORSION_BOUND).unwrap(),
            TorsionVerdict::Torsion { order: 1 }
        );
        match torsion_test(&named::shift(), DEFAULT_TORSION_BOUND).unwrap() {
            TorsionVerdict::NonTorsion { power, certificate } => {
                assert_eq!(power, 1);
                assert_eq!(certificate.point, InfiniteWord::new(w("^"), w("0")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stabilizing_power_examples() {
        let t = named::shift();
        assert_eq!(stabilizing_power(&t).unwrap(), (1, t.clone()));
        let t3 = t.power(3);
        assert_eq!(stabilizing_power(&t3).unwrap(), (1, t3.clone()));
        let x = named::swap().compose(&shift_in_left_half());
        assert_eq!(periodic_orbit_lengths(&x).unwrap(), vec![2]);
        assert_eq!(stabilizing_power(&x).unwrap().0, 2);
        assert_eq!(stabilizing_power(&named::swap()), Err(Error::IsTorsion(2)));
    }

    #[test]
    fn spectrum_examples() {
        let t = named::shift();
        let s = slope_spectrum(&t).unwrap();
        assert_eq!(s.values, vec![-1, 1]);
        assert_eq!(s.scaled(3), vec![-3, 3]);
        assert_eq!(slope_spectrum(&t.power(2)).unwrap().values, vec![-2, 2]);
        let x = named::swap().compose(&shift_in_left_half());
        assert_eq!(
            slope_spectrum(&x),
            Err(Error::HasNontrivialFiniteOrbits(vec![2]))
        );
        for seed in 0..20 {
            let g = random_element(seed, 5);
            assert_eq!(slope_spectrum(&t.conjugate_by(&g)).unwrap(), s);
        }
    }

    #[test]
    fn conjugate_power_examples() {
        let t = named::shift();
        let r = conjugate_power_check(&t, &t, 5, 5).unwrap();
        assert!(r.holds);
        assert_eq!(r.spectrum, Some(vec![-1, 1]));
        assert_eq!(r.max_abs, Some(1));
        assert!(conjugate_power_check(&t, &t.power(3), 2, 2).unwrap().holds);
        for seed in 0..50 {
            let g = random_element(seed, 6);
            assert!(!conjugate_power_check(&t, &g, 1, 2).unwrap().holds);
        }
        // torsion elements are exempt
        assert!(
            conjugate_power_check(&named::swap(), &VElement::identity(), 1, 3)
                .unwrap()
                .holds
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn periods_match_brute_force(seed in any::<u64>(), n in 0usize..6) {
                let x = random_element(seed, n);
                let periods = periodic_orbit_lengths(&x).unwrap();
                let max = 10;
                let small: Vec<u64> = periods.iter().copied().filter(|&p| p <= max).collect();
                prop_assert_eq!(small, oracle_periods(&x, max));
            }

            #[test]
            fn certificates_replay(seed in any::<u64>(), n in 0usize..10) {
                let x = random_element(seed, n);
                for c in fixed_points(&x) {
                    prop_assert!(c.replay(&x));
                }
            }

            #[test]
            fn torsion_verdicts_are_sound(seed in any::<u64>(), n in 0usize..8) {
                let x = random_element(seed, n);
                match torsion_test(&x, DEFAULT_TORSION_BOUND).unwrap() {
                    TorsionVerdict::Torsion { order } => {
                        prop_assert!(x.power(order as i64).is_identity());
                        for k in 1..order {
                            prop_assert!(!x.power(k as i64).is_identity());
                        }
                    }
                    TorsionVerdict::NonTorsion { power, certificate } => {
                        prop_assert!(certificate.replay(&x.power(power as i64)));
                    }
                }
            }

            #[test]
            fn spectrum_scales_with_powers(seed in any::<u64>(), n in 1usize..6, u in 1i64..6) {
                let x = random_element(seed, n);
                if let Ok((_, alpha)) = stabilizing_power(&x) {
                    let s1 = slope_spectrum(&alpha).unwrap();
                    prop_assert_eq!(slope_spectrum(&alpha.power(u)).unwrap().values, s1.scaled(u));
                    prop_assert_eq!(slope_spectrum(&alpha.power(-u)).unwrap().values, s1.scaled(-u));
                }
            }
        }
    }
}
