//! Seeded property suites, one per acceptance criterion.
//!
//! Every sample draws from its own ChaCha stream (seed, criterion tag,
//! sample index), so reports are identical whether samples run in parallel
//! or not.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bs_embed::{britton_nontriviality, bs_generators, klein_generators, pair_embed};
use crate::dynamics::{
    conjugate_power_check, fixed_points, slope_spectrum, stabilizing_power, torsion_test,
    InfiniteWord, TorsionVerdict, DEFAULT_TORSION_BOUND,
};
use crate::embeddings::{phi, phi_at_depth, theta, verify_theta_well_defined};
use crate::par;
use crate::prefix_words::Word;
use crate::qaut::{random_qaut_with, vertex_transposition, QAutElement};
use crate::thompson_v::{named, random_element_with, VElement};

type Example<'a> = Box<dyn Fn() -> bool + Sync + Send + 'a>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// The first failing case, if any.
    pub first_failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub samples: Option<usize>,
    pub criteria: Vec<CriterionReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(CriterionReport::passed)
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "criterion {} {verdict}: {}", self.id, self.title)?;
        for c in &self.checks {
            let v = if c.passed() { "ok  " } else { "FAIL" };
            write!(
                f,
                "  [{v}] {} ({} cases, {} failures)",
                c.name, c.cases, c.failures
            )?;
            if let Some(x) = &c.first_failure {
                write!(f, " first failure: {x}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.samples {
            Some(n) => writeln!(f, "selfcheck seed={} samples={n}", self.seed)?,
            None => writeln!(f, "selfcheck seed={} samples=default", self.seed)?,
        }
        for c in &self.criteria {
            write!(f, "{c}")?;
        }
        writeln!(f, "overall {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Seed plus an optional override of every per-check sample count.
#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub seed: u64,
    pub samples: Option<usize>,
}

impl Config {
    pub fn new(seed: u64) -> Self {
        Config {
            seed,
            samples: None,
        }
    }

    fn n(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn rng(&self, tag: u64, i: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        r.set_stream(i as u64);
        r
    }
}

/// Runs `case` on `n` indices; a case returns `None` on success or a description of the failure.
fn check<F>(name: &str, n: usize, case: F) -> Check
where
    F: Fn(usize) -> Option<String> + Sync + Send,
{
    let results = par::map_range(n, case);
    let failures = results.iter().filter(|r| r.is_some()).count();
    Check {
        name: name.to_string(),
        cases: n,
        failures,
        first_failure: results
            .into_iter()
            .enumerate()
            .find_map(|(i, r)| r.map(|m| format!("#{i}: {m}"))),
    }
}

fn fail_if(bad: bool, msg: impl FnOnce() -> String) -> Option<String> {
    bad.then(msg)
}

fn random_v(rng: &mut ChaCha8Rng, max_carets: usize) -> VElement {
    let n = rng.gen_range(0..=max_carets);
    random_element_with(rng, n)
}

fn random_q(rng: &mut ChaCha8Rng, max_level: usize) -> QAutElement {
    random_qaut_with(rng, max_level)
}

fn is_non_torsion(v: &VElement) -> bool {
    matches!(
        torsion_test(v, DEFAULT_TORSION_BOUND),
        Ok(TorsionVerdict::NonTorsion { .. })
    )
}

fn random_non_torsion(rng: &mut ChaCha8Rng, max_carets: usize) -> VElement {
    loop {
        let v = random_v(rng, max_carets);
        if is_non_torsion(&v) {
            return v;
        }
    }
}

fn words_up_to(len: usize) -> impl Iterator<Item = Word> {
    (0..=len).flat_map(Word::all_of_length)
}

pub fn criterion_1(cfg: &Config) -> CriterionReport {
    let v_case = |i| {
        let mut r = cfg.rng(11, i);
        let (a, b, c) = (
            random_v(&mut r, 12),
            random_v(&mut r, 12),
            random_v(&mut r, 12),
        );
        let id = VElement::identity();
        if a.compose(&b).compose(&c) != a.compose(&b.compose(&c)) {
            return Some(format!("associativity fails for {a:?}, {b:?}, {c:?}"));
        }
        fail_if(
            !a.compose(&a.inverse()).is_identity() || !a.inverse().compose(&a).is_identity(),
            || format!("inverse fails for {a:?}"),
        )
        .or_else(|| {
            fail_if(id.compose(&a) != a || a.compose(&id) != a, || {
                format!("identity fails for {a:?}")
            })
        })
    };
    let q_case = |i| {
        let mut r = cfg.rng(12, i);
        let (a, b, c) = (
            random_q(&mut r, 4),
            random_q(&mut r, 4),
            random_q(&mut r, 4),
        );
        let id = QAutElement::identity();
        if a.compose(&b).compose(&c) != a.compose(&b.compose(&c)) {
            return Some(format!("associativity fails for {a:?}, {b:?}, {c:?}"));
        }
        fail_if(
            !a.compose(&a.inverse()).is_identity() || !a.inverse().compose(&a).is_identity(),
            || format!("inverse fails for {a:?}"),
        )
        .or_else(|| {
            fail_if(id.compose(&a) != a || a.compose(&id) != a, || {
                format!("identity fails for {a:?}")
            })
        })
    };
    CriterionReport {
        id: 1,
        title: "group axioms in V and QAut".into(),
        checks: vec![
            check(
                "V: associativity, inverses, identity (<= 12 carets)",
                cfg.n(1000),
                v_case,
            ),
            check(
                "QAut: associativity, inverses, identity (cutoff <= 4)",
                cfg.n(300),
                q_case,
            ),
        ],
    }
}

pub fn criterion_2(cfg: &Config) -> CriterionReport {
    let hom = |i| {
        let mut r = cfg.rng(21, i);
        let (a, b) = (random_v(&mut r, 10), random_v(&mut r, 10));
        fail_if(
            theta(&a.compose(&b)) != theta(&a).compose(&theta(&b)),
            || format!("{a:?}, {b:?}"),
        )
    };
    let injective = |i| {
        let mut r = cfg.rng(22, i);
        let a = random_v(&mut r, 10);
        fail_if(theta(&a).is_identity() != a.is_identity(), || {
            format!("{a:?}")
        })
    };
    let right_half = |i| {
        let mut r = cfg.rng(23, i);
        let a = random_v(&mut r, 10);
        let t = theta(&a);
        let one = Word::lit("1");
        let bad = words_up_to(t.cutoff_level())
            .map(|x| x.prepend(&one))
            .find(|x| t.apply(x) != *x);
        bad.map(|x| format!("{a:?} moves {x}"))
    };
    let well_defined = |i| {
        let mut r = cfg.rng(24, i);
        let a = random_v(&mut r, 10);
        let expansions = r.gen_range(1..=4);
        let s = r.gen();
        fail_if(!verify_theta_well_defined(&a, expansions, s), || {
            format!("{a:?} with {expansions} expansions")
        })
    };
    CriterionReport {
        id: 2,
        title: "theta is an injective homomorphism and well defined".into(),
        checks: vec![
            check("theta(a b) = theta(a) theta(b)", cfg.n(500), hom),
            check("theta(a) = 1 iff a = 1", cfg.n(500), injective),
            check(
                "theta(a) fixes every word starting with 1 (to depth k+1)",
                cfg.n(500),
                right_half,
            ),
            check(
                "theta agrees on expanded tree pairs",
                cfg.n(200),
                well_defined,
            ),
        ],
    }
}

pub fn criterion_3(cfg: &Config) -> CriterionReport {
    let hom = |i| {
        let mut r = cfg.rng(31, i);
        let (a, b) = (random_q(&mut r, 4), random_q(&mut r, 4));
        fail_if(phi(&a.compose(&b)) != phi(&a).compose(&phi(&b)), || {
            format!("{a:?}, {b:?}")
        })
    };
    let injective = |i| {
        let mut r = cfg.rng(32, i);
        let a = random_q(&mut r, 4);
        fail_if(phi(&a).is_identity() != a.is_identity(), || {
            format!("{a:?}")
        })
    };
    let well_defined = |i| {
        let mut r = cfg.rng(33, i);
        let a = random_q(&mut r, 4);
        let k = a.cutoff_level();
        let expected = phi(&a);
        (k + 1..=k + 3)
            .find(|&d| phi_at_depth(&a, d).map(|p| p != expected).unwrap_or(true))
            .map(|d| format!("{a:?} at depth {d}"))
    };
    CriterionReport {
        id: 3,
        title: "phi is an injective homomorphism and well defined".into(),
        checks: vec![
            check("phi(s t) = phi(s) phi(t)", cfg.n(500), hom),
            check("phi(t) = 1 iff t = 1", cfg.n(500), injective),
            check(
                "phi from levels k+1..k+3 equals phi from the cutoff form",
                cfg.n(200),
                well_defined,
            ),
        ],
    }
}

pub fn criterion_4(cfg: &Config) -> CriterionReport {
    let both = |i| {
        let mut r = cfg.rng(41, i);
        let (a, b) = (random_v(&mut r, 10), random_v(&mut r, 10));
        let f = |x: &VElement| phi(&theta(x));
        if f(&a.compose(&b)) != f(&a).compose(&f(&b)) {
            return Some(format!("hom law fails for {a:?}, {b:?}"));
        }
        fail_if(f(&a).is_identity() != a.is_identity(), || {
            format!("kernel contains {a:?}")
        })
    };
    CriterionReport {
        id: 4,
        title: "phi . theta is an injective endomorphism of V".into(),
        checks: vec![check("hom law and nontriviality", cfg.n(500), both)],
    }
}

pub fn criterion_5(cfg: &Config) -> CriterionReport {
    let sample = |i: usize| {
        let mut r = cfg.rng(51, i);
        random_q(&mut r, 4)
    };
    let reconstruct = |i| {
        let t = sample(i);
        let d = t.minimal_decomposition();
        words_up_to(t.cutoff_level() + 2)
            .find(|x| d.reconstruct(x) != t.apply(x))
            .map(|x| format!("{t:?} differs at {x}"))
    };
    let finite_p = |i| {
        let t = sample(i);
        let d = t.minimal_decomposition();
        fail_if(!d.p_is_permutation(), || format!("{t:?}: p = {:?}", d.p))
    };
    let cutoff = |i| {
        let t = sample(i);
        let rep = t.cutoff_report();
        fail_if(rep.level != rep.level_from_z, || {
            format!(
                "{t:?}: level {} from I = {:?}, level {} from Z = {:?}",
                rep.level, rep.violation_set, rep.level_from_z, rep.z_set
            )
        })
    };
    CriterionReport {
        id: 5,
        title: "minimal decomposition and cutoff level".into(),
        checks: vec![
            check("p(v~(w)) = tau(w) for |w| <= k+2", cfg.n(300), reconstruct),
            check(
                "p is a finitely supported permutation",
                cfg.n(300),
                finite_p,
            ),
            check(
                "cutoff level from I(tau) equals cutoff level from Z(p)",
                cfg.n(300),
                cutoff,
            ),
        ],
    }
}

pub fn criterion_6(cfg: &Config) -> CriterionReport {
    let stabilized = |tag: u64, i: usize| {
        let mut r = cfg.rng(tag, i);
        let v = random_non_torsion(&mut r, 6);
        let (_, alpha) = stabilizing_power(&v).expect("non-torsion element stabilizes");
        (alpha, r)
    };
    let scaling = |i| {
        let (alpha, _) = stabilized(61, i);
        let s1 = match slope_spectrum(&alpha) {
            Ok(s) => s,
            Err(e) => return Some(format!("{alpha:?}: {e}")),
        };
        (1..=5i64)
            .flat_map(|u| [u, -u])
            .find(|&u| {
                slope_spectrum(&alpha.power(u))
                    .map(|s| s.values != s1.scaled(u))
                    .unwrap_or(true)
            })
            .map(|u| format!("{alpha:?} at u = {u}"))
    };
    let conjugation = |i| {
        let (alpha, mut r) = stabilized(62, i);
        let w = random_v(&mut r, 6);
        let a = slope_spectrum(&alpha).ok();
        let b = slope_spectrum(&alpha.conjugate_by(&w)).ok();
        fail_if(a.is_none() || a != b, || {
            format!("{alpha:?} conjugated by {w:?}")
        })
    };
    let falsification = |i| {
        let mut r = cfg.rng(63, i);
        let v = random_non_torsion(&mut r, 6);
        let w = random_v(&mut r, 6);
        let (rr, ss) = loop {
            let a = r.gen_range(1..=4i64) * if r.gen() { 1 } else { -1 };
            let b = r.gen_range(1..=4i64) * if r.gen() { 1 } else { -1 };
            if a.abs() != b.abs() {
                break (a, b);
            }
        };
        match conjugate_power_check(&v, &w, rr, ss) {
            Ok(rep) if !rep.holds => None,
            Ok(_) => Some(format!(
                "relation holds for {v:?}, {w:?}, r = {rr}, s = {ss}"
            )),
            Err(e) => Some(format!("{v:?}, {w:?}, r = {rr}, s = {ss}: {e}")),
        }
    };
    let torsion = |i| {
        let mut r = cfg.rng(64, i);
        let v = random_v(&mut r, 8);
        match torsion_test(&v, DEFAULT_TORSION_BOUND) {
            Ok(TorsionVerdict::Torsion { order }) => {
                let minimal = (1..order).all(|k| !v.power(k as i64).is_identity());
                fail_if(!v.power(order as i64).is_identity() || !minimal, || {
                    format!("{v:?}: order {order}")
                })
            }
            Ok(TorsionVerdict::NonTorsion { power, certificate }) => {
                fail_if(!certificate.replay(&v.power(power as i64)), || {
                    format!("{v:?}: certificate")
                })
            }
            Err(e) => Some(format!("{v:?}: {e}")),
        }
    };
    CriterionReport {
        id: 6,
        title: "dynamics: slope spectra and the conjugate-power obstruction".into(),
        checks: vec![
            check("S_u = u S_1 for u in +-{1..5}", cfg.n(200), scaling),
            check(
                "slope spectrum is conjugation invariant",
                cfg.n(200),
                conjugation,
            ),
            check(
                "w^-1 v^r w != v^s whenever |r| != |s|",
                cfg.n(200),
                falsification,
            ),
            check("torsion_test verdicts are sound", cfg.n(1000), torsion),
        ],
    }
}

pub fn criterion_7(_cfg: &Config) -> CriterionReport {
    let params: Vec<(i64, i64)> = (1..=4).flat_map(|m| [(m, -1), (m, 1)]).collect();
    let case = |i: usize| {
        let (m, e) = params[i];
        let w = match bs_generators(m, e) {
            Ok(w) => w,
            Err(err) => return Some(format!("BS({m},{}): {err}", e * m)),
        };
        if !w.relation_holds {
            return Some(format!("BS({m},{}): relation fails", e * m));
        }
        if !w.ping_pong.iter().all(|c| c.holds) {
            return Some(format!("BS({m},{}): ping-pong certificate fails", e * m));
        }
        if w.a_certificate.is_none() || !w.a_power_m_nontrivial {
            return Some(format!("BS({m},{}): A is torsion or A^m = 1", e * m));
        }
        fail_if(!britton_nontriviality(&w, 6), || {
            format!("BS({m},{}): trivial Britton-reduced word", e * m)
        })
    };
    let klein = |_| {
        let (a, b) = klein_generators();
        if a.conjugate_by(&b) != a.inverse() {
            return Some("b^-1 a b != a^-1".into());
        }
        fail_if(!is_non_torsion(&b.power(2)), || {
            "b^2 has finite order".into()
        })
    };
    CriterionReport {
        id: 7,
        title: "BS(m, +-m) inside V".into(),
        checks: vec![
            check(
                "relation, ping-pong, A non-torsion, Britton words to length 6",
                params.len(),
                case,
            ),
            check(
                "Klein pair: b^-1 a b = a^-1, b^2 of infinite order",
                1,
                klein,
            ),
        ],
    }
}

pub fn criterion_8(_cfg: &Config) -> CriterionReport {
    let w = Word::lit;
    let v = |entries: &[(&str, &str)]| {
        VElement::from_pairs(entries.iter().map(|(a, b)| (w(a), w(b))).collect()).expect("valid")
    };
    let examples: Vec<(&str, Example<'_>)> = vec![
        (
            "theta(s): [00] <-> [01], 0 -> ^, ^ -> 0, [1] fixed",
            Box::new(move || {
                let t = theta(&named::swap());
                t.apply(&w("00")) == w("01")
                    && t.apply(&w("01")) == w("00")
                    && t.apply(&w("0")) == w("^")
                    && t.apply(&w("^")) == w("0")
                    && t.apply(&w("1")) == w("1")
            }),
        ),
        (
            "phi(vertex transposition) exchanges [001] and [011]",
            Box::new(move || {
                phi(&vertex_transposition())
                    == v(&[
                        ("000", "000"),
                        ("001", "011"),
                        ("010", "010"),
                        ("011", "001"),
                        ("1", "1"),
                    ])
            }),
        ),
        (
            "fixed points of t: 0^w (-1), 1^w (+1); spectrum {-1, 1}",
            Box::new(|| {
                let t = named::shift();
                let fp: Vec<(InfiniteWord, i64)> = fixed_points(&t)
                    .into_iter()
                    .map(|c| (c.point, c.exponent))
                    .collect();
                fp == vec![
                    (InfiniteWord::new(Word::empty(), Word::lit("0")), -1),
                    (InfiniteWord::new(Word::empty(), Word::lit("1")), 1),
                ] && slope_spectrum(&t)
                    .map(|s| s.values == vec![-1, 1])
                    .unwrap_or(false)
            }),
        ),
        (
            "compose(s, t) = {00 -> 01, 01 -> 1, 1 -> 00}",
            Box::new(move || {
                named::swap().compose(&named::shift())
                    == v(&[("00", "01"), ("01", "1"), ("1", "00")])
            }),
        ),
        (
            "pair_embed(s, 1) sends 001 to 011",
            Box::new(move || {
                pair_embed(&named::swap(), &VElement::identity()).apply(&w("001")) == Ok(w("011"))
            }),
        ),
    ];
    let checks = examples
        .iter()
        .map(|(name, f)| check(name, 1, |_| fail_if(!f(), || "value differs".into())))
        .collect();
    CriterionReport {
        id: 8,
        title: "worked examples".into(),
        checks,
    }
}

/// Runs the criteria with the given ids (all of them when `ids` is empty).
pub fn run(cfg: &Config, ids: &[u8]) -> Report {
    let runners: [fn(&Config) -> CriterionReport; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let criteria = runners
        .iter()
        .enumerate()
        .filter(|(i, _)| ids.is_empty() || ids.contains(&(*i as u8 + 1)))
        .map(|(_, f)| f(cfg))
        .collect();
    Report {
        seed: cfg.seed,
        samples: cfg.samples,
        criteria,
    }
}
