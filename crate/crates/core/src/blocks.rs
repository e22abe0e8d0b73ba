//! Decreasing blocks: words `b_0 .. b_u` whose matrix
//! `A = A_(b_0) .. A_(b_(u-1))` has `I_(b_u)` inside the closure of `E#(A)`,
//! families of them given by patterns, and the automaton check that a family
//! covers every admissible symbolic sequence.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gaussmaps::{CaseId, GaussMap};
use crate::projective::{OrderedInterval, ProjPoint, UniMat};
use crate::sharpsets::e_sets;
use crate::symbolic::{
    and, boundary_inequality, decide_regions, f_equals_t, has_zero_entry, interval_in_closure, or, Exact, PMat, Pred, Regions,
    SignOracle, TMax,
};
use crate::{Error, Result};

/// One position of a block pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    /// One letter from the set.
    ChooseFrom(BTreeSet<usize>),
    /// The letter repeated any number of times, including none.
    Star(usize),
    /// The letter repeated `min..=max` times (`max = None` for unbounded).
    Repeat { letter: usize, min: u32, max: Option<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPattern {
    pub items: Vec<Item>,
}

fn fmt_set(s: &BTreeSet<usize>) -> String {
    let parts: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    parts.join(",")
}

impl BlockPattern {
    /// Parse the text form, e.g. `!{1,10} 10* 9 10* !{10}` or `2 10^0..16 !{10}`.
    ///
    /// `r` is the alphabet size, used to resolve complements `!{..}`.
    pub fn parse(src: &str, r: usize) -> Result<BlockPattern> {
        let perr = |msg: String| Error::Pattern(format!("{msg} in `{src}`"));
        let letter = |s: &str| -> Result<usize> {
            let s = s.trim_start_matches('(').trim_end_matches(')');
            let a: usize = s.parse().map_err(|_| perr(format!("bad letter `{s}`")))?;
            if a == 0 || a > r {
                return Err(Error::LetterOutOfRange { letter: a.min(u32::MAX as usize) as u32, r: r as u32 });
            }
            Ok(a)
        };
        let set = |s: &str| -> Result<BTreeSet<usize>> {
            let inner = s.strip_prefix('{').and_then(|s| s.strip_suffix('}')).ok_or_else(|| perr(format!("bad set `{s}`")))?;
            inner.split(',').map(|x| letter(x.trim())).collect()
        };
        let mut items = Vec::new();
        for tok in src.split_whitespace() {
            let item = if let Some(rest) = tok.strip_prefix('!') {
                let s = set(rest)?;
                Item::ChooseFrom((1..=r).filter(|a| !s.contains(a)).collect())
            } else if tok.starts_with('{') {
                Item::ChooseFrom(set(tok)?)
            } else if let Some(a) = tok.strip_suffix('*') {
                Item::Star(letter(a)?)
            } else if let Some((a, range)) = tok.split_once('^') {
                let (lo, hi) = range.split_once("..").ok_or_else(|| perr(format!("bad repeat `{tok}`")))?;
                let min = lo.parse().map_err(|_| perr(format!("bad repeat `{tok}`")))?;
                let max = if hi.is_empty() {
                    None
                } else {
                    Some(hi.parse().map_err(|_| perr(format!("bad repeat `{tok}`")))?)
                };
                if max.is_some_and(|m| m < min) {
                    return Err(perr(format!("empty repeat `{tok}`")));
                }
                Item::Repeat { letter: letter(a)?, min, max }
            } else {
                Item::ChooseFrom(BTreeSet::from([letter(tok)?]))
            };
            items.push(item);
        }
        let p = BlockPattern { items };
        p.check_shape(r)?;
        Ok(p)
    }

    /// A pattern starts and ends with a letter choice avoiding `r`.
    fn check_shape(&self, r: usize) -> Result<()> {
        let ok_end = |it: Option<&Item>| matches!(it, Some(Item::ChooseFrom(s)) if !s.is_empty() && !s.contains(&r));
        if !ok_end(self.items.first()) || !ok_end(self.items.last()) || self.items.len() < 2 {
            return Err(Error::Pattern(format!("`{self}` must start and end with a letter other than {r}")));
        }
        if self.items.iter().any(|i| matches!(i, Item::ChooseFrom(s) if s.is_empty())) {
            return Err(Error::Pattern(format!("`{self}` has an empty choice")));
        }
        Ok(())
    }

    /// Whether the finite word is matched.
    pub fn matches(&self, word: &[usize]) -> bool {
        let nfa = Nfa::build(core::slice::from_ref(self));
        let mut cur = nfa.closure([0].into_iter().collect());
        for &a in word {
            cur = nfa.step(&cur, a);
        }
        cur.iter().any(|s| nfa.accept.contains(s))
    }

    fn star_count(&self) -> usize {
        self.items.iter().filter(|i| matches!(i, Item::Star(_) | Item::Repeat { max: None, .. })).count()
    }
}

impl fmt::Display for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match it {
                Item::ChooseFrom(s) if s.len() == 1 => write!(f, "{}", s.iter().next().expect("one"))?,
                Item::ChooseFrom(s) => write!(f, "{{{}}}", fmt_set(s))?,
                Item::Star(a) => write!(f, "{a}*")?,
                Item::Repeat { letter, min, max: None } => write!(f, "{letter}^{min}..")?,
                Item::Repeat { letter, min, max: Some(m) } => write!(f, "{letter}^{min}..{m}")?,
            }
        }
        Ok(())
    }
}

/// Which version of a built-in table to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Literal,
    Corrected,
    /// The threshold-free `(3,6,inf)` family.
    Coarse,
}

impl core::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "literal" => Ok(Variant::Literal),
            "corrected" => Ok(Variant::Corrected),
            "coarse" => Ok(Variant::Coarse),
            _ => Err(Error::Precondition(format!("unknown family variant `{s}`"))),
        }
    }
}

/// A list of block patterns for one map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockFamily {
    pub case: CaseId,
    pub patterns: Vec<BlockPattern>,
}

impl BlockFamily {
    pub fn parse(case: CaseId, lines: &[&str]) -> Result<BlockFamily> {
        let r = case.r();
        let patterns = lines
            .iter()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| BlockPattern::parse(l, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockFamily { case, patterns })
    }

    /// The certified family for `case`: the literal table with the
    /// corrections it needs to be complete and decreasing.
    pub fn builtin(case: CaseId) -> Result<BlockFamily> {
        BlockFamily::variant(case, Variant::Corrected)
    }

    /// The table exactly as published, read with the obvious concatenation
    /// semantics.
    pub fn literal(case: CaseId) -> Result<BlockFamily> {
        BlockFamily::variant(case, Variant::Literal)
    }

    pub fn variant(case: CaseId, v: Variant) -> Result<BlockFamily> {
        if v == Variant::Coarse {
            return match case {
                CaseId::C3_6 => Ok(BlockFamily::hexagonal_coarse()),
                _ => Err(Error::Precondition(format!("no coarse family for {case}"))),
            };
        }
        let corrected = v == Variant::Corrected;
        let lines: Vec<String> = match case {
            CaseId::C2_5 => vec!["!{4} 4* !{4}".into()],
            CaseId::C3_4 => vec!["!{6} 6* !{6}".into()],
            CaseId::C3_5 => vec!["!{8} 8* !{8}".into()],
            CaseId::C3_6 => {
                let mut v: Vec<String> = vec!["1 10* !{10}".into()];
                for (a, k) in (2..=9).zip(HEX_THRESHOLDS) {
                    if k > 0 {
                        v.push(format!("{a} 10^0..{} !{{10}}", k - 1));
                    }
                    // past the threshold only the 9 branch is published
                    if corrected {
                        v.push(format!("{a} 10^{k}.. !{{9,10}}"));
                    }
                    v.push(format!("{a} 10^{k}.. 9 10* !{{10}}"));
                }
                v
            }
            CaseId::C4Inf => vec![
                "1 1* !{1,7}",
                "1 1* 7 7* !{7}",
                "!{1,6,7} 7* !{7}",
                "6 !{1,7}",
                "6 1 1* !{1,2,7}",
                "6 1 1* {2,7} 7* !{7}",
                "6 7 7* !{7}",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            CaseId::C5Inf => vec![
                "1 1* !{1,2,9}",
                "1 1* {2,9} 9* !{9}",
                "!{1,8,9} 9* !{9}",
                "8 !{1,9}",
                "8 1 1* !{1} 9* !{9}",
                "8 9 9* !{9}",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            CaseId::C6Inf => vec![
                "1 1* !{1,11}",
                "1 1* 11 11* !{11}",
                "!{1,10,11} 11* !{11}",
                "10 !{1,11}",
                "10 1 1* !{1,11}",
                "10 1 1* 11 11* !{11}",
                "10 11 11* !{11}",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            CaseId::C4_12 => {
                // `30 1 1* 33* !{33}` also matches `30 1 1`, which is not
                // decreasing; the corrected table keeps the 1-run maximal
                let row5: &[&str] =
                    if corrected { &["30 1 1* !{1,33}", "30 1 1* 33 33* !{33}"] } else { &["30 1 1* 33* !{33}"] };
                let mut v = vec!["1 1* !{1,33}", "1 1* 33 33* !{33}", "!{1,30,31,32,33} 33* !{33}", "30 !{1,33}"];
                v.extend_from_slice(row5);
                v.extend_from_slice(&[
                    "30 33 33* !{33}",
                    "{31,32} !{1,2,3,33}",
                    "{31,32} 1 1* !{1,33}",
                    "{31,32} 1 1* 33 33* !{33}",
                    "{31,32} {2,3,33} 33* !{33}",
                ]);
                v.into_iter().map(String::from).collect()
            }
            CaseId::C4_6 => {
                // 12 1 6 1 and 12 1 7 1 are not decreasing, 12 15 and
                // 10 1 1* x (x != 1, 15) are not covered
                let row12: &[&str] = if corrected {
                    &[
                        "12 1 1 1* !{1} 15* !{15}",
                        "12 1 !{1,6,7} 15* !{15}",
                        "12 1 {6,7} 15 15* !{15}",
                        "12 1 {6,7} !{1,15}",
                        "12 1 {6,7} 1 1* !{1,15}",
                        "12 1 {6,7} 1 1* 15 15* !{15}",
                        "12 {2,3,4,5,8,9,10,11,12,15} 15* !{15}",
                    ]
                } else {
                    &["12 1 1* !{1} 15* !{15}", "12 {2,3,4,5,8,9,10,11,12} 15* !{15}"]
                };
                let mut v = vec![
                    "1 1* !{1,15}",
                    "1 1* 15 15* !{15}",
                    "{2,3,6,7,11} 1* !{1} 15* !{15}",
                    "{4,5,8,9} 15* !{15}",
                    "10 !{1,2,3,4,5,6,7,15}",
                    "10 1 1* 15 15* !{15}",
                ];
                if corrected {
                    v.push("10 1 1* !{1} 15* !{15}");
                }
                v.extend_from_slice(&["10 {2,3,4,5,6,7,15} 15* !{15}", "12 {13,14}"]);
                v.extend_from_slice(row12);
                v.extend_from_slice(&[
                    "12 {6,7} 1* !{1,15}",
                    "12 {6,7} 1* 15 15* !{15}",
                    "13 1 1* !{1} 15* !{15}",
                    "13 {2,3,4,5,6,7,8,9,10,11,14,15} 15* !{15}",
                    "13 {12,13} 1* !{1,15}",
                    "13 {12,13} 1* 15 15* !{15}",
                    "14 !{1,2,3,4,15}",
                    "14 {1,2,3} 1* !{1,15}",
                    "14 {1,2,3} 1* 15 15* !{15}",
                    "14 {4,15} 15* !{15}",
                ]);
                v.into_iter().map(String::from).collect()
            }
            CaseId::C2_7Cubic => return Err(Error::NotQuadratic(case.field())),
        };
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        BlockFamily::parse(case, &refs)
    }

    /// The coarser `(3,6,inf)` family that needs no thresholds.
    pub fn hexagonal_coarse() -> BlockFamily {
        BlockFamily::parse(CaseId::C3_6, &["1 10* !{10}", "!{1,10} 10* !{9,10}", "!{1,10} 10* 9 10* !{10}"])
            .expect("static patterns")
    }
}

/// For `a = 2..9` in `(3,6,inf)`: the least `k` such that `a 10^k b` fails
/// to be decreasing for some `b != 10` (then exactly `b = 9`).
pub const HEX_THRESHOLDS: [u32; 8] = [17, 8, 0, 0, 0, 0, 8, 17];

/// The verdict on a single word.
#[derive(Clone, Debug)]
pub struct BlockCertificate {
    pub word: Vec<usize>,
    pub first_last_ok: bool,
    pub contained: bool,
    pub zero_entry: bool,
    /// Endpoints of `I_(b_u)` on the boundary of `E#` that needed the strict
    /// inequality, with its outcome.
    pub boundary_checks: Vec<(ProjPoint, bool)>,
    pub esharp: Option<OrderedInterval>,
    pub interval: OrderedInterval,
}

impl BlockCertificate {
    pub fn is_decreasing(&self) -> bool {
        self.first_last_ok && self.contained && self.boundary_checks.iter().all(|(_, ok)| *ok)
    }
}

/// The block conditions (ii) and (iii) for a symbolic product against `I_b`.
fn block_pred<'a>(iv: &'a OrderedInterval) -> impl Fn(&PMat, &dyn SignOracle) -> Result<bool> + 'a {
    move |m: &PMat, o: &dyn SignOracle| {
        let t = TMax::new(m)?;
        let guarded = |beta: &ProjPoint| {
            let at_t = f_equals_t(o, m, &t, beta).map(|b| !b);
            or(at_t, || boundary_inequality(o, m, &t, beta))
        };
        and(interval_in_closure(o, m, &t, iv), || {
            let zero = has_zero_entry(o, m).map(|b| !b);
            or(zero, || and(guarded(&iv.lo), || guarded(&iv.hi)))
        })
    }
}

/// Check one word directly.
pub fn is_decreasing_block(map: &GaussMap, word: &[usize]) -> Result<BlockCertificate> {
    if word.len() < 2 {
        return Err(Error::Precondition("a block has at least two letters".into()));
    }
    for &a in word {
        map.check_letter(a)?;
    }
    let r = map.r();
    let last = *word.last().expect("nonempty");
    let a = map.word_matrix(&word[..word.len() - 1])?;
    let interval = map.interval(last);
    let e = e_sets(&a)?;
    let contained = e.closure_contains(&interval)?;
    let zero_entry = a.entries().iter().any(|x| x.is_zero());
    let mut boundary_checks = Vec::new();
    if contained && zero_entry {
        let m = PMat::from_mat(&a);
        let t = TMax::new(&m)?;
        for beta in [&interval.lo, &interval.hi] {
            if f_equals_t(&Exact, &m, &t, beta)? {
                boundary_checks.push((beta.clone(), boundary_inequality(&Exact, &m, &t, beta)?));
            }
        }
    }
    Ok(BlockCertificate {
        word: word.to_vec(),
        first_last_ok: word[0] != r && last != r,
        contained,
        zero_entry,
        boundary_checks,
        esharp: e.esharp,
        interval,
    })
}

/// The all-parameter verdict for one choice of the finite letters.
#[derive(Clone, Debug)]
pub enum Verdict {
    Fixed(bool),
    Params(Regions),
}

impl Verdict {
    pub fn is_all(&self) -> bool {
        match self {
            Verdict::Fixed(b) => *b,
            Verdict::Params(s) => s.is_all(),
        }
    }

    /// Star counts at which the verdict fails.
    fn counterexample(&self) -> Option<[u64; 2]> {
        match self {
            Verdict::Fixed(true) => None,
            Verdict::Fixed(false) => Some([0, 0]),
            Verdict::Params(s) => s.counterexample(),
        }
    }
}

/// A pattern with its finite choices fixed: a letter skeleton with up to
/// two unbounded stars.
#[derive(Clone, Debug)]
struct Expansion {
    /// Letters, with `Err((a, min))` marking `a^(min + x_i)`.
    parts: Vec<core::result::Result<usize, (usize, u32)>>,
}

impl Expansion {
    fn word(&self, counts: [u64; 2]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut v = 0;
        for p in &self.parts {
            match *p {
                Ok(a) => out.push(a),
                Err((a, min)) => {
                    out.extend(core::iter::repeat_n(a, min as usize + counts[v] as usize));
                    v += 1;
                }
            }
        }
        out
    }

    fn matrix(&self, map: &GaussMap) -> Result<PMat> {
        let mut m = PMat::identity(map.field());
        let mut v = 0;
        for p in &self.parts {
            match *p {
                Ok(a) => m = m.mul(&PMat::from_mat(map.matrix(a))),
                Err((a, min)) => {
                    m = m.mul(&PMat::from_mat(&map.matrix(a).pow(min)));
                    m = m.mul(&PMat::parabolic_power(map.matrix(a), v)?);
                    v += 1;
                }
            }
        }
        Ok(m)
    }
}

/// All expansions of every item but the last.
fn expansions(p: &BlockPattern) -> Vec<Expansion> {
    let mut out = vec![Expansion { parts: Vec::new() }];
    for it in &p.items[..p.items.len() - 1] {
        let mut next = Vec::new();
        for e in &out {
            match it {
                Item::ChooseFrom(s) => {
                    for &a in s {
                        let mut e = e.clone();
                        e.parts.push(Ok(a));
                        next.push(e);
                    }
                }
                Item::Star(a) => {
                    let mut e = e.clone();
                    e.parts.push(Err((*a, 0)));
                    next.push(e);
                }
                Item::Repeat { letter, min, max: None } => {
                    let mut e = e.clone();
                    e.parts.push(Err((*letter, *min)));
                    next.push(e);
                }
                Item::Repeat { letter, min, max: Some(max) } => {
                    for n in *min..=*max {
                        let mut e = e.clone();
                        e.parts.extend(core::iter::repeat_n(Ok(*letter), n as usize));
                        next.push(e);
                    }
                }
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, Debug)]
pub struct PatternCertificate {
    pub pattern: BlockPattern,
    /// Number of (finite-choice, last-letter) combinations analysed.
    pub checked: usize,
    pub ok: bool,
    /// A concrete non-decreasing word, when `ok` is false.
    pub counterexample: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct FamilyCertificate {
    pub case: CaseId,
    pub patterns: Vec<PatternCertificate>,
}

impl FamilyCertificate {
    pub fn ok(&self) -> bool {
        self.patterns.iter().all(|p| p.ok)
    }
}

/// Decide whether every word of the pattern is a decreasing block, for all
/// star counts at once.
pub fn verify_pattern(map: &GaussMap, p: &BlockPattern) -> Result<PatternCertificate> {
    if p.star_count() > 2 {
        return Err(Error::Pattern(format!("`{p}` has more than two unbounded stars")));
    }
    p.check_shape(map.r())?;
    let Some(Item::ChooseFrom(last)) = p.items.last() else { unreachable!("checked shape") };
    let mut checked = 0;
    for e in expansions(p) {
        let m = e.matrix(map)?;
        for &b in last {
            checked += 1;
            let iv = map.interval(b);
            let pred = block_pred(&iv);
            let pred: &Pred = &pred;
            let verdict = if m.uses(0) || m.uses(1) {
                Verdict::Params(decide_regions(pred, &m)?)
            } else {
                Verdict::Fixed(pred(&m, &Exact)?)
            };
            if let Some(counts) = verdict.counterexample() {
                let mut w = e.word(counts);
                w.push(b);
                return Ok(PatternCertificate { pattern: p.clone(), checked, ok: false, counterexample: Some(w) });
            }
        }
    }
    Ok(PatternCertificate { pattern: p.clone(), checked, ok: true, counterexample: None })
}

pub fn verify_family(map: &GaussMap, family: &BlockFamily) -> Result<FamilyCertificate> {
    if family.case != map.case() {
        return Err(Error::Precondition(format!("family for {} used with {}", family.case, map.case())));
    }
    let patterns = family.patterns.iter().map(|p| verify_pattern(map, p)).collect::<Result<Vec<_>>>()?;
    Ok(FamilyCertificate { case: map.case(), patterns })
}

/// Nondeterministic automaton for the union of the pattern languages.
struct Nfa {
    /// `(from, letters, to)`.
    edges: Vec<(usize, BTreeSet<usize>, usize)>,
    eps: Vec<(usize, usize)>,
    accept: BTreeSet<usize>,
}

impl Nfa {
    /// State 0 is the common start.
    fn build(patterns: &[BlockPattern]) -> Nfa {
        let mut nfa = Nfa { edges: Vec::new(), eps: Vec::new(), accept: BTreeSet::new() };
        let mut next = 1;
        let mut fresh = || {
            next += 1;
            next - 1
        };
        for p in patterns {
            let mut s = fresh();
            nfa.eps.push((0, s));
            for it in &p.items {
                match it {
                    Item::ChooseFrom(set) => {
                        let t = fresh();
                        nfa.edges.push((s, set.clone(), t));
                        s = t;
                    }
                    Item::Star(a) => {
                        nfa.edges.push((s, BTreeSet::from([*a]), s));
                    }
                    Item::Repeat { letter, min, max } => {
                        for _ in 0..*min {
                            let t = fresh();
                            nfa.edges.push((s, BTreeSet::from([*letter]), t));
                            s = t;
                        }
                        match max {
                            None => nfa.edges.push((s, BTreeSet::from([*letter]), s)),
                            Some(max) => {
                                let end = fresh();
                                for _ in *min..*max {
                                    let t = fresh();
                                    nfa.edges.push((s, BTreeSet::from([*letter]), t));
                                    nfa.eps.push((s, end));
                                    s = t;
                                }
                                nfa.eps.push((s, end));
                                s = end;
                            }
                        }
                    }
                }
            }
            nfa.accept.insert(s);
        }
        nfa
    }

    fn closure(&self, mut set: BTreeSet<usize>) -> BTreeSet<usize> {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(f, t) in &self.eps {
                if f == s && set.insert(t) {
                    stack.push(t);
                }
            }
        }
        set
    }

    fn step(&self, set: &BTreeSet<usize>, a: usize) -> BTreeSet<usize> {
        let moved = self
            .edges
            .iter()
            .filter(|(f, l, _)| set.contains(f) && l.contains(&a))
            .map(|(_, _, t)| *t)
            .collect();
        self.closure(moved)
    }
}

/// A strongly connected piece of the "no block matched yet" graph.
#[derive(Clone, Debug)]
pub struct SccInfo {
    pub states: usize,
    /// Letters on the edges inside the component.
    pub letters: BTreeSet<usize>,
    pub allowed: bool,
}

#[derive(Clone, Debug)]
pub struct CompletenessCertificate {
    pub complete: bool,
    /// Number of automaton states in which no block has been matched yet.
    pub avoid_states: usize,
    pub sccs: Vec<SccInfo>,
    /// `(prefix, cycle)`: the sequence `prefix cycle cycle ..` starts with no block.
    pub lasso: Option<(Vec<usize>, Vec<usize>)>,
}

/// Check that every infinite sequence not starting with `r` and not ending
/// in `r r r ..` (nor `1 1 1 ..` when `det A_1 = +1`) starts with a block of
/// the family.
pub fn verify_completeness(map: &GaussMap, family: &BlockFamily) -> Result<CompletenessCertificate> {
    let r = map.r();
    let mut allowed_loops = BTreeSet::from([r]);
    if map.det_a1() == 1 {
        allowed_loops.insert(1);
    }
    let nfa = Nfa::build(&family.patterns);
    // determinize the avoid graph; node 0 is the start, where r is forbidden
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut nodes: Vec<BTreeSet<usize>> = Vec::new();
    let mut adj: Vec<Vec<(usize, usize)>> = Vec::new();
    let start = nfa.closure(BTreeSet::from([0]));
    nodes.push(start);
    adj.push(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for a in 1..=r {
            if u == 0 && a == r {
                continue;
            }
            let next = nfa.step(&nodes[u], a);
            if next.iter().any(|s| nfa.accept.contains(s)) {
                continue;
            }
            let v = match index.get(&next) {
                Some(&v) => v,
                None => {
                    let v = nodes.len();
                    index.insert(next.clone(), v);
                    nodes.push(next);
                    adj.push(Vec::new());
                    queue.push_back(v);
                    v
                }
            };
            adj[u].push((a, v));
        }
    }
    let comp = tarjan(&adj);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut letters = vec![BTreeSet::new(); ncomp];
    let mut size = vec![0usize; ncomp];
    let mut bad_edge: Vec<Option<(usize, usize, usize)>> = vec![None; ncomp];
    for u in 0..nodes.len() {
        size[comp[u]] += 1;
    }
    for (u, es) in adj.iter().enumerate() {
        for &(a, v) in es {
            if comp[u] == comp[v] {
                letters[comp[u]].insert(a);
            }
        }
    }
    let mut sccs = Vec::new();
    for c in 0..ncomp {
        if letters[c].is_empty() {
            continue;
        }
        let allowed = letters[c].len() == 1 && allowed_loops.is_superset(&letters[c]);
        if !allowed {
            // an edge inside the component with a letter that breaks the rule
            let keep = *letters[c].iter().find(|a| !allowed_loops.contains(a)).unwrap_or(letters[c].iter().next().expect("nonempty"));
            'find: for (u, es) in adj.iter().enumerate() {
                for &(a, v) in es {
                    if comp[u] == c && comp[v] == c && a == keep {
                        bad_edge[c] = Some((u, a, v));
                        break 'find;
                    }
                }
            }
        }
        sccs.push(SccInfo { states: size[c], letters: letters[c].clone(), allowed });
    }
    let lasso = bad_edge.iter().flatten().next().map(|&(u, a, v)| {
        let prefix = bfs_path(&adj, 0, u, None);
        let mut cycle = vec![a];
        cycle.extend(bfs_path(&adj, v, u, Some((&comp, comp[u]))));
        (prefix, cycle)
    });
    Ok(CompletenessCertificate { complete: lasso.is_none(), avoid_states: nodes.len(), sccs, lasso })
}

/// Letters along a shortest path, optionally restricted to one component.
fn bfs_path(adj: &[Vec<(usize, usize)>], from: usize, to: usize, within: Option<(&[usize], usize)>) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    while let Some(u) = q.pop_front() {
        if u == to {
            break;
        }
        for &(a, v) in &adj[u] {
            if seen[v] || within.is_some_and(|(comp, c)| comp[v] != c) {
                continue;
            }
            seen[v] = true;
            prev[v] = Some((u, a));
            q.push_back(v);
        }
    }
    let mut word = Vec::new();
    let mut x = to;
    while x != from {
        let (p, a) = prev[x].expect("reachable");
        word.push(a);
        x = p;
    }
    word.reverse();
    word
}

/// Strongly connected components (iterative Tarjan); returns the component of each node.
fn tarjan(adj: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut i)) = call.last_mut() {
            if *i < adj[u].len() {
                let v = adj[u][*i].1;
                *i += 1;
                if index[v] == usize::MAX {
                    index[v] = counter;
                    low[v] = counter;
                    counter += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().expect("on stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == u {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Block boundaries `t_0 < t_1 < ..` of a symbolic word, consecutive blocks
/// sharing their boundary letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub boundaries: Vec<usize>,
    /// Index of the pattern matched by each block.
    pub patterns: Vec<usize>,
}

/// Greedy shortest-match factorisation. The part of `word` after the last
/// boundary is a proper prefix of every possible block and is left over.
pub fn split_orbit(family: &BlockFamily, word: &[usize]) -> Result<Split> {
    let r = family.case.r();
    if word.first() == Some(&r) {
        return Err(Error::Precondition(format!("symbolic word starts with {r}")));
    }
    let nfas: Vec<Nfa> = family.patterns.iter().map(|p| Nfa::build(core::slice::from_ref(p))).collect();
    let mut boundaries = vec![0];
    let mut patterns = Vec::new();
    let mut t = 0;
    'outer: while t < word.len() {
        let mut cur: Vec<BTreeSet<usize>> = nfas.iter().map(|n| n.closure(BTreeSet::from([0]))).collect();
        for (e, &a) in word.iter().enumerate().skip(t) {
            for (n, s) in nfas.iter().zip(cur.iter_mut()) {
                *s = n.step(s, a);
            }
            if let Some(pi) = nfas.iter().zip(&cur).position(|(n, s)| s.iter().any(|x| n.accept.contains(x))) {
                boundaries.push(e);
                patterns.push(pi);
                t = e;
                continue 'outer;
            }
            if cur.iter().all(BTreeSet::is_empty) {
                return Err(Error::Unsplittable(t));
            }
        }
        break;
    }
    Ok(Split { boundaries, patterns })
}

/// Word matrices `A_(b_0) .. A_(b_(u-1))` of a concrete block, for callers
/// replaying a split.
pub fn block_matrix(map: &GaussMap, block: &[usize]) -> Result<UniMat> {
    map.word_matrix(&block[..block.len().saturating_sub(1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(c: CaseId) -> GaussMap {
        GaussMap::build(c).unwrap()
    }

    #[test]
    fn pattern_text_roundtrip() {
        for s in ["!{4} 4* !{4}", "2 10^0..16 !{10}", "2 10^17.. 9 10* !{10}", "{31,32} 1 1* 33 33* !{33}"] {
            let r = if s.contains("33") { 33 } else if s.contains("10") { 10 } else { 4 };
            let p = BlockPattern::parse(s, r).unwrap();
            let q = BlockPattern::parse(&p.to_string(), r).unwrap();
            assert_eq!(p, q);
        }
        assert!(BlockPattern::parse("4 1 2", 4).is_err());
        assert!(matches!(BlockPattern::parse("1 7 2", 4), Err(Error::LetterOutOfRange { letter: 7, r: 4 })));
        let p = BlockPattern::parse("2 10^17.. 9 10* !{10}", 10).unwrap();
        assert!(p.matches(&[&[2][..], &[10; 17], &[9, 3]].concat()));
        assert!(!p.matches(&[&[2][..], &[10; 16], &[9, 3]].concat()));
    }

    #[test]
    fn single_words() {
        let g = map(CaseId::C2_5);
        assert!(is_decreasing_block(&g, &[1, 4, 4, 2]).unwrap().is_decreasing());
        assert!(!is_decreasing_block(&g, &[4, 1, 2]).unwrap().is_decreasing());
        let g = map(CaseId::C3_6);
        let w = [&[2][..], &[10; 17], &[9]].concat();
        assert!(!is_decreasing_block(&g, &w).unwrap().is_decreasing());
        let w = [&[2][..], &[10; 16], &[9]].concat();
        assert!(is_decreasing_block(&g, &w).unwrap().is_decreasing());
    }

    #[test]
    fn hexagonal_thresholds_are_minimal() {
        let g = map(CaseId::C3_6);
        for (a, k) in (2..=9).zip(HEX_THRESHOLDS) {
            let p = BlockPattern::parse(&format!("{a} 10* !{{10}}"), 10).unwrap();
            let c = verify_pattern(&g, &p).unwrap();
            let w = c.counterexample.unwrap();
            assert_eq!(w, [&[a][..], &vec![10; k as usize], &[9]].concat(), "a = {a}");
        }
    }

    #[test]
    fn golden_family_certified_and_complete() {
        let g = map(CaseId::C2_5);
        let fam = BlockFamily::builtin(CaseId::C2_5).unwrap();
        assert!(verify_family(&g, &fam).unwrap().ok());
        assert!(verify_completeness(&g, &fam).unwrap().complete);

        let partial = BlockFamily::parse(CaseId::C2_5, &["{1,3} 4* !{4}"]).unwrap();
        let c = verify_completeness(&g, &partial).unwrap();
        assert!(!c.complete);
        let (prefix, cycle) = c.lasso.unwrap();
        assert_eq!(prefix.first(), Some(&2));
        assert!(!cycle.iter().all(|&a| a == 4));

        let empty = BlockFamily { case: CaseId::C2_5, patterns: Vec::new() };
        assert!(!verify_completeness(&g, &empty).unwrap().complete);
    }

    #[test]
    fn split_shares_boundary_letters() {
        let fam = BlockFamily::builtin(CaseId::C2_5).unwrap();
        let s = split_orbit(&fam, &[1, 4, 4, 2, 3, 4, 1, 4]).unwrap();
        assert_eq!(s.boundaries, vec![0, 3, 4, 6]);
    }
}
