//! Run-limited code frameworks.
//!
//! A [`CodeSpec`] fixes the word length and, per letter class, how long a run
//! may be at the start of a word (`lead`), anywhere (`inner`) and at its end
//! (`trail`). From it we derive the run-state space, the transit rules and
//! three bin maps indexed by row `*` (before the first letter) and rows
//! `0..L` (after letter `i`):
//!
//! * BFM, the number of valid prefixes ending in each run state;
//! * BCM, the number of valid completions leaving each run state;
//! * BPM, their elementwise product. Every BPM row sums to the capacity.
//!
//! The leading-run limit is realized by entering the first run of class `X`
//! at run length `inner - lead + 1`, i.e. as if `inner - lead` letters of
//! that class preceded the word.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Image, Letter};
use crate::error::{Error, Result};

/// Longest word the brute-force enumerator accepts.
pub const MAX_ENUM_LEN: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunLimits {
    pub lead: u32,
    pub inner: u32,
    pub trail: u32,
    pub unconstrained: bool,
}

impl RunLimits {
    pub fn new(lead: u32, inner: u32, trail: u32) -> Result<Self> {
        if inner == 0 || lead > inner || trail > inner {
            return Err(Error::BadLimits(format!(
                "need 1 <= inner and lead, trail <= inner, got ({lead},{inner},{trail})"
            )));
        }
        Ok(RunLimits {
            lead,
            inner,
            trail,
            unconstrained: false,
        })
    }

    pub fn free() -> Self {
        RunLimits {
            lead: 0,
            inner: 0,
            trail: 0,
            unconstrained: true,
        }
    }

    /// Words may be concatenated without breaking the inner limit.
    pub fn concatenation_safe(&self) -> bool {
        self.unconstrained || self.lead + self.trail <= self.inner
    }

    /// `lead,inner,trail` or `free`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("free") {
            return Ok(Self::free());
        }
        let parts: Vec<u32> = t
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::BadLimits(format!("cannot parse '{text}'")))?;
        match parts[..] {
            [lead, inner, trail] => Self::new(lead, inner, trail),
            _ => Err(Error::BadLimits(format!("expected lead,inner,trail in '{text}'"))),
        }
    }
}

impl fmt::Display for RunLimits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unconstrained {
            write!(f, "free")
        } else {
            write!(f, "{},{},{}", self.lead, self.inner, self.trail)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub length: usize,
    pub k_limits: RunLimits,
    pub j_limits: RunLimits,
}

impl CodeSpec {
    pub fn new(length: usize, k_limits: RunLimits, j_limits: RunLimits) -> Result<Self> {
        if length == 0 {
            return Err(Error::BadLimits("word length must be positive".into()));
        }
        Ok(CodeSpec {
            length,
            k_limits,
            j_limits,
        })
    }

    /// The base-21 limits, K (1, 3, 2) with J free, at any length.
    pub fn progenitor(length: usize) -> Self {
        CodeSpec {
            length,
            k_limits: RunLimits {
                lead: 1,
                inner: 3,
                trail: 2,
                unconstrained: false,
            },
            j_limits: RunLimits::free(),
        }
    }

    pub fn limits(&self, letter: Letter) -> &RunLimits {
        match letter {
            Letter::J => &self.j_limits,
            Letter::K => &self.k_limits,
        }
    }

    pub fn concatenation_safe(&self) -> bool {
        self.k_limits.concatenation_safe() && self.j_limits.concatenation_safe()
    }
}

/// A run state: letter class and current run length (0 for a collapsed,
/// unconstrained class).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunState {
    pub letter: Letter,
    pub run: u32,
}

impl fmt::Display for RunState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.run == 0 {
            write!(f, "{}", self.letter)
        } else {
            write!(f, "{}{}", self.letter, self.run)
        }
    }
}

fn slot(l: Letter) -> usize {
    match l {
        Letter::J => 0,
        Letter::K => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    states: Vec<RunState>,
    /// `next[s][slot(letter)]`
    next: Vec<[Option<usize>; 2]>,
    start: [Option<usize>; 2],
    accepting: Vec<bool>,
    start_column: usize,
}

impl StateSpace {
    pub fn h(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[RunState] {
        &self.states
    }

    pub fn state_names(&self) -> Vec<String> {
        self.states.iter().map(|s| s.to_string()).collect()
    }

    pub fn next(&self, from: usize, letter: Letter) -> Option<usize> {
        self.next[from][slot(letter)]
    }

    pub fn start(&self, letter: Letter) -> Option<usize> {
        self.start[slot(letter)]
    }

    /// Successor of `from` (`None` = the start pseudo-state).
    pub fn step(&self, from: Option<usize>, letter: Letter) -> Option<usize> {
        match from {
            Some(s) => self.next(s, letter),
            None => self.start(letter),
        }
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    /// Column holding the start pseudo-state in row `*`.
    pub fn start_column(&self) -> usize {
        self.start_column
    }

    pub fn letter_of(&self, s: usize) -> Letter {
        self.states[s].letter
    }
}

/// 0/1 transit rule, `entries[into][from]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatrix {
    pub entries: Vec<Vec<u8>>,
}

impl RuleMatrix {
    pub fn transpose(&self) -> RuleMatrix {
        let n = self.entries.len();
        RuleMatrix {
            entries: (0..n)
                .map(|i| (0..n).map(|j| self.entries[j][i]).collect())
                .collect(),
        }
    }

    pub fn transit_count(&self) -> usize {
        self.entries.iter().flatten().filter(|&&e| e == 1).count()
    }
}

/// Builds the run-state space with its U-rule (time ascending) and D-rule
/// (time descending, the transpose).
pub fn build_state_space(spec: &CodeSpec) -> Result<(StateSpace, RuleMatrix, RuleMatrix)> {
    let mut states = Vec::new();
    for letter in [Letter::J, Letter::K] {
        let lim = spec.limits(letter);
        if lim.unconstrained {
            states.push(RunState { letter, run: 0 });
        } else {
            states.extend((1..=lim.inner).map(|run| RunState { letter, run }));
        }
    }
    let find = |letter: Letter, run: u32| {
        let lim = spec.limits(letter);
        let run = if lim.unconstrained { 0 } else { run };
        if !lim.unconstrained && (run == 0 || run > lim.inner) {
            return None;
        }
        states
            .iter()
            .position(|s| s.letter == letter && s.run == run)
    };
    let next: Vec<[Option<usize>; 2]> = states
        .iter()
        .map(|s| {
            let mut out = [None; 2];
            for letter in [Letter::J, Letter::K] {
                let run = if letter == s.letter { s.run + 1 } else { 1 };
                out[slot(letter)] = find(letter, run);
            }
            out
        })
        .collect();
    let mut start = [None; 2];
    for letter in [Letter::J, Letter::K] {
        let lim = spec.limits(letter);
        start[slot(letter)] = if lim.unconstrained {
            find(letter, 0)
        } else if lim.lead == 0 {
            None
        } else {
            find(letter, lim.inner - lim.lead + 1)
        };
    }
    let accepting = states
        .iter()
        .map(|s| {
            let lim = spec.limits(s.letter);
            lim.unconstrained || s.run <= lim.trail
        })
        .collect();
    let start_column = next.iter().position(|n| *n == start).unwrap_or(0);
    let space = StateSpace {
        states,
        next,
        start,
        accepting,
        start_column,
    };
    let h = space.h();
    let mut up = vec![vec![0u8; h]; h];
    for from in 0..h {
        for to in space.next[from].iter().flatten() {
            up[*to][from] = 1;
        }
    }
    let up = RuleMatrix { entries: up };
    let down = up.transpose();
    if raw_forward(&space, spec.length)[spec.length - 1]
        .iter()
        .enumerate()
        .all(|(s, &f)| f == 0 || !space.accepting[s])
    {
        return Err(Error::EmptyCode);
    }
    Ok((space, up, down))
}

/// Unmasked prefix counts for letter rows `0..length`.
fn raw_forward(space: &StateSpace, length: usize) -> Vec<Vec<u64>> {
    let h = space.h();
    let mut rows = Vec::with_capacity(length);
    let mut cur = vec![0u64; h];
    for s in space.start.iter().flatten() {
        cur[*s] += 1;
    }
    rows.push(cur);
    for i in 1..length {
        let mut nxt = vec![0u64; h];
        for (s, &f) in rows[i - 1].iter().enumerate() {
            for t in space.next[s].iter().flatten() {
                nxt[*t] += f;
            }
        }
        rows.push(nxt);
    }
    rows
}

/// Unmasked completion counts for letter rows `0..length`.
fn raw_backward(space: &StateSpace, length: usize) -> Vec<Vec<u64>> {
    let h = space.h();
    let mut rows = vec![vec![0u64; h]; length];
    rows[length - 1] = space.accepting.iter().map(|&a| a as u64).collect();
    for i in (0..length - 1).rev() {
        for s in 0..h {
            rows[i][s] = space.next[s]
                .iter()
                .flatten()
                .map(|&t| rows[i + 1][t])
                .sum();
        }
    }
    rows
}

/// BFM/BCM/BPM of a code. Row 0 of each table is row `*`; row `i + 1` is
/// the state after letter `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMaps {
    pub spec: CodeSpec,
    pub space: StateSpace,
    pub bfm: Vec<Vec<u64>>,
    pub bcm: Vec<Vec<u64>>,
    pub bpm: Vec<Vec<u64>>,
    pub capacity: u64,
}

impl BinMaps {
    pub fn length(&self) -> usize {
        self.spec.length
    }

    /// Row label: `*` then `0..L`.
    pub fn row_label(row: usize) -> String {
        if row == 0 {
            "*".into()
        } else {
            (row - 1).to_string()
        }
    }

    /// Completions left after letter `i` in state `s` (unmasked along any
    /// valid path).
    pub fn completions(&self, i: usize, s: usize) -> u64 {
        self.bcm[i + 1][s]
    }
}

pub fn build_maps(spec: &CodeSpec) -> Result<BinMaps> {
    let (space, _, _) = build_state_space(spec)?;
    let l = spec.length;
    let h = space.h();
    let f = raw_forward(&space, l);
    let c = raw_backward(&space, l);
    let capacity: u64 = space
        .start
        .iter()
        .flatten()
        .map(|&s| c[0][s])
        .sum();
    if capacity == 0 {
        return Err(Error::EmptyCode);
    }
    let mut bfm = vec![vec![0u64; h]; l + 1];
    let mut bcm = vec![vec![0u64; h]; l + 1];
    let mut bpm = vec![vec![0u64; h]; l + 1];
    let sc = space.start_column;
    bfm[0][sc] = 1;
    bcm[0][sc] = capacity;
    bpm[0][sc] = capacity;
    for i in 0..l {
        for s in 0..h {
            let p = f[i][s] * c[i][s];
            if p > 0 {
                bfm[i + 1][s] = f[i][s];
                bcm[i + 1][s] = c[i][s];
                bpm[i + 1][s] = p;
            }
        }
    }
    Ok(BinMaps {
        spec: *spec,
        space,
        bfm,
        bcm,
        bpm,
        capacity,
    })
}

pub fn capacity(spec: &CodeSpec) -> u64 {
    match build_maps(spec) {
        Ok(m) => m.capacity,
        Err(_) => 0,
    }
}

/// `n^(5/L)`, the base a five-letter word would need for the same density.
pub fn eq_base(n: u64, length: usize) -> f64 {
    (n as f64).powf(5.0 / length as f64)
}

pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

pub fn alu_width(spec: &CodeSpec) -> u32 {
    ceil_log2(capacity(spec))
}

/// ROM bits without leading zeros: per row, the width of its largest entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RomEstimate {
    pub bfm_bits: u32,
    pub bcm_bits: u32,
}

pub fn rom_estimate(maps: &BinMaps) -> RomEstimate {
    let bits = |t: &[Vec<u64>]| {
        t.iter()
            .map(|row| ceil_log2(row.iter().copied().max().unwrap_or(0)))
            .sum()
    };
    RomEstimate {
        bfm_bits: bits(&maps.bfm),
        bcm_bits: bits(&maps.bcm),
    }
}

/// Brute-force validity test, independent of the state machine: the word is
/// prefixed with `inner - lead` phantom letters of its first letter's class,
/// then every run must fit `inner` and the last run must fit `trail`.
pub fn is_valid_word(spec: &CodeSpec, letters: &[Letter]) -> bool {
    let Some(&first) = letters.first() else {
        return false;
    };
    let lim = spec.limits(first);
    if !lim.unconstrained && lim.lead == 0 {
        return false;
    }
    let phantom = if lim.unconstrained {
        0
    } else {
        lim.inner - lim.lead
    };
    let mut runs: Vec<(Letter, u32)> = vec![(first, phantom)];
    for &l in letters {
        match runs.last_mut() {
            Some((cur, n)) if *cur == l => *n += 1,
            _ => runs.push((l, 1)),
        }
    }
    let ok_inner = runs.iter().all(|&(l, n)| {
        let lim = spec.limits(l);
        lim.unconstrained || n <= lim.inner
    });
    let &(last, n) = runs.last().expect("non-empty");
    let lim = spec.limits(last);
    ok_inner && (lim.unconstrained || n <= lim.trail)
}

fn word_from_bits(bits: u32, length: usize) -> Vec<Letter> {
    (0..length)
        .map(|i| {
            if (bits >> (length - 1 - i)) & 1 == 0 {
                Letter::J
            } else {
                Letter::K
            }
        })
        .collect()
}

/// Every valid image by exhaustive filtering of all `2^L` words, in
/// J-before-K lexicographic order.
pub fn enumerate_words(spec: &CodeSpec) -> Result<Vec<Image>> {
    if spec.length > MAX_ENUM_LEN {
        return Err(Error::BudgetExceeded);
    }
    let l = spec.length;
    Ok((0..1u32 << l)
        .map(|b| word_from_bits(b, l))
        .filter(|w| is_valid_word(spec, w))
        .map(Image::new)
        .collect())
}

/// Size of [`enumerate_words`] without materializing the images.
pub fn count_words_brute(spec: &CodeSpec) -> Result<u64> {
    if spec.length > MAX_ENUM_LEN {
        return Err(Error::BudgetExceeded);
    }
    let l = spec.length;
    let mut buf = Vec::with_capacity(l);
    let mut n = 0;
    for b in 0..1u32 << l {
        buf.clear();
        buf.extend((0..l).map(|i| {
            if (b >> (l - 1 - i)) & 1 == 0 {
                Letter::J
            } else {
                Letter::K
            }
        }));
        n += is_valid_word(spec, &buf) as u64;
    }
    Ok(n)
}

fn limits_field(l: &RunLimits) -> Option<[u32; 3]> {
    (!l.unconstrained).then_some([l.lead, l.inner, l.trail])
}

fn limits_from_field(f: Option<[u32; 3]>) -> Result<RunLimits> {
    match f {
        None => Ok(RunLimits::free()),
        Some([a, b, c]) => RunLimits::new(a, b, c),
    }
}

/// Serialized bin maps. Rows are ordered `*, 0..L-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct MapsDocument {
    pub L: usize,
    pub H: usize,
    pub states: Vec<String>,
    pub capacity: u64,
    pub bfm: Vec<Vec<u64>>,
    pub bcm: Vec<Vec<u64>>,
    pub bpm: Vec<Vec<u64>>,
    /// `[lead, inner, trail]`, or null when unconstrained.
    #[serde(default = "progenitor_k")]
    pub k_limits: Option<[u32; 3]>,
    #[serde(default)]
    pub j_limits: Option<[u32; 3]>,
}

fn progenitor_k() -> Option<[u32; 3]> {
    Some([1, 3, 2])
}

impl MapsDocument {
    pub fn from_maps(m: &BinMaps) -> Self {
        MapsDocument {
            L: m.spec.length,
            H: m.space.h(),
            states: m.space.state_names(),
            capacity: m.capacity,
            bfm: m.bfm.clone(),
            bcm: m.bcm.clone(),
            bpm: m.bpm.clone(),
            k_limits: limits_field(&m.spec.k_limits),
            j_limits: limits_field(&m.spec.j_limits),
        }
    }

    /// Rebuilds the maps from the declared limits and checks that every
    /// stored table agrees.
    pub fn into_maps(self) -> Result<BinMaps> {
        let spec = CodeSpec::new(
            self.L,
            limits_from_field(self.k_limits)?,
            limits_from_field(self.j_limits)?,
        )?;
        let m = build_maps(&spec)?;
        if m.space.h() != self.H
            || m.capacity != self.capacity
            || m.bfm != self.bfm
            || m.bcm != self.bcm
            || m.bpm != self.bpm
        {
            return Err(Error::Inconsistent(
                "stored maps disagree with the declared limits".into(),
            ));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim(a: u32, b: u32, c: u32) -> RunLimits {
        RunLimits::new(a, b, c).unwrap()
    }

    #[test]
    fn progenitor_state_space() {
        let (space, up, down) = build_state_space(&CodeSpec::progenitor(5)).unwrap();
        assert_eq!(space.state_names(), vec!["J", "K1", "K2", "K3"]);
        assert_eq!(up.transit_count(), 7);
        assert_eq!(down, up.transpose());
        // from J: {J, K1}; K1: {J, K2}; K2: {J, K3}; K3: {J}
        let succ = |s: usize| -> Vec<usize> { space.next[s].iter().flatten().copied().collect() };
        assert_eq!(succ(0), vec![0, 1]);
        assert_eq!(succ(1), vec![0, 2]);
        assert_eq!(succ(2), vec![0, 3]);
        assert_eq!(succ(3), vec![0]);
        assert_eq!(space.start(Letter::K), Some(3));
        assert_eq!(space.start_column(), 2);
        assert_eq!(up.entries[1][0], 1, "column = from, row = into");
    }

    #[test]
    fn progenitor_transits_match_brute_force_pairs() {
        // Every adjacent letter pair inside a valid word corresponds to a
        // transit, and every transit is used by some word.
        let spec = CodeSpec::progenitor(8);
        let (space, up, _) = build_state_space(&spec).unwrap();
        let mut used = vec![vec![0u8; space.h()]; space.h()];
        for w in enumerate_words(&spec).unwrap() {
            let mut s = space.start(w.letters()[0]).unwrap();
            for &l in &w.letters()[1..] {
                let t = space.next(s, l).unwrap();
                used[t][s] = 1;
                s = t;
            }
        }
        assert_eq!(used, up.entries);
    }

    #[test]
    fn dual_limits_have_ten_transits() {
        let spec = CodeSpec::new(15, lim(1, 3, 2), lim(1, 3, 2)).unwrap();
        let (space, up, _) = build_state_space(&spec).unwrap();
        assert_eq!(space.h(), 6);
        assert_eq!(up.transit_count(), 10);
    }

    #[test]
    fn zero_lead_forbids_first_letter() {
        let spec = CodeSpec::new(10, lim(0, 3, 3), RunLimits::free()).unwrap();
        let (space, _, _) = build_state_space(&spec).unwrap();
        assert_eq!(space.start(Letter::K), None);
        assert!(enumerate_words(&spec)
            .unwrap()
            .iter()
            .all(|w| w.letters()[0] == Letter::J));
    }

    #[test]
    fn empty_code() {
        let spec = CodeSpec::new(4, lim(0, 1, 0), lim(0, 1, 0)).unwrap();
        assert_eq!(build_maps(&spec), Err(Error::EmptyCode));
        assert_eq!(capacity(&spec), 0);
    }

    #[test]
    fn progenitor_l5_maps() {
        let m = build_maps(&CodeSpec::progenitor(5)).unwrap();
        let bfm = vec![
            vec![0, 0, 1, 0],
            vec![1, 0, 0, 1],
            vec![2, 1, 0, 0],
            vec![3, 2, 1, 0],
            vec![6, 3, 2, 1],
            vec![12, 6, 3, 0],
        ];
        let bpm = vec![
            vec![0, 0, 21, 0],
            vec![14, 0, 0, 7],
            vec![14, 7, 0, 0],
            vec![12, 6, 3, 0],
            vec![12, 6, 2, 1],
            vec![12, 6, 3, 0],
        ];
        let bcm = vec![
            vec![0, 0, 21, 0],
            vec![14, 0, 0, 7],
            vec![7, 7, 0, 0],
            vec![4, 3, 3, 0],
            vec![2, 2, 1, 1],
            vec![1, 1, 1, 0],
        ];
        assert_eq!(m.bfm, bfm);
        assert_eq!(m.bcm, bcm);
        assert_eq!(m.bpm, bpm);
        assert_eq!(m.capacity, 21);
    }

    #[test]
    fn capacities() {
        assert_eq!(capacity(&CodeSpec::progenitor(5)), 21);
        assert_eq!(capacity(&CodeSpec::progenitor(10)), 565);
        let k033 = CodeSpec::new(10, lim(0, 3, 3), RunLimits::free()).unwrap();
        assert_eq!(capacity(&k033), 401);
        let dual = CodeSpec::new(15, lim(1, 3, 2), lim(1, 3, 2)).unwrap();
        assert_eq!(capacity(&dual), 5264);
    }

    #[test]
    fn equivalent_bases() {
        assert!((eq_base(21, 5) - 21.0).abs() < 1e-9);
        assert!((eq_base(565, 10) - 23.77).abs() < 0.005);
        assert!((eq_base(400_025, 20) - 25.15).abs() < 0.005);
    }

    #[test]
    fn enumeration_oracle() {
        let words = enumerate_words(&CodeSpec::progenitor(5)).unwrap();
        assert_eq!(words.len(), 21);
        assert_eq!(words[0].to_string(), "JJJJJ");
        assert_eq!(words[20].to_string(), "KJKKJ");
        assert_eq!(count_words_brute(&CodeSpec::progenitor(8)).unwrap(), 152);
        assert_eq!(
            enumerate_words(&CodeSpec::progenitor(26)),
            Err(Error::BudgetExceeded)
        );
    }

    #[test]
    fn alu_widths() {
        assert_eq!(alu_width(&CodeSpec::progenitor(10)), 10);
        assert_eq!(alu_width(&CodeSpec::progenitor(15)), 14);
        assert_eq!(alu_width(&CodeSpec::progenitor(40)), 38);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(17), 5);
    }

    #[test]
    fn rom_estimates() {
        let m = build_maps(&CodeSpec::progenitor(5)).unwrap();
        assert_eq!(
            rom_estimate(&m),
            RomEstimate {
                bfm_bits: 10,
                bcm_bits: 15
            }
        );
    }

    #[test]
    fn tetranacci_j_column() {
        let m = build_maps(&CodeSpec::progenitor(12)).unwrap();
        let col: Vec<u64> = m.bfm[1..].iter().map(|r| r[0]).collect();
        assert_eq!(&col[..8], &[1, 2, 3, 6, 12, 23, 44, 85]);
        for i in 2..m.bfm.len() - 1 {
            assert_eq!(m.bfm[i][0], m.bfm[i - 1].iter().sum::<u64>());
        }
    }

    #[test]
    fn limits_parsing() {
        assert_eq!(RunLimits::parse("1,3,2").unwrap(), lim(1, 3, 2));
        assert_eq!(RunLimits::parse("free").unwrap(), RunLimits::free());
        assert!(RunLimits::parse("4,3,2").is_err());
        assert!(RunLimits::parse("1,3").is_err());
        assert!(!lim(2, 3, 2).concatenation_safe());
        assert!(lim(1, 3, 2).concatenation_safe());
    }

    #[test]
    fn document_round_trip() {
        let m = build_maps(&CodeSpec::progenitor(7)).unwrap();
        let doc = MapsDocument::from_maps(&m);
        let json = serde_json::to_string(&doc).unwrap();
        let back: MapsDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.clone().into_maps().unwrap(), m);
        let mut bad = back;
        bad.bcm[1][0] += 1;
        assert!(matches!(bad.into_maps(), Err(Error::Inconsistent(_))));
    }
}
