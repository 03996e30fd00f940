//! Position statistics and rejection-based balancing on top of the bin
//! product map.
//!
//! Every codeword contributes a "word BPM" with a single 1 per row, placed
//! at the run state it passes through. Summing word BPMs over the whole
//! codebook gives the maternal BPM; summing over a rejected subset gives a
//! delta BPM; the difference is the balanced BPM of the surviving words.
//! Rejection never rebuilds the framework: surviving words keep their
//! maternal encoding and are renumbered by rank/select.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::alphabet::Letter;
use crate::endec::{encode, WordIndex};
use crate::error::{Error, Result};
use crate::framework::{build_maps, BinMaps, CodeSpec, StateSpace};

/// Rows `*, 0..L` by run state; every row sums to `total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductMap {
    pub rows: Vec<Vec<u64>>,
    pub total: u64,
}

impl ProductMap {
    pub fn zeros(length: usize, h: usize) -> Self {
        ProductMap {
            rows: vec![vec![0; h]; length + 1],
            total: 0,
        }
    }

    pub fn maternal(maps: &BinMaps) -> Self {
        ProductMap {
            rows: maps.bpm.clone(),
            total: maps.capacity,
        }
    }

    /// Common row sum, or `None` when rows disagree.
    pub fn row_sum(&self) -> Option<u64> {
        let mut sums = self.rows.iter().map(|r| r.iter().sum::<u64>());
        let first = sums.next()?;
        sums.all(|s| s == first).then_some(first)
    }

    pub fn add_assign(&mut self, other: &ProductMap) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.total += other.total;
    }

    /// Elementwise `self - other`; `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &ProductMap) -> Option<ProductMap> {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect())
            .collect::<Option<Vec<Vec<u64>>>>()?;
        Some(ProductMap {
            rows,
            total: self.total.checked_sub(other.total)?,
        })
    }
}

/// An exact fraction; kept unreduced so the denominator stays the codebook
/// size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn j_mass(space: &StateSpace, row: &[u64]) -> u64 {
    row.iter()
        .enumerate()
        .filter(|&(s, _)| space.letter_of(s) == Letter::J)
        .map(|(_, &v)| v)
        .sum()
}

/// Position-wise probability of `J` over the uniform codebook.
pub fn j_profile(spec: &CodeSpec) -> Result<Vec<Ratio>> {
    let maps = build_maps(spec)?;
    Ok(j_profile_of(&maps))
}

pub fn j_profile_of(maps: &BinMaps) -> Vec<Ratio> {
    maps.bpm[1..]
        .iter()
        .map(|row| Ratio {
            num: j_mass(&maps.space, row),
            den: maps.capacity,
        })
        .collect()
}

/// State index per row (`*`, then after each letter) visited by word `b`.
pub fn word_path(maps: &BinMaps, b: WordIndex) -> Result<Vec<usize>> {
    let img = encode(maps, b)?;
    let space = &maps.space;
    let mut path = Vec::with_capacity(maps.length() + 1);
    path.push(space.start_column());
    let mut state = None;
    for &l in img.letters() {
        let s = space.step(state, l).expect("encoded word is valid");
        path.push(s);
        state = Some(s);
    }
    Ok(path)
}

pub fn word_bpm(maps: &BinMaps, b: WordIndex) -> Result<ProductMap> {
    let path = word_path(maps, b)?;
    let mut m = ProductMap::zeros(maps.length(), maps.space.h());
    for (row, &s) in path.iter().enumerate() {
        m.rows[row][s] = 1;
    }
    m.total = 1;
    Ok(m)
}

/// Sorted set of rejected maternal indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectionSet {
    capacity: u64,
    rejected: BTreeSet<WordIndex>,
}

impl RejectionSet {
    pub fn new(capacity: u64, indices: impl IntoIterator<Item = WordIndex>) -> Result<Self> {
        let rejected: BTreeSet<_> = indices.into_iter().collect();
        if let Some(&bad) = rejected.iter().find(|&&b| b >= capacity) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                limit: capacity,
            });
        }
        Ok(RejectionSet { capacity, rejected })
    }

    pub fn empty(capacity: u64) -> Self {
        RejectionSet {
            capacity,
            rejected: BTreeSet::new(),
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }

    pub fn contains(&self, b: WordIndex) -> bool {
        self.rejected.contains(&b)
    }

    pub fn indices(&self) -> impl Iterator<Item = WordIndex> + '_ {
        self.rejected.iter().copied()
    }

    /// Size of the balanced index space.
    pub fn surviving(&self) -> u64 {
        self.capacity - self.rejected.len() as u64
    }
}

pub fn delta_bpm(maps: &BinMaps, rej: &RejectionSet) -> Result<ProductMap> {
    let mut m = ProductMap::zeros(maps.length(), maps.space.h());
    for b in rej.indices() {
        for (row, s) in word_path(maps, b)?.into_iter().enumerate() {
            m.rows[row][s] += 1;
        }
        m.total += 1;
    }
    Ok(m)
}

/// Search budget for [`find_rejection_sets`], in candidate subsets.
pub const REJECTION_BUDGET: u64 = 10_000_000;

fn binomial_capped(n: u64, k: u64, cap: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return cap + 1;
        }
    }
    acc as u64
}

/// Finds up to `limit` rejection sets whose delta BPM equals `target`,
/// searching subsets in lexicographic order of their sorted indices.
pub fn find_rejection_sets(
    maps: &BinMaps,
    target: &ProductMap,
    limit: usize,
) -> Result<Vec<RejectionSet>> {
    let n_delta = target.row_sum().ok_or(Error::MalformedTarget)?;
    if target.rows.len() != maps.length() + 1
        || target.rows.iter().any(|r| r.len() != maps.space.h())
    {
        return Err(Error::MalformedTarget);
    }
    let cap = maps.capacity;
    if n_delta > cap {
        return Ok(Vec::new());
    }
    if binomial_capped(cap, n_delta, REJECTION_BUDGET) > REJECTION_BUDGET {
        return Err(Error::BudgetExceeded);
    }
    let paths = (0..cap)
        .map(|b| word_path(maps, b))
        .collect::<Result<Vec<_>>>()?;
    let mut search = Search {
        paths: &paths,
        target: &target.rows,
        partial: vec![vec![0; maps.space.h()]; maps.length() + 1],
        chosen: Vec::with_capacity(n_delta as usize),
        need: n_delta as usize,
        limit,
        found: Vec::new(),
    };
    if limit > 0 {
        search.descend(0);
    }
    Ok(search
        .found
        .into_iter()
        .map(|v| RejectionSet::new(cap, v).expect("indices below capacity"))
        .collect())
}

struct Search<'a> {
    paths: &'a [Vec<usize>],
    target: &'a [Vec<u64>],
    partial: Vec<Vec<u64>>,
    chosen: Vec<WordIndex>,
    need: usize,
    limit: usize,
    found: Vec<Vec<WordIndex>>,
}

impl Search<'_> {
    fn descend(&mut self, from: usize) {
        if self.chosen.len() == self.need {
            if self.partial.as_slice() == self.target {
                self.found.push(self.chosen.clone());
            }
            return;
        }
        let left = self.need - self.chosen.len();
        for b in from..=self.paths.len().saturating_sub(left) {
            if self.found.len() >= self.limit {
                return;
            }
            let path = &self.paths[b];
            let fits = path
                .iter()
                .enumerate()
                .all(|(row, &s)| self.partial[row][s] < self.target[row][s]);
            if !fits {
                continue;
            }
            for (row, &s) in path.iter().enumerate() {
                self.partial[row][s] += 1;
            }
            self.chosen.push(b as WordIndex);
            self.descend(b + 1);
            self.chosen.pop();
            for (row, &s) in self.paths[b].iter().enumerate() {
                self.partial[row][s] -= 1;
            }
        }
    }
}

/// J-profile of the words that survive rejection.
pub fn balanced_profile(maps: &BinMaps, rej: &RejectionSet) -> Result<Vec<f64>> {
    if rej.surviving() == 0 {
        return Err(Error::EmptyCode);
    }
    let delta = delta_bpm(maps, rej)?;
    let n = rej.surviving() as f64;
    Ok(maps.bpm[1..]
        .iter()
        .zip(&delta.rows[1..])
        .map(|(m, d)| (j_mass(&maps.space, m) - j_mass(&maps.space, d)) as f64 / n)
        .collect())
}

/// The `b_bal`-th surviving maternal index.
pub fn balanced_to_maternal(rej: &RejectionSet, b_bal: u64) -> Result<WordIndex> {
    if b_bal >= rej.surviving() {
        return Err(Error::IndexOutOfRange {
            index: b_bal,
            limit: rej.surviving(),
        });
    }
    let mut m = b_bal;
    for r in rej.indices() {
        if r <= m {
            m += 1;
        } else {
            break;
        }
    }
    Ok(m)
}

pub fn maternal_to_balanced(rej: &RejectionSet, b: WordIndex) -> Result<u64> {
    if b >= rej.capacity {
        return Err(Error::IndexOutOfRange {
            index: b,
            limit: rej.capacity,
        });
    }
    if rej.contains(b) {
        return Err(Error::RejectedIndex(b));
    }
    Ok(b - rej.rejected.range(..b).count() as u64)
}

/// Recovers BFM and BCM from a maternal BPM: prefix counts are rebuilt with
/// the forward recursion (restricted to nonzero BPM cells) and capacities
/// follow as `p / f`.
pub fn recover_maps_from_bpm(
    space: &StateSpace,
    bpm: &ProductMap,
) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
    let h = space.h();
    let rows = &bpm.rows;
    if rows.len() < 2 || rows.iter().any(|r| r.len() != h) {
        return Err(Error::Inconsistent("map shape does not match the state space".into()));
    }
    let total = bpm
        .row_sum()
        .ok_or_else(|| Error::Inconsistent("row sums differ".into()))?;
    if total == 0 {
        return Err(Error::Inconsistent("map is zero".into()));
    }
    let mut bfm = vec![vec![0u64; h]; rows.len()];
    for (s, &p) in rows[0].iter().enumerate() {
        if p > 0 {
            bfm[0][s] = 1;
        }
    }
    for i in 1..rows.len() {
        let mut f = vec![0u64; h];
        if i == 1 {
            for l in [Letter::J, Letter::K] {
                if let Some(t) = space.start(l) {
                    f[t] += 1;
                }
            }
        } else {
            for (s, &prev) in bfm[i - 1].iter().enumerate() {
                for l in [Letter::J, Letter::K] {
                    if let Some(t) = space.next(s, l) {
                        f[t] += prev;
                    }
                }
            }
        }
        for (s, v) in f.iter_mut().enumerate() {
            if rows[i][s] == 0 {
                *v = 0;
            }
        }
        bfm[i] = f;
    }
    let mut bcm = vec![vec![0u64; h]; rows.len()];
    for i in 0..rows.len() {
        for s in 0..h {
            let (p, f) = (rows[i][s], bfm[i][s]);
            match (p, f) {
                (0, _) => {}
                (_, 0) => {
                    return Err(Error::Inconsistent(format!(
                        "row {} state {s}: product without prefixes",
                        BinMaps::row_label(i)
                    )))
                }
                _ if p % f != 0 => {
                    return Err(Error::Inconsistent(format!(
                        "row {} state {s}: {p} is not a multiple of {f}",
                        BinMaps::row_label(i)
                    )))
                }
                _ => bcm[i][s] = p / f,
            }
        }
    }
    Ok((bfm, bcm))
}
