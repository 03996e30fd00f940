//! Word-boundary detection from per-position letter statistics.
//!
//! Letters are classified modulo five and counted. Because the base-21
//! dictionary has an uneven J-profile across word positions, the counters
//! reveal where words start. The detector correlates the counters with the
//! expected per-word trace seed of a variant over all five cyclic
//! rotations; window products give the peak/plateau contrast diagnostics.

use serde::Serialize;

use crate::alphabet::{Letter, LetterStream, WORD_LEN};
use crate::error::{Error, Result};

/// Minimum number of observed words for [`detect_phase`].
pub const MIN_WORDS: u64 = 21;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CounterBank {
    pub j_counts: [u64; WORD_LEN],
    pub k_counts: [u64; WORD_LEN],
    pub words_observed: u64,
}

impl CounterBank {
    pub fn counts(&self, letter: Letter) -> &[u64; WORD_LEN] {
        match letter {
            Letter::J => &self.j_counts,
            Letter::K => &self.k_counts,
        }
    }

    pub fn merge(&self, other: &CounterBank) -> CounterBank {
        let mut out = *self;
        for i in 0..WORD_LEN {
            out.j_counts[i] += other.j_counts[i];
            out.k_counts[i] += other.k_counts[i];
        }
        out.words_observed += other.words_observed;
        out
    }
}

/// Counts J and K at every stream position modulo five. A trailing partial
/// word is ignored.
pub fn accumulate(stream: &LetterStream) -> Result<CounterBank> {
    if stream.len() < WORD_LEN {
        return Err(Error::StreamTooShort);
    }
    let mut bank = CounterBank::default();
    for chunk in stream.letters.chunks_exact(WORD_LEN) {
        for (i, &l) in chunk.iter().enumerate() {
            match l {
                Letter::J => bank.j_counts[i] += 1,
                Letter::K => bank.k_counts[i] += 1,
            }
        }
        bank.words_observed += 1;
    }
    Ok(bank)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TraceVariant {
    JJ,
    JK,
    KK,
    KJ,
}

impl TraceVariant {
    pub const ALL: [TraceVariant; 4] = [Self::JJ, Self::JK, Self::KK, Self::KJ];

    /// Which counter each word position is read from.
    pub fn letters(self) -> [Letter; WORD_LEN] {
        use Letter::{J, K};
        match self {
            Self::JJ => [J; 5],
            Self::KK => [K; 5],
            Self::JK => [J, J, K, K, K],
            Self::KJ => [K, K, J, J, J],
        }
    }

    /// Expected counts per 21 words of the base-21 dictionary.
    pub fn seed(self) -> [u64; WORD_LEN] {
        match self {
            Self::JJ => [14, 14, 12, 12, 12],
            Self::KK => [7, 7, 9, 9, 9],
            Self::JK => [14, 14, 9, 9, 9],
            Self::KJ => [7, 7, 12, 12, 12],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_uppercase().as_str() {
            "JJ" => Ok(Self::JJ),
            "JK" => Ok(Self::JK),
            "KK" => Ok(Self::KK),
            "KJ" => Ok(Self::KJ),
            _ => Err(Error::BadConfig(format!("unknown variant '{text}'"))),
        }
    }
}

/// Observed counters re-indexed by word position, assuming words start at
/// stream positions `≡ offset (mod 5)`.
pub fn statistic(bank: &CounterBank, variant: TraceVariant, offset: usize) -> [u64; WORD_LEN] {
    let letters = variant.letters();
    std::array::from_fn(|k| bank.counts(letters[k])[(k + offset) % WORD_LEN])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseEstimate {
    /// Words start at stream positions congruent to this, modulo five.
    pub offset: usize,
    pub score: f64,
    pub decisive: bool,
}

/// Correlation of every rotation with the mean-removed seed, indexed by
/// candidate offset. The seed is scaled by five to stay in integers.
///
/// Mixed variants read J and K counters whose levels differ, so an
/// uncentred dot product can favour a wrong rotation; for single-letter
/// variants centring does not change the argmax.
pub fn phase_scores(bank: &CounterBank, variant: TraceVariant) -> [i128; WORD_LEN] {
    let seed = variant.seed();
    let sum: u64 = seed.iter().sum();
    let weights: [i128; WORD_LEN] = std::array::from_fn(|k| 5 * seed[k] as i128 - sum as i128);
    std::array::from_fn(|d| {
        statistic(bank, variant, d)
            .iter()
            .zip(weights)
            .map(|(&o, w)| o as i128 * w)
            .sum()
    })
}

pub fn detect_phase(bank: &CounterBank, variant: TraceVariant) -> Result<PhaseEstimate> {
    if bank.words_observed < MIN_WORDS {
        return Err(Error::StreamTooShort);
    }
    let scores = phase_scores(bank, variant);
    let best = *scores.iter().max().expect("five scores");
    let offset = scores.iter().position(|&s| s == best).expect("max exists");
    let decisive = scores.iter().filter(|&&s| s == best).count() == 1;
    Ok(PhaseEstimate {
        offset,
        score: best as f64 / bank.words_observed as f64,
        decisive,
    })
}

/// Candidate offsets ordered by decreasing score (ties by offset).
pub fn ranked_offsets(bank: &CounterBank, variant: TraceVariant) -> [usize; WORD_LEN] {
    let scores = phase_scores(bank, variant);
    let mut order = [0, 1, 2, 3, 4];
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// `out[i] = Π counts[(i + k) mod 5]` for `k < m`, `m ∈ {2, 3, 5}`.
pub fn window_products(counts: &[u64; WORD_LEN], m: usize) -> Result<[u128; WORD_LEN]> {
    if !matches!(m, 2 | 3 | 5) {
        return Err(Error::BadWindow(m));
    }
    Ok(std::array::from_fn(|i| {
        (0..m).map(|k| counts[(i + k) % WORD_LEN] as u128).product()
    }))
}

/// Window length for a trellis step depth (1, 2, 3).
pub fn window_for_depth(depth: u8) -> Option<usize> {
    match depth {
        1 => Some(2),
        2 => Some(3),
        3 => Some(5),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contrast {
    pub extremum_index: usize,
    pub extremum: f64,
    pub plateau: f64,
    /// `extremum / plateau - 1`, in percent.
    pub linear_delta: f64,
    /// `20 log10(extremum / plateau)`.
    pub power_delta: f64,
}

/// Peak (or dip) against plateau.
///
/// The extremum is whichever end of the sorted values stands further apart
/// from its neighbour; the plateau is the mean of the two values at the
/// opposite end.
pub fn contrast(products: &[u128; WORD_LEN]) -> Result<Contrast> {
    let v: Vec<f64> = products.iter().map(|&p| p as f64).collect();
    let mut sorted = v.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[WORD_LEN - 1] {
        return Err(Error::Flat);
    }
    let ratio = |hi: f64, lo: f64| if lo == 0.0 { f64::INFINITY } else { hi / lo };
    let top_gap = ratio(sorted[4], sorted[3]);
    let bottom_gap = ratio(sorted[1], sorted[0]);
    let (extremum, plateau) = if top_gap >= bottom_gap {
        (sorted[4], (sorted[0] + sorted[1]) / 2.0)
    } else {
        (sorted[0], (sorted[3] + sorted[4]) / 2.0)
    };
    let extremum_index = v.iter().position(|&x| x == extremum).expect("present");
    let r = extremum / plateau;
    Ok(Contrast {
        extremum_index,
        extremum,
        plateau,
        linear_delta: (r - 1.0) * 100.0,
        power_delta: 20.0 * r.log10(),
    })
}
