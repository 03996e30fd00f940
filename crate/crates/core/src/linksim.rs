//! Two-endpoint link startup and session simulation.
//!
//! The transmitter sends an idle gap of forced `K` letters whose length
//! signals its state, a fixed preamble, 21 scrambled sync words carrying
//! the known plaintext index 0, a postamble, then scrambled payload. The
//! scrambler clock and anchors only advance during sync words and payload.
//!
//! The receiver finds the gap, ranks word-phase candidates with the
//! alignment detector, checks the preamble at each candidate and recovers
//! the transmitter's clock by testing every LFSR state and anchor phase
//! against the 21 observed cipher words. All time is counted in letters and
//! words.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alignment::{accumulate, ranked_offsets, TraceVariant};
use crate::alphabet::{digits_to_image, image_to_digits, Image, Letter, LetterStream, WORD_LEN};
use crate::endec::{decode, encode, WordIndex};
use crate::error::{Error, Result};
use crate::framework::{build_maps, BinMaps, CodeSpec};
use crate::scrambler::{descramble_word, scramble_word};
use crate::sidestream::{
    lfsr_step, randoms_from_bits, word_randoms, AnchorState, LfsrState, ScramblerClock,
    ANCHOR_CYCLE, LFSR_PERIOD,
};

/// Sync words per synchronization cycle.
pub const SYNC_WORDS: usize = 21;

/// Plaintext index carried by every sync word.
pub const SYNC_INDEX: WordIndex = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapMeaning {
    FarEndFault,
    Free,
    Synchronized,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkConfig {
    pub sync_preamble_words: usize,
    pub sync_postamble_words: usize,
    /// T_F
    pub gap_free_words: usize,
    /// T_S
    pub gap_synced_words: usize,
    /// T_FEF
    pub gap_fef_words: usize,
    /// Which gap the transmitter sends ahead of its sync cycle.
    pub signal: GapMeaning,
    pub lfsr_seed: u16,
    pub payload_words: usize,
    pub trial_seed: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            sync_preamble_words: 2,
            sync_postamble_words: 1,
            gap_free_words: 16,
            gap_synced_words: 4,
            gap_fef_words: 64,
            signal: GapMeaning::Free,
            lfsr_seed: 1,
            payload_words: 64,
            trial_seed: 0,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        let (ts, tf, tfef) = (self.gap_synced_words, self.gap_free_words, self.gap_fef_words);
        if !(0 < ts && ts < tf && 2 * tf <= tfef) {
            return Err(Error::BadConfig(format!(
                "need 0 < T_S < T_F << T_FEF, got T_S={ts}, T_F={tf}, T_FEF={tfef}"
            )));
        }
        if self.sync_preamble_words == 0 {
            return Err(Error::BadConfig("preamble must be at least one word".into()));
        }
        if self.signal == GapMeaning::Normal {
            return Err(Error::BadConfig("a sync cycle needs a nonzero gap".into()));
        }
        LfsrState::new(self.lfsr_seed)?;
        Ok(())
    }

    pub fn gap_words(&self, meaning: GapMeaning) -> usize {
        match meaning {
            GapMeaning::FarEndFault => self.gap_fef_words,
            GapMeaning::Free => self.gap_free_words,
            GapMeaning::Synchronized => self.gap_synced_words,
            GapMeaning::Normal => 0,
        }
    }

    /// A copy with LFSR seed and trial seed drawn from `trial`.
    pub fn randomized(&self, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        LinkConfig {
            lfsr_seed: rng.gen_range(1..=LFSR_PERIOD as u16),
            trial_seed: trial,
            ..self.clone()
        }
    }
}

/// Gap duration classified by the nearest configured duration.
pub fn classify_gap(words: f64, cfg: &LinkConfig) -> GapMeaning {
    [
        GapMeaning::Normal,
        GapMeaning::Synchronized,
        GapMeaning::Free,
        GapMeaning::FarEndFault,
    ]
    .into_iter()
    .min_by(|&a, &b| {
        let da = (cfg.gap_words(a) as f64 - words).abs();
        let db = (cfg.gap_words(b) as f64 - words).abs();
        da.total_cmp(&db)
    })
    .expect("four meanings")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinkPhase {
    Reset,
    LinkPartnerExpectation,
    ScramblerSynchronization,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointState {
    pub phase: LinkPhase,
    pub clock: Option<ScramblerClock>,
    pub detected_phase: Option<u8>,
}

impl EndpointState {
    fn new() -> Self {
        EndpointState {
            phase: LinkPhase::Reset,
            clock: None,
            detected_phase: None,
        }
    }

    fn advance(&mut self, to: LinkPhase) {
        debug_assert_eq!(to as u8, self.phase as u8 + 1, "phases advance one at a time");
        self.phase = to;
    }
}

fn preamble_letters(words: usize) -> Vec<Letter> {
    (0..words * WORD_LEN)
        .map(|i| if i % 2 == 0 { Letter::J } else { Letter::K })
        .collect()
}

fn postamble_letters(words: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(words * WORD_LEN);
    for _ in 0..words {
        out.extend([Letter::J, Letter::K, Letter::K, Letter::K, Letter::K]);
    }
    out
}

/// Letters sent by the transmitter plus the ground truth needed to judge
/// the receiver.
#[derive(Debug, Clone)]
pub struct Transmission {
    pub letters: Vec<Letter>,
    pub gap_start: usize,
    pub preamble_start: usize,
    pub sync_start: usize,
    pub payload_start: usize,
    pub clock_at_sync: ScramblerClock,
    pub clock_after_sync: ScramblerClock,
    pub clock_end: ScramblerClock,
}

fn base21_maps() -> &'static BinMaps {
    static M: std::sync::OnceLock<BinMaps> = std::sync::OnceLock::new();
    M.get_or_init(|| build_maps(&CodeSpec::progenitor(WORD_LEN)).expect("base-21 framework"))
}

fn scramble_index(b: WordIndex, clk: &ScramblerClock) -> Result<(Image, ScramblerClock)> {
    let plain = image_to_digits(&encode(base21_maps(), b)?)?;
    let (r, next) = word_randoms(clk)?;
    Ok((digits_to_image(scramble_word(plain, r)), next))
}

/// Builds the transmitted letter stream: `lead_words` of unrelated traffic,
/// the signaled gap, preamble, sync block, postamble and payload.
pub fn transmit(
    cfg: &LinkConfig,
    payload: &[WordIndex],
    lead_words: &[WordIndex],
) -> Result<Transmission> {
    cfg.validate()?;
    let maps = base21_maps();
    let mut letters = Vec::new();
    for &b in lead_words {
        letters.extend_from_slice(encode(maps, b)?.letters());
    }
    let gap_start = letters.len();
    letters.extend(std::iter::repeat_n(Letter::K, cfg.gap_words(cfg.signal) * WORD_LEN));
    let preamble_start = letters.len();
    letters.extend(preamble_letters(cfg.sync_preamble_words));
    let sync_start = letters.len();
    // anchors reset to (1, 1) at sync word #1
    let clock_at_sync = ScramblerClock::new(LfsrState::new(cfg.lfsr_seed)?, AnchorState::default());
    let mut clk = clock_at_sync.clone();
    for _ in 0..SYNC_WORDS {
        let (img, next) = scramble_index(SYNC_INDEX, &clk)?;
        letters.extend_from_slice(img.letters());
        clk = next;
    }
    let clock_after_sync = clk.clone();
    letters.extend(postamble_letters(cfg.sync_postamble_words));
    let payload_start = letters.len();
    for &b in payload {
        let (img, next) = scramble_index(b, &clk)?;
        letters.extend_from_slice(img.letters());
        clk = next;
    }
    Ok(Transmission {
        letters,
        gap_start,
        preamble_start,
        sync_start,
        payload_start,
        clock_at_sync,
        clock_after_sync,
        clock_end: clk,
    })
}

/// What the receiver learned from a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Reception {
    pub state: EndpointState,
    pub history: Vec<LinkPhase>,
    pub gap: GapMeaning,
    pub gap_words: f64,
    /// Stream position of sync word #1.
    pub sync_start: usize,
    pub payload_start: usize,
    pub clock_candidates: usize,
    /// The top-ranked alignment offset was the one that synchronized.
    pub alignment_first_choice: bool,
    pub received: Vec<WordIndex>,
}

/// One entry per LFSR state: the state and the first `5 * SYNC_WORDS`
/// output bits from it.
struct LfsrTable {
    states: Vec<LfsrState>,
    bits: Vec<u8>,
}

impl LfsrTable {
    fn get() -> &'static LfsrTable {
        static T: std::sync::OnceLock<LfsrTable> = std::sync::OnceLock::new();
        T.get_or_init(|| {
            let n = LFSR_PERIOD as usize;
            let mut states = Vec::with_capacity(n);
            let mut bits = Vec::with_capacity(n + WORD_LEN * SYNC_WORDS);
            let mut s = LfsrState::new(1).expect("nonzero");
            for _ in 0..n {
                states.push(s);
                let (b, next) = lfsr_step(s).expect("nonzero");
                bits.push(b);
                s = next;
            }
            for i in 0..WORD_LEN * SYNC_WORDS {
                bits.push(bits[i]);
            }
            LfsrTable { states, bits }
        })
    }
}

/// Every `(LFSR state, anchor phase)` whose randoms turn the known sync
/// plaintext into the observed cipher words. Returned clocks are positioned
/// at sync word #1.
pub fn search_clocks(cipher: &[Image]) -> Result<Vec<ScramblerClock>> {
    let plain = image_to_digits(&encode(base21_maps(), SYNC_INDEX)?)?;
    let cipher = cipher
        .iter()
        .map(image_to_digits)
        .collect::<Result<Vec<_>>>()?;
    let table = LfsrTable::get();
    let mut found = Vec::new();
    for (q, &state) in table.states.iter().enumerate() {
        for n0 in 0..ANCHOR_CYCLE as u64 {
            let consistent = cipher.iter().enumerate().all(|(w, &c)| {
                let at = q + WORD_LEN * w;
                let bits: [u8; 5] = std::array::from_fn(|k| table.bits[at + k]);
                let r = randoms_from_bits(bits, AnchorState::at_phase(n0 + w as u64));
                scramble_word(plain, r) == c
            });
            if consistent {
                let mut clk = ScramblerClock::new(state, AnchorState::at_phase(n0));
                clk.word_phase = n0 as u8;
                found.push(clk);
            }
        }
    }
    Ok(found)
}

fn words_at(letters: &[Letter], start: usize, count: usize) -> Option<Vec<Image>> {
    let end = start.checked_add(count * WORD_LEN)?;
    let slice = letters.get(start..end)?;
    Some(slice.chunks(WORD_LEN).map(|c| Image::new(c.to_vec())).collect())
}

/// Runs the receiver over a captured stream.
pub fn receive(cfg: &LinkConfig, stream: &LetterStream) -> Result<Reception> {
    cfg.validate()?;
    let letters = &stream.letters;
    let mut state = EndpointState::new();
    let mut history = vec![state.phase];

    // idle gap: the first run of at least one word of K letters
    let mut run = 0;
    let mut gap_end = None;
    for (i, &l) in letters.iter().enumerate() {
        if l == Letter::K {
            run += 1;
        } else {
            if run >= WORD_LEN {
                gap_end = Some(i);
                break;
            }
            run = 0;
        }
    }
    let gap_end = gap_end.ok_or(Error::AlignmentFailed)?;
    let gap_words = run as f64 / WORD_LEN as f64;
    let gap = classify_gap(gap_words, cfg);
    state.advance(LinkPhase::LinkPartnerExpectation);
    history.push(state.phase);

    let pre_len = cfg.sync_preamble_words * WORD_LEN;
    let window_end = (gap_end + pre_len + SYNC_WORDS * WORD_LEN).min(letters.len());
    let window = LetterStream {
        letters: letters[gap_end..window_end].to_vec(),
        origin_phase: None,
    };
    let bank = accumulate(&window).map_err(|_| Error::AlignmentFailed)?;
    let ranked = ranked_offsets(&bank, TraceVariant::JJ);
    let preamble = preamble_letters(cfg.sync_preamble_words);

    let mut preamble_seen = false;
    for (rank, &rel) in ranked.iter().enumerate() {
        let offset = (gap_end + rel) % WORD_LEN;
        let pre_start = gap_end + rel;
        let sync_start = pre_start + pre_len;
        if letters.get(pre_start..sync_start) != Some(&preamble[..])
            || letters[gap_end..pre_start].iter().any(|&l| l != Letter::K)
        {
            continue;
        }
        if !preamble_seen {
            preamble_seen = true;
            state.advance(LinkPhase::ScramblerSynchronization);
            history.push(state.phase);
        }
        let Some(sync) = words_at(letters, sync_start, SYNC_WORDS) else {
            continue;
        };
        let Ok(candidates) = search_clocks(&sync) else {
            continue;
        };
        let Some(first) = candidates.first() else {
            continue;
        };
        let mut clk = first.clone();
        for _ in 0..SYNC_WORDS {
            clk = word_randoms(&clk)?.1;
        }
        state.detected_phase = Some(offset as u8);
        state.clock = Some(clk.clone());
        state.advance(LinkPhase::Normal);
        history.push(state.phase);

        let payload_start = sync_start + (SYNC_WORDS + cfg.sync_postamble_words) * WORD_LEN;
        let tail = letters.get(payload_start..).unwrap_or(&[]);
        let mut received = Vec::with_capacity(tail.len() / WORD_LEN);
        for (m, chunk) in tail.chunks_exact(WORD_LEN).enumerate() {
            let cipher = image_to_digits(&Image::new(chunk.to_vec()))
                .map_err(|_| Error::DesyncDetected(m))?;
            let (r, next) = word_randoms(&clk)?;
            clk = next;
            let plain = digits_to_image(descramble_word(cipher, r));
            received.push(decode(base21_maps(), &plain).map_err(|_| Error::DesyncDetected(m))?);
        }
        state.clock = Some(clk);
        return Ok(Reception {
            state,
            history,
            gap,
            gap_words,
            sync_start,
            payload_start,
            clock_candidates: candidates.len(),
            alignment_first_choice: rank == 0,
            received,
        });
    }
    Err(if preamble_seen {
        Error::SyncFailed
    } else {
        Error::AlignmentFailed
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkReport {
    pub trial_seed: u64,
    pub reached_normal: bool,
    /// Words between the receiver joining the line and reaching Normal.
    pub words_to_sync: u64,
    pub post_sync_errors: u64,
    pub final_anchors: (u8, u8),
    /// Anchors the transmitter used on sync word #21.
    pub sync21_anchors: (u8, u8),
    pub detected_phase: Option<u8>,
    pub gap: GapMeaning,
    pub clock_candidates: usize,
    pub clock_agreement: bool,
    pub alignment_first_choice: bool,
}

/// Simulates one session with the given payload. The receiver joins the
/// line at a random letter inside a few words of earlier traffic.
pub fn run_session(cfg: &LinkConfig, payload: &[WordIndex]) -> Result<(Vec<WordIndex>, LinkReport)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.trial_seed);
    let lead: Vec<WordIndex> = (0..3).map(|_| rng.gen_range(0..21)).collect();
    let join = rng.gen_range(0..WORD_LEN);
    let tx = transmit(cfg, payload, &lead)?;
    let stream = LetterStream {
        letters: tx.letters[join..].to_vec(),
        origin_phase: Some(join as u8),
    };
    let rx = receive(cfg, &stream)?;
    let errors = rx
        .received
        .iter()
        .zip(payload)
        .filter(|(a, b)| a != b)
        .count()
        + payload.len().abs_diff(rx.received.len());
    let sync21 = AnchorState::at_phase(SYNC_WORDS as u64 - 1);
    let rx_clock = rx.state.clock.clone();
    let report = LinkReport {
        trial_seed: cfg.trial_seed,
        reached_normal: rx.state.phase == LinkPhase::Normal,
        words_to_sync: (rx.payload_start as u64).div_ceil(WORD_LEN as u64),
        post_sync_errors: errors as u64,
        final_anchors: rx_clock.as_ref().map_or((0, 0), |c| (c.anchors.a3, c.anchors.a7)),
        sync21_anchors: (sync21.a3, sync21.a7),
        detected_phase: rx.state.detected_phase,
        gap: rx.gap,
        clock_candidates: rx.clock_candidates,
        clock_agreement: rx_clock.as_ref() == Some(&tx.clock_end),
        alignment_first_choice: rx.alignment_first_choice,
    };
    Ok((rx.received, report))
}

/// Startup with a random payload of `cfg.payload_words` words.
pub fn run_startup(cfg: &LinkConfig) -> Result<LinkReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.trial_seed ^ 0x5eed_5eed);
    let payload: Vec<WordIndex> = (0..cfg.payload_words).map(|_| rng.gen_range(0..21)).collect();
    Ok(run_session(cfg, &payload)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_ordering() {
        assert!(LinkConfig::default().validate().is_ok());
        let bad = LinkConfig {
            gap_synced_words: 16,
            ..LinkConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LinkConfig {
            lfsr_seed: 0,
            ..LinkConfig::default()
        };
        assert_eq!(bad.validate(), Err(Error::ZeroState));
    }

    #[test]
    fn gap_classes() {
        let cfg = LinkConfig::default();
        assert_eq!(classify_gap(64.0, &cfg), GapMeaning::FarEndFault);
        assert_eq!(classify_gap(17.0, &cfg), GapMeaning::Free);
        assert_eq!(classify_gap(4.4, &cfg), GapMeaning::Synchronized);
        assert_eq!(classify_gap(0.0, &cfg), GapMeaning::Normal);
    }

    #[test]
    fn clean_startup() {
        let cfg = LinkConfig::default().randomized(7);
        let r = run_startup(&cfg).unwrap();
        assert!(r.reached_normal);
        assert_eq!(r.post_sync_errors, 0);
        assert_eq!(r.sync21_anchors, (3, 7));
        assert!(r.clock_agreement);
        assert_eq!(r.clock_candidates, 1);
        assert_eq!(r.gap, GapMeaning::Free);
    }

    #[test]
    fn receiver_walks_every_phase() {
        let cfg = LinkConfig::default();
        let tx = transmit(&cfg, &[1, 2, 3], &[4]).unwrap();
        let rx = receive(&cfg, &LetterStream::new(tx.letters.clone())).unwrap();
        assert_eq!(
            rx.history,
            vec![
                LinkPhase::Reset,
                LinkPhase::LinkPartnerExpectation,
                LinkPhase::ScramblerSynchronization,
                LinkPhase::Normal
            ]
        );
        assert_eq!(rx.received, vec![1, 2, 3]);
        assert_eq!(rx.sync_start, tx.sync_start);
        assert_eq!(rx.state.clock.as_ref(), Some(&tx.clock_end));
    }

    #[test]
    fn sync_clock_is_recovered() {
        let cfg = LinkConfig {
            lfsr_seed: 0x2d3,
            ..LinkConfig::default()
        };
        let tx = transmit(&cfg, &[], &[]).unwrap();
        let sync = words_at(&tx.letters, tx.sync_start, SYNC_WORDS).unwrap();
        assert_eq!(search_clocks(&sync).unwrap(), vec![tx.clock_at_sync]);
    }

    #[test]
    fn noisy_preamble_never_corrupts() {
        let cfg = LinkConfig::default();
        let tx = transmit(&cfg, &[5, 6, 7], &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let mut letters = tx.letters.clone();
            for l in &mut letters[tx.preamble_start..tx.sync_start] {
                *l = if rng.gen_bool(0.5) { Letter::J } else { Letter::K };
            }
            if letters[tx.preamble_start..tx.sync_start] == preamble_letters(2)[..] {
                continue;
            }
            let r = receive(&cfg, &LetterStream::new(letters));
            assert!(
                matches!(r, Err(Error::AlignmentFailed) | Err(Error::SyncFailed)),
                "trial {trial}: {r:?}"
            );
        }
    }

    #[test]
    fn fault_gap_is_reported() {
        let cfg = LinkConfig {
            signal: GapMeaning::FarEndFault,
            ..LinkConfig::default()
        };
        let (got, r) = run_session(&cfg, &[9, 9]).unwrap();
        assert_eq!(got, vec![9, 9]);
        assert_eq!(r.gap, GapMeaning::FarEndFault);
    }

    #[test]
    fn empty_payload() {
        let (got, r) = run_session(&LinkConfig::default(), &[]).unwrap();
        assert!(got.is_empty());
        assert!(r.reached_normal);
    }

    #[test]
    fn corrupted_payload_is_detected() {
        let cfg = LinkConfig::default();
        let tx = transmit(&cfg, &[0; 4], &[]).unwrap();
        let mut letters = tx.letters.clone();
        for l in &mut letters[tx.payload_start + 5..tx.payload_start + 10] {
            *l = Letter::K;
        }
        assert_eq!(
            receive(&cfg, &LetterStream::new(letters)),
            Err(Error::DesyncDetected(1))
        );
    }
}
