//! Side-stream randomness: the 11-cell binary LFSR (`1 + x^9 + x^11`),
//! the period-3/period-7 anchors that bias grouped random bits into exactly
//! uniform base-3/base-7 digits, and progressive modulo-p generators.

use crate::error::{Error, Result};
use crate::modprime::ResidueSystem;

pub const LFSR_CELLS: u32 = 11;
pub const LFSR_PERIOD: u64 = (1 << LFSR_CELLS) - 1;
const LFSR_MASK: u16 = (1 << LFSR_CELLS) - 1;

/// Anchor cycle length, `lcm(3, 7)`.
pub const ANCHOR_CYCLE: u8 = 21;

/// Eleven binary cells; bit `k - 1` holds cell `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LfsrState(u16);

impl LfsrState {
    pub fn new(register: u16) -> Result<Self> {
        let r = register & LFSR_MASK;
        if r == 0 || r != register {
            return Err(Error::ZeroState);
        }
        Ok(LfsrState(r))
    }

    pub fn register(self) -> u16 {
        self.0
    }

    fn cell(self, k: u32) -> u16 {
        (self.0 >> (k - 1)) & 1
    }
}

/// One Fibonacci step: emits cell 11 and shifts `cell11 ^ cell9` into cell 1.
pub fn lfsr_step(s: LfsrState) -> Result<(u8, LfsrState)> {
    if s.0 == 0 {
        return Err(Error::ZeroState);
    }
    let out = s.cell(11);
    let fb = out ^ s.cell(9);
    let next = ((s.0 << 1) | fb) & LFSR_MASK;
    Ok((out as u8, LfsrState(next)))
}

/// `(a3, a7)` anchor pair; both advance once per word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnchorState {
    pub a3: u8,
    pub a7: u8,
}

impl Default for AnchorState {
    fn default() -> Self {
        AnchorState { a3: 1, a7: 1 }
    }
}

impl AnchorState {
    pub fn new(a3: u8, a7: u8) -> Result<Self> {
        if !(1..=3).contains(&a3) || !(1..=7).contains(&a7) {
            return Err(Error::BadConfig(format!("anchor ({a3},{a7}) out of range")));
        }
        Ok(AnchorState { a3, a7 })
    }

    /// Anchor values at word time `n` of a cycle started at (1, 1).
    pub fn at_phase(n: u64) -> Self {
        AnchorState {
            a3: (n % 3) as u8 + 1,
            a7: (n % 7) as u8 + 1,
        }
    }

    /// Position of this pair within the 21-word cycle.
    pub fn phase(self) -> u8 {
        (0..ANCHOR_CYCLE)
            .find(|&n| Self::at_phase(n as u64) == self)
            .expect("every anchor pair lies on the cycle")
    }
}

pub fn advance_anchors(a: AnchorState) -> AnchorState {
    AnchorState {
        a3: a.a3 % 3 + 1,
        a7: a.a7 % 7 + 1,
    }
}

/// Folds a `k`-bit random value onto the representatives of `sys`, shifted
/// by the anchor: `reps[((v mod p) + anchor - 1) mod p]`.
pub fn biased_digit(sys: &ResidueSystem, v: u32, anchor: u8) -> u32 {
    let p = sys.p();
    sys.rep(((v % p + anchor as u32 + p - 1) % p) as usize)
}

/// LFSR, anchors and a word counter (mod 21) advanced together.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScramblerClock {
    pub lfsr: LfsrState,
    pub anchors: AnchorState,
    pub word_phase: u8,
}

impl ScramblerClock {
    pub fn new(lfsr: LfsrState, anchors: AnchorState) -> Self {
        ScramblerClock {
            lfsr,
            anchors,
            word_phase: 0,
        }
    }

    /// Default start: LFSR seed 1, anchors (1, 1).
    pub fn seeded(seed: u16) -> Result<Self> {
        Ok(Self::new(LfsrState::new(seed)?, AnchorState::default()))
    }
}

/// Per-word scrambling randoms for the base-3 and base-7 sub-scramblers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordRandoms {
    pub s3: u32,
    pub s7: u32,
}

/// Splits five LSB-first bits into the 2-bit and 3-bit group values.
pub fn group_bits(bits: [u8; 5]) -> (u32, u32) {
    let v2 = bits[0] as u32 | (bits[1] as u32) << 1;
    let v3 = bits[2] as u32 | (bits[3] as u32) << 1 | (bits[4] as u32) << 2;
    (v2, v3)
}

/// Biased randoms for one word from its five raw bits and anchors.
pub fn randoms_from_bits(bits: [u8; 5], anchors: AnchorState) -> WordRandoms {
    let (v2, v3) = group_bits(bits);
    WordRandoms {
        s3: biased_digit(sys3(), v2, anchors.a3),
        s7: biased_digit(sys7(), v3, anchors.a7),
    }
}

pub(crate) fn sys3() -> &'static ResidueSystem {
    static S: std::sync::OnceLock<ResidueSystem> = std::sync::OnceLock::new();
    S.get_or_init(|| ResidueSystem::standard(3).unwrap())
}

pub(crate) fn sys7() -> &'static ResidueSystem {
    static S: std::sync::OnceLock<ResidueSystem> = std::sync::OnceLock::new();
    S.get_or_init(|| ResidueSystem::standard(7).unwrap())
}

/// Draws five LFSR bits, produces `(s3, s7)` and advances the clock one word.
pub fn word_randoms(clk: &ScramblerClock) -> Result<(WordRandoms, ScramblerClock)> {
    let mut lfsr = clk.lfsr;
    let mut bits = [0u8; 5];
    for b in &mut bits {
        let (bit, next) = lfsr_step(lfsr)?;
        *b = bit;
        lfsr = next;
    }
    let randoms = randoms_from_bits(bits, clk.anchors);
    let next = ScramblerClock {
        lfsr,
        anchors: advance_anchors(clk.anchors),
        word_phase: (clk.word_phase + 1) % ANCHOR_CYCLE,
    };
    Ok((randoms, next))
}

/// A shift register over a residue group; each cell holds a position in the
/// representative list. Feedback is the modular sum of the tapped cells and
/// the output is the last cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProgressiveGenerator {
    sys: ResidueSystem,
    stages: Vec<u8>,
    taps: Vec<usize>,
}

impl ProgressiveGenerator {
    /// `stages` are representative values, cell 1 first. `taps` are 1-based
    /// cell numbers.
    pub fn new(sys: ResidueSystem, stages: &[u32], taps: &[usize]) -> Result<Self> {
        if taps.is_empty() || taps.iter().any(|&t| t == 0 || t > stages.len()) {
            return Err(Error::BadConfig("taps must name existing cells".into()));
        }
        let stages = stages
            .iter()
            .map(|&v| sys.index_of(v).map(|i| i as u8))
            .collect::<Result<Vec<_>>>()?;
        if stages.iter().all(|&i| i == 0) {
            return Err(Error::DegenerateState);
        }
        Ok(ProgressiveGenerator {
            sys,
            stages,
            taps: taps.to_vec(),
        })
    }

    /// Eleven cells, taps {9, 11}, cell 1 at `reps[1]` and the rest at identity.
    pub fn with_default_taps(p: u32) -> Result<Self> {
        let sys = ResidueSystem::standard(p)?;
        let mut stages = vec![sys.identity(); LFSR_CELLS as usize];
        stages[0] = sys.rep(1);
        Self::new(sys, &stages, &[9, 11])
    }

    pub fn system(&self) -> &ResidueSystem {
        &self.sys
    }

    pub fn stage_values(&self) -> Vec<u32> {
        self.stages.iter().map(|&i| self.sys.rep(i as usize)).collect()
    }
}

pub fn progressive_step(g: &ProgressiveGenerator) -> Result<(u32, ProgressiveGenerator)> {
    if g.stages.iter().all(|&i| i == 0) {
        return Err(Error::DegenerateState);
    }
    let p = g.sys.p() as usize;
    let n = g.stages.len();
    let out = g.sys.rep(g.stages[n - 1] as usize);
    let fb = g.taps.iter().map(|&t| g.stages[t - 1] as usize).sum::<usize>() % p;
    let mut stages = Vec::with_capacity(n);
    stages.push(fb as u8);
    stages.extend_from_slice(&g.stages[..n - 1]);
    Ok((
        out,
        ProgressiveGenerator {
            sys: g.sys.clone(),
            stages,
            taps: g.taps.clone(),
        },
    ))
}

/// Smallest `s <= max_steps` with `state(s) == state(0)`.
pub fn measure_period(g: &ProgressiveGenerator, max_steps: u64) -> Result<u64> {
    if g.stages.iter().all(|&i| i == 0) {
        return Err(Error::DegenerateState);
    }
    let p = g.sys.p() as u8;
    let n = g.stages.len();
    let mut cur = g.stages.clone();
    for s in 1..=max_steps {
        let fb = (g.taps.iter().map(|&t| cur[t - 1] as u32).sum::<u32>() % p as u32) as u8;
        cur.rotate_right(1);
        cur[0] = fb;
        debug_assert_eq!(cur.len(), n);
        if cur == g.stages {
            return Ok(s);
        }
    }
    Err(Error::NotFound(max_steps))
}

/// Smallest `s` with the binary LFSR back at its seed.
pub fn lfsr_period(seed: LfsrState, max_steps: u64) -> Result<u64> {
    let mut s = seed;
    for n in 1..=max_steps {
        s = lfsr_step(s)?.1;
        if s == seed {
            return Ok(n);
        }
    }
    Err(Error::NotFound(max_steps))
}
