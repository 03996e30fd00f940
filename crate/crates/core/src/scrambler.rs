//! Per-word base-21 cipher scrambling and its mixed-radix generalization.
//!
//! A plain word `(x, y)` is enciphered digit by digit: `x` in the base-3
//! system, `y` in the base-7 system, each shifted by the biased random drawn
//! for that word. The cipher is always a permitted dictionary word, so the
//! run-length guarantees of the dictionary survive scrambling.

use crate::alphabet::Digits21;
use crate::error::{Error, Result};
use crate::modprime::ResidueSystem;
use crate::sidestream::{sys3, sys7, word_randoms, ScramblerClock, WordRandoms};

pub fn scramble_word(plain: Digits21, r: WordRandoms) -> Digits21 {
    let x = sys3().add(plain.x() as u32, r.s3).expect("base-3 digit");
    let y = sys7().add(plain.y() as u32, r.s7).expect("base-7 digit");
    Digits21::new(x as u8, y as u8).expect("closed under add")
}

pub fn descramble_word(cipher: Digits21, r: WordRandoms) -> Digits21 {
    let x = sys3().sub(cipher.x() as u32, r.s3).expect("base-3 digit");
    let y = sys7().sub(cipher.y() as u32, r.s7).expect("base-7 digit");
    Digits21::new(x as u8, y as u8).expect("closed under sub")
}

fn run_stream(
    words: &[Digits21],
    clk: &ScramblerClock,
    f: fn(Digits21, WordRandoms) -> Digits21,
) -> Result<(Vec<Digits21>, ScramblerClock)> {
    let mut clk = clk.clone();
    let mut out = Vec::with_capacity(words.len());
    for &w in words {
        let (r, next) = word_randoms(&clk)?;
        out.push(f(w, r));
        clk = next;
    }
    Ok((out, clk))
}

/// Scrambles word `n` with the randoms of word `n`; returns the advanced clock.
pub fn scramble_stream(
    words: &[Digits21],
    clk: &ScramblerClock,
) -> Result<(Vec<Digits21>, ScramblerClock)> {
    run_stream(words, clk, scramble_word)
}

pub fn descramble_stream(
    words: &[Digits21],
    clk: &ScramblerClock,
) -> Result<(Vec<Digits21>, ScramblerClock)> {
    run_stream(words, clk, descramble_word)
}

/// An ordered list of prime radices; digits are taken most-significant
/// radix first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadixSpec {
    systems: Vec<ResidueSystem>,
    capacity: u64,
}

impl MixedRadixSpec {
    pub fn new(radices: &[u32]) -> Result<Self> {
        if radices.is_empty() {
            return Err(Error::BadConfig("no radices".into()));
        }
        let systems = radices
            .iter()
            .map(|&p| ResidueSystem::standard(p))
            .collect::<Result<Vec<_>>>()?;
        let capacity = radices
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p as u64))
            .ok_or_else(|| Error::BadConfig("capacity overflow".into()))?;
        Ok(MixedRadixSpec { systems, capacity })
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn systems(&self) -> &[ResidueSystem] {
        &self.systems
    }

    /// Digit positions (0-based, per radix) of `index`.
    pub fn decompose(&self, index: u64) -> Result<Vec<usize>> {
        if index >= self.capacity {
            return Err(Error::IndexOutOfRange {
                index,
                limit: self.capacity,
            });
        }
        let mut rest = index;
        let mut digits = vec![0; self.systems.len()];
        for (d, sys) in digits.iter_mut().zip(&self.systems).rev() {
            let p = sys.p() as u64;
            *d = (rest % p) as usize;
            rest /= p;
        }
        Ok(digits)
    }

    pub fn compose(&self, digits: &[usize]) -> u64 {
        digits
            .iter()
            .zip(&self.systems)
            .fold(0, |acc, (&d, s)| acc * s.p() as u64 + d as u64)
    }
}

fn mixed_radix_apply(
    index: u64,
    spec: &MixedRadixSpec,
    randoms: &[u32],
    inverse: bool,
) -> Result<u64> {
    if randoms.len() != spec.systems.len() {
        return Err(Error::BadConfig(format!(
            "expected {} randoms, got {}",
            spec.systems.len(),
            randoms.len()
        )));
    }
    let mut digits = spec.decompose(index)?;
    for ((d, sys), &r) in digits.iter_mut().zip(&spec.systems).zip(randoms) {
        let p = sys.p() as usize;
        let ri = sys.index_of(r)?;
        *d = if inverse { (*d + p - ri) % p } else { (*d + ri) % p };
    }
    Ok(spec.compose(&digits))
}

/// Adds one random representative to each mixed-radix digit of `index`.
pub fn mixed_radix_scramble(index: u64, spec: &MixedRadixSpec, randoms: &[u32]) -> Result<u64> {
    mixed_radix_apply(index, spec, randoms, false)
}

pub fn mixed_radix_descramble(index: u64, spec: &MixedRadixSpec, randoms: &[u32]) -> Result<u64> {
    mixed_radix_apply(index, spec, randoms, true)
}

/// User space, scrambled space and total transport capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceSplit {
    n_user: u64,
    n_scr: u64,
    n: u64,
}

impl SpaceSplit {
    pub fn new(n_user: u64, n_scr: u64, n: u64) -> Result<Self> {
        if n_user > n_scr || n_scr > n {
            return Err(Error::BadConfig(format!(
                "need n_user <= n_scr <= n, got {n_user}, {n_scr}, {n}"
            )));
        }
        Ok(SpaceSplit { n_user, n_scr, n })
    }

    /// The base-21 dictionary: 16 user words, both digits scrambled.
    pub fn base21() -> Self {
        SpaceSplit {
            n_user: 16,
            n_scr: 21,
            n: 21,
        }
    }

    pub fn n_user(&self) -> u64 {
        self.n_user
    }

    pub fn n_scr(&self) -> u64 {
        self.n_scr
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// A user space of the form `(2^u + 1) * 2^v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserSpace {
    pub u: u32,
    pub v: u32,
    pub value: u64,
}

/// Every `(2^u + 1) * 2^v <= n` with `u >= 1`, largest first.
pub fn user_space_candidates(n: u64) -> Vec<UserSpace> {
    let mut out = Vec::new();
    let mut u = 1;
    while u < 63 && (1u64 << u) + 1 <= n {
        let odd = (1u64 << u) + 1;
        let mut v = 0;
        while v < 63 && odd.checked_mul(1 << v).is_some_and(|x| x <= n) {
            out.push(UserSpace {
                u,
                v,
                value: odd << v,
            });
            v += 1;
        }
        u += 1;
    }
    out.sort_by(|a, b| b.value.cmp(&a.value));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{digits_to_image, max_run, serialize, Letter};
    use crate::sidestream::{randoms_from_bits, AnchorState, LfsrState};

    fn d(x: u8, y: u8) -> Digits21 {
        Digits21::new(x, y).unwrap()
    }

    fn r(s3: u32, s7: u32) -> WordRandoms {
        WordRandoms { s3, s7 }
    }

    #[test]
    fn word_examples() {
        assert_eq!(scramble_word(d(1, 2), r(1, 1)), d(1, 2));
        assert_eq!(scramble_word(d(2, 1), r(2, 2)), d(3, 2));
        assert_eq!(descramble_word(d(3, 2), r(2, 2)), d(2, 1));
        assert_eq!(descramble_word(d(1, 1), r(1, 1)), d(1, 1));
    }

    #[test]
    fn word_round_trip_all() {
        for w in Digits21::all() {
            for s3 in 1..=3 {
                for s7 in 1..=7 {
                    let c = scramble_word(w, r(s3, s7));
                    assert_eq!(descramble_word(c, r(s3, s7)), w);
                }
            }
        }
    }

    #[test]
    fn whitening_is_exact() {
        for w in Digits21::all() {
            let mut counts = std::collections::HashMap::new();
            for bits in 0..32u8 {
                let b = [0, 1, 2, 3, 4].map(|k| (bits >> k) & 1);
                for n in 0..21 {
                    let c = scramble_word(w, randoms_from_bits(b, AnchorState::at_phase(n)));
                    *counts.entry(c).or_insert(0) += 1;
                }
            }
            assert_eq!(counts.len(), 21);
            assert!(counts.values().all(|&c| c == 32));
        }
    }

    #[test]
    fn empty_stream_keeps_clock() {
        let clk = ScramblerClock::seeded(1).unwrap();
        let (out, next) = scramble_stream(&[], &clk).unwrap();
        assert!(out.is_empty());
        assert_eq!(next, clk);
    }

    #[test]
    fn stream_round_trip_and_runs() {
        let clk = ScramblerClock::new(LfsrState::new(0x3a5).unwrap(), AnchorState::new(2, 5).unwrap());
        let plain: Vec<Digits21> = (0..5000).map(|i| Digits21::all().nth(i % 21).unwrap()).collect();
        let (cipher, end) = scramble_stream(&plain, &clk).unwrap();
        let imgs: Vec<_> = cipher.iter().map(|&c| digits_to_image(c)).collect();
        assert!(max_run(&serialize(&imgs).letters, Letter::K) <= 3);
        let (back, end2) = descramble_stream(&cipher, &clk).unwrap();
        assert_eq!(back, plain);
        assert_eq!(end, end2);
    }

    #[test]
    fn mixed_radix_reduces_to_base21() {
        let spec = MixedRadixSpec::new(&[3, 7]).unwrap();
        for w in Digits21::all() {
            for s3 in 1..=3 {
                for s7 in 1..=7 {
                    let idx = (w.x() as u64 - 1) * 7 + (w.y() as u64 - 1);
                    let c = scramble_word(w, r(s3, s7));
                    let cidx = (c.x() as u64 - 1) * 7 + (c.y() as u64 - 1);
                    assert_eq!(mixed_radix_scramble(idx, &spec, &[s3, s7]).unwrap(), cidx);
                }
            }
        }
    }

    #[test]
    fn mixed_radix_544() {
        let spec = MixedRadixSpec::new(&[2, 2, 2, 2, 2, 17]).unwrap();
        assert_eq!(spec.capacity(), 544);
        let randoms = [1, 0, 1, 1, 0, 9];
        let mut seen = vec![false; 544];
        for i in 0..544 {
            let c = mixed_radix_scramble(i, &spec, &randoms).unwrap();
            assert!(!seen[c as usize]);
            seen[c as usize] = true;
            assert_eq!(mixed_radix_descramble(c, &spec, &randoms).unwrap(), i);
        }
        let ident = [0, 0, 0, 0, 0, 0];
        for i in 0..544 {
            assert_eq!(mixed_radix_scramble(i, &spec, &ident).unwrap(), i);
        }
        assert!(matches!(
            mixed_radix_scramble(544, &spec, &randoms),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn user_spaces() {
        let c = user_space_candidates(21);
        assert_eq!(c[0], UserSpace { u: 2, v: 2, value: 20 });
        assert_eq!(user_space_candidates(565)[0], UserSpace { u: 4, v: 5, value: 544 });
        assert!(user_space_candidates(1).is_empty());
        assert_eq!(user_space_candidates(3), vec![UserSpace { u: 1, v: 0, value: 3 }]);
        assert!(c.windows(2).all(|w| w[0].value > w[1].value));
    }

    #[test]
    fn space_split_ordering() {
        assert!(SpaceSplit::new(16, 21, 21).is_ok());
        assert!(SpaceSplit::new(22, 21, 21).is_err());
        assert_eq!(SpaceSplit::base21().n_scr(), 21);
    }
}
