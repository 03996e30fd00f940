//! Enumerative encoder/decoder between word indices and images.
//!
//! Encoding walks the word letter by letter. At each position the block of
//! indices continuing with `J` comes first, its size being the completion
//! count of the `J` successor state; indices past it continue with `K`.
//! The resulting order is lexicographic with `J < K`.

use crate::alphabet::{Image, Letter, LetterStream};
use crate::error::{Error, Result};
use crate::framework::BinMaps;

/// Dense word index, `0 <= b < capacity`.
pub type WordIndex = u64;

pub fn encode(maps: &BinMaps, b: WordIndex) -> Result<Image> {
    let mut letters = Vec::with_capacity(maps.length());
    encode_into(maps, b, &mut letters)?;
    Ok(Image::new(letters))
}

fn encode_into(maps: &BinMaps, b: WordIndex, out: &mut Vec<Letter>) -> Result<()> {
    if b >= maps.capacity {
        return Err(Error::IndexOutOfRange {
            index: b,
            limit: maps.capacity,
        });
    }
    let space = &maps.space;
    let mut rest = b;
    let mut state = None;
    for i in 0..maps.length() {
        let j_block = space
            .step(state, Letter::J)
            .map_or(0, |t| maps.completions(i, t));
        let (letter, next) = if rest < j_block {
            (Letter::J, space.step(state, Letter::J))
        } else {
            rest -= j_block;
            (Letter::K, space.step(state, Letter::K))
        };
        let next = next.expect("index within capacity always has a successor");
        debug_assert!(rest < maps.completions(i, next));
        out.push(letter);
        state = Some(next);
    }
    debug_assert_eq!(rest, 0);
    Ok(())
}

pub fn decode(maps: &BinMaps, img: &Image) -> Result<WordIndex> {
    decode_letters(maps, img.letters())
}

fn decode_letters(maps: &BinMaps, letters: &[Letter]) -> Result<WordIndex> {
    if letters.len() != maps.length() {
        return Err(Error::BadLength {
            expected: maps.length(),
            found: letters.len(),
        });
    }
    let space = &maps.space;
    let mut germ = 0;
    let mut state = None;
    for (i, &letter) in letters.iter().enumerate() {
        if letter == Letter::K {
            germ += space
                .step(state, Letter::J)
                .map_or(0, |t| maps.completions(i, t));
        }
        let next = space
            .step(state, letter)
            .ok_or(Error::InvalidImage { word: None })?;
        state = Some(next);
    }
    match state {
        Some(s) if space.is_accepting(s) => Ok(germ),
        _ => Err(Error::InvalidImage { word: None }),
    }
}

pub fn encode_stream(maps: &BinMaps, indices: &[WordIndex]) -> Result<LetterStream> {
    let mut letters = Vec::with_capacity(indices.len() * maps.length());
    for &b in indices {
        encode_into(maps, b, &mut letters)?;
    }
    Ok(LetterStream::new(letters))
}

/// Decodes a word-aligned stream; `phase` letters are skipped first so that
/// decoding starts on a word boundary.
pub fn decode_stream(maps: &BinMaps, stream: &LetterStream, phase: usize) -> Result<Vec<WordIndex>> {
    let l = maps.length();
    let body = stream.letters.get(phase..).unwrap_or(&[]);
    if body.len() % l != 0 {
        return Err(Error::PartialWord {
            len: body.len(),
            word_len: l,
        });
    }
    body.chunks(l)
        .enumerate()
        .map(|(m, w)| {
            decode_letters(maps, w).map_err(|e| match e {
                Error::InvalidImage { .. } => Error::InvalidImage { word: Some(m) },
                e => e,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{build_maps, enumerate_words, CodeSpec};

    #[test]
    fn progenitor_examples() {
        let m = build_maps(&CodeSpec::progenitor(5)).unwrap();
        assert_eq!(encode(&m, 0).unwrap().to_string(), "JJJJJ");
        assert_eq!(encode(&m, 20).unwrap().to_string(), "KJKKJ");
        assert!(matches!(encode(&m, 21), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(decode(&m, &Image::parse("JJJJJ").unwrap()).unwrap(), 0);
        assert_eq!(decode(&m, &Image::parse("KJKKJ").unwrap()).unwrap(), 20);
        assert_eq!(
            decode(&m, &Image::parse("KKKKK").unwrap()),
            Err(Error::InvalidImage { word: None })
        );
        // trailing K-run of 3 ends in a non-accepting state
        assert!(decode(&m, &Image::parse("JJKKK").unwrap()).is_err());
    }

    #[test]
    fn codebook_equals_enumeration() {
        let spec = CodeSpec::progenitor(5);
        let m = build_maps(&spec).unwrap();
        let words = enumerate_words(&spec).unwrap();
        for (b, w) in words.iter().enumerate() {
            assert_eq!(&encode(&m, b as u64).unwrap(), w);
            assert_eq!(decode(&m, w).unwrap(), b as u64);
        }
    }

    #[test]
    fn stream_round_trip_and_errors() {
        let m = build_maps(&CodeSpec::progenitor(5)).unwrap();
        assert!(encode_stream(&m, &[]).unwrap().is_empty());
        let idx = vec![3, 0, 20, 7, 11];
        let s = encode_stream(&m, &idx).unwrap();
        assert_eq!(decode_stream(&m, &s, 0).unwrap(), idx);

        let mut bad = s.clone();
        for l in &mut bad.letters[10..15] {
            *l = Letter::K;
        }
        assert_eq!(
            decode_stream(&m, &bad, 0),
            Err(Error::InvalidImage { word: Some(2) })
        );
        let mut shifted = s.clone();
        shifted.letters.insert(0, Letter::J);
        assert_eq!(decode_stream(&m, &shifted, 1).unwrap(), idx);
        assert!(matches!(
            decode_stream(&m, &shifted, 0),
            Err(Error::PartialWord { .. })
        ));
    }
}
