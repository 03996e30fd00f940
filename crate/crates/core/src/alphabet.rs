//! Transport letters, serial images and the 21-word dictionary.
//!
//! A word of the base-21 dictionary is a five-letter image whose first two
//! letters carry a base-3 digit `x` and whose last three letters carry a
//! base-7 digit `y`. Both digits are read most-significant letter first with
//! `J = 1`, `K = 0`. The all-`K` group values are forbidden, leaving
//! `3 × 7 = 21` images.

use std::fmt;

use crate::error::{Error, Result};

/// Letters per base-21 dictionary word.
pub const WORD_LEN: usize = 5;

/// A transport letter: `J` changes the line state, `K` keeps it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    J,
    K,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::J => Letter::K,
            Letter::K => Letter::J,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::J => 'J',
            Letter::K => 'K',
        }
    }

    /// Binary weight used by the dictionary alias: `J = 1`, `K = 0`.
    pub fn bit(self) -> u8 {
        match self {
            Letter::J => 1,
            Letter::K => 0,
        }
    }

    pub fn from_bit(bit: u8) -> Letter {
        if bit & 1 == 1 {
            Letter::J
        } else {
            Letter::K
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A fixed-length word image.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Image(Vec<Letter>);

impl Image {
    pub fn new(letters: Vec<Letter>) -> Self {
        Image(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a compact `J`/`K` string; whitespace is skipped.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Image(parse_stream(text)?.letters))
    }
}

impl fmt::Display for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// The `(x, y)` alias of a dictionary word, `x ∈ 1..=3`, `y ∈ 1..=7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digits21 {
    x: u8,
    y: u8,
}

impl Digits21 {
    pub fn new(x: u8, y: u8) -> Result<Self> {
        if (1..=3).contains(&x) && (1..=7).contains(&y) {
            Ok(Digits21 { x, y })
        } else {
            Err(Error::ForbiddenImage)
        }
    }

    pub fn x(self) -> u8 {
        self.x
    }

    pub fn y(self) -> u8 {
        self.y
    }

    /// All 21 dictionary words, `x` major.
    pub fn all() -> impl Iterator<Item = Digits21> {
        (1..=3u8).flat_map(|x| (1..=7u8).map(move |y| Digits21 { x, y }))
    }
}

impl fmt::Display for Digits21 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}T{}", self.x, self.y)
    }
}

/// A serialized run of letters.
///
/// `origin_phase` is the position of the first letter inside its source
/// word. Only simulators know it; parsed streams leave it empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LetterStream {
    pub letters: Vec<Letter>,
    pub origin_phase: Option<u8>,
}

impl LetterStream {
    pub fn new(letters: Vec<Letter>) -> Self {
        LetterStream {
            letters,
            origin_phase: None,
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Text form, `per_line` letters per line (0 = one line).
    pub fn to_text(&self, per_line: usize) -> String {
        let mut out = String::with_capacity(self.letters.len() + self.letters.len() / 4 + 1);
        for (i, l) in self.letters.iter().enumerate() {
            if per_line > 0 && i > 0 && i % per_line == 0 {
                out.push('\n');
            }
            out.push(l.as_char());
        }
        out.push('\n');
        out
    }
}

impl fmt::Display for LetterStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses the `J`/`K` text format. Whitespace is ignored; any other
/// character is reported by its character position.
pub fn parse_stream(text: &str) -> Result<LetterStream> {
    let mut letters = Vec::with_capacity(text.len());
    for (pos, c) in text.chars().enumerate() {
        match c {
            'J' => letters.push(Letter::J),
            'K' => letters.push(Letter::K),
            c if c.is_whitespace() => {}
            _ => return Err(Error::InvalidCharacter(pos)),
        }
    }
    Ok(LetterStream::new(letters))
}

fn group_value(letters: &[Letter]) -> u8 {
    letters.iter().fold(0, |acc, l| (acc << 1) | l.bit())
}

pub fn image_to_digits(img: &Image) -> Result<Digits21> {
    if img.len() != WORD_LEN {
        return Err(Error::BadLength {
            expected: WORD_LEN,
            found: img.len(),
        });
    }
    let x = group_value(&img.letters()[0..2]);
    let y = group_value(&img.letters()[2..5]);
    Digits21::new(x, y)
}

pub fn digits_to_image(d: Digits21) -> Image {
    let mut letters = Vec::with_capacity(WORD_LEN);
    for shift in (0..2).rev() {
        letters.push(Letter::from_bit(d.x >> shift));
    }
    for shift in (0..3).rev() {
        letters.push(Letter::from_bit(d.y >> shift));
    }
    Image(letters)
}

/// Length of the longest run of `which` in `letters`.
pub fn max_run(letters: &[Letter], which: Letter) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &l in letters {
        if l == which {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Concatenates images into one stream.
pub fn serialize<'a>(images: impl IntoIterator<Item = &'a Image>) -> LetterStream {
    let mut letters = Vec::new();
    for img in images {
        letters.extend_from_slice(img.letters());
    }
    LetterStream::new(letters)
}

/// Splits a stream into images of `word_len` letters; the stream length must
/// be a whole number of words.
pub fn split_words(stream: &LetterStream, word_len: usize) -> Result<Vec<Image>> {
    if word_len == 0 || stream.len() % word_len != 0 {
        return Err(Error::PartialWord {
            len: stream.len(),
            word_len,
        });
    }
    Ok(stream
        .letters
        .chunks(word_len)
        .map(|c| Image(c.to_vec()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(s: &str) -> Image {
        Image::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        use Letter::*;
        assert_eq!(parse_stream("JKKJK").unwrap().letters, vec![J, K, K, J, K]);
        let s = parse_stream("JK KJ\n").unwrap();
        assert_eq!(s.letters, vec![J, K, K, J]);
        assert_eq!(s.origin_phase, None);
        assert_eq!(parse_stream("JXK"), Err(Error::InvalidCharacter(1)));
    }

    #[test]
    fn alias_rows() {
        assert_eq!(image_to_digits(&img("KJKJK")).unwrap(), Digits21::new(1, 2).unwrap());
        assert_eq!(image_to_digits(&img("JJJJJ")).unwrap(), Digits21::new(3, 7).unwrap());
        assert_eq!(image_to_digits(&img("KKJJJ")), Err(Error::ForbiddenImage));
        assert_eq!(image_to_digits(&img("JJKKK")), Err(Error::ForbiddenImage));
        assert!(matches!(
            image_to_digits(&img("JJJJ")),
            Err(Error::BadLength { .. })
        ));

        assert_eq!(digits_to_image(Digits21::new(1, 1).unwrap()), img("KJKKJ"));
        assert_eq!(digits_to_image(Digits21::new(2, 4).unwrap()), img("JKJKK"));
        assert_eq!(digits_to_image(Digits21::new(3, 7).unwrap()), img("JJJJJ"));
    }

    #[test]
    fn bijection_over_dictionary() {
        assert_eq!(Digits21::all().count(), 21);
        for d in Digits21::all() {
            assert_eq!(image_to_digits(&digits_to_image(d)).unwrap(), d);
        }
    }

    #[test]
    fn runs() {
        assert_eq!(max_run(&parse_stream("JKKKJ").unwrap().letters, Letter::K), 3);
        assert_eq!(max_run(&[], Letter::K), 0);
        assert_eq!(max_run(&parse_stream("JJJJJ").unwrap().letters, Letter::J), 5);
    }

    #[test]
    fn dictionary_closure() {
        let words: Vec<Image> = Digits21::all().map(digits_to_image).collect();
        for a in &words {
            assert!(max_run(a.letters(), Letter::K) <= 3);
            for b in &words {
                let s = serialize([a, b]);
                assert!(max_run(&s.letters, Letter::K) <= 3, "{a}{b}");
            }
        }
    }

    #[test]
    fn dictionary_j_density() {
        let ones: usize = Digits21::all()
            .map(digits_to_image)
            .map(|i| i.letters().iter().filter(|&&l| l == Letter::J).count())
            .sum();
        assert_eq!(ones, 64);
        assert!((64.0 / 105.0 - 0.61f64).abs() < 0.005);
    }

    #[test]
    fn split_requires_whole_words() {
        let s = parse_stream("JJJJJKJKKJ").unwrap();
        assert_eq!(split_words(&s, 5).unwrap().len(), 2);
        assert!(split_words(&parse_stream("JJJ").unwrap(), 5).is_err());
    }
}
