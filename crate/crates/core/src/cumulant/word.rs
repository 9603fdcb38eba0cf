use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::EngineError;
use crate::bpoly::BElem;

/// One letter of an ε-word: `One` stands for `T`, `Star` for `T*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Star,
    One,
}

impl Letter {
    pub fn flipped(self) -> Letter {
        match self {
            Letter::Star => Letter::One,
            Letter::One => Letter::Star,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::Star => '*',
            Letter::One => '1',
        }
    }
}

/// Finite sequence `ε(1), …, ε(n)` over `{*, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct EpsWord(Vec<Letter>);

impl EpsWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        EpsWord(letters)
    }

    pub fn empty() -> Self {
        EpsWord(Vec::new())
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

    /// As many `*`'s as `1`'s.
    pub fn is_balanced(&self) -> bool {
        let ones = self.0.iter().filter(|&&l| l == Letter::One).count();
        2 * ones == self.0.len()
    }

    /// Every letter exchanged `* ↔ 1`.
    pub fn flipped(&self) -> EpsWord {
        EpsWord(self.0.iter().map(|l| l.flipped()).collect())
    }

    /// All `2^len` words of the given length, in lexicographic order with
    /// `*` before `1`.
    pub fn all_of_length(len: usize) -> Vec<EpsWord> {
        (0..1u64 << len)
            .map(|mask| {
                EpsWord(
                    (0..len)
                        .map(|i| {
                            if mask >> (len - 1 - i) & 1 == 1 {
                                Letter::One
                            } else {
                                Letter::Star
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Balanced words of every even length up to `max_len`, shortest first.
    pub fn balanced_up_to(max_len: usize) -> Vec<EpsWord> {
        (0..=max_len)
            .step_by(2)
            .flat_map(|len| Self::all_of_length(len).into_iter().filter(EpsWord::is_balanced))
            .collect()
    }
}

impl fmt::Display for EpsWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for EpsWord {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|ch| match ch {
                '*' => Ok(Letter::Star),
                '1' => Ok(Letter::One),
                other => Err(EngineError::BadLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EpsWord)
    }
}

impl Serialize for EpsWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EpsWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A word together with its coefficients `b₁, …, bₙ`, one after each letter:
/// `T^{ε(1)} b₁ T^{ε(2)} b₂ ⋯ T^{ε(n)} bₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CoeffWord {
    word: EpsWord,
    coeffs: Vec<BElem>,
}

impl CoeffWord {
    pub fn new(word: EpsWord, coeffs: Vec<BElem>) -> Result<Self, EngineError> {
        if word.len() != coeffs.len() {
            return Err(EngineError::LengthMismatch {
                word: word.len(),
                coeffs: coeffs.len(),
            });
        }
        Ok(CoeffWord { word, coeffs })
    }

    /// All coefficients equal to the unit of `B`.
    pub fn units(word: EpsWord) -> Self {
        let coeffs = vec![BElem::one(); word.len()];
        CoeffWord { word, coeffs }
    }

    pub fn word(&self) -> &EpsWord {
        &self.word
    }

    pub fn coeffs(&self) -> &[BElem] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}
