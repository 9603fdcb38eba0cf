//! Exact `B`-valued moments of the quasinilpotent DT-operator.
//!
//! `T` is `B`-valued circular over `B = C([0,1])`: its only nonvanishing
//! cumulants are `b ↦ E(T b T*)` and `b ↦ E(T* b T)`, realized exactly by
//! [`BElem::alpha12`] and [`BElem::alpha21`]. Moments are computed by the
//! first-letter recursion of the moment-cumulant formula: the first letter is
//! paired with every later letter of opposite type that closes a balanced
//! prefix, and the inner and outer remainders are evaluated recursively.
//!
//! [`pairing_oracle`] evaluates the same scalar moments by a separate route
//! (explicit enumeration of noncrossing pairings) and shares no code with the
//! recursion.

mod oracle;
mod word;

use std::collections::HashMap;

use num_traits::Signed;
use thiserror::Error;

pub use oracle::pairing_oracle;
pub use word::{CoeffWord, EpsWord, Letter};

use crate::bpoly::{BElem, BpolyError, Rational};

/// Default grid for sup-norm estimates of coefficient polynomials.
pub const DEFAULT_SUP_GRID: usize = 257;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid letter {0:?} in word (expected '*' or '1')")]
    BadLetter(char),
    #[error("word has {word} letters but {coeffs} coefficients")]
    LengthMismatch { word: usize, coeffs: usize },
    #[error("word length {len} exceeds the cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error(transparent)]
    Bpoly(#[from] BpolyError),
}

/// Moment evaluator with a configurable word-length cap.
#[derive(Clone, Copy, Debug)]
pub struct MomentEngine {
    max_len: usize,
}

impl Default for MomentEngine {
    fn default() -> Self {
        MomentEngine {
            max_len: Self::DEFAULT_MAX_LEN,
        }
    }
}

impl MomentEngine {
    pub const DEFAULT_MAX_LEN: usize = 16;

    pub fn with_max_len(max_len: usize) -> Self {
        MomentEngine { max_len }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn check_len(&self, len: usize) -> Result<(), EngineError> {
        if len > self.max_len {
            Err(EngineError::WordTooLong { len, cap: self.max_len })
        } else {
            Ok(())
        }
    }

    /// `E(T^{ε(1)} b₁ ⋯ T^{ε(n)} bₙ)` as an exact polynomial.
    pub fn moment(&self, cw: &CoeffWord) -> Result<BElem, EngineError> {
        self.check_len(cw.len())?;
        if !cw.word().is_balanced() {
            return Ok(BElem::zero());
        }
        let mut ctx = RecursionContext::new(cw);
        Ok(ctx.range(0, cw.len()))
    }

    /// `τ(E(⋯)) = ∫₀¹ E(⋯)`.
    pub fn scalar_moment(&self, cw: &CoeffWord) -> Result<Rational, EngineError> {
        Ok(self.moment(cw)?.trace())
    }

    /// The unit-coefficient moment is `≥ 0` at every grid point.
    pub fn check_positivity(&self, word: &EpsWord, grid_size: usize) -> Result<bool, EngineError> {
        let m = self.moment(&CoeffWord::units(word.clone()))?;
        Ok(m.eval_grid(grid_size)?.iter().all(|v| !v.is_negative()))
    }

    /// `|E(T^{ε(1)} b₁ ⋯)| ≤ (∏ ‖bⱼ‖) E(T^{ε(1)} ⋯)` pointwise on the grid, with
    /// `‖bⱼ‖` estimated by the grid maximum of `|bⱼ|`.
    pub fn check_coeff_bound(&self, cw: &CoeffWord, grid_size: usize) -> Result<bool, EngineError> {
        let lhs = self.moment(cw)?.eval_grid(grid_size)?;
        let plain = self
            .moment(&CoeffWord::units(cw.word().clone()))?
            .eval_grid(grid_size)?;
        let mut norm_product = Rational::from_integer(1.into());
        for b in cw.coeffs() {
            norm_product *= b.grid_sup_abs(grid_size)?;
        }
        Ok(lhs.iter().zip(&plain).all(|(l, p)| l.abs() <= &norm_product * p))
    }
}

/// Per-evaluation memo over index ranges `[start, end)` of one coefficient
/// word; never shared between evaluations.
struct RecursionContext<'a> {
    cw: &'a CoeffWord,
    /// `height[i]` = (#1 − #*) over letters `0..i`.
    height: Vec<i64>,
    memo: HashMap<(usize, usize), BElem>,
}

impl<'a> RecursionContext<'a> {
    fn new(cw: &'a CoeffWord) -> Self {
        let mut height = Vec::with_capacity(cw.len() + 1);
        height.push(0);
        for l in cw.word().letters() {
            let step = if *l == Letter::One { 1 } else { -1 };
            height.push(height.last().unwrap() + step);
        }
        RecursionContext {
            cw,
            height,
            memo: HashMap::new(),
        }
    }

    fn balanced(&self, start: usize, end: usize) -> bool {
        self.height[start] == self.height[end]
    }

    fn range(&mut self, start: usize, end: usize) -> BElem {
        if start == end {
            return BElem::one();
        }
        if (end - start) % 2 == 1 || !self.balanced(start, end) {
            return BElem::zero();
        }
        if let Some(hit) = self.memo.get(&(start, end)) {
            return hit.clone();
        }
        let letters = self.cw.word().letters();
        let coeffs = self.cw.coeffs();
        let first = letters[start];
        let mut total = BElem::zero();
        for close in (start + 1..end).step_by(2) {
            if letters[close] == first || !self.balanced(start, close + 1) {
                continue;
            }
            let inner = self.range(start + 1, close);
            let argument = &coeffs[start] * &inner;
            if argument.is_zero() {
                continue;
            }
            let paired = match first {
                Letter::One => argument.alpha12(),
                Letter::Star => argument.alpha21(),
            };
            let tail = self.range(close + 1, end);
            let term = &(&paired * &coeffs[close]) * &tail;
            total = &total + &term;
        }
        self.memo.insert((start, end), total.clone());
        total
    }
}

/// [`MomentEngine::moment`] with the default cap.
pub fn moment(cw: &CoeffWord) -> Result<BElem, EngineError> {
    MomentEngine::default().moment(cw)
}

/// [`MomentEngine::scalar_moment`] with the default cap.
pub fn scalar_moment(cw: &CoeffWord) -> Result<Rational, EngineError> {
    MomentEngine::default().scalar_moment(cw)
}

pub fn is_balanced(word: &EpsWord) -> bool {
    word.is_balanced()
}

pub fn check_positivity(word: &EpsWord, grid_size: usize) -> Result<bool, EngineError> {
    MomentEngine::default().check_positivity(word, grid_size)
}

pub fn check_coeff_bound(cw: &CoeffWord, grid_size: usize) -> Result<bool, EngineError> {
    MomentEngine::default().check_coeff_bound(cw, grid_size)
}

/// Unit-coefficient moment of a word given as a `*`/`1` string.
pub fn word_moment(word: &str) -> Result<BElem, EngineError> {
    moment(&CoeffWord::units(word.parse()?))
}

/// Scalar moment of a word given as a `*`/`1` string; zero is returned as
/// an exact rational like every other value.
pub fn word_trace(word: &str) -> Result<Rational, EngineError> {
    Ok(word_moment(word)?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpoly::rat;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn w(s: &str) -> EpsWord {
        s.parse().unwrap()
    }

    #[test]
    fn balanced_examples() {
        assert!(w("*1").is_balanced());
        assert!(!w("**1").is_balanced());
        assert!(w("").is_balanced());
        assert_eq!(EpsWord::balanced_up_to(8).len(), 1 + 2 + 6 + 20 + 70);
    }

    #[test]
    fn parse_rejects_other_letters() {
        assert_eq!("*x".parse::<EpsWord>(), Err(EngineError::BadLetter('x')));
        assert_eq!(w("*1*1").to_string(), "*1*1");
    }

    #[test]
    fn moment_examples() {
        assert_eq!(word_moment("*1").unwrap(), BElem::x());
        assert_eq!(word_moment("1*").unwrap(), BElem::from_ratios(&[(1, 1), (-1, 1)]));
        assert_eq!(
            word_moment("**11").unwrap(),
            BElem::from_ratios(&[(0, 1), (0, 1), (1, 2)])
        );
        assert_eq!(word_moment("11").unwrap(), BElem::zero());
        assert_eq!(word_moment("").unwrap(), BElem::one());
    }

    #[test]
    fn scalar_moment_examples() {
        assert_eq!(word_trace("*1").unwrap(), rat(1, 2));
        assert_eq!(word_trace("**11").unwrap(), rat(1, 6));
        assert_eq!(word_trace("*1*1").unwrap(), rat(2, 3));
    }

    #[test]
    fn coefficients_enter_at_their_positions() {
        let cw = CoeffWord::new(w("*1"), vec![BElem::x(), BElem::one()]).unwrap();
        assert_eq!(moment(&cw).unwrap(), BElem::from_ratios(&[(0, 1), (0, 1), (1, 2)]));
        // The trailing coefficient multiplies pointwise.
        let cw = CoeffWord::new(w("*1"), vec![BElem::one(), BElem::x()]).unwrap();
        assert_eq!(moment(&cw).unwrap(), BElem::from_ratios(&[(0, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(matches!(
            CoeffWord::new(w("*1"), vec![BElem::one()]),
            Err(EngineError::LengthMismatch { word: 2, coeffs: 1 })
        ));
    }

    #[test]
    fn cap_is_enforced_and_overridable() {
        let long = EpsWord::new([Letter::Star, Letter::One].repeat(9));
        assert!(matches!(
            moment(&CoeffWord::units(long.clone())),
            Err(EngineError::WordTooLong { len: 18, cap: 16 })
        ));
        let big = MomentEngine::with_max_len(18);
        assert_eq!(
            big.scalar_moment(&CoeffWord::units(long.clone())).unwrap(),
            pairing_oracle(&long)
        );
    }

    #[test]
    fn positivity_examples() {
        assert!(check_positivity(&w("*1"), 101).unwrap());
        assert!(check_positivity(&w("11"), 101).unwrap());
        for word in EpsWord::balanced_up_to(8) {
            assert!(check_positivity(&word, 101).unwrap(), "{word}");
        }
    }

    #[test]
    fn coeff_bound_examples() {
        let unit = CoeffWord::units(w("*1"));
        assert!(check_coeff_bound(&unit, DEFAULT_SUP_GRID).unwrap());
        let cw = CoeffWord::new(w("*1"), vec![BElem::x(), BElem::one()]).unwrap();
        assert!(check_coeff_bound(&cw, DEFAULT_SUP_GRID).unwrap());
    }

    #[test]
    fn engine_matches_oracle_up_to_length_ten() {
        for word in EpsWord::balanced_up_to(10) {
            assert_eq!(
                scalar_moment(&CoeffWord::units(word.clone())).unwrap(),
                pairing_oracle(&word),
                "{word}"
            );
        }
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = EpsWord> {
        prop::collection::vec(prop::bool::ANY, 0..=max_len).prop_map(|bits| {
            EpsWord::new(
                bits.into_iter()
                    .map(|b| if b { Letter::One } else { Letter::Star })
                    .collect(),
            )
        })
    }

    fn arb_coeff_word(max_len: usize) -> impl Strategy<Value = CoeffWord> {
        arb_word(max_len).prop_flat_map(|word| {
            let n = word.len();
            prop::collection::vec(
                prop::collection::vec((-9i64..=9, 1i64..=7), 0..=4).prop_map(|c| BElem::from_ratios(&c)),
                n,
            )
            .prop_map(move |coeffs| CoeffWord::new(word.clone(), coeffs).unwrap())
        })
    }

    proptest! {
        #[test]
        fn unbalanced_words_vanish(word in arb_word(9)) {
            if !word.is_balanced() {
                prop_assert!(moment(&CoeffWord::units(word.clone())).unwrap().is_zero());
                prop_assert!(pairing_oracle(&word).is_zero());
            }
        }

        #[test]
        fn flip_symmetry(word in arb_word(10)) {
            let m = moment(&CoeffWord::units(word.clone())).unwrap();
            let flipped = moment(&CoeffWord::units(word.flipped())).unwrap();
            prop_assert_eq!(flipped, m.reflect());
        }

        #[test]
        fn coeff_bound_holds(cw in arb_coeff_word(6)) {
            prop_assert!(check_coeff_bound(&cw, DEFAULT_SUP_GRID).unwrap());
        }
    }
}
