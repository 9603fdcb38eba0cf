//! Matrix evaluation of ε-words `T^{ε(1)} b₁ ⋯ T^{ε(n)} bₙ`.

use num_complex::Complex64;

use super::linalg::{identity, matmul, normalized_trace, trace_of_product, CMatrix};
use crate::cumulant::{EpsWord, Letter};

/// `T^{ε(1)} b₁ T^{ε(2)} b₂ ⋯`, with `T^*` the adjoint. Coefficients are
/// optional; when given there must be one per letter.
pub fn word_product(t: &CMatrix, word: &EpsWord, coeffs: Option<&[CMatrix]>) -> CMatrix {
    let adjoint = t.adjoint();
    let mut out = identity(t.nrows());
    for (k, letter) in word.letters().iter().enumerate() {
        let factor = match letter {
            Letter::One => t,
            Letter::Star => &adjoint,
        };
        out = matmul(&out, factor);
        if let Some(bs) = coeffs {
            out = matmul(&out, &bs[k]);
        }
    }
    out
}

/// `τ_N(T^{ε(1)} ⋯ T^{ε(n)})`.
pub fn word_trace(t: &CMatrix, word: &EpsWord) -> Complex64 {
    normalized_trace(&word_product(t, word, None))
}

/// `τ_N` of every word of length `1..=max_len` in `z` and `z*`, ordered by
/// length and then lexicographically with `*` before `1`. Products are
/// shared between words with a common prefix, and the last letter enters
/// through a trace of a product.
pub fn all_word_traces(z: &CMatrix, max_len: usize) -> Vec<(EpsWord, Complex64)> {
    let adjoint = z.adjoint();
    let factor = |l: Letter| if l == Letter::One { z } else { &adjoint };
    let mut out = Vec::new();
    let mut prefixes: Vec<(Vec<Letter>, CMatrix)> = vec![(Vec::new(), identity(z.nrows()))];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for (letters, product) in &prefixes {
            for l in [Letter::Star, Letter::One] {
                let mut word = letters.clone();
                word.push(l);
                let value = trace_of_product(product, factor(l));
                if len < max_len {
                    next.push((word.clone(), matmul(product, factor(l))));
                }
                out.push((EpsWord::new(word), value));
            }
        }
        prefixes = next;
    }
    out
}
