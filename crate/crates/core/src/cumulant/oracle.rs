//! Scalar moments by brute-force enumeration of noncrossing pairings.
//!
//! Every perfect matching of the letter positions that pairs opposite letters
//! is generated, matchings with crossing pairs are discarded, and each survivor is
//! evaluated as a nested iterated integral following its block structure.
//! The polynomial arithmetic here is deliberately local so that this route
//! stays independent of [`crate::bpoly`] and of the moment recursion.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::word::{EpsWord, Letter};
use crate::bpoly::Rational;

/// Dense polynomial, ascending coefficients, not necessarily trimmed.
#[derive(Clone, Debug)]
struct Poly(Vec<Rational>);

impl Poly {
    fn one() -> Self {
        Poly(vec![Rational::one()])
    }

    fn times(&self, other: &Poly) -> Poly {
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// `x ↦ ∫₀ˣ p`.
    fn integral_from_zero(&self) -> Poly {
        let mut out = vec![Rational::zero()];
        out.extend(self.0.iter().enumerate().map(|(k, c)| c / BigInt::from(k as u64 + 1)));
        Poly(out)
    }

    fn value_at_one(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// `x ↦ ∫ₓ¹ p`.
    fn integral_to_one(&self) -> Poly {
        let mut anti = self.integral_from_zero();
        let total = anti.value_at_one();
        for c in anti.0.iter_mut() {
            *c = -c.clone();
        }
        anti.0[0] += total;
        anti
    }
}

/// Calls `visit` on every perfect matching of `free` whose pairs all satisfy
/// `allow`.
fn for_each_matching<A, V>(free: &[usize], allow: &A, current: &mut Vec<(usize, usize)>, visit: &mut V)
where
    A: Fn(usize, usize) -> bool,
    V: FnMut(&[(usize, usize)]),
{
    let Some((&first, rest)) = free.split_first() else {
        visit(current);
        return;
    };
    for (idx, &partner) in rest.iter().enumerate() {
        if !allow(first, partner) {
            continue;
        }
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != idx)
            .map(|(_, &v)| v)
            .collect();
        current.push((first, partner));
        for_each_matching(&remaining, allow, current, visit);
        current.pop();
    }
}

fn crosses(a: (usize, usize), b: (usize, usize)) -> bool {
    let (a0, a1) = (a.0.min(a.1), a.0.max(a.1));
    let (b0, b1) = (b.0.min(b.1), b.0.max(b.1));
    (a0 < b0 && b0 < a1 && a1 < b1) || (b0 < a0 && a0 < b1 && b1 < a1)
}

fn noncrossing(pairs: &[(usize, usize)]) -> bool {
    pairs
        .iter()
        .enumerate()
        .all(|(k, &p)| pairs[k + 1..].iter().all(|&q| !crosses(p, q)))
}

/// Value of the pairing as a function of `x`: each block applies the kernel
/// of its opening letter to the product of the blocks nested directly in it.
fn pairing_value(letters: &[Letter], pairs: &[(usize, usize)]) -> Poly {
    let mut blocks: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    blocks.sort();
    let parent = |child: (usize, usize)| -> Option<usize> {
        blocks
            .iter()
            .enumerate()
            .filter(|&(_, &(o, c))| o < child.0 && child.1 < c)
            .max_by_key(|&(_, &(o, _))| o)
            .map(|(k, _)| k)
    };
    let parents: Vec<Option<usize>> = blocks.iter().map(|&b| parent(b)).collect();

    fn eval(k: usize, letters: &[Letter], blocks: &[(usize, usize)], parents: &[Option<usize>]) -> Poly {
        let inner = (0..blocks.len())
            .filter(|&m| parents[m] == Some(k))
            .fold(Poly::one(), |acc, m| acc.times(&eval(m, letters, blocks, parents)));
        match letters[blocks[k].0] {
            Letter::One => inner.integral_to_one(),
            Letter::Star => inner.integral_from_zero(),
        }
    }

    (0..blocks.len())
        .filter(|&k| parents[k].is_none())
        .fold(Poly::one(), |acc, k| acc.times(&eval(k, letters, &blocks, &parents)))
}

/// `τ(T^{ε(1)} ⋯ T^{ε(n)})` summed over noncrossing `*`–`1` pairings.
pub fn pairing_oracle(word: &EpsWord) -> Rational {
    let letters = word.letters();
    if letters.len() % 2 == 1 {
        return Rational::zero();
    }
    let positions: Vec<usize> = (0..letters.len()).collect();
    let opposite = |i: usize, j: usize| letters[i] != letters[j];
    let mut total = Rational::zero();
    for_each_matching(&positions, &opposite, &mut Vec::new(), &mut |pairs| {
        if noncrossing(pairs) {
            total += pairing_value(letters, pairs).integral_from_zero().value_at_one();
        }
    });
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpoly::rat;

    fn oracle(s: &str) -> Rational {
        pairing_oracle(&s.parse().unwrap())
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle("*1"), rat(1, 2));
        assert_eq!(oracle("*1*1"), rat(2, 3));
        assert_eq!(oracle("11**"), rat(1, 6));
        assert_eq!(oracle(""), rat(1, 1));
        assert_eq!(oracle("11"), rat(0, 1));
        assert_eq!(oracle("*"), rat(0, 1));
    }

    #[test]
    fn counts_noncrossing_pairings() {
        // 1*1*1* admits the Catalan-many noncrossing pairings of an
        // alternating word: all five noncrossing perfect matchings of six
        // points pair opposite letters.
        let word: EpsWord = "1*1*1*".parse().unwrap();
        let positions: Vec<usize> = (0..6).collect();
        let mut all = 0;
        for_each_matching(&positions, &|_, _| true, &mut Vec::new(), &mut |_| all += 1);
        assert_eq!(all, 15);
        let mut kept = 0;
        let letters = word.letters();
        let opposite = |i: usize, j: usize| letters[i] != letters[j];
        for_each_matching(&positions, &opposite, &mut Vec::new(), &mut |p| {
            if noncrossing(p) {
                kept += 1
            }
        });
        assert_eq!(kept, 5);
    }
}
