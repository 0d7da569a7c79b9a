#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use thompson_core::fgroup::{GenWord, Letter, PlData};
use thompson_core::DyadicRational;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn dy(s: &str) -> DyadicRational {
    s.parse().unwrap()
}

/// `f(x)` by linear interpolation through the listed breakpoints, slope 1
/// outside them.
pub fn pl_eval(data: &PlData, x: &BigRational) -> BigRational {
    let b = &data.breaks;
    if b.is_empty() {
        return x + &data.left_shift;
    }
    if x <= &b[0].0 {
        return x + &data.left_shift;
    }
    let last = b.last().unwrap();
    if x >= &last.0 {
        return x + &data.right_shift;
    }
    for w in b.windows(2) {
        let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
        if x >= x0 && x <= x1 {
            return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
        }
    }
    unreachable!()
}

/// The generators written out case by case.
pub fn formula(l: Letter, x: &BigRational) -> BigRational {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let two = q(2, 1);
    match l {
        Letter::A => x - one,
        Letter::AInv => x + one,
        Letter::B => {
            if *x <= zero {
                x.clone()
            } else if *x <= two {
                x / two
            } else {
                x - one
            }
        }
        Letter::BInv => {
            if *x <= zero {
                x.clone()
            } else if *x <= one {
                x * two
            } else {
                x + one
            }
        }
    }
}

/// A word evaluated by applying formulas right to left.
pub fn word_formula(w: &GenWord, x: &BigRational) -> BigRational {
    w.letters()
        .iter()
        .rev()
        .fold(x.clone(), |acc, &l| formula(l, &acc))
}

pub fn dyadic(max_exp: u32, int_bits: u32) -> impl Strategy<Value = DyadicRational> {
    (0..=max_exp).prop_flat_map(move |e| {
        let bound: i64 = 1 << (int_bits + e);
        (-bound..=bound).prop_map(move |m| DyadicRational::new(m, e))
    })
}

pub fn letter() -> impl Strategy<Value = Letter> {
    prop::sample::select(Letter::ALL.to_vec())
}

pub fn word(max_len: usize) -> impl Strategy<Value = GenWord> {
    prop::collection::vec(letter(), 0..=max_len).prop_map(GenWord::new)
}
