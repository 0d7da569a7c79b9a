//! Elements of Thompson's group F acting on the real line.
//!
//! An element is stored as its breakpoints together with the integer
//! translations it performs on the two unbounded tails. The generators are
//!
//! ```text
//! a(x) = x - 1
//! b(x) = x        for x <= 0
//!        x / 2    for 0 <= x <= 2
//!        x - 1    for x >= 2
//! ```
//!
//! Composition `f.compose(&g)` is `x -> f(g(x))`. Words are evaluated with the
//! leftmost letter applied last, so `"ab"` is `a ∘ b`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::BigRational;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numerics::DyadicRational;

/// Recorded in every serialized fixture.
pub const CONVENTION: &str = "compose=f(g(x));word=left-last";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FGroupError {
    #[error("invalid letter {0:?} in word (expected one of a, A, b, B)")]
    InvalidLetter(char),
    #[error("not an element of F: {0}")]
    NotInF(#[from] MembershipViolation),
}

/// Why a piecewise-linear description fails to be a canonical element of F.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MembershipViolation {
    #[error("breakpoint coordinate {0} is not dyadic")]
    NonDyadicBreakpoint(BigRational),
    #[error("tail translation {0} is not an integer")]
    NonIntegerTail(BigRational),
    #[error("tail translation {0} does not fit in 64 bits")]
    TailOverflow(BigRational),
    #[error("breakpoints are not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("slope on segment {0} is not a power of two")]
    SlopeNotPowerOfTwo(usize),
    #[error("left tail is inconsistent with the first breakpoint")]
    LeftTailMismatch,
    #[error("right tail is inconsistent with the last breakpoint")]
    RightTailMismatch,
    #[error("pure translation with different tails")]
    TranslationTailsDiffer,
    #[error("breakpoint {0} is redundant (slope does not change)")]
    RedundantBreakpoint(usize),
}

/// One of `a, a⁻¹, b, b⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

/// Positive generator, used as an edge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Generator {
    pub fn letter(self) -> Letter {
        match self {
            Generator::A => Letter::A,
            Generator::B => Letter::B,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::A => "a",
            Generator::B => "b",
        }
    }
}

impl Letter {
    /// Breadth-first exploration order.
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn generator(self) -> Generator {
        match self {
            Letter::A | Letter::AInv => Generator::A,
            Letter::B | Letter::BInv => Generator::B,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Letter::AInv | Letter::BInv)
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'A' => Some(Letter::AInv),
            'b' => Some(Letter::B),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }

    /// The generator (or its inverse) as an element of F.
    pub fn homeo(self) -> &'static PlHomeo {
        static GENS: OnceLock<[PlHomeo; 4]> = OnceLock::new();
        let gens = GENS.get_or_init(|| {
            let a = PlHomeo::translation(-1);
            let b = PlHomeo::from_points(
                vec![
                    (DyadicRational::zero(), DyadicRational::zero()),
                    (DyadicRational::from(2), DyadicRational::one()),
                ],
                0,
                -1,
            )
            .expect("b is an element of F");
            [a.clone(), a.inverse(), b.clone(), b.inverse()]
        });
        &gens[self as usize]
    }

    /// Image of a point of the line under this letter.
    pub fn apply(self, x: &DyadicRational) -> DyadicRational {
        self.homeo().apply(x)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A word over `a, A = a⁻¹, b, B = b⁻¹`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GenWord(Vec<Letter>);

impl GenWord {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
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

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &GenWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn pow(&self, k: usize) -> Self {
        Self(self.0.repeat(k))
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &GenWord, y: &GenWord) -> Self {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    /// Cancels adjacent inverse pairs.
    pub fn freely_reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    /// Swaps `a` and `a⁻¹` throughout.
    pub fn with_a_inverted(&self) -> Self {
        Self(
            self.0
                .iter()
                .map(|&l| match l.generator() {
                    Generator::A => l.inverse(),
                    Generator::B => l,
                })
                .collect(),
        )
    }

    pub fn eval(&self) -> PlHomeo {
        word_eval(self)
    }

    /// Applies the word to a point of the line, rightmost letter first.
    pub fn apply(&self, x: &DyadicRational) -> DyadicRational {
        self.0.iter().rev().fold(x.clone(), |acc, l| l.apply(&acc))
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for GenWord {
    type Err = FGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Letter::from_char(c).ok_or(FGroupError::InvalidLetter(c)))
            .collect::<Result<Vec<_>, _>>()
            .map(GenWord)
    }
}

impl From<Letter> for GenWord {
    fn from(l: Letter) -> Self {
        GenWord(vec![l])
    }
}

impl Serialize for GenWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GenWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// An orientation-preserving piecewise-linear homeomorphism of the line
/// with dyadic breakpoints, power-of-two slopes and integer translation
/// tails, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlHomeo {
    breaks: Vec<(DyadicRational, DyadicRational)>,
    // log2 of the slope on [x_i, x_{i+1}]; one shorter than `breaks`.
    slopes: Vec<i64>,
    left_shift: i64,
    right_shift: i64,
}

impl PlHomeo {
    pub fn identity() -> Self {
        Self::translation(0)
    }

    pub fn translation(m: i64) -> Self {
        Self {
            breaks: Vec::new(),
            slopes: Vec::new(),
            left_shift: m,
            right_shift: m,
        }
    }

    pub fn breaks(&self) -> &[(DyadicRational, DyadicRational)] {
        &self.breaks
    }

    /// Translation `m⁻` applied left of the first breakpoint.
    pub fn left_shift(&self) -> i64 {
        self.left_shift
    }

    /// Translation `m⁺` applied right of the last breakpoint.
    pub fn right_shift(&self) -> i64 {
        self.right_shift
    }

    pub fn is_identity(&self) -> bool {
        self.breaks.is_empty() && self.left_shift == 0
    }

    /// Builds an element from points on its graph, dropping any point where
    /// the slope does not change. Tails must agree with the first and last
    /// points; slopes must be powers of two.
    pub fn from_points(
        mut points: Vec<(DyadicRational, DyadicRational)>,
        left_shift: i64,
        right_shift: i64,
    ) -> Result<Self, MembershipViolation> {
        points.sort_by(|p, q| p.0.cmp(&q.0));
        points.dedup();
        for i in 1..points.len() {
            if points[i - 1].0 >= points[i].0 || points[i - 1].1 >= points[i].1 {
                return Err(MembershipViolation::NotIncreasing(i));
            }
        }
        let (Some(first), Some(last)) = (points.first(), points.last()) else {
            if left_shift != right_shift {
                return Err(MembershipViolation::TranslationTailsDiffer);
            }
            return Ok(Self::translation(left_shift));
        };
        if first.1 != &first.0 + &DyadicRational::from(left_shift) {
            return Err(MembershipViolation::LeftTailMismatch);
        }
        if last.1 != &last.0 + &DyadicRational::from(right_shift) {
            return Err(MembershipViolation::RightTailMismatch);
        }
        let mut seg_slopes = Vec::with_capacity(points.len().saturating_sub(1));
        for (i, w) in points.windows(2).enumerate() {
            let k = (&w[1].1 - &w[0].1)
                .ratio_power_of_two(&(&w[1].0 - &w[0].0))
                .ok_or(MembershipViolation::SlopeNotPowerOfTwo(i))?;
            seg_slopes.push(k);
        }
        // Slope 2^0 on both tails.
        let slope_left = |i: usize| if i == 0 { 0 } else { seg_slopes[i - 1] };
        let slope_right = |i: usize| seg_slopes.get(i).copied().unwrap_or(0);
        let keep: Vec<bool> = (0..points.len())
            .map(|i| slope_left(i) != slope_right(i))
            .collect();
        let breaks: Vec<_> = points
            .into_iter()
            .zip(&keep)
            .filter_map(|(p, &k)| k.then_some(p))
            .collect();
        if breaks.is_empty() {
            // Slope 1 everywhere: a translation, and then the tails agree.
            debug_assert_eq!(left_shift, right_shift);
            return Ok(Self::translation(left_shift));
        }
        let slopes = breaks
            .windows(2)
            .map(|w| {
                (&w[1].1 - &w[0].1)
                    .ratio_power_of_two(&(&w[1].0 - &w[0].0))
                    .expect("merged segments keep power-of-two slopes")
            })
            .collect();
        Ok(Self {
            breaks,
            slopes,
            left_shift,
            right_shift,
        })
    }

    /// `f(x)`, exact.
    pub fn apply(&self, x: &DyadicRational) -> DyadicRational {
        let Some((first, last)) = self.breaks.first().zip(self.breaks.last()) else {
            return x + &DyadicRational::from(self.left_shift);
        };
        if x <= &first.0 {
            return x + &DyadicRational::from(self.left_shift);
        }
        if x >= &last.0 {
            return x + &DyadicRational::from(self.right_shift);
        }
        // First breakpoint strictly greater than x; segment is the one before.
        let i = self.breaks.partition_point(|(bx, _)| bx <= x) - 1;
        let (bx, by) = &self.breaks[i];
        by + &(x - bx).mul_pow2(self.slopes[i])
    }

    /// `f⁻¹(y)`, exact.
    pub fn apply_inverse(&self, y: &DyadicRational) -> DyadicRational {
        let Some((first, last)) = self.breaks.first().zip(self.breaks.last()) else {
            return y - &DyadicRational::from(self.left_shift);
        };
        if y <= &first.1 {
            return y - &DyadicRational::from(self.left_shift);
        }
        if y >= &last.1 {
            return y - &DyadicRational::from(self.right_shift);
        }
        let i = self.breaks.partition_point(|(_, by)| by <= y) - 1;
        let (bx, by) = &self.breaks[i];
        bx + &(y - by).mul_pow2(-self.slopes[i])
    }

    /// `self ∘ other`, i.e. `x -> self(other(x))`.
    pub fn compose(&self, other: &PlHomeo) -> PlHomeo {
        let mut xs: Vec<DyadicRational> = other.breaks.iter().map(|(x, _)| x.clone()).collect();
        xs.extend(self.breaks.iter().map(|(x, _)| other.apply_inverse(x)));
        xs.sort();
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.apply(&other.apply(&x));
                (x, y)
            })
            .collect();
        PlHomeo::from_points(
            points,
            self.left_shift + other.left_shift,
            self.right_shift + other.right_shift,
        )
        .expect("F is closed under composition")
    }

    pub fn inverse(&self) -> PlHomeo {
        PlHomeo {
            breaks: self
                .breaks
                .iter()
                .map(|(x, y)| (y.clone(), x.clone()))
                .collect(),
            slopes: self.slopes.iter().map(|k| -k).collect(),
            left_shift: -self.left_shift,
            right_shift: -self.right_shift,
        }
    }

    /// log2 of the slope of the piece immediately to the right of `x`.
    pub fn right_slope_log2(&self, x: &DyadicRational) -> i64 {
        match (self.breaks.first(), self.breaks.last()) {
            (Some(first), Some(last)) if x >= &first.0 && x < &last.0 => {
                let i = self.breaks.partition_point(|(bx, _)| bx <= x) - 1;
                self.slopes[i]
            }
            _ => 0,
        }
    }

    /// Membership in the subgroup K: fixes 0 with right derivative 1 there.
    pub fn in_k(&self) -> bool {
        let zero = DyadicRational::zero();
        self.apply(&zero) == zero && self.right_slope_log2(&zero) == 0
    }

    pub fn to_data(&self) -> PlData {
        PlData {
            breaks: self
                .breaks
                .iter()
                .map(|(x, y)| (x.to_rational(), y.to_rational()))
                .collect(),
            left_shift: BigRational::from_integer(self.left_shift.into()),
            right_shift: BigRational::from_integer(self.right_shift.into()),
        }
    }
}

impl fmt::Debug for PlHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlHomeo {{ m-: {}, breaks: [", self.left_shift)?;
        for (i, (x, y)) in self.breaks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x} -> {y})")?;
        }
        write!(f, "], m+: {} }}", self.right_shift)
    }
}

/// `f ∘ g`.
pub fn pl_compose(f: &PlHomeo, g: &PlHomeo) -> PlHomeo {
    f.compose(g)
}

/// Evaluates a word, leftmost letter applied last.
pub fn word_eval(w: &GenWord) -> PlHomeo {
    w.letters()
        .iter()
        .fold(PlHomeo::identity(), |acc, l| acc.compose(l.homeo()))
}

/// Unvalidated piecewise-linear data over the rationals. This is the input
/// side of [`validate_membership`]; nothing here is assumed dyadic.
#[derive(Debug, Clone, PartialEq)]
pub struct PlData {
    pub breaks: Vec<(BigRational, BigRational)>,
    pub left_shift: BigRational,
    pub right_shift: BigRational,
}

fn tail_to_i64(t: &BigRational) -> Result<i64, MembershipViolation> {
    if !t.is_integer() {
        return Err(MembershipViolation::NonIntegerTail(t.clone()));
    }
    i64::try_from(t.to_integer()).map_err(|_| MembershipViolation::TailOverflow(t.clone()))
}

impl TryFrom<&PlData> for PlHomeo {
    type Error = MembershipViolation;

    /// Strict: rejects redundant breakpoints as well as every other
    /// violation.
    fn try_from(data: &PlData) -> Result<Self, Self::Error> {
        let to_dy = |r: &BigRational| {
            DyadicRational::from_rational(r)
                .ok_or_else(|| MembershipViolation::NonDyadicBreakpoint(r.clone()))
        };
        let points = data
            .breaks
            .iter()
            .map(|(x, y)| Ok((to_dy(x)?, to_dy(y)?)))
            .collect::<Result<Vec<_>, MembershipViolation>>()?;
        let left = tail_to_i64(&data.left_shift)?;
        let right = tail_to_i64(&data.right_shift)?;
        for i in 1..points.len() {
            if points[i - 1].0 >= points[i].0 || points[i - 1].1 >= points[i].1 {
                return Err(MembershipViolation::NotIncreasing(i));
            }
        }
        let n = points.len();
        let f = PlHomeo::from_points(points.clone(), left, right)?;
        if f.breaks.len() != n {
            let i = points
                .iter()
                .position(|p| !f.breaks.contains(p))
                .unwrap_or(0);
            return Err(MembershipViolation::RedundantBreakpoint(i));
        }
        Ok(f)
    }
}

/// True iff `data` describes a canonical element of F: dyadic breakpoints,
/// strictly increasing, power-of-two slopes, integer tails consistent with
/// the end breakpoints, and no redundant breakpoints.
pub fn validate_membership(data: &PlData) -> bool {
    PlHomeo::try_from(data).is_ok()
}

#[derive(Serialize, Deserialize)]
struct PlHomeoJson {
    breaks: Vec<(DyadicRational, DyadicRational)>,
    mminus: i64,
    mplus: i64,
}

impl Serialize for PlHomeo {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PlHomeoJson {
            breaks: self.breaks.clone(),
            mminus: self.left_shift,
            mplus: self.right_shift,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PlHomeo {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PlHomeoJson::deserialize(deserializer)?;
        let data = PlData {
            breaks: raw
                .breaks
                .iter()
                .map(|(x, y)| (x.to_rational(), y.to_rational()))
                .collect(),
            left_shift: BigRational::from_integer(raw.mminus.into()),
            right_shift: BigRational::from_integer(raw.mplus.into()),
        };
        PlHomeo::try_from(&data).map_err(serde::de::Error::custom)
    }
}

/// Which form of the two defining relators holds under [`CONVENTION`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelatorVariant {
    /// `[ab⁻¹, a⁻¹ba]` and `[ab⁻¹, a⁻²ba²]`.
    Standard,
    /// The same words with `a` replaced by `a⁻¹`.
    AInverted,
}

/// The two relator words for a variant, commutators written `xyx⁻¹y⁻¹`.
pub fn relator_words(variant: RelatorVariant) -> [GenWord; 2] {
    let a = GenWord::from(Letter::A);
    let b = GenWord::from(Letter::B);
    let ab_inv = a.concat(&b.inverse());
    let conj1 = a.inverse().concat(&b).concat(&a);
    let conj2 = a.inverse().pow(2).concat(&b).concat(&a.pow(2));
    let words = [
        GenWord::commutator(&ab_inv, &conj1),
        GenWord::commutator(&ab_inv, &conj2),
    ];
    match variant {
        RelatorVariant::Standard => words,
        RelatorVariant::AInverted => words.map(|w| w.with_a_inverted()),
    }
}

/// Evaluates the relators by exact composition; the first variant whose
/// relators are both trivial wins.
pub fn resolve_relator_variant() -> Option<RelatorVariant> {
    [RelatorVariant::Standard, RelatorVariant::AInverted]
        .into_iter()
        .find(|&v| relator_words(v).iter().all(|w| word_eval(w).is_identity()))
}

/// `n / d` as a big rational, for building [`PlData`] by hand.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
