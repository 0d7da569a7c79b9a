//! Finite windows of `±1` configurations over Γ and Λ.
//!
//! A [`PartialConfig`] is the restriction of a configuration to finitely
//! many coordinates. Group elements act by `[g x](c) = x(g⁻¹ c)`, which on a
//! window means moving every known coordinate forward: the result is known
//! exactly on `g · domain`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::ops::{Mul, Neg, RangeInclusive};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::actions::{lambda_apply_word, LambdaPoint};
use crate::fgroup::{GenWord, Letter, PlHomeo};
use crate::numerics::DyadicRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("piecewise-linear maps act on Γ only; use a word for Λ")]
    PlOnLambda,
    #[error("configurations live over different spaces")]
    SpaceMismatch,
    #[error("coordinate {0} appears more than once")]
    DuplicateCoordinate(String),
    #[error("empty n-range")]
    EmptyRange,
    #[error("empty window has no pair class")]
    EmptyWindow,
    #[error("window is not the restriction of a point of Y")]
    NotInY,
    #[error("window is missing required coordinates: {0:?}")]
    MissingCoordinates(Vec<String>),
}

/// A value `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// `(-1)^n`.
    pub fn parity(n: i64) -> Sign {
        if n.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn from_bool(plus: bool) -> Sign {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.to_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("value {v} is not ±1")))
    }
}

/// Index set of a configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Gamma,
    Lambda,
}

/// A coordinate type: a point of Γ or of Λ.
pub trait Coord: Clone + Ord + Hash + fmt::Debug + fmt::Display + Serialize {
    const SPACE: Space;

    fn into_any(config: PartialConfig<Self>) -> AnyConfig;

    fn from_any(config: AnyConfig) -> Option<PartialConfig<Self>>;
}

impl Coord for DyadicRational {
    const SPACE: Space = Space::Gamma;

    fn into_any(config: PartialConfig<Self>) -> AnyConfig {
        AnyConfig::Gamma(config)
    }

    fn from_any(config: AnyConfig) -> Option<PartialConfig<Self>> {
        match config {
            AnyConfig::Gamma(c) => Some(c),
            AnyConfig::Lambda(_) => None,
        }
    }
}

impl Coord for LambdaPoint {
    const SPACE: Space = Space::Lambda;

    fn into_any(config: PartialConfig<Self>) -> AnyConfig {
        AnyConfig::Lambda(config)
    }

    fn from_any(config: AnyConfig) -> Option<PartialConfig<Self>> {
        match config {
            AnyConfig::Lambda(c) => Some(c),
            AnyConfig::Gamma(_) => None,
        }
    }
}

/// Something that acts on coordinates of type `C`.
pub trait Acts<C> {
    fn act(&self, c: &C) -> C;
    fn act_inverse(&self, c: &C) -> C;
}

impl Acts<DyadicRational> for PlHomeo {
    fn act(&self, c: &DyadicRational) -> DyadicRational {
        self.apply(c)
    }

    fn act_inverse(&self, c: &DyadicRational) -> DyadicRational {
        self.apply_inverse(c)
    }
}

impl Acts<DyadicRational> for GenWord {
    fn act(&self, c: &DyadicRational) -> DyadicRational {
        self.apply(c)
    }

    fn act_inverse(&self, c: &DyadicRational) -> DyadicRational {
        self.inverse().apply(c)
    }
}

impl Acts<LambdaPoint> for GenWord {
    fn act(&self, c: &LambdaPoint) -> LambdaPoint {
        lambda_apply_word(self, c)
    }

    fn act_inverse(&self, c: &LambdaPoint) -> LambdaPoint {
        lambda_apply_word(&self.inverse(), c)
    }
}

impl<C> Acts<C> for Letter
where
    GenWord: Acts<C>,
{
    fn act(&self, c: &C) -> C {
        GenWord::from(*self).act(c)
    }

    fn act_inverse(&self, c: &C) -> C {
        GenWord::from(self.inverse()).act(c)
    }
}

/// A group element as accepted at run time: words act on both spaces,
/// piecewise-linear maps only on Γ.
#[derive(Debug, Clone)]
pub enum Element {
    Word(GenWord),
    Pl(PlHomeo),
}

/// Finitely many coordinates with values in `±1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialConfig<C: Coord> {
    entries: BTreeMap<C, Sign>,
}

pub type GammaConfig = PartialConfig<DyadicRational>;
pub type LambdaConfig = PartialConfig<LambdaPoint>;

impl<C: Coord> Default for PartialConfig<C> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<C: Coord> PartialConfig<C> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rejects repeated coordinates.
    pub fn from_entries(entries: impl IntoIterator<Item = (C, Sign)>) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (c, s) in entries {
            if map.contains_key(&c) {
                return Err(ConfigError::DuplicateCoordinate(c.to_string()));
            }
            map.insert(c, s);
        }
        Ok(Self { entries: map })
    }

    /// The constant window `c_α` restricted to `domain`.
    pub fn constant(domain: impl IntoIterator<Item = C>, value: Sign) -> Self {
        Self {
            entries: domain.into_iter().map(|c| (c, value)).collect(),
        }
    }

    pub fn space(&self) -> Space {
        C::SPACE
    }

    pub fn get(&self, c: &C) -> Option<Sign> {
        self.entries.get(c).copied()
    }

    pub fn insert(&mut self, c: C, s: Sign) -> Option<Sign> {
        self.entries.insert(c, s)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&C, Sign)> {
        self.entries.iter().map(|(c, &s)| (c, s))
    }

    pub fn domain(&self) -> impl Iterator<Item = &C> {
        self.entries.keys()
    }

    pub fn negate(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|(c, &s)| (c.clone(), -s)).collect(),
        }
    }

    pub fn restrict<'a>(&self, domain: impl IntoIterator<Item = &'a C>) -> Self
    where
        C: 'a,
    {
        Self {
            entries: domain
                .into_iter()
                .filter_map(|c| self.get(c).map(|s| (c.clone(), s)))
                .collect(),
        }
    }

    /// True if every known value equals `value` (vacuously on an empty
    /// window).
    pub fn is_constant(&self, value: Sign) -> bool {
        self.entries.values().all(|&s| s == value)
    }

    pub fn count(&self, value: Sign) -> usize {
        self.entries.values().filter(|&&s| s == value).count()
    }

    /// Agreement on the common domain.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.iter()
            .all(|(c, s)| other.get(c).is_none_or(|t| t == s))
    }
}

impl<C: Coord> FromIterator<(C, Sign)> for PartialConfig<C> {
    /// Later entries win on repeated coordinates.
    fn from_iter<I: IntoIterator<Item = (C, Sign)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// `[g x](g·c) = x(c)` on every known coordinate `c`.
pub fn shift<C: Coord, G: Acts<C> + ?Sized>(g: &G, x: &PartialConfig<C>) -> PartialConfig<C> {
    x.iter().map(|(c, s)| (g.act(c), s)).collect()
}

/// Pointwise product on the common domain.
pub fn pointwise_product<C: Coord>(
    x1: &PartialConfig<C>,
    x2: &PartialConfig<C>,
) -> PartialConfig<C> {
    x1.iter()
        .filter_map(|(c, s)| x2.get(c).map(|t| (c.clone(), s * t)))
        .collect()
}

/// `π(x)(n, γ) = (-1)^n x(γ)` on `n_range × domain(x)`.
pub fn pi_map(x: &GammaConfig, n_range: RangeInclusive<i64>) -> Result<LambdaConfig, ConfigError> {
    if n_range.is_empty() {
        return Err(ConfigError::EmptyRange);
    }
    Ok(n_range
        .flat_map(|n| {
            x.iter()
                .map(move |(g, s)| (LambdaPoint::new(n, g.clone()), Sign::parity(n) * s))
        })
        .collect())
}

/// Whether the window extends to a point of `Y = π({±1}^Γ)`: values over a
/// common `γ` must alternate with the parity of `n`.
pub fn y_consistent(y: &LambdaConfig) -> bool {
    let mut seen: HashMap<&DyadicRational, Sign> = HashMap::new();
    y.iter().all(|(p, s)| {
        let normalized = Sign::parity(p.n) * s;
        *seen.entry(&p.gamma).or_insert(normalized) == normalized
    })
}

/// Negates the value at 0, if known.
pub fn bar_flip(x: &GammaConfig) -> GammaConfig {
    let mut out = x.clone();
    let zero = DyadicRational::zero();
    if let Some(s) = x.get(&zero) {
        out.insert(zero, -s);
    }
    out
}

/// The Γ-window whose π-image is `y`, when `y` is Y-consistent.
pub fn pi_preimage(y: &LambdaConfig) -> Result<GammaConfig, ConfigError> {
    if !y_consistent(y) {
        return Err(ConfigError::NotInY);
    }
    Ok(y.iter()
        .map(|(p, s)| (p.gamma.clone(), Sign::parity(p.n) * s))
        .collect())
}

/// A point `{y, -y}` of Z, stored as the member whose value at the least
/// coordinate (lexicographic in `(n, γ)`) is `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PairClass {
    representative: LambdaConfig,
}

impl PairClass {
    pub fn representative(&self) -> &LambdaConfig {
        &self.representative
    }
}

pub fn pair_class(y: &LambdaConfig) -> Result<PairClass, ConfigError> {
    let Some((_, first)) = y.iter().next() else {
        return Err(ConfigError::EmptyWindow);
    };
    if !y_consistent(y) {
        return Err(ConfigError::NotInY);
    }
    let representative = match first {
        Sign::Plus => y.clone(),
        Sign::Minus => y.negate(),
    };
    Ok(PairClass { representative })
}

/// Evidence that `b` moves the pair class of a window: `by ≠ -y` is seen at
/// `(0,-1)` and `by ≠ y` at `(0,0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotFixedWitness {
    pub mirror_coord: LambdaPoint,
    pub by_at_mirror: Sign,
    pub y_at_mirror: Sign,
    pub identity_coord: LambdaPoint,
    pub by_at_identity: Sign,
    pub y_at_identity: Sign,
    /// `[by](0,-1) = y(0,-1)` and `[by](0,0) = y(-1,0)`.
    pub closed_forms_match: bool,
    pub holds: bool,
}

pub fn check_not_fixed_by_b(y: &LambdaConfig) -> Result<NotFixedWitness, ConfigError> {
    let mirror = LambdaPoint::new(0, -1);
    let origin = LambdaPoint::black(0);
    let below = LambdaPoint::black(-1);
    let missing: Vec<String> = [&mirror, &origin, &below]
        .into_iter()
        .filter(|c| y.get(c).is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::MissingCoordinates(missing));
    }
    if !y_consistent(y) {
        return Err(ConfigError::NotInY);
    }
    let by = shift(&Letter::B, y);
    let known = |cfg: &LambdaConfig, c: &LambdaPoint| cfg.get(c).expect("coordinate checked above");
    let by_at_mirror = known(&by, &mirror);
    let y_at_mirror = known(y, &mirror);
    let by_at_identity = known(&by, &origin);
    let y_at_identity = known(y, &origin);
    let closed_forms_match = by_at_mirror == y_at_mirror && by_at_identity == known(y, &below);
    let holds =
        closed_forms_match && by_at_mirror != -y_at_mirror && by_at_identity != y_at_identity;
    Ok(NotFixedWitness {
        mirror_coord: mirror,
        by_at_mirror,
        y_at_mirror,
        identity_coord: origin,
        by_at_identity,
        y_at_identity,
        closed_forms_match,
        holds,
    })
}

/// A window over either space, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyConfig {
    Gamma(GammaConfig),
    Lambda(LambdaConfig),
}

impl AnyConfig {
    pub fn space(&self) -> Space {
        match self {
            AnyConfig::Gamma(_) => Space::Gamma,
            AnyConfig::Lambda(_) => Space::Lambda,
        }
    }

    pub fn shift(&self, g: &Element) -> Result<AnyConfig, ConfigError> {
        match (g, self) {
            (Element::Word(w), AnyConfig::Gamma(x)) => Ok(AnyConfig::Gamma(shift(w, x))),
            (Element::Word(w), AnyConfig::Lambda(y)) => Ok(AnyConfig::Lambda(shift(w, y))),
            (Element::Pl(f), AnyConfig::Gamma(x)) => Ok(AnyConfig::Gamma(shift(f, x))),
            (Element::Pl(_), AnyConfig::Lambda(_)) => Err(ConfigError::PlOnLambda),
        }
    }

    pub fn product(&self, other: &AnyConfig) -> Result<AnyConfig, ConfigError> {
        match (self, other) {
            (AnyConfig::Gamma(x), AnyConfig::Gamma(y)) => {
                Ok(AnyConfig::Gamma(pointwise_product(x, y)))
            }
            (AnyConfig::Lambda(x), AnyConfig::Lambda(y)) => {
                Ok(AnyConfig::Lambda(pointwise_product(x, y)))
            }
            _ => Err(ConfigError::SpaceMismatch),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
enum ConfigJson {
    Gamma {
        entries: Vec<(DyadicRational, Sign)>,
    },
    Lambda {
        entries: Vec<(LambdaPoint, Sign)>,
    },
}

impl Serialize for AnyConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            AnyConfig::Gamma(x) => ConfigJson::Gamma {
                entries: x.iter().map(|(c, s)| (c.clone(), s)).collect(),
            },
            AnyConfig::Lambda(y) => ConfigJson::Lambda {
                entries: y.iter().map(|(c, s)| (c.clone(), s)).collect(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AnyConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match ConfigJson::deserialize(deserializer)? {
            ConfigJson::Gamma { entries } => PartialConfig::from_entries(entries)
                .map(AnyConfig::Gamma)
                .map_err(D::Error::custom),
            ConfigJson::Lambda { entries } => PartialConfig::from_entries(entries)
                .map(AnyConfig::Lambda)
                .map_err(D::Error::custom),
        }
    }
}

impl<C: Coord> Serialize for PartialConfig<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        C::into_any(self.clone()).serialize(serializer)
    }
}

impl<'de, C: Coord> Deserialize<'de> for PartialConfig<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let any = AnyConfig::deserialize(deserializer)?;
        let found = any.space();
        C::from_any(any).ok_or_else(|| {
            serde::de::Error::custom(format!("expected a {:?} window, found {found:?}", C::SPACE))
        })
    }
}

/// All coordinates of a window, sorted.
pub fn sorted_domain<C: Coord>(x: &PartialConfig<C>) -> BTreeSet<C> {
    x.domain().cloned().collect()
}
