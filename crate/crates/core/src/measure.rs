//! The i.i.d. Bernoulli(1/2) measure on `{±1}^Γ` (and on `{±1}^Λ`) and
//! its exact invariance on cylinder sets.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::configs::{Acts, AnyConfig, ConfigError, Coord, Element, PartialConfig, Sign};
use crate::numerics::DyadicRational;

/// The event "value `s` at coordinate `c`" for every listed constraint.
/// Repeated coordinates are allowed; conflicting ones make the event empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder<C: Coord> {
    constraints: Vec<(C, Sign)>,
}

impl<C: Coord> Cylinder<C> {
    pub fn new(constraints: Vec<(C, Sign)>) -> Self {
        Self { constraints }
    }

    pub fn constraints(&self) -> &[(C, Sign)] {
        &self.constraints
    }

    /// Collapsed constraints, or `None` for the empty event.
    pub fn normalized(&self) -> Option<BTreeMap<C, Sign>> {
        let mut map = BTreeMap::new();
        for (c, s) in &self.constraints {
            if let Some(prev) = map.insert(c.clone(), *s) {
                if prev != *s {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Flips every value; the Bernoulli(1/2) measure is invariant under it.
    pub fn mirrored(&self) -> Self {
        Self {
            constraints: self
                .constraints
                .iter()
                .map(|(c, s)| (c.clone(), -*s))
                .collect(),
        }
    }

    pub fn contains(&self, x: &PartialConfig<C>) -> Option<bool> {
        let mut all = true;
        for (c, s) in &self.constraints {
            match x.get(c) {
                Some(v) if v == *s => {}
                Some(_) => return Some(false),
                None => all = false,
            }
        }
        all.then_some(true)
    }
}

impl<C: Coord> From<&PartialConfig<C>> for Cylinder<C> {
    fn from(x: &PartialConfig<C>) -> Self {
        Self::new(x.iter().map(|(c, s)| (c.clone(), s)).collect())
    }
}

/// `2^-k` for `k` distinct consistent constraints, 0 if contradictory.
pub fn cylinder_measure<C: Coord>(cyl: &Cylinder<C>) -> DyadicRational {
    match cyl.normalized() {
        Some(map) => DyadicRational::pow2(-(map.len() as i64)),
        None => DyadicRational::zero(),
    }
}

/// The event `{x : g x ∈ C}`: each constraint moves to `g⁻¹ c`.
pub fn pullback_cylinder<C: Coord, G: Acts<C> + ?Sized>(g: &G, cyl: &Cylinder<C>) -> Cylinder<C> {
    Cylinder::new(
        cyl.constraints
            .iter()
            .map(|(c, s)| (g.act_inverse(c), *s))
            .collect(),
    )
}

/// A cylinder over either space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyCylinder {
    Gamma(Cylinder<DyadicRational>),
    Lambda(Cylinder<crate::actions::LambdaPoint>),
}

impl AnyCylinder {
    pub fn measure(&self) -> DyadicRational {
        match self {
            AnyCylinder::Gamma(c) => cylinder_measure(c),
            AnyCylinder::Lambda(c) => cylinder_measure(c),
        }
    }

    pub fn pullback(&self, g: &Element) -> Result<AnyCylinder, ConfigError> {
        match (g, self) {
            (Element::Word(w), AnyCylinder::Gamma(c)) => {
                Ok(AnyCylinder::Gamma(pullback_cylinder(w, c)))
            }
            (Element::Word(w), AnyCylinder::Lambda(c)) => {
                Ok(AnyCylinder::Lambda(pullback_cylinder(w, c)))
            }
            (Element::Pl(f), AnyCylinder::Gamma(c)) => {
                Ok(AnyCylinder::Gamma(pullback_cylinder(f, c)))
            }
            (Element::Pl(_), AnyCylinder::Lambda(_)) => Err(ConfigError::PlOnLambda),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
enum CylinderJson {
    Gamma {
        entries: Vec<(DyadicRational, Sign)>,
    },
    Lambda {
        entries: Vec<(crate::actions::LambdaPoint, Sign)>,
    },
}

impl Serialize for AnyCylinder {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AnyCylinder::Gamma(c) => CylinderJson::Gamma {
                entries: c.constraints.clone(),
            },
            AnyCylinder::Lambda(c) => CylinderJson::Lambda {
                entries: c.constraints.clone(),
            },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AnyCylinder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match CylinderJson::deserialize(deserializer)? {
            CylinderJson::Gamma { entries } => AnyCylinder::Gamma(Cylinder::new(entries)),
            CylinderJson::Lambda { entries } => AnyCylinder::Lambda(Cylinder::new(entries)),
        })
    }
}

impl From<AnyConfig> for AnyCylinder {
    fn from(x: AnyConfig) -> Self {
        match x {
            AnyConfig::Gamma(x) => AnyCylinder::Gamma(Cylinder::from(&x)),
            AnyConfig::Lambda(y) => AnyCylinder::Lambda(Cylinder::from(&y)),
        }
    }
}

/// Fair `±1` values on `window`.
///
/// The generator is ChaCha8 seeded with `seed_from_u64(seed)`; coordinates
/// are visited in increasing order and each takes one `gen::<bool>()`
/// (`true` is `+1`).
pub fn sample_config<C: Coord>(window: impl IntoIterator<Item = C>, seed: u64) -> PartialConfig<C> {
    let mut coords: Vec<C> = window.into_iter().collect();
    coords.sort();
    coords.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    coords
        .into_iter()
        .map(|c| (c, Sign::from_bool(rng.gen::<bool>())))
        .collect()
}
