//! Constructive high transitivity of F on Γ, and proximality certificates.
//!
//! Given finite windows `x1, x2` over Γ and a target window `W`, the engine
//! picks the value `α` that the product `x1·x2` takes most often, a source
//! set `V` of that many coordinates carrying `α`, and an element `f ∈ F`
//! with `f(V) = W`. Then `f(x1·x2)` is constantly `α` on `W`, so `f x1` and
//! `f x2` agree on `W` up to a global sign. Lifting through `π`, the pair
//! classes of `f y1` and `f y2` in Z agree on `n_range × W`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::LambdaPoint;
use crate::configs::{
    pair_class, pi_map, pointwise_product, shift, ConfigError, GammaConfig, LambdaConfig,
    PairClass, Sign,
};
use crate::fgroup::{validate_membership, GenWord, PlHomeo, CONVENTION};
use crate::numerics::DyadicRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProximalError {
    #[error("empty or reversed interval [{0}, {1}]")]
    BadInterval(DyadicRational, DyadicRational),
    #[error("tuples have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("tuples must be nonempty")]
    EmptyTuple,
    #[error("tuple is not strictly increasing")]
    NotSorted,
    #[error("need {needed} coordinates sharing a product value, at most {achievable} available")]
    Insufficient { needed: usize, achievable: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// One linear piece `[x0, x1] → [y0, y1]` of slope `2^slope_log2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub x0: DyadicRational,
    pub x1: DyadicRational,
    pub y0: DyadicRational,
    pub y1: DyadicRational,
    pub slope_log2: i64,
}

/// Increasing map `[a, b] → [c, d]` with at most two pieces.
///
/// With `t = floor(log2((d-c)/(b-a)))`, a single piece of slope `2^t` is
/// used when the ratio is exactly `2^t`. Otherwise the first piece has
/// slope `2^(t+1)` and length `(d-c)/2^t - (b-a)`, the second slope `2^t`.
pub fn interval_map(
    a: &DyadicRational,
    b: &DyadicRational,
    c: &DyadicRational,
    d: &DyadicRational,
) -> Result<Vec<Segment>, ProximalError> {
    if a >= b {
        return Err(ProximalError::BadInterval(a.clone(), b.clone()));
    }
    if c >= d {
        return Err(ProximalError::BadInterval(c.clone(), d.clone()));
    }
    let src_len = b - a;
    let dst_len = d - c;
    let t = dst_len.floor_log2_ratio(&src_len);
    if src_len.mul_pow2(t) == dst_len {
        return Ok(vec![Segment {
            x0: a.clone(),
            x1: b.clone(),
            y0: c.clone(),
            y1: d.clone(),
            slope_log2: t,
        }]);
    }
    let first_len = &dst_len.mul_pow2(-t) - &src_len;
    let mid_x = a + &first_len;
    let mid_y = c + &first_len.mul_pow2(t + 1);
    Ok(vec![
        Segment {
            x0: a.clone(),
            x1: mid_x.clone(),
            y0: c.clone(),
            y1: mid_y.clone(),
            slope_log2: t + 1,
        },
        Segment {
            x0: mid_x,
            x1: b.clone(),
            y0: mid_y,
            y1: d.clone(),
            slope_log2: t,
        },
    ])
}

fn strictly_increasing(v: &[DyadicRational]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// An element of F sending `v[i]` to `w[i]` for every `i`, equal to the
/// identity outside `[floor(min) - 1, ceil(max) + 1]` of `v ∪ w`.
pub fn map_tuple(v: &[DyadicRational], w: &[DyadicRational]) -> Result<PlHomeo, ProximalError> {
    if v.len() != w.len() {
        return Err(ProximalError::SizeMismatch(v.len(), w.len()));
    }
    if v.is_empty() {
        return Err(ProximalError::EmptyTuple);
    }
    if !strictly_increasing(v) || !strictly_increasing(w) {
        return Err(ProximalError::NotSorted);
    }
    let lo = DyadicRational::from_int(v[0].clone().min(w[0].clone()).floor() - 1);
    let hi =
        DyadicRational::from_int(v[v.len() - 1].clone().max(w[w.len() - 1].clone()).ceil() + 1);
    let mut anchors = Vec::with_capacity(v.len() + 2);
    anchors.push((lo.clone(), lo));
    anchors.extend(v.iter().cloned().zip(w.iter().cloned()));
    anchors.push((hi.clone(), hi));

    let mut points = vec![anchors[0].clone()];
    for pair in anchors.windows(2) {
        let (a, c) = &pair[0];
        let (b, d) = &pair[1];
        for seg in interval_map(a, b, c, d)? {
            points.push((seg.x1, seg.y1));
        }
    }
    Ok(PlHomeo::from_points(points, 0, 0).expect("chained pieces form an element of F"))
}

/// One witness `f` for one target window: `f(x1·x2)` is constantly `alpha`
/// on `target_window`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProximalityCertificate {
    pub convention: String,
    pub witness: PlHomeo,
    pub alpha: Sign,
    pub source_set: Vec<DyadicRational>,
    pub target_window: Vec<DyadicRational>,
    pub checked_product_values: Vec<(DyadicRational, Sign)>,
}

impl ProximalityCertificate {
    /// Re-checks the certificate against the inputs without reusing any of
    /// the construction: membership of the witness, `f(V) = W`, and the
    /// shifted product on `W`.
    pub fn verify(&self, x1: &GammaConfig, x2: &GammaConfig) -> bool {
        if !validate_membership(&self.witness.to_data()) {
            return false;
        }
        if self.source_set.len() != self.target_window.len() {
            return false;
        }
        let mut images: Vec<DyadicRational> = self
            .source_set
            .iter()
            .map(|v| self.witness.apply(v))
            .collect();
        images.sort();
        images.dedup();
        let mut target = self.target_window.clone();
        target.sort();
        target.dedup();
        if images != target {
            return false;
        }
        let product = pointwise_product(x1, x2);
        if !self
            .source_set
            .iter()
            .all(|v| product.get(v) == Some(self.alpha))
        {
            return false;
        }
        let moved = shift(&self.witness, &product);
        let on_window: Vec<(DyadicRational, Sign)> = target
            .iter()
            .filter_map(|g| moved.get(g).map(|s| (g.clone(), s)))
            .collect();
        on_window.len() == target.len()
            && on_window.iter().all(|(_, s)| *s == self.alpha)
            && on_window == self.checked_product_values
    }
}

/// Builds a certificate. `alpha` is the majority value of `x1·x2` (ties go
/// to `+1`) and the source set is the smallest coordinates carrying it.
pub fn proximality_witness(
    x1: &GammaConfig,
    x2: &GammaConfig,
    target_window: &[DyadicRational],
) -> Result<ProximalityCertificate, ProximalError> {
    let mut target = target_window.to_vec();
    target.sort();
    target.dedup();
    let product = pointwise_product(x1, x2);
    let plus = product.count(Sign::Plus);
    let minus = product.count(Sign::Minus);
    let alpha = if minus > plus {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let available = plus.max(minus);
    if available < target.len() {
        return Err(ProximalError::Insufficient {
            needed: target.len(),
            achievable: available,
        });
    }
    let source: Vec<DyadicRational> = product
        .iter()
        .filter(|(_, s)| *s == alpha)
        .map(|(c, _)| c.clone())
        .take(target.len())
        .collect();
    let witness = if target.is_empty() {
        PlHomeo::identity()
    } else {
        map_tuple(&source, &target)?
    };
    let moved = shift(&witness, &product);
    let checked: Vec<(DyadicRational, Sign)> = target
        .iter()
        .map(|g| {
            (
                g.clone(),
                moved.get(g).expect("target is the image of the source set"),
            )
        })
        .collect();
    debug_assert!(checked.iter().all(|(_, s)| *s == alpha));
    Ok(ProximalityCertificate {
        convention: CONVENTION.to_string(),
        witness,
        alpha,
        source_set: source,
        target_window: target,
        checked_product_values: checked,
    })
}

/// Outcome of lifting a certificate to Z.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZProximalityReport {
    pub certificate: ProximalityCertificate,
    pub n_range: (i64, i64),
    /// `[f y1 · f y2](n, γ) = [f(x1·x2)](γ) = α` on the whole lifted window.
    pub identity_holds: bool,
    pub pair_classes_agree: bool,
    pub agreed_class: Option<PairClass>,
}

impl ZProximalityReport {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.pair_classes_agree
    }
}

/// Lifts the Γ-level certificate to `n_range × target_window` in Λ.
///
/// `f π(x)` and `π(f x)` differ by a sign pattern that depends only on `f`,
/// so products of two lifted windows are computed as
/// `π(f x1) · π(f x2)`, whose `(-1)^n` factors square away.
pub fn z_proximality_check(
    x1: &GammaConfig,
    x2: &GammaConfig,
    target_window: &[DyadicRational],
    n_range: RangeInclusive<i64>,
) -> Result<ZProximalityReport, ProximalError> {
    let cert = proximality_witness(x1, x2, target_window)?;
    let f = &cert.witness;
    let y1 = pi_map(&shift(f, x1), n_range.clone())?;
    let y2 = pi_map(&shift(f, x2), n_range.clone())?;
    let moved_product = shift(f, &pointwise_product(x1, x2));
    let lifted: Vec<LambdaPoint> = n_range
        .clone()
        .flat_map(|n| {
            cert.target_window
                .iter()
                .map(move |g| LambdaPoint::new(n, g.clone()))
        })
        .collect();
    let identity_holds =
        lifted.iter().all(
            |p| match (y1.get(p), y2.get(p), moved_product.get(&p.gamma)) {
                (Some(s1), Some(s2), Some(dv)) => s1 * s2 == dv && dv == cert.alpha,
                _ => false,
            },
        );
    let w1: LambdaConfig = y1.restrict(&lifted);
    let w2: LambdaConfig = y2.restrict(&lifted);
    let (pair_classes_agree, agreed_class) = if lifted.is_empty() {
        (true, None)
    } else {
        let c1 = pair_class(&w1)?;
        let c2 = pair_class(&w2)?;
        let same = c1 == c2;
        (same, same.then_some(c1))
    };
    Ok(ZProximalityReport {
        n_range: (*n_range.start(), *n_range.end()),
        certificate: cert,
        identity_holds,
        pair_classes_agree,
        agreed_class,
    })
}

/// Λ-level form of the product identity for a word `w`:
/// `[w π(x1) · w π(x2)](n, γ) = [w(x1·x2)](γ)` wherever both sides are
/// known. Returns the number of coordinates compared, or `None` on a
/// mismatch.
pub fn lambda_product_identity(
    w: &GenWord,
    x1: &GammaConfig,
    x2: &GammaConfig,
    n_range: RangeInclusive<i64>,
) -> Result<Option<usize>, ProximalError> {
    let left = pointwise_product(
        &shift(w, &pi_map(x1, n_range.clone())?),
        &shift(w, &pi_map(x2, n_range)?),
    );
    let right = shift(w, &pointwise_product(x1, x2));
    let mut compared = 0;
    for (p, s) in left.iter() {
        if let Some(t) = right.get(&p.gamma) {
            if s != t {
                return Ok(None);
            }
            compared += 1;
        }
    }
    Ok(Some(compared))
}
