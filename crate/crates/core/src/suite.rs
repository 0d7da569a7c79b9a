//! Named property checks over all modules, driven by a seed.
//!
//! Every check is deterministic given the seed and the fixture set. The
//! command-line `verify` command runs these and assembles a report.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::actions::{
    lambda_apply_letter, lambda_apply_word, limit_check, psi, schreier_ball, GammaSpace,
    LambdaPoint, LambdaSpace, DEFAULT_RADIUS_CAP,
};
use crate::configs::{
    bar_flip, check_not_fixed_by_b, pair_class, pi_map, shift, y_consistent, GammaConfig,
    LambdaConfig, Sign,
};
use crate::fgroup::{
    relator_words, resolve_relator_variant, validate_membership, word_eval, GenWord, Letter,
    PlHomeo, RelatorVariant, CONVENTION,
};
use crate::measure::{cylinder_measure, pullback_cylinder, sample_config, Cylinder};
use crate::numerics::DyadicRational;
use crate::proximal::{
    lambda_product_identity, map_tuple, proximality_witness, z_proximality_check, ProximalError,
    ProximalityCertificate,
};

/// Frozen values the checks compare against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixtures {
    pub convention: String,
    pub relator_variant: RelatorVariant,
    pub limit_n_max: u32,
    pub limit_window: u32,
    /// `(radius, N(radius))`.
    pub limit_n: Vec<(u32, u32)>,
    pub proximal_example: ProximalExample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProximalExample {
    pub x1: GammaConfig,
    pub x2: GammaConfig,
    pub target: Vec<DyadicRational>,
    pub certificate: ProximalityCertificate,
}

/// The fixture file shipped with the crate.
pub const DEFAULT_FIXTURES_JSON: &str = include_str!("../fixtures/fixtures.json");

impl Fixtures {
    pub fn builtin() -> Fixtures {
        serde_json::from_str(DEFAULT_FIXTURES_JSON).expect("built-in fixtures parse")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Group,
    Actions,
    Configs,
    Proximal,
    Measure,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Group,
        Suite::Actions,
        Suite::Configs,
        Suite::Proximal,
        Suite::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Group => "group",
            Suite::Actions => "actions",
            Suite::Configs => "configs",
            Suite::Proximal => "proximal",
            Suite::Measure => "measure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Number of cases examined.
    pub count: u64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, count: u64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            count,
            detail: detail.into(),
        }
    }
}

type CheckFn = fn(&mut ChaCha8Rng, &Fixtures) -> CheckOutcome;

/// Names of the checks in a suite, in run order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    checks(suite).iter().map(|(n, _)| *n).collect()
}

fn checks(suite: Suite) -> &'static [(&'static str, CheckFn)] {
    match suite {
        Suite::Group => &[
            ("group.generator_fidelity", check_generator_fidelity),
            ("group.axioms", check_group_axioms),
            ("group.homomorphism", check_homomorphism),
            ("group.closure", check_closure),
            ("group.relators", check_relators),
        ],
        Suite::Actions => &[
            ("actions.letter_inverses", check_letter_inverses),
            ("actions.covering_equivariance", check_covering_equivariance),
            ("actions.well_defined", check_well_defined),
            ("actions.stabilizer_is_k", check_stabilizer),
            ("actions.components", check_components),
            ("actions.limit_fixture", check_limit_fixture),
        ],
        Suite::Configs => &[
            ("configs.shift_is_action", check_shift_action),
            ("configs.pi_equivariance", check_pi_equivariance),
            ("configs.y_invariant", check_y_invariant),
            ("configs.pair_class_mirror", check_pair_class_mirror),
            ("configs.not_fixed_by_b", check_not_fixed),
        ],
        Suite::Proximal => &[
            ("proximal.map_tuple", check_map_tuple),
            ("proximal.certificates", check_certificates),
            ("proximal.z_identity", check_z_identity),
            ("proximal.fixture", check_proximal_fixture),
        ],
        Suite::Measure => &[
            ("measure.invariance", check_measure_invariance),
            ("measure.mirror", check_mirror),
            ("measure.functorial", check_functorial),
            ("measure.sampler", check_sampler),
        ],
    }
}

/// Runs check number `index` of `suite`. Each check gets its own generator
/// derived from `seed` and the check's position, so results do not depend
/// on which other checks run or in what order.
pub fn run_check(suite: Suite, index: usize, seed: u64, fixtures: &Fixtures) -> CheckOutcome {
    let (_, f) = checks(suite)[index];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite as u64) << 8 | index as u64);
    f(&mut rng, fixtures)
}

pub fn run_suite(suite: Suite, seed: u64, fixtures: &Fixtures) -> Vec<CheckOutcome> {
    (0..checks(suite).len())
        .map(|i| run_check(suite, i, seed, fixtures))
        .collect()
}

// ---------------------------------------------------------------------------
// Random inputs

/// A dyadic with exponent at most `max_exp` and magnitude below `2^int_bits`.
pub fn random_dyadic<R: Rng>(rng: &mut R, max_exp: u32, int_bits: u32) -> DyadicRational {
    let e = rng.gen_range(0..=max_exp);
    let bound: i64 = 1 << (int_bits + e).min(62);
    DyadicRational::new(rng.gen_range(-bound..=bound), e)
}

pub fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> GenWord {
    let len = rng.gen_range(0..=max_len);
    GenWord::new((0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect())
}

pub fn random_gamma_config<R: Rng>(rng: &mut R, max_size: usize, max_exp: u32) -> GammaConfig {
    let size = rng.gen_range(1..=max_size);
    let mut x = GammaConfig::new();
    // 0 is special for the b-action and π; include it often.
    if rng.gen_bool(0.5) {
        x.insert(DyadicRational::zero(), Sign::from_bool(rng.gen()));
    }
    while x.len() < size {
        x.insert(random_dyadic(rng, max_exp, 3), Sign::from_bool(rng.gen()));
    }
    x
}

pub fn random_lambda_point<R: Rng>(rng: &mut R) -> LambdaPoint {
    let gamma = if rng.gen_bool(0.25) {
        DyadicRational::zero()
    } else {
        random_dyadic(rng, 8, 3)
    };
    LambdaPoint::new(rng.gen_range(-5..=5), gamma)
}

/// All words of length exactly `len`.
pub fn all_words(len: usize) -> Vec<GenWord> {
    let mut words = vec![GenWord::identity()];
    for _ in 0..len {
        words = words
            .iter()
            .flat_map(|w| {
                Letter::ALL
                    .iter()
                    .map(move |&l| w.concat(&GenWord::from(l)))
            })
            .collect();
    }
    words
}

// ---------------------------------------------------------------------------
// group

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// The generator formulas written directly over the rationals.
pub fn generator_formula(letter: Letter, x: &BigRational) -> BigRational {
    let zero = BigRational::zero();
    let one = BigRational::one();
    match letter {
        Letter::A => x - &one,
        Letter::AInv => x + &one,
        Letter::B if *x <= zero => x.clone(),
        Letter::B if *x <= q(2) => x / q(2),
        Letter::B => x - &one,
        Letter::BInv if *x <= zero => x.clone(),
        Letter::BInv if *x <= one => x * q(2),
        Letter::BInv => x + &one,
    }
}

fn check_generator_fidelity(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let mut failures = 0;
    let n = 10_000;
    for _ in 0..n {
        let x = random_dyadic(rng, 20, 3);
        for l in Letter::ALL {
            if l.apply(&x).to_rational() != generator_formula(l, &x.to_rational()) {
                failures += 1;
            }
        }
    }
    CheckOutcome::new(
        "group.generator_fidelity",
        failures == 0,
        n * 4,
        format!("{failures} mismatches"),
    )
}

fn check_group_axioms(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let id = PlHomeo::identity();
    let mut failures = 0;
    for _ in 0..n {
        let f = random_word(rng, 12).eval();
        let g = random_word(rng, 12).eval();
        let h = random_word(rng, 12).eval();
        let assoc = f.compose(&g).compose(&h) == f.compose(&g.compose(&h));
        let inv = f.compose(&f.inverse()) == id && f.inverse().compose(&f) == id;
        let ident = f.compose(&id) == f && id.compose(&f) == f;
        failures += u64::from(!(assoc && inv && ident));
    }
    CheckOutcome::new(
        "group.axioms",
        failures == 0,
        n,
        format!("{failures} violations"),
    )
}

fn check_homomorphism(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let u = random_word(rng, 12);
        let v = random_word(rng, 12);
        if word_eval(&u.concat(&v)) != word_eval(&u).compose(&word_eval(&v)) {
            failures += 1;
        }
        // pointwise agreement with letter-by-letter application
        let x = random_dyadic(rng, 10, 3);
        if word_eval(&u).apply(&x) != u.apply(&x) {
            failures += 1;
        }
    }
    CheckOutcome::new(
        "group.homomorphism",
        failures == 0,
        n,
        format!("{failures} violations"),
    )
}

fn check_closure(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let f = random_word(rng, 12).eval();
        let g = random_word(rng, 12).eval();
        for h in [f.compose(&g), f.inverse()] {
            failures += u64::from(!validate_membership(&h.to_data()));
        }
    }
    CheckOutcome::new(
        "group.closure",
        failures == 0,
        n * 2,
        format!("{failures} invalid outputs"),
    )
}

fn check_relators(_: &mut ChaCha8Rng, fixtures: &Fixtures) -> CheckOutcome {
    let resolved = resolve_relator_variant();
    let trivial = relator_words(fixtures.relator_variant)
        .iter()
        .all(|w| w.eval().is_identity());
    let passed =
        resolved == Some(fixtures.relator_variant) && trivial && fixtures.convention == CONVENTION;
    CheckOutcome::new(
        "group.relators",
        passed,
        2,
        format!(
            "resolved {resolved:?}, fixture {:?}, convention {:?}",
            fixtures.relator_variant, fixtures.convention
        ),
    )
}

// ---------------------------------------------------------------------------
// actions

fn check_letter_inverses(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 10_000;
    let mut failures = 0;
    for _ in 0..n {
        let p = random_lambda_point(rng);
        for s in Letter::ALL {
            if lambda_apply_letter(s.inverse(), &lambda_apply_letter(s, &p)) != p {
                failures += 1;
            }
        }
    }
    CheckOutcome::new(
        "actions.letter_inverses",
        failures == 0,
        n * 4,
        format!("{failures} failures"),
    )
}

fn check_covering_equivariance(_: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let ball = schreier_ball::<LambdaSpace>(LambdaPoint::black(0), 10, DEFAULT_RADIUS_CAP)
        .expect("radius 10 is under the cap");
    let mut failures = 0;
    let mut count = 0;
    for node in &ball.nodes {
        let p: LambdaPoint = node.name.parse().expect("ball names parse back");
        for s in Letter::ALL {
            count += 1;
            if psi(&lambda_apply_letter(s, &p)) != s.apply(&psi(&p)) {
                failures += 1;
            }
        }
    }
    CheckOutcome::new(
        "actions.covering_equivariance",
        failures == 0,
        count,
        format!("{} nodes, {failures} failures", ball.node_count()),
    )
}

/// A word equal in F to `u`, built by inserting trivial words.
fn equivalent_word<R: Rng>(rng: &mut R, u: &GenWord) -> GenWord {
    let relators = relator_words(RelatorVariant::Standard);
    let mut letters = u.letters().to_vec();
    for _ in 0..rng.gen_range(1..=3) {
        let insert: GenWord = match rng.gen_range(0..3) {
            0 => {
                let l = Letter::ALL[rng.gen_range(0..4)];
                GenWord::new(vec![l, l.inverse()])
            }
            1 => {
                let r = relators.choose(rng).expect("two relators");
                let c = random_word(rng, 3);
                c.concat(r).concat(&c.inverse())
            }
            _ => relators.choose(rng).expect("two relators").inverse(),
        };
        let at = rng.gen_range(0..=letters.len());
        letters.splice(at..at, insert.letters().iter().copied());
    }
    GenWord::new(letters)
}

fn check_well_defined(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 300;
    let mut failures = 0;
    for _ in 0..n {
        let u = random_word(rng, 8);
        let v = equivalent_word(rng, &u);
        if word_eval(&u) != word_eval(&v) {
            failures += 1;
            continue;
        }
        for _ in 0..5 {
            let p = random_lambda_point(rng);
            if lambda_apply_word(&u, &p) != lambda_apply_word(&v, &p) {
                failures += 1;
            }
        }
    }
    CheckOutcome::new(
        "actions.well_defined",
        failures == 0,
        n,
        format!("{failures} failures"),
    )
}

/// Words of length `<= 2 * half_len` fixing `0` in Γ, from pairs of short
/// words with the same image of 0.
pub fn gamma_stabilizer_words<R: Rng>(
    rng: &mut R,
    half_len: usize,
    samples: usize,
) -> Vec<GenWord> {
    let zero = DyadicRational::zero();
    let mut by_image: HashMap<DyadicRational, Vec<GenWord>> = HashMap::new();
    for _ in 0..samples {
        let u = random_word(rng, half_len);
        by_image.entry(u.apply(&zero)).or_default().push(u);
    }
    let mut keys: Vec<&DyadicRational> = by_image.keys().collect();
    keys.sort();
    let mut out = Vec::new();
    for k in keys {
        let group = &by_image[k];
        for pair in group.windows(2) {
            out.push(pair[1].inverse().concat(&pair[0]));
        }
    }
    out
}

fn check_stabilizer(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let origin = LambdaPoint::black(0);
    let mut words: Vec<GenWord> = (0..1_000).map(|_| random_word(rng, 12)).collect();
    words.extend(gamma_stabilizer_words(rng, 6, 2_000));
    let mut mismatches = 0;
    let mut in_k = 0;
    for w in &words {
        let fixes = lambda_apply_word(w, &origin) == origin;
        let k = word_eval(w).in_k();
        in_k += u64::from(k);
        mismatches += u64::from(fixes != k);
    }
    CheckOutcome::new(
        "actions.stabilizer_is_k",
        mismatches == 0 && in_k > 0,
        words.len() as u64,
        format!("{mismatches} mismatches, {in_k} words in K"),
    )
}

fn check_components(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 10_000;
    let mut failures = 0;
    for _ in 0..n {
        let p = random_lambda_point(rng);
        for s in Letter::ALL {
            let q = lambda_apply_letter(s, &p);
            let may_move = s.generator() == crate::fgroup::Generator::B && p.gamma.is_zero();
            let expected_n = if may_move {
                p.n + if s.is_inverse() { -1 } else { 1 }
            } else {
                p.n
            };
            failures += u64::from(q.n != expected_n);
        }
    }
    CheckOutcome::new(
        "actions.components",
        failures == 0,
        n * 4,
        format!("{failures} failures"),
    )
}

fn check_limit_fixture(_: &mut ChaCha8Rng, fixtures: &Fixtures) -> CheckOutcome {
    let mut failures = Vec::new();
    for &(radius, expected) in &fixtures.limit_n {
        let got = limit_check(
            radius,
            fixtures.limit_n_max,
            fixtures.limit_window,
            DEFAULT_RADIUS_CAP,
        );
        if got != Ok(expected) {
            failures.push(format!("r={radius}: got {got:?}, fixture {expected}"));
        }
    }
    CheckOutcome::new(
        "actions.limit_fixture",
        failures.is_empty(),
        fixtures.limit_n.len() as u64,
        if failures.is_empty() {
            "all radii match".to_string()
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------------------
// configs

fn random_lambda_window<R: Rng>(rng: &mut R) -> LambdaConfig {
    pi_map(&random_gamma_config(rng, 8, 6), -2..=2).expect("nonempty range")
}

fn check_shift_action(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let u = random_word(rng, 6);
        let v = random_word(rng, 6);
        let x = random_gamma_config(rng, 8, 6);
        let y = random_lambda_window(rng);
        failures += u64::from(shift(&u.concat(&v), &x) != shift(&u, &shift(&v, &x)));
        failures += u64::from(shift(&u.concat(&v), &y) != shift(&u, &shift(&v, &y)));
    }
    CheckOutcome::new(
        "configs.shift_is_action",
        failures == 0,
        n * 2,
        format!("{failures} failures"),
    )
}

/// Compares `shift(s, π(x))` with `π(shift(s, x'))`, where `x'` is `x` for
/// `a±1` and `bar_flip(x)` for `b±1`, on their common domain. Returns the
/// number of coordinates compared, or `None` on a mismatch.
pub fn pi_equivariance_case(
    s: Letter,
    x: &GammaConfig,
    n_range: std::ops::RangeInclusive<i64>,
) -> Option<usize> {
    let lhs = shift(&s, &pi_map(x, n_range.clone()).expect("nonempty range"));
    let source = match s.generator() {
        crate::fgroup::Generator::A => x.clone(),
        crate::fgroup::Generator::B => bar_flip(x),
    };
    let rhs = pi_map(&shift(&s, &source), n_range).expect("nonempty range");
    let mut compared = 0;
    for (p, v) in lhs.iter() {
        if let Some(w) = rhs.get(p) {
            if v != w {
                return None;
            }
            compared += 1;
        }
    }
    Some(compared)
}

fn check_pi_equivariance(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let x = random_gamma_config(rng, 8, 6);
        for s in Letter::ALL {
            match pi_equivariance_case(s, &x, -2..=2) {
                Some(c) if c > 0 => {}
                _ => failures += 1,
            }
        }
    }
    CheckOutcome::new(
        "configs.pi_equivariance",
        failures == 0,
        n * 4,
        format!("{failures} failures"),
    )
}

fn check_y_invariant(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let y = random_lambda_window(rng);
        let w = random_word(rng, 12);
        failures += u64::from(!y_consistent(&shift(&w, &y)));
    }
    CheckOutcome::new(
        "configs.y_invariant",
        failures == 0,
        n,
        format!("{failures} failures"),
    )
}

fn check_pair_class_mirror(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let y = random_lambda_window(rng);
        let ok = matches!((pair_class(&y), pair_class(&y.negate())), (Ok(a), Ok(b)) if a == b);
        failures += u64::from(!ok);
    }
    CheckOutcome::new(
        "configs.pair_class_mirror",
        failures == 0,
        n,
        format!("{failures} failures"),
    )
}

fn check_not_fixed(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let mirror = LambdaPoint::new(0, -1);
    let origin = LambdaPoint::black(0);
    let below = LambdaPoint::black(-1);
    let mut failures = 0;
    let mut consistent = 0;
    for bits in 0..8u8 {
        let s = |i: u8| Sign::from_bool(bits >> i & 1 == 1);
        let y: LambdaConfig = [
            (mirror.clone(), s(0)),
            (origin.clone(), s(1)),
            (below.clone(), s(2)),
        ]
        .into_iter()
        .collect();
        if y_consistent(&y) {
            consistent += 1;
            failures += u64::from(!check_not_fixed_by_b(&y).is_ok_and(|w| w.holds));
        }
    }
    let n = 1_000;
    for _ in 0..n {
        let mut x = random_gamma_config(rng, 8, 6);
        x.insert(DyadicRational::zero(), Sign::from_bool(rng.gen()));
        x.insert(DyadicRational::from(-1), Sign::from_bool(rng.gen()));
        let y = pi_map(&x, -2..=2).expect("nonempty range");
        failures += u64::from(!check_not_fixed_by_b(&y).is_ok_and(|w| w.holds));
    }
    CheckOutcome::new(
        "configs.not_fixed_by_b",
        failures == 0 && consistent == 4,
        n + 8,
        format!("{consistent} consistent patterns, {failures} failures"),
    )
}

// ---------------------------------------------------------------------------
// proximal

fn random_sorted_set<R: Rng>(rng: &mut R, size: usize, max_exp: u32) -> Vec<DyadicRational> {
    let mut v = Vec::with_capacity(size);
    while v.len() < size {
        let x = random_dyadic(rng, max_exp, 4);
        if !v.contains(&x) {
            v.push(x);
        }
    }
    v.sort();
    v
}

fn check_map_tuple(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let size = rng.gen_range(1..=16);
        let v = random_sorted_set(rng, size, 8);
        let w = random_sorted_set(rng, size, 8);
        let Ok(f) = map_tuple(&v, &w) else {
            failures += 1;
            continue;
        };
        let exact = v.iter().zip(&w).all(|(a, b)| &f.apply(a) == b);
        let member = validate_membership(&f.to_data());
        let probe = random_dyadic(rng, 10, 6);
        let image = f.apply(&probe);
        let round_trip = f.apply_inverse(&image) == probe;
        let lo = DyadicRational::from_int(v[0].clone().min(w[0].clone()).floor() - 1);
        let hi = DyadicRational::from_int(v[size - 1].clone().max(w[size - 1].clone()).ceil() + 1);
        let outside = !(probe <= lo || probe >= hi) || image == probe;
        failures += u64::from(!(exact && member && round_trip && outside));
    }
    CheckOutcome::new(
        "proximal.map_tuple",
        failures == 0,
        n,
        format!("{failures} failures"),
    )
}

fn check_certificates(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 1_000;
    let mut failures = 0;
    let mut certified = 0;
    let mut declined = 0;
    for _ in 0..n {
        let x1 = random_gamma_config(rng, 16, 6);
        let mut x2 = random_gamma_config(rng, 16, 6);
        // share most of the domain so the product is informative
        for (c, _) in x1.iter() {
            if rng.gen_bool(0.8) {
                x2.insert(c.clone(), Sign::from_bool(rng.gen()));
            }
        }
        let size = rng.gen_range(1..=8);
        let target = random_sorted_set(rng, size, 6);
        let product = crate::configs::pointwise_product(&x1, &x2);
        let best = product.count(Sign::Plus).max(product.count(Sign::Minus));
        match proximality_witness(&x1, &x2, &target) {
            Ok(cert) => {
                certified += 1;
                failures += u64::from(best < size || !cert.verify(&x1, &x2));
            }
            Err(ProximalError::Insufficient { achievable, .. }) => {
                declined += 1;
                failures += u64::from(best >= size || achievable != best);
            }
            Err(_) => failures += 1,
        }
    }
    CheckOutcome::new(
        "proximal.certificates",
        failures == 0 && certified > 0,
        n,
        format!("{certified} certified, {declined} below precondition, {failures} failures"),
    )
}

fn check_z_identity(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let n = 300;
    let mut failures = 0;
    let mut checked = 0;
    for _ in 0..n {
        let x1 = random_gamma_config(rng, 16, 6);
        let x2: GammaConfig = x1
            .iter()
            .map(|(c, _)| (c.clone(), Sign::from_bool(rng.gen())))
            .collect();
        let size = rng.gen_range(1..=8).min(x1.len().div_ceil(2));
        let target = random_sorted_set(rng, size, 6);
        match z_proximality_check(&x1, &x2, &target, -2..=2) {
            Ok(report) => {
                checked += 1;
                failures += u64::from(!report.passed());
            }
            Err(ProximalError::Insufficient { .. }) => {}
            Err(_) => failures += 1,
        }
        let w = random_word(rng, 8);
        failures += u64::from(
            lambda_product_identity(&w, &x1, &x2, -2..=2)
                .ok()
                .flatten()
                .is_none(),
        );
    }
    CheckOutcome::new(
        "proximal.z_identity",
        failures == 0 && checked > 0,
        n,
        format!("{checked} lifted certificates, {failures} failures"),
    )
}

fn check_proximal_fixture(_: &mut ChaCha8Rng, fixtures: &Fixtures) -> CheckOutcome {
    let ex = &fixtures.proximal_example;
    let got = proximality_witness(&ex.x1, &ex.x2, &ex.target);
    let passed = matches!(&got, Ok(c) if c == &ex.certificate && c.verify(&ex.x1, &ex.x2));
    CheckOutcome::new(
        "proximal.fixture",
        passed,
        1,
        if passed {
            "certificate matches fixture".to_string()
        } else {
            format!("recomputed {got:?}")
        },
    )
}

// ---------------------------------------------------------------------------
// measure

/// Up to `max_len` constraints drawn from `pool`, occasionally repeating a
/// coordinate (possibly with a conflicting value).
pub fn random_cylinder<C: crate::configs::Coord, R: Rng>(
    rng: &mut R,
    pool: &[C],
    max_len: usize,
) -> Cylinder<C> {
    let len = rng.gen_range(0..=max_len);
    let mut constraints: Vec<(C, Sign)> = Vec::with_capacity(len);
    for _ in 0..len {
        let c = if !constraints.is_empty() && rng.gen_bool(0.1) {
            constraints[rng.gen_range(0..constraints.len())].0.clone()
        } else {
            pool[rng.gen_range(0..pool.len())].clone()
        };
        constraints.push((c, Sign::from_bool(rng.gen())));
    }
    Cylinder::new(constraints)
}

fn ball_points<S: crate::actions::SchreierSpace>(root: S::Point, radius: u32) -> Vec<String> {
    schreier_ball::<S>(root, radius, DEFAULT_RADIUS_CAP)
        .expect("radius under cap")
        .nodes
        .into_iter()
        .map(|n| n.name)
        .collect()
}

fn check_measure_invariance(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let gamma_pool: Vec<DyadicRational> = ball_points::<GammaSpace>(DyadicRational::new(1, 1), 6)
        .iter()
        .map(|s| s.parse().expect("ball names parse"))
        .collect();
    let lambda_pool: Vec<LambdaPoint> = ball_points::<LambdaSpace>(LambdaPoint::black(0), 6)
        .iter()
        .map(|s| s.parse().expect("ball names parse"))
        .collect();
    let words: Vec<GenWord> = (0..=4).flat_map(all_words).collect();
    let cylinders = 1_000;
    let mut failures = 0;
    let mut count = 0u64;
    for _ in 0..cylinders {
        let cg = random_cylinder(rng, &gamma_pool, 10);
        let cl = random_cylinder(rng, &lambda_pool, 10);
        let mg = cylinder_measure(&cg);
        let ml = cylinder_measure(&cl);
        for w in &words {
            count += 2;
            failures += u64::from(cylinder_measure(&pullback_cylinder(w, &cg)) != mg);
            failures += u64::from(cylinder_measure(&pullback_cylinder(w, &cl)) != ml);
        }
        let f = words[rng.gen_range(0..words.len())].eval();
        failures += u64::from(cylinder_measure(&pullback_cylinder(&f, &cg)) != mg);
    }
    CheckOutcome::new(
        "measure.invariance",
        failures == 0,
        count,
        format!(
            "{} words x {cylinders} cylinders per space, {failures} failures",
            words.len()
        ),
    )
}

fn check_mirror(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let pool: Vec<DyadicRational> = (0..64).map(|_| random_dyadic(rng, 6, 3)).collect();
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let c = random_cylinder(rng, &pool, 10);
        failures += u64::from(cylinder_measure(&c.mirrored()) != cylinder_measure(&c));
    }
    CheckOutcome::new(
        "measure.mirror",
        failures == 0,
        n,
        format!("{failures} failures"),
    )
}

fn check_functorial(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let pool: Vec<LambdaPoint> = (0..64).map(|_| random_lambda_point(rng)).collect();
    let n = 1_000;
    let mut failures = 0;
    for _ in 0..n {
        let c = random_cylinder(rng, &pool, 10);
        let u = random_word(rng, 6);
        let v = random_word(rng, 6);
        let lhs = pullback_cylinder(&u.concat(&v), &c);
        let rhs = pullback_cylinder(&v, &pullback_cylinder(&u, &c));
        failures += u64::from(lhs != rhs);
    }
    CheckOutcome::new(
        "measure.functorial",
        failures == 0,
        n,
        format!("{failures} failures"),
    )
}

/// Per-coordinate means over `samples` seeds and the correlation of the
/// first two coordinates, for the Bernoulli sampler.
pub fn sampler_statistics(
    window: &[DyadicRational],
    samples: u64,
    seed_base: u64,
) -> (Vec<f64>, f64) {
    let mut sums = vec![0i64; window.len()];
    let mut cross = 0i64;
    for s in 0..samples {
        let x = sample_config(window.iter().cloned(), seed_base.wrapping_add(s));
        let vals: Vec<i64> = window
            .iter()
            .map(|c| i64::from(x.get(c).expect("sampled").to_i8()))
            .collect();
        for (acc, v) in sums.iter_mut().zip(&vals) {
            *acc += v;
        }
        if vals.len() >= 2 {
            cross += vals[0] * vals[1];
        }
    }
    let n = samples as f64;
    let means: Vec<f64> = sums.iter().map(|&s| s as f64 / n).collect();
    let corr = if window.len() >= 2 {
        // values are ±1, so the variances are 1 - mean²
        let cov = cross as f64 / n - means[0] * means[1];
        cov / ((1.0 - means[0] * means[0]) * (1.0 - means[1] * means[1])).sqrt()
    } else {
        0.0
    };
    (means, corr)
}

fn check_sampler(rng: &mut ChaCha8Rng, _: &Fixtures) -> CheckOutcome {
    let window: Vec<DyadicRational> = vec![
        DyadicRational::zero(),
        DyadicRational::new(1, 1),
        DyadicRational::from(-3),
        DyadicRational::new(5, 4),
    ];
    let base = rng.gen::<u32>() as u64;
    let (means, corr) = sampler_statistics(&window, 100_000, base);
    let passed = means.iter().all(|m| m.abs() <= 0.02) && corr.abs() <= 0.02;
    CheckOutcome::new(
        "measure.sampler",
        passed,
        100_000,
        format!("means {means:?}, correlation {corr:.5}"),
    )
}

/// Recomputes the values stored in [`Fixtures`] from scratch.
pub fn compute_fixtures() -> Fixtures {
    let limit_n_max = 12;
    let limit_window = 4;
    let limit_n = (1..=6)
        .map(|r| {
            let n =
                limit_check(r, limit_n_max, limit_window, DEFAULT_RADIUS_CAP).expect("limit found");
            (r, n)
        })
        .collect();
    let parse = |entries: &[(&str, i64)]| -> GammaConfig {
        entries
            .iter()
            .map(|(c, s)| (c.parse().expect("literal"), Sign::from_i64(*s).expect("±1")))
            .collect()
    };
    let x1 = parse(&[("0", 1), ("1", 1), ("2", -1)]);
    let x2 = parse(&[("0", 1), ("1", -1), ("2", 1)]);
    let target: Vec<DyadicRational> = vec![DyadicRational::zero(), DyadicRational::one()];
    let certificate = proximality_witness(&x1, &x2, &target).expect("example is certifiable");
    Fixtures {
        convention: CONVENTION.to_string(),
        relator_variant: resolve_relator_variant().expect("one relator variant holds"),
        limit_n_max,
        limit_window,
        limit_n,
        proximal_example: ProximalExample {
            x1,
            x2,
            target,
            certificate,
        },
    }
}
