//! Acceptance criteria 1–8. Runs without the libtest harness so that the
//! PASS/FAIL line of every criterion is always printed; exits nonzero if
//! any criterion fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thompson_core::actions::{
    lambda_apply_letter, lambda_apply_word, limit_check, psi, schreier_ball, LambdaPoint,
    LambdaSpace, DEFAULT_RADIUS_CAP,
};
use thompson_core::configs::{
    bar_flip, check_not_fixed_by_b, pi_map, pointwise_product, shift, y_consistent, GammaConfig,
    LambdaConfig, Sign,
};
use thompson_core::fgroup::{
    relator_words, resolve_relator_variant, validate_membership, word_eval, GenWord, Generator,
    Letter, PlHomeo, RelatorVariant, CONVENTION,
};
use thompson_core::measure::{cylinder_measure, pullback_cylinder, sample_config, Cylinder};
use thompson_core::proximal::{proximality_witness, z_proximality_check, ProximalError};
use thompson_core::suite::Fixtures;
use thompson_core::DyadicRational;

use common::{formula, pl_eval, word_formula};

fn report(
    id: u32,
    name: &str,
    failures: usize,
    detail: String,
    elapsed: Duration,
    limit: Duration,
) -> bool {
    let ok = failures == 0 && elapsed <= limit;
    println!(
        "criterion {id} {name}: {} ({detail}; {failures} failures; {:.2}s of {:.0}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    ok
}

fn rng(id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + id)
}

fn random_dyadic(rng: &mut ChaCha8Rng, max_exp: u32, int_bits: u32) -> DyadicRational {
    let e = rng.gen_range(0..=max_exp);
    let bound = 1i64 << (int_bits + e);
    DyadicRational::new(rng.gen_range(-bound..=bound), e)
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> GenWord {
    let len = rng.gen_range(0..=max_len);
    GenWord::new((0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect())
}

fn random_window(rng: &mut ChaCha8Rng, max_size: usize, max_exp: u32) -> GammaConfig {
    let size = rng.gen_range(1..=max_size);
    let mut x = GammaConfig::new();
    if rng.gen_bool(0.5) {
        x.insert(DyadicRational::zero(), Sign::from_bool(rng.gen()));
    }
    while x.len() < size {
        x.insert(random_dyadic(rng, max_exp, 3), Sign::from_bool(rng.gen()));
    }
    x
}

fn criterion_1_generator_fidelity() -> bool {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut failures = 0;
    for _ in 0..10_000 {
        let x = random_dyadic(&mut rng, 20, 3);
        let r = x.to_rational();
        for l in [Letter::A, Letter::B] {
            failures += usize::from(l.apply(&x).to_rational() != formula(l, &r));
            failures += usize::from(pl_eval(&l.homeo().to_data(), &r) != formula(l, &r));
        }
    }
    report(
        1,
        "generator fidelity",
        failures,
        "10^4 dyadics, exponent <= 20, a and b".into(),
        start.elapsed(),
        Duration::from_secs(1),
    )
}

fn criterion_2_group_laws_and_relators() -> bool {
    let start = Instant::now();
    let mut rng = rng(2);
    let id = PlHomeo::identity();
    let mut failures = 0;
    for _ in 0..1_000 {
        let (u, v, w) = (
            random_word(&mut rng, 12),
            random_word(&mut rng, 12),
            random_word(&mut rng, 12),
        );
        let (f, g, h) = (u.eval(), v.eval(), w.eval());
        failures += usize::from(f.compose(&g).compose(&h) != f.compose(&g.compose(&h)));
        failures += usize::from(f.compose(&f.inverse()) != id || f.inverse().compose(&f) != id);
        failures += usize::from(f.compose(&id) != f || id.compose(&f) != f);
        failures += usize::from(!validate_membership(&f.compose(&g).to_data()));
        // the evaluated word agrees with the letter formulas
        let x = random_dyadic(&mut rng, 10, 3);
        failures += usize::from(
            pl_eval(&f.to_data(), &x.to_rational()) != word_formula(&u, &x.to_rational()),
        );
    }
    let fixtures = Fixtures::builtin();
    failures += usize::from(fixtures.convention != CONVENTION);
    failures += usize::from(fixtures.relator_variant != RelatorVariant::Standard);
    failures += usize::from(resolve_relator_variant() != Some(fixtures.relator_variant));
    for r in relator_words(fixtures.relator_variant) {
        failures += usize::from(!word_eval(&r).is_identity());
        for x in [-3i64, 0, 1, 5] {
            let x = BigRational::from_integer(x.into()) / BigRational::from_integer(3.into());
            failures += usize::from(word_formula(&r, &x) != x);
        }
    }
    report(
        2,
        "group laws + relators",
        failures,
        "10^3 word triples, length <= 12; both relators trivial".into(),
        start.elapsed(),
        Duration::from_secs(5),
    )
}

fn criterion_3_limit() -> bool {
    let start = Instant::now();
    let fixtures = Fixtures::builtin();
    let mut failures = 0;
    let mut found = Vec::new();
    for r in 1..=6u32 {
        match limit_check(r, 12, 4, DEFAULT_RADIUS_CAP) {
            Ok(n) => {
                found.push(format!("N({r})={n}"));
                failures += usize::from(n > 12);
                if let Some(&(_, frozen)) = fixtures.limit_n.iter().find(|(fr, _)| *fr == r) {
                    failures += usize::from(frozen != n);
                }
            }
            Err(e) => {
                found.push(format!("N({r}) missing: {e}"));
                failures += 1;
            }
        }
    }
    failures += usize::from(limit_check(1, 12, 4, DEFAULT_RADIUS_CAP) != Ok(1));
    report(
        3,
        "Schreier limit",
        failures,
        found.join(" "),
        start.elapsed(),
        Duration::from_secs(30),
    )
}

fn criterion_4_covering_equivariance() -> bool {
    let start = Instant::now();
    let ball = schreier_ball::<LambdaSpace>(LambdaPoint::black(0), 10, DEFAULT_RADIUS_CAP).unwrap();
    let mut failures = 0;
    for node in &ball.nodes {
        let p: LambdaPoint = node.name.parse().unwrap();
        for s in Letter::ALL {
            failures += usize::from(
                psi(&lambda_apply_letter(s, &p)).to_rational()
                    != formula(s, &psi(&p).to_rational()),
            );
        }
    }
    report(
        4,
        "covering equivariance",
        failures,
        format!("{} nodes x 4 letters", ball.node_count()),
        start.elapsed(),
        Duration::from_secs(10),
    )
}

fn criterion_5_stabilizer_is_k() -> bool {
    let start = Instant::now();
    let mut rng = rng(5);
    let origin = LambdaPoint::black(0);
    let mut words: Vec<GenWord> = (0..1_000).map(|_| random_word(&mut rng, 12)).collect();
    // plus words fixing 0 in Γ, where only the level can tell K apart
    let mut by_image: HashMap<DyadicRational, GenWord> = HashMap::new();
    for _ in 0..3_000 {
        let u = random_word(&mut rng, 6);
        match by_image.get(&u.apply(&DyadicRational::zero())) {
            Some(v) => words.push(v.inverse().concat(&u)),
            None => {
                by_image.insert(u.apply(&DyadicRational::zero()), u);
            }
        }
    }
    let mut failures = 0;
    let mut in_k = 0;
    for w in &words {
        let fixes = lambda_apply_word(w, &origin) == origin;
        // K: fixes 0 with right derivative 1 there
        let data = word_eval(w).to_data();
        let zero = BigRational::from_integer(0.into());
        let eps = BigRational::new(1.into(), num_bigint::BigInt::from(1) << 40);
        let oracle = pl_eval(&data, &zero) == zero && pl_eval(&data, &eps) == eps;
        failures += usize::from(fixes != word_eval(w).in_k() || fixes != oracle);
        in_k += usize::from(fixes);
    }
    report(
        5,
        "stabilizer = K",
        failures,
        format!("{} words, {in_k} in K", words.len()),
        start.elapsed(),
        Duration::from_secs(5),
    )
}

fn criterion_6_pi_intertwining_and_b_moves_z() -> bool {
    let start = Instant::now();
    let mut rng = rng(6);
    let mut failures = 0;
    for _ in 0..1_000 {
        let x = random_window(&mut rng, 8, 6);
        for s in Letter::ALL {
            let lhs = shift(&s, &pi_map(&x, -2..=2).unwrap());
            let source = if s.generator() == Generator::A {
                x.clone()
            } else {
                bar_flip(&x)
            };
            let rhs = pi_map(&shift(&s, &source), -2..=2).unwrap();
            let mut compared = 0;
            for (p, v) in lhs.iter() {
                if let Some(w) = rhs.get(p) {
                    failures += usize::from(v != w);
                    compared += 1;
                }
            }
            failures += usize::from(compared == 0);
        }
    }
    let coords = [
        LambdaPoint::new(0, -1),
        LambdaPoint::black(0),
        LambdaPoint::black(-1),
    ];
    let mut consistent = 0;
    for bits in 0..8u8 {
        let y: LambdaConfig = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), Sign::from_bool(bits >> i & 1 == 1)))
            .collect();
        if y_consistent(&y) {
            consistent += 1;
            failures += usize::from(!check_not_fixed_by_b(&y).is_ok_and(|w| w.holds));
        }
    }
    failures += usize::from(consistent != 4);
    for _ in 0..1_000 {
        let mut x = random_window(&mut rng, 8, 6);
        x.insert(DyadicRational::zero(), Sign::from_bool(rng.gen()));
        x.insert(DyadicRational::from(-1), Sign::from_bool(rng.gen()));
        let y = pi_map(&x, -2..=2).unwrap();
        let by = shift(&Letter::B, &y);
        // by ≠ -y at (0,-1) and by ≠ y at (0,0), read off directly
        let mirror_differs = by.get(&coords[0]) != Some(-y.get(&coords[0]).unwrap());
        let identity_differs = by.get(&coords[1]) != y.get(&coords[1]);
        let witness = check_not_fixed_by_b(&y);
        failures +=
            usize::from(!(mirror_differs && identity_differs && witness.is_ok_and(|w| w.holds)));
    }
    report(
        6,
        "π intertwining + b moves Z",
        failures,
        format!("4000 letter cases; {consistent} sign patterns; 1000 random Y-windows"),
        start.elapsed(),
        Duration::from_secs(5),
    )
}

fn criterion_7_proximality_engine() -> bool {
    let start = Instant::now();
    let mut rng = rng(7);
    let mut failures = 0;
    let (mut certified, mut declined) = (0, 0);
    for _ in 0..1_000 {
        let x1 = random_window(&mut rng, 16, 6);
        let mut x2 = random_window(&mut rng, 16, 6);
        for (c, _) in x1.iter() {
            if rng.gen_bool(0.8) {
                x2.insert(c.clone(), Sign::from_bool(rng.gen()));
            }
        }
        let size = rng.gen_range(1..=8);
        let mut target: Vec<DyadicRational> = Vec::new();
        while target.len() < size {
            let t = random_dyadic(&mut rng, 6, 4);
            if !target.contains(&t) {
                target.push(t);
            }
        }
        target.sort();
        let product = pointwise_product(&x1, &x2);
        let precondition = product.count(Sign::Plus).max(product.count(Sign::Minus)) >= size;
        match proximality_witness(&x1, &x2, &target) {
            Ok(cert) => {
                certified += 1;
                failures += usize::from(!precondition || !cert.verify(&x1, &x2));
                // independent recheck: f(x1·x2) at each target point, via f⁻¹
                let data = cert.witness.inverse().to_data();
                let product_at: BTreeMap<BigRational, Sign> =
                    product.iter().map(|(c, s)| (c.to_rational(), s)).collect();
                for t in &target {
                    let pre = pl_eval(&data, &t.to_rational());
                    failures += usize::from(product_at.get(&pre) != Some(&cert.alpha));
                }
                match z_proximality_check(&x1, &x2, &target, -2..=2) {
                    Ok(r) => failures += usize::from(!r.passed() || r.certificate != cert),
                    Err(_) => failures += 1,
                }
            }
            Err(ProximalError::Insufficient { .. }) => {
                declined += 1;
                failures += usize::from(precondition);
            }
            Err(_) => failures += 1,
        }
    }
    failures += usize::from(certified == 0);
    report(
        7,
        "proximality engine",
        failures,
        format!("{certified} certified and lifted over n in -2..=2, {declined} below precondition"),
        start.elapsed(),
        Duration::from_secs(60),
    )
}

fn criterion_8_measure_invariance() -> bool {
    let start = Instant::now();
    let mut rng = rng(8);
    let pool: Vec<LambdaPoint> =
        schreier_ball::<LambdaSpace>(LambdaPoint::black(0), 6, DEFAULT_RADIUS_CAP)
            .unwrap()
            .nodes
            .iter()
            .map(|n| n.name.parse().unwrap())
            .collect();
    let mut words = vec![GenWord::identity()];
    let mut layer = vec![GenWord::identity()];
    for _ in 0..4 {
        layer = layer
            .iter()
            .flat_map(|w| Letter::ALL.map(|s| w.concat(&GenWord::from(s))))
            .collect();
        words.extend(layer.iter().cloned());
    }
    let mut failures = 0;
    for _ in 0..1_000 {
        let len = rng.gen_range(0..=10);
        let c = Cylinder::new(
            (0..len)
                .map(|_| {
                    (
                        pool[rng.gen_range(0..pool.len())].clone(),
                        Sign::from_bool(rng.gen()),
                    )
                })
                .collect(),
        );
        let m = cylinder_measure(&c);
        failures += usize::from(cylinder_measure(&c.mirrored()) != m);
        for w in &words {
            failures += usize::from(cylinder_measure(&pullback_cylinder(w, &c)) != m);
        }
    }
    let window: Vec<DyadicRational> = ["0", "1/2^1", "-3", "5/2^2"]
        .iter()
        .map(|s| common::dy(s))
        .collect();
    let n = 100_000u64;
    let mut sums = [0i64; 4];
    let mut cross = [0i64; 3];
    for seed in 0..n {
        let x = sample_config(window.iter().cloned(), seed);
        let v: Vec<i64> = window
            .iter()
            .map(|c| i64::from(x.get(c).unwrap().to_i8()))
            .collect();
        for i in 0..4 {
            sums[i] += v[i];
        }
        for i in 0..3 {
            cross[i] += v[i] * v[i + 1];
        }
    }
    let means: Vec<f64> = sums.iter().map(|&s| s as f64 / n as f64).collect();
    let corrs: Vec<f64> = cross.iter().map(|&s| s as f64 / n as f64).collect();
    failures += means
        .iter()
        .chain(&corrs)
        .filter(|v| v.abs() > 0.02)
        .count();
    report(
        8,
        "measure invariance",
        failures,
        format!(
            "{} words x 1000 cylinders; means {means:.4?}; correlations {corrs:.4?}",
            words.len()
        ),
        start.elapsed(),
        Duration::from_secs(60),
    )
}

fn main() {
    let criteria: [fn() -> bool; 8] = [
        criterion_1_generator_fidelity,
        criterion_2_group_laws_and_relators,
        criterion_3_limit,
        criterion_4_covering_equivariance,
        criterion_5_stabilizer_is_k,
        criterion_6_pi_intertwining_and_b_moves_z,
        criterion_7_proximality_engine,
        criterion_8_measure_invariance,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
