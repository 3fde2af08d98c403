use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Rational};
use serde_json::{json, Map, Value};

use super::{digest, Certificate, SuiteConfig, CERTIFICATE_SCHEMA};
use crate::browder::{browder_sum, infinite_order_estimate, sqrt_decrease_check};
use crate::error::{Error, Result};
use crate::families::{
    affine_family, check_disjoint_copies, infinite_order_family, merge_families, road_runner, road_runner_tail,
    sqrt_family, validate_cheese, CheeseSpec, DiscFamily, TailBound,
};
use crate::geometry::{s_dist, sample_sqrt_inclusion, sqrt_disc, Disc};
use crate::par;
use crate::precision::{format_exact, format_short, rel_err, rel_err_complex, Precision, StrictCheck, Verdict};
use crate::rational::exact::{
    road_runner_browder_partial, road_runner_closures_disjoint, road_runner_witness, road_runner_witness_norm,
};
use crate::rational::{browder_norm_experiment, delta_descent_check, road_runner_witnesses, RationalFunction};

pub const SUITES: [&str; 8] = [
    "sqrt_disc",
    "sqrt_cheese",
    "road_runner",
    "infinite_order",
    "descent",
    "norm_bound",
    "pipeline_main_theorem",
    "pipeline_m_to_infinity",
];

/// Runs a suite and returns its certificates in a fixed order.
pub fn run_suite(suite: &str, cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    match suite {
        "sqrt_disc" => sqrt_disc_suite(cfg),
        "sqrt_cheese" => sqrt_cheese_suite(cfg),
        "road_runner" => road_runner_suite(cfg),
        "infinite_order" => infinite_order_suite(cfg),
        "descent" => descent_suite(cfg),
        "norm_bound" => norm_bound_suite(cfg),
        "pipeline_main_theorem" => pipeline_main_suite(cfg),
        "pipeline_m_to_infinity" => pipeline_copies_suite(cfg),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

struct Draft {
    suite: &'static str,
    claim_id: &'static str,
    subject: String,
    inputs: Value,
    verdict: Verdict,
    margin: Float,
    details: Map<String, Value>,
}

impl Draft {
    fn new(suite: &'static str, claim_id: &'static str, subject: impl Into<String>, inputs: Value, prec: Precision) -> Self {
        Draft {
            suite,
            claim_id,
            subject: subject.into(),
            inputs,
            verdict: Verdict::Pass,
            margin: Float::with_val(prec.bits(), rug::float::Special::Infinity),
            details: Map::new(),
        }
    }

    fn detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.to_string(), value);
    }

    fn require(&mut self, ok: bool, what: &str) {
        if !ok {
            self.verdict = Verdict::Fail;
            let failures = self
                .details
                .entry("failed_checks")
                .or_insert_with(|| Value::Array(Vec::new()));
            if let Value::Array(list) = failures {
                list.push(Value::String(what.to_string()));
            }
        }
    }

    fn strict(&mut self, check: &StrictCheck, what: &str) {
        self.margin.min_mut(&check.relative_margin);
        self.require(check.holds, what);
    }

    fn truncated(&mut self) {
        self.verdict = self.verdict.and(Verdict::TruncatedOnly);
    }

    fn finish(mut self, cfg: &SuiteConfig) -> Certificate {
        if self.margin.is_infinite() {
            self.margin = Float::with_val(self.margin.prec(), 1);
        }
        if self.verdict == Verdict::Pass && self.margin <= 0 {
            self.verdict = Verdict::Fail;
        }
        let inputs = json!({
            "suite": self.suite,
            "claim_id": self.claim_id,
            "subject": self.subject,
            "inputs": self.inputs,
            "precision_bits": cfg.precision.bits(),
            "seed": cfg.seed,
            "eps_log2": cfg.tolerance.eps_log2,
        });
        self.details.insert("inputs".into(), self.inputs);
        Certificate {
            schema: CERTIFICATE_SCHEMA.to_string(),
            claim_id: self.claim_id.to_string(),
            suite: self.suite.to_string(),
            subject: self.subject,
            inputs_digest: digest(&inputs),
            verdict: self.verdict,
            margin: format_short(&self.margin),
            precision_bits: cfg.precision.bits(),
            seed: cfg.seed,
            timestamp: cfg.now(),
            details: Value::Object(self.details),
        }
    }
}

fn check_json(c: &StrictCheck) -> Value {
    json!({
        "lhs": format_short(&c.lhs),
        "rhs": format_short(&c.rhs),
        "relative_margin": format_short(&c.relative_margin),
        "holds": c.holds,
    })
}

fn disc_json(d: &Disc) -> Value {
    json!([format_exact(d.center().real()), format_exact(d.center().imag()), format_exact(d.radius())])
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random disc `D(a, r)` with `0.05 <= |a| <= 0.95` and `0 < r < |a|`.
pub fn random_admissible_disc(seed: u64, index: u64, prec: Precision) -> Disc {
    let mut rng = rng_for(seed, index);
    let modulus: f64 = rng.random_range(0.05..0.95);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let ratio: f64 = rng.random_range(0.02..0.98);
    Disc::from_f64(prec, modulus * theta.cos(), modulus * theta.sin(), modulus * ratio).expect("positive radius")
}

/// Random finite family of `count` discs inside the unit disc, none of
/// which contains the origin in its closure.
pub fn random_admissible_family(seed: u64, index: u64, count: usize, prec: Precision) -> DiscFamily {
    let mut rng = rng_for(seed ^ 0x5eed_fa11, index);
    let discs: Vec<Disc> = (0..count)
        .map(|_| {
            let modulus: f64 = rng.random_range(0.1..0.95);
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let ratio: f64 = rng.random_range(0.01..0.5);
            Disc::from_f64(prec, modulus * theta.cos(), modulus * theta.sin(), modulus * ratio).expect("positive radius")
        })
        .collect();
    DiscFamily::from_discs(prec, discs)
}

/// Small hand-picked seed family for pipeline smoke runs. It stands in for
/// a real seed cheese and proves nothing about one.
pub fn toy_seed_family(prec: Precision) -> CheeseSpec {
    let discs = [
        (-0.5, 0.0, 0.2),
        (0.0, 0.45, 0.1),
        (-0.3, -0.4, 0.08),
        (0.25, -0.6, 0.1),
    ]
    .into_iter()
    .map(|(x, y, r)| Disc::from_f64(prec, x, y, r).expect("positive radius"));
    CheeseSpec::new(
        DiscFamily::from_discs(prec, discs),
        "toy seed family (non-authoritative stand-in)",
    )
}

fn sqrt_disc_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let mut out = Vec::with_capacity(cfg.trials);
    for i in 0..cfg.trials as u64 {
        let d = random_admissible_disc(cfg.seed, i, prec);
        let pair = sqrt_disc(&d)?;
        let report = pair.certify(cfg.orders.iter().copied(), cfg.tolerance);
        let stats = sample_sqrt_inclusion(&pair, cfg.samples, cfg.seed.wrapping_add(i), cfg.exec);

        let mut draft = Draft::new(
            "sqrt_disc",
            "square-root-disc",
            format!("disc {i}"),
            json!({ "disc": disc_json(&d), "orders": cfg.orders, "samples": cfg.samples }),
            prec,
        );
        let eps = cfg.tolerance.value(prec);
        draft.require(report.s0_rel_err < eps, "s0(delta_i) = sqrt(s)");
        draft.require(report.radius_rel_err < eps, "r(delta_i) = r/(sqrt|a| + sqrt s)");
        draft.require(report.symmetric, "delta_2 = -delta_1");
        draft.strict(&report.radius_bound, "r(delta_i) < r/(2 sqrt s)");
        for (m, c) in &report.order_bounds {
            draft.strict(c, &format!("order bound m={m}"));
        }
        draft.require(stats.violations == 0, "sampled square root covered");
        draft.require(stats.accepted >= cfg.samples, "enough inclusion samples");

        draft.detail("delta1", disc_json(&pair.delta1));
        draft.detail("s", Value::String(format_short(&pair.s)));
        draft.detail("s0_rel_err", Value::String(format_short(&report.s0_rel_err)));
        draft.detail("radius_rel_err", Value::String(format_short(&report.radius_rel_err)));
        draft.detail("radius_bound", check_json(&report.radius_bound));
        draft.detail(
            "order_bounds",
            Value::Array(
                report
                    .order_bounds
                    .iter()
                    .map(|(m, c)| json!({ "m": m, "check": check_json(c) }))
                    .collect(),
            ),
        );
        draft.detail(
            "inclusion",
            json!({ "trials": stats.trials, "accepted": stats.accepted, "violations": stats.violations }),
        );
        out.push(draft.finish(cfg));
    }
    Ok(out)
}

/// Samples points of the square-root cheese and checks their squares lie
/// in the source cheese. Returns (points tested, violations).
fn sqrt_membership_sample(src: &DiscFamily, root: &DiscFamily, depth: u64, samples: usize, seed: u64) -> Result<(usize, usize)> {
    let prec = src.prec();
    let src_discs = src.realize(depth)?;
    let root_discs = root.realize(depth)?;
    let src_cheese = CheeseSpec::new(src.clone(), "");
    let root_cheese = CheeseSpec::new(root.clone(), "");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tested = 0;
    let mut violations = 0;
    for _ in 0..samples {
        let z = prec.complex(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if !root_cheese.contains_realized(&z, &root_discs) {
            continue;
        }
        tested += 1;
        let z2 = Complex::with_val(prec.bits(), z.square_ref());
        if !src_cheese.contains_realized(&z2, &src_discs) {
            violations += 1;
        }
    }
    Ok((tested, violations))
}

fn sqrt_cheese_subject(cfg: &SuiteConfig, fam: &DiscFamily, m: u32, depth: u64, subject: String, inputs: Value) -> Result<Certificate> {
    let prec = cfg.precision;
    let report = sqrt_decrease_check(fam, m, depth, cfg.tolerance)?;
    let mut draft = Draft::new("sqrt_cheese", "square-root-cheese-strict-decrease", subject, inputs, prec);
    draft.strict(&report.comparison, "B_2m(root) upper < B_m(source) lower");
    draft.require(report.per_disc_failures == 0, "per-disc order bound");
    if let Some(min) = &report.min_per_disc_margin {
        draft.margin.min_mut(min);
    }
    if report.verdict == Verdict::TruncatedOnly {
        draft.truncated();
    }
    let root = sqrt_family(fam)?;
    let origin = prec.complex_zero();
    let root_discs = root.realize(depth)?;
    draft.require(
        root_discs.iter().all(|d| !d.closure_contains(&origin)),
        "origin stays in the square-root cheese",
    );
    let (tested, violations) = sqrt_membership_sample(fam, &root, depth, 2000, cfg.seed)?;
    draft.require(violations == 0, "square-root cheese maps into the source");
    draft.detail("comparison", report.to_json());
    draft.detail("membership", json!({ "tested": tested, "violations": violations }));
    Ok(draft.finish(cfg))
}

fn sqrt_cheese_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let mut out = Vec::new();
    let rr = road_runner(2, prec)?;
    let truncated = DiscFamily::from_discs(prec, rr.realize(cfg.depth)?);
    for &m in &cfg.orders {
        out.push(sqrt_cheese_subject(
            cfg,
            &truncated,
            m,
            0,
            format!("road_runner(2) discs 1..={} m={m}", cfg.depth),
            json!({ "family": "road_runner", "param": 2, "discs": cfg.depth, "m": m }),
        )?);
    }
    // the full road runner has a certified tail only below order 2
    out.push(sqrt_cheese_subject(
        cfg,
        &rr,
        1,
        cfg.depth,
        format!("road_runner(2) with tail, depth {} m=1", cfg.depth),
        json!({ "family": "road_runner", "param": 2, "depth": cfg.depth, "m": 1, "tail": true }),
    )?);
    let jobs: Vec<(u64, u32)> = (0..cfg.trials as u64)
        .flat_map(|i| cfg.orders.iter().map(move |&m| (i, m)))
        .collect();
    let certs = par::try_map(cfg.exec, &jobs, |&(i, m)| {
        let count = 3 + (i % 8) as usize;
        let fam = random_admissible_family(cfg.seed, i, count, prec);
        let discs: Vec<Value> = fam.finite().iter().map(disc_json).collect();
        sqrt_cheese_subject(cfg, &fam, m, 0, format!("random family {i} m={m}"), json!({ "discs": discs, "m": m }))
    })?;
    out.extend(certs);
    Ok(out)
}

fn road_runner_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let big_n = u32::try_from(cfg.depth).map_err(|_| Error::invalid("depth too large"))?;
    let mut out = Vec::new();
    for &m in &cfg.orders {
        if m < 1 {
            return Err(Error::invalid("road_runner suite: m must be >= 1"));
        }
        let mut draft = Draft::new(
            "road_runner",
            "road-runner-order-gap",
            format!("road_runner({m})"),
            json!({ "m": m, "witnesses": 20, "disjoint_to": 50, "depth": big_n }),
            prec,
        );
        // exact witnesses: |delta_{0,m}(f_n)| = n, ||f_n|| = 1
        let mut exact_ok = true;
        let mut float_err = Float::new(prec.bits());
        for n in 1..=20u32 {
            let delta = road_runner_witness(m, n).taylor_at_zero(m as usize)?;
            exact_ok &= Rational::from(delta.abs_ref()) == n;
            exact_ok &= road_runner_witness_norm(m, n) == Some(Rational::from(1));
            let d = crate::families::road_runner_disc(m, u64::from(n), prec)?;
            let f = RationalFunction::simple_pole(Complex::with_val(prec.bits(), (d.radius(), 0)), d.center().clone(), prec);
            let v = f.taylor_functional(&prec.complex_zero(), m)?;
            let expect = Complex::with_val(prec.bits(), (-(n as i64), 0));
            float_err.max_mut(&rel_err_complex(&v, &expect));
        }
        draft.require(exact_ok, "|delta_{0,m}(f_n)| = n and ||f_n|| = 1 exactly, n = 1..20");
        draft.require(float_err < cfg.tolerance.value(prec), "floating Taylor path agrees");
        draft.require(road_runner_closures_disjoint(m, 50), "closed discs disjoint, n = 1..50");

        // order m - 1 is finite with a certified tail
        let exact_partial = road_runner_browder_partial(m, m - 1, big_n);
        let comparator = Rational::from(1) + (Rational::from(1) << (m - 1))
            - (Rational::from(1) << (m - 1)) / (Rational::from(1) << big_n);
        let comparator_check = StrictCheck::less(
            &Float::with_val(prec.bits(), &exact_partial),
            &Float::with_val(prec.bits(), &comparator),
            cfg.tolerance,
        );
        draft.require(exact_partial <= comparator, "realized sum <= 1 + 2^(m-1) - 2^(m-1-N)");
        let fam = road_runner(m, prec)?;
        let report = browder_sum(&fam, m - 1, &prec.complex_zero(), cfg.depth)?;
        let realized_err = rel_err(&report.realized_sum, &Float::with_val(prec.bits(), &exact_partial));
        draft.require(realized_err < cfg.tolerance.value(prec), "floating realized sum matches exact");
        let tail = road_runner_tail(m, m - 1, cfg.depth, prec)?;
        draft.require(tail == report.tail, "tail provider used");
        let upper = match tail.value() {
            Some(t) => Float::with_val(prec.bits(), Float::with_val(prec.bits(), &exact_partial) + t),
            None => Float::with_val(prec.bits(), rug::float::Special::Infinity),
        };
        let series_bound = Float::with_val(prec.bits(), 1 + (Rational::from(1) << m));
        let series_check = StrictCheck::less(&upper, &series_bound, cfg.tolerance);
        draft.strict(&series_check, "realized + tail < 1 + 2^m");
        draft.margin.min_mut(&comparator_check.relative_margin);

        // order m diverges
        let divergent = browder_sum(&fam, m, &prec.complex_zero(), cfg.depth)?;
        draft.require(divergent.tail == TailBound::Divergent, "order m tail diverges");

        draft.detail("exact_witnesses", Value::Bool(exact_ok));
        draft.detail("float_taylor_rel_err", Value::String(format_short(&float_err)));
        draft.detail("realized_exact", Value::String(exact_partial.to_string()));
        draft.detail("comparator", Value::String(comparator.to_string()));
        draft.detail("tail", Value::String(tail.value().map(format_short).unwrap_or_default()));
        draft.detail("realized_plus_tail_vs_series_bound", check_json(&series_check));
        draft.detail("order_m_report", divergent.to_json());
        out.push(draft.finish(cfg));
    }
    Ok(out)
}

fn infinite_order_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let mut out = Vec::new();
    for &m in &cfg.orders {
        let report = infinite_order_estimate(cfg.n_max, m, cfg.count, cfg.seed, prec, cfg.tolerance)?;
        let mut draft = Draft::new(
            "infinite_order",
            "infinite-order-majorant",
            format!("m={m} n_max={}", cfg.n_max),
            json!({ "m": m, "n_max": cfg.n_max, "count": cfg.count }),
            prec,
        );
        let mut groups = Vec::new();
        for g in &report.groups {
            draft.strict(&g.bound, &format!("group {} within majorant", g.n));
            draft.require(g.within_budget, &format!("group {} radius budget", g.n));
            draft.require(g.s0_violations == 0, &format!("group {} keeps distance 1/(2n)", g.n));
            groups.push(json!({
                "n": g.n,
                "discs": g.discs,
                "radius_sum": format_short(&g.radius_sum),
                "bound": check_json(&g.bound),
            }));
        }
        draft.detail("groups", Value::Array(groups));
        draft.detail("total", Value::String(format_short(&report.total)));
        draft.detail("majorant_partial", Value::String(format_short(&report.majorant_partial)));
        draft.detail("majorant_remainder", Value::String(format_short(&report.majorant_remainder)));
        out.push(draft.finish(cfg));
    }
    Ok(out)
}

/// Random rational function with 1..=10 simple poles of modulus in [0.3, 2].
fn random_function(rng: &mut ChaCha8Rng, prec: Precision) -> RationalFunction {
    let k = rng.random_range(1..=10usize);
    let poles: Vec<(Complex, u32)> = (0..k)
        .map(|_| {
            let r: f64 = rng.random_range(0.3..2.0);
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            (prec.complex(r * t.cos(), r * t.sin()), 1)
        })
        .collect();
    let deg = rng.random_range(0..=k);
    let num: Vec<Complex> = (0..=deg)
        .map(|_| prec.complex(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    RationalFunction::from_poles(num, poles, prec)
}

fn descent_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let orders = if cfg.orders.is_empty() { vec![1] } else { cfg.orders.clone() };
    let odd_count = (cfg.functions / 10).max(1);
    let jobs: Vec<usize> = (0..cfg.functions + odd_count).collect();
    let eps = Float::with_val(prec.bits(), Float::u_exp(1, -40));
    par::try_map(cfg.exec, &jobs, |&i| {
        let mut rng = rng_for(cfg.seed ^ 0x0de5_ce47, i as u64);
        let m = orders[rng.random_range(0..orders.len())];
        let odd = i >= cfg.functions;
        let f = if odd {
            // z h(z^2) is odd
            random_function(&mut rng, prec)
                .compose_square()
                .times_shifted_power(&prec.complex_zero(), 1)
        } else {
            random_function(&mut rng, prec)
        };
        let report = delta_descent_check(&f, m)?;
        let subject = if odd {
            format!("odd function {} m={m}", i - cfg.functions)
        } else {
            format!("function {i} m={m}")
        };
        let mut draft = Draft::new(
            "descent",
            "square-root-of-set-descent",
            subject,
            json!({ "function": f.to_json(), "m": m }),
            prec,
        );
        if odd {
            draft.require(report.exact_zero, "odd function: all three functionals exactly zero");
        } else {
            let check = StrictCheck::less(&report.rel_err, &eps, cfg.tolerance);
            draft.strict(&check, "relative error < 2^-40");
        }
        draft.detail("delta_f", json!([format_short(report.delta_f.real()), format_short(report.delta_f.imag())]));
        draft.detail("delta_h", json!([format_short(report.delta_h.real()), format_short(report.delta_h.imag())]));
        draft.detail("rel_err", Value::String(format_short(&report.rel_err)));
        draft.detail("exact_zero", Value::Bool(report.exact_zero));
        Ok(draft.finish(cfg))
    })
}

fn norm_bound_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let m = cfg.orders.first().copied().unwrap_or(3);
    let cheese = CheeseSpec::new(road_runner(m, prec)?, format!("road_runner({m})"));
    let origin = prec.complex_zero();
    let mut out = Vec::new();
    for k in 0..m {
        let witnesses = road_runner_witnesses(m, k, 1..=200, 5, prec)?;
        let report = browder_norm_experiment(&cheese, &origin, k, &witnesses, cfg.depth)?;
        let mut draft = Draft::new(
            "norm_bound",
            "browder-sum-bounds-functional",
            format!("road_runner({m}) order {k}"),
            json!({ "m": m, "order": k, "witness_indices": 200, "powers": 5, "depth": cfg.depth }),
            prec,
        );
        let check = StrictCheck::less(&report.max_ratio, &report.bound, cfg.tolerance);
        draft.strict(&check, "largest witness ratio below the Browder bound");
        draft.require(report.violations.is_empty(), "no witness violates |delta| <= B ||f||");
        draft.require(report.witnesses >= 1000, "at least 1000 witnesses");
        draft.detail("experiment", report.to_json());
        out.push(draft.finish(cfg));
    }
    // order m: witness ratios grow like n
    let witnesses = road_runner_witnesses(m, m, 1..=20, 1, prec)?;
    let ratios: Vec<Float> = witnesses.iter().map(|w| w.ratio()).collect();
    let mut draft = Draft::new(
        "norm_bound",
        "road-runner-functional-unbounded",
        format!("road_runner({m}) order {m}"),
        json!({ "m": m, "order": m, "witness_indices": 20 }),
        prec,
    );
    let eps = cfg.tolerance.value(prec);
    let matches = ratios
        .iter()
        .zip(1..=20u32)
        .all(|(r, n)| rel_err(r, &Float::with_val(prec.bits(), n)) < eps);
    draft.require(matches, "ratio for f_n equals n");
    for w in ratios.windows(2) {
        draft.strict(&StrictCheck::less(&w[0], &w[1], cfg.tolerance), "ratios increase");
    }
    let certified = browder_sum(&cheese.family, m, &origin, cfg.depth)?;
    draft.require(!certified.is_certified_finite(), "order m Browder sum is not finite");
    draft.detail("ratios", Value::Array(ratios.iter().map(|r| Value::String(format_short(r))).collect()));
    out.push(draft.finish(cfg));
    Ok(out)
}

/// Number of square-root steps used for parameter `m`: enough that
/// `2^v + 1 >= m`, and at least one.
pub(crate) fn sqrt_iterations(m: u32) -> u32 {
    let mut v = 0;
    while (1u64 << v) + 1 < u64::from(m) {
        v += 1;
    }
    v.max(1)
}

/// K1 ∩ K2 ∩ K3: infinite-order family, road runner, iterated square root
/// of the seed family.
fn merged_families(cfg: &SuiteConfig, m: u32) -> Result<(DiscFamily, DiscFamily, DiscFamily, String)> {
    let prec = cfg.precision;
    let k1 = infinite_order_family(cfg.count, cfg.seed, prec);
    let k2 = road_runner(m, prec)?;
    let seed = cfg.seed_family.clone().unwrap_or_else(|| toy_seed_family(prec));
    let mut k3 = seed.family.clone();
    for _ in 0..sqrt_iterations(m) {
        k3 = sqrt_family(&k3)?;
    }
    Ok((k1, k2, k3, seed.label))
}

fn pipeline_main_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let origin = prec.complex_zero();
    let mut out = Vec::new();
    for &m in &cfg.orders {
        if m < 2 {
            return Err(Error::invalid("pipeline_main_theorem: m must be >= 2"));
        }
        let (k1, k2, k3, seed_label) = merged_families(cfg, m)?;
        let merged = merge_families(&[k1.clone(), k2.clone(), k3.clone()])?;
        let mut draft = Draft::new(
            "pipeline_main_theorem",
            "merged-cheese-pipeline",
            format!("m={m}"),
            json!({
                "m": m,
                "depth": cfg.depth,
                "count": cfg.count,
                "seed_family": seed_label,
                "sqrt_iterations": sqrt_iterations(m),
            }),
            prec,
        );
        let cheese = CheeseSpec::new(merged.clone(), "K1 ∩ K2 ∩ K3");
        let validation = validate_cheese(&cheese, cfg.depth)?;
        draft.require(validation.origin_in_cheese == Some(true), "origin lies in K");
        let discs = merged.realize(cfg.depth)?;
        let min_s0 = discs
            .iter()
            .map(|d| s_dist(d, &origin))
            .reduce(|a, b| a.min(&b))
            .unwrap_or_else(|| prec.one());
        draft.strict(
            &StrictCheck::less(&prec.zero(), &min_s0, cfg.tolerance),
            "every realized disc keeps positive distance from the origin",
        );

        let order = m - 1;
        let b = browder_sum(&merged, order, &origin, cfg.depth)?;
        draft.require(b.is_certified_finite(), "order m-1 Browder sum certified finite");
        let parts: Vec<_> = [&k1, &k2, &k3]
            .iter()
            .map(|f| browder_sum(f, order, &origin, cfg.depth))
            .collect::<Result<_>>()?;
        let sum_parts = parts.iter().fold(prec.zero(), |acc, r| acc + &r.realized_sum) - 2u32;
        let additivity = rel_err(&b.realized_sum, &sum_parts);
        draft.require(additivity < cfg.tolerance.value(prec), "realized sums add over the merged family");
        for (name, r) in ["K1", "K2", "K3"].iter().zip(&parts) {
            draft.require(r.is_certified_finite(), &format!("{name} order m-1 certified finite"));
        }
        draft.detail("validation", validation.to_json());
        draft.detail("browder", b.to_json());
        draft.detail(
            "parts",
            Value::Array(parts.iter().map(|r| r.to_json()).collect()),
        );
        draft.detail("additivity_rel_err", Value::String(format_short(&additivity)));
        draft.detail("min_distance_to_origin", Value::String(format_short(&min_s0)));
        out.push(draft.finish(cfg));
    }
    Ok(out)
}

fn pipeline_copies_suite(cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let prec = cfg.precision;
    let ms = if cfg.orders.is_empty() { (2..=6).collect() } else { cfg.orders.clone() };
    let copies: Vec<(Complex, Float)> = ms
        .iter()
        .map(|&m| {
            let a = Complex::with_val(prec.bits(), (Float::with_val(prec.bits(), 1) / m, 0));
            let rho = Float::with_val(prec.bits(), 1) / (10 * m * m);
            (a, rho)
        })
        .collect();
    let mut draft = Draft::new(
        "pipeline_m_to_infinity",
        "m-to-infinity-copies",
        format!("copies m={}..={}", ms.first().unwrap_or(&0), ms.last().unwrap_or(&0)),
        json!({ "m": ms, "centers": "1/m", "scales": "1/(10 m^2)", "depth": cfg.depth }),
        prec,
    );
    let overlap = check_disjoint_copies(&copies);
    draft.require(overlap.is_none(), "closed copies pairwise disjoint");
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            let (ai, ri) = &copies[i];
            let (aj, rj) = &copies[j];
            let gap = Float::with_val(prec.bits(), Complex::with_val(prec.bits(), ai - aj).abs_ref());
            let reach = Float::with_val(prec.bits(), ri + rj);
            draft.strict(&StrictCheck::less(&reach, &gap, cfg.tolerance), "copy separation");
        }
        let (a, rho) = &copies[i];
        let origin_gap = Float::with_val(prec.bits(), a.abs_ref());
        draft.strict(&StrictCheck::less(rho, &origin_gap, cfg.tolerance), "copy avoids the origin");
    }

    let mut per_copy = Vec::new();
    for (&m, (a, rho)) in ms.iter().zip(&copies) {
        let (k1, k2, k3, _) = merged_families(cfg, m)?;
        let km = merge_families(&[k1, k2, k3])?;
        let copy = affine_family(&km, a, rho)?;
        let order = m - 1;
        let base = browder_sum(&km, order, &prec.complex_zero(), cfg.depth)?;
        let moved = browder_sum(&copy, order, a, cfg.depth)?;
        // r -> rho r and s -> rho s, so every term scales by rho^{-order}
        let scale = Float::with_val(prec.bits(), rho.clone().pow(order));
        let rescaled = Float::with_val(prec.bits(), &moved.realized_sum * &scale);
        let err = rel_err(&rescaled, &base.realized_sum);
        draft.require(err < cfg.tolerance.value(prec), &format!("copy m={m} scaling identity"));
        draft.require(base.is_certified_finite(), &format!("K_{m} order m-1 certified finite"));
        per_copy.push(json!({
            "m": m,
            "center": format_short(a.real()),
            "scale": format_short(rho),
            "base_sum": format_short(&base.realized_sum),
            "copy_sum": format_short(&moved.realized_sum),
            "scaling_rel_err": format_short(&err),
        }));
    }
    draft.detail("copies", Value::Array(per_copy));
    draft.detail("overlap", json!(overlap));
    Ok(vec![draft.finish(cfg)])
}

use rug::ops::Pow;

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(suite: &str) -> SuiteConfig {
        let mut c = SuiteConfig::for_suite(suite);
        c.trials = 5;
        c.samples = 2000;
        c.functions = 20;
        c.timestamp = Some("fixed".into());
        c
    }

    #[test]
    fn every_suite_passes_quick_configs() {
        for suite in SUITES {
            let certs = run_suite(suite, &quick(suite)).unwrap();
            assert!(!certs.is_empty(), "{suite}");
            for c in &certs {
                assert_eq!(c.verdict, Verdict::Pass, "{suite}: {} {}", c.subject, c.details);
            }
        }
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(matches!(run_suite("nope", &SuiteConfig::default()), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn iterations_cover_order() {
        assert_eq!(sqrt_iterations(2), 1);
        assert_eq!(sqrt_iterations(3), 1);
        assert_eq!(sqrt_iterations(4), 2);
        assert_eq!(sqrt_iterations(5), 2);
        assert_eq!(sqrt_iterations(6), 3);
    }

    #[test]
    fn pass_requires_positive_margin() {
        let cfg = quick("sqrt_disc");
        let mut d = Draft::new("sqrt_disc", "x", "y", json!({}), cfg.precision);
        d.margin = cfg.precision.zero();
        assert_eq!(d.finish(&cfg).verdict, Verdict::Fail);
    }
}
