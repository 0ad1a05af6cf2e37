//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line with the measured values, then asserts.
//!
//! Run one with e.g. `cargo test --test acceptance criterion_3`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::sync::{Mutex, MutexGuard, OnceLock};

use igabeam::beam::{CollocatedFields, LoadVector};
use igabeam::rot3::{dexp_so3, exp_so3, skew, Mat3, Rotation, Vec3};
use igabeam::scenario::study::{
    cantilever_study, converged_multicorrector, convergence_against, flying_beam_study, pendulum_study, CaseSpec,
};
use igabeam::scenario::{
    presets, run_simulation, spectral_study, timing_bench, BenchConfig, ConvergenceStudyConfig, ConvergenceTable,
    Simulation,
};
use igabeam::solver::{BcCombo, MulticorrectorSettings, SolverVariant, Support};
use igabeam::integrator::{InitialAngularVelocity, InitialVelocity, KinematicState};
use igabeam::spline::SplineSpace;

/// The criteria run one at a time: the machine may have a single core and
/// criterion 7 times wall clock.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the verdict outside the test harness's capture, so it shows for
/// passing tests too.
fn report(criterion: usize, pass: bool, detail: &str) {
    let line = format!("criterion {criterion}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "{line}");
}

fn rates(tables: &[ConvergenceTable]) -> String {
    let mut s = String::new();
    for t in tables {
        let _ = write!(s, "{}[", t.variant);
        for (p, r) in &t.rates {
            let _ = write!(s, " p{p}={r:.2}");
        }
        s.push_str(" ] ");
    }
    s
}

/// Largest ratio between two variants' errors at any shared `(p, n)`.
fn worst_spread(tables: &[ConvergenceTable]) -> f64 {
    let mut spread: f64 = 1.0;
    for row in &tables[0].rows {
        let errors: Vec<f64> = tables.iter().filter_map(|t| t.error(row.degree, row.n)).collect();
        let hi = errors.iter().copied().fold(0.0, f64::max);
        let lo = errors.iter().copied().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi / lo);
    }
    spread
}

fn all_variants(study: &ConvergenceStudyConfig, reference: &[Vec3]) -> Vec<ConvergenceTable> {
    SolverVariant::ALL.iter().map(|&v| convergence_against(study, v, reference).unwrap()).collect()
}

#[test]
fn criterion_1_spectral_radius() {
    let _serial = serial();
    let degrees = [2, 4, 6, 8];
    let ns = [10, 20, 40, 60, 80];
    let rows = spectral_study(&degrees, &ns, &BcCombo::ALL).unwrap();
    assert_eq!(rows.len(), 60);
    let rho: BTreeMap<(&str, usize, usize), f64> =
        rows.iter().map(|r| ((r.bc.label(), r.n, r.degree), r.spectral_radius)).collect();
    let max = rows.iter().map(|r| r.spectral_radius).fold(0.0, f64::max);
    let below_one = rows.iter().all(|r| r.spectral_radius < 1.0);
    let mut monotone = true;
    for bc in BcCombo::ALL {
        for n in ns {
            for w in degrees.windows(2) {
                monotone &= rho[&(bc.label(), n, w[1])] >= rho[&(bc.label(), n, w[0])];
            }
        }
    }
    let by_degree: Vec<String> =
        degrees.iter().map(|&p| format!("p{p}={:.3}", rho[&("DN", 40, p)])).collect();
    report(
        1,
        below_one && monotone,
        &format!("max rho {max:.4} < 1: {below_one}; non-decreasing in p: {monotone}; DN n=40 {}", by_degree.join(" ")),
    );
}

/// The literal cantilever protocol and, if its reference cannot be
/// computed, the same study against the preset reference.
struct CantileverOutcome {
    literal: Result<Vec<ConvergenceTable>, String>,
    fallback: Option<Vec<ConvergenceTable>>,
}

fn cantilever() -> &'static CantileverOutcome {
    static OUTCOME: OnceLock<CantileverOutcome> = OnceLock::new();
    OUTCOME.get_or_init(|| {
        let mut literal = cantilever_study();
        literal.reference = CaseSpec { degree: 6, n: 80, step_s: 1e-7 };
        match literal.reference_solution() {
            Ok(reference) => CantileverOutcome { literal: Ok(all_variants(&literal, &reference)), fallback: None },
            Err(e) => {
                let study = cantilever_study();
                let reference = study.reference_solution().unwrap();
                CantileverOutcome { literal: Err(e.to_string()), fallback: Some(all_variants(&study, &reference)) }
            }
        }
    })
}

fn rate_targets_met(tables: &[ConvergenceTable]) -> bool {
    tables.iter().all(|t| t.rates[&4] >= 3.5 && t.rates[&6] >= 4.5)
}

#[test]
fn criterion_2_cantilever_convergence() {
    let _serial = serial();
    let outcome = cantilever();
    match (&outcome.literal, &outcome.fallback) {
        (Ok(tables), _) => {
            let spread = worst_spread(tables);
            let pass = rate_targets_met(tables) && spread <= 2.0;
            report(2, pass, &format!("rates {}; worst variant spread {spread:.3}", rates(tables)));
        }
        (Err(e), Some(tables)) => {
            let spread = worst_spread(tables);
            report(
                2,
                false,
                &format!(
                    "reference p=6 n=80 h=1e-7 failed ({e}); against p=6 n=60: rates {}; worst variant spread {spread:.3}; \
                     rate targets met: {}",
                    rates(tables),
                    rate_targets_met(tables)
                ),
            );
        }
        (Err(e), None) => report(2, false, e),
    }
}

#[test]
fn criterion_3_pendulum_convergence() {
    let _serial = serial();
    let study = pendulum_study();
    let reference = study.reference_solution().unwrap();
    let tables = all_variants(&study, &reference);
    let spread = worst_spread(&tables);
    let outcome = cantilever();
    let (cantilever_tables, which) = match (&outcome.literal, &outcome.fallback) {
        (Ok(t), _) => (t, "cantilever"),
        (Err(_), Some(t)) => (t, "cantilever (n=60 reference)"),
        (Err(e), None) => return report(3, false, &format!("no cantilever rates: {e}")),
    };
    let mut in_band = true;
    for (t, c) in tables.iter().zip(cantilever_tables) {
        for p in [4, 6] {
            let ratio = t.rates[&p] / c.rates[&p];
            in_band &= (0.5..=2.0).contains(&ratio);
        }
    }
    report(
        3,
        spread <= 2.0 && in_band,
        &format!(
            "rates {}; {which} rates {}; p4/p6 within factor 2: {in_band}; worst variant spread {spread:.3}",
            rates(&tables),
            rates(cantilever_tables)
        ),
    );
}

#[test]
fn criterion_4_flying_beam_rate_ceiling() {
    let _serial = serial();
    let study = flying_beam_study();
    let reference = study.reference_solution().unwrap();
    let tables = all_variants(&study, &reference);
    let cn = &tables[0];
    assert_eq!(cn.variant, SolverVariant::CnNl);
    let ceiling = tables.iter().all(|t| t.rates[&6] <= 4.0);
    let agree = tables[1..].iter().all(|t| t.rates.iter().all(|(p, r)| (r - cn.rates[p]).abs() <= 0.3));
    report(
        4,
        ceiling && agree,
        &format!("t*={} s rates {}; p6 <= 4: {ceiling}; LU within 0.3 of CN-NL: {agree}", study.t_star_s, rates(&tables)),
    );
}

#[test]
fn criterion_5_cross_variant_trajectories() {
    let _serial = serial();
    let mut config = presets::cantilever();
    config.discretization.degree = 4;
    config.discretization.n = 20;
    config.time.step_s = 1e-6;
    config.time.duration_s = 0.05;
    config.time.output_stride = 10;
    let runs: Vec<_> = SolverVariant::ALL
        .iter()
        .map(|&v| run_simulation(&config.clone().with_variant(v)).unwrap())
        .collect();
    let tip = |k: usize, i: usize| Vec3::from(runs[k].samples[i].displacement_m);
    let scale = (0..runs[0].samples.len()).map(|i| tip(0, i).norm()).fold(0.0, f64::max);
    let mut worst = [0.0f64; 2];
    for i in 0..runs[0].samples.len() {
        for k in 1..3 {
            worst[k - 1] = worst[k - 1].max((tip(k, i) - tip(0, i)).norm() / scale);
        }
    }
    report(
        5,
        worst.iter().all(|w| *w < 1e-2),
        &format!(
            "max tip deviation / max tip displacement ({scale:.4e} m) over 0.05 s: lu-nl {:.3e}, lu-l {:.3e} (< 1e-2)",
            worst[0], worst[1]
        ),
    );
}

#[test]
fn criterion_6_newton_economy() {
    let _serial = serial();
    let config = presets::cantilever();
    let out = match run_simulation(&config) {
        Ok(out) => out,
        Err(e) => return report(6, false, &format!("cn-nl cantilever run failed: {e}")),
    };
    let s = &out.summary;
    let fraction = s.single_newton_fraction();
    report(
        6,
        fraction >= 0.99,
        &format!(
            "cn-nl cantilever p={} n={} h={} s over {} s: {} of {} steps in one Newton iteration ({:.4}%), max {}",
            config.discretization.degree,
            config.discretization.n,
            config.time.step_s,
            config.time.duration_s,
            s.single_newton_steps,
            s.steps,
            100.0 * fraction,
            s.max_newton_iterations
        ),
    );
}

#[test]
fn criterion_7_timing_ordering() {
    let _serial = serial();
    let results = timing_bench(&BenchConfig::default()).unwrap();
    let mut table: BTreeMap<(String, usize), BTreeMap<usize, BTreeMap<SolverVariant, f64>>> = BTreeMap::new();
    for r in &results {
        table.entry((r.benchmark.clone(), r.degree)).or_default().entry(r.n).or_default().insert(r.variant, r.normalized);
    }
    let mut failures = Vec::new();
    let mut gaps = Vec::new();
    for ((bench, p), by_n) in &table {
        let (n_lo, lo) = by_n.first_key_value().unwrap();
        let (n_hi, hi) = by_n.last_key_value().unwrap();
        for (n, t) in by_n {
            if t[&SolverVariant::LuL] > t[&SolverVariant::LuNl] {
                failures.push(format!("{bench} p{p} n{n}: lu-l {:.3} > lu-nl {:.3}", t[&SolverVariant::LuL], t[&SolverVariant::LuNl]));
            }
        }
        if hi[&SolverVariant::LuL] >= hi[&SolverVariant::CnNl] {
            failures.push(format!("{bench} p{p} n{n_hi}: lu-l not below cn-nl"));
        }
        let gap = |t: &BTreeMap<SolverVariant, f64>| t[&SolverVariant::CnNl] - t[&SolverVariant::LuL];
        if gap(hi) <= gap(lo) {
            failures.push(format!("{bench} p{p}: gap n{n_hi} {:.3} <= n{n_lo} {:.3}", gap(hi), gap(lo)));
        }
        gaps.push(format!("{bench} p{p} {:.2}->{:.2}", gap(lo), gap(hi)));
    }
    let detail = if failures.is_empty() {
        format!("{} cases ordered; cn-nl minus lu-l gap, smallest to largest n: {}", results.len(), gaps.join(", "))
    } else {
        failures.join("; ")
    };
    report(7, failures.is_empty(), &detail);
}

// Criterion 8: property suite.

fn partition_of_unity() -> f64 {
    let mut worst: f64 = 0.0;
    for p in 1..=8 {
        let space = SplineSpace::open_uniform(p, p + 13).unwrap();
        for k in 0..=200 {
            let e = space.eval_basis(k as f64 / 200.0, 2).unwrap();
            for (d, values) in e.values.iter().enumerate() {
                let target = if d == 0 { 1.0 } else { 0.0 };
                let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
                worst = worst.max((values.iter().sum::<f64>() - target).abs() / scale);
            }
        }
    }
    worst
}

/// Observed order of `exp(θ + δ dθ) ≈ (I + skew(dexp(θ) δ dθ)) exp(θ)`.
fn dexp_orders() -> Vec<f64> {
    let cases = [
        (Vec3::new(0.7, -1.3, 0.4), Vec3::new(-0.2, 0.5, 0.9)),
        (Vec3::new(2.5, 0.3, -1.0), Vec3::new(1.0, 0.0, 0.0)),
        (Vec3::new(1e-3, 0.0, 2e-3), Vec3::new(0.3, -0.4, 0.5)),
    ];
    let mut orders = Vec::new();
    for (theta, dtheta) in cases {
        let base = exp_so3(&theta);
        let t = dexp_so3(&theta);
        let err = |d: f64| (exp_so3(&(theta + dtheta * d)) - (Mat3::identity() + skew(&(t * dtheta * d))) * base).amax();
        orders.push((err(1e-3) / err(1e-4)).log10());
    }
    orders
}

/// Strains of a deformed cantilever state and of the same state moved by a
/// rigid motion; also the strains of the reference configuration.
fn objectivity_and_reference() -> (f64, f64) {
    let model = presets::cantilever().build().unwrap().model;
    let n = model.num_points();
    let reference = &model.reference;
    let mut fields = CollocatedFields::new(n);
    let k_s = KinematicState::at_rest(&model).curvature_rate;
    fields.evaluate(&model, &reference.centroid, &reference.rotations, &reference.curvature, &k_s);
    let reference_max = fields.strain.iter().chain(&fields.curvature_strain).map(|v| v.amax()).fold(0.0, f64::max);

    let c: Vec<Vec3> = reference
        .centroid
        .iter()
        .enumerate()
        .map(|(j, x)| x + Vec3::new(0.01 * (j as f64).sin(), 0.002 * j as f64, -0.03 * (0.3 * j as f64).cos()))
        .collect();
    let r: Vec<Rotation> =
        reference.rotations.iter().enumerate().map(|(i, r0)| r0.updated(&Vec3::new(0.1, -0.05 * i as f64, 0.02))).collect();
    let k: Vec<Vec3> = reference.curvature.iter().enumerate().map(|(i, k0)| k0 + Vec3::new(0.3, 0.1 * i as f64, -0.2)).collect();
    fields.evaluate(&model, &c, &r, &k, &k_s);
    let (strain, curvature) = (fields.strain.clone(), fields.curvature_strain.clone());

    let q = exp_so3(&Vec3::new(0.4, -1.2, 2.1));
    let shift = Vec3::new(3.0, -1.0, 0.5);
    let qc: Vec<Vec3> = c.iter().map(|x| q * x + shift).collect();
    let qr: Vec<Rotation> = r.iter().map(|r| Rotation::from_matrix(q * r.matrix())).collect();
    fields.evaluate(&model, &qc, &qr, &k, &k_s);
    let moved = strain
        .iter()
        .zip(&fields.strain)
        .chain(curvature.iter().zip(&fields.curvature_strain))
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max);
    (moved, reference_max)
}

fn orthonormality_drift() -> f64 {
    let mut sim = Simulation::new(&presets::cantilever()).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        sim.step().unwrap();
        worst = worst.max(sim.state().orthonormality_drift());
    }
    worst
}

/// Free-free rod under gravity with a uniform initial velocity against
/// `c₀ + v₀ t + g t²/2`.
fn free_fall() -> f64 {
    let g = Vec3::new(0.0, 0.0, -9.81);
    let v0 = Vec3::new(0.5, -0.2, 3.0);
    let mut worst: f64 = 0.0;
    for v in SolverVariant::ALL {
        let mut config = presets::pendulum().with_variant(v);
        config.supports.start = Support::Free;
        config.initial.velocity = InitialVelocity::Uniform { value: v0.into() };
        config.solver.multicorrector = converged_multicorrector();
        let mut sim = Simulation::new(&config).unwrap();
        for _ in 0..5000 {
            sim.step().unwrap();
        }
        let t = sim.time();
        for (c, c0) in sim.state().centroid.iter().zip(&sim.model().reference.centroid) {
            worst = worst.max((c - (c0 + v0 * t + g * (0.5 * t * t))).amax());
        }
    }
    worst
}

/// Flying-beam preset after its loads vanish at 5 s: largest relative
/// change of the linear momentum and of the angular momentum about the
/// mass center over the next 10⁵ steps. LU-L only, to keep the run
/// short: the 6N solve makes CN-NL slow over 1.1·10⁶ steps.
fn momentum_drift() -> (f64, f64) {
    let mut worst = (0.0f64, 0.0f64);
    for v in [SolverVariant::LuL] {
        let config = presets::flying_beam().with_variant(v);
        let h = config.time.step_s;
        let mut sim = Simulation::new(&config).unwrap();
        while sim.time() < 5.0 - 0.5 * h {
            sim.step().unwrap();
        }
        let start = sim.momentum().unwrap();
        for k in 1..=100_000 {
            sim.step().unwrap();
            if k % 1000 == 0 {
                let m = sim.momentum().unwrap();
                worst.0 = worst.0.max((m.linear - start.linear).norm() / start.linear.norm());
                worst.1 = worst.1.max((m.angular - start.angular).norm() / start.angular.norm());
            }
        }
    }
    worst
}

/// LU-NL with 200 fixed corrector passes against the direct CN-NL solve,
/// on a clamped–clamped beam where both solve the same system.
fn multicorrector_equivalence() -> f64 {
    let mut config = presets::cantilever();
    config.supports.end = Support::Clamped;
    config.loads.gravity_m_s2 = Some([0.0, 0.0, -9.81]);
    config.loads.distributed_couple = vec![LoadVector::constant([0.0, 0.3, 0.1])];
    config.initial.angular_velocity = InitialAngularVelocity::Uniform { value: [0.0, 0.0, 0.0] };
    config.time.step_s = 1e-8;
    let mut lumped = config.clone().with_variant(SolverVariant::LuNl);
    lumped.solver.multicorrector = MulticorrectorSettings::fixed(200);
    let mut states = Vec::new();
    for c in [config, lumped] {
        let mut sim = Simulation::new(&c).unwrap();
        sim.step().unwrap();
        sim.step().unwrap();
        states.push(sim.state().clone());
    }
    let fields = |s: &KinematicState| -> Vec<Vec3> {
        s.acceleration.iter().chain(&s.angular_acceleration).copied().collect()
    };
    let (a, b) = (fields(&states[0]), fields(&states[1]));
    let scale = a.iter().map(|v| v.amax()).fold(0.0, f64::max);
    a.iter().zip(&b).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max) / scale
}

#[test]
fn criterion_8_property_suite() {
    let _serial = serial();
    let unity = partition_of_unity();
    let orders = dexp_orders();
    let (moved, reference) = objectivity_and_reference();
    let drift = orthonormality_drift();
    let fall = free_fall();
    let (linear, angular) = momentum_drift();
    let equivalence = multicorrector_equivalence();
    let checks = [
        ("basis row sums", unity <= 1e-12, format!("{unity:.1e}")),
        ("dexp order", orders.iter().all(|o| (o - 2.0).abs() < 0.1), format!("{orders:.3?}")),
        ("objectivity", moved <= 1e-12, format!("{moved:.1e}")),
        ("strain-free reference", reference == 0.0, format!("{reference:e}")),
        ("orthonormality drift", drift < 1e-9, format!("{drift:.1e}")),
        ("free fall", fall <= 1e-10, format!("{fall:.1e}")),
        ("linear momentum", linear <= 1e-5, format!("{linear:.2e}")),
        ("angular momentum", angular <= 1e-4, format!("{angular:.2e}")),
        ("r=200 vs direct", equivalence <= 1e-9, format!("{equivalence:.1e}")),
    ];
    let pass = checks.iter().all(|c| c.1);
    let detail: Vec<String> =
        checks.iter().map(|(name, ok, value)| format!("{name} {value}{}", if *ok { "" } else { " (FAILED)" })).collect();
    report(8, pass, &detail.join("; "));
}
