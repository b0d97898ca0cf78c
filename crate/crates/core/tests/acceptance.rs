//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with the measured numbers (`cargo test --test acceptance --
//! --nocapture` shows the report).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subshift_spectra::cmv::{
    build_cmv, covered_arc_measure, eigenphases, verblunsky_from_subshift, DiskSampling,
};
use subshift_spectra::dynamics::{
    abelian_moments, plancherel_check, transport_exponents, LatticeOperator, WavePacket,
};
use subshift_spectra::generators::{
    standard_words, ContinuedFraction, EndpointVariant, SturmianParams, Substitution,
};
use subshift_spectra::model::PotentialModel;
use subshift_spectra::schrodinger::{
    find_square_periods, gordon_three_block, gordon_two_block, potential_from_sampling,
    transfer_product, unit_vector_fan, SamplingFunction, SolutionState,
};
use subshift_spectra::spectrum::lyapunov;
use subshift_spectra::tracemap::{fib_orbit, fibonacci, sigma_levels};
use subshift_spectra::words::complexity_profile;
use subshift_spectra::Window;

/// Criterion 1: Conserved quantity of the trace recursion: for each coupling and 1000
/// random energies, every numerically observable invariant sample stays
/// within 1e-9 (1 + lambda^2) of 1 + lambda^2/4 through k <= 30.
#[test]
fn acceptance_01_trace_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0001);
    let mut worst_ratio = 0.0f64;
    for &lambda in &[0.1, 1.0, 5.0, 8.0] {
        let tol = 1e-9 * (1.0 + lambda * lambda);
        for _ in 0..1000 {
            let e = rng.random_range(-3.0 - lambda..3.0 + lambda);
            let orbit = fib_orbit(lambda, e, 30);
            assert!(
                !orbit.invariants.is_empty(),
                "no invariant samples at E={e}"
            );
            let drift = orbit.invariant_drift();
            assert!(drift <= tol, "lambda={lambda} E={e}: drift {drift} > {tol}");
            worst_ratio = worst_ratio.max(drift / tol);
        }
    }
    println!("acceptance 01 trace invariant: PASS (worst drift/tolerance = {worst_ratio:.3e})");
}

/// Criterion 2: Standard words: the first five words match the known list and
/// |w_k| = q_k up to k = 20.
#[test]
fn acceptance_02_standard_words() {
    let cf = ContinuedFraction::golden(25);
    let sw = standard_words(&cf, 20).unwrap();
    let expect = ["1", "10", "101", "10110", "10110101"];
    for (k, want) in expect.iter().enumerate() {
        assert_eq!(sw.word_string(k + 1), *want, "w_{}", k + 1);
    }
    for k in 1..=20 {
        assert_eq!(
            sw.word(k).len() as u128,
            cf.q_u128(k).unwrap(),
            "length at k={k}"
        );
    }
    println!("acceptance 02 standard words: PASS (w_1..w_5 exact, |w_k| = q_k for k <= 20)");
}

/// Criterion 3: The rotation coding at zero phase restricted to [1, q_k] is w_k for
/// k <= 12.
#[test]
fn acceptance_03_sturmian_prefix() {
    let p = SturmianParams::golden(0.0, EndpointVariant::LeftClosed);
    let cf = ContinuedFraction::golden(25);
    let sw = standard_words(&cf, 12).unwrap();
    for k in 1..=12 {
        let q = cf.q_u128(k).unwrap() as i64;
        let w = p.window(1, q + 1).unwrap();
        assert_eq!(w.canonical(), sw.word(k), "prefix vs w_{k}");
    }
    println!("acceptance 03 rotation prefix: PASS (window[1..q_k] = w_k for k <= 12)");
}

/// Criterion 4: Complexity: p(n) = n + 1 on a length-4096 golden window for n <= 60;
/// constant windows have p = 1; periodic windows trip the periodicity
/// detector with a verified cycle.
#[test]
fn acceptance_04_complexity() {
    let p = SturmianParams::golden(0.0, EndpointVariant::LeftClosed);
    let w = p.window(1, 4097).unwrap();
    let profile = complexity_profile(&w, 60).unwrap();
    for n in 1..=60 {
        assert_eq!(profile.p(n), n + 1, "p({n})");
    }
    assert!(profile.aperiodic);

    let constant = Window::from_digits(0, &"7".repeat(512)).unwrap();
    let cp = complexity_profile(&constant, 16).unwrap();
    assert!(cp.values.iter().all(|&v| v == 1));

    let periodic = Window::from_digits(0, &"0110".repeat(128)).unwrap();
    let pp = complexity_profile(&periodic, 24).unwrap();
    let witness = pp.periodicity.expect("periodicity detected");
    assert_eq!(witness.period, 4);
    assert!(witness.cycle_check && witness.window_check);
    println!(
        "acceptance 04 complexity: PASS (Sturmian n+1 to n=60; constant 1; period-4 detected)"
    );
}

/// Criterion 5: Substitution fixed points match the printed prefixes character for
/// character.
#[test]
fn acceptance_05_substitution_prefixes() {
    let cases: [(&str, u32, &str); 6] = [
        ("1->10, 0->1", 1, "1011010110110"),
        ("1->10, 0->01", 1, "100101100110"),
        ("1->10, 0->01", 0, "0110100110010110"),
        ("1->10, 0->11", 1, "101110101011101110"),
        ("1->12, 2->13, 3->42, 4->43", 1, "1213124212134313"),
        ("1->12, 2->13, 3->42, 4->43", 4, "4342431343421242"),
    ];
    for (rules, seed, want) in cases {
        let s = Substitution::from_str_rules(rules).unwrap();
        let got = s
            .fixed_point_window(seed, want.len())
            .unwrap()
            .label_string();
        assert_eq!(got, want, "rules {rules} seed {seed}");
    }
    println!("acceptance 05 substitution prefixes: PASS (6 printed strings exact)");
}

/// Criterion 6: Band sets: nesting sigma_{k+1} u sigma_{k+2} inside sigma_k u
/// sigma_{k+1} within 1e-8, and strictly decreasing union measure, for
/// lambda in {1, 5} and k <= 12.
#[test]
fn acceptance_06_sigma_nesting_and_shrinkage() {
    for &lambda in &[1.0, 5.0] {
        let levels = sigma_levels(lambda, 14, 1e-10).unwrap();
        let union = |k: usize| levels[k - 1].union(&levels[k]);
        let mut prev_measure = f64::INFINITY;
        for k in 1..=12 {
            let u = union(k);
            assert!(
                union(k + 1).subset_of(&u, 1e-8),
                "lambda={lambda}: nesting violated at k={k}"
            );
            let m = u.measure();
            assert!(
                m < prev_measure,
                "lambda={lambda}: measure not shrinking at k={k}: {m} vs {prev_measure}"
            );
            prev_measure = m;
        }
        println!(
            "acceptance 06 sigma nesting (lambda={lambda}): PASS (k <= 12, final union measure {prev_measure:.6e})"
        );
    }
}

/// Criterion 7: Cross-check: half trace of the length-q_k transfer product equals the
/// trace-orbit value x_k within 1e-10 at the scale of the product, for
/// k <= 10, lambda in {1, 8}, 100 random energies each.
#[test]
fn acceptance_07_transfer_vs_trace_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0007);
    let p = SturmianParams::golden(0.0, EndpointVariant::LeftClosed);
    let q10 = fibonacci(10) as i64;
    let window = p.window(1, q10 + 1).unwrap();
    let mut worst = 0.0f64;
    for &lambda in &[1.0, 8.0] {
        let f = SamplingFunction::coupling(lambda);
        let pot = potential_from_sampling(&window, &f, 1, q10 + 1).unwrap();
        for _ in 0..100 {
            let e = rng.random_range(-2.0 - lambda..2.0 + lambda);
            let orbit = fib_orbit(lambda, e, 10);
            for k in 1..=10usize {
                let q = fibonacci(k) as i64;
                let tp = transfer_product(&pot, e, 1, q + 1).unwrap();
                let ln_norm = tp.ln_norm();
                let x = orbit.x(k as i64);
                if ln_norm < 200.0 {
                    let got: f64 = tp.half_trace();
                    let want = x.plain().expect("plain trace at moderate norm");
                    let tol = 1e-10 * ln_norm.exp().max(1.0);
                    let delta = (got - want).abs();
                    assert!(delta <= tol, "k={k} lambda={lambda} E={e}: {got} vs {want}");
                    worst = worst.max(delta / tol);
                } else {
                    let (t, ln) = tp.half_trace_scaled();
                    let got_ln = t.abs().ln() + ln;
                    let want_ln = x.ln_abs();
                    let delta = (got_ln - want_ln).abs();
                    let tol = 1e-10 * want_ln.abs().max(1.0);
                    assert!(delta <= tol, "k={k} lambda={lambda} E={e} (log scale)");
                    worst = worst.max(delta / tol);
                }
            }
        }
    }
    println!("acceptance 07 transfer vs trace map: PASS (worst delta/tolerance = {worst:.3e})");
}

/// Criterion 8: Lyapunov exponent oracles in the free case: gamma(3) =
/// ln((3 + sqrt 5)/2) within 1e-3 at n = 1e5, and gamma(1) <= 1e-2.
#[test]
fn acceptance_08_lyapunov_free_case() {
    let model = PotentialModel::preset("free", 0.0).unwrap();
    let est3 = lyapunov(&model, 3.0, 100_000, 1).unwrap();
    let expect = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    assert!(
        (est3.gamma - expect).abs() < 1e-3,
        "gamma(3) = {} vs {expect}",
        est3.gamma
    );
    let est1 = lyapunov(&model, 1.0, 100_000, 1).unwrap();
    assert!(est1.gamma <= 1e-2, "gamma(1) = {}", est1.gamma);
    println!(
        "acceptance 08 lyapunov free case: PASS (gamma(3) = {:.6}, gamma(1) = {:.2e})",
        est3.gamma, est1.gamma
    );
}

/// Criterion 9: Gordon criteria: the two-block inequality holds on 1e4 randomized
/// (repetition, energy, initial state) instances, and the three-block 1/2
/// bound holds on every structure detected in period-doubling windows.
#[test]
fn acceptance_09_gordon_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0009);
    // randomized two-block instances
    for trial in 0..10_000 {
        let p = rng.random_range(1..=48usize);
        let values: Vec<f64> = (0..p)
            .map(|_| [0.0, 1.0, -1.0, 2.5][rng.random_range(0..4usize)])
            .collect();
        let mut v = values.clone();
        v.extend_from_slice(&values);
        let pot = subshift_spectra::schrodinger::Potential::new(0, v);
        let e = rng.random_range(-6.0..6.0);
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let u0 = SolutionState::new(angle.cos(), angle.sin());
        let rep = gordon_two_block(&pot, p, e, u0).unwrap();
        assert!(rep.satisfied, "trial {trial}: p={p} E={e}");
    }
    // three-block structures in period-doubling windows
    let model = PotentialModel::preset("period_doubling", 1.0).unwrap();
    let f = SamplingFunction::single_site(&[0.0, 1.0]);
    let mut structures = 0usize;
    for phase in 0..6 {
        let w = model.window(phase, 6, -256, 512).unwrap();
        for origin in [-60i64, -30, 0, 30, 60] {
            let sp = find_square_periods(&w, origin, 64);
            for &p in &sp.three_block {
                structures += 1;
                // shift the potential so the repetition sits at index 0
                let shifted =
                    potential_from_sampling(&w.re_anchored(w.start() - origin), &f, -128, 256)
                        .unwrap();
                for e in [-2.5, -1.0, 0.0, 0.8, 2.0] {
                    for u0 in unit_vector_fan(32) {
                        let rep = gordon_three_block(&shifted, p, e, u0).unwrap();
                        assert!(rep.satisfied, "phase {phase} origin {origin} p={p} E={e}");
                    }
                    for _ in 0..16 {
                        let angle = rng.random_range(0.0..std::f64::consts::TAU);
                        let u0 = SolutionState::new(angle.cos(), angle.sin());
                        let rep = gordon_three_block(&shifted, p, e, u0).unwrap();
                        assert!(rep.satisfied, "phase {phase} p={p} E={e} (random)");
                    }
                }
            }
        }
    }
    assert!(structures > 0, "no three-block structures detected");
    println!(
        "acceptance 09 gordon suite: PASS (1e4 two-block instances, {structures} three-block structures)"
    );
}

/// Criterion 10: Plancherel identity: relative discrepancy below 1e-5 across the
/// 3 x 3 x 3 sweep of (model, site, averaging time) at L = 1024.
#[test]
fn acceptance_10_plancherel_sweep() {
    let l = 1024i64;
    let models = [
        PotentialModel::preset("free", 0.0).unwrap(),
        PotentialModel::preset("fibonacci", 2.0).unwrap(),
        PotentialModel::preset("period_doubling", 1.0).unwrap(),
    ];
    let mut worst = 0.0f64;
    for model in &models {
        let h = LatticeOperator::from_model(model, 0, 1, l).unwrap();
        let psi0 = WavePacket::delta(l);
        for &n in &[1i64, 3, 10] {
            for &t in &[10.0, 20.0, 50.0] {
                let rep = plancherel_check(&h, &psi0, n, t).unwrap();
                assert!(
                    rep.rel_discrepancy < 1e-5,
                    "{} n={n} T={t}: rel {}",
                    model.name,
                    rep.rel_discrepancy
                );
                worst = worst.max(rep.rel_discrepancy);
            }
        }
    }
    println!("acceptance 10 plancherel sweep: PASS (worst relative discrepancy {worst:.3e})");
}

/// Criterion 11: Transport brackets: ballistic free case, localized strong disorder,
/// and intermediate spreading at strong quasiperiodic coupling with bounded
/// edge leakage.
#[test]
fn acceptance_11_transport_brackets() {
    // free case: beta-(2) >= 0.95
    let free = PotentialModel::preset("free", 0.0).unwrap();
    let h = LatticeOperator::from_model(&free, 0, 1, 1024).unwrap();
    let psi0 = WavePacket::delta(1024);
    let t_grid: Vec<f64> = (0..9)
        .map(|i| 4.0 * (200.0f64 / 4.0).powf(i as f64 / 8.0))
        .collect();
    let report = abelian_moments(&h, &psi0, &t_grid, &[2.0]);
    assert!(
        report.usable.iter().all(|&u| u),
        "free leakage {:?}",
        report.leakage
    );
    let free_beta = transport_exponents(&report, 2.0).unwrap();
    assert!(
        free_beta.beta_minus >= 0.95,
        "free beta- {}",
        free_beta.beta_minus
    );

    // strong disorder: beta+(2) <= 0.2 (own grid, past the early transient;
    // the packet is tightly localized so late times cannot leak)
    let disorder = PotentialModel::preset("random", 8.0).unwrap();
    let h = LatticeOperator::from_model(&disorder, 0, 1, 1024).unwrap();
    let t_dis: Vec<f64> = (0..9)
        .map(|i| 10.0 * (320.0f64 / 10.0).powf(i as f64 / 8.0))
        .collect();
    let report = abelian_moments(&h, &psi0, &t_dis, &[2.0]);
    let dis_beta = transport_exponents(&report, 2.0).unwrap();
    assert!(
        dis_beta.beta_plus <= 0.2,
        "disorder beta+ {}",
        dis_beta.beta_plus
    );

    // strong quasiperiodic coupling: strictly intermediate at L = 4096
    let fib = PotentialModel::preset("fibonacci", 8.0).unwrap();
    let h = LatticeOperator::from_model(&fib, 0, 1, 4096).unwrap();
    let psi0 = WavePacket::delta(4096);
    let t_grid: Vec<f64> = (0..10)
        .map(|i| 10.0 * (1000.0f64 / 10.0).powf(i as f64 / 9.0))
        .collect();
    let report = abelian_moments(&h, &psi0, &t_grid, &[2.0]);
    let max_leak = report.leakage.iter().fold(0.0f64, |m, &l| m.max(l));
    assert!(max_leak < 0.01, "leakage {max_leak}");
    let beta = transport_exponents(&report, 2.0).unwrap();
    assert!(beta.beta_minus >= 0.05, "fib beta- {}", beta.beta_minus);
    assert!(beta.beta_plus <= 0.95, "fib beta+ {}", beta.beta_plus);
    println!(
        "acceptance 11 transport: PASS (free beta- {:.3}; disorder beta+ {:.3}; fib(8) [{:.3}, {:.3}], leakage {:.2e})",
        free_beta.beta_minus, dis_beta.beta_plus, beta.beta_minus, beta.beta_plus, max_leak
    );
}

/// Criterion 12: CMV: unitarity of the size-512 section below 1e-10; the computed
/// eigenphases are exactly unimodular by construction and reproduce the
/// matrix trace moments; resolution-matched covered-arc measures decrease
/// along the section ladder 128 -> 1024.
#[test]
fn acceptance_12_cmv() {
    let model = PotentialModel::preset("fibonacci", 1.0).unwrap();
    let sampling = DiskSampling::binary(0.3, 0.7);
    let w = model.window(0, 1, 0, 1026).unwrap();
    let coeffs = verblunsky_from_subshift(&w, &sampling).unwrap();

    let c = build_cmv(&coeffs, 512, Complex64::new(-1.0, 0.0)).unwrap();
    let defect = c.unitarity_defect();
    assert!(defect < 1e-10, "unitarity defect {defect}");

    let alpha = coeffs.values(0, 511).unwrap();
    let phases = eigenphases(&alpha, Complex64::new(-1.0, 0.0));
    assert_eq!(phases.len(), 512);
    let sum: Complex64 = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).sum();
    let sum2: Complex64 = phases
        .iter()
        .map(|&p| Complex64::from_polar(1.0, 2.0 * p))
        .sum();
    let d1 = (sum - c.trace()).norm();
    let d2 = (sum2 - c.trace_of_square()).norm();
    assert!(d1 < 1e-8 && d2 < 1e-8, "trace moments {d1:.2e} {d2:.2e}");

    // matched-resolution covered arcs along the ladder
    let mut covers = Vec::new();
    for &size in &[128usize, 256, 512, 1024] {
        let alpha = coeffs.values(0, size - 1).unwrap();
        let phases = eigenphases(&alpha, Complex64::new(-1.0, 0.0));
        covers.push(covered_arc_measure(&phases, 2.56 / size as f64));
    }
    for w in covers.windows(2) {
        assert!(w[1] < w[0], "covers {covers:?}");
    }
    println!(
        "acceptance 12 cmv: PASS (defect {defect:.2e}; trace moments {d1:.2e}/{d2:.2e}; covers {covers:?})"
    );
}
