//! Acceptance gate: one test per criterion, each printing a PASS line with
//! its measured margin. Tolerances and runtime budgets are asserted, not
//! just reported.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jc_teleport::channel::{alpha_set, channel_state, ChannelParams};
use jc_teleport::fisher::{
    qfi_matrix_form, qfi_sld, qfi_spectral, rho_derivative_analytic, rho_derivative_fd,
    rho_derivative_richardson, teleported_family, teleported_qfi, Derivative, QfiEngine,
    DEFAULT_FD_STEP, DEFAULT_SUPPORT_TOL,
};
use jc_teleport::linalg::{eigh, expectation, ComplexMatrix, DensityMatrix4};
use jc_teleport::teleport::{
    bob_state_ftp, fidelity_closed_ftp, fidelity_overlap, input_state_vector, Construction,
    InputState, Protocol,
};

use jc_teleport_cli::csv::parse_csv;
use jc_teleport_cli::presets::{resolve, PRESET_IDS};
use jc_teleport_cli::sweep::{run_sweep, Quantity, SweepSpec, TauGrid};

fn draw_params(rng: &mut ChaCha8Rng) -> ChannelParams {
    let n = rng.random_range(1..=5u32);
    let nbar = rng.random_range(0.5..1000.0);
    let delta = rng.random_range(0.0..2.0);
    let tau = rng.random_range(0.0..50.0);
    ChannelParams::new(n, nbar, delta, tau).expect("in-range draw")
}

#[test]
fn c01_alpha_identities_on_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let mut worst_sum: f64 = 0.0;
    let mut worst_coh: f64 = 0.0;
    for _ in 0..1000 {
        let a = alpha_set(&draw_params(&mut rng)).unwrap();
        worst_sum = worst_sum.max((a.a1 + a.a2 + a.a4 + a.a5 - 1.0).abs());
        worst_coh = worst_coh.max((a.a3.norm_sqr() - a.a2 * a.a4).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst_sum <= 1e-12, "normalization residual {worst_sum:e}");
    assert!(worst_coh <= 1e-12, "coherence residual {worst_coh:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "PASS c01 alpha identities: 1000 draws, residuals {worst_sum:.2e} / {worst_coh:.2e} in {elapsed:?}"
    );
}

#[test]
fn c02_channel_state_is_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst_neg: f64 = 0.0;
    for _ in 0..1000 {
        // Hermiticity and unit trace are enforced by the DensityMatrix4
        // constructor inside channel_state; positivity is checked here.
        let rho = channel_state(&draw_params(&mut rng)).unwrap();
        let min_eig = eigh(rho.matrix()).unwrap().eigenvalues()[0];
        worst_neg = worst_neg.max(-min_eig);
    }
    assert!(worst_neg <= 1e-10, "negative eigenvalue excess {worst_neg:e}");
    println!("PASS c02 channel states physical: min eigenvalue >= -{worst_neg:.2e} on 1000 draws");
}

#[test]
fn c03_single_copy_fidelity_matches_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let p = draw_params(&mut rng);
        let s = InputState::new(
            rng.random_range(0.0..std::f64::consts::PI),
            rng.random_range(0.0..2.0 * std::f64::consts::PI),
        )
        .unwrap();
        let printed = fidelity_closed_ftp(&p, &s).unwrap();
        let bob = bob_state_ftp(&p, &s, Construction::ClosedForm).unwrap();
        let raw = bob.rho.matrix().scale_re(bob.raw_trace);
        let expect = expectation(&input_state_vector(&s), &raw).unwrap().re;
        worst = worst.max((printed - expect).abs());
    }
    assert!(worst <= 1e-12, "fidelity residual {worst:e}");
    println!("PASS c03 printed single-copy fidelity = raw expectation: residual {worst:.2e} on 500 points");
}

fn random_unit_vectors(rng: &mut ChaCha8Rng) -> ([Complex64; 4], [Complex64; 4]) {
    let draw = |rng: &mut ChaCha8Rng| {
        let mut v = [Complex64::new(0.0, 0.0); 4];
        for x in &mut v {
            *x = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        v
    };
    let normalize = |v: &mut [Complex64; 4]| {
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= n;
        }
    };
    let mut u = draw(rng);
    normalize(&mut u);
    let mut v = draw(rng);
    // Gram-Schmidt against u
    let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    for (x, ux) in v.iter_mut().zip(&u) {
        *x -= proj * ux;
    }
    normalize(&mut v);
    (u, v)
}

fn pure_state_outer(psi: &[Complex64; 4]) -> DensityMatrix4 {
    DensityMatrix4::new(jc_teleport::linalg::outer(psi)).unwrap()
}

fn pure_state_derivative(psi: &[Complex64; 4], dpsi: &[Complex64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| dpsi[i] * psi[j].conj() + psi[i] * dpsi[j].conj())
}

fn pure_reference(psi: &[Complex64; 4], dpsi: &[Complex64; 4]) -> f64 {
    let dd: f64 = dpsi.iter().map(|x| x.norm_sqr()).sum();
    let pd: Complex64 = psi.iter().zip(dpsi).map(|(a, b)| a.conj() * b).sum();
    4.0 * (dd - pd.norm_sqr())
}

#[test]
fn c04_engine_triangle_and_pure_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);

    // pairwise engine agreement on 500 synthetic full-rank states with
    // eigenvalue gaps >= 0.02, so the spectral engine is off its refusal set
    let mut worst_pair: f64 = 0.0;
    for _ in 0..500 {
        let basis = eigh(
            &ComplexMatrix::from_fn(4, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
            .hermitian_part(),
        )
        .unwrap();
        let mut lambda = [0.0f64; 4];
        let mut acc = rng.random_range(0.05..1.0);
        for l in &mut lambda {
            *l = acc;
            acc += rng.random_range(0.05..1.0);
        }
        let total: f64 = lambda.iter().sum();
        for l in &mut lambda {
            *l /= total;
        }
        let rho_m = ComplexMatrix::from_fn(4, |i, j| {
            (0..4)
                .map(|k| basis.vector(k)[i] * lambda[k] * basis.vector(k)[j].conj())
                .sum()
        });
        let rho = DensityMatrix4::new(rho_m.hermitian_part()).unwrap();

        let h = ComplexMatrix::from_fn(4, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .hermitian_part();
        let tr = jc_teleport::linalg::trace(&h).re / 4.0;
        let drho = h
            .sub(&ComplexMatrix::identity(4).scale_re(tr))
            .unwrap();

        let mf = qfi_matrix_form(&rho, &drho, DEFAULT_SUPPORT_TOL).unwrap().value;
        let sld = qfi_sld(&rho, &drho, DEFAULT_SUPPORT_TOL).unwrap().value;
        let sp = qfi_spectral(&rho, &drho, DEFAULT_SUPPORT_TOL).unwrap().value;
        let scale = mf.abs().max(1.0);
        worst_pair = worst_pair
            .max((mf - sld).abs() / scale)
            .max((mf - sp).abs() / scale)
            .max((sld - sp).abs() / scale);
    }
    assert!(worst_pair <= 1e-8, "engine disagreement {worst_pair:e}");

    // pure families: QFI must equal 4(<dpsi|dpsi> - |<psi|dpsi>|^2)
    let mut worst_pure: f64 = 0.0;
    for theta in [0.3, std::f64::consts::FRAC_PI_4, 1.0, 2.2] {
        let (c, s) = (theta.cos(), theta.sin());
        let psi = [
            Complex64::new(c, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ];
        let dpsi = [
            Complex64::new(-s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(c, 0.0),
        ];
        let f = qfi_matrix_form(
            &pure_state_outer(&psi),
            &pure_state_derivative(&psi, &dpsi),
            DEFAULT_SUPPORT_TOL,
        )
        .unwrap()
        .value;
        let r = pure_reference(&psi, &dpsi);
        assert!((r - 4.0).abs() <= 1e-12);
        worst_pure = worst_pure.max((f - r).abs());
    }
    for _ in 0..20 {
        let (u, v) = random_unit_vectors(&mut rng);
        let w: f64 = rng.random_range(0.3..2.0);
        let chi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xi: f64 = rng.random_range(0.2..1.3);
        let (c, s) = ((w * xi).cos(), (w * xi).sin());
        let e = Complex64::from_polar(1.0, chi);
        let mut psi = [Complex64::new(0.0, 0.0); 4];
        let mut dpsi = [Complex64::new(0.0, 0.0); 4];
        for i in 0..4 {
            psi[i] = c * u[i] + e * s * v[i];
            dpsi[i] = w * (-s * u[i] + e * c * v[i]);
        }
        let f = qfi_matrix_form(
            &pure_state_outer(&psi),
            &pure_state_derivative(&psi, &dpsi),
            DEFAULT_SUPPORT_TOL,
        )
        .unwrap()
        .value;
        let r = pure_reference(&psi, &dpsi);
        worst_pure = worst_pure.max((f - r).abs() / r.abs().max(1.0));
    }
    assert!(worst_pure <= 1e-9, "pure family residual {worst_pure:e}");
    println!(
        "PASS c04 engine triangle {worst_pair:.2e} on 500 pairs; pure families {worst_pure:.2e}"
    );
}

#[test]
fn c05_analytic_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let p = draw_params(&mut rng);
        let theta = rng.random_range(0.06..std::f64::consts::PI - 0.06);
        let phi = rng.random_range(0.0..2.0 * std::f64::consts::PI);
        let s = InputState::new(theta, phi).unwrap();
        let protocol = if i % 2 == 0 { Protocol::Ftp } else { Protocol::Stp };
        let analytic = rho_derivative_analytic(protocol, &p, &s).unwrap();
        let family = teleported_family(protocol, p, phi);
        let central = rho_derivative_fd(&family, theta, DEFAULT_FD_STEP).unwrap();
        let richardson = rho_derivative_richardson(&family, theta, DEFAULT_FD_STEP).unwrap();
        worst = worst
            .max(analytic.max_abs_diff(&central).unwrap())
            .max(analytic.max_abs_diff(&richardson).unwrap());
    }
    assert!(worst <= 1e-6, "derivative residual {worst:e}");
    println!("PASS c05 analytic vs finite-difference derivatives: {worst:.2e} entrywise on 100 points x 2 protocols");
}

#[test]
fn c06_resonance_is_phase_independent() {
    let phis = [0.0, std::f64::consts::FRAC_PI_3, std::f64::consts::PI];
    let mut worst: f64 = 0.0;
    for n in [0u32, 1, 2, 3] {
        for nbar in [2.0, 6.0] {
            for tau in [0.7, 3.3, 11.0] {
                for theta in [0.3, std::f64::consts::FRAC_PI_4, 1.2] {
                    let p = ChannelParams::new(n, nbar, 0.0, tau).unwrap();
                    let mut raws = Vec::new();
                    let mut norms = Vec::new();
                    let mut qfis = Vec::new();
                    for &phi in &phis {
                        let s = InputState::new(theta, phi).unwrap();
                        raws.push(fidelity_closed_ftp(&p, &s).unwrap());
                        let bob = bob_state_ftp(&p, &s, Construction::ClosedForm).unwrap();
                        norms.push(fidelity_overlap(&bob.rho, &s).unwrap());
                        qfis.push(
                            teleported_qfi(
                                Protocol::Ftp,
                                &p,
                                &s,
                                QfiEngine::MatrixForm,
                                Derivative::Analytic,
                            )
                            .unwrap(),
                        );
                    }
                    for vals in [&raws, &norms, &qfis] {
                        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        worst = worst.max(hi - lo);
                    }
                }
            }
        }
    }
    assert!(worst <= 1e-12, "phase dependence {worst:e} on resonance");
    println!("PASS c06 resonance fidelity and QFI phase-independent: spread {worst:.2e}");
}

fn preset_norm_column(result: &jc_teleport_cli::sweep::SweepResult, col: usize) -> Vec<f64> {
    result.rows.iter().map(|r| r[col]).collect()
}

fn count_extrema(values: &[f64]) -> (usize, usize) {
    let mut maxima = 0;
    let mut minima = 0;
    for w in values.windows(3) {
        if w[1] > w[0] && w[1] > w[2] {
            maxima += 1;
        }
        if w[1] < w[0] && w[1] < w[2] {
            minima += 1;
        }
    }
    (maxima, minima)
}

#[test]
fn c07_fig1b_oscillation_profile() {
    let start = Instant::now();
    let preset = resolve("fig1b").unwrap();
    let result = run_sweep(&preset.spec).unwrap();
    // series nbar2 occupies columns 1 (raw) and 2 (norm)
    assert_eq!(result.columns[2], "nbar2_norm");
    let curve = preset_norm_column(&result, 2);
    let (maxima, minima) = count_extrema(&curve);
    let lo = curve.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    assert!(maxima >= 3, "{maxima} local maxima");
    assert!(minima >= 3, "{minima} local minima");
    assert!(lo < 0.5 && 0.5 < hi, "range [{lo}, {hi}] does not straddle 0.5");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS c07 fig1b nbar=2 curve: {maxima} maxima, {minima} minima, range [{lo:.4}, {hi:.4}] in {elapsed:?}"
    );
}

fn max_norm_fidelity(nbar: f64) -> f64 {
    let spec = SweepSpec {
        protocol: Protocol::Ftp,
        quantity: Quantity::FidelityClosed,
        n: 2,
        nbar: vec![nbar],
        delta: vec![0.0],
        tau: TauGrid {
            start: 0.0,
            stop: 20.0,
            count: 2000,
        },
        theta: std::f64::consts::FRAC_PI_2,
        phi: 0.0,
        ..SweepSpec::default()
    };
    run_sweep(&spec)
        .unwrap()
        .rows
        .iter()
        .map(|r| r[2])
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn c08_large_field_limit_reaches_high_fidelity() {
    let big = max_norm_fidelity(1000.0);
    let small = max_norm_fidelity(2.0);
    assert!(big >= 0.95, "max fidelity {big} at nbar=1000");
    assert!(small < big, "{small} !< {big}");
    println!("PASS c08 max normalized fidelity {big:.6} at nbar=1000 > {small:.6} at nbar=2");
}

#[test]
fn c09_fidelity_ceiling_grows_with_field() {
    let preset = resolve("fig1b").unwrap();
    let result = run_sweep(&preset.spec).unwrap();
    assert_eq!(
        result.columns,
        [
            "tau",
            "nbar2_raw",
            "nbar2_norm",
            "nbar4_raw",
            "nbar4_norm",
            "nbar6_raw",
            "nbar6_norm"
        ]
    );
    let maxes: Vec<f64> = [2usize, 4, 6]
        .iter()
        .map(|&c| {
            preset_norm_column(&result, c)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    for pair in maxes.windows(2) {
        assert!(
            pair[1] >= pair[0] - 1e-6,
            "ceiling decreased: {} -> {}",
            pair[0],
            pair[1]
        );
    }
    println!(
        "PASS c09 fidelity ceilings nondecreasing over nbar 2,4,6: {:.6}, {:.6}, {:.6}",
        maxes[0], maxes[1], maxes[2]
    );
}

#[test]
fn c10_selftest_reports_two_copy_table() {
    let out = Command::new(env!("CARGO_BIN_EXE_jctp"))
        .arg("selftest")
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "selftest failed:\n{text}");
    let mut points = 0;
    for line in text.lines() {
        if !(line.contains("printed=") && line.contains("overlap=")) {
            continue;
        }
        points += 1;
        for key in ["printed=", "overlap="] {
            let tail = &line[line.find(key).unwrap() + key.len()..];
            let token: String = tail
                .chars()
                .take_while(|c| !c.is_whitespace())
                .collect();
            let value: f64 = token.parse().unwrap_or_else(|_| panic!("bad {key}{token}"));
            // finiteness is asserted; agreement between the two values is
            // deliberately not
            assert!(value.is_finite(), "{line}");
        }
    }
    assert_eq!(points, 10, "expected 10 two-copy report points:\n{text}");
    println!("PASS c10 selftest reports printed and normalized two-copy fidelity at 10 points");
}

#[test]
fn c11_all_figure_presets_emit_valid_csv() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    for id in PRESET_IDS {
        let out = Command::new(env!("CARGO_BIN_EXE_jctp"))
            .args(["figure", id])
            .current_dir(dir.path())
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "{id} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );

        let preset = resolve(id).unwrap();
        let n_series = preset.spec.nbar.len() * preset.spec.delta.len();
        let per_series = if preset.spec.quantity == Quantity::QfiTheta {
            1
        } else {
            2
        };
        let parsed =
            parse_csv(&std::fs::read_to_string(dir.path().join(format!("{id}.csv"))).unwrap())
                .unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(parsed.columns.len(), 1 + n_series * per_series, "{id}");
        assert_eq!(parsed.rows.len(), 2000, "{id}");
        assert_eq!(parsed.rows[0][0], 0.0, "{id}");
        assert_eq!(parsed.rows[1999][0], 20.0, "{id}");
        for row in &parsed.rows {
            for v in row {
                assert!(v.is_finite(), "{id} contains a non-finite value");
            }
        }
        let script =
            std::fs::read_to_string(dir.path().join(format!("{id}.gp"))).unwrap();
        assert!(script.contains(&format!("'{id}.csv'")), "{id} script");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("PASS c11 all 30 presets completed with schema-valid CSV in {elapsed:?}");
}
