use sbm_core::linalg::Complex;
use sbm_core::spectral1d::{max_imag, max_imag_sweep, spectrum_1d, Formulation, Spectral1dConfig, SpectralRow};

fn curve(rows: &[SpectralRow], p: usize, f: Formulation) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.degree == p && r.formulation == f)
        .map(|r| (r.xi, r.max_imag))
        .collect()
}

fn n_complex(z: &[Complex]) -> usize {
    z.iter().filter(|z| z.im.abs() > 1e-10).count()
}

#[test]
fn positive_shift_keeps_quasi_symmetric_spectrum_real() {
    let rows = max_imag_sweep(&Spectral1dConfig::default()).unwrap();
    for p in 1..=3 {
        for (xi, m) in curve(&rows, p, Formulation::QuasiSymmetric) {
            if xi >= 1.0 - 1e-12 {
                assert!(m <= 1e-10, "p={p} xi={xi} max_imag={m}");
            }
        }
    }
}

#[test]
fn penalty_free_at_zero_shift() {
    let m1 = max_imag(&spectrum_1d(1.0, 1, Formulation::PenaltyFree).unwrap());
    assert!(m1 <= 1e-10, "{m1}");
    for p in 2..=3 {
        let m = max_imag(&spectrum_1d(1.0, p, Formulation::PenaltyFree).unwrap());
        assert!(m > 1e-6, "p={p} {m}");
    }
}

#[test]
fn negative_shift_produces_complex_pairs() {
    let rows = max_imag_sweep(&Spectral1dConfig::default()).unwrap();
    for f in Formulation::ALL {
        for p in 2..=3 {
            let c = curve(&rows, p, f);
            assert!(c.iter().any(|&(xi, m)| xi < 1.0 && m > 0.01), "p={p} {}", f.name());
        }
    }
}

#[test]
fn linear_spectrum_is_always_real() {
    // the 2x2 discriminant is (2 alpha xi - sigma xi + sigma)^2
    for f in Formulation::ALL {
        for k in 1..=400 {
            let xi = k as f64 * 0.005;
            assert!(max_imag(&spectrum_1d(xi, 1, f).unwrap()) <= 1e-10, "xi={xi}");
        }
    }
}

#[test]
fn penalty_free_dominates_over_most_negative_shifts_for_quadratics() {
    let rows = max_imag_sweep(&Spectral1dConfig::default()).unwrap();
    let q = curve(&rows, 2, Formulation::QuasiSymmetric);
    let f = curve(&rows, 2, Formulation::PenaltyFree);
    let neg: Vec<_> = q.iter().zip(&f).filter(|(a, _)| a.0 < 1.0 - 1e-12).collect();
    let wins = neg.iter().filter(|(a, b)| b.1 >= a.1).count();
    assert!(2 * wins > neg.len(), "{wins}/{}", neg.len());
}

#[test]
fn curves_are_continuous_away_from_collisions() {
    let cfg = Spectral1dConfig::default();
    let rows = max_imag_sweep(&cfg).unwrap();
    for f in Formulation::ALL {
        for p in 1..=3 {
            let c = curve(&rows, p, f);
            for w in c.windows(2) {
                if (w[1].1 - w[0].1).abs() >= 0.5 {
                    // a real pair meeting the axis changes the complex count; next to
                    // such a collision the curve behaves like a square root and the
                    // step must resolve under refinement
                    let a = n_complex(&spectrum_1d(w[0].0, p, f).unwrap());
                    let b = n_complex(&spectrum_1d(w[1].0, p, f).unwrap());
                    if a == b {
                        let fine: Vec<f64> = (0..=100)
                            .map(|k| w[0].0 + (w[1].0 - w[0].0) * k as f64 / 100.0)
                            .map(|xi| max_imag(&spectrum_1d(xi, p, f).unwrap()))
                            .collect();
                        let step = fine.windows(2).map(|v| (v[1] - v[0]).abs()).fold(0.0, f64::max);
                        assert!(step < 0.25, "p={p} {} xi={} step={step}", f.name(), w[0].0);
                    }
                }
            }
        }
    }
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let cfg = Spectral1dConfig {
        xi_min: 0.5,
        xi_max: 1.5,
        xi_step: 0.1,
        ..Spectral1dConfig::default()
    };
    let a = max_imag_sweep(&cfg).unwrap();
    assert_eq!(a, max_imag_sweep(&cfg).unwrap());
    assert_eq!(a.len(), 11 * 3 * 2);
    for p in 1..=3 {
        let c = curve(&a, p, Formulation::QuasiSymmetric);
        assert!(c.windows(2).all(|w| w[0].0 < w[1].0));
    }
    assert_eq!(Formulation::from_name("penalty_free"), Some(Formulation::PenaltyFree));
}
