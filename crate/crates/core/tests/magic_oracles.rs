mod common;

use common::{integrate, integrate_2d, REFERENCE_SIGMA2};
use gkp_cluster::magic_distill::{
    distill_stats, gaussian_2d, hadamard_indicator, laguerre, lattice_sums, required_truncation, wigner_number,
    wigner_pi, wigner_pi_blurred, DISTILLATION_THRESHOLD,
};
use gkp_cluster::DistillationConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `L_n(x) = Σ_k (−1)^k C(n,k) x^k / k!` in exact rationals.
fn laguerre_exact(n: u32, x: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut binom = BigInt::one();
    let mut fact = BigInt::one();
    let mut pow = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n - k + 1) / BigInt::from(k);
            fact *= BigInt::from(k);
            pow *= x;
        }
        let term = BigRational::new(binom.clone(), fact.clone()) * &pow;
        sum = if k % 2 == 0 { sum + term } else { sum - term };
    }
    sum
}

#[test]
fn laguerre_matches_exact_coefficients() {
    let x = BigRational::new(37.into(), 10.into());
    for n in [0, 1, 2, 5, 10, 15] {
        let want = laguerre_exact(n, &x).to_f64().unwrap();
        let got = laguerre(n, 3.7);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "n={n}: {got} vs {want}");
    }
    assert_eq!(laguerre(0, 12.5), 1.0);
    assert_eq!(laguerre(1, 2.0), -1.0);
}

#[test]
fn number_state_wigner_functions_are_orthonormal() {
    assert!((wigner_number(0, 0.0) - 1.0 / PI).abs() < 1e-15);
    assert!((wigner_number(1, 0.0) + 1.0 / PI).abs() < 1e-15);
    for n in 0..=5 {
        for m in 0..=5 {
            let overlap =
                2.0 * PI * integrate(0.0, 12.0, 96, 20, |r| 2.0 * PI * r * wigner_number(n, r) * wigner_number(m, r));
            let want = if n == m { 1.0 } else { 0.0 };
            assert!((overlap - want).abs() <= 1e-8, "n={n} m={m}: {overlap}");
        }
    }
}

/// Blurred `Π₀` Wigner function by direct 2-D convolution of the smooth part, plus
/// the blurred point mass.
fn blurred_by_quadrature(r: f64, tau2: f64) -> f64 {
    let half = 9.0 * tau2.sqrt();
    let panels = 48 + (8.0 * (r + half) * half).ceil() as usize;
    let smooth = integrate_2d((-half, half), (-half, half), panels, 16, |ux, uy| {
        let x2 = (r + ux).powi(2) + uy * uy;
        gaussian_2d(tau2, ux * ux + uy * uy) * (1.0 + 2.0 * x2.sin() + 2.0 * x2.cos()) / (8.0 * PI)
    });
    smooth + gaussian_2d(tau2, r * r) / 8.0
}

#[test]
fn blurred_closed_form_matches_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut points = vec![(1.3, 0.0133)];
    points.extend((0..20).map(|_| (rng.gen_range(0.0..2.5), rng.gen_range(0.005..0.3))));
    for (r, tau2) in points {
        let want = blurred_by_quadrature(r, tau2);
        let got = wigner_pi_blurred(0, r, tau2).unwrap().total();
        assert!((got - want).abs() <= 1e-8 * want.abs(), "r={r} τ²={tau2}: {got} vs {want}");
    }
}

#[test]
fn blurred_forms_reduce_to_unblurred() {
    for k in 1..=10 {
        let r = 0.45 * k as f64;
        for a in [0u8, 2] {
            let got = wigner_pi_blurred(a, r, 1e-10).unwrap().smooth;
            let want = wigner_pi(a, r).unwrap().smooth;
            assert!((got - want).abs() <= 1e-6, "a={a} r={r}");
        }
    }
    let at_sqrt_pi = wigner_pi_blurred(0, PI.sqrt(), 1e-12).unwrap().smooth;
    assert!((at_sqrt_pi + 1.0 / (8.0 * PI)).abs() < 1e-9);
}

#[test]
fn projector_family_is_complete() {
    for k in 0..50 {
        let r = 0.1 * k as f64;
        let parts: Vec<_> = (0..4).map(|a| wigner_pi(a, r).unwrap()).collect();
        let smooth: f64 = parts.iter().map(|w| w.smooth).sum();
        let delta: f64 = parts.iter().map(|w| w.delta_coefficient).sum();
        assert!((smooth - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(delta, 0.0);
        let tau2 = 0.02 + 0.01 * k as f64;
        let even = wigner_pi_blurred(0, r, tau2).unwrap().total() + wigner_pi_blurred(2, r, tau2).unwrap().total();
        let want = (1.0 + PI * gaussian_2d(tau2, r * r)) / (4.0 * PI);
        assert!((even - want).abs() <= 1e-14 * want);
    }
    assert!(wigner_pi(4, 1.0).is_err());
    assert!(wigner_pi_blurred(1, 1.0, 0.1).is_err());
}

#[test]
fn indicator_is_symmetric_under_exchange() {
    for j in 0..2u8 {
        for t in -20..=20 {
            for s in -20..=20 {
                assert_eq!(hadamard_indicator(j, t, s), hadamard_indicator(j, s, t));
            }
        }
    }
    assert_eq!(hadamard_indicator(0, 0, 0), 1.0);
    assert_eq!(hadamard_indicator(0, 0, 1), FRAC_1_SQRT_2);
    assert_eq!(hadamard_indicator(1, 2, 1), FRAC_1_SQRT_2);
    assert_eq!(hadamard_indicator(0, 1, 1), 0.0);
}

#[test]
fn sums_are_stable_under_larger_truncation() {
    for s2 in REFERENCE_SIGMA2 {
        let cfg = DistillationConfig::new(s2);
        let base = required_truncation(cfg.envelope_variance);
        for j in 0..2 {
            let a = lattice_sums(&cfg, j).unwrap();
            let b = lattice_sums(&cfg.with_truncation(base + 10), j).unwrap();
            let c = lattice_sums(&cfg.with_truncation(2 * base), j).unwrap();
            assert_eq!(a.truncation, base);
            for (x, y) in [(a.a_norm, b.a_norm), (a.a0, b.a0), (a.a2, b.a2), (a.a0, c.a0), (a.a2, c.a2)] {
                assert!((x - y).abs() <= 1e-10 * x.abs(), "σ²={s2} j={j}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn error_rate_is_flat_across_thresholds() {
    let eps: Vec<f64> =
        REFERENCE_SIGMA2.iter().map(|&s2| distill_stats(&DistillationConfig::new(s2)).unwrap().epsilon).collect();
    let max = eps.iter().cloned().fold(f64::MIN, f64::max);
    let min = eps.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max - min <= 0.003, "{eps:?}");
}

#[test]
fn default_protocol_values() {
    for s2 in REFERENCE_SIGMA2 {
        let r = distill_stats(&DistillationConfig::new(s2)).unwrap();
        assert!((0.124..=0.127).contains(&r.epsilon), "{s2}: {}", r.epsilon);
        assert!((r.p_even - 2.0 / 3.0).abs() <= 0.01);
        assert!(r.epsilon < DISTILLATION_THRESHOLD);
        for p in [r.p0_plus, r.p2_plus, r.p0_minus, r.p2_minus] {
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn smaller_products_lower_the_error() {
    for s2 in REFERENCE_SIGMA2 {
        let half = distill_stats(&DistillationConfig::new(s2).with_product(0.5)).unwrap();
        assert!((half.epsilon - 0.056).abs() <= 0.002, "{s2}: {}", half.epsilon);
        assert!((half.p_even - 0.75).abs() <= 0.01);
        let quarter = distill_stats(&DistillationConfig::new(s2).with_product(0.25)).unwrap();
        assert!(quarter.epsilon < 0.005, "{s2}: {}", quarter.epsilon);
    }
}

#[test]
fn narrow_envelope_keeps_only_the_origin() {
    let env = 1e-3;
    let cfg = DistillationConfig::new(0.01).with_variances(0.03, env);
    for j in 0..2 {
        let sums = lattice_sums(&cfg, j).unwrap();
        let origin = 1.0 / (2.0 * PI * env);
        assert!((sums.a_norm - origin).abs() <= 1e-12 * origin);
    }
}
