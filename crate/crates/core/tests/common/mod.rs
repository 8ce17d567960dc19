#![allow(dead_code)]

use gkp_cluster::cluster_gates::{Rail, StepLabel};
use gkp_cluster::{Gate, NoiseForm, SymbolicCovariance};

pub fn f(d: i64, e: i64) -> NoiseForm {
    NoiseForm::new(d, e)
}

fn m2(a: NoiseForm, b: NoiseForm, c: NoiseForm) -> SymbolicCovariance {
    SymbolicCovariance::from_rows(&[&[a, b], &[b, c]]).unwrap()
}

fn m4(rows: [[NoiseForm; 4]; 4]) -> SymbolicCovariance {
    let refs: Vec<&[NoiseForm]> = rows.iter().map(|r| r.as_slice()).collect();
    SymbolicCovariance::from_rows(&refs).unwrap()
}

/// Reference noise-evolution table, entry by entry.
pub fn reference_rows(gate: Gate) -> Vec<(StepLabel, SymbolicCovariance)> {
    use StepLabel::*;
    let z = NoiseForm::ZERO;
    match gate {
        Gate::I => vec![
            (Initial, m2(f(1, 0), z, f(2, 1))),
            (Step(1), m2(f(2, 1), z, f(1, 1))),
            (Step(2), m2(f(1, 1), z, f(2, 2))),
            (Step(3), m2(f(2, 2), z, f(1, 2))),
            (Corrected(3), m2(f(1, 0), z, f(2, 2))),
            (Step(4), m2(f(2, 2), z, f(1, 1))),
            (Corrected(4), m2(f(1, 0), z, f(2, 1))),
        ],
        Gate::P => vec![
            (Initial, m2(f(1, 0), z, f(2, 1))),
            (Step(1), m2(f(3, 1), f(-1, 0), f(1, 1))),
            (Step(2), m2(f(1, 1), f(1, 0), f(3, 2))),
            (Step(3), m2(f(3, 2), f(-1, 0), f(1, 2))),
            (Corrected(3), m2(f(1, 0), z, f(2, 2))),
            (Step(4), m2(f(2, 2), z, f(1, 1))),
            (Corrected(4), m2(f(1, 0), z, f(2, 1))),
        ],
        Gate::F => vec![
            (Initial, m2(f(1, 0), z, f(2, 1))),
            (Step(1), m2(f(3, 1), f(-1, 0), f(1, 1))),
            (Step(2), m2(f(2, 2), f(-2, -1), f(3, 2))),
            (Step(3), m2(f(1, 2), f(0, -1), f(2, 3))),
            (Corrected(3), m2(f(1, 0), z, f(3, 3))),
            (Step(4), m2(f(3, 3), z, f(1, 1))),
            (Corrected(4), m2(f(1, 0), z, f(2, 1))),
        ],
        Gate::CZ => {
            let d = f(1, 0);
            let nd = f(-1, 0);
            vec![
                (Initial, m4([[d, z, z, z], [z, d, z, z], [z, z, f(2, 1), z], [z, z, z, f(2, 1)]])),
                (AfterCz, m4([[d, z, z, nd], [z, d, nd, z], [z, nd, f(3, 2), z], [nd, z, z, f(3, 2)]])),
                (Step(1), m4([[f(3, 2), z, z, d], [z, f(3, 2), d, z], [z, d, f(1, 1), z], [d, z, z, f(1, 1)]])),
                (Step(2), m4([[f(1, 1), z, z, nd], [z, f(1, 1), nd, z], [z, nd, f(3, 3), z], [nd, z, z, f(3, 3)]])),
                (Step(3), m4([[f(3, 3), z, z, d], [z, f(3, 3), d, z], [z, d, f(1, 2), z], [d, z, z, f(1, 2)]])),
                (Corrected(3), m4([[d, z, z, z], [z, d, z, z], [z, z, f(2, 2), z], [z, z, z, f(2, 2)]])),
                (Step(4), m4([[f(2, 2), z, z, z], [z, f(2, 2), z, z], [z, z, f(1, 1), z], [z, z, z, f(1, 1)]])),
                (Corrected(4), m4([[d, z, z, z], [z, d, z, z], [z, z, f(2, 1), z], [z, z, z, f(2, 1)]])),
            ]
        }
    }
}

/// Reference correction variances `(step, rail, σ²_err)`.
pub fn reference_err_vars(gate: Gate) -> Vec<(usize, Rail, NoiseForm)> {
    match gate {
        Gate::I => vec![(3, Rail::Single, f(3, 2)), (4, Rail::Single, f(3, 2))],
        Gate::P => vec![(3, Rail::Single, f(4, 2)), (4, Rail::Single, f(3, 2))],
        Gate::F => vec![(3, Rail::Single, f(2, 2)), (4, Rail::Single, f(4, 3))],
        Gate::CZ => vec![
            (3, Rail::Top, f(4, 3)),
            (3, Rail::Bottom, f(4, 3)),
            (4, Rail::Top, f(3, 2)),
            (4, Rail::Bottom, f(3, 2)),
        ],
    }
}

/// Reference threshold table: `(p_FT, σ² × 10³, dB)`.
pub const REFERENCE_THRESHOLDS: [(f64, f64, f64); 6] = [
    (1e-1, 26.0, 12.8),
    (1e-2, 13.8, 15.6),
    (1e-3, 9.16, 17.4),
    (1e-4, 6.80, 18.7),
    (1e-5, 5.38, 19.7),
    (1e-6, 4.44, 20.5),
];

pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule on `[a, b]`.
pub fn rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        for &(x, w) in &base {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

pub fn integrate(a: f64, b: f64, panels: usize, order: usize, f: impl Fn(f64) -> f64) -> f64 {
    rule(a, b, panels, order).into_iter().map(|(x, w)| w * f(x)).sum()
}

pub fn integrate_2d(
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    panels: usize,
    order: usize,
    f: impl Fn(f64, f64) -> f64,
) -> f64 {
    let xs = rule(ax, bx, panels, order);
    let ys = rule(ay, by, panels, order);
    xs.iter().map(|&(x, wx)| wx * ys.iter().map(|&(y, wy)| wy * f(x, y)).sum::<f64>()).sum()
}

/// Variances of the threshold table, as listed.
pub const REFERENCE_SIGMA2: [f64; 6] = [26.0e-3, 13.8e-3, 9.16e-3, 6.80e-3, 5.38e-3, 4.44e-3];
