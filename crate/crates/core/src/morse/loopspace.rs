//! Broken geodesics on the circle: `k` marked points `θ₁, …, θ_k` with
//! consecutive gaps compared against the round gap `2πn/k`.
//!
//! The energy `E = Σᵢ 2(1 − cos(θ_{i+1} − θᵢ − 2πn/k)) + ε cos θ₁` is a smooth
//! stand-in for the squared gap distance (it agrees to fourth order at the
//! round configuration). At `ε = 0` the round loops form a circle of minima;
//! the perturbation leaves one minimum and one index-1 point on it. The
//! sector is the sublevel set `E < 1`.

use std::f64::consts::PI;

use super::surface::{Manifold, Matrix, ScalarFn, SurfaceSpec, Vector};
use super::Tolerances;
use crate::error::{Error, Result};

pub const SECTOR_BOUND: f64 = 1.0;

fn energy_parts(
    k: usize,
    n: i64,
) -> (
    impl Fn(&Vector) -> f64 + Send + Sync,
    impl Fn(&Vector) -> Vector + Send + Sync,
    impl Fn(&Vector) -> Matrix + Send + Sync,
) {
    let c = 2.0 * PI * n as f64 / k as f64;
    let gap = move |x: &Vector, i: usize| x[(i + 1) % k] - x[i] - c;
    let value = move |x: &Vector| (0..k).map(|i| 2.0 * (1.0 - gap(x, i).cos())).sum::<f64>();
    let grad = move |x: &Vector| {
        let mut g = Vector::zeros(k);
        for i in 0..k {
            let s = 2.0 * gap(x, i).sin();
            g[(i + 1) % k] += s;
            g[i] -= s;
        }
        g
    };
    let hess = move |x: &Vector| {
        let mut h = Matrix::zeros(k, k);
        for i in 0..k {
            let j = (i + 1) % k;
            let c2 = 2.0 * gap(x, i).cos();
            h[(i, i)] += c2;
            h[(j, j)] += c2;
            h[(i, j)] -= c2;
            h[(j, i)] -= c2;
        }
        h
    };
    (value, grad, hess)
}

/// The perturbed energy on the flat `k`-torus for winding `n`.
pub fn broken_geodesic_loopspace(k: usize, n: i64, eps: f64) -> Result<SurfaceSpec> {
    if k < 2 {
        return Err(Error::Precondition(format!("broken geodesics need k >= 2 segments, got {k}")));
    }
    if !eps.is_finite() {
        return Err(Error::Precondition("perturbation must be finite".into()));
    }
    let (e, de, he) = energy_parts(k, n);
    let f = ScalarFn::new(move |x| e(x) + eps * x[0].cos())
        .with_gradient(move |x| {
            let mut g = de(x);
            g[0] -= eps * x[0].sin();
            g
        })
        .with_hessian(move |x| {
            let mut h = he(x);
            h[(0, 0)] -= eps * x[0].cos();
            h
        });

    // a degenerate circle of critical points shows up as a near-zero
    // Hessian eigenvalue at the round loop through θ₁ = 0
    let step = 2.0 * PI * n as f64 / k as f64;
    let round = |phi: f64| Vector::from_fn(k, |i, _| phi + step * i as f64);
    let h = f.hessian(&round(0.0));
    let smallest = h.symmetric_eigenvalues().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let tol = Tolerances::default().tol_nondeg;
    if smallest < tol {
        return Err(Error::PerturbationTooSmall(format!(
            "ε = {eps}: Hessian at the round loop has eigenvalue {smallest:.3e} below {tol:.0e}; the round loops form a degenerate critical circle"
        )));
    }

    let m: usize = match k {
        2 => 16,
        3 => 10,
        _ => 6,
    };
    let mut seeds: Vec<Vector> = (0..16).map(|i| round(2.0 * PI * i as f64 / 16.0 + 0.1)).collect();
    let total = m.pow(k as u32);
    for idx in 0..total {
        let mut r = idx;
        let x = Vector::from_fn(k, |_, _| {
            let v = 2.0 * PI * ((r % m) as f64 + 0.5) / m as f64;
            r /= m;
            v
        });
        if f.value(&x) < SECTOR_BOUND {
            seeds.push(x);
        }
    }
    Ok(SurfaceSpec {
        name: format!("loopspace:{k},{n},{eps}"),
        manifold: Manifold::FlatTorus { k },
        f,
        seeds,
        sublevel: Some(SECTOR_BOUND),
    })
}
