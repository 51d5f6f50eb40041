//! Ready-made surfaces: the circle, the round sphere, a dumbbell height on
//! the sphere, the torus in two positions and a sphere carrying a monkey
//! saddle.

use std::f64::consts::PI;

use super::loopspace::broken_geodesic_loopspace;
use super::surface::{vector, Manifold, Matrix, ScalarFn, SurfaceSpec, Vector};
use crate::error::{Error, Result};

/// Major and minor radius of the torus.
pub const TORUS_R: f64 = 2.0;
pub const TORUS_SMALL_R: f64 = 1.0;

/// Height of the upright torus, tilted slightly so that the two saddles are
/// not joined by a flow line.
pub const UPRIGHT_TILT: f64 = 0.05;
/// Tilt angle of the tilted torus, and the azimuth of the tilt measured from
/// the `y` axis towards `x`. A nonzero azimuth breaks the mirror symmetry
/// `x ↦ −x` shared with the upright torus, which would otherwise make the
/// two functions' invariant circles coincide.
pub const TILT_ANGLE: f64 = 0.3;
pub const TILT_AZIMUTH: f64 = 0.4;

fn grid(n: usize, m: usize, p: impl Fn(f64, f64) -> Vector) -> Vec<Vector> {
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            out.push(p(2.0 * PI * (i as f64 + 0.5) / n as f64, 2.0 * PI * (j as f64 + 0.25) / m as f64));
        }
    }
    out
}

fn linear(c: [f64; 3]) -> ScalarFn {
    ScalarFn::new(move |x| c[0] * x[0] + c[1] * x[1] + c[2] * x[2])
        .with_gradient(move |_| vector(&c))
        .with_hessian(|_| Matrix::zeros(3, 3))
}

/// `sin θ` on `ℝ/2πℤ`, the height function of the unit circle.
pub fn circle() -> SurfaceSpec {
    SurfaceSpec {
        name: "circle".into(),
        manifold: Manifold::FlatTorus { k: 1 },
        f: ScalarFn::new(|x| x[0].sin())
            .with_gradient(|x| vector(&[x[0].cos()]))
            .with_hessian(|x| Matrix::from_element(1, 1, -x[0].sin())),
        seeds: (0..16).map(|i| vector(&[2.0 * PI * (i as f64 + 0.3) / 16.0])).collect(),
        sublevel: None,
    }
}

fn unit_sphere(name: &str, f: ScalarFn) -> SurfaceSpec {
    let g = ScalarFn::new(|x| x.norm_squared() - 1.0)
        .with_gradient(|x| x * 2.0)
        .with_hessian(|_| Matrix::identity(3, 3) * 2.0);
    SurfaceSpec {
        name: name.into(),
        manifold: Manifold::Implicit { g },
        f,
        seeds: grid(12, 12, |u, v| {
            let lat = (v / (2.0 * PI) - 0.5) * PI;
            vector(&[lat.cos() * u.cos(), lat.cos() * u.sin(), lat.sin()])
        }),
        sublevel: None,
    }
}

/// Height `z` on the unit sphere.
pub fn sphere() -> SurfaceSpec {
    unit_sphere("sphere", linear([0.0, 0.0, 1.0]))
}

/// `x³ − 3xy²` on the unit sphere, which has a degenerate critical point at
/// each pole.
pub fn monkey_saddle() -> SurfaceSpec {
    let f = ScalarFn::new(|x| x[0].powi(3) - 3.0 * x[0] * x[1] * x[1])
        .with_gradient(|x| vector(&[3.0 * x[0] * x[0] - 3.0 * x[1] * x[1], -6.0 * x[0] * x[1], 0.0]))
        .with_hessian(|x| {
            Matrix::from_row_slice(3, 3, &[6.0 * x[0], -6.0 * x[1], 0.0, -6.0 * x[1], -6.0 * x[0], 0.0, 0.0, 0.0, 0.0])
        });
    unit_sphere("monkey-saddle", f)
}

/// `−z² + y` on the unit sphere after rotating the sphere by `angle` about
/// `axis`: a maximum, one saddle and two minima, with nonzero Morse
/// differential.
pub fn dumbbell_rotated(axis: [f64; 3], angle: f64) -> SurfaceSpec {
    let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::from(axis));
    let rot = nalgebra::Rotation3::from_axis_angle(&axis, angle);
    let r = Matrix::from_iterator(3, 3, rot.matrix().iter().copied());
    let (r1, r2) = (r.clone(), r.clone());
    let f = ScalarFn::new(move |x| {
        let y = &r * x;
        y[1] - y[2] * y[2]
    })
    .with_gradient(move |x| {
        let y = &r1 * x;
        r1.transpose() * vector(&[0.0, 1.0, -2.0 * y[2]])
    })
    .with_hessian(move |_| {
        let d = Matrix::from_diagonal(&vector(&[0.0, 0.0, -2.0]));
        r2.transpose() * d * &r2
    });
    let name = if angle == 0.0 { "dumbbell".to_string() } else { format!("dumbbell-rotated:{angle}") };
    unit_sphere(&name, f)
}

pub fn dumbbell() -> SurfaceSpec {
    dumbbell_rotated([0.0, 0.0, 1.0], 0.0)
}

/// The dumbbell turned 0.3 rad about `(1, 2, 3)`.
pub const DUMBBELL_AXIS: [f64; 3] = [1.0, 2.0, 3.0];
pub const DUMBBELL_ANGLE: f64 = 0.3;

/// The torus of revolution about the `y` axis, `(√(x²+z²) − R)² + y² = r²`.
fn torus_surface(name: &str, f: ScalarFn) -> SurfaceSpec {
    let (big, small) = (TORUS_R, TORUS_SMALL_R);
    let g = ScalarFn::new(move |x| {
        let rho = (x[0] * x[0] + x[2] * x[2]).sqrt();
        (rho - big).powi(2) + x[1] * x[1] - small * small
    })
    .with_gradient(move |x| {
        let rho = (x[0] * x[0] + x[2] * x[2]).sqrt();
        let c = 2.0 * (rho - big) / rho;
        vector(&[c * x[0], 2.0 * x[1], c * x[2]])
    });
    SurfaceSpec {
        name: name.into(),
        manifold: Manifold::Implicit { g },
        f,
        seeds: grid(16, 16, |u, v| {
            vector(&[(big + small * v.cos()) * u.cos(), small * v.sin(), (big + small * v.cos()) * u.sin()])
        }),
        sublevel: None,
    }
}

/// Height `z + 0.05 y` on the upright torus.
pub fn torus() -> SurfaceSpec {
    torus_surface("torus", linear([0.0, UPRIGHT_TILT, 1.0]))
}

/// Height along a direction tilted 0.3 rad away from the `z` axis.
pub fn tilted_torus() -> SurfaceSpec {
    let (s, c) = TILT_ANGLE.sin_cos();
    torus_surface("tilted-torus", linear([s * TILT_AZIMUTH.sin(), s * TILT_AZIMUTH.cos(), c]))
}

pub const NAMES: [&str; 8] =
    ["circle", "sphere", "torus", "tilted-torus", "dumbbell", "dumbbell-rotated", "monkey-saddle", "loopspace:k,n,eps"];

/// Looks up a built-in example; `loopspace:k,n,ε` selects a broken-geodesic
/// sector.
pub fn by_name(name: &str) -> Result<SurfaceSpec> {
    if let Some(args) = name.strip_prefix("loopspace:") {
        let parts: Vec<&str> = args.split(',').collect();
        let bad = || Error::Parse(format!("expected loopspace:k,n,eps, got {name}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let k: usize = parts[0].trim().parse().map_err(|_| bad())?;
        let n: i64 = parts[1].trim().parse().map_err(|_| bad())?;
        let eps: f64 = parts[2].trim().parse().map_err(|_| bad())?;
        return broken_geodesic_loopspace(k, n, eps);
    }
    match name {
        "circle" => Ok(circle()),
        "sphere" => Ok(sphere()),
        "torus" => Ok(torus()),
        "tilted-torus" => Ok(tilted_torus()),
        "dumbbell" => Ok(dumbbell()),
        "dumbbell-rotated" => Ok(dumbbell_rotated(DUMBBELL_AXIS, DUMBBELL_ANGLE)),
        "monkey-saddle" => Ok(monkey_saddle()),
        _ => Err(Error::Parse(format!("unknown example {name}; known: {}", NAMES.join(", ")))),
    }
}
