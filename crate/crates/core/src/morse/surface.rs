//! Smooth surfaces and functions on them: implicit surfaces in ℝ³ with the
//! induced metric, and flat tori `(ℝ/2πℤ)^k`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

type Value = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
type Gradient = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type Hessian = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// A smooth scalar function on the ambient coordinates. Derivatives that are
/// not supplied in closed form are taken by central differences.
#[derive(Clone)]
pub struct ScalarFn {
    value: Value,
    gradient: Option<Gradient>,
    hessian: Option<Hessian>,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

impl ScalarFn {
    pub fn new(value: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), gradient: None, hessian: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        if let Some(g) = &self.gradient {
            return g(x);
        }
        let h = 1e-6;
        Vector::from_fn(x.len(), |i, _| {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            (self.value(&a) - self.value(&b)) / (2.0 * h)
        })
    }

    pub fn hessian(&self, x: &Vector) -> Matrix {
        if let Some(h) = &self.hessian {
            return h(x);
        }
        let n = x.len();
        let h = 1e-5;
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let mut a = x.clone();
            let mut b = x.clone();
            a[j] += h;
            b[j] -= h;
            let col = (self.gradient(&a) - self.gradient(&b)) / (2.0 * h);
            m.set_column(j, &col);
        }
        (&m + m.transpose()) * 0.5
    }
}

#[derive(Debug, Clone)]
pub enum Manifold {
    /// `{g = 0} ⊂ ℝ³`.
    Implicit { g: ScalarFn },
    /// `(ℝ/2πℤ)^k` in angle coordinates.
    FlatTorus { k: usize },
}

/// A Morse function on a surface, with Newton seeds for its critical points
/// and an optional sublevel bound `f < bound` restricting the domain.
#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub name: String,
    pub manifold: Manifold,
    pub f: ScalarFn,
    pub seeds: Vec<Vector>,
    pub sublevel: Option<f64>,
}

impl SurfaceSpec {
    pub fn ambient_dim(&self) -> usize {
        match &self.manifold {
            Manifold::Implicit { .. } => 3,
            Manifold::FlatTorus { k } => *k,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.manifold {
            Manifold::Implicit { .. } => 2,
            Manifold::FlatTorus { k } => *k,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.manifold, Manifold::FlatTorus { .. })
    }

    /// `x − y`, with angle coordinates wrapped into `(−π, π]`.
    pub fn difference(&self, x: &Vector, y: &Vector) -> Vector {
        let mut d = x - y;
        if self.is_torus() {
            for v in d.iter_mut() {
                *v = wrap_angle(*v);
            }
        }
        d
    }

    pub fn distance(&self, x: &Vector, y: &Vector) -> f64 {
        self.difference(x, y).norm()
    }

    /// Canonical representative: angles in `[0, 2π)`.
    pub fn canonical(&self, x: &Vector) -> Vector {
        if self.is_torus() {
            x.map(|v| v.rem_euclid(2.0 * PI))
        } else {
            x.clone()
        }
    }

    /// Unit normal of an implicit surface.
    pub fn normal(&self, x: &Vector) -> Option<Vector> {
        match &self.manifold {
            Manifold::Implicit { g } => {
                let n = g.gradient(x);
                let len = n.norm();
                (len > 1e-12).then(|| n / len)
            }
            Manifold::FlatTorus { .. } => None,
        }
    }

    /// Orthonormal basis of the tangent space as the columns of an
    /// `ambient × dim` matrix. For implicit surfaces `(t₁, t₂, n)` is
    /// positively oriented.
    pub fn tangent_basis(&self, x: &Vector) -> Result<Matrix> {
        match &self.manifold {
            Manifold::Implicit { .. } => {
                let n = self.normal(x).ok_or_else(|| Error::LeftChartDomain(x.iter().copied().collect()))?;
                let axis = (0..3).min_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs())).unwrap();
                let mut a = Vector::zeros(3);
                a[axis] = 1.0;
                let t1 = (&a - &n * n.dot(&a)).normalize();
                let t2 = cross(&n, &t1);
                Ok(Matrix::from_columns(&[t1, t2]))
            }
            Manifold::FlatTorus { k } => Ok(Matrix::identity(*k, *k)),
        }
    }

    /// Tangential part of an ambient vector.
    pub fn project(&self, x: &Vector, v: &Vector) -> Vector {
        match self.normal(x) {
            Some(n) => v - &n * n.dot(v),
            None => v.clone(),
        }
    }

    /// Gradient of `f` in the induced metric.
    pub fn gradient(&self, x: &Vector) -> Vector {
        self.project(x, &self.f.gradient(x))
    }

    /// Moves a nearby point back onto the surface by Newton steps along `∇g`.
    pub fn retract(&self, x: &Vector) -> Vector {
        match &self.manifold {
            Manifold::Implicit { g } => {
                let mut y = x.clone();
                for _ in 0..30 {
                    let v = g.value(&y);
                    if v.abs() < 1e-15 {
                        break;
                    }
                    let n = g.gradient(&y);
                    let nn = n.norm_squared();
                    if nn < 1e-24 {
                        break;
                    }
                    y -= n * (v / nn);
                }
                y
            }
            Manifold::FlatTorus { .. } => x.clone(),
        }
    }

    /// Fails when `x` is outside the sublevel domain or where the surface is
    /// not regular.
    pub fn check_domain(&self, x: &Vector) -> Result<()> {
        let out = || Error::LeftChartDomain(x.iter().copied().collect());
        if let Some(c) = self.sublevel {
            if !(self.f.value(x) < c) {
                return Err(out());
            }
        }
        if let Manifold::Implicit { g } = &self.manifold {
            if g.gradient(x).norm() < 1e-8 || !x.iter().all(|v| v.is_finite()) {
                return Err(out());
            }
        }
        Ok(())
    }

    pub fn in_domain(&self, x: &Vector) -> bool {
        self.check_domain(x).is_ok()
    }

    /// Riemannian Hessian of `f` at a critical point in the given tangent
    /// basis: `Tᵀ (H_f − λ H_g) T` with Lagrange multiplier `λ`.
    pub fn riemannian_hessian(&self, x: &Vector, t: &Matrix) -> Matrix {
        let hf = self.f.hessian(x);
        let h = match &self.manifold {
            Manifold::Implicit { g } => {
                let dg = g.gradient(x);
                let lambda = self.f.gradient(x).dot(&dg) / dg.norm_squared();
                hf - g.hessian(x) * lambda
            }
            Manifold::FlatTorus { .. } => hf,
        };
        let m = t.transpose() * h * t;
        (&m + m.transpose()) * 0.5
    }
}

pub fn wrap_angle(v: f64) -> f64 {
    let w = (v + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

pub fn cross(a: &Vector, b: &Vector) -> Vector {
    Vector::from_vec(vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
}

pub fn vector(v: &[f64]) -> Vector {
    Vector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> SurfaceSpec {
        SurfaceSpec {
            name: "sphere".into(),
            manifold: Manifold::Implicit { g: ScalarFn::new(|x| x.norm_squared() - 1.0) },
            f: ScalarFn::new(|x| x[2]),
            seeds: vec![],
            sublevel: None,
        }
    }

    #[test]
    fn finite_differences() {
        let f = ScalarFn::new(|x| x[0] * x[0] * x[1] + x[1].sin());
        let x = vector(&[0.7, -0.3]);
        let g = f.gradient(&x);
        assert!((g[0] - 2.0 * 0.7 * -0.3).abs() < 1e-8);
        assert!((g[1] - (0.49 + (-0.3f64).cos())).abs() < 1e-8);
        let h = f.hessian(&x);
        assert!((h[(0, 1)] - 1.4).abs() < 1e-5);
        assert!((h[(1, 1)] + (-0.3f64).sin()).abs() < 1e-4);
    }

    #[test]
    fn tangent_frame_is_oriented() {
        let s = sphere();
        let x = vector(&[0.6, 0.0, 0.8]);
        let t = s.tangent_basis(&x).unwrap();
        let n = s.normal(&x).unwrap();
        let m = Matrix::from_columns(&[t.column(0).into(), t.column(1).into(), n]);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
        assert!((t.transpose() * &t - Matrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn retraction_and_projection() {
        let s = sphere();
        let y = s.retract(&vector(&[0.0, 0.9, 0.2]));
        assert!((y.norm() - 1.0).abs() < 1e-12);
        let g = s.gradient(&y);
        assert!(g.dot(&y).abs() < 1e-9);
    }

    #[test]
    fn angles() {
        assert_eq!(wrap_angle(3.0 * PI), PI);
        assert!((wrap_angle(2.0 * PI + 0.1) - 0.1).abs() < 1e-12);
        let t = SurfaceSpec {
            name: "t".into(),
            manifold: Manifold::FlatTorus { k: 2 },
            f: ScalarFn::new(|x| x[0].cos()),
            seeds: vec![],
            sublevel: None,
        };
        assert!(t.distance(&vector(&[0.05, 0.0]), &vector(&[2.0 * PI - 0.05, 0.0])) < 0.1 + 1e-12);
    }
}
