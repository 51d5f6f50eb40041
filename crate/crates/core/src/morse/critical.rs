//! Critical points by Newton iteration from a grid of seeds.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use super::surface::{Manifold, Matrix, SurfaceSpec, Vector};
use super::Tolerances;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointRec {
    pub id: String,
    pub coords: Vec<f64>,
    pub value: f64,
    pub index: usize,
    /// Hessian eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors (ambient coordinates) matching `eigenvalues`;
    /// the first `index` of them form the unstable frame.
    pub frame: Vec<Vec<f64>>,
}

impl CriticalPointRec {
    pub fn point(&self) -> Vector {
        Vector::from_column_slice(&self.coords)
    }

    pub fn unstable_frame(&self) -> &[Vec<f64>] {
        &self.frame[..self.index]
    }

    pub fn direction(&self, i: usize) -> Vector {
        Vector::from_column_slice(&self.frame[i])
    }

    pub fn smallest_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min)
    }
}

/// One damped Newton solve for a critical point starting from `x0`.
fn newton(s: &SurfaceSpec, x0: &Vector, tol: &Tolerances) -> Option<Vector> {
    let mut x = s.retract(x0);
    let n = s.ambient_dim();
    for _ in 0..200 {
        let step = match &s.manifold {
            Manifold::Implicit { g } => {
                let dg = g.gradient(&x);
                let df = s.f.gradient(&x);
                let lambda = df.dot(&dg) / dg.norm_squared();
                let mut j = Matrix::zeros(n + 1, n + 1);
                j.view_mut((0, 0), (n, n)).copy_from(&(s.f.hessian(&x) - g.hessian(&x) * lambda));
                for i in 0..n {
                    j[(i, n)] = -dg[i];
                    j[(n, i)] = dg[i];
                }
                let mut rhs = Vector::zeros(n + 1);
                rhs.rows_mut(0, n).copy_from(&(&df - &dg * lambda));
                rhs[n] = g.value(&x);
                let d = j.lu().solve(&rhs)?;
                d.rows(0, n).into_owned()
            }
            Manifold::FlatTorus { .. } => s.f.hessian(&x).lu().solve(&s.f.gradient(&x))?,
        };
        let len = step.norm();
        if !len.is_finite() {
            return None;
        }
        let step = if len > 0.25 { step * (0.25 / len) } else { step };
        x = s.retract(&(&x - &step));
        if len < 1e-14 * (1.0 + x.norm()) {
            break;
        }
    }
    let residual = s.gradient(&x).norm();
    (residual <= tol.tol_crit).then_some(x)
}

/// Sign convention for eigenvectors: the largest-magnitude coordinate is
/// positive; a full unstable frame is positively oriented on the surface.
fn normalize_frame(s: &SurfaceSpec, x: &Vector, vecs: &mut [Vector], index: usize) {
    for v in vecs.iter_mut() {
        let big = (0..v.len()).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap();
        if v[big] < 0.0 {
            *v = -v.clone();
        }
    }
    if index == s.dim() && index > 0 {
        let mut cols: Vec<Vector> = vecs.to_vec();
        if let Some(n) = s.normal(x) {
            cols.push(n);
        }
        let det = Matrix::from_columns(&cols).determinant();
        if det < 0.0 {
            vecs[index - 1] = -vecs[index - 1].clone();
        }
    }
}

/// Classifies a critical point, failing on a near-degenerate Hessian.
pub fn classify(s: &SurfaceSpec, x: &Vector, tol: &Tolerances) -> Result<CriticalPointRec> {
    let t = s.tangent_basis(x)?;
    let h = s.riemannian_hessian(x, &t);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let smallest = eigenvalues.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
    let coords = s.canonical(x);
    if smallest < tol.tol_nondeg {
        return Err(Error::DegenerateCriticalPoint { location: coords.iter().copied().collect(), smallest });
    }
    let index = eigenvalues.iter().filter(|e| **e < 0.0).count();
    let mut vecs: Vec<Vector> = order.iter().map(|&i| &t * eig.eigenvectors.column(i)).collect();
    normalize_frame(s, x, &mut vecs, index);
    Ok(CriticalPointRec {
        id: String::new(),
        coords: coords.iter().copied().collect(),
        value: s.f.value(x),
        index,
        eigenvalues,
        frame: vecs.iter().map(|v| v.iter().copied().collect()).collect(),
    })
}

/// All critical points reachable from the seeds, merged, classified and
/// named `p{index}_{j}` with `j` ordering points of equal index by
/// decreasing value.
pub fn find_critical_points(s: &SurfaceSpec, tol: &Tolerances) -> Result<Vec<CriticalPointRec>> {
    let found: Vec<Option<Vector>> = s.seeds.par_iter().map(|x0| newton(s, x0, tol)).collect();
    let mut points: Vec<Vector> = Vec::new();
    for x in found.into_iter().flatten() {
        if !s.in_domain(&x) {
            continue;
        }
        if points.iter().all(|p| s.distance(p, &x) >= tol.tol_merge) {
            points.push(x);
        }
    }
    let mut recs = points.iter().map(|x| classify(s, x, tol)).collect::<Result<Vec<_>>>()?;
    recs.sort_by(|a, b| {
        b.index.cmp(&a.index).then(b.value.total_cmp(&a.value)).then_with(|| {
            a.coords.iter().zip(&b.coords).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut counts = std::collections::BTreeMap::new();
    for r in &mut recs {
        let j = counts.entry(r.index).or_insert(0usize);
        r.id = format!("p{}_{}", r.index, j);
        *j += 1;
    }
    Ok(recs)
}
