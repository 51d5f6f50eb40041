//! Counts of the mixed spaces `W^u_{f₀}(a) ∩ W^s_{f₁}(β)` between two Morse
//! functions on the same surface, for critical points of equal index.
//!
//! Index 0: the minimum `a` flows under `f₁` to `β`. Top index: `β` flows
//! backwards under `f₀` to `a`; both unstable frames are positively oriented,
//! so the point counts `+1`. Index 1: the curve `W^u_{f₀}(a)`, traversed from
//! the `−e_a` end to the `+e_a` end, is scanned under the flow of `f₁`; a
//! crossing of `W^s_{f₁}(β)` from the `−e_β` side to the `+e_β` side counts
//! `+1`.

use std::collections::BTreeMap;

use super::flow::{integrate_flow, Direction, Trajectory};
use super::shooting::Shooter;
use super::surface::Vector;
use super::MorseModel;
use crate::comparison::{ComparisonData, MixedModuliZero};
use crate::error::{Error, Result};

/// Samples of `W^u_{f₀}(a)` for an index-1 point as a polyline from the end
/// of the `−` branch through `a` to the end of the `+` branch.
fn unstable_curve(m: &MorseModel, i: usize) -> Result<Vec<Vector>> {
    let flow = |sign: f64| -> Result<Trajectory> {
        integrate_flow(&m.spec, &m.critical, &m.branch_start(i, sign), Direction::Descend, &m.tol)
    };
    let (plus, minus) = (flow(1.0)?, flow(-1.0)?);
    let mut pts: Vec<Vector> = (0..minus.len()).rev().map(|k| minus.point(k)).collect();
    pts.push(m.critical[i].point());
    pts.extend((0..plus.len()).map(|k| plus.point(k)));
    Ok(pts)
}

/// Arc-length parametrization of a polyline.
struct Polyline {
    pts: Vec<Vector>,
    arc: Vec<f64>,
}

impl Polyline {
    fn new(pts: Vec<Vector>) -> Self {
        let mut arc = vec![0.0];
        for w in pts.windows(2) {
            arc.push(arc.last().unwrap() + (&w[1] - &w[0]).norm());
        }
        Self { pts, arc }
    }

    fn length(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    fn at(&self, t: f64) -> Vector {
        let k = self.arc.partition_point(|&s| s <= t).clamp(1, self.pts.len() - 1);
        let (a, b) = (self.arc[k - 1], self.arc[k]);
        let s = if b > a { ((t - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
        &self.pts[k - 1] * (1.0 - s) + &self.pts[k] * s
    }
}

/// Signed mixed points from `m0` to `m1`.
pub fn mixed_counts(m0: &MorseModel, m1: &MorseModel) -> Result<Vec<MixedModuliZero>> {
    if m0.spec.dim() != m1.spec.dim() || m0.spec.ambient_dim() != m1.spec.ambient_dim() {
        return Err(Error::Precondition("continuation needs two functions on the same surface".into()));
    }
    let top = m0.spec.dim();
    let mut points: BTreeMap<(String, String), Vec<i8>> = BTreeMap::new();
    for (i, a) in m0.critical.iter().enumerate() {
        if a.index == 0 {
            let t = integrate_flow(&m1.spec, &m1.critical, &a.point(), Direction::Descend, &m1.tol)?;
            points.entry((a.id.clone(), m1.critical[t.arrival].id.clone())).or_default().push(1);
        } else if a.index == top {
            continue;
        } else if a.index == 1 {
            let curve = Polyline::new(unstable_curve(m0, i)?);
            let n = m1.tol.circle_samples;
            let params: Vec<f64> = (0..=n).map(|k| curve.length() * k as f64 / n as f64).collect();
            let shooter = Shooter::new(&m1.spec, &m1.critical, &m1.tol);
            let start = |t: f64| m1.spec.retract(&curve.at(t));
            let (crossings, _) = shooter.scan(&start, &params, None)?;
            for c in crossings {
                points.entry((a.id.clone(), m1.critical[c.saddle].id.clone())).or_default().push(c.sign());
            }
        } else {
            return Err(Error::Precondition(format!("mixed counts for index {} are not traced", a.index)));
        }
    }
    if top > 0 {
        for b in m1.critical.iter().filter(|b| b.index == top) {
            let t = integrate_flow(&m0.spec, &m0.critical, &b.point(), Direction::Ascend, &m0.tol)?;
            points.entry((m0.critical[t.arrival].id.clone(), b.id.clone())).or_default().push(1);
        }
    }
    Ok(points.into_iter().map(|((a, b), signs)| MixedModuliZero::new(a, b, signs)).collect())
}

/// Both flow categories with the mixed counts between them.
pub fn comparison(m0: &MorseModel, m1: &MorseModel) -> Result<ComparisonData> {
    Ok(ComparisonData {
        source: m0.flow_category()?,
        target: m1.flow_category()?,
        mixed0: mixed_counts(m0, m1)?,
        mixed1: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::{build_psi, quasi_iso_check, verify_chain_map};
    use crate::morse::{builtin, Tolerances};

    fn compare(a: crate::morse::SurfaceSpec, b: crate::morse::SurfaceSpec) -> ComparisonData {
        let t = Tolerances::default();
        comparison(&MorseModel::new(a, t, 0).unwrap(), &MorseModel::new(b, t, 0).unwrap()).unwrap()
    }

    #[test]
    fn rotated_dumbbell_gives_a_quasi_isomorphism() {
        for (axis, angle) in [(builtin::DUMBBELL_AXIS, builtin::DUMBBELL_ANGLE), ([0.3, -1.0, 2.0], 0.6)] {
            let d = compare(builtin::dumbbell(), builtin::dumbbell_rotated(axis, angle));
            assert!(!d.source.boundary_matrix(1).unwrap().is_zero());
            let psi = build_psi(&d).unwrap();
            let r = verify_chain_map(&d, &psi);
            assert!(r.passed(), "{r}");
            let q = quasi_iso_check(&d, &psi).unwrap();
            assert!(q.passed(), "{q}");
        }
    }

    #[test]
    fn mixed_counts_pair_objects_of_equal_index() {
        let d = compare(builtin::dumbbell(), builtin::dumbbell_rotated([-2.0, 1.0, 0.5], 0.4));
        for m in &d.mixed0 {
            assert_eq!(d.source.index(&m.from), d.target.index(&m.to));
        }
        assert!(d.mixed0.iter().all(|m| m.signed_count().abs() == 1));
    }
}
