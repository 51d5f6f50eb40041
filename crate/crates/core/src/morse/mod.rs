//! Flow categories of Morse functions on surfaces, computed numerically.
//!
//! Critical points come from Newton iteration, flow lines from an adaptive
//! Runge–Kutta integrator, and connecting orbits from shooting along the
//! unstable sphere of each critical point with bisection on the side of the
//! target's stable manifold.
//!
//! Sign convention: an index-1 point `a` with unstable vector `e_a` has the
//! flow line leaving along `+e_a` counted `+1` and along `−e_a` counted `−1`.
//! For an index-2 point the unstable circle is traversed counterclockwise in
//! its frame `(e₁, e₂)`; a crossing of `W^s(b)` from the `−e_b` side to the
//! `+e_b` side counts `+1`, the reverse `−1`. Consecutive crossings bound the
//! arcs of the 1-dimensional moduli spaces.

pub mod builtin;
pub mod continuation;
pub mod critical;
pub mod flow;
pub mod loopspace;
pub(crate) mod shooting;
pub mod surface;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

pub use critical::{find_critical_points, CriticalPointRec};
pub use flow::{integrate_flow, Direction, Trajectory};
pub use surface::{Manifold, ScalarFn, SurfaceSpec, Vector};

use crate::error::{Error, Result};
use crate::flowcat::{BrokenFlow, Component, FlowCategory, FlowObject, ModuliOne, ModuliZero};
use shooting::{Crossing, Shooter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Gradient norm accepted at a critical point.
    pub tol_crit: f64,
    /// Smallest Hessian eigenvalue magnitude accepted as nondegenerate.
    pub tol_nondeg: f64,
    /// Distance at which a trajectory has arrived at a critical point.
    pub delta_arrive: f64,
    /// Critical points closer than this are merged.
    pub tol_merge: f64,
    pub bisection_depth: usize,
    pub max_steps: usize,
    /// Largest integration step away from sinks.
    pub h_max: f64,
    /// Local error target per step, relative to `1 + |x|`.
    pub rk_tol: f64,
    /// Distance from a critical point at which flow lines are started.
    pub shooting_radius: f64,
    /// Upper bound on the probe offset `s_b` around each saddle.
    pub probe_offset: f64,
    /// Bisection stops once an interval is this fraction of the family.
    pub crossing_resolution: f64,
    /// Initial samples on each unstable circle.
    pub circle_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_crit: 1e-10,
            tol_nondeg: 1e-6,
            delta_arrive: 1e-6,
            tol_merge: 1e-6,
            bisection_depth: 60,
            max_steps: 200_000,
            h_max: 0.05,
            rk_tol: 1e-10,
            shooting_radius: 1e-4,
            probe_offset: 0.05,
            crossing_resolution: 1e-9,
            circle_samples: 256,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_crit", self.tol_crit),
            ("tol_nondeg", self.tol_nondeg),
            ("delta_arrive", self.delta_arrive),
            ("tol_merge", self.tol_merge),
            ("h_max", self.h_max),
            ("rk_tol", self.rk_tol),
            ("shooting_radius", self.shooting_radius),
            ("probe_offset", self.probe_offset),
            ("crossing_resolution", self.crossing_resolution),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.bisection_depth == 0 || self.max_steps == 0 || self.circle_samples < 3 {
            return Err(Error::Precondition("step and sample counts must be positive".into()));
        }
        Ok(())
    }
}

/// Flow lines out of one critical point.
#[derive(Debug, Clone)]
enum Unstable {
    Point,
    /// Arrivals of the `+e` and `−e` branches.
    Branches([usize; 2]),
    /// Crossings of the unstable circle in counterclockwise order, and the
    /// arrival of every initial sample.
    Circle { crossings: Vec<Crossing>, arrivals: Vec<usize> },
}

/// A Morse function together with its critical points and the resolved
/// flow lines out of every critical point.
#[derive(Debug, Clone)]
pub struct MorseModel {
    pub spec: SurfaceSpec,
    pub tol: Tolerances,
    pub critical: Vec<CriticalPointRec>,
    pub seed: u64,
    unstable: Vec<Unstable>,
}

impl MorseModel {
    pub fn new(spec: SurfaceSpec, tol: Tolerances, seed: u64) -> Result<Self> {
        tol.validate()?;
        let critical = find_critical_points(&spec, &tol)?;
        if let Some(c) = critical.iter().find(|c| c.index > 2) {
            return Err(Error::Precondition(format!("{} has index {}; unstable spheres are traced up to dimension 1", c.id, c.index)));
        }
        let mut model = Self { spec, tol, critical, seed, unstable: Vec::new() };
        model.unstable = (0..model.critical.len()).map(|i| model.trace(i)).collect::<Result<_>>()?;
        Ok(model)
    }

    fn position(&self, id: &str) -> Result<usize> {
        self.critical.iter().position(|c| c.id == id).ok_or_else(|| Error::UnknownObject(id.to_string()))
    }

    fn shooter(&self) -> Shooter<'_> {
        Shooter::new(&self.spec, &self.critical, &self.tol)
    }

    /// Start point of the `±e` branch of an index-1 point.
    pub fn branch_start(&self, i: usize, sign: f64) -> Vector {
        let c = &self.critical[i];
        self.spec.retract(&(c.point() + c.direction(0) * (sign * self.tol.shooting_radius)))
    }

    /// Start point on the unstable circle of an index-2 point, at angle `θ`
    /// in its frame. At a maximum of a surface every nearby point lies on the
    /// unstable manifold, so the circle is the round circle of radius `ρ`.
    /// Otherwise it is the backward image of that circle under the
    /// linearized flow, at distance `r₀` from the point.
    ///
    /// Starting far out matters: near a saddle-free weak direction, start
    /// points a distance `r₀` away are separated by fewer representable
    /// values than the flow later amplifies.
    pub fn circle_start(&self, i: usize, theta: f64) -> Vector {
        let c = &self.critical[i];
        let p = c.point();
        let nearest = self
            .critical
            .iter()
            .filter(|o| o.id != c.id)
            .map(|o| self.spec.distance(&p, &o.point()))
            .fold(f64::INFINITY, f64::min);
        let r0 = self.tol.shooting_radius;
        let rho = (0.1f64).min(0.3 * nearest).max(r0);
        let (y1, y2) = (rho * theta.cos(), rho * theta.sin());
        if c.index == self.spec.dim() {
            return self.spec.retract(&(p + c.direction(0) * y1 + c.direction(1) * y2));
        }
        let (mu1, mu2) = (-c.eigenvalues[0], -c.eigenvalues[1]);
        let radius = |t: f64| ((y1 * (-mu1 * t).exp()).powi(2) + (y2 * (-mu2 * t).exp()).powi(2)).sqrt();
        let (mut lo, mut hi) = (0.0, (rho / r0).ln() / mu1.min(mu2));
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if radius(mid) > r0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let x = p + c.direction(0) * (y1 * (-mu1 * t).exp()) + c.direction(1) * (y2 * (-mu2 * t).exp());
        self.spec.retract(&x)
    }

    fn circle_params(&self) -> Vec<f64> {
        let n = self.tol.circle_samples;
        let phase: f64 = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed).gen();
        (0..n).map(|i| 2.0 * PI * (i as f64 + phase) / n as f64).collect()
    }

    fn trace(&self, i: usize) -> Result<Unstable> {
        match self.critical[i].index {
            0 => Ok(Unstable::Point),
            1 => {
                let sh = self.shooter();
                let plus = sh.flow(&self.branch_start(i, 1.0))?;
                let minus = sh.flow(&self.branch_start(i, -1.0))?;
                Ok(Unstable::Branches([plus.arrival, minus.arrival]))
            }
            _ => {
                let start = |t: f64| self.circle_start(i, t);
                let (crossings, samples) = self.shooter().scan(&start, &self.circle_params(), Some(2.0 * PI))?;
                Ok(Unstable::Circle { crossings, arrivals: samples.iter().map(|s| s.arrival).collect() })
            }
        }
    }

    /// Branch signs of an index-1 point arriving at `c`, `+` first.
    fn branches_to(&self, b: usize, c: usize) -> Vec<i8> {
        match &self.unstable[b] {
            Unstable::Branches([p, m]) => {
                let mut v = Vec::new();
                if *p == c {
                    v.push(1);
                }
                if *m == c {
                    v.push(-1);
                }
                v
            }
            _ => Vec::new(),
        }
    }

    fn check_gap(&self, a: usize, b: usize, gap: usize) -> Result<()> {
        let (ia, ib) = (self.critical[a].index, self.critical[b].index);
        if ia != ib + gap {
            return Err(Error::Precondition(format!(
                "{} -> {} has index gap {}, expected {gap}",
                self.critical[a].id,
                self.critical[b].id,
                ia as i64 - ib as i64
            )));
        }
        Ok(())
    }

    fn orbit_signs(&self, a: usize, b: usize) -> Vec<i8> {
        match &self.unstable[a] {
            Unstable::Point => Vec::new(),
            Unstable::Branches(_) => self.branches_to(a, b),
            Unstable::Circle { crossings, .. } => {
                crossings.iter().filter(|c| c.saddle == b).map(Crossing::sign).collect()
            }
        }
    }

    /// Signed points of `M(a, b)` for an index gap of one.
    pub fn connecting_orbits(&self, a: &str, b: &str) -> Result<ModuliZero> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        self.check_gap(i, j, 1)?;
        Ok(ModuliZero::new(a, b, self.orbit_signs(i, j)))
    }

    /// Components of `M(a, c)` for an index gap of two.
    pub fn gap2_moduli(&self, a: &str, c: &str) -> Result<ModuliOne> {
        let (i, k) = (self.position(a)?, self.position(c)?);
        self.check_gap(i, k, 2)?;
        let Unstable::Circle { crossings, arrivals } = &self.unstable[i] else { unreachable!("index 2") };
        let mut components = Vec::new();
        if crossings.is_empty() {
            if arrivals.iter().any(|&x| x != arrivals[0]) {
                return Err(Error::UnresolvedBoundary(format!("{a}: flow lines reach different minima without crossing a saddle")));
            }
            if arrivals.first() == Some(&k) {
                components.push(Component::Circle);
            }
            return Ok(ModuliOne { from: a.into(), to: c.into(), components });
        }
        let position = |n: usize| crossings[..n].iter().filter(|x| x.saddle == crossings[n].saddle).count();
        let branch = |x: &Crossing, side: i8| -> Result<usize> {
            self.branches_to(x.saddle, k).iter().position(|&s| s == side).ok_or_else(|| {
                Error::UnresolvedBoundary(format!(
                    "{a}: arc beside {} leaves on the {side:+} side but that branch does not reach {c}",
                    self.critical[x.saddle].id
                ))
            })
        };
        let m = crossings.len();
        for n in 0..m {
            let (x, y) = (&crossings[n], &crossings[(n + 1) % m]);
            if x.after != y.before {
                return Err(Error::UnresolvedBoundary(format!(
                    "{a}: arc after parameter {:.6} reaches {} at one end and {} at the other",
                    x.t, self.critical[x.after].id, self.critical[y.before].id
                )));
            }
            if x.after != k {
                continue;
            }
            let start = BrokenFlow::new(&self.critical[x.saddle].id, position(n), branch(x, x.to)?);
            let end = BrokenFlow::new(&self.critical[y.saddle].id, position((n + 1) % m), branch(y, y.from)?);
            components.push(Component::interval(start, end));
        }
        Ok(ModuliOne { from: a.into(), to: c.into(), components })
    }

    /// Objects, all nonempty gap-1 tables and all gap-2 tables.
    pub fn flow_category(&self) -> Result<FlowCategory> {
        let objects = self
            .critical
            .iter()
            .map(|c| {
                let coords: Vec<String> = c.coords.iter().map(|v| format!("{v:.4}")).collect();
                FlowObject { id: c.id.clone(), index: c.index as i64, label: format!("({})", coords.join(", ")) }
            })
            .collect();
        let mut moduli0 = Vec::new();
        let mut moduli1 = Vec::new();
        for a in &self.critical {
            for b in &self.critical {
                if a.index == b.index + 1 {
                    let m = self.connecting_orbits(&a.id, &b.id)?;
                    if !m.signs.is_empty() {
                        moduli0.push(m);
                    }
                } else if a.index == b.index + 2 {
                    let m = self.gap2_moduli(&a.id, &b.id)?;
                    if !m.components.is_empty() {
                        moduli1.push(m);
                    }
                }
            }
        }
        let mut f = FlowCategory::new(objects, moduli0).with_moduli1(moduli1);
        f.canonicalize();
        Ok(f)
    }

    /// Representative flow lines: both branches of each index-1 point and one
    /// line through each crossing of each unstable circle, keyed by a name.
    pub fn orbit_trajectories(&self) -> Result<BTreeMap<String, Trajectory>> {
        let sh = self.shooter();
        let mut out = BTreeMap::new();
        for (i, u) in self.unstable.iter().enumerate() {
            let id = &self.critical[i].id;
            match u {
                Unstable::Point => {}
                Unstable::Branches(_) => {
                    out.insert(format!("{id}_plus"), sh.flow(&self.branch_start(i, 1.0))?);
                    out.insert(format!("{id}_minus"), sh.flow(&self.branch_start(i, -1.0))?);
                }
                Unstable::Circle { crossings, .. } if crossings.is_empty() => {
                    for n in 0..4 {
                        out.insert(format!("{id}_sample{n}"), sh.flow(&self.circle_start(i, 0.5 * PI * n as f64))?);
                    }
                }
                Unstable::Circle { crossings, .. } => {
                    for (n, x) in crossings.iter().enumerate() {
                        out.insert(format!("{id}_crossing{n}_{}", self.critical[x.saddle].id), sh.flow(&self.circle_start(i, x.t))?);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Critical points, flow lines and moduli in one call.
pub fn build_flow_category(spec: SurfaceSpec, tol: Tolerances, seed: u64) -> Result<FlowCategory> {
    MorseModel::new(spec, tol, seed)?.flow_category()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HomologyGroup;

    fn model(spec: SurfaceSpec) -> MorseModel {
        MorseModel::new(spec, Tolerances::default(), 0).unwrap()
    }

    fn free_ranks(h: &[(i64, HomologyGroup)]) -> Vec<(i64, usize)> {
        h.iter().map(|(d, g)| (*d, if g.torsion.is_empty() { g.free_rank } else { usize::MAX })).collect()
    }

    #[test]
    fn sphere_has_two_poles_and_a_circle_of_flow_lines() {
        let m = model(builtin::sphere());
        assert_eq!(m.critical.len(), 2);
        assert_eq!(m.critical[0].index, 2);
        assert!((m.critical[0].coords[2] - 1.0).abs() < 1e-9);
        assert!((m.critical[1].coords[2] + 1.0).abs() < 1e-9);
        let f = m.flow_category().unwrap();
        let m1 = f.moduli1.as_ref().unwrap();
        assert_eq!(m1.len(), 1);
        assert_eq!(m1[0].components, vec![Component::Circle]);
        assert_eq!(free_ranks(&f.homology().unwrap()), vec![(0, 1), (1, 0), (2, 1)]);
    }

    #[test]
    fn torus_critical_values_match_a_dense_grid() {
        let s = builtin::torus();
        let crit = find_critical_points(&s, &Tolerances::default()).unwrap();
        assert_eq!(crit.iter().map(|c| c.index).collect::<Vec<_>>(), vec![2, 1, 1, 0]);
        // critical values of z + 0.05y on the torus are the extremes of the
        // height over each meridian circle and their saddle counterparts; the
        // max and min over a dense parametrization bound the outer two
        let n = 2000;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            for j in 0..n / 4 {
                let (u, v) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / (n / 4) as f64);
                let x = vector(&[(2.0 + v.cos()) * u.cos(), v.sin(), (2.0 + v.cos()) * u.sin()]);
                let f = s.f.value(&x);
                lo = lo.min(f);
                hi = hi.max(f);
            }
        }
        assert!((crit[0].value - hi).abs() < 1e-4, "{} vs {hi}", crit[0].value);
        assert!((crit[3].value - lo).abs() < 1e-4, "{} vs {lo}", crit[3].value);
        // the saddles sit on the inner equator x² + z² = 1 at the top and bottom
        for c in &crit[1..3] {
            let rho = (c.coords[0].powi(2) + c.coords[2].powi(2)).sqrt();
            assert!((rho - 1.0).abs() < 1e-2, "{:?}", c.coords);
        }
    }

    #[test]
    fn torus_flow_category_has_torus_homology() {
        let f = build_flow_category(builtin::torus(), Tolerances::default(), 0).unwrap();
        assert!(f.d_squared_report().passed());
        assert_eq!(free_ranks(&f.homology().unwrap()), vec![(0, 1), (1, 2), (2, 1)]);
        let intervals: usize = f
            .moduli1
            .iter()
            .flatten()
            .flat_map(|m| &m.components)
            .filter(|c| matches!(c, Component::Interval { .. }))
            .count();
        assert_eq!(intervals, 4);
    }

    #[test]
    fn monkey_saddle_is_degenerate() {
        let err = MorseModel::new(builtin::monkey_saddle(), Tolerances::default(), 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateCriticalPoint { .. }), "{err}");
    }

    #[test]
    fn flow_from_a_critical_point_is_constant() {
        let s = builtin::sphere();
        let tol = Tolerances::default();
        let crit = find_critical_points(&s, &tol).unwrap();
        let t = integrate_flow(&s, &crit, &crit[0].point(), Direction::Descend, &tol).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.arrival, 0);
    }

    #[test]
    fn generic_point_flows_monotonically_to_the_south_pole() {
        let s = builtin::sphere();
        let tol = Tolerances::default();
        let crit = find_critical_points(&s, &tol).unwrap();
        let x0 = vector(&[0.6, 0.0, 0.8]);
        let t = integrate_flow(&s, &crit, &x0, Direction::Descend, &tol).unwrap();
        assert_eq!(crit[t.arrival].index, 0);
        assert!(t.is_monotone(Direction::Descend));
        assert!(t.arrival_distance < tol.delta_arrive);
        let up = integrate_flow(&s, &crit, &x0, Direction::Ascend, &tol).unwrap();
        assert_eq!(crit[up.arrival].index, 2);
        assert!(up.is_monotone(Direction::Ascend));
    }

    #[test]
    fn gap_preconditions_are_enforced() {
        let m = model(builtin::sphere());
        let (a, b) = (m.critical[0].id.clone(), m.critical[1].id.clone());
        assert!(matches!(m.connecting_orbits(&a, &b), Err(Error::Precondition(_))));
        assert!(matches!(m.gap2_moduli(&b, &a), Err(Error::Precondition(_))));
        assert!(matches!(m.connecting_orbits("nope", &b), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn dumbbell_has_nonzero_differential() {
        let f = build_flow_category(builtin::dumbbell(), Tolerances::default(), 0).unwrap();
        assert!(f.d_squared_report().passed());
        assert!(!f.boundary_matrix(1).unwrap().is_zero());
        assert_eq!(free_ranks(&f.homology().unwrap()), vec![(0, 1), (1, 0), (2, 1)]);
    }

    #[test]
    fn results_do_not_depend_on_the_seed() {
        let a = build_flow_category(builtin::dumbbell(), Tolerances::default(), 1).unwrap();
        let b = build_flow_category(builtin::dumbbell(), Tolerances::default(), 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loopspace_sectors_have_circle_homology() {
        for (k, n) in [(2, 0), (2, 1), (3, 1)] {
            let f = build_flow_category(builtin::by_name(&format!("loopspace:{k},{n},0.1")).unwrap(), Tolerances::default(), 0)
                .unwrap();
            assert_eq!(free_ranks(&f.homology().unwrap()), vec![(0, 1), (1, 1)], "k={k} n={n}");
        }
    }

    #[test]
    fn unperturbed_loopspace_is_rejected() {
        assert!(matches!(builtin::by_name("loopspace:2,1,0"), Err(Error::PerturbationTooSmall(_))));
        assert!(matches!(builtin::by_name("loopspace:1,0,0.1"), Err(Error::Precondition(_))));
        assert!(matches!(builtin::by_name("loopspace:2"), Err(Error::Parse(_))));
    }

    #[test]
    fn invalid_tolerances_are_rejected() {
        let tol = Tolerances { h_max: -1.0, ..Tolerances::default() };
        assert!(MorseModel::new(builtin::circle(), tol, 0).is_err());
    }

    fn vector(v: &[f64]) -> Vector {
        surface::vector(v)
    }
}
