//! Locating flow lines into saddles along a family of start points.
//!
//! Each start point is flowed down to a minimum. For every index-1 point `b`
//! a probe records where the trajectory first drops below the level
//! `f(b) − η_b`. Flow lines passing close to `b` hit that level near
//! `b ± s_b e_b`, on the side of the stable manifold they started on, so the
//! probe jumps by about `2 s_b` across `W^s(b)` and varies continuously
//! elsewhere. Jumps are bisected until both ends pass `b` on opposite sides.

use rayon::prelude::*;

use super::critical::CriticalPointRec;
use super::flow::{integrate_flow, Direction, Trajectory};
use super::surface::{SurfaceSpec, Vector};
use super::Tolerances;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Probe {
    crit: usize,
    point: Vector,
    dir: Vector,
    level: f64,
    offset: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Sample {
    pub t: f64,
    pub arrival: usize,
    marks: Vec<Option<Vector>>,
}

/// A parameter where the family crosses `W^s(saddle)`, passing from side
/// `from` to side `to` of the unstable direction of the saddle.
#[derive(Debug, Clone)]
pub(crate) struct Crossing {
    pub t: f64,
    pub saddle: usize,
    pub from: i8,
    pub to: i8,
    pub before: usize,
    pub after: usize,
}

impl Crossing {
    /// `+1` for a crossing from the negative to the positive side.
    pub fn sign(&self) -> i8 {
        if self.from < self.to {
            1
        } else {
            -1
        }
    }
}

pub(crate) struct Shooter<'a> {
    pub spec: &'a SurfaceSpec,
    pub crit: &'a [CriticalPointRec],
    pub tol: &'a Tolerances,
    probes: Vec<Probe>,
}

impl<'a> Shooter<'a> {
    pub fn new(spec: &'a SurfaceSpec, crit: &'a [CriticalPointRec], tol: &'a Tolerances) -> Self {
        let mut probes: Vec<Probe> = crit
            .iter()
            .enumerate()
            .filter(|(_, c)| c.index == 1)
            .map(|(i, c)| {
                let p = c.point();
                let nearest = crit
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, o)| spec.distance(&p, &o.point()))
                    .fold(f64::INFINITY, f64::min);
                let offset = tol.probe_offset.min(0.25 * nearest);
                let lambda = c.eigenvalues[0].abs();
                Probe { crit: i, point: p, dir: c.direction(0), level: c.value - 0.5 * lambda * offset * offset, offset }
            })
            .collect();
        probes.sort_by(|a, b| b.level.total_cmp(&a.level));
        Self { spec, crit, tol, probes }
    }

    pub fn flow(&self, x0: &Vector) -> Result<Trajectory> {
        integrate_flow(self.spec, self.crit, x0, Direction::Descend, self.tol)
    }

    fn sample(&self, t: f64, x0: &Vector) -> Result<Sample> {
        let traj = self.flow(x0)?;
        let marks = self.probes.iter().map(|p| traj.first_below(p.level)).collect();
        Ok(Sample { t, arrival: traj.arrival, marks })
    }

    fn side(&self, s: &Sample, j: usize) -> Option<i8> {
        let p = &self.probes[j];
        let m = s.marks[j].as_ref()?;
        let d = self.spec.difference(m, &p.point);
        if d.norm() > 3.0 * p.offset {
            return None;
        }
        let x = d.dot(&p.dir);
        (x.abs() > 0.25 * p.offset).then_some(if x > 0.0 { 1 } else { -1 })
    }

    fn jumps(&self, a: &Sample, b: &Sample) -> bool {
        if a.arrival != b.arrival {
            return true;
        }
        a.marks.iter().zip(&b.marks).zip(&self.probes).any(|((x, y), p)| match (x, y) {
            (Some(x), Some(y)) => self.spec.distance(x, y) > 0.5 * p.offset,
            (None, None) => false,
            _ => true,
        })
    }

    /// The highest saddle passed on opposite sides by the two samples.
    fn classify(&self, a: &Sample, b: &Sample) -> Option<(usize, i8, i8)> {
        (0..self.probes.len()).find_map(|j| match (self.side(a, j), self.side(b, j)) {
            (Some(x), Some(y)) if x != y => Some((self.probes[j].crit, x, y)),
            _ => None,
        })
    }

    /// Crossings of a family of start points over `params` (sorted). A closed
    /// family also joins the last parameter to the first plus `period`.
    /// Returns the crossings in parameter order and the initial samples.
    pub fn scan(
        &self,
        start: &(dyn Fn(f64) -> Vector + Sync),
        params: &[f64],
        closed: Option<f64>,
    ) -> Result<(Vec<Crossing>, Vec<Sample>)> {
        let samples: Vec<Sample> = params.par_iter().map(|&t| self.sample(t, &start(t))).collect::<Result<_>>()?;
        let mut pending: Vec<(Sample, Sample, usize)> = Vec::new();
        for w in samples.windows(2) {
            if self.jumps(&w[0], &w[1]) {
                pending.push((w[0].clone(), w[1].clone(), 0));
            }
        }
        let span = match closed {
            Some(period) => {
                if let (Some(last), Some(first)) = (samples.last(), samples.first()) {
                    let wrapped = Sample { t: first.t + period, ..first.clone() };
                    if samples.len() > 1 && self.jumps(last, &wrapped) {
                        pending.push((last.clone(), wrapped, 0));
                    }
                }
                period
            }
            None => params.last().copied().unwrap_or(0.0) - params.first().copied().unwrap_or(0.0),
        };
        let resolution = self.tol.crossing_resolution * span.max(1e-300);
        let mut crossings = Vec::new();
        while !pending.is_empty() {
            let mut split = Vec::new();
            for (lo, hi, depth) in pending {
                let width = hi.t - lo.t;
                if width <= resolution {
                    if let Some((saddle, from, to)) = self.classify(&lo, &hi) {
                        crossings.push(Crossing {
                            t: 0.5 * (lo.t + hi.t),
                            saddle,
                            from,
                            to,
                            before: lo.arrival,
                            after: hi.arrival,
                        });
                        continue;
                    }
                }
                if depth >= self.tol.bisection_depth || width <= 1e-15 * span.max(1.0) {
                    return Err(Error::UnresolvedBoundary(format!(
                        "{}: no saddle separates the flow lines at parameters {:.17} and {:.17}",
                        self.spec.name, lo.t, hi.t
                    )));
                }
                split.push((lo, hi, depth));
            }
            let mids: Vec<Sample> = split
                .par_iter()
                .map(|(lo, hi, _)| {
                    let t = 0.5 * (lo.t + hi.t);
                    self.sample(t, &start(t))
                })
                .collect::<Result<_>>()?;
            pending = Vec::new();
            for ((lo, hi, depth), mid) in split.into_iter().zip(mids) {
                if self.jumps(&lo, &mid) {
                    pending.push((lo, mid.clone(), depth + 1));
                }
                if self.jumps(&mid, &hi) {
                    pending.push((mid, hi, depth + 1));
                }
            }
        }
        if let Some(period) = closed {
            let base = params.first().copied().unwrap_or(0.0);
            for c in &mut crossings {
                c.t = base + (c.t - base).rem_euclid(period);
            }
        }
        crossings.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok((crossings, samples))
    }
}
