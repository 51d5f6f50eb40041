//! Gradient flow by an adaptive Dormand–Prince 5(4) pair, projected back to
//! the surface after every accepted step.

use std::fmt::Write as _;

use serde::Serialize;

use super::critical::CriticalPointRec;
use super::surface::{SurfaceSpec, Vector};
use super::Tolerances;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Along `−∇f`, arriving at minima.
    Descend,
    /// Along `+∇f`, arriving at maxima.
    Ascend,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub times: Vec<f64>,
    /// Position of the arrival point in the critical point list.
    pub arrival: usize,
    pub arrival_distance: f64,
}

impl Trajectory {
    pub fn point(&self, i: usize) -> Vector {
        Vector::from_column_slice(&self.samples[i])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Values strictly decrease (descending flow) or increase (ascending).
    pub fn is_monotone(&self, dir: Direction) -> bool {
        self.values.windows(2).all(|w| match dir {
            Direction::Descend => w[1] < w[0],
            Direction::Ascend => w[1] > w[0],
        })
    }

    /// First point on the descending trajectory with `f ≤ level`,
    /// interpolated linearly in `f` between samples.
    pub fn first_below(&self, level: f64) -> Option<Vector> {
        let i = self.values.iter().position(|&v| v <= level)?;
        if i == 0 {
            return Some(self.point(0));
        }
        let (a, b) = (self.values[i - 1], self.values[i]);
        let s = (a - level) / (a - b);
        Some(self.point(i - 1) * (1.0 - s) + self.point(i) * s)
    }

    /// Columns `t x_1 … x_n f` for external plotting.
    pub fn to_columns(&self) -> String {
        let n = self.samples.first().map_or(0, Vec::len);
        let mut s = String::from("t");
        for i in 1..=n {
            let _ = write!(s, "\tx{i}");
        }
        s.push_str("\tf\n");
        for ((t, x), f) in self.times.iter().zip(&self.samples).zip(&self.values) {
            let _ = write!(s, "{t:.9}");
            for v in x {
                let _ = write!(s, "\t{v:.12}");
            }
            let _ = writeln!(s, "\t{f:.12}");
        }
        s
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn field(s: &SurfaceSpec, x: &Vector, dir: Direction) -> Vector {
    let g = s.gradient(x);
    match dir {
        Direction::Descend => -g,
        Direction::Ascend => g,
    }
}

/// One Dormand–Prince step; returns the fifth-order point and error estimate.
fn step(s: &SurfaceSpec, x: &Vector, h: f64, dir: Direction) -> (Vector, f64) {
    let mut k: Vec<Vector> = Vec::with_capacity(7);
    for i in 0..7 {
        let mut y = x.clone();
        for (j, kj) in k.iter().enumerate() {
            if A[i][j] != 0.0 {
                y += kj * (h * A[i][j]);
            }
        }
        k.push(field(s, &y, dir));
    }
    let mut hi = x.clone();
    let mut err = Vector::zeros(x.len());
    for i in 0..7 {
        hi += &k[i] * (h * B5[i]);
        err += &k[i] * (h * (B5[i] - B4[i]));
    }
    (hi, err.amax())
}

/// Integrates from `x0` until within `δ_arrive` of a sink (a minimum for
/// descent, a maximum for ascent). A start point already within `δ_arrive`
/// of any critical point gives a trajectory of length 0 arriving there.
pub fn integrate_flow(
    s: &SurfaceSpec,
    crit: &[CriticalPointRec],
    x0: &Vector,
    dir: Direction,
    tol: &Tolerances,
) -> Result<Trajectory> {
    let points: Vec<Vector> = crit.iter().map(CriticalPointRec::point).collect();
    let nearest = |x: &Vector, sinks_only: bool| {
        points
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                !sinks_only
                    || match dir {
                        Direction::Descend => crit[*i].index == 0,
                        Direction::Ascend => crit[*i].index == s.dim(),
                    }
            })
            .map(|(i, p)| (i, s.distance(x, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    };
    let mut x = s.retract(x0);
    s.check_domain(&x).or_else(|e| match dir {
        // ascending flow leaves sublevel sets; the bound only constrains descent
        Direction::Ascend => Ok(()),
        Direction::Descend => Err(e),
    })?;
    let mut t = 0.0;
    let mut traj = Trajectory {
        samples: vec![x.iter().copied().collect()],
        values: vec![s.f.value(&x)],
        times: vec![0.0],
        arrival: 0,
        arrival_distance: f64::INFINITY,
    };
    if let Some((i, d)) = nearest(&x, false) {
        if d < tol.delta_arrive {
            traj.arrival = i;
            traj.arrival_distance = d;
            return Ok(traj);
        }
    }
    let mut h = tol.h_max.min(1e-3);
    for _ in 0..tol.max_steps {
        let (i, d) = nearest(&x, true).ok_or_else(|| Error::Precondition("no sink to arrive at".into()))?;
        if d < tol.delta_arrive {
            traj.arrival = i;
            traj.arrival_distance = d;
            return Ok(traj);
        }
        // near a sink the flow is a contraction and accuracy of the path no
        // longer matters, so the step cap is relaxed
        let cap = if d < 0.05 { 10.0 * tol.h_max } else { tol.h_max };
        h = h.min(cap);
        let (y, err) = step(s, &x, h, dir);
        let scale = tol.rk_tol * (1.0 + x.amax());
        if err <= scale || h < 1e-12 {
            let y = s.retract(&y);
            if dir == Direction::Descend {
                s.check_domain(&y)?;
            }
            t += h;
            let fy = s.f.value(&y);
            let last = *traj.values.last().unwrap();
            let improves = match dir {
                Direction::Descend => fy < last,
                Direction::Ascend => fy > last,
            };
            if improves {
                traj.samples.push(y.iter().copied().collect());
                traj.values.push(fy);
                traj.times.push(t);
            }
            x = y;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(cap);
    }
    Err(Error::MaxStepsExceeded(tol.max_steps))
}
