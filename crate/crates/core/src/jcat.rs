//! The indexing category 𝒥: objects are integers, morphisms `n → m` are
//! points of `J(n,m) ≅ ℝ₊^{n-m-1}` together with a basepoint at infinity, and
//! composition adds coordinate sequences.
//!
//! `J(m+1, m)` has no coordinates. Its two points are the finite point with an
//! empty coordinate window and the basepoint [`JPoint::Infinity`].

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Dimension of `J(n,m)`.
pub fn j_dimension(n: i64, m: i64) -> Result<usize> {
    if n <= m {
        return Err(Error::InvalidRange { upper: n, lower: m });
    }
    Ok((n - m - 1) as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub enum JPoint {
    /// `coords[k]` is `t_{lower + 1 + k}`; every other coordinate is zero.
    Finite { upper: i64, lower: i64, coords: Vec<f64> },
    Infinity { upper: i64, lower: i64 },
}

impl JPoint {
    pub fn new(upper: i64, lower: i64, coords: Vec<f64>) -> Result<Self> {
        let dim = j_dimension(upper, lower)?;
        if coords.len() != dim {
            return Err(Error::IndexMismatch(format!(
                "J({upper},{lower}) has dimension {dim}, got {} coordinates",
                coords.len()
            )));
        }
        if let Some(t) = coords.iter().find(|t| !(**t >= 0.0)) {
            return Err(Error::Precondition(format!("coordinate {t} is not a nonnegative real")));
        }
        Ok(JPoint::Finite { upper, lower, coords })
    }

    pub fn origin(upper: i64, lower: i64) -> Result<Self> {
        Self::new(upper, lower, vec![0.0; j_dimension(upper, lower)?])
    }

    pub fn infinity(upper: i64, lower: i64) -> Result<Self> {
        j_dimension(upper, lower)?;
        Ok(JPoint::Infinity { upper, lower })
    }

    pub fn upper(&self) -> i64 {
        match self {
            JPoint::Finite { upper, .. } | JPoint::Infinity { upper, .. } => *upper,
        }
    }

    pub fn lower(&self) -> i64 {
        match self {
            JPoint::Finite { lower, .. } | JPoint::Infinity { lower, .. } => *lower,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, JPoint::Infinity { .. })
    }

    /// `t_i`, zero outside the window; `None` at the basepoint.
    pub fn coordinate(&self, i: i64) -> Option<f64> {
        match self {
            JPoint::Infinity { .. } => None,
            JPoint::Finite { lower, upper, coords } => {
                Some(if i > *lower && i < *upper { coords[(i - lower - 1) as usize] } else { 0.0 })
            }
        }
    }
}

/// Composition `J(n,m)⁺ × J(m,p)⁺ → J(n,p)⁺`.
pub fn compose(u: &JPoint, v: &JPoint) -> Result<JPoint> {
    if u.lower() != v.upper() {
        return Err(Error::IndexMismatch(format!(
            "cannot compose J({},{}) with J({},{})",
            u.upper(),
            u.lower(),
            v.upper(),
            v.lower()
        )));
    }
    let (n, p) = (u.upper(), v.lower());
    match (u, v) {
        (JPoint::Finite { coords: cu, .. }, JPoint::Finite { coords: cv, .. }) => {
            // window (p, n) = v's window, then t_m = 0, then u's window
            let mut coords = Vec::with_capacity((n - p - 1) as usize);
            coords.extend_from_slice(cv);
            coords.push(0.0);
            coords.extend_from_slice(cu);
            Ok(JPoint::Finite { upper: n, lower: p, coords })
        }
        _ => Ok(JPoint::Infinity { upper: n, lower: p }),
    }
}

/// A closed face of `J(n,m)`: the locus where the listed coordinates vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JFace {
    pub upper: i64,
    pub lower: i64,
    pub vanishing: BTreeSet<i64>,
}

impl JFace {
    pub fn new(upper: i64, lower: i64, vanishing: impl IntoIterator<Item = i64>) -> Result<Self> {
        j_dimension(upper, lower)?;
        let vanishing: BTreeSet<i64> = vanishing.into_iter().collect();
        if let Some(i) = vanishing.iter().find(|&&i| i <= lower || i >= upper) {
            return Err(Error::IndexMismatch(format!("index {i} outside ({lower},{upper})")));
        }
        Ok(Self { upper, lower, vanishing })
    }

    pub fn dimension(&self) -> usize {
        (self.upper - self.lower - 1) as usize - self.vanishing.len()
    }
}

/// The open stratum containing `u`, named by its vanishing coordinates.
pub fn stratum_of(u: &JPoint) -> Result<JFace> {
    match u {
        JPoint::Infinity { .. } => Err(Error::InfinityHasNoStratum),
        JPoint::Finite { upper, lower, coords } => Ok(JFace {
            upper: *upper,
            lower: *lower,
            vanishing: coords
                .iter()
                .enumerate()
                .filter(|(_, t)| **t == 0.0)
                .map(|(k, _)| lower + 1 + k as i64)
                .collect(),
        }),
    }
}

/// The chain of morphism spaces whose product the face is identified with,
/// from the top: `[(n, i₁), (i₁, i₂), …, (i_r, p)]` for `i₁ > … > i_r`.
pub fn face_factorization(f: &JFace) -> Vec<(i64, i64)> {
    let mut breaks: Vec<i64> = f.vanishing.iter().rev().copied().collect();
    breaks.push(f.lower);
    let mut out = Vec::with_capacity(breaks.len());
    let mut top = f.upper;
    for b in breaks {
        out.push((top, b));
        top = b;
    }
    out
}
