//! Projections of the Boolean cube.
//!
//! A projection in 𝒫(g, h) is a map `P: Bⁿ → Bⁿ` that fixes every point of
//! the ON-set of `g` and sends every point of the OFF-set of `g` into the
//! OFF-set of `h`. It is stored as a substitution vector: entry `i` is the
//! function giving the `i`-th coordinate of `P(x)`.
//!
//! Projections built here come from one fixed off-point `y` of `h`:
//! `xᵢ ↦ g·xᵢ + g′·yᵢ`, except that coordinates `h` does not depend on are
//! left alone. Products of base functions are handled by composing
//! projections.

use log::warn;
use thiserror::Error;

use crate::engine::{BoolFunc, EngineError, Manager, Point, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("h is identically 1 and g is not, so no projection of g into h exists")]
    NoOffSet,
    #[error("point {0} is not in the OFF-set of h")]
    NotAnOffPoint(Point),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    subst: Vec<BoolFunc>,
    g: BoolFunc,
    h: BoolFunc,
    off_point: Option<Point>,
}

impl Projection {
    /// The identity map, a member of 𝒫(1, h) for every `h`.
    pub fn identity(mgr: &Manager, h: BoolFunc) -> Self {
        Projection {
            subst: mgr.vars(),
            g: mgr.one(),
            h,
            off_point: None,
        }
    }

    /// A substitution claimed to lie in 𝒫(g, h). Only the length is
    /// checked; use [`verify_projection`] for membership.
    pub fn from_parts(
        mgr: &Manager,
        subst: Vec<BoolFunc>,
        g: BoolFunc,
        h: BoolFunc,
    ) -> Result<Self, ProjectionError> {
        if subst.len() != mgr.var_count() {
            return Err(EngineError::LengthMismatch {
                expected: mgr.var_count(),
                actual: subst.len(),
            }
            .into());
        }
        Ok(Projection {
            subst,
            g,
            h,
            off_point: None,
        })
    }

    pub fn subst(&self) -> &[BoolFunc] {
        &self.subst
    }

    /// The function whose ON-set this projection fixes.
    pub fn base(&self) -> BoolFunc {
        self.g
    }

    /// The function whose OFF-set receives the rest of the cube.
    pub fn target(&self) -> BoolFunc {
        self.h
    }

    /// The off-point of the target this projection was built from, if any.
    pub fn off_point(&self) -> Option<&Point> {
        self.off_point.as_ref()
    }

    pub fn is_identity(&self, mgr: &Manager) -> bool {
        self.subst == mgr.vars()
    }

    /// `P(p)`, coordinate by coordinate.
    pub fn apply(&self, mgr: &Manager, p: &Point) -> Result<Point, EngineError> {
        self.subst
            .iter()
            .map(|&s| mgr.eval(s, p))
            .collect::<Result<Vec<_>, _>>()
            .map(Point::new)
    }

    /// One `x_i -> <formula>` line per variable.
    pub fn dump(&self, mgr: &Manager) -> Vec<String> {
        self.subst
            .iter()
            .enumerate()
            .map(|(i, &s)| format!("{} -> {}", VarId(i as u32), mgr.to_formula(s)))
            .collect()
    }
}

/// The projection `xᵢ ↦ g·xᵢ + g′·yᵢ` for a fixed `y` with `h(y) = 0`.
///
/// Coordinates outside the support of `h` map to themselves. The others
/// simplify to `g·xᵢ` when `yᵢ = 0` and to `g′ + xᵢ` when `yᵢ = 1`. If
/// `g ≡ 1` the result is the identity whatever `h` and `y` are.
pub fn point_projection(
    mgr: &Manager,
    g: BoolFunc,
    h: BoolFunc,
    y: &Point,
) -> Result<Projection, ProjectionError> {
    if y.len() != mgr.var_count() {
        return Err(EngineError::LengthMismatch {
            expected: mgr.var_count(),
            actual: y.len(),
        }
        .into());
    }
    if mgr.is_one(g) {
        return Ok(Projection::identity(mgr, h));
    }
    if mgr.is_one(h) {
        return Err(ProjectionError::NoOffSet);
    }
    if mgr.eval(h, y)? {
        return Err(ProjectionError::NotAnOffPoint(y.clone()));
    }
    let support = mgr.support(h);
    let ng = mgr.not(g);
    let mut off_point = y.clone();
    let subst = (0..mgr.var_count() as u32)
        .map(VarId)
        .map(|v| {
            let x = mgr.var(v).expect("in range");
            if !support.contains(&v) {
                off_point.set(v, false);
                x
            } else if y.get(v) {
                mgr.or(ng, x)
            } else {
                mgr.and(g, x)
            }
        })
        .collect();
    Ok(Projection {
        subst,
        g,
        h,
        off_point: Some(off_point),
    })
}

/// A projection in 𝒫(g, h) built from the smallest off-point of `h`.
pub fn projection_for(
    mgr: &Manager,
    g: BoolFunc,
    h: BoolFunc,
) -> Result<Projection, ProjectionError> {
    if mgr.is_one(g) {
        return Ok(Projection::identity(mgr, h));
    }
    let y = mgr.any_off_point(h).ok_or(ProjectionError::NoOffSet)?;
    point_projection(mgr, g, h, &y)
}

/// `first ∘ second`: apply `second`, then `first`.
///
/// With `first ∈ 𝒫(g₁, h)` and `second ∈ 𝒫(g₂, h)` the result lies in
/// 𝒫(g₁·g₂, h). Differing targets only draw a warning; debug builds check
/// the result against 𝒫(g₁·g₂, h) of the first target.
pub fn compose_projections(
    mgr: &Manager,
    first: &Projection,
    second: &Projection,
) -> Result<Projection, ProjectionError> {
    if first.h != second.h {
        warn!("composing projections with different targets");
    }
    let subst = first
        .subst
        .iter()
        .map(|&s| mgr.compose(s, &second.subst))
        .collect::<Result<Vec<_>, _>>()?;
    let composed = Projection {
        subst,
        g: mgr.and(first.g, second.g),
        h: first.h,
        off_point: first.off_point.clone().or_else(|| second.off_point.clone()),
    };
    debug_assert!(
        first.h != second.h || verify_projection(mgr, &composed, composed.g, composed.h),
        "composition left 𝒫(g1·g2, h)"
    );
    Ok(composed)
}

/// Checks `P ∈ 𝒫(g, h)` exactly: `g·(Pᵢ ⊕ xᵢ) = 0` for every `i`, and
/// `g′·(h ∘ P) = 0`.
pub fn verify_projection(mgr: &Manager, p: &Projection, g: BoolFunc, h: BoolFunc) -> bool {
    if p.subst.len() != mgr.var_count() {
        return false;
    }
    let fixes_on_set = p.subst.iter().enumerate().all(|(i, &s)| {
        let x = mgr.var(VarId(i as u32)).expect("in range");
        mgr.is_zero(mgr.and(g, mgr.xor(s, x)))
    });
    if !fixes_on_set {
        return false;
    }
    let moved = mgr.compose(h, &p.subst).expect("length checked");
    mgr.is_zero(mgr.and(mgr.not(g), moved))
}
