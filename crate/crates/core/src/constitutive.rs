//! Constitutive law of the indeterminate couple stress solid: quadratic
//! energy, symmetric Cauchy stress, trace-free couple stress, and the
//! nonsymmetric total force stress whose divergence drives equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::poly::{PolyMatrix, PolyScalar, PolyVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub mu: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl MaterialParams {
    /// Validated constructor. Positivity of the classical energy needs
    /// `mu > 0` and `3*lambda + 2*mu > 0`; the curvature part needs both
    /// alphas nonnegative and, unless both vanish (the classical limit,
    /// where the couple stress is identically zero), a positive sum.
    pub fn new(mu: f64, lambda: f64, alpha1: f64, alpha2: f64) -> Result<Self, Error> {
        let p = MaterialParams {
            mu,
            lambda,
            alpha1,
            alpha2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Classical linear elasticity: both curvature moduli zero.
    pub fn classical(mu: f64, lambda: f64) -> Result<Self, Error> {
        MaterialParams::new(mu, lambda, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mu > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "shear modulus must be positive, got {}",
                self.mu
            )));
        }
        if !(3.0 * self.lambda + 2.0 * self.mu > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "bulk positivity needs 3*lambda + 2*mu > 0, got {}",
                3.0 * self.lambda + 2.0 * self.mu
            )));
        }
        if self.alpha1 < 0.0 || self.alpha2 < 0.0 {
            return Err(Error::InvalidMaterial(format!(
                "curvature moduli must be nonnegative, got alpha1={} alpha2={}",
                self.alpha1, self.alpha2
            )));
        }
        if self.alpha1 == 0.0 && self.alpha2 == 0.0 {
            return Ok(()); // classical limit
        }
        if !(self.alpha1 + self.alpha2 > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "curvature moduli must have positive sum, got {}",
                self.alpha1 + self.alpha2
            )));
        }
        Ok(())
    }
}

/// `sigma = 2 mu sym(grad u) + lambda tr(grad u) I`, symmetric by construction.
pub fn cauchy_stress(p: &MaterialParams, u: &PolyVector) -> PolyMatrix {
    let g = u.grad();
    let sym = g.sym().scale(2.0 * p.mu);
    let vol = PolyMatrix::identity_times(&g.trace().scale(p.lambda));
    &sym + &vol
}

/// `m = alpha1 sym(grad curl u) + alpha2 skw(grad curl u)`; trace free
/// because tr sym(grad curl u) = div curl u = 0.
pub fn couple_stress(p: &MaterialParams, u: &PolyVector) -> PolyMatrix {
    let k = u.curl().grad();
    &k.sym().scale(p.alpha1) + &k.skw().scale(p.alpha2)
}

/// `tau = sigma - (1/2) anti(Div m)`; its symmetric part is the Cauchy
/// stress, its skew part carries the couple stress divergence.
pub fn total_force_stress(p: &MaterialParams, u: &PolyVector) -> PolyMatrix {
    let sigma = cauchy_stress(p, u);
    let m = couple_stress(p, u);
    &sigma - &PolyMatrix::anti(&m.div()).scale(0.5)
}

/// Strain-plus-curvature energy density
/// `W = mu |sym grad u|^2 + (lambda/2) tr(sym grad u)^2
///    + (alpha1/4) |sym grad curl u|^2 + (alpha2/4) |skw grad curl u|^2`.
pub fn energy_density(p: &MaterialParams, u: &PolyVector) -> PolyScalar {
    let e = u.grad().sym();
    let tr = e.trace();
    let k = u.curl().grad();
    let ks = k.sym();
    let ka = k.skw();
    let mut w = e.inner(&e).scale(p.mu);
    w = &w + &tr.mul(&tr).scale(0.5 * p.lambda);
    w = &w + &ks.inner(&ks).scale(0.25 * p.alpha1);
    w = &w + &ka.inner(&ka).scale(0.25 * p.alpha2);
    w
}

/// Equilibrium residual `r = Div tau + f`; vanishes identically when the
/// body force is manufactured as `f = -Div tau`.
pub fn el_residual(p: &MaterialParams, u: &PolyVector, f: &PolyVector) -> PolyVector {
    &total_force_stress(p, u).div() + f
}
