//! Independent oracles shared by the integration suites.
//!
//! Everything here is rebuilt from the public polynomial calculus and plain
//! pointwise arithmetic: stress chains composed operator by operator,
//! surface derivatives taken by walking along the boundary itself. None of
//! it calls the jet-based boundary evaluators it is used to check.
#![allow(dead_code)]

use couplestress::geometry::tangent_basis;
use couplestress::tensor::anti;
use couplestress::{Mat3, MaterialParams, PolyMatrix, PolyVector, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Admissible random material: positive shear and curvature moduli, bulk
/// positivity by construction.
pub fn random_params(rng: &mut ChaCha8Rng) -> MaterialParams {
    let mu = rng.gen_range(0.5..2.0);
    let lambda = rng.gen_range(0.0..1.5);
    let a1 = rng.gen_range(0.2..1.5);
    let a2 = rng.gen_range(0.2..1.5);
    MaterialParams::new(mu, lambda, a1, a2).unwrap()
}

/// Stress state of one displacement field, assembled from the public
/// polynomial operators alone (no constitutive or traction module calls).
pub struct StressChain {
    pub sigma: PolyMatrix,
    pub m: PolyMatrix,
    pub tau: PolyMatrix,
}

pub fn stress_chain(p: &MaterialParams, u: &PolyVector) -> StressChain {
    let g = u.grad();
    let sigma = &g.sym().scale(2.0 * p.mu)
        + &PolyMatrix::identity_times(&g.trace().scale(p.lambda));
    let k = u.curl().grad();
    let m = &k.sym().scale(p.alpha1) + &k.skw().scale(p.alpha2);
    let tau = &sigma - &PolyMatrix::anti(&m.div()).scale(0.5);
    StressChain { sigma, m, tau }
}

/// Boundary carrier for intrinsic surface walks: either a plane with a
/// fixed normal or a sphere of the given radius.
#[derive(Clone, Copy)]
pub enum Carrier {
    Flat(Vec3),
    Sphere(f64),
}

impl Carrier {
    pub fn normal(&self, x: Vec3) -> Vec3 {
        match self {
            Carrier::Flat(n) => *n,
            Carrier::Sphere(_) => x.scale(1.0 / x.norm()),
        }
    }

    /// Point reached by walking (arc) parameter `s` from `x` along the
    /// tangent `t` without leaving the carrier. The sphere walk satisfies
    /// `c(0) = x`, `c'(0) = t` exactly.
    pub fn walk(&self, x: Vec3, t: Vec3, s: f64) -> Vec3 {
        match self {
            Carrier::Flat(_) => x + t.scale(s),
            Carrier::Sphere(r) => {
                let y = x + t.scale(s);
                y.scale(r / y.norm())
            }
        }
    }
}

pub const FD_STEP: f64 = 1e-5;

/// Intrinsic tangential derivative of a surface scalar along `t`.
pub fn surf_deriv(c: Carrier, f: impl Fn(Vec3) -> f64, x: Vec3, t: Vec3) -> f64 {
    (f(c.walk(x, t, FD_STEP)) - f(c.walk(x, t, -FD_STEP))) / (2.0 * FD_STEP)
}

/// Tangential surface gradient `P grad a` from two intrinsic walks.
pub fn surf_grad(c: Carrier, f: impl Fn(Vec3) -> f64 + Copy, x: Vec3) -> Vec3 {
    let n = c.normal(x);
    let (t1, t2) = tangent_basis(n);
    t1.scale(surf_deriv(c, f, x, t1)) + t2.scale(surf_deriv(c, f, x, t2))
}

/// Mindlin-Tiersten force traction rebuilt from the stress chain and
/// intrinsic surface differentiation:
/// `tau n - 1/2 n x grad_s <n, (sym m) n>`.
pub fn mt_traction_oracle(ch: &StressChain, c: Carrier, x: Vec3) -> Vec3 {
    let n = c.normal(x);
    let a = |y: Vec3| {
        let ny = c.normal(y);
        ny.dot(ch.m.eval(y).sym().matvec(ny))
    };
    let grad_a = surf_grad(c, a, x);
    ch.tau.eval(x).matvec(n) - n.cross(grad_a).scale(0.5)
}

/// Missing tangential-gradient term via intrinsic walks. The contraction
/// `M_i = -1/2 (grad A)_ijp P_pj` only consumes tangential derivative
/// directions, so each contribution is one surface walk of the matrix
/// field `A = anti(P m n) P`.
pub fn missing_oracle(ch: &StressChain, c: Carrier, x: Vec3) -> Vec3 {
    let n = c.normal(x);
    let (t1, t2) = tangent_basis(n);
    let a_mat = |y: Vec3| {
        let ny = c.normal(y);
        let py = Mat3::identity() - ny.outer(ny);
        let g = py.matvec(ch.m.eval(y).matvec(ny));
        anti(g).matmul(py)
    };
    let mut out = Vec3::ZERO;
    for t in [t1, t2] {
        let da = (a_mat(c.walk(x, t, FD_STEP)) - a_mat(c.walk(x, t, -FD_STEP)))
            .scale(1.0 / (2.0 * FD_STEP));
        out = out + da.matvec(t);
    }
    out.scale(-0.5)
}

/// One side's edge densities from pointwise values only: the tangential
/// moment part `(P m n) x nu`, the normal-twist part `<n, m n> (n x nu)`,
/// and their sum `(m n) x nu`.
pub struct EdgeSideOracle {
    pub tangential: Vec3,
    pub twist: Vec3,
    pub full: Vec3,
}

pub fn edge_side_oracle(ch: &StressChain, n: Vec3, nu: Vec3, x: Vec3) -> EdgeSideOracle {
    let mn = ch.m.eval(x).matvec(n);
    let p = Mat3::identity() - n.outer(n);
    EdgeSideOracle {
        tangential: p.matvec(mn).cross(nu),
        twist: n.cross(nu).scale(n.dot(mn)),
        full: mn.cross(nu),
    }
}
