//! Pointwise boundary quantities for both traction sets.
//!
//! The Mindlin-Tiersten set pairs a force traction with the tangential
//! moment P m n; the corrected set adds the tangential-gradient surface
//! term missing from the MT force traction and rotates the moment into the
//! quantity conjugate to the normal derivative of the variation. Edge
//! densities carry the leftover line terms where patches meet.
//!
//! Every surface derivative is taken through the patch's extended normal
//! field via jet arithmetic. A trailing tangential contraction (or an
//! `n x` factor) makes each quantity independent of the extension choice;
//! that independence is asserted in tests rather than assumed.

use serde::{Deserialize, Serialize};

use crate::constitutive::{cauchy_stress, couple_stress, total_force_stress, MaterialParams};
use crate::error::Error;
use crate::geometry::{DomainGeometry, EdgeCurve, NormalExtension, SurfacePatch};
use crate::jet::{jet_anti, JetMat3};
use crate::poly::{PolyMatrix, PolyTen3, PolyVector};
use crate::tensor::{Mat3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TractionFlavor {
    MindlinTiersten,
    Corrected,
}

impl std::fmt::Display for TractionFlavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TractionFlavor::MindlinTiersten => write!(f, "mt"),
            TractionFlavor::Corrected => write!(f, "corrected"),
        }
    }
}

/// One evaluated boundary sample: force traction `t` and moment quantity
/// `g` of the chosen flavor at a surface point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TractionSample {
    pub point: Vec3,
    pub normal: Vec3,
    pub t: Vec3,
    pub g: Vec3,
    pub flavor: TractionFlavor,
}

impl TractionSample {
    pub const CSV_HEADER: &'static str = "x,y,z,nx,ny,nz,tx,ty,tz,gx,gy,gz,flavor";

    pub fn csv_row(&self) -> String {
        let v = |v: Vec3| format!("{:.16e},{:.16e},{:.16e}", v[0], v[1], v[2]);
        format!(
            "{},{},{},{}",
            v(self.point),
            v(self.normal),
            v(self.t),
            v(self.g)
        ) + &format!(",{}", self.flavor)
    }
}

/// Per-side and combined edge densities at a point of an edge curve.
///
/// `tangential_per_side[k]` is `anti(P m n) . nu` evaluated with side `k`'s own
/// normal and co-normal; `twist_per_side[k]` is `<n, m n> (n x nu)`. Their
/// side sums add up to `total = sum_sides (m n) x nu`, the full line density
/// closing the virtual-work identity. On a smooth junction the co-normals
/// are opposite and `jump` reduces to the discontinuity of `anti(P m n)`
/// contracted with one side's co-normal.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EdgeJump {
    pub point: Vec3,
    pub tangential_per_side: [Vec3; 2],
    pub twist_per_side: [Vec3; 2],
    pub jump: Vec3,
    pub total: Vec3,
}

/// Precomputed polynomial stress state of one displacement field, ready for
/// repeated pointwise boundary evaluation.
#[derive(Clone, Debug)]
pub struct TractionField {
    params: MaterialParams,
    sigma: PolyMatrix,
    m: PolyMatrix,
    grad_m: PolyTen3,
    tau: PolyMatrix,
}

impl TractionField {
    pub fn new(params: &MaterialParams, u: &PolyVector) -> Self {
        let sigma = cauchy_stress(params, u);
        let m = couple_stress(params, u);
        let grad_m = m.grad();
        let tau = total_force_stress(params, u);
        TractionField {
            params: *params,
            sigma,
            m,
            grad_m,
            tau,
        }
    }

    pub fn params(&self) -> &MaterialParams {
        &self.params
    }

    pub fn cauchy_stress(&self) -> &PolyMatrix {
        &self.sigma
    }

    pub fn couple_stress(&self) -> &PolyMatrix {
        &self.m
    }

    pub fn total_force_stress(&self) -> &PolyMatrix {
        &self.tau
    }

    /// Couple stress lifted to a jet at `x`.
    fn m_jet(&self, x: Vec3) -> JetMat3 {
        let val = self.m.eval(x);
        JetMat3::from_value_grad(val, |i, j| {
            Vec3([
                self.grad_m.0[i][j][0].eval(x),
                self.grad_m.0[i][j][1].eval(x),
                self.grad_m.0[i][j][2].eval(x),
            ])
        })
    }

    /// MT force traction `tau n - (1/2) n x grad<n, sym(m) n>` under a
    /// chosen normal extension. The cross product with n discards any
    /// normal gradient component, so the result is extension independent.
    pub fn traction_mt_ext(&self, patch: &SurfacePatch, x: Vec3, ext: NormalExtension) -> Vec3 {
        let n_jet = patch.normal_jet(x, ext);
        let n = n_jet.value();
        let phi = n_jet.dot(&self.m_jet(x).sym().matvec(&n_jet));
        self.tau.eval(x).matvec(n) - n.cross(phi.grad).scale(0.5)
    }

    pub fn traction_mt(&self, patch: &SurfacePatch, x: Vec3) -> Vec3 {
        self.traction_mt_ext(patch, x, NormalExtension::Canonical)
    }

    /// MT moment quantity `P m n`, tangential by construction.
    pub fn moment_mt(&self, patch: &SurfacePatch, x: Vec3) -> Vec3 {
        let n = patch.normal(x);
        let p = Mat3::identity() - n.outer(n);
        p.matvec(self.m.eval(x).matvec(n))
    }

    /// Normal-normal couple stress scalar `<n, m n>`, the twist density
    /// whose surface gradient feeds the MT force traction.
    pub fn normal_twist(&self, x: Vec3, n: Vec3) -> f64 {
        n.dot(self.m.eval(x).matvec(n))
    }

    /// The corrected set's extra force term
    /// `M = -(1/2) grad[anti(P m n) P] : P` with `(C:B)_i = C_ijp B_pj`;
    /// the trailing tangential contraction suppresses extension dependence.
    pub fn missing_term_ext(&self, patch: &SurfacePatch, x: Vec3, ext: NormalExtension) -> Vec3 {
        let n_jet = patch.normal_jet(x, ext);
        let p_jet = JetMat3::identity() - n_jet.outer(&n_jet);
        let g_jet = p_jet.matvec(&self.m_jet(x).matvec(&n_jet));
        let a_jet = jet_anti(&g_jet).matmul(&p_jet);
        let n = n_jet.value();
        let p = Mat3::identity() - n.outer(n);
        Vec3(std::array::from_fn(|i| {
            let mut s = 0.0;
            for j in 0..3 {
                for q in 0..3 {
                    s += a_jet.0[i][j].grad[q] * p[q][j];
                }
            }
            -0.5 * s
        }))
    }

    pub fn missing_term(&self, patch: &SurfacePatch, x: Vec3) -> Vec3 {
        self.missing_term_ext(patch, x, NormalExtension::Canonical)
    }

    /// Corrected force traction: MT plus the missing term.
    pub fn traction_corrected(&self, patch: &SurfacePatch, x: Vec3) -> Vec3 {
        self.traction_mt(patch, x) + self.missing_term(patch, x)
    }

    /// Corrected moment quantity `P anti(P m n) n = (P m n) x n`: the MT
    /// moment rotated a quarter turn in the tangent plane.
    pub fn moment_corrected(&self, patch: &SurfacePatch, x: Vec3) -> Vec3 {
        let n = patch.normal(x);
        self.moment_mt(patch, x).cross(n)
    }

    pub fn sample(&self, patch: &SurfacePatch, x: Vec3, flavor: TractionFlavor) -> TractionSample {
        let (t, g) = match flavor {
            TractionFlavor::MindlinTiersten => {
                (self.traction_mt(patch, x), self.moment_mt(patch, x))
            }
            TractionFlavor::Corrected => (
                self.traction_corrected(patch, x),
                self.moment_corrected(patch, x),
            ),
        };
        TractionSample {
            point: x,
            normal: patch.normal(x),
            t,
            g,
            flavor,
        }
    }

    /// Edge densities at a point of `edge`. Both adjacent patches must be
    /// registered in `domain`.
    pub fn edge_jump(
        &self,
        domain: &DomainGeometry,
        edge: &EdgeCurve,
        x: Vec3,
    ) -> Result<EdgeJump, Error> {
        for name in edge.side_patches() {
            if domain.patch(name).is_none() {
                return Err(Error::UnknownPatch(name.to_string()));
            }
        }
        let m = self.m.eval(x);
        let frames = edge.sides(x);
        let mut tangential = [Vec3::ZERO; 2];
        let mut twist = [Vec3::ZERO; 2];
        let mut total = Vec3::ZERO;
        for (k, f) in frames.iter().enumerate() {
            let mn = m.matvec(f.n);
            let p = Mat3::identity() - f.n.outer(f.n);
            let g = p.matvec(mn);
            tangential[k] = g.cross(f.nu);
            twist[k] = (f.n.cross(f.nu)).scale(f.n.dot(mn));
            total = total + mn.cross(f.nu);
        }
        Ok(EdgeJump {
            point: x,
            tangential_per_side: tangential,
            twist_per_side: twist,
            jump: tangential[0] + tangential[1],
            total,
        })
    }
}
