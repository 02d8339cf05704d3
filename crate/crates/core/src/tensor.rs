//! Dense 3D value types and the exact algebraic operators the model is
//! phrased in: `anti`/`axl` between vectors and skew matrices, sym/skw/trace
//! decomposition, the tangential projector, and the third-order contraction
//! `(C : B)_i = C_ijp B_pj`.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Relative tolerance for rejecting a matrix claimed to be skew.
pub const SKEW_REL_TOL: f64 = 1e-12;

/// Tolerance on |n| - 1 when building the tangential projector.
pub const UNIT_NORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

/// Third-order tensor, indexed `[i][j][k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ten3(pub [[[f64; 3]; 3]; 3]);

/// Levi-Civita symbol with a fixed lookup, no sign-of-permutation arithmetic.
pub const fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        let a = self.0;
        let b = o.0;
        Vec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn outer(self, o: Vec3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i] * o.0[j])
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

impl std::ops::Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn identity() -> Mat3 {
        Mat3::from_fn(|i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> f64) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        }
        Mat3(m)
    }

    pub fn transpose(self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn sym(self) -> Mat3 {
        Mat3::from_fn(|i, j| 0.5 * (self.0[i][j] + self.0[j][i]))
    }

    pub fn skw(self) -> Mat3 {
        Mat3::from_fn(|i, j| 0.5 * (self.0[i][j] - self.0[j][i]))
    }

    /// Frobenius inner product `<A, B> = A_ij B_ij`.
    pub fn inner(self, o: Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * o.0[i][j];
            }
        }
        s
    }

    pub fn norm(self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn norm_inf(self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.0 {
            for v in row {
                m = m.max(v.abs());
            }
        }
        m
    }

    pub fn matvec(self, v: Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2];
        }
        Vec3(out)
    }

    pub fn matmul(self, o: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j]
        })
    }

    pub fn scale(self, s: f64) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] * s)
    }
}

impl std::ops::Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl std::ops::Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl std::ops::Index<usize> for Mat3 {
    type Output = [f64; 3];
    fn index(&self, i: usize) -> &[f64; 3] {
        &self.0[i]
    }
}

impl Ten3 {
    pub fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Ten3 {
        let mut t = [[[0.0; 3]; 3]; 3];
        for (i, p) in t.iter_mut().enumerate() {
            for (j, row) in p.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = f(i, j, k);
                }
            }
        }
        Ten3(t)
    }

    pub fn norm_inf(&self) -> f64 {
        let mut m = 0.0f64;
        for p in &self.0 {
            for row in p {
                for v in row {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }
}

/// `anti(v)_ij = -eps_ijk v_k`, the skew matrix with `anti(v)·w = v × w`.
pub fn anti(v: Vec3) -> Mat3 {
    Mat3::from_fn(|i, j| {
        let mut s = 0.0;
        for k in 0..3 {
            s -= levi_civita(i, j, k) * v.0[k];
        }
        s
    })
}

/// Inverse of `anti` on skew matrices. Rejects input whose symmetric part
/// exceeds `SKEW_REL_TOL` relative to the matrix norm.
pub fn axl(a: Mat3) -> Result<Vec3, Error> {
    let scale = a.norm();
    let residue = a.sym().norm();
    if residue > SKEW_REL_TOL * scale.max(1e-300) {
        return Err(Error::NotSkew {
            residue: residue / scale.max(1e-300),
        });
    }
    let s = a.skw();
    Ok(Vec3([s.0[2][1], s.0[0][2], s.0[1][0]]))
}

/// Splits `A` into (sym A, skw A, tr A).
pub fn decompose(a: Mat3) -> (Mat3, Mat3, f64) {
    (a.sym(), a.skw(), a.trace())
}

/// `P = 1 - n (x) n` for a unit normal.
pub fn tangential_projector(n: Vec3) -> Result<Mat3, Error> {
    let norm = n.norm();
    if (norm - 1.0).abs() > UNIT_NORMAL_TOL {
        return Err(Error::NonUnitNormal { norm });
    }
    Ok(Mat3::identity() - n.outer(n))
}

/// `(C : B)_i = C_ijp B_pj`.
pub fn double_contract(c: &Ten3, b: Mat3) -> Vec3 {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..3 {
            for p in 0..3 {
                s += c.0[i][j][p] * b.0[p][j];
            }
        }
        *o = s;
    }
    Vec3(out)
}
