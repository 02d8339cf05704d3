//! First-order forward-mode values: a scalar together with its spatial
//! gradient. Surface operators built from an extended normal field
//! (gradients of projected quantities, surface divergences) reduce to jet
//! arithmetic, so no symbolic differentiation of the extension is needed.

use crate::tensor::{levi_civita, Mat3, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub val: f64,
    pub grad: Vec3,
}

impl Jet {
    pub fn new(val: f64, grad: Vec3) -> Self {
        Jet { val, grad }
    }

    pub fn constant(val: f64) -> Self {
        Jet {
            val,
            grad: Vec3::ZERO,
        }
    }

    pub fn scale(self, s: f64) -> Jet {
        Jet {
            val: self.val * s,
            grad: self.grad.scale(s),
        }
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            val: self.val + o.val,
            grad: self.grad + o.grad,
        }
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            val: self.val - o.val,
            grad: self.grad - o.grad,
        }
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            val: self.val * o.val,
            grad: self.grad.scale(o.val) + o.grad.scale(self.val),
        }
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Vector of jets; component `i` carries the gradient row `(grad v)_i.`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JetVec3(pub [Jet; 3]);

impl JetVec3 {
    /// Lifts a vector value with its gradient `(grad v)_ik = dv_i/dx_k`.
    pub fn from_value_grad(val: Vec3, grad: Mat3) -> Self {
        JetVec3(std::array::from_fn(|i| Jet::new(val[i], Vec3(grad[i]))))
    }

    pub fn constant(v: Vec3) -> Self {
        JetVec3(std::array::from_fn(|i| Jet::constant(v[i])))
    }

    pub fn value(&self) -> Vec3 {
        Vec3(std::array::from_fn(|i| self.0[i].val))
    }

    /// Gradient matrix reassembled from the component jets.
    pub fn grad(&self) -> Mat3 {
        Mat3(std::array::from_fn(|i| self.0[i].grad.0))
    }

    pub fn dot(&self, o: &JetVec3) -> Jet {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &JetVec3) -> JetVec3 {
        JetVec3(std::array::from_fn(|i| {
            let mut s = Jet::constant(0.0);
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita(i, j, k);
                    if e != 0.0 {
                        s = s + (self.0[j] * o.0[k]).scale(e);
                    }
                }
            }
            s
        }))
    }

    pub fn outer(&self, o: &JetVec3) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i] * o.0[j])
        }))
    }

    pub fn scale(&self, s: f64) -> JetVec3 {
        JetVec3(std::array::from_fn(|i| self.0[i].scale(s)))
    }
}

impl std::ops::Add for JetVec3 {
    type Output = JetVec3;
    fn add(self, o: JetVec3) -> JetVec3 {
        JetVec3(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl std::ops::Sub for JetVec3 {
    type Output = JetVec3;
    fn sub(self, o: JetVec3) -> JetVec3 {
        JetVec3(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JetMat3(pub [[Jet; 3]; 3]);

impl JetMat3 {
    /// Lifts a matrix value with its gradient `(grad A)_ijk = dA_ij/dx_k`
    /// supplied as a closure over `(i, j)`.
    pub fn from_value_grad(val: Mat3, grad: impl Fn(usize, usize) -> Vec3) -> Self {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| Jet::new(val[i][j], grad(i, j)))
        }))
    }

    pub fn constant(m: Mat3) -> Self {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| Jet::constant(m[i][j]))
        }))
    }

    pub fn identity() -> Self {
        JetMat3::constant(Mat3::identity())
    }

    pub fn value(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j].val)
    }

    pub fn transpose(&self) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i])
        }))
    }

    pub fn sym(&self) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| (self.0[i][j] + self.0[j][i]).scale(0.5))
        }))
    }

    pub fn matvec(&self, v: &JetVec3) -> JetVec3 {
        JetVec3(std::array::from_fn(|i| {
            self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2]
        }))
    }

    pub fn matmul(&self, o: &JetMat3) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j]
            })
        }))
    }

    pub fn scale(&self, s: f64) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].scale(s))
        }))
    }
}

impl std::ops::Add for JetMat3 {
    type Output = JetMat3;
    fn add(self, o: JetMat3) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + o.0[i][j])
        }))
    }
}

impl std::ops::Sub for JetMat3 {
    type Output = JetMat3;
    fn sub(self, o: JetMat3) -> JetMat3 {
        JetMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] - o.0[i][j])
        }))
    }
}

/// `anti(v)_ij = -eps_ijk v_k` lifted to jets.
pub fn jet_anti(v: &JetVec3) -> JetMat3 {
    JetMat3(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = Jet::constant(0.0);
            for k in 0..3 {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    s = s + v.0[k].scale(-e);
                }
            }
            s
        })
    }))
}
