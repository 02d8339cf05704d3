//! Ritz discretization: global Legendre-product bases, the stiffness of the
//! couple-stress energy, boundary-data collocation, and manufactured
//! equilibrium solves that put the two traction sets head to head.
//!
//! Every problem here is manufactured: data on the right-hand side comes
//! from an exact polynomial solution through the same traction evaluators
//! used by the balance laboratory. Feeding the corrected set back into the
//! solver must reproduce the exact field to solver precision; feeding the
//! Mindlin-Tiersten set on a domain with edges must not.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constitutive::{cauchy_stress, couple_stress, MaterialParams};
use crate::error::Error;
use crate::geometry::{tangent_basis, DomainGeometry};
use crate::poly::{PolyScalar, PolyVector, MAX_FIELD_DEGREE};
use crate::tensor::{Mat3, Vec3};
use crate::traction::{TractionField, TractionFlavor};
use crate::virtual_work::{total_energy, PAIRING_WEIGHT};

/// Relative singular-value threshold below which a reduced-system
/// direction counts as kernel.
const KERNEL_EPS: f64 = 1e-13;
/// Refuse reduced systems whose spectral condition estimate exceeds this.
const CONDITION_LIMIT: f64 = 1e12;
/// Relative singular-value threshold for the constraint-rank decision.
const CONSTRAINT_RANK_EPS: f64 = 1e-10;

/// Vector basis of shifted-Legendre products on the domain's bounding box:
/// `L_a L_b L_c e_i` for all `a+b+c <= degree`, in a fixed deterministic
/// order. The shift keeps the one-axis factors orthogonal on boxes and
/// well-conditioned on embedded curved domains.
pub struct BasisSpec {
    degree: usize,
    modes: Vec<PolyVector>,
}

impl BasisSpec {
    pub fn new(degree: usize, domain: &DomainGeometry) -> Result<Self, Error> {
        if degree > MAX_FIELD_DEGREE {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_FIELD_DEGREE,
            });
        }
        let (lo, hi) = domain.bounding_box();
        let axis: Vec<Vec<PolyScalar>> = (0..3)
            .map(|ax| shifted_legendre(ax, lo[ax], hi[ax], degree))
            .collect();
        let mut modes = Vec::new();
        for total in 0..=degree {
            for a in 0..=total {
                for b in 0..=(total - a) {
                    let c = total - a - b;
                    let scalar = axis[0][a].mul(&axis[1][b]).mul(&axis[2][c]);
                    for comp in 0..3 {
                        let mut parts =
                            [PolyScalar::zero(), PolyScalar::zero(), PolyScalar::zero()];
                        parts[comp] = scalar.clone();
                        modes.push(PolyVector(parts));
                    }
                }
            }
        }
        Ok(BasisSpec { degree, modes })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, k: usize) -> &PolyVector {
        &self.modes[k]
    }

    pub fn combine(&self, coeffs: &[f64]) -> PolyVector {
        assert_eq!(coeffs.len(), self.modes.len());
        let mut acc = PolyVector::zero();
        for (c, mode) in coeffs.iter().zip(&self.modes) {
            if *c != 0.0 {
                acc = &acc + &mode.scale(*c);
            }
        }
        acc
    }
}

/// Legendre polynomials on `[lo, hi]` in the given axis variable, degrees
/// `0..=n`, by the three-term recurrence.
fn shifted_legendre(ax: usize, lo: f64, hi: f64, n: usize) -> Vec<PolyScalar> {
    let width = hi - lo;
    let mut exp = [0usize; 3];
    exp[ax] = 1;
    let t = &PolyScalar::monomial(exp, 2.0 / width) + &PolyScalar::constant(-(lo + hi) / width);
    let mut out = vec![PolyScalar::constant(1.0)];
    if n >= 1 {
        out.push(t.clone());
    }
    for k in 1..n {
        let a = t.mul(&out[k]).scale((2 * k + 1) as f64);
        let b = out[k - 1].scale(k as f64);
        out.push((&a - &b).scale(1.0 / (k + 1) as f64));
    }
    out
}

/// Stiffness of the internal-work bilinear form on the basis. Requires the
/// domain's quadrature to integrate degree `2*degree` exactly, so that the
/// matrix is symmetric positive semidefinite with exactly the rigid kernel.
pub fn assemble(
    params: &MaterialParams,
    basis: &BasisSpec,
    domain: &DomainGeometry,
) -> Result<DMatrix<f64>, Error> {
    domain.check_exactness(2 * basis.degree() as u32)?;
    let nodes = domain.volume_nodes();
    let n = basis.len();

    // per-mode value tables at the volume nodes
    let mut sigma_vals: Vec<Vec<Mat3>> = Vec::with_capacity(n);
    let mut grad_vals: Vec<Vec<Mat3>> = Vec::with_capacity(n);
    let mut m_vals: Vec<Vec<Mat3>> = Vec::with_capacity(n);
    let mut cg_vals: Vec<Vec<Mat3>> = Vec::with_capacity(n);
    for k in 0..n {
        let mode = basis.mode(k);
        let sigma = cauchy_stress(params, mode);
        let m = couple_stress(params, mode);
        let grad = mode.grad();
        let cg = mode.curl().grad();
        sigma_vals.push(nodes.iter().map(|q| sigma.eval(q.x)).collect());
        grad_vals.push(nodes.iter().map(|q| grad.eval(q.x)).collect());
        m_vals.push(nodes.iter().map(|q| m.eval(q.x)).collect());
        cg_vals.push(nodes.iter().map(|q| cg.eval(q.x)).collect());
    }

    let mut k_mat = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut acc = 0.0;
            for (iq, q) in nodes.iter().enumerate() {
                acc += q.w
                    * (sigma_vals[a][iq].inner(grad_vals[b][iq])
                        + PAIRING_WEIGHT * m_vals[a][iq].inner(cg_vals[b][iq]));
            }
            k_mat[(a, b)] = acc;
            k_mat[(b, a)] = acc;
        }
    }
    Ok(k_mat)
}

/// Loads manufactured from an exact solution: the equilibrating body force
/// `f = -Div tau(exact)` against every mode, plus the chosen traction set's
/// boundary data on the Neumann part. The corrected set also carries its
/// per-side edge data; the Mindlin-Tiersten set has none, which is exactly
/// what the comparison probes.
pub fn manufactured_loads(
    params: &MaterialParams,
    exact: &PolyVector,
    basis: &BasisSpec,
    domain: &DomainGeometry,
    flavor: TractionFlavor,
) -> DVector<f64> {
    let tf = TractionField::new(params, exact);
    let body = tf.total_force_stress().div().scale(-1.0);
    let n = basis.len();
    let grads: Vec<_> = (0..n).map(|k| basis.mode(k).grad()).collect();
    let curls: Vec<_> = (0..n).map(|k| basis.mode(k).curl()).collect();

    let mut f = DVector::<f64>::zeros(n);
    for (k, item) in f.iter_mut().enumerate() {
        let density = body.dot(basis.mode(k));
        *item = domain.integrate_volume(|x| density.eval(x));
    }

    for patch in domain.neumann_patches() {
        for q in patch.nodes() {
            let nrm = patch.normal(q.x);
            let p = Mat3::identity() - nrm.outer(nrm);
            let (t, moment) = match flavor {
                TractionFlavor::MindlinTiersten => {
                    (tf.traction_mt(patch, q.x), tf.moment_mt(patch, q.x))
                }
                TractionFlavor::Corrected => {
                    (tf.traction_corrected(patch, q.x), tf.moment_corrected(patch, q.x))
                }
            };
            for k in 0..n {
                let pair = match flavor {
                    TractionFlavor::MindlinTiersten => p.matvec(curls[k].eval(q.x)),
                    TractionFlavor::Corrected => p.matvec(grads[k].eval(q.x).matvec(nrm)),
                };
                f[k] += q.w
                    * (t.dot(basis.mode(k).eval(q.x)) + PAIRING_WEIGHT * moment.dot(pair));
            }
        }
    }

    if flavor == TractionFlavor::Corrected {
        for edge in domain.edges() {
            let sides = edge.side_patches();
            for q in edge.nodes() {
                let jump = tf
                    .edge_jump(domain, edge, q.x)
                    .expect("edges reference registered patches");
                let mut dens = Vec3::ZERO;
                for k in 0..2 {
                    if !domain.is_dirichlet(&sides[k]) {
                        dens = dens + jump.tangential_per_side[k] + jump.twist_per_side[k];
                    }
                }
                for k in 0..n {
                    f[k] += q.w * PAIRING_WEIGHT * dens.dot(basis.mode(k).eval(q.x));
                }
            }
        }
    }

    f
}

/// Linear constraints `rows * c = rhs` on the coefficient vector.
pub struct ConstraintSet {
    pub rows: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl ConstraintSet {
    pub fn empty(n: usize) -> Self {
        ConstraintSet {
            rows: DMatrix::zeros(0, n),
            rhs: DVector::zeros(0),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    fn push(&mut self, row: &[f64], value: f64) {
        let n = self.rows.ncols();
        let r = self.rows.nrows();
        let mut rows = DMatrix::zeros(r + 1, n);
        rows.view_mut((0, 0), (r, n)).copy_from(&self.rows);
        for (j, v) in row.iter().enumerate() {
            rows[(r, j)] = *v;
        }
        let mut rhs = DVector::zeros(r + 1);
        rhs.view_mut((0, 0), (r, 1)).copy_from(&self.rhs);
        rhs[r] = value;
        self.rows = rows;
        self.rhs = rhs;
    }
}

/// The five boundary values each geometric data set constrains at one
/// point with unit normal `n`: the three displacement components and the
/// two tangential components of the flavor's kinematic partner (tangential
/// curl for Mindlin-Tiersten, tangential normal derivative for the
/// corrected set). The normal-normal gradient component appears in
/// neither, so the rows have rank five, never six.
pub fn point_values(v: &PolyVector, n: Vec3, x: Vec3, flavor: TractionFlavor) -> [f64; 5] {
    let val = v.eval(x);
    let g = v.grad().eval(x);
    let p = Mat3::identity() - n.outer(n);
    let (t1, t2) = tangent_basis(n);
    let partner = match flavor {
        TractionFlavor::MindlinTiersten => {
            let curl = Vec3::new(g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]);
            p.matvec(curl)
        }
        TractionFlavor::Corrected => p.matvec(g.matvec(n)),
    };
    [val[0], val[1], val[2], t1.dot(partner), t2.dot(partner)]
}

/// Collocation rows for the five point constraints over the whole basis.
pub fn point_constraint_rows(
    basis: &BasisSpec,
    n: Vec3,
    x: Vec3,
    flavor: TractionFlavor,
) -> DMatrix<f64> {
    let cols = basis.len();
    let mut rows = DMatrix::zeros(5, cols);
    for k in 0..cols {
        let vals = point_values(basis.mode(k), n, x, flavor);
        for (i, v) in vals.iter().enumerate() {
            rows[(i, k)] = *v;
        }
    }
    rows
}

/// Quadrature-weighted collocation of the geometric boundary data taken
/// from `exact` on every Dirichlet patch: five rows per surface node. For
/// the corrected flavor, edges adjacent to a Dirichlet patch also collocate
/// the three displacement components, pinning the prescribed closure of the
/// Dirichlet region so that its per-side edge data drops out of the weak
/// form.
pub fn dirichlet_constraints(
    basis: &BasisSpec,
    domain: &DomainGeometry,
    exact: &PolyVector,
    flavor: TractionFlavor,
) -> ConstraintSet {
    let n = basis.len();
    let mut cs = ConstraintSet::empty(n);
    let mut row = vec![0.0; n];
    for patch in domain.dirichlet_patches() {
        for q in patch.nodes() {
            let s = q.w.sqrt();
            let nrm = patch.normal(q.x);
            let data = point_values(exact, nrm, q.x, flavor);
            for i in 0..5 {
                for (k, slot) in row.iter_mut().enumerate() {
                    *slot = s * point_values(basis.mode(k), nrm, q.x, flavor)[i];
                }
                cs.push(&row, s * data[i]);
            }
        }
    }
    if flavor == TractionFlavor::Corrected {
        for edge in domain.edges() {
            let sides = edge.side_patches();
            if !sides.iter().any(|p| domain.is_dirichlet(p)) {
                continue;
            }
            for q in edge.nodes() {
                let s = q.w.sqrt();
                let val = exact.eval(q.x);
                for i in 0..3 {
                    for (k, slot) in row.iter_mut().enumerate() {
                        *slot = s * basis.mode(k).eval(q.x)[i];
                    }
                    cs.push(&row, s * val[i]);
                }
            }
        }
    }
    cs
}

/// Six functionals that pin the rigid modes of a pure-traction problem:
/// mean displacement and mean curl over the volume, matched to `exact`.
pub fn gauge_constraints(
    basis: &BasisSpec,
    domain: &DomainGeometry,
    exact: &PolyVector,
) -> ConstraintSet {
    let n = basis.len();
    let mut cs = ConstraintSet::empty(n);
    let mut row = vec![0.0; n];
    let mean =
        |v: &PolyVector, i: usize| domain.integrate_volume(|x| v.eval(x)[i]);
    let mean_curl =
        |v: &PolyVector, i: usize| {
            let c = v.curl();
            domain.integrate_volume(|x| c.eval(x)[i])
        };
    for i in 0..3 {
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = mean(basis.mode(k), i);
        }
        cs.push(&row, mean(exact, i));
    }
    for i in 0..3 {
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = mean_curl(basis.mode(k), i);
        }
        cs.push(&row, mean_curl(exact, i));
    }
    cs
}

/// Diagnostics of one constrained solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemStats {
    pub basis_dim: usize,
    pub constraint_rows: usize,
    pub constraint_rank: usize,
    pub reduced_dim: usize,
    /// Spectral condition estimate of the reduced stiffness.
    pub condition: f64,
    /// `|C c - d|` of the returned coefficients.
    pub constraint_defect: f64,
    /// Residual of the reduced equations at the returned coefficients.
    pub residual: f64,
}

/// Null-space solve of `K c = f` subject to `C c = d`: a singular value
/// decomposition of `C` yields the minimum-norm particular solution and a
/// complete orthonormal basis of its null space, and a second decomposition
/// inverts the reduced stiffness on that space. Refuses a singular reduced
/// operator (reporting the kernel dimension) and an unusable condition
/// estimate.
pub fn solve_system(
    k: &DMatrix<f64>,
    constraints: Option<&ConstraintSet>,
    f: &DVector<f64>,
) -> Result<(Vec<f64>, SystemStats), Error> {
    let n = k.nrows();
    assert_eq!(k.ncols(), n);
    assert_eq!(f.nrows(), n);

    let (z, c_p, constraint_rows, rank) = match constraints {
        Some(cs) if !cs.is_empty() => {
            assert_eq!(cs.rows.ncols(), n);
            // pad to at least n rows so the right factor is complete and
            // carries the null space
            let m = cs.rows.nrows().max(n);
            let mut padded = DMatrix::<f64>::zeros(m, n);
            padded
                .view_mut((0, 0), (cs.rows.nrows(), n))
                .copy_from(&cs.rows);
            let mut d = DVector::<f64>::zeros(m);
            d.view_mut((0, 0), (cs.rows.nrows(), 1)).copy_from(&cs.rhs);
            let svd = padded.svd(true, true);
            let u = svd.u.as_ref().expect("svd with u");
            let v_t = svd.v_t.as_ref().expect("svd with v");
            let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
            let cut = CONSTRAINT_RANK_EPS * smax.max(f64::MIN_POSITIVE);
            let mut null_cols = Vec::new();
            let mut c_p = DVector::<f64>::zeros(n);
            let mut rank = 0;
            for i in 0..v_t.nrows() {
                let s = svd.singular_values[i];
                let v = v_t.row(i).transpose();
                if s > cut {
                    rank += 1;
                    let coef = u.column(i).dot(&d) / s;
                    c_p += &v * coef;
                } else {
                    null_cols.push(v);
                }
            }
            let z = if null_cols.is_empty() {
                DMatrix::<f64>::zeros(n, 0)
            } else {
                DMatrix::from_columns(&null_cols)
            };
            (z, c_p, cs.rows.nrows(), rank)
        }
        _ => (DMatrix::identity(n, n), DVector::zeros(n), 0, 0),
    };

    let reduced_dim = z.ncols();
    let (coeffs, condition, residual) = if reduced_dim == 0 {
        // fully determined by the constraints
        (c_p.clone(), 1.0, 0.0)
    } else {
        let a_raw = z.transpose() * k * &z;
        let a = (&a_raw + &a_raw.transpose()).scale(0.5);
        let b = z.transpose() * (f - k * &c_p);
        let svd = a.svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let v_t = svd.v_t.as_ref().expect("svd with v");
        let smax = svd.singular_values.iter().fold(0.0f64, |acc, &x| acc.max(x));
        let kernel_dim = svd
            .singular_values
            .iter()
            .filter(|&&s| s <= KERNEL_EPS * smax.max(f64::MIN_POSITIVE))
            .count();
        if kernel_dim > 0 {
            return Err(Error::Singular { kernel_dim });
        }
        let smin = svd
            .singular_values
            .iter()
            .fold(f64::INFINITY, |acc, &x| acc.min(x));
        let condition = smax / smin;
        if condition > CONDITION_LIMIT {
            return Err(Error::IllConditioned {
                estimate: condition,
                limit: CONDITION_LIMIT,
            });
        }
        let mut y = DVector::<f64>::zeros(reduced_dim);
        for i in 0..svd.singular_values.len() {
            let s = svd.singular_values[i];
            let coef = u.column(i).dot(&b) / s;
            y += v_t.row(i).transpose() * coef;
        }
        let coeffs = &c_p + &z * &y;
        let res = (z.transpose() * (k * &coeffs - f)).norm() / f.norm().max(1.0);
        (coeffs, condition, res)
    };

    let constraint_defect = match constraints {
        Some(cs) if !cs.is_empty() => (&cs.rows * &coeffs - &cs.rhs).norm(),
        _ => 0.0,
    };

    let stats = SystemStats {
        basis_dim: n,
        constraint_rows,
        constraint_rank: rank,
        reduced_dim,
        condition,
        constraint_defect,
        residual,
    };
    Ok((coeffs.iter().copied().collect(), stats))
}

/// A finished manufactured solve, with accuracy measured against the exact
/// generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub flavor: TractionFlavor,
    pub degree: usize,
    pub stats: SystemStats,
    /// Relative volume-integral error of the recovered field.
    pub l2_error: f64,
    /// Worst componentwise error over the volume and surface nodes.
    pub linf_error: f64,
    pub energy: f64,
}

pub struct RitzSolution {
    pub coeffs: Vec<f64>,
    pub field: PolyVector,
    pub report: SolveReport,
}

/// Manufactured equilibrium solve: build the basis, the stiffness, the
/// flavor's boundary data from `exact`, collocate the Dirichlet patches
/// (gauging the rigid modes when there are none), and solve.
pub fn solve_equilibrium(
    params: &MaterialParams,
    exact: &PolyVector,
    domain: &DomainGeometry,
    degree: usize,
    flavor: TractionFlavor,
) -> Result<RitzSolution, Error> {
    let basis = BasisSpec::new(degree, domain)?;
    let k = assemble(params, &basis, domain)?;
    let f = manufactured_loads(params, exact, &basis, domain, flavor);
    let mut cs = dirichlet_constraints(&basis, domain, exact, flavor);
    if cs.is_empty() {
        cs = gauge_constraints(&basis, domain, exact);
    }
    let (coeffs, stats) = solve_system(&k, Some(&cs), &f)?;
    let field = basis.combine(&coeffs);

    let diff = &field - exact;
    let num = l2_norm(&diff, domain);
    let den = l2_norm(exact, domain).max(1.0);
    let l2_error = num / den;
    let mut linf_error = 0.0f64;
    for q in domain.volume_nodes() {
        linf_error = linf_error.max(diff.eval(q.x).norm_inf());
    }
    for patch in domain.patches() {
        for q in patch.nodes() {
            linf_error = linf_error.max(diff.eval(q.x).norm_inf());
        }
    }
    let energy = total_energy(params, &field, domain);

    Ok(RitzSolution {
        coeffs,
        field,
        report: SolveReport {
            flavor,
            degree,
            stats,
            l2_error,
            linf_error,
            energy,
        },
    })
}

fn l2_norm(v: &PolyVector, domain: &DomainGeometry) -> f64 {
    let density = v.dot(v);
    domain.integrate_volume(|x| density.eval(x)).max(0.0).sqrt()
}

/// Solves the corrected-flavor problem manufactured from the homogeneous
/// deformation `u = A x` and returns the solve; a consistent discretization
/// must reproduce it to solver precision for every symmetric `A`.
pub fn patch_test(
    params: &MaterialParams,
    a: Mat3,
    domain: &DomainGeometry,
    degree: usize,
) -> Result<RitzSolution, Error> {
    let exact = PolyVector::linear(a);
    solve_equilibrium(params, &exact, domain, degree, TractionFlavor::Corrected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_ball, make_box};
    use crate::poly::parse_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_box(order: u32) -> DomainGeometry {
        make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), order, &[]).unwrap()
    }

    fn params() -> MaterialParams {
        MaterialParams::new(1.0, 0.5, 1.0, 2.0 / 3.0).unwrap()
    }

    #[test]
    fn basis_counts_and_degrees() {
        let b = unit_box(8);
        for (deg, count) in [(0usize, 3), (1, 12), (2, 30), (3, 60)] {
            let basis = BasisSpec::new(deg, &b).unwrap();
            assert_eq!(basis.len(), count);
            for k in 0..basis.len() {
                assert!(basis.mode(k).degree() <= deg);
            }
        }
        assert!(matches!(
            BasisSpec::new(MAX_FIELD_DEGREE + 1, &b),
            Err(Error::DegreeCap { .. })
        ));
    }

    #[test]
    fn legendre_modes_are_orthogonal_on_their_box() {
        let b = unit_box(10);
        let basis = BasisSpec::new(3, &b).unwrap();
        for a in 0..basis.len() {
            for c in (a + 1)..basis.len() {
                let density = basis.mode(a).dot(basis.mode(c));
                let overlap = b.integrate_volume(|x| density.eval(x));
                assert!(overlap.abs() < 1e-14, "modes {} {} overlap {}", a, c, overlap);
            }
        }
    }

    #[test]
    fn combine_reconstructs_polynomials() {
        let b = unit_box(8);
        let basis = BasisSpec::new(2, &b).unwrap();
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[4] = 2.0;
        coeffs[17] = -0.5;
        let field = basis.combine(&coeffs);
        let expect = &basis.mode(4).scale(2.0) + &basis.mode(17).scale(-0.5);
        let diff = &field - &expect;
        assert!(diff.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn stiffness_is_symmetric_psd_with_rigid_kernel() {
        let b = unit_box(8);
        let basis = BasisSpec::new(2, &b).unwrap();
        let k = assemble(&params(), &basis, &b).unwrap();
        assert_eq!(k.nrows(), 30);
        let asym = (&k - &k.transpose()).norm();
        assert!(asym < 1e-12 * k.norm());
        let eig = nalgebra::SymmetricEigen::new(k);
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x));
        let near_zero = eig
            .eigenvalues
            .iter()
            .filter(|&&l| l.abs() < 1e-13 * lmax)
            .count();
        assert_eq!(near_zero, 6, "rigid kernel dimension");
        assert!(eig.eigenvalues.iter().all(|&l| l > -1e-13 * lmax));
    }

    #[test]
    fn assemble_refuses_coarse_quadrature() {
        let b = unit_box(4);
        let basis = BasisSpec::new(3, &b).unwrap();
        assert!(matches!(
            assemble(&params(), &basis, &b),
            Err(Error::QuadratureOrder { .. })
        ));
    }

    #[test]
    fn point_rows_have_rank_exactly_five() {
        let b = unit_box(8);
        let basis = BasisSpec::new(2, &b).unwrap();
        let top = b.patch("z1").unwrap();
        for flavor in [TractionFlavor::MindlinTiersten, TractionFlavor::Corrected] {
            for q in top.nodes().iter().step_by(9) {
                let rows = point_constraint_rows(&basis, top.normal(q.x), q.x, flavor);
                let svd = nalgebra::SVD::new(rows, false, false);
                let smax = svd.singular_values[0];
                let smin = svd.singular_values[4];
                assert!(smin > 1e-8 * smax, "rank deficient at {:?}", q.x);
            }
        }
    }

    #[test]
    fn guard_rejects_singular_and_extreme_systems() {
        let k = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-16, 2.0]));
        let f = DVector::zeros(3);
        match solve_system(&k, None, &f) {
            Err(Error::Singular { kernel_dim }) => assert_eq!(kernel_dim, 1),
            other => panic!("expected singular, got {:?}", other.map(|_| ())),
        }
        let k = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3e-13, 2.0]));
        match solve_system(&k, None, &f) {
            Err(Error::IllConditioned { estimate, limit }) => {
                assert!(estimate > limit);
            }
            other => panic!("expected ill-conditioned, got {:?}", other.map(|_| ())),
        }
        let k = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5, 2.0]));
        let (c, stats) = solve_system(&k, None, &f).unwrap();
        assert!(c.iter().all(|&x| x == 0.0));
        assert_eq!(stats.reduced_dim, 3);
        assert!((stats.condition - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pure_neumann_without_gauge_reports_the_rigid_kernel() {
        let b = unit_box(8);
        let basis = BasisSpec::new(2, &b).unwrap();
        let k = assemble(&params(), &basis, &b).unwrap();
        let exact = parse_vector("y*z; x*z; x*y").unwrap();
        let f = manufactured_loads(&params(), &exact, &basis, &b, TractionFlavor::Corrected);
        match solve_system(&k, None, &f) {
            Err(Error::Singular { kernel_dim }) => assert_eq!(kernel_dim, 6),
            other => panic!("expected rigid kernel, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn corrected_roundtrip_pure_neumann_box() {
        let b = unit_box(8);
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let exact = PolyVector::random(3, &mut rng).unwrap();
        let sol =
            solve_equilibrium(&p, &exact, &b, 3, TractionFlavor::Corrected).unwrap();
        assert!(sol.report.l2_error < 1e-9, "l2 {}", sol.report.l2_error);
        assert!(sol.report.linf_error < 1e-8, "linf {}", sol.report.linf_error);
        assert_eq!(sol.report.stats.constraint_rank, 6);
        assert!(sol.report.stats.condition < 1e8);
    }

    #[test]
    fn corrected_roundtrip_mixed_bc_box() {
        let b = make_box(
            Vec3::ZERO,
            Vec3::new(1.0, 1.0, 1.0),
            8,
            &["z0", "x1"],
        )
        .unwrap();
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let exact = PolyVector::random(3, &mut rng).unwrap();
        let sol =
            solve_equilibrium(&p, &exact, &b, 3, TractionFlavor::Corrected).unwrap();
        assert!(sol.report.l2_error < 1e-9, "l2 {}", sol.report.l2_error);
        assert!(sol.report.stats.constraint_defect < 1e-10);
    }

    #[test]
    fn mt_feed_deviates_on_the_box_but_not_on_the_sphere() {
        // the twist-heavy generator: constant couple stress, nonzero edge
        // data that the Mindlin-Tiersten set cannot express
        let b = unit_box(8);
        let p = MaterialParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let exact = parse_vector("y*z; -x*z; 0").unwrap();
        let corr =
            solve_equilibrium(&p, &exact, &b, 2, TractionFlavor::Corrected).unwrap();
        let mt =
            solve_equilibrium(&p, &exact, &b, 2, TractionFlavor::MindlinTiersten).unwrap();
        assert!(corr.report.l2_error < 1e-10, "corr {}", corr.report.l2_error);
        assert!(mt.report.l2_error > 1e-4, "mt {}", mt.report.l2_error);

        let d = make_ball(1.0, 12, None).unwrap();
        let corr_s =
            solve_equilibrium(&p, &exact, &d, 2, TractionFlavor::Corrected).unwrap();
        let mt_s =
            solve_equilibrium(&p, &exact, &d, 2, TractionFlavor::MindlinTiersten).unwrap();
        assert!(corr_s.report.l2_error < 1e-9, "corr sphere {}", corr_s.report.l2_error);
        assert!(mt_s.report.l2_error < 1e-9, "mt sphere {}", mt_s.report.l2_error);
    }

    #[test]
    fn mixed_bc_on_the_smooth_cap_recovers_both_flavors() {
        let d = make_ball(1.0, 12, Some(std::f64::consts::FRAC_PI_3)).unwrap();
        let p = params();
        let exact = parse_vector("y*z; x*z; x*y").unwrap();
        for flavor in [TractionFlavor::Corrected, TractionFlavor::MindlinTiersten] {
            let sol = solve_equilibrium(&p, &exact, &d, 2, flavor).unwrap();
            assert!(
                sol.report.l2_error < 1e-8,
                "{:?} cap {}",
                flavor,
                sol.report.l2_error
            );
        }
    }

    #[test]
    fn patch_test_reproduces_homogeneous_deformations() {
        let b = make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 8, &["z0"]).unwrap();
        let p = params();
        let cases = [
            Mat3::identity(),
            Mat3::from_fn(|i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 }),
            Mat3::from_fn(|i, j| if i + j == 1 { 0.5 } else { 0.0 }),
        ];
        for a in cases {
            let sol = patch_test(&p, a, &b, 2).unwrap();
            assert!(
                sol.report.linf_error < 1e-10,
                "patch test error {}",
                sol.report.linf_error
            );
        }
    }

    #[test]
    fn full_dirichlet_solve_is_constraint_determined_or_reduced() {
        let all = ["x0", "x1", "y0", "y1", "z0", "z1"];
        let b = make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 8, &all).unwrap();
        let p = params();
        let exact = parse_vector("x*y; y*z; 0").unwrap();
        let sol =
            solve_equilibrium(&p, &exact, &b, 2, TractionFlavor::Corrected).unwrap();
        assert!(sol.report.l2_error < 1e-9, "l2 {}", sol.report.l2_error);
        assert!(sol.report.stats.constraint_defect < 1e-10);
    }

    #[test]
    fn solve_report_serializes() {
        let b = unit_box(8);
        let p = params();
        let exact = parse_vector("x; y; z").unwrap();
        let sol = solve_equilibrium(&p, &exact, &b, 1, TractionFlavor::Corrected).unwrap();
        let s = serde_json::to_string(&sol.report).unwrap();
        assert!(s.contains("l2_error"));
        let back: SolveReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.degree, 1);
    }
}
