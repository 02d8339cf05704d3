//! Domains (box, ball), boundary patches, edge curves, and quadrature.
//!
//! Boxes use tensor Gauss-Legendre rules, exact for the declared order.
//! Spheres use a Gauss-in-cos(theta) by uniform-in-phi product rule, which
//! integrates ambient polynomials restricted to the sphere exactly once the
//! azimuthal node count exceeds the trigonometric degree. Each patch carries
//! an extended unit normal field (constant on flat faces, radial on sphere
//! zones) so surface operators can differentiate normal-dependent scalars.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::jet::{JetMat3, JetVec3};
use crate::poly::PolyScalar;
use crate::tensor::{tangential_projector, Mat3, Vec3};

/// Relative tolerance for the closed-surface sanity identities checked at
/// construction time.
const CLOSURE_CHECK_TOL: f64 = 1e-10;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Exact for polynomials of degree 2n - 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n and P_n' via the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn_prev = if n == 1 { 1.0 } else { p0 };
            let dpn = n as f64 * (x * pn - pn_prev) / (x * x - 1.0);
            let dx = pn / dpn;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // recompute derivative at the converged node for the weight
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let pn = if n == 1 { x } else { p1 };
        let pn_prev = if n == 1 { 1.0 } else { p0 };
        let dpn = n as f64 * (x * pn - pn_prev) / (x * x - 1.0);
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
    }
    (xs, ws)
}

/// Gauss rule mapped to [a, b].
fn gauss_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| w * half).collect(),
    )
}

#[derive(Clone, Copy, Debug)]
pub struct QuadNode {
    pub x: Vec3,
    pub w: f64,
}

/// How the unit normal is continued off the surface when surface operators
/// need ambient derivatives of normal-dependent quantities. `Canonical` is
/// constant on flat faces and radial (`n = x/r`) on sphere zones. The
/// alternatives exist to demonstrate that constrained surface quantities do
/// not depend on the choice: `Tilted(w)` endows a flat face with the
/// gradient `w (x) n` (`w` is projected tangential), `Affine` continues the
/// sphere normal as `x/R`. A variant that does not apply to the patch kind
/// falls back to `Canonical`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormalExtension {
    Canonical,
    Tilted(Vec3),
    Affine,
}

#[derive(Clone, Debug)]
enum PatchKind {
    /// Face of an axis-aligned box: `axis` held at `coord`, outward normal
    /// `sign * e_axis`.
    BoxFace { axis: usize, sign: f64, coord: f64 },
    /// Zone of the sphere `r = radius` with polar angle in
    /// `[theta_lo, theta_hi]`.
    SphereZone {
        radius: f64,
        theta_lo: f64,
        theta_hi: f64,
    },
}

#[derive(Clone, Debug)]
pub struct SurfacePatch {
    name: String,
    kind: PatchKind,
    nodes: Vec<QuadNode>,
    area: f64,
}

impl SurfacePatch {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, PatchKind::BoxFace { .. })
    }

    pub fn normal(&self, x: Vec3) -> Vec3 {
        match &self.kind {
            PatchKind::BoxFace { axis, sign, .. } => {
                let mut n = Vec3::ZERO;
                n[*axis] = *sign;
                n
            }
            PatchKind::SphereZone { .. } => x.scale(1.0 / x.norm()),
        }
    }

    /// Normal lifted to a jet under the requested extension.
    pub fn normal_jet(&self, x: Vec3, ext: NormalExtension) -> JetVec3 {
        match &self.kind {
            PatchKind::BoxFace { .. } => {
                let n = self.normal(x);
                match ext {
                    NormalExtension::Tilted(w) => {
                        let p = Mat3::identity() - n.outer(n);
                        let wt = p.matvec(w);
                        JetVec3::from_value_grad(n, wt.outer(n))
                    }
                    _ => JetVec3::constant(n),
                }
            }
            PatchKind::SphereZone { .. } => {
                let r = x.norm();
                let n = x.scale(1.0 / r);
                match ext {
                    NormalExtension::Affine => {
                        JetVec3::from_value_grad(n, Mat3::identity().scale(1.0 / r))
                    }
                    _ => {
                        let p = Mat3::identity() - n.outer(n);
                        JetVec3::from_value_grad(n, p.scale(1.0 / r))
                    }
                }
            }
        }
    }

    /// Tangential projector `P = I - n (x) n` lifted to a jet.
    pub fn projector_jet(&self, x: Vec3, ext: NormalExtension) -> JetMat3 {
        let n = self.normal_jet(x, ext);
        JetMat3::identity() - n.outer(&n)
    }

    pub fn integrate(&self, f: impl Fn(Vec3) -> f64) -> f64 {
        self.nodes.iter().map(|q| q.w * f(q.x)).sum()
    }

    /// Whether `x` lies on the carrier surface of this patch, within `tol`.
    pub fn contains(&self, x: Vec3, tol: f64) -> bool {
        match &self.kind {
            PatchKind::BoxFace { axis, coord, .. } => (x[*axis] - coord).abs() <= tol,
            PatchKind::SphereZone {
                radius,
                theta_lo,
                theta_hi,
            } => {
                let r = x.norm();
                let theta = (x[2] / r.max(1e-300)).clamp(-1.0, 1.0).acos();
                (r - radius).abs() <= tol
                    && theta >= theta_lo - tol
                    && theta <= theta_hi + tol
            }
        }
    }
}

/// Per-side data where two patches meet an edge: the side's outward unit
/// normal and its in-surface co-normal, unit, tangent to the side's patch
/// and pointing out of it across the edge.
#[derive(Clone, Copy, Debug)]
pub struct EdgeFrame {
    pub n: Vec3,
    pub nu: Vec3,
}

#[derive(Clone, Debug)]
enum EdgeKind {
    /// Straight box edge with constant frames on both sides.
    Straight { frames: [EdgeFrame; 2] },
    /// Rim circle of a spherical cap at polar angle `theta` (both sides lie
    /// on the same smooth sphere, so the normals agree and the co-normals
    /// are opposite).
    CapRim { radius: f64, theta: f64 },
}

#[derive(Clone, Debug)]
pub struct EdgeCurve {
    name: String,
    /// Patch names of the two sides, aligned with `sides()` output.
    side_patches: [String; 2],
    kind: EdgeKind,
    nodes: Vec<QuadNode>,
}

impl EdgeCurve {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn side_patches(&self) -> [&str; 2] {
        [&self.side_patches[0], &self.side_patches[1]]
    }

    pub fn touches(&self, patch: &str) -> bool {
        self.side_patches[0] == patch || self.side_patches[1] == patch
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    /// The two side frames at a point of the edge, in `side_patches` order.
    pub fn sides(&self, x: Vec3) -> [EdgeFrame; 2] {
        match &self.kind {
            EdgeKind::Straight { frames } => *frames,
            EdgeKind::CapRim { theta, .. } => {
                let n = x.scale(1.0 / x.norm());
                // theta-hat at the rim: tangent to the sphere, pointing
                // toward larger polar angle (out of the cap)
                let rho = (x[0] * x[0] + x[1] * x[1]).sqrt().max(1e-300);
                let (ct, st) = (theta.cos(), theta.sin());
                let theta_hat = Vec3::new(ct * x[0] / rho, ct * x[1] / rho, -st);
                [
                    EdgeFrame { n, nu: theta_hat },
                    EdgeFrame {
                        n,
                        nu: -theta_hat,
                    },
                ]
            }
        }
    }

    pub fn integrate(&self, f: impl Fn(Vec3) -> f64) -> f64 {
        self.nodes.iter().map(|q| q.w * f(q.x)).sum()
    }

    /// Whether `x` lies on the edge curve, within `tol`. Straight edges test
    /// distance to the line through the endpoint nodes; rim edges test the
    /// sphere radius and the rim's polar angle.
    pub fn contains(&self, x: Vec3, tol: f64) -> bool {
        match &self.kind {
            EdgeKind::Straight { .. } => {
                let (a, b) = match (self.nodes.first(), self.nodes.last()) {
                    (Some(a), Some(b)) => (a.x, b.x),
                    _ => return false,
                };
                let d = b - a;
                let len = d.norm();
                if len <= tol {
                    return (x - a).norm() <= tol;
                }
                let t = d.scale(1.0 / len);
                let r = x - a;
                (r - t.scale(r.dot(t))).norm() <= tol
            }
            EdgeKind::CapRim { radius, theta } => {
                let r = x.norm();
                let th = (x[2] / r.max(1e-300)).clamp(-1.0, 1.0).acos();
                (r - radius).abs() <= tol && (th - theta).abs() <= tol
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    Box { lo: Vec3, hi: Vec3 },
    Ball { radius: f64 },
}

#[derive(Clone, Debug)]
pub struct DomainGeometry {
    kind: DomainKind,
    order: u32,
    patches: Vec<SurfacePatch>,
    edges: Vec<EdgeCurve>,
    volume_nodes: Vec<QuadNode>,
    dirichlet: BTreeSet<String>,
}

pub const BOX_FACE_NAMES: [&str; 6] = ["x0", "x1", "y0", "y1", "z0", "z1"];

impl DomainGeometry {
    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn patches(&self) -> &[SurfacePatch] {
        &self.patches
    }

    pub fn edges(&self) -> &[EdgeCurve] {
        &self.edges
    }

    pub fn volume_nodes(&self) -> &[QuadNode] {
        &self.volume_nodes
    }

    pub fn patch(&self, name: &str) -> Option<&SurfacePatch> {
        self.patches.iter().find(|p| p.name == name)
    }

    pub fn is_dirichlet(&self, name: &str) -> bool {
        self.dirichlet.contains(name)
    }

    pub fn dirichlet_patches(&self) -> impl Iterator<Item = &SurfacePatch> {
        self.patches.iter().filter(|p| self.dirichlet.contains(&p.name))
    }

    pub fn neumann_patches(&self) -> impl Iterator<Item = &SurfacePatch> {
        self.patches
            .iter()
            .filter(|p| !self.dirichlet.contains(&p.name))
    }

    /// Edges bounding the Dirichlet region: exactly one side Dirichlet.
    pub fn dirichlet_rim_edges(&self) -> impl Iterator<Item = &EdgeCurve> {
        self.edges.iter().filter(|e| {
            let a = self.dirichlet.contains(&e.side_patches[0]);
            let b = self.dirichlet.contains(&e.side_patches[1]);
            a != b
        })
    }

    pub fn integrate_volume(&self, f: impl Fn(Vec3) -> f64) -> f64 {
        self.volume_nodes.iter().map(|q| q.w * f(q.x)).sum()
    }

    /// Integral over the whole boundary.
    pub fn integrate_surface(&self, f: impl Fn(Vec3) -> f64 + Copy) -> f64 {
        self.patches.iter().map(|p| p.integrate(f)).sum()
    }

    /// Integral over every edge curve (sum over edges, not over sides).
    pub fn integrate_edges(&self, f: impl Fn(Vec3) -> f64 + Copy) -> f64 {
        self.edges.iter().map(|e| e.integrate(f)).sum()
    }

    pub fn volume(&self) -> f64 {
        self.integrate_volume(|_| 1.0)
    }

    /// Fails when integrands of the given ambient polynomial degree exceed
    /// the rule's guarantee.
    pub fn check_exactness(&self, degree: u32) -> Result<(), Error> {
        if degree > self.order {
            return Err(Error::QuadratureOrder {
                need: degree,
                have: self.order,
            });
        }
        Ok(())
    }

    /// Same domain and partition at a higher quadrature order, for
    /// quadrature-error estimation by comparison.
    pub fn refined(&self, extra: u32) -> DomainGeometry {
        let order = self.order + extra;
        match &self.kind {
            DomainKind::Box { lo, hi } => {
                let names: Vec<&str> = self.dirichlet.iter().map(String::as_str).collect();
                make_box(*lo, *hi, order, &names).expect("refinement of a valid box")
            }
            DomainKind::Ball { radius } => {
                let cap = self.edges.iter().find_map(|e| match &e.kind {
                    EdgeKind::CapRim { theta, .. } => Some(*theta),
                    _ => None,
                });
                make_ball(*radius, order, cap).expect("refinement of a valid ball")
            }
        }
    }

    /// Axis-aligned bounding box, used to anchor polynomial bases.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        match &self.kind {
            DomainKind::Box { lo, hi } => (*lo, *hi),
            DomainKind::Ball { radius } => (
                Vec3::new(-radius, -radius, -radius),
                Vec3::new(*radius, *radius, *radius),
            ),
        }
    }
}

fn box_face(name: &str, lo: Vec3, hi: Vec3, order: u32) -> SurfacePatch {
    let axis = match name.as_bytes()[0] {
        b'x' => 0,
        b'y' => 1,
        _ => 2,
    };
    let sign = if name.as_bytes()[1] == b'1' { 1.0 } else { -1.0 };
    let coord = if sign > 0.0 { hi[axis] } else { lo[axis] };
    let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
    let n1d = (order as usize + 2) / 2; // ceil((order+1)/2)
    let (u, wu) = gauss_on(lo[a1], hi[a1], n1d);
    let (v, wv) = gauss_on(lo[a2], hi[a2], n1d);
    let mut nodes = Vec::with_capacity(u.len() * v.len());
    for (iu, &pu) in u.iter().enumerate() {
        for (iv, &pv) in v.iter().enumerate() {
            let mut x = Vec3::ZERO;
            x[axis] = coord;
            x[a1] = pu;
            x[a2] = pv;
            nodes.push(QuadNode {
                x,
                w: wu[iu] * wv[iv],
            });
        }
    }
    let area = (hi[a1] - lo[a1]) * (hi[a2] - lo[a2]);
    SurfacePatch {
        name: name.to_string(),
        kind: PatchKind::BoxFace { axis, sign, coord },
        nodes,
        area,
    }
}

/// Axis-aligned box `[lo, hi]` with the six faces named `x0, x1, ..., z1`;
/// `dirichlet` lists faces assigned to the displacement boundary. Quadrature
/// is exact for ambient polynomials of total degree <= `order`.
pub fn make_box(lo: Vec3, hi: Vec3, order: u32, dirichlet: &[&str]) -> Result<DomainGeometry, Error> {
    for a in 0..3 {
        if !(hi[a] > lo[a]) {
            return Err(Error::InvalidDomain(format!(
                "box extents must satisfy lo < hi per axis, got axis {}: {} .. {}",
                a, lo[a], hi[a]
            )));
        }
    }
    if order == 0 {
        return Err(Error::InvalidDomain("quadrature order must be >= 1".into()));
    }
    let mut dir = BTreeSet::new();
    for d in dirichlet {
        if !BOX_FACE_NAMES.contains(d) {
            return Err(Error::UnknownPatch((*d).to_string()));
        }
        dir.insert((*d).to_string());
    }

    let patches: Vec<SurfacePatch> = BOX_FACE_NAMES
        .iter()
        .map(|n| box_face(n, lo, hi, order))
        .collect();

    // volume rule: tensor Gauss
    let n1d = (order as usize + 2) / 2;
    let (gx, wx) = gauss_on(lo[0], hi[0], n1d);
    let (gy, wy) = gauss_on(lo[1], hi[1], n1d);
    let (gz, wz) = gauss_on(lo[2], hi[2], n1d);
    let mut volume_nodes = Vec::with_capacity(n1d * n1d * n1d);
    for (i, &px) in gx.iter().enumerate() {
        for (j, &py) in gy.iter().enumerate() {
            for (k, &pz) in gz.iter().enumerate() {
                volume_nodes.push(QuadNode {
                    x: Vec3::new(px, py, pz),
                    w: wx[i] * wy[j] * wz[k],
                });
            }
        }
    }

    // 12 edges: one per pair of faces on distinct axes sharing a line
    let mut edges = Vec::new();
    let ne = (order as usize + 2) / 2;
    for axis_a in 0..3usize {
        for axis_b in (axis_a + 1)..3usize {
            let free: usize = 3 - axis_a - axis_b;
            for sa in 0..2 {
                for sb in 0..2 {
                    let name_a = format!("{}{}", ["x", "y", "z"][axis_a], sa);
                    let name_b = format!("{}{}", ["x", "y", "z"][axis_b], sb);
                    let ca = if sa == 1 { hi[axis_a] } else { lo[axis_a] };
                    let cb = if sb == 1 { hi[axis_b] } else { lo[axis_b] };
                    let (ts, tw) = gauss_on(lo[free], hi[free], ne);
                    let nodes = ts
                        .iter()
                        .zip(&tw)
                        .map(|(&t, &w)| {
                            let mut x = Vec3::ZERO;
                            x[axis_a] = ca;
                            x[axis_b] = cb;
                            x[free] = t;
                            QuadNode { x, w }
                        })
                        .collect();
                    let mut n_a = Vec3::ZERO;
                    n_a[axis_a] = if sa == 1 { 1.0 } else { -1.0 };
                    let mut n_b = Vec3::ZERO;
                    n_b[axis_b] = if sb == 1 { 1.0 } else { -1.0 };
                    // on a box, each side's in-face outward co-normal is the
                    // other face's outward normal
                    let frames = [
                        EdgeFrame { n: n_a, nu: n_b },
                        EdgeFrame { n: n_b, nu: n_a },
                    ];
                    edges.push(EdgeCurve {
                        name: format!("{}-{}", name_a, name_b),
                        side_patches: [name_a, name_b],
                        kind: EdgeKind::Straight { frames },
                        nodes,
                    });
                }
            }
        }
    }

    let dom = DomainGeometry {
        kind: DomainKind::Box { lo, hi },
        order,
        patches,
        edges,
        volume_nodes,
        dirichlet: dir,
    };
    debug_assert_closed(&dom);
    Ok(dom)
}

fn sphere_zone(name: &str, radius: f64, theta_lo: f64, theta_hi: f64, order: u32) -> SurfacePatch {
    let n_ang = order as usize + 4;
    // Gauss in cos(theta) over the zone
    let (cts, ctw) = gauss_on(theta_hi.cos(), theta_lo.cos(), n_ang);
    let dphi = 2.0 * std::f64::consts::PI / n_ang as f64;
    let mut nodes = Vec::with_capacity(n_ang * n_ang);
    for (i, &ct) in cts.iter().enumerate() {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for k in 0..n_ang {
            let phi = (k as f64 + 0.5) * dphi;
            nodes.push(QuadNode {
                x: Vec3::new(radius * st * phi.cos(), radius * st * phi.sin(), radius * ct),
                w: radius * radius * ctw[i] * dphi,
            });
        }
    }
    let area = 2.0 * std::f64::consts::PI * radius * radius * (theta_lo.cos() - theta_hi.cos());
    SurfacePatch {
        name: name.to_string(),
        kind: PatchKind::SphereZone {
            radius,
            theta_lo,
            theta_hi,
        },
        nodes,
        area,
    }
}

/// Ball of given radius centered at the origin. With `cap = Some(theta)` the
/// boundary splits into a Dirichlet polar cap (polar angle < theta around
/// +z, patch "cap") and the Neumann remainder ("rest"), joined by the rim
/// circle; otherwise the whole sphere is the single Neumann patch "sphere".
pub fn make_ball(radius: f64, order: u32, cap: Option<f64>) -> Result<DomainGeometry, Error> {
    if !(radius > 0.0) {
        return Err(Error::InvalidDomain(format!(
            "ball radius must be positive, got {}",
            radius
        )));
    }
    if order == 0 {
        return Err(Error::InvalidDomain("quadrature order must be >= 1".into()));
    }
    if let Some(theta) = cap {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::InvalidDomain(format!(
                "cap angle must lie strictly between 0 and pi, got {}",
                theta
            )));
        }
    }

    let pi = std::f64::consts::PI;
    let (patches, edges, dirichlet) = match cap {
        None => (
            vec![sphere_zone("sphere", radius, 0.0, pi, order)],
            Vec::new(),
            BTreeSet::new(),
        ),
        Some(theta) => {
            let patches = vec![
                sphere_zone("cap", radius, 0.0, theta, order),
                sphere_zone("rest", radius, theta, pi, order),
            ];
            let n_phi = order as usize + 4;
            let dphi = 2.0 * pi / n_phi as f64;
            let rho = radius * theta.sin();
            let nodes = (0..n_phi)
                .map(|k| {
                    let phi = (k as f64 + 0.5) * dphi;
                    QuadNode {
                        x: Vec3::new(rho * phi.cos(), rho * phi.sin(), radius * theta.cos()),
                        w: rho * dphi,
                    }
                })
                .collect();
            let edges = vec![EdgeCurve {
                name: "cap_rim".to_string(),
                side_patches: ["cap".to_string(), "rest".to_string()],
                kind: EdgeKind::CapRim { radius, theta },
                nodes,
            }];
            let mut dir = BTreeSet::new();
            dir.insert("cap".to_string());
            (patches, edges, dir)
        }
    };

    // volume rule: radial Gauss (with r^2 factor) times full-sphere angular rule
    let n_r = (order as usize + 4) / 2; // ceil((order+3)/2)
    let (rs, rw) = gauss_on(0.0, radius, n_r);
    let n_ang = order as usize + 4;
    let (cts, ctw) = gauss_on(-1.0, 1.0, n_ang);
    let dphi = 2.0 * pi / n_ang as f64;
    let mut volume_nodes = Vec::with_capacity(n_r * n_ang * n_ang);
    for (ir, &r) in rs.iter().enumerate() {
        for (ic, &ct) in cts.iter().enumerate() {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..n_ang {
                let phi = (k as f64 + 0.5) * dphi;
                volume_nodes.push(QuadNode {
                    x: Vec3::new(r * st * phi.cos(), r * st * phi.sin(), r * ct),
                    w: r * r * rw[ir] * ctw[ic] * dphi,
                });
            }
        }
    }

    let dom = DomainGeometry {
        kind: DomainKind::Ball { radius },
        order,
        patches,
        edges,
        volume_nodes,
        dirichlet,
    };
    debug_assert_closed(&dom);
    Ok(dom)
}

/// Closed-surface sanity: positive area, unit normals, vanishing resultant
/// of n over the whole boundary.
fn debug_assert_closed(dom: &DomainGeometry) {
    if cfg!(debug_assertions) {
        let mut resultant = Vec3::ZERO;
        let mut area = 0.0;
        for p in &dom.patches {
            for q in &p.nodes {
                let n = p.normal(q.x);
                debug_assert!((n.norm() - 1.0).abs() < 1e-12);
                resultant = resultant + n.scale(q.w);
                area += q.w;
            }
        }
        debug_assert!(area > 0.0);
        debug_assert!(
            resultant.norm_inf() < CLOSURE_CHECK_TOL * area,
            "boundary normal resultant {:?} vs area {}",
            resultant,
            area
        );
    }
}

/// Tangential surface gradient `P grad(phi)` of an ambient scalar gradient
/// at a patch point.
pub fn surface_gradient_of(patch: &SurfacePatch, x: Vec3, ambient_grad: Vec3) -> Vec3 {
    let n = patch.normal(x);
    let p = tangential_projector(n).expect("patch normals are unit by construction");
    p.matvec(ambient_grad)
}

/// Tangential surface gradient of a polynomial scalar field.
pub fn surface_gradient(patch: &SurfacePatch, x: Vec3, phi: &PolyScalar) -> Vec3 {
    surface_gradient_of(patch, x, phi.grad().eval(x))
}

/// Surface divergence `<P, grad v>` of a jet-valued vector field; for
/// tangential fields this is the intrinsic divergence on the surface.
pub fn surface_divergence(n: Vec3, v: &JetVec3) -> f64 {
    let p = Mat3::identity() - n.outer(n);
    p.inner(v.grad())
}

/// Orthonormal tangent pair completing `n` to a frame; deterministic choice
/// seeded from the axis least aligned with `n`.
pub fn tangent_basis(n: Vec3) -> (Vec3, Vec3) {
    let mut axis = 0;
    for a in 1..3 {
        if n[a].abs() < n[axis].abs() {
            axis = a;
        }
    }
    let mut e = Vec3::ZERO;
    e[axis] = 1.0;
    let t1 = {
        let t = n.cross(e);
        t.scale(1.0 / t.norm())
    };
    let t2 = n.cross(t1);
    (t1, t2)
}
