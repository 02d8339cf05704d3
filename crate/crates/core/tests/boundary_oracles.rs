//! Boundary evaluators checked against oracles that never touch the jet
//! machinery: stress chains composed from the public polynomial operators
//! and surface derivatives taken by walking along the boundary itself.

mod support;

use couplestress::{make_ball, make_box, PolyVector, TractionField, Vec3};
use support::{
    edge_side_oracle, missing_oracle, mt_traction_oracle, random_params, rng, stress_chain,
    Carrier,
};

fn rel(a: Vec3, b: Vec3) -> f64 {
    (a - b).norm_inf() / (1.0 + a.norm_inf().max(b.norm_inf()))
}

#[test]
fn mt_traction_matches_surface_walk_oracle_on_box_faces() {
    let b = make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 8, &[]).unwrap();
    let mut rng = rng(101);
    for _ in 0..6 {
        let p = random_params(&mut rng);
        let u = PolyVector::random(4, &mut rng).unwrap();
        let tf = TractionField::new(&p, &u);
        let ch = stress_chain(&p, &u);
        for patch in b.patches() {
            let carrier = Carrier::Flat(patch.normal(patch.nodes()[0].x));
            for q in patch.nodes().iter().step_by(5) {
                let lib = tf.traction_mt(patch, q.x);
                let ora = mt_traction_oracle(&ch, carrier, q.x);
                assert!(rel(lib, ora) < 1e-7, "{} at {:?}: {}", patch.name(), q.x, rel(lib, ora));
            }
        }
    }
}

#[test]
fn mt_traction_matches_surface_walk_oracle_on_the_sphere() {
    let d = make_ball(1.3, 16, None).unwrap();
    let sphere = d.patch("sphere").unwrap();
    let carrier = Carrier::Sphere(1.3);
    let mut rng = rng(102);
    for _ in 0..6 {
        let p = random_params(&mut rng);
        let u = PolyVector::random(3, &mut rng).unwrap();
        let tf = TractionField::new(&p, &u);
        let ch = stress_chain(&p, &u);
        for q in sphere.nodes().iter().step_by(17) {
            let lib = tf.traction_mt(sphere, q.x);
            let ora = mt_traction_oracle(&ch, carrier, q.x);
            assert!(rel(lib, ora) < 1e-7, "at {:?}: {}", q.x, rel(lib, ora));
        }
    }
}

#[test]
fn missing_term_matches_intrinsic_walk_oracle() {
    let b = make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 8, &[]).unwrap();
    let d = make_ball(1.3, 16, None).unwrap();
    let sphere = d.patch("sphere").unwrap();
    let mut rng = rng(103);
    for _ in 0..6 {
        let p = random_params(&mut rng);
        let u = PolyVector::random(4, &mut rng).unwrap();
        let tf = TractionField::new(&p, &u);
        let ch = stress_chain(&p, &u);
        for patch in b.patches() {
            let carrier = Carrier::Flat(patch.normal(patch.nodes()[0].x));
            for q in patch.nodes().iter().step_by(7) {
                let lib = tf.missing_term(patch, q.x);
                let ora = missing_oracle(&ch, carrier, q.x);
                assert!(rel(lib, ora) < 1e-7, "{}: {}", patch.name(), rel(lib, ora));
            }
        }
        for q in sphere.nodes().iter().step_by(23) {
            let lib = tf.missing_term(sphere, q.x);
            let ora = missing_oracle(&ch, Carrier::Sphere(1.3), q.x);
            assert!(rel(lib, ora) < 1e-7, "sphere: {}", rel(lib, ora));
        }
    }
}

#[test]
fn corrected_traction_is_mt_oracle_plus_missing_oracle() {
    let b = make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 8, &[]).unwrap();
    let mut rng = rng(104);
    let p = random_params(&mut rng);
    let u = PolyVector::random(4, &mut rng).unwrap();
    let tf = TractionField::new(&p, &u);
    let ch = stress_chain(&p, &u);
    for patch in b.patches() {
        let carrier = Carrier::Flat(patch.normal(patch.nodes()[0].x));
        for q in patch.nodes().iter().step_by(9) {
            let lib = tf.traction_corrected(patch, q.x);
            let ora = mt_traction_oracle(&ch, carrier, q.x) + missing_oracle(&ch, carrier, q.x);
            assert!(rel(lib, ora) < 1e-7, "{}: {}", patch.name(), rel(lib, ora));
        }
    }
}

#[test]
fn moment_quantities_match_pointwise_assembly() {
    let b = make_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 8, &[]).unwrap();
    let d = make_ball(1.0, 12, None).unwrap();
    let mut rng = rng(105);
    let p = random_params(&mut rng);
    let u = PolyVector::random(4, &mut rng).unwrap();
    let tf = TractionField::new(&p, &u);
    let ch = stress_chain(&p, &u);
    for dom in [&b, &d] {
        for patch in dom.patches() {
            for q in patch.nodes().iter().step_by(11) {
                let n = patch.normal(q.x);
                let mn = ch.m.eval(q.x).matvec(n);
                let g = mn - n.scale(n.dot(mn));
                let h = g.cross(n);
                assert!((tf.moment_mt(patch, q.x) - g).norm_inf() < 1e-12);
                assert!((tf.moment_corrected(patch, q.x) - h).norm_inf() < 1e-12);
            }
        }
    }
}

#[test]
fn box_edge_densities_match_per_side_oracle() {
    let b = make_box(Vec3::new(-0.5, 0.0, 0.0), Vec3::new(0.5, 1.0, 2.0), 8, &[]).unwrap();
    let mut rng = rng(106);
    for _ in 0..4 {
        let p = random_params(&mut rng);
        let u = PolyVector::random(4, &mut rng).unwrap();
        let tf = TractionField::new(&p, &u);
        let ch = stress_chain(&p, &u);
        for e in b.edges() {
            for q in e.nodes().iter().step_by(3) {
                let jump = tf.edge_jump(&b, e, q.x).unwrap();
                let frames = e.sides(q.x);
                let mut total = Vec3::ZERO;
                let mut tangential_sum = Vec3::ZERO;
                for (k, f) in frames.iter().enumerate() {
                    let ora = edge_side_oracle(&ch, f.n, f.nu, q.x);
                    assert!((jump.tangential_per_side[k] - ora.tangential).norm_inf() < 1e-12);
                    assert!((jump.twist_per_side[k] - ora.twist).norm_inf() < 1e-12);
                    total = total + ora.full;
                    tangential_sum = tangential_sum + ora.tangential;
                }
                assert!((jump.total - total).norm_inf() < 1e-12);
                assert!((jump.jump - tangential_sum).norm_inf() < 1e-12);
            }
        }
    }
}

#[test]
fn smooth_rim_densities_cancel_for_smooth_fields() {
    let theta = std::f64::consts::FRAC_PI_3;
    let d = make_ball(1.0, 16, Some(theta)).unwrap();
    let rim = d.edges().first().expect("cap rim");
    let mut rng = rng(107);
    for _ in 0..4 {
        let p = random_params(&mut rng);
        let u = PolyVector::random(4, &mut rng).unwrap();
        let tf = TractionField::new(&p, &u);
        for q in rim.nodes().iter().step_by(5) {
            let jump = tf.edge_jump(&d, rim, q.x).unwrap();
            assert!(jump.jump.norm_inf() < 1e-12);
            assert!(jump.total.norm_inf() < 1e-12);
        }
    }
}
