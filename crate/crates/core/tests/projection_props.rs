mod common;

use common::*;
use projsat::cnf::formula_to_func;
use projsat::projection::{
    compose_projections, point_projection, projection_for, verify_projection, Projection,
};
use projsat::{BoolFunc, Manager, Point, VarId};
use rand::Rng;

fn clause_func(rng: &mut impl Rng, m: &Manager) -> BoolFunc {
    random_clause(rng, m.var_count(), 4).to_func(m)
}

/// A random point of h's OFF-set (h ≢ 1).
fn random_off_point(rng: &mut impl Rng, m: &Manager, h: BoolFunc) -> Point {
    let off = m.enumerate_on_set(m.not(h), 1 << 20).unwrap();
    off[rng.gen_range(0..off.len())].clone()
}

/// P ∈ 𝒫(g, h) straight from the definition.
fn is_projection_pointwise(m: &Manager, p: &Projection, g: BoolFunc, h: BoolFunc) -> bool {
    let n = m.var_count();
    (0..1u64 << n).all(|i| {
        let x = Point::from_index(n, i);
        let image = p.apply(m, &x).unwrap();
        if m.eval(g, &x).unwrap() {
            image == x
        } else {
            !m.eval(h, &image).unwrap()
        }
    })
}

#[test]
fn clause_projections_satisfy_both_invariants() {
    let mut rng = rng(30);
    for _ in 0..500 {
        let m = Manager::new(rng.gen_range(1..=10));
        let g = clause_func(&mut rng, &m);
        let h = clause_func(&mut rng, &m);
        let p = projection_for(&m, g, h).unwrap();
        assert!(verify_projection(&m, &p, g, h));
    }
}

#[test]
fn fixes_on_set_and_lands_in_target_off_set() {
    let mut rng = rng(31);
    for _ in 0..200 {
        let m = Manager::new(rng.gen_range(1..=8));
        let g = random_func(&mut rng, &m);
        let h = random_func(&mut rng, &m);
        if m.is_one(h) {
            continue;
        }
        let y = random_off_point(&mut rng, &m, h);
        let p = point_projection(&m, g, h, &y).unwrap();
        let n = m.var_count();
        for i in 0..1u64 << n {
            let x = Point::from_index(n, i);
            let image = p.apply(&m, &x).unwrap();
            if m.eval(g, &x).unwrap() {
                assert_eq!(image, x);
            }
            // image ∈ h_OFF ∪ g_ON
            assert!(!m.eval(h, &image).unwrap() || m.eval(g, &image).unwrap());
        }
    }
}

#[test]
fn simplified_coordinates_equal_the_unsimplified_formula() {
    let mut rng = rng(32);
    for _ in 0..300 {
        let m = Manager::new(rng.gen_range(1..=8));
        let g = random_func(&mut rng, &m);
        let h = random_func(&mut rng, &m);
        if m.is_one(h) || m.is_one(g) {
            continue;
        }
        let y = random_off_point(&mut rng, &m, h);
        let p = point_projection(&m, g, h, &y).unwrap();
        let support = m.support(h);
        let ng = m.not(g);
        for i in 0..m.var_count() {
            let v = VarId(i as u32);
            let x = m.var(v).unwrap();
            let u = if support.contains(&v) {
                m.constant(y.get(v))
            } else {
                x
            };
            assert_eq!(p.subst()[i], m.or(m.and(g, x), m.and(ng, u)));
        }
    }
}

#[test]
fn verify_agrees_with_pointwise_definition() {
    let mut rng = rng(33);
    let mut accepted = 0;
    for _ in 0..300 {
        let m = Manager::new(rng.gen_range(1..=6));
        let g = random_func(&mut rng, &m);
        let h = random_func(&mut rng, &m);
        let mut p = if m.is_one(h) {
            Projection::identity(&m, h)
        } else {
            let y = random_off_point(&mut rng, &m, h);
            point_projection(&m, g, h, &y).unwrap()
        };
        if rng.gen_bool(0.5) {
            // perturb one coordinate; usually no longer a projection
            let i = rng.gen_range(0..m.var_count());
            let mut subst = p.subst().to_vec();
            subst[i] = random_func(&mut rng, &m);
            p = Projection::from_parts(&m, subst, g, h).unwrap();
        }
        let expected = is_projection_pointwise(&m, &p, g, h);
        assert_eq!(verify_projection(&m, &p, g, h), expected);
        accepted += usize::from(expected);
    }
    assert!(accepted > 50 && accepted < 300);
}

#[test]
fn composition_lands_in_product_projection_set() {
    let mut rng = rng(34);
    for _ in 0..500 {
        let m = Manager::new(rng.gen_range(1..=8));
        let g1 = clause_func(&mut rng, &m);
        let g2 = clause_func(&mut rng, &m);
        let h = clause_func(&mut rng, &m);
        let p1 = projection_for(&m, g1, h).unwrap();
        let p2 = projection_for(&m, g2, h).unwrap();
        let g = m.and(g1, g2);
        for p in [
            compose_projections(&m, &p1, &p2).unwrap(),
            compose_projections(&m, &p2, &p1).unwrap(),
        ] {
            assert!(verify_projection(&m, &p, g, h));
            assert_eq!(p.base(), g);
        }
    }
}

#[test]
fn composition_with_shared_off_point_exhaustive() {
    let mut rng = rng(35);
    for _ in 0..200 {
        let m = Manager::new(rng.gen_range(1..=6));
        let h = formula_to_func(&random_cnf(&mut rng, m.var_count(), 3, 3), &m);
        if m.is_one(h) {
            continue;
        }
        let y = random_off_point(&mut rng, &m, h);
        let g1 = clause_func(&mut rng, &m);
        let g2 = clause_func(&mut rng, &m);
        let p1 = point_projection(&m, g1, h, &y).unwrap();
        let p2 = point_projection(&m, g2, h, &y).unwrap();
        let p = compose_projections(&m, &p1, &p2).unwrap();
        assert!(is_projection_pointwise(&m, &p, m.and(g1, g2), h));
    }
}

#[test]
fn composition_is_associative() {
    let mut rng = rng(36);
    for _ in 0..200 {
        let m = Manager::new(rng.gen_range(1..=8));
        let h = clause_func(&mut rng, &m);
        let ps: Vec<_> = (0..3)
            .map(|_| projection_for(&m, clause_func(&mut rng, &m), h).unwrap())
            .collect();
        let left = compose_projections(
            &m,
            &compose_projections(&m, &ps[0], &ps[1]).unwrap(),
            &ps[2],
        )
        .unwrap();
        let right = compose_projections(
            &m,
            &ps[0],
            &compose_projections(&m, &ps[1], &ps[2]).unwrap(),
        )
        .unwrap();
        assert_eq!(left.subst(), right.subst());
    }
}

#[test]
fn projections_into_a_larger_target_serve_smaller_ones() {
    let mut rng = rng(37);
    for _ in 0..300 {
        let m = Manager::new(rng.gen_range(1..=8));
        let g = random_func(&mut rng, &m);
        let h2 = random_func(&mut rng, &m);
        let h1 = m.and(h2, random_func(&mut rng, &m));
        if m.is_one(h2) {
            continue;
        }
        let p = projection_for(&m, g, h2).unwrap();
        assert!(verify_projection(&m, &p, g, h2));
        assert!(verify_projection(&m, &p, g, h1));
    }
}
