use std::f64::consts::PI;

use plap_bounds::bounds::{
    annulus_bound, best_bound, best_box_bound, boggio_bound, convex_bound, hardy_bound, m_function, mixed_bound,
    node_terms, optimize_scale, radial_hardy_bound, BoundConfig, LatticeField, VectorFieldSpec,
};
use plap_bounds::cli::{oracle_estimate, DomainFile};
use plap_bounds::geometry::shapes::{annular_sector, annulus, disk, l_shape, rectangle};
use plap_bounds::geometry::{BoundaryPart, Domain, Label, Vec2};
use plap_bounds::one_dim::{radial_eigenvalue, Arrangement, Exponent, RadialEigenProblem};
use plap_bounds::oracle::{build_grid, quadrature_check, rayleigh_minimize_p, ScalarField};
use proptest::prelude::*;
use Label::{Dirichlet as D, Neumann as N};

fn ex(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(D), Just(N)]
}

/// Rectangle labels with at least one Dirichlet side.
fn labels4() -> impl Strategy<Value = [Label; 4]> {
    (proptest::array::uniform4(label()), 0usize..4).prop_map(|(mut l, k)| {
        l[k] = D;
        l
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn bounds_stay_below_the_oracle(
        w in 0.6f64..1.6,
        ht in 0.6f64..1.6,
        labels in labels4(),
        p in prop_oneof![Just(2.0), Just(3.0)],
    ) {
        let dom = rectangle(0.0, 0.0, w, ht, labels);
        let h = w.min(ht) / 12.0;
        let config = BoundConfig {
            grid_h: h,
            n_angles: 90,
            n_boundary_samples: 256,
            ..BoundConfig::default()
        };
        let est = oracle_estimate(&dom, ex(p), h).unwrap();
        let ceiling = est.value + 3.0 * est.band;
        for c in best_bound(&dom, ex(p), 2, &config).unwrap() {
            if let Some(v) = c.value {
                prop_assert!(v <= ceiling, "{} {}: {v} > {ceiling}", c.method.name(), c.detail);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn boggio_inequality_and_scale(
        q in proptest::array::uniform6(-2.0f64..2.0),
        z in proptest::array::uniform4(-1.0f64..1.0),
        p in prop_oneof![Just(1.5), Just(2.0), Just(3.0)],
        neumann in any::<bool>(),
    ) {
        let dom = rectangle(0.0, 0.0, 1.0, 1.0, [D, D, D, if neumann { N } else { D }]);
        let grid = build_grid(&dom, 1.0 / 20.0).unwrap();
        let [a, b, c, d, e, f] = q;
        let spec = VectorFieldSpec::GridField(LatticeField::from_fn(&grid, move |x| {
            let qx = if neumann { a * x.x + b.abs() } else { a * x.x + b + c * x.y };
            Vec2::new(qx, d * x.y + e * x.x + f)
        }));
        let one = boggio_bound(&dom, ex(p), &spec, &grid, 256, 1e-9).unwrap();
        let best = optimize_scale(&dom, ex(p), &spec, &grid, 256, 1e-9).unwrap();
        prop_assert!(best.value.unwrap() >= one.value.unwrap());

        // Smooth test function vanishing on the Dirichlet sides.
        let zeta = ScalarField::from_fn(&grid, |x| {
            let s = if neumann { (0.5 * PI * (1.0 - x.x)).sin() } else { (PI * x.x).sin() };
            s * (PI * x.y).sin() * (1.0 + 0.5 * z[0] * x.x + 0.5 * z[1] * x.y + 0.3 * z[2] * (2.0 * PI * x.y).sin())
                + 0.1 * z[3] * (3.0 * PI * x.x).sin() * (PI * x.y).sin()
        });
        let w = ScalarField::new(&grid, node_terms(&spec, &grid, ex(p)).unwrap().w).unwrap();
        let (lhs, rhs) = quadrature_check(&grid, &zeta, &w, p).unwrap();
        prop_assert!(lhs >= rhs - 1e-6 * lhs, "{lhs} < {rhs}");
    }

    #[test]
    fn mixed_endpoints_reproduce_components(
        r in 0.5f64..1.5,
        width in 0.5f64..1.5,
        sweep in 0.6f64..1.5,
        inner in label(),
    ) {
        let dom = annular_sector(r, r + width, sweep, 24, inner, D, D);
        let grid = build_grid(&dom, (r + width) / 24.0).unwrap();
        let p = ex(1.5);
        let m = mixed_bound(&dom, p, 2, &grid, 90, 65, 512, 1e-9).unwrap();
        let radial = radial_hardy_bound(&dom, p, 2, &grid, 512, 1e-9).unwrap().value.unwrap();
        let hardy = hardy_bound(&dom, p, &grid, 90).value.unwrap();
        prop_assert_eq!(m.parameters["radial_endpoint"], radial);
        prop_assert_eq!(m.parameters["hardy_endpoint"], hardy);
        prop_assert!(m.value.unwrap() >= radial.max(hardy) - 1e-12);
    }

    #[test]
    fn dilation_covariance(s in 0.25f64..4.0, p in prop_oneof![Just(1.5), Just(2.0), Just(3.0)]) {
        let exp = ex(p);
        let scale = s.powf(-p);
        let rect = rectangle(0.0, 0.0, 1.5, 1.0, [D, N, D, D]);
        let a = best_box_bound(&rect, exp, 256, 1e-9).unwrap().value.unwrap();
        let b = best_box_bound(&rect.scaled(s), exp, 256, 1e-9).unwrap().value.unwrap();
        prop_assert!(rel(b, a * scale) < 1e-6);

        let ring = annulus(0.5, 1.0, 64, N, D);
        let a = annulus_bound(&ring, exp, 2, 1e-10).unwrap().value.unwrap();
        let b = annulus_bound(&ring.scaled(s), exp, 2, 1e-10).unwrap().value.unwrap();
        prop_assert!(rel(b, a * scale) < 1e-6, "annulus {a} {b}");

        let round = disk(Vec2::default(), 1.0, 128, D, true);
        let a = convex_bound(&round, exp, 2, 128).unwrap().value.unwrap();
        let b = convex_bound(&round.scaled(s), exp, 2, 128).unwrap().value.unwrap();
        prop_assert!(rel(b, a * scale) < 1e-6);

        // Grid bounds at matched resolution.
        let l = l_shape();
        let h = 1.0 / 8.0;
        let a = hardy_bound(&l, exp, &build_grid(&l, h).unwrap(), 64).value.unwrap();
        let ls = l.scaled(s);
        let b = hardy_bound(&ls, exp, &build_grid(&ls, s * h).unwrap(), 64).value.unwrap();
        prop_assert!(rel(b, a * scale) < 1e-6, "hardy {a} {b}");
    }

    #[test]
    fn averaged_distance_is_dominated(
        x in 0.02f64..1.98,
        y in 0.02f64..1.98,
        labels in proptest::array::uniform6(label()),
        p in 1.2f64..4.0,
    ) {
        let pt = Vec2::new(x, y);
        let dom = l_shape();
        prop_assume!(dom.contains(pt));
        let vertices = dom.outer().vertices().to_vec();
        let dom = Domain::new(
            plap_bounds::geometry::RingSpec::new(vertices, labels.to_vec()),
            Vec::new(),
            None,
        ).unwrap();
        prop_assume!(dom.has_label(D));
        let w = m_function(&dom, pt, ex(p), 180);
        let dist = dom.distance_to_boundary(pt, BoundaryPart::DirichletPart);
        prop_assert!(w <= dist.powf(-p) * (1.0 + 1e-9), "{w} vs {}", dist.powf(-p));
    }

    #[test]
    fn radial_eigenvalue_scales(
        r in 0.1f64..1.0,
        width in 0.2f64..1.5,
        p in 1.3f64..4.0,
        k in prop_oneof![Just(0.5), Just(2.0)],
        arrangement in prop_oneof![
            Just(Arrangement::NeumannInnerDirichletOuter),
            Just(Arrangement::DirichletInnerNeumannOuter),
            Just(Arrangement::DirichletBoth),
        ],
    ) {
        let prob = RadialEigenProblem::new(r, r + width, p, 2, arrangement).unwrap();
        let a = radial_eigenvalue(&prob, 1e-11).unwrap().eigenvalue;
        let b = radial_eigenvalue(&prob.scaled(k), 1e-11).unwrap().eigenvalue;
        prop_assert!(rel(b, a * k.powf(-p)) < 1e-6, "{a} {b}");
    }

    #[test]
    fn domain_files_round_trip(
        w in 0.1f64..10.0,
        ht in 0.1f64..10.0,
        labels in labels4(),
        p in 1.01f64..10.0,
        d in 1u32..5,
        with_super in any::<bool>(),
    ) {
        let dom = rectangle(-w / 2.0, 0.0, w / 2.0, ht, labels);
        let sup = with_super.then(|| rectangle(-w, -1.0, w, ht + 1.0, [D; 4]));
        let f = DomainFile::from_domain("r", ex(p), d, &dom, sup.as_ref());
        let back = DomainFile::parse(&f.to_toml()).unwrap().load().unwrap();
        prop_assert_eq!(&back.domain, &dom);
        prop_assert_eq!(back.superdomain, sup);
        prop_assert_eq!(back.p, ex(p));
        prop_assert_eq!(back.d, d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, ..ProptestConfig::default() })]

    #[test]
    fn rayleigh_descent_is_monotone(w in 0.7f64..1.5, labels in labels4(), p in 1.5f64..3.5) {
        let dom = rectangle(0.0, 0.0, w, 1.0, labels);
        let grid = build_grid(&dom, 1.0 / 12.0).unwrap();
        let res = rayleigh_minimize_p(&grid, p, None).unwrap();
        for pair in res.history.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
        prop_assert!(res.minimizer.values().iter().all(|v| *v > 0.0));
    }
}
