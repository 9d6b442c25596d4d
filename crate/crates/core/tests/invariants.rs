use cone_lab_core::centroid::{find_centroid_section, hammer_check_with, verify_centroid, HAMMER_TOL};
use cone_lab_core::characterize::{
    analytic_fbi_hyperplane, fbi_defect, fit_ellipsoid, inscribed_parallelogram, parallelogram_defects, symmetry_defect,
};
use cone_lab_core::cone::section_of;
use cone_lab_core::gamma::gamma_curve;
use cone_lab_core::harness::family::affine_ellipsoidal;
use cone_lab_core::linalg::{self, affine_rank, fit_hyperplane, symmetric_eigen, vector};
use cone_lab_core::{ConeSpec, Hyperplane, Matrix, Membership, Vector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_orthogonal(r: &mut ChaCha8Rng, d: usize) -> Matrix {
    let g = Matrix::from_fn(d, d, |_, _| r.random_range(-1.0..1.0));
    g.qr().q()
}

fn random_points(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vector> {
    (0..n)
        .map(|_| Vector::from_iterator(d, (0..d).map(|_| r.random_range(-2.0..2.0))))
        .collect()
}

fn polygon_cone(pts: &[Vector]) -> ConeSpec {
    let lifted = pts.iter().map(|p| vector(&[1.0, p[0], p[1]])).collect();
    ConeSpec::base_body(Hyperplane::new(linalg::unit(3, 0), 1.0).unwrap(), lifted).unwrap()
}

fn random_polygon(r: &mut ChaCha8Rng, n: usize) -> Vec<Vector> {
    let mut angles: Vec<f64> = (0..n).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles
        .iter()
        .map(|t| {
            let rad = r.random_range(0.6..1.4);
            vector(&[rad * t.cos(), rad * t.sin()])
        })
        .collect()
}

fn base_section(cone: &ConeSpec, samples: usize) -> cone_lab_core::Section {
    section_of(cone, &Hyperplane::new(cone.section_normal().clone(), 1.0).unwrap(), samples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_rank_ignores_rigid_motion(seed in any::<u64>(), d in 2usize..6, flat in 0usize..3) {
        let mut r = rng(seed);
        let k = d.saturating_sub(flat).max(1);
        // Points spanning a k-dimensional flat.
        let low = random_points(&mut r, 12, k);
        let pts: Vec<Vector> = low
            .iter()
            .map(|p| Vector::from_iterator(d, (0..d).map(|i| if i < k { p[i] } else { 0.0 })))
            .collect();
        let q = random_orthogonal(&mut r, d);
        let t = Vector::from_iterator(d, (0..d).map(|_| r.random_range(-5.0..5.0)));
        let moved: Vec<Vector> = pts.iter().map(|p| &q * p + &t).collect();
        let (a, _) = affine_rank(&pts, 1e-8).unwrap();
        let (b, _) = affine_rank(&moved, 1e-8).unwrap();
        prop_assert_eq!(a, k);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fit_hyperplane_is_exact_on_flat_sets(seed in any::<u64>(), d in 2usize..6) {
        let mut r = rng(seed);
        let q = random_orthogonal(&mut r, d);
        let flat: Vec<Vector> = random_points(&mut r, 16, d - 1)
            .iter()
            .map(|p| &q * Vector::from_iterator(d, p.iter().copied().chain([1.5])))
            .collect();
        let (rank, _) = affine_rank(&flat, 1e-8).unwrap();
        let (_, dist) = fit_hyperplane(&flat).unwrap();
        prop_assert_eq!(rank, d - 1);
        prop_assert!(dist <= 1e-12, "{}", dist);

        let full = random_points(&mut r, 16, d);
        let (rank, _) = affine_rank(&full, 1e-8).unwrap();
        let (_, dist) = fit_hyperplane(&full).unwrap();
        prop_assert_eq!(rank, d);
        prop_assert!(dist > 1e-12);
    }

    #[test]
    fn eigen_matches_power_sums(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let g = Matrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let m = &g + g.transpose();
        let e = symmetric_eigen(&m).unwrap();
        let scale = m.norm().max(1e-300);
        prop_assert!((e.reconstruct() - &m).norm() <= 1e-10 * scale);
        for i in 0..n {
            for j in 0..n {
                let dot = e.eigenvectors[i].dot(&e.eigenvectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() <= 1e-10);
            }
        }
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        // Oracle: tr(M^k) = Σ λ^k determines the spectrum.
        let mut power = Matrix::identity(n, n);
        for k in 1..=n {
            power = &power * &m;
            let sum: f64 = e.eigenvalues.iter().map(|l| l.powi(k as i32)).sum();
            prop_assert!((power.trace() - sum).abs() <= 1e-9 * scale.powi(k as i32).max(1.0));
        }
    }

    #[test]
    fn membership_is_scale_invariant(seed in any::<u64>(), d in 3usize..6, s in 1e-3f64..1e3) {
        let mut r = rng(seed);
        let cone = affine_ellipsoidal(d, &mut r).unwrap();
        let section = base_section(&cone, 32);
        let inside = cone.random_interior_point(&mut r, 0.5);
        let outside = section.boundary_samples()[0].clone() * 1.5 - cone.axis_point() * 0.5;
        for x in [inside, outside, section.boundary_samples()[3].clone()] {
            let a = cone.contains(&x, 1e-9).unwrap();
            let b = cone.contains(&(&x * s), 1e-9).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn section_samples_lie_on_plane_and_boundary(seed in any::<u64>(), d in 3usize..6, tilt in 0.0f64..0.8) {
        let mut r = rng(seed);
        let cone = affine_ellipsoidal(d, &mut r).unwrap();
        let u = cone.random_section_normal(&mut r, tilt);
        let plane = Hyperplane::new(u, 2.0).unwrap();
        let section = section_of(&cone, &plane, 48).unwrap();
        for s in section.boundary_samples() {
            prop_assert!(plane.signed_distance(s).abs() <= 1e-10);
            prop_assert_eq!(cone.contains(s, 1e-9).unwrap(), Membership::Boundary);
            prop_assert!(cone.section_normal().dot(s) > 0.0);
        }
    }

    #[test]
    fn lorentz_sections_are_spheres(d in 3usize..7, c in 0.1f64..10.0) {
        let cone = ConeSpec::lorentz(d).unwrap();
        let section = section_of(&cone, &Hyperplane::new(linalg::unit(d, 0), c).unwrap(), 48).unwrap();
        for s in section.boundary_samples() {
            prop_assert!((s.rows(1, d - 1).norm() - c).abs() <= 1e-10 * c.max(1.0));
        }
    }

    #[test]
    fn gamma_samples_satisfy_chord_construction(seed in any::<u64>(), d in 3usize..6, depth in 0.0f64..0.9) {
        let mut r = rng(seed);
        let cone = if seed % 2 == 0 {
            affine_ellipsoidal(d, &mut r).unwrap()
        } else {
            polygon_cone(&random_polygon(&mut r, 7))
        };
        let a = cone.random_interior_point(&mut r, depth);
        let curve = gamma_curve(&cone, &a, 32).unwrap();
        let mut points: Vec<Vector> = Vec::new();
        for s in &curve.samples {
            prop_assert_eq!(&s.gamma_point, &(&s.base_point * s.scale));
            prop_assert!(s.scale > 0.0 && s.scale < 1.0 / curve.lambda);
            prop_assert_eq!(cone.contains(&s.gamma_point, 1e-8).unwrap(), Membership::Boundary);
            prop_assert_eq!(cone.contains(&(&a - &s.gamma_point), 1e-8).unwrap(), Membership::Boundary);
            // Unique crossing: just below μ the point is inside a − C, just above it is outside.
            let below = &a - &s.base_point * (s.scale * (1.0 - 1e-4));
            let above = &a - &s.base_point * (s.scale * (1.0 + 1e-4));
            prop_assert_eq!(cone.contains(&below, 1e-12).unwrap(), Membership::Interior);
            prop_assert_eq!(cone.contains(&above, 1e-12).unwrap(), Membership::Outside);
            points.push(s.gamma_point.clone());
        }
        // Injectivity at sample resolution.
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                prop_assert!((p - q).norm() > 1e-9);
            }
        }
    }

    #[test]
    fn analytic_plane_contains_gamma(seed in any::<u64>(), d in 3usize..7, depth in 0.0f64..0.9) {
        let mut r = rng(seed);
        let cone = affine_ellipsoidal(d, &mut r).unwrap();
        let a = cone.random_interior_point(&mut r, depth);
        let plane = analytic_fbi_hyperplane(&cone, &a).unwrap();
        let g = gamma_curve(&cone, &a, 48).unwrap().gamma_points();
        let diam = linalg::diameter(&g);
        for p in &g {
            prop_assert!(plane.signed_distance(p).abs() <= 1e-8 * diam);
        }
    }

    #[test]
    fn fbi_flatness_survives_linear_maps(seed in any::<u64>(), d in 3usize..6, depth in 0.0f64..0.9) {
        let mut r = rng(seed);
        let cone = affine_ellipsoidal(d, &mut r).unwrap();
        let m = Matrix::identity(d, d) + Matrix::from_fn(d, d, |_, _| r.random_range(-0.3..0.3));
        let a = cone.random_interior_point(&mut r, depth);
        let before = fbi_defect(&cone, &a, 48, 1e-8).unwrap().flatness_defect;
        let after = fbi_defect(&cone.transformed(&m).unwrap(), &(&m * &a), 48, 1e-8).unwrap().flatness_defect;
        prop_assert!((before - after).abs() <= 1e-8, "{} vs {}", before, after);
    }

    #[test]
    fn symmetric_bases_have_zero_defect(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, q) = (random_points(&mut r, 1, 2).remove(0), random_points(&mut r, 1, 2).remove(0));
        if (p[0] * q[1] - p[1] * q[0]).abs() < 0.2 {
            return Ok(());
        }
        let para = polygon_cone(&[p.clone(), q.clone(), -&p, -&q]);
        prop_assert!(symmetry_defect(&base_section(&para, 64), 64).unwrap() <= 1e-9);
        let ellipse = affine_ellipsoidal(3, &mut r).unwrap();
        let tilted = section_of(&ellipse, &Hyperplane::new(ellipse.random_section_normal(&mut r, 0.5), 1.0).unwrap(), 64).unwrap();
        prop_assert!(symmetry_defect(&tilted, 64).unwrap() <= 1e-9);
    }

    #[test]
    fn symmetry_defect_is_affine_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let poly = random_polygon(&mut r, 6);
        let a = Matrix::from_row_slice(2, 2, &[
            r.random_range(0.5..2.0), r.random_range(-0.5..0.5),
            r.random_range(-0.5..0.5), r.random_range(0.5..2.0),
        ]);
        let shift = vector(&[r.random_range(-0.3..0.3), r.random_range(-0.3..0.3)]);
        let image: Vec<Vector> = poly.iter().map(|p| &a * p + &shift).collect();
        let before = symmetry_defect(&base_section(&polygon_cone(&poly), 64), 256).unwrap();
        let after = symmetry_defect(&base_section(&polygon_cone(&image), 64), 256).unwrap();
        prop_assert!((before - after).abs() <= 1e-9, "{} vs {}", before, after);
    }

    #[test]
    fn ellipse_fit_ignores_rigid_motion(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let pts: Vec<Vector> = (0..40)
            .map(|_| {
                let g = Vector::from_iterator(d, (0..d).map(|_| r.random_range(-1.0..1.0)));
                let u = g.normalize();
                Vector::from_iterator(d, (0..d).map(|i| u[i] * (1.0 + 0.5 * i as f64) * r.random_range(0.9..1.1)))
            })
            .collect();
        let q = random_orthogonal(&mut r, d);
        let t = Vector::from_iterator(d, (0..d).map(|_| r.random_range(-3.0..3.0)));
        let moved: Vec<Vector> = pts.iter().map(|p| &q * p + &t).collect();
        let a = fit_ellipsoid(&pts).unwrap().residual;
        let b = fit_ellipsoid(&moved).unwrap().residual;
        prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn parallelogram_diagonals_bisect(seed in any::<u64>(), n in 3usize..10) {
        let mut r = rng(seed);
        let cone = polygon_cone(&random_polygon(&mut r, n));
        let section = base_section(&cone, 64);
        let v = inscribed_parallelogram(&section).unwrap();
        let (boundary, midpoint) = parallelogram_defects(&section, &v);
        prop_assert!(boundary <= 1e-9 && midpoint <= 1e-9, "{} {}", boundary, midpoint);
        prop_assert!(((&v[0] + &v[2]) - (&v[1] + &v[3])).norm() <= 2e-9 * linalg::diameter(&v));
    }

    #[test]
    fn chord_ratios_respect_bounds(seed in any::<u64>(), n in 3usize..10, tilt in 0.0f64..0.6) {
        let mut r = rng(seed);
        let cone = polygon_cone(&random_polygon(&mut r, n));
        let u = cone.random_section_normal(&mut r, tilt);
        let section = section_of(&cone, &Hyperplane::new(u, 1.0).unwrap(), 64).unwrap();
        let report = hammer_check_with(&section, 128, Some(seed), HAMMER_TOL).unwrap();
        prop_assert_eq!(report.violations, 0);
        for c in &report.chords {
            prop_assert!(c.mu > 0.0 && c.mu < 1.0);
            prop_assert!((c.mu + c.reversed().mu - 1.0).abs() <= 1e-12);
            prop_assert!((c.point() - section.centroid()).norm() <= 1e-10 * section.reach().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn found_sections_verify_at_double_sampling(seed in any::<u64>(), d in 3usize..6, depth in 0.1f64..0.8) {
        let mut r = rng(seed);
        let cone = affine_ellipsoidal(d, &mut r).unwrap();
        let p = cone.random_interior_point(&mut r, depth) * r.random_range(0.5..2.0);
        let tol = 1e-6;
        let found = find_centroid_section(&cone, &p, tol).unwrap();
        let (gap, err) = verify_centroid(&found, &p).unwrap();
        prop_assert!((found.centroid() - &p).norm() <= tol * p.norm());
        prop_assert!(gap <= 2.0 * tol + err, "gap {} err {}", gap, err);
    }
}
