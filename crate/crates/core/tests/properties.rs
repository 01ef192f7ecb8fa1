use num_complex::Complex64;
use proptest::prelude::*;

use symcontract::blaschke::{
    compose_elementary, compressed_shift, detect_mobius_relation, fejer_riesz, model_conjugation, FiniteBlaschke,
};
use symcontract::charfun::{c00_check, classify, cnu_unitary_split, detect_j, Contraction};
use symcontract::conjugation::{find_conjugation_seeded, is_c_symmetric, is_conjugation, AntilinearMap, Conjugation};
use symcontract::family::{
    build_t, classify_family, expected_defects, point_fixe_bridge, random_blaschke, random_spec, Branch, FamilyCase,
};
use symcontract::grid::{circle, disk_grid};
use symcontract::inner2x2::{build_theta, family_pair, symmetrizable_test, symmetrizer, InnerPair};
use symcontract::numlin::{
    c, conj, joint_nullspace, norm2, psd_sqrt, singular_values, svd, takagi, unitarity_defect, CMatrix, CVector,
};
use symcontract::random::{random_contraction, random_gaussian, random_in_disk, random_unimodular, random_unitary, rng_from_seed};
use symcontract::Verdict;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn random_symmetric(seed: u64, n: usize) -> CMatrix {
    let g = random_gaussian(&mut rng_from_seed(seed), n, n);
    &g + g.transpose()
}

fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn svd_factors_are_orthonormal(seed in any::<u64>(), m in 1usize..9, n in 1usize..9) {
        let a = random_gaussian(&mut rng_from_seed(seed), m, n);
        let d = svd(&a).unwrap();
        prop_assert!(unitarity_defect(&d.u) <= 1e-10);
        prop_assert!(unitarity_defect(&d.v) <= 1e-10);
        prop_assert!((d.reconstruct() - &a).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn takagi_reconstructs(seed in any::<u64>(), n in 1usize..12) {
        let a = random_symmetric(seed, n);
        let t = takagi(&a).unwrap();
        prop_assert!((t.reconstruct() - &a).norm() <= 1e-10 * a.norm());
        prop_assert!(unitarity_defect(&t.w) <= 1e-10);
    }

    #[test]
    fn psd_sqrt_inverts_squaring(seed in any::<u64>(), n in 1usize..8) {
        let g = random_gaussian(&mut rng_from_seed(seed), n, n);
        let b = &g * g.adjoint();
        let r = psd_sqrt(&(&b * &b)).unwrap();
        prop_assert!((r - &b).norm() <= 1e-9 * b.norm().max(1.0));
    }

    #[test]
    fn joint_nullspace_vectors_are_annihilated(seed in any::<u64>(), n in 2usize..7, k in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let kernel = random_gaussian(&mut rng, n, 1);
        let maps: Vec<CMatrix> = (0..k)
            .map(|_| {
                let m = random_gaussian(&mut rng, 3, n);
                // Remove the component along the planted kernel vector.
                let p = &kernel * kernel.adjoint() * c(1.0 / kernel.norm_squared(), 0.0);
                &m - &m * p
            })
            .collect();
        let threshold = 1e-8;
        let vs = joint_nullspace(&maps, threshold).unwrap();
        prop_assert!(!vs.is_empty());
        for v in &vs {
            for m in &maps {
                prop_assert!((m * v).norm() <= threshold * (maps.len() as f64).sqrt());
            }
        }
    }

    #[test]
    fn conjugations_are_isometric_involutions(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = rng_from_seed(seed);
        let w = random_unitary(&mut rng, n);
        let cj = Conjugation::new(&w * w.transpose()).unwrap();
        let x = random_gaussian(&mut rng, n, 1).column(0).into_owned();
        let y = random_gaussian(&mut rng, n, 1).column(0).into_owned();
        let (cx, cy) = (cj.apply(&x).unwrap(), cj.apply(&y).unwrap());
        prop_assert!((inner(&cx, &cy) - inner(&y, &x)).norm() <= 1e-10 * x.norm() * y.norm());
        prop_assert!((cj.apply(&cx).unwrap() - &x).norm() <= 1e-10 * x.norm());
    }

    #[test]
    fn conjugation_times_symmetry_is_a_conjugation(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = rng_from_seed(seed);
        let w = random_unitary(&mut rng, n);
        let u = &w * w.transpose();
        // Symmetries commuting with C = U∘conj are W·R·W* with R a real
        // orthogonal reflection.
        let g = random_gaussian(&mut rng, n, n).map(|z| c(z.re, 0.0));
        let q = g.qr().q();
        let signs = CVector::from_iterator(n, (0..n).map(|i| c(if (seed >> i) & 1 == 0 { 1.0 } else { -1.0 }, 0.0)));
        let s = &w * (&q * CMatrix::from_diagonal(&signs) * q.transpose()) * w.adjoint();
        prop_assert!(unitarity_defect(&s) <= 1e-10 && (&s * &s - CMatrix::identity(n, n)).norm() <= 1e-10);
        // x ↦ C(Sx) = U·conj(S)·conj(x).
        let cs = AntilinearMap::new(&u * conj(&s)).unwrap();
        prop_assert!(is_conjugation(&cs, 1e-8));
    }

    #[test]
    fn c_symmetry_passes_to_adjoint(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let w = random_unitary(&mut rng, n);
        let cj = Conjugation::new(&w * w.transpose()).unwrap();
        let sym = random_symmetric(seed ^ 1, n);
        let t = &w * sym * w.adjoint();
        let a = is_c_symmetric(&t, &cj, 1e-8).unwrap().0;
        let b = is_c_symmetric(&t.adjoint(), &cj, 1e-8).unwrap().0;
        prop_assert!(a && b);
        let g = random_gaussian(&mut rng, n, n);
        let a = is_c_symmetric(&g, &cj, 1e-8).unwrap().0;
        let b = is_c_symmetric(&g.adjoint(), &cj, 1e-8).unwrap().0;
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn two_by_two_contractions_are_symmetric(seed in any::<u64>(), norm in 0.05f64..1.0) {
        let t = random_contraction(&mut rng_from_seed(seed), 2, norm);
        let s = find_conjugation_seeded(&t, 1e-8, seed).unwrap();
        prop_assert_eq!(s.verdict, Verdict::Symmetric);
        let u = s.conjugation.unwrap().matrix().clone();
        let d = Contraction::new(t).unwrap().defect().clone();
        prop_assert!((&d.dt_star * &u - &u * conj(&d.dt)).norm() <= 1e-6);
    }

    #[test]
    fn characteristic_function_is_contractive_and_analytic(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let t = Contraction::new(random_contraction(&mut rng, n, 0.9)).unwrap();
        let mut points = disk_grid(24, n, seed).unwrap();
        points.extend(circle(0.999, 16));
        for &z in &points {
            prop_assert!(norm2(&t.char_eval(z).unwrap()) <= 1.0 + 1e-8);
        }
        let h = 1e-4;
        for &z in points.iter().filter(|z| z.norm() < 0.9) {
            let dx = (t.char_eval(z + h).unwrap() - t.char_eval(z - h).unwrap()) / c(2.0 * h, 0.0);
            let dy = (t.char_eval(z + c(0.0, h)).unwrap() - t.char_eval(z - c(0.0, h)).unwrap()) / c(2.0 * h, 0.0);
            // ∂/∂z̄ = (∂x + i∂y)/2.
            let dbar = (dx + dy * c(0.0, 1.0)) * c(0.5, 0.0);
            prop_assert!(dbar.norm() <= 1e-6);
        }
    }

    #[test]
    fn symmetrized_characteristic_function_is_symmetric(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let w = random_unitary(&mut rng, n);
        let sym = random_symmetric(seed ^ 7, n);
        let t = Contraction::new(&w * &sym * w.transpose() * c(0.8 / norm2(&sym), 0.0)).unwrap();
        let grid = disk_grid(24, n, seed).unwrap();
        let j = detect_j(&t, &grid, 1e-8, seed).unwrap();
        prop_assert_eq!(j.verdict, Verdict::Symmetric);
        for &z in &grid {
            let th = t.char_eval(z).unwrap();
            let s = j.symmetrized(&th).unwrap();
            prop_assert!((&s - s.transpose()).norm() <= 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn detectors_never_contradict(seed in any::<u64>(), n in 2usize..6, symmetric in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let m = if symmetric {
            let w = random_unitary(&mut rng, n);
            &w * random_symmetric(seed ^ 3, n) * w.transpose()
        } else {
            random_gaussian(&mut rng, n, n)
        };
        let t = Contraction::new(&m * c(0.85 / norm2(&m), 0.0)).unwrap();
        let grid = disk_grid(24, n, seed).unwrap();
        let cl = classify(&t, &grid, 1e-8, seed).unwrap();
        prop_assert!(!cl.verdict_i.contradicts(cl.verdict_ii));
        if symmetric {
            prop_assert_eq!(cl.verdict, Verdict::Symmetric);
        }
    }

    #[test]
    fn symmetric_with_unitary_part_has_symmetric_cnu_part(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        // T = diag(e^{iϑ}) ⊕ (symmetric contraction).
        let sym = random_symmetric(seed ^ 11, n + 1);
        let k = &sym * c(0.7 / norm2(&sym), 0.0);
        let mut t = CMatrix::zeros(2 * n + 1, 2 * n + 1);
        for i in 0..n {
            t[(i, i)] = random_unimodular(&mut rng);
        }
        t.view_mut((n, n), (n + 1, n + 1)).copy_from(&k);
        let v = random_unitary(&mut rng, 2 * n + 1);
        let t = Contraction::new(&v * t * v.adjoint()).unwrap();
        let split = cnu_unitary_split(&t).unwrap();
        prop_assert_eq!(split.unitary_dim, n);
        // Compress T to the range of I − P.
        let m = t.dim();
        let (vals, vecs) = symcontract::numlin::hermitian_eigen(&(CMatrix::identity(m, m) - &split.projection));
        let cols: Vec<CVector> = (0..m).filter(|&i| vals[i] > 0.5).map(|i| vecs.column(i).into_owned()).collect();
        let q = CMatrix::from_columns(&cols);
        let cnu = Contraction::new(q.adjoint() * t.matrix() * &q).unwrap();
        let grid = disk_grid(24, cnu.dim(), seed).unwrap();
        prop_assert_eq!(classify(&cnu, &grid, 1e-8, seed).unwrap().verdict, Verdict::Symmetric);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn blaschke_modulus(seed in any::<u64>(), deg in 1usize..7) {
        let b = random_blaschke(&mut rng_from_seed(seed), deg);
        prop_assert!(b.boundary_defect(256) <= 1e-10);
        let mut rng = rng_from_seed(seed ^ 5);
        for _ in 0..16 {
            prop_assert!(b.eval(random_in_disk(&mut rng, 0.999)).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn compressed_shifts_are_cnu_and_c00(seed in any::<u64>(), deg in 1usize..7) {
        let b = random_blaschke(&mut rng_from_seed(seed), deg);
        let t = compressed_shift(&b).unwrap();
        prop_assert_eq!(cnu_unitary_split(&t).unwrap().unitary_dim, 0);
        let check = c00_check(&t, 1e-8).unwrap();
        prop_assert!(check.c00);
        let rho = b.zeros().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((check.spectral_radius - rho).abs() <= 1e-6);
    }

    #[test]
    fn mobius_relation_round_trips(seed in any::<u64>(), deg in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let u = random_blaschke(&mut rng, deg);
        let (mu, lambda) = (random_unimodular(&mut rng), random_in_disk(&mut rng, 0.7));
        let v = compose_elementary(mu, lambda, &u).unwrap();
        let r = detect_mobius_relation(&u, &v).unwrap();
        prop_assert!((r.mu - mu).norm() <= 1e-8 && (r.lambda - lambda).norm() <= 1e-8);
    }

    #[test]
    fn model_conjugation_is_a_conjugation(seed in any::<u64>(), deg in 1usize..6) {
        let b = random_blaschke(&mut rng_from_seed(seed), deg);
        let m = model_conjugation(&b).unwrap();
        prop_assert!(unitarity_defect(m.matrix()) <= 1e-8);
        prop_assert!((m.matrix() - m.matrix().transpose()).norm() <= 1e-8);
    }

    #[test]
    fn fejer_riesz_roots_stay_outside(seed in any::<u64>(), deg in 0usize..11) {
        let mut rng = rng_from_seed(seed);
        // p = |h|² + ε for a random polynomial h.
        let h: Vec<Complex64> = (0..=deg).map(|_| symcontract::random::gaussian_complex(&mut rng)).collect();
        let mut p: Vec<Complex64> = (0..=deg)
            .map(|k| (0..=deg - k).fold(c(0.0, 0.0), |s, j| s + h[j + k] * h[j].conj()))
            .collect();
        p[0] += c(1e-3, 0.0);
        let q = fejer_riesz(&p).unwrap();
        prop_assert!(symcontract::blaschke::fejer_riesz_residual(&p, &q, 512) <= 1e-8 * p[0].re.max(1.0));
        if q.len() > 1 {
            for r in symcontract::numlin::poly_roots(&q).unwrap() {
                prop_assert!(r.norm() >= 1.0 - 1e-8);
            }
        }
    }
}

fn pair_from_family(seed: u64, branch: Branch) -> (InnerPair, FamilyCase) {
    let mut rng = rng_from_seed(seed);
    let spec = random_spec(&mut rng, branch);
    let a = spec.y.norm();
    let beta = (1.0 - a * a).sqrt();
    let pair = family_pair(&spec.u, &spec.v, c(a, 0.0), c(beta, 0.0)).unwrap();
    (pair, classify_family(&spec).case)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn theta_is_inner_on_the_boundary(seed in any::<u64>(), related in any::<bool>()) {
        let branch = if related { Branch::Mobius } else { Branch::Unrelated };
        let (pair, _) = pair_from_family(seed, branch);
        let th = build_theta(&pair).unwrap();
        for z in circle(1.0, 256) {
            let m = th.eval(z);
            prop_assert!((m.adjoint() * &m - CMatrix::identity(2, 2)).norm() <= 1e-8);
        }
    }

    #[test]
    fn symmetrizer_agrees_with_test(seed in any::<u64>(), related in any::<bool>()) {
        let branch = if related { Branch::Mobius } else { Branch::Unrelated };
        let (pair, case) = pair_from_family(seed, branch);
        let report = symmetrizable_test(&pair).unwrap();
        let mobius = matches!(case, FamilyCase::Mobius { .. });
        prop_assert_eq!(report.witness.is_some(), mobius);
        let (g, t) = report.witness.unwrap_or(report.candidate);
        prop_assert_eq!(symmetrizer(&pair, g, t).is_ok(), mobius);
    }

    #[test]
    fn symmetrizability_survives_rescaling(seed in any::<u64>(), related in any::<bool>(), angle in 0.0f64..6.28) {
        let branch = if related { Branch::Mobius } else { Branch::Unrelated };
        let (pair, _) = pair_from_family(seed, branch);
        let w = Complex64::from_polar(1.0, angle);
        let rotated = InnerPair::new(pair.phi(), pair.a().in_space() * w, pair.b().in_space() * w).unwrap();
        prop_assert_eq!(
            symmetrizable_test(&pair).unwrap().witness.is_some(),
            symmetrizable_test(&rotated).unwrap().witness.is_some()
        );
    }

    #[test]
    fn family_operators_match_lemma(seed in any::<u64>(), branch_index in 0usize..4) {
        let branch = symcontract::family::BRANCHES[branch_index];
        let spec = random_spec(&mut rng_from_seed(seed), branch);
        let t = build_t(&spec).unwrap();
        prop_assert!(singular_values(t.matrix())[0] <= 1.0 + 1e-10);
        prop_assert!(c00_check(&t, 1e-8).unwrap().c00);
        let d = t.defect();
        prop_assert_eq!((d.d_t, d.d_t_star), expected_defects(&spec));
        if branch == Branch::Mobius {
            let p = point_fixe_bridge(&spec).unwrap();
            prop_assert!(p.s.norm() < p.t.norm() && p.fixed_point_residual <= 1e-8);
        }
    }
}

#[test]
fn relate_identity_pair() {
    let u = FiniteBlaschke::new(vec![c(0.2, 0.1), c(-0.4, 0.3)], c(0.0, 1.0)).unwrap();
    let r = detect_mobius_relation(&u, &u).unwrap();
    assert!((r.mu + 1.0).norm() < 1e-8 && r.lambda.norm() < 1e-8);
}
