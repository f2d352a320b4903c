use dp1::asymptotics::{convergence_report, predicted_limit_negative, predicted_limit_positive, LimitMode, LimitParams};
use dp1::coefficients::{CoefficientFamily, Side};
use dp1::oracle::{freud_x1_closed_form, x1_quadrature, x1_quadrature_rho};
use dp1::precision::RealP;
use dp1::recurrence::{apriori_upper_bound, iterate, residual};
use dp1::shooting::{classify, scan, solve, Outcome, Policy};
use dp1::uniqueness::{condition_at, lemma_nonincreasing, verdict, Condition, Verdict};
use dp1::Trajectory;
use proptest::prelude::*;

const P: u32 = 128;

fn freud(k: &str) -> CoefficientFamily {
    CoefficientFamily::freud("1", k, "0").unwrap()
}

fn builtins() -> Vec<CoefficientFamily> {
    vec![
        CoefficientFamily::freud("1", "0", "0").unwrap(),
        CoefficientFamily::freud("2.5", "-3", "0.75").unwrap(),
        CoefficientFamily::freud("0.1", "4", "-0.5").unwrap(),
        CoefficientFamily::sqrt_n_example(),
        CoefficientFamily::middle_only_example(),
    ]
}

fn real(v: f64) -> RealP {
    RealP::from_f64(v, P)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_and_multiplication_commute(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        let (a, b) = (real(a) / 3, real(b) / 7);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn associativity_within_rounding(a in 1e-3f64..1e3, b in 1e-3f64..1e3, c in 1e-3f64..1e3) {
        let (a, b, c) = (real(a) / 3, real(b) / 7, real(c) / 11);
        let left = (&a + &b) + &c;
        let right = &a + &(&b + &c);
        prop_assert!(left.ulps_from(&right) <= 1.0);
        let left = (&a * &b) * &c;
        let right = &a * &(&b * &c);
        prop_assert!(left.ulps_from(&right) <= 1.0);
    }

    #[test]
    fn addition_is_monotone(a in -1e3f64..1e3, d in 1e-9f64..1e3, c in -1e3f64..1e3) {
        let a = real(a);
        let b = &a + &real(d);
        prop_assume!(a < b);
        let c = real(c) / 3;
        prop_assert!(&a + &c <= &b + &c);
    }

    #[test]
    fn coefficients_are_admissible(n in 1usize..1_000_000) {
        for f in builtins() {
            let c = f.coefficients(n, P).unwrap();
            prop_assert!(c.ell.is_positive());
            if f.middle_positive() {
                prop_assert!(c.sigma_mid.is_positive());
            } else {
                prop_assert!(c.sigma_mid.is_zero());
            }
            prop_assert!(!c.sigma_right.is_negative() && !c.sigma_left.is_negative());
            let expected = if c.sigma_left > c.sigma_right { &c.sigma_left } else { &c.sigma_right };
            prop_assert_eq!(&f.sigma_max(n, P).unwrap(), expected);
        }
    }

    #[test]
    fn coefficients_agree_across_precisions(n in 1usize..100_000) {
        for f in builtins() {
            for side in [Side::Left, Side::Middle, Side::Right] {
                let lo = f.sigma(n, side, P).unwrap();
                let hi = f.sigma(n, side, 4 * P).unwrap().with_prec(P);
                prop_assert!(lo.ulps_from(&hi) <= 1.0);
            }
            let lo = f.ell(n, P).unwrap();
            let hi = f.ell(n, 4 * P).unwrap().with_prec(P);
            prop_assert!(lo.ulps_from(&hi) <= 1.0);
        }
    }

    #[test]
    fn iterate_satisfies_equation_on_positive_part(t in 0.01f64..2.5, k in -2i32..3) {
        let f = freud(&k.to_string());
        let traj = iterate(&f, &RealP::zero(P), &real(t), 40, P).unwrap();
        let last = traj.termination.last_positive();
        prop_assume!(last >= 2);
        let positive = Trajectory::from_values(traj.x[..=last].to_vec(), P, f.id());
        let r = residual(&positive, &f).unwrap();
        prop_assert!(r <= RealP::one(P).ulp() * 8, "residual {}", r);
    }

    #[test]
    fn doubling_precision_reproduces_prefix(t in 0.05f64..2.0) {
        let f = freud("0");
        let s = format!("{t}");
        let lo = iterate(&f, &RealP::zero(P), &RealP::parse(&s, P).unwrap(), 60, P).unwrap();
        let hi = iterate(&f, &RealP::zero(2 * P), &RealP::parse(&s, 2 * P).unwrap(), 60, 2 * P).unwrap();
        // Agreement holds until the low-precision error (≈ 3.73^n ulp) reaches the leading bits.
        let trusted = lo.len().min(hi.len()).min(40);
        for n in 1..trusted {
            let tolerance = RealP::pow2(-(P as i32) + (2 * n) as i32 + 8, P) * lo.x[n].abs();
            prop_assert!((&lo.x[n] - &hi.x[n].with_prec(P)).abs() <= tolerance, "n = {}", n);
        }
    }

    #[test]
    fn classification_is_crisp(t in 0.01f64..3.0) {
        let c = classify(&freud("0"), &RealP::zero(P), &real(t), 20, P).unwrap();
        match c.outcome {
            Outcome::TooSmall(m) => prop_assert!(m % 2 == 1 && m >= 3),
            Outcome::TooLarge(m) => prop_assert!(m % 2 == 0 && m >= 2),
            Outcome::Survived(n) => prop_assert_eq!(n, 20),
        }
    }

    #[test]
    fn scan_is_monotone(mut grid in prop::collection::vec(0.5f64..0.9, 2..40)) {
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let grid: Vec<RealP> = grid.into_iter().map(real).collect();
        let res = scan(&freud("0"), &RealP::zero(P), &grid, 60, P, Some(2)).unwrap();
        let mut seen_large = false;
        for p in &res.points {
            match p.classification.as_ref().unwrap().outcome {
                Outcome::TooLarge(_) => seen_large = true,
                Outcome::TooSmall(_) => prop_assert!(!seen_large, "TooLarge left of TooSmall"),
                Outcome::Survived(_) => {}
            }
        }
    }

    #[test]
    fn exactly_one_condition(side in 0u32..300, mid in 1u32..300, n in 1usize..500) {
        let f = CoefficientFamily::constant_sigmas(&format!("{}", side as f64 / 100.0), &format!("{}", mid as f64 / 100.0)).unwrap();
        let star = dp1::uniqueness::check_star(&f, n).unwrap();
        let dagger = dp1::uniqueness::check_dagger(&f, n).unwrap();
        prop_assert!(!(star && dagger));
        let expected = if star { Condition::Star } else if dagger { Condition::Dagger } else { Condition::Neither };
        prop_assert_eq!(condition_at(&f, n).unwrap(), expected);
    }

    #[test]
    fn lemma_mechanism(start in -1000i64..1000, mut diffs in prop::collection::vec(-50i64..=0, 2..40)) {
        diffs.sort();
        let mut omega = vec![RealP::from_int(start, 64)];
        for d in &diffs {
            let next = omega.last().unwrap() + &RealP::from_int(*d, 64);
            omega.push(next);
        }
        let r = lemma_nonincreasing(&omega).unwrap();
        prop_assert!(r.convex_on_window && r.differences_nondecreasing && r.final_difference_nonpositive);
        prop_assert!(r.nonincreasing);
    }

    #[test]
    fn predicted_root_properties(p in 0u32..400, s in 1u32..400, q in -400i32..400) {
        let params = LimitParams::new(
            RealP::from_int(p as i64, P) / 100,
            RealP::from_int(p as i64, P) / 100,
            RealP::from_int(s as i64, P) / 100,
            RealP::from_int(q as i64, P) / 100,
        ).unwrap();
        let t = predicted_limit_positive(&params);
        prop_assert!(t.is_positive());
        // Substitution evaluated wide, in ulps of the largest term.
        let w = 2 * P;
        let (a, q, tw) = (params.quadratic_coefficient().with_prec(w), params.q.with_prec(w), t.with_prec(w));
        let (quad, lin) = (&a * &tw.square(), &q * &tw);
        let scale = quad.abs().max(&lin.abs()).max(&RealP::one(w)).with_prec(P);
        let residual = (&quad + &lin - 1).abs();
        prop_assert!(residual <= scale.ulp() * 4, "residual {}", residual);
        let wide = LimitParams::new(
            params.p_plus.with_prec(4 * P),
            params.p_minus.with_prec(4 * P),
            params.sigma0.with_prec(4 * P),
            params.q.with_prec(4 * P),
        ).unwrap();
        prop_assert!(t.ulps_from(&predicted_limit_positive(&wide).with_prec(P)) <= 2.0);

        let flipped = predicted_limit_positive(&params.with_q(-&params.q));
        prop_assert!(predicted_limit_negative(&params).ulps_from(&-flipped) <= 2.0);

        let bigger = predicted_limit_positive(&params.with_q(&params.q + &RealP::one(P)));
        prop_assert!(bigger < t);
    }
}

#[test]
fn lemma_violation_index() {
    // ω = (0, 0, 5, 0, 0): 2ω_3 = 10 > 0, the first failure.
    let omega: Vec<RealP> = [0, 0, 5, 0, 0].iter().map(|&v| RealP::from_int(v, 64)).collect();
    assert_eq!(lemma_nonincreasing(&omega).unwrap().first_violation, Some(3));
}

#[test]
fn bracket_validity_and_convergence() {
    let f = freud("0");
    let x0 = RealP::zero(P);
    let sol = solve(&f, &x0, 1e-30, &Policy::default()).unwrap();
    assert_eq!(sol.inconsistencies, 0);
    let initial = RealP::from_int(2, P);
    let mut previous = initial.clone();
    for (k, e) in sol.trace.iter().enumerate() {
        if e.lo.is_positive() {
            let c = classify(&f, &x0, &e.lo, e.steps, e.precision_bits).unwrap();
            assert!(matches!(c.outcome, Outcome::TooSmall(_) | Outcome::Survived(_)));
        }
        let c = classify(&f, &x0, &e.hi, e.steps, e.precision_bits).unwrap();
        assert!(matches!(c.outcome, Outcome::TooLarge(_) | Outcome::Survived(_)));
        let width = &e.hi - &e.lo;
        assert!(width <= previous);
        assert!(width <= &initial * &RealP::pow2(-(k as i32 + 1), P));
        previous = width;
    }
}

#[test]
fn deeper_survival() {
    let f = freud("0");
    let x0 = RealP::zero(P);
    for d in [10, 20, 30] {
        let tol = 10f64.powi(-d);
        let sol = solve(&f, &x0, tol, &Policy::default()).unwrap();
        let steps = 400;
        let prec = 1024;
        let depth = |t: &RealP| iterate(&f, &x0, &t.with_prec(prec), steps, prec).unwrap().termination.last_positive();
        let star = depth(&sol.x1_star);
        let offset = RealP::from_f64(10.0 * tol, prec);
        for t in [&sol.x1_star.with_prec(prec) - &offset, &sol.x1_star.with_prec(prec) + &offset] {
            assert!(star > depth(&t), "tol 1e-{d}: {star} vs {}", depth(&t));
        }
    }
}

#[test]
fn parity_soundness_on_certified_families() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for k in ["0", "1", "3"] {
        let f = freud(k);
        let x0 = RealP::zero(P);
        let wide = solve(&f, &x0, 1e-12, &Policy::default()).unwrap();
        let tight = solve(&f, &x0, 1e-30, &Policy::default()).unwrap();
        let width = wide.bracket.width();
        for _ in 0..40 {
            let t = real(rng.gen_range(0.01..3.0));
            let below = t < &tight.x1_star - &width;
            let above = t > &tight.x1_star + &width;
            if !below && !above {
                continue;
            }
            let c = classify(&f, &x0, &t, 200, 512).unwrap();
            assert!(c.reliable);
            match c.outcome {
                Outcome::TooSmall(m) => assert!(below && m % 2 == 1),
                Outcome::TooLarge(m) => assert!(above && m % 2 == 0),
                Outcome::Survived(_) => panic!("{t} survived 200 steps"),
            }
        }
    }
}

#[test]
fn certified_brackets_intersect() {
    let x0 = RealP::zero(P);
    for f in [freud("0"), freud("2"), CoefficientFamily::constant_sigmas("0.25", "1").unwrap()] {
        assert_eq!(verdict(&f, &x0, 200).unwrap().verdict, Verdict::UniqueCertified);
        let a = solve(&f, &x0, 1e-8, &Policy::default()).unwrap();
        let b = solve(&f, &x0, 1e-25, &Policy::default()).unwrap();
        assert!(a.bracket.lo <= b.bracket.hi && b.bracket.lo <= a.bracket.hi);
    }
}

#[test]
fn certified_trajectories_respect_apriori_bound() {
    let x0 = RealP::zero(P);
    for k in ["0", "2", "-1"] {
        let f = freud(k);
        let sol = solve(&f, &x0, 1e-30, &Policy::default()).unwrap();
        let traj = sol.trajectory(&f, &x0).unwrap();
        for n in 2..traj.len() {
            let u = apriori_upper_bound(&f, n, traj.precision_bits).unwrap();
            assert!(traj.x[n] <= &u + &(u.ulp() * 4), "K = {k}, n = {n}");
        }
    }
}

#[test]
fn scaled_window_is_finite() {
    let f = freud("0");
    let x0 = RealP::zero(P);
    let sol = solve(&f, &x0, 1e-20, &Policy::default()).unwrap();
    let traj = sol.trajectory(&f, &x0).unwrap();
    let params = dp1::asymptotics::limit_params(&f, &LimitMode::ClosedForm, P).unwrap();
    let rep = convergence_report(&traj, &f, &params, Some(sol.bracket.certified_depth)).unwrap();
    assert!(rep.window_min.is_positive());
    assert!(rep.window_max.to_f64().is_finite());
}

#[test]
fn quadrature_scaling_law() {
    // x₁(c, K) = c^{−1/2} x₁(1, K c^{−1/2}).
    for (c, k) in [("4", "0"), ("2", "-2"), ("0.5", "1"), ("9", "3"), ("0.25", "-0.5")] {
        let c = RealP::parse(c, P).unwrap();
        let k = RealP::parse(k, P).unwrap();
        let root_c = c.sqrt().unwrap();
        let lhs = x1_quadrature(&c, &k, 1e-25, P).unwrap().value;
        let rhs = x1_quadrature(&RealP::one(P), &(&k / &root_c), 1e-25, P).unwrap().value / &root_c;
        assert!((&lhs - &rhs).abs().to_f64() <= 1e-24, "c = {c}, K = {k}");
    }
}

#[test]
fn quadrature_error_estimate_is_honest() {
    let exact = freud_x1_closed_form(P).unwrap();
    for d in [8, 12, 16, 20, 24] {
        let q = x1_quadrature(&RealP::one(P), &RealP::zero(P), 10f64.powi(-d), P).unwrap();
        let err = (&q.value - &exact).abs();
        assert!(err <= q.est_error, "tol 1e-{d}: error {err} > estimate {}", q.est_error);
    }
}

#[test]
fn shooting_matches_quadrature_with_rho() {
    let x0 = RealP::zero(P);
    for (c, k, rho) in [("1", "0", "2"), ("1", "1", "0.5"), ("3", "-1", "-0.5")] {
        let f = CoefficientFamily::freud(c, k, rho).unwrap();
        let sol = solve(&f, &x0, 1e-14, &Policy::default()).unwrap();
        let (c, k, rho) = (RealP::parse(c, P).unwrap(), RealP::parse(k, P).unwrap(), RealP::parse(rho, P).unwrap());
        let q = x1_quadrature_rho(&c, &k, &rho, 1e-20, P).unwrap();
        assert!((&sol.x1_star - &q.value).abs().to_f64() < 1e-12, "{} vs {}", sol.x1_star, q.value);
    }
}
