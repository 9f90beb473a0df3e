mod common;

use common::{random_feasible, rel, rng};
use proptest::prelude::*;
use selectorate_core::model::{
    afoc_residual, credible_challenger_value, dz_dg_select, efoc_residual, incumbent_stream_value, select_residual,
    z_from_budget, z_from_select,
};
use selectorate_core::{
    solve, solve_asymmetric, solve_challenger, solve_equal, solve_general, Allocation, FunctionFamily,
    GeneralRegimeSpec, PolityParams, Regime,
};

fn polity() -> impl Strategy<Value = (PolityParams, FunctionFamily)> {
    (
        1_000.0..20_000.0f64,
        1.0..2.0f64,
        0.001..0.9f64,
        0.0..5_000.0f64,
        0.1..0.9f64,
        50.0..500.0f64,
        0.05..0.95f64,
        (0.3..0.7f64, 0.3..0.7f64, 0.3..0.7f64),
    )
        .prop_map(|(s, n_mult, w_frac, r_base, tax, price, delta, (av, au, ap))| {
            let params = PolityParams {
                n_residents: s * n_mult,
                selectorate: s,
                coalition: (s * w_frac).max(1.0),
                base_revenue: r_base,
                tax_rate: tax,
                public_price: price,
                discount: delta,
            };
            (params, FunctionFamily { v_exponent: av, u_exponent: au, phi_exponent: ap })
        })
        .prop_filter("challenger program must be solvable", |(p, f)| solve_challenger(p, f).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn select_inversion_round_trips((p, f) in polity(), t in 0.0..1.0f64) {
        let b = solve_challenger(&p, &f).unwrap();
        let g = t * f.v_fn().inverse(b.offer_value);
        let z = z_from_select(&p, &f, g, &b).unwrap();
        let r = select_residual(&p, &f, &Allocation::new(g, z), &b).unwrap();
        prop_assert!(r.abs() <= 1e-9 * b.offer_value.max(1.0), "residual {}", r);
    }

    #[test]
    fn afoc_equals_efoc_when_coalition_is_selectorate(
        (p, f) in polity(), g in 1e-3..1e4f64, z in 1e-3..1e3f64,
    ) {
        let p = PolityParams { coalition: p.selectorate, ..p };
        let a = Allocation::new(g, z);
        let d = afoc_residual(&p, &f, &a).unwrap() - efoc_residual(&p, &f, &a).unwrap();
        prop_assert!(d.abs() <= 1e-12);
    }

    #[test]
    fn retention_condition_is_stream_minus_credible_offer(
        (p, f) in polity(), g in 0.0..2e3f64, z in 0.0..1e2f64,
    ) {
        let b = solve_challenger(&p, &f).unwrap();
        let a = Allocation::new(g, z);
        let stream_gap = incumbent_stream_value(&p, &f, &a).unwrap() - credible_challenger_value(&p, &f, &b, &a).unwrap();
        let select = select_residual(&p, &f, &a, &b).unwrap();
        let scale = incumbent_stream_value(&p, &f, &a).unwrap().max(b.offer_value).max(1.0);
        prop_assert!((stream_gap - select).abs() <= 1e-12 * scale);
        if select.abs() > 1e-9 * scale {
            prop_assert_eq!(stream_gap > 0.0, select > 0.0);
        }
    }

    #[test]
    fn budget_curve_is_concave_with_maximum_at_self_financing_level((p, f) in polity(), a in 0.0..5e3f64, b in 0.0..5e3f64) {
        let za = z_from_budget(&p, &f, a).unwrap();
        let zb = z_from_budget(&p, &f, b).unwrap();
        let zm = z_from_budget(&p, &f, 0.5 * (a + b)).unwrap();
        prop_assume!((a - b).abs() > 1e-3);
        prop_assert!(zm > 0.5 * (za + zb) - 1e-9 * (za.abs() + zb.abs()));

        let ap = f.phi_exponent;
        let peak = (p.tax_base() * ap / p.public_price).powf(1.0 / (1.0 - ap));
        let at_peak = z_from_budget(&p, &f, peak).unwrap();
        prop_assert!((p.tax_base() * f.phi_g(peak) - p.public_price).abs() <= 1e-9 * p.public_price);
        for g in [peak * 0.99, peak * 1.01] {
            prop_assert!(z_from_budget(&p, &f, g).unwrap() < at_peak);
        }
    }

    #[test]
    fn select_curve_decreases_and_slope_matches_central_difference((p, f) in polity(), t in 0.05..0.95f64) {
        let b = solve_challenger(&p, &f).unwrap();
        let g = t * f.v_fn().inverse(b.offer_value);
        // Truncation error grows like (h·v_g/(V̂ − v(g)))² near the top of the curve.
        let h = 1e-5 * g;
        let lo = z_from_select(&p, &f, g - h, &b).unwrap();
        let hi = z_from_select(&p, &f, g + h, &b).unwrap();
        prop_assert!(hi < lo);
        let fd = (hi - lo) / (2.0 * h);
        let analytic = dz_dg_select(&p, &f, g, &b).unwrap();
        prop_assert!(rel(analytic, fd) <= 1e-6, "analytic {} fd {}", analytic, fd);
    }
}

#[test]
fn solves_are_bit_identical_across_runs() {
    let mut rng = rng(7);
    for _ in 0..20 {
        let (p, f) = random_feasible(&mut rng);
        for regime in [Regime::Equal, Regime::Asymmetric, Regime::General { rho: 0.5 * (1.0 + p.coalition_share()) }] {
            let a = solve(&p, &f, regime).unwrap();
            let b = solve(&p, &f, regime).unwrap();
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
    }
}

/// At each optimum the reported residuals are within tolerance and moving `g` by
/// ±1% along the binding constraint lowers the objective.
#[test]
fn optima_satisfy_first_order_and_perturbation_checks() {
    let mut rng = rng(11);
    for case in 0..100 {
        let (p, f) = random_feasible(&mut rng);

        let e = solve_equal(&p, &f).unwrap();
        assert!(e.diagnostics.converged, "case {case}: {e:?}");
        let value = |g: f64| f.v(g) + f.u(z_from_budget(&p, &f, g).unwrap());
        let g = e.allocation.public_goods;
        for shifted in [0.99 * g, 1.01 * g] {
            if z_from_budget(&p, &f, shifted).unwrap() < 0.0 {
                continue;
            }
            assert!(value(shifted) < value(g), "case {case}: equal regime not a maximum");
        }

        for rho in [1.0, 0.5 * (1.0 + p.coalition_share())] {
            let s = solve_general(&p, &f, &GeneralRegimeSpec { retention_probability: rho }).unwrap();
            assert!(s.diagnostics.converged, "case {case}: {s:?}");
            assert!(s.residuals.foc.abs() <= 1e-10 * (f.v_g(s.allocation.public_goods)).max(1.0));
            assert!(s.residuals.constraint.abs() <= 1e-9 * s.benchmark.offer_value.max(1.0));
            let kappa = 1.0 / selectorate_core::model::retention_weight(&p, rho);
            let leftover = |g: f64| {
                let z = f.u_fn().inverse(kappa * (s.benchmark.offer_value - f.v(g)).max(0.0));
                p.base_revenue + p.tax_base() * f.phi(g) - p.public_price * g - p.coalition * z
            };
            let g = s.allocation.public_goods;
            for shifted in [0.99 * g, 1.01 * g] {
                if f.v(shifted) > s.benchmark.offer_value {
                    continue;
                }
                assert!(leftover(shifted) < leftover(g), "case {case} rho {rho}: not a maximum");
            }
        }
    }
}

/// Public goods and discretionary resources order as expected between regimes.
/// (Private goods do not; see the acceptance suite.)
#[test]
fn asymmetric_regime_spends_less_on_public_goods_and_keeps_more() {
    let mut rng = rng(23);
    for case in 0..200 {
        let (p, f) = random_feasible(&mut rng);
        let e = solve_equal(&p, &f).unwrap();
        let a = solve_asymmetric(&p, &f).unwrap();
        let tol = 1e-9 * e.allocation.public_goods;
        assert!(a.allocation.public_goods <= e.allocation.public_goods + tol, "case {case}");
        assert!(a.discretionary_resources >= e.discretionary_resources - 1e-9, "case {case}");
        assert!(a.discretionary_resources >= -1e-9);
    }
}

/// Public goods and discretionary resources move monotonically in `ρ`.
/// Private goods need not: see `private_goods_can_peak_inside_the_continuum`.
#[test]
fn retention_continuum_is_monotone() {
    let mut rng = rng(31);
    for case in 0..20 {
        let (p, f) = random_feasible(&mut rng);
        let floor = p.coalition_share();
        let sols: Vec<_> = (0..21)
            .map(|i| {
                let rho = if i == 20 { 1.0 } else { floor + (1.0 - floor) * i as f64 / 20.0 };
                solve_general(&p, &f, &GeneralRegimeSpec { retention_probability: rho }).unwrap()
            })
            .collect();
        let monotone = |xs: Vec<f64>| {
            xs.windows(2).all(|w| w[1] <= w[0] + 1e-9 * w[0].abs())
                || xs.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs())
        };
        assert!(monotone(sols.iter().map(|s| s.allocation.public_goods).collect()), "case {case}");
        let d: Vec<f64> = sols.iter().map(|s| s.discretionary_resources).collect();
        assert!(d.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0)), "case {case}: {d:?}");
    }
}

#[test]
fn private_goods_can_peak_inside_the_continuum() {
    let p = PolityParams {
        n_residents: 5621.30444960132,
        selectorate: 2931.069626685892,
        coalition: 666.3378082565158,
        base_revenue: 3706.5878797023956,
        tax_rate: 0.5376557251172258,
        public_price: 378.01609116149876,
        discount: 0.6081420486002939,
    };
    let f = FunctionFamily {
        v_exponent: 0.5272825693825482,
        u_exponent: 0.5371510755517748,
        phi_exponent: 0.4527037467235594,
    };
    let z = |rho: f64| {
        solve_general(&p, &f, &GeneralRegimeSpec { retention_probability: rho }).unwrap().allocation.private_goods
    };
    let floor = p.coalition_share();
    let mid = floor + 0.3 * (1.0 - floor);
    assert!(z(mid) > z(floor) && z(mid) > z(1.0));
}
