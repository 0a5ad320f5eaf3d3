use mixprofile::chain::tv_distance;
use mixprofile::gelfand::{
    ehrenfest_chain, ehrenfest_exact_tv, ehrenfest_exact_tv_rational, ehrenfest_orbit_of, ehrenfest_schedule,
    ehrenfest_step_law, ehrenfest_structure, fourier_inversion, hom_error_term, hom_exact_tv, hom_main_term,
    spherical_fourier_transform,
};
use mixprofile::hypercube::{
    hypercube_binomial_approximation, hypercube_chain, hypercube_exact_tv, hypercube_exact_tv_rational,
    hypercube_profile_point, hypercube_tv_profile,
};
use mixprofile::scalar::{rational, Rational};
use mixprofile::special::gaussian_profile;
use mixprofile::Scalar;
use num_traits::Zero;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn float_and_exact_inversion_agree(n in 1usize..9, m in 1usize..4, t in 0u64..30) {
        let exact = ehrenfest_exact_tv_rational(n, m, t).unwrap().to_f64();
        prop_assert!((ehrenfest_exact_tv(n, m, t).unwrap() - exact).abs() < 1e-12);
        let s = ehrenfest_structure::<f64>(n, m).unwrap();
        let mu = spherical_fourier_transform(&ehrenfest_step_law(n, m), &s).unwrap();
        prop_assert!((hom_exact_tv(&s, &mu, t).unwrap() - exact).abs() < 1e-9);
    }

    #[test]
    fn main_term_with_full_set_is_exact(n in 1usize..7, m in 1usize..4, t in 0u64..12) {
        let s = ehrenfest_structure::<Rational>(n, m).unwrap();
        let mu = spherical_fourier_transform(&ehrenfest_step_law(n, m), &s).unwrap();
        let all: Vec<usize> = (1..=n).collect();
        prop_assert_eq!(hom_main_term(&s, &mu, t, &all).unwrap(), hom_exact_tv(&s, &mu, t).unwrap());
        prop_assert_eq!(hom_error_term(&s, &mu, t, &all).unwrap(), 0.0);
    }
}

#[test]
fn three_balls_two_steps_by_full_chain() {
    let chain = ehrenfest_chain::<Rational>(3, 1).unwrap();
    let orbit = ehrenfest_orbit_of(3, 1).unwrap();
    let full = chain.evolve(0, 2).unwrap();
    let s = ehrenfest_structure::<Rational>(3, 1).unwrap();
    let mu = spherical_fourier_transform(&ehrenfest_step_law(3, 1), &s).unwrap();
    let inv = fourier_inversion(&s, &mu, 2).unwrap();
    for (x, p) in full.probs().iter().enumerate() {
        assert_eq!(*p, inv[orbit[x]]);
    }
}

#[test]
fn four_balls_three_urns_tv() {
    let chain = ehrenfest_chain::<Rational>(4, 2).unwrap();
    for t in 1..=8 {
        let brute = tv_distance(&chain.evolve(0, t).unwrap(), chain.stationary()).unwrap();
        assert_eq!(brute, ehrenfest_exact_tv_rational(4, 2, t).unwrap());
    }
}

#[test]
fn one_extra_urn_is_the_hypercube_kernel() {
    for n in 1..=4 {
        let urn = ehrenfest_chain::<Rational>(n, 1).unwrap();
        let cube = hypercube_chain::<Rational>(n).unwrap();
        for x in 0..urn.size() {
            assert_eq!(urn.row(x), cube.row(x));
        }
    }
}

#[test]
fn hypercube_edges() {
    assert_eq!(hypercube_exact_tv_rational(1, 0).unwrap(), rational(1, 2));
    assert!(hypercube_exact_tv_rational(1, 3).unwrap().is_zero());
    assert_eq!(hypercube_exact_tv_rational(3, 0).unwrap(), rational(7, 8));
}

#[test]
fn hypercube_monotone() {
    for n in [2usize, 5, 17, 40, 64] {
        let times: Vec<u64> = (0..=10 * n as u64).collect();
        let prof = hypercube_tv_profile(n, &times).unwrap();
        for w in prof.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "n={n}");
        }
    }
}

#[test]
fn large_hypercube_points() {
    let p = hypercube_profile_point(4096, 2.0, 1e-3).unwrap();
    assert!(p.exact_tv <= 0.12);
    assert_eq!(p.limit_value, gaussian_profile(2.0));
    let q = hypercube_profile_point(4096, 0.0, 1e-3).unwrap();
    assert!(q.limit_gap() <= 0.03);
    assert!((hypercube_binomial_approximation(4096, 0.0).unwrap() - gaussian_profile(0.0)).abs() < 0.01);
}

#[test]
fn urn_schedule_and_sizes() {
    assert_eq!(ehrenfest_schedule(100, 1, 0.0).unwrap(), (50.0 * 100f64.ln()).round() as u64);
    assert!(ehrenfest_schedule(10, 1, -5.0).is_err());
    assert!(ehrenfest_chain::<f64>(10, 3).is_err());
    assert!(hypercube_exact_tv(0, 1).is_err());
}
