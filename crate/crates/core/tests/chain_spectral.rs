use mixprofile::chain::{check_reversible, tv_distance, Chain, Distribution};
use mixprofile::scalar::{rational, Rational};
use mixprofile::spectral::{lemma1_sandwich, main_term, symmetric_eigendecomposition, typical_tv_approx};
use mixprofile::verify::{lazy_cycle, random_reversible_chain};
use mixprofile::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn chain_from_seed(seed: u64, size: usize) -> Chain<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    random_reversible_chain(&mut rng, size).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_tv_matches_evolution(seed in any::<u64>(), size in 2usize..10, t in 0u64..40, x_raw in 0usize..10) {
        let chain = chain_from_seed(seed, size);
        let x = x_raw % size;
        let es = symmetric_eigendecomposition(&chain).unwrap();
        prop_assert!(es.orthonormality_defect() < 1e-9);
        prop_assert!(es.kernel_residual(&chain) < 1e-9);
        let direct = tv_distance(&chain.evolve(x, t).unwrap(), chain.stationary()).unwrap();
        prop_assert!((direct - es.spectral_tv(x, t)).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&direct));
    }

    #[test]
    fn sandwich_contains_tv(seed in any::<u64>(), size in 2usize..10, t in 0u64..40, mask in any::<u16>()) {
        let chain = chain_from_seed(seed, size);
        let es = symmetric_eigendecomposition(&chain).unwrap();
        let set: Vec<usize> = (1..size).filter(|i| mask & (1 << i) != 0).collect();
        let tv = tv_distance(&chain.evolve(0, t).unwrap(), chain.stationary()).unwrap();
        let (lo, hi) = lemma1_sandwich(&es, 0, t, &set).unwrap();
        prop_assert!(lo - 1e-9 <= tv && tv <= hi + 1e-9);
    }

    #[test]
    fn random_chains_are_reversible(seed in any::<u64>(), size in 2usize..12) {
        let chain = chain_from_seed(seed, size);
        prop_assert!(check_reversible(&chain, 1e-12).reversible);
    }
}

#[test]
fn full_index_set_is_exact() {
    let chain = lazy_cycle(7).unwrap();
    let es = symmetric_eigendecomposition(&chain).unwrap();
    let all: Vec<usize> = (1..7).collect();
    for t in [0u64, 1, 4, 20] {
        let tv = tv_distance(&chain.evolve(3, t).unwrap(), chain.stationary()).unwrap();
        assert!((main_term(&es, 3, t, &all).unwrap() - tv).abs() < 1e-12);
        let (m, e) = typical_tv_approx(&es, t, &all).unwrap();
        assert!((m - tv).abs() < 1e-12 && e == 0.0);
    }
    assert_eq!(main_term(&es, 0, 5, &[]).unwrap(), 0.0);
    assert!(matches!(main_term(&es, 0, 5, &[0]), Err(Error::Precondition(_))));
}

#[test]
fn exact_two_state_curve() {
    // P = ((1-a, a), (b, 1-b)) from 0: d_TV(t) = a/(a+b) (1-a-b)^t
    let (a, b) = (rational(1, 3), rational(1, 6));
    let one = rational(1, 1);
    let s = a.clone() + b.clone();
    let chain = Chain::new(
        vec![vec![one.clone() - a.clone(), a.clone()], vec![b.clone(), one.clone() - b.clone()]],
        Distribution::new(vec![b.clone() / s.clone(), a.clone() / s.clone()]).unwrap(),
    )
    .unwrap();
    let times: Vec<u64> = (0..12).collect();
    for (t, tv) in chain.tv_profile_exact(0, &times).unwrap() {
        let mut expect: Rational = a.clone() / s.clone();
        for _ in 0..t {
            expect *= one.clone() - s.clone();
        }
        assert_eq!(tv, expect);
    }
}

#[test]
fn invalid_inputs() {
    assert!(Distribution::new(vec![0.5, 0.6]).is_err());
    assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
    assert!(Chain::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]], Distribution::uniform(2).unwrap()).is_err());
    // wrong stationary law
    assert!(Chain::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]], Distribution::uniform(2).unwrap()).is_err());
}
