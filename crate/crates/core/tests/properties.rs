//! Randomized invariants of the measures, the QFI and the optimizer.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use approx::assert_abs_diff_eq;
use entangle_core::measures::{
    concurrence, eof, log_negativity, max_concurrence, measure_all, negativity, ree, ReeConfig,
};
use entangle_core::ordering::{classify_pair, MeasureName};
use entangle_core::qfi::{optimize_qfi, qfi, rotate_locally, EulerAngles, EulerAxes, OptimizeConfig};
use entangle_core::states::Field;
use entangle_core::{ComplexMatrix, DensityMatrix, Subsystem, C64};
use proptest::prelude::*;

use common::*;

fn reals(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Real), Just(Field::Complex)]
}

fn no_refine(step: f64) -> OptimizeConfig {
    OptimizeConfig {
        step,
        refine_step: step,
        refine_threshold: 0.0,
        ..OptimizeConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_qubit_measures_in_range(seed in any::<u64>(), f in field()) {
        let rho = random_mixed((2, 2), f, seed);
        let c = concurrence(&rho).unwrap();
        let n = negativity(&rho).unwrap();
        let cmax = max_concurrence(&rho).unwrap();
        let e = eof(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&n));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        prop_assert!(n <= c + 1e-9, "N = {n} > C = {c}");
        prop_assert!(cmax >= c - 1e-9, "Cmax = {cmax} < C = {c}");
        prop_assert!(cmax <= 1.0 + 1e-12);
        let en = log_negativity(&rho).unwrap();
        prop_assert!((en - (2.0 * n + 1.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn measures_invariant_under_local_unitaries(seed in any::<u64>(), xs in reals(16)) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let moved = rho.conjugate_by(&local_unitary(2, 2, &xs)).unwrap();
        for f in [concurrence, negativity, eof] {
            prop_assert!((f(&rho).unwrap() - f(&moved).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn qutrit_negativity_invariant_under_local_unitaries(seed in any::<u64>(), xs in reals(26)) {
        let rho = random_mixed((2, 3), Field::Complex, seed);
        let moved = rho.conjugate_by(&local_unitary(2, 3, &xs)).unwrap();
        prop_assert!((negativity(&rho).unwrap() - negativity(&moved).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn concurrence_and_negativity_are_convex(
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        p in 0.0f64..=1.0,
        pure in any::<bool>(),
    ) {
        let (a, b) = if pure {
            (random_pure((2, 2), s1), random_pure((2, 2), s2))
        } else {
            (random_mixed((2, 2), Field::Complex, s1), random_mixed((2, 2), Field::Complex, s2))
        };
        let mix = DensityMatrix::mixture(&[(p, &a), (1.0 - p, &b)]).unwrap();
        for f in [concurrence, negativity] {
            let bound = p * f(&a).unwrap() + (1.0 - p) * f(&b).unwrap();
            prop_assert!(f(&mix).unwrap() <= bound + 1e-9);
        }
    }

    /// No unitary orbit point beats the spectral maximum.
    #[test]
    fn max_concurrence_bounds_unitary_orbit(seed in any::<u64>(), xs in reals(32)) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let moved = rho.conjugate_by(&unitary(4, &xs)).unwrap();
        let cmax = max_concurrence(&rho).unwrap();
        prop_assert!((max_concurrence(&moved).unwrap() - cmax).abs() < 1e-9);
        prop_assert!(concurrence(&moved).unwrap() <= cmax + 1e-9);
    }

    /// The spectrum placed on `|Φ⁺⟩, |01⟩, |Φ⁻⟩, |10⟩` attains the maximum.
    #[test]
    fn max_concurrence_attained_on_orbit(seed in any::<u64>()) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let l = rho.spectrum().unwrap().eigenvalues;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = [
            [h, 0.0, 0.0, h],
            [0.0, 1.0, 0.0, 0.0],
            [h, 0.0, 0.0, -h],
            [0.0, 0.0, 1.0, 0.0],
        ];
        let mut m = ComplexMatrix::zeros(4, 4);
        for (k, v) in basis.iter().enumerate() {
            let v: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
            m = &m + &ComplexMatrix::outer(&v).scale_real(l[k]);
        }
        let sigma = DensityMatrix::from_computed(&m, 2, 2).unwrap();
        assert_abs_diff_eq!(concurrence(&sigma).unwrap(), max_concurrence(&rho).unwrap(), epsilon = 1e-9);
    }

    /// Collective rotations `U ⊗ U` only rotate the C-matrix.
    #[test]
    fn qfi_invariant_under_collective_rotation(seed in any::<u64>(), xs in reals(8)) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let u = unitary(2, &xs);
        let moved = rho.conjugate_by(&entangle_core::linalg::kron(&u, &u)).unwrap();
        let a = qfi(&rho, 2).unwrap();
        let b = qfi(&moved, 2).unwrap();
        prop_assert!((a.lambda_max - b.lambda_max).abs() < 1e-9);
        let trace = |m: &[[f64; 3]; 3]| m[0][0] + m[1][1] + m[2][2];
        prop_assert!((trace(&a.c_matrix) - trace(&b.c_matrix)).abs() < 1e-9);
    }

    /// Mixing in a vanishing amount of white noise moves the QFI continuously.
    #[test]
    fn qfi_continuous_under_white_noise(seed in any::<u64>(), pure in any::<bool>()) {
        let rho = if pure {
            random_pure((2, 2), seed)
        } else {
            random_mixed((2, 2), Field::Complex, seed)
        };
        let white = DensityMatrix::maximally_mixed(2, 2);
        let noisy = DensityMatrix::mixture(&[(1.0 - 1e-8, &rho), (1e-8, &white)]).unwrap();
        let a = qfi(&rho, 2).unwrap().mean_qfi;
        let b = qfi(&noisy, 2).unwrap().mean_qfi;
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ree_invariant_under_local_unitaries(seed in any::<u64>(), xs in reals(16)) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let moved = rho.conjugate_by(&local_unitary(2, 2, &xs)).unwrap();
        let cfg = ReeConfig::default();
        let a = ree(&rho, &cfg).unwrap();
        let b = ree(&moved, &cfg).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!((a.value - b.value).abs() < 1e-3);
    }

    /// For pure states the REE equals the entropy of either marginal.
    #[test]
    fn ree_of_pure_state_is_marginal_entropy(seed in any::<u64>(), qutrit in any::<bool>()) {
        let dims = if qutrit { (2, 3) } else { (2, 2) };
        let rho = random_pure(dims, seed);
        let marginal = rho.partial_trace(Subsystem::B).unwrap();
        let r = ree(&rho, &ReeConfig::default()).unwrap();
        prop_assert!(r.converged);
        prop_assert!((r.value - entropy(&marginal)).abs() < 1e-3);
    }

    #[test]
    fn ree_bounded_by_negativity_family(seed in any::<u64>()) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let rec = measure_all(&rho, Some(&ReeConfig::default())).unwrap();
        let (r, gap) = (rec.ree.unwrap(), rec.ree_gap.unwrap());
        prop_assert!(r >= 0.0 && gap >= -1e-9);
        // REE never exceeds the entanglement of formation or log-negativity.
        prop_assert!(r - gap <= rec.eof.unwrap() + 1e-6);
        prop_assert!(r - gap <= rec.log_negativity.unwrap() + 1e-6);
    }

    #[test]
    fn optimizer_brackets_original(seed in any::<u64>()) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let res = optimize_qfi(&rho, &OptimizeConfig::default()).unwrap();
        prop_assert!(res.minimized <= res.original && res.original <= res.maximized);
        let at = |angles: &[EulerAngles; 2]| {
            qfi(&rotate_locally(&rho, angles, EulerAxes::Xzx).unwrap(), 2).unwrap().mean_qfi
        };
        prop_assert!((at(&res.max_angles) - res.maximized).abs() < 1e-12);
        prop_assert!((at(&res.min_angles) - res.minimized).abs() < 1e-12);
    }

    /// Halving the step adds grid points, so extrema can only widen.
    #[test]
    fn finer_grid_widens_extrema(seed in any::<u64>()) {
        let rho = random_mixed((2, 2), Field::Complex, seed);
        let coarse = optimize_qfi(&rho, &no_refine(FRAC_PI_2)).unwrap();
        let fine = optimize_qfi(&rho, &no_refine(FRAC_PI_4)).unwrap();
        prop_assert!(fine.maximized >= coarse.maximized - 1e-12);
        prop_assert!(fine.minimized <= coarse.minimized + 1e-12);
    }

    #[test]
    fn classify_pair_is_antisymmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let cfg = ReeConfig::default();
        let a = measure_all(&random_mixed((2, 2), Field::Complex, s1), Some(&cfg)).unwrap();
        let b = measure_all(&random_mixed((2, 2), Field::Complex, s2), Some(&cfg)).unwrap();
        let names = [
            MeasureName::Concurrence,
            MeasureName::MaxConcurrence,
            MeasureName::Negativity,
            MeasureName::Eof,
            MeasureName::Ree,
        ];
        let ab = classify_pair(&a, &b, &names, 1e-6).unwrap();
        let ba = classify_pair(&b, &a, &names, 1e-6).unwrap();
        prop_assert_eq!(ab.flipped(), ba.clone());
        prop_assert_eq!(ab.canonical(), ba.canonical());
    }
}
