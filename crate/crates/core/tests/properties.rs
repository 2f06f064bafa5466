use proptest::prelude::*;

use lieqs::cli::{format_matrix, parse_matrix};
use lieqs::maslov::{maslov_dim2, maslov_spectral};
use lieqs::quasistates::{discontinuous_qs, nilpotent_jordan_sp, LieQuasiState};
use lieqs::symplectic::{
    eval_odd_poly, omega_adjoint, random_sp_element, random_symplectic, seeded_rng, skew_symplectic_defect,
    RankOneDescriptor, SpElement, SymplecticSpace,
};
use lieqs::verify::{SuiteReport, Tolerance, VerificationReport};
use lieqs::williamson::{random_semisimple, williamson_decompose};
use lieqs::{DMatrix, DVector};

fn vec_of(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

fn space(n: usize) -> SymplecticSpace {
    SymplecticSpace::new(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_is_antisymmetric_and_bilinear(n in 1usize..4, x in vec_of(6), y in vec_of(6), z in vec_of(6), c in -3.0f64..3.0) {
        let s = space(n);
        let d = s.dim();
        let (x, y, z) = (DVector::from_column_slice(&x[..d]), DVector::from_column_slice(&y[..d]), DVector::from_column_slice(&z[..d]));
        prop_assert!((s.omega(&x, &y).unwrap() + s.omega(&y, &x).unwrap()).abs() <= 1e-12);
        let lhs = s.omega(&(&x * c + &z), &y).unwrap();
        let rhs = c * s.omega(&x, &y).unwrap() + s.omega(&z, &y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn algebra_closed_under_bracket_and_conjugation(n in 1usize..4, seed in any::<u64>()) {
        let s = space(n);
        let mut rng = seeded_rng(seed, 0);
        let a = random_sp_element(s, 1.0, &mut rng);
        let b = random_sp_element(s, 1.0, &mut rng);
        let br = a.matrix() * b.matrix() - b.matrix() * a.matrix();
        prop_assert!(skew_symplectic_defect(&br).unwrap() <= 1e-12);
        let g = random_symplectic(s, 0.3, &mut rng).unwrap();
        let c = a.conjugate(&g).unwrap();
        prop_assert!(skew_symplectic_defect(c.matrix()).unwrap() <= 1e-10);
    }

    #[test]
    fn omega_adjoint_is_an_involution(n in 1usize..4, entries in vec_of(64)) {
        let d = 2 * n;
        let m = DMatrix::from_column_slice(d, d, &entries[..d * d]);
        let back = omega_adjoint(&omega_adjoint(&m).unwrap()).unwrap();
        prop_assert!((back - m).amax() <= 1e-12);
    }

    #[test]
    fn dim2_closed_form_is_odd_and_homogeneous(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, t in 0.01f64..5.0) {
        let v = maslov_dim2(a, b, c);
        prop_assert!((maslov_dim2(-a, -b, -c) + v).abs() <= 1e-12 * (1.0 + v.abs()));
        prop_assert!((maslov_dim2(t * a, t * b, t * c) - t * v).abs() <= 1e-12 * (1.0 + t * v.abs()));
    }

    #[test]
    fn spectral_matches_closed_form_in_dimension_two(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        prop_assume!((a * a + b * c).abs() > 1e-3);
        let m = SpElement::new(DMatrix::from_row_slice(2, 2, &[a, b, c, -a])).unwrap();
        let est = maslov_spectral(&m).unwrap();
        prop_assert!((est.value - maslov_dim2(a, b, c)).abs() <= est.error_bar + 1e-10);
    }

    #[test]
    fn y_and_z_anchor_values(n in 1usize..4, x in vec_of(6), y in vec_of(6)) {
        let s = space(n);
        let d = s.dim();
        let (x, y) = (DVector::from_column_slice(&x[..d]), DVector::from_column_slice(&y[..d]));
        let w = s.omega(&x, &y).unwrap();
        prop_assume!(w.abs() > 1e-2);
        let yv = maslov_spectral(&RankOneDescriptor::y(x.clone(), y.clone()).to_sp().unwrap()).unwrap();
        prop_assert!((yv.value + w.abs()).abs() <= yv.error_bar + 1e-9);
        let zv = maslov_spectral(&RankOneDescriptor::z(x, y).to_sp().unwrap()).unwrap();
        prop_assert!(zv.value.abs() <= zv.error_bar + 1e-9);
    }

    #[test]
    fn spectral_value_is_homogeneous_and_conjugation_invariant(n in 1usize..4, seed in any::<u64>(), t in 0.1f64..3.0) {
        let s = space(n);
        let mut rng = seeded_rng(seed, 1);
        let b = random_semisimple(s, &mut rng).unwrap().element;
        let base = maslov_spectral(&b).unwrap();
        let scaled = maslov_spectral(&b.scaled(t)).unwrap();
        prop_assert!((scaled.value - t * base.value).abs() <= 1e-8 * (1.0 + base.value.abs()));
        let neg = maslov_spectral(&b.scaled(-1.0)).unwrap();
        prop_assert!((neg.value + base.value).abs() <= 1e-8 * (1.0 + base.value.abs()));
        let g = random_symplectic(s, 0.3, &mut rng).unwrap();
        let conj = maslov_spectral(&b.conjugate(&g).unwrap()).unwrap();
        prop_assert!((conj.value - base.value).abs() <= 1e-7 * (1.0 + base.value.abs()));
    }

    #[test]
    fn williamson_round_trip(n in 1usize..5, seed in any::<u64>()) {
        let s = space(n);
        let b = random_semisimple(s, &mut seeded_rng(seed, 2)).unwrap().element;
        let dec = williamson_decompose(&b).unwrap();
        prop_assert!(dec.reconstruction_residual <= 1e-6 * b.norm());
        prop_assert!(dec.symplectic_defect <= 1e-8);
        prop_assert!((dec.assemble() - b.matrix()).amax() <= 1e-6 * b.norm());
    }

    #[test]
    fn discontinuous_state_is_linear_on_its_subspace(n in 1usize..4, p in vec_of(3), q in vec_of(3), c in -2.0f64..2.0) {
        let s = space(n);
        let a = nilpotent_jordan_sp(s).unwrap();
        let z = discontinuous_qs(a.clone(), c).unwrap();
        let x = eval_odd_poly(&a, &p[..n]);
        let y = eval_odd_poly(&a, &q[..n]);
        let sum = x.add(&y).unwrap();
        let lhs = z.evaluate(&sum).unwrap().value;
        let rhs = z.evaluate(&x).unwrap().value + z.evaluate(&y).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-9);
        prop_assert!((z.evaluate(&x).unwrap().value - c * p[0]).abs() <= 1e-9);
    }

    #[test]
    fn matrix_files_round_trip_bit_exactly(n in 1usize..4, entries in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 36)) {
        let d = 2 * n;
        let m = DMatrix::from_column_slice(d, d, &entries[..d * d]);
        let back = parse_matrix(&format_matrix(&m)).unwrap();
        prop_assert!(m.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn reports_round_trip(defects in prop::collection::vec(0.0f64..1.0, 1..20), scale in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let mut r = VerificationReport::new("prop", "custom", Tolerance::Absolute(0.5));
        for d in &defects {
            r.record(*d, &[("scale", scale)]);
        }
        r.set_scalar("scale", scale);
        prop_assert_eq!(r.pass, defects.iter().all(|d| *d <= 0.5));
        let suite = SuiteReport::new("prop", 1, 0, vec![r]);
        prop_assert_eq!(SuiteReport::from_text(&suite.to_text().unwrap()).unwrap(), suite);
    }
}
