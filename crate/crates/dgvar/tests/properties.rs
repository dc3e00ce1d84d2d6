//! Randomized invariant checks.

mod common;

use dgvar::bounds::{chernoff_tail_params, decay_params, mgf_domain_edge, psi_tilde};
use dgvar::charfn::{normal_cf, normal_mgf, CharFnStudentT};
use dgvar::linalg::Mat;
use dgvar::model_io::{parse_model, write_model};
use dgvar::spectral::{spectral_transform, DeltaGammaModel, Dist, SpectralData};

use proptest::prelude::*;

fn arb_spd_and_symmetric(p: usize) -> impl Strategy<Value = (Mat, Mat, Vec<f64>)> {
    (
        prop::collection::vec(-1.0f64..1.0, p * p),
        prop::collection::vec(-2.0f64..2.0, p * p),
        prop::collection::vec(-3.0f64..3.0, p),
    )
        .prop_map(move |(a, g, delta)| {
            // sigma = A A' + I is SPD; gamma symmetrized
            let a = Mat::from_row_major(p, &a);
            let mut sigma = a.matmul(&a.transpose());
            for i in 0..p {
                sigma[(i, i)] += 1.0;
            }
            let graw = Mat::from_row_major(p, &g);
            let mut gamma = Mat::zeros(p, p);
            for i in 0..p {
                for j in 0..p {
                    gamma[(i, j)] = 0.5 * (graw[(i, j)] + graw[(j, i)]);
                }
            }
            (sigma, gamma, delta)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_residuals((sigma, gamma, delta) in (1usize..=5).prop_flat_map(arb_spd_and_symmetric)) {
        let model = DeltaGammaModel {
            sigma: sigma.clone(),
            delta,
            gamma_matrix: gamma.clone(),
            theta: 0.0,
            dt: 1.0,
            dist: Dist::Normal,
        };
        let s = spectral_transform(&model).unwrap();
        let c = &s.c_matrix;
        let scale = sigma.frobenius_norm().max(1.0) * gamma.frobenius_norm().max(1.0);
        let r1 = c.matmul(&c.transpose()).sub(&sigma).frobenius_norm();
        prop_assert!(r1 <= 1e-9 * scale);
        let r2 = c.transpose().matmul(&gamma).matmul(c)
            .sub(&Mat::diag(&s.lambda)).frobenius_norm();
        prop_assert!(r2 <= 1e-9 * scale);
        // ordering: descending |lambda|
        for w in s.lambda.windows(2) {
            prop_assert!(w[0].abs() >= w[1].abs());
        }
    }

    #[test]
    fn charfn_hermitian_and_bounded(
        lambda in prop::collection::vec(-3.0f64..3.0, 1..5),
        b in prop::collection::vec(-2.0f64..2.0, 5),
        u in 0.0f64..20.0,
        nu in 2.1f64..50.0,
        x in -5.0f64..5.0,
    ) {
        let b = b[..lambda.len()].to_vec();
        let s = SpectralData::from_parts(lambda, b);
        let f = normal_cf(&s, u);
        let g = normal_cf(&s, -u);
        prop_assert!((f - g.conj()).norm() <= 1e-12);
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        let tcf = CharFnStudentT::new(&s, nu, x);
        let tf = tcf.cf(u);
        prop_assert!((tf - tcf.cf(-u).conj()).norm() <= 1e-12);
        prop_assert!(tf.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn tail_bound_dominates_mgf_chernoff(
        lambda in prop::collection::vec(-2.0f64..2.0, 1..4),
        b in prop::collection::vec(-2.0f64..2.0, 4),
        eps in prop::sample::select(vec![1e-2, 1e-3, 1e-4]),
        y in 0.1f64..50.0,
    ) {
        let b = b[..lambda.len()].to_vec();
        let s = SpectralData::from_parts(lambda.clone(), b);
        let t = chernoff_tail_params(
            |u| normal_mgf(&s, u), eps, mgf_domain_edge(&s.lambda), None).unwrap();
        // the construction guarantees A y^-alpha >= psitilde(u*) e^(-u* y),
        // the Chernoff envelope at the chosen exponent
        let envelope = psi_tilde(|u| normal_mgf(&s, u), t.u_star) * (-t.u_star * y).exp();
        let poly = (t.a_const.ln() - t.alpha * y.ln()).exp();
        prop_assert!(poly >= envelope * (1.0 - 1e-9),
            "poly {poly} < envelope {envelope} at y={y}");
    }

    #[test]
    fn decay_bound_dominates_cf(
        lambda in prop::collection::vec(0.1f64..3.0, 1..5),
        u in 0.5f64..200.0,
    ) {
        let d = decay_params(&lambda, 1e-3).unwrap();
        // |phi(u)| = prod (1 + lambda_j^2 u^2)^(-1/4) for b = 0, which the
        // subset bound dominates (extra factors only shrink the modulus)
        let b_zero = vec![0.0; lambda.len()];
        let s = SpectralData::from_parts(lambda, b_zero);
        let cf_mod = normal_cf(&s, u).norm();
        let bound = (d.b_const.ln() - d.beta * (u / (2.0 * std::f64::consts::PI)).ln()).exp();
        prop_assert!(cf_mod <= bound * (1.0 + 1e-9),
            "cf {cf_mod} > bound {bound} at u={u}");
    }

    #[test]
    fn model_json_round_trip((sigma, gamma, delta) in (1usize..=4).prop_flat_map(arb_spd_and_symmetric)) {
        let model = DeltaGammaModel {
            sigma,
            delta,
            gamma_matrix: gamma,
            theta: 0.125,
            dt: 0.5,
            dist: Dist::StudentT { nu: 7.5 },
        };
        let json = write_model(&model);
        let back = parse_model(&json).unwrap();
        prop_assert_eq!(model.delta.clone(), back.delta.clone());
        for i in 0..model.dim() {
            for j in 0..model.dim() {
                prop_assert_eq!(model.sigma[(i, j)].to_bits(), back.sigma[(i, j)].to_bits());
                prop_assert_eq!(
                    model.gamma_matrix[(i, j)].to_bits(),
                    back.gamma_matrix[(i, j)].to_bits()
                );
            }
        }
    }
}
