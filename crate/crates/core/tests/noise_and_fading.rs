use sercm::fading::{
    check_gp_order, default_rho_grid, gp_implies_gq_check, no_universal_order_scan, FadingModel, Relation,
};
use sercm::fixtures;
use sercm::noise::{compound_ser_identity_check, sample_noise, AwgnSer, MixingSpec, NoiseModel};

#[test]
fn gamma_mixing_identity() {
    let c = fixtures::square_qam(16).unwrap();
    let spec = MixingSpec::Gamma { shape: 2.0, scale: 0.5 };
    let r = compound_ser_identity_check(&c, &spec, &AwgnSer::ClosedQam(16), 6.0, 400_000, 3).unwrap();
    assert!(r.z.abs() < 3.0, "{r:?}");
}

#[test]
fn tabulated_oracle_matches_closed_form() {
    let t = AwgnSer::tabulate(&fixtures::cube(), 1e-8).unwrap();
    for rho in [0.3, 2.0, 7.0] {
        let exact = sercm::ser::ser_closed_cube(rho).unwrap().value;
        assert!((t.eval(rho) - exact).abs() < 1e-4 * exact, "rho={rho}");
    }
}

#[test]
fn noise_variance_is_one_over_rho() {
    let z = sample_noise(&NoiseModel::Awgn, 4.0, 2, 200_000, 9).unwrap();
    let var = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
    assert!((var - 0.25).abs() < 0.005, "{var}");
}

#[test]
fn nakagami_pairs_have_no_universal_order() {
    let ms = [0.5, 1.0, 2.0, 4.0];
    let ps = [0.0, 0.25, 0.5, 1.0, 2.0];
    for (i, &a) in ms.iter().enumerate() {
        for &b in &ms[i + 1..] {
            let s = no_universal_order_scan(
                &FadingModel::Nakagami { m: a },
                &FadingModel::Nakagami { m: b },
                &ps,
                &default_rho_grid(),
            )
            .unwrap();
            assert!(s.no_universal_order(), "m={a} vs m={b}: {s:?}");
        }
    }
}

#[test]
fn rician_lt_order_in_k() {
    let grid = default_rho_grid();
    let v = check_gp_order(&FadingModel::Rician { k: 0.0 }, &FadingModel::Rician { k: 5.0 }, 0.0, &grid).unwrap();
    assert_eq!(v.relation, Relation::FirstDominates);
    let rep = gp_implies_gq_check(&FadingModel::Rician { k: 0.0 }, &FadingModel::Rician { k: 5.0 }, 0.0, 0.0, &grid)
        .unwrap();
    assert_eq!(rep.holds, Some(true));
}
