use fblec::effcap::ec;
use fblec::optimize::{ec_sacrifice_ratio, optimal_eps, OptFlag, UrConstraint};
use fblec::{Link, NetworkConfig, PsiModel};

fn collided(n: u32, snr: f64, theta: f64) -> Link {
    Link::under_collision(&NetworkConfig::new(n, snr, 1000, theta).unwrap()).unwrap()
}

#[test]
fn dense_network_gives_up_half_its_capacity() {
    let c = UrConstraint::new(1e-3).unwrap();
    for theta in [0.001, 0.01] {
        let r = ec_sacrifice_ratio(PsiModel::Exact, &collided(30, 10.0, theta), &c).unwrap();
        assert!((r - 0.5).abs() <= 0.1, "theta {theta}: {r}");
    }
}

#[test]
fn local_maximality_across_scenarios() {
    for n in [1, 3, 8, 20] {
        for theta in [0.002, 0.02, 0.2] {
            let l = collided(n, 2.0, theta);
            let r = optimal_eps(PsiModel::Exact, &l).unwrap();
            assert_eq!(r.flag, OptFlag::Interior);
            for h in [-1e-4, 1e-4] {
                let e = r.eps_star + h;
                if e > 0.0 {
                    assert!(ec(PsiModel::Exact, &l, e).unwrap() <= r.ec_value + 1e-14);
                }
            }
        }
    }
}

#[test]
fn closed_form_optimum_drifts_from_exact() {
    // measured on the collision grid: the expansion roughly doubles ε*
    let mut worst = 0.0_f64;
    for n in [1, 5, 10] {
        let l = collided(n, 2.0, 0.01);
        let a = optimal_eps(PsiModel::Exact, &l).unwrap().eps_star;
        let b = optimal_eps(PsiModel::ClosedForm, &l).unwrap().eps_star;
        assert!(b > a);
        worst = worst.max(b - a);
    }
    assert!(worst > 2e-3 && worst < 0.1, "{worst}");
}
