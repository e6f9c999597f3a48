use std::f64::consts::FRAC_1_SQRT_2;

use qdac_core::dac::DacInstance;
use qdac_core::discord::{
    computational_kets, conditional_entropy, discord_bruteforce, discord_theta_family, mutual_information,
    partial_transpose, qubit_basis, rho_tilde, BipartiteSplit, BruteforceGrid,
};
use qdac_core::qstate::{linalg, DenseState, Mat2, RegisterLayout};
use qdac_core::scalar::{c, C};

fn bell() -> DenseState<f64> {
    let h = FRAC_1_SQRT_2;
    DenseState::from_ket(
        RegisterLayout::plain(2),
        &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
    )
    .unwrap()
}

fn kets(basis: [[C<f64>; 2]; 2]) -> Vec<Vec<C<f64>>> {
    basis.iter().map(|k| k.to_vec()).collect()
}

#[test]
fn theta_family_matches_full_search_on_smallest_instance() {
    let rho = rho_tilde::<f64>(&DacInstance::clock(1, 1).unwrap()).unwrap();
    let split = BipartiteSplit::ancillas_measured(rho.layout()).unwrap();
    let full = discord_bruteforce(&rho, &split, BruteforceGrid::default()).unwrap();
    let family = discord_theta_family::<f64>(1, 1).unwrap();
    assert!((full.conditional_min - family.conditional_min).abs() <= 1e-5);
    assert!((full.discord - family.discord).abs() <= 1e-5);
}

#[test]
fn theta_family_upper_bounds_full_search() {
    for (m, n) in [(2, 1), (3, 1)] {
        let rho = rho_tilde::<f64>(&DacInstance::clock(m, n).unwrap()).unwrap();
        let split = BipartiteSplit::ancillas_measured(rho.layout()).unwrap();
        let grid = BruteforceGrid {
            theta_points: 32,
            phi_points: 8,
            refinement_rounds: 2,
        };
        let full = discord_bruteforce(&rho, &split, grid).unwrap();
        let family = discord_theta_family::<f64>(m, n).unwrap();
        assert!(family.conditional_min >= full.conditional_min - 1e-9);
    }
}

#[test]
fn reports_satisfy_their_identity() {
    let rho = rho_tilde::<f64>(&DacInstance::from_fn(2, 2, |k| [0, 3, 1, 0][k]).unwrap()).unwrap();
    let split = BipartiteSplit::ancillas_measured(&RegisterLayout::new(2, 2, 2).unwrap());
    assert!(split.is_ok());
    let layout = *rho.layout();
    let one = BipartiteSplit::new(layout.total(), vec![layout.a(1)], "A1").unwrap();
    let r = discord_bruteforce(&rho, &one, BruteforceGrid::default()).unwrap();
    assert!((r.discord - (r.s_a - r.s_ab + r.conditional_min)).abs() < 1e-12);
    assert!(r.discord >= -1e-9);
    // discord never exceeds the mutual information
    assert!(r.discord <= mutual_information(&rho, &one).unwrap() + 1e-9);
}

#[test]
fn conditional_entropy_vanishes_for_pure_branches() {
    let rho = bell();
    let split = BipartiteSplit::new(2, vec![0], "A").unwrap();
    assert!(conditional_entropy(&rho, &split, &computational_kets(1)).unwrap().abs() < 1e-12);
    let x = kets(qubit_basis(std::f64::consts::FRAC_PI_4, 0.0));
    assert!(conditional_entropy(&rho, &split, &x).unwrap().abs() < 1e-12);
    // a maximally mixed partner stays mixed under any measurement
    let mixed = DenseState::product(
        RegisterLayout::plain(2),
        &[Mat2::projector(false), Mat2::maximally_mixed()],
    )
    .unwrap();
    let s = conditional_entropy(&mixed, &split, &x).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
}

#[test]
fn conditional_entropy_is_non_negative_over_angles() {
    let rho = rho_tilde::<f64>(&DacInstance::clock(2, 1).unwrap()).unwrap();
    let layout = *rho.layout();
    let split = BipartiteSplit::new(layout.total(), vec![layout.a(0)], "A").unwrap();
    for i in 0..40 {
        let theta = i as f64 * 0.04;
        let s = conditional_entropy(&rho, &split, &kets(qubit_basis(theta, 0.3 * i as f64))).unwrap();
        assert!(s >= -1e-12);
    }
}

#[test]
fn partial_transpose_controls() {
    let pt = partial_transpose(&bell(), &[1]).unwrap();
    let eig = linalg::hermitian_eigenvalues(&pt);
    assert!((eig[0] + 0.5).abs() < 1e-12);
    let diag = DenseState::<f64>::product(
        RegisterLayout::plain(2),
        &[Mat2::maximally_mixed(), Mat2::projector(true)],
    )
    .unwrap();
    assert_eq!(&partial_transpose(&diag, &[0]).unwrap(), diag.matrix());
}

fn mixture(a: [Mat2<f64>; 2], b: [Mat2<f64>; 2]) -> DenseState<f64> {
    let lay = RegisterLayout::plain(2);
    let x = DenseState::product(lay, &a).unwrap();
    let y = DenseState::product(lay, &b).unwrap();
    let m = (x.matrix() + y.matrix()).mapv(|z| z * 0.5);
    DenseState::new(lay, m).unwrap()
}

#[test]
fn two_qubit_reduction_of_the_clock_state() {
    // L and R are perfectly correlated at m = n = 1, leaving one classical
    // flag next to the ancilla
    let rho = mixture(
        [Mat2::projector(false), Mat2::plus()],
        [Mat2::projector(true), Mat2::projector(false)],
    );
    let split = BipartiteSplit::new(2, vec![1], "A").unwrap();
    let r = discord_bruteforce(&rho, &split, BruteforceGrid::default()).unwrap();
    assert!((r.discord - 0.201752).abs() < 1e-5);
}

#[test]
fn real_states_need_no_phase_search() {
    let rho = mixture(
        [Mat2::plus(), Mat2::plus()],
        [Mat2::projector(false), Mat2::projector(false)],
    );
    let split = BipartiteSplit::new(2, vec![0], "A").unwrap();
    let full = discord_bruteforce(&rho, &split, BruteforceGrid::default()).unwrap();
    let real = discord_bruteforce(
        &rho,
        &split,
        BruteforceGrid {
            phi_points: 1,
            ..BruteforceGrid::default()
        },
    )
    .unwrap();
    assert!((full.discord - real.discord).abs() < 1e-6);
    assert!(full.discord > 1e-3);
}
