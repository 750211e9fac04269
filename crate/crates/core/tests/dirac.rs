use polyaxial::sobolev::{dirac_membership, dirac_spectrum, under_refinement};
use polyaxial::*;

#[test]
fn predicate_matches_refinement_stable_finiteness() {
    let a = AlphaParams::new(vec![0.0]).unwrap();
    let g = build_grid(&a, &[40.0], &[200]).unwrap();
    let d = dirac_spectrum(&a, &[1.0]).unwrap();
    let pairs = [
        (-2.0, 1.0),
        (0.0, 1.0),
        (-1.0, 2.0),
        (0.0, 2.0),
        (-1.5, 1.5),
        (0.5, 2.0),
    ];
    let expected = [true, false, true, false, true, false];
    for ((s, p), want) in pairs.into_iter().zip(expected) {
        let idx = SobolevIndex::new(s, p).unwrap();
        let r = under_refinement(&d, &g, |t| sobolev_norm(t, idx)).unwrap();
        assert_eq!(dirac_membership(s, p, &a), want, "({s}, {p})");
        assert_eq!(r.is_stable(), want, "({s}, {p}): {r:?}");
    }
}

#[test]
fn predicate_in_two_dimensions() {
    let a = AlphaParams::new(vec![0.0, 0.5]).unwrap();
    let g = build_grid(&a, &[30.0, 30.0], &[120, 120]).unwrap();
    let d = dirac_spectrum(&a, &[1.0, 0.5]).unwrap();
    for (s, p) in [(-3.0, 2.0), (0.0, 2.0)] {
        let idx = SobolevIndex::new(s, p).unwrap();
        let r = under_refinement(&d, &g, |t| sobolev_norm(t, idx)).unwrap();
        assert_eq!(r.is_stable(), dirac_membership(s, p, &a), "({s}, {p}): {r:?}");
    }
}
