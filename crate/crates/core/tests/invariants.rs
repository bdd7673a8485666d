use proptest::prelude::*;

use mzk_core::dynamics::{galerkin_rhs, propagate_linear};
use mzk_core::inequality::{kato_ponce_ratio, product_ratio, random_field, strichartz_sample, RandomFieldSpec};
use mzk_core::spectral::{hs_norm, Snapshot};
use mzk_core::EquationParams;

fn draw(seed: u64, band: usize, beta: f64, index: usize) -> mzk_core::SpectralField {
    random_field(&RandomFieldSpec::new(seed, band, beta, index + 1), index)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn galerkin_field_is_l2_orthogonal(seed in any::<u64>(), band in 2usize..7, cut in 1usize..7, amp in 0.1f64..2.0) {
        let n = cut.min(band);
        let u = draw(seed, band, 1.0, 0).scale_real(amp);
        let rhs = galerkin_rhs(n, &u, EquationParams::default()).unwrap();
        let re = rhs.inner(&u).unwrap().re;
        let scale = u.l2_norm().powi(3) * (1.0 + n as f64).powi(3);
        prop_assert!(re.abs() <= 1e-13 * scale, "Re<F(u), u> = {re}");
    }

    #[test]
    fn propagator_preserves_every_hs_norm(seed in any::<u64>(), t in -3.0f64..3.0, s in -1.0f64..3.0) {
        let u = draw(seed, 6, 0.5, 0);
        let (a, b) = (hs_norm(s, &propagate_linear(t, &u)), hs_norm(s, &u));
        prop_assert!((a - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn bilinear_ratios_are_scale_invariant(seed in any::<u64>(), ea in -6i32..6, eb in -6i32..6) {
        let f = draw(seed, 5, 1.0, 0);
        let g = draw(seed, 5, 1.0, 1);
        let (a, b) = (2f64.powi(ea), 2f64.powi(eb));
        let kp = kato_ponce_ratio(&f, &g, 2.0).unwrap().ratio;
        prop_assert_eq!(kato_ponce_ratio(&f.scale_real(a), &g.scale_real(b), 2.0).unwrap().ratio, kp);
        let pr = product_ratio(&f, &g, 2.0).unwrap().ratio;
        prop_assert_eq!(product_ratio(&f.scale_real(a), &g.scale_real(b), 2.0).unwrap().ratio, pr);
    }

    #[test]
    fn commutator_ratio_has_lattice_symmetry(seed in any::<u64>(), flip1 in any::<bool>(), flip2 in any::<bool>(), swap in any::<bool>()) {
        let f = draw(seed, 5, 1.0, 0);
        let g = draw(seed, 5, 1.0, 1);
        // these maps send sample nodes to sample nodes, so even the sampled sup is unchanged
        let act = |u: &mzk_core::SpectralField| mzk_core::SpectralField::from_fn(u.grid(), |k| {
            let mut q = [if flip1 { -k[0] } else { k[0] }, if flip2 { -k[1] } else { k[1] }];
            if swap {
                q.swap(0, 1);
            }
            u.mode(q)
        });
        let a = kato_ponce_ratio(&f, &g, 2.0).unwrap().ratio;
        let b = kato_ponce_ratio(&act(&f), &act(&g), 2.0).unwrap().ratio;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn strichartz_ratio_is_homogeneous(seed in any::<u64>(), e in -8i32..8) {
        let u = draw(seed, 8, 0.0, 0);
        let a = strichartz_sample(3, &u).unwrap().ratio;
        let b = strichartz_sample(3, &u.scale_real(2f64.powi(e))).unwrap().ratio;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn snapshots_round_trip_bitwise(seed in any::<u64>(), band in 0usize..6, t in -10.0f64..10.0) {
        let snap = Snapshot { time: t, lambda: 6.0, s: 2.0, field: draw(seed, band, 1.0, 0) };
        let back = Snapshot::from_bytes(&snap.to_bytes()).unwrap();
        prop_assert_eq!(back, snap);
    }
}

#[test]
fn ensemble_maxima_grow_with_prefix() {
    use mzk_core::inequality::kato_ponce_ensemble;
    let small = kato_ponce_ensemble(&RandomFieldSpec::new(1, 6, 1.0, 10), 2.0).unwrap();
    let large = kato_ponce_ensemble(&RandomFieldSpec::new(1, 6, 1.0, 25), 2.0).unwrap();
    assert_eq!(small.samples[..], large.samples[..10]);
    assert!(large.max_ratio() >= small.max_ratio());
}

#[test]
fn flat_spectrum_amplitude_law() {
    // mean of |û(k)|⟨k⟩^β over many draws should be close to 3/4
    let spec = RandomFieldSpec::new(99, 4, 0.0, 400);
    let mut total = 0.0;
    let mut count = 0.0;
    for i in 0..spec.count {
        for c in random_field(&spec, i).coeffs() {
            total += c.norm();
            count += 1.0;
        }
    }
    assert!((total / count - 0.75).abs() < 0.075);
}
