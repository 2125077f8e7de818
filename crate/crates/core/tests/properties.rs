use std::sync::Arc;

use gdma::field::{ExtensionField, FiniteField};
use gdma::gaussian::GaussianField;
use gdma::link::{GdmaLink, LinkConfig, Mode, TransformSpec};
use gdma::modem::Modulation;
use gdma::transcoder::BuiltinCode;
use gdma::transforms::{conjugacy_violation, FourierTransform, GaloisTransform, HartleyTransform};
use gdma::Error;
use proptest::prelude::*;

fn axioms<F: FiniteField>(f: &F) {
    let els = f.elements();
    assert_eq!(els.len() as u64, f.size());
    let (zero, one) = (f.zero(), f.one());
    for &a in &els {
        assert_eq!(f.add(a, zero), a);
        assert_eq!(f.mul(a, one), a);
        assert_eq!(f.add(a, f.neg(a)), zero);
        if a != zero {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), one);
        } else {
            assert!(f.inv(a).is_none());
        }
        for &b in &els {
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            for &c in &els {
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }
}

#[test]
fn field_axioms_exhaustive() {
    axioms(&ExtensionField::with_default_poly(2, 4).unwrap());
    axioms(&ExtensionField::with_default_poly(2, 3).unwrap());
    axioms(&ExtensionField::new(3, 2, &[2, 1, 1]).unwrap());
    axioms(&ExtensionField::new(7, 1, &[4, 1]).unwrap());
    axioms(&GaussianField::new(3).unwrap());
    axioms(&GaussianField::new(7).unwrap());
}

#[test]
fn gaussian_validity() {
    for q in [3, 7, 11] {
        let f = GaussianField::new(q).unwrap();
        assert_eq!(f.size(), (q * q) as u64);
        assert_eq!(f.order_of(f.generator()).unwrap(), (q * q - 1) as u64);
    }
    assert_eq!(GaussianField::new(5).unwrap_err(), Error::MinusOneIsResidue(5));
    assert_eq!(GaussianField::new(13).unwrap_err(), Error::MinusOneIsResidue(13));
    assert_eq!(GaussianField::new(2).unwrap_err(), Error::EvenCharacteristic);
    assert!(GaussianField::new(9).is_err());
}

#[test]
fn builtin_codes_are_prefix_free() {
    for code in [BuiltinCode::APrime, BuiltinCode::B, BuiltinCode::Direct { p: 2, m: 4 }, BuiltinCode::Direct { p: 2, m: 3 }] {
        let c = code.build().unwrap();
        assert!(c.is_instantaneous(), "{}", c.name());
        for a in 0..c.alphabet_size() as u32 {
            for b in 0..c.alphabet_size() as u32 {
                if a != b {
                    let (wa, wb) = (c.word(a).unwrap(), c.word(b).unwrap());
                    assert!(!wb.starts_with(wa), "{}: {a} prefixes {b}", c.name());
                }
            }
        }
    }
    assert!(!BuiltinCode::A.build().unwrap().is_instantaneous());
}

#[test]
fn hartley_identity_and_conjugacy_exhaustive() {
    let f = Arc::new(GaussianField::new(3).unwrap());
    let t = HartleyTransform::new(f.clone(), 8).unwrap();
    let fs = GdmaLink::new(LinkConfig::gi3(Mode::Fs, Modulation::Qpsk)).unwrap();
    let cc = GdmaLink::new(LinkConfig::gi3(Mode::Cc, Modulation::Qpsk)).unwrap();
    let multiplier = cc.partition().unwrap().multiplier();
    for code in 0..3u32.pow(8) {
        let v: Vec<u32> = (0..8).map(|i| code / 3u32.pow(i) % 3).collect();
        let s = t.forward_ground(&v).unwrap();
        let back: Vec<u32> = t.inverse(&s).unwrap().into_iter().map(|x| f.to_ground(x).unwrap()).collect();
        assert_eq!(back, v);
        assert_eq!(conjugacy_violation(f.as_ref(), &s, multiplier), None);
        for link in [&fs, &cc] {
            assert_eq!(link.demux(&link.mux(&v).unwrap().bits).unwrap().users, v);
        }
    }
}

#[test]
fn fourier_cc_with_reciprocal_polynomial() {
    let mut cfg = LinkConfig::gf16(Mode::Cc, Modulation::Bpsk);
    cfg.transform = TransformSpec::Fourier { p: 2, m: 4, poly: Some(vec![1, 0, 0, 1, 1]) };
    assert!(GdmaLink::new(cfg).is_ok());
}

fn gf16_fft() -> (Arc<ExtensionField>, FourierTransform) {
    let f = Arc::new(ExtensionField::with_default_poly(2, 4).unwrap());
    (f.clone(), FourierTransform::new(f, 15).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn fourier_identity_and_conjugacy(v in prop::collection::vec(0u32..2, 15)) {
        let (f, t) = gf16_fft();
        let s = t.forward_ground(&v).unwrap();
        for k in 0..15 {
            prop_assert_eq!(s[2 * k % 15], f.mul(s[k], s[k]));
        }
        let back: Vec<u32> = t.inverse(&s).unwrap().into_iter().map(|x| f.to_ground(x).unwrap()).collect();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn gf16_link_noiseless_identity(v in prop::collection::vec(0u32..2, 15), cc in any::<bool>(), m in 0usize..6) {
        let mode = if cc { Mode::Cc } else { Mode::Fs };
        let link = GdmaLink::new(LinkConfig::gf16(mode, Modulation::ALL[m])).unwrap();
        let frame = link.mux(&v).unwrap();
        let c = link.constellation();
        let rx = c.demodulate(&c.modulate(&frame.bits).samples);
        prop_assert_eq!(link.demux(&rx).unwrap().users, v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn transcoder_round_trip(bits in prop::collection::vec(0u8..2, 0..200), which in 0usize..3) {
        let code = [BuiltinCode::APrime, BuiltinCode::B, BuiltinCode::Direct { p: 2, m: 4 }][which].build().unwrap();
        let t = code.encode_bits(&bits).unwrap();
        let back = code.decode_symbols(&t.symbols).unwrap();
        prop_assert_eq!(&back[..bits.len()], &bits[..]);
        prop_assert!(back[bits.len()..].iter().all(|&b| b == 0));
        prop_assert_eq!(back.len() - bits.len(), t.pad);
    }

    #[test]
    fn field_arith_random_gf9(a in 0u32..9, b in 1u32..9) {
        let f = ExtensionField::new(3, 2, &[2, 1, 1]).unwrap();
        let (x, y) = (f.from_index(a).unwrap(), f.from_index(b).unwrap());
        prop_assert_eq!(f.mul(f.mul(x, y), f.inv(y).unwrap()), x);
        prop_assert_eq!(f.pow(y, 8), f.one());
    }
}
