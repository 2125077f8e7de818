use gdma::ber::{confidence_interval, run_point, sweep, to_csv, SimulationSpec, StopRule};
use gdma::cyclotomic::from_db;
use gdma::link::{LinkConfig, Mode};
use gdma::modem::{bpsk_ber, count_symbol_errors, Constellation, Modulation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(link: LinkConfig, points: &[f64], stop: StopRule) -> SimulationSpec {
    let mut s = SimulationSpec::new(link, points.to_vec());
    s.stop = stop;
    s
}

#[test]
fn single_user_bpsk_matches_q() {
    let stop = StopRule { min_bits: 1_000_000, min_errors: 0, max_bits: 1_000_000 };
    let s = spec(LinkConfig::single_user(Modulation::Bpsk), &[0.0, 2.0, 4.0], stop);
    for r in sweep(&s).unwrap() {
        let q = bpsk_ber(from_db(r.ebn0_db));
        let sigma = (q * (1.0 - q) / r.bits_observed as f64).sqrt();
        assert!((r.ber - q).abs() <= 3.0 * sigma, "{} dB: {} vs {q}", r.ebn0_db, r.ber);
        assert_eq!(r.ser, r.ber);
    }
}

#[test]
fn wilson_against_exact_binomial() {
    // exact two-sided coverage of the Wilson interval at small n
    for (n, p) in [(20u64, 0.1f64), (50, 0.3), (100, 0.05)] {
        let mut cover = 0.0;
        let mut pmf = (1.0 - p).powi(n as i32);
        for k in 0..=n {
            let (lo, hi) = confidence_interval(k, n);
            if lo <= p && p <= hi {
                cover += pmf;
            }
            pmf *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
        }
        assert!(cover > 0.9, "n={n} p={p}: {cover}");
    }
    let (lo, hi) = confidence_interval(500, 1_000_000);
    assert!(lo < 5e-4 && 5e-4 < hi && hi - lo < 1e-4);
}

#[test]
fn interval_covers_known_rate() {
    let c = Constellation::new(Modulation::Qpsk);
    let esn0 = from_db(4.0);
    let q0 = c.theoretical_ser(esn0);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let covered = (0..100)
        .filter(|_| {
            let n = 5_000;
            let e = count_symbol_errors(&c, esn0, n, &mut rng);
            let (lo, hi) = confidence_interval(e, n);
            lo <= q0 && q0 <= hi
        })
        .count();
    assert!(covered >= 90, "{covered}/100");
}

#[test]
fn deterministic_across_workers() {
    let stop = StopRule { min_bits: 20_000, min_errors: 50, max_bits: 200_000 };
    let mut s = spec(LinkConfig::gf16(Mode::Fs, Modulation::Qpsk), &[3.0, 6.0], stop);
    s.modes = vec![Mode::Fs, Mode::Cc];
    let a = to_csv(&sweep(&s).unwrap());
    s.workers = 8;
    assert_eq!(a, to_csv(&sweep(&s).unwrap()));
}

#[test]
fn pad_bits_are_not_counted() {
    // 20 channel bits per CC frame do not fill 8-PSK symbols: one pad bit
    let stop = StopRule { min_bits: 3_000, min_errors: 0, max_bits: 3_000 };
    let padded = run_point(&spec(LinkConfig::gf16(Mode::Cc, Modulation::Psk8), &[f64::INFINITY], stop), f64::INFINITY).unwrap();
    let exact = run_point(&spec(LinkConfig::gf16(Mode::Cc, Modulation::Qpsk), &[f64::INFINITY], stop), f64::INFINITY).unwrap();
    assert_eq!(padded.bits_observed, padded.frames * 15);
    assert_eq!(padded.bits_observed, exact.bits_observed);
    assert_eq!(padded.symbols_observed, padded.frames * 7);
    assert_eq!(exact.symbols_observed, exact.frames * 10);
    assert_eq!((padded.bit_errors, exact.bit_errors), (0, 0));
}

#[test]
fn ber_decreases_with_ebn0() {
    let stop = StopRule { min_bits: 30_000, min_errors: 100, max_bits: 300_000 };
    let s = spec(LinkConfig::gf16(Mode::Cc, Modulation::Bpsk), &[2.0, 4.0, 6.0, 8.0], stop);
    let recs = sweep(&s).unwrap();
    for w in recs.windows(2) {
        assert!(w[1].ci_low <= w[0].ci_high && w[1].ber < w[0].ber);
    }
}

#[test]
fn users_are_treated_alike() {
    let stop = StopRule { min_bits: 150_000, min_errors: 0, max_bits: 150_000 };
    for link in [LinkConfig::gf16(Mode::Fs, Modulation::Bpsk), LinkConfig::gi3(Mode::Cc, Modulation::Qpsk)] {
        let r = run_point(&spec(link, &[5.0], stop), 5.0).unwrap();
        let per_user_bits = (r.bits_observed / r.n_users as u64) as f64;
        let sigma = (r.ber * (1.0 - r.ber) / per_user_bits).sqrt();
        for (u, &e) in r.per_user_bit_errors.iter().enumerate() {
            let b = e as f64 / per_user_bits;
            assert!((b - r.ber).abs() <= 5.0 * sigma, "user {u}: {b} vs {}", r.ber);
        }
    }
}
