use e91_squash::hashing::{BitString, ToeplitzHash};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn collision_rate_at_most_two_to_minus_out() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (in_len, out_len) in [(16, 4), (24, 8), (32, 12)] {
        let x = BitString::random(in_len, &mut rng);
        let mut y = x.clone();
        y.flip(in_len - 1);
        let trials = 20_000;
        let hits = (0..trials)
            .filter(|_| {
                let h = ToeplitzHash::sample(in_len, out_len, &mut rng).unwrap();
                h.hash(&x).unwrap() == h.hash(&y).unwrap()
            })
            .count();
        let bound = 2f64.powi(-(out_len as i32));
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        let freq = hits as f64 / trials as f64;
        assert!(
            freq <= bound + 3.0 * sigma,
            "out_len {out_len}: {hits}/{trials}"
        );
    }
}

#[test]
fn serialized_hash_rebuilds_the_same_matrix() {
    let h = ToeplitzHash::from_seed(300, 40, 99).unwrap();
    let json = serde_json::to_string(&h).unwrap();
    let back: ToeplitzHash = serde_json::from_str(&json).unwrap();
    assert_eq!(back, h);
    assert_eq!(json, r#"{"seed":99,"in_len":300,"out_len":40}"#);
}
