use cpip::analysis::{corr2d, corr_frames, MetricsReport};
use cpip::cipher::{decrypt_image, encrypt_image, process_stream, Frame, ReseedMode};
use cpip::io::read_pnm_file;
use cpip::KeyMaterial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(stem: &str) -> Frame {
    read_pnm_file(
        &std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/data/{stem}.pgm")),
    )
    .unwrap()
}

fn paper_key() -> KeyMaterial {
    KeyMaterial::from_decimal("3.934", "0.5250", 1000).unwrap()
}

#[test]
fn decrypt_equals_encrypt_on_random_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..1000 {
        let w = rng.gen_range(1..40);
        let h = rng.gen_range(1..20);
        let c = if rng.gen() { 3 } else { 1 };
        let mut data = vec![0u8; (w * h) as usize * c as usize];
        rng.fill(&mut data[..]);
        let f = Frame::new(w, h, c, data).unwrap();
        let key =
            KeyMaterial::new(rng.gen_range(3.6..3.99), rng.gen_range(0.01..0.99), 100).unwrap();
        assert_eq!(decrypt_image(&f, &key), encrypt_image(&f, &key));
    }
}

#[test]
fn wrong_key_output_is_decorrelated() {
    let right = paper_key();
    let wrong = KeyMaterial::from_decimal("3.934", "0.5250000000001", 1000).unwrap();
    for stem in ["lena", "mandrill", "cameraman"] {
        let plain = fixture(stem);
        let cipher = encrypt_image(&plain, &right);
        let garbled = decrypt_image(&cipher, &wrong);
        let r = corr2d(garbled.data(), plain.data()).unwrap();
        assert!(r.abs() < 0.05, "{stem}: r = {r}");
        assert_eq!(decrypt_image(&cipher, &right), plain);
    }
}

#[test]
fn cipher_metrics_on_fixtures() {
    for stem in ["lena", "mandrill", "cameraman"] {
        let plain = fixture(stem);
        let report = MetricsReport::compute(&plain, &encrypt_image(&plain, &paper_key())).unwrap();
        assert!(report.entropy_encrypted >= 7.99, "{stem}: {report}");
        assert!(report.corr_plain_cipher.abs() <= 0.02, "{stem}: {report}");
    }
}

#[test]
fn rgb_video_round_trip_both_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let frames: Vec<Frame> = (0..5)
        .map(|_| {
            let mut d = vec![0u8; 33 * 9 * 3];
            rng.fill(&mut d[..]);
            Frame::new(33, 9, 3, d).unwrap()
        })
        .collect();
    for mode in [ReseedMode::Continuous, ReseedMode::PerFrame] {
        let enc = process_stream(&frames, &paper_key(), mode).unwrap();
        assert_eq!(enc.len(), frames.len());
        assert!(enc
            .iter()
            .zip(&frames)
            .all(|(a, b)| a.same_shape(b) && a != b));
        assert_eq!(process_stream(&enc, &paper_key(), mode).unwrap(), frames);
    }
}

#[test]
fn identical_frames_encrypt_differently_per_frame() {
    let f = fixture("cameraman");
    let enc = process_stream(&[f.clone(), f.clone()], &paper_key(), ReseedMode::PerFrame).unwrap();
    let (_, r) = corr_frames(&enc[0], &enc[1]).unwrap();
    assert!(r.abs() < 0.05, "r = {r}");
}
