use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_vote::masks::{read_gray, read_mask, write_mask};
use spectral_vote::npy::{encode, parse_feature_map, read_feature_map, write_feature_map, Dtype};
use spectral_vote::CliError;
use spectral_vote_core::{BinaryMask, FeatureMap};

#[test]
fn feature_map_round_trips_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<f64> = (0..3 * 5 * 8).map(|_| rng.random_range(-10.0..10.0)).collect();
    let fm = FeatureMap::new(3, 5, 8, data).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.npy");
    write_feature_map(&fm, &path).unwrap();
    let back = read_feature_map(&path).unwrap();
    assert_eq!((back.height(), back.width(), back.channels()), (3, 5, 8));
    assert!(back.data().iter().zip(fm.data()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn f32_payload_widens_exactly() {
    let values: Vec<f64> = (0..2 * 2 * 3).map(|i| (i as f32 * 0.1 - 0.5) as f64).collect();
    let fm = parse_feature_map(&encode(&[2, 2, 3], Dtype::F32, &values)).unwrap();
    assert_eq!(fm.data(), &values[..]);
}

#[test]
fn mask_round_trips_through_pgm() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mask = BinaryMask::from_fn(7, 5, |_, _| rng.random_bool(0.5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.pgm");
    write_mask(&mask, &path).unwrap();
    assert_eq!(read_mask(&path).unwrap(), mask);
    assert!(read_gray(&path).unwrap().values().iter().all(|&v| v == 0 || v == 255));
}

#[test]
fn png_masks_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.png");
    let img = image::GrayImage::from_fn(4, 3, |x, y| image::Luma([if x > y { 200 } else { 100 }]));
    img.save(&path).unwrap();
    let gray = read_gray(&path).unwrap();
    assert_eq!(gray.dims(), (3, 4));
    let mask = read_mask(&path).unwrap();
    assert!(mask.get(0, 1) && !mask.get(1, 1));
}

#[test]
fn missing_file_error_names_the_path() {
    let err = read_feature_map(std::path::Path::new("/nonexistent/feat.npy")).unwrap_err();
    assert!(matches!(err, CliError::Read { .. }));
    assert!(err.to_string().contains("/nonexistent/feat.npy"));
    assert_eq!(err.exit_code(), 1);
}
