use schurscape::classical::{norm_landscape, ClassicalMap, Ensemble};
use schurscape::model::RotorParams;
use schurscape::phasespace::TorusGrid;

/// Total-variation distance between the histogram of ln<w> and its mirror
/// image under ln<w> -> -ln<w>, on bins symmetric about zero.
fn mirror_tv(values: &[f64], bins: usize) -> f64 {
    let top = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut h = vec![0usize; bins];
    for &v in values {
        let b = (((v + top) / (2.0 * top)) * bins as f64).floor() as usize;
        h[b.min(bins - 1)] += 1;
    }
    let total = values.len() as f64;
    (0..bins).map(|b| (h[b] as f64 - h[bins - 1 - b] as f64).abs()).sum::<f64>() / (2.0 * total)
}

#[test]
fn pt_landscape_histogram_is_nearly_sign_symmetric() {
    let p = RotorParams::pt(1001, 1.1, 0.001).unwrap();
    let grid = TorusGrid::new(200, 200).unwrap();
    let l = norm_landscape(&ClassicalMap::from_params(&p), &grid, 66, &Ensemble::for_dimension(1001, 0)).unwrap();
    let tv = mirror_tv(&l.ln_mean_w.values, 40);
    assert!(tv < 0.05, "mirror TV {tv}");
}

#[test]
fn mirror_tv_of_symmetric_data_is_zero() {
    let v: Vec<f64> = (0..100).map(|i| (i as f64 - 49.5) * 0.1).collect();
    assert!(mirror_tv(&v, 10) < 1e-12);
    let shifted: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    assert!(mirror_tv(&shifted, 10) > 0.9);
}
