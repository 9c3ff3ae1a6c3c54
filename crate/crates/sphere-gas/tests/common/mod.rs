//! Shared fixtures: explicitly constructed reference configurations and small
//! statistics helpers. These are test oracles, built independently of the
//! library's optimizers and samplers.

use sphere_gas::energy::Configuration;

#[allow(dead_code)]
pub fn antipodal() -> Configuration {
    Configuration::from_coords(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap()
}

#[allow(dead_code)]
pub fn triangle() -> Configuration {
    let rows: Vec<[f64; 3]> = (0..3)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 3.0;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    Configuration::from_coords(&rows).unwrap()
}

#[allow(dead_code)]
pub fn tetrahedron() -> Configuration {
    let s = 1.0 / 3f64.sqrt();
    Configuration::from_coords(&[[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]).unwrap()
}

#[allow(dead_code)]
pub fn octahedron() -> Configuration {
    Configuration::from_coords(&[
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ])
    .unwrap()
}

/// Vertices (0, ±1, ±φ) and cyclic permutations, φ the golden ratio, rescaled
/// to the unit sphere.
#[allow(dead_code)]
pub fn icosahedron() -> Configuration {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut rows = Vec::with_capacity(12);
    for &a in &[-1.0f64, 1.0] {
        for &b in &[-phi, phi] {
            rows.push([0.0, a, b]);
            rows.push([a, b, 0.0]);
            rows.push([b, 0.0, a]);
        }
    }
    Configuration::from_coords(&rows).unwrap()
}

#[allow(dead_code)]
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
