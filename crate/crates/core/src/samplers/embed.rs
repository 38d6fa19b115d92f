use rand_distr::{Distribution, Normal};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

/// Time-delay embedding `X_i = (V[iΔ], V[iΔ+τ], ..., V[iΔ+(d−1)τ])` for
/// `i = 0, 1, ...` while the window fits.
pub fn delay_embed(signal: &[f64], d: usize, delta: usize, tau: usize) -> Result<PointCloud> {
    if d == 0 || delta == 0 || tau == 0 {
        return Err(Error::param("delay embedding needs d, delta, tau >= 1"));
    }
    let span = (d - 1) * tau;
    if signal.len() <= span {
        return Err(Error::input(format!(
            "signal has {} samples; the embedding needs at least {}",
            signal.len(),
            span + 1
        )));
    }
    let n = (signal.len() - span - 1) / delta + 1;
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        coords.extend((0..d).map(|j| signal[i * delta + j * tau]));
    }
    PointCloud::from_flat(coords, d, format!("delay/d{d}/delta{delta}/tau{tau}"), 0, Some(1))
}

/// The lattice `{0, 1/(side−1), ..., 1}^d` with iid `N(0, sigma²)` jitter on
/// every coordinate.
pub fn sample_perturbed_grid(d: usize, side: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    if d == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    if side < 2 {
        return Err(Error::param("grid side must be at least 2"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("grid noise sigma must be nonnegative"));
    }
    let total = u32::try_from(d)
        .ok()
        .and_then(|e| side.checked_pow(e))
        .ok_or_else(|| Error::param("grid has too many points"))?;
    let tag = format!("grid/d{d}/side{side}/sigma{sigma}");
    let mut rng = rng::stream(seed, &tag);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::param(e.to_string()))?;
    let step = 1.0 / (side - 1) as f64;
    let mut coords = Vec::with_capacity(total * d);
    for idx in 0..total {
        let mut rest = idx;
        for _ in 0..d {
            let site = (rest % side) as f64 * step;
            rest /= side;
            let jitter = if sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            coords.push(site + jitter);
        }
    }
    PointCloud::from_flat(coords, d, tag, seed, Some(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_windows_follow_the_formula() {
        let signal: Vec<f64> = (0..=20).map(f64::from).collect();
        let c = delay_embed(&signal, 3, 3, 7).unwrap();
        assert_eq!(c.point(0), &[0.0, 7.0, 14.0]);
        assert_eq!(c.point(1), &[3.0, 10.0, 17.0]);
        assert_eq!(c.len(), (21 - 14 - 1) / 3 + 1);
    }

    #[test]
    fn delay_edge_cases() {
        let c = delay_embed(&[2.5; 30], 4, 2, 3).unwrap();
        assert!(c.points().all(|p| p == [2.5; 4]));
        let one = delay_embed(&[1.0, 2.0, 3.0, 4.0, 5.0], 3, 1, 2).unwrap();
        assert_eq!(one.len(), 1);
        let short = delay_embed(&[1.0, 2.0, 3.0, 4.0], 3, 1, 2).unwrap_err();
        assert!(short.to_string().contains('5'), "{short}");
    }

    #[test]
    fn unit_delay_is_identity() {
        let signal = [0.3, -1.0, 4.5, 2.0];
        let c = delay_embed(&signal, 1, 1, 1).unwrap();
        assert_eq!(c.coords(), &signal);
    }

    #[test]
    fn noiseless_grid_is_exact_lattice() {
        let c = sample_perturbed_grid(2, 3, 0.0, 0).unwrap();
        let mut pts: Vec<Vec<f64>> = c.points().map(<[f64]>::to_vec).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = Vec::new();
        for x in [0.0, 0.5, 1.0] {
            for y in [0.0, 0.5, 1.0] {
                expected.push(vec![x, y]);
            }
        }
        assert_eq!(pts, expected);
    }

    #[test]
    fn grid_jitter_stays_near_sites() {
        let sigma = 0.01;
        let clean = sample_perturbed_grid(2, 10, 0.0, 1).unwrap();
        let noisy = sample_perturbed_grid(2, 10, sigma, 1).unwrap();
        let close = clean
            .points()
            .zip(noisy.points())
            .filter(|(a, b)| crate::cloud::euclidean(a, b) <= 5.0 * sigma)
            .count();
        assert!(close as f64 >= 0.99 * clean.len() as f64);
        assert_eq!(sample_perturbed_grid(3, 4, 0.005, 2).unwrap().len(), 64);
    }
}
