use nalgebra::Vector2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Footprint, Perlin, PerlinParams, SceneError};

/// Sampling domain on the ground plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Annulus { center: Vector2<f64>, radii: [f64; 2] },
    Rect { min: Vector2<f64>, max: Vector2<f64> },
}

impl Region {
    pub fn area(&self) -> f64 {
        match self {
            Region::Annulus { radii, .. } => std::f64::consts::PI * (radii[1].powi(2) - radii[0].powi(2)),
            Region::Rect { min, max } => ((max.x - min.x) * (max.y - min.y)).max(0.0),
        }
    }

    /// Area-uniform point.
    pub fn sample(&self, rng: &mut impl Rng) -> Vector2<f64> {
        match self {
            Region::Annulus { center, radii } => {
                let r = sample_annulus_radius(*radii, rng);
                let a = rng.random_range(0.0..std::f64::consts::TAU);
                center + Vector2::new(r * a.cos(), r * a.sin())
            }
            Region::Rect { min, max } => Vector2::new(lerp(min.x, max.x, rng.random()), lerp(min.y, max.y, rng.random())),
        }
    }

    pub fn contains(&self, p: &Vector2<f64>) -> bool {
        match self {
            Region::Annulus { center, radii } => {
                let r = (p - center).norm();
                r >= radii[0] && r <= radii[1]
            }
            Region::Rect { min, max } => p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y,
        }
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Radius with density proportional to area: `r = sqrt(U(r0², r1²))`.
pub fn sample_annulus_radius(radii: [f64; 2], rng: &mut impl Rng) -> f64 {
    let (a, b) = (radii[0] * radii[0], radii[1] * radii[1]);
    lerp(a, b, rng.random::<f64>()).sqrt().clamp(radii[0], radii[1])
}

/// Zone that samples must stay `clearance` away from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeepOut {
    pub footprint: Footprint,
    pub clearance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSample {
    pub position: Vector2<f64>,
    /// Exclusion radius at this sample.
    pub radius: f64,
}

/// Variable-radius Poisson-disk sampling by dart throwing.
pub struct PoissonDisk<'a> {
    pub region: Region,
    pub base_radius: f64,
    /// Lower bound on the local radius.
    pub min_radius: f64,
    pub noise: Option<(&'a Perlin, PerlinParams)>,
    pub keepouts: &'a [KeepOut],
    pub max_points: usize,
    /// Candidate darts thrown per requested point.
    pub attempts_per_point: usize,
}

impl PoissonDisk<'_> {
    pub fn local_radius(&self, p: &Vector2<f64>) -> f64 {
        let scale = self.noise.map_or(1.0, |(n, params)| 1.0 + params.amplitude * n.fractal(p, &params));
        (self.base_radius * scale).max(self.min_radius)
    }

    /// Samples keep `|p - q| ≥ max(r_p, r_q)` pairwise and respect every
    /// keep-out. Errors when nothing could be placed.
    pub fn sample(&self, rng: &mut impl Rng) -> Result<Vec<DiskSample>, SceneError> {
        if !(self.region.area() > 0.0) || !(self.base_radius > 0.0) {
            return Err(SceneError::RegionTooSmall);
        }
        let mut out: Vec<DiskSample> = Vec::new();
        let budget = self.max_points.saturating_mul(self.attempts_per_point.max(1));
        for _ in 0..budget {
            if out.len() >= self.max_points {
                break;
            }
            let p = self.region.sample(rng);
            if self.keepouts.iter().any(|k| k.footprint.distance_to_point(&p) < k.clearance) {
                continue;
            }
            let r = self.local_radius(&p);
            if out.iter().all(|s| (s.position - p).norm() >= r.max(s.radius)) {
                out.push(DiskSample { position: p, radius: r });
            }
        }
        if out.is_empty() && self.max_points > 0 {
            return Err(SceneError::RegionTooSmall);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pd<'a>(keepouts: &'a [KeepOut], noise: Option<(&'a Perlin, PerlinParams)>) -> PoissonDisk<'a> {
        PoissonDisk {
            region: Region::Rect { min: Vector2::new(-20.0, -20.0), max: Vector2::new(20.0, 20.0) },
            base_radius: 2.0,
            min_radius: 0.0,
            noise,
            keepouts,
            max_points: 80,
            attempts_per_point: 50,
        }
    }

    #[test]
    fn plain_disk_spacing() {
        let s = pd(&[], None).sample(&mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(s.len() > 40);
        for (i, a) in s.iter().enumerate() {
            for b in &s[i + 1..] {
                assert!((a.position - b.position).norm() >= 2.0);
            }
        }
    }

    #[test]
    fn noisy_spacing_keepouts_and_determinism() {
        let perlin = Perlin::new(&mut ChaCha8Rng::seed_from_u64(5));
        let params = PerlinParams { amplitude: 0.6, ..Default::default() };
        let ko = [KeepOut { footprint: Footprint::rect(Vector2::zeros(), Vector2::new(3.0, 1.0), 0.3), clearance: 1.5 }];
        let s = pd(&ko, Some((&perlin, params))).sample(&mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let radii: Vec<f64> = s.iter().map(|d| d.radius).collect();
        assert!(radii.iter().cloned().fold(0.0, f64::max) - radii.iter().cloned().fold(f64::INFINITY, f64::min) > 0.3);
        for (i, a) in s.iter().enumerate() {
            assert!(ko[0].footprint.distance_to_point(&a.position) >= 1.5);
            for b in &s[i + 1..] {
                assert!((a.position - b.position).norm() >= a.radius.max(b.radius));
            }
        }
        let again = pd(&ko, Some((&perlin, params))).sample(&mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn fully_blocked_region_errors() {
        let ko = [KeepOut { footprint: Footprint::rect(Vector2::zeros(), Vector2::new(30.0, 30.0), 0.0), clearance: 1.0 }];
        assert!(matches!(pd(&ko, None).sample(&mut ChaCha8Rng::seed_from_u64(0)), Err(SceneError::RegionTooSmall)));
    }

    #[test]
    fn annulus_radius_is_area_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let r2: Vec<f64> = (0..n).map(|_| sample_annulus_radius([5.0, 16.0], &mut rng).powi(2)).collect();
        assert!(r2.iter().all(|&v| (25.0..=256.0).contains(&v)));
        // Kolmogorov-Smirnov against U(25, 256); 1.63/√n is the 1% critical value.
        let mut s = r2.clone();
        s.sort_by(f64::total_cmp);
        let d = s.iter().enumerate().map(|(i, v)| ((v - 25.0) / 231.0 - (i as f64 + 0.5) / n as f64).abs()).fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS statistic {d}");
        assert_eq!(sample_annulus_radius([5.0, 5.0], &mut rng), 5.0);
    }
}
