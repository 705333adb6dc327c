use nalgebra::Vector2;
use rand::seq::SliceRandom;
use rand::Rng;

use super::PerlinParams;

/// Classic gradient noise on the plane with a seeded permutation.
#[derive(Clone, Debug)]
pub struct Perlin {
    perm: [u8; 512],
}

const GRADIENTS: [[f64; 2]; 8] = [
    [1.0, 0.0],
    [-1.0, 0.0],
    [0.0, 1.0],
    [0.0, -1.0],
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
    [-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
];

fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

impl Perlin {
    pub fn new(rng: &mut impl Rng) -> Self {
        let mut p: Vec<u8> = (0..=255).collect();
        p.shuffle(rng);
        let mut perm = [0u8; 512];
        for i in 0..512 {
            perm[i] = p[i & 255];
        }
        Self { perm }
    }

    fn grad(&self, ix: i64, iy: i64, dx: f64, dy: f64) -> f64 {
        let h = self.perm[(self.perm[(ix & 255) as usize] as usize + (iy & 255) as usize) & 511] & 7;
        let g = GRADIENTS[h as usize];
        g[0] * dx + g[1] * dy
    }

    /// Noise in roughly `[-1, 1]`; zero on integer lattice points.
    pub fn noise(&self, p: &Vector2<f64>) -> f64 {
        let (fx, fy) = (p.x.floor(), p.y.floor());
        let (ix, iy) = (fx as i64, fy as i64);
        let (dx, dy) = (p.x - fx, p.y - fy);
        let n00 = self.grad(ix, iy, dx, dy);
        let n10 = self.grad(ix + 1, iy, dx - 1.0, dy);
        let n01 = self.grad(ix, iy + 1, dx, dy - 1.0);
        let n11 = self.grad(ix + 1, iy + 1, dx - 1.0, dy - 1.0);
        let (u, v) = (fade(dx), fade(dy));
        // Max magnitude of 2D Perlin is √2/2; rescale to ±1.
        std::f64::consts::SQRT_2 * lerp(lerp(n00, n10, u), lerp(n01, n11, u), v)
    }

    /// Octave sum normalized by the total amplitude, so the result stays in
    /// `[-1, 1]`.
    pub fn fractal(&self, p: &Vector2<f64>, params: &PerlinParams) -> f64 {
        let mut sum = 0.0;
        let mut norm = 0.0;
        let mut amp = 1.0;
        let mut freq = params.frequency;
        for _ in 0..params.octaves {
            sum += amp * self.noise(&(p * freq));
            norm += amp;
            amp *= params.persistence;
            freq *= 2.0;
        }
        (sum / norm).clamp(-1.0, 1.0)
    }
}
