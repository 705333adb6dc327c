use serde::{Deserialize, Serialize};

use super::SceneError;

/// Closed interval `[lo, hi]`.
pub type Range = [f64; 2];

/// Fractal noise modulating the pallet spacing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerlinParams {
    /// Base frequency in cycles per meter.
    pub frequency: f64,
    pub octaves: u32,
    pub persistence: f64,
    /// Relative radius modulation: local radius = base · (1 + amplitude · noise).
    pub amplitude: f64,
}

impl Default for PerlinParams {
    fn default() -> Self {
        Self { frequency: 0.08, octaves: 3, persistence: 0.5, amplitude: 0.4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub rng_seed: u64,
    /// Annulus around the crane for the forklift.
    pub forklift_radius_range: Range,
    /// Annulus around the truck backside for the gripper.
    pub gripper_radius_range: Range,
    /// Height of the gripper reference point above ground.
    pub gripper_height_range: Range,
    pub gripper_max_tilt_deg: f64,
    pub opening_range: Range,
    pub pallet_min_clearance: f64,
    pub pallet_count_range: [u32; 2],
    pub pallet_base_radius: f64,
    pub pallet_region_radius: Range,
    pub stack_max: u32,
    pub stack_probability: f64,
    pub box_probability: f64,
    pub perlin: PerlinParams,
    pub vegetation_min_spacing: f64,
    pub vegetation_count_range: [u32; 2],
    pub vegetation_region_radius: Range,
    pub wall_count_range: [u32; 2],
    pub wall_region_radius: Range,
    pub mast_height_range: Range,
    pub mast_max_tilt_deg: f64,
    pub retry_budget: u32,
    /// Points the forklift may face; defaults to the corners and edge
    /// midpoints of the truck bed.
    pub interest_points: Option<Vec<[f64; 3]>>,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            forklift_radius_range: [5.0, 16.0],
            gripper_radius_range: [3.5, 8.0],
            gripper_height_range: [0.5, 4.5],
            gripper_max_tilt_deg: 5.0,
            opening_range: [0.0, 90.0],
            pallet_min_clearance: 1.5,
            pallet_count_range: [3, 12],
            pallet_base_radius: 2.5,
            pallet_region_radius: [3.0, 18.0],
            stack_max: 2,
            stack_probability: 0.3,
            box_probability: 0.3,
            perlin: PerlinParams::default(),
            vegetation_min_spacing: 1.0,
            vegetation_count_range: [5, 20],
            vegetation_region_radius: [12.0, 30.0],
            wall_count_range: [0, 3],
            wall_region_radius: [12.0, 24.0],
            mast_height_range: [1.8, 3.0],
            mast_max_tilt_deg: 3.0,
            retry_budget: 200,
            interest_points: None,
        }
    }
}

fn check_range(name: &str, r: Range) -> Result<(), SceneError> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] >= 0.0 && r[0] <= r[1]) {
        return Err(SceneError::InvalidConfig(format!("{name} must be a non-empty non-negative range, got {r:?}")));
    }
    Ok(())
}

fn check_count(name: &str, r: [u32; 2]) -> Result<(), SceneError> {
    if r[0] > r[1] {
        return Err(SceneError::InvalidConfig(format!("{name} must satisfy lo ≤ hi, got {r:?}")));
    }
    Ok(())
}

fn check_probability(name: &str, p: f64) -> Result<(), SceneError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SceneError::InvalidConfig(format!("{name} must be in [0, 1], got {p}")));
    }
    Ok(())
}

impl SceneConfig {
    pub fn validate(&self, max_opening_deg: f64) -> Result<(), SceneError> {
        for (n, r) in [
            ("forklift_radius_range", self.forklift_radius_range),
            ("gripper_radius_range", self.gripper_radius_range),
            ("gripper_height_range", self.gripper_height_range),
            ("opening_range", self.opening_range),
            ("pallet_region_radius", self.pallet_region_radius),
            ("vegetation_region_radius", self.vegetation_region_radius),
            ("wall_region_radius", self.wall_region_radius),
            ("mast_height_range", self.mast_height_range),
        ] {
            check_range(n, r)?;
        }
        for (n, r) in [
            ("pallet_count_range", self.pallet_count_range),
            ("vegetation_count_range", self.vegetation_count_range),
            ("wall_count_range", self.wall_count_range),
        ] {
            check_count(n, r)?;
        }
        for (n, p) in [("stack_probability", self.stack_probability), ("box_probability", self.box_probability)] {
            check_probability(n, p)?;
        }
        if self.stack_probability + self.box_probability > 1.0 {
            return Err(SceneError::InvalidConfig("stack_probability + box_probability must not exceed 1".into()));
        }
        if self.opening_range[1] > max_opening_deg {
            return Err(SceneError::InvalidConfig(format!("opening_range exceeds the gripper limit of {max_opening_deg}°")));
        }
        for (n, v) in [
            ("pallet_min_clearance", self.pallet_min_clearance),
            ("vegetation_min_spacing", self.vegetation_min_spacing),
            ("pallet_base_radius", self.pallet_base_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SceneError::InvalidConfig(format!("{n} must be positive, got {v}")));
            }
        }
        if !(0.0..=45.0).contains(&self.gripper_max_tilt_deg) || !(0.0..=45.0).contains(&self.mast_max_tilt_deg) {
            return Err(SceneError::InvalidConfig("tilt limits must be within [0, 45]°".into()));
        }
        if self.stack_max == 0 || self.retry_budget == 0 {
            return Err(SceneError::InvalidConfig("stack_max and retry_budget must be at least 1".into()));
        }
        let p = &self.perlin;
        if !(p.frequency > 0.0) || p.octaves == 0 || !(p.persistence > 0.0) || !(0.0..1.0).contains(&p.amplitude) {
            return Err(SceneError::InvalidConfig("perlin needs frequency > 0, octaves ≥ 1, persistence > 0, amplitude in [0, 1)".into()));
        }
        if let Some(pts) = &self.interest_points {
            if pts.is_empty() || pts.iter().flatten().any(|v| !v.is_finite()) {
                return Err(SceneError::InvalidConfig("interest_points must be a non-empty list of finite points".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SceneConfig::default().validate(90.0).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            SceneConfig { gripper_radius_range: [8.0, 3.5], ..Default::default() },
            SceneConfig { forklift_radius_range: [-1.0, 3.0], ..Default::default() },
            SceneConfig { pallet_min_clearance: 0.0, ..Default::default() },
            SceneConfig { opening_range: [0.0, 120.0], ..Default::default() },
            SceneConfig { stack_probability: 0.8, box_probability: 0.5, ..Default::default() },
            SceneConfig { interest_points: Some(vec![]), ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(90.0), Err(SceneError::InvalidConfig(_))), "{c:?}");
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<SceneConfig>("stack_max = 2\nbogus = 1\n").is_err());
        let c: SceneConfig = toml::from_str("stack_max = 1\n[perlin]\noctaves = 4\n").unwrap();
        assert_eq!((c.stack_max, c.perlin.octaves, c.perlin.persistence), (1, 4, 0.5));
    }
}
