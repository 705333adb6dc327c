use nalgebra::{Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::placement::{place_on_circle, Facing, OrientationRule};
use super::poisson::{KeepOut, PoissonDisk, Region};
use super::{Footprint, Perlin, SceneConfig, SceneError};
use crate::geometry::{Pose, UnitQuaternion};
use crate::lidar::{Primitive, SceneGeometry};
use crate::mesh::procedural::MeshBuilder;
use crate::mesh::{LabeledTarget, MeshLibrary, ObjectClass, ParamTarget, TriangleSoup};

/// Truck bed: x ∈ [-6, 0] (front at x = 0), y ∈ [-1.2, 1.2], top at z = 1.2.
pub const DECK_TOP: f64 = 1.2;
pub const DECK_LENGTH: f64 = 6.0;
pub const DECK_HALF_WIDTH: f64 = 1.2;
/// Center of the truck backside on the ground, where the gripper annulus is centered.
pub const TRUCK_BACKSIDE: [f64; 2] = [-DECK_LENGTH, 0.0];
const TRUCK_X: [f64; 2] = [-DECK_LENGTH, 2.4];
const TRUCK_HALF_WIDTH: f64 = 1.25;
const GROUND_HALF_SIZE: f64 = 40.0;
const MAX_CANOPY_RADIUS: f64 = 1.8;
/// Sensor offset ahead of the forklift center, on the mast.
const MAST_X: f64 = 1.2;
const SENSOR_X: f64 = 1.45;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Ground,
    Truck,
    Crane,
    Platform,
    Gripper,
    Forklift,
    Pallet,
    Box,
    TreeTrunk,
    TreeCanopy,
    Bush,
    Wall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    /// Box centered at `pose.position`.
    Cuboid {
        pose: Pose,
        half_extents: Vector3<f64>,
    },
    Sphere {
        center: Vector3<f64>,
        radius: f64,
    },
    /// Planar quad, counter-clockwise seen from above.
    Quad {
        corners: [Vector3<f64>; 4],
    },
    /// Class mesh posed by a parametric target.
    Parametric {
        target: ParamTarget,
    },
}

impl Shape {
    fn cuboid(center: Vector3<f64>, half_extents: Vector3<f64>, orientation: UnitQuaternion) -> Self {
        Shape::Cuboid { pose: Pose::new(center, orientation), half_extents }
    }

    fn aligned(min: [f64; 3], max: [f64; 3]) -> Self {
        let (lo, hi) = (Vector3::from(min), Vector3::from(max));
        Self::cuboid((lo + hi) * 0.5, (hi - lo) * 0.5, UnitQuaternion::IDENTITY)
    }

    /// Cuboid corners in world coordinates.
    pub fn cuboid_corners(pose: &Pose, half: &Vector3<f64>) -> Vec<Vector3<f64>> {
        (0..8)
            .map(|i| {
                let l = Vector3::new(
                    if i & 1 == 0 { -half.x } else { half.x },
                    if i & 2 == 0 { -half.y } else { half.y },
                    if i & 4 == 0 { -half.z } else { half.z },
                );
                pose.transform_point(&l)
            })
            .collect()
    }

    /// World-space triangles (for parametric shapes, the posed class mesh).
    pub fn triangles(&self, lib: &MeshLibrary) -> Result<TriangleSoup, SceneError> {
        match self {
            Shape::Cuboid { pose, half_extents } => {
                let mut b = MeshBuilder::default();
                b.add_box(-half_extents, *half_extents);
                let (v, t) = b.finish();
                Ok((v.iter().map(|p| pose.transform_point(p)).collect(), t))
            }
            Shape::Quad { corners } => Ok((corners.to_vec(), vec![[0, 1, 2], [0, 2, 3]])),
            Shape::Parametric { target } => {
                let mesh = lib.get(target.class)?;
                Ok((mesh.phi_mesh(target)?, mesh.triangles().to_vec()))
            }
            Shape::Sphere { .. } => Ok((Vec::new(), Vec::new())),
        }
    }

    /// Ground-plane footprint.
    pub fn footprint(&self, lib: &MeshLibrary) -> Result<Footprint, SceneError> {
        match self {
            Shape::Sphere { center, radius } => {
                let n = 16;
                let pts: Vec<Vector3<f64>> = (0..n)
                    .map(|i| {
                        // Circumscribed polygon so the disc is covered.
                        let a = std::f64::consts::TAU * i as f64 / n as f64;
                        let r = radius / (std::f64::consts::PI / n as f64).cos();
                        center + Vector3::new(r * a.cos(), r * a.sin(), 0.0)
                    })
                    .collect();
                Ok(Footprint::hull(&pts))
            }
            Shape::Cuboid { pose, half_extents } => Ok(Footprint::hull(&Self::cuboid_corners(pose, half_extents))),
            _ => Ok(Footprint::hull(&self.triangles(lib)?.0)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub instance_id: u32,
    pub kind: ObjectKind,
    pub shape: Shape,
}

/// A pallet position with everything stacked on it, bottom first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PalletSite {
    pub position: Vector2<f64>,
    /// Poisson exclusion radius at this site.
    pub radius: f64,
    pub stack: Vec<u32>,
}

/// Placement facts kept for verification and reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub interest_points: Vec<Vector3<f64>>,
    pub forklift_position: Vector3<f64>,
    pub forklift_facing: Option<Facing>,
    pub mast_height: f64,
    pub mast_tilt_deg: f64,
    pub pallet_sites: Vec<PalletSite>,
    pub vegetation: Vec<u32>,
    pub walls: Vec<u32>,
}

/// One generated scene: geometry description, sensor mount and ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneInstance {
    pub index: u64,
    pub seed: u64,
    /// World pose of the sensor frame (+x forward).
    pub sensor: Pose,
    pub objects: Vec<SceneObject>,
    pub targets: Vec<LabeledTarget>,
    pub layout: Layout,
    pub config: SceneConfig,
    pub mesh_hash: String,
}

impl SceneInstance {
    pub fn object(&self, id: u32) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.instance_id == id)
    }

    /// Raycastable geometry with a built BVH.
    pub fn to_geometry(&self, lib: &MeshLibrary) -> Result<SceneGeometry, SceneError> {
        let mut g = SceneGeometry::new(self.sensor);
        for o in &self.objects {
            match &o.shape {
                Shape::Sphere { center, radius } => g.add_primitive(o.instance_id, Primitive::Sphere { center: *center, radius: *radius }),
                s => {
                    let (v, t) = s.triangles(lib)?;
                    g.add_mesh(o.instance_id, &v, &t);
                }
            }
        }
        g.finalize();
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String, SceneError> {
        serde_json::to_string_pretty(self).map_err(|e| SceneError::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, SceneError> {
        serde_json::from_str(s).map_err(|e| SceneError::Serialization(e.to_string()))
    }
}

/// Corners and edge midpoints of the truck bed.
pub fn default_interest_points() -> Vec<Vector3<f64>> {
    let (x0, x1, y) = (-DECK_LENGTH, 0.0, DECK_HALF_WIDTH);
    [(x1, -y), (x1, y), (x0, -y), (x0, y), (0.5 * x0, -y), (0.5 * x0, y), (x1, 0.0), (x0, 0.0)].iter().map(|&(a, b)| Vector3::new(a, b, DECK_TOP)).collect()
}

/// Per-scene RNG: stream `index` of the seeded generator.
pub fn scene_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform(rng: &mut impl Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..=r[1])
    }
}

fn uniform_count(rng: &mut impl Rng, r: [u32; 2]) -> u32 {
    rng.random_range(r[0]..=r[1])
}

fn sym(rng: &mut impl Rng, max: f64) -> f64 {
    uniform(rng, [-max, max])
}

struct Builder<'a> {
    lib: &'a MeshLibrary,
    cfg: &'a SceneConfig,
    objects: Vec<SceneObject>,
    targets: Vec<LabeledTarget>,
    /// Footprints that later placements keep clear of.
    occupied: Vec<Footprint>,
}

impl Builder<'_> {
    fn add(&mut self, kind: ObjectKind, shape: Shape) -> u32 {
        let id = self.objects.len() as u32;
        self.objects.push(SceneObject { instance_id: id, kind, shape });
        id
    }

    fn add_target(&mut self, kind: ObjectKind, target: ParamTarget) -> u32 {
        let id = self.add(kind, Shape::Parametric { target });
        self.targets.push(LabeledTarget { instance_id: id, target });
        id
    }

    fn truck(&mut self, gripper_anchor: Option<Vector3<f64>>) -> Result<(), SceneError> {
        let platform = ParamTarget::rigid(ObjectClass::LoadingPlatform, Pose::from_translation(Vector3::new(0.0, -DECK_HALF_WIDTH, DECK_TOP)));
        self.add_target(ObjectKind::Platform, platform);
        let plat_bottom = self.lib.get(ObjectClass::LoadingPlatform)?.bounds().min.z + DECK_TOP;
        self.add(ObjectKind::Truck, Shape::aligned([TRUCK_X[0], -1.1, 0.45], [TRUCK_X[1], 1.1, plat_bottom.max(0.5)]));
        self.add(ObjectKind::Truck, Shape::aligned([0.2, -TRUCK_HALF_WIDTH, plat_bottom.max(0.5)], [TRUCK_X[1], TRUCK_HALF_WIDTH, 3.3]));
        for x in [-5.0, -3.8, 1.4] {
            for y in [-0.85, 0.85] {
                self.add(ObjectKind::Truck, Shape::aligned([x - 0.5, y - 0.3, 0.0], [x + 0.5, y + 0.3, 0.9]));
            }
        }
        let column_top = Vector3::new(-0.6, 0.0, 4.8);
        self.add(ObjectKind::Crane, Shape::aligned([-0.9, -0.3, DECK_TOP], [-0.3, 0.3, column_top.z]));
        if let Some(tip) = gripper_anchor {
            // Boom from the column top to a point above the gripper, plus the rotator link.
            let boom_end = Vector3::new(tip.x, tip.y, tip.z.max(column_top.z));
            let d = boom_end - column_top;
            let len = d.norm();
            if len > 1e-6 {
                let yaw = d.y.atan2(d.x);
                let pitch = -d.z.atan2(d.xy().norm());
                self.add(
                    ObjectKind::Crane,
                    Shape::cuboid((column_top + boom_end) * 0.5, Vector3::new(0.5 * len, 0.15, 0.15), UnitQuaternion::from_yaw_pitch_roll(yaw, pitch, 0.0)),
                );
            }
            if boom_end.z - tip.z > 0.3 {
                self.add(ObjectKind::Crane, Shape::aligned([tip.x - 0.05, tip.y - 0.05, tip.z + 0.15], [tip.x + 0.05, tip.y + 0.05, boom_end.z]));
            }
        }
        self.occupied.push(Footprint::rect(
            Vector2::new(0.5 * (TRUCK_X[0] + TRUCK_X[1]), 0.0),
            Vector2::new(0.5 * (TRUCK_X[1] - TRUCK_X[0]), TRUCK_HALF_WIDTH),
            0.0,
        ));
        Ok(())
    }

    fn gripper(&mut self, rng: &mut ChaCha8Rng) -> Result<(ParamTarget, Footprint, f64), SceneError> {
        let mesh = self.lib.get(ObjectClass::Gripper)?;
        let truck = self.occupied[0].clone();
        let center = Vector3::new(TRUCK_BACKSIDE[0], TRUCK_BACKSIDE[1], 0.0);
        for _ in 0..self.cfg.retry_budget {
            let c = place_on_circle(&center, self.cfg.gripper_radius_range, &OrientationRule::UniformYaw, rng);
            let z = uniform(rng, self.cfg.gripper_height_range);
            let t = self.cfg.gripper_max_tilt_deg.to_radians();
            let q = UnitQuaternion::from_yaw_pitch_roll(c.yaw, sym(rng, t), sym(rng, t));
            let opening = uniform(rng, self.cfg.opening_range);
            let target = ParamTarget::gripper(Pose::new(Vector3::new(c.pose.position.x, c.pose.position.y, z), q), opening);
            let posed = mesh.phi_mesh(&target)?;
            let fp = Footprint::hull(&posed);
            if fp.distance(&truck) >= 0.5 {
                let top = posed.iter().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max);
                return Ok((target, fp, top));
            }
        }
        Err(SceneError::PlacementFailure { what: "gripper".into(), attempts: self.cfg.retry_budget })
    }

    fn forklift(&mut self, rng: &mut ChaCha8Rng, interest: &[Vector3<f64>]) -> Result<(Pose, Layout), SceneError> {
        let clearance = self.cfg.pallet_min_clearance;
        for _ in 0..self.cfg.retry_budget {
            let c = place_on_circle(&Vector3::zeros(), self.cfg.forklift_radius_range, &OrientationRule::TowardOrAway(interest), rng);
            let mast_h = uniform(rng, self.cfg.mast_height_range);
            let tilt = sym(rng, self.cfg.mast_max_tilt_deg);
            let base = c.pose;
            let body = Shape::cuboid(base.transform_point(&Vector3::new(0.0, 0.0, 1.0)), Vector3::new(1.2, 0.6, 1.0), base.orientation);
            let mast = Shape::cuboid(
                base.transform_point(&Vector3::new(MAST_X + 0.075, 0.0, 0.5 * (mast_h + 0.2))),
                Vector3::new(0.075, 0.45, 0.5 * (mast_h + 0.2)),
                base.orientation,
            );
            let fp = Footprint::hull(
                &[body.footprint(self.lib)?.corners, mast.footprint(self.lib)?.corners]
                    .concat()
                    .iter()
                    .map(|p| Vector3::new(p.x, p.y, 0.0))
                    .collect::<Vec<_>>(),
            );
            if self.occupied.iter().any(|o| o.distance(&fp) < clearance) {
                continue;
            }
            self.add(ObjectKind::Forklift, body);
            self.add(ObjectKind::Forklift, mast);
            self.occupied.push(fp);
            let sensor =
                Pose::new(base.transform_point(&Vector3::new(SENSOR_X, 0.0, mast_h)), UnitQuaternion::from_yaw_pitch_roll(c.yaw, tilt.to_radians(), 0.0));
            let layout = Layout {
                interest_points: interest.to_vec(),
                forklift_position: base.position,
                forklift_facing: c.facing,
                mast_height: mast_h,
                mast_tilt_deg: tilt,
                pallet_sites: Vec::new(),
                vegetation: Vec::new(),
                walls: Vec::new(),
            };
            return Ok((sensor, layout));
        }
        Err(SceneError::PlacementFailure { what: "forklift".into(), attempts: self.cfg.retry_budget })
    }

    fn pallets(&mut self, rng: &mut ChaCha8Rng, layout: &mut Layout) -> Result<(), SceneError> {
        let count = uniform_count(rng, self.cfg.pallet_count_range) as usize;
        if count == 0 {
            return Ok(());
        }
        let pallet = self.lib.get(ObjectClass::Pallet)?;
        let pb = pallet.bounds();
        let circ = pb.min.xy().norm().max(pb.max.xy().norm()).max(Vector2::new(pb.min.x, pb.max.y).norm()).max(Vector2::new(pb.max.x, pb.min.y).norm());
        let pallet_top = pb.max.z;
        let keepouts: Vec<KeepOut> = self.occupied.iter().map(|f| KeepOut { footprint: f.clone(), clearance: self.cfg.pallet_min_clearance + circ }).collect();
        let perlin = Perlin::new(rng);
        let sampler = PoissonDisk {
            region: Region::Annulus { center: Vector2::zeros(), radii: self.cfg.pallet_region_radius },
            base_radius: self.cfg.pallet_base_radius,
            min_radius: 2.0 * circ + 0.01,
            noise: Some((&perlin, self.cfg.perlin)),
            keepouts: &keepouts,
            max_points: count,
            attempts_per_point: self.cfg.retry_budget as usize,
        };
        let samples = sampler.sample(rng)?;
        for s in samples {
            let yaw = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let mut z = 0.0;
            let mut stack = Vec::new();
            let mut level_yaw = yaw;
            let mut fps = Vec::new();
            for level in 0..self.cfg.stack_max {
                let u: f64 = rng.random();
                let place_pallet = level == 0 || u < self.cfg.stack_probability;
                let place_box = level > 0 && !place_pallet && u < self.cfg.stack_probability + self.cfg.box_probability;
                if place_pallet {
                    let t =
                        ParamTarget::rigid(ObjectClass::Pallet, Pose::new(Vector3::new(s.position.x, s.position.y, z), UnitQuaternion::from_yaw(level_yaw)));
                    let id = self.add_target(ObjectKind::Pallet, t);
                    fps.push(self.objects[id as usize].shape.footprint(self.lib)?);
                    stack.push(id);
                    z += pallet_top;
                    level_yaw = yaw + sym(rng, 5f64.to_radians());
                } else if place_box {
                    let half = Vector3::new(uniform(rng, [0.2, 0.6]), uniform(rng, [0.15, 0.4]), uniform(rng, [0.15, 0.5]));
                    let center = Vector3::new(s.position.x, s.position.y, z + half.z);
                    let id = self.add(ObjectKind::Box, Shape::cuboid(center, half, UnitQuaternion::from_yaw(yaw)));
                    stack.push(id);
                    break;
                } else {
                    break;
                }
            }
            self.occupied.extend(fps);
            layout.pallet_sites.push(PalletSite { position: s.position, radius: s.radius, stack });
        }
        Ok(())
    }

    fn walls(&mut self, rng: &mut ChaCha8Rng, layout: &mut Layout) -> Result<(), SceneError> {
        let n = uniform_count(rng, self.cfg.wall_count_range);
        for _ in 0..n {
            let mut placed = false;
            for _ in 0..self.cfg.retry_budget {
                let c = place_on_circle(&Vector3::zeros(), self.cfg.wall_region_radius, &OrientationRule::UniformYaw, rng);
                let half = Vector3::new(0.5 * uniform(rng, [3.0, 10.0]), 0.1, 0.5 * uniform(rng, [1.5, 4.0]));
                let shape = Shape::cuboid(c.pose.position + Vector3::new(0.0, 0.0, half.z), half, c.pose.orientation);
                let fp = shape.footprint(self.lib)?;
                if self.occupied.iter().all(|o| o.distance(&fp) >= self.cfg.pallet_min_clearance) {
                    let id = self.add(ObjectKind::Wall, shape);
                    self.occupied.push(fp);
                    layout.walls.push(id);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(SceneError::PlacementFailure { what: "wall".into(), attempts: self.cfg.retry_budget });
            }
        }
        Ok(())
    }

    fn vegetation(&mut self, rng: &mut ChaCha8Rng, layout: &mut Layout) -> Result<(), SceneError> {
        let count = uniform_count(rng, self.cfg.vegetation_count_range) as usize;
        if count == 0 {
            return Ok(());
        }
        let spacing = self.cfg.vegetation_min_spacing;
        let keepouts: Vec<KeepOut> = self.occupied.iter().map(|f| KeepOut { footprint: f.clone(), clearance: spacing + MAX_CANOPY_RADIUS }).collect();
        let sampler = PoissonDisk {
            region: Region::Annulus { center: Vector2::zeros(), radii: self.cfg.vegetation_region_radius },
            base_radius: spacing,
            min_radius: spacing,
            noise: None,
            keepouts: &keepouts,
            max_points: count,
            attempts_per_point: self.cfg.retry_budget as usize,
        };
        for s in sampler.sample(rng)? {
            let p = s.position;
            if rng.random_bool(0.5) {
                let h = uniform(rng, [1.5, 3.5]);
                let r = uniform(rng, [0.8, MAX_CANOPY_RADIUS]);
                let trunk = self.add(ObjectKind::TreeTrunk, Shape::aligned([p.x - 0.15, p.y - 0.15, 0.0], [p.x + 0.15, p.y + 0.15, h]));
                let canopy = self.add(ObjectKind::TreeCanopy, Shape::Sphere { center: Vector3::new(p.x, p.y, h + 0.7 * r), radius: r });
                layout.vegetation.extend([trunk, canopy]);
            } else {
                let r = uniform(rng, [0.3, 0.8]);
                let bush = self.add(ObjectKind::Bush, Shape::Sphere { center: Vector3::new(p.x, p.y, 0.5 * r), radius: r });
                layout.vegetation.push(bush);
            }
        }
        Ok(())
    }
}

/// Builds scene `index` of the dataset described by `config`. The result is a
/// pure function of `(config, index, library)`.
pub fn build_scene(config: &SceneConfig, index: u64, lib: &MeshLibrary) -> Result<SceneInstance, SceneError> {
    let max_open = lib.get(ObjectClass::Gripper)?.max_opening_deg();
    config.validate(max_open)?;
    let mut rng = scene_rng(config.rng_seed, index);
    let interest: Vec<Vector3<f64>> = config.interest_points.as_ref().map_or_else(default_interest_points, |v| v.iter().map(|p| Vector3::from(*p)).collect());
    let mut b = Builder { lib, cfg: config, objects: Vec::new(), targets: Vec::new(), occupied: Vec::new() };
    b.add(
        ObjectKind::Ground,
        Shape::Quad {
            corners: [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(x, y)| Vector3::new(x * GROUND_HALF_SIZE, y * GROUND_HALF_SIZE, 0.0)),
        },
    );
    // The truck footprint is needed before the gripper is placed; the crane
    // boom geometry is added once the gripper is known.
    b.occupied.push(Footprint::rect(Vector2::new(0.5 * (TRUCK_X[0] + TRUCK_X[1]), 0.0), Vector2::new(0.5 * (TRUCK_X[1] - TRUCK_X[0]), TRUCK_HALF_WIDTH), 0.0));
    let (gripper, gripper_fp, gripper_top) = b.gripper(&mut rng)?;
    b.occupied.clear();
    let anchor = Vector3::new(gripper.pose.position.x, gripper.pose.position.y, gripper_top);
    b.truck(Some(anchor))?;
    b.add_target(ObjectKind::Gripper, gripper);
    b.occupied.push(gripper_fp);
    let (sensor, mut layout) = b.forklift(&mut rng, &interest)?;
    b.pallets(&mut rng, &mut layout)?;
    b.walls(&mut rng, &mut layout)?;
    b.vegetation(&mut rng, &mut layout)?;
    Ok(SceneInstance {
        index,
        seed: config.rng_seed,
        sensor,
        objects: b.objects,
        targets: b.targets,
        layout,
        config: config.clone(),
        mesh_hash: lib.content_hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::verify_scene;

    fn lib() -> MeshLibrary {
        MeshLibrary::builtin(crate::mesh::procedural::DEFAULT_SAMPLE_SEED).unwrap()
    }

    #[test]
    fn deterministic_serialization() {
        let lib = lib();
        let cfg = SceneConfig { rng_seed: 42, ..Default::default() };
        let a = build_scene(&cfg, 3, &lib).unwrap().to_json().unwrap();
        let b = build_scene(&cfg, 3, &lib).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, build_scene(&cfg, 4, &lib).unwrap().to_json().unwrap());
        let back = SceneInstance::from_json(&a).unwrap();
        assert_eq!(back.to_json().unwrap(), a);
    }

    #[test]
    fn scenes_satisfy_constraints() {
        let lib = lib();
        let cfg = SceneConfig { rng_seed: 7, ..Default::default() };
        let mut stacked = 0;
        for i in 0..100 {
            let s = build_scene(&cfg, i, &lib).unwrap();
            let v = verify_scene(&s, &lib).unwrap();
            assert!(v.is_empty(), "scene {i}: {v:?}");
            stacked += s.layout.pallet_sites.iter().filter(|p| p.stack.len() > 1).count();
        }
        assert!(stacked > 0);
    }

    #[test]
    fn impossible_config_fails_cleanly() {
        let lib = lib();
        let cfg = SceneConfig { wall_count_range: [30, 30], wall_region_radius: [12.0, 12.5], retry_budget: 5, ..Default::default() };
        assert!(matches!(build_scene(&cfg, 0, &lib), Err(SceneError::PlacementFailure { .. })));
    }
}
