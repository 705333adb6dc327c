//! Brute-force constraint checks over a generated scene.

use nalgebra::{Vector2, Vector3};

use super::builder::{ObjectKind, SceneInstance, Shape, TRUCK_BACKSIDE};
use super::{Footprint, SceneError};
use crate::mesh::{center_of_mass, ClassMesh, MeshLibrary, ObjectClass, ParamTarget};

const TOL: f64 = 1e-9;

/// Reference point of `target` re-derived from its posed mesh: closed-gripper
/// center of mass, front-right corner of the platform deck top, center of the
/// pallet's lowest face.
pub fn derive_reference_point(mesh: &ClassMesh, target: &ParamTarget) -> Result<Vector3<f64>, SceneError> {
    let q = target.pose.orientation;
    match target.class {
        ObjectClass::Gripper => {
            let closed = ParamTarget { opening: Some(0.0), ..*target };
            Ok(center_of_mass(&mesh.phi_mesh(&closed)?, mesh.triangles()))
        }
        ObjectClass::LoadingPlatform => {
            // The deck is the first box of the mesh: its (front, right, top) corner.
            let posed = mesh.phi_mesh(target)?;
            let (fwd, left, up) = (q.rotate(&Vector3::x()), q.rotate(&Vector3::y()), q.rotate(&Vector3::z()));
            let deck = &posed[..8.min(posed.len())];
            let best = deck
                .iter()
                .max_by(|a, b| (fwd.dot(a) - left.dot(a) + up.dot(a)).total_cmp(&(fwd.dot(b) - left.dot(b) + up.dot(b))))
                .copied()
                .expect("non-empty mesh");
            Ok(best)
        }
        ObjectClass::Pallet => {
            let posed = mesh.phi_mesh(target)?;
            let up = q.rotate(&Vector3::z());
            let low = posed.iter().map(|p| up.dot(p)).fold(f64::INFINITY, f64::min);
            let bottom: Vec<&Vector3<f64>> = posed.iter().filter(|p| up.dot(p) - low < 1e-9).collect();
            Ok(bottom.iter().copied().sum::<Vector3<f64>>() / bottom.len() as f64)
        }
        ObjectClass::NoObject => Err(SceneError::InvalidConfig("no-object target".into())),
    }
}

fn kind_of(inst: &SceneInstance, id: u32) -> Option<ObjectKind> {
    inst.object(id).map(|o| o.kind)
}

/// Every violated constraint, as human-readable messages.
pub fn verify_scene(inst: &SceneInstance, lib: &MeshLibrary) -> Result<Vec<String>, SceneError> {
    let cfg = &inst.config;
    let mut v = Vec::new();
    let in_range = |x: f64, r: [f64; 2]| x >= r[0] - TOL && x <= r[1] + TOL;

    // Targets are backed by objects of the right kind.
    for t in &inst.targets {
        let ok = match (inst.object(t.instance_id), t.target.class) {
            (Some(o), c) => {
                let kind_ok = matches!(
                    (o.kind, c),
                    (ObjectKind::Gripper, ObjectClass::Gripper)
                        | (ObjectKind::Platform, ObjectClass::LoadingPlatform)
                        | (ObjectKind::Pallet, ObjectClass::Pallet)
                );
                kind_ok && o.shape == Shape::Parametric { target: t.target }
            }
            _ => false,
        };
        if !ok {
            v.push(format!("target {} has no matching scene object", t.instance_id));
        }
        let derived = derive_reference_point(lib.get(t.target.class)?, &t.target)?;
        if (derived - t.target.pose.position).norm() > 1e-6 {
            v.push(format!("target {} reference point off by {:.3e}", t.instance_id, (derived - t.target.pose.position).norm()));
        }
    }

    let gripper = inst.targets.iter().find(|t| t.target.class == ObjectClass::Gripper);
    match gripper {
        Some(g) => {
            let p = g.target.pose.position;
            let d = (p.xy() - Vector2::from(TRUCK_BACKSIDE)).norm();
            if !in_range(d, cfg.gripper_radius_range) {
                v.push(format!("gripper {d:.3} m from truck backside"));
            }
            if !in_range(p.z, cfg.gripper_height_range) {
                v.push(format!("gripper height {:.3}", p.z));
            }
            if !in_range(g.target.opening.unwrap_or(f64::NAN), cfg.opening_range) {
                v.push("gripper opening out of range".into());
            }
        }
        None => v.push("scene has no gripper".into()),
    }
    if inst.targets.iter().filter(|t| t.target.class == ObjectClass::LoadingPlatform).count() != 1 {
        v.push("scene must have exactly one loading platform".into());
    }
    let fd = inst.layout.forklift_position.xy().norm();
    if !in_range(fd, cfg.forklift_radius_range) {
        v.push(format!("forklift {fd:.3} m from crane"));
    }
    if !in_range(inst.layout.mast_height, cfg.mast_height_range) {
        v.push("mast height out of range".into());
    }

    // Footprints of everything that carries a clearance requirement.
    let fp = |id: u32| -> Result<Footprint, SceneError> { inst.object(id).expect("listed object").shape.footprint(lib) };
    let mut fixed: Vec<(String, Footprint)> = Vec::new();
    let truck: Vec<Vector3<f64>> = inst
        .objects
        .iter()
        .filter(|o| o.kind == ObjectKind::Truck || o.kind == ObjectKind::Platform)
        .map(|o| o.shape.footprint(lib))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flat_map(|f| f.corners.into_iter().map(|c| Vector3::new(c.x, c.y, 0.0)))
        .collect();
    fixed.push(("truck".into(), Footprint::hull(&truck)));
    if let Some(g) = gripper {
        fixed.push(("gripper".into(), fp(g.instance_id)?));
    }
    let fork: Vec<Vector3<f64>> = inst
        .objects
        .iter()
        .filter(|o| o.kind == ObjectKind::Forklift)
        .map(|o| o.shape.footprint(lib))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flat_map(|f| f.corners.into_iter().map(|c| Vector3::new(c.x, c.y, 0.0)))
        .collect();
    fixed.push(("forklift".into(), Footprint::hull(&fork)));
    if fixed[0].1.distance(fixed.last().map(|f| &f.1).expect("forklift")) < cfg.pallet_min_clearance - TOL {
        v.push("forklift too close to truck".into());
    }

    let clearance = cfg.pallet_min_clearance;
    let sites = &inst.layout.pallet_sites;
    for (i, s) in sites.iter().enumerate() {
        if s.stack.is_empty() || kind_of(inst, s.stack[0]) != Some(ObjectKind::Pallet) {
            v.push(format!("pallet site {i} has no bottom pallet"));
            continue;
        }
        if s.stack.len() > cfg.stack_max as usize {
            v.push(format!("pallet site {i} stacked {} high", s.stack.len()));
        }
        for &id in &s.stack {
            let f = fp(id)?;
            for (name, other) in &fixed {
                let d = f.distance(other);
                if d < clearance - TOL {
                    v.push(format!("object {id} is {d:.3} m from {name}"));
                }
            }
        }
        // Stack contact: each item rests on the top of the one below.
        let mut top = 0.0;
        for &id in &s.stack {
            let o = inst.object(id).expect("stack member");
            let (bottom, height) = match &o.shape {
                Shape::Parametric { target } => {
                    let b = lib.get(target.class)?.bounds();
                    (target.pose.position.z + b.min.z, b.max.z - b.min.z)
                }
                Shape::Cuboid { pose, half_extents } => (pose.position.z - half_extents.z, 2.0 * half_extents.z),
                _ => (f64::NAN, 0.0),
            };
            if (bottom - top).abs() > 1e-6 {
                v.push(format!("object {id} bottom at {bottom:.6}, support top at {top:.6}"));
            }
            top = bottom + height;
        }
        for (j, other) in sites.iter().enumerate().skip(i + 1) {
            let d = (s.position - other.position).norm();
            if d < s.radius.max(other.radius) - TOL {
                v.push(format!("pallet sites {i} and {j} are {d:.3} m apart"));
            }
            if fp(s.stack[0])?.distance(&fp(other.stack[0])?) <= 0.0 {
                v.push(format!("pallet sites {i} and {j} overlap"));
            }
        }
    }

    let mut pallet_fps = Vec::new();
    for s in sites {
        for &id in &s.stack {
            pallet_fps.push((format!("stack object {id}"), fp(id)?));
        }
    }
    for (k, &w) in inst.layout.walls.iter().enumerate() {
        let f = fp(w)?;
        for (name, other) in fixed.iter().chain(&pallet_fps) {
            if f.distance(other) < clearance - TOL {
                v.push(format!("wall {w} too close to {name}"));
            }
        }
        for &w2 in &inst.layout.walls[k + 1..] {
            if f.distance(&fp(w2)?) < clearance - TOL {
                v.push(format!("walls {w} and {w2} too close"));
            }
        }
    }

    let spacing = cfg.vegetation_min_spacing;
    let veg_roots: Vec<u32> =
        inst.layout.vegetation.iter().copied().filter(|&id| matches!(kind_of(inst, id), Some(ObjectKind::TreeTrunk | ObjectKind::Bush))).collect();
    let center = |id: u32| -> Vector2<f64> {
        match &inst.object(id).expect("vegetation").shape {
            Shape::Cuboid { pose, .. } => pose.position.xy(),
            Shape::Sphere { center, .. } => center.xy(),
            _ => Vector2::repeat(f64::NAN),
        }
    };
    for (k, &a) in veg_roots.iter().enumerate() {
        for &b in &veg_roots[k + 1..] {
            let d = (center(a) - center(b)).norm();
            if d < spacing - TOL {
                v.push(format!("vegetation {a} and {b} are {d:.3} m apart"));
            }
        }
    }
    for &id in &inst.layout.vegetation {
        let f = fp(id)?;
        let walls: Vec<(String, Footprint)> = inst.layout.walls.iter().map(|&w| Ok((format!("wall {w}"), fp(w)?))).collect::<Result<_, SceneError>>()?;
        for (name, other) in fixed.iter().chain(&pallet_fps).chain(&walls) {
            if f.distance(other) < spacing - TOL {
                v.push(format!("vegetation {id} too close to {name}"));
            }
        }
    }
    Ok(v)
}
