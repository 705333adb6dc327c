use std::fmt;

use serde::{Deserialize, Serialize};

use super::MeshError;
use crate::geometry::{Pose, SymmetrySet};

/// Detection classes. `NoObject` is the padding class of unmatched queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    NoObject = 0,
    Gripper = 1,
    LoadingPlatform = 2,
    Pallet = 3,
}

/// The three object classes, in label order.
pub const OBJECT_CLASSES: [ObjectClass; 3] = [ObjectClass::Gripper, ObjectClass::LoadingPlatform, ObjectClass::Pallet];

impl ObjectClass {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Self::NoObject),
            1 => Some(Self::Gripper),
            2 => Some(Self::LoadingPlatform),
            3 => Some(Self::Pallet),
            _ => None,
        }
    }

    /// Orientation symmetries: grippers and pallets look the same after a
    /// half turn about their vertical axis, loading platforms do not.
    pub fn symmetry(self) -> SymmetrySet {
        match self {
            Self::Gripper | Self::Pallet => SymmetrySet::SignAndZFlip,
            Self::LoadingPlatform | Self::NoObject => SymmetrySet::SignOnly,
        }
    }

    pub fn has_opening(self) -> bool {
        self == Self::Gripper
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::NoObject => "no_object",
            Self::Gripper => "gripper",
            Self::LoadingPlatform => "loading_platform",
            Self::Pallet => "pallet",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Self::NoObject => "No object",
            Self::Gripper => "Gripper",
            Self::LoadingPlatform => "Loading Platform",
            Self::Pallet => "Pallet",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Self::NoObject, Self::Gripper, Self::LoadingPlatform, Self::Pallet].into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ground-truth (or predicted) configuration of one parametric object.
///
/// `position` semantics depend on the class: gripper center of mass,
/// loading-platform front-right corner, pallet bottom center. `opening` is in
/// degrees in metric frames and in `[-1, 1]` when `pose.normalized` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamTarget {
    pub class: ObjectClass,
    pub pose: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening: Option<f64>,
}

impl ParamTarget {
    pub fn new(class: ObjectClass, pose: Pose, opening: Option<f64>) -> Result<Self, MeshError> {
        let t = Self { class, pose, opening };
        t.validate()?;
        Ok(t)
    }

    pub fn gripper(pose: Pose, opening: f64) -> Self {
        Self { class: ObjectClass::Gripper, pose, opening: Some(opening) }
    }

    /// A platform or pallet target (no state parameter).
    pub fn rigid(class: ObjectClass, pose: Pose) -> Self {
        debug_assert!(!class.has_opening());
        Self { class, pose, opening: None }
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.class == ObjectClass::NoObject {
            return Err(MeshError::InvalidTarget("targets cannot have the no-object class".into()));
        }
        match (self.class.has_opening(), self.opening) {
            (true, None) => Err(MeshError::InvalidTarget("gripper target requires an opening angle".into())),
            (false, Some(_)) => Err(MeshError::InvalidTarget(format!("{} target cannot carry an opening angle", self.class))),
            (_, Some(a)) if !a.is_finite() => Err(MeshError::InvalidTarget("opening angle is not finite".into())),
            _ if !self.pose.position.iter().all(|v| v.is_finite()) => Err(MeshError::InvalidTarget("position is not finite".into())),
            _ => Ok(()),
        }
    }
    /// The same object after the rigid motion `motion` (applied on the left).
    pub fn transformed(&self, motion: &Pose) -> Self {
        let mut out = *self;
        out.pose = motion.compose(&self.pose);
        out.pose.normalized = self.pose.normalized;
        out
    }
}

/// A ground-truth target tied to the scene instance it was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledTarget {
    pub instance_id: u32,
    pub target: ParamTarget,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_table() {
        assert_eq!(ObjectClass::Gripper.symmetry(), SymmetrySet::SignAndZFlip);
        assert_eq!(ObjectClass::LoadingPlatform.symmetry(), SymmetrySet::SignOnly);
        assert_eq!(ObjectClass::Pallet.symmetry(), SymmetrySet::SignAndZFlip);
    }

    #[test]
    fn opening_arity_enforced() {
        let p = Pose::identity();
        assert!(ParamTarget::new(ObjectClass::Gripper, p, None).is_err());
        assert!(ParamTarget::new(ObjectClass::Pallet, p, Some(3.0)).is_err());
        assert!(ParamTarget::new(ObjectClass::NoObject, p, None).is_err());
        assert!(ParamTarget::new(ObjectClass::Gripper, p, Some(30.0)).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for c in [ObjectClass::NoObject, ObjectClass::Gripper, ObjectClass::LoadingPlatform, ObjectClass::Pallet] {
            assert_eq!(ObjectClass::from_name(c.name()), Some(c));
            assert_eq!(ObjectClass::from_index(c.index()), Some(c));
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
    }
}
