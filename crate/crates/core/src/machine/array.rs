use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{MachineError, Result};
use crate::fields::ApertureSpec;
use crate::statedep::{StateDepConfig, WeightScheme};

const COORD_TOL: f64 = 1e-9;

/// Geometry of the trap sites in the screen plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE", deny_unknown_fields)]
pub enum Layout {
    /// `rows × cols` grid; site `r * cols + c` sits at `(c, r) · pitch`.
    Square { pitch: f64, rows: usize, cols: usize },
    /// Free-form site list. Pairs not sharing an `x` or `y` line need
    /// `orthogonal_lattices`.
    Arbitrary {
        sites: Vec<[f64; 2]>,
        #[serde(default)]
        orthogonal_lattices: bool,
    },
    /// `arms` spokes around `center`; site `s` of arm `m` (index
    /// `m * sites_per_arm + s`) sits `(s + 1) · pitch` from the centre.
    Radial {
        arms: usize,
        sites_per_arm: usize,
        #[serde(default)]
        center: [f64; 2],
        pitch: f64,
    },
}

/// How the optical lattices must be arranged for a pair to collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LatticeRequirement {
    SingleAxis,
    TwoOrthogonal,
    RadialCenter,
}

/// A 1-D lattice beam through the array, keyed for conflict detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeLine {
    /// Along `x` at fixed `y` (stored in nano-wavelengths).
    Row(i64),
    /// Along `y` at fixed `x`.
    Column(i64),
    /// Radial spoke.
    Arm(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Site {
    pub position: [f64; 2],
    pub aperture: ApertureSpec,
    pub trap_on: bool,
}

/// Trap array hardware state: sites, per-site traps, the screen carrying the
/// NFFD traps and the state-dependent optical lattice underneath.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapArray {
    layout: Layout,
    sites: Vec<Site>,
    pub screen_engaged: bool,
    lattice: StateDepConfig,
}

/// JSON description of a trap array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub layout: Layout,
    /// Aperture radius used for every site unless `apertures` is given.
    #[serde(default = "default_radius")]
    pub aperture_radius: f64,
    #[serde(default)]
    pub apertures: Option<Vec<f64>>,
    #[serde(default = "default_lattice")]
    pub lattice: StateDepConfig,
    /// Sites whose traps start switched off.
    #[serde(default)]
    pub traps_off: Vec<usize>,
    #[serde(default = "default_true")]
    pub screen_engaged: bool,
}

fn default_radius() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

pub fn default_lattice() -> StateDepConfig {
    StateDepConfig {
        depth: 1.0,
        k_lat: 2.0 * PI,
        scheme: WeightScheme::RamanBasis,
    }
}

/// Geometric resolution of a gate pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGeometry {
    pub requirement: LatticeRequirement,
    pub collision_point: [f64; 2],
}

fn is_lattice_multiple(len: f64, period: f64) -> bool {
    let r = len / period;
    (r - r.round()).abs() <= 1e-9 * r.abs().max(1.0)
}

impl TrapArray {
    pub fn new(layout: Layout, aperture: ApertureSpec, lattice: StateDepConfig) -> Result<Self> {
        let positions = site_positions(&layout)?;
        let sites = positions
            .into_iter()
            .map(|position| Site {
                position,
                aperture,
                trap_on: true,
            })
            .collect();
        let array = Self {
            layout,
            sites,
            screen_engaged: true,
            lattice,
        };
        array.validate()?;
        Ok(array)
    }

    pub fn from_config(cfg: &ArrayConfig) -> Result<Self> {
        let aperture = ApertureSpec::new(cfg.aperture_radius)?;
        let mut array = Self::new(cfg.layout.clone(), aperture, cfg.lattice)?;
        if let Some(radii) = &cfg.apertures {
            if radii.len() != array.sites.len() {
                return Err(MachineError::Geometry(format!(
                    "{} aperture radii given for {} sites",
                    radii.len(),
                    array.sites.len()
                )));
            }
            for (site, &r) in array.sites.iter_mut().zip(radii) {
                site.aperture = ApertureSpec::new(r)?;
            }
        }
        for &s in &cfg.traps_off {
            array.site_mut(s)?.trap_on = false;
        }
        array.screen_engaged = cfg.screen_engaged;
        Ok(array)
    }

    fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        let period = self.lattice.period();
        match &self.layout {
            Layout::Square { pitch, .. } | Layout::Radial { pitch, .. } => {
                if !(*pitch > 0.0) || !is_lattice_multiple(*pitch, period) || *pitch < period * 0.5 {
                    return Err(MachineError::Geometry(format!(
                        "pitch {pitch} is not a positive integer multiple of the lattice period {period}"
                    )));
                }
            }
            Layout::Arbitrary { .. } => {}
        }
        for (a, sa) in self.sites.iter().enumerate() {
            for sb in &self.sites[a + 1..] {
                let d = (sa.position[0] - sb.position[0]).hypot(sa.position[1] - sb.position[1]);
                if d <= COORD_TOL {
                    return Err(MachineError::Geometry(format!(
                        "duplicate site coordinates {:?}",
                        sa.position
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn lattice(&self) -> &StateDepConfig {
        &self.lattice
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site(&self, i: usize) -> Result<&Site> {
        let len = self.sites.len();
        self.sites
            .get(i)
            .ok_or(MachineError::IndexOutOfRange { index: i, len })
    }

    pub fn site_mut(&mut self, i: usize) -> Result<&mut Site> {
        let len = self.sites.len();
        self.sites
            .get_mut(i)
            .ok_or(MachineError::IndexOutOfRange { index: i, len })
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.layout, Layout::Radial { .. })
    }

    fn radial_coords(&self, i: usize) -> Option<(usize, usize)> {
        match self.layout {
            Layout::Radial { sites_per_arm, .. } => Some((i / sites_per_arm, i % sites_per_arm)),
            _ => None,
        }
    }

    /// Lattice lines that pass through a site and would carry its atom once
    /// the screen is withdrawn.
    pub fn lines_through(&self, i: usize) -> Result<Vec<LatticeLine>> {
        let p = self.site(i)?.position;
        if let Some((arm, _)) = self.radial_coords(i) {
            return Ok(vec![LatticeLine::Arm(arm)]);
        }
        let key = |v: f64| (v / COORD_TOL).round() as i64;
        Ok(vec![LatticeLine::Row(key(p[1])), LatticeLine::Column(key(p[0]))])
    }

    /// Which lattice arrangement lets sites `i` and `j` collide, and where.
    pub fn validate_pair(&self, i: usize, j: usize) -> Result<PairGeometry> {
        if i == j {
            return Err(MachineError::Validation(format!("pair uses site {i} twice")));
        }
        let pi = self.site(i)?.position;
        let pj = self.site(j)?.position;
        if let Layout::Radial { center, .. } = self.layout {
            let (arm_i, _) = self.radial_coords(i).expect("radial layout");
            let (arm_j, _) = self.radial_coords(j).expect("radial layout");
            return Ok(if arm_i == arm_j {
                PairGeometry {
                    requirement: LatticeRequirement::SingleAxis,
                    collision_point: midpoint(pi, pj),
                }
            } else {
                PairGeometry {
                    requirement: LatticeRequirement::RadialCenter,
                    collision_point: center,
                }
            });
        }
        let same_row = (pi[1] - pj[1]).abs() <= COORD_TOL;
        let same_col = (pi[0] - pj[0]).abs() <= COORD_TOL;
        let geometry = if same_row || same_col {
            PairGeometry {
                requirement: LatticeRequirement::SingleAxis,
                collision_point: midpoint(pi, pj),
            }
        } else {
            let orthogonal = match &self.layout {
                Layout::Square { .. } => true,
                Layout::Arbitrary {
                    orthogonal_lattices, ..
                } => *orthogonal_lattices,
                Layout::Radial { .. } => unreachable!(),
            };
            if !orthogonal {
                return Err(MachineError::Validation(format!(
                    "sites {i} and {j} share no lattice line and no orthogonal lattices are configured"
                )));
            }
            // row lattice of i meets column lattice of j
            PairGeometry {
                requirement: LatticeRequirement::TwoOrthogonal,
                collision_point: [pj[0], pi[1]],
            }
        };
        Ok(geometry)
    }
}

fn midpoint(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn site_positions(layout: &Layout) -> Result<Vec<[f64; 2]>> {
    let positions = match layout {
        Layout::Square { pitch, rows, cols } => {
            if *rows == 0 || *cols == 0 {
                return Err(MachineError::Geometry("square layout needs rows, cols > 0".into()));
            }
            (0..rows * cols)
                .map(|s| [(s % cols) as f64 * pitch, (s / cols) as f64 * pitch])
                .collect()
        }
        Layout::Arbitrary { sites, .. } => {
            if sites.is_empty() {
                return Err(MachineError::Geometry("arbitrary layout has no sites".into()));
            }
            if sites.iter().flatten().any(|v| !v.is_finite()) {
                return Err(MachineError::Geometry("site coordinates must be finite".into()));
            }
            sites.clone()
        }
        Layout::Radial {
            arms,
            sites_per_arm,
            center,
            pitch,
        } => {
            if *arms < 2 || *sites_per_arm == 0 {
                return Err(MachineError::Geometry(
                    "radial layout needs at least two arms and one site per arm".into(),
                ));
            }
            (0..arms * sites_per_arm)
                .map(|s| {
                    let (arm, k) = (s / sites_per_arm, s % sites_per_arm);
                    let angle = 2.0 * PI * arm as f64 / *arms as f64;
                    let r = (k + 1) as f64 * pitch;
                    [center[0] + r * angle.cos(), center[1] + r * angle.sin()]
                })
                .collect()
        }
    };
    Ok(positions)
}
