use serde::{Deserialize, Serialize};

use super::array::{LatticeRequirement, TrapArray};
use super::register::Register;
use super::schedule::schedule_parallel;
use super::{MachineError, Result};
use crate::gates::{collision_phase_gate, hadamard_recipe, CollisionParams, PulseRecipe, PulseSettings};
use crate::statedep::{
    collision_schedule, displacement_schedule, transport_trajectory, Component, CollisionRamp, ThetaRamp,
};

/// Tolerance on the wells meeting (and reaching the collision point).
pub const MEETING_TOL: f64 = 1e-6;
/// Tolerance on the atoms returning to their sites.
pub const RETURN_TOL: f64 = 1e-9;
pub const ADIABATIC_THRESHOLD: f64 = 0.1;
pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// Ratio `η = 1 / (ω T)` of the trap period scale to the ramp duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Adiabaticity {
    pub eta: f64,
    pub adiabatic: bool,
}

pub fn adiabatic_check(trap_freq: f64, ramp_time: f64) -> Result<Adiabaticity> {
    adiabatic_check_with(trap_freq, ramp_time, ADIABATIC_THRESHOLD)
}

pub fn adiabatic_check_with(trap_freq: f64, ramp_time: f64, threshold: f64) -> Result<Adiabaticity> {
    if !(trap_freq > 0.0) || !(ramp_time > 0.0) || !trap_freq.is_finite() || !ramp_time.is_finite() {
        return Err(MachineError::Validation(format!(
            "adiabaticity needs positive trap frequency and ramp time, got {trap_freq}, {ramp_time}"
        )));
    }
    let eta = 1.0 / (trap_freq * ramp_time);
    Ok(Adiabaticity {
        eta,
        adiabatic: eta < threshold,
    })
}

/// Knobs of the gate protocol that are not part of the hardware description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSettings {
    /// Trap frequency of the NFFD wells, used for the adiabaticity check.
    pub trap_freq: f64,
    /// Duration of each trap or screen ramp.
    pub ramp_time: f64,
    pub adiabatic_threshold: f64,
    pub pulse: PulseSettings,
}

impl Default for ProtocolSettings {
    fn default() -> Self {
        Self {
            trap_freq: 100.0,
            ramp_time: 1.0,
            adiabatic_threshold: ADIABATIC_THRESHOLD,
            pulse: PulseSettings::default(),
        }
    }
}

/// One atom component carried along a 1-D lattice line. Positions are
/// measured along `axis` from `origin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegRecord {
    pub qubit: usize,
    pub site: usize,
    pub component: Component,
    pub origin: [f64; 2],
    pub axis: [f64; 2],
    pub start: f64,
    pub target: f64,
    pub end: f64,
    pub ramp: ThetaRamp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepParams {
    Hadamard {
        applied: bool,
        qubits: [usize; 2],
        recipe: Option<PulseRecipe>,
    },
    TrapsOff {
        sites: [usize; 2],
        adiabaticity: Adiabaticity,
    },
    ScreenWithdrawn {
        spectators: Vec<usize>,
        adiabaticity: Adiabaticity,
    },
    Collide {
        requirement: LatticeRequirement,
        collision_point: [f64; 2],
        theta_meet: Vec<f64>,
        u_int: f64,
        t_hold: f64,
        phase: [f64; 2],
        legs: Vec<LegRecord>,
    },
    Return {
        max_return_error: f64,
        legs: Vec<LegRecord>,
    },
    Restore {
        sites: [usize; 2],
        screen_engaged: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: u8,
    pub description: &'static str,
    pub params: StepParams,
    pub validation: String,
}

/// Record of one two-qubit gate run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTrace {
    pub schema_version: u32,
    pub qubits: [usize; 2],
    pub sites: [usize; 2],
    pub steps: Vec<StepRecord>,
}

impl ProtocolTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub const CSV_HEADER: &'static str = "qubit_i,qubit_j,step,description,validation\n";

    /// Summary rows (no header), one per step.
    pub fn csv_rows(&self) -> String {
        let [qi, qj] = self.qubits;
        self.steps
            .iter()
            .map(|s| format!("{qi},{qj},{},{},{}\n", s.step, s.description, s.validation.replace(',', ";")))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        format!("{}{}", Self::CSV_HEADER, self.csv_rows())
    }

    pub fn step(&self, n: u8) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.step == n)
    }
}

/// A leg before it is executed.
#[derive(Debug, Clone)]
struct PlannedLeg {
    qubit: usize,
    site: usize,
    component: Component,
    origin: [f64; 2],
    axis: [f64; 2],
    start: f64,
    target: f64,
    ramp: CollisionRamp,
}

/// Transport plan for a validated pair.
#[derive(Debug, Clone)]
pub struct GatePlan {
    pub requirement: LatticeRequirement,
    pub collision_point: [f64; 2],
    legs: Vec<PlannedLeg>,
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn step_err(step: u8) -> impl Fn(crate::statedep::TransportError) -> MachineError {
    move |e| MachineError::Protocol {
        step,
        reason: e.to_string(),
    }
}

/// Works out which component goes where: `|0⟩` of qubit `qi` meets `|1⟩` of
/// qubit `qj`.
pub fn plan_gate(array: &TrapArray, reg: &Register, qi: usize, qj: usize) -> Result<GatePlan> {
    let (si, sj) = (reg.site_of(qi)?, reg.site_of(qj)?);
    let geometry = array.validate_pair(si, sj)?;
    let pi = array.site(si)?.position;
    let pj = array.site(sj)?.position;
    let lattice = array.lattice();
    let k = lattice.k_lat;
    let period = lattice.period();
    let w0 = lattice.scheme.weights(Component::Zero);
    let w1 = lattice.scheme.weights(Component::One);
    let to_period = |x: f64| -> Result<i64> {
        let r = x / period;
        if (r - r.round()).abs() > 1e-9 * r.abs().max(1.0) {
            return Err(MachineError::Geometry(format!(
                "coordinate {x} is not on a lattice well (period {period})"
            )));
        }
        Ok(r.round() as i64)
    };
    let legs = match geometry.requirement {
        LatticeRequirement::SingleAxis => {
            let (origin, axis) = match array.layout() {
                super::Layout::Radial { center, .. } => (*center, unit(sub(pi, *center))),
                _ => ([0.0, 0.0], unit(sub(pj, pi)).map(f64::abs)),
            };
            let (xi, xj) = (dot(sub(pi, origin), axis), dot(sub(pj, origin), axis));
            let ramp = collision_schedule(to_period(xi)?, to_period(xj)?, period, k, lattice)
                .map_err(step_err(4))?;
            let meet = ramp.meeting_point;
            vec![
                PlannedLeg {
                    qubit: qi,
                    site: si,
                    component: Component::Zero,
                    origin,
                    axis,
                    start: xi,
                    target: meet,
                    ramp: ramp.clone(),
                },
                PlannedLeg {
                    qubit: qj,
                    site: sj,
                    component: Component::One,
                    origin,
                    axis,
                    start: xj,
                    target: meet,
                    ramp,
                },
            ]
        }
        LatticeRequirement::TwoOrthogonal | LatticeRequirement::RadialCenter => {
            let c = geometry.collision_point;
            let leg = |q: usize, site: usize, p: [f64; 2], comp: Component, w| -> Result<PlannedLeg> {
                // each component rides its own line, measured from the line's
                // intersection with the collision point
                let axis = unit(sub(p, c));
                let start = dot(sub(p, c), axis);
                to_period(start)?;
                let ramp = displacement_schedule(w, k, start, 0.0).map_err(step_err(4))?;
                Ok(PlannedLeg {
                    qubit: q,
                    site,
                    component: comp,
                    origin: c,
                    axis,
                    start,
                    target: 0.0,
                    ramp,
                })
            };
            vec![
                leg(qi, si, pi, Component::Zero, w0)?,
                leg(qj, sj, pj, Component::One, w1)?,
            ]
        }
    };
    Ok(GatePlan {
        requirement: geometry.requirement,
        collision_point: geometry.collision_point,
        legs,
    })
}

fn leg_record(leg: &PlannedLeg, ramp: &ThetaRamp, end: f64) -> LegRecord {
    LegRecord {
        qubit: leg.qubit,
        site: leg.site,
        component: leg.component,
        origin: leg.origin,
        axis: leg.axis,
        start: leg.start,
        target: leg.target,
        end,
        ramp: ramp.clone(),
    }
}

/// Runs the six-step collisional gate on qubits `(qi, qj)`. Register and
/// array are only updated when every step succeeds.
pub fn run_two_qubit_gate(
    reg: &mut Register,
    array: &mut TrapArray,
    qi: usize,
    qj: usize,
    cp: &CollisionParams,
    pre_hadamard: bool,
    settings: &ProtocolSettings,
) -> Result<ProtocolTrace> {
    let mut r = reg.clone();
    let mut a = array.clone();
    let trace = gate_steps(&mut r, &mut a, qi, qj, cp, pre_hadamard, settings)?;
    *reg = r;
    *array = a;
    Ok(trace)
}

fn gate_steps(
    reg: &mut Register,
    array: &mut TrapArray,
    qi: usize,
    qj: usize,
    cp: &CollisionParams,
    pre_hadamard: bool,
    settings: &ProtocolSettings,
) -> Result<ProtocolTrace> {
    cp.validate()?;
    if qi == qj {
        return Err(MachineError::Validation(format!("gate pair uses qubit {qi} twice")));
    }
    let plan = plan_gate(array, reg, qi, qj)?;
    let sites = [reg.site_of(qi)?, reg.site_of(qj)?];
    let lattice = *array.lattice();
    let mut steps = Vec::with_capacity(6);

    // STEP 1
    let recipe = if pre_hadamard {
        let recipe = hadamard_recipe(&settings.pulse)?;
        let u = recipe.unitary();
        reg.apply_one_qubit(qi, &u)?;
        reg.apply_one_qubit(qj, &u)?;
        Some(recipe)
    } else {
        None
    };
    steps.push(StepRecord {
        step: 1,
        description: "single-qubit preparation",
        params: StepParams::Hadamard {
            applied: pre_hadamard,
            qubits: [qi, qj],
            recipe,
        },
        validation: "ok".into(),
    });

    // STEP 2
    let adiabaticity = adiabatic_check_with(settings.trap_freq, settings.ramp_time, settings.adiabatic_threshold)?;
    for &s in &sites {
        if !array.site(s)?.trap_on {
            return Err(MachineError::Protocol {
                step: 2,
                reason: format!("trap at site {s} is already off"),
            });
        }
    }
    if !adiabaticity.adiabatic {
        return Err(MachineError::Protocol {
            step: 2,
            reason: format!("trap turn-off is not adiabatic (eta = {})", adiabaticity.eta),
        });
    }
    for &s in &sites {
        array.site_mut(s)?.trap_on = false;
    }
    steps.push(StepRecord {
        step: 2,
        description: "pair traps off",
        params: StepParams::TrapsOff { sites, adiabaticity },
        validation: "ok".into(),
    });

    // STEP 3
    if !array.screen_engaged {
        return Err(MachineError::Protocol {
            step: 3,
            reason: "screen is not engaged".into(),
        });
    }
    array.screen_engaged = false;
    let spectators = (0..reg.n()).filter(|&q| q != qi && q != qj).collect();
    steps.push(StepRecord {
        step: 3,
        description: "screen withdrawn",
        params: StepParams::ScreenWithdrawn {
            spectators,
            adiabaticity,
        },
        validation: "ok".into(),
    });

    // STEP 4
    let mut forward_legs = Vec::with_capacity(plan.legs.len());
    for leg in &plan.legs {
        let w = lattice.scheme.weights(leg.component);
        let traj = transport_trajectory(&leg.ramp.forward, w, lattice.k_lat, leg.start).map_err(step_err(4))?;
        let end = traj.last().expect("non-empty ramp").1;
        if (end - leg.target).abs() > MEETING_TOL {
            return Err(MachineError::Protocol {
                step: 4,
                reason: format!(
                    "component {:?} of qubit {} ends at {end}, expected {}",
                    leg.component, leg.qubit, leg.target
                ),
            });
        }
        forward_legs.push(leg_record(leg, &leg.ramp.forward, end));
    }
    let points: Vec<[f64; 2]> = forward_legs
        .iter()
        .map(|l| [l.origin[0] + l.end * l.axis[0], l.origin[1] + l.end * l.axis[1]])
        .collect();
    let gap = (points[0][0] - points[1][0]).hypot(points[0][1] - points[1][1]);
    if gap > MEETING_TOL {
        return Err(MachineError::Protocol {
            step: 4,
            reason: format!("wells do not meet (gap {gap})"),
        });
    }
    reg.apply_two_qubit(qi, qj, &collision_phase_gate(cp))?;
    let phase = cp.phase();
    let theta_meet = if plan.requirement == LatticeRequirement::SingleAxis {
        vec![plan.legs[0].ramp.theta_meet]
    } else {
        plan.legs.iter().map(|l| l.ramp.theta_meet).collect()
    };
    steps.push(StepRecord {
        step: 4,
        description: "state-dependent transport and collision",
        params: StepParams::Collide {
            requirement: plan.requirement,
            collision_point: plan.collision_point,
            theta_meet,
            u_int: cp.u_int,
            t_hold: cp.t_hold,
            phase: [phase.re, phase.im],
            legs: forward_legs,
        },
        validation: format!("wells met within {gap:e}"),
    });

    // STEP 5
    let mut back_legs = Vec::with_capacity(plan.legs.len());
    let mut max_return_error: f64 = 0.0;
    for leg in &plan.legs {
        let w = lattice.scheme.weights(leg.component);
        let traj = transport_trajectory(&leg.ramp.full(), w, lattice.k_lat, leg.start).map_err(step_err(5))?;
        let end = traj.last().expect("non-empty ramp").1;
        let err = (end - leg.start).abs();
        max_return_error = max_return_error.max(err);
        if err > RETURN_TOL {
            return Err(MachineError::Protocol {
                step: 5,
                reason: format!("qubit {} returns to {end}, not {}", leg.qubit, leg.start),
            });
        }
        back_legs.push(leg_record(leg, &leg.ramp.reverse, end));
    }
    steps.push(StepRecord {
        step: 5,
        description: "reverse transport",
        params: StepParams::Return {
            max_return_error,
            legs: back_legs,
        },
        validation: format!("returned within {max_return_error:e}"),
    });

    // STEP 6
    for &s in &sites {
        array.site_mut(s)?.trap_on = true;
    }
    array.screen_engaged = true;
    steps.push(StepRecord {
        step: 6,
        description: "traps and screen restored",
        params: StepParams::Restore {
            sites,
            screen_engaged: true,
        },
        validation: "ok".into(),
    });

    Ok(ProtocolTrace {
        schema_version: TRACE_SCHEMA_VERSION,
        qubits: [qi, qj],
        sites,
        steps,
    })
}

/// Runs several gates in one batch. Fails without touching the register if
/// the pairs cannot share a batch.
pub fn run_simultaneous(
    reg: &mut Register,
    array: &mut TrapArray,
    pairs: &[(usize, usize)],
    cp: &CollisionParams,
    pre_hadamard: bool,
    settings: &ProtocolSettings,
) -> Result<Vec<ProtocolTrace>> {
    let site_pairs = pairs
        .iter()
        .map(|&(a, b)| Ok((reg.site_of(a)?, reg.site_of(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let batches = schedule_parallel(array, &site_pairs)?;
    if batches.len() > 1 {
        return Err(MachineError::NotSimultaneous {
            batches: batches.len(),
        });
    }
    let mut r = reg.clone();
    let mut a = array.clone();
    let traces = pairs
        .iter()
        .map(|&(qi, qj)| gate_steps(&mut r, &mut a, qi, qj, cp, pre_hadamard, settings))
        .collect::<Result<Vec<_>>>()?;
    *reg = r;
    *array = a;
    Ok(traces)
}
