//! Named model systems with their processes, test cycles and sampling box.

use std::sync::Arc;

use crate::chains::Chain;
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{Params, SamplingBox, ScalarExpr};
use crate::forms::{DifferentialForm, VectorField};
use crate::pfaff;

use super::{EmSystem, FluidSystem};

#[derive(Debug, Clone)]
pub enum Model {
    Fluid(FluidSystem),
    Em(EmSystem),
}

impl Model {
    pub fn action(&self) -> DifferentialForm {
        match self {
            Model::Fluid(f) => f.action(),
            Model::Em(e) => e.action(),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        match self {
            Model::Fluid(f) => f.chart(),
            Model::Em(e) => e.chart(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParamDoc {
    pub name: &'static str,
    pub value: f64,
    pub meaning: &'static str,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub model: Model,
    pub parameters: Vec<ParamDoc>,
    pub processes: Vec<(String, VectorField)>,
    /// Closed 1-chains.
    pub cycles: Vec<(String, Chain)>,
    /// Closed 2-chains.
    pub surfaces: Vec<(String, Chain)>,
    /// Chains with boundary, for absolute invariants.
    pub patches: Vec<(String, Chain)>,
    pub domain: SamplingBox,
}

impl Scenario {
    pub fn params(&self) -> Params {
        self.parameters.iter().map(|p| (p.name.to_string(), p.value)).collect()
    }
}

const NAMES: &[&str] = &[
    "euler.rigid_rotation",
    "euler.rigid_rotation_balanced",
    "ns.decaying_shear",
    "ns.decaying_beltrami",
    "fluid.beltrami_abc",
    "em.plane_wave",
    "em.torsion_nonzero",
];

pub fn preset_names() -> &'static [&'static str] {
    NAMES
}

fn p(name: &str) -> ScalarExpr {
    ScalarExpr::param(name)
}

fn x() -> ScalarExpr {
    ScalarExpr::coord(0)
}

fn y() -> ScalarExpr {
    ScalarExpr::coord(1)
}

fn z() -> ScalarExpr {
    ScalarExpr::coord(2)
}

fn t() -> ScalarExpr {
    ScalarExpr::coord(3)
}

fn abc() -> [ScalarExpr; 3] {
    [z().sin() + y().cos(), x().sin() + z().cos(), y().sin() + x().cos()]
}

fn rigid(omega: &ScalarExpr) -> [ScalarExpr; 3] {
    [-(omega * &y()), omega * &x(), ScalarExpr::zero()]
}

fn half_square(v: &[ScalarExpr; 3]) -> ScalarExpr {
    (super::vector::dot(v, v) / ScalarExpr::int(2)).simplify()
}

pub fn preset(name: &str) -> Result<Scenario> {
    let omega_doc = ParamDoc {
        name: "Omega",
        value: 1.0,
        meaning: "angular velocity",
    };
    let (description, model, parameters) = match name {
        "euler.rigid_rotation" => (
            "rigid rotation v = (-Omega y, Omega x, 0) without pressure support; \
             closed flow with exact work",
            Model::Fluid(FluidSystem::new(rigid(&p("Omega")), ScalarExpr::zero(), ScalarExpr::zero())),
            vec![omega_doc],
        ),
        "euler.rigid_rotation_balanced" => (
            "rigid rotation with centripetal pressure P = Omega^2 (x^2 + y^2)/2; extremal",
            Model::Fluid(FluidSystem::new(
                rigid(&p("Omega")),
                p("Omega").powi(2) * (x().powi(2) + y().powi(2)) / ScalarExpr::int(2),
                ScalarExpr::zero(),
            )),
            vec![omega_doc],
        ),
        "ns.decaying_shear" => (
            "viscous shear v = (U cos(k y) exp(-nu k^2 t), 0, 0), P = 0",
            Model::Fluid(FluidSystem::new(
                [
                    p("U") * (p("k") * y()).cos() * (-(p("nu") * p("k").powi(2) * t())).exp(),
                    ScalarExpr::zero(),
                    ScalarExpr::zero(),
                ],
                ScalarExpr::zero(),
                p("nu"),
            )),
            vec![
                ParamDoc {
                    name: "U",
                    value: 1.0,
                    meaning: "amplitude",
                },
                ParamDoc {
                    name: "k",
                    value: 1.0,
                    meaning: "wavenumber",
                },
                ParamDoc {
                    name: "nu",
                    value: 0.1,
                    meaning: "kinematic viscosity",
                },
            ],
        ),
        "ns.decaying_beltrami" => {
            let decay = (-(p("nu") * t())).exp();
            let v = abc().map(|c| &decay * &c);
            let pr = -half_square(&v);
            (
                "viscous ABC flow v = exp(-nu t)(sin z + cos y, sin x + cos z, sin y + cos x), P = -v^2/2",
                Model::Fluid(FluidSystem::new(v, pr, p("nu"))),
                vec![ParamDoc {
                    name: "nu",
                    value: 0.1,
                    meaning: "kinematic viscosity",
                }],
            )
        }
        "fluid.beltrami_abc" => {
            let v = abc();
            let pr = -half_square(&v);
            (
                "steady ABC flow (sin z + cos y, sin x + cos z, sin y + cos x) with P = -v^2/2, so H = 0",
                Model::Fluid(FluidSystem::new(v, pr, ScalarExpr::zero())),
                vec![],
            )
        }
        "em.plane_wave" => (
            "plane wave a = (0, cos(z - t), 0), phi = 0; E.B = 0",
            Model::Em(EmSystem::new(
                [ScalarExpr::zero(), (z() - t()).cos(), ScalarExpr::zero()],
                ScalarExpr::zero(),
            )),
            vec![],
        ),
        "em.torsion_nonzero" => (
            "a = lambda (-y, x, 0), phi = mu z; E.B = -2 lambda mu",
            Model::Em(EmSystem::new(rigid(&p("lambda")), p("mu") * z())),
            vec![
                ParamDoc {
                    name: "lambda",
                    value: 1.0,
                    meaning: "magnetic field strength / 2",
                },
                ParamDoc {
                    name: "mu",
                    value: 0.5,
                    meaning: "electric field strength",
                },
            ],
        ),
        other => return Err(Error::Usage(format!("unknown preset `{other}`"))),
    };
    let name = NAMES.iter().find(|n| **n == name).copied().expect("listed");
    let params: Params = parameters.iter().map(|d| (d.name.to_string(), d.value)).collect();
    let domain = SamplingBox::cube(4, -1.5, 1.5).with_params(params.clone());
    let chart = model.chart().clone();

    let processes = match &model {
        Model::Fluid(f) => vec![("flow".to_string(), f.flow_field())],
        Model::Em(e) => {
            let t = pfaff::torsion_data(&e.action(), &domain)?;
            vec![("torsion".to_string(), t.vector)]
        }
    };
    let cycles = vec![
        (
            "circle_xy".to_string(),
            Chain::circle(&chart, (0, 1), &[0.3, 0.2, 0.1, 0.0], 0.8, 1)?.with_params(params.clone()),
        ),
        (
            "circle_yz".to_string(),
            Chain::circle(&chart, (1, 2), &[0.1, -0.2, 0.3, 0.2], 0.6, 1)?.with_params(params.clone()),
        ),
    ];
    let surfaces = vec![(
        "sphere".to_string(),
        Chain::sphere(&chart, [0, 1, 2], &[0.2, 0.1, -0.1, 0.0], 0.7)?.with_params(params.clone()),
    )];
    let patches = vec![(
        "disk_xy".to_string(),
        Chain::disk(&chart, (0, 1), &[0.3, 0.2, 0.1, 0.0], 0.8)?.with_params(params),
    )];
    Ok(Scenario {
        name,
        description,
        model,
        parameters,
        processes,
        cycles,
        surfaces,
        patches,
        domain,
    })
}
