//! Validated problem description: domain, inclusion, data and cost.

use crate::fields::{box_fraction, char_fraction, energy_h1_misfit, integrate_h1_misfit, integrate_l2_misfit, GridSpec, ScalarField};
use crate::moments::{compute_moments, DataJet, MomentTable, Shape};
use crate::poly::Poly;
use crate::{CostKind, Dim, Result};
use serde::{Deserialize, Serialize};

/// Quadrature of the H1 misfit on the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H1Quadrature {
    /// eᵀAe with the finite-volume stiffness matrix; consistent with the
    /// discrete adjoint, so the first-order identity holds exactly on the grid.
    #[default]
    Energy,
    /// Centred differences and the trapezoid rule.
    Centered,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub dim: Dim,
    pub grid: GridSpec,
    pub shape: Shape,
    pub x0: Vec<f64>,
    pub f1: Poly,
    pub f2: Poly,
    pub u_star: Poly,
    pub u_d: Poly,
    pub u_n: Poly,
    pub alpha1: f64,
    pub alpha2: f64,
    pub cost: CostKind,
    pub order: usize,
    pub n_max: usize,
    pub eps: Vec<f64>,
    pub omega: Option<BaselineBox>,
    pub tol: f64,
    pub max_iter: usize,
    pub h1_quadrature: H1Quadrature,
}

impl Problem {
    pub fn jet(&self) -> DataJet {
        DataJet::new(self.dim, &self.x0, &self.f1, &self.f2, &self.u_star)
    }

    pub fn moments(&self) -> Result<MomentTable> {
        compute_moments(&self.shape, self.n_max)
    }

    pub fn with_nodes(&self, nodes: usize) -> Problem {
        let mut p = self.clone();
        let d = self.dim.n();
        p.grid = GridSpec::new(self.dim, &self.grid.lo[..d], &self.grid.hi[..d], nodes, self.grid.dirichlet);
        p
    }

    /// Volume fraction of Ω in each dual cell.
    pub fn baseline_fraction(&self) -> ScalarField {
        match &self.omega {
            Some(b) => box_fraction(&self.grid, &b.lo, &b.hi),
            None => ScalarField::zeros(&self.grid),
        }
    }

    /// Nodal source f_Ω = f1 χ + f2 (1 - χ) for the given fraction field χ.
    pub fn source_from_fraction(&self, chi: &ScalarField) -> ScalarField {
        let g = &self.grid;
        let values = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                let c = chi.values[i].min(1.0);
                self.f1.eval(&x) * c + self.f2.eval(&x) * (1.0 - c)
            })
            .collect();
        ScalarField { grid: g.clone(), values }
    }

    /// Fraction field of Ω_ε = Ω ∪ (x0 + εω); `eps = 0` gives Ω.
    pub fn fraction(&self, eps: f64) -> Result<ScalarField> {
        let mut chi = self.baseline_fraction();
        if eps > 0.0 {
            let inc = char_fraction(&self.grid, &self.x0, eps, &self.shape)?;
            for (c, v) in chi.values.iter_mut().zip(inc.values) {
                *c = (*c + v).min(1.0);
            }
        }
        Ok(chi)
    }

    pub fn u_star_field(&self) -> ScalarField {
        ScalarField::from_poly(&self.grid, &self.u_star)
    }

    /// J(u) for the configured cost.
    pub fn cost_value(&self, u: &ScalarField) -> f64 {
        let us = self.u_star_field();
        match self.cost {
            CostKind::L2 => self.alpha1 * integrate_l2_misfit(u, &us),
            CostKind::H1 => {
                self.alpha2
                    * match self.h1_quadrature {
                        H1Quadrature::Energy => energy_h1_misfit(u, &us),
                        H1Quadrature::Centered => integrate_h1_misfit(u, &us),
                    }
            }
        }
    }

    /// The weight of the selected cost.
    pub fn alpha(&self) -> f64 {
        match self.cost {
            CostKind::L2 => self.alpha1,
            CostKind::H1 => self.alpha2,
        }
    }
}
