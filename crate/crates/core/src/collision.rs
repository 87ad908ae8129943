//! Phonon collision operator (acoustic elastic plus optical emission/absorption)
//! projected onto piecewise constants in momentum.
//!
//! The gain term gathers angular sums at w and w +- gamma; the loss term is the
//! coefficient times the total out-scattering rate. Rates that would point
//! outside the energy range are dropped on both sides, so every spatial cell
//! conserves particles exactly in exact arithmetic.

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::material::{Dimensionless, MomentumTables};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CollisionModel {
    Off,
    Elastic,
    #[default]
    Full,
}

#[derive(Debug, Clone)]
pub struct CollisionOperator {
    model: CollisionModel,
    nw: usize,
    n_angle: usize,
    shift: usize,
    acoustic: f64,
    emission: f64,
    absorption: f64,
    jacobian: Vec<f64>,
    angle_weight: Vec<f64>,
    loss_rate: Vec<f64>,
}

impl CollisionOperator {
    pub fn new(
        grid: &PhaseGrid,
        tables: &MomentumTables,
        dims: &Dimensionless,
        model: CollisionModel,
    ) -> Result<Self> {
        let shift = match model {
            CollisionModel::Full => {
                if !grid.w.is_uniform(1e-12) {
                    return Err(Error::InvalidGrid("inelastic collisions need a uniform energy grid".into()));
                }
                grid.phonon_shift
                    .ok_or_else(|| Error::InvalidGrid("inelastic collisions need a phonon-aligned energy grid".into()))?
            }
            _ => 0,
        };
        let (emission, absorption) = match model {
            CollisionModel::Full => (dims.c_emission, dims.c_absorption),
            _ => (0.0, 0.0),
        };
        let acoustic = if model == CollisionModel::Off { 0.0 } else { dims.c_acoustic };
        let n_angle = grid.nmu() * grid.nphi();
        let angle_weight: Vec<f64> = (0..grid.nmu())
            .flat_map(|m| (0..grid.nphi()).map(move |n| grid.mu.width(m) * grid.phi.width(n)))
            .collect();
        let total_angle: f64 = angle_weight.iter().sum();
        let nw = grid.nw();
        let jacobian = tables.jacobian_mean.clone();
        let at = |k: isize| if k >= 0 && (k as usize) < nw { jacobian[k as usize] } else { 0.0 };
        let loss_rate = (0..nw as isize)
            .map(|k| {
                total_angle
                    * (acoustic * at(k) + emission * at(k - shift as isize) + absorption * at(k + shift as isize))
            })
            .collect();
        Ok(CollisionOperator {
            model,
            nw,
            n_angle,
            shift,
            acoustic,
            emission,
            absorption,
            jacobian,
            angle_weight,
            loss_rate,
        })
    }

    pub fn model(&self) -> CollisionModel {
        self.model
    }

    /// Largest out-scattering rate, used for the time-step bound.
    pub fn max_loss_rate(&self) -> f64 {
        self.loss_rate.iter().cloned().fold(0.0, f64::max)
    }

    /// Adds the collision term of one coefficient block (all momentum cells of a
    /// spatial cell) to `out`. `angular` is scratch of length `nw`.
    pub fn accumulate(&self, coeff: &[f64], out: &mut [f64], angular: &mut [f64]) {
        if self.model == CollisionModel::Off {
            return;
        }
        let na = self.n_angle;
        for k in 0..self.nw {
            let block = &coeff[k * na..(k + 1) * na];
            angular[k] = block.iter().zip(&self.angle_weight).map(|(c, w)| c * w).sum();
        }
        let g = self.shift;
        for k in 0..self.nw {
            let mut gathered = self.acoustic * angular[k];
            if g > 0 {
                if k + g < self.nw {
                    gathered += self.emission * angular[k + g];
                }
                if k >= g {
                    gathered += self.absorption * angular[k - g];
                }
            }
            let gain = self.jacobian[k] * gathered;
            let loss = self.loss_rate[k];
            let src = &coeff[k * na..(k + 1) * na];
            for (o, c) in out[k * na..(k + 1) * na].iter_mut().zip(src) {
                *o += gain - loss * c;
            }
        }
    }

    /// Collision term of one block as a fresh vector.
    pub fn evaluate(&self, coeff: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; coeff.len()];
        let mut scratch = vec![0.0; self.nw];
        self.accumulate(coeff, &mut out, &mut scratch);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::material::{Material, Scales};
    use proptest::prelude::*;

    fn setup(model: CollisionModel) -> (PhaseGrid, MomentumTables, CollisionOperator) {
        let d = Dimensionless::new(&Material::default(), &Scales::default()).unwrap();
        let grid = PhaseGrid::build(&GridSpec {
            lx: 1.0,
            ly: 1.0,
            w_max: 5.0 * d.gamma,
            nx: 1,
            ny: 1,
            nw: 10,
            nmu: 4,
            nphi: 4,
            align_to: Some(d.gamma),
        })
        .unwrap();
        let tables = MomentumTables::new(&grid, d.band());
        let op = CollisionOperator::new(&grid, &tables, &d, model).unwrap();
        (grid, tables, op)
    }

    fn mass(grid: &PhaseGrid, block: &[f64]) -> f64 {
        block
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let (k, m, n) = grid.momentum_cell(idx);
                c * grid.momentum_volume(k, m, n)
            })
            .sum()
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let (grid, _, op) = setup(CollisionModel::Full);
        let out = op.evaluate(&vec![0.0; grid.n_momentum()]);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn misaligned_grid_is_rejected_for_inelastic_model() {
        let d = Dimensionless::new(&Material::default(), &Scales::default()).unwrap();
        let grid = PhaseGrid::build(&GridSpec {
            lx: 1.0,
            ly: 1.0,
            w_max: 10.0,
            nx: 1,
            ny: 1,
            nw: 10,
            nmu: 2,
            nphi: 2,
            align_to: None,
        })
        .unwrap();
        let tables = MomentumTables::new(&grid, d.band());
        assert!(CollisionOperator::new(&grid, &tables, &d, CollisionModel::Full).is_err());
        assert!(CollisionOperator::new(&grid, &tables, &d, CollisionModel::Elastic).is_ok());
    }

    #[test]
    fn elastic_term_vanishes_on_isotropic_input() {
        let (grid, _, op) = setup(CollisionModel::Elastic);
        let mut block = vec![0.0; grid.n_momentum()];
        for m in 0..4 {
            for n in 0..4 {
                block[grid.momentum_index(3, m, n)] = 2.0;
            }
        }
        let out = op.evaluate(&block);
        assert!(out.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn isotropic_shell_scatters_to_neighbouring_phonon_shells() {
        let (grid, tables, op) = setup(CollisionModel::Full);
        let d = Dimensionless::new(&Material::default(), &Scales::default()).unwrap();
        assert_eq!(grid.phonon_shift, Some(2));
        let mut block = vec![0.0; grid.n_momentum()];
        for m in 0..4 {
            for n in 0..4 {
                block[grid.momentum_index(4, m, n)] = 1.0;
            }
        }
        let out = op.evaluate(&block);
        let solid = 2.0 * std::f64::consts::PI;
        let s = &tables.jacobian_mean;
        let expect = |k: usize| match k {
            2 => s[2] * d.c_emission * solid,
            6 => s[6] * d.c_absorption * solid,
            4 => s[4] * d.c_acoustic * solid - solid * (d.c_acoustic * s[4] + d.c_emission * s[2] + d.c_absorption * s[6]),
            _ => 0.0,
        };
        for idx in 0..out.len() {
            let (k, _, _) = grid.momentum_cell(idx);
            assert!((out[idx] - expect(k)).abs() < 1e-12, "k={k}: {} vs {}", out[idx], expect(k));
        }
    }

    proptest! {
        #[test]
        fn every_cell_conserves_mass(values in proptest::collection::vec(0.0f64..3.0, 160)) {
            let (grid, _, op) = setup(CollisionModel::Full);
            let out = op.evaluate(&values);
            let scale = mass(&grid, &values).abs().max(1e-300) * op.max_loss_rate();
            prop_assert!(mass(&grid, &out).abs() <= 1e-12 * scale);
        }

        #[test]
        fn operator_is_linear(a in proptest::collection::vec(-1.0f64..1.0, 160),
                              b in proptest::collection::vec(-1.0f64..1.0, 160),
                              s in -3.0f64..3.0) {
            let (_, _, op) = setup(CollisionModel::Full);
            let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
            let ca = op.evaluate(&a);
            let cb = op.evaluate(&b);
            let cc = op.evaluate(&combo);
            for i in 0..a.len() {
                prop_assert!((cc[i] - (ca[i] + s * cb[i])).abs() < 1e-12);
            }
        }
    }
}
