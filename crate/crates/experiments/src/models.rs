//! Chains and bath layouts with the parameters pinned by each named experiment.

use tgho_core::md::{self, FkPotentialSpec, FkRectification, MdConfig};
use tgho_core::model::linear_gradient_profile;
use tgho_core::{BathSpec, ChainSpec, Model};

use crate::error::Result;

pub const GAMMA: f64 = 1.0;

/// Hot zone at 1 and 0.5, cold zone at 0.2 and 0.1.
pub const FIG3_TEMPERATURES: [f64; 4] = [1.0, 0.5, 0.2, 0.1];
pub const FIG3_K_INTERIOR: f64 = 1.0;

pub const FIG5_SPRINGS: [f64; 6] = [2.0, 2.0, 1.0, 1.0, 0.1, 0.1];
pub const FIG5_T_TOP: f64 = 10.0;

pub const LENGTHDEP_K_LEFT: f64 = 1.0;
pub const LENGTHDEP_K_RIGHT: f64 = 0.1;
pub const LENGTHDEP_K_INTERIOR: f64 = 1.0;
pub const LENGTHDEP_HOT: (f64, f64) = (1.0, 0.5);
pub const LENGTHDEP_COLD: (f64, f64) = (0.2, 0.1);

pub const FK_SPRINGS: [f64; 6] = [0.1, 0.1, 0.1, 1.0, 1.0, 1.0];
pub const FK_N_LEFT: usize = 2;
pub const FK_V_RIGHT: f64 = 1.0;
pub const FK_T_HOT: f64 = 1.0;
pub const FK_T_COLD: f64 = 0.1;

fn two_zone(chain: ChainSpec, n_b: usize, temperatures: &[f64]) -> Result<Model> {
    let baths = BathSpec::edges(chain.n, n_b, n_b, GAMMA).with_bath_temperatures(temperatures);
    Ok(Model::new(chain, baths).map_err(tgho_core::Error::from)?)
}

/// Five beads, two per zone; `k_0 = k_1 = k_left`, `k_4 = k_5 = k_right`.
pub fn fig3(k_left: f64, k_right: f64) -> Model {
    let k = FIG3_K_INTERIOR;
    let chain = ChainSpec::from_springs(vec![k_left, k_left, k, k, k_right, k_right]);
    two_zone(chain, 2, &FIG3_TEMPERATURES).expect("positive sweep springs")
}

/// Five beads with temperatures `(10, 10 - dt_hot, dt_cold, 0)`.
pub fn fig5(dt_hot: f64, dt_cold: f64) -> Model {
    let chain = ChainSpec::from_springs(FIG5_SPRINGS.to_vec());
    let temps = [FIG5_T_TOP, FIG5_T_TOP - dt_hot, dt_cold, 0.0];
    two_zone(chain, 2, &temps).expect("non-negative sweep temperatures")
}

/// `n_b` beads per thermostated zone around `n_i` interior beads.
pub fn lengthdep(n_b: usize, n_i: usize) -> Result<Model> {
    let n = 2 * n_b + n_i;
    let mut springs = vec![LENGTHDEP_K_INTERIOR; n + 1];
    springs[..n_b].fill(LENGTHDEP_K_LEFT);
    springs[n - n_b + 1..].fill(LENGTHDEP_K_RIGHT);
    let mut temps = linear_gradient_profile(LENGTHDEP_HOT.0, LENGTHDEP_HOT.1, n_b)?;
    temps.extend(linear_gradient_profile(LENGTHDEP_COLD.0, LENGTHDEP_COLD.1, n_b)?);
    two_zone(ChainSpec::from_springs(springs), n_b, &temps)
}

/// Soft left group, stiff right group, lattice spacing `period`.
pub fn fig7_chain(period: f64) -> ChainSpec {
    ChainSpec::from_springs(FK_SPRINGS.to_vec()).with_spacing(period)
}

pub fn fig7_potential(v_left: f64, period: f64) -> FkPotentialSpec {
    FkPotentialSpec::split(FK_SPRINGS.len() - 1, FK_N_LEFT, v_left, FK_V_RIGHT, period)
}

/// Uniform springs and substrate; must not rectify.
pub fn fig7_control(period: f64) -> (ChainSpec, FkPotentialSpec) {
    let n = FK_SPRINGS.len() - 1;
    let chain = ChainSpec::uniform(n, FK_V_RIGHT).with_spacing(period);
    let fk = FkPotentialSpec::split(n, FK_N_LEFT, FK_V_RIGHT, FK_V_RIGHT, period);
    (chain, fk)
}

/// Forward and reverse MD with bead 1 and bead N thermostated.
pub fn fig7_run(chain: &ChainSpec, fk: &FkPotentialSpec, md: &MdConfig) -> Result<FkRectification> {
    Ok(md::run_fk_rectification(chain, Some(fk), GAMMA, FK_T_HOT, FK_T_COLD, md)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengthdep_layout() {
        let m = lengthdep(3, 2).unwrap();
        assert_eq!(m.n(), 8);
        assert_eq!(m.chain().springs, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.1, 0.1]);
        let t = m.baths().bath_temperatures();
        assert_eq!(t, vec![1.0, 0.75, 0.5, 0.2, 0.15000000000000002, 0.1]);
        assert_eq!(m.baths().hot, vec![0, 1, 2]);
        assert_eq!(m.baths().cold, vec![5, 6, 7]);
    }

    #[test]
    fn fig5_diagonal_zero_is_single_affinity() {
        assert!(fig5(0.0, 0.0).baths().is_single_affinity());
        assert!(!fig5(2.0, 2.0).baths().is_single_affinity());
    }

    #[test]
    fn fk_groups() {
        let fk = fig7_potential(0.5, 12.0);
        assert_eq!(fk.amplitudes, vec![0.5, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(fig7_chain(12.0).spacing, 12.0);
    }
}
