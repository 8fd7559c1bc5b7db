//! Fast invariant suite behind the `validate` command.

use std::time::Instant;

use crate::dicke::{
    delay_time, integrate_dicke_ode, intensity_closed_form, inversion_closed_form,
    ladder_transition_time, DickeParams,
};
use crate::lindblad::{evolve, pair_phase_dispersion, EvolutionConfig};
use crate::operators::{collective_operator, AtomRegister, CollectiveKind};
use crate::oscillator::{lindblad_fock_check, FockCheck, OscillatorEnsemble};
use crate::state::{dicke_state, product_mixed_state, singlet_state, AtomSpec};
use crate::{Result, C64};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 8] = [
    ("collective commutation", commutation),
    ("dicke closed form vs rk4", dicke_rk4),
    ("burst peak height", burst_peak),
    ("ladder sum ratio", ladder),
    ("pair dispersion on dicke states", pair_dispersion),
    ("single atom decay", single_atom),
    ("singlet is dark", singlet),
    ("oscillator null case", oscillators),
];

/// Runs every check, never stopping at the first failure.
pub fn run_invariant_suite() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, check)| {
            let start = Instant::now();
            let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// `[J⁺, J⁻] = J^z` on four atoms.
fn commutation() -> Result<(bool, String)> {
    let reg = AtomRegister::new(4)?;
    let jp = collective_operator(CollectiveKind::Raising, &reg)?;
    let jm = collective_operator(CollectiveKind::Lowering, &reg)?;
    let jz = collective_operator(CollectiveKind::Inversion, &reg)?;
    let err = (&jp.commutator(&jm) - &jz).max_abs();
    Ok((err < 1e-14, format!("max deviation {err:.2e}")))
}

fn dicke_rk4() -> Result<(bool, String)> {
    let params = DickeParams::new(200, 1.0)?;
    let td = delay_time(&params);
    let traj = integrate_dicke_ode(&params, 200.0, 5.0 * td, 1e-4)?;
    let err = traj
        .times
        .iter()
        .zip(&traj.inversion)
        .map(|(&t, &j)| (j - inversion_closed_form(t, &params, td)).abs())
        .fold(0.0, f64::max);
    Ok((
        err <= 1e-6 * 200.0,
        format!("max inversion error {err:.2e}"),
    ))
}

fn burst_peak() -> Result<(bool, String)> {
    let params = DickeParams::new(8, 1.0)?;
    let td = delay_time(&params);
    let peak = intensity_closed_form(td, &params, td);
    Ok((
        (peak - 20.25).abs() < 1e-12,
        format!("peak {peak} at t = {td:.5}"),
    ))
}

fn ladder() -> Result<(bool, String)> {
    let params = DickeParams::new(100, 1.0)?;
    let ratio = ladder_transition_time(&params) / delay_time(&params);
    Ok((
        (1.0..=1.2).contains(&ratio),
        format!("ratio {ratio:.4} at N = 100"),
    ))
}

fn pair_dispersion() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n_atoms in 2..=6 {
        let reg = AtomRegister::new(n_atoms)?;
        for n in 0..=n_atoms {
            let state = dicke_state(&reg, n)?;
            let (nf, n_at) = (n as f64, n_atoms as f64);
            let oracle = 0.5 - nf * (n_at - nf) / (n_at * (n_at - 1.0));
            let got = pair_phase_dispersion(&state, 0, n_atoms - 1)?;
            worst = worst.max((got - oracle).abs());
        }
    }
    Ok((worst < 1e-10, format!("max deviation {worst:.2e}")))
}

fn single_atom() -> Result<(bool, String)> {
    let atom = AtomSpec::new(0.8, 0.4, 0.3)?;
    let state = product_mixed_state(&[atom])?;
    let config = EvolutionConfig {
        gamma0: 1.0,
        dt: 1e-3,
        t_max: 3.0,
        record_stride: 10,
    };
    let traj = evolve(&state, &config)?;
    let err = traj
        .records
        .iter()
        .map(|r| {
            let pop = (r.inversion + 1.0) / 2.0;
            let coh = r.per_atom_dipole[0].norm();
            (pop - 0.8 * (-r.t).exp())
                .abs()
                .max((coh - 0.4 * (-r.t / 2.0).exp()).abs())
        })
        .fold(0.0, f64::max);
    Ok((err < 1e-8, format!("max deviation {err:.2e}")))
}

fn singlet() -> Result<(bool, String)> {
    let config = EvolutionConfig {
        gamma0: 1.0,
        dt: 5e-3,
        t_max: 10.0,
        record_stride: 20,
    };
    let initial = singlet_state();
    let traj = evolve(&initial, &config)?;
    let intensity = traj
        .records
        .iter()
        .map(|r| r.intensity_op.abs())
        .fold(0.0, f64::max);
    let drift = (traj.final_state.rho() - initial.rho())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok((
        intensity <= 1e-10 && drift <= 1e-10,
        format!("max intensity {intensity:.2e}, state drift {drift:.2e}"),
    ))
}

fn oscillators() -> Result<(bool, String)> {
    let amps = [C64::new(0.3, 0.1), C64::new(-0.2, 0.4), C64::new(0.1, -0.5)];
    let ensemble = OscillatorEnsemble::new(amps.to_vec(), 1.0)?;
    let exact = ensemble.evolve_amplitudes(2.0)?;
    let rk4 = ensemble.evolve_amplitudes_rk4(2.0, 1e-3)?;
    let ode_err = exact
        .iter()
        .zip(&rk4)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let report = lindblad_fock_check(&FockCheck {
        cutoff: 4,
        amplitudes: vec![C64::new(0.2, 0.0), C64::new(0.0, 0.2)],
        gamma0: 1.0,
        t_max: 2.0,
        dt: 1e-3,
    })?;
    Ok((
        ode_err <= 1e-8 && report.max_deviation <= 1e-5,
        format!(
            "rk4 deviation {ode_err:.2e}, Fock deviation {:.2e}",
            report.max_deviation
        ),
    ))
}
