//! All measures for one parameter point, in one serializable record.

use serde::Serialize;

use crate::covariance::{build_covariance, invariants, standard_form};
use crate::criteria::{duan_products, esd_time, symplectic_measure, DuanResult};
use crate::error::Result;
use crate::formation::{entanglement_of_formation, reduced_spectrum};
use crate::model::{make_state, moments, ModelParams};
use crate::spectrum::{log_negativity, negativity, PtSpectrum};

/// Eigenvalues listed in [`EntanglementReport::spectrum_head`].
pub const SPECTRUM_HEAD: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    /// Converts a natural-log quantity to this base.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
            LogBase::Ten => nats / std::f64::consts::LN_10,
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            other => Err(format!("log base must be e, 2 or 10, got {other:?}")),
        }
    }
}

/// Field order is the serialized order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct EntanglementReport {
    pub sigma: f64,
    pub d: f64,
    pub mass: f64,
    pub hbar: f64,
    pub t: f64,
    pub R: f64,
    pub duan_plus: DuanResult<f64>,
    pub duan_minus: DuanResult<f64>,
    /// `None` when the raw product test never detects entanglement (`R <= 1`).
    pub t_d: Option<f64>,
    pub E_symplectic: f64,
    pub E_N: f64,
    pub E_F: f64,
    pub N: f64,
    pub E_N_minus_E_symplectic: f64,
    pub log_base: LogBase,
    /// Largest-`|lambda|` partial-transpose eigenvalues.
    pub spectrum_head: Vec<f64>,
}

pub fn entanglement_report(params: &ModelParams<f64>, t: f64, base: LogBase) -> Result<EntanglementReport> {
    let state = make_state(*params, t)?;
    let mom = moments(&state);
    let (duan_plus, duan_minus) = duan_products(&mom, params.hbar);
    let cov = build_covariance(&mom, params.sigma, params.hbar)?;
    let sympl = symplectic_measure(&standard_form(&cov)?, &invariants(&cov))?;
    let spec = PtSpectrum::from_params(params)?;
    let ratio = params.ratio();
    let e_n = log_negativity(&spec);
    let e_f = entanglement_of_formation(&reduced_spectrum(&spec));
    Ok(EntanglementReport {
        sigma: params.sigma,
        d: params.d,
        mass: params.mass,
        hbar: params.hbar,
        t,
        R: ratio,
        duan_plus,
        duan_minus,
        t_d: if ratio > 1.0 { esd_time(params)? } else { None },
        E_symplectic: base.convert(sympl.entanglement),
        E_N: base.convert(e_n),
        E_F: base.convert(e_f),
        N: negativity(&spec),
        E_N_minus_E_symplectic: base.convert(e_n - sympl.entanglement),
        log_base: base,
        spectrum_head: spec.head(SPECTRUM_HEAD),
    })
}
