//! Scenario configuration: the JSON schema, validation, and resolution of
//! `"auto"` parameters into concrete numbers.
//!
//! A scenario is a single JSON document with five sections: `box`,
//! `actuation` (either direct `u_lb`/`u_ub`/`w_max` or a `quad` thrust
//! model), `rcbf` (`a_max` and `alpha`, each a number or `"auto"`),
//! `initial`, and `sim`. Angles are given in degrees and converted once at
//! load. The resolved configuration — with every `"auto"` replaced by the
//! derived number and any command-line overrides applied — is echoed in all
//! command outputs and reproduces the same run when fed back in.

use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use rcbf::filter::{alpha_min, derive_a_max};
use rcbf::plant::QuadAltitudeParams;
use rcbf::sim::{Controller, DisturbanceKind, DisturbanceModel, Integrator, Scenario, SimConfig};
use rcbf::{ActuationLimits, BoxProfile, RcbfParams, State2, ALPHA_AUTO_FACTOR};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "box")]
    pub box_section: BoxSection,
    pub actuation: ActuationSection,
    pub rcbf: RcbfSection,
    pub initial: InitialSection,
    pub sim: SimSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    pub l_lb0: f64,
    pub l_ub0: f64,
    /// Constant bound rate (m/s).
    pub rate: f64,
    /// Declared bound on the bound acceleration (m/s²); enters the
    /// deceleration-margin rule even though the shipped profile is affine.
    #[serde(default)]
    pub l_ddot_max: f64,
    #[serde(default)]
    pub t0: f64,
}

/// Either the three direct fields or `quad`, never both.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_lb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_ub: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSection {
    pub mass: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub w_z_max: f64,
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcbfSection {
    pub a_max: Setting,
    pub alpha: Setting,
}

/// A number, or `"auto"` to derive the value from the rest of the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Auto,
    Value(f64),
}

impl Serialize for Setting {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Setting::Auto => serializer.serialize_str("auto"),
            Setting::Value(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Setting {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct SettingVisitor;
        impl Visitor<'_> for SettingVisitor {
            type Value = Setting;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a number or the string \"auto\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Setting, E> {
                Ok(Setting::Value(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Setting, E> {
                Ok(Setting::Value(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Setting, E> {
                Ok(Setting::Value(v as f64))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Setting, E> {
                if s == "auto" {
                    Ok(Setting::Auto)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(s), &self))
                }
            }
        }
        deserializer.deserialize_any(SettingVisitor)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub x1: f64,
    pub x2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub integrator: IntegratorSection,
    pub disturbance: DisturbanceSection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_violation_tol")]
    pub violation_tol: f64,
    #[serde(default)]
    pub controller: ControllerSection,
}

fn default_violation_tol() -> f64 {
    rcbf::DEFAULT_VIOLATION_TOL
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorSection {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DisturbanceSection {
    ConstantMax,
    ConstantMin,
    Zero,
    Sinusoidal { amplitude: f64, period: f64 },
    UniformRandom,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ControllerSection {
    #[default]
    Midpoint,
    MinDeviation {
        u_nom: f64,
    },
}

/// A scenario with all parameters concrete.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub box_profile: BoxProfile,
    pub limits: ActuationLimits,
    pub params: RcbfParams,
    pub alpha_min: f64,
    pub quad: Option<QuadAltitudeParams>,
    pub initial: State2,
    /// The input configuration with `"auto"` fields replaced by the resolved
    /// numbers; echoed in every report.
    pub echo: ScenarioConfig,
}

pub fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn resolve(cfg: &ScenarioConfig) -> Result<Resolved, CliError> {
    let b = &cfg.box_section;
    let rate = b.rate;
    let t0 = b.t0;
    let box_profile = BoxProfile::with_profile(
        b.l_lb0,
        b.l_ub0,
        t0,
        move |t| rate * (t - t0),
        move |_| rate,
        |_| 0.0,
        b.l_ddot_max,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    let (limits, quad) = resolve_actuation(&cfg.actuation)?;

    let a_max = match cfg.rcbf.a_max {
        Setting::Value(v) => {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("rcbf.a_max must be > 0, got {v}")));
            }
            v
        }
        Setting::Auto => derive_a_max(&limits, b.l_ddot_max).map_err(CliError::from)?,
    };
    let alpha_min_val = alpha_min(&box_profile, &limits, a_max).map_err(CliError::from)?;
    let alpha = match cfg.rcbf.alpha {
        Setting::Value(v) => {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("rcbf.alpha must be > 0, got {v}")));
            }
            v
        }
        Setting::Auto => {
            if alpha_min_val > 0.0 {
                alpha_min_val * ALPHA_AUTO_FACTOR
            } else {
                1.0
            }
        }
    };
    let params = RcbfParams::new(a_max, alpha).map_err(|e| CliError::Config(e.to_string()))?;

    let mut echo = cfg.clone();
    echo.rcbf.a_max = Setting::Value(a_max);
    echo.rcbf.alpha = Setting::Value(alpha);

    Ok(Resolved {
        box_profile,
        limits,
        params,
        alpha_min: alpha_min_val,
        quad,
        initial: State2::new(cfg.initial.x1, cfg.initial.x2, t0),
        echo,
    })
}

fn resolve_actuation(
    a: &ActuationSection,
) -> Result<(ActuationLimits, Option<QuadAltitudeParams>), CliError> {
    match (&a.quad, a.u_lb, a.u_ub, a.w_max) {
        (Some(q), None, None, None) => {
            let quad = QuadAltitudeParams::new(
                q.mass,
                q.gravity,
                q.phi_deg.to_radians(),
                q.theta_deg.to_radians(),
                q.f_min,
                q.f_max,
                q.w_z_max,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let limits = quad
                .actuation_limits()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok((limits, Some(quad)))
        }
        (None, Some(u_lb), Some(u_ub), Some(w_max)) => {
            let limits = ActuationLimits::new(u_lb, u_ub, w_max)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok((limits, None))
        }
        (Some(_), _, _, _) => Err(CliError::Config(
            "actuation: give either quad or u_lb/u_ub/w_max, not both".into(),
        )),
        _ => Err(CliError::Config(
            "actuation: u_lb, u_ub, and w_max must all be set (or use quad)".into(),
        )),
    }
}

impl Resolved {
    /// Assemble the closed-loop scenario for `sim::run`.
    pub fn to_scenario(&self, sim: &SimSection) -> Result<Scenario, CliError> {
        let kind = match &sim.disturbance {
            DisturbanceSection::ConstantMax => DisturbanceKind::ConstantMax,
            DisturbanceSection::ConstantMin => DisturbanceKind::ConstantMin,
            DisturbanceSection::Zero => DisturbanceKind::Zero,
            DisturbanceSection::Sinusoidal { amplitude, period } => DisturbanceKind::Sinusoidal {
                amplitude: *amplitude,
                period: *period,
            },
            DisturbanceSection::UniformRandom => DisturbanceKind::UniformRandom,
        };
        let disturbance = DisturbanceModel::new(kind, self.limits.w_max)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let controller = match sim.controller {
            ControllerSection::Midpoint => Controller::Midpoint,
            ControllerSection::MinDeviation { u_nom } => Controller::min_deviation_const(u_nom),
        };
        Ok(Scenario {
            box_profile: self.box_profile.clone(),
            limits: self.limits,
            params: self.params,
            initial: self.initial,
            disturbance,
            config: SimConfig {
                t_end: sim.t_end,
                dt: sim.dt,
                integrator: match sim.integrator {
                    IntegratorSection::Rk4 => Integrator::Rk4,
                    IntegratorSection::Euler => Integrator::Euler,
                },
                violation_tol: sim.violation_tol,
                controller,
                seed: sim.seed,
            },
            quad: self.quad,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_config(alpha: Setting) -> ScenarioConfig {
        ScenarioConfig {
            box_section: BoxSection {
                l_lb0: 0.0,
                l_ub0: 20.0,
                rate: 1.0,
                l_ddot_max: 0.0,
                t0: 0.0,
            },
            actuation: ActuationSection {
                u_lb: Some(-5.1329),
                u_ub: Some(24.7529),
                w_max: Some(5.0),
                quad: None,
            },
            rcbf: RcbfSection {
                a_max: Setting::Auto,
                alpha,
            },
            initial: InitialSection { x1: 5.0, x2: 0.0 },
            sim: SimSection {
                t_end: 1.0,
                dt: 1e-3,
                integrator: IntegratorSection::Rk4,
                disturbance: DisturbanceSection::ConstantMax,
                seed: 0,
                violation_tol: 1e-3,
                controller: ControllerSection::Midpoint,
            },
        }
    }

    #[test]
    fn auto_fields_resolve_and_echo() {
        let r = resolve(&direct_config(Setting::Auto)).unwrap();
        assert!((r.params.a_max - 0.1329).abs() < 5e-4);
        assert!((r.alpha_min - 8.6737).abs() < 1e-3);
        assert!((r.params.alpha - r.alpha_min * ALPHA_AUTO_FACTOR).abs() < 1e-12);
        match r.echo.rcbf.alpha {
            Setting::Value(v) => assert_eq!(v, r.params.alpha),
            Setting::Auto => panic!("echo must carry the resolved number"),
        }
    }

    #[test]
    fn auto_alpha_defaults_to_one_without_disturbance() {
        let mut cfg = direct_config(Setting::Auto);
        cfg.actuation.w_max = Some(0.0);
        let r = resolve(&cfg).unwrap();
        assert_eq!(r.alpha_min, 0.0);
        assert_eq!(r.params.alpha, 1.0);
    }

    #[test]
    fn mixed_actuation_styles_rejected() {
        let mut cfg = direct_config(Setting::Value(8.7));
        cfg.actuation.quad = Some(QuadSection {
            mass: 1.0,
            gravity: 9.81,
            phi_deg: 0.0,
            theta_deg: -5.0,
            f_min: -15.0,
            f_max: 15.0,
            w_z_max: 5.0,
        });
        assert!(matches!(resolve(&cfg), Err(CliError::Config(_))));
    }

    #[test]
    fn insufficient_authority_is_a_parameter_error() {
        let mut cfg = direct_config(Setting::Auto);
        cfg.actuation.u_lb = Some(-1.0);
        cfg.actuation.u_ub = Some(1.0);
        assert!(matches!(resolve(&cfg), Err(CliError::Parameter(_))));
    }

    #[test]
    fn setting_round_trips_through_json() {
        let auto: Setting = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(auto, Setting::Auto);
        let num: Setting = serde_json::from_str("8.7").unwrap();
        assert_eq!(num, Setting::Value(8.7));
        assert!(serde_json::from_str::<Setting>("\"fast\"").is_err());
        assert_eq!(serde_json::to_string(&Setting::Auto).unwrap(), "\"auto\"");
        assert_eq!(serde_json::to_string(&Setting::Value(2.0)).unwrap(), "2.0");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{
            "box": {"l_lb0": 0.0, "l_ub0": 20.0, "rate": 1.0, "warp": 9},
            "actuation": {"u_lb": -5.0, "u_ub": 25.0, "w_max": 5.0},
            "rcbf": {"a_max": "auto", "alpha": 8.7},
            "initial": {"x1": 5.0, "x2": 0.0},
            "sim": {"t_end": 1.0, "dt": 0.001, "disturbance": {"kind": "zero"}}
        }"#;
        let err = serde_json::from_str::<ScenarioConfig>(text).unwrap_err();
        assert!(err.to_string().contains("warp"));
    }
}
