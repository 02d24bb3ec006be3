//! Shipped demo configurations.

use mfunclab::numkit::c64;
use mfunclab::odelab::{Coefficients, Cplx};

use crate::config::{Config, KreinSpec, RealizationSpec, TwinSpec, WindowSpec};

pub const PRESETS: [&str; 3] = ["decoupled", "generic", "counterexample"];

pub fn preset(name: &str) -> Option<Config> {
    let mut cfg = Config::empty();
    cfg.grid_n = Some(4001);
    match name {
        "decoupled" => {
            cfg.coefficients = Some(Coefficients::decoupled());
            cfg.realization = Some(RealizationSpec::neumann());
            cfg.window = Some(WindowSpec { re_min: -2.0, re_max: 50.0, im_min: -0.1, im_max: 0.1, n_re: 1041, n_im: 3 });
            cfg.krein = Some(KreinSpec { lambdas: vec![Cplx::from(-1.0)], n_trials: 5, resample_radius: 0.1 });
        }
        "generic" => {
            cfg.coefficients = Some(Coefficients::generic());
            cfg.realization = Some(RealizationSpec::MatrixB {
                entries: vec![
                    vec![Cplx(c64(1.0, 0.5)), Cplx(c64(0.2, 0.0))],
                    vec![Cplx(c64(0.0, -0.3)), Cplx(c64(-2.0, 0.0))],
                ],
            });
            cfg.window = Some(WindowSpec { re_min: -5.0, re_max: 60.0, im_min: -2.0, im_max: 2.0, n_re: 261, n_im: 17 });
            cfg.krein = Some(KreinSpec {
                lambdas: vec![
                    Cplx(c64(-1.0, 0.0)),
                    Cplx(c64(-3.0, 1.0)),
                    Cplx(c64(-0.5, -1.5)),
                    Cplx(c64(5.0, 2.0)),
                    Cplx(c64(20.0, -3.0)),
                ],
                n_trials: 3,
                resample_radius: 0.1,
            });
        }
        "counterexample" => {
            cfg.coefficients = Some(Coefficients::counterexample_base());
            cfg.realization = Some(RealizationSpec::neumann());
            cfg.window = Some(WindowSpec { re_min: -3.0, re_max: 13.0, im_min: -1.0, im_max: 1.0, n_re: 161, n_im: 21 });
            cfg.twin = Some(TwinSpec {
                interval: [0.4, 0.6],
                bump_height: Cplx::from(1.0),
                window: Some(WindowSpec { re_min: -3.0, re_max: 13.0, im_min: 0.6, im_max: 2.6, n_re: 41, n_im: 21 }),
            });
        }
        _ => return None,
    }
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_configs() {
        for name in PRESETS {
            let cfg = preset(name).unwrap();
            let text = serde_json::to_string_pretty(&cfg).unwrap();
            assert_eq!(Config::parse(&text).unwrap(), cfg);
        }
        assert!(preset("nonexistent").is_none());
    }
}
