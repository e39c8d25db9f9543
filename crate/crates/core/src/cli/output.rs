use std::fmt;

use crate::equilibrium::GneSequence;
use crate::game::{ActionLayout, GameConstants};
use crate::graph::GraphTopology;
use crate::metrics::{fit_exponent, fit_window_start, BoundKind, DiagnosticsMode, MarginRow, MetricsReport};

use super::RunConfig;

/// 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_header(layout: &ActionLayout) -> String {
    let mut cols: Vec<String> = ["t", "alpha_t", "beta_t", "gamma_t"].map(String::from).to_vec();
    for i in 0..layout.n_players() {
        let id = i + 1;
        match layout.dim(i) {
            1 => cols.push(format!("x_{id}")),
            d => cols.extend((1..=d).map(|k| format!("x_{id}_{k}"))),
        }
        cols.push(format!("lambda_{id}_norm"));
    }
    cols.extend(
        [
            "regret_max",
            "violation",
            "path_length",
            "gne_kkt_residual",
            "est_err_margin_min",
            "dual_bound_margin_min",
        ]
        .map(String::from),
    );
    cols.join(",")
}

/// Contents of `summary.txt`.
#[derive(Debug, Clone)]
pub struct Summary {
    pub lines: Vec<(String, Vec<(String, String)>)>,
    pub regret_max_avg: (f64, f64),
    pub violation_avg: (f64, f64),
    pub regret_exponent: Option<f64>,
    pub early_round: usize,
}

impl Summary {
    #[allow(clippy::too_many_arguments)]
    pub(super) fn build(
        config: &RunConfig,
        graph: &GraphTopology,
        constants: &GameConstants,
        report: &MetricsReport,
        gne: &GneSequence,
        gne_tol: f64,
        mode: DiagnosticsMode,
        margins: Vec<(BoundKind, f64)>,
        violation: Option<MarginRow>,
        closed_form_gap: Option<(usize, f64)>,
    ) -> Self {
        let horizon = report.horizon();
        let early = (horizon / 8).max(1);
        let f = |v: f64| format_float(v);
        let kv = |k: &str, v: String| (k.to_string(), v);
        let mut sections = Vec::new();

        sections.push((
            "run".to_string(),
            vec![
                kv("game", format!("{:?}", config.game.kind).to_lowercase()),
                kv("n_players", config.game.n_players.to_string()),
                kv("horizon", horizon.to_string()),
                kv("graph", format!("{:?}", config.graph.kind).to_lowercase()),
                kv("sigma", f(graph.sigma())),
                kv("sigma_m", f(graph.sigma_m())),
                kv("geometry", format!("{:?}", config.geometry.kind).to_lowercase()),
                kv("a1", config.schedule.a1.to_string()),
                kv("a2", config.schedule.a2.to_string()),
                kv("seed", config.run.seed.to_string()),
            ],
        ));

        let regret_max_avg = (report.average_regret_max(early), report.average_regret_max(horizon));
        let violation_avg = (report.average_violation(early), report.average_violation(horizon));
        let last_regrets: Vec<f64> = report.regrets.iter().map(|r| r[horizon - 1]).collect();
        sections.push((
            "final".to_string(),
            vec![
                kv("regret_max", f(report.regret_max[horizon - 1])),
                kv("regret_min", f(last_regrets.iter().copied().fold(f64::INFINITY, f64::min))),
                kv("violation", f(report.violation[horizon - 1])),
                kv("path_length", f(report.path_length[horizon - 1])),
            ],
        ));
        sections.push((
            "decay".to_string(),
            vec![
                kv("early_round", early.to_string()),
                kv("regret_max_over_t_early", f(regret_max_avg.0)),
                kv("regret_max_over_t_final", f(regret_max_avg.1)),
                kv("regret_avg_lower_at_end", (regret_max_avg.1 < regret_max_avg.0).to_string()),
                kv("violation_over_t_early", f(violation_avg.0)),
                kv("violation_over_t_final", f(violation_avg.1)),
                kv(
                    "violation_avg_halved_or_zero",
                    (violation_avg.1 <= 0.5 * violation_avg.0 || violation_avg.1 <= 1e-6).to_string(),
                ),
            ],
        ));

        let fit = |series: &[f64]| match fit_exponent(series) {
            Ok(v) => (Some(v), f(v)),
            Err(e) => (None, format!("n/a ({e})")),
        };
        let (regret_exponent, regret_exp_text) = fit(&report.regret_max);
        let (_, violation_exp_text) = fit(&report.violation);
        let (_, path_exp_text) = fit(&report.path_length);
        sections.push((
            "exponents".to_string(),
            vec![
                kv(
                    "fit_window",
                    format!("t = {}..{} (last half, least squares of ln value on ln t)", fit_window_start(horizon) + 1, horizon),
                ),
                kv("regret_max", regret_exp_text),
                kv("violation", violation_exp_text),
                kv("path_length", path_exp_text),
            ],
        ));

        let mut diag = vec![kv(
            "mode",
            match mode {
                DiagnosticsMode::Off => "off",
                DiagnosticsMode::Record => "record",
                DiagnosticsMode::Hard => "hard",
            }
            .to_string(),
        )];
        if mode != DiagnosticsMode::Off {
            diag.extend([
                kv("L", f(constants.l)),
                kv("M", f(constants.m)),
                kv("H", f(constants.h)),
                kv("mu", f(constants.mu)),
                kv("F", f(constants.dual_perturbation_factor())),
            ]);
            for kind in BoundKind::ALL {
                if let Some((_, v)) = margins.iter().find(|(k, _)| *k == kind) {
                    diag.push(kv(&format!("min_margin_{}", kind.label()), f(*v)));
                }
            }
            diag.push(kv(
                "first_violation",
                match violation {
                    Some(r) => format!("t = {}, player = {}, bound = {}", r.t, r.player + 1, r.kind),
                    None => "none".to_string(),
                },
            ));
        }
        sections.push(("diagnostics".to_string(), diag));

        let mut eq = vec![
            kv("convention", "variational GNE (shared multiplier), projected extragradient on the KKT saddle operator".to_string()),
            kv("kkt_tol", f(gne_tol)),
            kv("max_kkt_residual", f(gne.max_kkt_residual())),
            kv("multiplier_bound", f(gne.multiplier_bound())),
        ];
        if let Some((t, gap)) = closed_form_gap {
            eq.push(kv("closed_form_max_abs_gap", f(gap)));
            eq.push(kv("closed_form_max_gap_round", t.to_string()));
        }
        sections.push(("gne".to_string(), eq));

        Summary {
            lines: sections,
            regret_max_avg,
            violation_avg,
            regret_exponent,
            early_round: early,
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (section, rows)) in self.lines.iter().enumerate() {
            if k > 0 {
                writeln!(out)?;
            }
            writeln!(out, "[{section}]")?;
            for (key, value) in rows {
                writeln!(out, "{key} = {value}")?;
            }
        }
        Ok(())
    }
}
