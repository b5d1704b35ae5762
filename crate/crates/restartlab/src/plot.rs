//! SVG emission for experiment traces: one cumulative-reward curve per
//! learner (mean across trials) with a min-to-max trial band, plus bottom
//! tick rows marking restart episodes.
//!
//! The y axis is raw cumulative reward with no normalization. Long runs are
//! downsampled to at most [`MAX_POINTS`] polyline points per curve; the last
//! episode is always kept.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::mdp::{ExperimentTrace, MdpError};

/// Cap on polyline points per curve before downsampling kicks in.
pub const MAX_POINTS: usize = 1000;

const WIDTH: u32 = 960;
const HEIGHT: u32 = 640;
const X0: f64 = 70.0;
const X1: f64 = 700.0;
const Y0: f64 = 50.0;
const Y1: f64 = 460.0;
const LEGEND_X: f64 = 720.0;

const PALETTE: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#7f7f7f",
];

/// One learner's aggregated curve data.
struct Series {
    id: String,
    mean: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Episodes (1-based) where any trial flagged a restart.
    restarts: Vec<usize>,
}

fn build_series(traces: &[ExperimentTrace]) -> Result<Vec<Series>, MdpError> {
    if traces.is_empty() {
        return Err(MdpError::Invalid("no traces to plot".into()));
    }
    let mut groups: BTreeMap<&str, Vec<&ExperimentTrace>> = BTreeMap::new();
    for trace in traces {
        if trace.episodes.is_empty() {
            return Err(MdpError::Invalid(format!(
                "trace for '{}' seed {} has no episodes",
                trace.learner_id, trace.seed
            )));
        }
        groups.entry(trace.learner_id.as_str()).or_default().push(trace);
    }
    let mut series = Vec::with_capacity(groups.len());
    for (id, trials) in groups {
        let len = trials[0].episodes.len();
        if trials.iter().any(|t| t.episodes.len() != len) {
            return Err(MdpError::Invalid(format!(
                "trials for '{id}' have differing episode counts"
            )));
        }
        let mut mean = vec![0.0; len];
        let mut lo = vec![f64::INFINITY; len];
        let mut hi = vec![f64::NEG_INFINITY; len];
        let mut restarts = Vec::new();
        for trial in &trials {
            let mut cum = 0.0;
            for (i, ep) in trial.episodes.iter().enumerate() {
                cum += ep.reward;
                mean[i] += cum;
                lo[i] = lo[i].min(cum);
                hi[i] = hi[i].max(cum);
                if ep.restart {
                    restarts.push(i + 1);
                }
            }
        }
        let n = trials.len() as f64;
        for v in &mut mean {
            *v /= n;
        }
        restarts.sort_unstable();
        restarts.dedup();
        series.push(Series {
            id: id.to_string(),
            mean,
            lo,
            hi,
            restarts,
        });
    }
    Ok(series)
}

/// Indices kept after downsampling `len` points to at most [`MAX_POINTS`].
fn sample_indices(len: usize) -> Vec<usize> {
    let stride = len.div_ceil(MAX_POINTS).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if *idx.last().unwrap() != len - 1 {
        idx.push(len - 1);
    }
    idx
}

/// Step size from the 1-2-5 ladder giving roughly `target` ticks.
fn tick_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0, 10.0] {
        if mag * mult >= raw {
            return mag * mult;
        }
    }
    mag * 10.0
}

fn fmt_num(v: f64) -> String {
    if v == v.round() && v.abs() < 1e12 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render the traces as a standalone SVG document.
pub fn render_reward_plot(traces: &[ExperimentTrace]) -> Result<String, MdpError> {
    let series = build_series(traces)?;
    let m_max = series.iter().map(|s| s.mean.len()).max().unwrap();
    let y_max = series
        .iter()
        .flat_map(|s| s.hi.iter())
        .fold(0.0f64, |acc, &v| acc.max(v))
        .max(1e-12)
        * 1.05;

    let x_denom = (m_max.saturating_sub(1)).max(1) as f64;
    let x_of = |episode: usize| X0 + (episode - 1) as f64 / x_denom * (X1 - X0);
    let y_of = |v: f64| Y1 - v / y_max * (Y1 - Y0);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    let _ = write!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        svg,
        "<text x=\"{:.0}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">Cumulative reward by episode</text>\n",
        (X0 + X1) / 2.0
    );

    let y_step = tick_step(y_max, 6);
    let mut y_tick = 0.0;
    while y_tick <= y_max + 1e-12 {
        let y = y_of(y_tick);
        let _ = write!(
            svg,
            "<line x1=\"{X0}\" y1=\"{y:.2}\" x2=\"{X1}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        );
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            X0 - 8.0,
            y + 4.0,
            fmt_num(y_tick)
        );
        y_tick += y_step;
    }
    let x_step = tick_step(m_max as f64, 8).max(1.0);
    let mut x_tick = x_step;
    while x_tick <= m_max as f64 + 1e-9 {
        let x = x_of(x_tick as usize);
        let _ = write!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{Y1}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
            Y1 + 5.0
        );
        let _ = write!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            Y1 + 18.0,
            fmt_num(x_tick)
        );
        x_tick += x_step;
    }
    let _ = write!(
        svg,
        "<line x1=\"{X0}\" y1=\"{Y0}\" x2=\"{X0}\" y2=\"{Y1}\" stroke=\"black\" stroke-width=\"1\"/>\n"
    );
    let _ = write!(
        svg,
        "<line x1=\"{X0}\" y1=\"{Y1}\" x2=\"{X1}\" y2=\"{Y1}\" stroke=\"black\" stroke-width=\"1\"/>\n"
    );
    let _ = write!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"start\" font-family=\"sans-serif\" font-size=\"12\">episode</text>\n",
        X1 + 8.0,
        Y1 + 4.0
    );
    let _ = write!(
        svg,
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 20 {:.2})\">cumulative reward</text>\n",
        (Y0 + Y1) / 2.0,
        (Y0 + Y1) / 2.0
    );

    let any_restarts = series.iter().any(|s| !s.restarts.is_empty());
    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let keep = sample_indices(s.mean.len());

        let mut band = String::new();
        for &i in &keep {
            let _ = write!(band, "{:.2},{:.2} ", x_of(i + 1), y_of(s.hi[i]));
        }
        for &i in keep.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", x_of(i + 1), y_of(s.lo[i]));
        }
        let _ = write!(
            svg,
            "<polygon class=\"band\" points=\"{}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
            band.trim_end()
        );

        let mut line = String::new();
        for &i in &keep {
            let _ = write!(line, "{:.2},{:.2} ", x_of(i + 1), y_of(s.mean[i]));
        }
        let _ = write!(
            svg,
            "<polyline class=\"mean\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            line.trim_end()
        );

        if !s.restarts.is_empty() {
            let row_y = Y1 + 28.0 + idx as f64 * 9.0;
            let stride = s.restarts.len().div_ceil(MAX_POINTS).max(1);
            for &episode in s.restarts.iter().step_by(stride) {
                let x = x_of(episode);
                let _ = write!(
                    svg,
                    "<line class=\"restart-tick\" x1=\"{x:.2}\" y1=\"{row_y:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>\n",
                    row_y + 6.0
                );
            }
        }

        let ly = 60.0 + idx as f64 * 22.0;
        let _ = write!(
            svg,
            "<line x1=\"{LEGEND_X}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            LEGEND_X + 24.0
        );
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            LEGEND_X + 32.0,
            ly + 4.0,
            escape(&s.id)
        );
    }
    if any_restarts {
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">restarts</text>\n",
            X0 - 8.0,
            Y1 + 36.0
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{X0}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">Curves: mean cumulative reward across trials (raw, unnormalized). Bands: trial min to max. Bottom ticks: restart episodes.</text>\n",
        HEIGHT - 15
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Write the plot into `dir` as `reward_curves.svg` and return the path.
pub fn write_reward_plot(dir: &Path, traces: &[ExperimentTrace]) -> Result<PathBuf, MdpError> {
    let svg = render_reward_plot(traces)?;
    std::fs::create_dir_all(dir).map_err(|e| {
        MdpError::Invalid(format!("cannot create plot directory {}: {e}", dir.display()))
    })?;
    let path = dir.join("reward_curves.svg");
    std::fs::write(&path, svg)
        .map_err(|e| MdpError::Invalid(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
