//! Green's-function time series, their CSV form, and damped Fourier
//! transforms to spectral functions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::linalg::{c, C64};
use crate::qfm::Spin;

pub const DEFAULT_ETA: f64 = 0.1;
pub const DEFAULT_T_MAX: f64 = 40.0;
pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GfKind {
    Lesser,
    Retarded,
}

impl fmt::Display for GfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GfKind::Lesser => "lesser",
            GfKind::Retarded => "retarded",
        })
    }
}

impl FromStr for GfKind {
    type Err = QfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lesser" => Ok(GfKind::Lesser),
            "retarded" => Ok(GfKind::Retarded),
            other => Err(QfmError::Parse(format!("unknown Green's function kind '{other}'"))),
        }
    }
}

/// What a series describes; written as the CSV header comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub i: usize,
    pub j: usize,
    pub spin: Spin,
    pub kind: GfKind,
    pub sites: usize,
    pub j_coupling: f64,
    pub v: f64,
    /// Initial-state tokens, or `beta=…` for thermal series.
    pub init: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreensSeries {
    pub meta: SeriesMeta,
    pub times: Vec<f64>,
    pub values: Vec<C64>,
}

/// `0, dt, 2dt, …` up to and including `t_max` (within rounding).
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(QfmError::InvalidArgument(format!("bad time grid t_max={t_max} dt={dt}")));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// 17 significant digits, enough for a lossless round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl GreensSeries {
    pub fn new(meta: SeriesMeta, times: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(QfmError::DimensionMismatch(format!(
                "{} times for {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(Self { meta, times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid spacing, checking that the grid is uniform.
    pub fn dt(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(QfmError::EmptySeries);
        }
        if self.len() == 1 {
            return Ok(0.0);
        }
        let dt = self.times[1] - self.times[0];
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
        if !(dt > 0.0) || !uniform {
            return Err(QfmError::InvalidArgument("time grid is not uniform and increasing".into()));
        }
        Ok(dt)
    }

    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = format!(
            "# i={} j={} spin={} kind={} L={} J={} v={} init={}\nt,re,im\n",
            m.i, m.j, m.spin, m.kind, m.sites, m.j_coupling, m.v, m.init
        );
        for (t, z) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{},{},{}\n", fmt_f64(*t), fmt_f64(z.re), fmt_f64(z.im)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().and_then(|l| l.strip_prefix('#')).ok_or(QfmError::Parse("missing header comment".into()))?;
        let field = |key: &str| -> Result<&str> {
            header
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| QfmError::Parse(format!("header lacks '{key}'")))
        };
        let num = |key: &str| -> Result<f64> { field(key)?.parse().map_err(|_| QfmError::Parse(format!("bad {key}"))) };
        let int = |key: &str| -> Result<usize> { field(key)?.parse().map_err(|_| QfmError::Parse(format!("bad {key}"))) };
        let meta = SeriesMeta {
            i: int("i")?,
            j: int("j")?,
            spin: field("spin")?.parse()?,
            kind: field("kind")?.parse()?,
            sites: int("L")?,
            j_coupling: num("J")?,
            v: num("v")?,
            init: field("init")?.to_string(),
        };
        if lines.next().map(str::trim) != Some("t,re,im") {
            return Err(QfmError::Parse("expected column header 't,re,im'".into()));
        }
        let (mut times, mut values) = (Vec::new(), Vec::new());
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let cols: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| QfmError::Parse(format!("bad row '{line}'"))))
                .collect::<Result<_>>()?;
            if cols.len() != 3 {
                return Err(QfmError::Parse(format!("expected 3 columns in '{line}'")));
            }
            times.push(cols[0]);
            values.push(c(cols[1], cols[2]));
        }
        Self::new(meta, times, values)
    }
}

/// Uniform grid over one period `[−π/dt, π/dt]`, endpoints included.
pub fn omega_grid(dt: f64, points: usize) -> Result<Vec<f64>> {
    if !(dt > 0.0) || points < 2 {
        return Err(QfmError::InvalidArgument(format!("bad frequency grid dt={dt} points={points}")));
    }
    let w = PI / dt;
    Ok((0..points).map(|k| -w + 2.0 * w * k as f64 / (points - 1) as f64).collect())
}

/// `G(ω) = Σₜ wₜ·dt·e^{iωt}·e^{−ηt}·G(t)` with trapezoid weights. A retarded
/// series is treated as zero for `t < 0`, so its `t = 0` sample (already
/// carrying `θ(0) = ½`) gets full weight.
pub fn gf_fourier(series: &GreensSeries, eta: f64, omegas: &[f64]) -> Result<Vec<C64>> {
    let dt = series.dt()?;
    if !(eta > 0.0) {
        return Err(QfmError::InvalidArgument(format!("damping eta={eta} must be positive")));
    }
    let last = series.len() - 1;
    let weights: Vec<f64> = (0..series.len())
        .map(|k| {
            let half_first = k == 0 && series.meta.kind == GfKind::Lesser;
            if (k == last && last > 0) || half_first {
                0.5
            } else {
                1.0
            }
        })
        .collect();
    let damped: Vec<C64> = series
        .times
        .iter()
        .zip(&series.values)
        .zip(&weights)
        .map(|((&t, &g), &w)| g * (w * dt * (-eta * t).exp()))
        .collect();
    Ok(omegas
        .iter()
        .map(|&omega| {
            series.times.iter().zip(&damped).map(|(&t, &g)| g * C64::from_polar(1.0, omega * t)).sum()
        })
        .collect())
}

/// `A(ω) = −(1/π)·Im G^R(ω)`.
pub fn spectral(series: &GreensSeries, eta: f64, omegas: &[f64]) -> Result<Vec<f64>> {
    if series.meta.kind != GfKind::Retarded {
        return Err(QfmError::InvalidArgument("spectral function needs a retarded series".into()));
    }
    Ok(gf_fourier(series, eta, omegas)?.iter().map(|g| -g.im / PI).collect())
}

/// Trapezoid integral of samples on a uniform grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(kind: GfKind) -> SeriesMeta {
        SeriesMeta { i: 1, j: 1, spin: Spin::Up, kind, sites: 2, j_coupling: 1.0, v: 2.0, init: "u,d".into() }
    }

    fn single_pole(eps: f64, t_max: f64, dt: f64) -> GreensSeries {
        let times = time_grid(t_max, dt).unwrap();
        let values = times
            .iter()
            .map(|&t| if t == 0.0 { c(0.0, -0.5) } else { c(0.0, -1.0) * C64::from_polar(1.0, -eps * t) })
            .collect();
        GreensSeries::new(meta(GfKind::Retarded), times, values).unwrap()
    }

    #[test]
    fn single_pole_gives_lorentzian_at_the_pole() {
        let series = single_pole(0.7, 80.0, 0.05);
        let omegas = omega_grid(0.05, 4001).unwrap();
        let a = spectral(&series, 0.1, &omegas).unwrap();
        let peak = omegas[a.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap().0];
        assert!((peak - 0.7).abs() < 0.01, "{peak}");
        let lorentz_peak = 1.0 / (PI * 0.1);
        assert!((a.iter().cloned().fold(f64::MIN, f64::max) - lorentz_peak).abs() < 0.05 * lorentz_peak);
        assert!((trapezoid(&omegas, &a) - 1.0).abs() < 1e-6);
        assert!(a.iter().all(|&x| x > -1e-6));
    }

    #[test]
    fn empty_series_is_an_error() {
        let series = GreensSeries::new(meta(GfKind::Lesser), vec![], vec![]).unwrap();
        assert_eq!(gf_fourier(&series, 0.1, &[0.0]), Err(QfmError::EmptySeries));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let series = single_pole(1.0 / 3.0, 1.0, 0.1);
        let back = GreensSeries::from_csv(&series.to_csv()).unwrap();
        assert_eq!(back, series);
        assert!(series.to_csv().starts_with("# i=1 j=1 spin=up kind=retarded L=2 J=1 v=2 init=u,d\nt,re,im\n"));
    }

    #[test]
    fn nonuniform_grid_rejected() {
        let s = GreensSeries::new(meta(GfKind::Lesser), vec![0.0, 0.1, 0.3], vec![c(0., 0.); 3]).unwrap();
        assert!(s.dt().is_err());
    }

    #[test]
    fn default_grid_length() {
        assert_eq!(time_grid(DEFAULT_T_MAX, DEFAULT_DT).unwrap().len(), 801);
        assert!(time_grid(1.0, 0.0).is_err());
    }
}
