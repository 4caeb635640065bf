use serde::{Deserialize, Serialize};

use super::{DiffusionFamily, DiffusionSpec};
use crate::error::{domain, KsError, Result};

/// Piecewise-linear concave majorant of `r ↦ -r A(r)` (tail primitive).
///
/// Linear between `breakpoints`, extended with `asymptotic_slope` past
/// `r_max`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantB {
    breakpoints: Vec<(f64, f64)>,
    asymptotic_slope: f64,
    r_max: f64,
    /// Uniform upward shift applied after the soundness scan.
    lift: f64,
}

impl MajorantB {
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn asymptotic_slope(&self) -> f64 {
        self.asymptotic_slope
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn lift(&self) -> f64 {
        self.lift
    }

    /// Slopes of consecutive pieces, followed by the asymptotic slope.
    pub fn slopes(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        s.push(self.asymptotic_slope);
        s
    }

    /// `B(r)` for `r ≥ 0`.
    pub fn eval(&self, r: f64) -> f64 {
        let bp = &self.breakpoints;
        let (r_last, b_last) = *bp.last().expect("majorant has breakpoints");
        if r >= r_last {
            return b_last + self.asymptotic_slope * (r - r_last);
        }
        if r <= bp[0].0 {
            return bp[0].1;
        }
        let k = bp.partition_point(|p| p.0 <= r);
        let (r0, b0) = bp[k - 1];
        let (r1, b1) = bp[k];
        b0 + (b1 - b0) * (r - r0) / (r1 - r0)
    }

    /// `β(r) = B(r)/r`.
    pub fn beta(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return domain(format!("β is defined for r > 0, got {r}"));
        }
        if r.is_infinite() {
            return Ok(self.asymptotic_slope);
        }
        Ok(self.eval(r) / r)
    }
}

/// Upper concave envelope (upper convex hull) of points sorted by abscissa.
///
/// Returns the hull vertices, left to right; collinear interior points are
/// dropped.
pub fn upper_concave_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b unless it lies strictly above the chord a→p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
}

impl Line {
    fn at(&self, r: f64) -> f64 {
        self.intercept + self.slope * r
    }
}

/// Builds `B` as the pointwise minimum of supporting lines of `g(r) = -r A(r)`.
///
/// The sample hull identifies the contact set of the least concave majorant.
/// Contact vertices contribute their tangent lines, which pass through the
/// data exactly; hull edges that bridge over samples contribute their chord.
/// Past the maximum of `g` the majorant is flat. A final scan lifts `B` by any
/// residual deficit so that `B ≥ g` holds on the checked set.
pub fn build_majorant(spec: &DiffusionSpec, r_max: f64, samples: usize) -> Result<MajorantB> {
    let DiffusionFamily::IntegrablePower { p } = spec.family else {
        return Err(KsError::UnsupportedConvention(format!(
            "majorant requires an integrable diffusivity, got {:?}",
            spec.family
        )));
    };
    if !(r_max > 0.0 && r_max.is_finite()) {
        return domain(format!("r_max must be positive, got {r_max}"));
    }
    if samples < 3 {
        return domain(format!("need at least 3 samples, got {samples}"));
    }

    let g = |r: f64| -> Result<f64> { Ok(-r * spec.a_tail(r)?) };
    let dg = |r: f64| -> Result<f64> { Ok(-spec.a_tail(r)? - r * spec.diffusivity(r)) };

    let mut rs = sample_grid(r_max, samples);
    // g' = (1+r)^{-p}((1 + (2-p) r)/(p-1)) vanishes at r = 1/(p-2) when p > 2
    let peak = (p > 2.0).then(|| 1.0 / (p - 2.0)).filter(|&r| r < r_max);
    if let Some(rp) = peak {
        let k = rs.partition_point(|&r| r < rp);
        if rs[k] != rp {
            rs.insert(k, rp);
        }
    }
    let pts: Vec<(f64, f64)> = rs.iter().map(|&r| Ok((r, g(r)?))).collect::<Result<_>>()?;

    let mut hull = upper_concave_envelope(&pts);
    // a concave majorant of a nonnegative function on [0, ∞) is nondecreasing
    let top = hull
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(k, _)| k)
        .expect("nonempty hull");
    let flat_tail = top + 1 < hull.len() || peak.is_some();
    hull.truncate(top + 1);

    let index_of = |r: f64| rs.partition_point(|&x| x < r);
    let mut lines: Vec<Line> = Vec::new();
    let n_h = hull.len();
    let mut tangent_ok = vec![false; n_h];
    for k in 0..n_h {
        let (r, y) = hull[k];
        let left = if k > 0 {
            (y - hull[k - 1].1) / (r - hull[k - 1].0)
        } else {
            f64::INFINITY
        };
        let right = if k + 1 < n_h {
            (hull[k + 1].1 - y) / (hull[k + 1].0 - r)
        } else if flat_tail {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        let s = dg(r)?;
        if s <= left && s >= right {
            tangent_ok[k] = true;
            lines.push(Line {
                slope: s,
                intercept: y - s * r,
            });
        }
    }
    for k in 0..n_h.saturating_sub(1) {
        let bridges = index_of(hull[k + 1].0) > index_of(hull[k].0) + 1;
        if bridges || !(tangent_ok[k] && tangent_ok[k + 1]) {
            let (r0, y0) = hull[k];
            let (r1, y1) = hull[k + 1];
            let s = (y1 - y0) / (r1 - r0);
            lines.push(Line {
                slope: s,
                intercept: y0 - s * r0,
            });
        }
    }
    if flat_tail {
        lines.push(Line {
            slope: 0.0,
            intercept: hull[n_h - 1].1,
        });
    }

    let env = lower_envelope(lines, r_max);
    let mut breakpoints = vec![(0.0, env.first().expect("nonempty envelope").at(0.0))];
    for w in env.windows(2) {
        let r = (w[1].intercept - w[0].intercept) / (w[0].slope - w[1].slope);
        if r > 0.0 && r < r_max {
            breakpoints.push((r, w[0].at(r)));
        }
    }
    let last = env.last().expect("nonempty envelope");
    breakpoints.push((r_max, last.at(r_max)));
    let mut b = MajorantB {
        breakpoints,
        asymptotic_slope: last.slope.max(0.0),
        r_max,
        lift: 0.0,
    };

    // soundness scan on samples and between them
    let mut deficit: f64 = 0.0;
    for w in rs.windows(2) {
        for t in [0.0, 0.25, 0.5, 0.75] {
            let r = w[0] + t * (w[1] - w[0]);
            deficit = deficit.max(g(r)? - b.eval(r));
        }
    }
    deficit = deficit.max(g(r_max)? - b.eval(r_max));
    if deficit > 0.0 {
        for bp in &mut b.breakpoints {
            bp.1 += deficit;
        }
        b.lift = deficit;
    }
    Ok(b)
}

/// Origin plus geometric spacing up to `r_max`.
pub(crate) fn sample_grid(r_max: f64, samples: usize) -> Vec<f64> {
    let r_lo = (r_max * 1e-6).min(1e-4).min(r_max / samples as f64);
    let ratio = (r_max / r_lo).powf(1.0 / (samples - 2) as f64);
    let mut rs = Vec::with_capacity(samples + 1);
    rs.push(0.0);
    for k in 0..samples - 1 {
        rs.push(if k == samples - 2 {
            r_max
        } else {
            r_lo * ratio.powi(k as i32)
        });
    }
    rs
}

/// Active lines of `min_i line_i(r)` over `[0, r_max]`, ordered left to right.
fn lower_envelope(mut lines: Vec<Line>, r_max: f64) -> Vec<Line> {
    // left to right the minimum switches to ever smaller slopes
    lines.sort_by(|a, b| {
        b.slope
            .total_cmp(&a.slope)
            .then(a.intercept.total_cmp(&b.intercept))
    });
    lines.dedup_by(|b, a| a.slope == b.slope);
    let cross = |a: &Line, b: &Line| (b.intercept - a.intercept) / (a.slope - b.slope);
    let mut env: Vec<Line> = Vec::with_capacity(lines.len());
    for l in lines {
        while let Some(last) = env.last() {
            // `l` (smaller slope) takes over at cross(last, l); if that is left of
            // where `last` itself became active, `last` never attains the minimum
            let x = cross(last, &l);
            let start = if env.len() >= 2 {
                cross(&env[env.len() - 2], last)
            } else {
                f64::NEG_INFINITY
            };
            if x <= start || x <= 0.0 {
                env.pop();
            } else {
                break;
            }
        }
        if env.last().is_none_or(|last| cross(last, &l) < r_max) {
            env.push(l);
        }
    }
    env
}
