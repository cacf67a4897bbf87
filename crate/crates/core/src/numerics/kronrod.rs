//! 21-point Gauss–Kronrod rule, globally adaptive bisection, and the
//! log-coordinate panel sweep used for every integral over (0, ∞).

use num_complex::Complex64;

use super::QuadratureConfig;
use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Width of one sweep panel in log coordinates.
const PANEL: f64 = 1.0;

/// |ln t| beyond which t under- or overflows.
const LOG_LIMIT: f64 = 700.0;

/// Upper bound on bisections for one integral.
const MAX_BISECTIONS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
    /// Kronrod estimate of ∫|g|.
    pub abs_value: f64,
    pub depth: u32,
}

pub(crate) fn gk21<G>(g: &G, a: f64, b: f64, depth: u32) -> Result<Segment>
where
    G: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut resk = fc * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        resasc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * WGK[j];
    }
    let value = resk * half;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integrand is not finite on [{a}, {b}] (log coordinates)"
        )));
    }
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        abs_value: resabs,
        depth,
    })
}

/// Bisects the worst segment until the summed error estimate meets
/// `max(abs_tol, rel_tol·|Q|)`.
pub(crate) fn refine<G>(g: &G, mut segs: Vec<Segment>, cfg: &QuadratureConfig) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64 + ?Sized,
{
    let mut bisections = 0usize;
    loop {
        let total: Complex64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
            segs.sort_by(|l, r| l.a.total_cmp(&r.a));
            return Ok(segs.iter().map(|s| s.value).sum());
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|(_, l), (_, r)| l.error.total_cmp(&r.error))
            .map(|(i, _)| i)
            .expect("segment list is never empty here");
        let seg = segs.swap_remove(worst);
        if seg.depth >= cfg.max_depth || bisections >= MAX_BISECTIONS {
            return Err(Error::NonConvergence(format!(
                "error estimate {err:.3e} after {bisections} bisections (worst panel [{:.6}, {:.6}] at depth {})",
                seg.a, seg.b, seg.depth
            )));
        }
        let mid = 0.5 * (seg.a + seg.b);
        segs.push(gk21(g, seg.a, mid, seg.depth + 1)?);
        segs.push(gk21(g, mid, seg.b, seg.depth + 1)?);
        bisections += 1;
    }
}

/// Integrates `g(v)` over `v ∈ [lo, hi]`, where `v` is a log coordinate
/// around `t = exp(ln_center)`. Either bound may be infinite; infinite
/// directions are swept in unit panels outward from `v = 0` (clamped into
/// the range) until `quiet` consecutive panels each carry less than
/// `tail_cut` of the accumulated absolute mass.
pub(crate) fn integrate_log<G>(
    g: &G,
    ln_center: f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
    quiet: usize,
) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64 + ?Sized,
{
    if !(lo < hi) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lo_limit = -LOG_LIMIT - ln_center;
    let hi_limit = LOG_LIMIT - ln_center;
    let lo_eff = lo.max(lo_limit);
    let hi_eff = hi.min(hi_limit);
    if !(lo_eff < hi_eff) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let start = 0.0f64.clamp(lo_eff, hi_eff);

    let mut segs = Vec::new();
    let mut accum = 0.0;
    let mut right = Direction::new(start, hi_eff, hi.is_infinite());
    let mut left = Direction::new(start, lo_eff, lo.is_infinite());

    while !(right.done && left.done) {
        for dir in [&mut right, &mut left] {
            if dir.done {
                continue;
            }
            let next = dir.step();
            let seg = if next > dir.pos {
                gk21(g, dir.pos, next, 0)?
            } else {
                gk21(g, next, dir.pos, 0)?
            };
            dir.pos = next;
            accum += seg.abs_value;
            let negligible = accum > 0.0 && seg.abs_value <= cfg.tail_cut * accum;
            segs.push(seg);
            if dir.pos == dir.end {
                if dir.open && !negligible && accum > 0.0 {
                    return Err(Error::NonConvergence(format!(
                        "integrand tail does not decay before |ln t| = {LOG_LIMIT}"
                    )));
                }
                dir.done = true;
            } else if dir.open && negligible {
                dir.quiet += 1;
                if dir.quiet >= quiet {
                    dir.done = true;
                }
            } else {
                dir.quiet = 0;
            }
        }
    }
    refine(g, segs, cfg)
}

struct Direction {
    pos: f64,
    end: f64,
    open: bool,
    quiet: usize,
    done: bool,
}

impl Direction {
    fn new(start: f64, end: f64, open: bool) -> Self {
        Self {
            pos: start,
            end,
            open,
            quiet: 0,
            done: start == end,
        }
    }

    fn step(&self) -> f64 {
        if self.end > self.pos {
            (self.pos + PANEL).min(self.end)
        } else {
            (self.pos - PANEL).max(self.end)
        }
    }
}

/// Plain adaptive integral over a finite interval.
#[cfg(test)]
pub(crate) fn integrate_finite<G>(g: &G, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64 + ?Sized,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let seg = gk21(g, a.min(b), a.max(b), 0)?;
    let v = refine(g, vec![seg], cfg)?;
    Ok(if b < a { -v } else { v })
}
