//! Concatenation error recursion and the pulse-resource economics: level
//! error rates, ancilla pulse counts, total pulse bounds, the repetition
//! factor matching coded and uncoded success probabilities, the resource
//! consumption ratio R(n), preparation efficiency, and the optimal-level
//! search over low concatenation levels.

use crate::channel::{
    self, p1_exact, pulse_lower_bound_with, transmittance, ChannelParams, DecoyParams, PulseBudget,
};
use crate::error::{Error, Result};
use std::io::Write;

/// Highest concatenation level considered; higher levels only waste pulses.
pub const MAX_LEVEL: u32 = 4;

/// How the level error recursion is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecursionMode {
    /// Full binomial sum e_i = sum_{k=2..7} C(7,k) e_{i-1}^k per level.
    Exact,
    /// Leading term only, iterated: e_i = 21 e_{i-1}^2.
    Approximate,
    /// Closed form of the iterated leading term: (21 e_0)^{2^n} / 21.
    ClosedForm,
}

/// Scalar parameters of the resource model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceParams {
    /// Physical block error probability per prepared qubit.
    pub e0: f64,
    /// Computation size.
    pub s: f64,
    /// Ancilla qubits consumed per encoded logical qubit.
    pub c: f64,
    /// Source repetition frequency, Hz.
    pub f: f64,
    /// Blindness parameter for the pulse bound.
    pub epsilon: f64,
}

impl ResourceParams {
    pub fn new(e0: f64, s: f64, c: f64, f: f64, epsilon: f64) -> Result<Self> {
        if !(0.0 < e0 && e0 < 1.0) {
            return Err(Error::InvalidResourceParams(format!(
                "e0 = {e0} outside (0, 1)"
            )));
        }
        if s < 1.0 {
            return Err(Error::InvalidResourceParams(format!("S = {s} below 1")));
        }
        if c < 1.0 {
            return Err(Error::InvalidResourceParams(format!("C = {c} below 1")));
        }
        if f <= 0.0 {
            return Err(Error::InvalidResourceParams(format!(
                "frequency {f} must be positive"
            )));
        }
        Ok(ResourceParams {
            e0,
            s,
            c,
            f,
            epsilon,
        })
    }

    /// Defaults matching the shipped parameter set: 1774 ancilla qubits per
    /// encoded logical qubit and a 1 MHz source.
    pub fn with_defaults(e0: f64, s: f64, epsilon: f64) -> Result<Self> {
        Self::new(e0, s, 1774.0, 1e6, epsilon)
    }
}

/// Everything the model knows about one concatenation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelReport {
    pub n: u32,
    pub e_n_exact: f64,
    pub e_n_approx: f64,
    /// Ancilla pulse count (7^n - 1) C S / (6 T).
    pub ancilla_pulses: f64,
    /// Total pulses: data lower bound plus ancilla pulses.
    pub total_pulses: f64,
    /// Repetitions the uncoded protocol needs to match this level's
    /// success probability.
    pub repetitions: f64,
    /// Resource consumption ratio R(n).
    pub ratio: f64,
    /// Plain preparation efficiency S f / N_n, qubits per second.
    pub efficiency: f64,
}

const BINOMIAL_7: [f64; 8] = [1.0, 7.0, 21.0, 35.0, 35.0, 21.0, 7.0, 1.0];

fn step_exact(e: f64) -> f64 {
    let mut acc = 0.0;
    // Highest order first keeps the tiny terms from being swallowed.
    for k in (2..=7).rev() {
        acc += BINOMIAL_7[k] * e.powi(k as i32);
    }
    acc.clamp(0.0, 1.0)
}

/// Block error probability after n levels of concatenation.
pub fn level_error(e0: f64, n: u32, mode: RecursionMode) -> f64 {
    assert!(e0 > 0.0 && e0 < 1.0, "e0 must lie in (0, 1)");
    if n == 0 {
        return e0;
    }
    match mode {
        RecursionMode::Exact => {
            let mut e = e0;
            for _ in 0..n {
                e = step_exact(e);
            }
            e
        }
        RecursionMode::Approximate => {
            let mut e = e0;
            for _ in 0..n {
                e = (21.0 * e * e).clamp(0.0, 1.0);
            }
            e
        }
        RecursionMode::ClosedForm => ((21.0 * e0).powf(2f64.powi(n as i32)) / 21.0).clamp(0.0, 1.0),
    }
}

/// True iff e0 sits below the concatenation threshold 1/21.
pub fn threshold_check(e0: f64) -> bool {
    e0 < 1.0 / 21.0
}

/// Ancilla qubits per encoded logical qubit at level n: (7^n - 1) C / 6.
pub fn ancilla_qubits_per_logical(n: u32, c: f64) -> f64 {
    ((7f64.powi(n as i32) - 1.0) / 6.0) * c
}

/// Ancilla pulses at level n: the per-qubit count scaled by S / T.
pub fn ancilla_pulses(n: u32, c: f64, s: f64, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidChannelParams(format!(
            "transmittance {t} must be positive"
        )));
    }
    Ok(ancilla_qubits_per_logical(n, c) * s / t)
}

/// Total pulse count at level n against the exact data-pulse bound, and
/// the small-T-mu approximation alongside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalPulses {
    pub budget: PulseBudget,
    pub ancilla: f64,
    pub exact: f64,
    pub approximate: f64,
}

pub fn total_pulses(
    n: u32,
    params: &ResourceParams,
    ch: &ChannelParams,
    d: &DecoyParams,
) -> Result<TotalPulses> {
    let t = transmittance(ch);
    let budget = channel::pulse_lower_bound(params.s, params.epsilon, d, ch)?;
    let ancilla = ancilla_pulses(n, params.c, params.s, t)?;
    let exact = budget.n_lower + ancilla;
    // Data term under Q_mu ~ mu T.
    let approx_data = params.s / t * (params.epsilon / params.s).ln()
        / (d.p_mu * d.mu * (1.0 - budget.p1_lower).ln());
    let approximate = approx_data + ancilla;
    Ok(TotalPulses {
        budget,
        ancilla,
        exact,
        approximate,
    })
}

/// ln(1 - (1 - e)^S) evaluated in the log domain.
fn ln_one_minus_success(e: f64, s: f64) -> f64 {
    // (1 - e)^S = exp(S ln(1 - e)); 1 - exp(a) = -expm1(a).
    let a = s * (-e).ln_1p();
    (-a.exp_m1()).ln()
}

/// Repetition count k = ln[1 - (1-e_n)^S] / ln[1 - (1-e0)^S] matching the
/// uncoded success probability to the level-n one.
pub fn repetitions(e0: f64, e_n: f64, s: f64) -> Result<f64> {
    if e_n == 0.0 {
        return Err(Error::RepetitionsDiverge);
    }
    if !(e_n <= e0 && e0 < 1.0 && e_n > 0.0) {
        return Err(Error::InvalidResourceParams(format!(
            "need 0 < e_n <= e0 < 1, got e_n = {e_n}, e0 = {e0}"
        )));
    }
    if s < 1.0 {
        return Err(Error::InvalidResourceParams(format!("S = {s} below 1")));
    }
    Ok(ln_one_minus_success(e_n, s) / ln_one_minus_success(e0, s))
}

/// Discrete repetition count for schedulers that need whole runs.
pub fn repetitions_ceil(e0: f64, e_n: f64, s: f64) -> Result<u64> {
    Ok(repetitions(e0, e_n, s)?.ceil() as u64)
}

/// Resource consumption ratio
/// R(n) = (1/k) * ((7^n - 1) C S / (6 T N_lower) + 1), with R(0) = 1.
pub fn resource_ratio(
    n: u32,
    params: &ResourceParams,
    ch: &ChannelParams,
    d: &DecoyParams,
) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let t = transmittance(ch);
    let budget = channel::pulse_lower_bound(params.s, params.epsilon, d, ch)?;
    let e_n = level_error(params.e0, n, RecursionMode::Exact);
    let k = repetitions(params.e0, e_n, params.s)?;
    let ancilla_term = ancilla_pulses(n, params.c, params.s, t)? / budget.n_lower;
    Ok((ancilla_term + 1.0) / k)
}

/// Preparation efficiency E = S f / N, qubits per second.
pub fn efficiency(s: f64, f: f64, n_pulses: f64) -> f64 {
    assert!(n_pulses > 0.0, "pulse count must be positive");
    s * f / n_pulses
}

/// Level whose resource ratio is smallest over 0..=max_level, ties broken
/// toward the smaller level.
pub fn optimal_level(
    params: &ResourceParams,
    ch: &ChannelParams,
    d: &DecoyParams,
    max_level: u32,
) -> Result<u32> {
    let mut best = 0;
    let mut best_ratio = resource_ratio(0, params, ch, d)?;
    for n in 1..=max_level {
        let r = resource_ratio(n, params, ch, d)?;
        if r < best_ratio {
            best = n;
            best_ratio = r;
        }
    }
    Ok(best)
}

/// Full per-level report.
pub fn level_report(
    n: u32,
    params: &ResourceParams,
    ch: &ChannelParams,
    d: &DecoyParams,
) -> Result<LevelReport> {
    let e_n_exact = level_error(params.e0, n, RecursionMode::Exact);
    let e_n_approx = level_error(params.e0, n, RecursionMode::Approximate);
    let totals = total_pulses(n, params, ch, d)?;
    let k = repetitions(params.e0, e_n_exact, params.s)?;
    let ratio = resource_ratio(n, params, ch, d)?;
    Ok(LevelReport {
        n,
        e_n_exact,
        e_n_approx,
        ancilla_pulses: totals.ancilla,
        total_pulses: totals.exact,
        repetitions: k,
        ratio,
        efficiency: efficiency(params.s, params.f, totals.exact),
    })
}

/// One row of a sweep: everything the curves need at a (L, n) grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub l_km: f64,
    pub n: u32,
    pub t: f64,
    pub q_mu: f64,
    pub p1_lower: f64,
    pub n_lower: f64,
    pub n_n: f64,
    pub k: f64,
    pub r: f64,
    pub e: f64,
}

/// Which curve family a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Decoy-bound single-photon fraction, repetition-penalized efficiency.
    Bounded,
    /// Infinite-data-size limit: exact single-photon fraction and no
    /// repetition penalty.
    Asymptotic,
}

/// Evaluates the sweep grid in deterministic (L, n) order.
///
/// The efficiency column compares levels at a common success probability:
/// each level's pulse count is scaled by the repetitions needed to reach
/// the success probability of the highest level in `levels`. The
/// asymptotic kind reports the unscaled S f / N_n instead.
pub fn sweep_rows(
    params: &ResourceParams,
    ch: &ChannelParams,
    d: &DecoyParams,
    distances_km: &[f64],
    levels: &[u32],
    kind: SweepKind,
) -> Result<Vec<SweepRow>> {
    if distances_km.is_empty() || levels.is_empty() {
        return Err(Error::InvalidResourceParams(
            "sweep grids must be non-empty".into(),
        ));
    }
    let target_level = *levels.iter().max().expect("non-empty levels");
    let e_target = level_error(params.e0, target_level, RecursionMode::Exact);
    let mut rows = Vec::with_capacity(distances_km.len() * levels.len());
    for &l in distances_km {
        let ch_l = ch.at_distance(l);
        let t = transmittance(&ch_l);
        let budget = match kind {
            SweepKind::Bounded => channel::pulse_lower_bound(params.s, params.epsilon, d, &ch_l)?,
            SweepKind::Asymptotic => pulse_lower_bound_with(
                params.s,
                params.epsilon,
                d,
                &ch_l,
                Some(p1_exact(d.mu, t, ch_l.y0)),
            )?,
        };
        for &n in levels {
            let e_n = level_error(params.e0, n, RecursionMode::Exact);
            let n_n = budget.n_lower + ancilla_pulses(n, params.c, params.s, t)?;
            let k = repetitions(params.e0, e_n, params.s)?;
            let r = if n == 0 {
                1.0
            } else {
                let ancilla_term = ancilla_pulses(n, params.c, params.s, t)? / budget.n_lower;
                (ancilla_term + 1.0) / k
            };
            let e = match kind {
                SweepKind::Bounded => {
                    let scale = ln_one_minus_success(e_target, params.s)
                        / ln_one_minus_success(e_n, params.s);
                    efficiency(params.s, params.f, scale * n_n)
                }
                SweepKind::Asymptotic => efficiency(params.s, params.f, n_n),
            };
            rows.push(SweepRow {
                l_km: l,
                n,
                t,
                q_mu: budget.q_mu,
                p1_lower: budget.p1_lower,
                n_lower: budget.n_lower,
                n_n,
                k,
                r,
                e,
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "L_km,n,T,Q_mu,p1_lower,N_lower,N_n,k,R,E";

/// Writes sweep rows in the fixed CSV layout.
pub fn write_csv<W: Write>(rows: &[SweepRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.l_km, r.n, r.t, r.q_mu, r.p1_lower, r.n_lower, r.n_n, r.k, r.r, r.e
        )?;
    }
    Ok(())
}
