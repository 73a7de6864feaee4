//! Numerical checks of the periodicity/double-zero correspondences.
//!
//! Every claim produces a [`VerificationReport`]. A claim whose hypothesis does
//! not hold for the given potential passes vacuously and says so in
//! `hypothesis_met` and `notes`. Claims whose hypothesis is "only double zeros"
//! can only be tested on the scanned window and are marked `window_limited`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::floquet::{
    half_monodromy_identity_defect, monodromy, sum_difference_identity_defect, HalfVariant,
    SumDiffVariant,
};
use crate::gauge::{half_period_breaking_transform, reduce_to_canonical, relation_defect_with};
use crate::pauli::{Mat2, C64, SIGMA};
use crate::potential::Potential;
use crate::spectrum::{
    default_points, instability_intervals, scan_with, GapReport, Multiplicity, SpectrumError,
    Target, DEFAULT_GAP_TOLERANCE,
};

/// Tolerance on the half-monodromy identities.
pub const MONODROMY_TOLERANCE: f64 = 1e-8;
/// Tolerance on the secondary sum/difference identities.
pub const SUM_DIFFERENCE_TOLERANCE: f64 = 1e-6;
/// Tolerance on closed-form discriminant comparisons.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-9;
/// Default λ samples for the monodromy identities.
pub const DEFAULT_SAMPLES: [f64; 5] = [-3.7, -1.2, 0.0, 1.9, 4.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    /// π/2-periodic Q ⇒ all zeros of δ + 2 double.
    HalfPeriodicForward,
    /// All zeros of δ + 2 double ⇒ reduced Q̃ π/2-periodic.
    HalfPeriodicConverse,
    /// π/2-σ2-similar Q ⇒ all zeros of δ - 2 double.
    SigmaSimilarForward,
    /// All zeros of δ - 2 double ⇒ Q̃₁ π/2-anti-periodic, Q̃₂ π/2-periodic.
    SigmaSimilarConverse,
    /// Canonical Q: π/2-periodic ⇔ δ + 2 has only double zeros.
    CanonicalPeriodic,
    /// Canonical Q: π/2-anti-periodic ⇔ δ - 2 has only double zeros.
    CanonicalAntiperiodic,
    /// All gaps vanish ⇔ Q = rσ0 + qσ2.
    VanishingGaps,
    /// π/2-periodic canonical Q ⇒ 𝕐(π) = 𝕐(π/2)².
    HalfMonodromy,
    /// π/2-anti-periodic canonical Q ⇒ 𝕐(π) = (σ2𝕐(π/2))².
    SigmaHalfMonodromy,
    /// A π/2-periodicity-breaking gauge keeps the double zeros.
    GaugeCounterexample,
}

impl Claim {
    pub const ALL: [Claim; 10] = [
        Claim::HalfPeriodicForward,
        Claim::HalfPeriodicConverse,
        Claim::SigmaSimilarForward,
        Claim::SigmaSimilarConverse,
        Claim::CanonicalPeriodic,
        Claim::CanonicalAntiperiodic,
        Claim::VanishingGaps,
        Claim::HalfMonodromy,
        Claim::SigmaHalfMonodromy,
        Claim::GaugeCounterexample,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::HalfPeriodicForward => "thm5.1a",
            Claim::HalfPeriodicConverse => "thm5.1b",
            Claim::SigmaSimilarForward => "thm5.2a",
            Claim::SigmaSimilarConverse => "thm5.2b",
            Claim::CanonicalPeriodic => "cor5.3a",
            Claim::CanonicalAntiperiodic => "cor5.3b",
            Claim::VanishingGaps => "cor5.4",
            Claim::HalfMonodromy => "lemma4.2",
            Claim::SigmaHalfMonodromy => "lemma4.3",
            Claim::GaugeCounterexample => "ex5.5",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| {
                let ids: Vec<&str> = Claim::ALL.iter().map(|c| c.id()).collect();
                format!("unknown claim `{s}` (expected one of {})", ids.join(", "))
            })
    }
}

impl Serialize for Claim {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    /// Pass when `defect ≤ tolerance`.
    Below,
    /// Pass when `defect > tolerance`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub description: String,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub expect: Expectation,
}

impl Check {
    pub fn below(description: impl Into<String>, defect: f64, tolerance: f64) -> Self {
        Check {
            description: description.into(),
            defect,
            tolerance,
            pass: defect <= tolerance,
            expect: Expectation::Below,
        }
    }

    pub fn above(description: impl Into<String>, defect: f64, tolerance: f64) -> Self {
        Check {
            description: description.into(),
            defect,
            tolerance,
            pass: defect > tolerance,
            expect: Expectation::Above,
        }
    }
}

/// Identifying summary of a potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// FNV-1a hash of the coefficients on 256 nodes.
    pub fingerprint: String,
    pub l1_norm: f64,
    pub mean_c0: f64,
    pub mean_c2: f64,
    pub canonical: bool,
}

impl InputDigest {
    pub fn new(q: &Potential, name: Option<String>) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for k in 0..256 {
            for c in q.coefficients(k as f64 * PI / 256.0) {
                for b in c.to_bits().to_le_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        InputDigest {
            name,
            fingerprint: format!("{h:016x}"),
            l1_norm: q.l1_norm(),
            mean_c0: q.channel(0).mean(),
            mean_c2: q.channel(2).mean(),
            canonical: q.is_canonical(q.default_tolerance()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: Claim,
    pub inputs: InputDigest,
    pub checks: Vec<Check>,
    pub verdict: bool,
    pub window: (f64, f64),
    pub hypothesis_met: bool,
    pub window_limited: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(claim: Claim, q: &Potential, opts: &VerifyOptions) -> Self {
        VerificationReport {
            claim,
            inputs: InputDigest::new(q, opts.name.clone()),
            checks: Vec::new(),
            verdict: true,
            window: (opts.lo, opts.hi),
            hypothesis_met: true,
            window_limited: false,
            notes: Vec::new(),
        }
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn vacuous(&mut self, why: impl Into<String>) {
        self.hypothesis_met = false;
        self.notes.push(format!("hypothesis not met: {}", why.into()));
    }

    fn finish(mut self) -> Self {
        self.verdict = self.checks.iter().all(|c| c.pass);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub lo: f64,
    pub hi: f64,
    /// Scan points; `None` uses the default density.
    pub n: Option<usize>,
    /// Gap-length tolerance for double zeros.
    pub tol: f64,
    pub parallel: bool,
    /// λ samples for the monodromy identities.
    pub samples: Vec<f64>,
    pub name: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            lo: -8.0,
            hi: 8.0,
            n: None,
            tol: DEFAULT_GAP_TOLERANCE,
            parallel: false,
            samples: DEFAULT_SAMPLES.to_vec(),
            name: None,
        }
    }
}

impl VerifyOptions {
    fn points(&self) -> usize {
        self.n.unwrap_or_else(|| default_points(self.lo, self.hi))
    }

    fn gaps(&self, q: &Potential) -> Result<GapReport, SpectrumError> {
        let s = scan_with(q, self.lo, self.hi, self.points(), self.parallel)?;
        instability_intervals(&s, self.tol)
    }
}

fn side_name(t: Target) -> &'static str {
    match t {
        Target::Plus2 => "δ - 2",
        Target::Minus2 => "δ + 2",
    }
}

/// Checks that every zero of `δ ∓ 2` in the window is double with closed gaps.
fn double_zero_checks(r: &mut VerificationReport, gaps: &GapReport, target: Target, tol: f64) {
    let name = side_name(target);
    let count = gaps.zeros_of(target).count();
    let simple = gaps
        .zeros_of(target)
        .filter(|z| z.multiplicity == Multiplicity::Simple)
        .count();
    r.push(Check::above(format!("zeros of {name} found in window"), count as f64, 0.0));
    r.push(Check::below(format!("zeros of {name} not classified double"), simple as f64, 0.0));
    r.push(Check::below(format!("longest gap adjacent to zeros of {name}"), gaps.max_gap(target), tol));
    r.notes.push(format!("{count} zeros of {name} in window, {simple} simple"));
}

fn only_double(gaps: &GapReport, target: Target, tol: f64) -> bool {
    gaps.zeros_of(target).count() > 0 && gaps.all_double(target) && gaps.max_gap(target) < tol
}

fn symmetry_tolerance(q: &Potential) -> f64 {
    q.default_tolerance()
}

fn monodromy_checks(
    r: &mut VerificationReport,
    q: &Potential,
    samples: &[f64],
    variant: HalfVariant,
) -> Result<(), SpectrumError> {
    let sd = match variant {
        HalfVariant::Antiperiodic => SumDiffVariant::Plus,
        HalfVariant::Periodic => SumDiffVariant::Minus,
    };
    let identity = match variant {
        HalfVariant::Antiperiodic => "𝕐(π) = 𝕐(π/2)²",
        HalfVariant::Periodic => "𝕐(π) = (σ2𝕐(π/2))²",
    };
    let canonical = q.is_canonical(symmetry_tolerance(q));
    for &lam in samples {
        let m = monodromy(q, C64::new(lam, 0.0))?;
        r.push(Check::below(
            format!("{identity} at λ = {lam}"),
            half_monodromy_identity_defect(&m, variant),
            MONODROMY_TOLERANCE,
        ));
        if canonical {
            let name = match sd {
                SumDiffVariant::Plus => "𝕐(π/2) + 𝕐(-π/2) = ±√(Δ+2)·I",
                SumDiffVariant::Minus => "𝕐(π/2) - 𝕐(-π/2) = ±√(2-Δ)·J",
            };
            r.push(Check::below(
                format!("{name} at λ = {lam}"),
                sum_difference_identity_defect(&m, sd),
                SUM_DIFFERENCE_TOLERANCE,
            ));
        }
    }
    Ok(())
}

/// π/2-periodic Q ⇒ all zeros of δ + 2 are double.
pub fn verify_half_periodic_forward(q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    let mut r = VerificationReport::new(Claim::HalfPeriodicForward, q, opts);
    let defect = q.half_periodic_defect();
    if defect >= symmetry_tolerance(q) {
        r.vacuous(format!("Q is not π/2-periodic (defect {defect:.3e})"));
        return Ok(r.finish());
    }
    let gaps = opts.gaps(q)?;
    double_zero_checks(&mut r, &gaps, Target::Minus2, opts.tol);
    monodromy_checks(&mut r, q, &opts.samples, HalfVariant::Antiperiodic)?;
    Ok(r.finish())
}

/// All zeros of δ + 2 double (on the window) ⇒ reduced Q̃ is π/2-periodic.
pub fn verify_half_periodic_converse(q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    let mut r = VerificationReport::new(Claim::HalfPeriodicConverse, q, opts);
    r.window_limited = true;
    let gaps = opts.gaps(q)?;
    if !only_double(&gaps, Target::Minus2, opts.tol) {
        r.vacuous(format!(
            "δ + 2 has simple zeros or open gaps in window (longest {:.3e})",
            gaps.max_gap(Target::Minus2)
        ));
        return Ok(r.finish());
    }
    let red = reduce_to_canonical(q);
    r.push(Check::below(
        "Q̃₁ is π/2-periodic (L¹ defect)",
        red.q1.half_periodic_defect(),
        symmetry_tolerance(q),
    ));
    r.notes.push("Q̃₂ is constant, hence π/2-periodic".into());
    Ok(r.finish())
}

/// Q₁ π/2-anti-periodic and Q₂ π/2-periodic ⇒ all zeros of δ - 2 are double.
pub fn verify_sigma_similar_forward(q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    let mut r = VerificationReport::new(Claim::SigmaSimilarForward, q, opts);
    let tol = symmetry_tolerance(q);
    let parts = q.j_decompose();
    let (d1, d2) = (parts.q1.half_antiperiodic_defect(), parts.q2.half_periodic_defect());
    if d1 >= tol || d2 >= tol {
        r.vacuous(format!(
            "Q₁ anti-periodicity defect {d1:.3e}, Q₂ periodicity defect {d2:.3e}"
        ));
        return Ok(r.finish());
    }
    let gaps = opts.gaps(q)?;
    double_zero_checks(&mut r, &gaps, Target::Plus2, opts.tol);
    for &lam in &opts.samples {
        let m = monodromy(q, C64::new(lam, 0.0))?;
        r.push(Check::below(
            format!("𝕐(π) = (σ2𝕐(π/2))² at λ = {lam}"),
            half_monodromy_identity_defect(&m, HalfVariant::Periodic),
            MONODROMY_TOLERANCE,
        ));
    }
    Ok(r.finish())
}

/// All zeros of δ - 2 double (on the window) ⇒ Q̃₁ π/2-anti-periodic, Q̃₂ π/2-periodic.
pub fn verify_sigma_similar_converse(q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    let mut r = VerificationReport::new(Claim::SigmaSimilarConverse, q, opts);
    r.window_limited = true;
    let gaps = opts.gaps(q)?;
    if !only_double(&gaps, Target::Plus2, opts.tol) {
        r.vacuous(format!(
            "δ - 2 has simple zeros or open gaps in window (longest {:.3e})",
            gaps.max_gap(Target::Plus2)
        ));
        return Ok(r.finish());
    }
    let red = reduce_to_canonical(q);
    r.push(Check::below(
        "Q̃₁ is π/2-anti-periodic (L¹ defect)",
        red.q1.half_antiperiodic_defect(),
        symmetry_tolerance(q),
    ));
    r.push(Check::below("Q̃₂ is π/2-periodic (constant)", 0.0, symmetry_tolerance(q)));
    Ok(r.finish())
}

/// For canonical Q, the symmetry and the double-zero property agree on the window.
pub fn verify_canonical_equivalence(
    q: &Potential,
    target: Target,
    opts: &VerifyOptions,
) -> Result<VerificationReport, SpectrumError> {
    let claim = match target {
        Target::Minus2 => Claim::CanonicalPeriodic,
        Target::Plus2 => Claim::CanonicalAntiperiodic,
    };
    let mut r = VerificationReport::new(claim, q, opts);
    r.window_limited = true;
    let tol = symmetry_tolerance(q);
    if !q.is_canonical(tol) {
        r.vacuous("Q is not canonical");
        return Ok(r.finish());
    }
    let (defect, what) = match target {
        Target::Minus2 => (q.half_periodic_defect(), "π/2-periodic"),
        Target::Plus2 => (q.half_antiperiodic_defect(), "π/2-anti-periodic"),
    };
    let symmetric = defect < tol;
    let gaps = opts.gaps(q)?;
    let doubles = only_double(&gaps, target, opts.tol);
    r.notes.push(format!(
        "Q {} {what} (defect {defect:.3e}); {} has {} zeros in window",
        if symmetric { "is" } else { "is not" },
        side_name(target),
        if doubles { "only double" } else { "simple" },
    ));
    r.push(Check::below(
        format!("Q {what} ⇔ {} has only double zeros", side_name(target)),
        if symmetric == doubles { 0.0 } else { 1.0 },
        0.0,
    ));
    if symmetric {
        double_zero_checks(&mut r, &gaps, target, opts.tol);
    }
    Ok(r.finish())
}

/// Every gap vanishes ⇔ `Q = rσ0 + qσ2`.
pub fn verify_vanishing_gaps(q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    let mut r = VerificationReport::new(Claim::VanishingGaps, q, opts);
    r.window_limited = true;
    let tol = symmetry_tolerance(q);
    let q1_norm = q.j_decompose().q1.l1_norm();
    let gaps = opts.gaps(q)?;
    let open = gaps.open_gaps();
    let total: f64 = open.iter().map(|g| g.length).sum();
    let forward = q1_norm < tol;
    let reverse = open.is_empty();
    if forward {
        r.push(Check::below("total open gap length (Q₁ = 0)", total, opts.tol));
        let int_r = q.channel(0).mean() * PI;
        let int_q = q.channel(2).mean() * PI;
        let mut worst: f64 = 0.0;
        for k in 0..41 {
            let lam = opts.lo + (opts.hi - opts.lo) * k as f64 / 40.0;
            let delta = monodromy(q, C64::new(lam, 0.0))?.discriminant();
            let want = C64::new(0.0, -int_q).exp() * (2.0 * (lam * PI - int_r).cos());
            worst = worst.max((delta - want).norm());
        }
        r.push(Check::below(
            "Δ = 2cos(λπ - ∫r)·e^{-i∫q} on 41 λ-points",
            worst,
            CLOSED_FORM_TOLERANCE,
        ));
    } else {
        r.notes.push(format!("forward hypothesis not met: ‖Q₁‖_L¹ = {q1_norm:.3e}"));
    }
    if reverse {
        r.push(Check::below("‖Q₁‖_L¹ (all gaps vanish)", q1_norm, tol));
    } else {
        r.notes.push(format!(
            "reverse hypothesis not met: {} open gap(s), first [{:.9}, {:.9}]",
            open.len(),
            open[0].lo,
            open[0].hi
        ));
    }
    r.push(Check::below(
        "gaps vanish ⇔ Q₁ = 0",
        if forward == reverse { 0.0 } else { 1.0 },
        0.0,
    ));
    Ok(r.finish())
}

/// Half-monodromy identities for a canonical Q at the given λ samples.
pub fn verify_half_monodromy(
    q: &Potential,
    variant: HalfVariant,
    opts: &VerifyOptions,
) -> Result<VerificationReport, SpectrumError> {
    let claim = match variant {
        HalfVariant::Antiperiodic => Claim::HalfMonodromy,
        HalfVariant::Periodic => Claim::SigmaHalfMonodromy,
    };
    let mut r = VerificationReport::new(claim, q, opts);
    let tol = symmetry_tolerance(q);
    if !q.is_canonical(tol) {
        r.vacuous("Q is not canonical");
        return Ok(r.finish());
    }
    let defect = match variant {
        HalfVariant::Antiperiodic => q.half_periodic_defect(),
        HalfVariant::Periodic => q.half_antiperiodic_defect(),
    };
    if defect >= tol {
        let what = match variant {
            HalfVariant::Antiperiodic => "π/2-periodic",
            HalfVariant::Periodic => "π/2-anti-periodic",
        };
        r.vacuous(format!("Q is not {what} (defect {defect:.3e})"));
        return Ok(r.finish());
    }
    monodromy_checks(&mut r, q, &opts.samples, variant)?;
    Ok(r.finish())
}

/// Applies the π/2-periodicity-breaking gauge to a canonical π/2-periodic Q and
/// checks that the double zeros of δ + 2 survive while Q̂₂ loses the symmetry.
pub fn verify_gauge_counterexample(q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    let mut r = VerificationReport::new(Claim::GaugeCounterexample, q, opts);
    let qhat = match half_period_breaking_transform(q) {
        Ok(x) => x,
        Err(e) => {
            r.vacuous(e.to_string());
            return Ok(r.finish());
        }
    };
    let q2hat = qhat.j_decompose().q2;
    let unit = (SIGMA[0] + SIGMA[2]) * (PI / 2.0);
    let at = |z: f64, want: Mat2| (q2hat.eval(z) - want).max_abs();
    r.push(Check::below("Q̂₂(π/4) = (π/2)(I + σ2)", at(PI / 4.0, unit), 1e-14));
    r.push(Check::below("Q̂₂(3π/4) = -(π/2)(I + σ2)", at(3.0 * PI / 4.0, -unit), 1e-14));
    r.push(Check::above(
        "Q̂₂ is not π/2-periodic (L¹ defect)",
        q2hat.half_periodic_defect(),
        symmetry_tolerance(&qhat),
    ));
    let red = reduce_to_canonical(&qhat);
    r.push(Check::below(
        "reduced Q̃₁ is π/2-periodic (L¹ defect)",
        red.q1.half_periodic_defect(),
        symmetry_tolerance(&qhat),
    ));
    let gaps = opts.gaps(&red.q1)?;
    double_zero_checks(&mut r, &gaps, Target::Minus2, opts.tol);
    let mut worst: f64 = 0.0;
    for k in 0..21 {
        let lam = opts.lo + (opts.hi - opts.lo) * k as f64 / 20.0;
        worst = worst.max(relation_defect_with(&qhat, &red, lam)?);
    }
    r.push(Check::below("gauge discriminant relation on 21 λ-points", worst, 1e-8));
    Ok(r.finish())
}

/// Dispatches a claim by identifier.
pub fn verify_claim(claim: Claim, q: &Potential, opts: &VerifyOptions) -> Result<VerificationReport, SpectrumError> {
    match claim {
        Claim::HalfPeriodicForward => verify_half_periodic_forward(q, opts),
        Claim::HalfPeriodicConverse => verify_half_periodic_converse(q, opts),
        Claim::SigmaSimilarForward => verify_sigma_similar_forward(q, opts),
        Claim::SigmaSimilarConverse => verify_sigma_similar_converse(q, opts),
        Claim::CanonicalPeriodic => verify_canonical_equivalence(q, Target::Minus2, opts),
        Claim::CanonicalAntiperiodic => verify_canonical_equivalence(q, Target::Plus2, opts),
        Claim::VanishingGaps => verify_vanishing_gaps(q, opts),
        Claim::HalfMonodromy => verify_half_monodromy(q, HalfVariant::Antiperiodic, opts),
        Claim::SigmaHalfMonodromy => verify_half_monodromy(q, HalfVariant::Periodic, opts),
        Claim::GaugeCounterexample => verify_gauge_counterexample(q, opts),
    }
}
