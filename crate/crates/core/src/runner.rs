//! JSON experiment configs and the batch runner behind the `hyperholo` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bergman::{
    inclusion_check, kernel_relation_checks, reproduction_check, s_isometry, InnerProduct, InnerProductSpec,
    KernelRelation, SubspaceKernel, Weight,
};
use crate::cauchy::{cauchy_formula_check, cauchy_theorem_check, stokes_check, BoundaryIntegrator, TheoremWeight};
use crate::errata::errata_report;
use crate::error::{Error, Result};
use crate::fields::{build_dictionary_with, Certification, Dictionary, Polynomial, QuaternionField};
use crate::geometry::{Domain4, Resolution};
use crate::moebius::{covariance_check, exponent_arbiter, pullback, BExponent, MoebiusMap, PullbackKind};
use crate::quat::{Quaternion, StructuralSet};
use crate::report::{Erratum, VerificationReport};
use crate::sampling::Sampler;

/// Registered verification names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Certification,
    Stokes,
    CauchyTheorem,
    CauchyFormula,
    Covariance,
    CovarianceExponent,
    BergmanKernel,
    BergmanProject,
    BergmanRelations,
    Inclusion,
    Errata,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Certification,
        Check::Stokes,
        Check::CauchyTheorem,
        Check::CauchyFormula,
        Check::Covariance,
        Check::CovarianceExponent,
        Check::BergmanKernel,
        Check::BergmanProject,
        Check::BergmanRelations,
        Check::Inclusion,
        Check::Errata,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Certification => "certification",
            Check::Stokes => "stokes",
            Check::CauchyTheorem => "cauchy-theorem",
            Check::CauchyFormula => "cauchy-formula",
            Check::Covariance => "covariance",
            Check::CovarianceExponent => "covariance-exponent",
            Check::BergmanKernel => "bergman-kernel",
            Check::BergmanProject => "bergman-project",
            Check::BergmanRelations => "bergman-relations",
            Check::Inclusion => "inclusion",
            Check::Errata => "errata",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Check::Certification => "finite-difference residual of every dictionary entry",
            Check::Stokes => "boundary vs volume sides of the weighted Stokes identity",
            Check::CauchyTheorem => "vanishing boundary integral of each dictionary entry",
            Check::CauchyFormula => "Cauchy-type reconstruction inside and zero outside",
            Check::Covariance => "Moebius covariance of the perturbed Fueter operator",
            Check::CovarianceExponent => "which B_T exponent makes the covariance identity hold",
            Check::BergmanKernel => "subspace Bergman kernel reproduces the dictionary",
            Check::BergmanProject => "Bergman projection is idempotent and kills the complement",
            Check::BergmanRelations => "weight-shift and conformal kernel transformation laws",
            Check::Inclusion => "weighted vs unweighted norms on bounded domains",
            Check::Errata => "printed componentwise formulas vs quaternion algebra",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Certification => 1e-6,
            Check::Stokes => 1e-6,
            Check::CauchyTheorem => 1e-8,
            Check::CauchyFormula => 1e-6,
            Check::Covariance | Check::CovarianceExponent => 1e-5,
            Check::BergmanKernel => 1e-6,
            Check::BergmanProject => 1e-8,
            Check::BergmanRelations => 1e-6,
            Check::Inclusion => 1e-12,
            Check::Errata => 0.0,
        }
    }
}

/// `T(x) = (ax + b)(cx + d)^{-1}`; identity by default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

impl Default for MapSpec {
    fn default() -> Self {
        Self {
            a: Quaternion::ONE,
            b: Quaternion::ZERO,
            c: Quaternion::ZERO,
            d: Quaternion::ONE,
        }
    }
}

impl MapSpec {
    pub fn build(&self) -> Result<MoebiusMap> {
        MoebiusMap::new(self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionaryConfig {
    pub poles: Vec<Quaternion>,
    #[serde(default = "yes")]
    pub degree_one: bool,
}

fn yes() -> bool {
    true
}

/// Volume rules for Gram assembly and for the independent reproduction integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BergmanResolutions {
    pub gram: Resolution,
    pub check: Resolution,
}

impl Default for BergmanResolutions {
    fn default() -> Self {
        Self {
            gram: Resolution {
                sphere: [16, 16, 32],
                radial: 16,
                box_per_axis: 10,
            },
            check: Resolution {
                sphere: [18, 18, 36],
                radial: 18,
                box_per_axis: 12,
            },
        }
    }
}

fn formula_resolution() -> Resolution {
    Resolution {
        sphere: [32, 32, 64],
        radial: 24,
        box_per_axis: 16,
    }
}

fn unit_ball() -> Domain4 {
    Domain4::unit_ball()
}

fn default_points() -> usize {
    20
}

fn default_exterior() -> usize {
    10
}

fn default_samples() -> usize {
    50
}

fn default_h() -> f64 {
    1e-4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub psi: StructuralSet,
    #[serde(default = "unit_ball")]
    pub domain: Domain4,
    #[serde(default)]
    pub q: Quaternion,
    #[serde(default)]
    pub r: Quaternion,
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default)]
    pub resolution: Resolution,
    /// Surface rule for the reconstruction check, finer than `resolution`.
    #[serde(default = "formula_resolution")]
    pub formula_resolution: Resolution,
    #[serde(default)]
    pub bergman: BergmanResolutions,
    #[serde(default)]
    pub dictionary: DictionaryConfig,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: BTreeMap<Check, f64>,
    /// Interior sample points per check.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Exterior points for the reconstruction check.
    #[serde(default = "default_exterior")]
    pub exterior_points: usize,
    /// Random cases for covariance and errata sampling.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Finite-difference step.
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub b_exponent: BExponent,
    #[serde(default)]
    pub theorem_weight: TheoremWeight,
    /// Record wall-clock `runtime_ms`; off keeps reports byte-identical across runs.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    /// A config running `checks` with every other field at its default.
    pub fn with_checks(checks: &[Check]) -> Self {
        let mut c: ExperimentConfig = serde_json::from_value(serde_json::json!({ "checks": [] })).unwrap();
        c.checks = checks.to_vec();
        c
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| Error::Config {
            path: path.to_string(),
            message,
        };
        if self.checks.is_empty() {
            return Err(bad("checks", "at least one check is required".into()));
        }
        for (check, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(bad(
                    &format!("tolerances.{}", check.name()),
                    format!("tolerance must be positive and finite, got {tol}"),
                ));
            }
        }
        if self.points == 0 {
            return Err(bad("points", "must be positive".into()));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(bad("h", format!("must be positive, got {}", self.h)));
        }
        self.domain.validate().map_err(|e| bad("domain", e.to_string()))?;
        self.map.build().map_err(|e| bad("map", e.to_string()))?;
        Ok(())
    }

    pub fn tolerance(&self, check: Check) -> f64 {
        self.tolerances.get(&check).copied().unwrap_or(check.default_tolerance())
    }

    /// Radius of a ball centred at the domain centre that contains the domain.
    fn circumradius(&self) -> f64 {
        match &self.domain {
            Domain4::Ball { radius, .. } => *radius,
            Domain4::Box { lo, hi } => 0.5 * (0..4).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt(),
        }
    }

    fn certification(&self) -> Certification {
        Certification {
            center: self.domain.center(),
            radius: self.circumradius(),
            h: self.h,
            seed: self.seed,
            ..Certification::default()
        }
    }

    pub fn dictionary(&self) -> Result<Dictionary> {
        self.dictionary_for(self.q)
    }

    fn dictionary_for(&self, q: Quaternion) -> Result<Dictionary> {
        build_dictionary_with(
            &self.psi,
            q,
            &self.dictionary.poles,
            self.dictionary.degree_one,
            &self.certification(),
        )
    }
}

/// Interior points keeping `floor` away from the boundary.
pub fn interior_points(domain: &Domain4, floor: f64, n: usize, sampler: &mut Sampler) -> Vec<Quaternion> {
    match domain {
        Domain4::Ball { center, radius } => (0..n).map(|_| sampler.in_ball(*center, radius - floor)).collect(),
        Domain4::Box { lo, hi } => {
            let lo2 = std::array::from_fn(|k| lo[k] + floor);
            let hi2 = std::array::from_fn(|k| hi[k] - floor);
            (0..n).map(|_| sampler.in_box(lo2, hi2)).collect()
        }
    }
}

/// Exterior points at distance at least `floor` from the boundary.
pub fn exterior_points(domain: &Domain4, floor: f64, n: usize, sampler: &mut Sampler) -> Vec<Quaternion> {
    match domain {
        Domain4::Ball { center, radius } => (0..n)
            .map(|_| sampler.in_shell(*center, radius + floor.max(0.5 * radius), 2.0 * radius))
            .collect(),
        Domain4::Box { lo, hi } => {
            let pad = 2.0 * floor + domain.scale();
            let lo2 = std::array::from_fn(|k| lo[k] - pad);
            let hi2 = std::array::from_fn(|k| hi[k] + pad);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let x = sampler.in_box(lo2, hi2);
                if !domain.contains(x) && domain.boundary_distance(x) >= floor {
                    out.push(x);
                }
            }
            out
        }
    }
}

fn merge(name: &str, tolerance: f64, parts: Vec<(String, VerificationReport)>) -> VerificationReport {
    let mut out = VerificationReport::new(name, tolerance);
    let mut sub = Vec::new();
    for (prefix, rep) in parts {
        for r in &rep.residuals {
            out.residual(format!("{prefix}:{}", r.label), r.value);
        }
        out.errata.extend(rep.errata.iter().cloned());
        sub.push(serde_json::json!({ "part": prefix, "params": rep.params }));
    }
    out.param("parts", sub);
    out
}

fn config_params(rep: &mut VerificationReport, cfg: &ExperimentConfig) {
    rep.param("seed", cfg.seed)
        .param("psi", cfg.psi)
        .param("domain", &cfg.domain)
        .param("q", cfg.q)
        .param("resolution", cfg.resolution);
}

fn sampler_for(cfg: &ExperimentConfig, check: Check) -> Sampler {
    // one independent stream per check so that parallel runs agree with serial ones
    Sampler::new(cfg.seed ^ (check as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn conformal_preimage(domain: &Domain4, t: &MoebiusMap) -> Result<Domain4> {
    if !t.is_affine() {
        return Err(Error::InvalidMap("conformal relation needs an affine map".into()));
    }
    match domain {
        Domain4::Ball { center, radius } => Domain4::ball(t.invert(*center)?, radius * t.d().norm() / t.a().norm()),
        Domain4::Box { lo, hi } if t.a() == Quaternion::ONE && t.d() == Quaternion::ONE => {
            let s = t.b().to_array();
            Domain4::cuboid(std::array::from_fn(|k| lo[k] - s[k]), std::array::from_fn(|k| hi[k] - s[k]))
        }
        Domain4::Box { .. } => Err(Error::InvalidMap("box domains support only translations".into())),
    }
}

fn pairs(domain: &Domain4, n: usize, sampler: &mut Sampler) -> Vec<(Quaternion, Quaternion)> {
    let pts = interior_points(domain, 0.0, 2 * n, sampler);
    pts.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Runs one registered check.
pub fn run_check(cfg: &ExperimentConfig, check: Check) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = cfg.tolerance(check);
    let psi = cfg.psi;
    let mut sampler = sampler_for(cfg, check);
    let mut rep = match check {
        Check::Certification => {
            let dict = cfg.dictionary_for(cfg.q).or_else(|e| match e {
                // surface the failing residual as a report rather than an error
                Error::Certification { .. } => Ok(Dictionary::from_entries(Vec::new(), psi, cfg.q)),
                e => Err(e),
            })?;
            let mut rep = VerificationReport::new("certification", tol);
            if dict.is_empty() {
                rep.residual("build", f64::INFINITY);
            }
            let c = dict.certify(&Certification {
                tolerance: tol,
                ..cfg.certification()
            })?;
            for (label, r) in c.residuals {
                rep.residual(label, r);
            }
            rep
        }
        Check::Stokes => {
            let f = Polynomial::random(&mut sampler, 2).into_field("f");
            let g = Polynomial::random(&mut sampler, 2).into_field("g");
            stokes_check(&f, &g, cfg.q, &psi, &cfg.domain, &cfg.resolution, tol)?
        }
        Check::CauchyTheorem => {
            let dict = cfg.dictionary()?;
            let mut parts = Vec::new();
            for f in dict.entries() {
                let r = cauchy_theorem_check(f, cfg.q, &psi, &cfg.domain, &cfg.resolution, cfg.theorem_weight, tol)?;
                parts.push((f.label().to_string(), r));
            }
            let mut rep = merge("cauchy-theorem", tol, parts);
            rep.param("weight", cfg.theorem_weight);
            if cfg.theorem_weight == TheoremWeight::Double && !rep.pass {
                rep.erratum(Erratum {
                    formula: "integral_theorem".into(),
                    item: "weight".into(),
                    convention: "e^{2<q,x>} sigma".into(),
                    detail: "with the doubled exponent the boundary integral equals the volume integral of q f dλ_q, \
                             not zero; the weight e^{<q,x>} makes it vanish"
                        .into(),
                });
            }
            rep
        }
        Check::CauchyFormula => {
            let dict = cfg.dictionary()?;
            let res = cfg.formula_resolution;
            let floor = BoundaryIntegrator::new(&cfg.domain, &res, &psi)?.floor();
            let inside = interior_points(&cfg.domain, floor.max(0.5 * cfg.domain.scale()), cfg.points, &mut sampler);
            let outside = exterior_points(&cfg.domain, floor, cfg.exterior_points, &mut sampler);
            let mut parts = Vec::new();
            for f in dict.entries() {
                let r = cauchy_formula_check(f, cfg.q, &psi, &cfg.domain, &res, &inside, &outside, tol)?;
                parts.push((f.label().to_string(), r));
            }
            merge("cauchy-formula", tol, parts)
        }
        Check::Covariance | Check::CovarianceExponent => {
            let t = cfg.map.build()?;
            if check == Check::CovarianceExponent && t.is_affine() && (t.d().norm() - 1.0).abs() < 1e-12 {
                return Err(Error::InvalidArgument(
                    "covariance-exponent needs a map where |cx+d| varies or differs from 1; set c != 0".into(),
                ));
            }
            let f = Polynomial::random(&mut sampler, 2).into_field("f");
            let mut points = Vec::new();
            let mut tries = 0;
            while points.len() < cfg.points && tries < 100 * cfg.points {
                tries += 1;
                let x = sampler.in_ball(cfg.domain.center(), 0.5 * cfg.domain.scale());
                let ok = t
                    .apply(x)
                    .and_then(|y| crate::moebius::coefficients(&t, cfg.r, cfg.q, y, crate::moebius::PointSide::CodomainY, &psi, cfg.b_exponent));
                if ok.is_ok() {
                    points.push(x);
                }
            }
            if check == Check::Covariance {
                covariance_check(&t, cfg.r, cfg.q, &f, &points, cfg.h, &psi, cfg.b_exponent, tol)?
            } else {
                exponent_arbiter(&t, cfg.r, cfg.q, &f, &points, cfg.h, &psi, tol)?
            }
        }
        Check::BergmanKernel => {
            let dict = cfg.dictionary()?;
            let spec = |res| InnerProductSpec {
                weight: Weight::LambdaQ { q: cfg.q },
                domain: cfg.domain.clone(),
                resolution: res,
                psi,
            };
            let k = SubspaceKernel::new(dict.entries(), InnerProduct::new(spec(cfg.bergman.gram))?)?;
            let check_ip = InnerProduct::new(spec(cfg.bergman.check))?;
            let pts = interior_points(&cfg.domain, 0.0, cfg.points.min(5), &mut sampler);
            reproduction_check(&k, &check_ip, &pts, tol)?
        }
        Check::BergmanProject => {
            let dict = cfg.dictionary()?;
            let ip = InnerProduct::new(InnerProductSpec {
                weight: Weight::LambdaQ { q: cfg.q },
                domain: cfg.domain.clone(),
                resolution: cfg.bergman.gram,
                psi,
            })?;
            let k = SubspaceKernel::new(dict.entries(), ip)?;
            let g = Polynomial::random(&mut sampler, 2).into_field("g");
            let p = k.projection(&g)?;
            let pp = k.projection(&p)?;
            let gv = g.clone();
            let pv = p.clone();
            let complement = QuaternionField::new("g-Pg", move |x| Ok(gv.eval(x)? - pv.eval(x)?));
            let pc = k.projection(&complement)?;
            let mut rep = VerificationReport::new("bergman-project", tol);
            rep.param("rank", k.rank()).param("entries", k.len());
            for (i, x) in interior_points(&cfg.domain, 0.0, cfg.points, &mut sampler).into_iter().enumerate() {
                let (a, b) = (p.eval(x)?, pp.eval(x)?);
                rep.residual(format!("idempotence_{i}"), (a - b).norm() / (1.0 + a.norm()));
                rep.residual(format!("complement_{i}"), pc.eval(x)?.norm() / (1.0 + g.eval(x)?.norm()));
            }
            rep
        }
        Check::BergmanRelations => {
            let dict = cfg.dictionary()?;
            let gram = cfg.bergman.gram;
            let ip = |w, d: &Domain4| {
                InnerProduct::new(InnerProductSpec {
                    weight: w,
                    domain: d.clone(),
                    resolution: gram,
                    psi,
                })
            };
            let ka = SubspaceKernel::new(dict.entries(), ip(Weight::LambdaQ { q: cfg.q }, &cfg.domain)?)?;
            let shifted: Vec<QuaternionField> = dict.entries().iter().map(|f| s_isometry(f, cfg.q, cfg.r, &psi)).collect();
            let kb = SubspaceKernel::new(&shifted, ip(Weight::LambdaQ { q: cfg.r }, &cfg.domain)?)?;
            let shift = kernel_relation_checks(
                &ka,
                &kb,
                &KernelRelation::WeightShift { q: cfg.q, r: cfg.r },
                &pairs(&cfg.domain, cfg.points, &mut sampler),
                tol,
            )?;
            let t = cfg.map.build()?;
            let xi = conformal_preimage(&cfg.domain, &t)?;
            let delta = t.delta(cfg.r, cfg.domain.center())?;
            let dd = crate::fields::build_dictionary_with(&psi, delta, &[], cfg.dictionary.degree_one, &cfg.certification())?;
            let kd = SubspaceKernel::new(
                dd.entries(),
                ip(Weight::Gamma { map: t, r: cfg.r, q: cfg.q }, &cfg.domain)?,
            )?;
            let pulled: Vec<QuaternionField> = dd
                .entries()
                .iter()
                .map(|f| pullback(&t, cfg.r, cfg.q, f, PullbackKind::C, &psi))
                .collect();
            let kx = SubspaceKernel::new(&pulled, ip(Weight::Rho { map: t }, &xi)?)?;
            let conformal = kernel_relation_checks(
                &kd,
                &kx,
                &KernelRelation::Conformal { map: t, r: cfg.r, q: cfg.q },
                &pairs(&xi, cfg.points, &mut sampler),
                tol,
            )?;
            merge(
                "bergman-relations",
                tol,
                vec![("weight_shift".into(), shift), ("conformal".into(), conformal)],
            )
        }
        Check::Inclusion => {
            let dict = cfg.dictionary()?;
            inclusion_check(dict.entries(), cfg.q, &cfg.domain, &cfg.bergman.gram, &psi, tol)?
        }
        Check::Errata => errata_report(&psi, cfg.seed, cfg.samples.clamp(1, 64)).0,
    };
    rep.name = check.name().to_string();
    config_params(&mut rep, cfg);
    rep.runtime_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    Ok(rep)
}

/// A failing report standing in for a check that could not run.
fn error_report(cfg: &ExperimentConfig, check: Check, e: &Error) -> VerificationReport {
    let mut rep = VerificationReport::new(check.name(), cfg.tolerance(check));
    rep.param("error", e.to_string()).residual("error", f64::INFINITY);
    config_params(&mut rep, cfg);
    rep
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub csv: bool,
    pub parallel: bool,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub reports: Vec<VerificationReport>,
}

impl RunSummary {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<22} {:<6} {:>12} {:>12} {:>7}", "check", "pass", "max_resid", "tolerance", "errata");
        for r in &self.reports {
            let _ = writeln!(
                s,
                "{:<22} {:<6} {:>12.3e} {:>12.3e} {:>7}",
                r.name,
                if r.pass { "PASS" } else { "FAIL" },
                r.max_residual(),
                r.tolerance,
                r.errata.len()
            );
        }
        s
    }

    pub fn csv(&self) -> String {
        let mut s = String::from(VerificationReport::CSV_HEADER);
        s.push('\n');
        for r in &self.reports {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

/// Runs every configured check and optionally writes `<check>.json`,
/// `summary.txt` and `summary.csv` into `opts.out_dir`.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    let one = |c: Check| run_check(cfg, c).unwrap_or_else(|e| error_report(cfg, c, &e));
    let reports: Vec<VerificationReport> = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = cfg.checks.iter().map(|&c| s.spawn(move || one(c))).collect();
            handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
        })
    } else {
        cfg.checks.iter().map(|&c| one(c)).collect()
    };
    let summary = RunSummary { reports };
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir)?;
        for r in &summary.reports {
            std::fs::write(dir.join(format!("{}.json", r.name)), r.to_json()? + "\n")?;
        }
        std::fs::write(dir.join("summary.txt"), summary.table())?;
        if opts.csv {
            std::fs::write(dir.join("summary.csv"), summary.csv())?;
        }
    }
    Ok(summary)
}

/// `name  description` for every registered check.
pub fn list_checks() -> String {
    Check::ALL
        .iter()
        .map(|c| format!("{:<22} {}\n", c.name(), c.description()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_is_rejected_with_path() {
        let err = ExperimentConfig::from_json(r#"{"checks": ["stokes", "nope"]}"#).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "checks[1]");
                assert!(message.contains("nope"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_field_and_bad_tolerance() {
        assert!(ExperimentConfig::from_json(r#"{"checks": ["stokes"], "sed": 1}"#).is_err());
        let err = ExperimentConfig::from_json(r#"{"checks": ["stokes"], "tolerances": {"stokes": 0}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "tolerances.stokes"), "{err}");
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_json(r#"{"checks": ["errata"]}"#).unwrap();
        assert_eq!(c.domain, Domain4::unit_ball());
        assert_eq!(c.psi, StructuralSet::cimmino());
        assert_eq!(c.tolerance(Check::Stokes), 1e-6);
        assert_eq!(c, ExperimentConfig::with_checks(&[Check::Errata]));
    }

    #[test]
    fn names_roundtrip() {
        for c in Check::ALL {
            assert_eq!(Check::from_name(c.name()), Some(c));
            let v = serde_json::to_value(c).unwrap();
            assert_eq!(v, c.name());
        }
        assert_eq!(list_checks().lines().count(), Check::ALL.len());
    }
}
