//! Command-line surface: argument parsing, dispatch, and canonical reports.

use std::collections::BTreeMap;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::curves::{torsion_basis, CurveError, CurveModel};
use crate::families::{self, FamilyError};
use crate::field::{is_prime, Field, FieldError};
use crate::kani::{self, FkContext, KaniError, Verdict};
use crate::ledger::{self, LedgerError, RankLedger};
use crate::pairing::{anti_isometry_count, weil_pairing, LevelMatrix, PairingError, TorsionBasis};

pub const TOOL: &str = "fk-picard";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "fk-picard", version, about = "Finite-field checks for Frey-Kani data and explicit curve families")]
pub struct RunConfig {
    /// Write the report (with a timestamp sidecar) to this path.
    #[arg(long, global = true)]
    pub json: Option<String>,
    /// Write family trace rows to this CSV path.
    #[arg(long, global = true)]
    pub csv: Option<String>,
    /// Seed for every randomized sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Re-run the pinned derived values through brute-force oracles.
    #[arg(long, global = true)]
    pub verify_oracles: bool,
    /// Format of the report printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Command {
    /// Weil pairing properties on canonical torsion bases.
    PairingCheck(PairingArgs),
    /// Classify one anti-isometry by Kani's criterion.
    FkClassify(ClassifyArgs),
    /// Classify reference o sigma for every sigma in SL_2(Z/n).
    SigmaCensus(CensusArgs),
    /// List (k, m) with k(n-k) = m^2.
    SquareDegrees(SquareArgs),
    /// Quartic pencil trace identities.
    FamilyB(FamilyBArgs),
    /// Genus-2 bisection identities, tau and the Möbius map.
    FamilyC(FamilyCArgs),
    /// Shioda–Tate bookkeeping.
    Ledger(LedgerArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PairingArgs {
    #[arg(long)]
    pub prime: u64,
    /// Curve: legendre:L, short:A,B, cubic:C,E1,E2,E3 or quartic:A4,A2,A0.
    #[arg(long)]
    pub curve: String,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    /// Characteristic of the base field.
    #[arg(long)]
    pub prime: u64,
    /// Source curve, in the same syntax as pairing-check.
    #[arg(long)]
    pub curve: String,
    /// Target curve; defaults to the source curve.
    #[arg(long)]
    pub curve2: Option<String>,
    /// Level: 2, 3, 5 or 7.
    #[arg(long)]
    pub n: u64,
    /// Matrix entries a,b,c,d of [[a,b],[c,d]].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub matrix: Vec<i64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub curve: String,
    /// Level: 2, 3, 5 or 7.
    #[arg(long)]
    pub n: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SquareArgs {
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyBArgs {
    #[arg(long, value_delimiter = ',', default_value = "5,13,17,29,37,41,53,61")]
    pub primes: Vec<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyCArgs {
    #[arg(long, default_value_t = 200)]
    pub prime_max: u64,
    /// Random (t, u, p) samples for the tau identity.
    #[arg(long, default_value_t = 100)]
    pub tau_samples: usize,
    /// Random t samples for the Möbius check.
    #[arg(long, default_value_t = 20)]
    pub mobius_samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LedgerArgs {
    #[arg(long)]
    pub h11: u64,
    #[arg(long)]
    pub rho: u64,
    /// Comma-separated component counts of the singular fibers.
    #[arg(long, default_value = "")]
    pub fibers: String,
    #[arg(long)]
    pub fixed_part: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Budget(s) => CliError::Budget(s),
            other => CliError::BadInput(other.to_string()),
        }
    }
}

impl From<KaniError> for CliError {
    fn from(e: KaniError) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::BadInput(e.to_string())
        }
    }
}

impl From<PairingError> for CliError {
    fn from(e: PairingError) -> Self {
        match e {
            PairingError::Curve(c) => c.into(),
            other => CliError::BadInput(other.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Budget(s) => CliError::Budget(s),
            FamilyError::Curve(c) => c.into(),
            other => CliError::BadInput(other.to_string()),
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub assertions: usize,
    pub passed: usize,
    pub failed: usize,
    pub budget_errors: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub results: Value,
    pub summary: Summary,
    pub failures: Vec<String>,
    pub errors: Vec<String>,
    #[serde(skip)]
    pub csv_rows: Vec<[String; 9]>,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Report {
            tool: TOOL.into(),
            version: VERSION.into(),
            config: config.clone(),
            results: Value::Null,
            summary: Summary::default(),
            failures: Vec::new(),
            errors: Vec::new(),
            csv_rows: Vec::new(),
        }
    }

    fn assert(&mut self, name: impl Into<String>, ok: bool) {
        self.summary.assertions += 1;
        if ok {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
            self.failures.push(name.into());
        }
    }

    fn budget(&mut self, msg: String) {
        self.summary.budget_errors += 1;
        self.errors.push(msg);
    }

    /// 0 all pass, 1 assertion failure, 3 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            1
        } else if self.summary.budget_errors > 0 {
            3
        } else {
            0
        }
    }

    /// Sorted-key JSON of the report body.
    pub fn canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string(&v).expect("value serializes")
    }

    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The canonical body, its hash, and a sidecar timestamp outside the hash.
    pub fn with_sidecar(&self, unix_seconds: u64) -> String {
        let body: Value = serde_json::from_str(&self.canonical_json()).expect("valid json");
        let doc = json!({
            "body": body,
            "sha256": self.sha256(),
            "sidecar": { "generated_unix_seconds": unix_seconds },
        });
        serde_json::to_string_pretty(&doc).expect("serializes")
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "{TOOL} {VERSION}: {} assertions, {} passed, {} failed, {} budget errors\n",
            self.summary.assertions, self.summary.passed, self.summary.failed, self.summary.budget_errors
        );
        for f in &self.failures {
            s.push_str(&format!("FAIL {f}\n"));
        }
        for e in &self.errors {
            s.push_str(&format!("ERROR {e}\n"));
        }
        s
    }
}

/// Parses `legendre:L`, `short:A,B`, `cubic:C,E1,E2,E3` or
/// `quartic:A4,A2,A0` over `F_p`.
pub fn parse_curve(spec: &str, field: &Arc<Field>) -> Result<CurveModel, CliError> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::BadInput(format!("curve spec {spec:?} lacks ':'")))?;
    let vals: Vec<i64> = rest
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| CliError::BadInput(format!("bad integer {v:?} in {spec:?}"))))
        .collect::<Result<_, _>>()?;
    let e = |i: usize| field.from_i64(vals[i]);
    let need = |k: usize| {
        if vals.len() == k {
            Ok(())
        } else {
            Err(CliError::BadInput(format!("{kind} needs {k} values")))
        }
    };
    let curve = match kind {
        "legendre" => {
            need(1)?;
            CurveModel::legendre(e(0))
        }
        "short" => {
            need(2)?;
            CurveModel::short_w(e(0), e(1))
        }
        "cubic" => {
            need(4)?;
            CurveModel::factored_cubic(e(0), e(1), e(2), e(3))
        }
        "quartic" => {
            need(3)?;
            CurveModel::even_quartic(e(0), e(1), e(2))
        }
        other => return Err(CliError::BadInput(format!("unknown curve kind {other:?}"))),
    };
    curve.map_err(|e| CliError::BadInput(e.to_string()))
}

fn prime_field(p: u64) -> Result<Arc<Field>, CliError> {
    Ok(Field::prime(p)?)
}

/// Dispatches to the command and assembles the report.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(config);
    let mut results = BTreeMap::new();
    let main = match &config.command {
        Command::PairingCheck(a) => pairing_check(a, config.seed, &mut report)?,
        Command::FkClassify(a) => fk_classify(a, &mut report)?,
        Command::SigmaCensus(a) => sigma_census(a, &mut report)?,
        Command::SquareDegrees(a) => square_degrees(a, &mut report),
        Command::FamilyB(a) => family_b(a, &mut report)?,
        Command::FamilyC(a) => family_c(a, config.seed, &mut report)?,
        Command::Ledger(a) => ledger_cmd(a, &mut report)?,
    };
    results.insert("main".to_string(), main);
    if config.verify_oracles {
        let checks = crate::oracle::verify_oracles();
        for c in &checks {
            report.assert(format!("oracle: {}", c.name), c.pass);
        }
        results.insert("oracles".to_string(), serde_json::to_value(checks).expect("serializes"));
    }
    report.results = serde_json::to_value(results).expect("serializes");
    Ok(report)
}

fn pairing_check(a: &PairingArgs, seed: u64, report: &mut Report) -> Result<Value, CliError> {
    let f = prime_field(a.prime)?;
    let e = parse_curve(&a.curve, &f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = BTreeMap::new();
    for &n in &a.n {
        let tb = match torsion_basis(&e, n) {
            Ok(tb) => tb,
            Err(CurveError::Budget(s)) => {
                report.budget(format!("n = {n}: {s}"));
                continue;
            }
            Err(err) => return Err(err.into()),
        };
        let b = TorsionBasis::from_result(&tb, n)?;
        let mut bilinear = true;
        let mut alternating = true;
        let mut skew = true;
        for _ in 0..a.samples {
            let [x1, y1, x2, y2] = [0; 4].map(|_| rng.gen_range(0..n));
            let (r, s) = (b.point(x1, y1), b.point(x2, y2));
            let e_rs = weil_pairing(&b.curve, n, &r, &s)?;
            let det = ((x1 * y2) as i64 - (x2 * y1) as i64).rem_euclid(n as i64) as u128;
            bilinear &= e_rs == b.zeta.pow(det);
            skew &= (&e_rs * &weil_pairing(&b.curve, n, &s, &r)?).is_one();
            alternating &= weil_pairing(&b.curve, n, &r, &r)?.is_one();
        }
        let primitive = crate::pairing::is_primitive_root(&b.zeta, n);
        let count = anti_isometry_count(n) as u64;
        report.assert(format!("n = {n}: bilinearity"), bilinear);
        report.assert(format!("n = {n}: alternation"), alternating);
        report.assert(format!("n = {n}: skew symmetry"), skew);
        report.assert(format!("n = {n}: nondegeneracy"), primitive);
        report.assert(format!("n = {n}: anti-isometry count"), count == kani::sl2_order(n));
        levels.insert(
            n.to_string(),
            json!({
                "field_degree": tb.degree,
                "p": b.p,
                "q": b.q,
                "zeta": b.zeta,
                "bilinear": bilinear,
                "alternating": alternating,
                "skew_symmetric": skew,
                "nondegenerate": primitive,
                "anti_isometry_count": count,
            }),
        );
    }
    Ok(json!({ "curve": e, "levels": levels }))
}

fn fk_classify(a: &ClassifyArgs, report: &mut Report) -> Result<Value, CliError> {
    let f = prime_field(a.prime)?;
    let e = parse_curve(&a.curve, &f)?;
    let e2 = match &a.curve2 {
        Some(s) => parse_curve(s, &f)?,
        None => e.clone(),
    };
    let [m00, m01, m10, m11] = a.matrix[..] else {
        return Err(CliError::BadInput("--matrix needs four entries".into()));
    };
    let m = LevelMatrix::new(a.n, m00, m01, m10, m11);
    let ctx = FkContext::new(&e, &e2, a.n)?;
    let data = ctx.data(m)?;
    let c = kani::classify_fk(&data)?;
    let neg = ctx.classify(&kani::neg_phi(&data.phi).matrix)?;
    report.assert("verdict invariant under phi -> -phi", c.verdict == neg.verdict);
    if let Some(w) = &c.witness {
        report.assert("witness re-verifies on the basis", w.verified);
    }
    let mut out = json!({
        "field_degree": ctx.degree,
        "classification": c,
        "negated": neg,
    });
    if a.n == 3 {
        let o = crate::oracle::oracle_classify_n3(&ctx.classifier, &m)?;
        report.assert("closed-form 2-isogeny oracle agrees", o == c.verdict);
        out["oracle_verdict"] = serde_json::to_value(o).expect("serializes");
    }
    Ok(out)
}

fn sigma_census(a: &CensusArgs, report: &mut Report) -> Result<Value, CliError> {
    let f = prime_field(a.prime)?;
    let e = parse_curve(&a.curve, &f)?;
    let census = kani::sigma_census(&e, a.n)?;
    let total = census.irreducible_count + census.reducible_count + census.error_count;
    report.assert("census covers SL_2(Z/n)", total as u64 == kani::sl2_order(a.n));
    let j = e.j_invariant()?;
    let generic_j = !j.is_zero() && j != f.from_u64(1728);
    if a.n == 2 && generic_j {
        report.assert("n = 2: five irreducible sigma", census.irreducible_count == 5);
        report.assert("n = 2: one reducible sigma", census.reducible_count == 1);
        let red: Vec<_> = census.entries.iter().filter(|c| c.verdict == Some(Verdict::Reducible)).collect();
        report.assert(
            "n = 2: the reducible phi is the identity",
            red.len() == 1 && red[0].phi == LevelMatrix::identity(2),
        );
    }
    if a.n == 3 {
        let ctx = FkContext::new(&e, &e, 3)?;
        let agree = census.entries.iter().all(|c| {
            crate::oracle::oracle_classify_n3(&ctx.classifier, &c.phi).ok() == c.verdict
        });
        report.assert("n = 3: census agrees with closed-form oracle", agree);
    }
    for c in census.entries.iter().filter_map(|c| c.error.as_ref()) {
        report.budget(c.clone());
    }
    Ok(json!({ "curve": e, "j_invariant": j, "census": census }))
}

fn square_degrees(a: &SquareArgs, report: &mut Report) -> Value {
    let mut out = BTreeMap::new();
    let mut ok = true;
    for n in 2..=a.n_max {
        let w = kani::square_degree_witnesses(n);
        if is_prime(n) && n % 4 == 3 {
            ok &= w.is_empty();
        }
        out.insert(n.to_string(), w);
    }
    report.assert("no witnesses for primes n = 3 mod 4", ok);
    serde_json::to_value(out).expect("serializes")
}

fn check_primes(primes: &[u64]) -> Result<(), CliError> {
    for &p in primes {
        if p <= 3 || !is_prime(p) {
            return Err(CliError::BadInput(format!("{p} is not a prime > 3")));
        }
    }
    Ok(())
}

fn family_b(a: &FamilyBArgs, report: &mut Report) -> Result<Value, CliError> {
    check_primes(&a.primes)?;
    let (reports, skipped) = families::scan_family(&a.primes, families::family_b_check)?;
    for r in &reports {
        report.assert(format!("family B (p = {}, t = {})", r.p, r.t), r.passed());
        report.csv_rows.push(r.csv_row());
    }
    if let Some(r) = reports.iter().find(|r| r.p == 5 && r.t == 0) {
        report.assert(
            "family B regression (t = 0, p = 5)",
            r.count_main == 0 && r.trace_q1 == 2 && r.trace_q2 == -2,
        );
    }
    Ok(json!({ "reports": reports, "skipped": skipped }))
}

fn family_c(a: &FamilyCArgs, seed: u64, report: &mut Report) -> Result<Value, CliError> {
    let primes: Vec<u64> = (5..=a.prime_max).filter(|&p| is_prime(p)).collect();
    if primes.is_empty() {
        return Err(CliError::BadInput("--prime-max must be at least 5".into()));
    }
    let (reports, skipped) = families::scan_family(&primes, families::family_c_check)?;
    for r in &reports {
        report.assert(format!("family C (p = {}, t = {})", r.p, r.t), r.passed());
        report.csv_rows.push(r.csv_row());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tau_samples = Vec::new();
    while tau_samples.len() < a.tau_samples {
        let p = primes[rng.gen_range(0..primes.len())];
        let f = prime_field(p)?;
        let (t, u) = (f.from_u64(rng.gen_range(2..p - 1)), f.from_u64(rng.gen_range(1..p)));
        let ok = families::tau_identity_check(&t, &u)?;
        report.assert(format!("tau identity (p = {p}, t = {t}, u = {u})"), ok);
        tau_samples.push(json!({ "p": p, "t": t, "u": u, "holds": ok }));
    }

    let mut mobius = Vec::new();
    while mobius.len() < a.mobius_samples {
        let p = primes[rng.gen_range(0..primes.len())];
        let f = prime_field(p)?;
        let t = f.from_u64(rng.gen_range(1..p - 1));
        let ok = families::mobius_branch_check(&t)?;
        report.assert(format!("Mobius branch points (p = {p}, t = {t})"), ok);
        mobius.push(json!({ "p": p, "t": t, "holds": ok }));
    }
    let q_ok = families::mobius_branch_check(&num_rational::Rational64::from_integer(2))?;
    report.assert("Mobius branch points over Q at t = 2", q_ok);

    let f13 = prime_field(13)?;
    let tau = families::tau_pullback_matrix(&f13)?;
    report.assert("tau^* squares to -1", tau.squares_to_minus_identity());
    report.assert("tau^*(x dx/y) = i dx/y", tau.entries[0][1] == tau.i);
    let t_pt = f13.from_u64(2);
    let pts = families::tau_point_check(&t_pt, 20, seed)?;
    report.assert("tau maps points of C_t to C_t over F_169", pts == Some(20));

    Ok(json!({
        "reports": reports,
        "skipped": skipped,
        "tau_identity": tau_samples,
        "mobius": mobius,
        "tau_matrix": tau,
    }))
}

fn ledger_cmd(a: &LedgerArgs, report: &mut Report) -> Result<Value, CliError> {
    let fibers = ledger::parse_fibers(&a.fibers)?;
    let l = RankLedger::new(a.h11, a.rho, fibers, a.fixed_part)?;
    let s = ledger::summarize(&l);
    for e in &s.errors {
        report.assert(format!("ledger consistency: {e}"), false);
    }
    if let (Some(ih), Some(mw)) = (s.ih11_dim, s.mw_rank) {
        report.assert("ih11_dim - mw_rank = h11 - rho", ih as i64 - mw as i64 == a.h11 as i64 - a.rho as i64);
    }
    Ok(serde_json::to_value(s).expect("serializes"))
}

/// Writes the JSON and CSV artifacts requested by the config.
pub fn write_outputs(config: &RunConfig, report: &Report) -> std::io::Result<()> {
    if let Some(path) = &config.json {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        std::fs::write(path, report.with_sidecar(now))?;
    }
    if let Some(path) = &config.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(families::TraceReport::csv_header())?;
        for row in &report.csv_rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Applies `FK_PICARD_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FK_PICARD_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::BadInput(format!("FK_PICARD_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::BadInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Report, CliError> {
        let mut full = vec!["fk-picard"];
        full.extend_from_slice(args);
        run(&RunConfig::try_parse_from(full).unwrap())
    }

    #[test]
    fn ledger_command() {
        let r = run_args(&["ledger", "--h11", "10", "--rho", "10", "--fibers", "5,5"]).unwrap();
        assert_eq!(r.exit_code(), 0);
        let m = &r.results["main"];
        assert_eq!(m["extremal"], json!(true));
        assert_eq!(m["picard_maximal"], json!(true));
        assert_eq!(m["mw_rank"], json!(0));
        let bad = run_args(&["ledger", "--h11", "10", "--rho", "8", "--fibers", "5,5"]).unwrap();
        assert_eq!(bad.exit_code(), 1);
        let err = run_args(&["ledger", "--h11", "1", "--rho", "8"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn census_command() {
        let r = run_args(&["sigma-census", "--n", "2", "--prime", "11", "--curve", "legendre:3"]).unwrap();
        assert_eq!(r.exit_code(), 0, "{:?}", r.failures);
        assert_eq!(r.results["main"]["census"]["irreducible_count"], json!(5));
        assert_eq!(r.results["main"]["census"]["reducible_count"], json!(1));
    }

    #[test]
    fn square_degrees_command() {
        let r = run_args(&["square-degrees", "--n-max", "100"]).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.results["main"]["5"], json!([[1, 2], [4, 2]]));
        assert_eq!(r.results["main"]["7"], json!([]));
    }

    #[test]
    fn budget_exit_code() {
        let r = run_args(&["pairing-check", "--prime", "1000003", "--curve", "short:1,1", "--n", "7"]);
        assert_eq!(r.map(|r| r.exit_code()).unwrap_or_else(|e| e.exit_code()), 3);
    }

    #[test]
    fn bad_curve_spec() {
        assert_eq!(run_args(&["sigma-census", "--n", "2", "--prime", "11", "--curve", "legendre:1"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_args(&["sigma-census", "--n", "2", "--prime", "11", "--curve", "nope"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn determinism() {
        let args = ["fk-classify", "--n", "3", "--prime", "11", "--curve", "short:1,8", "--matrix", "0,1,1,0"];
        let a = run_args(&args).unwrap();
        let b = run_args(&args).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_eq!(a.sha256(), b.sha256());
    }
}
