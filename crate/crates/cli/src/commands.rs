use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use carlab::affine::{
    decide_commuting_with, explore_conjecture, necessary_check, numeric_test_with, CampaignConfig, NecessaryCheck,
};
use carlab::car_rep::{build_rep, verify_car, CarReport};
use carlab::covariance::{adapted_diagonalize, residuals, validate, InvolutionFile, Tolerances};
use carlab::error::Condition;
use carlab::golden::{self, GoldenReport};
use carlab::numerics::{herm_eig, matrix_from_json, matrix_to_json, ComplexMatrix, MatrixFile};
use carlab::{
    AffineOptions, AffineReport, CampaignReport, CovarianceOperator, Involution, Parity, SamplingMode, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::args::{
    AffineArgs, Command, ConjectureArgs, ExampleArgs, Format, MethodChoice, Output, ParityChoice, RepArgs, ValidateArgs,
};
use crate::format::{complex, list, num};
use crate::{exit, Failure};

pub fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate(a) => cmd_validate(a),
        Command::Affine(a) => cmd_affine(a),
        Command::Example38(a) => cmd_example38(a),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Rep(a) => cmd_rep(a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    matrix_from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_gamma(path: Option<&Path>, k: usize) -> Result<Involution, Failure> {
    let Some(path) = path else {
        return Ok(Involution::swap_conjugation(k));
    };
    let file: InvolutionFile = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: parse error: {e}", path.display())))?;
    let gamma = file.into_involution().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if gamma.dim() != k {
        return Err(Failure::input(format!("involution acts on dimension {}, expected {k}", gamma.dim())));
    }
    Ok(gamma)
}

fn load_operator(path: &Path, gamma: &Involution) -> Result<CovarianceOperator, Failure> {
    let m = load_matrix(path)?;
    check_shape(&m, gamma, path)?;
    validate(m, gamma).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn check_shape(m: &ComplexMatrix, gamma: &Involution, path: &Path) -> Result<(), Failure> {
    if !m.is_square() || m.rows() != gamma.dim() {
        return Err(Failure::input(format!(
            "{}: {}x{} matrix does not match involution dimension {}",
            path.display(),
            m.rows(),
            m.cols(),
            gamma.dim()
        )));
    }
    Ok(())
}

fn emit(output: &Output, text: impl FnOnce() -> String, json: impl FnOnce() -> String) -> Result<(), Failure> {
    let body = match output.format {
        Format::Text => text(),
        Format::Json => {
            let mut s = json();
            s.push('\n');
            s
        }
    };
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "VIOLATED"
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: String,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub satisfied: bool,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ValidateReport {
    pub schema: String,
    pub dim: usize,
    pub valid: bool,
    pub conditions: Vec<ConditionReport>,
    pub eigenvalues: Vec<f64>,
}

fn condition_name(c: Condition) -> &'static str {
    match c {
        Condition::Shape => "shape",
        Condition::Hermiticity => "hermiticity",
        Condition::SpectralRange => "spectral_range",
        Condition::GammaRelation => "gamma_relation",
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<u8, Failure> {
    let m = load_matrix(&a.operator)?;
    let gamma = load_gamma(a.gamma.as_deref(), m.rows())?;
    check_shape(&m, &gamma, &a.operator)?;
    let k = m.rows();
    let tol = match a.tol {
        Some(t) => Tolerances { hermitian: t, spectral: t, gamma: t },
        None => Tolerances::for_dim(k),
    };
    let conditions: Vec<ConditionReport> = residuals(&m, &gamma)
        .into_iter()
        .map(|v| {
            let tolerance = match v.condition {
                Condition::Shape => 0.0,
                Condition::Hermiticity => tol.hermitian,
                Condition::SpectralRange => tol.spectral,
                Condition::GammaRelation => tol.gamma,
            };
            ConditionReport {
                condition: condition_name(v.condition).into(),
                residual: v.residual.is_finite().then_some(v.residual),
                tolerance,
                satisfied: v.residual <= tolerance,
            }
        })
        .collect();
    let valid = conditions.iter().all(|c| c.satisfied);
    let sym = (&m + &m.adjoint()).scale_real(0.5);
    let eigenvalues = herm_eig(&sym).map(|e| e.eigenvalues).unwrap_or_default();
    let report = ValidateReport { schema: "1".into(), dim: k, valid, conditions, eigenvalues };

    emit(
        &a.output,
        || {
            let mut s = format!("dimension {k}\n");
            for c in &report.conditions {
                let residual = c.residual.map_or("inf".to_string(), num);
                let _ = writeln!(
                    s,
                    "{:<16} residual {residual:<22} tolerance {:<8} {}",
                    c.condition,
                    num(c.tolerance),
                    status(c.satisfied)
                );
            }
            let _ = writeln!(s, "eigenvalues {}", list(&report.eigenvalues));
            let _ = writeln!(s, "{}", if valid { "valid covariance operator" } else { "NOT a covariance operator" });
            s
        },
        || to_json(&report),
    )?;
    Ok(if valid { exit::OK } else { exit::NEGATIVE })
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct AffineCliReport {
    pub schema: String,
    #[serde(flatten)]
    pub report: AffineReport,
    pub commutator_norm: f64,
    pub necessary_check: NecessaryCheck,
}

fn describe_affine(r: &AffineReport, commutator: f64, nc: &NecessaryCheck) -> String {
    let mut s = String::new();
    let verdict = match r.verdict {
        Verdict::Affine => "affine",
        Verdict::NotAffine => "not_affine",
    };
    let _ = writeln!(s, "verdict          {verdict}");
    let _ =
        writeln!(s, "method           {}", if r.method == carlab::Method::Analytic { "analytic" } else { "numeric" });
    let _ = writeln!(s, "max_discrepancy  {}", num(r.max_discrepancy));
    if let Some(m) = &r.witness_monomial {
        let labels: Vec<String> = m.iter().map(|l| format!("c{l}")).collect();
        let _ = writeln!(s, "witness          {}", if labels.is_empty() { "1".into() } else { labels.join(" ") });
    }
    if let Some(l) = r.witness_lambda {
        let _ = writeln!(s, "witness_lambda   {}", num(l));
    }
    if let Some(d) = r.witness_discrepancy {
        let _ = writeln!(s, "witness_value    {}", complex(d));
    }
    let _ = writeln!(s, "diff_rank        {}", r.diff_rank);
    let _ = writeln!(s, "commuting        {} (|[S, S']| = {})", r.commuting, num(commutator));
    if let Some(pairs) = &r.joint_alphas {
        let text: Vec<String> = pairs.iter().map(|(a, b)| format!("({}, {})", num(*a), num(*b))).collect();
        let _ = writeln!(s, "joint_alphas     {}", text.join(" "));
    }
    let _ = writeln!(s, "necessary_check  {} (residual {})", nc.holds, num(nc.residual));
    s
}

fn cmd_affine(a: AffineArgs) -> Result<u8, Failure> {
    let first = load_matrix(&a.first)?;
    let gamma = load_gamma(a.gamma.as_deref(), first.rows())?;
    let s = load_operator(&a.first, &gamma)?;
    let s2 = load_operator(&a.second, &gamma)?;
    s.same_space(&s2)?;
    let mut opts = AffineOptions::default();
    if let Some(t) = a.tol {
        opts.decision_tol = t;
    }
    let lambdas = (!a.lambdas.is_empty()).then_some(a.lambdas.as_slice());
    let commuting = s.commutator_norm(&s2) <= opts.commute_tol;
    let report = match a.method {
        MethodChoice::Analytic => decide_commuting_with(&s, &s2, opts)?,
        MethodChoice::Auto if commuting => decide_commuting_with(&s, &s2, opts)?,
        MethodChoice::Auto | MethodChoice::Numeric => {
            numeric_test_with(&s, &s2, lambdas, &adapted_diagonalize(&s)?, opts)?
        }
    };
    let commutator_norm = s.commutator_norm(&s2);
    let nc = necessary_check(&s, &s2)?;
    let verdict = report.verdict;
    let full = AffineCliReport { schema: "1".into(), report, commutator_norm, necessary_check: nc };
    emit(&a.output, || describe_affine(&full.report, full.commutator_norm, &full.necessary_check), || to_json(&full))?;
    Ok(if verdict == Verdict::Affine { exit::OK } else { exit::NEGATIVE })
}

fn describe_golden(r: &GoldenReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "eigenvalues S          {}", list(&r.eigenvalues_s));
    let _ = writeln!(s, "eigenvalues S'         {}", list(&r.eigenvalues_s_prime));
    let _ = writeln!(s, "eigenvalues (S+S')/2   {}", list(&r.eigenvalues_mixture));
    let _ = writeln!(s, "each state in its own adapted frame:");
    let _ = writeln!(s, "  phi_S(b)             {}", num(r.own_frame.s));
    let _ = writeln!(s, "  phi_S'(b)            {}", num(r.own_frame.s_prime));
    let _ = writeln!(s, "  phi_(S+S')/2(b)      {}", num(r.own_frame.mixture));
    let _ = writeln!(s, "  discrepancy          {}", num(r.own_frame.discrepancy));
    let _ = writeln!(s, "all states in the adapted frame of S:");
    let _ = writeln!(s, "  phi_S(b)             {}", num(r.common_frame.s));
    let _ = writeln!(s, "  phi_S'(b)            {}", num(r.common_frame.s_prime));
    let _ = writeln!(s, "  phi_(S+S')/2(b)      {}", num(r.common_frame.mixture));
    let _ = writeln!(s, "  discrepancy          {}", num(r.common_frame.discrepancy));
    let _ = writeln!(s, "commutator norm        {}", num(r.commutator_norm));
    let _ = writeln!(s, "reference values       {}", if r.reference_values_match { "match" } else { "MISMATCH" });
    s.push_str("affine test:\n");
    for line in describe_affine(&r.affine, r.commutator_norm, &r.necessary_check).lines() {
        let _ = writeln!(s, "  {line}");
    }
    s
}

fn cmd_example38(a: ExampleArgs) -> Result<u8, Failure> {
    if let Some(dir) = &a.dump {
        fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
        let gamma = to_json(&InvolutionFile::from_involution(&golden::gamma()));
        write_file(&dir.join("gamma.json"), &gamma)?;
        write_file(&dir.join("s.json"), &matrix_to_json(&golden::s_matrix()))?;
        write_file(&dir.join("s_prime.json"), &matrix_to_json(&golden::s_prime_matrix()))?;
    }
    let report = golden::reproduce()?;
    emit(&a.output, || describe_golden(&report), || to_json(&report))?;
    Ok(if report.passed() { exit::OK } else { exit::NEGATIVE })
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// A pair flagged by the explorer, as written to disk.
#[derive(Serialize, Deserialize)]
pub struct PairFile {
    pub schema: String,
    pub trial: usize,
    pub mode: SamplingMode,
    pub rank: usize,
    pub gamma: InvolutionFile,
    pub s: MatrixFile,
    pub s_prime: MatrixFile,
}

fn describe_campaign(r: &CampaignReport) -> String {
    let mut s = String::new();
    let modes: Vec<String> =
        r.modes.iter().map(|m| serde_json::to_value(m).unwrap().as_str().unwrap().to_string()).collect();
    let _ = writeln!(s, "k {}  trials {}  seed {}  modes {}", r.k, r.trials, r.seed, modes.join(","));
    let _ = writeln!(s, "pairs tested {}", r.pairs_tested);
    let _ = writeln!(s, "{:<12} {:>5} {:>8}", "verdict", "rank", "count");
    for h in &r.histogram {
        let v = if h.verdict == Verdict::Affine { "affine" } else { "not_affine" };
        let _ = writeln!(s, "{v:<12} {:>5} {:>8}", h.rank, h.count);
    }
    for c in &r.counterexamples {
        let _ = writeln!(
            s,
            "COUNTEREXAMPLE trial {} rank {} max_discrepancy {}{}",
            c.trial,
            c.rank,
            num(c.max_discrepancy),
            c.file.as_ref().map_or(String::new(), |f| format!(" written to {f}"))
        );
    }
    for v in &r.violations {
        let _ = writeln!(s, "VIOLATION trial {} rank {}", v.trial, v.rank);
    }
    if r.flags.is_empty() {
        s.push_str("no counterexample, no violation\n");
    }
    s
}

fn cmd_conjecture(a: ConjectureArgs) -> Result<u8, Failure> {
    let gamma = load_gamma(a.gamma.as_deref(), a.dim)?;
    let mut options = AffineOptions::default();
    if let Some(t) = a.tol {
        options.decision_tol = t;
    }
    let cfg = CampaignConfig {
        gamma: gamma.clone(),
        trials: usize::try_from(a.trials).map_err(|_| Failure::input("too many trials"))?,
        seed: a.seed,
        modes: if a.modes.is_empty() { SamplingMode::ALL.to_vec() } else { a.modes.clone() },
        options,
    };
    let campaign = explore_conjecture(&cfg)?;
    let mut report = campaign.report;
    if !report.counterexamples.is_empty() {
        fs::create_dir_all(&a.pairs_dir).map_err(|e| Failure::input(format!("{}: {e}", a.pairs_dir.display())))?;
        for (record, (s, s2)) in report.counterexamples.iter_mut().zip(&campaign.counterexample_pairs) {
            let mode = serde_json::to_value(record.mode).unwrap().as_str().unwrap().to_string();
            let path: PathBuf = a.pairs_dir.join(format!("pair-{}-{mode}.json", record.trial));
            let file = PairFile {
                schema: "1".into(),
                trial: record.trial,
                mode: record.mode,
                rank: record.rank,
                gamma: InvolutionFile::from_involution(&gamma),
                s: MatrixFile::from(s.matrix()),
                s_prime: MatrixFile::from(s2.matrix()),
            };
            write_file(&path, &to_json(&file))?;
            record.file = Some(path.display().to_string());
        }
    }
    emit(&a.output, || describe_campaign(&report), || to_json(&report))?;
    Ok(if report.flags.is_empty() { exit::OK } else { exit::COUNTEREXAMPLE })
}

#[derive(Serialize)]
struct RepReport {
    schema: String,
    modes: usize,
    parity: Parity,
    rep_dim: usize,
    #[serde(flatten)]
    car: CarReport,
}

fn cmd_rep(a: RepArgs) -> Result<u8, Failure> {
    let parity = match a.parity {
        ParityChoice::Even => Parity::Even,
        ParityChoice::Odd => Parity::Odd,
    };
    let rep = build_rep(a.modes, parity)?;
    if let Some(dir) = &a.dump {
        fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
        for (i, b) in rep.generators().iter().enumerate() {
            write_file(&dir.join(format!("b{}.json", i + 1)), &matrix_to_json(b))?;
        }
        if let Some(b0) = rep.zero_mode() {
            write_file(&dir.join("b0.json"), &matrix_to_json(b0))?;
        }
    }
    let car = verify_car(&rep, a.trials, a.seed);
    let passed = car.passed;
    let report = RepReport { schema: "1".into(), modes: a.modes, parity, rep_dim: rep.rep_dim(), car };
    emit(
        &a.output,
        || {
            format!(
                "{} modes ({:?}), matrices {}x{}\npairs checked {}\nmax anticommutator residual {}\nmax adjoint residual {}\ntolerance {}\nCAR relations {}\n",
                report.modes,
                parity,
                report.rep_dim,
                report.rep_dim,
                report.car.pairs_checked,
                num(report.car.max_anticommutator_residual),
                num(report.car.max_adjoint_residual),
                num(report.car.tolerance),
                if passed { "hold" } else { "FAIL" }
            )
        },
        || to_json(&report),
    )?;
    Ok(if passed { exit::OK } else { exit::NEGATIVE })
}
