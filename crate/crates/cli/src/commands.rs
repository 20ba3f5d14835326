use std::time::Instant;

use serde::{Deserialize, Serialize};

use permix::acceptance::{run_criterion, AcceptanceOptions, CriterionOutcome, CRITERIA};
use permix::census::{
    asymp_bound, asymp_large_m, mc_slowdown, p_closed_form, p_exact_bruteforce, p_upper_bound_sum, slowdown_census,
    subshift_census, to_f64, CensusRow, MCEstimate, SubshiftCensus,
};
use permix::permcore::{classify_fast, classify_oracle, MapFamily, MixingVerdict, DEFAULT_ORACLE_CAP};
use permix::specmat::{
    build_a, build_ap, build_b, build_bq, build_c, build_p, build_q, decelerates_exact, density_evolution_rate,
    eigen_spectrum, fredholm_zeros, invariant_density, lambda_sigma, r_ess_and_entropy, worst_permutation,
    worst_rate_bound, FredholmModel, RateReport, Spectrum,
};
use permix::{Error, Permutation};

use crate::render::{emit, Report, Table};
use crate::{default_seed, CliError, Command, Format, MatrixKind, Params};

const TABLE2_SAMPLES: usize = 10_000;

fn need<T: Copy>(v: Option<T>, flag: &str, cmd: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("`{cmd}` needs --{flag}")))
}

fn sigma(params: &Params, cmd: &str) -> Result<Permutation, CliError> {
    let lit = params
        .sigma
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("`{cmd}` needs --sigma")))?;
    Ok(Permutation::parse(lit, params.n)?)
}

fn runtime(params: &Params, start: Instant) -> Option<u128> {
    params.timing.then(|| start.elapsed().as_millis())
}

/// Runs one command. `Ok(false)` means the command ran but a check failed.
pub fn run(command: &Command, params: &Params, start: Instant) -> Result<bool, CliError> {
    let json = params.output.unwrap_or(Format::Json);
    match command {
        Command::Classify => {
            let out = classify(params)?;
            emit(&out, json, runtime(params, start))?;
        }
        Command::Spectrum { matrix, export } => {
            let m = spectrum(params, *matrix, *export)?;
            if let Some(out) = m {
                emit(&out, json, runtime(params, start))?;
            }
        }
        Command::Rate { evolve, exact } => {
            let out = rate(params, *evolve, *exact)?;
            emit(&out, json, runtime(params, start))?;
        }
        Command::Worst => {
            let (m, n) = (need(params.m, "m", "worst")?, need(params.n, "N", "worst")?);
            let tau = worst_permutation(m, n)?;
            let out = WorstOutput {
                m,
                n,
                bound: worst_rate_bound(m, n)?,
                lambda_tau: lambda_sigma(&tau, m, params.tol)?.lambda_sigma,
                tau,
            };
            emit(&out, json, runtime(params, start))?;
        }
        Command::Enumerate => {
            let m = need(params.m, "m", "enumerate")?;
            match (params.n, params.ell) {
                (Some(n), None) => {
                    let row = slowdown_census(m, n, params.tol, params.long_run)?;
                    emit(&CensusReport(row), json, runtime(params, start))?;
                }
                (None, Some(ell)) => {
                    let out = p_summary(ell, m, params.long_run)?;
                    emit(&out, json, runtime(params, start))?;
                }
                _ => return Err(CliError::Usage("`enumerate` needs exactly one of --N and --ell".into())),
            }
        }
        Command::Sample => {
            let (m, n) = (need(params.m, "m", "sample")?, need(params.n, "N", "sample")?);
            let samples = need(params.samples, "samples", "sample")?;
            let seed = params.seed.unwrap_or_else(default_seed);
            let est = mc_slowdown(m, n, samples, seed, params.tol)?;
            emit(&SampleReport(est), json, runtime(params, start))?;
        }
        Command::Tables { which } => {
            let format = params.output.unwrap_or(Format::Csv);
            if *which == 1 {
                emit(&table1(params)?, format, None)?;
            } else {
                emit(&table2(params)?, format, None)?;
            }
        }
        Command::Subshift => {
            let ell = need(params.ell, "ell", "subshift")?;
            let out = subshift(ell)?;
            emit(&out, json, runtime(params, start))?;
        }
        Command::Verify { criterion } => {
            let format = params.output.unwrap_or(Format::Text);
            let ids: Vec<usize> = if criterion.is_empty() {
                (1..=CRITERIA.len()).collect()
            } else {
                criterion.clone()
            };
            let opts = AcceptanceOptions {
                long_run: params.long_run,
                seed: params.seed.unwrap_or_else(default_seed),
            };
            let mut outcomes = Vec::new();
            for id in ids {
                eprintln!("running criterion {id}");
                let t = Instant::now();
                let outcome = run_criterion(id, &opts)?;
                if params.timing {
                    eprintln!("criterion {id}: {} ms", t.elapsed().as_millis());
                }
                outcomes.push(outcome);
            }
            let ok = outcomes.iter().all(|o| o.passed);
            emit(&VerifyReport(outcomes), format, None)?;
            return Ok(ok);
        }
    }
    Ok(true)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub family: MapFamily,
    pub sigma: Permutation,
    #[serde(flatten)]
    pub verdict: MixingVerdict,
    /// Whether the exhaustive subset check gives the same status; absent when
    /// it was not run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_check_agrees: Option<bool>,
}

impl Report for ClassifyOutput {
    fn text(&self) -> String {
        let mut s = format!("{:?}", self.verdict.status);
        if let Some(w) = &self.verdict.witness {
            let blocks: Vec<String> = w.blocks().iter().map(|b| format!("{b:?}")).collect();
            s += &format!(" witness {}", blocks.join(" "));
        }
        s + "\n"
    }
}

fn classify(params: &Params) -> Result<ClassifyOutput, CliError> {
    let sigma = sigma(params, "classify")?;
    match (params.m, params.ell) {
        (Some(m), None) => {
            let n = sigma.n();
            let family = MapFamily::multiply(m, n)?;
            let verdict = classify_fast(&sigma, m, n)?;
            let subset_check_agrees = match classify_oracle(&sigma, &family, DEFAULT_ORACLE_CAP) {
                Ok(v) => Some(v.status == verdict.status),
                Err(Error::TooLarge { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(ClassifyOutput {
                family,
                sigma,
                verdict,
                subset_check_agrees,
            })
        }
        (None, Some(ell)) => {
            let family = MapFamily::subshift(ell)?;
            let verdict = classify_oracle(&sigma, &family, DEFAULT_ORACLE_CAP)?;
            Ok(ClassifyOutput {
                family,
                sigma,
                verdict,
                subset_check_agrees: None,
            })
        }
        _ => Err(CliError::Usage("`classify` needs exactly one of --m and --ell".into())),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpectrumOutput {
    pub matrix: String,
    pub m: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(flatten)]
    pub spectrum: Spectrum,
}

impl Report for SpectrumOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        for e in &self.spectrum.eigenvalues {
            s += &format!("{:+.12} {:+.12}i  |{:.12}|  x{}\n", e.re, e.im, e.modulus(), e.mult);
        }
        s
    }

    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["re", "im", "modulus", "mult"],
            rows: self
                .spectrum
                .eigenvalues
                .iter()
                .map(|e| vec![e.re.to_string(), e.im.to_string(), e.modulus().to_string(), e.mult.to_string()])
                .collect(),
        })
    }
}

fn spectrum(params: &Params, kind: MatrixKind, export: bool) -> Result<Option<SpectrumOutput>, CliError> {
    let m = need(params.m, "m", "spectrum")?;
    let with_sigma = matches!(kind, MatrixKind::Ap | MatrixKind::Bq | MatrixKind::P | MatrixKind::Q);
    let (matrix, n, scale) = if with_sigma {
        let s = sigma(params, "spectrum")?;
        let n = s.n();
        match kind {
            MatrixKind::Ap => (build_ap(&s, m)?, n, m as f64),
            MatrixKind::Bq => (build_bq(&s, m)?, n, m as f64),
            MatrixKind::P => (build_p(&s)?, n, 1.0),
            _ => (build_q(&s, m)?, n, 1.0),
        }
    } else {
        let n = need(params.n, "N", "spectrum")?;
        match kind {
            MatrixKind::A => (build_a(m, n)?, n, 1.0),
            MatrixKind::B => (build_b(m, n)?, n, 1.0),
            _ => (build_c(m, n)?, n, 1.0),
        }
    };
    if export {
        print!("{}", matrix.to_csv());
        return Ok(None);
    }
    let name = match kind {
        MatrixKind::Ap => "AP/m",
        MatrixKind::Bq => "BQ/m",
        MatrixKind::A => "A",
        MatrixKind::B => "B",
        MatrixKind::C => "C",
        MatrixKind::P => "P",
        MatrixKind::Q => "Q",
    };
    Ok(Some(SpectrumOutput {
        matrix: name.into(),
        m: Some(m),
        n,
        spectrum: eigen_spectrum(&matrix.to_f64_scaled(scale), params.tol)?,
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RateOutput {
    pub m: usize,
    pub sigma: Permutation,
    /// `Lambda_sigma > 1/m + tol`
    pub decelerates: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decelerates_exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_rate: Option<f64>,
    #[serde(flatten)]
    pub report: RateReport,
}

impl Report for RateOutput {
    fn text(&self) -> String {
        let mut s = format!(
            "Lambda_sigma {:.12}\nr_ess {:.12}\nspectral_mixing {}\ndecelerates {}\n",
            self.report.lambda_sigma, self.report.r_ess, self.report.spectral_mixing, self.decelerates
        );
        if let Some(e) = self.decelerates_exact {
            s += &format!("decelerates_exact {e}\n");
        }
        if let Some(r) = self.density_rate {
            s += &format!("density_rate {r:.12}\n");
        }
        s
    }
}

fn rate(params: &Params, evolve: Option<usize>, exact: bool) -> Result<RateOutput, CliError> {
    let m = need(params.m, "m", "rate")?;
    let sigma = sigma(params, "rate")?;
    let report = lambda_sigma(&sigma, m, params.tol)?;
    let decelerates_exact = if exact { Some(decelerates_exact(&sigma, m)?) } else { None };
    let density_rate = match evolve {
        Some(steps) => Some(density_evolution_rate(&sigma, m, steps, params.seed.unwrap_or_else(default_seed))?),
        None => None,
    };
    Ok(RateOutput {
        m,
        decelerates: report.lambda_sigma > 1.0 / m as f64 + params.tol,
        decelerates_exact,
        density_rate,
        sigma,
        report,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WorstOutput {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub tau: Permutation,
    /// `|sin(pi m/N) / (m sin(pi/N))|`
    pub bound: f64,
    /// Rate of `tau` from the eigensolver
    pub lambda_tau: f64,
}

impl Report for WorstOutput {
    fn text(&self) -> String {
        format!("tau {}\nbound {:.15}\nlambda_tau {:.15}\n", self.tau, self.bound, self.lambda_tau)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CensusReport(pub CensusRow);

fn opt(c: &Option<impl ToString>) -> String {
    c.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn census_cells(r: &CensusRow) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.m.to_string(),
        r.total.to_string(),
        opt(&r.nonmixing_count),
        opt(&r.slow_count),
        format!("{:?}", r.method),
    ]
}

impl Report for CensusReport {
    fn text(&self) -> String {
        let r = &self.0;
        format!(
            "N {} m {}: {} permutations, {} non-mixing, {} slow\n",
            r.n,
            r.m,
            r.total,
            opt(&r.nonmixing_count),
            opt(&r.slow_count)
        )
    }

    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["N", "m", "total", "nonmixing_count", "slow_count", "method"],
            rows: vec![census_cells(&self.0)],
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PSummary {
    pub ell: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Exhaustive value as `p/q`; absent when the sweep exceeds the cap.
    pub p_exhaustive: Option<String>,
    /// Closed form as `p/q` (ell <= 4).
    pub p_closed_form: Option<String>,
    /// Sum of b_j over j >= 2, as `p/q`.
    pub stabilizer_sum: String,
    pub stabilizer_sum_value: f64,
    /// `11 (2e/ell)^(m-1)`, for ell >= 6.
    pub asymptotic_bound: Option<f64>,
    /// Leading large-m behaviour of p(ell, m).
    pub large_m_estimate: Option<f64>,
}

impl Report for PSummary {
    fn text(&self) -> String {
        let mut s = format!("p({}, {}) over S_{}\n", self.ell, self.m, self.n);
        s += &format!("exhaustive {}\n", self.p_exhaustive.as_deref().unwrap_or("(not run)"));
        if let Some(c) = &self.p_closed_form {
            s += &format!("closed form {c}\n");
        }
        s += &format!("stabilizer sum {} ~ {:.6e}\n", self.stabilizer_sum, self.stabilizer_sum_value);
        if let Some(b) = self.asymptotic_bound {
            s += &format!("bound {b:.6e}\n");
        }
        if let Some(e) = self.large_m_estimate {
            s += &format!("large-m estimate {e:.6e}\n");
        }
        s
    }
}

fn p_summary(ell: usize, m: usize, long_run: bool) -> Result<PSummary, CliError> {
    let n = ell * m;
    let p_exhaustive = match p_exact_bruteforce(ell, m, long_run) {
        Ok(p) => Some(p.to_string()),
        Err(Error::TooLarge { .. }) => {
            eprintln!("note: S_{n} sweep skipped (use --long-run to allow up to S_12)");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let p_closed_form = if ell <= 4 { Some(p_closed_form(ell, m)?.to_string()) } else { None };
    let sum = p_upper_bound_sum(ell, m)?;
    Ok(PSummary {
        ell,
        m,
        n,
        p_exhaustive,
        p_closed_form,
        stabilizer_sum_value: to_f64(&sum),
        stabilizer_sum: sum.to_string(),
        asymptotic_bound: if ell >= 6 { Some(asymp_bound(ell, m)?) } else { None },
        large_m_estimate: if ell >= 2 { Some(asymp_large_m(ell, m)?) } else { None },
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SampleReport(pub MCEstimate);

fn sample_cells(e: &MCEstimate) -> Vec<String> {
    vec![
        e.n.to_string(),
        e.m.to_string(),
        e.proportion.to_string(),
        e.std_error.to_string(),
        e.samples.to_string(),
        e.hits.to_string(),
        e.seed.to_string(),
    ]
}

const SAMPLE_HEADER: [&str; 7] = ["N", "m", "proportion", "std_error", "samples", "hits", "seed"];

impl Report for SampleReport {
    fn text(&self) -> String {
        let e = &self.0;
        format!(
            "N {} m {}: {}/{} slow, proportion {:.4} (se {:.4}), seed {}\n",
            e.n, e.m, e.hits, e.samples, e.proportion, e.std_error, e.seed
        )
    }

    fn table(&self) -> Option<Table> {
        Some(Table {
            header: SAMPLE_HEADER.to_vec(),
            rows: vec![sample_cells(&self.0)],
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Table1(pub Vec<CensusRow>);

impl Report for Table1 {
    fn text(&self) -> String {
        let mut s = format!("{:>4} {:>8} {:>8} {:>8}\n", "N", "m=2", "m=3", "m=4");
        for chunk in self.0.chunks(3) {
            s += &format!("{:>4}", chunk[0].n);
            for r in chunk {
                s += &format!(" {:>8}", opt(&r.slow_count));
            }
            s += "\n";
        }
        s
    }

    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["N", "m", "slow_count"],
            rows: self
                .0
                .iter()
                .map(|r| vec![r.n.to_string(), r.m.to_string(), opt(&r.slow_count)])
                .collect(),
        })
    }
}

fn table1(params: &Params) -> Result<Table1, CliError> {
    let mut rows = Vec::new();
    for n in [3, 4, 6, 8] {
        for m in [2, 3, 4] {
            eprintln!("counting slow permutations for N = {n}, m = {m}");
            rows.push(slowdown_census(m, n, params.tol, params.long_run)?);
        }
    }
    Ok(Table1(rows))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Table2(pub Vec<MCEstimate>);

impl Report for Table2 {
    fn text(&self) -> String {
        let mut s = format!("{:>4} {:>16} {:>16}\n", "N", "m=2", "m=3");
        for chunk in self.0.chunks(2) {
            s += &format!("{:>4}", chunk[0].n);
            for e in chunk {
                s += &format!(" {:>7.4} ({:.4})", e.proportion, e.std_error);
            }
            s += "\n";
        }
        s
    }

    fn table(&self) -> Option<Table> {
        Some(Table {
            header: SAMPLE_HEADER.to_vec(),
            rows: self.0.iter().map(sample_cells).collect(),
        })
    }
}

fn table2(params: &Params) -> Result<Table2, CliError> {
    let samples = params.samples.unwrap_or(TABLE2_SAMPLES);
    let seed = params.seed.unwrap_or_else(default_seed);
    let mut rows = Vec::new();
    for n in [8, 30, 40, 50] {
        for m in [2, 3] {
            eprintln!("sampling {samples} permutations for N = {n}, m = {m}");
            rows.push(mc_slowdown(m, n, samples, seed, params.tol)?);
        }
    }
    Ok(Table2(rows))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubshiftOutput {
    #[serde(flatten)]
    pub census: SubshiftCensus,
    /// Zeros of the Fredholm determinant as `[re, im]`.
    pub fredholm_zeros: Vec<[f64; 2]>,
    /// Invariant density on the two cells, as `p/q`.
    pub density: Vec<String>,
    pub r_ess: f64,
    pub entropy: f64,
}

impl Report for SubshiftOutput {
    fn text(&self) -> String {
        let c = &self.census;
        let zeros: Vec<String> = self.fredholm_zeros.iter().map(|[re, im]| format!("{re}{im:+}i")).collect();
        format!(
            "ell {}: {}/{} non-mixing, {} with a pinned cell (closed form {})\n\
             Fredholm zeros {}\ndensity ({})\nr_ess {:.12}\nentropy {:.12}\n",
            c.ell,
            c.nonmixing_count,
            c.total,
            c.witness_count,
            c.witness_proportion,
            zeros.join(", "),
            self.density.join(", "),
            self.r_ess,
            self.entropy
        )
    }
}

fn subshift(ell: usize) -> Result<SubshiftOutput, CliError> {
    let census = subshift_census(ell)?;
    let model = FredholmModel::subshift();
    let (r_ess, entropy) = r_ess_and_entropy(&model)?;
    Ok(SubshiftOutput {
        census,
        fredholm_zeros: fredholm_zeros(&model)?.iter().map(|z| [z.re + 0.0, z.im + 0.0]).collect(),
        density: invariant_density(&model)?.iter().map(ToString::to_string).collect(),
        r_ess,
        entropy,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerifyReport(pub Vec<CriterionOutcome>);

impl Report for VerifyReport {
    fn text(&self) -> String {
        self.0.iter().map(|o| o.line() + "\n").collect()
    }

    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["criterion", "title", "passed", "detail"],
            rows: self
                .0
                .iter()
                .map(|o| vec![o.id.to_string(), o.title.clone(), o.passed.to_string(), o.detail.clone()])
                .collect(),
        })
    }
}
