use std::fmt::Write as _;

use crate::dataset::{label, Example, Task};
use crate::decode::beam::{beam_search, greedy, Constraint, Decoded};
use crate::decode::metrics::{area_coverage, hull_accuracy, triangulation_metrics, tsp_metrics, Coverage};
use crate::error::{Error, Result};
use crate::nn::Model;
use crate::parallel::*;
use crate::tsp::{tour_length, Solver};

/// Where predictions come from.
#[derive(Clone, Copy, Debug)]
pub enum Predictor<'a> {
    Model {
        model: &'a Model,
        beam: usize,
        constraint: Constraint,
    },
    /// A classical algorithm. For hull and triangulation the exact algorithm
    /// runs regardless of the solver.
    Classical(Solver),
}

impl Predictor<'_> {
    pub fn name(&self) -> String {
        match self {
            Predictor::Model { model, beam, .. } => format!("{}-beam{}", model.arch(), beam),
            Predictor::Classical(s) => s.name().to_string(),
        }
    }

    fn predict(&self, ex: &Example) -> Result<Option<Decoded>> {
        match *self {
            Predictor::Model { model, beam, constraint } => {
                let out = if beam == 1 {
                    greedy(model, &ex.points, constraint)
                } else {
                    beam_search(model, &ex.points, beam, constraint)
                };
                match out {
                    Ok(d) => Ok(Some(d)),
                    Err(Error::Decode(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            }
            Predictor::Classical(solver) => {
                let tokens = label(ex.task, &ex.points, solver)?;
                Ok(Some(Decoded { tokens, log_prob: 0.0, capped: false }))
            }
        }
    }
}

/// Outcome for one evaluated example.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub index: usize,
    pub n: usize,
    pub prediction: Vec<usize>,
    /// No prediction was produced.
    pub failed: bool,
    pub capped: bool,
    /// Hull: same polygon. Delaunay: same triangle set. TSP: valid tour.
    pub correct: bool,
    /// Hull: area ratio. Delaunay: triangle coverage. TSP: unused.
    pub coverage: Option<f64>,
    /// Hull prediction that is not a simple polygon.
    pub not_simple: bool,
    /// Delaunay prediction with a trailing partial triple.
    pub malformed: bool,
    pub length: Option<f64>,
    pub label_length: Option<f64>,
}

/// Dataset-level summary, always derivable from the records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Aggregates {
    pub count: usize,
    pub accuracy_pct: f64,
    /// Mean area ratio over simple predictions, `None` when no prediction
    /// was simple.
    pub area_coverage_pct: Option<f64>,
    pub triangle_coverage_pct: f64,
    pub valid_pct: f64,
    pub mean_length: Option<f64>,
    pub mean_label_length: Option<f64>,
    pub not_simple: usize,
    pub malformed: usize,
    pub cap_hits: usize,
    pub decode_failures: usize,
    /// More than 1% of hull predictions were not simple polygons.
    pub fail: bool,
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, k) = it.fold((0.0, 0usize), |(s, k), v| (s + v, k + 1));
    (k > 0).then(|| s / k as f64)
}

impl Aggregates {
    pub fn from_records(task: Task, records: &[EvalRecord]) -> Self {
        let count = records.len();
        let pct = |k: usize| {
            if count == 0 {
                0.0
            } else {
                100.0 * k as f64 / count as f64
            }
        };
        let correct = records.iter().filter(|r| r.correct).count();
        let not_simple = records.iter().filter(|r| r.not_simple).count();
        let area =
            if task == Task::Hull { mean(records.iter().filter_map(|r| r.coverage)).map(|m| 100.0 * m) } else { None };
        let tri = if task == Task::Delaunay {
            100.0 * mean(records.iter().map(|r| r.coverage.unwrap_or(0.0))).unwrap_or(0.0)
        } else {
            0.0
        };
        Self {
            count,
            accuracy_pct: pct(correct),
            area_coverage_pct: area,
            triangle_coverage_pct: tri,
            valid_pct: if task == Task::Tsp { pct(correct) } else { 0.0 },
            mean_length: mean(records.iter().filter_map(|r| r.length)),
            mean_label_length: mean(records.iter().filter_map(|r| r.label_length)),
            not_simple,
            malformed: records.iter().filter(|r| r.malformed).count(),
            cap_hits: records.iter().filter(|r| r.capped).count(),
            decode_failures: records.iter().filter(|r| r.failed).count(),
            fail: task == Task::Hull && not_simple as f64 > 0.01 * count as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub task: Task,
    pub predictor: String,
    pub records: Vec<EvalRecord>,
    pub aggregates: Aggregates,
}

fn score(task: Task, index: usize, ex: &Example, pred: Option<Decoded>) -> Result<EvalRecord> {
    let mut r = EvalRecord {
        index,
        n: ex.n(),
        prediction: Vec::new(),
        failed: pred.is_none(),
        capped: false,
        correct: false,
        coverage: None,
        not_simple: false,
        malformed: false,
        length: None,
        label_length: None,
    };
    if let Some(d) = pred {
        r.prediction = d.tokens;
        r.capped = d.capped;
    }
    match task {
        Task::Hull => {
            r.correct = hull_accuracy(&r.prediction, &ex.output, &ex.points);
            match area_coverage(&r.prediction, &ex.output, &ex.points) {
                Coverage::Ratio(a) => r.coverage = Some(a),
                Coverage::NotSimple => r.not_simple = true,
            }
        }
        Task::Delaunay => {
            let s = triangulation_metrics(&r.prediction, &ex.output);
            r.correct = s.exact && !s.malformed;
            r.coverage = Some(s.coverage);
            r.malformed = s.malformed;
        }
        Task::Tsp => {
            let s = tsp_metrics(&r.prediction, &ex.points);
            r.correct = s.valid;
            r.length = s.length;
            r.label_length = Some(tour_length(&ex.points, &ex.output)?);
        }
    }
    Ok(r)
}

/// Scores `predictor` on every example, in parallel, keeping input order.
pub fn evaluate(predictor: &Predictor<'_>, data: &[Example]) -> Result<EvalReport> {
    let task = match data.first() {
        Some(ex) => ex.task,
        None => return Err(Error::Input("evaluation set is empty".into())),
    };
    if let Some(ex) = data.iter().find(|e| e.task != task) {
        return Err(Error::Input(format!("mixed tasks in evaluation set: {} and {}", task, ex.task)));
    }
    if let Predictor::Model { model, beam, .. } = predictor {
        if model.task() != task {
            return Err(Error::Input(format!("model was trained on {} but the data is {}", model.task(), task)));
        }
        if *beam == 0 {
            return Err(Error::Argument("beam width must be at least 1".into()));
        }
        for ex in data {
            model.check_length(ex.n())?;
        }
    }
    let records = data
        .par_iter()
        .enumerate()
        .map(|(i, ex)| score(task, i, ex, predictor.predict(ex)?))
        .collect::<Vec<Result<EvalRecord>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let aggregates = Aggregates::from_records(task, &records);
    Ok(EvalReport { task, predictor: predictor.name(), records, aggregates })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

impl EvalReport {
    /// Flat `key=value` summary.
    pub fn to_text(&self) -> String {
        let a = &self.aggregates;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("task", self.task.to_string());
        kv("predictor", self.predictor.clone());
        kv("examples", a.count.to_string());
        match self.task {
            Task::Hull => {
                kv("accuracy_pct", format!("{:.4}", a.accuracy_pct));
                let area = if a.fail { "FAIL".to_string() } else { opt(a.area_coverage_pct) };
                kv("area_coverage_pct", area);
                kv("not_simple", a.not_simple.to_string());
            }
            Task::Delaunay => {
                kv("accuracy_pct", format!("{:.4}", a.accuracy_pct));
                kv("triangle_coverage_pct", format!("{:.4}", a.triangle_coverage_pct));
                kv("malformed", a.malformed.to_string());
            }
            Task::Tsp => {
                kv("valid_pct", format!("{:.4}", a.valid_pct));
                kv("mean_length", opt(a.mean_length));
                kv("mean_label_length", opt(a.mean_label_length));
            }
        }
        kv("cap_hits", a.cap_hits.to_string());
        kv("decode_failures", a.decode_failures.to_string());
        kv("fail", a.fail.to_string());
        s
    }

    /// One tab-separated line per example, with a header.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from(
            "index\tn\tcorrect\tcoverage\tnot_simple\tmalformed\tcapped\tfailed\tlength\tlabel_length\tprediction\n",
        );
        for r in &self.records {
            let pred: Vec<String> = r.prediction.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.index,
                r.n,
                r.correct as u8,
                opt(r.coverage),
                r.not_simple as u8,
                r.malformed as u8,
                r.capped as u8,
                r.failed as u8,
                opt(r.length),
                opt(r.label_length),
                pred.join(" ")
            );
        }
        s
    }
}
