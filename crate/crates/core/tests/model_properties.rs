mod common;

use ptrgeo::dataset::{generate, Example, GenSpec, Task};
use ptrgeo::decode::{beam_search, evaluate, greedy, Constraint, Predictor};
use ptrgeo::nn::{train, Arch, HyperParams, Model, TrainOptions, TrainRecord};
use ptrgeo::Error;

#[test]
fn pointer_network_accepts_any_length() {
    let mut rng = common::rng(30);
    let m = Model::new(Arch::PtrNet, Task::Hull, 8, None, 0.5, 1).unwrap();
    for n in [3, 5, 8, 13, 30, 50] {
        let pts = common::uniform_points(&mut rng, n);
        for d in [greedy(&m, &pts, Constraint::None).unwrap(), beam_search(&m, &pts, 3, Constraint::None).unwrap()] {
            assert!(d.tokens.iter().all(|&t| (1..=n).contains(&t)));
            assert!(d.tokens.len() < 2 * n + 3);
        }
        let ex = Example { task: Task::Hull, points: pts, output: vec![1, 2, 3, 1] };
        assert!(m.nll(&ex).unwrap().is_finite());
    }
}

#[test]
fn fixed_dictionary_models_reject_other_lengths() {
    let mut rng = common::rng(31);
    for arch in [Arch::Seq2Seq, Arch::Seq2SeqAttn] {
        let m = Model::new(arch, Task::Hull, 8, Some(5), 0.5, 1).unwrap();
        let five = common::uniform_points(&mut rng, 5);
        greedy(&m, &five, Constraint::None).unwrap();
        for n in [4, 6, 10] {
            let pts = common::uniform_points(&mut rng, n);
            let unsupported = |e: Error| matches!(e, Error::UnsupportedLength { expected: 5, got } if got == n);
            assert!(unsupported(greedy(&m, &pts, Constraint::None).unwrap_err()));
            assert!(unsupported(beam_search(&m, &pts, 2, Constraint::None).unwrap_err()));
            let ex = Example { task: Task::Hull, points: pts, output: vec![1, 2, 3, 1] };
            assert!(unsupported(m.nll(&ex).unwrap_err()));
            let p = Predictor::Model { model: &m, beam: 1, constraint: Constraint::None };
            assert!(unsupported(evaluate(&p, &[ex]).unwrap_err()));
        }
    }
    assert!(Model::new(Arch::Seq2Seq, Task::Hull, 8, None, 0.5, 1).is_err());
}

fn run(threads: usize) -> (Vec<TrainRecord>, Vec<u64>) {
    let data = generate(&GenSpec::new(Task::Hull, 200, 6, 9)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let mut m = Model::new(Arch::PtrNet, Task::Hull, 16, None, 0.08, 3).unwrap();
        let hp = HyperParams { hidden: 16, steps: 6, batch: 50, seed: 4, ..HyperParams::default() };
        let mut log = Vec::new();
        train(&mut m, &data, &hp, &TrainOptions::default(), |r| log.push(r.clone()), |_, _| Ok(())).unwrap();
        let bits = m.params().iter().flat_map(|p| p.tensor.data().iter().map(|x| x.to_bits())).collect();
        (log, bits)
    })
}

#[test]
fn training_is_identical_for_any_thread_count() {
    let (a, pa) = run(1);
    for t in [2, 3, 7] {
        let (b, pb) = run(t);
        assert_eq!(pa, pb, "{t} threads");
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.loss.to_bits(), y.loss.to_bits());
            assert_eq!(x.grad_norm.to_bits(), y.grad_norm.to_bits());
        }
    }
}
