use dsntt::params::{build_domain, find_ntt_prime, Direction, NttDomain};
use dsntt::pipeline::{build_pipeline, convolve, cycle_model, run, Phase, PipelineConfig};
use dsntt::reference::{bit_reverse_permute, cyclic_convolve, naive_intt, naive_ntt};
use dsntt::word::{random_below, Word};
use dsntt::{Error, U256, U512};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn domain<W: Word>(q: &W, n: usize, d: u32, dir: Direction) -> NttDomain<W> {
    build_domain(q, n, d, dir).unwrap()
}

fn random_vec<W: Word>(rng: &mut ChaCha8Rng, q: &W, n: usize) -> Vec<W> {
    (0..n).map(|_| random_below(rng, q)).collect()
}

#[test]
fn four_point_examples() {
    let fwd = domain(&13u64, 4, 4, Direction::Forward);
    let (out, report) = run(PipelineConfig::new(fwd.clone(), 1), &[1, 2, 3, 4]).unwrap();
    assert_eq!(out, vec![10, 11, 1, 8]);
    assert_eq!(report.range_violations, 0);

    let (out, _) = run(
        PipelineConfig::new(fwd, 1).reorder_output(true),
        &[1, 2, 3, 4],
    )
    .unwrap();
    assert_eq!(out, vec![10, 1, 11, 8]);

    let inv = domain(&13u64, 4, 4, Direction::Inverse);
    let (out, _) = run(
        PipelineConfig::new(inv.clone(), 1).reorder_output(true),
        &[10, 1, 11, 8],
    )
    .unwrap();
    assert_eq!(out, vec![1, 2, 3, 4]);
    let (out, _) = run(PipelineConfig::new(inv, 1), &[10, 1, 11, 8]).unwrap();
    assert_eq!(out, bit_reverse_permute(&[1, 2, 3, 4]));
}

#[test]
fn zeros_map_to_zeros() {
    for (n, paths, d) in [(4, 1, 4), (8, 2, 4), (16, 4, 8), (16, 8, 2)] {
        let dom = domain(&65537u64, n, d, Direction::Forward);
        let (out, _) = run(PipelineConfig::new(dom, paths), &vec![0; n]).unwrap();
        assert_eq!(out, vec![0; n]);
    }
}

#[test]
fn structure_examples() {
    let p = build_pipeline(PipelineConfig::new(
        domain(&17u64, 8, 4, Direction::Forward),
        2,
    ))
    .unwrap();
    let s = p.structure();
    assert_eq!(
        (s.paths, s.stages_per_path, s.merge_layers, s.exit_units),
        (2, 2, 1, 2)
    );
    assert_eq!(s.buffer_capacities, vec![2 * 2, 2]);
    assert!(s.pe_counts.iter().all(|&c| c == 2));

    let p = build_pipeline(PipelineConfig::new(
        domain(&13u64, 4, 4, Direction::Forward),
        1,
    ))
    .unwrap();
    let s = p.structure();
    assert_eq!((s.paths, s.stages_per_path, s.merge_layers), (1, 2, 0));

    let err = build_pipeline(PipelineConfig::new(
        domain(&13u64, 4, 4, Direction::Forward),
        4,
    ));
    assert!(matches!(err, Err(Error::InvalidConfig(_))));
    let err = build_pipeline(PipelineConfig::new(
        domain(&13u64, 4, 4, Direction::Forward),
        3,
    ));
    assert!(matches!(err, Err(Error::InvalidConfig(_))));
    let err = build_pipeline(
        PipelineConfig::new(domain(&13u64, 4, 4, Direction::Forward), 1).pe_latency(0),
    );
    assert!(matches!(err, Err(Error::InvalidConfig(_))));
}

#[test]
fn input_validation() {
    let dom = domain(&13u64, 4, 4, Direction::Forward);
    let mut p = build_pipeline(PipelineConfig::new(dom, 1)).unwrap();
    assert!(matches!(
        p.run(&[1, 2, 3]),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(matches!(
        p.run(&[1, 2, 3, 13]),
        Err(Error::OutOfRange { .. })
    ));
    assert!(matches!(p.step(), Err(Error::NotLoaded)));
}

#[test]
fn stepping_matches_the_schedule() {
    let dom = domain(&13u64, 4, 4, Direction::Forward);
    let cfg = PipelineConfig::new(dom, 1);
    let mut p = build_pipeline(cfg.clone()).unwrap();
    p.load(&[1, 2, 3, 4]).unwrap();
    let nd = 2;

    let first = p.step().unwrap();
    assert_eq!(first.cycle, 0);
    assert_eq!(first.stages[0].phase, Phase::Move);
    assert_eq!(first.stages[0].buffer_occupancy, 1);

    let mut compute_at = None;
    let mut cycles = 1;
    while !p.is_done() {
        let obs = p.step().unwrap();
        if compute_at.is_none() && obs.stages[0].phase == Phase::Compute {
            compute_at = Some(obs.cycle);
        }
        cycles += 1;
    }
    assert_eq!(compute_at, Some(2 * nd as u64));
    let idle = p.step().unwrap();
    assert!(idle.idle);
    assert_eq!(idle.cycle, cycles);

    let (_, report) = run(cfg.clone(), &[1, 2, 3, 4]).unwrap();
    assert_eq!(report.total_cycles, cycles);
    assert_eq!(report.total_cycles, cycle_model(&cfg).total);
}

#[test]
fn cycle_model_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2usize, 4, 8, 16, 32, 64] {
        for paths in [1usize, 2, 4, 8, 16] {
            if n / paths < 2 {
                continue;
            }
            for d in [1u32, 3, 4, 8, 16] {
                for pe in [1u32, 2, 4] {
                    for dir in [Direction::Forward, Direction::Inverse] {
                        let dom = domain(&65537u64, n, d, dir);
                        let cfg = PipelineConfig::new(dom.clone(), paths).pe_latency(pe);
                        let a = random_vec(&mut rng, &65537u64, n);
                        let (out, report) = run(cfg.clone(), &a).unwrap();
                        let expected = match dir {
                            Direction::Forward => naive_ntt(&a, &dom).unwrap(),
                            Direction::Inverse => naive_intt(&a, &dom).unwrap(),
                        };
                        let ctx = format!("n={n} paths={paths} d={d} pe={pe} {dir}");
                        assert_eq!(out, bit_reverse_permute(&expected), "{ctx}");
                        assert_eq!(report.total_cycles, cycle_model(&cfg).total, "{ctx}");
                        assert_eq!(report.fill_latency, cycle_model(&cfg).first_output, "{ctx}");
                        assert_eq!(report.range_violations, 0, "{ctx}");
                        assert_eq!(report.multiplier_contract_violations, 0, "{ctx}");
                    }
                }
            }
        }
    }
}

#[test]
fn eight_point_cycle_totals() {
    for paths in [1, 2] {
        let cfg = PipelineConfig::new(domain(&17u64, 8, 4, Direction::Forward), paths);
        let (_, report) = run(cfg.clone(), &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        assert_eq!(report.total_cycles, cycle_model(&cfg).total);
    }
}

#[test]
fn wide_words_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q: U256 = find_ntt_prime(64, 64).unwrap();
    let q_large: U512 = find_ntt_prime(253, 64).unwrap();
    for (n, paths, d) in [(64usize, 8usize, 32u32), (64, 1, 16), (16, 4, 8)] {
        let dom = domain(&q, n, d, Direction::Forward);
        let a = random_vec(&mut rng, &q, n);
        let (out, report) = run(
            PipelineConfig::new(dom.clone(), paths).reorder_output(true),
            &a,
        )
        .unwrap();
        assert_eq!(out, naive_ntt(&a, &dom).unwrap());
        assert_eq!(report.range_violations, 0);

        let dom = domain(&q_large, n, d, Direction::Inverse);
        let a = random_vec(&mut rng, &q_large, n);
        let (out, _) = run(
            PipelineConfig::new(dom.clone(), paths).reorder_output(true),
            &a,
        )
        .unwrap();
        assert_eq!(out, naive_intt(&a, &dom).unwrap());
    }
}

#[test]
fn traces_are_deterministic() {
    let dom = domain(&17u64, 8, 4, Direction::Forward);
    let cfg = PipelineConfig::new(dom, 2).trace(true);
    let a = [3, 1, 4, 1, 5, 9, 2, 6];
    let (_, r1) = run(cfg.clone(), &a).unwrap();
    let (_, r2) = run(cfg.clone(), &a).unwrap();
    assert!(r1.trace_digest.is_some());
    assert_eq!(r1.trace_digest, r2.trace_digest);
    let (_, r3) = run(cfg.clone(), &[3, 1, 4, 1, 5, 9, 2, 7]).unwrap();
    assert_ne!(r1.trace_digest, r3.trace_digest);

    let mut p = build_pipeline(cfg).unwrap();
    p.run(&a).unwrap();
    let trace = p.trace().unwrap();
    let mut csv = Vec::new();
    trace.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("cycle,stage,phase,link,digit\n0,in.l0,move,in,"));
    let mut jsonl = Vec::new();
    trace.write_jsonl(&mut jsonl).unwrap();
    assert_eq!(
        String::from_utf8(jsonl).unwrap().lines().count(),
        trace.records().len()
    );
}

#[test]
fn convolution_examples() {
    let q = 65537u64;
    let dom = domain(&q, 8, 8, Direction::Forward);
    let b = [5, 6, 7, 8, 9, 10, 11, 12];
    let delta = [1, 0, 0, 0, 0, 0, 0, 0];
    assert_eq!(convolve(&delta, &b, &dom, 2, 4).unwrap().values, b.to_vec());
    let shift = [0, 1, 0, 0, 0, 0, 0, 0];
    assert_eq!(
        convolve(&shift, &b, &dom, 4, 4).unwrap().values,
        vec![12, 5, 6, 7, 8, 9, 10, 11]
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dom = domain(&q, 64, 16, Direction::Forward);
    for paths in [1, 8] {
        let a = random_vec(&mut rng, &q, 64);
        let b = random_vec(&mut rng, &q, 64);
        let c = convolve(&a, &b, &dom, paths, 4).unwrap();
        assert_eq!(c.values, cyclic_convolve(&a, &b, &dom).unwrap());
    }
}
