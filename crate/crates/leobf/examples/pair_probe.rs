// temp probe
use leobf::array::ArrayGeometry;
use leobf::link::{BeamformingMode, LinkBudget};
use leobf::opt::{solve, Algorithm, DirectedEmitter, ObjectiveSpec, SolverConfig};

fn main() {
    let d = |az: f64, th: f64| leobf::geom::ArrivalDirection::new(az, th, 820.0).unwrap();
    let spec = ObjectiveSpec::new(
        BeamformingMode::Analog,
        vec![DirectedEmitter { direction: d(0.0, 0.1), eirp_w: 10.0 }],
        vec![
            DirectedEmitter { direction: d(2.0, 0.4), eirp_w: 1000.0 },
            DirectedEmitter { direction: d(4.0, 0.5), eirp_w: 1000.0 },
            DirectedEmitter { direction: d(5.5, 0.3), eirp_w: 1000.0 },
        ],
        ArrayGeometry::half_wavelength(4, 4).unwrap(),
        LinkBudget::l_band_default(),
    )
    .unwrap();
    for seed in [3u64, 9] {
        let r = solve(&spec, &SolverConfig::new(Algorithm::LocalAscent, seed, 6000)).unwrap();
        let t = &r.trace;
        let pick = |i: usize| t[i.min(t.len() - 1)] / 1e6;
        println!(
            "LA seed {seed}: evals={}  f@1={:.4} f@100={:.4} f@500={:.4} f@1500={:.4} f@3000={:.4} f@6000={:.4}",
            r.eval_count, pick(0), pick(99), pick(499), pick(1499), pick(2999), pick(5999)
        );
        let rg = solve(&spec, &SolverConfig::new(Algorithm::Genetic, seed, 6000)).unwrap();
        let tg = &rg.trace;
        let pickg = |i: usize| tg[i.min(tg.len() - 1)] / 1e6;
        println!(
            "GA seed {seed}: evals={}  f@1={:.4} f@100={:.4} f@500={:.4} f@1500={:.4} f@3000={:.4} f@6000={:.4}",
            rg.eval_count, pickg(0), pickg(99), pickg(499), pickg(1499), pickg(2999), pickg(5999)
        );
    }
}
