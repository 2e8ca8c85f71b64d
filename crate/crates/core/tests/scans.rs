use aqt_core::adiabatic_frame::resonance_times;
use aqt_core::scan::{find_resonances, run_scan, ResonanceOptions, ScanSettings};
use aqt_core::{Coupling, Schedule};

#[test]
fn xx_harmonic_scan_tracks_closed_form() {
    let series = run_scan(Coupling::XX, Schedule::Harmonic, 0.25, 4.0, 120, &ScanSettings::default()).unwrap();
    assert!(series.max_analytic_deviation().unwrap() <= 1e-7);
    assert!(series.infidelity.iter().all(|e| (-1e-12..=1.0 + 1e-12).contains(e)));
    assert_eq!(series.steps[0], 1024);
    assert_eq!(*series.steps.last().unwrap(), 4096);
}

#[test]
fn xx_harmonic_resonances_on_short_range() {
    let series = run_scan(Coupling::XX, Schedule::Harmonic, 0.25, 3.5, 140, &ScanSettings::default()).unwrap();
    let report = find_resonances(&series, &ResonanceOptions::default()).unwrap();
    let expected = resonance_times(3).unwrap();
    assert_eq!(report.resonances.len(), 3);
    for (found, x) in report.resonances.iter().zip(&expected) {
        assert!((found.x - x).abs() < 1e-5, "{} vs {x}", found.x);
        assert!(found.infidelity < 1e-10);
    }
    assert!(report.minima.windows(2).all(|w| w[0].x < w[1].x));
    // Refined minima never exceed the grid values around them.
    for m in &report.minima {
        let i = series.grid.iter().position(|&g| g > m.x).unwrap();
        assert!(m.infidelity <= series.infidelity[i].max(series.infidelity[i - 1]));
    }
}

#[test]
fn quad_b_has_no_resonances() {
    let series = run_scan(Coupling::XX, Schedule::QuadB, 0.25, 8.0, 160, &ScanSettings::default()).unwrap();
    let report = find_resonances(&series, &ResonanceOptions::default()).unwrap();
    assert!(report.resonances.is_empty(), "{:?}", report.resonances);
}

#[test]
fn scans_are_deterministic() {
    let run = || run_scan(Coupling::HEISENBERG, Schedule::QuadA, 0.5, 3.0, 40, &ScanSettings::default()).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let bits = |s: &aqt_core::scan::ScanSeries| s.infidelity.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn worker_count_does_not_change_results() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let s = run_scan(Coupling::HEISENBERG, Schedule::Linear, 0.5, 4.0, 32, &ScanSettings::default()).unwrap();
            let r = find_resonances(&s, &ResonanceOptions::default()).unwrap();
            (s, r)
        })
    };
    let (s1, r1) = run(1);
    let (s4, r4) = run(4);
    assert_eq!(s1, s4);
    assert_eq!(r1, r4);
}

#[test]
fn fixed_step_override_is_used() {
    let settings = ScanSettings { steps: Some(4096), ..ScanSettings::default() };
    let s = run_scan(Coupling::XX, Schedule::Linear, 0.5, 1.0, 4, &settings).unwrap();
    assert!(s.steps.iter().all(|&n| n == 4096));
    assert!(s.analytic_fidelity.is_none());
}
