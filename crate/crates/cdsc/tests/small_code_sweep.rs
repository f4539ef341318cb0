//! Exhaustive 3×3 sweep over all 19683 deformation patterns: at
//! depolarizing noise every pattern performs identically, while at strong
//! bias the rates spread over orders of magnitude with the all-Y pattern
//! among the best.

use cdsc::code::{preset, Preset};
use cdsc::harness::small_code_sweep_rows;
use cdsc::noise::Bias;

#[test]
fn depolarizing_rates_are_all_identical() {
    let rows = small_code_sweep_rows(0.1, Bias::new(0.5).unwrap()).unwrap();
    assert_eq!(rows.len(), 19683);
    let reference = rows[0].p_logical;
    let worst = rows
        .iter()
        .map(|r| (r.p_logical - reference).abs() / reference)
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "worst relative spread {worst:e}");
}

#[test]
fn biased_rates_span_orders_of_magnitude() {
    let rows = small_code_sweep_rows(0.01, Bias::new(500.0).unwrap()).unwrap();
    assert_eq!(rows.len(), 19683);
    let min = rows.iter().map(|r| r.p_logical).fold(f64::INFINITY, f64::min);
    let max = rows
        .iter()
        .map(|r| r.p_logical)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        max / min > 1e2,
        "expected a >100x spread, got {min:e}..{max:e}"
    );

    // The all-Y pattern attains the minimum among the three presets.
    let rate_of = |pattern: String| {
        rows.iter()
            .find(|r| r.pattern == pattern)
            .expect("preset pattern present in sweep")
            .p_logical
    };
    let xy = rate_of(preset(Preset::Xy, 3).encode());
    let css = rate_of(preset(Preset::Css, 3).encode());
    let xzzx = rate_of(preset(Preset::Xzzx, 3).encode());
    assert!(xy < css && xy < xzzx, "xy {xy:e}, css {css:e}, xzzx {xzzx:e}");
}
