//! Randomized invariants of the model, optimizer and emitters.

use proptest::prelude::*;

use mnr::code::{ft_metric, max_physical_error, required_concatenation, MetricForm};
use mnr::config::{fmt_num, parse_config, RunConfig};
use mnr::cryo::{cable_heat_flow, per_qubit_static_power, stage_layout, static_power_records, CableModel};
use mnr::emit::{format_number, render, Format, Table, Value};
use mnr::noise::{chain_occupancy, pauli_error_probability, QubitTechnology};
use mnr::optimizer::{
    optimize_single_qubit, FtOptimizer, FtSite, HardwareModel, SearchSettings,
};
use mnr::workloads::Workload;

fn coarse() -> SearchSettings {
    SearchSettings {
        t_qb_per_decade: 6.0,
        t_gen_per_decade: 6.0,
        refinement_passes: 1,
        ..SearchSettings::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupancy_falls_with_attenuation(
        log_t_qb in -2.5f64..0.5,
        log_ratio in 0.2f64..2.5,
        log_a in 0.0f64..10.0,
        bump in 0.01f64..2.0,
    ) {
        let t_qb = 10f64.powf(log_t_qb);
        let t_gen = (t_qb * 10f64.powf(log_ratio)).min(300.0);
        prop_assume!(t_gen > t_qb);
        let omega = QubitTechnology::default().omega0;
        let a = 10f64.powf(log_a);
        let lo = chain_occupancy(&stage_layout(t_qb, t_gen, a, 5, 300.0).unwrap(), omega).unwrap();
        let hi = chain_occupancy(&stage_layout(t_qb, t_gen, a * 10f64.powf(bump), 5, 300.0).unwrap(), omega).unwrap();
        prop_assert!(hi <= lo * (1.0 + 1e-12));
    }

    #[test]
    fn minimal_attenuation_is_tight(
        log_t_qb in -2.5f64..-0.5,
        log_t_gen in 0.7f64..2.47,
        log_n in -9.0f64..-1.0,
    ) {
        let hw = HardwareModel::default();
        let site = FtSite::new(&hw, 10f64.powf(log_t_qb), 10f64.powf(log_t_gen)).unwrap();
        let n_max = 10f64.powf(log_n);
        if let Some(a) = site.min_attenuation(n_max, 1.0, 1e12) {
            prop_assert!(site.occupancy(a) <= n_max * (1.0 + 1e-9));
            if a > 1.0 {
                prop_assert!(site.occupancy(a * (1.0 - 1e-6)) > n_max * (1.0 - 1e-9));
            }
        } else {
            prop_assert!(site.occupancy(1e12) > n_max);
        }
    }

    #[test]
    fn heat_flow_is_additive_and_positive(x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0) {
        let mut ts = [x, y, z].map(|u| 10f64.powf(-3.0 + u * (300f64.log10() + 3.0)));
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cable = CableModel::default();
        let whole = cable_heat_flow(ts[0], ts[2], &cable).unwrap();
        let left = cable_heat_flow(ts[0], ts[1], &cable).unwrap();
        let right = cable_heat_flow(ts[1], ts[2], &cable).unwrap();
        prop_assert!(left >= 0.0 && right >= 0.0);
        prop_assert!((left + right - whole).abs() <= 1e-9 * whole.max(1e-300));
    }

    #[test]
    fn static_records_sum_to_per_qubit_power(log_t_qb in -2.5f64..0.0, log_t_gen in 0.7f64..2.47) {
        let chain = stage_layout(10f64.powf(log_t_qb), 10f64.powf(log_t_gen), 1e3, 5, 300.0).unwrap();
        let hw = HardwareModel::default();
        let records = static_power_records(&chain, &hw.scenario, &hw.cable, &hw.efficiency);
        let sum: f64 = records.iter().map(|r| r.electrical_power_w).sum();
        let total = per_qubit_static_power(&chain, &hw.scenario, &hw.cable, &hw.efficiency);
        prop_assert!((sum - total).abs() <= 1e-12 * total.abs());
    }

    #[test]
    fn pauli_error_is_affine_in_occupancy(n in 0.0f64..10.0) {
        let tech = QubitTechnology::default();
        let p0 = pauli_error_probability(&tech, 0.0).unwrap().value;
        let slope = 0.5 * tech.gamma * tech.tau_step;
        let p = pauli_error_probability(&tech, n).unwrap().value;
        prop_assert!((p - (p0 + slope * n)).abs() <= 1e-12 * p);
    }

    #[test]
    fn error_budget_meets_metric_exactly(
        log_n in 3.0f64..18.0,
        m0 in 0.05f64..0.999,
        k in 0u32..5,
        exact in any::<bool>(),
    ) {
        let form = if exact { MetricForm::Exact } else { MetricForm::Linear };
        let n_l = 10f64.powf(log_n);
        let p = max_physical_error(n_l, m0, k, form, 2e-5);
        prop_assume!(p > 0.0 && p < 2e-5);
        let m = ft_metric(p, k, n_l, form, 2e-5);
        prop_assert!((m - m0).abs() <= 1e-6, "metric {m} vs target {m0}");
        prop_assert!(ft_metric(p * 0.99, k, n_l, form, 2e-5) >= m0);
    }

    #[test]
    fn required_level_grows_with_size(log_n in 2.0f64..17.0, factor in 1.0f64..1000.0, log_p in -8.0f64..-5.0) {
        let p = 10f64.powf(log_p);
        let small = required_concatenation(p, 10f64.powf(log_n), 2.0 / 3.0, MetricForm::Linear, 2e-5, 12);
        let large = required_concatenation(p, 10f64.powf(log_n) * factor, 2.0 / 3.0, MetricForm::Linear, 2e-5, 12);
        if let (Ok(a), Ok(b)) = (small, large) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn printed_numbers_round_trip(x in prop::num::f64::NORMAL) {
        let s = format_number(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-9 * x.abs());
        prop_assert_eq!(format_number(back), s);
        let exact: f64 = fmt_num(x).parse().unwrap();
        prop_assert_eq!(exact, x);
    }

    #[test]
    fn config_render_round_trips(
        gamma_inv in 1e-4f64..5.0,
        q_gen in 1e-9f64..1e-2,
        k_max in 3u32..9,
        q_logical in 1u64..100_000,
        target in 0.01f64..0.999,
    ) {
        let mut c = RunConfig::default();
        c.set("technology.gamma_inverse_s", &fmt_num(gamma_inv)).unwrap();
        c.set("scenario.q_gen_w", &fmt_num(q_gen)).unwrap();
        c.set("optimizer.k_max", &k_max.to_string()).unwrap();
        c.set("workload.q_logical", &q_logical.to_string()).unwrap();
        c.set("target.metric", &fmt_num(target)).unwrap();
        let back = parse_config(&c.render()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn emitted_rows_match_input(rows in prop::collection::vec((any::<i32>(), -1e6f64..1e6, "[a-z ,\"]{0,8}"), 0..12)) {
        let mut t = Table::new(&["i", "x", "label"]);
        for (i, x, s) in &rows {
            t.push(vec![Value::Int(*i as i64), Value::Num(*x), Value::Text(s.clone())]);
        }
        let csv_text = render(&t, Format::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        let parsed: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        prop_assert_eq!(parsed.len(), rows.len());
        for (rec, (i, _, s)) in parsed.iter().zip(&rows) {
            prop_assert_eq!(rec[0].parse::<i32>().unwrap(), *i);
            prop_assert_eq!(&rec[2], s.as_str());
        }
        let jsonl = render(&t, Format::Jsonl).unwrap();
        prop_assert_eq!(jsonl.lines().count(), rows.len());
        for (line, (_, x, s)) in jsonl.lines().zip(&rows) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            prop_assert_eq!(v["label"].as_str().unwrap(), s.as_str());
            let got = v["x"].as_f64().unwrap();
            prop_assert!((got - x).abs() <= 5e-9 * x.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn stricter_targets_never_cost_less(m_lo in 0.05f64..0.9, gap in 0.01f64..0.09, log_q in 0.0f64..4.0, log_d in 6.0f64..12.0) {
        let opt = FtOptimizer::new(HardwareModel::default(), coarse()).unwrap();
        let w = Workload::rectangular("p", 10f64.powf(log_q) as u64, 10f64.powf(log_d) as u64).unwrap();
        let lo = opt.optimize(&w, m_lo);
        let hi = opt.optimize(&w, m_lo + gap);
        prop_assert!(lo.feasible);
        if hi.feasible {
            prop_assert!(hi.power_w >= lo.power_w * (1.0 - 1e-9));
            prop_assert!(hi.metric_achieved >= m_lo + gap - 1e-9);
            prop_assert!(hi.control.k >= lo.control.k || hi.power_w >= lo.power_w);
        }
        prop_assert!(lo.metric_achieved >= m_lo - 1e-9);
        prop_assert!((lo.breakdown_total() / lo.power_w - 1.0).abs() < 1e-9);
        prop_assert!(opt.certify(&w, &lo).holds);
    }

    #[test]
    fn larger_computations_need_at_least_the_same_level(log_n in 4.0f64..15.0, factor in 10f64..1e3) {
        let opt = FtOptimizer::new(HardwareModel::default(), coarse()).unwrap();
        let small = Workload::rectangular("s", 1, 10f64.powf(log_n) as u64).unwrap();
        let large = Workload::rectangular("l", 1, (10f64.powf(log_n) * factor) as u64).unwrap();
        let a = opt.optimize(&small, 2.0 / 3.0);
        let b = opt.optimize(&large, 2.0 / 3.0);
        prop_assert!(a.feasible && b.feasible);
        prop_assert!(a.control.k <= b.control.k);
        prop_assert!(a.power_w <= b.power_w * (1.0 + 1e-9) || a.control.k < b.control.k);
    }

    #[test]
    fn single_gate_power_rises_with_fidelity(m_lo in 0.99f64..0.9996, gap in 1e-5f64..2e-4) {
        let hw = HardwareModel::default().with_gamma_inverse(1e-3);
        let s = SearchSettings::default();
        let lo = optimize_single_qubit(&hw, &s, m_lo);
        let hi = optimize_single_qubit(&hw, &s, m_lo + gap);
        prop_assert!(lo.feasible);
        if hi.feasible {
            prop_assert!(hi.power_w >= lo.power_w * (1.0 - 1e-9));
        }
    }
}
