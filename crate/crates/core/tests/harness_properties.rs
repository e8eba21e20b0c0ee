use proptest::prelude::*;
use ssl_gibbs_lab::harness::{select_threshold, summary_lines, Quantity, SweepResult, SweepRow};

fn quantity() -> impl Strategy<Value = Quantity> {
    (0..Quantity::ALL.len()).prop_map(|i| Quantity::ALL[i])
}

fn row() -> impl Strategy<Value = SweepRow> {
    (
        -1e6..1e6f64,
        quantity(),
        prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            Just(0.0)
        ],
        proptest::option::of(0.0..1e3f64),
        proptest::option::of(0usize..100_000),
        proptest::option::of(0usize..100_000),
    )
        .prop_map(|(x, q, v, se, n, m)| SweepRow {
            sweep_variable: x,
            quantity: q,
            value: v,
            std_err: se,
            n,
            m,
        })
}

proptest! {
    #[test]
    fn csv_round_trip(rows in proptest::collection::vec(row(), 0..40)) {
        let mut r = SweepResult::new("x");
        for row in rows {
            r.push(row);
        }
        r.sort();
        let text = r.to_csv_string();
        let back = SweepResult::read_csv(text.as_bytes(), "x").unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_csv_string(), text);
        prop_assert!(r.rows.windows(2).all(|w| w[0].sweep_variable <= w[1].sweep_variable));
    }

    #[test]
    fn selected_threshold_is_a_smallest_minimiser(values in proptest::collection::vec(0u8..5, 1..12)) {
        let mut r = SweepResult::new("threshold");
        for (t, v) in values.iter().enumerate() {
            r.push(SweepRow { sweep_variable: t as f64, quantity: Quantity::CrossCov, value: *v as f64, std_err: Some(0.1), n: Some(5), m: None });
        }
        let t = select_threshold(&r).unwrap() as usize;
        let min = *values.iter().min().unwrap();
        prop_assert_eq!(values[t], min);
        prop_assert!(values[..t].iter().all(|v| *v > min));
    }

    #[test]
    fn one_summary_line_per_point(xs in proptest::collection::vec(0u8..10, 1..30)) {
        let mut r = SweepResult::new("lambda");
        for x in &xs {
            r.push(SweepRow { sweep_variable: *x as f64, quantity: Quantity::GenSsl, value: 1.0, std_err: None, n: None, m: None });
        }
        let mut distinct = xs.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(summary_lines(&r).len(), distinct.len());
    }
}
