mod common;

use std::fmt::Write as _;
use std::path::Path;

use common::{generator, train_n};
use greenstream::generators::GeneratorKind;
use greenstream::io::{load_dataset, load_model, save_model, DatasetFormat};
use greenstream::{
    run_prequential, Algorithm, AttributeKind, Error, LabeledExample, Learner, ModelSpec, StreamSource, Value,
};

/// Label order of each nominal column in first-appearance order, so the
/// declared ARFF order and the inferred CSV order agree.
fn first_appearance(examples: &[LabeledExample], column: usize) -> Vec<u32> {
    let mut order = Vec::new();
    for e in examples {
        let v = match e.instance.values.get(column) {
            Some(Value::Nominal(v)) => *v,
            Some(Value::Numeric(_)) => unreachable!(),
            None => e.label,
        };
        if !order.contains(&v) {
            order.push(v);
        }
    }
    order
}

fn cell(e: &LabeledExample, column: usize) -> String {
    match e.instance.values.get(column) {
        Some(Value::Numeric(x)) => x.to_string(),
        Some(Value::Nominal(v)) => format!("v{v}"),
        None => format!("c{}", e.label),
    }
}

fn write_pair(dir: &Path, examples: &[LabeledExample], kinds: &[AttributeKind]) -> (std::path::PathBuf, std::path::PathBuf) {
    let columns = kinds.len() + 1;
    let mut arff = String::from("% mixed fixture\n@RELATION mixed\n\n");
    for (i, kind) in kinds.iter().enumerate() {
        match kind {
            AttributeKind::Numeric => writeln!(arff, "@ATTRIBUTE a{i} NUMERIC").unwrap(),
            AttributeKind::Nominal { .. } => {
                let labels: Vec<String> = first_appearance(examples, i).iter().map(|v| format!("v{v}")).collect();
                writeln!(arff, "@attribute a{i} {{{}}}", labels.join(",")).unwrap();
            }
        }
    }
    let classes: Vec<String> = first_appearance(examples, kinds.len()).iter().map(|c| format!("c{c}")).collect();
    writeln!(arff, "@attribute class {{{}}}\n@data", classes.join(",")).unwrap();
    let header: Vec<String> = (0..kinds.len()).map(|i| format!("a{i}")).chain(["class".into()]).collect();
    let mut csv = header.join(",") + "\n";
    for e in examples {
        let row: Vec<String> = (0..columns).map(|c| cell(e, c)).collect();
        writeln!(arff, "{}", row.join(",")).unwrap();
        writeln!(csv, "{}", row.join(", ")).unwrap();
    }
    let (a, c) = (dir.join("mixed.arff"), dir.join("mixed.csv"));
    std::fs::write(&a, arff).unwrap();
    std::fs::write(&c, csv).unwrap();
    (a, c)
}

#[test]
fn arff_and_csv_encodings_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = generator(GeneratorKind::Agrawal, 4);
    let kinds: Vec<AttributeKind> = g.schema().attributes().iter().map(|a| a.kind).collect();
    let examples: Vec<LabeledExample> = (0..3_000).map(|_| g.next_example().unwrap()).collect();
    let (arff_path, csv_path) = write_pair(dir.path(), &examples, &kinds);

    let arff = load_dataset(&arff_path, None).unwrap();
    let csv = load_dataset(&csv_path, None).unwrap();
    assert_eq!(arff.format, DatasetFormat::Arff);
    assert_eq!(csv.format, DatasetFormat::Csv);
    assert_eq!(arff.schema, csv.schema);
    assert_eq!(arff.nominal_labels, csv.nominal_labels);
    assert_eq!(arff.class_labels, csv.class_labels);
    assert_eq!(arff.examples, csv.examples);
    assert_eq!(arff.examples.len(), 3_000);

    let run = |data: greenstream::io::DatasetFile| {
        let schema = data.schema.clone();
        let mut model = ModelSpec::new(Algorithm::Gaht).build(schema).unwrap();
        let mut stream = data.into_stream();
        let r = run_prequential(&mut model, &mut stream, u64::MAX, 1_000).unwrap();
        (r.summary.cumulative_accuracy, r.summary.counters, r.summary.census, r.snapshots.len())
    };
    assert_eq!(run(arff), run(csv));
}

#[test]
fn numeric_cells_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = generator(GeneratorKind::RandomRbf, 2);
    let kinds: Vec<AttributeKind> = g.schema().attributes().iter().map(|a| a.kind).collect();
    let examples: Vec<LabeledExample> = (0..500).map(|_| g.next_example().unwrap()).collect();
    let (arff_path, _) = write_pair(dir.path(), &examples, &kinds);
    let parsed = load_dataset(&arff_path, None).unwrap();
    for (a, b) in parsed.examples.iter().zip(&examples) {
        assert_eq!(a.instance, b.instance);
    }
}

#[test]
fn unknown_extension_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.txt");
    std::fs::write(&path, "a,b\n1,x\n").unwrap();
    assert!(matches!(load_dataset(&path, None), Err(Error::Unknown { .. })));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(
        load_dataset(Path::new("/nonexistent/data.arff"), None),
        Err(Error::Io(_))
    ));
}

#[test]
fn saved_models_continue_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    for algorithm in Algorithm::ALL {
        let mut g = generator(GeneratorKind::RandomTree, 3);
        let mut model = ModelSpec::new(algorithm).build(g.schema().clone()).unwrap();
        train_n(&mut model, &mut g, 20_000);
        let path = dir.path().join(format!("{algorithm}.gstm"));
        save_model(&model, &path).unwrap();
        let mut loaded = load_model(&path).unwrap();
        assert_eq!(loaded.algorithm(), model.algorithm());
        assert_eq!(loaded.census(), model.census());
        let mut tail = g.clone();
        train_n(&mut model, &mut g, 5_000);
        train_n(&mut loaded, &mut tail, 5_000);
        assert_eq!(loaded.counters(), model.counters(), "{algorithm}");
        for _ in 0..200 {
            let e = g.next_example().unwrap();
            assert_eq!(loaded.predict(&e.instance).unwrap(), model.predict(&e.instance).unwrap());
        }
    }
}

#[test]
fn garbage_model_file_is_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.gstm");
    std::fs::write(&path, b"GSTM\x01not a model").unwrap();
    assert!(matches!(load_model(&path), Err(Error::Corrupt(_))));
}
