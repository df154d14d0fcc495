mod common;

use std::io::Cursor;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wordvec::eval::{evaluate, load_questions, AnalogyQuestion};
use wordvec::model_io::{
    self, detect_format, read_binary, read_text, write_binary, write_text, ModelFile, ModelFormat,
};
use wordvec::Error;

fn random_model(n: usize, dim: usize, seed: u64) -> ModelFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..n).map(|i| format!("tok{i}")).collect();
    let vectors = (0..n * dim)
        .map(|_| rng.random_range(-9.99f32..9.99) * 10f32.powi(rng.random_range(-6..=0)))
        .collect();
    ModelFile::new(words, dim, vectors).unwrap()
}

#[test]
fn binary_layout_is_byte_exact() {
    let model =
        ModelFile::new(vec!["ab".into(), "c".into()], 2, vec![1.0, -2.0, 0.5, 3.25]).unwrap();
    let mut bytes = Vec::new();
    write_binary(&model, &mut bytes).unwrap();
    let mut expected = b"2 2\nab ".to_vec();
    expected.extend(1.0f32.to_le_bytes());
    expected.extend((-2.0f32).to_le_bytes());
    expected.extend(b"\nc ");
    expected.extend(0.5f32.to_le_bytes());
    expected.extend(3.25f32.to_le_bytes());
    expected.push(b'\n');
    assert_eq!(bytes, expected);
}

#[test]
fn text_layout_has_header_and_one_line_per_word() {
    let model = ModelFile::new(
        vec!["ab".into(), "c".into()],
        3,
        vec![1.0, -2.5, 0.1, 1e-7, 123456.7, 0.0],
    )
    .unwrap();
    let mut bytes = Vec::new();
    write_text(&model, &mut bytes).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text, "2 3\nab 1 -2.5 0.1\nc 1e-07 123457 0\n");
}

#[test]
fn round_trips_within_format_bounds() {
    let model = random_model(200, 17, 31);
    let mut bin = Vec::new();
    write_binary(&model, &mut bin).unwrap();
    let back = read_binary(Cursor::new(&bin)).unwrap();
    assert_eq!(back.words, model.words);
    let same_bits = back
        .vectors
        .iter()
        .zip(&model.vectors)
        .all(|(a, b)| a.to_bits() == b.to_bits());
    assert!(same_bits);

    let mut txt = Vec::new();
    write_text(&model, &mut txt).unwrap();
    let back_text = read_text(Cursor::new(&txt)).unwrap();
    assert_eq!(back_text.words, model.words);
    for (a, b) in back_text.vectors.iter().zip(&model.vectors) {
        assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
    }
    for (a, b) in back_text.vectors.iter().zip(&back.vectors) {
        assert!((a - b).abs() <= 1e-5);
    }
}

#[test]
fn truncated_binary_names_the_failing_word() {
    let model = random_model(10, 4, 32);
    let mut bin = Vec::new();
    write_binary(&model, &mut bin).unwrap();
    let record = "tok0 ".len() + 16 + 1;
    let cut = "10 4\n".len() + 6 * record + 8;
    let err = read_binary(Cursor::new(&bin[..cut])).unwrap_err();
    assert!(matches!(err, Error::Truncated { word_index: 6 }), "{err:?}");
}

#[test]
fn header_mismatch_is_rejected() {
    for bad in [
        "3 2\na 1 2\nb 3 4\n",
        "1 2\na 1 2 3\n",
        "1 2\na 1 2\nb 3 4\n",
    ] {
        let err = read_text(Cursor::new(bad)).unwrap_err();
        assert!(matches!(err, Error::Header(_)), "{bad:?}: {err:?}");
    }
    let err = read_text(Cursor::new("1 2\na 1 x\n")).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
}

#[test]
fn both_formats_give_identical_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let questions = load_questions(common::questions_path()).unwrap();
    let mut words: Vec<String> = questions
        .iter()
        .flat_map(|q: &AnalogyQuestion| [q.a.clone(), q.b.clone(), q.c.clone(), q.expected.clone()])
        .collect();
    words.sort();
    words.dedup();
    words.truncate(600);
    let dim = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let vectors = (0..words.len() * dim)
        .map(|_| rng.random_range(-1.0f32..1.0))
        .collect();
    let model = ModelFile::new(words, dim, vectors).unwrap();

    let bin = dir.path().join("m.bin");
    let txt = dir.path().join("m.txt");
    model_io::save(&model, &bin, ModelFormat::Binary).unwrap();
    model_io::save(&model, &txt, ModelFormat::Text).unwrap();
    assert_eq!(detect_format(&bin).unwrap(), ModelFormat::Binary);
    assert_eq!(detect_format(&txt).unwrap(), ModelFormat::Text);

    let from_bin = model_io::load(&bin).unwrap();
    let from_txt = model_io::load(&txt).unwrap();
    assert_eq!(from_bin, model);
    let original = evaluate(&model.solver().unwrap(), &questions);
    let a = evaluate(&from_bin.solver().unwrap(), &questions);
    let b = evaluate(&from_txt.solver().unwrap(), &questions);
    assert_eq!(a, original);
    assert_eq!(a, b);
    assert!(a.total.total - a.total.skipped > 0);
}
