use std::fs;

use selenc::bitstream::NalKind;
use selenc::pipeline::{
    cmd_decrypt, cmd_encrypt, cmd_gen_test, cmd_inspect, derive_key, DecryptRequest, EncryptRequest, GeneratorConfig,
    KeySource, PipelineError,
};
use selenc::selective::{EncryptionPolicy, SelectiveError};
use selenc::selective::CipherHeader;
use tempfile::TempDir;

// Produced once by a separate straight-line implementation over a
// third-party AES; frozen here.
const KDF_VECTORS: &[(&str, u32, &str)] = &[
    ("a", 1, "5e032572a8bddda63df07808e7f3fbad"),
    ("a", 2, "2900a13c3341823438db2622ed48c704"),
    ("password", 10_000, "8e535f33124380ec7aafaa239073eb80"),
    ("correct horse battery staple", 1_000, "83c8e56ccd6e5ca26e7f0ae2e7ac4d8a"),
    ("0123456789abcde", 3, "92c5e864ef37819a18984ebdff79ed34"),
    ("0123456789abcdef", 3, "232a256b5e545490861780562e446841"),
    ("pässwörd", 10_000, "3c8d047dd8fc83812e26a6730b6fa1f7"),
    ("Aa1!Aa1!", 10_000, "2bb075fc67378244e477039136d90298"),
];

fn passphrase(text: &str, iterations: u32) -> KeySource {
    KeySource::Passphrase { text: text.into(), iterations }
}

#[test]
fn kdf_regression_vectors() {
    for &(text, iters, want) in KDF_VECTORS {
        assert_eq!(hex::encode(derive_key(&passphrase(text, iters)).unwrap()), want, "{text:?} x{iters}");
    }
}

#[test]
fn kdf_iteration_sensitive_and_rejects_empty() {
    assert_ne!(derive_key(&passphrase("a", 1)).unwrap(), derive_key(&passphrase("a", 2)).unwrap());
    assert!(matches!(derive_key(&passphrase("", 1)), Err(PipelineError::EmptyPassphrase)));
    assert!(matches!(derive_key(&passphrase("a", 0)), Err(PipelineError::InvalidArgument(_))));
    let raw = derive_key(&KeySource::RawKey("000102030405060708090a0b0c0d0e0f".into())).unwrap();
    assert_eq!(raw, core::array::from_fn::<u8, 16, _>(|i| i as u8));
    assert!(matches!(derive_key(&KeySource::RawKey("zz".into())), Err(PipelineError::BadHex(_))));
}

#[test]
fn sidecar_count_matches_idr_count() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.264");
    cmd_gen_test(&input, &GeneratorConfig { payload_size: 100, ..GeneratorConfig::new(12, 60) }).unwrap();
    let req = EncryptRequest {
        input: input.clone(),
        output: dir.path().join("out.264"),
        meta: dir.path().join("out.meta"),
        key: KeySource::RawKey("ff".repeat(16)),
        policy: EncryptionPolicy::IdrOnly,
        nonce: None,
    };
    let report = cmd_encrypt(&req).unwrap();
    let header = CipherHeader::from_bytes(&fs::read(&req.meta).unwrap()).unwrap();
    assert_eq!(header.count() as usize, report.count_kind(NalKind::Idr));
    assert_eq!(header.count(), 5);

    let inspected = cmd_inspect(&req.output).unwrap();
    let kinds = |r: &selenc::pipeline::StreamReport| r.rows.iter().map(|row| row.nal.kind).collect::<Vec<_>>();
    assert_eq!(kinds(&inspected), kinds(&cmd_inspect(&input).unwrap()));
}

#[test]
fn wrong_key_and_bad_sidecar() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.264");
    cmd_gen_test(&input, &GeneratorConfig { payload_size: 64, ..GeneratorConfig::new(2, 6) }).unwrap();
    let enc = EncryptRequest {
        input,
        output: dir.path().join("enc.264"),
        meta: dir.path().join("enc.meta"),
        key: passphrase("swordfish", 20),
        policy: EncryptionPolicy::AllIntra,
        nonce: None,
    };
    cmd_encrypt(&enc).unwrap();

    let mut dec = DecryptRequest {
        input: enc.output.clone(),
        meta: enc.meta.clone(),
        output: dir.path().join("dec.264"),
        key: passphrase("swordfish!", 20),
    };
    let err = cmd_decrypt(&dec).unwrap_err();
    assert_eq!(err.selective(), Some(&SelectiveError::WrongKey));
    assert!(!dec.output.exists());

    dec.key = passphrase("swordfish", 20);
    fs::write(&enc.meta, b"XXXX").unwrap();
    assert!(matches!(cmd_decrypt(&dec).unwrap_err().selective(), Some(SelectiveError::BadMagic)));
    fs::write(&enc.meta, b"SEH1").unwrap();
    assert!(matches!(cmd_decrypt(&dec).unwrap_err().selective(), Some(SelectiveError::TruncatedHeader { .. })));
}

#[test]
fn leading_bytes_survive_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.264");
    let mut data = vec![0xaa, 0xbb];
    data.extend(selenc::pipeline::gen_test_stream(&GeneratorConfig { payload_size: 40, ..GeneratorConfig::new(1, 2) }));
    fs::write(&input, &data).unwrap();
    let key = KeySource::RawKey("11".repeat(16));
    let enc = EncryptRequest {
        input,
        output: dir.path().join("enc.264"),
        meta: dir.path().join("enc.meta"),
        key: key.clone(),
        policy: EncryptionPolicy::IdrOnly,
        nonce: None,
    };
    cmd_encrypt(&enc).unwrap();
    let dec = DecryptRequest { input: enc.output, meta: enc.meta, output: dir.path().join("dec.264"), key };
    cmd_decrypt(&dec).unwrap();
    assert_eq!(fs::read(&dec.output).unwrap(), data);
}
