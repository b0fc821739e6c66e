//! Cross-module self checks. Each check reports pass or fail with a short
//! detail line; a failing check never stops the others.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aes::{ctr_keystream, Aes128, AesState, BlockCipher, KeySchedule, Nonce, SBox, ROUND_CONSTANTS};
use crate::bitstream::{
    ebsp_to_rbsp, escaping_violation, rbsp_to_ebsp, scan_annexb, serialize_annexb, AnnexBStream,
    BitReader, BitWriter, NalUnit,
};
use crate::pipeline::{gen_test_stream, passphrase_key, GeneratorConfig};
use crate::selective::{
    decrypt_nal, decrypt_stream, encrypt_nal, encrypt_nal_without_reescape, key_check, select,
    CipherHeader, EncryptionPolicy, SelectiveError,
};

use super::{bench, reference};

/// Passphrase KDF regression vectors `(passphrase, iterations, key hex)`,
/// produced by a separate implementation on top of a third-party AES.
pub const KDF_VECTORS: &[(&str, u32, &str)] = &[
    ("a", 1, "5e032572a8bddda63df07808e7f3fbad"),
    ("a", 2, "2900a13c3341823438db2622ed48c704"),
    ("password", 10_000, "8e535f33124380ec7aafaa239073eb80"),
    ("correct horse battery staple", 1_000, "83c8e56ccd6e5ca26e7f0ae2e7ac4d8a"),
    ("0123456789abcde", 3, "92c5e864ef37819a18984ebdff79ed34"),
    ("0123456789abcdef", 3, "232a256b5e545490861780562e446841"),
    ("pässwörd", 10_000, "3c8d047dd8fc83812e26a6730b6fa1f7"),
    ("Aa1!Aa1!", 10_000, "2bb075fc67378244e477039136d90298"),
];

/// Deliberate defects, used to show the checks can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Swap two S-box entries in every cipher the suite builds.
    pub corrupt_sbox: bool,
    /// Encrypt payloads without re-escaping them.
    pub skip_reescape: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub seed: u64,
    /// Random trials for the cipher and escaping checks.
    pub trials: usize,
    /// Generated streams for the bitstream and selective checks.
    pub streams: usize,
    pub faults: Faults,
}

impl OracleConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            trials: 1000,
            streams: 40,
            faults: Faults::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<CheckOutcome>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        out
    }
}

pub fn oracle_suite(seed: u64) -> OracleReport {
    run_oracle_suite(&OracleConfig::new(seed))
}

type CheckResult = Result<String, String>;
type Check = (&'static str, fn(&mut Suite) -> CheckResult);

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

pub fn run_oracle_suite(cfg: &OracleConfig) -> OracleReport {
    let mut suite = Suite {
        cfg: *cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        sbox: if cfg.faults.corrupt_sbox {
            SBox::with_swapped(0x0c, 0x0d)
        } else {
            SBox::standard().clone()
        },
    };
    let checks: [Check; 14] = [
        ("cipher-known-answer", Suite::cipher_known_answer),
        ("cipher-round-trip", Suite::cipher_round_trip),
        ("cipher-matches-reference", Suite::cipher_matches_reference),
        ("round-transform-inverses", Suite::round_transform_inverses),
        ("key-schedule-recurrence", Suite::key_schedule_recurrence),
        ("escaping-round-trip", Suite::escaping_round_trip),
        ("exp-golomb-exhaustive", Suite::exp_golomb_exhaustive),
        ("annexb-round-trip", Suite::annexb_round_trip),
        ("selective-round-trip", Suite::selective_round_trip),
        ("compliance-rescan", Suite::compliance_rescan),
        ("confidentiality-smoke", Suite::confidentiality_smoke),
        ("selectivity-arithmetic", Suite::selectivity_arithmetic),
        ("wrong-key-rejected", Suite::wrong_key_rejected),
        ("kdf-regression", Suite::kdf_regression),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, check)| {
            let (passed, detail) = match check(&mut suite) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome { name, passed, detail }
        })
        .collect();
    OracleReport { checks }
}

fn hex16(s: &str) -> [u8; 16] {
    hex::decode(s).expect("valid hex").try_into().expect("16 bytes")
}

/// A small generated stream whose two IDR slices are rewritten so that,
/// under `cipher` and `nonce`, their encrypted RBSP contains start-code
/// prefixes and forbidden zero runs, and ends in a zero byte. Returns the
/// stream and the nonce actually used (the nonce is bumped until both
/// plaintext payloads can be framed).
pub fn adversarial_stream<C: BlockCipher + ?Sized>(cipher: &C, nonce: Nonce) -> (Vec<NalUnit>, Nonce) {
    const TARGETS: [&[u8]; 2] = [
        &[0x88, 0x00, 0x00, 0x01, 0x42, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x02, 0x00, 0x00, 0x03, 0x99, 0x00],
        &[0x88, 0x17, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01, 0x65, 0x00, 0x03],
    ];
    let cfg = GeneratorConfig {
        payload_size: 64,
        ..GeneratorConfig::new(2, 4)
    };
    let base = scan_annexb(&gen_test_stream(&cfg)).expect("generator output scans").nals;
    let idr: Vec<usize> = base
        .iter()
        .filter(|n| n.header.nal_unit_type == 5)
        .map(|n| n.ordinal as usize)
        .collect();

    let mut nonce = nonce;
    loop {
        let mut nals = base.clone();
        let mut ok = true;
        for (&idx, target) in idr.iter().zip(TARGETS) {
            let ks = ctr_keystream(cipher, nonce, idx as u32, target.len()).expect("short keystream");
            let plain: Vec<u8> = target.iter().zip(&ks).map(|(t, k)| t ^ k).collect();
            let ebsp = rbsp_to_ebsp(&plain);
            ok &= ebsp.last() != Some(&0);
            nals[idx].ebsp = ebsp;
        }
        if ok {
            return (nals, nonce);
        }
        nonce.0[7] = nonce.0[7].wrapping_add(1);
    }
}

struct Suite {
    cfg: OracleConfig,
    rng: ChaCha8Rng,
    sbox: SBox,
}

impl Suite {
    fn cipher(&self, key: &[u8; 16]) -> Aes128 {
        Aes128::with_sbox(key, self.sbox.clone()).expect("16-byte key")
    }

    fn random_cipher(&mut self) -> Aes128 {
        let key: [u8; 16] = self.rng.gen();
        self.cipher(&key)
    }

    fn encrypt_units(&self, nals: &[NalUnit], ordinals: &[u32], cipher: &Aes128, nonce: Nonce) -> Result<Vec<NalUnit>, SelectiveError> {
        let mut out = nals.to_vec();
        for &o in ordinals {
            let nal = &nals[o as usize];
            out[o as usize] = if self.cfg.faults.skip_reescape {
                encrypt_nal_without_reescape(nal, cipher, nonce)?
            } else {
                encrypt_nal(nal, cipher, nonce)?
            };
        }
        Ok(out)
    }

    fn random_streams(&mut self) -> Vec<Vec<u8>> {
        (0..self.cfg.streams)
            .map(|_| {
                let cfg = GeneratorConfig {
                    gop: self.rng.gen_range(1..=16),
                    frames: self.rng.gen_range(1..=40),
                    payload_size: self.rng.gen_range(8..=400),
                    seed: self.rng.gen(),
                };
                gen_test_stream(&cfg)
            })
            .collect()
    }

    fn cipher_known_answer(&mut self) -> CheckResult {
        let vectors = [
            ("000102030405060708090a0b0c0d0e0f", "00112233445566778899aabbccddeeff", "69c4e0d86a7b0430d8cdb78070b4c55a"),
            ("2b7e151628aed2a6abf7158809cf4f3c", "3243f6a8885a308d313198a2e0370734", "3925841d02dc09fbdc118597196a0b32"),
        ];
        for (k, p, c) in vectors {
            let aes = self.cipher(&hex16(k));
            let ct = aes.encrypt_block(&hex16(p));
            ensure!(ct == hex16(c), "E({k}, {p}) = {} want {c}", hex::encode(ct));
            ensure!(aes.decrypt_block(&ct) == hex16(p), "decryption of {c} failed");
        }
        let ks = KeySchedule::expand_with(&hex16("2b7e151628aed2a6abf7158809cf4f3c"), &self.sbox).expect("16 bytes");
        let words = [(4, "a0fafe17"), (5, "88542cb1"), (10, "5935807a"), (20, "d4d1c6f8"), (36, "ac7766f3"), (40, "d014f9a8"), (43, "b6630ca6")];
        for (i, w) in words {
            ensure!(hex::encode(ks.word(i)) == w, "W[{i}] = {} want {w}", hex::encode(ks.word(i)));
        }
        Ok("2 cipher vectors, 7 key-expansion words".into())
    }

    fn cipher_round_trip(&mut self) -> CheckResult {
        for _ in 0..self.cfg.trials {
            let key: [u8; 16] = self.rng.gen();
            let a: [u8; 16] = self.rng.gen();
            let mut b: [u8; 16] = self.rng.gen();
            if a == b {
                b[0] ^= 1;
            }
            let aes = self.cipher(&key);
            let (ca, cb) = (aes.encrypt_block(&a), aes.encrypt_block(&b));
            ensure!(aes.decrypt_block(&ca) == a, "round trip failed for key {}", hex::encode(key));
            ensure!(ca != cb, "collision under key {}", hex::encode(key));
        }
        Ok(format!("{} keys", self.cfg.trials))
    }

    fn cipher_matches_reference(&mut self) -> CheckResult {
        for _ in 0..self.cfg.trials {
            let key: [u8; 16] = self.rng.gen();
            let block: [u8; 16] = self.rng.gen();
            let got = self.cipher(&key).encrypt_block(&block);
            let want = reference::encrypt(&key, &block);
            ensure!(got == want, "key {} block {}: {} != {}", hex::encode(key), hex::encode(block), hex::encode(got), hex::encode(want));
        }
        Ok(format!("{} random pairs", self.cfg.trials))
    }

    fn round_transform_inverses(&mut self) -> CheckResult {
        for _ in 0..self.cfg.trials {
            let s = AesState::from_block(&self.rng.gen());
            let rk: [u8; 16] = self.rng.gen();
            ensure!(s.add_round_key(&rk).add_round_key(&rk) == s, "add_round_key not an involution");
            ensure!(s.shift_rows().shift_rows().shift_rows().shift_rows() == s, "shift_rows^4 != id");
            ensure!(s.shift_rows().inv_shift_rows() == s, "inv_shift_rows");
            ensure!(s.sub_bytes().inv_sub_bytes() == s, "inv_sub_bytes");
            ensure!(s.mix_columns().inv_mix_columns() == s, "inv_mix_columns");
        }
        Ok(format!("{} states", self.cfg.trials))
    }

    fn key_schedule_recurrence(&mut self) -> CheckResult {
        for _ in 0..self.cfg.trials {
            let key: [u8; 16] = self.rng.gen();
            let ks = KeySchedule::expand_with(&key, &self.sbox).expect("16 bytes");
            ensure!(ks.round_key(0) == key, "first words differ from key");
            for i in 4..44 {
                let prev = ks.word(i - 1);
                let t = if i % 4 == 0 {
                    let r = [prev[1], prev[2], prev[3], prev[0]].map(|b| self.sbox.sub(b));
                    [r[0] ^ ROUND_CONSTANTS[i / 4 - 1], r[1], r[2], r[3]]
                } else {
                    prev
                };
                let back = ks.word(i - 4);
                let want = [t[0] ^ back[0], t[1] ^ back[1], t[2] ^ back[2], t[3] ^ back[3]];
                ensure!(ks.word(i) == want, "W[{i}] breaks recurrence for key {}", hex::encode(key));
            }
        }
        Ok(format!("{} keys x 44 words", self.cfg.trials))
    }

    fn escaping_round_trip(&mut self) -> CheckResult {
        for _ in 0..self.cfg.trials {
            let len = self.rng.gen_range(0..200);
            let x: Vec<u8> = (0..len)
                .map(|_| match self.rng.gen_range(0..6) {
                    0..=2 => 0,
                    3 => self.rng.gen_range(1..=3),
                    _ => self.rng.gen(),
                })
                .collect();
            let e = rbsp_to_ebsp(&x);
            ensure!(escaping_violation(&e).is_none(), "escaped output has forbidden sequence");
            ensure!(ebsp_to_rbsp(&e).as_ref() == Ok(&x), "unescape(escape(x)) != x for {}", hex::encode(&x));
        }
        Ok(format!("{} byte strings", self.cfg.trials))
    }

    fn exp_golomb_exhaustive(&mut self) -> CheckResult {
        for n in 0..=65535u32 {
            let mut w = BitWriter::new();
            w.write_ue(n);
            let len = w.bit_len();
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            ensure!(r.read_ue() == Ok(n), "decode mismatch at {n}");
            let want = 2 * (31 - (n + 1).leading_zeros()) as usize + 1;
            ensure!(len == want && r.position() == want, "codeword length for {n}");
        }
        Ok("0..=65535".into())
    }

    fn annexb_round_trip(&mut self) -> CheckResult {
        for data in self.random_streams() {
            let s = scan_annexb(&data).map_err(|e| e.to_string())?;
            for (i, nal) in s.nals.iter().enumerate() {
                ensure!(nal.ordinal as usize == i, "ordinals not contiguous");
                ensure!(escaping_violation(&nal.ebsp).is_none(), "NAL {i} breaks escaping");
            }
            ensure!(serialize_annexb(&s).as_ref() == Ok(&data), "serialize(scan(s)) != s");
        }
        Ok(format!("{} generated streams", self.cfg.streams))
    }

    fn selective_round_trip(&mut self) -> CheckResult {
        let streams = self.random_streams();
        for (i, data) in streams.iter().enumerate() {
            let nals = scan_annexb(data).map_err(|e| e.to_string())?.nals;
            let aes = self.random_cipher();
            for policy in [EncryptionPolicy::IdrOnly, EncryptionPolicy::AllIntra] {
                let nonce = Nonce(self.rng.gen());
                let ordinals = select(&nals, policy).selected_ordinals;
                let enc = self.encrypt_units(&nals, &ordinals, &aes, nonce).map_err(|e| e.to_string())?;
                let header = CipherHeader { policy, key_check: key_check(&aes), nonce, ordinals };
                let dec = decrypt_stream(&enc, &aes, &header).map_err(|e| format!("stream {i}: {e}"))?;
                ensure!(dec == nals, "stream {i} ({policy}) did not round trip");
            }
        }
        Ok(format!("{} streams x 2 policies", streams.len()))
    }

    fn compliance_rescan(&mut self) -> CheckResult {
        let mut cases: Vec<(Vec<NalUnit>, Aes128, Nonce, Vec<u32>)> = Vec::new();
        let aes = self.random_cipher();
        let (nals, nonce) = adversarial_stream(&aes, Nonce(self.rng.gen()));
        let ordinals = select(&nals, EncryptionPolicy::IdrOnly).selected_ordinals;
        cases.push((nals, aes, nonce, ordinals));
        for data in self.random_streams() {
            let nals = scan_annexb(&data).map_err(|e| e.to_string())?.nals;
            let aes = self.random_cipher();
            let ordinals = select(&nals, EncryptionPolicy::AllIntra).selected_ordinals;
            cases.push((nals, aes, Nonce(self.rng.gen()), ordinals));
        }

        for (i, (nals, aes, nonce, ordinals)) in cases.iter().enumerate() {
            let enc = self.encrypt_units(nals, ordinals, aes, *nonce).map_err(|e| e.to_string())?;
            let stream = AnnexBStream { leading: Vec::new(), nals: enc.clone() };
            let bytes = serialize_annexb(&stream).map_err(|e| format!("case {i}: {e}"))?;
            let rescanned = scan_annexb(&bytes).map_err(|e| format!("case {i}: {e}"))?.nals;
            ensure!(rescanned.len() == nals.len(), "case {i}: {} units after rescan, {} before", rescanned.len(), nals.len());
            for (a, b) in nals.iter().zip(&rescanned) {
                ensure!(a.header == b.header, "case {i}: header changed at NAL {}", a.ordinal);
                ensure!(a.start_code == b.start_code, "case {i}: start code changed at NAL {}", a.ordinal);
                ensure!(escaping_violation(&b.ebsp).is_none(), "case {i}: escaping violation at NAL {}", a.ordinal);
            }
            ensure!(rescanned == enc, "case {i}: rescanned payloads differ from what was written");
        }
        Ok(format!("{} streams incl. 1 adversarial", cases.len()))
    }

    fn confidentiality_smoke(&mut self) -> CheckResult {
        let mut checked = 0;
        for data in self.random_streams() {
            let nals = scan_annexb(&data).map_err(|e| e.to_string())?.nals;
            let aes = self.random_cipher();
            let nonce = Nonce(self.rng.gen());
            for o in select(&nals, EncryptionPolicy::AllIntra).selected_ordinals {
                let nal = &nals[o as usize];
                let plain = ebsp_to_rbsp(&nal.ebsp).map_err(|e| e.to_string())?;
                if plain.len() < 16 {
                    continue;
                }
                let enc = encrypt_nal(nal, &aes, nonce).map_err(|e| e.to_string())?;
                let roundtrip = decrypt_nal(&enc, &aes, nonce).map_err(|e| e.to_string())?;
                ensure!(&roundtrip == nal, "NAL {o} did not decrypt");
                let mut cipher_rbsp = plain.clone();
                crate::aes::apply_keystream(&aes, nonce, o, &mut cipher_rbsp).map_err(|e| e.to_string())?;
                let differing = plain.iter().zip(&cipher_rbsp).filter(|(a, b)| a != b).count();
                ensure!(differing * 4 >= plain.len(), "NAL {o}: only {differing}/{} bytes changed", plain.len());
                checked += 1;
            }
        }
        Ok(format!("{checked} selected units, >= 25% bytes changed each"))
    }

    fn selectivity_arithmetic(&mut self) -> CheckResult {
        let cfg = GeneratorConfig { payload_size: 512, seed: self.rng.gen(), ..GeneratorConfig::new(12, 60) };
        let nals = scan_annexb(&gen_test_stream(&cfg)).map_err(|e| e.to_string())?.nals;
        let aes = self.random_cipher();
        let r = bench(&nals, &aes, EncryptionPolicy::IdrOnly).map_err(|e| e.to_string())?;
        r.check()?;
        let target = 5.0 / 60.0;
        ensure!((r.selective_fraction - target).abs() <= 0.02 * target, "fraction {} not within 2% of 5/60", r.selective_fraction);
        let naive_vcl = r.vcl_payload_bytes as i64;
        let slack = 16 * nals.len() as i64;
        ensure!((naive_vcl - 12 * r.selective_encrypted_bytes as i64).abs() <= slack, "naive VCL bytes {naive_vcl} vs 12 x {}", r.selective_encrypted_bytes);
        Ok(format!(
            "fraction {:.5}, blocks {} (expected {})",
            r.selective_fraction, r.aes_blocks_selective, r.expected_blocks_selective
        ))
    }

    fn wrong_key_rejected(&mut self) -> CheckResult {
        let cfg = GeneratorConfig { payload_size: 48, ..GeneratorConfig::new(3, 6) };
        let nals = scan_annexb(&gen_test_stream(&cfg)).map_err(|e| e.to_string())?.nals;
        let trials = 100;
        for _ in 0..trials {
            let key: [u8; 16] = self.rng.gen();
            let mut wrong = key;
            wrong[self.rng.gen_range(0..16)] ^= 1 << self.rng.gen_range(0..8);
            let aes = self.cipher(&key);
            let nonce = Nonce(self.rng.gen());
            let ordinals = select(&nals, EncryptionPolicy::IdrOnly).selected_ordinals;
            let enc = self.encrypt_units(&nals, &ordinals, &aes, nonce).map_err(|e| e.to_string())?;
            let header = CipherHeader { policy: EncryptionPolicy::IdrOnly, key_check: key_check(&aes), nonce, ordinals };
            let got = decrypt_stream(&enc, &self.cipher(&wrong), &header);
            ensure!(got == Err(SelectiveError::WrongKey), "wrong key accepted: {got:?}");
        }
        Ok(format!("{trials}/{trials} rejected"))
    }

    fn kdf_regression(&mut self) -> CheckResult {
        for &(pass, iters, want) in KDF_VECTORS {
            let got = passphrase_key(pass, iters).map_err(|e| e.to_string())?;
            ensure!(hex::encode(got) == want, "{pass:?} x{iters}: {} want {want}", hex::encode(got));
        }
        Ok(format!("{} vectors", KDF_VECTORS.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64, faults: Faults) -> OracleReport {
        run_oracle_suite(&OracleConfig { seed, trials: 100, streams: 8, faults })
    }

    #[test]
    fn clean_build_passes() {
        let r = small(1, Faults::default());
        assert!(r.all_passed(), "{}", r.to_text());
        assert_eq!(r.checks.len(), 14);
    }

    #[test]
    fn corrupted_sbox_is_caught_by_cipher_checks_only() {
        let r = small(2, Faults { corrupt_sbox: true, ..Faults::default() });
        assert_eq!(r.failed(), vec!["cipher-known-answer", "cipher-matches-reference"], "{}", r.to_text());
    }

    #[test]
    fn skipped_reescape_is_caught_by_compliance() {
        let r = small(3, Faults { skip_reescape: true, ..Faults::default() });
        assert!(r.failed().contains(&"compliance-rescan"), "{}", r.to_text());
        for name in ["cipher-known-answer", "escaping-round-trip", "annexb-round-trip", "exp-golomb-exhaustive"] {
            assert!(r.get(name).unwrap().passed, "{name}");
        }
    }

    #[test]
    fn adversarial_ciphertext_needs_escaping() {
        let aes = Aes128::new(&[9; 16]).unwrap();
        let (nals, nonce) = adversarial_stream(&aes, Nonce([0; 8]));
        for o in select(&nals, EncryptionPolicy::IdrOnly).selected_ordinals {
            let raw = encrypt_nal_without_reescape(&nals[o as usize], &aes, nonce).unwrap();
            assert!(escaping_violation(&raw.ebsp).is_some());
            let good = encrypt_nal(&nals[o as usize], &aes, nonce).unwrap();
            assert!(escaping_violation(&good.ebsp).is_none());
            assert_eq!(good.ebsp.last(), Some(&0x03));
        }
    }
}
