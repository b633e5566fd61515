//! Digital baseline: 7-bit labels, Hamming(7,4) blocks, Gray-mapped QPSK.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RngStream;

use super::awgn::{awgn_apply, ChannelConfig, ComplexSignal};

/// Bits per label: `ceil(log2(M))` with `M <= 128`.
pub const BITS_PER_LABEL: usize = 7;

/// Encodes a data nibble into a Hamming(7,4) codeword (parity bits at
/// positions 1, 2, 4 in the classic 1-indexed layout).
pub fn hamming74_encode(d: [bool; 4]) -> [bool; 7] {
    let p1 = d[0] ^ d[1] ^ d[3];
    let p2 = d[0] ^ d[2] ^ d[3];
    let p4 = d[1] ^ d[2] ^ d[3];
    [p1, p2, d[0], p4, d[1], d[2], d[3]]
}

/// Corrects up to one bit error and extracts the data nibble.
pub fn hamming74_decode(mut r: [bool; 7]) -> [bool; 4] {
    let s1 = r[0] ^ r[2] ^ r[4] ^ r[6];
    let s2 = r[1] ^ r[2] ^ r[5] ^ r[6];
    let s4 = r[3] ^ r[4] ^ r[5] ^ r[6];
    let syndrome = (s1 as usize) | ((s2 as usize) << 1) | ((s4 as usize) << 2);
    if syndrome != 0 {
        r[syndrome - 1] = !r[syndrome - 1];
    }
    [r[2], r[4], r[5], r[6]]
}

/// Gray-mapped unit-energy QPSK: bit pairs (I, Q) to symbols.
/// An odd trailing bit is padded with zero.
pub fn qpsk_modulate(bits: &[bool]) -> ComplexSignal {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let n = bits.len().div_ceil(2);
    let mut data = Vec::with_capacity(n);
    for pair in 0..n {
        let b0 = bits[2 * pair];
        let b1 = bits.get(2 * pair + 1).copied().unwrap_or(false);
        let re = if b0 { -a } else { a };
        let im = if b1 { -a } else { a };
        data.push(Complex64::new(re, im));
    }
    ComplexSignal::new(data, n, 1)
}

/// Hard-decision QPSK demapping; returns `2 * tokens` bits.
pub fn qpsk_demodulate_hard(signal: &ComplexSignal) -> Vec<bool> {
    let mut bits = Vec::with_capacity(signal.samples().len() * 2);
    for z in signal.samples() {
        bits.push(z.re < 0.0);
        bits.push(z.im < 0.0);
    }
    bits
}

fn label_to_bits(label: usize) -> [bool; BITS_PER_LABEL] {
    std::array::from_fn(|i| (label >> i) & 1 == 1)
}

fn bits_to_label(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i))
}

/// Sends a label sequence through the digital chain:
/// 7 bits per label, padded to 8, two Hamming(7,4) blocks, Gray QPSK, AWGN,
/// hard decisions, Hamming decoding. Always returns a label per entry;
/// out-of-range 7-bit values wrap modulo `num_labels`.
pub fn digital_roundtrip(
    labels: &[usize],
    num_labels: usize,
    cfg: &ChannelConfig,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    if num_labels == 0 || num_labels > 128 {
        return Err(Error::Config(format!(
            "digital chain supports 1..=128 labels, got {num_labels}"
        )));
    }
    let mut coded_bits = Vec::with_capacity(labels.len() * 14);
    for &label in labels {
        if label >= num_labels {
            return Err(Error::LabelOutOfRange(label));
        }
        let bits = label_to_bits(label);
        // Pad the 7 data bits to two nibbles.
        let lo = [bits[0], bits[1], bits[2], bits[3]];
        let hi = [bits[4], bits[5], bits[6], false];
        coded_bits.extend_from_slice(&hamming74_encode(lo));
        coded_bits.extend_from_slice(&hamming74_encode(hi));
    }
    let x = qpsk_modulate(&coded_bits);
    let y = awgn_apply(&x, cfg, rng);
    let rx_bits = qpsk_demodulate_hard(&y);

    let mut out = Vec::with_capacity(labels.len());
    for chunk in rx_bits.chunks_exact(14) {
        let lo: [bool; 7] = chunk[..7].try_into().expect("block size");
        let hi: [bool; 7] = chunk[7..14].try_into().expect("block size");
        let dlo = hamming74_decode(lo);
        let dhi = hamming74_decode(hi);
        let bits = [dlo[0], dlo[1], dlo[2], dlo[3], dhi[0], dhi[1], dhi[2]];
        out.push(bits_to_label(&bits) % num_labels);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::q_function;

    #[test]
    fn hamming_corrects_any_single_error() {
        for value in 0..16usize {
            let d: [bool; 4] = std::array::from_fn(|i| (value >> i) & 1 == 1);
            let code = hamming74_encode(d);
            assert_eq!(hamming74_decode(code), d);
            for flip in 0..7 {
                let mut corrupted = code;
                corrupted[flip] = !corrupted[flip];
                assert_eq!(hamming74_decode(corrupted), d, "value {value} flip {flip}");
            }
        }
    }

    #[test]
    fn qpsk_bits_round_trip() {
        let bits: Vec<bool> = (0..64).map(|i| (i * 7) % 3 == 0).collect();
        let x = qpsk_modulate(&bits);
        assert_eq!(qpsk_demodulate_hard(&x), bits);
        // Unit symbol energy.
        assert!((x.average_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_roundtrip_exhaustive() {
        let cfg = ChannelConfig::new(200.0);
        let labels: Vec<usize> = (0..80).collect();
        let mut rng = RngStream::from_seed(2);
        let out = digital_roundtrip(&labels, 80, &cfg, &mut rng).unwrap();
        assert_eq!(out, labels);
    }

    #[test]
    fn uncoded_qpsk_ber_matches_q_function() {
        // Eb/N0 = 4 dB; for unit-energy QPSK, Es/N0 = 2 Eb/N0.
        let ebn0_db = 4.0;
        let snr_db = ebn0_db + 10.0 * 2.0f64.log10();
        let n_bits = 1_000_000;
        let mut rng = RngStream::from_seed(44);
        let bits: Vec<bool> = (0..n_bits).map(|_| rng.bernoulli(0.5)).collect();
        let x = qpsk_modulate(&bits);
        let y = awgn_apply(&x, &ChannelConfig::new(snr_db), &mut rng);
        let rx = qpsk_demodulate_hard(&y);
        let errors = bits.iter().zip(rx.iter()).filter(|(a, b)| a != b).count();
        let ber = errors as f64 / n_bits as f64;
        let want = q_function((2.0 * 10f64.powf(ebn0_db / 10.0)).sqrt());
        let sigma = (want * (1.0 - want) / n_bits as f64).sqrt();
        assert!(
            (ber - want).abs() < 3.0 * sigma,
            "BER {ber} vs Q {want} (3 sigma {})",
            3.0 * sigma
        );
    }

    #[test]
    fn hamming_beats_uncoded_word_error_rate() {
        // Paired comparison at the same channel SNR and the same noise seed.
        let snr_db = 4.0 + 10.0 * 2.0f64.log10();
        let n_words = 30_000;
        let labels: Vec<usize> = {
            let mut rng = RngStream::from_seed(7);
            (0..n_words).map(|_| rng.uniform_usize(80)).collect()
        };

        // Coded chain.
        let mut rng = RngStream::from_seed(99);
        let coded = digital_roundtrip(&labels, 80, &ChannelConfig::new(snr_db), &mut rng).unwrap();
        let coded_wer = labels
            .iter()
            .zip(coded.iter())
            .filter(|(a, b)| a != b)
            .count() as f64
            / n_words as f64;

        // Uncoded chain: raw 7 bits per label, same noise seed.
        let mut bits = Vec::with_capacity(n_words * 7);
        for &label in &labels {
            for i in 0..7 {
                bits.push((label >> i) & 1 == 1);
            }
        }
        let mut rng = RngStream::from_seed(99);
        let x = qpsk_modulate(&bits);
        let y = awgn_apply(&x, &ChannelConfig::new(snr_db), &mut rng);
        let rx = qpsk_demodulate_hard(&y);
        let uncoded_wer = rx
            .chunks_exact(7)
            .map(|chunk| bits_to_label(chunk) % 80)
            .zip(labels.iter())
            .filter(|(got, want)| got != *want)
            .count() as f64
            / n_words as f64;

        assert!(
            coded_wer < uncoded_wer,
            "coded WER {coded_wer} not below uncoded {uncoded_wer}"
        );
    }

    #[test]
    fn rejects_oversized_label_space() {
        let mut rng = RngStream::from_seed(1);
        assert!(digital_roundtrip(&[0], 129, &ChannelConfig::new(10.0), &mut rng).is_err());
        assert!(digital_roundtrip(&[90], 80, &ChannelConfig::new(10.0), &mut rng).is_err());
    }
}
