//! Deterministic speech-like test signal generator: voiced segments
//! (impulse-train excitation through formant resonators), fricative-like
//! noise bursts and short pauses. Used as the bundled test asset and as a
//! fallback when no speech WAV is configured.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Two-pole resonator applied in place.
fn resonate(x: &mut [f64], freq_hz: f64, bandwidth_hz: f64, fs: f64) {
    let r = (-std::f64::consts::PI * bandwidth_hz / fs).exp();
    let theta = 2.0 * std::f64::consts::PI * freq_hz / fs;
    let a1 = -2.0 * r * theta.cos();
    let a2 = r * r;
    let gain = 1.0 - r;
    let (mut y1, mut y2) = (0.0, 0.0);
    for v in x.iter_mut() {
        let y = gain * *v - a1 * y1 - a2 * y2;
        y2 = y1;
        y1 = y;
        *v = y;
    }
}

/// Generates a mono speech-like signal of the given duration.
pub fn synthetic_speech(duration_s: f64, sample_rate: u32, seed: u64) -> Vec<f64> {
    let fs = sample_rate as f64;
    let total = (duration_s * fs) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(total);

    // Formant targets for a handful of vowel-like sounds.
    let vowels: [(f64, f64, f64); 5] = [
        (730.0, 1090.0, 2440.0),
        (270.0, 2290.0, 3010.0),
        (530.0, 1840.0, 2480.0),
        (570.0, 840.0, 2410.0),
        (440.0, 1020.0, 2240.0),
    ];

    while out.len() < total {
        let kind: f64 = rng.gen();
        let seg_len = ((0.08 + 0.18 * rng.gen::<f64>()) * fs) as usize;
        let seg_len = seg_len.min(total - out.len());
        let mut seg = vec![0.0f64; seg_len];
        if kind < 0.55 {
            // voiced: glottal-ish pulse train with slight pitch drift
            let f0 = 95.0 + 45.0 * rng.gen::<f64>();
            let drift = 0.9 + 0.2 * rng.gen::<f64>();
            let mut phase = 0.0;
            for (i, v) in seg.iter_mut().enumerate() {
                let pitch = f0 * (1.0 + 0.05 * (drift * i as f64 / fs * 6.0).sin());
                phase += pitch / fs;
                if phase >= 1.0 {
                    phase -= 1.0;
                    *v = 1.0;
                }
            }
            let (f1, f2, f3) = vowels[rng.gen_range(0..vowels.len())];
            resonate(&mut seg, f1, 90.0, fs);
            resonate(&mut seg, f2, 110.0, fs);
            resonate(&mut seg, f3, 170.0, fs);
        } else if kind < 0.8 {
            // unvoiced: noise shaped by a high resonance
            for v in seg.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            resonate(&mut seg, 2500.0 + 2500.0 * rng.gen::<f64>(), 1200.0, fs);
            for v in seg.iter_mut() {
                *v *= 0.25;
            }
        }
        // else: pause (zeros)

        // raised-cosine fades to avoid clicks
        let fade = (0.01 * fs) as usize;
        for i in 0..fade.min(seg_len / 2) {
            let g = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / fade as f64).cos());
            seg[i] *= g;
            seg[seg_len - 1 - i] *= g;
        }
        out.extend(seg);
    }
    out.truncate(total);

    // normalize to 0.5 peak
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        for v in &mut out {
            *v *= 0.5 / peak;
        }
    }
    out
}
