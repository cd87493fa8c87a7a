mod common;

use common::render::{decode_png, fixed_grid, full_view, spectrogram_svg, waveform_svg};

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use wavescope_core::dsp::{spectrogram, SpectrogramMatrix, SpectrogramMeta, WindowSpec};
use wavescope_core::render::{encode_png, nice_ticks, render_waveform_svg, tick_set, PlotArea};
use wavescope_core::viz::{
    crop_to_range, decimate_minmax, rasterize_spectrogram, turbo_color, Bucket, Interval,
    PixelGrid, ViewRange, WaveformSummary, TURBO_SRGB,
};
use wavescope_core::wav::AudioClip;
use wavescope_testkit::{sine, white_noise};

fn matrix(frames: usize, bins: usize, values: Vec<f64>) -> SpectrogramMatrix<f64> {
    SpectrogramMatrix {
        meta: SpectrogramMeta {
            frames,
            bins,
            sample_rate: 8000,
            window_size: (bins.max(2) - 1) * 2,
            hop_size: 100,
            origin_time: 0.0,
            frame_offset: 0,
            bin_offset: 0,
        },
        values,
    }
}

fn reference_turbo() -> Vec<[u8; 3]> {
    let text = include_str!("fixtures/turbo_srgb_bytes.csv");
    text.lines()
        .map(|l| {
            let v: Vec<u8> = l.split(',').map(|s| s.trim().parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn turbo_table_matches_reference_fixture() {
    let reference = reference_turbo();
    assert_eq!(reference.len(), 256);
    assert_eq!(TURBO_SRGB.to_vec(), reference);
    for (i, c) in reference.iter().enumerate() {
        assert_eq!(turbo_color(i as f64 / 255.0), *c, "entry {i}");
    }
    assert_eq!(turbo_color(0.0), [48, 18, 59]);
    assert_eq!(turbo_color(1.0), [122, 4, 3]);
    assert!(turbo_color(0.95)[0] > turbo_color(0.05)[0]);
}

#[test]
fn turbo_interpolates_between_reference_entries() {
    let reference = reference_turbo();
    for i in 0..255 {
        let t = (i as f64 + 0.5) / 255.0;
        let c = turbo_color(t);
        for ch in 0..3 {
            let (a, b) = (reference[i][ch], reference[i + 1][ch]);
            assert!(
                c[ch] >= a.min(b) && c[ch] <= a.max(b),
                "entry {i} channel {ch}"
            );
        }
    }
}

#[test]
fn hot_cell_fills_its_quadrant() {
    // frame 1 (right half), bin 1 (top half)
    let m = matrix(2, 2, vec![0.0, 0.0, 0.0, 5.0]);
    let grid = rasterize_spectrogram(&m, 4, 4).unwrap();
    let hot = turbo_color(1.0);
    let cold = turbo_color(0.0);
    for y in 0..4 {
        for x in 0..4 {
            let want = if x >= 2 && y < 2 { hot } else { cold };
            assert_eq!(grid.get(x, y), want, "({x},{y})");
        }
    }
}

#[test]
fn sine_draws_a_horizontal_line_at_its_frequency() {
    let clip = AudioClip::new(sine(1000.0, 44100, 2.0, 1.0), 44100).unwrap();
    let m = spectrogram(&clip, &WindowSpec::default()).unwrap();
    let (w, h) = (200, m.bins());
    let grid = rasterize_spectrogram(&m, w, h).unwrap();
    let row = m.bins() - 1 - 46;
    let hot = turbo_color(1.0);
    let near_hot = |c: [u8; 3]| c[0] >= hot[0].saturating_sub(40) && c[2] <= 40;
    assert!((0..w).all(|x| near_hot(grid.get(x, row))));
    assert!((0..w).all(|x| grid.get(x, 0) == turbo_color(0.0) || !near_hot(grid.get(x, 0))));
}

/// Brute-force crop oracle: enumerate every (frame, bin) pair.
fn crop_oracle(m: &SpectrogramMatrix<f64>, r: &ViewRange) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..m.frames() {
        for k in 0..m.bins() {
            let t = m.meta.frame_time(j);
            let f = m.meta.bin_frequency(k);
            if t >= r.time.lo && t < r.time.hi && f >= r.frequency.lo && f <= r.frequency.hi {
                out.push((j, k));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn crop_matches_enumeration(
        frames in 1usize..20,
        bins in 2usize..20,
        t in (0.0f64..0.3, 0.0f64..0.3),
        f in (0.0f64..4200.0, 0.0f64..4200.0),
    ) {
        let m = matrix(frames, bins, (0..frames * bins).map(|i| i as f64).collect());
        let (t0, t1) = if t.0 < t.1 { t } else { (t.1, t.0) };
        let (f0, f1) = if f.0 < f.1 { f } else { (f.1, f.0) };
        prop_assume!(t0 < t1 && f0 < f1);
        let range = ViewRange {
            time: Interval { lo: t0, hi: t1 },
            amplitude: Interval { lo: -1.0, hi: 1.0 },
            frequency: Interval { lo: f0, hi: f1 },
        };
        let cells = crop_oracle(&m, &range);
        match crop_to_range(&m, &range) {
            Ok(c) => {
                let js: BTreeSet<usize> = cells.iter().map(|c| c.0).collect();
                let ks: BTreeSet<usize> = cells.iter().map(|c| c.1).collect();
                prop_assert_eq!(c.frames() * c.bins(), cells.len());
                prop_assert_eq!(c.frames(), js.len());
                prop_assert_eq!(c.bins(), ks.len());
                let want: Vec<f64> = cells.iter().map(|&(j, k)| m.get(j, k)).collect();
                prop_assert_eq!(&c.values, &want);
                let again = crop_to_range(&c, &range).unwrap();
                prop_assert_eq!(again, c);
            }
            Err(_) => prop_assert!(cells.is_empty()),
        }
    }

    #[test]
    fn decimation_preserves_extrema(
        samples in prop::collection::vec(-1.0f64..=1.0, 1..3000),
        buckets in 1usize..500,
    ) {
        let clip = AudioClip::new(samples.clone(), 8000).unwrap();
        let s = decimate_minmax(&clip, buckets).unwrap();
        prop_assert_eq!(s.len(), buckets.min(samples.len()));
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(s.global_min(), Some(lo));
        prop_assert_eq!(s.global_max(), Some(hi));
        for b in &s.buckets {
            prop_assert!(b.min <= b.max);
        }
    }

    #[test]
    fn one_bucket_per_sample_is_lossless(samples in prop::collection::vec(-1.0f64..=1.0, 1..500)) {
        let clip = AudioClip::new(samples.clone(), 8000).unwrap();
        let s = decimate_minmax(&clip, samples.len()).unwrap();
        for (b, x) in s.buckets.iter().zip(&samples) {
            prop_assert_eq!((b.min, b.max), (*x, *x));
        }
    }

    #[test]
    fn ticks_are_nice(lo in -1e6f64..1e6, span in 1e-6f64..1e6, target in 2usize..12) {
        let hi = lo + span;
        let set = tick_set(lo, hi, target).unwrap();
        let t = &set.values;
        prop_assert!(2 * t.len() >= target && t.len() <= target * 2,
            "{} ticks for target {}", t.len(), target);
        let eps = set.step * 1e-9;
        prop_assert!(t.iter().all(|&v| v >= lo - eps && v <= hi + eps));
        // tick positions are doubles, so allow a few ulps of the magnitude
        let slack = set.step * 1e-6 + 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
        for w in t.windows(2) {
            prop_assert!(((w[1] - w[0]) - set.step).abs() <= slack);
        }
        let exp = set.step.log10().floor();
        let mantissa = set.step / 10f64.powf(exp);
        prop_assert!([1.0, 2.0, 5.0, 10.0].iter().any(|m| (mantissa - m).abs() < 1e-6),
            "step {}", set.step);
    }
}

#[test]
fn million_sample_extrema_are_exact() {
    let mut r = common::rng(17);
    let x: Vec<f64> = (0..1_000_000).map(|_| r.gen_range(-1.0..=1.0)).collect();
    let clip = AudioClip::new(x.clone(), 44100).unwrap();
    let s = decimate_minmax(&clip, 1000).unwrap();
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(s.global_min(), Some(lo));
    assert_eq!(s.global_max(), Some(hi));
}

#[test]
fn tick_examples() {
    assert_eq!(
        nice_ticks(0.0, 10.0, 5).unwrap(),
        vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
    );
    assert!(nice_ticks(1.0, 1.0, 5).is_err());
}

#[test]
fn waveform_svg_golden() {
    let a = waveform_svg();
    assert_eq!(a, waveform_svg());
    common::check_golden("waveform_16.svg", a.as_bytes());
}

#[test]
fn spectrogram_svg_golden() {
    let a = spectrogram_svg();
    assert_eq!(a, spectrogram_svg());
    common::check_golden("spectrogram_8x8.svg", a.as_bytes());
}

fn parse_svg(text: &str, width: usize, height: usize) -> roxmltree::Document<'_> {
    let doc = roxmltree::Document::parse(text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(
        root.tag_name().namespace(),
        Some("http://www.w3.org/2000/svg")
    );
    assert_eq!(root.attribute("width"), Some(width.to_string().as_str()));
    assert_eq!(root.attribute("height"), Some(height.to_string().as_str()));
    doc
}

#[test]
fn svgs_are_well_formed() {
    let w = waveform_svg();
    let doc = parse_svg(&w, 320, 120);
    let bars = doc
        .descendants()
        .filter(|n| {
            n.has_tag_name("rect")
                && n.parent()
                    .is_some_and(|p| p.attribute("clip-path").is_some())
        })
        .count();
    assert_eq!(bars, 16);

    let s = spectrogram_svg();
    let doc = parse_svg(&s, 320, 200);
    let image = doc.descendants().find(|n| n.has_tag_name("image")).unwrap();
    let href = image
        .attribute(("http://www.w3.org/1999/xlink", "href"))
        .unwrap();
    assert!(href.starts_with("data:image/png;base64,"));
    assert!(s.contains("22050 Hz"));
}

#[test]
fn embedded_spectrogram_png_round_trips() {
    use base64::Engine;
    let s = spectrogram_svg();
    let doc = roxmltree::Document::parse(&s).unwrap();
    let href = doc
        .descendants()
        .find(|n| n.has_tag_name("image"))
        .and_then(|n| n.attribute(("http://www.w3.org/1999/xlink", "href")))
        .unwrap();
    let b64 = href.trim_start_matches("data:image/png;base64,");
    let png = base64::engine::general_purpose::STANDARD
        .decode(b64)
        .unwrap();
    assert_eq!(decode_png(&png), fixed_grid());
}

#[test]
fn silent_waveform_sits_on_the_zero_line() {
    let summary = WaveformSummary {
        buckets: vec![
            Bucket {
                min: 0.0f64,
                max: 0.0
            };
            16
        ],
        sample_rate: 16,
        len_samples: 16,
        start_time: 0.0,
        source_duration: 1.0,
    };
    let svg = render_waveform_svg(&summary, &full_view(1.0, 8.0), 320, 120, "silence").unwrap();
    let doc = parse_svg(&svg, 320, 120);
    let area = PlotArea::for_canvas(320, 120).unwrap();
    let zero_y = area.y + area.height / 2.0;
    let bars: Vec<_> = doc
        .descendants()
        .filter(|n| {
            n.has_tag_name("rect")
                && n.parent()
                    .is_some_and(|p| p.attribute("clip-path").is_some())
        })
        .collect();
    assert_eq!(bars.len(), 16);
    for b in bars {
        let y: f64 = b.attribute("y").unwrap().parse().unwrap();
        let h: f64 = b.attribute("height").unwrap().parse().unwrap();
        assert!(h <= 1.0);
        assert!(
            (y + h / 2.0 - zero_y).abs() <= 0.01,
            "bar centre {} vs {zero_y}",
            y + h / 2.0
        );
    }
}

#[test]
fn png_round_trips_through_independent_decoder() {
    let one = PixelGrid::filled(1, 1, [48, 18, 59]);
    assert_eq!(decode_png(&encode_png(&one).unwrap()), one);

    let mut r = common::rng(32);
    for _ in 0..4 {
        let mut g = PixelGrid::filled(32, 32, [0, 0, 0]);
        for y in 0..32 {
            for x in 0..32 {
                g.set(x, y, [r.gen(), r.gen(), r.gen()]);
            }
        }
        assert_eq!(decode_png(&encode_png(&g).unwrap()), g);
    }
}

#[test]
fn noise_spectrogram_rasterizes_to_full_grid() {
    let clip = AudioClip::new(white_noise(2, 20000, 0.5), 44100).unwrap();
    let m = spectrogram(&clip, &WindowSpec::new(512, 256).unwrap()).unwrap();
    let grid = rasterize_spectrogram(&m, 64, 48).unwrap();
    assert_eq!(grid.pixels.len(), 64 * 48);
    assert_eq!(decode_png(&encode_png(&grid).unwrap()), grid);
}
