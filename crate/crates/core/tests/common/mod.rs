#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct O(N^2) DFT. Kernel angles are reduced modulo N before the
/// trigonometric call so that large `k*n` products stay accurate.
pub fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let kernel: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64))
        .collect();
    let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                acc += v * kernel[(k * j) % n];
            }
            acc * scale
        })
        .collect()
}

/// `max |a - b| / max |b|`.
pub fn max_relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name)
}

/// Compare against a committed golden file. `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected =
        std::fs::read(&path).unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from its golden file");
}

pub mod script {
    use serde_json::{json, Value};
    use wavescope_core::dsp::WindowSpec;
    use wavescope_core::engine::{RenderFormat, Session, ViewMode};
    use wavescope_core::viz::{Interval, ViewRange};
    use wavescope_testkit::{chirp, sine, Encoding, WavFixture};

    pub fn fixtures() -> Vec<(&'static str, Vec<u8>)> {
        let a = WavFixture::new(Encoding::I16, 1, 44100).build_mono(&sine(440.0, 44100, 3.0, 0.6));
        let b = WavFixture::new(Encoding::F32, 2, 22050)
            .build_mono(&chirp(100.0, 9000.0, 22050, 2.0, 0.8));
        let c = b"RIFF\x04\x00\x00\x00WAVEjunk".to_vec();
        vec![("tone.wav", a), ("sweep.wav", b), ("broken.wav", c)]
    }

    fn range(t: (f64, f64), f: (f64, f64)) -> ViewRange {
        ViewRange {
            time: Interval { lo: t.0, hi: t.1 },
            amplitude: Interval { lo: -1.0, hi: 1.0 },
            frequency: Interval { lo: f.0, hi: f.1 },
        }
    }

    fn id(s: &Session, i: usize) -> wavescope_core::engine::FileId {
        s.entries()[i].id
    }

    /// Run a 20-command session twice, once through the JSON boundary and
    /// once by calling the session directly, and return one line per command
    /// that differs. Empty means bit-identical.
    pub fn boundary_mismatches() -> (usize, Vec<String>) {
        let files = fixtures();
        let payloads: Vec<Vec<u8>> = files.iter().map(|f| f.1.clone()).collect();
        let shared = range((0.5, 1.5), (0.0, 22050.0));
        let own = range((0.0, 1.0), (100.0, 5000.0));

        let mut wire = Session::new();
        let mut direct = Session::new();
        let mut mismatches = Vec::new();
        let mut n = 0;
        let mut check =
            |label: &str, got: (Value, Option<Vec<u8>>), want: (Value, Option<Vec<u8>>)| {
                n += 1;
                if got != want {
                    mismatches.push(format!(
                        "{label}: boundary {:?} vs direct {:?}",
                        got.0, want.0
                    ));
                }
            };
        let call = |s: &mut Session, req: Value| {
            let r = s.execute(&req.to_string(), &payloads);
            let mut j = r.json();
            assert_eq!(j["ok"], true, "{req} -> {j}");
            let obj = j.as_object_mut().unwrap();
            obj.remove("ok");
            obj.remove("version");
            obj.remove("payload");
            (j, r.payload)
        };

        let got = call(
            &mut wire,
            json!({"cmd": "add_files", "files": [
            {"name": "tone.wav", "payload": 0},
            {"name": "sweep.wav", "payload": 1},
            {"name": "broken.wav", "payload": 2}]}),
        );
        let added = direct.add_files(files.iter().map(|(n, b)| (*n, b.clone())));
        let statuses: Vec<&str> = got.0["results"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["status"].as_str().unwrap())
            .collect();
        let want_status: Vec<&str> = added
            .iter()
            .map(|r| match r.outcome {
                wavescope_core::engine::AddOutcome::Added(_) => "added",
                wavescope_core::engine::AddOutcome::Duplicate(_) => "duplicate",
                wavescope_core::engine::AddOutcome::Failed { .. } => "failed",
            })
            .collect();
        check(
            "add_files",
            (json!(statuses), None),
            (json!(want_status), None),
        );

        let (f1, f2, f3) = (id(&direct, 0), id(&direct, 1), id(&direct, 2));
        let ids = |i: wavescope_core::engine::FileId| i.to_string();

        let got = call(&mut wire, json!({"cmd": "list_files"}));
        check(
            "list_files",
            got,
            (json!({"files": direct.entries()}), None),
        );

        let got = call(
            &mut wire,
            json!({"cmd": "set_shared_range", "range": shared}),
        );
        direct.set_shared_range(shared).unwrap();
        check("set_shared_range", got, (json!({}), None));

        let got = call(&mut wire, json!({"cmd": "effective_range", "id": ids(f2)}));
        check(
            "effective_range",
            got,
            (json!({"range": direct.effective_range(f2).unwrap()}), None),
        );

        let got = call(
            &mut wire,
            json!({"cmd": "add_files", "files": [{"name": "tone.wav", "payload": 0}]}),
        );
        let again = direct.add_files([("tone.wav", files[0].1.clone())]);
        let want = match &again[0].outcome {
            wavescope_core::engine::AddOutcome::Duplicate(id) => {
                json!({"results": [{"name": "tone.wav", "status": "duplicate", "id": id}]})
            }
            other => panic!("expected a duplicate, got {other:?}"),
        };
        check("duplicate add_files", got, (want, None));

        let got = call(&mut wire, json!({"cmd": "generate", "id": ids(f1)}));
        let v = direct.generate_visualization(f1).unwrap();
        let w = v.as_waveform().unwrap().len();
        check(
            "generate waveform",
            got,
            (json!({"buckets": w}), Some(v.to_bytes())),
        );

        let got = call(
            &mut wire,
            json!({"cmd": "render", "id": ids(f1), "format": "svg", "width": 640, "height": 240}),
        );
        let want = direct.render(f1, RenderFormat::Svg, 640, 240).unwrap();
        check("render f1 svg", got, (json!({}), Some(want)));

        let got = call(
            &mut wire,
            json!({"cmd": "render", "id": ids(f2), "format": "png"}),
        );
        let want = direct.render(f2, RenderFormat::Png, 1024, 384).unwrap();
        check("render f2 png", got, (json!({}), Some(want)));

        let got = call(
            &mut wire,
            json!({"cmd": "set_view_mode", "mode": "spectrogram"}),
        );
        direct.set_view_mode(ViewMode::Spectrogram);
        check("set_view_mode", got, (json!({}), None));

        let got = call(
            &mut wire,
            json!({"cmd": "set_window_spec", "window_size": 1024, "hop_size": 256}),
        );
        direct
            .set_window_spec(WindowSpec::new(1024, 256).unwrap())
            .unwrap();
        check("set_window_spec", got, (json!({}), None));

        let got = call(&mut wire, json!({"cmd": "generate", "id": ids(f1)}));
        let v = direct.generate_visualization(f1).unwrap();
        let m = v.as_spectrogram().unwrap();
        check(
            "generate spectrogram",
            got,
            (
                json!({"frames": m.frames(), "bins": m.bins()}),
                Some(v.to_bytes()),
            ),
        );

        let got = call(
            &mut wire,
            json!({"cmd": "render", "id": ids(f1), "format": "png", "width": 300, "height": 200}),
        );
        let want = direct.render(f1, RenderFormat::Png, 300, 200).unwrap();
        check("render f1 png", got, (json!({}), Some(want)));

        let got = call(
            &mut wire,
            json!({"cmd": "render", "id": ids(f2), "format": "svg", "width": 400, "height": 300}),
        );
        let want = direct.render(f2, RenderFormat::Svg, 400, 300).unwrap();
        check("render f2 svg", got, (json!({}), Some(want)));

        let got = call(
            &mut wire,
            json!({"cmd": "set_file_range", "id": ids(f2), "range": own}),
        );
        direct.set_file_range(f2, own).unwrap();
        check("set_file_range", got, (json!({}), None));

        let got = call(&mut wire, json!({"cmd": "generate", "id": ids(f2)}));
        let v = direct.generate_visualization(f2).unwrap();
        let m = v.as_spectrogram().unwrap();
        check(
            "generate cropped spectrogram",
            got,
            (
                json!({"frames": m.frames(), "bins": m.bins()}),
                Some(v.to_bytes()),
            ),
        );

        let got = call(&mut wire, json!({"cmd": "export_f32le", "id": ids(f1)}));
        let want = direct.export_f32le(f1).unwrap();
        check("export_f32le", got, (json!({}), Some(want)));

        let got = call(
            &mut wire,
            json!({"cmd": "reorder", "id": ids(f2), "index": 0}),
        );
        direct.reorder(f2, 0).unwrap();
        check("reorder", got, (json!({}), None));

        let got = call(&mut wire, json!({"cmd": "thumbnail", "id": ids(f1)}));
        let want = direct.thumbnail(f1).unwrap().to_bytes();
        check("thumbnail", got, (json!({}), Some(want)));

        let got = call(&mut wire, json!({"cmd": "remove_file", "id": ids(f3)}));
        direct.remove_file(f3).unwrap();
        check("remove_file", got, (json!({}), None));

        let got = call(&mut wire, json!({"cmd": "list_files"}));
        check(
            "final list_files",
            got,
            (json!({"files": direct.entries()}), None),
        );

        (n, mismatches)
    }
}

pub mod render {
    use wavescope_core::dsp::SpectrogramMeta;
    use wavescope_core::render::{render_spectrogram_svg, render_waveform_svg};
    use wavescope_core::viz::{turbo_color, Bucket, PixelGrid, ViewRange, WaveformSummary};

    pub fn fixed_summary() -> WaveformSummary<f64> {
        let buckets = (0..16)
            .map(|i| {
                let a = ((i as f64) * 0.7).sin() * 0.8;
                Bucket {
                    min: -a.abs() - 0.05,
                    max: a.abs() * 0.5 + 0.05,
                }
            })
            .collect();
        WaveformSummary {
            buckets,
            sample_rate: 16,
            len_samples: 16,
            start_time: 0.0,
            source_duration: 1.0,
        }
    }

    pub fn full_view(duration: f64, nyquist: f64) -> ViewRange {
        ViewRange::full(duration, nyquist)
    }

    pub fn fixed_grid() -> PixelGrid {
        let mut g = PixelGrid::filled(8, 8, [0, 0, 0]);
        for y in 0..8 {
            for x in 0..8 {
                g.set(x, y, turbo_color(((x + y) % 8) as f64 / 7.0));
            }
        }
        g
    }

    pub fn fixed_meta() -> SpectrogramMeta {
        SpectrogramMeta {
            frames: 8,
            bins: 8,
            sample_rate: 44100,
            window_size: 14,
            hop_size: 7,
            origin_time: 0.0,
            frame_offset: 0,
            bin_offset: 0,
        }
    }

    pub fn waveform_svg() -> String {
        render_waveform_svg(
            &fixed_summary(),
            &full_view(1.0, 8.0),
            320,
            120,
            "fixture.wav",
        )
        .unwrap()
    }

    pub fn spectrogram_svg() -> String {
        render_spectrogram_svg(&fixed_grid(), &fixed_meta(), 320, 200, "fixture.wav").unwrap()
    }

    /// Decode with the independent `png` crate.
    pub fn decode_png(bytes: &[u8]) -> PixelGrid {
        let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
        let mut reader = decoder.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size().unwrap()];
        let info = reader.next_frame(&mut buf).unwrap();
        assert_eq!(info.color_type, png::ColorType::Rgb);
        assert_eq!(info.bit_depth, png::BitDepth::Eight);
        PixelGrid::from_rgb_bytes(
            info.width as usize,
            info.height as usize,
            &buf[..info.buffer_size()],
        )
        .unwrap()
    }
}
