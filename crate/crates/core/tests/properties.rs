use blinkmorse_core::codec::{
    classify_blink, decode_sequence, encode_char, BlinkClass, DecoderEvent, DecoderEventKind, LiveDecoder, MorseSymbol,
    TimingConfig, MORSE_TABLE,
};
use blinkmorse_core::engine::Engine;
use blinkmorse_core::io::{
    parse_event_line, parse_frame_line, serialize_event, serialize_frame, simulate_blink_events, simulate_ear_trace,
    EventMessage, SimProfile,
};
use blinkmorse_core::session::{
    emit_report, evaluate_trial, summarize, trials_from_csv, trials_to_csv, TrialRecord, REPORT_FILES,
};
use blinkmorse_core::signal::{
    compute_ear, BlinkDetector, BlinkEvent, DetectorConfig, EyeLandmarks, FrameSample, Point2, Ratio,
};
use proptest::prelude::*;

const ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

fn is_valid_transcript(s: &str) -> bool {
    s.is_empty()
        || s.split(' ').all(|w| {
            !w.is_empty()
                && w.chars()
                    .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '?')
        })
}

/// Messages over the supported alphabet, single spaces between words.
fn message(max_len: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![9 => proptest::sample::select(ALPHABET).prop_map(|b| b as char), 1 => Just(' ')],
        0..=max_len,
    )
    .prop_map(|chars| {
        let s: String = chars.into_iter().collect();
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    })
}

fn point() -> impl Strategy<Value = Point2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn eye() -> impl Strategy<Value = EyeLandmarks> {
    proptest::array::uniform6(point())
        .prop_filter("distinct corners", |p| p[0].distance(p[3]) > 1e-3)
        .prop_map(EyeLandmarks::new)
}

fn decode_events(blinks: &[BlinkEvent], ticks: &[Vec<f64>]) -> (String, Vec<DecoderEvent>) {
    let mut d = LiveDecoder::new(TimingConfig::default()).unwrap();
    let mut out = Vec::new();
    for (i, b) in blinks.iter().enumerate() {
        if let Some(ts) = ticks.get(i) {
            for &t in ts {
                out.extend(d.on_tick(t));
            }
        }
        out.extend(d.on_blink(b).unwrap());
    }
    if let Some(ts) = ticks.get(blinks.len()) {
        for &t in ts {
            out.extend(d.on_tick(t));
        }
    }
    out.extend(d.flush());
    (d.transcript().to_string(), out)
}

/// Random blink stream: durations across all three classes, arbitrary gaps.
fn blink_stream() -> impl Strategy<Value = Vec<BlinkEvent>> {
    proptest::collection::vec((0.05..3.0f64, 0.05..5.0f64), 0..25).prop_map(|shape| {
        let mut t = 0.0;
        shape
            .into_iter()
            .map(|(dur, gap)| {
                let b = BlinkEvent::new(t + gap, t + gap + dur);
                t = b.end_s;
                b
            })
            .collect()
    })
}

/// Tick times inside each pause (before each blink, and after the last).
fn tick_schedule(blinks: &[BlinkEvent], fractions: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut prev_end = 0.0;
    let mut out = Vec::new();
    for (i, f) in fractions.iter().enumerate() {
        let next_start = blinks.get(i).map_or(prev_end + 10.0, |b| b.start_s);
        let mut ts: Vec<f64> = f.iter().map(|x| prev_end + x * (next_start - prev_end)).collect();
        ts.sort_by(f64::total_cmp);
        out.push(ts);
        if let Some(b) = blinks.get(i) {
            prev_end = b.end_s;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ear_similarity_invariance(
        e in eye(),
        scale in 0.01..100.0f64,
        angle in 0.0..std::f64::consts::TAU,
        dx in -100.0..100.0f64,
        dy in -100.0..100.0f64,
    ) {
        let (s, c) = angle.sin_cos();
        let moved = EyeLandmarks::new(e.points.map(|p| {
            Point2::new(scale * (c * p.x - s * p.y) + dx, scale * (s * p.x + c * p.y) + dy)
        }));
        let a = compute_ear(&e).unwrap().value();
        let b = compute_ear(&moved).unwrap().value();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn detector_events_ordered_and_long_enough(
        steps in proptest::collection::vec((0.001..0.2f64, 0.0..0.4f64, any::<bool>()), 1..400)
    ) {
        let cfg = DetectorConfig::default();
        let mut det = BlinkDetector::new(cfg).unwrap();
        let mut t = 0.0;
        let mut events = Vec::new();
        for (dt, ear, lost) in &steps {
            t += dt;
            let ear = if *lost { None } else { Some(Ratio::new(*ear).unwrap()) };
            events.extend(det.step(t, ear).unwrap());
        }
        for e in &events {
            prop_assert!(e.end_s > e.start_s);
            prop_assert!(e.duration_s >= cfg.min_closure_s);
            prop_assert_eq!(e.duration_s, e.end_s - e.start_s);
        }
        for w in events.windows(2) {
            prop_assert!(w[0].end_s <= w[1].start_s);
        }

        // Same input, same output.
        let mut again = BlinkDetector::new(cfg).unwrap();
        let mut t = 0.0;
        let mut events2 = Vec::new();
        for (dt, ear, lost) in &steps {
            t += dt;
            let ear = if *lost { None } else { Some(Ratio::new(*ear).unwrap()) };
            events2.extend(again.step(t, ear).unwrap());
        }
        prop_assert_eq!(events, events2);
    }

    #[test]
    fn hysteresis_band_never_chatters(band in proptest::collection::vec(0.0..1.0f64, 1..500)) {
        let cfg = DetectorConfig::default();
        let mut det = BlinkDetector::new(cfg).unwrap();
        let mut events = Vec::new();
        events.extend(det.step(0.0, Some(Ratio::new(0.05).unwrap())).unwrap());
        events.extend(det.step(0.5, Some(Ratio::new(0.30).unwrap())).unwrap());
        prop_assert_eq!(events.len(), 1);
        let width = cfg.open_threshold - cfg.close_threshold;
        for (i, f) in band.iter().enumerate() {
            // (close, open]
            let ear = cfg.open_threshold - f * width;
            let ear = if ear <= cfg.close_threshold { cfg.open_threshold } else { ear };
            events.extend(det.step(0.5 + (i + 1) as f64 / 30.0, Some(Ratio::new(ear).unwrap())).unwrap());
        }
        prop_assert_eq!(events.len(), 1);
    }

    #[test]
    fn classification_is_total(d in 1e-6..10.0f64) {
        let cfg = TimingConfig::default();
        let class = classify_blink(d, &cfg);
        let expected = if d >= 2.0 {
            BlinkClass::Dash
        } else if d >= 1.0 {
            BlinkClass::Dot
        } else {
            BlinkClass::Ignored(d)
        };
        prop_assert_eq!(class, expected);
    }

    #[test]
    fn tick_schedule_independence(
        blinks in blink_stream(),
        fractions in proptest::collection::vec(proptest::collection::vec(0.0..=1.0f64, 0..6), 26),
    ) {
        let (plain, _) = decode_events(&blinks, &[]);
        let ticks = tick_schedule(&blinks, &fractions[..=blinks.len()]);
        let (ticked, _) = decode_events(&blinks, &ticks);
        prop_assert_eq!(&plain, &ticked);
        prop_assert!(is_valid_transcript(&plain), "{:?}", plain);
    }

    #[test]
    fn ignored_blinks_are_transcript_neutral(
        msg in message(8),
        inserts in proptest::collection::vec((any::<prop::sample::Index>(), 0.0..1.0f64, 0.05..0.95f64), 0..10),
    ) {
        let profile = SimProfile::default();
        let blinks = simulate_blink_events(&msg, &profile).unwrap();
        let (base, _) = decode_events(&blinks, &[]);
        prop_assert_eq!(&base, &msg);

        let mut noisy = blinks.clone();
        for (idx, pos, dur) in inserts {
            // Pick a pause: before blink i, after the previous one.
            let i = idx.index(noisy.len() + 1);
            let lo = if i == 0 { -5.0 } else { noisy[i - 1].end_s };
            let hi = noisy.get(i).map_or(lo + 5.0, |b| b.start_s);
            let room = hi - lo;
            let d = dur.min(room * 0.5);
            if d < 1e-3 {
                continue;
            }
            let start = lo + pos * (room - d);
            noisy.insert(i, BlinkEvent::new(start, start + d));
        }
        let (with_ignored, _) = decode_events(&noisy, &[]);
        prop_assert_eq!(with_ignored, base);
    }

    #[test]
    fn simulator_decoder_round_trip(msg in message(8)) {
        let blinks = simulate_blink_events(&msg, &SimProfile::default()).unwrap();
        let (text, _) = decode_events(&blinks, &[]);
        prop_assert_eq!(text, msg);
    }

    #[test]
    fn trace_round_trip_at_any_frame_rate(msg in message(6), fps in 10.0..120.0f64) {
        let profile = SimProfile { fps, ..SimProfile::default() };
        let frames = simulate_ear_trace(&msg, &profile).unwrap();
        let mut engine = Engine::new(DetectorConfig::default(), TimingConfig::default()).unwrap();
        for f in &frames {
            engine.on_frame(f).unwrap();
        }
        engine.finish();
        prop_assert_eq!(engine.transcript(), msg.as_str());
    }

    #[test]
    fn frame_protocol_round_trip(
        ms in 0u64..10_000_000,
        ear in proptest::option::of(0.0..5.0f64),
        left in proptest::option::of(proptest::array::uniform6(point())),
        right in proptest::option::of(proptest::array::uniform6(point())),
    ) {
        let frame = FrameSample {
            timestamp_s: ms as f64 / 1000.0,
            left: left.map(EyeLandmarks::new),
            right: right.map(EyeLandmarks::new),
            ear_override: ear.map(|v| Ratio::new(v).unwrap()),
        };
        let line = serialize_frame(&frame);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(parse_frame_line(&line).unwrap(), frame);
    }

    #[test]
    fn event_protocol_round_trip(kind in 0u8..6, t in -1e6..1e6f64, d in 1e-6..100.0f64, code in proptest::collection::vec(any::<bool>(), 0..7), letter in 0usize..37) {
        let seq: blinkmorse_core::codec::MorseSequence =
            code.iter().map(|b| if *b { MorseSymbol::Dash } else { MorseSymbol::Dot }).collect::<Vec<_>>().into();
        let ch = MORSE_TABLE.get(letter).map_or('?', |(c, _)| *c);
        let event = match kind {
            0 => EventMessage::Decoder(DecoderEvent::new(DecoderEventKind::SymbolAppended(if d > 50.0 { MorseSymbol::Dash } else { MorseSymbol::Dot }), t)),
            1 => EventMessage::Decoder(DecoderEvent::new(DecoderEventKind::BlinkIgnored { duration_s: d }, t)),
            2 => EventMessage::Decoder(DecoderEvent::new(DecoderEventKind::LetterCommitted { ch, code: seq }, t)),
            3 => EventMessage::Decoder(DecoderEvent::new(DecoderEventKind::InvalidSequence(seq), t)),
            4 => EventMessage::Decoder(DecoderEvent::new(DecoderEventKind::WordBreak, t)),
            _ => EventMessage::Blink(BlinkEvent::new(t, t + d)),
        };
        let line = serialize_event(&event);
        prop_assert_eq!(parse_event_line(&line).unwrap(), event);
    }

    #[test]
    fn trials_csv_round_trip(records in trial_records(40)) {
        let bytes = trials_to_csv(&records).unwrap();
        prop_assert_eq!(trials_from_csv(&bytes).unwrap(), records);
    }

    #[test]
    fn accuracy_invariants(records in trial_records(60).prop_filter("non-empty", |r| !r.is_empty()), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let summary = summarize(&records).unwrap();
        let mut shuffled = records.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(&summarize(&shuffled).unwrap(), &summary);

        let weighted: f64 = summary.participants.iter().map(|p| p.accuracy_pct * p.n_trials as f64).sum::<f64>()
            / records.len() as f64;
        prop_assert!((weighted - summary.overall_accuracy_pct).abs() < 1e-9);
        for p in &summary.participants {
            prop_assert!((p.accuracy_pct - 100.0 * p.n_correct as f64 / (p.n_correct + p.n_incorrect) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_numbers_appear_in_tables(records in trial_records(30).prop_filter("non-empty", |r| !r.is_empty())) {
        let summary = summarize(&records).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_report(&summary, dir.path()).unwrap();
        for name in REPORT_FILES {
            let svg = std::fs::read_to_string(dir.path().join(format!("{name}.svg"))).unwrap();
            let table = std::fs::read(dir.path().join(format!("{name}.csv"))).unwrap();
            let mut fields = std::collections::HashSet::new();
            let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(&table[..]);
            for rec in rdr.records() {
                for f in rec.unwrap().iter() {
                    fields.insert(f.to_string());
                }
            }
            for label in svg_text_labels(&svg) {
                let label = label.trim_start_matches("overall ").trim_end_matches('%');
                if label.parse::<f64>().is_ok() {
                    prop_assert!(fields.contains(label), "{}: {:?} missing from table", name, label);
                }
            }
        }
    }
}

fn svg_text_labels(svg: &str) -> Vec<String> {
    svg.split("<text")
        .skip(1)
        .filter_map(|chunk| {
            let body = &chunk[chunk.find('>')? + 1..];
            Some(
                body[..body.find("</text>")?]
                    .replace("&amp;", "&")
                    .replace("&lt;", "<")
                    .replace("&gt;", ">")
                    .replace("&quot;", "\""),
            )
        })
        .collect()
}

fn trial_records(max: usize) -> impl Strategy<Value = Vec<TrialRecord>> {
    let text = "[A-Z?]{0,6}|.{0,8}";
    proptest::collection::vec(
        (
            1u32..20,
            prop_oneof![
                Just("A".to_string()),
                Just("B".to_string()),
                Just("C, \"x\"".to_string()),
                "[a-z0-9]{1,4}"
            ],
            text,
            text,
            any::<bool>(),
            0u64..100_000_000,
            0u64..100_000,
        ),
        0..max,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .map(|(n, pid, target, transcript, copy, start_ms, dur_ms)| {
                let transcript = if copy { target.clone() } else { transcript };
                let start = start_ms as f64 / 1000.0;
                let end = (start_ms + dur_ms) as f64 / 1000.0;
                let r = evaluate_trial(&target, &transcript, start, end, n, &pid).unwrap();
                // The log keeps milliseconds.
                TrialRecord {
                    response_time_s: dur_ms as f64 / 1000.0,
                    ..r
                }
            })
            .collect()
    })
}

#[test]
fn full_table_round_trip() {
    for (c, code) in MORSE_TABLE {
        let seq = encode_char(c).unwrap();
        assert_eq!(seq.to_string(), code);
        assert_eq!(decode_sequence(&seq), Some(c));
    }
}

#[test]
fn gaps_equal_to_thresholds_do_nothing() {
    let mut d = LiveDecoder::new(TimingConfig::default()).unwrap();
    d.on_blink(&BlinkEvent::new(8.0, 10.0)).unwrap();
    assert!(d.on_tick(11.0).is_empty());
    // A blink starting exactly one letter gap later extends the same letter.
    let ev = d.on_blink(&BlinkEvent::new(11.0, 12.5)).unwrap();
    assert_eq!(ev.len(), 1);
    assert_eq!(d.pending().to_string(), "-.");
    let ev = d.on_tick(13.6);
    assert_eq!(ev.len(), 1);
    assert!(
        d.on_tick(15.5).is_empty(),
        "gap of exactly 3.0 s must not break the word"
    );
    assert_eq!(d.on_tick(15.6).len(), 1);
    assert_eq!(d.transcript(), "N");
}
