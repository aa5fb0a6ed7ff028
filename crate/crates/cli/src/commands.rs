use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use blinkmorse_core::codec::{is_supported, TimingConfig};
use blinkmorse_core::engine::Engine;
use blinkmorse_core::io::{
    message_duration, parse_event_line, serialize_event, serialize_frame, simulate_blink_events, simulate_ear_trace,
    EventMessage, LineReader, Pacer, ReplayMode, SimProfile,
};
use blinkmorse_core::session::{
    append_blinks_csv, append_trials_csv, emit_report, evaluate_trial, fixture_records, fmt3, read_trials_csv,
    summarize, trials_to_csv, write_trials_csv, BlinkLogRow,
};
use blinkmorse_core::signal::{calibrate as calibrate_frames, CalibrationQuality, DetectorConfig, FrameSample};

use crate::config::EngineConfig;
use crate::error::CliError;
use crate::source::{self, EventSink, Input};
use crate::{
    AnalyzeArgs, CalibrateArgs, DecodeArgs, Emit, FixtureArgs, ReplayArgs, ReplayModeArg, SessionArgs, SimulateArgs,
};

pub fn calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    let input = source::open(args.input.source.as_deref(), args.input.port)?;
    let frames = LineReader::frames(input.reader).collect::<Result<Vec<FrameSample>, _>>()?;
    let report = calibrate_frames(&frames)?;

    let ok = report.quality == CalibrationQuality::Ok;
    cfg.detector = if ok {
        DetectorConfig {
            min_closure_s: cfg.detector.min_closure_s,
            ..report.config
        }
    } else {
        DetectorConfig {
            min_closure_s: cfg.detector.min_closure_s,
            ..DetectorConfig::from_close_threshold(DetectorConfig::FALLBACK_CLOSE)
        }
    };
    fs::write(&args.out, cfg.render()).map_err(|e| CliError::io(args.out.display().to_string(), e))?;

    println!("quality = {}", report.quality.as_str());
    println!("frames = {}", report.n_frames);
    println!("closures = {}", report.n_closures);
    println!("open_median = {}", fmt3(report.open_median.value()));
    println!("closed_median = {}", fmt3(report.closed_median.value()));
    println!("close_threshold = {}", fmt3(cfg.detector.close_threshold));
    println!("open_threshold = {}", fmt3(cfg.detector.open_threshold));
    if ok {
        Ok(())
    } else {
        Err(CliError::Insufficient(format!(
            "calibration quality {}; wrote fallback thresholds to {}",
            report.quality.as_str(),
            args.out.display()
        )))
    }
}

pub fn decode(args: DecodeArgs) -> Result<(), CliError> {
    let cfg = args.tuning.resolve()?;
    check_target(&args.session)?;
    let input = source::open(args.input.source.as_deref(), args.input.port)?;
    let mut engine = Engine::new(cfg.detector, cfg.timing)?;
    run_frames(&mut engine, input, args.session.realtime)?;
    finish_session(&engine, &args.session)
}

pub fn replay(args: ReplayArgs) -> Result<(), CliError> {
    let cfg = args.tuning.resolve()?;
    check_target(&args.session)?;
    let mode = match args.mode {
        ReplayModeArg::Frames => ReplayMode::Frames,
        ReplayModeArg::Events => ReplayMode::Events,
        ReplayModeArg::Auto => detect_mode(&args.source)?,
    };
    let input = source::open(Some(&args.source), None)?;
    let mut engine = Engine::new(cfg.detector, cfg.timing)?;
    match mode {
        ReplayMode::Frames => run_frames(&mut engine, input, args.session.realtime)?,
        ReplayMode::Events => run_events(&mut engine, input, args.session.realtime)?,
    }
    finish_session(&engine, &args.session)
}

/// Event files start with an event line; anything else is read as frames.
fn detect_mode(path: &Path) -> Result<ReplayMode, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::io(path.display().to_string(), e))?;
        if !line.trim().is_empty() {
            let mode = if parse_event_line(&line).is_ok() {
                ReplayMode::Events
            } else {
                ReplayMode::Frames
            };
            return Ok(mode);
        }
    }
    Ok(ReplayMode::Frames)
}

fn run_frames(engine: &mut Engine, input: Input, realtime: bool) -> Result<(), CliError> {
    let mut sink = EventSink::new(input.peer);
    let mut pacer = (realtime && input.recorded).then(Pacer::new);
    for frame in LineReader::frames(input.reader) {
        let frame = frame?;
        if let Some(p) = &mut pacer {
            p.wait_until(frame.timestamp_s);
        }
        sink.emit(&engine.on_frame(&frame)?)?;
    }
    sink.emit(&engine.finish())
}

/// Blink events go straight to the decoder, without ticks. Decoder event
/// lines in the file are outputs of an earlier run and are skipped.
fn run_events(engine: &mut Engine, input: Input, realtime: bool) -> Result<(), CliError> {
    let mut sink = EventSink::new(input.peer);
    let mut pacer = realtime.then(Pacer::new);
    for msg in LineReader::events(input.reader) {
        match msg? {
            EventMessage::Blink(b) => {
                if let Some(p) = &mut pacer {
                    p.wait_until(b.end_s);
                }
                sink.emit(&engine.on_blink(&b)?)?;
            }
            EventMessage::Decoder(e) => log::debug!("skipping recorded decoder event {e:?}"),
        }
    }
    sink.emit(&engine.finish())
}

fn check_target(session: &SessionArgs) -> Result<(), CliError> {
    if let Some(target) = &session.target {
        if let Some(c) = target.chars().find(|c| !c.is_whitespace() && !is_supported(*c)) {
            return Err(CliError::Usage(format!("target contains unsupported character {c:?}")));
        }
    }
    Ok(())
}

fn next_trial_no(trials: &Path, participant: &str) -> Result<u32, CliError> {
    if !trials.exists() {
        return Ok(1);
    }
    let records = read_trials_csv(trials)?;
    Ok(records
        .iter()
        .filter(|r| r.participant_id == participant)
        .map(|r| r.trial_no)
        .max()
        .unwrap_or(0)
        + 1)
}

/// Prints the transcript and, with a target, appends the trial and its
/// blinks to the session logs.
fn finish_session(engine: &Engine, session: &SessionArgs) -> Result<(), CliError> {
    eprintln!("transcript: {}", engine.transcript());
    let Some(target) = &session.target else {
        return Ok(());
    };
    fs::create_dir_all(&session.out).map_err(|e| CliError::io(session.out.display().to_string(), e))?;
    let trials = session.out.join("trials.csv");
    let trial_no = match session.trial {
        Some(n) => n,
        None => next_trial_no(&trials, &session.participant)?,
    };
    let started = engine.first_timestamp().unwrap_or(0.0);
    let ended = engine.last_commit_s().unwrap_or(started).max(started);
    let record = evaluate_trial(
        target,
        engine.transcript(),
        started,
        ended,
        trial_no,
        &session.participant,
    )?;
    let rows: Vec<BlinkLogRow> = engine
        .blinks()
        .iter()
        .map(|b| BlinkLogRow::from_classified(trial_no, &session.participant, b))
        .collect();
    append_trials_csv(&trials, std::slice::from_ref(&record))?;
    append_blinks_csv(&session.out.join("blinks.csv"), &rows)?;
    eprintln!(
        "trial {} ({}): {}, {} s",
        trial_no,
        session.participant,
        if record.correct { "correct" } else { "incorrect" },
        fmt3(record.response_time_s)
    );
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut profile = SimProfile::default();
    let overrides = [
        (args.fps, &mut profile.fps),
        (args.noise, &mut profile.noise_sigma),
        (args.dot, &mut profile.dot_s),
        (args.dash, &mut profile.dash_s),
        (args.intra_gap, &mut profile.intra_gap_s),
        (args.letter_gap, &mut profile.letter_gap_s),
        (args.word_gap, &mut profile.word_gap_s),
        (args.open_ear, &mut profile.open_ear),
        (args.closed_ear, &mut profile.closed_ear),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if let Some(seed) = args.seed {
        profile.seed = seed;
    }
    profile.validate(&TimingConfig::default())?;

    let mut text = String::new();
    let count = match args.emit {
        Emit::Events => {
            let blinks = simulate_blink_events(&args.message, &profile)?;
            for b in &blinks {
                text.push_str(&serialize_event(&EventMessage::Blink(*b)));
                text.push('\n');
            }
            blinks.len()
        }
        Emit::Frames => {
            let frames = simulate_ear_trace(&args.message, &profile)?;
            for f in &frames {
                text.push_str(&serialize_frame(f));
                text.push('\n');
            }
            frames.len()
        }
    };
    write_output(args.out.as_deref(), text.as_bytes())?;
    let what = if args.emit == Emit::Events {
        "blink events"
    } else {
        "frames"
    };
    eprintln!("{count} {what}, {} s", fmt3(message_duration(&args.message, &profile)?));
    Ok(())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p.display().to_string(), e))?;
            let mut w = BufWriter::new(file);
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(p.display().to_string(), e))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("stdout", e))
        }
    }
}

pub fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let records = read_trials_csv(&args.source)?;
    let summary = summarize(&records)?;
    let written = emit_report(&summary, &args.out)?;

    println!("participant,trials,correct,accuracy_pct,mean_response_time_s");
    for p in &summary.participants {
        println!(
            "{},{},{},{},{}",
            p.participant_id,
            p.n_trials,
            p.n_correct,
            fmt3(p.accuracy_pct),
            fmt3(p.mean_response_time_s)
        );
    }
    let correct: usize = summary.participants.iter().map(|p| p.n_correct).sum();
    println!(
        "overall,{},{},{},",
        records.len(),
        correct,
        fmt3(summary.overall_accuracy_pct)
    );
    if let (Some(fast), Some(slow)) = (summary.fastest(), summary.slowest()) {
        eprintln!("fastest: {}, slowest: {}", fast.participant_id, slow.participant_id);
    }
    eprintln!("wrote {} files to {}", written.len(), args.out.display());
    Ok(())
}

pub fn fixture(args: FixtureArgs) -> Result<(), CliError> {
    let records = fixture_records();
    match &args.out {
        Some(path) => write_trials_csv(path, &records)?,
        None => write_output(None, &trials_to_csv(&records)?)?,
    }
    Ok(())
}
