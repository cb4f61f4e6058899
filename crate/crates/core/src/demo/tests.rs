use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};

use super::*;
use crate::imaging::Method;

fn small() -> SessionConfig {
    SessionConfig {
        receivers: 60,
        mesh: 15,
        ..SessionConfig::default()
    }
}

/// An arc, then a pen lift to a separate short bar.
fn stroke() -> Vec<(f64, f64, f64)> {
    let mut pts: Vec<(f64, f64, f64)> = (1..=14)
        .map(|k| {
            let a = k as f64 * 0.2;
            (k as f64 * 0.1, 0.5 + 0.3 * a.cos(), 0.5 - 0.3 * a.sin())
        })
        .collect();
    pts.extend((15..=22).map(|k| (k as f64 * 0.1, 0.2 + 0.02 * (k - 15) as f64, 0.9)));
    pts
}

fn live(config: &SessionConfig, stroke: &[(f64, f64, f64)]) -> Session {
    let mut s = create_session(config.clone()).unwrap();
    for &(t, u, v) in stroke {
        s.ingest_stroke_point(t, u, v).unwrap();
    }
    s
}

#[test]
fn live_matches_offline_bit_for_bit() {
    for method in [Method::Sequential, Method::Global] {
        let config = SessionConfig { method, ..small() };
        let session = live(&config, &stroke());
        let (_, offline) = replay_offline(&config, &stroke()).unwrap();
        assert_eq!(session.points(), &offline.points[..], "{method}");
        assert_eq!(session.skipped(), &offline.skipped[..]);
        assert_eq!(session.latencies().len(), stroke().len());
    }
}

#[test]
fn jittered_timestamps_snap_to_the_grid() {
    let config = small();
    let jittered: Vec<_> = stroke().iter().map(|&(t, u, v)| (t + 0.03, u, v)).collect();
    let a = live(&config, &stroke());
    let b = live(&config, &jittered);
    assert_eq!(a.points(), b.points());
}

#[test]
fn rejects_bad_points_without_losing_state() {
    let mut s = create_session(small()).unwrap();
    s.ingest_stroke_point(0.1, 0.5, 0.5).unwrap();
    s.ingest_stroke_point(0.2, 0.52, 0.5).unwrap();
    let before = s.points().to_vec();
    let out_of_order = s.ingest_stroke_point(0.1, 0.5, 0.5).unwrap_err().to_string();
    assert!(out_of_order.contains("out-of-order"), "{out_of_order}");
    assert!(s.ingest_stroke_point(0.5, 0.5, 0.5).is_err());
    assert!(s.ingest_stroke_point(0.3, 1.2, 0.5).is_err());
    assert!(s.ingest_stroke_point(f64::NAN, 0.5, 0.5).is_err());
    assert_eq!(s.points(), &before[..]);
    assert_eq!(s.knots().len(), 2);
    s.ingest_stroke_point(0.3, 0.54, 0.5).unwrap();
    assert_eq!(s.points().len(), 3);
}

#[test]
fn rejects_bad_configs() {
    let bad = [
        SessionConfig { scale: 17.0, ..small() },
        SessionConfig { method: Method::Parallel, ..small() },
        SessionConfig { noise: -0.1, ..small() },
        SessionConfig { v_max: 0.0, ..small() },
        SessionConfig { mesh: 1, ..small() },
        SessionConfig { step: 0.0, ..small() },
    ];
    for c in bad {
        assert!(create_session(c.clone()).is_err(), "{c:?}");
    }
}

#[test]
fn canvas_maps_onto_the_plane() {
    let c = SessionConfig::default();
    let p = c.canvas_to_plane(0.0, 0.0).unwrap();
    assert_eq!((p.x1, p.x2, p.x3), (0.0, -8.0, 8.0));
    let p = c.canvas_to_plane(0.75, 1.0).unwrap();
    assert_eq!((p.x1, p.x2, p.x3), (0.0, 4.0, -8.0));
}

#[test]
fn finalize_splits_at_the_pen_lift() {
    // global search: a sequential tracker lags behind jumps longer than v_max dt
    let config = SessionConfig {
        noise: 0.0,
        method: Method::Global,
        ..small()
    };
    let session = live(&config, &stroke());
    let (points, segments) = session.finalize_session().unwrap();
    assert_eq!(points.len(), stroke().len());
    assert!(segments.len() >= 2, "{:?}", segments.ranges);
    assert!(segments.ranges.iter().any(|r| r.start == 14), "{:?}", segments.ranges);
    let one = live(&small(), &stroke()[..1]);
    assert!(one.finalize_session().is_err());
}

#[test]
fn wire_messages_round_trip() {
    let session = live(&small(), &stroke());
    let (_, segments) = session.finalize_session().unwrap();
    let mut msgs = vec![
        WireMessage::Config(small()),
        WireMessage::StrokePoint { t: 0.1, u: 0.25, v: 0.75 },
        WireMessage::Finalize,
        WireMessage::Skip {
            t: 0.2,
            reason: "quiet".into(),
        },
        WireMessage::error("ingest", "boom"),
        StepOutcome::Point(session.points()[3]).into(),
    ];
    msgs.extend(segment_messages(&segments));
    for m in msgs {
        let line = m.to_line();
        assert!(!line.contains('\n'));
        assert_eq!(WireMessage::from_line(&line).unwrap(), m, "{line}");
    }
    let partial = WireMessage::from_line(r#"{"type":"config","noise":0.3}"#).unwrap();
    assert_eq!(
        partial,
        WireMessage::Config(SessionConfig {
            noise: 0.3,
            ..SessionConfig::default()
        })
    );
    assert!(WireMessage::from_line(r#"{"type":"config","nois":0.3}"#).is_err());
}

fn script(config: &SessionConfig) -> Vec<String> {
    let mut lines = vec![WireMessage::Config(config.clone()).to_line()];
    lines.extend(stroke().iter().map(|&(t, u, v)| WireMessage::StrokePoint { t, u, v }.to_line()));
    lines.push(WireMessage::Finalize.to_line());
    lines
}

#[test]
fn connection_reports_protocol_errors() {
    let mut conn = Connection::new();
    let phase = |replies: Vec<String>| match WireMessage::from_line(&replies[0]).unwrap() {
        WireMessage::Error { phase, .. } => phase,
        other => panic!("expected an error, got {other:?}"),
    };
    assert_eq!(phase(conn.handle_line("not json")), "protocol");
    assert_eq!(phase(conn.handle_line(r#"{"type":"skip","t":1,"reason":""}"#)), "protocol");
    assert_eq!(phase(conn.handle_line(r#"{"type":"finalize"}"#)), "finalize");
    assert_eq!(phase(conn.handle_line(r#"{"type":"config","scale":40}"#)), "config");
    // a stroke point without a config starts a default session
    let reply = conn.handle_line(r#"{"type":"stroke_point","t":0.1,"u":0.5,"v":0.5}"#);
    assert!(reply[0].contains("recon_point"), "{reply:?}");
    assert_eq!(phase(conn.handle_line(r#"{"type":"config"}"#)), "config");
}

#[test]
fn replay_reproduces_the_offline_points() {
    let config = small();
    let lines = script(&config);
    let out = replay_lines(lines.iter().map(String::as_str));
    assert_eq!(out, replay_lines(lines.iter().map(String::as_str)));
    let (_, offline) = replay_offline(&config, &stroke()).unwrap();
    let expected: Vec<String> = offline
        .points
        .iter()
        .map(|p| WireMessage::from(StepOutcome::Point(*p)).to_line())
        .collect();
    assert_eq!(out[1..=stroke().len()], expected[..]);
    assert!(out[stroke().len() + 1].contains("\"segment\""));
}

#[test]
fn tcp_sessions_are_isolated() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || serve(listener));
    let configs = [small(), SessionConfig { seed: 9, noise: 0.3, ..small() }];
    let scripts: Vec<Vec<String>> = configs.iter().map(script).collect();
    let mut clients: Vec<(TcpStream, BufReader<TcpStream>)> = (0..2)
        .map(|_| {
            let s = TcpStream::connect(addr).unwrap();
            let r = BufReader::new(s.try_clone().unwrap());
            (s, r)
        })
        .collect();
    let expected: Vec<Vec<String>> = scripts.iter().map(|s| replay_lines(s.iter().map(String::as_str))).collect();
    let mut got = vec![Vec::new(), Vec::new()];
    // interleave the two clients line by line
    for i in 0..scripts[0].len() {
        for c in 0..2 {
            let (w, r) = &mut clients[c];
            writeln!(w, "{}", scripts[c][i]).unwrap();
            // one reply per line, and the finalize reply carries the rest
            let n_replies = if i + 1 == scripts[c].len() { expected[c].len() - i } else { 1 };
            for _ in 0..n_replies {
                let mut line = String::new();
                r.read_line(&mut line).unwrap();
                got[c].push(line.trim_end().to_string());
            }
        }
    }
    assert_eq!(got, expected);
    assert_ne!(got[0], got[1]);
}

#[test]
fn held_stroke_clusters_within_a_cell() {
    let config = SessionConfig::default();
    let held: Vec<_> = (1..=15).map(|k| (k as f64 * 0.1, 0.5, 0.3)).collect();
    let session = live(&config, &held);
    let truth = config.canvas_to_plane(0.5, 0.3).unwrap();
    let cell = 2.0 * config.domain / (config.mesh - 1) as f64;
    assert_eq!(session.points().len() + session.skipped().len(), held.len());
    // Right after onset the retardation delay (about 0.03 s) is large next to
    // t itself and skews the amplitude profile; once |sin t| is a few tenths the
    // points settle.
    for p in session.points() {
        if (config.omega0 * p.t).sin().abs() >= 0.35 {
            assert!(p.z.distance(truth) <= cell, "{p:?}");
        } else {
            assert!(p.z.distance(truth) <= 3.0 * cell, "{p:?}");
        }
    }
}
