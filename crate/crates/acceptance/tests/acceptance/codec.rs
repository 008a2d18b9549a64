use std::cell::Cell;
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use codetrail_core::{
    decode_actions, decode_snapshots, encode_actions, encode_snapshots, ActionRecord, EventType,
    SnapshotRecord,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            Just(",".to_string()),
            Just("\"".to_string()),
            Just("\n".to_string()),
            Just("\r".to_string()),
            Just("\r\n".to_string()),
            Just("ж".to_string()),
            Just("表".to_string()),
            Just("🦀".to_string()),
            "[a-z ()=+:]{1,6}",
            any::<char>().prop_map(String::from),
        ],
        0..16,
    )
    .prop_map(|parts| parts.concat())
}

fn snapshot() -> impl Strategy<Value = SnapshotRecord> {
    (0i64..4_102_444_800_000, "[a-z_]{1,10}", "[a-z]{1,6}", "[a-z_]{1,8}\\.[a-z]{1,3}", text()).prop_map(
        |(timestamp_millis, task_key, language, file_name, fragment)| SnapshotRecord {
            timestamp_millis,
            task_key,
            language,
            file_name,
            fragment,
        },
    )
}

fn action() -> impl Strategy<Value = ActionRecord> {
    (
        0i64..4_102_444_800_000,
        prop_oneof![Just(EventType::Action), Just(EventType::Run), Just(EventType::Lifecycle)],
        "[A-Za-z]{1,12}",
        text(),
    )
        .prop_map(|(timestamp_millis, event_type, action_id, detail)| ActionRecord {
            timestamp_millis,
            event_type,
            action_id,
            detail,
        })
}

pub fn round_trip() -> Result<String> {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let lists = (
        prop::collection::vec(snapshot(), 0..25),
        prop::collection::vec(action(), 0..25),
    );
    let records = Cell::new(0);
    let codec_time = Cell::new(Duration::ZERO);
    let quoted = Cell::new(0);
    let result = runner.run(&lists, |(snaps, acts)| {
        let start = Instant::now();
        let encoded = encode_snapshots(&snaps);
        let snaps_back = decode_snapshots(&encoded).unwrap();
        let acts_back = decode_actions(&encode_actions(&acts)).unwrap();
        codec_time.set(codec_time.get() + start.elapsed());
        if encoded.contains('"') {
            quoted.set(quoted.get() + 1);
        }
        records.set(records.get() + snaps.len() + acts.len());
        prop_assert_eq!(snaps_back, snaps);
        prop_assert_eq!(acts_back, acts);
        Ok(())
    });
    ensure!(result.is_ok(), "{}", result.unwrap_err());
    ensure!(quoted.get() > 100, "generator rarely produced quoted fields ({})", quoted.get());
    Ok(format!(
        "1000 snapshot/action list pairs, {} records, {:.2}s in the codec",
        records.get(),
        codec_time.get().as_secs_f64()
    ))
}
