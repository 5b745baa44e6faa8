mod common;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use chrono::NaiveDate;
use debunk_core::Lang;
use debunk_testkit::gen;

/// Readers racing a writer that alternates two versions of one day always
/// see exactly one version.
#[test]
fn readers_never_see_a_mixed_day() {
    let dir = tempfile::tempdir().unwrap();
    let store = common::open_store(dir.path());
    let date = NaiveDate::from_ymd_opt(2019, 12, 7).unwrap();
    let en = Lang::new("en");
    let mut rng = gen::rng(9);
    let versions = [gen::ranked_day(&mut rng, 5, "old"), gen::ranked_day(&mut rng, 8, "new")];
    store.persist_batch(date, &en, versions[0].0.clone(), &versions[0].1).unwrap();

    let done = Arc::new(AtomicBool::new(false));
    let readers: Vec<_> = (0..4)
        .map(|_| {
            let store = Arc::clone(&store);
            let done = Arc::clone(&done);
            let en = en.clone();
            thread::spawn(move || {
                let mut reads = 0;
                while !done.load(Ordering::Relaxed) || reads == 0 {
                    let views = store.top_clusters(date, &en, 100);
                    let prefix = &views[0].cluster_id[..3];
                    let expected = if prefix == "old" { 5 } else { 8 };
                    assert_eq!(views.len(), expected);
                    assert!(views.iter().all(|v| v.member_ids.iter().all(|id| id.starts_with(prefix))));
                    reads += 1;
                }
                reads
            })
        })
        .collect();
    for i in 0..40 {
        let (ranked, tweets) = &versions[(i + 1) % 2];
        store.persist_batch(date, &en, ranked.clone(), tweets).unwrap();
    }
    done.store(true, Ordering::Relaxed);
    for r in readers {
        assert!(r.join().unwrap() > 0);
    }
}
