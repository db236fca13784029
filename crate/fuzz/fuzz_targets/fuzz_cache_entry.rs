#![no_main]

use libfuzzer_sys::fuzz_target;

use weightred::report::{Cache, CacheKey, CACHE_VERSION};

// Arbitrary bytes dropped into a cache slot must surface as a miss or a
// CacheCorrupt error, never a panic or a bogus hit.
fuzz_target!(|data: &[u8]| {
    let dir = std::env::temp_dir().join(format!("weightred-fuzz-{}", std::process::id()));
    let cache = match Cache::open(&dir) {
        Ok(c) => c,
        Err(_) => return,
    };
    let key = CacheKey {
        p: 5,
        d: 0,
        e: 0,
        method: "both".into(),
        seed: 0,
        version: CACHE_VERSION,
    };
    let path = dir.join(format!("{}.json", key.hash()));
    if std::fs::write(&path, data).is_err() {
        return;
    }
    match cache.get(&key) {
        Ok(Some(payload)) => {
            // a hit is only legitimate for a well-formed entry whose
            // payload re-serializes to hashable JSON
            let _ = payload.to_string();
        }
        Ok(None) | Err(_) => {}
    }
    let _ = std::fs::remove_file(&path);
});
