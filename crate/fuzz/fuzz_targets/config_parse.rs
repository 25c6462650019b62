//! Experiment manifests: parsing must never panic, and every manifest that
//! resolves must survive a serialise/parse round trip unchanged.
//!
//! ```bash
//! cd fuzz
//! cargo +nightly fuzz run config_parse
//! ```

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotorlab_cli::{Command, ExperimentConfig};

fuzz_target!(|data: &str| {
    let Ok(config) = ExperimentConfig::from_toml_str(data) else {
        return;
    };
    for command in Command::ALL {
        if let Ok(resolved) = config.clone().resolve(command) {
            let text = resolved.to_toml_string();
            let reparsed =
                ExperimentConfig::from_toml_str(&text).expect("serialised config parses");
            assert_eq!(reparsed.to_toml_string(), text);
        }
    }
});
