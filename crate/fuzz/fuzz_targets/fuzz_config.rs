#![no_main]

use libfuzzer_sys::fuzz_target;
use pmibound::config::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ScenarioConfig::from_toml(text) else {
        return;
    };
    // a validated config must survive serialization
    let again = ScenarioConfig::from_toml(&config.to_toml()).expect("re-serialized config parses");
    assert_eq!(again.to_toml(), config.to_toml());
    // building priors and models is cheap at small grids; errors are fine, panics are not
    if config.prior.grid() <= 513 {
        let _ = config.resolve();
    }
});
