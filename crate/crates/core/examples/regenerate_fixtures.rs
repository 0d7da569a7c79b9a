//! Prints the fixture file recomputed from the library.
//!
//! cargo run -p thompson-core --example regenerate_fixtures > crates/core/fixtures/fixtures.json

fn main() {
    let fixtures = thompson_core::suite::compute_fixtures();
    println!(
        "{}",
        serde_json::to_string_pretty(&fixtures).expect("fixtures serialize")
    );
}
