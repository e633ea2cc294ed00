//! Regenerate the committed desk-scale fixture:
//! `cargo run -p oeq-cli --example make_fixture`
//!
//! Output is deterministic; a test guards the committed files against
//! drifting from the generator.

fn main() -> anyhow::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/desk50");
    oeq_cli::fixture::write_to(&dir)?;
    println!("wrote fixture to {}", dir.display());
    Ok(())
}
