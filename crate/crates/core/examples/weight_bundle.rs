//! Builds a random bundle, writes it, reads it back and shows the validation errors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sfd::nn::{load_weights, ArchDescriptor, WeightBundle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arch = ArchDescriptor::desk();
    let mut bundle = WeightBundle::random(&arch, &mut ChaCha8Rng::seed_from_u64(1));
    bundle.metadata = serde_json::json!({ "note": "example" });
    let path = std::env::temp_dir().join("sfd_example.sfdw");
    bundle.write(&path)?;
    let (read_arch, read) = load_weights(&path)?;
    println!("{} tensors, {} bytes, round trip equal: {}", read.tensors.len(), std::fs::metadata(&path)?.len(), read == bundle);
    println!("arch {read_arch:?}");
    for (name, shape) in arch.parameters().iter().take(6) {
        println!("  {name:<28} {shape:?}");
    }
    let mut bytes = bundle.encode();
    *bytes.last_mut().unwrap() ^= 1;
    println!("flipped bit: {}", WeightBundle::decode(&bytes).unwrap_err());
    let mut missing = bundle.clone();
    missing.tensors.remove("ending.bias");
    println!("missing tensor: {}", WeightBundle::decode(&missing.encode()).unwrap_err());
    Ok(())
}
