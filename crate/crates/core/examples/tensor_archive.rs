// Write and read the binary tensor archive used for features and models.

use edgeshap::{Tensor, TensorArchive, TensorData};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut archive = TensorArchive::new(vec![Tensor::new("x", vec![2, 3], TensorData::F32(vec![0.5; 6]))])?;
    archive.push(Tensor::new("labels", vec![2], TensorData::I64(vec![1, 0])))?;

    let bytes = archive.to_bytes();
    println!("archive: {} tensors, {} bytes, magic {:?}", archive.len(), bytes.len(), std::str::from_utf8(&bytes[..4])?);
    let back = TensorArchive::from_bytes(&bytes)?;
    assert_eq!(back, archive);
    for t in back.tensors() {
        println!("  {} {:?} {:?}", t.name, t.shape, t.data.dtype());
    }

    // Truncated archives are rejected instead of read partially.
    assert!(TensorArchive::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
