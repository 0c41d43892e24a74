//! Binary snapshot round trip.

use nfield::grid::{read_snapshot, snapshot_header_len, write_snapshot, Field, GridSpec};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(2, 64, 4.0)?;
    let u = Field::from_fn(grid, |x| (x[0] * x[1]).sin())?;
    let mut bytes = Vec::new();
    let n = write_snapshot(&u, &mut bytes)?;
    println!(
        "{n} bytes ({} header + {} values)",
        snapshot_header_len(2),
        u.len()
    );
    let back = read_snapshot(bytes.as_slice())?;
    println!("identical after reading back: {}", back == u);
    Ok(())
}
