pub mod compare;
pub mod frontier;
pub mod score;
pub mod simulate;
pub mod table;

use std::path::Path;

use crate::report::InputsDigest;
use crate::stream_io::LoadedStream;

pub(crate) fn add_stream(digest: &mut InputsDigest, path: &Path, loaded: &LoadedStream) {
    let name = path
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    digest
        .add(&name, &loaded.csv_bytes)
        .add(&format!("{name}.meta"), &loaded.meta_bytes);
}
