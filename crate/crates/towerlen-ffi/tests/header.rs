use std::path::PathBuf;
use std::process::Command;

#[test]
fn header_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("towerlen.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for sym in ["towerlen_tower_from_json", "towerlen_tower_free", "towerlen_string_free", "towerlen_last_error", "TOWERLEN_STATUS_OK"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let probe = std::env::temp_dir().join(format!("towerlen_probe_{}.c", std::process::id()));
    std::fs::write(
        &probe,
        "#include \"towerlen.h\"\nint main(void) { TowerlenTower *t = 0; TowerlenStatus s = towerlen_tower_from_json(\"{}\", &t); towerlen_tower_free(t); return s == TOWERLEN_STATUS_OK; }\n",
    )
    .unwrap();
    let status = Command::new(&cc).arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(dir.join("include")).arg(&probe).status();
    let _ = std::fs::remove_file(&probe);
    match status {
        Ok(s) => assert!(s.success(), "{cc} rejected the header"),
        Err(_) => eprintln!("no C compiler found; skipped compile check"),
    }
}
