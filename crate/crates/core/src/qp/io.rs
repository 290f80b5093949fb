//! Problem directories: `A.mtx`, `C.mtx`, `b.txt` and optional `d.txt`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::io::{read_matrix_market, read_vector, write_matrix_market, write_vector};
use crate::qp::problem::QpProblem;

pub fn load_problem_dir(dir: &Path) -> Result<QpProblem> {
    let required = |name: &str| {
        let p = dir.join(name);
        if p.is_file() {
            Ok(p)
        } else {
            Err(Error::io(
                p,
                std::io::Error::new(std::io::ErrorKind::NotFound, "required file is missing"),
            ))
        }
    };
    let a = read_matrix_market(&required("A.mtx")?)?;
    let c = read_matrix_market(&required("C.mtx")?)?;
    let b = read_vector(&required("b.txt")?)?;
    let d_path = dir.join("d.txt");
    let d = if d_path.is_file() {
        read_vector(&d_path)?
    } else {
        vec![0.0; c.nrows()]
    };
    QpProblem::new(a, b, c, d)
}

pub fn write_problem_dir(dir: &Path, problem: &QpProblem) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_matrix_market(&dir.join("A.mtx"), problem.a())?;
    write_matrix_market(&dir.join("C.mtx"), problem.c())?;
    write_vector(&dir.join("b.txt"), problem.b())?;
    write_vector(&dir.join("d.txt"), problem.d())
}
