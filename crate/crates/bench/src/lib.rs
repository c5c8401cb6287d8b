//! Criterion benchmarks for the hot kernels of `glfcert-core`. The benches
//! live in `benches/`; this library target only exists to host them.
